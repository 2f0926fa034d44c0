use std::f64::consts::PI;

use biphoton::diagrams::{hom_transform, HomRotation};
use biphoton::exciton::SystemSpec;
use biphoton::photon_state::{kernel_weights, normalize, schmidt_weights, symmetrize, Exchange, FrequencyGrid, Jsa};
use biphoton::signals::{run_cycling, Component, CyclingProtocol, ProtocolSet, SignalSource};
use biphoton::{C64, MEV};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn random_jsa(n: usize) -> impl Strategy<Value = Jsa> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
        let grid = FrequencyGrid::new(1.8, 2.2, n).unwrap();
        let amplitude = DMatrix::from_fn(n, n, |i, j| C64::new(v[2 * (i * n + j)], v[2 * (i * n + j) + 1]));
        Jsa { grid_a: grid, grid_b: grid, amplitude, exchange: Exchange::Unsymmetrized }
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchange_picks_up_the_preparation_phase(phi in random_jsa(7), theta in -PI..PI) {
        let s = symmetrize(&phi, theta).unwrap();
        let mirror = symmetrize(&phi, -theta).unwrap();
        let t = s.transposed().unwrap();
        let phase = C64::from_polar(1.0, theta);
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    prop_assert!((t.amplitude[(i, j)] - phase * mirror.amplitude[(i, j)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn normalization_gives_unit_norm(phi in random_jsa(6), scale in 1e-3f64..1e3) {
        let n = normalize(&phi.scaled(scale)).unwrap();
        prop_assert!((n.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(n.is_normalized());
    }

    #[test]
    fn singular_values_match_kernel_eigenvalues(phi in random_jsa(9), theta in -PI..PI) {
        let s = normalize(&symmetrize(&phi, theta).unwrap()).unwrap();
        let w = schmidt_weights(&s).unwrap();
        let (k1, k2) = kernel_weights(&s).unwrap();
        prop_assert!(close(&w, &k1, 1e-8));
        prop_assert!(close(&w, &k2, 1e-8));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn antisymmetric_state_has_paired_weights(phi in random_jsa(8)) {
        let s = normalize(&symmetrize(&phi, PI).unwrap()).unwrap();
        let w = schmidt_weights(&s).unwrap();
        for pair in w.chunks(2) {
            prop_assert!((pair[0] - pair[1]).abs() < 1e-10, "{:?}", w);
        }
    }

    #[test]
    fn splitter_is_unitary(angle in 0.0f64..(PI / 2.0), delay in -1e4f64..1e4, omega in 0.5f64..5.0) {
        let rot = HomRotation::new(angle.cos(), angle.sin(), delay).unwrap();
        let m = hom_transform(&rot, omega);
        for r in 0..2 {
            for c in 0..2 {
                let dot: C64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cycling_is_linear_in_the_protocol(x in -2.0f64..2.0, y in -2.0f64..2.0, k in 0usize..4, l in 0usize..4) {
        let sys = SystemSpec::minimal(2.0, 3.9, 10.0 * MEV).build().unwrap();
        let grid = FrequencyGrid::new(1.8, 2.2, 9).unwrap();
        let pump = biphoton::photon_state::PumpParams::new(3.95, 0.2).unwrap();
        let pm = biphoton::photon_state::PhaseMatchParams::new(2.0, 2.0, 2.0, 8.0).unwrap();
        let phi = normalize(&biphoton::photon_state::build_jsa(grid, grid, &pump, &pm)).unwrap();
        let points = vec![(1.9, 2.05), (2.1, 1.85), (2.0, 2.0)];
        let mut src = SignalSource::new(&sys, &phi, points);
        let p = CyclingProtocol::builtin(Component::ALL[k], ProtocolSet::Default);
        let q = CyclingProtocol::builtin(Component::ALL[l], ProtocolSet::PaperVerbatim);
        let a = run_cycling(&p, &mut src).unwrap();
        let b = run_cycling(&q, &mut src).unwrap();
        let both = run_cycling(&p.combine(&q, x, y), &mut src).unwrap();
        let scale = a.iter().chain(&b).fold(1e-300f64, |m, v| m.max(v.abs()));
        for i in 0..both.len() {
            prop_assert!((both[i] - (x * a[i] + y * b[i])).abs() <= 1e-12 * scale);
        }
    }
}
