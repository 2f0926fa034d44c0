//! Built-in configurations, compiled into the binary from `presets/`.

use crate::config::RunConfig;
use crate::CliError;

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig2-ci", include_str!("../presets/fig2-ci.toml")),
    ("fig4a", include_str!("../presets/fig4a.toml")),
    ("fig4a-ci", include_str!("../presets/fig4a-ci.toml")),
    ("fig4b", include_str!("../presets/fig4b.toml")),
    ("fig4b-ci", include_str!("../presets/fig4b-ci.toml")),
    ("fig4c", include_str!("../presets/fig4c.toml")),
    ("fig4c-ci", include_str!("../presets/fig4c-ci.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig5-ci", include_str!("../presets/fig5-ci.toml")),
    ("oracle", include_str!("../presets/oracle.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Result<RunConfig, CliError> {
    let t = text(name).ok_or_else(|| {
        CliError::Config(format!("unknown preset `{name}` (available: {})", names().collect::<Vec<_>>().join(", ")))
    })?;
    RunConfig::from_toml(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for n in names() {
            load(n).unwrap_or_else(|e| panic!("{n}: {e}"));
        }
    }
}
