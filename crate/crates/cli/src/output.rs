//! Single-writer output directory. Every file gets a `<file>.meta.toml`
//! sidecar holding the command and the fully resolved configuration, which
//! `--config` accepts to repeat the run.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::CliError;

pub struct Output {
    dir: PathBuf,
    command: String,
    preset: Option<String>,
    config: toml::Table,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, command: &str, preset: Option<&str>, config: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let config = toml::Table::try_from(config).map_err(|e| CliError::Io(format!("serializing config: {e}")))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.into(),
            preset: preset.map(String::from),
            config,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `name` with `body` and its sidecar with `notes` merged in.
    pub fn file(
        &mut self,
        name: &str,
        notes: toml::Table,
        body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let path = self.path(name);
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let f = fs::File::create(&path).map_err(io)?;
        let mut w = BufWriter::new(f);
        body(&mut w).map_err(io)?;
        w.flush().map_err(io)?;
        self.sidecar(name, notes)?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with a header line and pre-formatted rows.
    pub fn csv<I>(&mut self, name: &str, header: &str, rows: I, notes: toml::Table) -> Result<(), CliError>
    where
        I: IntoIterator<Item = String>,
    {
        self.file(name, notes, |w| {
            writeln!(w, "{header}")?;
            for r in rows {
                writeln!(w, "{r}")?;
            }
            Ok(())
        })
    }

    fn sidecar(&self, name: &str, notes: toml::Table) -> Result<(), CliError> {
        let mut t = toml::Table::new();
        t.insert("command".into(), self.command.clone().into());
        t.insert("file".into(), name.into());
        t.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        if let Some(p) = &self.preset {
            t.insert("preset".into(), p.clone().into());
        }
        if !notes.is_empty() {
            t.insert("notes".into(), toml::Value::Table(notes));
        }
        t.insert("config".into(), toml::Value::Table(self.config.clone()));
        let text = toml::to_string(&t).map_err(|e| CliError::Io(format!("sidecar: {e}")))?;
        let path = self.path(&format!("{name}.meta.toml"));
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Shortest round-trip scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn notes<const N: usize>(pairs: [(&str, toml::Value); N]) -> toml::Table {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
