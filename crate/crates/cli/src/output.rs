//! Atomic file output with sidecars next to the main document.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

pub struct Output {
    path: Option<PathBuf>,
    args: Vec<String>,
    written: Vec<PathBuf>,
}

pub fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn atomic_write(path: &Path, body: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(body.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

impl Output {
    pub fn new(path: Option<PathBuf>, args: Vec<String>) -> Self {
        Self { path, args, written: Vec::new() }
    }

    /// Main document: to --out, or stdout.
    pub fn write(&mut self, body: &str) -> Result<()> {
        match &self.path {
            Some(p) => {
                atomic_write(p, body)?;
                self.written.push(p.clone());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    /// Like `write`, but nothing goes to stdout when --out is absent.
    pub fn write_or_skip(&mut self, body: &str) -> Result<()> {
        if self.path.is_some() {
            self.write(body)?;
        }
        Ok(())
    }

    /// `<stem>.<name>.csv` beside --out; returns the file name, or None without --out.
    pub fn sidecar(&mut self, name: &str, body: &str) -> Result<Option<String>> {
        let Some(p) = &self.path else { return Ok(None) };
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
        let file = format!("{stem}.{name}.csv");
        let path = p.with_file_name(&file);
        atomic_write(&path, body)?;
        self.written.push(path);
        Ok(Some(file))
    }

    /// Writes the `.log` sidecar listing the command line and files.
    pub fn finish(&mut self) -> Result<()> {
        let Some(p) = self.path.clone() else { return Ok(()) };
        if self.written.is_empty() {
            return Ok(());
        }
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut log = format!("time_unix {secs}\nversion {}\ncommand {}\n", env!("CARGO_PKG_VERSION"), self.args.join(" "));
        for w in &self.written {
            log.push_str(&format!("wrote {}\n", w.display()));
        }
        atomic_write(&p.with_extension("log"), &log)
    }
}
