//! Where command output goes: a file under the output directory, written
//! through a temporary file and a rename, or stdout.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).with_context(|| format!("creating output directory {}", d.display()))?;
        }
        Ok(Self { dir: dir.map(Path::to_path_buf) })
    }

    /// Writes `text` to `<dir>/<name>`, or to stdout without a directory.
    pub fn emit(&self, name: &str, text: &str) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    /// Like [`Sink::emit`], but dropped when writing to stdout. For side
    /// files such as descent traces.
    pub fn emit_side(&self, name: &str, text: &str) -> Result<()> {
        if self.dir.is_some() {
            self.emit(name, text)?;
        }
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(name, &text)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn side_files_need_a_directory() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(Some(&dir.path().join("nested"))).unwrap();
        sink.emit_side("t.csv", "x\n").unwrap();
        assert!(dir.path().join("nested/t.csv").exists());
    }
}
