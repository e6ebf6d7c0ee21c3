//! Atomic report files named `<command>-<timestamp>[-suffix].<ext>`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

pub struct Outputs {
    dir: PathBuf,
    stem: String,
}

impl Outputs {
    /// Picks a stem that does not collide with existing reports in `dir`.
    pub fn new(dir: &Path, command: &str) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let ts = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
        let mut stem = format!("{command}-{ts}");
        let mut k = 1;
        while dir.join(format!("{stem}.json")).exists() {
            stem = format!("{command}-{ts}-{k}");
            k += 1;
        }
        Ok(Outputs {
            dir: dir.to_path_buf(),
            stem,
        })
    }

    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}.{ext}", self.stem))
    }

    /// Writes through a temp file in the same directory, then renames.
    pub fn write_atomic<F>(&self, suffix: &str, ext: &str, body: F) -> io::Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> io::Result<()>,
    {
        let target = self.path(suffix, ext);
        let tmp = NamedTempFile::new_in(&self.dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            body(&mut w)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| e.error)?;
        Ok(target)
    }
}
