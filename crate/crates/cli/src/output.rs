use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Output directory that refuses to clobber existing files unless forced.
pub struct OutputDir {
    dir: PathBuf,
    force: bool,
}

impl OutputDir {
    pub fn new(dir: &Path, force: bool) -> Self {
        OutputDir { dir: dir.to_path_buf(), force }
    }

    /// Creates the directory and checks every target up front, so a refused
    /// run writes nothing.
    pub fn claim(&self, names: &[String]) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", self.dir.display())))?;
        if self.force {
            return Ok(());
        }
        for name in names {
            let path = self.dir.join(name);
            if path.exists() {
                return Err(CliError::io(format!(
                    "{} exists; pass --force to overwrite",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.path(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }
}
