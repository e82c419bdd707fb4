use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Output directory that remembers what was written to it.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Writes `name` through `body` and records its hash.
    pub fn write<F>(&mut self, name: &str, body: F) -> evecerr::Result<()>
    where
        F: FnOnce(&mut dyn Write) -> evecerr::Result<()>,
    {
        let path = self.root.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w)?;
        w.flush()?;
        drop(w);
        let digest = Sha256::digest(fs::read(&path)?);
        self.files.push(OutputFile {
            path: name.to_string(),
            sha256: hex(&digest),
        });
        Ok(())
    }

    pub fn finish(self, experiment: &str, config: &ExperimentConfig, wall_time_s: f64) -> io::Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            experiment: &'a str,
            config: &'a ExperimentConfig,
            outputs: &'a [OutputFile],
            wall_time_s: f64,
        }
        let manifest = Manifest {
            experiment,
            config,
            outputs: &self.files,
            wall_time_s,
        };
        let mut w = BufWriter::new(File::create(self.root.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()
    }
}
