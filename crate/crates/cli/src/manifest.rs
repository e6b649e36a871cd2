//! Run manifests: one JSON record per artifact-producing command.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let mut f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let mut hasher = Sha256::new();
        let mut buf = vec![0u8; 1 << 16];
        let mut bytes = 0u64;
        loop {
            let n = f.read(&mut buf)?;
            if n == 0 {
                break;
            }
            hasher.update(&buf[..n]);
            bytes += n as u64;
        }
        Ok(FileDigest {
            path: path.to_path_buf(),
            sha256: format!("{:x}", hasher.finalize()),
            bytes,
        })
    }

    /// Whether the file on disk still has this digest.
    pub fn matches_disk(&self) -> bool {
        FileDigest::of(&self.path).map_or(false, |d| d == *self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    /// Digest of the settings that shaped the outputs, for resuming.
    #[serde(default)]
    pub settings_sha256: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Collects inputs and outputs while a command runs.
pub struct Recorder {
    manifest: RunManifest,
}

impl Recorder {
    pub fn start(subcommand: &str) -> Self {
        Recorder {
            manifest: RunManifest {
                tool: "synthgraph".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: subcommand.into(),
                argv: std::env::args().collect(),
                seeds: BTreeMap::new(),
                settings_sha256: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
                started_unix: now(),
                finished_unix: 0,
                status: Status::Ok,
                error: None,
            },
        }
    }

    pub fn seed(&mut self, name: &str, value: u64) -> &mut Self {
        self.manifest.seeds.insert(name.into(), value);
        self
    }

    pub fn settings<S: Serialize>(&mut self, settings: &S) -> Result<&mut Self> {
        self.manifest.settings_sha256 = Some(sha256_hex(&serde_json::to_vec(settings)?));
        Ok(self)
    }

    /// Records an input once; repeats are ignored.
    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        if self.manifest.inputs.iter().any(|d| d.path == path) {
            return Ok(self);
        }
        self.manifest.inputs.push(FileDigest::of(path)?);
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> Result<&mut Self> {
        self.manifest.outputs.push(FileDigest::of(path)?);
        Ok(self)
    }

    pub fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    /// Writes the manifest; a failed command records its error.
    pub fn finish(mut self, path: &Path, error: Option<&anyhow::Error>) -> Result<RunManifest> {
        self.manifest.finished_unix = now();
        if let Some(e) = error {
            self.manifest.status = Status::Failed;
            self.manifest.error = Some(format!("{e:#}"));
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_string_pretty(&self.manifest)? + "\n")
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(self.manifest)
    }
}

pub fn load(path: &Path) -> Result<RunManifest> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// `<path>.manifest.json`
pub fn beside(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
