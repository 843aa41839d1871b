//! On-disk circuit datasets: an `index.json` plus one artifact per circuit.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitError};

pub const INDEX_FILE: &str = "index.json";
pub const INDEX_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArtifactFormat {
    #[serde(rename = "native-v1")]
    NativeV1,
    #[serde(rename = "gates-v1")]
    GatesV1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    pub path: String,
    pub format: ArtifactFormat,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub version: u32,
    pub entries: Vec<DatasetEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("no dataset index at {0}")]
    MissingIndex(PathBuf),
    #[error("malformed dataset index: {0}")]
    MalformedIndex(String),
    #[error("malformed entry {index}: {reason}")]
    MalformedEntry { index: usize, reason: String },
    #[error("unsafe artifact path `{0}`")]
    UnsafePath(String),
    #[error("cannot parse artifact `{path}`: {reason}")]
    UnparsableArtifact { path: String, reason: String },
    #[error("invalid dataset: {0}")]
    Validation(String),
    #[error("{0} already exists; pass overwrite to replace it")]
    Conflict(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A path is safe when it is one non-empty component with no separators and
/// is not a parent or current-directory reference.
pub fn is_safe_artifact_path(path: &str) -> bool {
    !path.is_empty()
        && path != "."
        && !path.contains("..")
        && !path.contains('/')
        && !path.contains('\\')
        && !path.contains(':')
        && !path.contains('\0')
}

/// `name` with every character outside `[A-Za-z0-9_-]` replaced by `_`.
pub fn safe_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn artifact_file_name(name: &str) -> String {
    format!("{}.json", safe_stem(name))
}

impl DatasetIndex {
    /// Structural checks that do not touch the filesystem.
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.version != INDEX_VERSION {
            return Err(DatasetError::MalformedIndex(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let mut names = HashSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            if !is_safe_artifact_path(&e.path) {
                return Err(DatasetError::UnsafePath(e.path.clone()));
            }
            if e.name.is_empty() {
                return Err(DatasetError::MalformedEntry {
                    index: i,
                    reason: "empty name".into(),
                });
            }
            if !names.insert(e.name.as_str()) {
                return Err(DatasetError::MalformedEntry {
                    index: i,
                    reason: format!("duplicate name `{}`", e.name),
                });
            }
        }
        Ok(())
    }
}

/// Write `circuits` under `dir` as native artifacts plus an index.
pub fn save_dataset(circuits: &[Circuit], dir: &Path, overwrite: bool) -> Result<DatasetIndex, DatasetError> {
    let mut names = HashSet::new();
    let mut files = HashSet::new();
    for c in circuits {
        c.validate().map_err(|e| DatasetError::Validation(format!("{}: {e}", c.name)))?;
        if !names.insert(c.name.as_str()) {
            return Err(DatasetError::Validation(format!("duplicate circuit name `{}`", c.name)));
        }
        if !files.insert(artifact_file_name(&c.name)) {
            return Err(DatasetError::Validation(format!(
                "circuit name `{}` collides with another after path sanitisation",
                c.name
            )));
        }
    }
    if dir.exists() {
        if !overwrite {
            return Err(DatasetError::Conflict(dir.to_path_buf()));
        }
        fs::remove_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut entries = Vec::with_capacity(circuits.len());
    for c in circuits {
        let file = artifact_file_name(&c.name);
        let path = dir.join(&file);
        let mut stored = c.clone();
        let metadata = std::mem::take(&mut stored.metadata);
        let text = serde_json::to_string_pretty(&stored).expect("circuit serializes");
        fs::write(&path, text + "\n").map_err(io_err(&path))?;
        entries.push(DatasetEntry {
            name: c.name.clone(),
            path: file,
            format: ArtifactFormat::NativeV1,
            metadata,
        });
    }
    let index = DatasetIndex {
        version: INDEX_VERSION,
        entries,
    };
    write_index(&index, dir)?;
    Ok(index)
}

pub fn write_index(index: &DatasetIndex, dir: &Path) -> Result<(), DatasetError> {
    let path = dir.join(INDEX_FILE);
    let text = serde_json::to_string_pretty(index).expect("index serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

pub fn read_index(dir: &Path) -> Result<DatasetIndex, DatasetError> {
    let path = dir.join(INDEX_FILE);
    if !path.is_file() {
        return Err(DatasetError::MissingIndex(path));
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| DatasetError::MalformedIndex(e.to_string()))?;
    let entries = raw
        .get("entries")
        .and_then(|e| e.as_array())
        .ok_or_else(|| DatasetError::MalformedIndex("missing `entries` array".into()))?;
    // Decode entry by entry so a bad one is reported with its position.
    let mut parsed = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let entry: DatasetEntry = serde_json::from_value(e.clone()).map_err(|err| DatasetError::MalformedEntry {
            index: i,
            reason: err.to_string(),
        })?;
        parsed.push(entry);
    }
    let version = raw
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| DatasetError::MalformedIndex("missing `version`".into()))?;
    let index = DatasetIndex {
        version: version as u32,
        entries: parsed,
    };
    index.validate()?;
    Ok(index)
}

fn load_entry(dir: &Path, entry: &DatasetEntry) -> Result<Circuit, DatasetError> {
    if !is_safe_artifact_path(&entry.path) {
        return Err(DatasetError::UnsafePath(entry.path.clone()));
    }
    let path = dir.join(&entry.path);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let unparsable = |reason: String| DatasetError::UnparsableArtifact {
        path: entry.path.clone(),
        reason,
    };
    let mut circuit = match entry.format {
        ArtifactFormat::NativeV1 => {
            let mut c: Circuit = serde_json::from_str(&text).map_err(|e| unparsable(e.to_string()))?;
            c.validate().map_err(|e: CircuitError| unparsable(e.to_string()))?;
            c.name = entry.name.clone();
            c
        }
        ArtifactFormat::GatesV1 => {
            Circuit::parse_gate_text(&entry.name, &text).map_err(|e| unparsable(e.to_string()))?
        }
    };
    circuit.metadata.extend(entry.metadata.clone());
    Ok(circuit)
}

/// Load every circuit in index order.
pub fn load_dataset(dir: &Path) -> Result<Vec<Circuit>, DatasetError> {
    let index = read_index(dir)?;
    index.entries.iter().map(|e| load_entry(dir, e)).collect()
}
