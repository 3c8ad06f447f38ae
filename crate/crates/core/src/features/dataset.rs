//! Dataset files: JSON lines `{"label":0|1,"dim":D,"x":[[idx,val],...]}`
//! with a FeatureSpec manifest stored beside them.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chunking::DirectionLabel;
use crate::error::{Error, Result};

use super::FeatureVector;

/// Description of the vectorization scheme a dataset was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub kind: String,
    pub dimension: usize,
    pub basis: f64,
    pub normalize_pos: bool,
    pub fw_list_len: Option<usize>,
    pub fw_list_sha256: Option<String>,
    pub fw_list_source: Option<String>,
    pub top_k: Option<usize>,
    pub vocab: Option<Vec<Vec<String>>>,
}

impl FeatureManifest {
    /// Stable hash of the manifest, stored in trained models.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("manifest serialize");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Manifest path for a dataset path: `x.jsonl` -> `x.manifest.json`.
pub fn manifest_path(dataset: &Path) -> PathBuf {
    dataset.with_extension("manifest.json")
}

#[derive(Serialize, Deserialize)]
struct Row {
    label: u8,
    dim: usize,
    x: Vec<(u32, f64)>,
}

/// Write vectors as JSON lines and the manifest beside them.
pub fn write_dataset(
    path: &Path,
    vectors: &[FeatureVector],
    manifest: &FeatureManifest,
) -> Result<()> {
    let mut out = String::new();
    for vector in vectors {
        let row = Row {
            label: vector.label.as_index(),
            dim: vector.dimension,
            x: vector.entries.clone(),
        };
        out.push_str(&serde_json::to_string(&row).expect("row serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))?;
    let manifest_file = manifest_path(path);
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serialize");
    json.push('\n');
    fs::write(&manifest_file, json).map_err(|e| Error::io(&manifest_file, e))
}

/// Read a dataset file; all rows must agree on the dimension and carry
/// strictly increasing in-range indices.
pub fn read_dataset(path: &Path) -> Result<Vec<FeatureVector>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut vectors: Vec<FeatureVector> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let at_line = |e: String| Error::Data(format!("{}: line {}: {e}", path.display(), idx + 1));
        let row: Row = serde_json::from_str(&line).map_err(|e| at_line(e.to_string()))?;
        let label = DirectionLabel::from_index(row.label).map_err(|e| at_line(e.to_string()))?;
        if let Some(first) = vectors.first() {
            if first.dimension != row.dim {
                return Err(at_line(format!(
                    "dimension {} differs from the dataset dimension {}",
                    row.dim, first.dimension
                )));
            }
        }
        let mut last: Option<u32> = None;
        for &(i, v) in &row.x {
            if (i as usize) >= row.dim {
                return Err(at_line(format!("index {i} out of range for dimension {}", row.dim)));
            }
            if last.is_some_and(|prev| prev >= i) {
                return Err(at_line("indices are not strictly increasing".into()));
            }
            if !v.is_finite() {
                return Err(at_line(format!("non-finite value at index {i}")));
            }
            last = Some(i);
        }
        vectors.push(FeatureVector { dimension: row.dim, entries: row.x, label });
    }
    Ok(vectors)
}

/// Read the manifest stored beside a dataset.
pub fn read_manifest(path: &Path) -> Result<FeatureManifest> {
    let manifest_file = manifest_path(path);
    let json = fs::read_to_string(&manifest_file).map_err(|e| Error::io(&manifest_file, e))?;
    serde_json::from_str(&json)
        .map_err(|e| Error::Data(format!("{}: {e}", manifest_file.display())))
}
