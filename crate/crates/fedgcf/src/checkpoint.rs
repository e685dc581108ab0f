//! Model checkpoints: `<stem>.bin` holds the parameters as little-endian
//! 64-bit floats, `<stem>.json` the manifest needed to slice them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fedgcf_core::gnn::{Manifest, ModelParams, ParamShape};

use crate::error::{Error, IoContext, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Entry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ManifestFile {
    dtype: String,
    num_params: usize,
    entries: Vec<Entry>,
}

const DTYPE: &str = "f64-le";

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn save(params: &ModelParams, stem: &Path) -> Result<()> {
    if let Some(parent) = stem.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).at(parent)?;
    }
    let manifest = ManifestFile {
        dtype: DTYPE.into(),
        num_params: params.len(),
        entries: params
            .manifest()
            .entries()
            .iter()
            .map(|e| Entry {
                name: e.name.clone(),
                shape: e.shape.clone(),
            })
            .collect(),
    };
    let json_path = with_suffix(stem, ".json");
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    fs::write(&json_path, json).at(&json_path)?;
    let bin_path = with_suffix(stem, ".bin");
    fs::write(&bin_path, params.to_le_bytes()).at(&bin_path)
}

pub fn load(stem: &Path) -> Result<ModelParams> {
    let json_path = with_suffix(stem, ".json");
    let manifest: ManifestFile = serde_json::from_slice(&fs::read(&json_path).at(&json_path)?)?;
    if manifest.dtype != DTYPE {
        return Err(Error::Integrity(format!(
            "{}: unsupported dtype {:?}",
            json_path.display(),
            manifest.dtype
        )));
    }
    let manifest_core = Manifest::new(
        manifest
            .entries
            .into_iter()
            .map(|e| ParamShape::new(e.name, e.shape))
            .collect(),
    );
    if manifest_core.num_params() != manifest.num_params {
        return Err(Error::Integrity(format!(
            "{}: entries describe {} parameters, header says {}",
            json_path.display(),
            manifest_core.num_params(),
            manifest.num_params
        )));
    }
    let bin_path = with_suffix(stem, ".bin");
    Ok(ModelParams::from_le_bytes(manifest_core, &fs::read(&bin_path).at(&bin_path)?)?)
}
