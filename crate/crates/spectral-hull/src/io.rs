//! JSON input files: sets, points, problem descriptions.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use spectral_hull_core::relax::ProblemSpec;
use spectral_hull_core::sets::SetSpec;
use spectral_hull_core::{Error, PointV, SpectralSystem};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {msg}")]
    Shape { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: Error },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_pretty(value) + "\n").map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output types serialize")
}

pub fn read_set(path: &Path) -> Result<SetSpec, IoError> {
    read_json(path)
}

pub fn read_problem(path: &Path) -> Result<ProblemSpec, IoError> {
    read_json(path)
}

/// Numbers of a flat array, or of a nested array read row by row.
pub fn flatten(v: &Value) -> Option<Vec<f64>> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| vec![x]),
        Value::Array(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(flatten(item)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// A point of `V`: a flat row-major array, or a list of rows for matrix
/// systems.
pub fn read_point(sys: &SpectralSystem, path: &Path) -> Result<PointV, IoError> {
    let v: Value = read_json(path)?;
    let shape = |msg: &str| IoError::Shape {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };
    if !v.is_array() {
        return Err(shape("a point must be a JSON array of numbers"));
    }
    let data = flatten(&v).ok_or_else(|| shape("a point must contain only numbers"))?;
    sys.point_from_flat(data).map_err(|source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}
