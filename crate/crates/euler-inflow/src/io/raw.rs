//! Raw little-endian f64 arrays with a JSON descriptor beside them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::fields::{Grid3, VectorField};

/// Sidecar describing the layout of a `.f64` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawDescriptor {
    pub name: String,
    pub dtype: String,
    pub byte_order: String,
    /// Array shape, slowest axis first.
    pub shape: Vec<usize>,
    pub axes: Vec<String>,
    pub grid: Grid3,
    pub dt: f64,
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Write slices as [t][component][k][j][i].
pub fn write_series(path: &Path, name: &str, grid: &Grid3, dt: f64, slices: &[VectorField]) -> Result<RawDescriptor, IoError> {
    let mut bytes = Vec::with_capacity(slices.len() * 3 * grid.len() * 8);
    for s in slices {
        for c in &s.c {
            for v in c {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    fs::write(path, bytes)?;
    let desc = RawDescriptor {
        name: name.to_string(),
        dtype: "f64".into(),
        byte_order: "little".into(),
        shape: vec![slices.len(), 3, grid.n3, grid.n2, grid.n1],
        axes: ["t", "component", "z", "y", "x"].map(String::from).to_vec(),
        grid: *grid,
        dt,
    };
    let json = serde_json::to_string_pretty(&desc).map_err(|e| IoError::Format(e.to_string()))?;
    fs::write(sidecar(path), json)?;
    Ok(desc)
}

pub fn read_series(path: &Path) -> Result<(RawDescriptor, Vec<VectorField>), IoError> {
    let desc: RawDescriptor = serde_json::from_str(&fs::read_to_string(sidecar(path))?).map_err(|e| IoError::Format(e.to_string()))?;
    let bytes = fs::read(path)?;
    let n = desc.grid.len();
    if desc.shape.len() != 5 || bytes.len() != desc.shape[0] * 3 * n * 8 {
        return Err(IoError::Format(format!("{} does not match its descriptor", path.display())));
    }
    let values: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let slices = values
        .chunks(3 * n)
        .map(|s| VectorField { grid: desc.grid, c: [s[..n].to_vec(), s[n..2 * n].to_vec(), s[2 * n..].to_vec()] })
        .collect();
    Ok((desc, slices))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid3::new(4, 4, 8, 1.0, 2.0).unwrap();
        let s = vec![VectorField::from_fn(g, |x| [x[0], x[1] * x[2], -1.0]); 2];
        let path = dir.path().join("u.f64");
        write_series(&path, "velocity", &g, 0.25, &s).unwrap();
        let (d, back) = read_series(&path).unwrap();
        assert_eq!(d.shape, vec![2, 3, 8, 4, 4]);
        assert_eq!(back, s);
    }
}
