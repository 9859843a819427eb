use crate::error::{Error, Result};
use crate::volume::VoxelGrid;

fn err(message: impl Into<String>) -> Error {
    Error::format("VOXU8", message)
}

/// Reads `VOXU8 <nx> <ny> <nz>\n` followed by exactly `nx·ny·nz` bytes.
pub fn read_vox(bytes: &[u8]) -> Result<VoxelGrid> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| err("missing header line"))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| err("header is not ASCII"))?;
    let parts: Vec<&str> = header.split(' ').collect();
    if parts.len() != 4 || parts[0] != "VOXU8" {
        return Err(err(format!("malformed header {header:?}")));
    }
    let mut dims = [0usize; 3];
    for (d, s) in dims.iter_mut().zip(&parts[1..]) {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(format!("malformed extent {s:?} in header")));
        }
        *d = s.parse().map_err(|_| err(format!("extent {s} too large")))?;
    }
    let want = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| err("dimensions overflow"))?;
    let payload = &bytes[nl + 1..];
    if payload.len() != want {
        return Err(err(format!(
            "header declares {want} voxels, payload has {} bytes",
            payload.len()
        )));
    }
    VoxelGrid::from_raw(dims, payload.to_vec())
}

pub fn write_vox(grid: &VoxelGrid) -> Vec<u8> {
    let [x, y, z] = grid.dims();
    let mut out = format!("VOXU8 {x} {y} {z}\n").into_bytes();
    out.extend_from_slice(grid.as_bytes());
    out
}
