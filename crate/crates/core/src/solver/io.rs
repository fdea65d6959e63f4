//! Raw grid files: three little-endian `u64` (`n`, `N`, axis count) followed
//! by the row-major `f64` samples, also little-endian.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::grid::{ScalarField, TorusGrid};
use super::SolveResult;
use crate::{Error, Result};

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn encode_grid(field: &ScalarField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(24 + 8 * g.len());
    for h in [g.n(), g.points_per_axis(), g.axes()] {
        out.extend_from_slice(&(h as u64).to_le_bytes());
    }
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_grid(bytes: &[u8]) -> Result<ScalarField> {
    if bytes.len() < 24 {
        return Err(Error::Format(format!("grid file too short: {} bytes", bytes.len())));
    }
    let header = |i: usize| u64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().expect("8 bytes")) as usize;
    let (n, points, axes) = (header(0), header(1), header(2));
    let grid = TorusGrid::new(n, points)?;
    if axes != grid.axes() {
        return Err(Error::Format(format!("axis count {axes} does not match n = {n}")));
    }
    let body = &bytes[24..];
    if body.len() != 8 * grid.len() {
        return Err(Error::Format(format!(
            "expected {} samples, found {} bytes",
            grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    ScalarField::new(grid, values)
}

pub fn write_grid(path: &Path, field: &ScalarField) -> Result<()> {
    write_atomic(path, &encode_grid(field))
}

pub fn read_grid(path: &Path) -> Result<ScalarField> {
    decode_grid(&fs::read(path)?)
}

pub fn metadata_text(result: &SolveResult) -> String {
    format!(
        "b = {:.17e}\nresidual_inf = {:.6e}\nnewton_iters = {}\nmin_eig_margin = {:.17e}\nmax_pair_gap = {:.6e}\nneg_inf_phi = {:.17e}\n",
        result.b,
        result.residual_inf,
        result.newton_iters,
        result.min_eig_margin,
        result.max_pair_gap,
        -result.phi.inf(),
    )
}

pub fn write_metadata(path: &Path, result: &SolveResult) -> Result<()> {
    write_atomic(path, metadata_text(result).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let g = TorusGrid::new(1, 8).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] - 2.0 * x[3]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.grid");
        write_grid(&p, &f).unwrap();
        let bytes = fs::read(&p).unwrap();
        assert_eq!(&bytes[..8], &1u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &4u64.to_le_bytes());
        assert_eq!(read_grid(&p).unwrap(), f);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(matches!(decode_grid(&[0; 10]), Err(Error::Format(_))));
        let g = TorusGrid::new(1, 8).unwrap();
        let mut bytes = encode_grid(&ScalarField::zeros(g));
        bytes.pop();
        assert!(matches!(decode_grid(&bytes), Err(Error::Format(_))));
        let mut bytes = encode_grid(&ScalarField::zeros(g));
        bytes[16] = 5;
        assert!(matches!(decode_grid(&bytes), Err(Error::Format(_))));
    }
}
