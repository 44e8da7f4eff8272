//! Plain-text matrices: a header `dim rows cols`, then row-major decimals.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use super::{OperatorProfile, OperatorRep};
use crate::error::{Error, Result};
use crate::grid::GridDomain;

/// Reads an operator for `domain`; refuses non-square or mis-sized matrices.
pub fn read_matrix_file(path: &Path, domain: GridDomain, profile: OperatorProfile) -> Result<OperatorRep> {
    let text = fs::read_to_string(path)?;
    parse_matrix(&text, domain, profile)
}

pub(crate) fn parse_matrix(text: &str, domain: GridDomain, profile: OperatorProfile) -> Result<OperatorRep> {
    let mut tokens = text.split_whitespace();
    let mut header = [0usize; 3];
    for h in header.iter_mut() {
        let tok = tokens.next().ok_or_else(|| Error::Parse("truncated header".into()))?;
        *h = tok.parse().map_err(|_| Error::Parse(format!("bad header field {tok:?}")))?;
    }
    let [dim, rows, cols] = header;
    if dim != domain.dim() {
        return Err(Error::Parse(format!("matrix declares dimension {dim}, domain has {}", domain.dim())));
    }
    if rows != cols || rows != domain.cell_count() {
        return Err(Error::Parse(format!(
            "matrix is {rows}x{cols}, domain needs {0}x{0}",
            domain.cell_count()
        )));
    }
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
        .collect::<Result<_>>()?;
    if values.len() != rows * cols {
        return Err(Error::Parse(format!("expected {} entries, found {}", rows * cols, values.len())));
    }
    OperatorRep::from_matrix(domain, DMatrix::from_row_slice(rows, cols, &values), profile)
}

/// Writes with 17 significant digits, so reading back is exact.
pub fn write_matrix_file(path: &Path, op: &OperatorRep) -> Result<()> {
    let m = op.matrix();
    let mut out = format!("{} {} {}\n", op.domain().dim(), m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::riesz_potential;

    #[test]
    fn round_trip() {
        let d = GridDomain::unit(1, 3).unwrap();
        let op = riesz_potential(d, 0.3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        write_matrix_file(&path, &op).unwrap();
        let back = read_matrix_file(&path, d, op.profile).unwrap();
        assert_eq!(back.matrix(), op.matrix());
    }

    #[test]
    fn refuses_bad_shapes() {
        let d = GridDomain::unit(1, 1).unwrap();
        let p = OperatorProfile::default();
        assert!(parse_matrix("1 2 2\n1 0\n0 1\n", d, p).is_ok());
        assert!(parse_matrix("1 2 3\n1 0 0\n0 1 0\n", d, p).is_err());
        assert!(parse_matrix("1 3 3\n1 0 0 0 1 0 0 0 1\n", d, p).is_err());
        assert!(parse_matrix("2 2 2\n1 0\n0 1\n", d, p).is_err());
        assert!(parse_matrix("1 2 2\n1 0\n0\n", d, p).is_err());
        assert!(parse_matrix("1 2 2\n1 x\n0 1\n", d, p).is_err());
    }
}
