//! Matrix Market (coordinate, real, symmetric) and convergence-history CSV.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::driver::ConvergenceRecord;
use crate::error::{Error, Result};
use crate::operators::SparseSymMatrix;

pub const HISTORY_HEADER: &str = "step,basis_n,op_applies,omega_min,rho_k,rho_t,biorth_err";

/// Reads a `coordinate real symmetric` file. Entries may be given in either
/// triangle; they are mirrored to both.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseSymMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };

    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, format!("bad banner {header:?}")));
    }
    if fields[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format {:?}", fields[2])));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field {:?}", fields[3])));
    }
    if fields[4] != "symmetric" {
        return Err(Error::NotSymmetricHeader(path.to_path_buf()));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "size line needs rows, cols, nnz".into()));
                }
                let nums = toks
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(line_no, e.to_string()))?;
                if nums[0] != nums[1] {
                    return Err(Error::NonSquare {
                        path: path.to_path_buf(),
                        rows: nums[0],
                        cols: nums[1],
                    });
                }
                size = Some((nums[0], nums[2]));
                triplets.reserve(nums[2]);
            }
            Some((n, _)) => {
                if toks.len() != 3 {
                    return Err(parse_err(line_no, "entry needs row, col, value".into()));
                }
                let i: usize = toks[0]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad row {:?}", toks[0])))?;
                let j: usize = toks[1]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad column {:?}", toks[1])))?;
                let v: f64 = toks[2]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad value {:?}", toks[2])))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(line_no, format!("index ({i}, {j}) outside 1..={n}")));
                }
                let (r, c) = if i >= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
                triplets.push((r, c, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(parse_err(
            1,
            format!("size line declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    SparseSymMatrix::from_lower_triplets(n, &triplets)
}

/// Writes the lower triangle, 1-based, with shortest round-trip values.
pub fn write_matrix_market(matrix: &SparseSymMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let lower = matrix.lower_triplets();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", matrix.dim(), matrix.dim(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history_csv(history: &ConvergenceRecord, path: impl AsRef<Path>) -> Result<()> {
    if history.is_empty() {
        return Err(Error::InvalidParameter("history is empty".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{HISTORY_HEADER}")?;
    for e in &history.entries {
        writeln!(
            w,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            e.step, e.basis_n, e.op_applies, e.omega_min, e.rho_k, e.rho_t, e.biorth_err
        )?;
    }
    w.flush()?;
    Ok(())
}
