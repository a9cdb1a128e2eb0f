//! Plain-text interchange: MatrixMarket coordinate files and the site table.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{CMatrix, C64};
use crate::models::{LatticeModel, Region, Sublattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Write `m` in coordinate format, 1-based, listing only nonzero entries.
/// With `Field::Real` the imaginary parts must all be zero.
pub fn write_matrix_market<W: Write>(mut w: W, m: &CMatrix, field: Field) -> Result<()> {
    let (rows, cols) = m.dim();
    if field == Field::Real && m.iter().any(|z| z.im != 0.0) {
        return Err(Error::input("matrix has imaginary entries; write it as complex"));
    }
    let entries: Vec<((usize, usize), C64)> = m
        .indexed_iter()
        .filter(|(_, z)| **z != C64::new(0.0, 0.0))
        .map(|(ij, z)| (ij, *z))
        .collect();
    let kind = match field {
        Field::Real => "real",
        Field::Complex => "complex",
    };
    writeln!(w, "%%MatrixMarket matrix coordinate {kind} general")?;
    writeln!(w, "{rows} {cols} {}", entries.len())?;
    for ((i, j), z) in entries {
        match field {
            Field::Real => writeln!(w, "{} {} {:.17e}", i + 1, j + 1, z.re)?,
            Field::Complex => writeln!(w, "{} {} {:.17e} {:.17e}", i + 1, j + 1, z.re, z.im)?,
        }
    }
    Ok(())
}

pub fn write_matrix_market_file(path: &Path, m: &CMatrix, field: Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, m, field)?;
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::input(format!("MatrixMarket line {line}: {msg}"))
}

/// Read a coordinate-format file with `real`, `integer` or `complex` field
/// and `general`, `symmetric` or `hermitian` symmetry.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<CMatrix> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::input("MatrixMarket input is empty"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!("MatrixMarket format `{}`", tokens[2])));
    }
    let complex = match tokens[3].as_str() {
        "real" | "integer" => false,
        "complex" => true,
        other => return Err(Error::Unsupported(format!("MatrixMarket field `{other}`"))),
    };
    let symmetry = tokens[4].clone();
    if !["general", "symmetric", "hermitian"].contains(&symmetry.as_str()) {
        return Err(Error::Unsupported(format!("MatrixMarket symmetry `{symmetry}`")));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut m = CMatrix::zeros((0, 0));
    let mut seen = 0usize;
    for (k, line) in lines {
        let line = line?;
        let lineno = k + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if f.len() != 3 {
                    return Err(parse_err(lineno, "expected `rows cols entries`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lineno, e));
                let (r, c, nnz) = (p(f[0])?, p(f[1])?, p(f[2])?);
                m = CMatrix::zeros((r, c));
                size = Some((r, c, nnz));
            }
            Some((rows, cols, _)) => {
                let want = if complex { 4 } else { 3 };
                if f.len() != want {
                    return Err(parse_err(lineno, format!("expected {want} fields")));
                }
                let idx = |s: &str, max: usize| -> Result<usize> {
                    let v = s.parse::<usize>().map_err(|e| parse_err(lineno, e))?;
                    if v == 0 || v > max {
                        return Err(parse_err(lineno, format!("index {v} out of range 1..={max}")));
                    }
                    Ok(v - 1)
                };
                let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(lineno, e));
                let (i, j) = (idx(f[0], rows)?, idx(f[1], cols)?);
                let z = C64::new(num(f[2])?, if complex { num(f[3])? } else { 0.0 });
                m[[i, j]] = z;
                if i != j {
                    match symmetry.as_str() {
                        "symmetric" => m[[j, i]] = z,
                        "hermitian" => m[[j, i]] = z.conj(),
                        _ => {}
                    }
                }
                seen += 1;
            }
        }
    }
    match size {
        None => Err(Error::input("MatrixMarket input has no size line")),
        Some((_, _, nnz)) if nnz != seen => Err(Error::input(format!(
            "MatrixMarket declares {nnz} entries but lists {seen}"
        ))),
        Some(_) => Ok(m),
    }
}

pub fn read_matrix_market_file(path: &Path) -> Result<CMatrix> {
    let f = File::open(path)
        .map_err(|e| Error::input(format!("cannot open {}: {e}", path.display())))?;
    read_matrix_market(BufReader::new(f))
}

#[derive(Serialize)]
struct SiteRow {
    index: usize,
    x: f64,
    y: f64,
    sublattice: Sublattice,
    region: &'static str,
}

pub fn write_sites_csv<W: Write>(w: W, model: &LatticeModel) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for (index, s) in model.sites.iter().enumerate() {
        wr.serialize(SiteRow {
            index,
            x: s.x,
            y: s.y,
            sublattice: s.sublattice,
            region: Region::name(s.region),
        })?;
    }
    wr.flush()?;
    Ok(())
}

/// Write `H.mtx` (complex), `X.mtx`, `Y.mtx` (real) and `sites.csv` into `dir`.
pub fn export_model(dir: &Path, model: &LatticeModel) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_matrix_market_file(&dir.join("H.mtx"), &model.h, Field::Complex)?;
    write_matrix_market_file(&dir.join("X.mtx"), &model.x, Field::Real)?;
    write_matrix_market_file(&dir.join("Y.mtx"), &model.y, Field::Real)?;
    let mut w = BufWriter::new(File::create(dir.join("sites.csv"))?);
    write_sites_csv(&mut w, model)?;
    w.flush()?;
    Ok(())
}
