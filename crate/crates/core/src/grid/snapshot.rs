//! Plain-text field snapshots.
//!
//! A header of `key value...` lines followed by one row per node,
//! `i [j] x [y] re im`. Reals are written with 17 significant digits, so
//! a write/read cycle reproduces every bit.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{BoundaryCondition, Domain, DomainKind, Field, Grid};
use crate::error::{Error, Result};

const MAGIC: &str = "# singular-nls field snapshot v1";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_snapshot(field: &Field) -> String {
    let grid = &field.grid;
    let d = grid.domain();
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "kind {}", d.kind.as_str());
    let _ = writeln!(s, "dimension {}", d.dimension);
    let bounds: Vec<String> = d.bounds.iter().flat_map(|&(a, b)| [num(a), num(b)]).collect();
    let _ = writeln!(s, "bounds {}", bounds.join(" "));
    let _ = writeln!(s, "h {}", num(grid.h()));
    let shape = grid.shape();
    if grid.axes() == 2 {
        let _ = writeln!(s, "shape {} {}", shape[0], shape[1]);
        let _ = writeln!(s, "bc {}", field.bc.as_str());
        let _ = writeln!(s, "# i j x y re im");
    } else {
        let _ = writeln!(s, "shape {}", shape[0]);
        let _ = writeln!(s, "bc {}", field.bc.as_str());
        let _ = writeln!(s, "# i x re im");
    }
    for (k, z) in field.values.iter().enumerate() {
        let (i, j) = grid.split_index(k);
        let p = grid.node(k);
        if grid.axes() == 2 {
            let _ = writeln!(s, "{i} {j} {} {} {} {}", num(p[0]), num(p[1]), num(z.re), num(z.im));
        } else {
            let _ = writeln!(s, "{i} {} {} {}", num(p[0]), num(z.re), num(z.im));
        }
    }
    s
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Snapshot { line, message: message.into() }
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| perr(line, format!("bad number {tok:?}")))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| perr(line, format!("bad integer {tok:?}")))
}

pub fn read_snapshot(text: &str) -> Result<Field> {
    let mut kind = None;
    let mut dimension = None;
    let mut bounds: Vec<f64> = Vec::new();
    let mut h = None;
    let mut shape: Vec<usize> = Vec::new();
    let mut bc = None;
    let mut rows = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        match head {
            "kind" => {
                kind = Some(match rest.first().copied() {
                    Some("interval") => DomainKind::Interval,
                    Some("rectangle") => DomainKind::Rectangle,
                    Some("radial") => DomainKind::Radial,
                    other => return Err(perr(line_no, format!("unknown kind {other:?}"))),
                })
            }
            "dimension" => dimension = Some(parse_usize(line_no, rest.first().unwrap_or(&""))?),
            "bounds" => {
                bounds = rest.iter().map(|t| parse_f64(line_no, t)).collect::<Result<_>>()?
            }
            "h" => h = Some(parse_f64(line_no, rest.first().unwrap_or(&""))?),
            "shape" => {
                shape = rest.iter().map(|t| parse_usize(line_no, t)).collect::<Result<_>>()?
            }
            "bc" => {
                bc = Some(match rest.first().copied() {
                    Some("dirichlet") => BoundaryCondition::Dirichlet,
                    Some("neumann") => BoundaryCondition::Neumann,
                    Some("none") => BoundaryCondition::None,
                    other => return Err(perr(line_no, format!("unknown bc {other:?}"))),
                })
            }
            _ => rows.push((line_no, line)),
        }
    }

    let kind = kind.ok_or_else(|| perr(0, "missing kind"))?;
    let dimension = dimension.ok_or_else(|| perr(0, "missing dimension"))?;
    let h = h.ok_or_else(|| perr(0, "missing h"))?;
    let bc = bc.ok_or_else(|| perr(0, "missing bc"))?;
    let domain = match (kind, bounds.as_slice()) {
        (DomainKind::Interval, &[a, b]) => Domain::interval(a, b)?,
        (DomainKind::Radial, &[_, r]) => Domain::radial(r, dimension)?,
        (DomainKind::Rectangle, &[a, b, c, d]) => Domain::rectangle((a, b), (c, d))?,
        _ => return Err(perr(0, "bounds do not match domain kind")),
    };
    let grid = Grid::new(domain, h)?;
    let expect_shape: Vec<usize> = grid.shape()[..grid.axes()].to_vec();
    if shape != expect_shape {
        return Err(perr(0, format!("shape {shape:?} inconsistent with grid {expect_shape:?}")));
    }
    if rows.len() != grid.len() {
        return Err(perr(0, format!("{} rows for {} nodes", rows.len(), grid.len())));
    }
    let cols = if grid.axes() == 2 { 6 } else { 4 };
    let mut values = Vec::with_capacity(grid.len());
    for (k, (line_no, line)) in rows.into_iter().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != cols {
            return Err(perr(line_no, format!("expected {cols} columns")));
        }
        let (i, j) = grid.split_index(k);
        let idx_ok = if grid.axes() == 2 {
            parse_usize(line_no, toks[0])? == i && parse_usize(line_no, toks[1])? == j
        } else {
            parse_usize(line_no, toks[0])? == i
        };
        if !idx_ok {
            return Err(perr(line_no, "node index out of order"));
        }
        let re = parse_f64(line_no, toks[cols - 2])?;
        let im = parse_f64(line_no, toks[cols - 1])?;
        values.push(Complex64::new(re, im));
    }
    Field::new(grid, values, bc)
}
