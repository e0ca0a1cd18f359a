//! Field serialization: CSV blocks headed by `# grid: dim=.., N=.., L=.., t=..`
//! and a flat little-endian binary record format.

use std::io::{BufRead, Read, Write};

use super::torus::{TorusGrid, VectorField};
use crate::error::{Error, Result};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn grid_header(grid: &TorusGrid, t: f64) -> String {
    format!(
        "# grid: dim={}, N={}, L={}, t={}",
        grid.dim(),
        grid.n(),
        fmt_f64(grid.period()),
        fmt_f64(t)
    )
}

/// Write one field as a CSV block: header line, column line, then one row per
/// node with the index tuple followed by the component values.
pub fn write_csv_block<W: Write>(w: &mut W, field: &VectorField) -> Result<()> {
    let g = field.grid;
    writeln!(w, "{}", grid_header(&g, field.time))?;
    let idx_names = ["i0", "i1", "i2"];
    let mut cols: Vec<String> = idx_names[..g.dim()].iter().map(|s| s.to_string()).collect();
    cols.extend((1..=field.components.len()).map(|c| format!("u{c}")));
    writeln!(w, "# columns: {}", cols.join(","))?;
    for i in 0..g.len() {
        let m = g.multi_index(i);
        let mut row: Vec<String> = m[..g.dim()].iter().map(|v| v.to_string()).collect();
        row.extend(field.components.iter().map(|c| fmt_f64(c[i])));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(w: &mut W, fields: &[VectorField]) -> Result<()> {
    for f in fields {
        write_csv_block(w, f)?;
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(TorusGrid, f64)> {
    let body = line
        .trim_start_matches('#')
        .trim()
        .strip_prefix("grid:")
        .ok_or_else(|| Error::Parse(format!("not a grid header: {line}")))?;
    let (mut dim, mut n, mut l, mut t) = (None, None, None, None);
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("malformed header entry '{part}'")))?;
        let v = v.trim();
        match k.trim() {
            "dim" => dim = v.parse::<usize>().ok(),
            "N" => n = v.parse::<usize>().ok(),
            "L" => l = v.parse::<f64>().ok(),
            "t" => t = v.parse::<f64>().ok(),
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    match (dim, n, l, t) {
        (Some(d), Some(n), Some(l), Some(t)) => Ok((TorusGrid::new(d, n, l)?, t)),
        _ => Err(Error::Parse(format!("incomplete grid header: {line}"))),
    }
}

/// Read every CSV block in the stream.
pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<VectorField>> {
    let mut out = Vec::new();
    let mut current: Option<(TorusGrid, f64, Vec<Vec<f64>>, usize)> = None;
    let finish = |cur: Option<(TorusGrid, f64, Vec<Vec<f64>>, usize)>,
                  out: &mut Vec<VectorField>|
     -> Result<()> {
        if let Some((g, t, comps, rows)) = cur {
            if rows != g.len() {
                return Err(Error::Parse(format!("block has {rows} rows, grid needs {}", g.len())));
            }
            out.push(VectorField::new(g, comps, t)?);
        }
        Ok(())
    };
    for line in r.lines() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('#') {
            if s.trim_start_matches('#').trim().starts_with("grid:") {
                finish(current.take(), &mut out)?;
                let (g, t) = parse_header(s)?;
                current = Some((g, t, vec![vec![0.0; g.len()]; 0], 0));
            }
            continue;
        }
        let (g, _, comps, rows) = current
            .as_mut()
            .ok_or_else(|| Error::Parse("data row before grid header".into()))?;
        let cells: Vec<&str> = s.split(',').collect();
        if cells.len() <= g.dim() {
            return Err(Error::Parse(format!("row too short: {s}")));
        }
        let ncomp = cells.len() - g.dim();
        if comps.is_empty() {
            *comps = vec![vec![0.0; g.len()]; ncomp];
        } else if comps.len() != ncomp {
            return Err(Error::Parse("inconsistent column count".into()));
        }
        let mut m = [0usize; 3];
        for a in 0..g.dim() {
            m[a] = cells[a]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index '{}'", cells[a])))?;
            if m[a] >= g.n() {
                return Err(Error::Parse(format!("index {} out of range", m[a])));
            }
        }
        let idx = g.flat_index(m);
        for c in 0..ncomp {
            comps[c][idx] = cells[g.dim() + c]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value '{}'", cells[g.dim() + c])))?;
        }
        *rows += 1;
    }
    finish(current, &mut out)?;
    Ok(out)
}

const MAGIC: &[u8; 4] = b"FLWB";

/// Binary record: magic, version, dim, N, component count (u32 each),
/// period and time (f64), then component-major samples. Little endian.
pub fn write_binary<W: Write>(w: &mut W, field: &VectorField) -> Result<()> {
    let g = field.grid;
    w.write_all(MAGIC)?;
    for v in [1u32, g.dim() as u32, g.n() as u32, field.components.len() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&g.period().to_le_bytes())?;
    w.write_all(&field.time.to_le_bytes())?;
    for c in &field.components {
        for v in c {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(r: &mut R) -> Result<VectorField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("bad magic in binary field".into()));
    }
    let mut u = [0u8; 4];
    let mut next_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u)?;
        Ok(u32::from_le_bytes(u))
    };
    let version = next_u32(r)?;
    if version != 1 {
        return Err(Error::Parse(format!("unsupported binary version {version}")));
    }
    let dim = next_u32(r)? as usize;
    let n = next_u32(r)? as usize;
    let ncomp = next_u32(r)? as usize;
    let mut f = [0u8; 8];
    r.read_exact(&mut f)?;
    let period = f64::from_le_bytes(f);
    r.read_exact(&mut f)?;
    let time = f64::from_le_bytes(f);
    let grid = TorusGrid::new(dim, n, period)?;
    let mut comps = vec![vec![0.0; grid.len()]; ncomp];
    for c in comps.iter_mut() {
        for v in c.iter_mut() {
            r.read_exact(&mut f)?;
            *v = f64::from_le_bytes(f);
        }
    }
    VectorField::new(grid, comps, time)
}
