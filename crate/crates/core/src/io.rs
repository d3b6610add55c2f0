//! File formats: point CSV, adjacency lists and the binary matrix layouts.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::embed::Dissimilarity;
use crate::error::{Error, Result};
use crate::geometry::{Coords, DistanceMatrix};
use crate::hopdist::HopMatrix;
use crate::linkgraph::Adjacency;

const ADJ_MAGIC: &[u8; 4] = b"LGA1";
const HOP_MAGIC: &[u8; 4] = b"LGH1";
const DIST_MAGIC: &[u8; 4] = b"LGD1";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), msg: msg.into() }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

/// Header `x0,x1,...`, then one row per point with round-trippable decimals.
pub fn write_points(path: &Path, coords: &Coords) -> Result<()> {
    let mut w = create(path)?;
    write_points_to(&mut w, coords)?;
    w.flush()?;
    Ok(())
}

pub fn write_points_to<W: Write>(w: &mut W, coords: &Coords) -> Result<()> {
    let header: Vec<String> = (0..coords.dim()).map(|k| format!("x{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for row in coords.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_points(path: &Path) -> Result<Coords> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = rdr.headers()?.clone();
    for (k, h) in headers.iter().enumerate() {
        if h.trim() != format!("x{k}") {
            return Err(parse_err(path, 1, format!("expected column `x{k}`, found `{h}`")));
        }
    }
    let dim = headers.len();
    if dim == 0 {
        return Err(parse_err(path, 1, "no coordinate columns"));
    }
    let mut data = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != dim {
            return Err(parse_err(path, line, format!("expected {dim} fields, found {}", rec.len())));
        }
        for field in rec.iter() {
            let x: f64 = field.trim().parse().map_err(|_| parse_err(path, line, format!("not a number: `{field}`")))?;
            if !x.is_finite() {
                return Err(parse_err(path, line, "non-finite coordinate"));
            }
            data.push(x);
        }
    }
    Coords::new(data.len() / dim, dim, data)
}

/// `n=<count>` then one `i j` line per edge with `i < j`.
pub fn write_adjacency_text(path: &Path, adj: &Adjacency) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "n={}", adj.n())?;
    for (i, j) in adj.edges() {
        writeln!(w, "{i} {j}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_adjacency_text(path: &Path) -> Result<Adjacency> {
    let rdr = BufReader::new(File::open(path)?);
    let mut lines = rdr.lines().enumerate();
    let n = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            line.trim()
                .strip_prefix("n=")
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| parse_err(path, 1, format!("expected `n=<count>`, found `{line}`")))?
        }
        None => return Err(parse_err(path, 1, "empty file")),
    };
    let mut adj = Adjacency::empty(n);
    for (k, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let lineno = k + 1;
        let mut it = t.split_whitespace().map(str::parse::<usize>);
        let (i, j) = match (it.next(), it.next(), it.next()) {
            (Some(Ok(i)), Some(Ok(j)), None) => (i, j),
            _ => return Err(parse_err(path, lineno, format!("expected `i j`, found `{t}`"))),
        };
        if !(i < j && j < n) {
            return Err(parse_err(path, lineno, format!("edge ({i},{j}) needs i < j < {n}")));
        }
        adj.insert(i, j);
    }
    Ok(adj)
}

/// `LGA1`, u64 n, then the upper triangle row-major, one bit per pair, LSB first.
pub fn write_adjacency_binary(path: &Path, adj: &Adjacency) -> Result<()> {
    let mut w = create(path)?;
    let n = adj.n();
    w.write_all(ADJ_MAGIC)?;
    w.write_all(&(n as u64).to_le_bytes())?;
    let total = n * n.saturating_sub(1) / 2;
    let mut bytes = vec![0u8; total.div_ceil(8)];
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if adj.has_edge(i, j) {
                bytes[k / 8] |= 1 << (k % 8);
            }
            k += 1;
        }
    }
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

fn read_header(path: &Path, r: &mut impl Read, magic: &[u8; 4]) -> Result<usize> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m).map_err(|_| format_err(path, "truncated header"))?;
    if &m != magic {
        return Err(format_err(path, format!("bad magic, expected {}", String::from_utf8_lossy(magic))));
    }
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb).map_err(|_| format_err(path, "truncated header"))?;
    usize::try_from(u64::from_le_bytes(nb)).map_err(|_| format_err(path, "size overflows"))
}

fn read_body(path: &Path, r: &mut impl Read, len: usize) -> Result<Vec<u8>> {
    let mut buf = Vec::with_capacity(len);
    r.take(len as u64 + 1).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(format_err(path, format!("expected {len} payload bytes, found {}", buf.len())));
    }
    Ok(buf)
}

pub fn read_adjacency_binary(path: &Path) -> Result<Adjacency> {
    let mut r = BufReader::new(File::open(path)?);
    let n = read_header(path, &mut r, ADJ_MAGIC)?;
    let total = n * n.saturating_sub(1) / 2;
    let bytes = read_body(path, &mut r, total.div_ceil(8))?;
    let mut adj = Adjacency::empty(n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if bytes[k / 8] >> (k % 8) & 1 == 1 {
                adj.insert(i, j);
            }
            k += 1;
        }
    }
    Ok(adj)
}

/// `LGH1`, u64 n, then n² u16 little-endian.
pub fn write_hops(path: &Path, hops: &HopMatrix) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(HOP_MAGIC)?;
    w.write_all(&(hops.n() as u64).to_le_bytes())?;
    for &h in hops.as_slice() {
        w.write_all(&h.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_hops(path: &Path) -> Result<HopMatrix> {
    let mut r = BufReader::new(File::open(path)?);
    let n = read_header(path, &mut r, HOP_MAGIC)?;
    let bytes = read_body(path, &mut r, n * n * 2)?;
    let vals = bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
    HopMatrix::from_raw(n, vals).map_err(|e| format_err(path, e.to_string()))
}

/// `LGD1`, u64 n, then n² f64 little-endian; infinite entries are kept.
pub fn write_matrix_binary<D: Dissimilarity + ?Sized>(path: &Path, d: &D) -> Result<()> {
    let mut w = create(path)?;
    let n = d.size();
    w.write_all(DIST_MAGIC)?;
    w.write_all(&(n as u64).to_le_bytes())?;
    for i in 0..n {
        for j in 0..n {
            w.write_all(&d.value(i, j).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads an `LGD1` file; entries must be finite for a distance matrix.
pub fn read_matrix_binary(path: &Path) -> Result<DistanceMatrix> {
    let mut r = BufReader::new(File::open(path)?);
    let n = read_header(path, &mut r, DIST_MAGIC)?;
    let bytes = read_body(path, &mut r, n * n * 8)?;
    let vals = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    DistanceMatrix::from_dense(n, vals).map_err(|e| format_err(path, e.to_string()))
}

/// Dense CSV: n rows of n values, no header; `inf` marks missing paths.
pub fn write_matrix_csv<D: Dissimilarity + ?Sized>(path: &Path, d: &D) -> Result<()> {
    let mut w = create(path)?;
    let n = d.size();
    for i in 0..n {
        let cells: Vec<String> = (0..n).map(|j| format!("{}", d.value(i, j))).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<DistanceMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut vals = Vec::new();
    let mut rows = 0;
    let mut width = None;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if *width.get_or_insert(rec.len()) != rec.len() {
            return Err(parse_err(path, line, "ragged row"));
        }
        for f in rec.iter() {
            vals.push(f.trim().parse::<f64>().map_err(|_| parse_err(path, line, format!("not a number: `{f}`")))?);
        }
        rows += 1;
    }
    if width.unwrap_or(0) != rows {
        return Err(format_err(path, "matrix is not square"));
    }
    DistanceMatrix::from_dense(rows, vals).map_err(|e| format_err(path, e.to_string()))
}

/// `iter,stress`, starting from the initial configuration at iteration 0.
pub fn write_stress_trace(path: &Path, trace: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "iter,stress")?;
    for (k, s) in trace.iter().enumerate() {
        writeln!(w, "{k},{s}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mvu_trace(path: &Path, trace: &[crate::mvu::MvuTraceRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "stage,iter,objective,max_violation")?;
    for r in trace {
        writeln!(w, "{},{},{},{}", r.stage, r.iter, r.objective, r.max_violation)?;
    }
    w.flush()?;
    Ok(())
}
