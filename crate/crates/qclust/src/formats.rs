//! On-disk formats.
//!
//! Points CSV: one row per point, comma-separated coordinates, with an
//! optional header. When the header's last column is `label`, that column
//! holds integer cluster labels.
//!
//! QUBO text: a `qubo <n_vars>` header, then whitespace-separated lines
//! `i i value` (linear), `i j value` (quadratic) and `offset value`. Text
//! after `#` is ignored. Values are written in shortest round-trip form, so
//! saving and loading reproduces every coefficient bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use qclust_core::{Dataset, QuboProblem};

use crate::error::{Error, Result};

/// Parses a points CSV.
pub fn read_points(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text).map_err(|e| e.in_file(path))
}

pub fn parse_points(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut has_labels = false;
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if idx == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            has_labels = record.iter().next_back() == Some("label");
            continue;
        }
        let fields: Vec<&str> = record.iter().collect();
        let (coords, label) = if has_labels {
            let (last, rest) = fields.split_last().ok_or_else(|| Error::parse(idx + 1, "empty row"))?;
            let l = last.parse::<usize>().map_err(|_| Error::parse(idx + 1, format!("bad label {last:?}")))?;
            (rest, Some(l))
        } else {
            (&fields[..], None)
        };
        let point = coords
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::parse(idx + 1, format!("bad number {f:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if *width.get_or_insert(point.len()) != point.len() {
            return Err(Error::parse(idx + 1, "rows have different lengths"));
        }
        rows.push(point);
        labels.extend(label);
    }
    if rows.is_empty() {
        return Err(Error::parse(0, "no points"));
    }
    Ok(Dataset::new(rows, has_labels.then_some(labels))?)
}

pub fn format_points(data: &Dataset) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = (0..data.dims()).map(|j| format!("x{j}")).collect();
    if data.true_labels().is_some() {
        header.push("label".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, p) in data.points().enumerate() {
        let mut row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        if let Some(l) = data.true_labels() {
            row.push(l[i].to_string());
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_points(path: &Path, data: &Dataset) -> Result<()> {
    write_text(path, &format_points(data))
}

/// Centroids share the points format, without labels.
pub fn read_centroids(path: &Path) -> Result<Vec<Vec<f64>>> {
    let data = read_points(path)?;
    Ok(data.points().map(<[f64]>::to_vec).collect())
}

pub fn write_centroids(path: &Path, centroids: &[Vec<f64>]) -> Result<()> {
    let data = Dataset::new(centroids.to_vec(), None)?;
    write_points(path, &data)
}

pub fn read_qubo(path: &Path) -> Result<QuboProblem> {
    let mut text = String::new();
    fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(|e| Error::io(path, e))?;
    parse_qubo(&text).map_err(|e| e.in_file(path))
}

pub fn parse_qubo(text: &str) -> Result<QuboProblem> {
    let mut n_vars = None;
    let mut linear: Vec<Option<f64>> = Vec::new();
    let mut quadratic = Vec::new();
    let mut offset: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let number = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(line_no, format!("bad number {s:?}")));
        let index = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(line_no, format!("bad index {s:?}")));
        match (n_vars, tokens.as_slice()) {
            (None, ["qubo", n]) => {
                let n = index(n)?;
                n_vars = Some(n);
                linear = vec![None; n];
            }
            (None, _) => return Err(Error::parse(line_no, "expected `qubo <n_vars>` header")),
            (Some(_), ["qubo", _]) => return Err(Error::parse(line_no, "duplicate header")),
            (Some(_), ["offset", v]) => {
                let v = number(v)?;
                offset = Some(offset.map_or(v, |old| old + v));
            }
            (Some(n), [a, b, v]) => {
                let (i, j, v) = (index(a)?, index(b)?, number(v)?);
                if i >= n || j >= n {
                    return Err(Error::parse(line_no, format!("index outside {n} variables")));
                }
                if i == j {
                    linear[i] = Some(linear[i].map_or(v, |old| old + v));
                } else {
                    quadratic.push((i, j, v));
                }
            }
            (Some(_), _) => return Err(Error::parse(line_no, format!("unrecognized line {line:?}"))),
        }
    }
    let n = n_vars.ok_or_else(|| Error::parse(0, "missing `qubo <n_vars>` header"))?;
    let linear = linear.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    Ok(QuboProblem::new(n, linear, quadratic, offset.unwrap_or(0.0))?)
}

/// Every linear term is written, zeros included, followed by every stored
/// coupling.
pub fn format_qubo(problem: &QuboProblem, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "qubo {}", problem.n_vars());
    for (i, v) in problem.linear().iter().enumerate() {
        let _ = writeln!(out, "{i} {i} {v:?}");
    }
    for c in problem.quadratic() {
        let _ = writeln!(out, "{} {} {:?}", c.i, c.j, c.value);
    }
    let _ = writeln!(out, "offset {:?}", problem.offset());
    out
}

pub fn write_qubo(path: &Path, problem: &QuboProblem, comment: Option<&str>) -> Result<()> {
    write_text(path, &format_qubo(problem, comment))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
