//! Plain comma-separated formats. Fields are never quoted: component names
//! exclude `,` and `+`, and unit ids are taken verbatim.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{CoalitionTable, Metadata, Universe};
use crate::matrix::TaskMatrix;
use crate::stats::PairedSample;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }
}

impl<'a> Iterator for Lines<'a> {
    type Item = (usize, &'a str);
    fn next(&mut self) -> Option<Self::Item> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim_end_matches('\r');
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

/// Reads `# key: value` lines up to the header; returns the header line.
fn read_preamble<'a>(lines: &mut Lines<'a>, metadata: &mut Metadata) -> Result<(usize, &'a str)> {
    for (n, line) in lines.by_ref() {
        match line.strip_prefix('#') {
            Some(comment) => {
                if let Some((k, v)) = comment.split_once(':') {
                    metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            None => return Ok((n, line)),
        }
    }
    Err(Error::parse(lines.last.max(1), "missing header row"))
}

fn parse_value(cell: &str, line: usize) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("`{}` is not a number", cell.trim())))?;
    if !v.is_finite() {
        return Err(Error::NonFiniteAtLine(line));
    }
    Ok(v)
}

pub fn parse_coalition_csv(text: &str) -> Result<CoalitionTable> {
    let mut lines = Lines::new(text);
    let mut metadata = Metadata::new();
    let (header_line, header) = read_preamble(&mut lines, &mut metadata)?;
    let mut fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields.pop() != Some("value") {
        return Err(Error::parse(header_line, "last header column must be `value`"));
    }
    let universe = Universe::new(fields.iter().copied()).map_err(|e| Error::parse(header_line, e.to_string()))?;
    let universe = Arc::new(universe);
    let k = universe.len();
    let mut table = CoalitionTable::new(universe.clone());
    table.metadata = metadata;
    for (n, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != k + 1 {
            return Err(Error::parse(n, format!("expected {} fields, found {}", k + 1, cells.len())));
        }
        let mut mask = 0u32;
        for (i, c) in cells[..k].iter().enumerate() {
            match c.trim() {
                "0" => {}
                "1" => mask |= 1 << i,
                other => return Err(Error::parse(n, format!("membership cell `{other}` is not 0 or 1"))),
            }
        }
        let v = parse_value(cells[k], n)?;
        if table.insert(mask, v)?.is_some() {
            return Err(Error::DuplicateCoalition(universe.label(mask)));
        }
    }
    Ok(table)
}

/// Canonical text: metadata comments, header, rows in mask order.
pub fn render_coalition_csv(table: &CoalitionTable) -> String {
    let u = table.universe();
    let mut out = String::new();
    for (k, v) in &table.metadata {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    for name in u.names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("value\n");
    for (mask, v) in table.entries() {
        for i in 0..u.len() {
            out.push(if mask >> i & 1 == 1 { '1' } else { '0' });
            out.push(',');
        }
        out.push_str(&format!("{v}\n"));
    }
    out
}

/// Task matrix with coalition-label columns resolved against `universe`.
pub fn parse_task_matrix_csv(text: &str, universe: &Arc<Universe>) -> Result<TaskMatrix> {
    let mut lines = Lines::new(text);
    let mut metadata = Metadata::new();
    let (header_line, header) = read_preamble(&mut lines, &mut metadata)?;
    let mut fields = header.split(',').map(str::trim);
    if fields.next() != Some("task") {
        return Err(Error::parse(header_line, "first header column must be `task`"));
    }
    let mut columns = Vec::new();
    for label in fields {
        let mask = universe.parse_mask(label).map_err(|e| Error::parse(header_line, e.to_string()))?;
        if columns.contains(&mask) {
            return Err(Error::DuplicateCoalition(universe.label(mask)));
        }
        columns.push(mask);
    }
    let mut units = Vec::new();
    let mut data = Vec::new();
    for (n, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() + 1 {
            return Err(Error::parse(n, format!("expected {} fields, found {}", columns.len() + 1, cells.len())));
        }
        units.push(cells[0].trim().to_string());
        for c in &cells[1..] {
            data.push(parse_value(c, n)?);
        }
    }
    TaskMatrix::new(universe.clone(), units, columns, data)
}

pub fn render_task_matrix_csv(matrix: &TaskMatrix) -> String {
    let u = matrix.universe();
    let mut out = String::from("task");
    for &c in matrix.columns() {
        out.push(',');
        out.push_str(&u.label(c));
    }
    out.push('\n');
    for (r, unit) in matrix.units().iter().enumerate() {
        out.push_str(unit);
        for v in matrix.row(r) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Paired observations: header `unit,a,b` (any names), or two value columns
/// without unit labels.
pub fn parse_paired_csv(text: &str) -> Result<PairedSample> {
    let mut lines = Lines::new(text);
    let (header_line, header) = read_preamble(&mut lines, &mut Metadata::new())?;
    let width = header.split(',').count();
    if !(2..=3).contains(&width) {
        return Err(Error::parse(header_line, "paired file needs 2 or 3 columns"));
    }
    let (mut labels, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != width {
            return Err(Error::parse(n, format!("expected {width} fields, found {}", cells.len())));
        }
        if width == 3 {
            labels.push(cells[0].trim().to_string());
        }
        a.push(parse_value(cells[width - 2], n)?);
        b.push(parse_value(cells[width - 1], n)?);
    }
    PairedSample::new(labels, a, b)
}
