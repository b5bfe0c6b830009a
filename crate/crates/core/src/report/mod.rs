//! Format-neutral report documents and their text, JSON and Markdown
//! renderings. Values print with 3 decimals and p values with 4 in text and
//! Markdown; JSON carries full precision.

mod builders;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub use builders::*;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.renderer_name())
    }
}

impl Format {
    pub fn renderer_name(&self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Markdown => "markdown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Printed with 3 decimals.
    Value(f64),
    /// Printed with 4 decimals.
    P(f64),
    /// Printed in scientific notation (tolerances, residual gaps).
    Small(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map_or(Cell::Empty, Into::into)
    }
}

fn fixed(v: f64, decimals: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.decimals$}");
    // avoid "-0.000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

impl Cell {
    pub fn display(&self) -> String {
        match self {
            Cell::Value(v) => fixed(*v, 3),
            Cell::P(p) if *p > 0.0 && *p < 5e-5 => "<0.0001".into(),
            Cell::P(p) => fixed(*p, 4),
            Cell::Small(v) => format!("{v:.1e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => if *b { "yes" } else { "no" }.into(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => "-".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Cell::Value(v) | Cell::P(v) | Cell::Small(v) => {
                serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number)
            }
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub kind: String,
    pub title: String,
    pub fields: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl Document {
    pub fn new(kind: impl Into<String>, title: impl Into<String>) -> Self {
        Self { kind: kind.into(), title: title.into(), fields: Vec::new(), tables: Vec::new(), notes: Vec::new() }
    }

    pub fn field(mut self, name: &str, value: impl Into<Cell>) -> Self {
        self.fields.push((name.to_string(), value.into()));
        self
    }

    pub fn table(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let fields: Map<String, Value> = self.fields.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "columns": t.columns,
                    "rows": t.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": self.kind,
            "title": self.title,
            "fields": fields,
            "tables": tables,
            "notes": self.notes,
        })
    }

    /// Rebuilds a document from its JSON rendering. Numbers come back as
    /// [`Cell::Value`]; integers as [`Cell::Int`].
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::parse(1, format!("report JSON: {what}"));
        let obj = value.as_object().ok_or_else(|| bad("not an object"))?;
        match obj.get("schema_version").and_then(Value::as_u64) {
            Some(v) if v == REPORT_SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(bad(&format!("unsupported schema version {v}"))),
            None => return Err(bad("missing schema_version")),
        }
        let text = |key: &str| obj.get(key).and_then(Value::as_str).map(str::to_string).ok_or_else(|| bad(key));
        let cell = |v: &Value| match v {
            Value::Null => Cell::Empty,
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => n.as_i64().map_or_else(|| Cell::Value(n.as_f64().unwrap_or(f64::NAN)), Cell::Int),
            Value::String(s) => Cell::Text(s.clone()),
            other => Cell::Text(other.to_string()),
        };
        let mut doc = Document::new(text("kind")?, text("title")?);
        if let Some(fields) = obj.get("fields").and_then(Value::as_object) {
            doc.fields = fields.iter().map(|(k, v)| (k.clone(), cell(v))).collect();
        }
        for t in obj.get("tables").and_then(Value::as_array).into_iter().flatten() {
            let name = t.get("name").and_then(Value::as_str).ok_or_else(|| bad("table name"))?;
            let columns: Vec<String> = t
                .get("columns")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("table columns"))?
                .iter()
                .map(|c| c.as_str().map(str::to_string).ok_or_else(|| bad("column name")))
                .collect::<Result<_>>()?;
            let mut table = Table { name: name.to_string(), columns, rows: Vec::new() };
            for r in t.get("rows").and_then(Value::as_array).into_iter().flatten() {
                let row: Vec<Cell> = r.as_array().ok_or_else(|| bad("row"))?.iter().map(cell).collect();
                if row.len() != table.columns.len() {
                    return Err(bad("row width"));
                }
                table.rows.push(row);
            }
            doc.tables.push(table);
        }
        for n in obj.get("notes").and_then(Value::as_array).into_iter().flatten() {
            doc.notes.push(n.as_str().ok_or_else(|| bad("note"))?.to_string());
        }
        Ok(doc)
    }
}

pub trait Renderer: Named + Send + Sync {
    fn render(&self, doc: &Document) -> String;
}

pub struct TextRenderer;
pub struct JsonRenderer;
pub struct MarkdownRenderer;

impl Named for TextRenderer {
    fn name(&self) -> &'static str {
        "text"
    }
}

impl Named for JsonRenderer {
    fn name(&self) -> &'static str {
        "json"
    }
}

impl Named for MarkdownRenderer {
    fn name(&self) -> &'static str {
        "markdown"
    }
}

fn aligned(columns: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(columns);
    out.push_str(&line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

fn displayed(t: &Table) -> Vec<Vec<String>> {
    t.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect()
}

impl Renderer for TextRenderer {
    fn render(&self, doc: &Document) -> String {
        let mut out = format!("{}\n", doc.title);
        let key_width = doc.fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &doc.fields {
            out.push_str(&format!("  {:<key_width$}  {}\n", k, v.display()));
        }
        for t in &doc.tables {
            out.push_str(&format!("\n{}\n", t.name));
            if t.rows.is_empty() {
                out.push_str("  (none)\n");
            } else {
                out.push_str(&aligned(&t.columns, &displayed(t)));
            }
        }
        if !doc.notes.is_empty() {
            out.push('\n');
            for n in &doc.notes {
                out.push_str(&format!("note: {n}\n"));
            }
        }
        out
    }
}

impl Renderer for JsonRenderer {
    fn render(&self, doc: &Document) -> String {
        let mut s = serde_json::to_string_pretty(&doc.to_json()).expect("document serializes");
        s.push('\n');
        s
    }
}

impl Renderer for MarkdownRenderer {
    fn render(&self, doc: &Document) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("## {}\n\n", doc.title);
        for (k, v) in &doc.fields {
            out.push_str(&format!("- **{}**: {}\n", esc(k), esc(&v.display())));
        }
        for t in &doc.tables {
            out.push_str(&format!("\n### {}\n\n", t.name));
            if t.rows.is_empty() {
                out.push_str("_none_\n");
                continue;
            }
            let row = |cells: Vec<String>| format!("| {} |\n", cells.join(" | "));
            out.push_str(&row(t.columns.iter().map(|c| esc(c)).collect()));
            out.push_str(&row(t.columns.iter().map(|_| "---".to_string()).collect()));
            for r in displayed(t) {
                out.push_str(&row(r.iter().map(|c| esc(c)).collect()));
            }
        }
        if !doc.notes.is_empty() {
            out.push('\n');
            for n in &doc.notes {
                out.push_str(&format!("> {}\n", n));
            }
        }
        out
    }
}

pub fn renderers() -> Registry<dyn Renderer> {
    Registry::<dyn Renderer>::new().with(Box::new(TextRenderer)).with(Box::new(JsonRenderer)).with(Box::new(MarkdownRenderer))
}

pub fn render_report(doc: &Document, format: Format) -> String {
    renderers().get(format.renderer_name()).expect("every format has a renderer").render(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut t = Table::new("rows", &["name", "value", "p"]);
        t.push(vec!["a".into(), Cell::Value(0.1 + 0.2), Cell::P(0.012345)]);
        t.push(vec!["b|c".into(), Cell::Value(-0.0001), Cell::P(1e-9)]);
        Document::new("sample", "Sample").field("n", 2usize).field("x", Cell::Value(1.0 / 3.0)).table(t).note("n")
    }

    #[test]
    fn fixed_decimals() {
        let text = render_report(&sample(), Format::Text);
        assert!(text.contains("0.300"));
        assert!(text.contains("0.0123"));
        assert!(text.contains("<0.0001"));
        assert!(!text.contains("-0.000"));
    }

    #[test]
    fn markdown_table() {
        let md = render_report(&sample(), Format::Markdown);
        assert!(md.contains("| name | value | p |"));
        assert!(md.contains("| b\\|c | 0.000 | <0.0001 |"));
    }

    #[test]
    fn json_round_trip_keeps_numbers() {
        let doc = sample();
        let text = render_report(&doc, Format::Json);
        let back = Document::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.tables[0].rows[0][1], Cell::Value(0.1 + 0.2));
        assert_eq!(back.tables[0].rows[1][2], Cell::Value(1e-9));
        assert_eq!(back.title, doc.title);
        assert_eq!(render_report(&back, Format::Json), text);
    }

    #[test]
    fn rendering_is_deterministic() {
        for f in [Format::Text, Format::Json, Format::Markdown] {
            assert_eq!(render_report(&sample(), f), render_report(&sample(), f));
        }
    }
}
