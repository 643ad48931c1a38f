//! Deterministic table output in text, CSV, markdown and JSON.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;

use lefschetz_core::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Md,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Int(BigInt),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn plain(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("strings serialize"),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<&BigInt> for Cell {
    fn from(v: &BigInt) -> Self {
        Cell::Int(v.clone())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(BigInt::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

/// Tables followed by named checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub tables: Vec<Table>,
    pub checks: Vec<(String, Cell)>,
}

impl Output {
    pub fn check(&mut self, name: &str, value: impl Into<Cell>) {
        self.checks.push((name.to_string(), value.into()));
    }
}

/// `p/q`, always with an explicit denominator.
pub fn ratio(r: &Ratio<BigInt>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion rounded half away from zero to `places` digits after
/// the point.
pub fn decimal(r: &Ratio<BigInt>, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let num: BigInt = r.numer().abs() * &scale * 2 + r.denom();
    let den: BigInt = r.denom() * 2;
    let scaled = num.div_floor(&den);
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if r.is_negative() && !scaled.is_zero_value() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0>width$}", width = places as usize)
}

trait ZeroValue {
    fn is_zero_value(&self) -> bool;
}

impl ZeroValue for BigInt {
    fn is_zero_value(&self) -> bool {
        self.sign() == num_bigint::Sign::NoSign
    }
}

pub const DECIMAL_PLACES: u32 = 6;

/// Column names shared by every slope row.
pub const SLOPE_COLUMNS: [&str; 7] = ["n_twists", "sigma", "e", "k2", "chi_f", "lambda", "lambda_decimal"];

pub fn slope_cells(r: &Report) -> Vec<Cell> {
    vec![
        (&r.n).into(),
        (&r.sigma).into(),
        (&r.e).into(),
        (&r.k_sq).into(),
        (&r.chi_f).into(),
        ratio(&r.lambda).into(),
        decimal(&r.lambda, DECIMAL_PLACES).into(),
    ]
}

pub fn render(out: &Output, format: Format) -> String {
    match format {
        Format::Text => render_text(out),
        Format::Csv => render_csv(out),
        Format::Md => render_md(out),
        Format::Json => render_json(out),
    }
}

fn render_text(out: &Output) -> String {
    let mut s = String::new();
    for (k, t) in out.tables.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        if out.tables.len() > 1 {
            let _ = writeln!(s, "[{}]", t.name);
        }
        let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::plain).collect()).collect();
        let widths: Vec<usize> = (0..t.columns.len())
            .map(|j| {
                cells.iter().map(|r| r[j].chars().count()).chain([t.columns[j].chars().count()]).max().unwrap_or(0)
            })
            .collect();
        let line = |vals: Vec<(&str, bool)>| {
            let parts: Vec<String> = vals
                .iter()
                .zip(&widths)
                .map(|((v, right), w)| if *right { format!("{v:>w$}") } else { format!("{v:<w$}") })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let _ = writeln!(s, "{}", line(t.columns.iter().map(|c| (c.as_str(), false)).collect()));
        for (row, raw) in cells.iter().zip(&t.rows) {
            let vals = row.iter().zip(raw).map(|(v, c)| (v.as_str(), matches!(c, Cell::Int(_)))).collect();
            let _ = writeln!(s, "{}", line(vals));
        }
    }
    if !out.checks.is_empty() {
        if !out.tables.is_empty() {
            s.push('\n');
        }
        for (name, value) in &out.checks {
            let _ = writeln!(s, "{name}: {}", value.plain());
        }
    }
    s
}

fn csv_block<I, R>(records: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Sections are separated by a blank line.
fn render_csv(out: &Output) -> String {
    let mut blocks: Vec<String> = out
        .tables
        .iter()
        .map(|t| {
            let rows = t.rows.iter().map(|row| row.iter().map(Cell::plain).collect::<Vec<_>>());
            csv_block(std::iter::once(t.columns.clone()).chain(rows))
        })
        .collect();
    if !out.checks.is_empty() {
        let rows = out.checks.iter().map(|(name, value)| vec![name.clone(), value.plain()]);
        blocks.push(csv_block(std::iter::once(vec!["check".to_string(), "value".to_string()]).chain(rows)));
    }
    blocks.join("\n")
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn render_md(out: &Output) -> String {
    let mut s = String::new();
    for (k, t) in out.tables.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        if out.tables.len() > 1 {
            let _ = writeln!(s, "### {}\n", t.name);
        }
        let _ = writeln!(s, "| {} |", t.columns.iter().map(|c| md_escape(c)).collect::<Vec<_>>().join(" | "));
        let seps: Vec<&str> = t
            .columns
            .iter()
            .enumerate()
            .map(|(j, _)| if t.rows.first().is_some_and(|r| matches!(r[j], Cell::Int(_))) { "---:" } else { "---" })
            .collect();
        let _ = writeln!(s, "| {} |", seps.join(" | "));
        for row in &t.rows {
            let vals: Vec<String> = row.iter().map(|c| md_escape(&c.plain())).collect();
            let _ = writeln!(s, "| {} |", vals.join(" | "));
        }
    }
    if !out.checks.is_empty() {
        if !out.tables.is_empty() {
            s.push('\n');
        }
        for (name, value) in &out.checks {
            let _ = writeln!(s, "- **{}**: {}", md_escape(name), md_escape(&value.plain()));
        }
    }
    s
}

fn render_json(out: &Output) -> String {
    let key = |k: &str| serde_json::to_string(k).expect("strings serialize");
    let mut s = String::from("{\n");
    let mut sections = Vec::new();
    for t in &out.tables {
        let rows: Vec<String> = t
            .rows
            .iter()
            .map(|row| {
                let fields: Vec<String> =
                    t.columns.iter().zip(row).map(|(c, v)| format!("{}: {}", key(c), v.json())).collect();
                format!("    {{{}}}", fields.join(", "))
            })
            .collect();
        let body = if rows.is_empty() { "[]".to_string() } else { format!("[\n{}\n  ]", rows.join(",\n")) };
        sections.push(format!("  {}: {body}", key(&t.name)));
    }
    if !out.checks.is_empty() {
        let fields: Vec<String> =
            out.checks.iter().map(|(k, v)| format!("    {}: {}", key(k), v.json())).collect();
        sections.push(format!("  \"checks\": {{\n{}\n  }}", fields.join(",\n")));
    }
    s.push_str(&sections.join(",\n"));
    s.push_str("\n}\n");
    s
}
