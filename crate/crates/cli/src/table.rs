//! Plot-ready tables and their CSV encoding.
//!
//! Floats are written with 17 significant digits, complex values occupy
//! `_re`/`_im` column pairs and undefined values are empty cells.

use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// 17 significant digits in scientific notation; −0 is written as 0.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.16e}", x + 0.0)
}

/// A column name with its unit, rendered as `name [unit]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: &'static str,
}

impl Column {
    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn column(&mut self, name: impl Into<String>, unit: &'static str) -> &mut Self {
        self.columns.push(Column {
            name: name.into(),
            unit,
        });
        self
    }

    pub fn with_columns(cols: &[(&str, &'static str)]) -> Self {
        let mut t = Self::new();
        for (name, unit) in cols {
            t.column(*name, unit);
        }
        t
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.columns.iter().map(Column::header))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Marks grid points where the sign of `values` flips against the next point
/// along either axis. `values` is row-major with `inner` points per row;
/// `None` entries never take part.
pub fn zero_crossings(values: &[Option<f64>], inner: usize) -> Vec<bool> {
    assert!(
        inner > 0 && values.len().is_multiple_of(inner),
        "grid shape"
    );
    let flips = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) => (x < 0.0) != (y < 0.0),
        _ => false,
    };
    (0..values.len())
        .map(|i| {
            let right = i % inner + 1 < inner && flips(values[i], values[i + 1]);
            let down = i + inner < values.len() && flips(values[i], values[i + inner]);
            right || down
        })
        .collect()
}
