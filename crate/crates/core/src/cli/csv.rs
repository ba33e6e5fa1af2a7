use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::CliError;

/// One table entry. Integers stay integers on disk; reals are written in
/// scientific notation with 17 significant digits so they read back exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }

    fn parse(s: &str) -> Option<Cell> {
        if let Ok(i) = s.parse::<i64>() {
            return Some(Cell::Int(i));
        }
        s.parse::<f64>().ok().map(Cell::Real)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Real(x) => write!(f, "{x:.16e}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

/// Rectangular table of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        SweepTable {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics if the row length differs from the header count.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.headers.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// All values of the named column as reals.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.headers.join(","))?;
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    w.write_all(b",")?;
                }
                first = false;
                write!(w, "{cell}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    pub fn parse_csv(text: &str) -> Result<SweepTable, CliError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| CliError::Config("csv input is empty".into()))?;
        let headers: Vec<String> = if header.is_empty() {
            Vec::new()
        } else {
            header.split(',').map(str::to_string).collect()
        };
        let mut table = SweepTable {
            headers,
            rows: Vec::new(),
        };
        for (k, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|s| {
                    Cell::parse(s).ok_or_else(|| {
                        CliError::Config(format!("csv line {}: cannot parse {s:?}", k + 2))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != table.headers.len() {
                return Err(CliError::Config(format!(
                    "csv line {}: {} fields, expected {}",
                    k + 2,
                    row.len(),
                    table.headers.len()
                )));
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

/// Writes `table` to `path`, replacing any existing file.
pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let file = File::create(path).map_err(io_err)?;
    table.write_csv(BufWriter::new(file)).map_err(io_err)
}
