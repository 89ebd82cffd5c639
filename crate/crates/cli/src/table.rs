//! Comma-separated tables with a fixed header. Floats are written in their
//! shortest round-trip form, so reading a table back gives the same bits.

use std::fmt::Display;

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Cell `name` of row `i`.
    pub fn get(&self, i: usize, name: &str) -> Option<&str> {
        self.column(name).map(|c| self.rows[i][c].as_str())
    }

    pub fn get_f64(&self, i: usize, name: &str) -> Option<f64> {
        self.get(i, name)?.parse().ok()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| CliError::Data(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = r
            .records()
            .map(|rec| {
                rec.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| CliError::Data(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Table { header, rows })
    }
}

pub fn cell(x: impl Display) -> String {
    x.to_string()
}

/// `a;b;c`
pub fn list(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| x.parse().map_err(|_| CliError::Data(format!("bad number '{x}'"))))
        .collect()
}

/// `x:q;x:q` for a step function.
pub fn steps(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(x, q)| format!("{x}:{q}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_steps(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|p| {
            let (x, q) = p
                .split_once(':')
                .ok_or_else(|| CliError::Data(format!("bad step '{p}'")))?;
            let num = |v: &str| v.parse().map_err(|_| CliError::Data(format!("bad number '{v}'")));
            Ok((num(x)?, num(q)?))
        })
        .collect()
}
