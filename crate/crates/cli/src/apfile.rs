//! Access-point location files: one `x,y[,operator]` record per line in
//! meters, `#` starts a comment line.

use std::collections::BTreeMap;

use wlan_offload::geometry::Point;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct ApRecord {
    pub position: Point,
    pub operator: Option<String>,
}

pub fn parse(text: &str, source: &str) -> Result<Vec<ApRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(format!("{source}: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let err = |m: &str| CliError::Data(format!("{source}:{line}: {m}"));
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if !(2..=3).contains(&record.len()) {
            return Err(err("expected x,y[,operator]"));
        }
        let coord = |i: usize| -> Result<f64, CliError> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(&format!("'{}' is not a coordinate", &record[i])))
        };
        let position = Point::new(coord(0)?, coord(1)?);
        let operator = record.get(2).filter(|s| !s.is_empty()).map(str::to_string);
        out.push(ApRecord { position, operator });
    }
    if out.is_empty() {
        return Err(CliError::Data(format!("{source}: no records")));
    }
    Ok(out)
}

/// Points per operator. Records without an operator column belong to
/// `default_operator`.
pub fn by_operator(records: &[ApRecord], default_operator: &str) -> BTreeMap<String, Vec<Point>> {
    let mut out: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    for r in records {
        let key = r.operator.clone().unwrap_or_else(|| default_operator.to_string());
        out.entry(key).or_default().push(r.position);
    }
    out
}
