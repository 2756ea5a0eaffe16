use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::LineError;

/// Entity id used for series that are not keyed by justice or case
/// (e.g. the public-mood series).
pub const AGGREGATE_ENTITY: &str = "__aggregate__";

/// A (entity, year) → value table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    points: BTreeMap<(String, i32), f64>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            points: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, entity: impl Into<String>, year: i32, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid(format!("{}: non-finite value", self.name)));
        }
        let key = (entity.into(), year);
        if self.points.contains_key(&key) {
            return Err(Error::invalid(format!(
                "{}: duplicate entry for ({}, {})",
                self.name, key.0, key.1
            )));
        }
        self.points.insert(key, value);
        Ok(())
    }

    pub fn get(&self, entity: &str, year: i32) -> Option<f64> {
        self.points.get(&(entity.to_string(), year)).copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn entities(&self) -> BTreeSet<&str> {
        self.points.keys().map(|(e, _)| e.as_str()).collect()
    }

    /// Year → value for one entity, in year order.
    pub fn by_year(&self, entity: &str) -> BTreeMap<i32, f64> {
        self.points
            .iter()
            .filter(|((e, _), _)| e == entity)
            .map(|((_, y), v)| (*y, *v))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32, f64)> {
        self.points.iter().map(|((e, y), v)| (e.as_str(), *y, *v))
    }
}

/// Column names for entity/year/value. Without an entity column every row is
/// keyed by [`AGGREGATE_ENTITY`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub entity: Option<String>,
    pub year: String,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct MetricTable {
    pub series: MetricSeries,
    pub rejected: Vec<LineError>,
}

/// Parses a comma-separated table with a header row.
///
/// Rows with a non-integer year or non-numeric value are rejected and
/// reported by line number. A repeated (entity, year) is fatal.
pub fn ingest_metric_table(path: &Path, series_name: &str, schema: &ColumnMapping) -> Result<MetricTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("{}: no column named {name:?}", path.display())))
    };
    let entity_col = schema.entity.as_deref().map(col).transpose()?;
    let year_col = col(&schema.year)?;
    let value_col = col(&schema.value)?;

    let mut series = MetricSeries::new(series_name);
    let mut rejected = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let entity = match entity_col {
            Some(i) if field(i).is_empty() => {
                rejected.push(LineError {
                    line,
                    message: "empty entity".into(),
                });
                continue;
            }
            Some(i) => field(i).to_string(),
            None => AGGREGATE_ENTITY.to_string(),
        };
        let Ok(year) = field(year_col).parse::<i32>() else {
            rejected.push(LineError {
                line,
                message: format!("year {:?} is not an integer", field(year_col)),
            });
            continue;
        };
        let value = match field(value_col).parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                rejected.push(LineError {
                    line,
                    message: format!("value {:?} is not a finite number", field(value_col)),
                });
                continue;
            }
        };
        if series.get(&entity, year).is_some() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("duplicate ({entity}, {year}) makes the series ambiguous"),
            });
        }
        series.insert(entity, year, value)?;
    }
    Ok(MetricTable { series, rejected })
}
