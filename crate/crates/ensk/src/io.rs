//! Pool and decision-weight CSV files, JSON output.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ensk_core::{Member, Pool};
use serde::{Deserialize, Serialize};

use crate::AppError;

/// A pool read from CSV with header `id,accuracy[,cost]`.
#[derive(Clone, Debug)]
pub struct PoolFile {
    pub pool: Pool,
    /// Whether the file had a `cost` column; costs default to 1 otherwise.
    pub has_cost: bool,
}

#[derive(Deserialize)]
struct PoolRow {
    id: String,
    accuracy: f64,
    cost: Option<f64>,
}

pub fn read_pool(path: &Path) -> Result<PoolFile, AppError> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    parse_pool(file, &path.display().to_string())
}

pub fn parse_pool<R: Read>(reader: R, source: &str) -> Result<PoolFile, AppError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| AppError::input(format!("{source}: {e}")))?.clone();
    for required in ["id", "accuracy"] {
        if !headers.iter().any(|h| h == required) {
            return Err(AppError::input(format!("{source}: missing `{required}` column")));
        }
    }
    let has_cost = headers.iter().any(|h| h == "cost");
    let mut members = Vec::new();
    for (i, row) in rdr.deserialize::<PoolRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| AppError::input(format!("{source}: row {line}: {}", csv_reason(&e))))?;
        let cost = match (has_cost, row.cost) {
            (false, _) => 1.0,
            (true, Some(c)) => c,
            (true, None) => return Err(AppError::input(format!("{source}: row {line}: empty cost"))),
        };
        members.push(Member::new(row.id, row.accuracy, cost));
    }
    if members.is_empty() {
        return Err(AppError::input(format!("{source}: no members")));
    }
    let pool = Pool::new(members).map_err(|e| AppError::input(format!("{source}: {e}")))?;
    Ok(PoolFile { pool, has_cost })
}

fn csv_reason(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("field {}: {}", f + 1, err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

#[derive(Deserialize)]
struct WeightRow {
    k: usize,
    p: f64,
}

/// Decision weights `p_{l,k}` from CSV with header `k,p`, rows `k = 0..=l`.
pub fn read_weights(path: &Path) -> Result<Vec<f64>, AppError> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    parse_weights(file, &path.display().to_string())
}

pub fn parse_weights<R: Read>(reader: R, source: &str) -> Result<Vec<f64>, AppError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<WeightRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| AppError::input(format!("{source}: row {line}: {}", csv_reason(&e))))?;
        if row.k != i {
            return Err(AppError::input(format!("{source}: row {line}: expected k = {i}, found {}", row.k)));
        }
        out.push(row.p);
    }
    if out.len() < 2 {
        return Err(AppError::input(format!("{source}: need weights for k = 0..=l with l >= 1")));
    }
    Ok(out)
}

pub fn write_pool<W: Write>(pool: &Pool, writer: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| AppError::input(e.to_string());
    w.write_record(["id", "accuracy", "cost"]).map_err(io_err)?;
    for m in pool.members() {
        w.write_record([m.id.clone(), m.accuracy.to_string(), m.cost.to_string()]).map_err(io_err)?;
    }
    w.flush().map_err(|e| AppError::input(e.to_string()))
}

/// Pretty JSON to `path`, or to stdout when `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| AppError::input(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::io(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| AppError::io("<stdout>", e)),
    }
}
