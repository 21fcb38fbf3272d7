//! CSV ingestion, column selection and the `log` / `diff` transforms.

use std::path::Path;

use clap::ValueEnum;
use cp3o::TimeSeries;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeaderMode {
    /// Header present iff some cell of the first row is not a number.
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Natural logarithm; every value must be positive.
    Log,
    /// First differences; shortens the series by one.
    Diff,
}

/// How the header question was settled, echoed in every result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderReport {
    pub mode: HeaderMode,
    pub present: bool,
}

#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    /// Selected column names (`column_<k>` when there is no header).
    pub columns: Vec<String>,
    pub header: HeaderReport,
    /// Original data row (1-based, header excluded) of each observation.
    pub rows: Vec<usize>,
}

struct Table {
    names: Vec<String>,
    has_header: bool,
    /// `(file line, cells)` of every data record.
    records: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path, mode: HeaderMode) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((line, rec.iter().map(str::to_owned).collect::<Vec<_>>()));
    }
    if records.is_empty() {
        return Err(CliError::Input(format!(
            "{} contains no rows",
            path.display()
        )));
    }
    let has_header = match mode {
        HeaderMode::Yes => true,
        HeaderMode::No => false,
        HeaderMode::Auto => records[0].1.iter().any(|c| c.parse::<f64>().is_err()),
    };
    let names = if has_header {
        records.remove(0).1
    } else {
        (1..=records[0].1.len())
            .map(|k| format!("column_{k}"))
            .collect()
    };
    Ok(Table {
        names,
        has_header,
        records,
    })
}

/// Resolves `--columns` (comma-separated names or 1-based positions) to
/// 0-based positions. `None` selects every column.
fn select_columns(table: &Table, spec: Option<&str>) -> CliResult<Vec<usize>> {
    let Some(spec) = spec else {
        return Ok((0..table.names.len()).collect());
    };
    spec.split(',')
        .map(str::trim)
        .map(|token| {
            if let Ok(k) = token.parse::<usize>() {
                if k == 0 || k > table.names.len() {
                    return Err(CliError::Input(format!(
                        "column {k} out of range: the file has {} columns",
                        table.names.len()
                    )));
                }
                return Ok(k - 1);
            }
            table
                .names
                .iter()
                .position(|n| n == token)
                .ok_or_else(|| CliError::Input(format!("no column named '{token}'")))
        })
        .collect()
}

/// Reads the selected columns of `path` as a series, then applies
/// `transforms` in order.
pub fn load_series(
    path: &Path,
    header: HeaderMode,
    columns: Option<&str>,
    transforms: &[Transform],
) -> CliResult<LoadedSeries> {
    let table = read_table(path, header)?;
    let picked = select_columns(&table, columns)?;
    let names: Vec<String> = picked.iter().map(|&k| table.names[k].clone()).collect();

    let mut data: Vec<Vec<f64>> = Vec::with_capacity(table.records.len());
    let mut rows = Vec::with_capacity(table.records.len());
    for (row, (line, cells)) in table.records.iter().enumerate() {
        let row = row + 1;
        let mut values = Vec::with_capacity(picked.len());
        for (&k, name) in picked.iter().zip(&names) {
            let cell = cells.get(k).ok_or_else(|| {
                CliError::Input(format!(
                    "line {line} (data row {row}), column '{name}': missing value"
                ))
            })?;
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!(
                    "line {line} (data row {row}), column '{name}': cannot parse '{cell}' as a number"
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!(
                    "line {line} (data row {row}), column '{name}': non-finite value '{cell}'"
                )));
            }
            values.push(v);
        }
        data.push(values);
        rows.push(row);
    }

    for t in transforms {
        match t {
            Transform::Log => {
                for (values, &row) in data.iter_mut().zip(&rows) {
                    for (v, name) in values.iter_mut().zip(&names) {
                        if *v <= 0.0 {
                            return Err(CliError::Input(format!(
                                "log transform of non-positive value {v} at data row {row}, column '{name}'"
                            )));
                        }
                        *v = v.ln();
                    }
                }
            }
            Transform::Diff => {
                data = data
                    .windows(2)
                    .map(|p| p[1].iter().zip(&p[0]).map(|(b, a)| b - a).collect())
                    .collect();
                if !rows.is_empty() {
                    rows.remove(0);
                }
            }
        }
    }
    if data.is_empty() {
        return Err(CliError::Input(
            "no observations left after transforms".into(),
        ));
    }
    Ok(LoadedSeries {
        series: TimeSeries::from_rows(&data)?,
        columns: names,
        header: HeaderReport {
            mode: header,
            present: table.has_header,
        },
        rows,
    })
}
