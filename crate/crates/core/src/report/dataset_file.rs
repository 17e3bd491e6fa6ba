use std::io::Read;

use super::format::format_full;
use crate::imputation::{EstimatorResult, SurveyDataset, SurveyRecord};
use crate::{Error, Result};

const REQUIRED: [&str; 5] = ["id", "y", "r", "z1c", "z2c"];
const OPTIONAL: [&str; 3] = ["z1", "z2", "z3"];

/// Which optional auxiliary columns a dataset file carried.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DatasetColumns {
    pub z1: bool,
    pub z2: bool,
    pub z3: bool,
}

fn parse_real(field: &str, line: usize, name: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| {
            Error::Malformed(format!(
                "line {line}, column `{name}`: `{field}` is not a number"
            ))
        })
}

fn parse_label(field: &str, line: usize, name: &str) -> Result<usize> {
    match field.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::Malformed(format!(
            "line {line}, column `{name}`: `{field}` is not a positive integer class label"
        ))),
    }
}

/// Reads a dataset CSV with named columns `id, y, r, z1c, z2c` and
/// optionally `z1, z2, z3`. Column order is free; an empty `y` is missing.
/// The class grid is taken from the largest labels present.
pub fn read_dataset<R: Read>(reader: R) -> Result<(SurveyDataset, DatasetColumns)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(REQUIRED) {
        *slot = find(name).ok_or_else(|| Error::Malformed(format!("missing column `{name}`")))?;
    }
    let opt: Vec<Option<usize>> = OPTIONAL.iter().map(|n| find(n)).collect();
    let columns = DatasetColumns {
        z1: opt[0].is_some(),
        z2: opt[1].is_some(),
        z3: opt[2].is_some(),
    };

    let mut records = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let responded = match get(idx[2]) {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Malformed(format!(
                    "line {line}, column `r`: `{other}` is not 0 or 1"
                )))
            }
        };
        let y = parse_real(get(idx[1]), line, "y")?;
        if responded && y.is_none() {
            return Err(Error::Malformed(format!(
                "line {line}: respondent without y"
            )));
        }
        let aux = |k: usize| -> Result<Option<f64>> {
            match opt[k] {
                Some(i) => parse_real(get(i), line, OPTIONAL[k]),
                None => Ok(None),
            }
        };
        records.push(SurveyRecord {
            id: get(idx[0]).to_string(),
            y,
            responded,
            z1: aux(0)?,
            z2: aux(1)?,
            z3: aux(2)?,
            z1c: parse_label(get(idx[3]), line, "z1c")?,
            z2c: parse_label(get(idx[4]), line, "z2c")?,
        });
    }
    if records.is_empty() {
        return Err(Error::Malformed("dataset file has no records".into()));
    }
    Ok((SurveyDataset::infer_grid(records)?, columns))
}

fn opt_field(v: Option<f64>) -> String {
    v.map(format_full).unwrap_or_default()
}

/// Writes the dataset back out with the completed working variable `w`
/// and the imputation cell of every record appended.
pub fn write_imputed(
    dataset: &SurveyDataset,
    columns: DatasetColumns,
    result: &EstimatorResult,
) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<&str> = REQUIRED.to_vec();
    for (present, name) in [columns.z1, columns.z2, columns.z3]
        .into_iter()
        .zip(OPTIONAL)
    {
        if present {
            header.push(name);
        }
    }
    header.extend(["w", "cell"]);
    w.write_record(&header)?;
    for (t, rec) in dataset.records().iter().enumerate() {
        let y = if rec.responded {
            opt_field(rec.y)
        } else {
            String::new()
        };
        let mut row = vec![
            rec.id.clone(),
            y,
            if rec.responded { "1" } else { "0" }.to_string(),
            rec.z1c.to_string(),
            rec.z2c.to_string(),
        ];
        for (present, v) in [
            (columns.z1, rec.z1),
            (columns.z2, rec.z2),
            (columns.z3, rec.z3),
        ] {
            if present {
                row.push(opt_field(v));
            }
        }
        row.push(format_full(result.w[t]));
        row.push(result.cell_ids[t].to_string());
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

/// Writes a dataset in the input format (no `w` column). Non-respondents
/// get an empty `y`.
pub fn write_dataset(dataset: &SurveyDataset, columns: DatasetColumns) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header: Vec<&str> = REQUIRED.to_vec();
    for (present, name) in [columns.z1, columns.z2, columns.z3]
        .into_iter()
        .zip(OPTIONAL)
    {
        if present {
            header.push(name);
        }
    }
    w.write_record(&header)?;
    for rec in dataset.records() {
        let mut row = vec![
            rec.id.clone(),
            if rec.responded {
                opt_field(rec.y)
            } else {
                String::new()
            },
            if rec.responded { "1" } else { "0" }.to_string(),
            rec.z1c.to_string(),
            rec.z2c.to_string(),
        ];
        for (present, v) in [
            (columns.z1, rec.z1),
            (columns.z2, rec.z2),
            (columns.z3, rec.z3),
        ] {
            if present {
                row.push(opt_field(v));
            }
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}
