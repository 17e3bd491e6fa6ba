use std::io::Read;

use super::format::format_sig6;
use crate::engine::ClusterMap;
use crate::table::{CellState, ContingencyTable};
use crate::{Error, Result};

/// A numeric grid read from or written to CSV, with optional labels.
///
/// A header row is recognised when any of its cells after the first is
/// non-numeric, or when its first cell is non-numeric but the next row's
/// is not. A label column is recognised when the first cell of the first
/// data row is non-numeric.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledGrid {
    pub corner: Option<String>,
    pub col_labels: Option<Vec<String>>,
    pub row_labels: Option<Vec<String>>,
    pub rows: usize,
    pub cols: usize,
    /// Row-major values.
    pub values: Vec<f64>,
}

fn is_number(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

impl LabelledGrid {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records: Vec<Vec<String>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            records.push(rec.iter().map(str::to_string).collect());
        }
        if records.is_empty() {
            return Err(Error::Malformed("no rows in table file".into()));
        }

        let first = &records[0];
        let header = first.iter().skip(1).any(|f| !is_number(f))
            || (!is_number(&first[0]) && records.get(1).is_some_and(|r| is_number(&r[0])));
        let body_start = usize::from(header);
        let labelled = records.get(body_start).is_some_and(|r| !is_number(&r[0]));

        let offset = usize::from(labelled);
        let (corner, col_labels) = if header {
            let mut h = records[0].clone();
            let corner = labelled.then(|| h.remove(0));
            (corner, Some(h))
        } else {
            (None, None)
        };

        let body = &records[body_start..];
        if body.is_empty() {
            return Err(Error::Malformed(
                "table file has a header but no data rows".into(),
            ));
        }
        let cols = body[0].len() - offset;
        if let Some(h) = &col_labels {
            if h.len() != cols {
                return Err(Error::NonRectangular {
                    row: 0,
                    expected: cols + offset,
                    found: h.len() + offset,
                });
            }
        }
        let mut values = Vec::with_capacity(body.len() * cols);
        let mut row_labels = Vec::new();
        for (i, rec) in body.iter().enumerate() {
            let line = i + body_start;
            if rec.len() != cols + offset {
                return Err(Error::NonRectangular {
                    row: line,
                    expected: cols + offset,
                    found: rec.len(),
                });
            }
            if labelled {
                row_labels.push(rec[0].clone());
            }
            for (j, field) in rec[offset..].iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Malformed(format!(
                        "line {}, column {}: `{field}` is not a number",
                        line + 1,
                        j + offset + 1
                    ))
                })?;
                values.push(v);
            }
        }
        Ok(LabelledGrid {
            corner,
            col_labels,
            row_labels: labelled.then_some(row_labels),
            rows: body.len(),
            cols,
            values,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        if let Some(h) = &self.col_labels {
            let mut rec: Vec<String> = Vec::new();
            if self.row_labels.is_some() {
                rec.push(self.corner.clone().unwrap_or_default());
            }
            rec.extend(h.iter().cloned());
            w.write_record(&rec)?;
        }
        for i in 0..self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(self.cols + 1);
            if let Some(labels) = &self.row_labels {
                rec.push(labels[i].clone());
            }
            rec.extend(
                self.values[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|&v| format_sig6(v)),
            );
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
    }

    /// The grid as a contingency table; counts must be finite and
    /// non-negative.
    pub fn to_table(&self) -> Result<ContingencyTable> {
        ContingencyTable::from_counts(self.rows, self.cols, &self.values)
    }

    /// Same labels, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.rows * self.cols);
        LabelledGrid {
            values,
            ..self.clone()
        }
    }
}

/// Reads a count table from CSV.
pub fn read_table<R: Read>(reader: R) -> Result<(ContingencyTable, LabelledGrid)> {
    let grid = LabelledGrid::read(reader)?;
    Ok((grid.to_table()?, grid))
}

/// Values of the coloured table: cluster ids in assigned cells, counts
/// elsewhere.
pub fn coloured_values(original: &ContingencyTable, map: &ClusterMap) -> Vec<f64> {
    map.coloured(original)
        .iter()
        .map(|(_, s)| match s {
            CellState::Active(c) => c,
            CellState::Empty => 0.0,
            CellState::Assigned(id) => f64::from(id.get()),
        })
        .collect()
}
