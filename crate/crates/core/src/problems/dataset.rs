//! Regression data for the group-lasso benchmark.

use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Feature columns in order, followed by the response.
const FEATURES: [&str; 6] = ["age1", "age2", "age3", "lwt1", "lwt2", "lwt3"];
const RESPONSE: &str = "bwt";

/// Number of births in the bundled extract.
pub const BIRTHWT_ROWS: usize = 189;

const BIRTHWT_CSV: &str = include_str!("../../data/birthwt_grouped.csv");

/// Standardized features `A`, centered response `y` and the feature groups.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionDataset {
    pub a: DMatrix<f64>,
    pub y: DVector<f64>,
    pub feature_names: Vec<String>,
    /// Group label and the feature columns it owns.
    pub groups: Vec<(String, Vec<usize>)>,
}

impl RegressionDataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn group(&self, label: &str) -> Option<&[usize]> {
        self.groups.iter().find(|(g, _)| g == label).map(|(_, c)| c.as_slice())
    }
}

/// The bundled birth-weight extract.
pub fn birthwt() -> RegressionDataset {
    parse_regression_dataset(BIRTHWT_CSV.as_bytes(), Some(BIRTHWT_ROWS)).expect("bundled dataset parses")
}

pub fn load_regression_dataset(path: impl AsRef<Path>, expected_rows: Option<usize>) -> Result<RegressionDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_regression_dataset(file, expected_rows)
}

fn parse_error(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Parses a CSV with header `age1,age2,age3,lwt1,lwt2,lwt3,bwt` (extra columns
/// are ignored). Features are standardized to zero mean and unit population
/// variance and the response is centered. Rows are numbered from 1 after the
/// header; row 0 refers to the header or the file as a whole.
pub fn parse_regression_dataset<R: Read>(reader: R, expected_rows: Option<usize>) -> Result<RegressionDataset> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| parse_error(0, "", e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(parse_error(0, "", "missing header row"));
    }
    let wanted: Vec<&str> = FEATURES.iter().copied().chain([RESPONSE]).collect();
    let positions = wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| parse_error(0, name, "missing column"))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| parse_error(row, "", e.to_string()))?;
        let mut values = [0.0; 7];
        for (k, (&pos, name)) in positions.iter().zip(&wanted).enumerate() {
            let cell = record.get(pos).ok_or_else(|| parse_error(row, name, "missing cell"))?;
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(row, name, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_error(row, name, format!("not finite: {cell:?}")));
            }
            values[k] = v;
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_error(0, "", "no data rows"));
    }
    if let Some(expected) = expected_rows {
        if rows.len() != expected {
            return Err(parse_error(
                rows.len(),
                "",
                format!("expected {expected} rows, found {}", rows.len()),
            ));
        }
    }

    let n = rows.len();
    let mut a = DMatrix::from_fn(n, FEATURES.len(), |i, j| rows[i][j]);
    for (j, name) in FEATURES.iter().enumerate() {
        let mut col = a.column_mut(j);
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / n as f64).sqrt();
        if sd <= f64::EPSILON * mean.abs().max(1.0) {
            return Err(parse_error(0, name, "column has zero variance"));
        }
        col /= sd;
    }
    let mut y = DVector::from_fn(n, |i, _| rows[i][6]);
    let mean = y.mean();
    y.add_scalar_mut(-mean);

    Ok(RegressionDataset {
        a,
        y,
        feature_names: FEATURES.iter().map(|s| s.to_string()).collect(),
        groups: vec![("age".into(), vec![0, 1, 2]), ("lwt".into(), vec![3, 4, 5])],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_extract() {
        let d = birthwt();
        assert_eq!(d.len(), BIRTHWT_ROWS);
        assert_eq!(d.group("lwt"), Some(&[3, 4, 5][..]));
        for col in d.a.column_iter() {
            assert!(col.mean().abs() <= 1e-10);
            let var = col.norm_squared() / d.len() as f64;
            assert!((var - 1.0).abs() <= 1e-10);
        }
        assert!(d.y.mean().abs() <= 1e-10);
    }

    #[test]
    fn parse_errors_carry_location() {
        assert!(matches!(parse_regression_dataset("".as_bytes(), None), Err(Error::Parse { .. })));
        let header = "age1,age2,age3,lwt1,lwt2,lwt3,bwt\n";
        let missing = "age1,age2,age3,lwt1,lwt2,bwt\n1,2,3,4,5,6\n";
        match parse_regression_dataset(missing.as_bytes(), None) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, "lwt3"),
            other => panic!("{other:?}"),
        }
        let bad = format!("{header}1,2,3,4,5,6,7\n2,3,4,5,x,7,8\n");
        match parse_regression_dataset(bad.as_bytes(), None) {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column.as_str()), (2, "lwt2")),
            other => panic!("{other:?}"),
        }
        let ok = format!("{header}1,2,3,4,5,6,7\n2,3,4,5,6,8,8\n");
        assert!(parse_regression_dataset(ok.as_bytes(), Some(2)).is_ok());
        assert!(matches!(
            parse_regression_dataset(ok.as_bytes(), Some(3)),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_regression_dataset(header.as_bytes(), None),
            Err(Error::Parse { .. })
        ));
    }
}
