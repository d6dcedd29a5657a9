//! CSV form of training samples: columns `t_1..t_M`, `x_1..x_L` and `level`,
//! where level 0 marks an unstratified sample.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fit::{Sample, StratifiedSample, TrainingSet};
use crate::simplex::SimplexPoint;

fn csv_error(path: Option<&Path>, e: csv::Error) -> Error {
    match (path, e.kind()) {
        (Some(p), csv::ErrorKind::Io(_)) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(p, io),
            _ => unreachable!(),
        },
        _ => Error::Parse {
            row: e.position().map(|p| p.record() as usize).unwrap_or(0),
            column: String::new(),
            message: e.to_string(),
        },
    }
}

fn write_rows<W: Write>(csv: &mut csv::Writer<W>, sample: &Sample, level: usize) -> std::result::Result<(), csv::Error> {
    for (n, t) in sample.params().iter().enumerate() {
        let mut record: Vec<String> = t.coords().iter().map(|v| format!("{v:?}")).collect();
        record.extend(sample.values().row(n).iter().map(|v| format!("{v:?}")));
        record.push(level.to_string());
        csv.write_record(&record)?;
    }
    Ok(())
}

pub fn write_training_set<W: Write>(writer: W, set: &TrainingSet) -> Result<()> {
    let (dim, ambient) = match set {
        TrainingSet::Plain(s) => (s.dim(), s.ambient()),
        TrainingSet::Stratified(s) => (s.dim(), s.ambient()),
    };
    let mut csv = csv::Writer::from_writer(writer);
    let header: Vec<String> = (1..=dim)
        .map(|j| format!("t_{j}"))
        .chain((1..=ambient).map(|l| format!("x_{l}")))
        .chain(["level".to_string()])
        .collect();
    let result = (|| {
        csv.write_record(&header)?;
        match set {
            TrainingSet::Plain(s) => write_rows(&mut csv, s, 0)?,
            TrainingSet::Stratified(s) => {
                for (&m, level) in s.levels() {
                    write_rows(&mut csv, level, m)?;
                }
            }
        }
        csv.flush().map_err(csv::Error::from)
    })();
    result.map_err(|e| csv_error(None, e))
}

pub fn save_training_set(path: impl AsRef<Path>, set: &TrainingSet) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_training_set(std::io::BufWriter::new(file), set).map_err(|e| match e {
        Error::Parse { message, .. } => Error::io(path, std::io::Error::other(message)),
        other => other,
    })
}

/// Reads a sample. A file whose `level` column is absent or all zero is
/// unstratified; otherwise every row needs a level in `1..=M`.
pub fn read_training_set<R: Read>(reader: R) -> Result<TrainingSet> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| csv_error(None, e))?.clone();
    let index_of = |prefix: &str| -> Vec<usize> {
        let mut cols = Vec::new();
        while let Some(pos) = headers.iter().position(|h| h == format!("{prefix}_{}", cols.len() + 1)) {
            cols.push(pos);
        }
        cols
    };
    let t_cols = index_of("t");
    let x_cols = index_of("x");
    let level_col = headers.iter().position(|h| h == "level");
    if t_cols.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: "t_1".into(),
            message: "missing column".into(),
        });
    }
    if x_cols.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: "x_1".into(),
            message: "missing column".into(),
        });
    }
    let (dim, ambient) = (t_cols.len(), x_cols.len());

    let mut rows: Vec<(usize, SimplexPoint, Vec<f64>)> = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(None, e))?;
        let cell = |pos: usize, name: &str| -> Result<f64> {
            let s = record.get(pos).unwrap_or("");
            s.parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: name.to_string(),
                message: format!("not a number: {s:?}"),
            })
        };
        let t = t_cols
            .iter()
            .enumerate()
            .map(|(j, &p)| cell(p, &format!("t_{}", j + 1)))
            .collect::<Result<Vec<_>>>()?;
        let x = x_cols
            .iter()
            .enumerate()
            .map(|(l, &p)| cell(p, &format!("x_{}", l + 1)))
            .collect::<Result<Vec<_>>>()?;
        let level = match level_col {
            Some(p) => record.get(p).unwrap_or("").parse::<usize>().map_err(|_| Error::Parse {
                row,
                column: "level".into(),
                message: "not a non-negative integer".into(),
            })?,
            None => 0,
        };
        let t = SimplexPoint::new(t).map_err(|e| Error::Parse {
            row,
            column: "t".into(),
            message: e.to_string(),
        })?;
        rows.push((level, t, x));
    }

    if rows.iter().all(|(m, _, _)| *m == 0) {
        let pairs = rows.into_iter().map(|(_, t, x)| (t, x)).collect();
        return Sample::from_pairs(dim, ambient, pairs).map(TrainingSet::Plain);
    }
    let mut out = StratifiedSample::new(dim, ambient);
    let mut grouped: std::collections::BTreeMap<usize, Vec<(SimplexPoint, Vec<f64>)>> = Default::default();
    for (row, (m, t, x)) in rows.into_iter().enumerate() {
        if m == 0 || m > dim {
            return Err(Error::Parse {
                row: row + 1,
                column: "level".into(),
                message: format!("level {m} in a stratified sample of dimension {dim}"),
            });
        }
        grouped.entry(m).or_default().push((t, x));
    }
    for (m, pairs) in grouped {
        out.insert(m, Sample::from_pairs(dim, ambient, pairs)?)?;
    }
    Ok(TrainingSet::Stratified(out))
}

pub fn load_training_set(path: impl AsRef<Path>) -> Result<TrainingSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_training_set(std::io::BufReader::new(file))
}
