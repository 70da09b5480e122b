use super::Dataset;
use crate::error::{Error, Result};

/// Parses libsvm text (`label idx:val ...`, 1-based sparse indices) into a
/// dense dataset. Missing indices are zero; `d` is the largest index seen.
/// Blank lines and `#` comments are skipped.
pub fn parse_libsvm(name: &str, text: &str) -> Result<Dataset> {
    let mut sparse: Vec<(Vec<(usize, f64)>, String)> = Vec::new();
    let mut dim = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().expect("nonempty line");
        if label.contains(':') {
            return Err(Error::parse(lineno, format!("missing label before '{label}'")));
        }
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index '{idx}'")))?;
            if idx == 0 {
                return Err(Error::parse(lineno, "feature indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(lineno, format!("non-numeric value '{val}'")))?;
            if !val.is_finite() {
                return Err(Error::parse(lineno, format!("non-finite value '{val}'")));
            }
            dim = dim.max(idx);
            entries.push((idx - 1, val));
        }
        sparse.push((entries, label.to_string()));
    }
    if sparse.is_empty() {
        return Err(Error::parse(0, "no examples in libsvm input"));
    }
    let rows = sparse
        .into_iter()
        .map(|(entries, label)| {
            let mut x = vec![0.0; dim];
            for (j, v) in entries {
                x[j] = v;
            }
            (x, label)
        })
        .collect();
    Dataset::from_raw(name, rows, "libsvm")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    /// 0-based column index.
    Index(usize),
    Last,
}

#[derive(Clone, Copy, Debug)]
pub struct CsvOptions {
    pub label_column: LabelColumn,
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label_column: LabelColumn::Last,
            delimiter: b',',
        }
    }
}

/// Parses delimited text with one label column. A first row whose feature
/// fields are not all numeric is taken as a header and skipped.
pub fn parse_csv(name: &str, text: &str, opts: CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .delimiter(opts.delimiter)
        .from_reader(text.as_bytes());

    let mut rows = Vec::new();
    let mut width = None;
    let mut first = true;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::parse(row, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let n = *width.get_or_insert(record.len());
        if record.len() != n {
            return Err(Error::parse(
                row,
                format!("expected {n} fields, found {}", record.len()),
            ));
        }
        if n < 2 {
            return Err(Error::parse(row, "need at least one feature and a label"));
        }
        let label_idx = match opts.label_column {
            LabelColumn::Last => n - 1,
            LabelColumn::Index(j) if j < n => j,
            LabelColumn::Index(j) => {
                return Err(Error::parse(row, format!("label column {j} out of range for {n} fields")))
            }
        };
        let features: Vec<&str> = record
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != label_idx)
            .map(|(_, f)| f)
            .collect();
        let parsed: Vec<Option<f64>> = features.iter().map(|f| f.parse::<f64>().ok()).collect();
        if std::mem::take(&mut first) && parsed.iter().any(Option::is_none) {
            // header row
            continue;
        }
        let mut x = Vec::with_capacity(parsed.len());
        for (f, v) in features.iter().zip(parsed) {
            match v {
                Some(v) if v.is_finite() => x.push(v),
                Some(_) => return Err(Error::parse(row, format!("non-finite feature '{f}'"))),
                None => return Err(Error::parse(row, format!("non-numeric feature '{f}'"))),
            }
        }
        rows.push((x, record[label_idx].to_string()));
    }
    if rows.is_empty() {
        return Err(Error::parse(0, "no examples in CSV input"));
    }
    Dataset::from_raw(name, rows, "csv")
}
