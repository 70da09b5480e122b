//! Text formats for streams and weight matrices.
//!
//! Stream CSV:
//!
//! ```text
//! # seed=7 set_size=2 num_classes=5 dim=3 generator=separable(k=5,...)
//! t,y_true,labels,x
//! 1,4,2;4,0.12;-0.5;0.9
//! ```
//!
//! Labels are 1-based; `labels` and `x` are `;`-joined. Floats are written
//! in shortest round-trip form, so reading a file back is exact.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Example, PartialLabelStream};
use crate::error::{Error, Result};
use crate::model::{CandidateLabelSet, WeightMatrix};

pub fn write_stream(stream: &PartialLabelStream) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# seed={} set_size={} num_classes={} dim={} generator={}",
        stream.seed, stream.set_size, stream.num_classes, stream.dim, stream.generator
    );
    out.push_str("t,y_true,labels,x\n");
    for (t, ex) in stream.examples.iter().enumerate() {
        let labels: Vec<String> = ex.labels.labels().iter().map(|l| (l + 1).to_string()).collect();
        let xs: Vec<String> = ex.x.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{},{},{},{}", t + 1, ex.y_true + 1, labels.join(";"), xs.join(";"));
    }
    out
}

pub fn read_stream(text: &str) -> Result<PartialLabelStream> {
    let mut lines = text.lines().enumerate();
    let (_, meta) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty stream file"))?;
    let meta = meta
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(1, "missing '# seed=...' metadata line"))?;
    let fields: HashMap<&str, &str> = meta
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let get = |key: &str| -> Result<&str> {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| Error::parse(1, format!("metadata is missing '{key}'")))
    };
    let num = |key: &str| -> Result<u64> {
        get(key)?
            .parse()
            .map_err(|_| Error::parse(1, format!("metadata '{key}' is not an integer")))
    };
    let seed = num("seed")?;
    let set_size = num("set_size")? as usize;
    let num_classes = num("num_classes")? as usize;
    let dim = num("dim")? as usize;
    let generator = get("generator")?.to_string();

    match lines.next() {
        Some((_, "t,y_true,labels,x")) => {}
        _ => return Err(Error::parse(2, "expected column header 't,y_true,labels,x'")),
    }

    let mut examples = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(Error::parse(lineno, format!("expected 4 columns, found {}", cols.len())));
        }
        let label = |s: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(l) if l >= 1 => Ok(l - 1),
                _ => Err(Error::parse(lineno, format!("bad label '{s}'"))),
            }
        };
        let y_true = label(cols[1])?;
        let labels = cols[2].split(';').map(label).collect::<Result<Vec<_>>>()?;
        let labels = CandidateLabelSet::new(labels, num_classes)
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
        let x = cols[3]
            .split(';')
            .map(|v| match v.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::parse(lineno, format!("bad feature '{v}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        examples.push(Example { x, labels, y_true });
    }
    let stream = PartialLabelStream {
        examples,
        seed,
        set_size,
        num_classes,
        dim,
        generator,
    };
    stream.validate()?;
    Ok(stream)
}

/// One line per class, `d` comma-separated weights.
pub fn write_weights(w: &WeightMatrix) -> String {
    let mut out = String::new();
    for col in w.columns() {
        let vals: Vec<String> = col.iter().map(|v| v.to_string()).collect();
        out.push_str(&vals.join(","));
        out.push('\n');
    }
    out
}

pub fn read_weights(text: &str) -> Result<WeightMatrix> {
    let cols = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(i + 1, format!("bad weight '{v}'")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    WeightMatrix::from_columns(&cols)
}
