//! Datasets, partially labeled streams, and their text formats.

mod parse;
mod stream_io;
mod synth;

pub use parse::{parse_csv, parse_libsvm, CsvOptions, LabelColumn};
pub use stream_io::{read_stream, read_weights, write_stream, write_weights};
pub use synth::{
    draw_candidate_set, generate_noisy, generate_separable, synthesize_partial_labels,
    GeneratorKind, NoisyStream, SynthesisSpec, ACCEPTANCE_FLOOR, ATTEMPT_BUDGET,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::CandidateLabelSet;

/// One fully labeled instance. `label` is a 0-based class index.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<LabeledPoint>,
    pub num_classes: usize,
    pub dim: usize,
    /// Original label text for each class index, in class order.
    pub class_names: Vec<String>,
    pub provenance: String,
}

impl Dataset {
    /// Assembles a dataset from raw `(features, original label)` rows,
    /// remapping labels onto contiguous indices in sorted original order
    /// (numeric order when every label parses as a number).
    pub fn from_raw(
        name: impl Into<String>,
        rows: Vec<(Vec<f64>, String)>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::param("dataset has no examples"));
        }
        let dim = rows[0].0.len();
        if dim == 0 {
            return Err(Error::param("dataset has no features"));
        }
        let mut names: Vec<String> = rows.iter().map(|(_, l)| l.clone()).collect();
        sort_labels(&mut names);
        names.dedup();
        if names.len() < 2 {
            return Err(Error::param(format!(
                "need at least 2 distinct labels, found {}",
                names.len()
            )));
        }
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(i, (x, label))| {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: x.len(),
                    });
                }
                if let Some(v) = x.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(format!("feature {v} in example {}", i + 1)));
                }
                let label = names.iter().position(|n| *n == label).expect("label indexed");
                Ok(LabeledPoint { x, label })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            name: name.into(),
            points,
            num_classes: names.len(),
            dim,
            class_names: names,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps the first `max_rows` examples.
    pub fn truncated(mut self, max_rows: usize) -> Self {
        self.points.truncate(max_rows);
        self
    }

    /// Rescales every feature to `[0, 1]`; constant features become 0.
    pub fn min_max_scaled(mut self) -> Self {
        for j in 0..self.dim {
            let (lo, hi) = self
                .points
                .iter()
                .map(|p| p.x[j])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let span = hi - lo;
            for p in &mut self.points {
                p.x[j] = if span > 0.0 { (p.x[j] - lo) / span } else { 0.0 };
            }
        }
        self.provenance.push_str(" [min-max scaled]");
        self
    }

    /// Plain-text rendering used by the parser golden files.
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name={}", self.name);
        let _ = writeln!(out, "num_classes={}", self.num_classes);
        let _ = writeln!(out, "dim={}", self.dim);
        let _ = writeln!(out, "examples={}", self.points.len());
        let map: Vec<String> = self
            .class_names
            .iter()
            .enumerate()
            .map(|(k, n)| format!("{n}->{}", k + 1))
            .collect();
        let _ = writeln!(out, "label_map={}", map.join(","));
        for p in &self.points {
            let xs: Vec<String> = p.x.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{} {}", p.label + 1, xs.join(","));
        }
        out
    }
}

fn sort_labels(names: &mut [String]) {
    let numeric: Option<Vec<f64>> = names.iter().map(|n| n.trim().parse::<f64>().ok()).collect();
    match numeric {
        Some(_) => names.sort_by(|a, b| {
            let (x, y) = (a.trim().parse::<f64>().unwrap(), b.trim().parse::<f64>().unwrap());
            x.total_cmp(&y).then_with(|| a.cmp(b))
        }),
        None => names.sort(),
    }
}

/// Instance with its candidate set and hidden true label (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub x: Vec<f64>,
    pub labels: CandidateLabelSet,
    pub y_true: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialLabelStream {
    pub examples: Vec<Example>,
    pub seed: u64,
    pub set_size: usize,
    pub num_classes: usize,
    pub dim: usize,
    /// Compact description of how the stream was produced.
    pub generator: String,
}

impl PartialLabelStream {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Checks `y ∈ Y`, `|Y| = s` and shape consistency for every example.
    pub fn validate(&self) -> Result<()> {
        for (i, ex) in self.examples.iter().enumerate() {
            if ex.x.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: ex.x.len(),
                });
            }
            if !ex.labels.contains(ex.y_true) {
                return Err(Error::InvalidLabelSet(format!(
                    "example {}: true label {} not in candidate set",
                    i + 1,
                    ex.y_true + 1
                )));
            }
            if ex.labels.len() != self.set_size || ex.labels.num_classes() != self.num_classes {
                return Err(Error::InvalidLabelSet(format!(
                    "example {}: expected |Y| = {} over {} classes",
                    i + 1,
                    self.set_size,
                    self.num_classes
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(rows: &[(&[f64], &str)]) -> Vec<(Vec<f64>, String)> {
        rows.iter().map(|(x, l)| (x.to_vec(), l.to_string())).collect()
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let ds = Dataset::from_raw("t", raw(&[(&[1.0], "10"), (&[2.0], "2"), (&[3.0], "2")]), "").unwrap();
        assert_eq!(ds.class_names, vec!["2", "10"]);
        assert_eq!(ds.points.iter().map(|p| p.label).collect::<Vec<_>>(), vec![1, 0, 0]);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(Dataset::from_raw("t", raw(&[(&[1.0], "a"), (&[2.0], "a")]), "").is_err());
    }

    #[test]
    fn min_max_scaling() {
        let ds = Dataset::from_raw("t", raw(&[(&[1.0, 5.0], "a"), (&[3.0, 5.0], "b"), (&[2.0, 5.0], "a")]), "")
            .unwrap()
            .min_max_scaled();
        let xs: Vec<Vec<f64>> = ds.points.iter().map(|p| p.x.clone()).collect();
        assert_eq!(xs, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.0]]);
    }
}
