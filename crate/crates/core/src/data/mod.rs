//! Datasets, CSV ingestion, min-max normalization and train/test splits.

mod csv;
mod normalize;
mod split;

pub use self::csv::{load_csv, parse_csv, CsvOptions};
pub use normalize::Normalizer;
pub use split::{split, Fold, SplitProtocol};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature matrix with optional missing entries plus integer labels in
/// `0..class_names.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<Option<f64>>>,
    pub labels: Vec<usize>,
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<Vec<Option<f64>>>,
        labels: Vec<usize>,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let d = attribute_names.len();
        if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::Dataset(format!("row {i} has {} attributes, expected {d}", row.len())));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Dataset(format!(
                "label {l} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            attribute_names,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Most frequent class, lowest index on ties.
    pub fn majority_class(&self) -> usize {
        let counts = self.class_counts();
        let mut best = 0;
        for (c, &n) in counts.iter().enumerate() {
            if n > counts[best] {
                best = c;
            }
        }
        best
    }

    /// Rows at `indices`, in that order. The class list is kept whole so
    /// label indices stay stable.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            attribute_names: self.attribute_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Re-expresses labels against an existing class list, e.g. one stored
    /// in a trained model. Unknown class names are an error.
    pub fn align_classes(&self, known: &[String]) -> Result<Dataset> {
        let map: Vec<usize> = self
            .class_names
            .iter()
            .map(|name| {
                known
                    .iter()
                    .position(|k| k == name)
                    .ok_or_else(|| Error::Dataset(format!("class {name:?} is unknown to the model")))
            })
            .collect::<Result<_>>()?;
        Ok(Dataset {
            features: self.features.clone(),
            labels: self.labels.iter().map(|&l| map[l]).collect(),
            attribute_names: self.attribute_names.clone(),
            class_names: known.to_vec(),
        })
    }

    pub fn missing_count(&self) -> usize {
        self.features.iter().flatten().filter(|v| v.is_none()).count()
    }
}
