use serde::{Deserialize, Serialize};

use super::Dataset;

/// Per-attribute min-max scaling fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalizer {
    /// Ranges of the observed (non-missing) values. An attribute with no
    /// observations gets the range `[0, 0]`.
    pub fn fit(train: &Dataset) -> Self {
        let d = train.dims();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in &train.features {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    min[j] = min[j].min(v);
                    max[j] = max[j].max(v);
                }
            }
        }
        for j in 0..d {
            if min[j] > max[j] {
                min[j] = 0.0;
                max[j] = 0.0;
            }
        }
        Normalizer { min, max }
    }

    /// Maps one value into `[0, 1]`, clipping out-of-range values. A
    /// constant attribute maps everything to 0.5.
    pub fn scale(&self, attr: usize, v: f64) -> f64 {
        let (lo, hi) = (self.min[attr], self.max[attr]);
        if hi <= lo {
            return 0.5;
        }
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// Inverse of [`scale`](Self::scale) on the fitted range.
    pub fn unscale(&self, attr: usize, v: f64) -> f64 {
        self.min[attr] + v * (self.max[attr] - self.min[attr])
    }

    pub fn transform_row(&self, row: &[Option<f64>]) -> Vec<Option<f64>> {
        row.iter()
            .enumerate()
            .map(|(j, v)| v.map(|v| self.scale(j, v)))
            .collect()
    }

    pub fn transform(&self, data: &Dataset) -> Dataset {
        Dataset {
            features: data.features.iter().map(|r| self.transform_row(r)).collect(),
            ..data.clone()
        }
    }

    /// Fits on `train` and applies the result to both parts.
    pub fn fit_transform(train: &Dataset, test: &Dataset) -> (Normalizer, Dataset, Dataset) {
        let n = Normalizer::fit(train);
        let (a, b) = (n.transform(train), n.transform(test));
        (n, a, b)
    }
}
