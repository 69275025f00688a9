//! Classifier rules: conditions, matching degrees and the per-match
//! parameter update shared by every representation.

use serde::{Deserialize, Serialize};

use crate::beta::Beta4;

/// Instance features after normalization; `None` marks a missing value.
pub type Input = [Option<f64>];

/// Vertices of a non-grid-oriented triangular membership function,
/// `left < peak < right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl Triangle {
    pub fn new(left: f64, peak: f64, right: f64) -> Option<Self> {
        (left < peak && peak < right && left.is_finite() && right.is_finite()).then_some(Triangle {
            left,
            peak,
            right,
        })
    }

    /// Ramp up on `(left, peak]`, ramp down on `(peak, right]`, zero
    /// elsewhere. The left vertex itself is excluded.
    #[inline]
    pub fn membership(&self, x: f64) -> f64 {
        if self.left < x && x <= self.peak {
            (x - self.left) / (self.peak - self.left)
        } else if self.peak < x && x <= self.right {
            (self.right - x) / (self.right - self.peak)
        } else {
            0.0
        }
    }
}

pub fn triangular_membership(x: f64, t: &Triangle) -> f64 {
    t.membership(x)
}

/// Rule antecedent: one fuzzy set per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sets", rename_all = "snake_case")]
pub enum Condition {
    Beta(Vec<Beta4>),
    Triangular(Vec<Triangle>),
}

impl Condition {
    pub fn dims(&self) -> usize {
        match self {
            Condition::Beta(s) => s.len(),
            Condition::Triangular(s) => s.len(),
        }
    }

    /// Product of per-dimension memberships. Missing attributes contribute 1.
    ///
    /// Panics if `x` has a different dimensionality.
    #[inline]
    pub fn matching_degree(&self, x: &Input) -> f64 {
        assert_eq!(self.dims(), x.len(), "input dimensionality mismatch");
        let mut mu = 1.0;
        match self {
            Condition::Beta(sets) => {
                for (set, xi) in sets.iter().zip(x) {
                    if let Some(v) = *xi {
                        mu *= set.membership(v);
                        if mu == 0.0 {
                            return 0.0;
                        }
                    }
                }
            }
            Condition::Triangular(sets) => {
                for (set, xi) in sets.iter().zip(x) {
                    if let Some(v) = *xi {
                        mu *= set.membership(v);
                        if mu == 0.0 {
                            return 0.0;
                        }
                    }
                }
            }
        }
        mu
    }

    /// Number of dimensions whose shape is not rectangular. Triangles are
    /// never rectangular.
    pub fn fuzzy_dims(&self) -> usize {
        match self {
            Condition::Beta(sets) => sets.iter().filter(|s| !s.is_rectangular()).count(),
            Condition::Triangular(sets) => sets.len(),
        }
    }

    pub fn is_crisp(&self) -> bool {
        self.fuzzy_dims() == 0
    }
}

/// Which rule representation the engine evolves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationKind {
    /// Four-parameter beta sets, optionally with crispification; covering
    /// draws shapes from `U[1, s0]`.
    Fbr { crispification: bool, s0: f64 },
    /// Beta sets pinned to `alpha = beta = 1`: crisp hyperrectangles.
    FrozenRectangular,
    Triangular,
}

/// A macro-rule with its learning statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub condition: Condition,
    pub consequent: usize,
    pub fitness: f64,
    /// Accumulated matching degree per class.
    pub correct_matching: Vec<f64>,
    pub experience: f64,
    pub numerosity: u32,
    /// Running estimate of the correct-set size this rule takes part in.
    pub correct_set_size: f64,
    pub ga_timestamp: u64,
}

impl Rule {
    /// Fresh rule with zeroed statistics.
    pub fn new(condition: Condition, consequent: usize, num_classes: usize, timestamp: u64) -> Self {
        assert!(consequent < num_classes, "consequent out of range");
        Rule {
            condition,
            consequent,
            fitness: 0.0,
            correct_matching: vec![0.0; num_classes],
            experience: 0.0,
            numerosity: 1,
            correct_set_size: 1.0,
            ga_timestamp: timestamp,
        }
    }

    #[inline]
    pub fn matching_degree(&self, x: &Input) -> f64 {
        self.condition.matching_degree(x)
    }

    /// Penalized certainty factor `(cm_max - sum of the rest) / exp`, or 0
    /// for an unexperienced rule.
    pub fn certainty(&self) -> f64 {
        if self.experience <= 0.0 {
            return 0.0;
        }
        let total: f64 = self.correct_matching.iter().sum();
        let best = self.correct_matching[self.consequent];
        (2.0 * best - total) / self.experience
    }

    /// Applies one matching event with degree `mu` for an instance of class
    /// `true_class`: experience and correct-matching grow by `mu`, the
    /// consequent follows the largest certainty grade and fitness is
    /// recomputed. `nu` is the fitness exponent.
    pub fn update_on_match(&mut self, mu: f64, true_class: usize, nu: f64) {
        debug_assert!(mu > 0.0 && mu <= 1.0 + 1e-12, "mu = {mu}");
        self.experience += mu;
        self.correct_matching[true_class] += mu;

        // keep the current consequent on ties
        let mut best = self.consequent;
        for (i, &cm) in self.correct_matching.iter().enumerate() {
            if cm > self.correct_matching[best] {
                best = i;
            }
        }
        self.consequent = best;

        let f = self.certainty();
        self.fitness = if nu == 1.0 { f } else { f.signum() * f.abs().powf(nu) };
    }

    /// Experience-weighted running average toward the current correct-set
    /// micro size. Call after `update_on_match` for rules in [C].
    pub fn update_correct_set_size(&mut self, mu: f64, set_numerosity: f64) {
        if self.experience > 0.0 {
            self.correct_set_size += (mu / self.experience) * (set_numerosity - self.correct_set_size);
        }
    }

    pub fn reset_statistics(&mut self) {
        self.experience = 0.0;
        self.correct_matching.iter_mut().for_each(|c| *c = 0.0);
    }

    pub fn is_crisp(&self) -> bool {
        self.condition.is_crisp()
    }
}
