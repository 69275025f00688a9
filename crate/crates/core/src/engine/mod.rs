//! The supervised fuzzy LCS training loop and its operators.
//!
//! One iteration: build the match set [M] and the correct set [C], cover if
//! [C] under-covers the input, update every rule in [M], run correct-set
//! subsumption, crispify, and finally run the steady-state GA on [C] when
//! its rules have not taken part in one for `theta_GA` iterations.

mod covering;
mod crispify;
mod deletion;
mod ga;
mod inference;
mod subsumption;
mod train;

pub use covering::cover;
pub use crispify::crispify;
pub use deletion::{deletion_votes, delete_to_capacity};
pub use ga::{crossover, mutate, run_ga, select_parent};
pub use inference::{class_scores, infer};
pub use subsumption::{correct_set_subsumption, is_more_general};
pub use train::{train, EpochStats, Trainer};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::{Input, RepresentationKind, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Fbr,
    FrozenRectangular,
    Triangular,
}

/// Every learning hyperparameter. Serialized names follow the usual
/// Fuzzy-UCS notation (`theta_GA`, `F0`, `Tol_sub`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Maximum population size in micro-rules.
    #[serde(rename = "N")]
    pub max_population: usize,
    #[serde(rename = "F0")]
    pub fitness_threshold: f64,
    #[serde(rename = "nu")]
    pub fitness_exponent: f64,
    #[serde(rename = "chi")]
    pub crossover_prob: f64,
    #[serde(rename = "p_mut")]
    pub mutation_prob: f64,
    #[serde(rename = "delta")]
    pub deletion_fitness_fraction: f64,
    #[serde(rename = "theta_GA")]
    pub theta_ga: f64,
    #[serde(rename = "theta_del")]
    pub theta_del: f64,
    #[serde(rename = "theta_sub")]
    pub theta_sub: f64,
    #[serde(rename = "theta_exp")]
    pub theta_exp: f64,
    #[serde(rename = "tau")]
    pub tournament_ratio: f64,
    #[serde(rename = "P_hash")]
    pub dont_care_prob: f64,
    #[serde(rename = "doCSSubsumption")]
    pub do_cs_subsumption: bool,
    #[serde(rename = "doGASubsumption")]
    pub do_ga_subsumption: bool,
    /// Covering half-width bound: `d ~ U(0, r0]`.
    pub r0: f64,
    /// Interval mutation range: `U[-m0, m0)`.
    pub m0: f64,
    #[serde(rename = "Tol_sub")]
    pub tol_sub: f64,
    /// Covering shape bound: `alpha = beta ~ U[1, s0]`.
    pub s0: f64,
    pub crispification: bool,
    pub representation: Representation,
    pub epochs: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_population: 2000,
            fitness_threshold: 0.99,
            fitness_exponent: 1.0,
            crossover_prob: 0.8,
            mutation_prob: 0.04,
            deletion_fitness_fraction: 0.01,
            theta_ga: 50.0,
            theta_del: 50.0,
            theta_sub: 50.0,
            theta_exp: 10.0,
            tournament_ratio: 0.4,
            dont_care_prob: 0.33,
            do_cs_subsumption: true,
            do_ga_subsumption: true,
            r0: 1.0,
            m0: 0.1,
            tol_sub: 0.01,
            s0: 1.0,
            crispification: true,
            representation: Representation::Fbr,
            epochs: 50,
        }
    }
}

impl EngineConfig {
    pub fn kind(&self) -> RepresentationKind {
        match self.representation {
            Representation::Fbr => RepresentationKind::Fbr {
                crispification: self.crispification,
                s0: self.s0,
            },
            Representation::FrozenRectangular => RepresentationKind::FrozenRectangular,
            Representation::Triangular => RepresentationKind::Triangular,
        }
    }

    /// Whether crispification actually runs for this representation.
    pub fn crispifies(&self) -> bool {
        matches!(
            self.kind(),
            RepresentationKind::Fbr {
                crispification: true,
                ..
            }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("F0", self.fitness_threshold),
            ("chi", self.crossover_prob),
            ("p_mut", self.mutation_prob),
            ("delta", self.deletion_fitness_fraction),
            ("tau", self.tournament_ratio),
            ("P_hash", self.dont_care_prob),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let non_negative = [
            ("nu", self.fitness_exponent),
            ("theta_GA", self.theta_ga),
            ("theta_del", self.theta_del),
            ("theta_sub", self.theta_sub),
            ("theta_exp", self.theta_exp),
            ("m0", self.m0),
            ("Tol_sub", self.tol_sub),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(Error::Config(format!("r0 must be > 0, got {}", self.r0)));
        }
        if !(self.s0.is_finite() && self.s0 >= 1.0) {
            return Err(Error::Config(format!("s0 must be >= 1, got {}", self.s0)));
        }
        if self.max_population == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Matched rule index together with its matching degree for the current
/// input.
pub type Matched = (usize, f64);

/// Multiset of macro-rules.
///
/// A rule whose numerosity drops to zero is dead: it is skipped by every
/// operator and physically removed by [`Population::compact`] at the end of
/// the iteration, so indices held in [M] and [C] stay valid within one
/// iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub rules: Vec<Rule>,
    pub capacity: usize,
    pub iteration: u64,
    pub dims: usize,
    pub num_classes: usize,
    /// Class predicted when no rule is eligible to vote.
    pub fallback_class: usize,
}

impl Population {
    pub fn new(capacity: usize, dims: usize, num_classes: usize) -> Self {
        Population {
            rules: Vec::new(),
            capacity,
            iteration: 0,
            dims,
            num_classes,
            fallback_class: 0,
        }
    }

    pub fn live(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.numerosity > 0)
    }

    pub fn macro_size(&self) -> usize {
        self.live().count()
    }

    pub fn micro_size(&self) -> u64 {
        self.rules.iter().map(|r| r.numerosity as u64).sum()
    }

    /// Share of live macro-rules whose every dimension is rectangular.
    pub fn crisp_fraction(&self) -> f64 {
        let n = self.macro_size();
        if n == 0 {
            return 0.0;
        }
        self.live().filter(|r| r.is_crisp()).count() as f64 / n as f64
    }

    /// Rules with strictly positive matching degree, with the degrees.
    pub fn build_match_set(&self, x: &Input) -> Vec<Matched> {
        let mut out = Vec::new();
        self.match_into(x, &mut out);
        out
    }

    pub(crate) fn match_into(&self, x: &Input, out: &mut Vec<Matched>) {
        out.clear();
        for (i, r) in self.rules.iter().enumerate() {
            if r.numerosity == 0 {
                continue;
            }
            let mu = r.matching_degree(x);
            if mu > 0.0 {
                out.push((i, mu));
            }
        }
    }

    /// Adds a rule, merging it into an identical live rule (same condition
    /// and consequent) when one exists. Returns the index holding it.
    pub fn insert(&mut self, rule: Rule) -> usize {
        if let Some(i) = self.rules.iter().position(|r| {
            r.numerosity > 0 && r.consequent == rule.consequent && r.condition == rule.condition
        }) {
            self.rules[i].numerosity += rule.numerosity;
            i
        } else {
            self.rules.push(rule);
            self.rules.len() - 1
        }
    }

    /// Drops dead rules.
    pub fn compact(&mut self) {
        self.rules.retain(|r| r.numerosity > 0);
    }
}
