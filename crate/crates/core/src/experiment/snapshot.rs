use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::Normalizer;
use crate::engine::{infer, EngineConfig, Population};
use crate::error::{Error, Result};
use crate::rule::{Condition, Input};

/// A trained population with everything needed to classify raw inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSnapshot {
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
    pub normalizer: Normalizer,
    pub engine: EngineConfig,
    /// SHA-256 of the engine configuration as serialized JSON.
    pub config_hash: String,
    pub population: Population,
}

pub fn config_hash(cfg: &EngineConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

impl ModelSnapshot {
    pub fn new(
        population: Population,
        normalizer: Normalizer,
        attribute_names: Vec<String>,
        class_names: Vec<String>,
        engine: EngineConfig,
    ) -> Self {
        ModelSnapshot {
            attribute_names,
            class_names,
            normalizer,
            config_hash: config_hash(&engine),
            engine,
            population,
        }
    }

    pub fn dims(&self) -> usize {
        self.attribute_names.len()
    }

    /// Class index for an input in original (unnormalized) units.
    pub fn predict(&self, raw: &Input) -> usize {
        let x = self.normalizer.transform_row(raw);
        infer(&self.population, &x, self.engine.theta_exp)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    /// Parses and checks a snapshot; every rule must fit the stored
    /// dimensions and classes.
    pub fn from_json(text: &str) -> Result<Self> {
        let snap: ModelSnapshot = serde_json::from_str(text)?;
        snap.validate()?;
        Ok(snap)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("invalid model: {m}")));
        self.engine.validate()?;
        let d = self.dims();
        let pop = &self.population;
        if pop.dims != d || self.normalizer.min.len() != d || self.normalizer.max.len() != d {
            return bad(format!("dimension mismatch ({d} attributes)"));
        }
        if self.normalizer.min.iter().zip(&self.normalizer.max).any(|(a, b)| !a.is_finite() || !b.is_finite() || a > b) {
            return bad("normalizer ranges must be finite with min <= max".into());
        }
        if pop.num_classes != self.class_names.len() || pop.num_classes == 0 {
            return bad("class count mismatch".into());
        }
        if pop.fallback_class >= pop.num_classes {
            return bad("fallback class out of range".into());
        }
        for (i, r) in pop.rules.iter().enumerate() {
            if r.condition.dims() != d {
                return bad(format!("rule {i} has {} dimensions", r.condition.dims()));
            }
            if r.consequent >= pop.num_classes || r.correct_matching.len() != pop.num_classes {
                return bad(format!("rule {i} class data out of range"));
            }
            if !r.fitness.is_finite() || !r.experience.is_finite() || !r.correct_set_size.is_finite() {
                return bad(format!("rule {i} has non-finite statistics"));
            }
            match &r.condition {
                Condition::Beta(sets) => {
                    for s in sets {
                        s.validate().map_err(|e| Error::Config(format!("invalid model: rule {i}: {e}")))?;
                    }
                }
                Condition::Triangular(tris) => {
                    if tris.iter().any(|t| crate::rule::Triangle::new(t.left, t.peak, t.right).is_none()) {
                        return bad(format!("rule {i} has a malformed triangle"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn display_name(name: &str) -> String {
    const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    match name.strip_prefix('x') {
        Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            let mut s = String::from("x");
            s.extend(digits.bytes().map(|b| SUB[(b - b'0') as usize]));
            s
        }
        _ => name.to_owned(),
    }
}

/// One line per live rule, e.g.
/// `IF x₁ ∈ [0.00,1.00] AND x₂ is Beta4(2.00,3.00,0.10,0.90) THEN class 1`.
/// With `denormalize`, interval ends are mapped back to original units.
pub fn export_rules(snap: &ModelSnapshot, denormalize: bool) -> String {
    let names: Vec<String> = snap.attribute_names.iter().map(|n| display_name(n)).collect();
    let un = |j: usize, v: f64| if denormalize { snap.normalizer.unscale(j, v) } else { v };
    let mut out = String::new();
    for r in snap.population.live() {
        out.push_str("IF ");
        match &r.condition {
            Condition::Beta(sets) => {
                for (j, s) in sets.iter().enumerate() {
                    if j > 0 {
                        out.push_str(" AND ");
                    }
                    let (l, u) = (un(j, s.lower), un(j, s.upper));
                    if s.is_rectangular() {
                        write!(out, "{} ∈ [{l:.2},{u:.2}]", names[j]).unwrap();
                    } else {
                        write!(out, "{} is Beta4({:.2},{:.2},{l:.2},{u:.2})", names[j], s.alpha, s.beta).unwrap();
                    }
                }
            }
            Condition::Triangular(tris) => {
                for (j, t) in tris.iter().enumerate() {
                    if j > 0 {
                        out.push_str(" AND ");
                    }
                    let (a, b, c) = (un(j, t.left), un(j, t.peak), un(j, t.right));
                    write!(out, "{} is Tri({a:.2},{b:.2},{c:.2})", names[j]).unwrap();
                }
            }
        }
        writeln!(out, " THEN class {}", snap.class_names[r.consequent]).unwrap();
    }
    out
}
