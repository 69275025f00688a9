use crate::rule::Input;

use super::{Matched, Population};

/// Per-class vote `sum F * mu * num` over matching rules with
/// `exp > theta_exp`. The flag reports whether any rule voted.
pub fn class_scores(pop: &Population, x: &Input, theta_exp: f64) -> (Vec<f64>, bool) {
    let matched: Vec<Matched> = pop
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| r.numerosity > 0 && r.experience > theta_exp)
        .filter_map(|(i, r)| {
            let mu = r.matching_degree(x);
            (mu > 0.0).then_some((i, mu))
        })
        .collect();
    scores_from_match_set(pop, &matched, theta_exp)
}

pub(crate) fn scores_from_match_set(pop: &Population, matched: &[Matched], theta_exp: f64) -> (Vec<f64>, bool) {
    let mut scores = vec![0.0; pop.num_classes];
    let mut any = false;
    for &(i, mu) in matched {
        let r = &pop.rules[i];
        if r.numerosity == 0 || r.experience <= theta_exp {
            continue;
        }
        scores[r.consequent] += r.fitness * mu * r.numerosity as f64;
        any = true;
    }
    (scores, any)
}

/// Highest-scoring class; the lowest index wins ties. Falls back to the
/// population's stored class when no rule is eligible.
pub(crate) fn decide(pop: &Population, scores: &[f64], any: bool) -> usize {
    if !any {
        return pop.fallback_class;
    }
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Predicted class for `x`.
pub fn infer(pop: &Population, x: &Input, theta_exp: f64) -> usize {
    let (scores, any) = class_scores(pop, x, theta_exp);
    decide(pop, &scores, any)
}
