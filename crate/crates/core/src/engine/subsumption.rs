use crate::beta::Beta4;
use crate::rule::{Condition, Rule, Triangle};

use super::{EngineConfig, Population};

/// Per-dimension generality test for beta sets:
///
/// 1. the interval of `sub`, clipped to `[0, 1]`, contains that of `tos`;
/// 2. `sub` is no more peaked than `tos` (kurtosis);
/// 3. unless either set is rectangular, the modes lie within `tol`.
fn beta_more_general(sub: &Beta4, tos: &Beta4, tol: f64) -> bool {
    if sub.lower.max(0.0) > tos.lower.max(0.0) || tos.upper.min(1.0) > sub.upper.min(1.0) {
        return false;
    }
    if sub.kurtosis() > tos.kurtosis() {
        return false;
    }
    sub.is_rectangular() || tos.is_rectangular() || (sub.mode() - tos.mode()).abs() <= tol
}

/// Triangles: the support of `sub`, clipped to `[0, 1]`, contains that of
/// `tos`.
fn triangle_more_general(sub: &Triangle, tos: &Triangle) -> bool {
    sub.left.max(0.0) <= tos.left.max(0.0) && tos.right.min(1.0) <= sub.right.min(1.0)
}

/// Whether `sub` is at least as general as `tos` in every dimension.
///
/// Panics when the two conditions use different representations or
/// dimensionalities.
pub fn is_more_general(sub: &Condition, tos: &Condition, tol_sub: f64) -> bool {
    match (sub, tos) {
        (Condition::Beta(a), Condition::Beta(b)) => {
            assert_eq!(a.len(), b.len(), "dimensionality mismatch");
            a.iter().zip(b).all(|(s, t)| beta_more_general(s, t, tol_sub))
        }
        (Condition::Triangular(a), Condition::Triangular(b)) => {
            assert_eq!(a.len(), b.len(), "dimensionality mismatch");
            a.iter().zip(b).all(|(s, t)| triangle_more_general(s, t))
        }
        _ => panic!("subsumption across representations"),
    }
}

/// Experienced and accurate enough to absorb other rules.
pub(crate) fn can_subsume(rule: &Rule, cfg: &EngineConfig) -> bool {
    rule.numerosity > 0 && rule.experience > cfg.theta_sub && rule.fitness > cfg.fitness_threshold
}

/// Picks the eligible rule in `correct_set` that is more general than the
/// most other members (ties: larger numerosity, then lower index) and folds
/// every member it generalizes into it. Returns the number of absorbed
/// macro-rules.
pub fn correct_set_subsumption(pop: &mut Population, correct_set: &[usize], cfg: &EngineConfig) -> usize {
    let mut best: Option<(usize, usize)> = None;
    for &e in correct_set {
        if !can_subsume(&pop.rules[e], cfg) {
            continue;
        }
        let covered = correct_set
            .iter()
            .filter(|&&c| {
                c != e
                    && pop.rules[c].numerosity > 0
                    && is_more_general(&pop.rules[e].condition, &pop.rules[c].condition, cfg.tol_sub)
            })
            .count();
        best = match best {
            None => Some((e, covered)),
            Some((b, bc)) => {
                let better = covered > bc
                    || (covered == bc
                        && (pop.rules[e].numerosity > pop.rules[b].numerosity
                            || (pop.rules[e].numerosity == pop.rules[b].numerosity && e < b)));
                if better {
                    Some((e, covered))
                } else {
                    Some((b, bc))
                }
            }
        };
    }
    let Some((sub, covered)) = best else { return 0 };
    if covered == 0 {
        return 0;
    }
    let mut absorbed = 0;
    for &c in correct_set {
        if c == sub || pop.rules[c].numerosity == 0 {
            continue;
        }
        if is_more_general(&pop.rules[sub].condition, &pop.rules[c].condition, cfg.tol_sub) {
            let n = pop.rules[c].numerosity;
            pop.rules[c].numerosity = 0;
            pop.rules[sub].numerosity += n;
            absorbed += 1;
        }
    }
    absorbed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(a: f64, bt: f64, l: f64, u: f64) -> Beta4 {
        Beta4::new(a, bt, l, u).unwrap()
    }

    fn cond(sets: &[Beta4]) -> Condition {
        Condition::Beta(sets.to_vec())
    }

    #[test]
    fn identical_rectangles_are_more_general() {
        let c = cond(&[b(1.0, 1.0, 0.2, 0.6), b(1.0, 1.0, 0.0, 1.0)]);
        assert!(is_more_general(&c, &c, 0.01));
    }

    #[test]
    fn rectangle_generalizes_bell_without_mode_check() {
        let sub = cond(&[b(1.0, 1.0, 0.0, 1.0)]);
        let tos = cond(&[b(2.0, 2.0, 0.2, 0.8)]);
        assert!(is_more_general(&sub, &tos, 0.01));
        assert!(!is_more_general(&tos, &sub, 0.01));
    }

    #[test]
    fn sharper_peak_cannot_generalize() {
        let sub = cond(&[b(2.0, 2.0, 0.0, 1.0)]);
        let tos = cond(&[b(1.5, 1.5, 0.1, 0.9)]);
        assert!(!is_more_general(&sub, &tos, 0.01));
    }

    #[test]
    fn mode_tolerance_applies_between_fuzzy_sets() {
        let sub = cond(&[b(2.0, 2.0, 0.0, 1.0)]);
        let near = cond(&[b(3.0, 3.0, 0.1, 0.91)]);
        let far = cond(&[b(3.0, 3.0, 0.1, 0.95)]);
        // modes 0.5 vs 0.505 and 0.525
        assert!(is_more_general(&sub, &near, 0.01));
        assert!(!is_more_general(&sub, &far, 0.01));
    }

    #[test]
    fn interval_containment_is_clipped_to_unit_domain() {
        let sub = cond(&[b(1.0, 1.0, -0.3, 1.0)]);
        let tos = cond(&[b(1.0, 1.0, -0.5, 0.9)]);
        // both start at 0 after clipping
        assert!(is_more_general(&sub, &tos, 0.01));
        let tos = cond(&[b(1.0, 1.0, 0.1, 1.2)]);
        assert!(is_more_general(&sub, &tos, 0.01));
        let sub = cond(&[b(1.0, 1.0, 0.2, 0.8)]);
        assert!(!is_more_general(&sub, &tos, 0.01));
    }

    #[test]
    fn triangle_containment() {
        let sub = Condition::Triangular(vec![Triangle::new(-0.2, 0.5, 1.3).unwrap()]);
        let tos = Condition::Triangular(vec![Triangle::new(0.1, 0.4, 0.9).unwrap()]);
        assert!(is_more_general(&sub, &tos, 0.0));
        assert!(!is_more_general(&tos, &sub, 0.0));
    }

    #[test]
    #[should_panic(expected = "across representations")]
    fn mixed_representations_panic() {
        let a = cond(&[Beta4::DONT_CARE]);
        let t = Condition::Triangular(vec![Triangle::new(0.0, 0.5, 1.0).unwrap()]);
        is_more_general(&a, &t, 0.01);
    }

    fn experienced(c: Condition, exp: f64, fitness: f64) -> Rule {
        let mut r = Rule::new(c, 0, 2, 0);
        r.experience = exp;
        r.fitness = fitness;
        r
    }

    #[test]
    fn correct_set_subsumption_absorbs_narrower_rule() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(100, 1, 2);
        pop.rules.push(experienced(cond(&[Beta4::DONT_CARE]), 60.0, 1.0));
        pop.rules.push(experienced(cond(&[b(1.0, 1.0, 0.2, 0.6)]), 5.0, 1.0));
        let n = correct_set_subsumption(&mut pop, &[0, 1], &cfg);
        assert_eq!(n, 1);
        assert_eq!(pop.rules[0].numerosity, 2);
        assert_eq!(pop.rules[1].numerosity, 0);
        assert_eq!(pop.micro_size(), 2);
    }

    #[test]
    fn inexperienced_or_inaccurate_rules_do_not_subsume() {
        let cfg = EngineConfig::default();
        for (exp, fit) in [(50.0, 1.0), (10.0, 1.0), (60.0, 0.98)] {
            let mut pop = Population::new(100, 1, 2);
            pop.rules.push(experienced(cond(&[Beta4::DONT_CARE]), exp, fit));
            pop.rules.push(experienced(cond(&[b(1.0, 1.0, 0.2, 0.6)]), 5.0, 1.0));
            assert_eq!(correct_set_subsumption(&mut pop, &[0, 1], &cfg), 0);
            assert_eq!(pop.rules[1].numerosity, 1);
        }
    }

    #[test]
    fn most_general_eligible_rule_is_chosen() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(100, 1, 2);
        pop.rules.push(experienced(cond(&[b(1.0, 1.0, 0.1, 0.7)]), 60.0, 1.0));
        pop.rules.push(experienced(cond(&[Beta4::DONT_CARE]), 60.0, 1.0));
        pop.rules.push(experienced(cond(&[b(1.0, 1.0, 0.2, 0.6)]), 5.0, 1.0));
        correct_set_subsumption(&mut pop, &[0, 1, 2], &cfg);
        assert_eq!(pop.rules[1].numerosity, 3);
        assert_eq!(pop.micro_size(), 3);
    }
}
