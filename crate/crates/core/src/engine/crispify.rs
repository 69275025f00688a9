use rand::Rng;

use crate::rule::Condition;

use super::subsumption::can_subsume;
use super::{EngineConfig, Population};

/// For every experienced, accurate rule in the correct set that still has a
/// non-rectangular dimension, flattens one such dimension (chosen uniformly)
/// to `alpha = beta = 1` and resets the rule's experience and
/// correct-matching counts. Intervals and consequents are left alone.
/// Returns the number of rules modified.
pub fn crispify<R: Rng + ?Sized>(
    pop: &mut Population,
    correct_set: &[usize],
    cfg: &EngineConfig,
    rng: &mut R,
) -> usize {
    let mut changed = 0;
    for &i in correct_set {
        if !can_subsume(&pop.rules[i], cfg) {
            continue;
        }
        let rule = &mut pop.rules[i];
        let Condition::Beta(sets) = &mut rule.condition else {
            continue;
        };
        let fuzzy: Vec<usize> = (0..sets.len()).filter(|&d| !sets[d].is_rectangular()).collect();
        if fuzzy.is_empty() {
            continue;
        }
        let d = fuzzy[rng.gen_range(0..fuzzy.len())];
        sets[d].alpha = 1.0;
        sets[d].beta = 1.0;
        rule.reset_statistics();
        changed += 1;
    }
    changed
}
