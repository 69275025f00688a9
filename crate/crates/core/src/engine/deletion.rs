use rand::Rng;

use super::{EngineConfig, Population};

/// Fitness floor in the deletion-vote amplification.
const MIN_VOTE_FITNESS: f64 = 0.001;

/// Deletion vote of every rule (zero for dead rules).
///
/// The base vote is `cs * num`. Rules with `exp > theta_del` whose fitness
/// falls below `delta` times the micro-averaged population fitness have the
/// vote scaled by `F_avg / max(F, 0.001)`.
pub fn deletion_votes(pop: &Population, cfg: &EngineConfig) -> Vec<f64> {
    let micro = pop.micro_size();
    let avg_fitness = if micro == 0 {
        0.0
    } else {
        pop.live().map(|r| r.fitness * r.numerosity as f64).sum::<f64>() / micro as f64
    };
    pop.rules
        .iter()
        .map(|r| {
            if r.numerosity == 0 {
                return 0.0;
            }
            let mut vote = r.correct_set_size * r.numerosity as f64;
            if avg_fitness > 0.0
                && r.experience > cfg.theta_del
                && r.fitness < cfg.deletion_fitness_fraction * avg_fitness
            {
                vote *= avg_fitness / r.fitness.max(MIN_VOTE_FITNESS);
            }
            vote
        })
        .collect()
}

/// Removes micro-rules by roulette-wheel selection on the deletion vote
/// until the population fits its capacity. Returns how many micro-rules
/// were removed.
pub fn delete_to_capacity<R: Rng + ?Sized>(pop: &mut Population, cfg: &EngineConfig, rng: &mut R) -> usize {
    let mut micro = pop.micro_size();
    let mut removed = 0;
    while micro > pop.capacity as u64 {
        let votes = deletion_votes(pop, cfg);
        let total: f64 = votes.iter().sum();
        let mut point = rng.gen::<f64>() * total;
        let mut victim = None;
        for (i, &v) in votes.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            victim = Some(i);
            if point < v {
                break;
            }
            point -= v;
        }
        let victim = victim.expect("a live rule exists while the population is over capacity");
        pop.rules[victim].numerosity -= 1;
        micro -= 1;
        removed += 1;
    }
    removed
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::beta::Beta4;
    use crate::rule::{Condition, Rule};

    fn rule(cs: f64, num: u32, exp: f64, fitness: f64) -> Rule {
        let mut r = Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 0);
        r.correct_set_size = cs;
        r.numerosity = num;
        r.experience = exp;
        r.fitness = fitness;
        r
    }

    #[test]
    fn at_capacity_nothing_is_deleted() {
        let cfg = EngineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut pop = Population::new(3, 1, 2);
        pop.rules.push(rule(1.0, 3, 0.0, 0.0));
        assert_eq!(delete_to_capacity(&mut pop, &cfg, &mut rng), 0);
        assert_eq!(pop.micro_size(), 3);
    }

    #[test]
    fn roulette_follows_votes() {
        let cfg = EngineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 20_000;
        let mut first = 0;
        for _ in 0..trials {
            let mut pop = Population::new(1, 1, 2);
            pop.rules.push(rule(9.0, 1, 0.0, 0.5));
            pop.rules.push(rule(1.0, 1, 0.0, 0.5));
            delete_to_capacity(&mut pop, &cfg, &mut rng);
            if pop.rules[0].numerosity == 0 {
                first += 1;
            }
        }
        let p = first as f64 / trials as f64;
        assert!((p - 0.9).abs() < 0.01, "{p}");
    }

    #[test]
    fn unfit_experienced_rule_gets_amplified_vote() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(10, 1, 2);
        pop.rules.push(rule(1.0, 1, 60.0, 0.001));
        pop.rules.push(rule(1.0, 1, 60.0, 1.0));
        // F_avg = 0.5005; 0.001 < 0.01 * F_avg, vote = 1 * 0.5005 / 0.001
        let votes = deletion_votes(&pop, &cfg);
        assert!((votes[0] - 500.5).abs() < 1e-9);
        assert_eq!(votes[1], 1.0);
    }

    #[test]
    fn dead_rules_have_no_vote() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(10, 1, 2);
        pop.rules.push(rule(5.0, 0, 0.0, 0.0));
        pop.rules.push(rule(1.0, 2, 0.0, 0.0));
        assert_eq!(deletion_votes(&pop, &cfg), vec![0.0, 2.0]);
    }

    #[test]
    fn deletes_down_to_capacity() {
        let cfg = EngineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop = Population::new(5, 1, 2);
        for i in 0..4 {
            pop.rules.push(rule(1.0 + i as f64, 3, 0.0, 0.5));
        }
        assert_eq!(delete_to_capacity(&mut pop, &cfg, &mut rng), 7);
        assert_eq!(pop.micro_size(), 5);
    }
}
