use rand::seq::index;
use rand::Rng;

use crate::beta::Beta4;
use crate::rule::{Condition, RepresentationKind, Rule, Triangle};

use super::subsumption::{can_subsume, is_more_general};
use super::{delete_to_capacity, EngineConfig, Matched, Population};

/// Smallest gap kept between ordered interval or triangle parameters after
/// mutation.
const MIN_GAP: f64 = 1e-6;

/// Tournament over `ceil(tau * |[C]|)` distinct members of the correct set;
/// the winner maximizes `mu * F`, first entrant on ties. Returns the rule's
/// population index.
pub fn select_parent<R: Rng + ?Sized>(
    pop: &Population,
    correct_set: &[Matched],
    tau: f64,
    rng: &mut R,
) -> usize {
    assert!(!correct_set.is_empty(), "tournament on an empty correct set");
    let size = ((tau * correct_set.len() as f64).ceil() as usize).clamp(1, correct_set.len());
    let mut best: Option<(usize, f64)> = None;
    for k in index::sample(rng, correct_set.len(), size) {
        let (i, mu) = correct_set[k];
        let score = mu * pop.rules[i].fitness;
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.unwrap().0
}

/// Uniform crossover: each dimension's fuzzy set is swapped between the two
/// conditions with probability 0.5.
pub fn crossover<R: Rng + ?Sized>(a: &mut Condition, b: &mut Condition, rng: &mut R) {
    match (a, b) {
        (Condition::Beta(x), Condition::Beta(y)) => {
            for (s, t) in x.iter_mut().zip(y.iter_mut()) {
                if rng.gen_bool(0.5) {
                    std::mem::swap(s, t);
                }
            }
        }
        (Condition::Triangular(x), Condition::Triangular(y)) => {
            for (s, t) in x.iter_mut().zip(y.iter_mut()) {
                if rng.gen_bool(0.5) {
                    std::mem::swap(s, t);
                }
            }
        }
        _ => panic!("crossover across representations"),
    }
}

fn repair_interval(set: &mut Beta4) {
    if set.lower > set.upper {
        std::mem::swap(&mut set.lower, &mut set.upper);
    }
    if set.lower >= set.upper {
        set.upper = set.lower + MIN_GAP;
    }
}

/// Relative shape mutation plus additive interval mutation on one beta set.
/// Shapes are clamped back to 1 from below.
pub(crate) fn mutate_beta<R: Rng + ?Sized>(set: &mut Beta4, shapes: bool, m0: f64, rng: &mut R) {
    if shapes {
        set.alpha += set.alpha * rng.gen_range(-0.5..0.5);
        set.beta += set.beta * rng.gen_range(-0.5..0.5);
        set.alpha = set.alpha.max(1.0);
        set.beta = set.beta.max(1.0);
    }
    if m0 > 0.0 {
        set.lower += rng.gen_range(-m0..m0);
        set.upper += rng.gen_range(-m0..m0);
    }
    repair_interval(set);
}

/// Each vertex moves by `U[-m0, m0)` with probability `p_mut` on its own.
pub(crate) fn mutate_triangle<R: Rng + ?Sized>(t: &mut Triangle, p_mut: f64, m0: f64, rng: &mut R) {
    let mut v = [t.left, t.peak, t.right];
    if m0 > 0.0 {
        for p in &mut v {
            if rng.gen::<f64>() < p_mut {
                *p += rng.gen_range(-m0..m0);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    if v[1] <= v[0] {
        v[1] = v[0] + MIN_GAP;
    }
    if v[2] <= v[1] {
        v[2] = v[1] + MIN_GAP;
    }
    *t = Triangle {
        left: v[0],
        peak: v[1],
        right: v[2],
    };
}

/// Beta sets mutate with probability `p_mut`, all four parameters at once;
/// triangles mutate vertex by vertex. Frozen rectangles only move their
/// intervals.
pub fn mutate<R: Rng + ?Sized>(cond: &mut Condition, cfg: &EngineConfig, rng: &mut R) {
    let shapes = !matches!(cfg.kind(), RepresentationKind::FrozenRectangular);
    match cond {
        Condition::Beta(sets) => {
            for s in sets {
                if rng.gen::<f64>() < cfg.mutation_prob {
                    mutate_beta(s, shapes, cfg.m0, rng);
                }
            }
        }
        Condition::Triangular(sets) => {
            for t in sets {
                mutate_triangle(t, cfg.mutation_prob, cfg.m0, rng);
            }
        }
    }
}

fn offspring(parent: &Rule, correct_set_size: f64, timestamp: u64) -> Rule {
    let mut child = Rule::new(
        parent.condition.clone(),
        parent.consequent,
        parent.correct_matching.len(),
        timestamp,
    );
    child.correct_set_size = correct_set_size;
    child
}

/// Average GA timestamp of the correct set, weighted by numerosity.
pub(crate) fn mean_ga_timestamp(pop: &Population, correct_set: &[Matched]) -> Option<f64> {
    let (mut num, mut acc) = (0.0, 0.0);
    for &(i, _) in correct_set {
        let r = &pop.rules[i];
        num += r.numerosity as f64;
        acc += r.ga_timestamp as f64 * r.numerosity as f64;
    }
    (num > 0.0).then(|| acc / num)
}

/// Whether the correct set has gone `theta_GA` iterations without a GA.
pub(crate) fn ga_due(pop: &Population, correct_set: &[Matched], cfg: &EngineConfig) -> bool {
    mean_ga_timestamp(pop, correct_set).is_some_and(|m| pop.iteration as f64 - m > cfg.theta_ga)
}

/// One steady-state GA invocation on the (live) correct set: stamps the set,
/// breeds two offspring, and either folds each offspring into a subsuming
/// parent or inserts it, deleting down to capacity after each.
pub fn run_ga<R: Rng + ?Sized>(pop: &mut Population, correct_set: &[Matched], cfg: &EngineConfig, rng: &mut R) {
    let t = pop.iteration;
    for &(i, _) in correct_set {
        pop.rules[i].ga_timestamp = t;
    }
    let p1 = select_parent(pop, correct_set, cfg.tournament_ratio, rng);
    let p2 = select_parent(pop, correct_set, cfg.tournament_ratio, rng);
    let cs = 0.5 * (pop.rules[p1].correct_set_size + pop.rules[p2].correct_set_size);
    let mut c1 = offspring(&pop.rules[p1], cs, t);
    let mut c2 = offspring(&pop.rules[p2], cs, t);

    if rng.gen::<f64>() < cfg.crossover_prob {
        crossover(&mut c1.condition, &mut c2.condition, rng);
    }
    mutate(&mut c1.condition, cfg, rng);
    mutate(&mut c2.condition, cfg, rng);

    for child in [c1, c2] {
        let absorbed = cfg.do_ga_subsumption
            && [p1, p2].into_iter().any(|p| {
                let parent = &pop.rules[p];
                if can_subsume(parent, cfg) && is_more_general(&parent.condition, &child.condition, cfg.tol_sub)
                {
                    pop.rules[p].numerosity += 1;
                    true
                } else {
                    false
                }
            });
        if !absorbed {
            pop.insert(child);
        }
        delete_to_capacity(pop, cfg, rng);
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn relative_shape_mutation() {
        // alpha = 2 with a +0.25 draw gives 2.5; alpha = 1 with -0.4 clamps to 1
        let mut s = Beta4::new(2.0, 1.0, 0.0, 1.0).unwrap();
        s.alpha += s.alpha * 0.25;
        assert_eq!(s.alpha, 2.5);
        let mut s = Beta4::new(1.0, 1.0, 0.0, 1.0).unwrap();
        s.alpha += s.alpha * -0.4;
        s.alpha = s.alpha.max(1.0);
        assert_eq!(s.alpha, 1.0);
    }

    #[test]
    fn mutation_keeps_sets_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20_000 {
            let mut s = Beta4 {
                alpha: rng.gen_range(1.0..3.0),
                beta: rng.gen_range(1.0..3.0),
                lower: 0.5,
                upper: 0.5 + rng.gen_range(1e-9..0.05),
            };
            mutate_beta(&mut s, true, 0.1, &mut rng);
            s.validate().unwrap();
        }
    }

    #[test]
    fn shape_changes_stay_within_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5000 {
            let mut s = Beta4::new(4.0, 4.0, 0.0, 1.0).unwrap();
            mutate_beta(&mut s, true, 0.0, &mut rng);
            assert!((2.0..6.0).contains(&s.alpha) && (2.0..6.0).contains(&s.beta));
            assert_eq!((s.lower, s.upper), (0.0, 1.0));
        }
    }

    #[test]
    fn frozen_rectangles_stay_rectangular() {
        let cfg = EngineConfig {
            representation: super::super::Representation::FrozenRectangular,
            mutation_prob: 1.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut c = Condition::Beta(vec![Beta4::DONT_CARE; 5]);
        for _ in 0..100 {
            mutate(&mut c, &cfg, &mut rng);
        }
        assert!(c.is_crisp());
        assert_ne!(c, Condition::Beta(vec![Beta4::DONT_CARE; 5]));
    }

    #[test]
    fn triangle_mutation_keeps_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20_000 {
            let mut t = Triangle::new(0.4, 0.41, 0.42).unwrap();
            mutate_triangle(&mut t, 1.0, 0.1, &mut rng);
            assert!(t.left < t.peak && t.peak < t.right);
        }
    }

    #[test]
    fn crossover_swaps_whole_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a0: Vec<Beta4> = (0..50).map(|i| Beta4::rectangular(0.0, 0.5 + i as f64 * 0.01).unwrap()).collect();
        let b0: Vec<Beta4> = (0..50).map(|i| Beta4::new(2.0, 3.0, -0.1, 1.0 + i as f64).unwrap()).collect();
        let (mut a, mut b) = (Condition::Beta(a0.clone()), Condition::Beta(b0.clone()));
        crossover(&mut a, &mut b, &mut rng);
        let (Condition::Beta(a), Condition::Beta(b)) = (a, b) else { panic!() };
        let mut swapped = 0;
        for i in 0..50 {
            if a[i] == b0[i] {
                assert_eq!(b[i], a0[i]);
                swapped += 1;
            } else {
                assert_eq!(a[i], a0[i]);
                assert_eq!(b[i], b0[i]);
            }
        }
        assert!(swapped > 10 && swapped < 40);
    }

    #[test]
    fn tournament_prefers_high_mu_times_fitness() {
        let mut pop = Population::new(10, 1, 2);
        for f in [0.1, 0.9, 0.5] {
            let mut r = Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 0);
            r.fitness = f;
            pop.rules.push(r);
        }
        let cset = vec![(0, 1.0), (1, 1.0), (2, 1.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        // tau = 1 puts everyone in the pool
        for _ in 0..20 {
            assert_eq!(select_parent(&pop, &cset, 1.0, &mut rng), 1);
        }
        let cset = vec![(0, 1.0), (1, 0.05), (2, 1.0)];
        assert_eq!(select_parent(&pop, &cset, 1.0, &mut rng), 2);
    }

    #[test]
    fn ga_trigger_uses_weighted_timestamps() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(10, 1, 2);
        let mut r = Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 70);
        r.numerosity = 3;
        pop.rules.push(r);
        pop.rules.push(Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 110));
        pop.iteration = 110;
        let cset = vec![(0, 1.0), (1, 1.0)];
        // mean = (3*70 + 110) / 4 = 80, distance 30
        assert!(!ga_due(&pop, &cset, &cfg));
        pop.iteration = 131;
        assert!(ga_due(&pop, &cset, &cfg));
    }

    #[test]
    fn ga_offspring_and_bookkeeping() {
        let cfg = EngineConfig {
            max_population: 100,
            do_ga_subsumption: false,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut pop = Population::new(100, 2, 2);
        let mut parent = Rule::new(
            Condition::Beta(vec![Beta4::rectangular(0.1, 0.6).unwrap(), Beta4::DONT_CARE]),
            1,
            2,
            0,
        );
        parent.experience = 80.0;
        parent.fitness = 1.0;
        parent.correct_matching = vec![0.0, 80.0];
        parent.correct_set_size = 4.0;
        pop.rules.push(parent);
        pop.iteration = 500;
        run_ga(&mut pop, &[(0, 1.0)], &cfg, &mut rng);
        assert_eq!(pop.rules[0].ga_timestamp, 500);
        assert_eq!(pop.micro_size(), 3);
        for child in pop.rules.iter().skip(1) {
            assert_eq!(child.experience, 0.0);
            assert_eq!(child.fitness, 0.0);
            assert_eq!(child.consequent, 1);
            assert_eq!(child.correct_set_size, 4.0);
            assert_eq!(child.ga_timestamp, 500);
        }
    }

    #[test]
    fn ga_subsumption_folds_children_into_parent() {
        let cfg = EngineConfig {
            mutation_prob: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let mut pop = Population::new(100, 1, 2);
        let mut parent = Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 0);
        parent.experience = 80.0;
        parent.fitness = 1.0;
        pop.rules.push(parent);
        pop.iteration = 100;
        run_ga(&mut pop, &[(0, 1.0)], &cfg, &mut rng);
        assert_eq!(pop.rules.len(), 1);
        assert_eq!(pop.rules[0].numerosity, 3);
    }
}
