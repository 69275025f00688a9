use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rule::Input;

use super::ga::ga_due;
use super::inference::{decide, scores_from_match_set};
use super::{
    correct_set_subsumption, cover, crispify, delete_to_capacity, run_ga, EngineConfig, Matched, Population,
};

/// One row of the training trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Share of instances classified correctly by the population as it stood
    /// when each instance was presented, before learning from it.
    pub train_acc: f64,
    pub macro_rules: usize,
    pub micro_rules: u64,
    pub crisp_fraction: f64,
}

/// Drives single training iterations against a population, reusing its
/// scratch buffers between calls.
pub struct Trainer<'a> {
    cfg: &'a EngineConfig,
    matched: Vec<Matched>,
    correct: Vec<Matched>,
    correct_idx: Vec<usize>,
}

impl<'a> Trainer<'a> {
    pub fn new(cfg: &'a EngineConfig) -> Self {
        Trainer {
            cfg,
            matched: Vec::new(),
            correct: Vec::new(),
            correct_idx: Vec::new(),
        }
    }

    /// One learning iteration on `(x, class)`. Returns the class the
    /// population predicted for `x` before learning from it.
    pub fn step<R: Rng + ?Sized>(&mut self, pop: &mut Population, x: &Input, class: usize, rng: &mut R) -> usize {
        let cfg = self.cfg;
        pop.iteration += 1;

        pop.match_into(x, &mut self.matched);
        let (scores, any) = scores_from_match_set(pop, &self.matched, cfg.theta_exp);
        let predicted = decide(pop, &scores, any);

        self.correct.clear();
        self.correct
            .extend(self.matched.iter().copied().filter(|&(i, _)| pop.rules[i].consequent == class));

        let coverage: f64 = self.correct.iter().map(|&(_, mu)| mu).sum();
        if coverage < 1.0 {
            let rule = cover(x, class, pop.num_classes, pop.iteration, cfg, rng);
            let mu = rule.matching_degree(x);
            let idx = pop.insert(rule);
            if !self.correct.iter().any(|&(i, _)| i == idx) {
                self.matched.push((idx, mu));
                self.correct.push((idx, mu));
            }
            delete_to_capacity(pop, cfg, rng);
        }

        for &(i, mu) in &self.matched {
            let r = &mut pop.rules[i];
            if r.numerosity > 0 {
                r.update_on_match(mu, class, cfg.fitness_exponent);
            }
        }

        self.correct.retain(|&(i, _)| pop.rules[i].numerosity > 0);
        let set_size: f64 = self.correct.iter().map(|&(i, _)| pop.rules[i].numerosity as f64).sum();
        for &(i, mu) in &self.correct {
            pop.rules[i].update_correct_set_size(mu, set_size);
        }

        self.correct_idx.clear();
        self.correct_idx.extend(self.correct.iter().map(|&(i, _)| i));
        if cfg.do_cs_subsumption {
            correct_set_subsumption(pop, &self.correct_idx, cfg);
        }
        if cfg.crispifies() {
            crispify(pop, &self.correct_idx, cfg, rng);
        }

        self.correct.retain(|&(i, _)| pop.rules[i].numerosity > 0);
        if !self.correct.is_empty() && ga_due(pop, &self.correct, cfg) {
            run_ga(pop, &self.correct, cfg, rng);
        }

        pop.compact();
        predicted
    }
}

/// Trains `pop` for `cfg.epochs` passes over `data`, presenting instances in
/// a fresh random order each epoch. The population's fallback class is set
/// to the training majority class.
pub fn train<R: Rng + ?Sized>(
    pop: &mut Population,
    data: &Dataset,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Result<Vec<EpochStats>> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Config("cannot train on an empty dataset".into()));
    }
    if data.dims() != pop.dims {
        return Err(Error::Config(format!(
            "dataset has {} attributes, population expects {}",
            data.dims(),
            pop.dims
        )));
    }
    if data.num_classes() > pop.num_classes {
        return Err(Error::Config(format!(
            "dataset has {} classes, population expects {}",
            data.num_classes(),
            pop.num_classes
        )));
    }
    pop.fallback_class = data.majority_class();

    let mut trainer = Trainer::new(cfg);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        order.shuffle(rng);
        let mut hits = 0usize;
        for &i in &order {
            let label = data.labels[i];
            if trainer.step(pop, &data.features[i], label, rng) == label {
                hits += 1;
            }
        }
        trace.push(EpochStats {
            epoch,
            train_acc: hits as f64 / data.len() as f64,
            macro_rules: pop.macro_size(),
            micro_rules: pop.micro_size(),
            crisp_fraction: pop.crisp_fraction(),
        });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn tiny() -> Dataset {
        Dataset::new(
            vec![vec![Some(0.2), Some(0.4)]],
            vec![1],
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    #[test]
    fn one_epoch_one_instance_is_one_iteration() {
        let cfg = EngineConfig {
            epochs: 1,
            ..Default::default()
        };
        let mut pop = Population::new(cfg.max_population, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = train(&mut pop, &tiny(), &cfg, &mut rng).unwrap();
        assert_eq!(pop.iteration, 1);
        assert_eq!(trace.len(), 1);
        assert_eq!(pop.macro_size(), 1);
        let r = &pop.rules[0];
        assert_eq!(r.consequent, 1);
        assert_eq!(r.experience, 1.0);
        assert_eq!(r.fitness, 1.0);
        assert_eq!(pop.fallback_class, 1);
    }

    #[test]
    fn zero_epochs_and_empty_data_are_rejected() {
        let cfg = EngineConfig {
            epochs: 0,
            ..Default::default()
        };
        let mut pop = Population::new(10, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(train(&mut pop, &tiny(), &cfg, &mut rng).is_err());

        let empty = Dataset::new(vec![], vec![], vec!["a".into(), "b".into()], vec!["x".into()]).unwrap();
        let cfg = EngineConfig::default();
        assert!(matches!(train(&mut pop, &empty, &cfg, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn covering_fires_once_for_a_new_input() {
        let cfg = EngineConfig::default();
        let mut pop = Population::new(cfg.max_population, 2, 2);
        let mut trainer = Trainer::new(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        trainer.step(&mut pop, &[Some(0.1), Some(0.9)], 0, &mut rng);
        assert_eq!(pop.macro_size(), 1);
        // same input again: [C] now covers it with degree 1
        trainer.step(&mut pop, &[Some(0.1), Some(0.9)], 0, &mut rng);
        assert_eq!(pop.macro_size(), 1);
        assert_eq!(pop.rules[0].experience, 2.0);
    }
}
