//! Classification metrics and rule-kurtosis landscapes.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{infer, Population};
use crate::error::{Error, Result};
use crate::rule::Condition;

/// `m x m` counts; row = true class, column = predicted class.
pub type Confusion = Vec<Vec<u64>>;

pub fn confusion_matrix(truth: &[usize], predicted: &[usize], num_classes: usize) -> Confusion {
    assert_eq!(truth.len(), predicted.len(), "truth/prediction length mismatch");
    let mut m = vec![vec![0u64; num_classes]; num_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

pub fn accuracy(confusion: &[Vec<u64>]) -> Result<f64> {
    let total: u64 = confusion.iter().flatten().sum();
    if total == 0 {
        return Err(Error::Metric("accuracy of an empty confusion matrix".into()));
    }
    let hits: u64 = confusion.iter().enumerate().map(|(i, row)| row[i]).sum();
    Ok(hits as f64 / total as f64)
}

/// Unweighted mean of per-class F1. A class with no true and no predicted
/// instances scores 0 and still counts in the mean.
pub fn macro_f1(confusion: &[Vec<u64>]) -> f64 {
    let m = confusion.len();
    if m == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for c in 0..m {
        let tp = confusion[c][c] as f64;
        let actual: u64 = confusion[c].iter().sum();
        let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
        // 2PR/(P+R) == 2TP/(actual + predicted)
        let denom = (actual + predicted) as f64;
        if denom > 0.0 {
            sum += 2.0 * tp / denom;
        }
    }
    sum / m as f64
}

/// Test-set evaluation of one trained population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub confusion: Confusion,
    pub macro_rules: usize,
    pub micro_rules: u64,
    pub crisp_fraction: f64,
    /// Seconds spent training. Not serialized so reports stay reproducible
    /// byte for byte.
    #[serde(skip)]
    pub wall_time: f64,
}

impl EvalReport {
    pub fn new(confusion: Confusion, pop: &Population, wall_time: f64) -> Result<Self> {
        Ok(EvalReport {
            accuracy: accuracy(&confusion)?,
            macro_f1: macro_f1(&confusion),
            confusion,
            macro_rules: pop.macro_size(),
            micro_rules: pop.micro_size(),
            crisp_fraction: pop.crisp_fraction(),
            wall_time,
        })
    }
}

/// Values on a regular `resolution x resolution` grid over the unit square.
/// Cell `(i, j)` sits at `(i / (resolution - 1), j / (resolution - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub resolution: usize,
    pub cells: Vec<T>,
}

impl<T> Grid<T> {
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        grid_coords(self.resolution, idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((f64, f64), &T)> {
        self.cells.iter().enumerate().map(|(k, v)| (self.coords(k), v))
    }
}

fn grid_coords(resolution: usize, idx: usize) -> (f64, f64) {
    let step = 1.0 / (resolution - 1) as f64;
    ((idx / resolution) as f64 * step, (idx % resolution) as f64 * step)
}

impl Grid<Option<f64>> {
    /// `x,y,value` rows; uncovered cells are written as `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for ((x, y), v) in self.iter() {
            match v {
                Some(v) => writeln!(out, "{x},{y},{v}"),
                None => writeln!(out, "{x},{y},NaN"),
            }
            .unwrap();
        }
        out
    }

    /// Mean over covered cells satisfying `keep`, with the number of cells.
    pub fn mean_where(&self, mut keep: impl FnMut(f64, f64) -> bool) -> Option<(f64, usize)> {
        let (mut sum, mut n) = (0.0, 0usize);
        for ((x, y), v) in self.iter() {
            if let Some(v) = v {
                if keep(x, y) {
                    sum += v;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| (sum / n as f64, n))
    }
}

impl Grid<usize> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for ((x, y), v) in self.iter() {
            writeln!(out, "{x},{y},{v}").unwrap();
        }
        out
    }
}

fn check_2d(pop: &Population, resolution: usize) -> Result<()> {
    if pop.dims != 2 {
        return Err(Error::Metric(format!("landscape needs a 2-D population, got {} dims", pop.dims)));
    }
    if resolution < 2 {
        return Err(Error::Metric(format!("grid resolution must be >= 2, got {resolution}")));
    }
    Ok(())
}

/// Numerosity-weighted mean kurtosis of the experienced rules matching each
/// grid point, averaged over both dimensions. Cells no such rule matches are
/// `None`.
pub fn kurtosis_landscape(pop: &Population, resolution: usize, theta_exp: f64) -> Result<Grid<Option<f64>>> {
    check_2d(pop, resolution)?;
    let mut rules = Vec::new();
    for r in pop.live().filter(|r| r.experience > theta_exp) {
        let Condition::Beta(sets) = &r.condition else {
            return Err(Error::Metric("kurtosis landscape needs beta-distribution conditions".into()));
        };
        rules.push((r, sets[0].kurtosis() + sets[1].kurtosis()));
    }
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid_coords(resolution, k);
            let input = [Some(x), Some(y)];
            let (mut weighted, mut num) = (0.0, 0.0);
            for (r, kurt) in &rules {
                if r.matching_degree(&input) > 0.0 {
                    weighted += kurt * r.numerosity as f64;
                    num += r.numerosity as f64;
                }
            }
            (num > 0.0).then(|| weighted / (2.0 * num))
        })
        .collect();
    Ok(Grid { resolution, cells })
}

/// Predicted class at every grid point.
pub fn decision_grid(pop: &Population, resolution: usize, theta_exp: f64) -> Result<Grid<usize>> {
    check_2d(pop, resolution)?;
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid_coords(resolution, k);
            infer(pop, &[Some(x), Some(y)], theta_exp)
        })
        .collect();
    Ok(Grid { resolution, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::Beta4;
    use crate::rule::Rule;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[vec![5, 0], vec![0, 5]]).unwrap(), 1.0);
        assert_eq!(accuracy(&[vec![3, 1], vec![1, 3]]).unwrap(), 0.75);
        assert_eq!(accuracy(&[vec![0, 4], vec![2, 0]]).unwrap(), 0.0);
        assert!(accuracy(&[vec![0, 0], vec![0, 0]]).is_err());
        assert!(accuracy(&[]).is_err());
    }

    #[test]
    fn macro_f1_examples() {
        assert_eq!(macro_f1(&[vec![4, 0], vec![0, 6]]), 1.0);
        assert!((macro_f1(&[vec![2, 0], vec![2, 0]]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(macro_f1(&[vec![7]]), 1.0);
        // an absent, never-predicted class still pulls the mean down
        assert_eq!(macro_f1(&[vec![7, 0], vec![0, 0]]), 0.5);
    }

    #[test]
    fn confusion_from_pairs() {
        let m = confusion_matrix(&[0, 0, 1, 2], &[0, 1, 1, 0], 3);
        assert_eq!(m, vec![vec![1, 1, 0], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    fn rule(sets: Vec<Beta4>, exp: f64, num: u32) -> Rule {
        let mut r = Rule::new(Condition::Beta(sets), 0, 2, 0);
        r.experience = exp;
        r.numerosity = num;
        r
    }

    #[test]
    fn landscape_examples() {
        let mut pop = Population::new(10, 2, 2);
        let left = Beta4::rectangular(0.0, 0.5).unwrap();
        pop.rules.push(rule(vec![left, Beta4::DONT_CARE], 20.0, 3));
        let grid = kurtosis_landscape(&pop, 11, 10.0).unwrap();
        assert_eq!(grid.cells.len(), 121);
        for ((x, _), v) in grid.iter() {
            if x <= 0.5 {
                assert_eq!(*v, Some(1.8));
            } else {
                assert_eq!(*v, None);
            }
        }

        let shaped = Beta4::new(2.0, 2.0, 0.0, 1.0).unwrap();
        let mut pop = Population::new(10, 2, 2);
        pop.rules.push(rule(vec![shaped, shaped], 20.0, 1));
        let grid = kurtosis_landscape(&pop, 11, 10.0).unwrap();
        assert!((grid.cells[5 * 11 + 5].unwrap() - 15.0 / 7.0).abs() < 1e-12);
        // zero membership on the support edge
        assert_eq!(grid.cells[0], None);
    }

    #[test]
    fn landscape_filters_and_weights() {
        let mut pop = Population::new(10, 2, 2);
        let shaped = Beta4::new(2.0, 2.0, 0.0, 1.0).unwrap();
        pop.rules.push(rule(vec![Beta4::DONT_CARE; 2], 20.0, 3));
        pop.rules.push(rule(vec![shaped, Beta4::DONT_CARE], 20.0, 1));
        pop.rules.push(rule(vec![shaped, shaped], 5.0, 100));
        let grid = kurtosis_landscape(&pop, 3, 10.0).unwrap();
        let want = (3.0 * 3.6 + (15.0 / 7.0 + 1.8)) / (2.0 * 4.0);
        assert!((grid.cells[4].unwrap() - want).abs() < 1e-12);
        assert_eq!(grid.cells[0], Some(1.8));
    }

    #[test]
    fn landscape_errors() {
        let pop = Population::new(10, 3, 2);
        assert!(kurtosis_landscape(&pop, 11, 10.0).is_err());
        let pop = Population::new(10, 2, 2);
        assert!(kurtosis_landscape(&pop, 1, 10.0).is_err());
        assert!(kurtosis_landscape(&pop, 5, 10.0).unwrap().cells.iter().all(Option::is_none));
    }

    #[test]
    fn landscape_csv() {
        let grid = Grid {
            resolution: 2,
            cells: vec![Some(1.8), None, Some(2.0), Some(1.8)],
        };
        assert_eq!(grid.to_csv(), "x,y,value\n0,0,1.8\n0,1,NaN\n1,0,2\n1,1,1.8\n");
        assert_eq!(grid.mean_where(|x, _| x > 0.5), Some((1.9, 2)));
    }
}
