use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Train/test partitioning scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SplitProtocol {
    /// One random split with `train_ratio` of the instances for training.
    Shuffle { train_ratio: f64 },
    /// As `Shuffle`, but each class is split in the same proportion.
    StratifiedShuffle { train_ratio: f64 },
    /// `k` disjoint test folds covering the dataset.
    KFold { k: usize },
}

impl Default for SplitProtocol {
    fn default() -> Self {
        SplitProtocol::Shuffle { train_ratio: 0.9 }
    }
}

impl SplitProtocol {
    pub fn num_folds(&self) -> usize {
        match self {
            SplitProtocol::KFold { k } => *k,
            _ => 1,
        }
    }
}

/// Row indices of one train/test split, both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn check_ratio(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Split(format!("train ratio must lie in (0, 1), got {r}")));
    }
    Ok(())
}

fn fold(mut train: Vec<usize>, mut test: Vec<usize>) -> Result<Fold> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::Split(format!(
            "split leaves an empty part ({} train, {} test)",
            train.len(),
            test.len()
        )));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Fold { train, test })
}

/// Splits `labels.len()` instances according to `protocol`. Deterministic
/// in `seed`.
pub fn split(labels: &[usize], protocol: SplitProtocol, seed: u64) -> Result<Vec<Fold>> {
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match protocol {
        SplitProtocol::Shuffle { train_ratio } => {
            check_ratio(train_ratio)?;
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let n_train = (train_ratio * n as f64).round() as usize;
            let test = idx.split_off(n_train.min(n));
            Ok(vec![fold(idx, test)?])
        }
        SplitProtocol::StratifiedShuffle { train_ratio } => {
            check_ratio(train_ratio)?;
            let m = labels.iter().max().map_or(0, |&l| l + 1);
            let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); m];
            for (i, &l) in labels.iter().enumerate() {
                by_class[l].push(i);
            }
            if let Some((c, members)) = by_class
                .iter()
                .enumerate()
                .find(|(_, v)| !v.is_empty() && v.len() < 2)
            {
                return Err(Error::Split(format!(
                    "class {c} has {} instance(s); stratification needs at least 2",
                    members.len()
                )));
            }
            // largest-remainder allocation of the training quota
            let quota = (train_ratio * n as f64).round() as usize;
            let ideal: Vec<f64> = by_class.iter().map(|v| train_ratio * v.len() as f64).collect();
            let mut alloc: Vec<usize> = ideal.iter().map(|x| x.floor() as usize).collect();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                let (fa, fb) = (ideal[a] - ideal[a].floor(), ideal[b] - ideal[b].floor());
                fb.total_cmp(&fa).then(a.cmp(&b))
            });
            let mut left = quota.saturating_sub(alloc.iter().sum());
            for &c in order.iter().cycle().take(m * 2) {
                if left == 0 {
                    break;
                }
                if alloc[c] < by_class[c].len() {
                    alloc[c] += 1;
                    left -= 1;
                }
            }
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (c, members) in by_class.iter_mut().enumerate() {
                members.shuffle(&mut rng);
                train.extend_from_slice(&members[..alloc[c]]);
                test.extend_from_slice(&members[alloc[c]..]);
            }
            Ok(vec![fold(train, test)?])
        }
        SplitProtocol::KFold { k } => {
            if k < 2 || k > n {
                return Err(Error::Split(format!("k-fold needs 2 <= k <= {n}, got k = {k}")));
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let (base, extra) = (n / k, n % k);
            let mut folds = Vec::with_capacity(k);
            let mut start = 0;
            for f in 0..k {
                let len = base + usize::from(f < extra);
                let test = idx[start..start + len].to_vec();
                let train = idx[..start].iter().chain(&idx[start + len..]).copied().collect();
                folds.push(fold(train, test)?);
                start += len;
            }
            Ok(folds)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_ninety_ten() {
        let labels = vec![0; 100];
        let folds = split(&labels, SplitProtocol::Shuffle { train_ratio: 0.9 }, 7).unwrap();
        assert_eq!(folds.len(), 1);
        assert_eq!(folds[0].train.len(), 90);
        assert_eq!(folds[0].test.len(), 10);
        let mut all: Vec<usize> = folds[0].train.iter().chain(&folds[0].test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_split() {
        let labels: Vec<usize> = (0..57).map(|i| i % 3).collect();
        for p in [
            SplitProtocol::Shuffle { train_ratio: 0.8 },
            SplitProtocol::StratifiedShuffle { train_ratio: 0.8 },
            SplitProtocol::KFold { k: 5 },
        ] {
            assert_eq!(split(&labels, p, 3).unwrap(), split(&labels, p, 3).unwrap());
            assert_ne!(split(&labels, p, 3).unwrap(), split(&labels, p, 4).unwrap());
        }
    }

    #[test]
    fn kfold_partitions() {
        let labels = vec![0; 100];
        let folds = split(&labels, SplitProtocol::KFold { k: 10 }, 1).unwrap();
        assert_eq!(folds.len(), 10);
        let mut seen = vec![0; 100];
        for f in &folds {
            assert_eq!(f.train.len(), 90);
            assert_eq!(f.test.len(), 10);
            for &i in &f.test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let uneven = split(&[0; 23], SplitProtocol::KFold { k: 5 }, 1).unwrap();
        let sizes: Vec<usize> = uneven.iter().map(|f| f.test.len()).collect();
        assert_eq!(sizes, vec![5, 5, 5, 4, 4]);
    }

    #[test]
    fn stratified_preserves_proportions() {
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let f = &split(&labels, SplitProtocol::StratifiedShuffle { train_ratio: 0.9 }, 2).unwrap()[0];
        let count = |idx: &[usize], c| idx.iter().filter(|&&i| labels[i] == c).count();
        assert_eq!(count(&f.train, 0), 45);
        assert_eq!(count(&f.train, 1), 45);
        assert_eq!(count(&f.test, 0), 5);
        assert_eq!(count(&f.test, 1), 5);

        // 7/13/30 at 0.8: ideal 5.6/10.4/24 -> quota 40 = 5+10+24 +1 to the 0.6 remainder
        let labels: Vec<usize> = (0..50).map(|i| if i < 7 { 0 } else if i < 20 { 1 } else { 2 }).collect();
        let f = &split(&labels, SplitProtocol::StratifiedShuffle { train_ratio: 0.8 }, 2).unwrap()[0];
        let count = |idx: &[usize], c| idx.iter().filter(|&&i| labels[i] == c).count();
        assert_eq!(f.train.len(), 40);
        assert_eq!(count(&f.train, 0), 6);
        assert_eq!(count(&f.train, 1), 10);
        assert_eq!(count(&f.train, 2), 24);
    }

    #[test]
    fn invalid_protocols() {
        let labels = vec![0, 0, 1, 1];
        assert!(split(&labels, SplitProtocol::KFold { k: 1 }, 0).is_err());
        assert!(split(&labels, SplitProtocol::KFold { k: 5 }, 0).is_err());
        assert!(split(&labels, SplitProtocol::Shuffle { train_ratio: 1.0 }, 0).is_err());
        assert!(split(&[0], SplitProtocol::Shuffle { train_ratio: 0.9 }, 0).is_err());
        assert!(split(&[0, 0, 1], SplitProtocol::StratifiedShuffle { train_ratio: 0.5 }, 0).is_err());
    }
}
