use rand::Rng;

use crate::beta::Beta4;
use crate::rule::{Condition, Input, RepresentationKind, Rule, Triangle};

use super::EngineConfig;

/// Builds a rule that matches `x` with degree 1 and advocates `class`.
///
/// Beta representations: each dimension is a don't-care `(1, 1, 0, 1)` with
/// probability `P_hash`, otherwise `(s, s, x - d, x + d)` with an
/// independent `d ~ U(0, r0]` and `s ~ U[1, s0]` (`s = 1` when `s0 = 1` or
/// the representation is frozen rectangular). Triangles take
/// `(U[-0.5, x), x, U(x, 1.5])`. Missing attributes become don't-cares.
pub fn cover<R: Rng + ?Sized>(
    x: &Input,
    class: usize,
    num_classes: usize,
    timestamp: u64,
    cfg: &EngineConfig,
    rng: &mut R,
) -> Rule {
    let condition = match cfg.kind() {
        RepresentationKind::Triangular => Condition::Triangular(
            x.iter()
                .map(|xi| match *xi {
                    Some(v) => {
                        let left = rng.gen_range(-0.5..v);
                        // (v, 1.5]
                        let right = 1.5 - (1.5 - v) * rng.gen::<f64>();
                        Triangle {
                            left,
                            peak: v,
                            right,
                        }
                    }
                    None => Triangle {
                        left: -0.5,
                        peak: 0.5,
                        right: 1.5,
                    },
                })
                .collect(),
        ),
        kind => {
            let s0 = match kind {
                RepresentationKind::Fbr { s0, .. } => s0,
                _ => 1.0,
            };
            Condition::Beta(
                x.iter()
                    .map(|xi| match *xi {
                        Some(v) if rng.gen::<f64>() >= cfg.dont_care_prob => {
                            // (0, r0]
                            let d = cfg.r0 * (1.0 - rng.gen::<f64>());
                            let s = if s0 == 1.0 { 1.0 } else { rng.gen_range(1.0..=s0) };
                            centered_set(v, d, s)
                        }
                        _ => Beta4::DONT_CARE,
                    })
                    .collect(),
            )
        }
    };
    Rule::new(condition, class, num_classes, timestamp)
}

/// Symmetric set of half-width `d` and shape `s` centred on `v`.
pub(crate) fn centered_set(v: f64, d: f64, s: f64) -> Beta4 {
    Beta4 {
        alpha: s,
        beta: s,
        lower: v - d,
        upper: v + d,
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::engine::Representation;

    #[test]
    fn centered_set_substitution() {
        let s = centered_set(0.3, 0.4, 1.0);
        assert_eq!((s.alpha, s.beta), (1.0, 1.0));
        assert!((s.lower - -0.1).abs() < 1e-15 && (s.upper - 0.7).abs() < 1e-15);
    }

    #[test]
    fn crisp_covering_matches_with_degree_one() {
        let cfg = EngineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x: Vec<Option<f64>> = (0..6).map(|_| Some(rng.gen())).collect();
            let r = cover(&x, 1, 2, 7, &cfg, &mut rng);
            assert_eq!(r.matching_degree(&x), 1.0);
            assert!(r.is_crisp());
            assert_eq!(r.consequent, 1);
            assert_eq!(r.experience, 0.0);
            assert_eq!(r.numerosity, 1);
            assert_eq!(r.correct_matching, vec![0.0, 0.0]);
            assert_eq!(r.correct_set_size, 1.0);
            assert_eq!(r.ga_timestamp, 7);
            let Condition::Beta(sets) = &r.condition else { panic!() };
            for (s, xi) in sets.iter().zip(&x) {
                if *s != Beta4::DONT_CARE {
                    let half = 0.5 * s.width();
                    assert!(half > 0.0 && half <= cfg.r0 + 1e-12);
                    assert!((s.mode() - xi.unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dont_care_frequency_follows_p_hash() {
        let cfg = EngineConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = vec![Some(0.5); 10];
        let mut dc = 0;
        let trials = 2000;
        for _ in 0..trials {
            let r = cover(&x, 0, 2, 0, &cfg, &mut rng);
            let Condition::Beta(sets) = r.condition else { panic!() };
            dc += sets.iter().filter(|s| **s == Beta4::DONT_CARE).count();
        }
        let freq = dc as f64 / (trials * 10) as f64;
        assert!((freq - 0.33).abs() < 0.02, "{freq}");
    }

    #[test]
    fn dont_care_matches_unit_interval() {
        let r = Rule::new(Condition::Beta(vec![Beta4::DONT_CARE]), 0, 2, 0);
        for i in 0..=100 {
            assert_eq!(r.matching_degree(&[Some(i as f64 / 100.0)]), 1.0);
        }
    }

    #[test]
    fn sharp_covering_still_peaks_at_input() {
        let cfg = EngineConfig {
            s0: 5.0,
            dont_care_prob: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = vec![Some(0.3), Some(0.8)];
        let r = cover(&x, 0, 2, 0, &cfg, &mut rng);
        assert!(!r.is_crisp());
        assert!((r.matching_degree(&x) - 1.0).abs() < 1e-12);
        let Condition::Beta(sets) = &r.condition else { panic!() };
        for s in sets {
            assert_eq!(s.alpha, s.beta);
            assert!((1.0..=5.0).contains(&s.alpha));
        }
    }

    #[test]
    fn triangular_covering() {
        let cfg = EngineConfig {
            representation: Representation::Triangular,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = vec![Some(0.0), Some(0.4), Some(1.0)];
        for _ in 0..200 {
            let r = cover(&x, 0, 2, 0, &cfg, &mut rng);
            assert_eq!(r.matching_degree(&x), 1.0);
            let Condition::Triangular(ts) = &r.condition else { panic!() };
            for (t, xi) in ts.iter().zip(&x) {
                let v = xi.unwrap();
                assert!(t.left >= -0.5 && t.left < v);
                assert_eq!(t.peak, v);
                assert!(t.right > v && t.right <= 1.5);
            }
        }
    }

    #[test]
    fn missing_attribute_becomes_dont_care() {
        let cfg = EngineConfig {
            dont_care_prob: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = cover(&[None, Some(0.5)], 0, 2, 0, &cfg, &mut rng);
        let Condition::Beta(sets) = &r.condition else { panic!() };
        assert_eq!(sets[0], Beta4::DONT_CARE);
    }
}
