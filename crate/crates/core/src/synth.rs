//! Benchmark problems sampled uniformly from the unit hypercube.
//!
//! Boolean problems are made real-valued by binarizing each coordinate at
//! 0.5 (bit is 1 iff `x >= 0.5`).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Default stripe width of the rotated checkerboard, in rotated units.
/// With a 45 degree rotation the boundaries fall on `x + y` and `y - x`
/// at multiples of 0.5.
pub const RCB_STRIPE_WIDTH: f64 = std::f64::consts::SQRT_2 / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    RealMultiplexer {
        n_bits: usize,
    },
    Checkerboard {
        dims: usize,
        divisions: usize,
    },
    ConcatMultiplexer {
        blocks: usize,
        block_bits: usize,
    },
    Majority {
        n_bits: usize,
    },
    Carry {
        n_bits: usize,
    },
    RotatedCheckerboard {
        #[serde(default = "default_grid")]
        grid: usize,
        #[serde(default = "default_angle")]
        angle_deg: f64,
        #[serde(default = "default_width")]
        stripe_width: f64,
    },
}

fn default_grid() -> usize {
    101
}
fn default_angle() -> f64 {
    45.0
}
fn default_width() -> f64 {
    RCB_STRIPE_WIDTH
}

/// Address width `k` with `n = k + 2^k`, if any.
fn mux_address_bits(n: usize) -> Option<usize> {
    (1..usize::BITS as usize - 1)
        .take_while(|&k| k + (1 << k) <= n)
        .find(|&k| k + (1 << k) == n)
}

#[inline]
fn bit(x: f64) -> usize {
    usize::from(x >= 0.5)
}

/// Multiplexer on the binarized `x`; address bits first, most significant first.
fn multiplex(x: &[f64], k: usize) -> usize {
    let addr = x[..k].iter().fold(0, |a, &v| (a << 1) | bit(v));
    bit(x[k + addr])
}

impl ProblemSpec {
    pub fn rotated_checkerboard() -> Self {
        ProblemSpec::RotatedCheckerboard {
            grid: default_grid(),
            angle_deg: default_angle(),
            stripe_width: default_width(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Problem(m));
        match *self {
            ProblemSpec::RealMultiplexer { n_bits } => {
                if mux_address_bits(n_bits).is_none() {
                    return bad(format!("multiplexer size {n_bits} is not k + 2^k"));
                }
            }
            ProblemSpec::Checkerboard { dims, divisions } => {
                if dims == 0 || divisions < 2 {
                    return bad(format!("checkerboard needs dims >= 1 and divisions >= 2, got {dims}x{divisions}"));
                }
            }
            ProblemSpec::ConcatMultiplexer { blocks, block_bits } => {
                if blocks == 0 || blocks > 16 || mux_address_bits(block_bits).is_none() {
                    return bad(format!(
                        "concatenated multiplexer needs 1..=16 blocks of k + 2^k bits, got {blocks}x{block_bits}"
                    ));
                }
            }
            ProblemSpec::Majority { n_bits } => {
                if n_bits % 2 == 0 {
                    return bad(format!("majority needs an odd bit count, got {n_bits}"));
                }
            }
            ProblemSpec::Carry { n_bits } => {
                if n_bits == 0 || n_bits % 2 != 0 || n_bits > 60 {
                    return bad(format!("carry needs an even bit count in 2..=60, got {n_bits}"));
                }
            }
            ProblemSpec::RotatedCheckerboard {
                grid,
                angle_deg,
                stripe_width,
            } => {
                if grid < 2 || !angle_deg.is_finite() || !(stripe_width.is_finite() && stripe_width > 0.0) {
                    return bad(format!(
                        "rotated checkerboard needs grid >= 2, finite angle and width > 0, got {grid}, {angle_deg}, {stripe_width}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        match *self {
            ProblemSpec::RealMultiplexer { n_bits }
            | ProblemSpec::Majority { n_bits }
            | ProblemSpec::Carry { n_bits } => n_bits,
            ProblemSpec::Checkerboard { dims, .. } => dims,
            ProblemSpec::ConcatMultiplexer { blocks, block_bits } => blocks * block_bits,
            ProblemSpec::RotatedCheckerboard { .. } => 2,
        }
    }

    pub fn num_classes(&self) -> usize {
        match *self {
            ProblemSpec::ConcatMultiplexer { blocks, .. } => 1 << blocks,
            _ => 2,
        }
    }

    /// Class of a point in `[0, 1]^d`. The spec must be valid.
    pub fn label(&self, x: &[f64]) -> usize {
        debug_assert_eq!(x.len(), self.dims());
        match *self {
            ProblemSpec::RealMultiplexer { n_bits } => multiplex(x, mux_address_bits(n_bits).unwrap()),
            ProblemSpec::Checkerboard { divisions, .. } => {
                let v = divisions as f64;
                let top = 1.0 - f64::EPSILON;
                x.iter().map(|&xi| (xi.min(top) * v).floor() as usize).sum::<usize>() % 2
            }
            ProblemSpec::ConcatMultiplexer { block_bits, .. } => {
                let k = mux_address_bits(block_bits).unwrap();
                x.chunks(block_bits).fold(0, |acc, b| (acc << 1) | multiplex(b, k))
            }
            ProblemSpec::Majority { n_bits } => {
                usize::from(2 * x.iter().map(|&v| bit(v)).sum::<usize>() > n_bits)
            }
            ProblemSpec::Carry { n_bits } => {
                let h = n_bits / 2;
                let num = |s: &[f64]| s.iter().fold(0u64, |a, &v| (a << 1) | bit(v) as u64);
                usize::from(num(&x[..h]) + num(&x[h..]) >= 1 << h)
            }
            ProblemSpec::RotatedCheckerboard {
                angle_deg,
                stripe_width,
                ..
            } => {
                let (u, v) = rotate(x[0], x[1], angle_deg);
                let s = (u / stripe_width).floor() as i64 + (v / stripe_width).floor() as i64;
                s.rem_euclid(2) as usize
            }
        }
    }

    /// Draws a labeled sample. The rotated checkerboard ignores `n` and
    /// returns its full evaluation grid.
    pub fn generate(&self, n: usize, seed: u64) -> Result<Dataset> {
        self.validate()?;
        let d = self.dims();
        let features: Vec<Vec<f64>> = match *self {
            ProblemSpec::RotatedCheckerboard { grid, .. } => {
                let step = 1.0 / (grid - 1) as f64;
                (0..grid)
                    .flat_map(|i| (0..grid).map(move |j| vec![i as f64 * step, j as f64 * step]))
                    .collect()
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect()
            }
        };
        let labels = features.iter().map(|x| self.label(x)).collect();
        Dataset::new(
            features.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
            labels,
            (1..=d).map(|i| format!("x{i}")).collect(),
            (0..self.num_classes()).map(|c| c.to_string()).collect(),
        )
    }

    /// Euclidean distance from `(x, y)` to the nearest stripe boundary of a
    /// rotated checkerboard; `None` for other problems.
    pub fn boundary_distance(&self, x: f64, y: f64) -> Option<f64> {
        let ProblemSpec::RotatedCheckerboard {
            angle_deg,
            stripe_width,
            ..
        } = *self
        else {
            return None;
        };
        let (u, v) = rotate(x, y, angle_deg);
        let off = |t: f64| {
            let r = t.rem_euclid(stripe_width);
            r.min(stripe_width - r)
        };
        Some(off(u).min(off(v)))
    }
}

/// Coordinates relative to the square's center, rotated by `-angle`.
fn rotate(x: f64, y: f64, angle_deg: f64) -> (f64, f64) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (dx, dy) = (x - 0.5, y - 0.5);
    (dx * c + dy * s, dy * c - dx * s)
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ProblemSpec::RealMultiplexer { n_bits } => write!(f, "mux:{n_bits}"),
            ProblemSpec::Checkerboard { dims, divisions } => write!(f, "chk:{dims}x{divisions}"),
            ProblemSpec::ConcatMultiplexer { blocks, block_bits } => write!(f, "cmx:{blocks}x{block_bits}"),
            ProblemSpec::Majority { n_bits } => write!(f, "maj:{n_bits}"),
            ProblemSpec::Carry { n_bits } => write!(f, "car:{n_bits}"),
            ProblemSpec::RotatedCheckerboard {
                grid,
                angle_deg,
                stripe_width,
            } => write!(f, "rcb:{grid}x{angle_deg}x{stripe_width}"),
        }
    }
}

/// Parses the short forms `mux`, `mux:20`, `chk:3x5`, `cmx:3x3`, `maj:11`,
/// `car:12`, `rcb`, `rcb:0.35` or `rcb:101x45x0.35`. Bare names take the
/// standard sizes.
impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Problem(format!("cannot parse problem {s:?}"));
        let (name, args) = match s.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.trim(), None),
        };
        let nums = |a: &str| -> Result<Vec<f64>> {
            a.split('x')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let ints = |a: &str, want: usize| -> Result<Vec<usize>> {
            let v = nums(a)?;
            if v.len() != want || v.iter().any(|&t| t < 0.0 || t.fract() != 0.0 || t > 1e9) {
                return Err(bad());
            }
            Ok(v.into_iter().map(|t| t as usize).collect())
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "mux" | "multiplexer" => ProblemSpec::RealMultiplexer {
                n_bits: args.map_or(Ok(vec![20]), |a| ints(a, 1))?[0],
            },
            "chk" | "checkerboard" => {
                let v = args.map_or(Ok(vec![3, 5]), |a| ints(a, 2))?;
                ProblemSpec::Checkerboard {
                    dims: v[0],
                    divisions: v[1],
                }
            }
            "cmx" | "concat-multiplexer" => {
                let v = args.map_or(Ok(vec![3, 3]), |a| ints(a, 2))?;
                ProblemSpec::ConcatMultiplexer {
                    blocks: v[0],
                    block_bits: v[1],
                }
            }
            "maj" | "majority" => ProblemSpec::Majority {
                n_bits: args.map_or(Ok(vec![11]), |a| ints(a, 1))?[0],
            },
            "car" | "carry" => ProblemSpec::Carry {
                n_bits: args.map_or(Ok(vec![12]), |a| ints(a, 1))?[0],
            },
            "rcb" | "rotated-checkerboard" => {
                let mut spec = ProblemSpec::rotated_checkerboard();
                if let (Some(a), ProblemSpec::RotatedCheckerboard {
                    grid,
                    angle_deg,
                    stripe_width,
                }) = (args, &mut spec)
                {
                    let v = nums(a)?;
                    match v[..] {
                        [w] => *stripe_width = w,
                        [g, ang, w] if g >= 0.0 && g.fract() == 0.0 && g <= 1e5 => {
                            *grid = g as usize;
                            *angle_deg = ang;
                            *stripe_width = w;
                        }
                        _ => return Err(bad()),
                    }
                }
                spec
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}
