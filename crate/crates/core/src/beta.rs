//! Four-parameter beta distribution and the normalized membership function
//! built on it.
//!
//! A fuzzy set is `Be4(alpha, beta, lower, upper)` restricted to
//! `alpha, beta >= 1`, so the density is bounded and has a well-defined peak.
//! The membership degree is the density divided by its value at the mode,
//! which puts it in `[0, 1]` with the peak at exactly 1.
//!
//! `alpha == beta == 1` is the rectangular (crisp) case. Membership there is
//! an interval test and never touches a special function.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kurtosis of the rectangular shape `Be4(1, 1, l, u)`.
pub const RECTANGULAR_KURTOSIS: f64 = 1.8;

thread_local! {
    static LN_BETA_CALLS: Cell<u64> = const { Cell::new(0) };
    static SHAPED_EVALS: Cell<u64> = const { Cell::new(0) };
}

/// Per-thread counters used to check that crisp sets stay on the fast path.
pub mod instrument {
    use super::{LN_BETA_CALLS, SHAPED_EVALS};

    /// Number of `ln_beta` evaluations on this thread since the last reset.
    pub fn special_function_calls() -> u64 {
        LN_BETA_CALLS.with(|c| c.get())
    }

    /// Number of membership evaluations that took the non-rectangular path.
    pub fn shaped_evaluations() -> u64 {
        SHAPED_EVALS.with(|c| c.get())
    }

    pub fn reset() {
        LN_BETA_CALLS.with(|c| c.set(0));
        SHAPED_EVALS.with(|c| c.set(0));
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this, `ln_gamma` differences are taken through the Stirling series.
const STIRLING_CUTOFF: f64 = 10.0;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x >= STIRLING_CUTOFF {
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln_gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2]` for `x >= 10`.
fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2
            * (1.0 / 360.0
                - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
}

fn check_shape(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// `ln B(a, b)`.
///
/// Large arguments go through the Stirling form with the leading
/// terms rearranged so the big `x ln x` pieces cancel analytically.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_shape("a", a)?;
    check_shape("b", b)?;
    LN_BETA_CALLS.with(|c| c.set(c.get() + 1));

    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    let sum = small + large;
    if small >= STIRLING_CUTOFF {
        // ln B = ln(2pi)/2 + (a-1/2) ln(a/s) + (b-1/2) ln(b/s) - ln(s)/2 + corrections
        let v = HALF_LN_2PI + (small - 0.5) * (small / sum).ln() + (large - 0.5) * (large / sum).ln()
            - 0.5 * sum.ln()
            + stirling_correction(small)
            + stirling_correction(large)
            - stirling_correction(sum);
        Ok(v)
    } else if large >= STIRLING_CUTOFF {
        // ln G(b) - ln G(a+b) via Stirling, with ln G(a) taken directly.
        let diff = (large - 0.5) * (large / sum).ln() - small * sum.ln() + small
            + stirling_correction(large)
            - stirling_correction(sum);
        Ok(ln_gamma(small) + diff)
    } else {
        Ok(ln_gamma(small) + ln_gamma(large) - ln_gamma(sum))
    }
}

/// The beta function `B(a, b)`.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

/// Kurtosis (not excess) of the beta distribution. Independent of the
/// interval, symmetric in its arguments, and 1.8 for `(1, 1)`.
pub fn kurtosis(alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    let p = alpha * beta;
    3.0 * (s + 1.0) * (2.0 * s * s + p * (s - 6.0)) / (p * (s + 2.0) * (s + 3.0))
}

/// Shape and interval parameters of one four-parameter beta fuzzy set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta4 {
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Beta4 {
    pub fn new(alpha: f64, beta: f64, lower: f64, upper: f64) -> Result<Self> {
        let p = Beta4 {
            alpha,
            beta,
            lower,
            upper,
        };
        p.validate()?;
        Ok(p)
    }

    /// Crisp set on `[lower, upper]`.
    pub fn rectangular(lower: f64, upper: f64) -> Result<Self> {
        Self::new(1.0, 1.0, lower, upper)
    }

    /// The unit interval with a rectangular shape; matches anything in `[0, 1]`.
    pub const DONT_CARE: Beta4 = Beta4 {
        alpha: 1.0,
        beta: 1.0,
        lower: 0.0,
        upper: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        let Beta4 {
            alpha,
            beta,
            lower,
            upper,
        } = *self;
        if !(alpha.is_finite() && alpha >= 1.0 && beta.is_finite() && beta >= 1.0) {
            return Err(Error::InvalidParams(format!(
                "shapes must be finite and >= 1, got alpha={alpha}, beta={beta}"
            )));
        }
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(Error::InvalidParams(format!(
                "interval must be finite with upper > lower, got [{lower}, {upper}]"
            )));
        }
        Ok(())
    }

    /// Exactly `alpha == 1 && beta == 1`; no tolerance.
    #[inline]
    pub fn is_rectangular(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Peak location. The rectangular case has no unique peak; the
    /// interval midpoint is used.
    pub fn mode(&self) -> f64 {
        if self.is_rectangular() {
            0.5 * (self.lower + self.upper)
        } else {
            self.lower + (self.alpha - 1.0) / (self.alpha + self.beta - 2.0) * self.width()
        }
    }

    pub fn kurtosis(&self) -> f64 {
        kurtosis(self.alpha, self.beta)
    }

    /// Log density, `-inf` outside the support. Uses `0^0 = 1` at the
    /// endpoints when a shape parameter equals 1.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return f64::NEG_INFINITY;
        }
        let lb = ln_beta(self.alpha, self.beta).expect("validated shapes");
        let mut v = -lb - (self.alpha + self.beta - 1.0) * self.width().ln();
        if self.alpha != 1.0 {
            v += (self.alpha - 1.0) * (x - self.lower).ln();
        }
        if self.beta != 1.0 {
            v += (self.beta - 1.0) * (self.upper - x).ln();
        }
        v
    }

    /// Probability density on `[lower, upper]`, zero elsewhere.
    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Density normalized by its modal value.
    ///
    /// The beta-function and interval-width factors are common to the
    /// numerator and the denominator, so the ratio is formed directly from
    /// the `(x - l)` and `(u - x)` terms in log space.
    #[inline]
    pub fn membership(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        if self.is_rectangular() {
            return 1.0;
        }
        SHAPED_EVALS.with(|c| c.set(c.get() + 1));
        let m = self.mode();
        let mut log_ratio = 0.0;
        if self.alpha != 1.0 {
            log_ratio += (self.alpha - 1.0) * ((x - self.lower) / (m - self.lower)).ln();
        }
        if self.beta != 1.0 {
            log_ratio += (self.beta - 1.0) * ((self.upper - x) / (self.upper - m)).ln();
        }
        log_ratio.exp().min(1.0)
    }
}

/// Free-function forms mirroring the methods.
pub fn beta4_pdf(x: f64, p: &Beta4) -> f64 {
    p.pdf(x)
}

pub fn mode(p: &Beta4) -> f64 {
    p.mode()
}

pub fn membership(x: f64, p: &Beta4) -> f64 {
    p.membership(x)
}
