//! Complex numbers stored as `(ln |z|, arg z)`.
//!
//! Everything downstream handles magnitudes like `e^{α ln²|z|}` that leave the
//! `f64` range long before the interesting part of the plane is reached, so all
//! products, quotients and weights are carried in this representation.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Reduce an angle into `(-π, π]`.
pub fn normalize_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// A complex number in log-polar form.
///
/// Zero is the distinguished value [`LogComplex::ZERO`] (log-modulus `-inf`);
/// its phase carries no meaning. The phase of every other value is kept in
/// `(-π, π]`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogComplex {
    logmod: f64,
    phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        logmod: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        logmod: 0.0,
        phase: 0.0,
    };

    pub fn new(logmod: f64, phase: f64) -> Self {
        if logmod == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            logmod,
            phase: normalize_phase(phase),
        }
    }

    /// Positive real number `e^logmod`.
    pub fn from_logmod(logmod: f64) -> Self {
        Self::new(logmod, 0.0)
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogComplex {
                logmod: x.ln(),
                phase: 0.0,
            }
        } else {
            LogComplex {
                logmod: (-x).ln(),
                phase: PI,
            }
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex {
            logmod: z.re.hypot(z.im).ln(),
            phase: normalize_phase(z.im.atan2(z.re)),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let r = self.logmod.exp();
        let (s, c) = self.phase.sin_cos();
        Complex64::new(r * c, r * s)
    }

    pub fn is_zero(self) -> bool {
        self.logmod == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.logmod.is_finite() && self.phase.is_finite()
    }

    pub fn logmod(self) -> f64 {
        self.logmod
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    /// `|z|` as a plain float (may overflow to `inf` or underflow to `0`).
    pub fn abs(self) -> f64 {
        self.logmod.exp()
    }

    /// Principal branch of `ln z`; `-inf` real part for zero.
    pub fn ln(self) -> Complex64 {
        Complex64::new(self.logmod, self.phase)
    }

    pub fn recip(self) -> Self {
        LogComplex {
            logmod: -self.logmod,
            phase: normalize_phase(-self.phase),
        }
    }

    pub fn conj(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.logmod, -self.phase)
    }

    /// `|z|` as a `LogComplex` (phase dropped).
    pub fn modulus(self) -> Self {
        if self.is_zero() {
            return self;
        }
        LogComplex {
            logmod: self.logmod,
            phase: 0.0,
        }
    }

    /// `|z|^s` for real `s`.
    pub fn abs_pow(self, s: f64) -> Self {
        if self.is_zero() {
            return if s > 0.0 { self } else { Self::ONE };
        }
        LogComplex {
            logmod: s * self.logmod,
            phase: 0.0,
        }
    }

    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    /// `1 - self`, evaluated without cancellation.
    ///
    /// For `|w| ≤ 1` the modulus comes from `|1-w|² = (1-r)² + 4r sin²(φ/2)`
    /// (or `ln_1p` when `r` is small), for `|w| > 1` from `1-w = -w (1 - 1/w)`.
    /// Returns exact [`LogComplex::ZERO`] iff `w` is exactly one.
    pub fn one_minus(self) -> Self {
        if self.is_zero() {
            return Self::ONE;
        }
        if self.logmod > 0.0 {
            let inner = self.recip().one_minus();
            if inner.is_zero() {
                return Self::ZERO;
            }
            return LogComplex::new(self.logmod + inner.logmod, self.phase + PI + inner.phase);
        }
        let l = self.logmod;
        let phi = self.phase;
        let r = l.exp();
        let (s, c) = phi.sin_cos();
        let half = (0.5 * phi).sin();
        let logmod = if r < 0.5 {
            0.5 * (r * (r - 2.0 * c)).ln_1p()
        } else {
            let one_minus_r = -l.exp_m1();
            let sq = one_minus_r * one_minus_r + 4.0 * r * half * half;
            if sq == 0.0 {
                return Self::ZERO;
            }
            0.5 * sq.ln()
        };
        let re = if r < 0.5 {
            1.0 - r * c
        } else {
            -l.exp_m1() + 2.0 * r * half * half
        };
        let phase = (-r * s).atan2(re);
        LogComplex::new(logmod, phase)
    }

    /// Sum of many terms, accumulated largest-first.
    pub fn sum<I: IntoIterator<Item = LogComplex>>(terms: I) -> Self {
        let mut v: Vec<LogComplex> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        v.sort_by(|a, b| b.logmod.total_cmp(&a.logmod));
        // Adding from the small end keeps the partial sums accurate.
        v.into_iter().rev().fold(Self::ZERO, |acc, t| acc + t)
    }
}

impl Default for LogComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "LogComplex::ZERO")
        } else {
            write!(f, "LogComplex(e^{} ∠ {})", self.logmod, self.phase)
        }
    }
}

impl From<Complex64> for LogComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for LogComplex {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogComplex {
            logmod: self.logmod + rhs.logmod,
            phase: normalize_phase(self.phase + rhs.phase),
        }
    }
}

/// Division by [`LogComplex::ZERO`] yields an infinite modulus; use
/// [`LogComplex::checked_div`] when the divisor may vanish.
impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogComplex {
            logmod: self.logmod - rhs.logmod,
            phase: normalize_phase(self.phase - rhs.phase),
        }
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex {
            logmod: self.logmod,
            phase: normalize_phase(self.phase + PI),
        }
    }
}

impl Add for LogComplex {
    type Output = LogComplex;
    fn add(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.logmod >= rhs.logmod {
            (self, rhs)
        } else {
            (rhs, self)
        };
        // big + small = big (1 - w) with w = -small/big, |w| <= 1
        let w = -(small / big);
        big * w.one_minus()
    }
}

impl Sub for LogComplex {
    type Output = LogComplex;
    fn sub(self, rhs: LogComplex) -> LogComplex {
        self + (-rhs)
    }
}
