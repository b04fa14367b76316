//! Hermite and generalized Laguerre polynomials, the confluent hypergeometric
//! function `₁F₁`, and the Hermite functions `ψ_p`.
//!
//! Everything here is evaluated by forward three-term recurrences. The
//! Rodriguez formulas are catastrophically unstable in floating point and are
//! only used (in exact arithmetic) as test oracles.
//!
//! ```
//! use polyfock::orthopoly::{hermite, laguerre, LaguerreOrder, PolyIndex};
//!
//! let two = PolyIndex::new(2).unwrap();
//! assert_eq!(hermite(two, 1.0), 2.0);
//!
//! // negative integer orders go through L_n^(-k)(t) = (-t)^k (n-k)!/n! L_{n-k}^(k)(t)
//! let order = LaguerreOrder::new(-1.0).unwrap();
//! assert!((laguerre(two, order, 1.0).unwrap() + 0.5).abs() < 1e-15);
//! ```

use std::f64::consts::PI;

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Largest polynomial degree accepted at the API boundary.
pub const DEGREE_CAP: usize = 512;

/// Term budget for non-terminating `₁F₁` series.
pub const HYP1F1_MAX_TERMS: usize = 10_000;

/// A polynomial degree, validated against [`DEGREE_CAP`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyIndex(usize);

impl PolyIndex {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEGREE_CAP)
    }

    /// Validates against a caller-chosen cap. The cap itself may not exceed
    /// [`DEGREE_CAP`].
    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(DEGREE_CAP);
        if n > cap {
            return Err(Error::IndexOverCap { index: n, cap });
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for PolyIndex {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

/// Upper index `α` of a generalized Laguerre polynomial.
///
/// Any `α > -1` is accepted, as are negative integers (evaluated through the
/// Szegő reflection identity). Negative non-integers at or below `-1` are
/// rejected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaguerreOrder(f64);

impl LaguerreOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("Laguerre order {alpha}")));
        }
        if alpha <= -1.0 && alpha.fract() != 0.0 {
            return Err(Error::NonIntegerNegativeOrder(alpha));
        }
        Ok(Self(alpha))
    }

    /// Integer order, the common case in this crate.
    pub fn integer(alpha: i64) -> Self {
        Self(alpha as f64)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `Some(k)` when the order is the negative integer `-k`.
    fn negative_integer(self) -> Option<usize> {
        (self.0 < 0.0 && self.0.fract() == 0.0).then(|| (-self.0) as usize)
    }
}

/// Physicists' Hermite polynomial `H_n(ξ)`.
pub fn hermite(n: PolyIndex, xi: f64) -> f64 {
    let n = n.get();
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * xi;
    for k in 1..n {
        let next = 2.0 * xi * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_n^{(α)}(t)`.
pub fn laguerre(n: PolyIndex, order: LaguerreOrder, t: f64) -> Result<f64> {
    let deg = n.get();
    match order.negative_integer() {
        Some(k) => {
            if k > deg {
                return Err(Error::NegativeOrderExceedsDegree { k, n: deg });
            }
            // L_n^{(-k)}(t) = (-t)^k (n-k)!/n! L_{n-k}^{(k)}(t)
            let ratio = (log_factorial(deg - k) - log_factorial(deg)).exp();
            let inner = laguerre_recurrence(deg - k, k as f64, t);
            Ok(pow_usize(-t, k) * ratio * inner)
        }
        None => Ok(laguerre_recurrence(deg, order.get(), t)),
    }
}

/// Three-term recurrence, valid for `α > -1`.
pub(crate) fn laguerre_recurrence(n: usize, alpha: f64, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - t) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Explicit finite sum `Σ_i (-1)^i C(n+α, n-i) t^i / i!`.
///
/// This is the polynomial continuation of `L_n^{(α)}` in `α` and is defined for
/// every real order, including negative integers below `-n`. It suffers from
/// cancellation for large `t` and exists as an independent evaluation route
/// for cross-checks.
pub fn laguerre_explicit(n: PolyIndex, alpha: f64, t: f64) -> f64 {
    let n = n.get();
    let upper = n as f64 + alpha;
    // C(upper, n - i) for i = n down to 0 by the ratio C(x, k+1) = C(x, k) (x-k)/(k+1)
    let mut binom = vec![0.0; n + 1];
    let mut c = 1.0;
    for k in 0..=n {
        binom[n - k] = c;
        c *= (upper - k as f64) / (k as f64 + 1.0);
    }
    let mut sum = 0.0;
    let mut power = 1.0;
    for (i, b) in binom.iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * b * power;
        power *= t / (i as f64 + 1.0);
    }
    sum
}

/// Confluent hypergeometric function `₁F₁(a; b; u)`.
///
/// Terminates after `n + 1` terms when `a = -n`; that polynomial case is summed
/// in double-double arithmetic. Otherwise sums until two
/// consecutive terms fall below `1e-16` relative to the partial sum.
pub fn hyp1f1(a: f64, b: f64, u: f64) -> Result<f64> {
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::ForbiddenLowerParameter(b));
    }
    if a <= 0.0 && a.fract() == 0.0 {
        // Polynomial case. The terms alternate in sign for u > 0 and cancel
        // badly, so both the term ratio and the sum run in double-double.
        let n = (-a) as usize;
        let mut term = TwoFloat::from(1.0);
        let mut sum = TwoFloat::from(1.0);
        for j in 0..n {
            let jf = j as f64;
            term = term * (a + jf) * u / (b + jf) / (jf + 1.0);
            sum += term;
        }
        return Ok(f64::from(sum));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for j in 0..HYP1F1_MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) / (b + jf) * u / (jf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() < 1e-16 * sum.abs() {
            small += 1;
            if small == 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::SeriesDiverged {
        terms: HYP1F1_MAX_TERMS,
    })
}

/// Orthonormal Hermite polynomial `(√π 2^n n!)^{-1/2} H_n(x)`, i.e. `ψ_n`
/// without its Gaussian factor.
pub fn hermite_orthonormal(n: PolyIndex, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    for k in 0..n.get() {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

const RESCALE: f64 = 1e100;

/// Hermite function `ψ_p(ξ) = (√π 2^p p!)^{-1/2} e^{-ξ²/2} H_p(ξ)`.
///
/// Uses the normalized recurrence, so neither `2^p p!` nor `H_p` is ever
/// formed. The Gaussian factor is carried as a separate logarithmic scale and
/// applied once at the end.
pub fn hermite_function(p: PolyIndex, xi: f64) -> f64 {
    let mut last = 0.0;
    scan_hermite_functions(p.get(), xi, |v| last = v);
    last
}

/// `[ψ_0(ξ), …, ψ_{max_p}(ξ)]` in a single recurrence pass.
pub fn hermite_functions(max_p: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_p + 1);
    scan_hermite_functions(max_p, xi, |v| out.push(v));
    out
}

fn scan_hermite_functions<F: FnMut(f64)>(max_p: usize, xi: f64, mut sink: F) {
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    sink(cur * log_scale.exp());
    for k in 0..max_p {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        sink(cur * log_scale.exp());
    }
}

/// `ln(n!)`.
pub fn log_factorial(n: usize) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}

/// `n!` as a float; overflows to infinity past `170!`.
pub fn factorial(n: usize) -> f64 {
    statrs::function::factorial::factorial(n as u64)
}

pub(crate) fn pow_usize(x: f64, k: usize) -> f64 {
    x.powi(k as i32)
}
