//! Coherent states `ϑ_{z,m}` attached to the level-`m` space, in series and
//! closed form, plus numerical checks of the two identities that connect them.
//!
//! With `z = a + ib` the closed form is
//!
//! ```text
//! ϑ_{z,m}(ξ) = (-1)^m (2^m m! √π)^{-1/2}
//!              · exp(-z̄²/2 + √2 ξ z̄ - |z|²/2 - ξ²/2) · H_m(ξ - √2 a)
//! ```
//!
//! whose modulus is `|ψ_m(ξ - √2 a)|`, so it is evaluated as a shifted Hermite
//! function times a unit phase. The series form expands the same state in the
//! Hermite functions with coefficients `e^{-|z|²/2} h_{m,p}(z) / √(m! p!)`.
//!
//! ```
//! use num_complex::Complex64;
//! use polyfock::coherent::{theta_closed, theta_series, CoherentLabel, SeriesControl};
//!
//! let label = CoherentLabel::new(Complex64::new(1.0, 1.0), 2).unwrap();
//! let closed = theta_closed(label, 0.7);
//! let series = theta_series(label, 0.7, SeriesControl::new(400, 1e-16).unwrap());
//! assert!(series.converged);
//! assert!((closed - series.value).norm() < 1e-9);
//! ```

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockbasis::scaled_normalized_h;
use crate::orthopoly::{
    factorial, hermite, hermite_function, hermite_functions, laguerre, laguerre_recurrence,
    log_factorial, LaguerreOrder, PolyIndex,
};
use crate::sum::CompensatedSum;

/// Hard ceiling on [`SeriesControl::max_terms`].
pub const MAX_SERIES_TERMS: usize = 2048;

/// Phase-space point `z` together with the Landau level `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentLabel {
    z: Complex64,
    m: PolyIndex,
}

impl CoherentLabel {
    pub fn new(z: Complex64, m: usize) -> Result<Self> {
        Ok(Self {
            z,
            m: PolyIndex::new(m)?,
        })
    }

    pub fn z(self) -> Complex64 {
        self.z
    }

    pub fn level(self) -> usize {
        self.m.get()
    }
}

/// Truncation controls for the infinite sums in this module.
///
/// A sum stops once three consecutive terms are each below `tail_tol` in
/// magnitude, or when `max_terms` terms have been added.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesControl {
    max_terms: usize,
    tail_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms == 0 || max_terms > MAX_SERIES_TERMS {
            return Err(Error::InvalidParameter(format!(
                "max_terms must be in 1..={MAX_SERIES_TERMS}, got {max_terms}"
            )));
        }
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail_tol must be positive, got {tail_tol}"
            )));
        }
        Ok(Self {
            max_terms,
            tail_tol,
        })
    }

    pub fn max_terms(self) -> usize {
        self.max_terms
    }

    pub fn tail_tol(self) -> f64 {
        self.tail_tol
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 600,
            tail_tol: 1e-16,
        }
    }
}

/// A truncated sum and how it ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    /// `false` when the term budget ran out before the tail test passed.
    pub converged: bool,
}

/// Runs the three-small-terms rule over `term(0), term(1), …`. The tail test is
/// only consulted from index `guard` on, which keeps it from firing on the
/// rising part of the sequence.
fn sum_series<F>(ctrl: SeriesControl, guard: usize, mut term: F) -> SeriesValue
where
    F: FnMut(usize) -> Complex64,
{
    let mut acc = CompensatedSum::new();
    let mut small = 0;
    for i in 0..ctrl.max_terms {
        let t = term(i);
        acc.add(t);
        if t.norm() < ctrl.tail_tol {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 3 && i >= guard {
            return SeriesValue {
                value: acc.total(),
                terms_used: i + 1,
                converged: true,
            };
        }
    }
    SeriesValue {
        value: acc.total(),
        terms_used: ctrl.max_terms,
        converged: false,
    }
}

/// Closed-form wave function `ϑ_{z,m}(ξ)`.
pub fn theta_closed(label: CoherentLabel, xi: f64) -> Complex64 {
    let (a, b) = (label.z.re, label.z.im);
    let m = label.m;
    let sign = if m.get() % 2 == 0 { 1.0 } else { -1.0 };
    let phase = Complex64::from_polar(1.0, a * b - SQRT_2 * xi * b);
    phase * (sign * hermite_function(m, xi - SQRT_2 * a))
}

/// `ϑ_{z,m}(ξ)` from its Hermite-function expansion.
pub fn theta_series(label: CoherentLabel, xi: f64, ctrl: SeriesControl) -> SeriesValue {
    let m = label.level();
    let z = label.z;
    let shift = -0.5 * z.norm_sqr();
    let psi = hermite_functions(ctrl.max_terms - 1, xi);
    let guard = m.max(z.norm_sqr().ceil() as usize) + 2;
    sum_series(ctrl, guard, |p| {
        scaled_normalized_h(m, p, z, shift) * psi[p]
    })
}

/// Both sides of the Laguerre–Hermite addition formula
///
/// ```text
/// Σ_{j ≥ -n} 2^{-j} β^{j/2} / (j+n)! · w^j L_n^{(j)}(β|w|²/2) H_{j+n}(ξ)
///     = (1/n!) exp(-(β/4) w² + √β ξ w) H_n(ξ - √β a)
/// ```
///
/// with `w = a - ib`. The left side is summed over `N = j + n` with the same
/// truncation rule as [`theta_series`]; terms with `j < 0` use the
/// negative-order Laguerre identity, which cancels the pole of `w^j`.
pub fn addition_formula_sides(
    n: PolyIndex,
    a: f64,
    b: f64,
    beta: f64,
    xi: f64,
    ctrl: SeriesControl,
) -> Result<(SeriesValue, Complex64)> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let n = n.get();
    let w = Complex64::new(a, -b);
    let r = w.norm();
    let t = 0.5 * beta * r * r;
    // H_N(ξ) = ψ_N(ξ) · (√π 2^N N!)^{1/2} e^{ξ²/2}; the 2^N and N! parts are
    // merged into each term's logarithm below.
    let psi = hermite_functions(ctrl.max_terms - 1, xi);
    let common = 0.25 * std::f64::consts::PI.ln() + 0.5 * n as f64 * 2f64.ln() + 0.5 * xi * xi;
    let half_log_ratio = 0.5 * (0.5 * beta).ln();

    let term = |big_n: usize| -> Complex64 {
        if psi[big_n] == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let j = big_n as i64 - n as i64;
        let base = common - 0.5 * log_factorial(big_n);
        if j >= 0 {
            let j = j as usize;
            let lag = laguerre_recurrence(n, j as f64, t);
            if lag == 0.0 || (j > 0 && r == 0.0) {
                return Complex64::new(0.0, 0.0);
            }
            let radial = if j == 0 { 0.0 } else { j as f64 * r.ln() };
            let log_mag = base + j as f64 * half_log_ratio + radial;
            Complex64::from_polar(1.0, j as f64 * w.arg()) * (lag * psi[big_n] * log_mag.exp())
        } else {
            // w^{-k} L_n^{(-k)}(t) = (-β/2)^k w̄^k (n-k)!/n! L_{n-k}^{(k)}(t)
            let k = (-j) as usize;
            let lag = laguerre_recurrence(n - k, k as f64, t);
            if lag == 0.0 || r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let log_mag = base - k as f64 * half_log_ratio
                + k as f64 * ((0.5 * beta).ln() + r.ln())
                + log_factorial(n - k)
                - log_factorial(n);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(1.0, -(k as f64) * w.arg())
                * (sign * lag * psi[big_n] * log_mag.exp())
        }
    };
    let guard = n + (beta * r * r).ceil() as usize + 2;
    let lhs = sum_series(ctrl, guard, term);

    let exponent = -0.25 * beta * w * w + beta.sqrt() * xi * w;
    let herm = hermite(PolyIndex::new(n)?, xi - beta.sqrt() * a);
    let rhs = exponent.exp() * (herm / factorial(n));
    Ok((lhs, rhs))
}

/// Absolute value of the finite sum left over when the expansion of `ϑ_{z,m}`
/// is split at `p = m`:
///
/// ```text
/// Σ_{p<m} [ (-1)^p √p! z̄^{m-p} L_p^{(m-p)}(|z|²)
///           - (-1)^m m!/√p! z^{p-m} L_m^{(p-m)}(|z|²) ] ψ_p(ξ)
/// ```
///
/// The second bracket is evaluated through the negative-order Laguerre
/// routine, so a nonzero result measures how well the two branches cancel.
/// At `z = 0` every term of both branches vanishes and the result is `0`.
pub fn finite_sum_residual(m: PolyIndex, z: Complex64, xi: f64) -> Result<f64> {
    let m = m.get();
    if m == 0 || z == Complex64::new(0.0, 0.0) {
        return Ok(0.0);
    }
    let t = z.norm_sqr();
    let psi = hermite_functions(m - 1, xi);
    let mut acc = CompensatedSum::new();
    for (p, &psi_p) in psi.iter().enumerate() {
        let k = m - p;
        let sign_p = if p % 2 == 0 { 1.0 } else { -1.0 };
        let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
        let half_lf = 0.5 * log_factorial(p);
        let direct = z.conj().powu(k as u32)
            * (sign_p * half_lf.exp() * laguerre_recurrence(p, k as f64, t));
        let order = LaguerreOrder::integer(-(k as i64));
        let continued = laguerre(PolyIndex::new(m)?, order, t)?;
        let cont = z.powi(-(k as i32)) * (sign_m * (log_factorial(m) - half_lf).exp() * continued);
        acc.add((direct - cont) * psi_p);
    }
    Ok(acc.total().norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{gauss_hermite, line_inner};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn label(z: Complex64, m: usize) -> CoherentLabel {
        CoherentLabel::new(z, m).unwrap()
    }

    #[test]
    fn closed_examples() {
        for xi in [-1.3, 0.0, 0.4, 2.5] {
            let v = theta_closed(label(c(0.0, 0.0), 0), xi);
            let want = hermite_function(PolyIndex::new(0).unwrap(), xi);
            assert!((v - c(want, 0.0)).norm() < 1e-15);
        }
        assert_eq!(theta_closed(label(c(0.0, 0.0), 1), 0.0).norm(), 0.0);
    }

    #[test]
    fn canonical_reduction() {
        let pi = std::f64::consts::PI;
        for (z, xi) in [
            (c(0.3, -0.8), 0.2),
            (c(-1.1, 0.5), -0.9),
            (c(1.7, 1.2), 1.4),
        ] {
            let zb = z.conj();
            let expo = -0.5 * zb * zb + SQRT_2 * xi * zb - 0.5 * z.norm_sqr() - 0.5 * xi * xi;
            let want = expo.exp() * pi.powf(-0.25);
            let got = theta_closed(label(z, 0), xi);
            assert!((got - want).norm() < 1e-14, "{got} {want}");
        }
    }

    #[test]
    fn unit_norm() {
        let rule = gauss_hermite(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 0..=8 {
            for _ in 0..4 {
                let r = rng.random_range(0.0..2.0);
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                let l = label(Complex64::from_polar(r, th), m);
                let f = |x: f64| theta_closed(l, x);
                let n = line_inner(f, f, &rule).unwrap();
                assert!(
                    (n.re - 1.0).abs() < 1e-10 && n.im.abs() < 1e-12,
                    "m={m} {n}"
                );
            }
        }
    }

    #[test]
    fn series_examples() {
        let ctrl = SeriesControl::default();
        let v = theta_series(label(c(0.0, 0.0), 0), 0.3, ctrl);
        assert!(v.converged);
        assert!((v.value - theta_closed(label(c(0.0, 0.0), 0), 0.3)).norm() < 1e-15);

        let v = theta_series(
            label(c(1.0, 1.0), 2),
            0.7,
            SeriesControl::new(400, 1e-16).unwrap(),
        );
        assert!((v.value - theta_closed(label(c(1.0, 1.0), 2), 0.7)).norm() < 1e-9);

        let far = theta_series(label(c(3.0, 0.0), 0), 0.0, ctrl);
        let near = theta_series(label(c(0.1, 0.0), 0), 0.0, ctrl);
        assert!(far.converged && near.converged);
        assert!(far.terms_used > near.terms_used);
    }

    #[test]
    fn series_matches_closed() {
        let ctrl = SeriesControl::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 0..=8 {
            for _ in 0..6 {
                let z = Complex64::from_polar(
                    rng.random_range(0.0..2.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                let xi = rng.random_range(-4.0..4.0);
                let s = theta_series(label(z, m), xi, ctrl);
                let d = (s.value - theta_closed(label(z, m), xi)).norm();
                assert!(s.converged && d < 1e-8, "m={m} z={z} xi={xi} d={d}");
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let v = theta_series(
            label(c(3.0, 0.0), 0),
            0.0,
            SeriesControl::new(5, 1e-16).unwrap(),
        );
        assert!(!v.converged);
        assert_eq!(v.terms_used, 5);
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0, 1e-10).is_err());
        assert!(SeriesControl::new(MAX_SERIES_TERMS + 1, 1e-10).is_err());
        assert!(SeriesControl::new(10, 0.0).is_err());
        assert!(SeriesControl::new(10, f64::NAN).is_err());
    }

    fn sides(
        n: usize,
        a: f64,
        b: f64,
        beta: f64,
        xi: f64,
        terms: usize,
    ) -> (SeriesValue, Complex64) {
        let ctrl = SeriesControl::new(terms, 1e-16).unwrap();
        addition_formula_sides(PolyIndex::new(n).unwrap(), a, b, beta, xi, ctrl).unwrap()
    }

    #[test]
    fn addition_examples() {
        let (l, r) = sides(0, 0.0, 0.0, 1.7, 0.9, 300);
        assert!((l.value - c(1.0, 0.0)).norm() < 1e-14);
        assert!((r - c(1.0, 0.0)).norm() < 1e-14);

        let (l, r) = sides(1, 0.5, 0.2, 2.0, 0.3, 300);
        assert!((l.value - r).norm() < 1e-9);

        let (l, r) = sides(2, 1.0, 0.0, 2.0, 0.0, 300);
        assert!(l.value.im.abs() < 1e-14 && r.im.abs() < 1e-14);
        assert!((l.value - r).norm() < 1e-9);
    }

    #[test]
    fn addition_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..100 {
            let n = rng.random_range(0..=6);
            let a = rng.random_range(-1.5..1.5);
            let b = rng.random_range(-1.5..1.5);
            let beta = [1.0, 2.0, 4.0][i % 3];
            let xi = rng.random_range(-3.0..3.0);
            let (l, r) = sides(n, a, b, beta, xi, 600);
            let d = (l.value - r).norm();
            assert!(
                l.converged && d < 1e-8,
                "n={n} a={a} b={b} beta={beta} xi={xi} d={d}"
            );
        }
    }

    #[test]
    fn addition_rejects_bad_beta() {
        let ctrl = SeriesControl::default();
        let n = PolyIndex::new(1).unwrap();
        assert!(addition_formula_sides(n, 0.1, 0.1, 0.0, 0.0, ctrl).is_err());
        assert!(addition_formula_sides(n, 0.1, 0.1, -1.0, 0.0, ctrl).is_err());
    }

    #[test]
    fn finite_sum_vanishes() {
        let idx = |m| PolyIndex::new(m).unwrap();
        assert!(finite_sum_residual(idx(1), c(0.7, -0.4), 1.1).unwrap() < 1e-12);
        assert!(finite_sum_residual(idx(5), c(1.0, 2.0), 0.4).unwrap() < 1e-10);
        assert_eq!(finite_sum_residual(idx(1), c(0.0, 0.0), 0.5).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=8 {
            for _ in 0..5 {
                let z = Complex64::from_polar(
                    rng.random_range(0.05..2.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                );
                let r = finite_sum_residual(idx(m), z, rng.random_range(-3.0..3.0)).unwrap();
                assert!(r < 1e-9, "m={m} z={z} r={r}");
            }
        }
    }
}
