//! Complex Hermite basis functions `h_{m,p}`, their norms, the reproducing
//! kernels `K_m` and the weight `ω_m`.
//!
//! # Conventions
//!
//! * `h_{m,p}(z) = Σ_j (-1)^j m! p! / (j! (m-j)! (p-j)!) z^{m-j} z̄^{p-j}`. Its
//!   Landau eigenvalue is the **second** index, so the level-`m` space `A_m`
//!   is spanned by `{h_{k,m}}_{k ≥ 0}`; see [`BasisIndex::in_level`].
//! * The Laguerre and `₁F₁` representations carry the phase `e^{+i(m-p) arg z}`,
//!   which makes all three representations the same function.
//! * Planar inner products use the probability measure
//!   `dμ = π⁻¹ e^{-|z|²} dλ`. Against it `‖h_{m,p}‖² = m! p!`,
//!   `K_m(z, w) = e^{z w̄} L_m(|z - w|²)` and `ω_m(z) = e^{|z|²}`.
//!
//! ```
//! use polyfock::fockbasis::{h_eval, BasisForm, BasisIndex};
//! use num_complex::Complex64;
//!
//! let idx = BasisIndex::new(2, 1).unwrap();
//! let z = Complex64::new(0.0, 2.0);
//! // z² z̄ - 2z at z = 2i
//! let v = h_eval(idx, z, BasisForm::LaguerreForm);
//! assert!((v - Complex64::new(0.0, 4.0)).norm() < 1e-12);
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::orthopoly::{factorial, hyp1f1, laguerre_recurrence, log_factorial, PolyIndex};
use crate::sum::CompensatedSum;
use twofloat::TwoFloat;

/// Cap on both basis indices for the floating-point forms.
pub const BASIS_CAP: usize = 64;

/// Index pair of `h_{m,p}`; `m` is the power of `z` in the leading term and
/// `p` the power of `z̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub m: usize,
    pub p: usize,
}

impl BasisIndex {
    pub fn new(m: usize, p: usize) -> Result<Self> {
        for index in [m, p] {
            if index > BASIS_CAP {
                return Err(Error::IndexOverCap {
                    index,
                    cap: BASIS_CAP,
                });
            }
        }
        Ok(Self { m, p })
    }

    /// The `k`-th basis element of the level-`level` space, `h_{k,level}`.
    pub fn in_level(level: usize, k: usize) -> Result<Self> {
        Self::new(k, level)
    }

    /// Landau level, i.e. the eigenvalue of `Δ̃` on `h_{m,p}`.
    pub fn level(self) -> usize {
        self.p
    }
}

/// Which of the three equivalent closed forms to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisForm {
    /// Finite double-monomial sum.
    FiniteSum,
    /// `(-1)^k k! |z|^{|m-p|} e^{i(m-p)θ} L_k^{(|m-p|)}(|z|²)`, `k = min(m, p)`.
    LaguerreForm,
    /// `γ_{m,p} ₁F₁(-k; |m-p|+1; |z|²) |z|^{|m-p|} e^{i(m-p)θ}`.
    Hyp1F1Form,
}

impl BasisForm {
    pub const ALL: [BasisForm; 3] = [Self::FiniteSum, Self::LaguerreForm, Self::Hyp1F1Form];
}

/// Evaluates `h_{m,p}(z)` in the requested form.
pub fn h_eval(idx: BasisIndex, z: Complex64, form: BasisForm) -> Complex64 {
    match form {
        BasisForm::FiniteSum => finite_sum(idx, z),
        BasisForm::LaguerreForm => laguerre_form(idx, z),
        BasisForm::Hyp1F1Form => hyp1f1_form(idx, z),
    }
}

/// `e^{i n arg z}`, taken as 1 at the origin.
fn phase(z: Complex64, n: i64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, n as f64 * z.arg())
}

fn split(idx: BasisIndex) -> (usize, usize, i64) {
    let k = idx.m.min(idx.p);
    let d = idx.m.abs_diff(idx.p);
    (k, d, idx.m as i64 - idx.p as i64)
}

fn finite_sum(idx: BasisIndex, z: Complex64) -> Complex64 {
    let (k, _, _) = split(idx);
    let (m, p) = (idx.m, idx.p);
    let t = z.norm_sqr();
    // Σ_j (-1)^j c_j z^{m-j} z̄^{p-j} = z^{m-k} z̄^{p-k} Σ_j (-1)^j c_j t^{k-j}
    //
    // The inner sum alternates and cancels heavily once t is comparable to k,
    // so it is carried in double-double: c_j by the exact ratio
    // c_{j+1} = c_j (m-j)(p-j)/(j+1), then Horner from the t^k end.
    let mut coeffs = Vec::with_capacity(k + 1);
    let mut c = TwoFloat::from(1.0);
    for j in 0..=k {
        coeffs.push(if j % 2 == 0 { c } else { -c });
        c = c * ((m - j) as f64 * (p - j) as f64) / (j + 1) as f64;
    }
    let inner = coeffs
        .iter()
        .fold(TwoFloat::from(0.0), |acc, &cj| acc * t + cj);
    z.powu((m - k) as u32) * z.conj().powu((p - k) as u32) * f64::from(inner)
}

fn laguerre_form(idx: BasisIndex, z: Complex64) -> Complex64 {
    let (k, d, signed) = split(idx);
    let r = z.norm();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let lag = laguerre_recurrence(k, d as f64, r * r);
    phase(z, signed) * (sign * factorial(k) * r.powi(d as i32) * lag)
}

fn hyp1f1_form(idx: BasisIndex, z: Complex64) -> Complex64 {
    let (k, d, signed) = split(idx);
    let r = z.norm();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    // max! / |m-p|!
    let gamma = sign
        * (d + 1..=idx.m.max(idx.p))
            .map(|j| j as f64)
            .product::<f64>();
    // b = d + 1 ≥ 1 and a = -k terminates, so this cannot fail
    let f = hyp1f1(-(k as f64), d as f64 + 1.0, r * r).expect("terminating series");
    phase(z, signed) * (gamma * f * r.powi(d as i32))
}

/// `h_{m,p}(z) · e^{shift} / √(m! p!)`, with all magnitudes combined in log
/// space. Not capped; used for long series.
pub(crate) fn scaled_normalized_h(m: usize, p: usize, z: Complex64, log_shift: f64) -> Complex64 {
    let k = m.min(p);
    let d = m.abs_diff(p);
    let r = z.norm();
    let t = r * r;
    let lag = laguerre_recurrence(k, d as f64, t);
    if lag == 0.0 || (d > 0 && r == 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let radial = if d == 0 { 0.0 } else { d as f64 * r.ln() };
    let log_mag =
        log_factorial(k) - 0.5 * (log_factorial(m) + log_factorial(p)) + radial + log_shift;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    phase(z, m as i64 - p as i64) * (sign * lag * log_mag.exp())
}

/// `h_{m,p}(z) / √(m! p!)`: the orthonormal version of the basis under `dμ`.
pub fn normalized_basis(idx: BasisIndex, z: Complex64) -> Complex64 {
    scaled_normalized_h(idx.m, idx.p, z, 0.0)
}

/// `‖h_{m,p}‖²_μ = m! p!`.
pub fn basis_norm_sq(idx: BasisIndex) -> f64 {
    factorial(idx.m) * factorial(idx.p)
}

/// Value of a reproducing kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue(pub Complex64);

impl KernelValue {
    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// `K_m(z, w) = e^{z w̄} L_m^{(0)}(|z - w|²)`.
pub fn kernel(m: PolyIndex, z: Complex64, w: Complex64) -> KernelValue {
    let lag = laguerre_recurrence(m.get(), 0.0, (z - w).norm_sqr());
    KernelValue((z * w.conj()).exp() * lag)
}

/// `ω_m(z) = K_m(z, z) = e^{|z|²}`, independent of `m`.
pub fn weight(_m: PolyIndex, z: Complex64) -> f64 {
    z.norm_sqr().exp()
}

/// Partial sum `Σ_{k < terms} h_{k,m}(z) conj(h_{k,m}(w)) / (m! k!)` of the
/// kernel's basis expansion.
pub fn kernel_series(m: PolyIndex, z: Complex64, w: Complex64, terms: usize) -> Result<Complex64> {
    if terms == 0 {
        return Err(Error::InvalidParameter("terms must be at least 1".into()));
    }
    let level = m.get();
    let mut acc = CompensatedSum::new();
    for k in 0..terms {
        let a = scaled_normalized_h(k, level, z, 0.0);
        let b = scaled_normalized_h(k, level, w, 0.0);
        acc.add(a * b.conj());
    }
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn idx(m: usize, p: usize) -> BasisIndex {
        BasisIndex::new(m, p).unwrap()
    }

    fn lvl(m: usize) -> PolyIndex {
        PolyIndex::new(m).unwrap()
    }

    #[test]
    fn h_examples() {
        let z = c(0.7, -1.3);
        assert!((h_eval(idx(4, 0), z, BasisForm::FiniteSum) - z.powu(4)).norm() < 1e-13);
        for form in BasisForm::ALL {
            assert!(
                h_eval(idx(1, 1), c(1.0, 0.0), form).norm() < 1e-15,
                "{form:?}"
            );
        }
        let a = h_eval(idx(2, 1), c(0.0, 2.0), BasisForm::FiniteSum);
        let b = h_eval(idx(2, 1), c(0.0, 2.0), BasisForm::LaguerreForm);
        assert!((a - c(0.0, 4.0)).norm() < 1e-12);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn zero_argument() {
        // only the diagonal survives at the origin: h_{m,m}(0) = (-1)^m m!
        for m in 0..6 {
            for p in 0..6 {
                for form in BasisForm::ALL {
                    let v = h_eval(idx(m, p), c(0.0, 0.0), form);
                    let expected = if m == p {
                        (if m % 2 == 0 { 1.0 } else { -1.0 }) * factorial(m)
                    } else {
                        0.0
                    };
                    assert_eq!(v, c(expected, 0.0), "{m} {p} {form:?}");
                }
            }
        }
    }

    #[test]
    fn index_cap() {
        assert!(BasisIndex::new(BASIS_CAP, 0).is_ok());
        assert!(BasisIndex::new(0, BASIS_CAP + 1).is_err());
        assert_eq!(BasisIndex::in_level(3, 5).unwrap(), idx(5, 3));
        assert_eq!(idx(5, 3).level(), 3);
    }

    #[test]
    fn norms() {
        assert_eq!(basis_norm_sq(idx(0, 0)), 1.0);
        assert_eq!(basis_norm_sq(idx(1, 1)), 1.0);
        assert_eq!(basis_norm_sq(idx(3, 2)), 12.0);
    }

    #[test]
    fn normalized_matches_division() {
        let z = c(-0.4, 1.7);
        for m in 0..10 {
            for p in 0..10 {
                let h =
                    h_eval(idx(m, p), z, BasisForm::LaguerreForm) / basis_norm_sq(idx(m, p)).sqrt();
                let n = normalized_basis(idx(m, p), z);
                assert!((h - n).norm() <= 1e-13 * h.norm().max(1e-3), "{m} {p}");
            }
        }
        assert_eq!(normalized_basis(idx(3, 0), c(0.0, 0.0)), c(0.0, 0.0));
        assert_relative_eq!(
            normalized_basis(idx(2, 2), c(0.0, 0.0)).re,
            1.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn kernel_examples() {
        let z = c(0.3, -0.8);
        let w = c(-1.1, 0.4);
        assert!((kernel(lvl(0), z, w).value() - (z * w.conj()).exp()).norm() < 1e-15);
        for m in [0, 2, 5] {
            assert_relative_eq!(
                kernel(lvl(m), z, z).value().re,
                z.norm_sqr().exp(),
                max_relative = 1e-15
            );
            assert_eq!(kernel(lvl(m), z, z).value().im, 0.0);
        }
        assert_eq!(
            kernel(lvl(1), c(1.0, 0.0), c(0.0, 0.0)).value(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(lvl(3), c(0.0, 0.0)), 1.0);
        assert_relative_eq!(
            weight(lvl(5), c(0.6, 0.8)),
            std::f64::consts::E,
            max_relative = 1e-15
        );
        let z = c(1.2, -0.1);
        assert_relative_eq!(
            weight(lvl(4), z),
            kernel(lvl(4), z, z).value().re,
            max_relative = 1e-15
        );
    }

    #[test]
    fn kernel_series_examples() {
        let z = c(0.5, 0.2);
        let w = c(-0.3, 0.6);
        let s = kernel_series(lvl(0), z, w, 40).unwrap();
        assert!((s - (z * w.conj()).exp()).norm() < 1e-14);
        let s = kernel_series(lvl(1), c(0.5, 0.0), c(0.3, 0.0), 60).unwrap();
        assert!((s - kernel(lvl(1), c(0.5, 0.0), c(0.3, 0.0)).value()).norm() < 1e-10);
        assert!(kernel_series(lvl(1), z, w, 0).is_err());
    }
}
