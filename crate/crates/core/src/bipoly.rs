//! Exact polynomials in the formal variables `z` and `z̄`.
//!
//! Coefficients are arbitrary-precision rationals, so the action of the
//! Landau operator `Δ̃ = -∂²/∂z∂z̄ + z̄ ∂/∂z̄` and the eigenvalue test built on
//! it are exact: a polynomial either is an eigenvector or it is not.
//!
//! ```
//! use polyfock::bipoly::{ito_polynomial, BiPolynomial};
//! use num_rational::BigRational;
//!
//! let h = ito_polynomial(2, 1).unwrap();
//! assert_eq!(h.to_string(), "z^2 zbar - 2 z");
//!
//! let report = h.eigencheck().unwrap();
//! assert!(report.is_eigenvector);
//! assert_eq!(report.eigenvalue, BigRational::from_integer(1.into()));
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Cap on `m`, `p` for [`ito_polynomial`]; bounds coefficient growth.
pub const ITO_CAP: usize = 64;

/// Exponent pair `(a, b)` of the monomial `z^a z̄^b`.
pub type Exponents = (u32, u32);

/// Sparse polynomial `Σ c_{ab} z^a z̄^b` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BiPolynomial {
    terms: BTreeMap<Exponents, BigRational>,
}

/// Outcome of testing `Δ̃p = λp`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub is_eigenvector: bool,
    /// Only meaningful when `is_eigenvector` holds.
    pub eigenvalue: BigRational,
    /// `Δ̃p - λp` for the candidate `λ`; zero exactly when `is_eigenvector`.
    pub residual: BiPolynomial,
}

impl BiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0, 0)
    }

    /// `c · z^a z̄^b`.
    pub fn monomial(coeff: BigRational, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((a, b), coeff);
        p
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    /// The polynomial `z̄`.
    pub fn zbar() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    /// Builds from `(a, b, coefficient)` triples, merging repeated exponents.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, BigRational)>,
    {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term((a, b), c);
        }
        p
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_int_terms(terms: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(a, b, c)| (a, b, BigRational::from_integer(BigInt::from(c)))),
        )
    }

    fn add_term(&mut self, exps: Exponents, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending `(a, b)` order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &BigRational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coefficient(&self, a: u32, b: u32) -> BigRational {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest `a + b` over stored terms, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// Formal complex conjugation: swaps the roles of `z` and `z̄`.
    /// Coefficients are real, so they are left alone.
    pub fn conjugate(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((b, a), c.clone()))
                .collect(),
        }
    }

    /// Wirtinger derivative `∂/∂z`.
    pub fn d_dz(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), c)| (a - 1, b, c * BigRational::from_integer(BigInt::from(a)))),
        )
    }

    /// Wirtinger derivative `∂/∂z̄`.
    pub fn d_dzbar(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| (a, b - 1, c * BigRational::from_integer(BigInt::from(b)))),
        )
    }

    /// `Δ̃p = -∂²p/∂z∂z̄ + z̄ ∂p/∂z̄`.
    pub fn landau_apply(&self) -> Self {
        let dbar = self.d_dzbar();
        &(&Self::zbar() * &dbar) - &dbar.d_dz()
    }

    /// Decides exactly whether `Δ̃p = λp` for some rational `λ`.
    ///
    /// The candidate `λ` is read off the leading term (in `(a, b)` order); the
    /// verdict then comes from the full residual.
    pub fn eigencheck(&self) -> Result<EigenReport> {
        let (&lead_exps, lead) = self.terms.iter().next_back().ok_or(Error::ZeroPolynomial)?;
        let image = self.landau_apply();
        let eigenvalue = image.coefficient(lead_exps.0, lead_exps.1) / lead;
        let residual = &image - &self.scale(&eigenvalue);
        Ok(EigenReport {
            is_eigenvector: residual.is_zero(),
            eigenvalue,
            residual,
        })
    }

    /// Evaluates at `z`, substituting `z̄ = conj(z)`.
    ///
    /// Horner in `z̄` over coefficient polynomials that are themselves Horner
    /// in `z`. Coefficients are rounded to the nearest double first.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let Some(max_b) = self.terms.keys().map(|&(_, b)| b).max() else {
            return Complex64::new(0.0, 0.0);
        };
        let zbar = z.conj();
        let mut by_b: Vec<Vec<(u32, f64)>> = vec![Vec::new(); max_b as usize + 1];
        for (&(a, b), c) in &self.terms {
            by_b[b as usize].push((a, rational_to_f64(c)));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for row in by_b.iter().rev() {
            acc = acc * zbar + horner_in_z(row, z);
        }
        acc
    }
}

fn horner_in_z(row: &[(u32, f64)], z: Complex64) -> Complex64 {
    let Some(&(max_a, _)) = row.last() else {
        return Complex64::new(0.0, 0.0);
    };
    let mut dense = vec![0.0; max_a as usize + 1];
    for &(a, c) in row {
        dense[a as usize] = c;
    }
    dense
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn factorial_big(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Complex Hermite (Itô) polynomial
/// `h_{m,p} = Σ_{j ≤ min(m,p)} (-1)^j m! p! / (j! (m-j)! (p-j)!) z^{m-j} z̄^{p-j}`.
///
/// Its Landau eigenvalue is `p`, the second index.
pub fn ito_polynomial(m: usize, p: usize) -> Result<BiPolynomial> {
    for index in [m, p] {
        if index > ITO_CAP {
            return Err(Error::IndexOverCap {
                index,
                cap: ITO_CAP,
            });
        }
    }
    let numer = factorial_big(m) * factorial_big(p);
    let terms = (0..=m.min(p)).map(|j| {
        let denom = factorial_big(j) * factorial_big(m - j) * factorial_big(p - j);
        let mut c = &numer / denom;
        if j % 2 == 1 {
            c = -c;
        }
        ((m - j) as u32, (p - j) as u32, BigRational::from_integer(c))
    });
    Ok(BiPolynomial::from_terms(terms))
}

impl Add for &BiPolynomial {
    type Output = BiPolynomial;

    fn add(self, rhs: &BiPolynomial) -> BiPolynomial {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &BiPolynomial {
    type Output = BiPolynomial;

    fn sub(self, rhs: &BiPolynomial) -> BiPolynomial {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &BiPolynomial {
    type Output = BiPolynomial;

    fn mul(self, rhs: &BiPolynomial) -> BiPolynomial {
        let mut out = BiPolynomial::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BiPolynomial {
    type Output = BiPolynomial;

    fn neg(self) -> BiPolynomial {
        BiPolynomial {
            terms: self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for BiPolynomial {
            type Output = BiPolynomial;

            fn $method(self, rhs: BiPolynomial) -> BiPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl fmt::Display for BiPolynomial {
    /// Highest-order terms first, e.g. `z^2 zbar - 2 z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                factors.push(mag.to_string());
            }
            match a {
                0 => {}
                1 => factors.push("z".to_owned()),
                _ => factors.push(format!("z^{a}")),
            }
            match b {
                0 => {}
                1 => factors.push("zbar".to_owned()),
                _ => factors.push(format!("zbar^{b}")),
            }
            f.write_str(&factors.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(c: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(c))
    }

    #[test]
    fn ito_examples() {
        assert_eq!(
            ito_polynomial(3, 0).unwrap(),
            BiPolynomial::from_int_terms(&[(3, 0, 1)])
        );
        assert_eq!(
            ito_polynomial(1, 1).unwrap(),
            BiPolynomial::from_int_terms(&[(1, 1, 1), (0, 0, -1)])
        );
        assert_eq!(
            ito_polynomial(2, 1).unwrap(),
            BiPolynomial::from_int_terms(&[(2, 1, 1), (1, 0, -2)])
        );
        assert!(ito_polynomial(ITO_CAP + 1, 0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let z2zb = BiPolynomial::from_int_terms(&[(2, 1, 1)]);
        assert_eq!(z2zb.d_dz(), BiPolynomial::from_int_terms(&[(1, 1, 2)]));
        assert!(BiPolynomial::from_int_terms(&[(2, 0, 1)])
            .d_dzbar()
            .is_zero());
        let h11 = BiPolynomial::from_int_terms(&[(1, 1, 1), (0, 0, -1)]);
        assert_eq!(h11.d_dzbar(), BiPolynomial::z());
    }

    #[test]
    fn landau_examples() {
        for m in 0..6 {
            assert!(BiPolynomial::from_int_terms(&[(m, 0, 1)])
                .landau_apply()
                .is_zero());
        }
        let h11 = ito_polynomial(1, 1).unwrap();
        assert_eq!(h11.landau_apply(), h11);
        let h21 = ito_polynomial(2, 1).unwrap();
        assert_eq!(h21.landau_apply(), h21);
    }

    #[test]
    fn eigencheck_examples() {
        for m in 0..=10 {
            let r = ito_polynomial(m, 0).unwrap().eigencheck().unwrap();
            assert!(r.is_eigenvector);
            assert!(r.eigenvalue.is_zero());
        }
        let p = BiPolynomial::from_int_terms(&[(1, 0, 1), (0, 2, 1)]);
        let r = p.eigencheck().unwrap();
        assert!(!r.is_eigenvector);
        assert!(!r.residual.is_zero());
        assert_eq!(p.landau_apply(), BiPolynomial::from_int_terms(&[(0, 2, 2)]));
        assert_eq!(
            BiPolynomial::zero().eigencheck(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn eigencheck_reports_second_index() {
        for m in 0..=6 {
            for p in 0..=6 {
                let r = ito_polynomial(m, p).unwrap().eigencheck().unwrap();
                assert!(r.is_eigenvector && r.residual.is_zero());
                assert_eq!(r.eigenvalue, int(p as i64));
            }
        }
    }

    #[test]
    fn eval_examples() {
        let h11 = ito_polynomial(1, 1).unwrap();
        assert_eq!(
            h11.eval(Complex64::new(0.0, 0.0)),
            Complex64::new(-1.0, 0.0)
        );
        let z3 = ito_polynomial(3, 0).unwrap();
        assert_eq!(z3.eval(Complex64::new(1.0, 1.0)), Complex64::new(-2.0, 2.0));
        assert_eq!(
            BiPolynomial::zero().eval(Complex64::new(3.0, 1.0)),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn display() {
        assert_eq!(BiPolynomial::zero().to_string(), "0");
        assert_eq!(ito_polynomial(1, 1).unwrap().to_string(), "z zbar - 1");
        let p =
            BiPolynomial::from_terms([(0, 2, BigRational::new(BigInt::from(-3), BigInt::from(2)))]);
        assert_eq!(p.to_string(), "-3/2 zbar^2");
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = ito_polynomial(2, 2).unwrap();
        assert!((&p - &p).is_zero());
        assert_eq!((&p - &p).term_count(), 0);
    }
}
