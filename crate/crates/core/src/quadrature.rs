//! Gauss–Hermite rules on the line and Gauss–Laguerre × trapezoid rules on
//! the plane.
//!
//! Planar integrals are always taken against the Gaussian probability
//! measure `dμ = π⁻¹ e^{-|z|²} dλ`. Writing `z = √t e^{iθ}` turns this into
//! `(2π)⁻¹ e^{-t} dt dθ`, so the radial factor is an order-zero Gauss–Laguerre
//! rule in `t` and the angular factor is a uniform trapezoid rule. For
//! integrands of the form `z^a z̄^b`, both parts are exact.
//!
//! ```
//! use polyfock::quadrature::{gauss_hermite, line_inner};
//! use polyfock::orthopoly::{hermite_function, PolyIndex};
//! use num_complex::Complex64;
//!
//! let rule = gauss_hermite(32).unwrap();
//! let psi = |p: usize| move |x: f64| Complex64::from(hermite_function(PolyIndex::new(p).unwrap(), x));
//! let norm = line_inner(psi(3), psi(3), &rule).unwrap();
//! assert!((norm.re - 1.0).abs() < 1e-12);
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

pub const MAX_HERMITE_NODES: usize = 256;
pub const MAX_LAGUERRE_NODES: usize = 128;

pub const DEFAULT_LINE_ORDER: usize = 64;
pub const DEFAULT_RADIAL_ORDER: usize = 80;

const NEWTON_MAX_ITERATIONS: usize = 100;
const NEWTON_TOLERANCE: f64 = 3e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// `∫_ℝ f(ξ) e^{-ξ²} dξ`
    GaussHermite,
    /// `∫_0^∞ f(t) e^{-t} dt`
    GaussLaguerre,
}

/// Immutable node/weight table, nodes strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: WeightKind,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Distance between the outermost nodes.
    pub fn span(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }

    /// `Σ w_i f(x_i)`, i.e. the integral of `f` against the rule's weight.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(Complex64::from(w * f(x)));
        }
        acc.total().re
    }
}

/// `n`-point Gauss–Hermite rule for the weight `e^{-ξ²}`.
///
/// Starting points are the eigenvalues of the Jacobi matrix (Golub–Welsch);
/// each is then polished by Newton iteration on the orthonormal Hermite
/// recurrence, and the weight comes from the derivative at the polished root.
/// The orthonormal recurrence keeps every value in range for `n ≤ 256`.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_HERMITE_NODES {
        return Err(Error::InvalidRuleSize {
            n,
            max: MAX_HERMITE_NODES,
        });
    }
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let guesses = jacobi_eigenvalues(&vec![0.0; n], &off);
    let half = n.div_ceil(2);
    // polish the non-negative half and mirror it, so the rule is exactly symmetric
    let mut upper = Vec::with_capacity(half);
    for &g in &guesses[n / 2..] {
        let (root, deriv) = if n % 2 == 1 && upper.is_empty() {
            (0.0, orthonormal_hermite_with_derivative(n, 0.0).1)
        } else {
            polish(n, g, |x| orthonormal_hermite_with_derivative(n, x))?
        };
        upper.push((root, 2.0 / (deriv * deriv)));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &(x, w) in upper.iter().rev().take(n / 2) {
        nodes.push(-x);
        weights.push(w);
    }
    for &(x, w) in &upper {
        nodes.push(x);
        weights.push(w);
    }
    check_rule(&nodes, &weights, n)?;
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: WeightKind::GaussHermite,
    })
}

/// Newton iteration from `start`; `eval` returns `(p(x), p'(x))`. Returns the
/// root and the derivative there.
fn polish<F: Fn(f64) -> (f64, f64)>(n: usize, start: f64, eval: F) -> Result<(f64, f64)> {
    let mut x = start;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (value, deriv) = eval(x);
        let step = value / deriv;
        if !step.is_finite() {
            return Err(Error::QuadratureNotConverged { n });
        }
        x -= step;
        if step.abs() <= NEWTON_TOLERANCE * x.abs() {
            // one more step to settle the last bits
            let (value, deriv) = eval(x);
            x -= value / deriv;
            return Ok((x, eval(x).1));
        }
    }
    // Rounding noise in p(x) can keep the last step just above tolerance.
    // The eigenvalue start is already accurate, so accept a root that has not
    // moved appreciably from it.
    if (x - start).abs() <= 1e-10 * start.abs().max(1.0) {
        Ok((x, eval(x).1))
    } else {
        Err(Error::QuadratureNotConverged { n })
    }
}

/// Eigenvalues, ascending, of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal.
fn jacobi_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    for (i, &b) in off.iter().enumerate() {
        m[(i, i + 1)] = b;
        m[(i + 1, i)] = b;
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Returns `(p_n(x), √(2n) p_{n-1}(x))` for the orthonormal Hermite polynomials
/// `p_k = (√π 2^k k!)^{-1/2} H_k`; the second entry is `p_n'(x)`.
fn orthonormal_hermite_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut cur = PI.powf(-0.25);
    let mut prev = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, (2.0 * n as f64).sqrt() * prev)
}

/// `n`-point Gauss–Laguerre rule for the weight `e^{-t}` on `[0, ∞)`.
pub fn gauss_laguerre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_LAGUERRE_NODES {
        return Err(Error::InvalidRuleSize {
            n,
            max: MAX_LAGUERRE_NODES,
        });
    }
    let nf = n as f64;
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for g in jacobi_eigenvalues(&diag, &off) {
        let (t, _) = polish(n, g, |t| {
            let (value, lower) = laguerre_pair(n, t);
            (value, nf * (value - lower) / t)
        })?;
        nodes.push(t);
        weights.push(1.0 / christoffel_sum(n, t));
    }
    check_rule(&nodes, &weights, n)?;
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: WeightKind::GaussLaguerre,
    })
}

/// `Σ_{k<n} L_k(t)²`. The order-zero Laguerre polynomials are orthonormal for
/// `e^{-t}`, so the reciprocal is the Christoffel weight at a root of `L_n`.
/// Unlike `t / (n L_{n-1}(t))²` it is insensitive to the last bits of the root.
fn christoffel_sum(n: usize, t: f64) -> f64 {
    let mut cur = 1.0;
    let mut prev = 0.0;
    let mut acc = crate::sum::Neumaier::default();
    for j in 0..n {
        acc.add(cur * cur);
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - t) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    acc.total()
}

/// `(L_n(t), L_{n-1}(t))` for order zero.
fn laguerre_pair(n: usize, t: f64) -> (f64, f64) {
    let mut cur = 1.0;
    let mut prev = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - t) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn check_rule(nodes: &[f64], weights: &[f64], n: usize) -> Result<()> {
    let increasing = nodes.windows(2).all(|w| w[0] < w[1]);
    let positive = weights.iter().all(|&w| w > 0.0 && w.is_finite());
    if increasing && positive && nodes.len() == n {
        Ok(())
    } else {
        Err(Error::QuadratureNotConverged { n })
    }
}

/// `⟨f, g⟩ = ∫ f(ξ) conj(g(ξ)) dξ` for functions that carry their own Gaussian
/// decay.
///
/// The rule's `e^{-ξ²}` weight is compensated by multiplying each node product
/// by `e^{+ξ²}`, so callers pass the physical functions unmodified.
pub fn line_inner<F, G>(f: F, g: G, rule: &QuadratureRule) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    require_kind(rule, WeightKind::GaussHermite)?;
    let mut acc = CompensatedSum::new();
    for (i, (&x, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(x) * g(x).conj() * (w * (x * x).exp());
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: i });
        }
        acc.add(v);
    }
    Ok(acc.total())
}

fn require_kind(rule: &QuadratureRule, kind: WeightKind) -> Result<()> {
    if rule.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "expected a {kind:?} rule, got {:?}",
            rule.kind
        )))
    }
}

/// Product rule for `∫_ℂ F dμ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarRule {
    radial: QuadratureRule,
    angular_count: usize,
}

impl PlanarRule {
    pub fn new(radial_order: usize, angular_count: usize) -> Result<Self> {
        if angular_count == 0 {
            return Err(Error::InvalidParameter(
                "angular_count must be positive".into(),
            ));
        }
        Ok(Self {
            radial: gauss_laguerre(radial_order)?,
            angular_count,
        })
    }

    /// Default orders for products of basis functions of index at most
    /// `max_index`: 80 radial nodes and `4·max_index + 8` angles.
    pub fn for_max_index(max_index: usize) -> Result<Self> {
        Self::new(DEFAULT_RADIAL_ORDER, 4 * max_index + 8)
    }

    pub fn radial(&self) -> &QuadratureRule {
        &self.radial
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.angular_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(z, weight)` pairs, radial index outer, angular index inner. The
    /// weights sum to one.
    pub fn nodes(&self) -> Vec<(Complex64, f64)> {
        let l = self.angular_count as f64;
        let angles: Vec<Complex64> = (0..self.angular_count)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / l))
            .collect();
        let mut out = Vec::with_capacity(self.len());
        for (&t, &w) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let r = t.sqrt();
            for &e in &angles {
                out.push((e * r, w / l));
            }
        }
        out
    }

    /// `∫ F dμ`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Complex64> {
        let mut acc = CompensatedSum::new();
        for (i, (z, w)) in self.nodes().into_iter().enumerate() {
            let v = f(z) * w;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc.add(v);
        }
        Ok(acc.total())
    }
}

/// `⟨F, G⟩_μ = ∫ F(z) conj(G(z)) dμ(z)`.
pub fn planar_inner<F, G>(f: F, g: G, rule: &PlanarRule) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    rule.integrate(|z| f(z) * g(z).conj())
}

/// Same as [`planar_inner`] for values already tabulated on
/// [`PlanarRule::nodes`].
pub fn planar_inner_tabulated(
    f: &[Complex64],
    g: &[Complex64],
    rule: &PlanarRule,
) -> Result<Complex64> {
    if f.len() != rule.len() || g.len() != rule.len() {
        return Err(Error::InvalidParameter(format!(
            "tabulated values have lengths {} and {}, rule has {} nodes",
            f.len(),
            g.len(),
            rule.len()
        )));
    }
    let l = rule.angular_count;
    let mut acc = CompensatedSum::new();
    for (k, &w) in rule.radial.weights.iter().enumerate() {
        let w = w / l as f64;
        for j in 0..l {
            let i = k * l + j;
            let v = f[i] * g[i].conj() * w;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc.add(v);
        }
    }
    Ok(acc.total())
}
