//! The extended Bargmann transforms `B_m : L²(ℝ) → A_m`.
//!
//! With `z = a + ib`,
//!
//! ```text
//! B_m[f](z) = (-1)^m (2^m m! √π)^{-1/2} ∫ f(ξ) e^{-ξ²/2 + √2 ξ z - z²/2} H_m(ξ - √2 a) dξ
//!           = (-1)^m e^{|z|²/2} ∫ f(ξ) ψ_m(ξ - √2 a) e^{i(√2 ξ b - ab)} dξ,
//! ```
//!
//! and the second line is what [`forward`] evaluates by Gauss–Hermite
//! quadrature. It maps `ψ_q` to the normalized basis function
//! `h_{q,m} / √(m! q!)` of the level-`m` space.
//!
//! ```
//! use num_complex::Complex64;
//! use polyfock::transform::{forward, AnalyticSignal, TransformConfig};
//!
//! let cfg = TransformConfig::new(0).unwrap();
//! let psi1: AnalyticSignal = "hermite:1".parse().unwrap();
//! let z = Complex64::new(0.3, -0.4);
//! let v = forward(&psi1, &cfg, z).unwrap();
//! assert!((v.value - z).norm() < 1e-12);
//! ```

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherent::{theta_closed, theta_series, CoherentLabel, SeriesControl};
use crate::error::{Error, Result};
use crate::fockbasis::{normalized_basis, BasisIndex};
use crate::orthopoly::{hermite_function, hermite_functions, PolyIndex};
use crate::quadrature::{
    gauss_hermite, line_inner, planar_inner_tabulated, PlanarRule, QuadratureRule,
    DEFAULT_LINE_ORDER, MAX_HERMITE_NODES,
};
use crate::sum::CompensatedSum;

/// Smallest Gauss–Hermite order accepted by [`TransformConfig`].
pub const MIN_LINE_ORDER: usize = 32;

/// Something that can be evaluated on the real line.
pub trait Signal: Sync {
    fn eval(&self, xi: f64) -> Complex64;

    /// `true` when values between samples are interpolated rather than exact.
    fn is_interpolated(&self) -> bool {
        false
    }
}

impl<F> Signal for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, xi: f64) -> Complex64 {
        self(xi)
    }
}

/// Named test signals that are evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticSignal {
    /// `(ψ_{q_1} + … + ψ_{q_k}) / √k` for distinct indices.
    Hermite(Vec<usize>),
    /// L²-normalized Gaussian `(πσ²)^{-1/4} e^{-(ξ-μ)²/(2σ²)}`.
    Gaussian { mu: f64, sigma: f64 },
}

impl AnalyticSignal {
    pub fn hermite(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSignal("no Hermite indices given".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSignal(
                "Hermite indices must be distinct".into(),
            ));
        }
        for &q in &indices {
            PolyIndex::new(q)?;
        }
        Ok(Self::Hermite(indices))
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "gaussian needs finite mu and positive sigma, got {mu}, {sigma}"
            )));
        }
        Ok(Self::Gaussian { mu, sigma })
    }
}

impl Signal for AnalyticSignal {
    fn eval(&self, xi: f64) -> Complex64 {
        match self {
            Self::Hermite(qs) => {
                let s: f64 = qs
                    .iter()
                    .map(|&q| hermite_function(PolyIndex::new(q).unwrap(), xi))
                    .sum();
                Complex64::new(s / (qs.len() as f64).sqrt(), 0.0)
            }
            Self::Gaussian { mu, sigma } => {
                let u = (xi - mu) / sigma;
                Complex64::new((PI * sigma * sigma).powf(-0.25) * (-0.5 * u * u).exp(), 0.0)
            }
        }
    }
}

/// Parses `hermite:q`, `hermite:q1,q2,…` and `gaussian:mu,sigma`.
impl FromStr for AnalyticSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidSignal(format!("{s:?}: {why}"));
        let (name, args) = s.split_once(':').ok_or_else(|| bad("expected name:args"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        match name.trim() {
            "hermite" => {
                let qs = args
                    .iter()
                    .map(|a| {
                        a.parse::<usize>()
                            .map_err(|_| bad("indices must be integers"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::hermite(qs)
            }
            "gaussian" => {
                let [mu, sigma] = args[..] else {
                    return Err(bad("gaussian takes mu,sigma"));
                };
                let mu = mu.parse().map_err(|_| bad("mu is not a number"))?;
                let sigma = sigma.parse().map_err(|_| bad("sigma is not a number"))?;
                Self::gaussian(mu, sigma)
            }
            _ => Err(bad("unknown signal name")),
        }
    }
}

/// Samples `(ξ_k, f_k)` on a strictly increasing grid.
///
/// Between samples the signal is the Floater–Hormann rational interpolant of
/// blending degree `min(3, n-1)`; outside `[ξ_0, ξ_{n-1}]` it is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSignal {
    xs: Vec<f64>,
    values: Vec<Complex64>,
    weights: Vec<f64>,
}

impl SampledSignal {
    pub fn new(xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{} abscissae but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidSignal("need at least two samples".into()));
        }
        if xs.iter().any(|x| !x.is_finite())
            || values
                .iter()
                .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidSignal("samples must be finite".into()));
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSignal(format!(
                "abscissae must increase strictly (row {})",
                i + 2
            )));
        }
        let weights = floater_hormann_weights(&xs, 3.min(xs.len() - 1));
        Ok(Self {
            xs,
            values,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn floater_hormann_weights(xs: &[f64], d: usize) -> Vec<f64> {
    let n = xs.len() - 1;
    (0..=n)
        .map(|k| {
            let lo = k.saturating_sub(d);
            let hi = k.min(n - d);
            let sign = if (k + d) % 2 == 0 { 1.0 } else { -1.0 };
            let magnitude: f64 = (lo..=hi)
                .map(|i| {
                    (i..=i + d)
                        .filter(|&j| j != k)
                        .map(|j| 1.0 / (xs[k] - xs[j]).abs())
                        .product::<f64>()
                })
                .sum();
            sign * magnitude
        })
        .collect()
}

impl Signal for SampledSignal {
    fn eval(&self, xi: f64) -> Complex64 {
        let (first, last) = (self.xs[0], self.xs[self.xs.len() - 1]);
        if !(first..=last).contains(&xi) {
            return Complex64::new(0.0, 0.0);
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for ((&x, &v), &w) in self.xs.iter().zip(&self.values).zip(&self.weights) {
            if xi == x {
                return v;
            }
            let c = w / (xi - x);
            num += v * c;
            den += c;
        }
        num / den
    }

    fn is_interpolated(&self) -> bool {
        true
    }
}

/// Level and quadrature settings for [`forward`] and friends.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformConfig {
    m: PolyIndex,
    line_rule: QuadratureRule,
    series: SeriesControl,
}

impl TransformConfig {
    /// Level `m` with the default 64-node line rule.
    pub fn new(m: usize) -> Result<Self> {
        Self::with_line_order(m, DEFAULT_LINE_ORDER)
    }

    pub fn with_line_order(m: usize, line_order: usize) -> Result<Self> {
        if line_order < MIN_LINE_ORDER {
            return Err(Error::InvalidParameter(format!(
                "line rule order must be at least {MIN_LINE_ORDER}, got {line_order}"
            )));
        }
        Ok(Self {
            m: PolyIndex::new(m)?,
            line_rule: gauss_hermite(line_order)?,
            series: SeriesControl::default(),
        })
    }

    pub fn with_series(mut self, series: SeriesControl) -> Self {
        self.series = series;
        self
    }

    pub fn level(&self) -> usize {
        self.m.get()
    }

    pub fn line_rule(&self) -> &QuadratureRule {
        &self.line_rule
    }

    pub fn series(&self) -> SeriesControl {
        self.series
    }

    /// `|Re z|` beyond which [`forward`] flags its result.
    pub fn support_limit(&self) -> f64 {
        0.5 * self.line_rule.span()
    }

    /// A copy whose line rule is fine enough to evaluate the transform at
    /// every node of `planar`.
    ///
    /// At a node `z = a + ib` the integrand oscillates like `e^{i√2 b ξ}`, and
    /// errors in the line quadrature are amplified by `e^{|z|²/2}`. Products
    /// of two such values stay accurate under the planar weight only if the
    /// line order is at least the largest radial node `|z|²`, so the order is
    /// raised to that (capped at [`MAX_HERMITE_NODES`]).
    pub fn resolving(&self, planar: &PlanarRule) -> Result<Self> {
        let t_max = planar.radial().nodes().last().copied().unwrap_or(0.0);
        let needed = (t_max.ceil() as usize).min(MAX_HERMITE_NODES);
        if needed <= self.line_rule.len() {
            return Ok(self.clone());
        }
        Ok(Self {
            line_rule: gauss_hermite(needed)?,
            ..self.clone()
        })
    }
}

/// Reasons a transform value may be less accurate than the quadrature
/// normally delivers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransformWarning {
    /// `|Re z|` exceeds [`TransformConfig::support_limit`].
    OffSupport { re_z: f64, limit: f64 },
    /// The signal was interpolated from samples.
    Interpolated,
}

impl fmt::Display for TransformWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OffSupport { .. } => f.write_str("off-support"),
            Self::Interpolated => f.write_str("interpolated"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub warnings: Vec<TransformWarning>,
}

impl TransformValue {
    /// `ok`, or the warnings joined with `;`.
    pub fn status(&self) -> String {
        if self.warnings.is_empty() {
            "ok".to_string()
        } else {
            let parts: Vec<String> = self.warnings.iter().map(|w| w.to_string()).collect();
            parts.join(";")
        }
    }
}

/// Per-node factor `w_i e^{x_i²} (-1)^m ψ_m(x_i - √2 a) e^{i(√2 x_i b - ab)}`,
/// times `e^{|z|²/2}`.
fn kernel_row(cfg: &TransformConfig, z: Complex64) -> Vec<Complex64> {
    let (a, b) = (z.re, z.im);
    let sign = if cfg.m.get() % 2 == 0 { 1.0 } else { -1.0 };
    let lift = 0.5 * z.norm_sqr();
    let rule = &cfg.line_rule;
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let mag = sign * w * (x * x + lift).exp() * hermite_function(cfg.m, x - SQRT_2 * a);
            Complex64::from_polar(1.0, SQRT_2 * x * b - a * b) * mag
        })
        .collect()
}

fn warnings_for<S: Signal + ?Sized>(
    f: &S,
    cfg: &TransformConfig,
    z: Complex64,
) -> Vec<TransformWarning> {
    let mut out = Vec::new();
    let limit = cfg.support_limit();
    if z.re.abs() > limit {
        out.push(TransformWarning::OffSupport { re_z: z.re, limit });
    }
    if f.is_interpolated() {
        out.push(TransformWarning::Interpolated);
    }
    out
}

/// `B_m[f](z)` by Gauss–Hermite quadrature.
pub fn forward<S: Signal + ?Sized>(
    f: &S,
    cfg: &TransformConfig,
    z: Complex64,
) -> Result<TransformValue> {
    let mut acc = CompensatedSum::new();
    for (i, (&x, k)) in cfg
        .line_rule
        .nodes()
        .iter()
        .zip(kernel_row(cfg, z))
        .enumerate()
    {
        let v = f.eval(x) * k;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: i });
        }
        acc.add(v);
    }
    Ok(TransformValue {
        value: acc.total(),
        warnings: warnings_for(f, cfg, z),
    })
}

/// `ω(z)^{1/2} ⟨f, ϑ_{z,m}⟩` with the coherent state taken from its series
/// expansion. Much slower than [`forward`]; used to cross-check it.
pub fn forward_by_series<S: Signal + ?Sized>(
    f: &S,
    cfg: &TransformConfig,
    z: Complex64,
) -> Result<Complex64> {
    let label = CoherentLabel::new(z, cfg.level())?;
    let ctrl = cfg.series;
    let overlap = line_inner(
        |x| f.eval(x),
        |x| theta_series(label, x, ctrl).value,
        &cfg.line_rule,
    )?;
    Ok(overlap * (0.5 * z.norm_sqr()).exp())
}

/// `ω(z)^{1/2} ⟨f, ϑ_{z,m}⟩` with the closed-form coherent state.
pub fn forward_by_overlap<S: Signal + ?Sized>(
    f: &S,
    cfg: &TransformConfig,
    z: Complex64,
) -> Result<Complex64> {
    let label = CoherentLabel::new(z, cfg.level())?;
    let overlap = line_inner(|x| f.eval(x), |x| theta_closed(label, x), &cfg.line_rule)?;
    Ok(overlap * (0.5 * z.norm_sqr()).exp())
}

/// The classical Bargmann transform
/// `π^{-1/4} ∫ f(ξ) e^{-ξ²/2 + √2 ξ z - z²/2} dξ`, written out directly.
pub fn classical_bargmann<S: Signal + ?Sized>(
    f: &S,
    rule: &QuadratureRule,
    z: Complex64,
) -> Result<Complex64> {
    let norm = PI.powf(-0.25);
    let mut acc = CompensatedSum::new();
    for (i, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let expo = Complex64::new(0.5 * x * x, 0.0) + SQRT_2 * x * z - 0.5 * z * z;
        let v = f.eval(x) * expo.exp() * (w * norm);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: i });
        }
        acc.add(v);
    }
    Ok(acc.total())
}

/// Rectangular grid of `z` values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub re_count: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_count: usize,
}

impl PhaseSpaceGrid {
    pub fn new(re: (f64, f64, usize), im: (f64, f64, usize)) -> Result<Self> {
        for (axis, (lo, hi, n)) in [("re", re), ("im", im)] {
            if n == 0 {
                return Err(Error::InvalidGrid(format!(
                    "{axis} count must be at least 1"
                )));
            }
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidGrid(format!("{axis} bounds must be finite")));
            }
            if n > 1 && hi <= lo {
                return Err(Error::InvalidGrid(format!(
                    "{axis} max must exceed min when count > 1"
                )));
            }
        }
        Ok(Self {
            re_min: re.0,
            re_max: re.1,
            re_count: re.2,
            im_min: im.0,
            im_max: im.1,
            im_count: im.2,
        })
    }

    pub fn len(&self) -> usize {
        self.re_count * self.im_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points, imaginary part outer and real part inner.
    pub fn points(&self) -> Vec<Complex64> {
        let ims = axis(self.im_min, self.im_max, self.im_count);
        let res = axis(self.re_min, self.re_max, self.re_count);
        ims.iter()
            .flat_map(|&y| res.iter().map(move |&x| Complex64::new(x, y)))
            .collect()
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Parses `re:min:max:count,im:min:max:count`.
impl FromStr for PhaseSpaceGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidGrid(format!("{s:?}: expected re:min:max:count,im:min:max:count"));
        let (re, im) = s.split_once(',').ok_or_else(bad)?;
        let part = |text: &str, name: &str| -> Result<(f64, f64, usize)> {
            let fields: Vec<&str> = text.trim().split(':').collect();
            match fields[..] {
                [n, lo, hi, count] if n == name => Ok((
                    lo.parse().map_err(|_| bad())?,
                    hi.parse().map_err(|_| bad())?,
                    count.parse().map_err(|_| bad())?,
                )),
                _ => Err(bad()),
            }
        };
        Self::new(part(re, "re")?, part(im, "im")?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub z: Complex64,
    pub result: Result<TransformValue>,
}

/// [`forward`] at every grid point, in [`PhaseSpaceGrid::points`] order.
pub fn forward_grid<S: Signal + ?Sized>(
    f: &S,
    cfg: &TransformConfig,
    grid: &PhaseSpaceGrid,
) -> Vec<GridPoint> {
    grid.points()
        .into_par_iter()
        .map(|z| GridPoint {
            z,
            result: forward(f, cfg, z),
        })
        .collect()
}

/// `B_m[ψ_q](z_j)` for `q ≤ q_max` and every `z_j`; row `q` holds the values
/// of `B_m[ψ_q]`.
pub fn hermite_images(
    cfg: &TransformConfig,
    q_max: usize,
    zs: &[Complex64],
) -> Result<Vec<Vec<Complex64>>> {
    PolyIndex::new(q_max)?;
    let psi: Vec<Vec<f64>> = cfg
        .line_rule
        .nodes()
        .iter()
        .map(|&x| hermite_functions(q_max, x))
        .collect();
    let columns: Vec<Vec<Complex64>> = zs
        .par_iter()
        .map(|&z| {
            let row = kernel_row(cfg, z);
            (0..=q_max)
                .map(|q| {
                    let mut acc = CompensatedSum::new();
                    for (k, p) in row.iter().zip(&psi) {
                        acc.add(k * p[q]);
                    }
                    acc.total()
                })
                .collect()
        })
        .collect();
    let images = (0..=q_max)
        .map(|q| columns.iter().map(|c| c[q]).collect())
        .collect();
    Ok(images)
}

/// Coefficients `⟨F, e_q⟩_μ` for `q ≤ q_max`, where `F` is tabulated on the
/// nodes of `planar` and `e_q = h_{q,level} / √(level! q!)`.
pub fn project(
    values: &[Complex64],
    level: usize,
    planar: &PlanarRule,
    q_max: usize,
) -> Result<Vec<Complex64>> {
    let nodes = planar.nodes();
    (0..=q_max)
        .map(|q| {
            let idx = BasisIndex::in_level(level, q)?;
            let e: Vec<Complex64> = nodes
                .iter()
                .map(|&(z, _)| normalized_basis(idx, z))
                .collect();
            planar_inner_tabulated(values, &e, planar)
        })
        .collect()
}

/// Inverse transform on the span of `ψ_0, …, ψ_{q_max}`: the coefficients
/// `c_q` with `f ≈ Σ c_q ψ_q` for `F = B_m[f]`.
pub fn reconstruct<F>(
    f_values: F,
    cfg: &TransformConfig,
    planar: &PlanarRule,
    q_max: usize,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let values: Vec<Complex64> = planar
        .nodes()
        .par_iter()
        .map(|&(z, _)| f_values(z))
        .collect();
    project(&values, cfg.level(), planar, q_max)
}

/// Matrix of `⟨B_m[ψ_q], B_m[ψ_r]⟩_μ` for `q, r ≤ q_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    entries: Vec<Vec<Complex64>>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, q: usize, r: usize) -> Complex64 {
        self.entries[q][r]
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.entries
    }

    /// `max |G_{qr} - δ_{qr}|`.
    pub fn identity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (q, row) in self.entries.iter().enumerate() {
            for (r, &g) in row.iter().enumerate() {
                let delta = if q == r { 1.0 } else { 0.0 };
                worst = worst.max((g - delta).norm());
            }
        }
        worst
    }

    /// `max |G_{qr} - conj(G_{rq})|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (q, row) in self.entries.iter().enumerate() {
            for (r, &g) in row.iter().enumerate() {
                worst = worst.max((g - self.entries[r][q].conj()).norm());
            }
        }
        worst
    }
}

/// Gram matrix of the images `B_m[ψ_q]` under the planar rule. The line rule
/// of `cfg` is first raised as in [`TransformConfig::resolving`].
pub fn gram_matrix(cfg: &TransformConfig, planar: &PlanarRule, q_max: usize) -> Result<GramMatrix> {
    let cfg = cfg.resolving(planar)?;
    let zs: Vec<Complex64> = planar.nodes().iter().map(|&(z, _)| z).collect();
    let images = hermite_images(&cfg, q_max, &zs)?;
    let entries = images
        .iter()
        .map(|fq| {
            images
                .iter()
                .map(|fr| planar_inner_tabulated(fq, fr, planar))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockbasis::{h_eval, BasisForm};
    use crate::orthopoly::factorial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn psi(qs: &[usize]) -> AnalyticSignal {
        AnalyticSignal::hermite(qs.to_vec()).unwrap()
    }

    fn random_z(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
        Complex64::from_polar(
            rng.random_range(0.0..r_max),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
    }

    #[test]
    fn ground_state_maps_to_one() {
        let cfg = TransformConfig::new(0).unwrap();
        for z in [c(0.0, 0.0), c(1.2, -0.7), c(-2.0, 1.5)] {
            let v = forward(&psi(&[0]), &cfg, z).unwrap();
            assert!((v.value - 1.0).norm() < 1e-12, "{z} {}", v.value);
            assert_eq!(v.status(), "ok");
        }
    }

    #[test]
    fn classical_images_are_monomials() {
        let cfg = TransformConfig::new(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in 0..=10 {
            for _ in 0..5 {
                let z = random_z(&mut rng, 2.0);
                let v = forward(&psi(&[q]), &cfg, z).unwrap().value;
                let want = z.powu(q as u32) / factorial(q).sqrt();
                assert!((v - want).norm() < 1e-10, "q={q} z={z}");
            }
        }
    }

    #[test]
    fn images_are_normalized_basis_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 0..=6 {
            let cfg = TransformConfig::new(m).unwrap();
            for q in 0..=6 {
                let z = random_z(&mut rng, 2.0);
                let v = forward(&psi(&[q]), &cfg, z).unwrap().value;
                let h = h_eval(BasisIndex::new(q, m).unwrap(), z, BasisForm::FiniteSum);
                let want = h / (factorial(m) * factorial(q)).sqrt();
                assert!((v - want).norm() < 1e-9, "m={m} q={q} z={z}");
            }
        }
    }

    #[test]
    fn agrees_with_coherent_overlaps() {
        let sig = AnalyticSignal::gaussian(0.4, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in [0, 2, 5] {
            let cfg = TransformConfig::new(m).unwrap();
            let z = random_z(&mut rng, 1.5);
            let direct = forward(&sig, &cfg, z).unwrap().value;
            let closed = forward_by_overlap(&sig, &cfg, z).unwrap();
            let series = forward_by_series(&sig, &cfg, z).unwrap();
            assert!((direct - closed).norm() < 1e-12);
            assert!((direct - series).norm() < 1e-8);
        }
    }

    #[test]
    fn classical_matches_level_zero() {
        let cfg = TransformConfig::new(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let coeffs: Vec<Complex64> = (0..=8).map(|_| random_z(&mut rng, 1.0)).collect();
            let f = move |x: f64| {
                let ps = hermite_functions(8, x);
                coeffs.iter().zip(ps).map(|(c, p)| c * p).sum::<Complex64>()
            };
            let z = random_z(&mut rng, 2.0);
            let a = classical_bargmann(&f, cfg.line_rule(), z).unwrap();
            let b = forward(&f, &cfg, z).unwrap().value;
            assert!((a - b).norm() <= 1e-13 * a.norm().max(1.0), "{a} {b}");
        }
        let v = classical_bargmann(&psi(&[2]), cfg.line_rule(), c(0.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-15);
        let v = classical_bargmann(&psi(&[0]), cfg.line_rule(), c(0.7, 0.3)).unwrap();
        assert!((v - 1.0).norm() < 1e-13);
    }

    #[test]
    fn linearity() {
        let cfg = TransformConfig::new(3).unwrap();
        let f = AnalyticSignal::gaussian(-0.3, 1.2).unwrap();
        let g = psi(&[4]);
        let (alpha, beta) = (c(0.6, -1.1), c(-0.2, 0.9));
        let combo = |x: f64| alpha * f.eval(x) + beta * g.eval(x);
        let z = c(0.8, 1.1);
        let lhs = forward(&combo, &cfg, z).unwrap().value;
        let rhs = alpha * forward(&f, &cfg, z).unwrap().value
            + beta * forward(&g, &cfg, z).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn off_support_is_flagged() {
        let cfg = TransformConfig::new(1).unwrap();
        let far = c(cfg.support_limit() + 0.5, 0.0);
        let v = forward(&psi(&[0]), &cfg, far).unwrap();
        assert_eq!(v.status(), "off-support");
    }

    #[test]
    fn grid_order_and_parity() {
        let cfg = TransformConfig::new(0).unwrap();
        let grid: PhaseSpaceGrid = "re:-1:1:3,im:-0.5:0.5:2".parse().unwrap();
        let out = forward_grid(&psi(&[1]), &cfg, &grid);
        let zs: Vec<Complex64> = out.iter().map(|p| p.z).collect();
        assert_eq!(
            zs,
            vec![
                c(-1.0, -0.5),
                c(0.0, -0.5),
                c(1.0, -0.5),
                c(-1.0, 0.5),
                c(0.0, 0.5),
                c(1.0, 0.5)
            ]
        );
        for p in &out {
            let v = p.result.as_ref().unwrap().value;
            assert!((v - p.z).norm() < 1e-12);
        }
        let one: PhaseSpaceGrid = "re:0.3:0.3:1,im:0:0:1".parse().unwrap();
        assert_eq!(forward_grid(&psi(&[0]), &cfg, &one).len(), 1);
    }

    #[test]
    fn grid_validation() {
        assert!("re:0:1:0,im:0:0:1".parse::<PhaseSpaceGrid>().is_err());
        assert!("re:1:0:3,im:0:0:1".parse::<PhaseSpaceGrid>().is_err());
        assert!("im:0:1:2,re:0:0:1".parse::<PhaseSpaceGrid>().is_err());
        assert!("re:0:1:2".parse::<PhaseSpaceGrid>().is_err());
        assert!("re:0:0:1,im:2:2:1".parse::<PhaseSpaceGrid>().is_ok());
    }

    #[test]
    fn signal_parsing() {
        assert_eq!(
            "hermite:3".parse::<AnalyticSignal>().unwrap(),
            AnalyticSignal::Hermite(vec![3])
        );
        assert_eq!(
            "hermite:1,2".parse::<AnalyticSignal>().unwrap(),
            AnalyticSignal::Hermite(vec![1, 2])
        );
        assert_eq!(
            "gaussian:0.5,2".parse::<AnalyticSignal>().unwrap(),
            AnalyticSignal::Gaussian {
                mu: 0.5,
                sigma: 2.0
            }
        );
        for bad in [
            "hermite:",
            "hermite:1,1",
            "gaussian:1",
            "gaussian:0,-1",
            "sine:2",
            "hermite",
        ] {
            assert!(bad.parse::<AnalyticSignal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn gaussian_is_normalized() {
        let rule = gauss_hermite(64).unwrap();
        let g = AnalyticSignal::gaussian(0.7, 0.9).unwrap();
        let n = line_inner(|x| g.eval(x), |x| g.eval(x), &rule).unwrap();
        assert!((n.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_signal_interpolates() {
        let xs: Vec<f64> = (0..=200).map(|i| -8.0 + 0.08 * i as f64).collect();
        let g = AnalyticSignal::gaussian(0.2, 1.0).unwrap();
        let vals: Vec<Complex64> = xs.iter().map(|&x| g.eval(x) * c(1.0, 0.5)).collect();
        let s = SampledSignal::new(xs, vals).unwrap();
        for x in [-3.01, -0.5, 0.0, 0.33, 2.777] {
            assert!((s.eval(x) - g.eval(x) * c(1.0, 0.5)).norm() < 1e-6);
        }
        assert_eq!(s.eval(9.0), c(0.0, 0.0));
        let cfg = TransformConfig::new(1).unwrap();
        let v = forward(&s, &cfg, c(0.3, 0.2)).unwrap();
        let exact = forward(&|x: f64| g.eval(x) * c(1.0, 0.5), &cfg, c(0.3, 0.2)).unwrap();
        assert!((v.value - exact.value).norm() < 1e-5);
        assert_eq!(v.status(), "interpolated");
    }

    #[test]
    fn sampled_signal_validation() {
        let v = vec![c(1.0, 0.0); 3];
        assert!(SampledSignal::new(vec![0.0, 1.0, 1.0], v.clone()).is_err());
        assert!(SampledSignal::new(vec![0.0], vec![c(1.0, 0.0)]).is_err());
        assert!(SampledSignal::new(vec![0.0, 1.0], v.clone()).is_err());
        assert!(SampledSignal::new(vec![0.0, f64::NAN, 2.0], v.clone()).is_err());
        let two = SampledSignal::new(vec![0.0, 1.0], vec![c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((two.eval(0.25) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(TransformConfig::with_line_order(0, 16).is_err());
        assert!(TransformConfig::new(10_000).is_err());
    }

    #[test]
    fn gram_is_identity() {
        let planar = PlanarRule::for_max_index(5).unwrap();
        let g = gram_matrix(&TransformConfig::new(0).unwrap(), &planar, 5).unwrap();
        assert!(g.identity_deviation() < 1e-9, "{}", g.identity_deviation());
        assert!(g.hermitian_deviation() < 1e-14);

        let planar = PlanarRule::for_max_index(11).unwrap();
        let g = gram_matrix(&TransformConfig::new(3).unwrap(), &planar, 8).unwrap();
        assert!(g.identity_deviation() < 1e-7, "{}", g.identity_deviation());
    }

    #[test]
    fn round_trip() {
        for m in 0..=4 {
            let cfg = TransformConfig::new(m).unwrap();
            let planar = PlanarRule::for_max_index(m + 10).unwrap();
            let f3 = psi(&[3]);
            let c3 =
                reconstruct(|z| forward(&f3, &cfg, z).unwrap().value, &cfg, &planar, 10).unwrap();
            for (q, cq) in c3.iter().enumerate() {
                let want = if q == 3 { 1.0 } else { 0.0 };
                assert!((cq - want).norm() < 1e-7, "m={m} q={q} {cq}");
            }
            let f12 = psi(&[1, 2]);
            let c12 =
                reconstruct(|z| forward(&f12, &cfg, z).unwrap().value, &cfg, &planar, 10).unwrap();
            let h = 0.5f64.sqrt();
            for (q, cq) in c12.iter().enumerate() {
                let want = if q == 1 || q == 2 { h } else { 0.0 };
                assert!((cq - want).norm() < 1e-7, "m={m} q={q} {cq}");
            }
        }
        let planar = PlanarRule::for_max_index(6).unwrap();
        let cfg = TransformConfig::new(2).unwrap();
        let zero = reconstruct(|_| c(0.0, 0.0), &cfg, &planar, 4).unwrap();
        assert!(zero.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn images_stay_in_their_level() {
        let planar = PlanarRule::for_max_index(16).unwrap();
        let zs: Vec<Complex64> = planar.nodes().iter().map(|&(z, _)| z).collect();
        for m in [0, 2, 4] {
            let cfg = TransformConfig::new(m).unwrap();
            let images = hermite_images(&cfg, 6, &zs).unwrap();
            for other in [0, 1, 3, 5] {
                if other == m {
                    continue;
                }
                for img in &images {
                    let proj = project(img, other, &planar, 6).unwrap();
                    let worst = proj.iter().map(|v| v.norm()).fold(0.0, f64::max);
                    assert!(worst < 1e-7, "m={m} other={other} {worst}");
                }
            }
        }
    }
}
