//! Registry of numerical identity checks and the JSON report they produce.
//!
//! Every check samples its own parameter range. [`VerifyConfig::max_m`] caps
//! Landau levels (the second index of `h_{k,m}`, the level of `ϑ_{z,m}` and
//! `B_m`) and [`VerifyConfig::max_p`] caps the remaining indices. A range that
//! the caps make empty still runs and reports `"cases": 0`.
//!
//! ```
//! use polyfock::verify::{run, VerifyConfig};
//!
//! let cfg = VerifyConfig {
//!     only: Some("eigencheck".into()),
//!     max_m: 3,
//!     max_p: 3,
//!     ..VerifyConfig::default()
//! };
//! let report = run(&cfg).unwrap();
//! assert!(report.passed);
//! ```

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use glob::Pattern;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bipoly::ito_polynomial;
use crate::coherent::{
    addition_formula_sides, finite_sum_residual, theta_closed, theta_series, CoherentLabel,
    SeriesControl,
};
use crate::error::{Error, Result};
use crate::fockbasis::{h_eval, kernel, normalized_basis, BasisForm, BasisIndex};
use crate::orthopoly::{hermite_functions, PolyIndex};
use crate::quadrature::{gauss_hermite, line_inner, planar_inner_tabulated, PlanarRule};
use crate::transform::{
    classical_bargmann, forward, gram_matrix, hermite_images, project, reconstruct, TransformConfig,
};

/// Settings for [`run`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub max_m: usize,
    pub max_p: usize,
    /// Multiplies every tolerance.
    pub tol_scale: f64,
    /// Glob over check names; non-matching checks are reported as excluded.
    pub only: Option<String>,
    /// Record wall-clock time per check. Turn off for byte-identical reports.
    pub timing: bool,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_m: 15,
            max_p: 30,
            tol_scale: 1.0,
            only: None,
            timing: true,
            seed: 20_240_601,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Passed,
    Failed,
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub max_error: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub passed: bool,
    pub runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub measure: &'static str,
    pub index_convention: &'static str,
    pub phase_correction: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            measure: "dmu = pi^-1 exp(-|z|^2) dlambda; ||h_{m,p}||^2 = m! p!; K_m(z,w) = exp(z conj(w)) L_m(|z-w|^2); omega(z) = exp(|z|^2)",
            index_convention: "h_{m,p} = sum_j (-1)^j m! p! / (j! (m-j)! (p-j)!) z^{m-j} conj(z)^{p-j}; Landau eigenvalue p; level-m basis {h_{k,m}}_k",
            phase_correction: "Laguerre and 1F1 forms carry exp(+i (m-p) arg z), equal to 1 at z = 0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub version: &'static str,
    pub conventions: Conventions,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Outcome {
    max_error: f64,
    parameters: BTreeMap<String, Value>,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    run: fn(&VerifyConfig) -> Result<Outcome>,
}

const CHECKS: &[Check] = &[
    Check {
        name: "orthonormality",
        tolerance: 1e-10,
        run: orthonormality,
    },
    Check {
        name: "three-form",
        tolerance: 1e-10,
        run: three_form,
    },
    Check {
        name: "eigencheck",
        tolerance: 0.0,
        run: eigencheck,
    },
    Check {
        name: "norms",
        tolerance: 1e-8,
        run: norms,
    },
    Check {
        name: "kernel-reproducing",
        tolerance: 1e-6,
        run: kernel_reproducing,
    },
    Check {
        name: "theta-series",
        tolerance: 1e-8,
        run: theta_series_check,
    },
    Check {
        name: "theta-norm",
        tolerance: 1e-10,
        run: theta_norm,
    },
    Check {
        name: "addition-formula",
        tolerance: 1e-8,
        run: addition_formula,
    },
    Check {
        name: "finite-sum",
        tolerance: 1e-9,
        run: finite_sum,
    },
    Check {
        name: "gram-isometry",
        tolerance: 1e-7,
        run: gram_isometry,
    },
    Check {
        name: "classical-coincidence",
        tolerance: 1e-13,
        run: classical_coincidence,
    },
    Check {
        name: "round-trip",
        tolerance: 1e-7,
        run: round_trip,
    },
    Check {
        name: "level-range",
        tolerance: 1e-7,
        run: level_range,
    },
];

/// Names of all registered checks, in run order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs every registered check.
pub fn run(cfg: &VerifyConfig) -> Result<VerificationReport> {
    if !(cfg.tol_scale > 0.0 && cfg.tol_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tol_scale must be positive, got {}",
            cfg.tol_scale
        )));
    }
    let pattern = cfg
        .only
        .as_deref()
        .map(Pattern::new)
        .transpose()
        .map_err(|e| Error::InvalidParameter(format!("bad --only pattern: {e}")))?;
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|check| {
            let tolerance = check.tolerance * cfg.tol_scale;
            let selected = pattern.as_ref().map_or(true, |p| p.matches(check.name));
            if !selected {
                return CheckResult {
                    name: check.name.to_string(),
                    parameters: BTreeMap::new(),
                    max_error: None,
                    tolerance,
                    status: CheckStatus::Excluded,
                    passed: false,
                    runtime_ms: None,
                    error: None,
                };
            }
            let start = Instant::now();
            let outcome = (check.run)(cfg);
            let runtime_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            match outcome {
                Ok(o) => {
                    let passed = o.max_error.is_finite() && o.max_error <= tolerance;
                    CheckResult {
                        name: check.name.to_string(),
                        parameters: o.parameters,
                        max_error: o.max_error.is_finite().then_some(o.max_error),
                        tolerance,
                        status: if passed {
                            CheckStatus::Passed
                        } else {
                            CheckStatus::Failed
                        },
                        passed,
                        runtime_ms,
                        error: None,
                    }
                }
                Err(e) => CheckResult {
                    name: check.name.to_string(),
                    parameters: BTreeMap::new(),
                    max_error: None,
                    tolerance,
                    status: CheckStatus::Failed,
                    passed: false,
                    runtime_ms,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let passed = checks
        .iter()
        .all(|c| c.passed || c.status == CheckStatus::Excluded);
    Ok(VerificationReport {
        version: env!("CARGO_PKG_VERSION"),
        conventions: Conventions::default(),
        checks,
        passed,
    })
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn rng(cfg: &VerifyConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Uniform sample from the closed disk of radius `r`.
fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    let radius = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(radius, rng.random_range(0.0..TAU))
}

fn max_of<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |acc, x| {
        if x.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(x)
        }
    })
}

fn orthonormality(cfg: &VerifyConfig) -> Result<Outcome> {
    let p_max = cfg.max_p.min(30);
    let rule = gauss_hermite(64)?;
    let table: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| hermite_functions(p_max, x))
        .collect();
    let scaled: Vec<f64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| w * (x * x).exp())
        .collect();
    let mut worst: f64 = 0.0;
    for p in 0..=p_max {
        for q in 0..=p {
            let mut acc = crate::sum::Neumaier::default();
            for (row, &w) in table.iter().zip(&scaled) {
                acc.add(w * row[p] * row[q]);
            }
            let delta = if p == q { 1.0 } else { 0.0 };
            worst = worst.max((acc.total() - delta).abs());
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[("p_max", json!(p_max)), ("line_nodes", json!(64))]),
    })
}

fn three_form(cfg: &VerifyConfig) -> Result<Outcome> {
    let (k_max, level_max) = (cfg.max_p.min(12), cfg.max_m.min(12));
    let mut rng = rng(cfg, 2);
    let zs: Vec<Complex64> = (0..200).map(|_| disk_point(&mut rng, 4.0)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..=k_max {
        for level in 0..=level_max {
            let idx = BasisIndex::in_level(level, k)?;
            for &z in &zs {
                let v = BasisForm::ALL.map(|form| h_eval(idx, z, form));
                let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let abs = (v[i] - v[j]).norm();
                    worst = worst.max(if scale > 0.0 { abs / scale } else { abs });
                }
            }
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("k_max", json!(k_max)),
            ("level_max", json!(level_max)),
            ("points", json!(200)),
            ("radius", json!(4.0)),
            ("metric", json!("|a - b| / max |form| over form pairs")),
        ]),
    })
}

fn eigencheck(cfg: &VerifyConfig) -> Result<Outcome> {
    let (k_max, level_max) = (cfg.max_p.min(15), cfg.max_m.min(15));
    let cases: Vec<(usize, usize)> = (0..=k_max)
        .flat_map(|k| (0..=level_max).map(move |l| (k, l)))
        .collect();
    let verdicts = cases
        .par_iter()
        .map(|&(k, level)| {
            let report = ito_polynomial(k, level)?.eigencheck()?;
            let ok = report.is_eigenvector && report.eigenvalue.to_f64() == Some(level as f64);
            Ok(ok)
        })
        .collect::<Result<Vec<bool>>>()?;
    let mismatches = verdicts.iter().filter(|ok| !**ok).count();
    Ok(Outcome {
        max_error: if mismatches == 0 { 0.0 } else { 1.0 },
        parameters: params(&[
            ("k_max", json!(k_max)),
            ("level_max", json!(level_max)),
            ("cases", json!(cases.len())),
            ("mismatches", json!(mismatches)),
            ("expected_eigenvalue", json!("second index")),
        ]),
    })
}

fn norms(cfg: &VerifyConfig) -> Result<Outcome> {
    let (k_max, level_max) = (cfg.max_p.min(8), cfg.max_m.min(8));
    let planar = PlanarRule::for_max_index(k_max + level_max)?;
    let nodes = planar.nodes();
    let table: Vec<Vec<Complex64>> = (0..=k_max)
        .flat_map(|k| (0..=level_max).map(move |l| (k, l)))
        .map(|(k, l)| {
            let idx = BasisIndex::new(k, l)?;
            Ok(nodes
                .iter()
                .map(|&(z, _)| normalized_basis(idx, z))
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<f64> = (0..table.len())
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for j in 0..=i {
                let g = planar_inner_tabulated(&table[i], &table[j], &planar)?;
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - delta).norm());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(Outcome {
        max_error: max_of(rows),
        parameters: params(&[
            ("k_max", json!(k_max)),
            ("level_max", json!(level_max)),
            ("planar_nodes", json!(planar.len())),
            ("metric", json!("|<h, h'> / sqrt(norm * norm') - delta|")),
        ]),
    })
}

fn kernel_reproducing(cfg: &VerifyConfig) -> Result<Outcome> {
    let (k_max, level_max) = (cfg.max_p.min(6), cfg.max_m.min(4));
    let planar = PlanarRule::new(80, 96)?;
    let nodes = planar.nodes();
    let mut rng = rng(cfg, 5);
    let points: Vec<Complex64> = (0..8).map(|_| disk_point(&mut rng, 1.5)).collect();
    let mut cases = Vec::new();
    for level in 0..=level_max {
        for k in 0..=k_max {
            for &z in &points {
                cases.push((level, k, z));
            }
        }
    }
    let errors = cases
        .par_iter()
        .map(|&(level, k, z)| {
            let idx = BasisIndex::in_level(level, k)?;
            let m = PolyIndex::new(level)?;
            let phi: Vec<Complex64> = nodes
                .iter()
                .map(|&(w, _)| h_eval(idx, w, BasisForm::FiniteSum))
                .collect();
            let kz: Vec<Complex64> = nodes
                .iter()
                .map(|&(w, _)| kernel(m, w, z).value())
                .collect();
            let got = planar_inner_tabulated(&phi, &kz, &planar)?;
            let want = h_eval(idx, z, BasisForm::FiniteSum);
            Ok((got - want).norm() / want.norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Outcome {
        max_error: max_of(errors),
        parameters: params(&[
            ("k_max", json!(k_max)),
            ("level_max", json!(level_max)),
            ("points", json!(points.len())),
            ("radius", json!(1.5)),
            ("planar_nodes", json!(planar.len())),
        ]),
    })
}

fn theta_series_check(cfg: &VerifyConfig) -> Result<Outcome> {
    let level_max = cfg.max_m.min(8);
    let ctrl = SeriesControl::default();
    let mut rng = rng(cfg, 6);
    let mut cases = Vec::new();
    for m in 0..=level_max {
        for _ in 0..10 {
            let z = disk_point(&mut rng, 2.0);
            for i in 0..9 {
                cases.push((m, z, -4.0 + i as f64));
            }
        }
    }
    let errors = cases
        .par_iter()
        .map(|&(m, z, xi)| {
            let label = CoherentLabel::new(z, m)?;
            let s = theta_series(label, xi, ctrl);
            if !s.converged {
                return Err(Error::SeriesDiverged {
                    terms: s.terms_used,
                });
            }
            Ok((s.value - theta_closed(label, xi)).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Outcome {
        max_error: max_of(errors),
        parameters: params(&[
            ("level_max", json!(level_max)),
            ("radius", json!(2.0)),
            ("xi_range", json!([-4.0, 4.0])),
            ("cases", json!(cases.len())),
            ("max_terms", json!(ctrl.max_terms())),
        ]),
    })
}

fn theta_norm(cfg: &VerifyConfig) -> Result<Outcome> {
    let level_max = cfg.max_m.min(8);
    let rule = gauss_hermite(64)?;
    let mut rng = rng(cfg, 7);
    let mut worst: f64 = 0.0;
    for m in 0..=level_max {
        for _ in 0..10 {
            let label = CoherentLabel::new(disk_point(&mut rng, 2.0), m)?;
            let f = |x: f64| theta_closed(label, x);
            let n = line_inner(f, f, &rule)?;
            worst = worst.max((n.norm().sqrt() - 1.0).abs());
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("level_max", json!(level_max)),
            ("radius", json!(2.0)),
            ("line_nodes", json!(64)),
        ]),
    })
}

fn addition_formula(cfg: &VerifyConfig) -> Result<Outcome> {
    let n_max = cfg.max_p.min(6);
    let ctrl = SeriesControl::default();
    let mut rng = rng(cfg, 8);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = PolyIndex::new(rng.random_range(0..=n_max))?;
        let a = rng.random_range(-1.5..=1.5);
        let b = rng.random_range(-1.5..=1.5);
        let beta = [1.0, 2.0, 4.0][i % 3];
        let xi = rng.random_range(-3.0..=3.0);
        let (lhs, rhs) = addition_formula_sides(n, a, b, beta, xi, ctrl)?;
        if !lhs.converged {
            return Err(Error::SeriesDiverged {
                terms: lhs.terms_used,
            });
        }
        worst = worst.max((lhs.value - rhs).norm());
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("n_max", json!(n_max)),
            ("points", json!(100)),
            ("beta", json!([1.0, 2.0, 4.0])),
            ("ab_range", json!([-1.5, 1.5])),
            ("xi_range", json!([-3.0, 3.0])),
        ]),
    })
}

fn finite_sum(cfg: &VerifyConfig) -> Result<Outcome> {
    let level_max = cfg.max_m.min(8);
    let mut rng = rng(cfg, 9);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 1..=level_max {
        for _ in 0..10 {
            let z = disk_point(&mut rng, 2.0);
            let xi = rng.random_range(-3.0..=3.0);
            worst = worst.max(finite_sum_residual(PolyIndex::new(m)?, z, xi)?);
            cases += 1;
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("level_max", json!(level_max)),
            ("radius", json!(2.0)),
            ("cases", json!(cases)),
        ]),
    })
}

fn gram_isometry(cfg: &VerifyConfig) -> Result<Outcome> {
    let (q_max, level_max) = (cfg.max_p.min(10), cfg.max_m.min(6));
    let results = (0..=level_max)
        .into_par_iter()
        .map(|m| {
            let planar = PlanarRule::for_max_index(m + q_max)?;
            let g = gram_matrix(&TransformConfig::new(m)?, &planar, q_max)?;
            Ok(g.identity_deviation().max(g.hermitian_deviation()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Outcome {
        max_error: max_of(results),
        parameters: params(&[
            ("q_max", json!(q_max)),
            ("level_max", json!(level_max)),
            ("metric", json!("max |G - I|")),
        ]),
    })
}

fn classical_coincidence(cfg: &VerifyConfig) -> Result<Outcome> {
    let q_max = cfg.max_p.min(8);
    let tc = TransformConfig::new(0)?;
    let mut rng = rng(cfg, 11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let coeffs: Vec<Complex64> = (0..=q_max).map(|_| disk_point(&mut rng, 1.0)).collect();
        let f = |x: f64| {
            coeffs
                .iter()
                .zip(hermite_functions(q_max, x))
                .map(|(c, p)| c * p)
                .sum::<Complex64>()
        };
        let z = disk_point(&mut rng, 2.0);
        let a = classical_bargmann(&f, tc.line_rule(), z)?;
        let b = forward(&f, &tc, z)?.value;
        worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE));
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("q_max", json!(q_max)),
            ("signals", json!(20)),
            ("radius", json!(2.0)),
            ("metric", json!("relative")),
        ]),
    })
}

fn random_coefficients(rng: &mut ChaCha8Rng, q_max: usize) -> Vec<Complex64> {
    let c: Vec<Complex64> = (0..=q_max).map(|_| disk_point(rng, 1.0)).collect();
    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    c.into_iter().map(|v| v / norm).collect()
}

fn round_trip(cfg: &VerifyConfig) -> Result<Outcome> {
    let (q_max, level_max) = (cfg.max_p.min(8), cfg.max_m.min(4));
    let extra = 2;
    let mut rng = rng(cfg, 12);
    let mut worst: f64 = 0.0;
    for m in 0..=level_max {
        let tc = TransformConfig::new(m)?;
        let planar = PlanarRule::for_max_index(m + q_max + extra)?;
        let coeffs = random_coefficients(&mut rng, q_max);
        let f = |x: f64| {
            coeffs
                .iter()
                .zip(hermite_functions(q_max, x))
                .map(|(c, p)| c * p)
                .sum::<Complex64>()
        };
        let got = reconstruct(
            |z| {
                forward(&f, &tc, z)
                    .map(|v| v.value)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            },
            &tc,
            &planar,
            q_max + extra,
        )?;
        for (q, g) in got.iter().enumerate() {
            let want = coeffs.get(q).copied().unwrap_or_default();
            worst = worst.max((g - want).norm());
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("q_max", json!(q_max)),
            ("level_max", json!(level_max)),
            ("reconstructed_q_max", json!(q_max + extra)),
        ]),
    })
}

fn level_range(cfg: &VerifyConfig) -> Result<Outcome> {
    let (q_max, level_max) = (cfg.max_p.min(6), cfg.max_m.min(4));
    let other_max = cfg.max_m.min(level_max + 2);
    let planar = PlanarRule::for_max_index(q_max + other_max)?;
    let zs: Vec<Complex64> = planar.nodes().iter().map(|&(z, _)| z).collect();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 0..=level_max {
        let images = hermite_images(&TransformConfig::new(m)?, q_max, &zs)?;
        for other in (0..=other_max).filter(|&o| o != m) {
            for img in &images {
                let proj = project(img, other, &planar, q_max)?;
                worst = worst.max(max_of(proj.iter().map(|v| v.norm())));
                cases += 1;
            }
        }
    }
    Ok(Outcome {
        max_error: worst,
        parameters: params(&[
            ("q_max", json!(q_max)),
            ("level_max", json!(level_max)),
            ("other_level_max", json!(other_max)),
            ("cases", json!(cases)),
        ]),
    })
}
