//! Numerical checks of the quotient bound, the mean-value decay, the
//! proof integrals `I, J, J_d, J_c`, the Parseval constant and translation
//! numbers of discrete characteristic functions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charfn::{eval_part, lipschitz_const, mean_value, CharFnError, MeanValue, Part};
use crate::dist_model::{continuous_mix, DiscretePart, DistributionSpec};
use crate::quad::{integrate, QuadOptions};
use crate::spectral::{lk_charfn, segment_integral, SpectralError, SpectralPair};

/// Identity residual below which a factor `kappa` counts as exact.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Frequencies closer than this are merged in the Parseval algebra.
pub const FREQ_MERGE_TOL: f64 = 1e-12;
/// Frequencies closer than this (but not merged) make the algebra ambiguous.
pub const FREQ_AMBIGUITY_TOL: f64 = 1e-9;
/// `|f(t)|` below which `I(t, tau)` is not computed.
pub const MIN_MODULUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    CharFn(#[from] CharFnError),
    #[error("|f({t})| = {modulus:e} is too small; I(t, tau) is ill-conditioned")]
    IllConditioned { t: f64, modulus: f64 },
    #[error("quadrature did not reach {target:e} (estimate {error:e})")]
    Quadrature { error: f64, target: f64 },
    #[error("frequencies {a} and {b} are {gap:e} apart: too close to separate, too far to merge")]
    FrequencyAmbiguity { a: f64, b: f64, gap: f64 },
    #[error("{0}")]
    Precondition(String),
    #[error("no translation number found in [0, {window}]")]
    NoTranslation { window: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantsVariant {
    /// `B = ||G|| / 2`, `C = e^{2 ||G||}`.
    Original,
    /// `B = ||G||`, `C = e^{4 ||G||}`.
    Corrected,
}

/// Constants of the bound `|f(t-h) f(t+h)| / |f(t)|^2 <= C e^{B h^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub variant: ConstantsVariant,
    pub b: f64,
    pub c: f64,
}

impl BoundConstants {
    pub fn new(variant: ConstantsVariant, total_variation: f64) -> Self {
        match variant {
            ConstantsVariant::Original => Self {
                variant,
                b: total_variation / 2.0,
                c: (2.0 * total_variation).exp(),
            },
            ConstantsVariant::Corrected => Self {
                variant,
                b: total_variation,
                c: (4.0 * total_variation).exp(),
            },
        }
    }

    pub fn bound(&self, h: f64) -> f64 {
        self.c * (self.b * h * h).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientCheck {
    pub t: f64,
    pub h: f64,
    /// `|f(t-h) f(t+h)| / |f(t)|^2`.
    pub ratio: f64,
    /// `|q - exp(-Phi)|` where `q` is the complex quotient.
    pub identity_residual_paper: f64,
    /// `|q - exp(-2 Phi)|`.
    pub identity_residual_corrected: f64,
    /// `C e^{B h^2} - ratio` with the `kappa = 1` constants; negative means violated.
    pub bound_margin_paper: f64,
    pub bound_margin_corrected: f64,
}

/// `(1 - cos hx)(1 + x^2)/x^2`, continued to `h^2/2` at `x = 0`.
pub fn elem_lhs(h: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.5 * h * h;
    }
    let s = (0.5 * h * x).sin();
    let q = s / x;
    // 1 - cos(hx) = 2 sin^2(hx/2)
    2.0 * (q * q + s * s)
}

/// `Phi(t, h) = int e^{itx} (1 - cos hx)(1 + x^2)/x^2 dG(x)`.
pub fn quotient_exponent(pair: &SpectralPair, t: f64, h: f64) -> Complex64 {
    let kernel = |x: f64| Complex64::from_polar(elem_lhs(h, x), t * x);
    let mut phi = Complex64::new(0.0, 0.0);
    for a in &pair.measure.atoms {
        phi += kernel(a.location) * a.weight;
    }
    for seg in &pair.measure.segments {
        phi += segment_integral(kernel, seg, t.abs() + h.abs());
    }
    phi
}

/// Compares the quotient `f(t-h) f(t+h) / f(t)^2` of a Lévy–Khintchine-type
/// characteristic function against `exp(-kappa Phi(t, h))` for `kappa = 1, 2`
/// and evaluates both sets of bound constants.
pub fn quotient_check(pair: &SpectralPair, t: f64, h: f64) -> Result<QuotientCheck, HarnessError> {
    let fm = lk_charfn(pair, t - h)?;
    let fp = lk_charfn(pair, t + h)?;
    let f0 = lk_charfn(pair, t)?;
    let q = fm * fp / (f0 * f0);
    let phi = quotient_exponent(pair, t, h);
    let ratio = q.norm();
    let tv = pair.total_variation();
    let original = BoundConstants::new(ConstantsVariant::Original, tv);
    let corrected = BoundConstants::new(ConstantsVariant::Corrected, tv);
    Ok(QuotientCheck {
        t,
        h,
        ratio,
        identity_residual_paper: (q - (-phi).exp()).norm(),
        identity_residual_corrected: (q - (-2.0 * phi).exp()).norm(),
        bound_margin_paper: original.bound(h) - ratio,
        bound_margin_corrected: corrected.bound(h) - ratio,
    })
}

/// Outcome of running [`quotient_check`] over a grid of pairs and `(t, h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaAdjudication {
    pub points: usize,
    pub max_residual_paper: f64,
    pub max_residual_corrected: f64,
    /// The unique `kappa` whose residual stays below [`IDENTITY_TOL`], if any.
    pub kappa: Option<u8>,
    pub violations_paper: usize,
    pub violations_corrected: usize,
    pub min_margin_paper: f64,
    pub min_margin_corrected: f64,
    #[serde(skip)]
    pub rows: Vec<(usize, QuotientCheck)>,
}

pub fn adjudicate_kappa(pairs: &[SpectralPair], t_grid: &[f64], h_grid: &[f64]) -> Result<KappaAdjudication, HarnessError> {
    let jobs: Vec<(usize, f64, f64)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(i, _)| t_grid.iter().flat_map(move |&t| h_grid.iter().map(move |&h| (i, t, h))))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, t, h)| quotient_check(&pairs[i], t, h).map(|c| (i, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let fold = |f: fn(&QuotientCheck) -> f64, init: f64, pick: fn(f64, f64) -> f64| rows.iter().map(|(_, c)| f(c)).fold(init, pick);
    let max_residual_paper = fold(|c| c.identity_residual_paper, 0.0, f64::max);
    let max_residual_corrected = fold(|c| c.identity_residual_corrected, 0.0, f64::max);
    let kappa = match (max_residual_paper < IDENTITY_TOL, max_residual_corrected < IDENTITY_TOL) {
        (true, false) => Some(1),
        (false, true) => Some(2),
        _ => None,
    };
    Ok(KappaAdjudication {
        points: rows.len(),
        max_residual_paper,
        max_residual_corrected,
        kappa,
        violations_paper: rows.iter().filter(|(_, c)| c.bound_margin_paper < 0.0).count(),
        violations_corrected: rows.iter().filter(|(_, c)| c.bound_margin_corrected < 0.0).count(),
        min_margin_paper: fold(|c| c.bound_margin_paper, f64::INFINITY, f64::min),
        min_margin_corrected: fold(|c| c.bound_margin_corrected, f64::INFINITY, f64::min),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElemScan {
    pub points: usize,
    /// `max (LHS - (h^2/2 + 2))` over the grid.
    pub max_violation: f64,
    pub argmax_h: f64,
    pub argmax_x: f64,
}

/// Scans `(1 - cos hx)(1 + x^2)/x^2 - (h^2/2 + 2)` over a product grid.
pub fn elem_inequality_scan(h_grid: &[f64], x_grid: &[f64]) -> ElemScan {
    let (max_violation, argmax_h, argmax_x) = h_grid
        .par_iter()
        .map(|&h| {
            let rhs = 0.5 * h * h + 2.0;
            x_grid
                .iter()
                .map(|&x| (elem_lhs(h, x) - rhs, h, x))
                .fold((f64::NEG_INFINITY, h, 0.0), |a, b| if b.0 > a.0 { b } else { a })
        })
        .reduce(
            || (f64::NEG_INFINITY, 0.0, 0.0),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    ElemScan {
        points: h_grid.len() * x_grid.len(),
        max_violation,
        argmax_h,
        argmax_x,
    }
}

/// `lo, lo + step, ..., hi` built from integer multiples so no drift accumulates.
pub fn step_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as i64;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub window: f64,
    pub max_mean: f64,
    pub argmax_t: f64,
    pub max_quadrature_error: f64,
}

/// `max_t M(t, T)` over a `t`-grid, for each `T` of the ladder.
pub fn mean_value_decay(spec: &DistributionSpec, t_grid: &[f64], ladder: &[f64]) -> Result<Vec<DecayRow>, HarnessError> {
    ladder
        .iter()
        .map(|&w| {
            let vals = t_grid
                .par_iter()
                .map(|&t| mean_value(spec, t, w))
                .collect::<Result<Vec<MeanValue>, _>>()?;
            let best = vals
                .iter()
                .fold(None::<&MeanValue>, |acc, m| match acc {
                    Some(a) if a.value >= m.value => Some(a),
                    _ => Some(m),
                })
                .ok_or_else(|| HarnessError::Precondition("empty t-grid".into()))?;
            Ok(DecayRow {
                window: w,
                max_mean: best.value,
                argmax_t: best.t,
                max_quadrature_error: vals.iter().map(|m| m.quadrature_error).fold(0.0, f64::max),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ProofIntegrals {
    pub t: f64,
    pub tau: f64,
    pub I: f64,
    pub J: f64,
    pub J_d: f64,
    pub J_c: f64,
    /// Parseval constant of `h -> f_d(t + h)`, when there is a discrete part.
    pub A: Option<f64>,
    pub modulus_t: f64,
    /// `|J - I |f(t)|^2|`.
    pub identity_residual: f64,
    /// `J - (c_d^2 J_d - J_c)`.
    pub chain_margin: f64,
    pub quadrature_error: f64,
}

fn mean_over<F: Fn(f64) -> f64>(f: F, tau: f64, freq: f64, tol: f64) -> Result<(f64, f64), HarnessError> {
    let panels = ((2.0 * tau * (1.0 + freq)).ceil() as usize).clamp(1, 100_000);
    let opts = QuadOptions {
        abs_tol: tol * 2.0 * tau,
        max_panels: 1_000_000,
        initial_panels: panels,
    };
    let r = integrate(f, -tau, tau, &opts);
    let err = r.error / (2.0 * tau);
    if !r.converged || !r.value.is_finite() {
        return Err(HarnessError::Quadrature { error: err, target: tol });
    }
    Ok((r.value / (2.0 * tau), err))
}

/// Computes `I, J, J_d, J_c` at `(t, tau)` by adaptive quadrature.
/// `J_c` is taken as 0 when there is no continuous part and `J_d` as 0 when
/// there is no discrete part.
pub fn proof_integrals(spec: &DistributionSpec, t: f64, tau: f64, quad_tol: f64) -> Result<ProofIntegrals, HarnessError> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(HarnessError::Precondition(format!("tau must be > 0, got {tau}")));
    }
    let f = |s: f64| eval_part(spec, Part::Full, s).map(|v| v.norm()).unwrap_or(f64::NAN);
    let modulus_t = f(t);
    if !(modulus_t > MIN_MODULUS) {
        return Err(HarnessError::IllConditioned { t, modulus: modulus_t });
    }
    let freq = lipschitz_const(spec, Part::Full)?;
    let f2 = modulus_t * modulus_t;
    // I is J scaled by 1/|f(t)|^2; its tolerance is scaled the same way
    let (i_val, e1) = mean_over(|h| f(t - h) * f(t + h) / f2, tau, freq, quad_tol / f2)?;
    let (j_val, e2) = mean_over(|h| f(t - h) * f(t + h), tau, freq, quad_tol)?;
    let (j_d, e3) = match &spec.discrete {
        Some(d) if spec.c_d > 0.0 => mean_over(|h| d.cf(t - h).norm() * d.cf(t + h).norm(), tau, d.abs_moment(), quad_tol)?,
        _ => (0.0, 0.0),
    };
    let (j_c, e4) = if continuous_mix(spec).is_ok() {
        let lc = lipschitz_const(spec, Part::Continuous)?;
        mean_over(
            |h| eval_part(spec, Part::Continuous, t + h).map(|v| v.norm()).unwrap_or(f64::NAN),
            tau,
            lc,
            quad_tol,
        )?
    } else {
        (0.0, 0.0)
    };
    let a = match &spec.discrete {
        Some(d) if spec.c_d > 0.0 => Some(parseval_exact(&TrigPoly::from_discrete(d, t))?),
        _ => None,
    };
    Ok(ProofIntegrals {
        t,
        tau,
        I: i_val,
        J: j_val,
        J_d: j_d,
        J_c: j_c,
        A: a,
        modulus_t,
        identity_residual: (j_val - i_val * f2).abs(),
        chain_margin: j_val - (spec.c_d * spec.c_d * j_d - j_c),
        quadrature_error: (e1 * f2).max(e2).max(e3).max(e4),
    })
}

/// A finite sum `sum_k a_k e^{i w_k h}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    /// `(frequency, coefficient)` pairs.
    pub terms: Vec<(f64, Complex64)>,
}

impl TrigPoly {
    pub fn new(terms: Vec<(f64, Complex64)>) -> Self {
        Self { terms }
    }

    /// `h -> f_d(shift + h)`.
    pub fn from_discrete(d: &DiscretePart, shift: f64) -> Self {
        Self {
            terms: d
                .atoms
                .iter()
                .map(|a| (a.location, Complex64::from_polar(a.mass, a.location * shift)))
                .collect(),
        }
    }

    pub fn eval(&self, h: f64) -> Complex64 {
        self.terms.iter().map(|&(w, a)| a * Complex64::from_polar(1.0, w * h)).sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.0.abs()).fold(0.0, f64::max)
    }

    /// Coefficients of `h -> phi(h) phi(-h)`, with nearby frequencies merged.
    pub fn reflected_product(&self) -> Result<TrigPoly, HarnessError> {
        let mut raw: Vec<(f64, Complex64)> = Vec::with_capacity(self.terms.len() * self.terms.len());
        for &(wj, aj) in &self.terms {
            for &(wk, ak) in &self.terms {
                raw.push((wj - wk, aj * ak));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, Complex64)> = Vec::new();
        for (w, a) in raw {
            if let Some(last) = merged.last_mut() {
                let gap = w - last.0;
                if gap <= FREQ_MERGE_TOL {
                    last.1 += a;
                    continue;
                }
                if gap <= FREQ_AMBIGUITY_TOL {
                    return Err(HarnessError::FrequencyAmbiguity { a: last.0, b: w, gap });
                }
            }
            merged.push((w, a));
        }
        Ok(TrigPoly { terms: merged })
    }
}

/// `A = sum |b_k|^2` over the Fourier coefficients `b_k` of `phi(h) phi(-h)`.
pub fn parseval_exact(phi: &TrigPoly) -> Result<f64, HarnessError> {
    Ok(phi.reflected_product()?.terms.iter().map(|t| t.1.norm_sqr()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub a_exact: f64,
    /// `(T, (1/2T) int_{-T}^{T} |phi(h) phi(-h)|^2 dh)`.
    pub means: Vec<(f64, f64)>,
    pub frequencies: usize,
}

impl ParsevalReport {
    pub fn errors(&self) -> Vec<f64> {
        self.means.iter().map(|m| (m.1 - self.a_exact).abs()).collect()
    }
}

/// Parseval constant of `phi(h) phi(-h)`, by frequency algebra and by
/// mean-value quadrature at each window of `ladder`.
pub fn parseval_a(phi: &TrigPoly, ladder: &[f64]) -> Result<ParsevalReport, HarnessError> {
    let prod = phi.reflected_product()?;
    let a_exact = prod.terms.iter().map(|t| t.1.norm_sqr()).sum();
    let freq = 2.0 * phi.max_frequency();
    let means = ladder
        .iter()
        .map(|&w| {
            let (v, _) = mean_over(|h| (phi.eval(h) * phi.eval(-h)).norm_sqr(), w, freq, 1e-10)?;
            Ok((w, v))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ParsevalReport {
        a_exact,
        means,
        frequencies: prod.terms.len(),
    })
}

/// Points `t_{eps,k} + delta'` near a small value of `f_d`, with the bound
/// `|f_d| < 3 eps mu` checked on a grid of `delta' in [0, delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationChain {
    pub t_eps: f64,
    pub modulus_t_eps: f64,
    /// `(k, tau_{eps,k})`, `k = -n..=n`.
    pub taus: Vec<(i64, f64)>,
    /// `t_{eps,k} + delta < t_{eps,k+1} - delta` for every consecutive pair.
    pub disjoint: bool,
    /// Largest `|f_d(t_{eps,k} + delta')|` seen on the grid.
    pub max_modulus: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationStructure {
    pub epsilon: f64,
    pub mu: f64,
    /// Empirical inclusion length: largest gap between consecutive translation numbers.
    pub ell: f64,
    /// Translation numbers found in `[0, window]`, one per cluster.
    pub taus: Vec<f64>,
    /// Upper bound `sum_j 2 p_j |sin(x_j tau / 2)|` on the sup-difference, per tau.
    pub sup_bounds: Vec<f64>,
    /// Sup-difference sampled on a dense `t`-grid, per tau.
    pub sup_sampled: Vec<f64>,
    pub delta: f64,
    pub tau_step: f64,
    pub t_step: f64,
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<TranslationChain>,
}

fn translation_bound(d: &DiscretePart, tau: f64) -> f64 {
    d.atoms.iter().map(|a| 2.0 * a.mass * (0.5 * a.location * tau).sin().abs()).sum()
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..100 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    if fc <= fe {
        c
    } else {
        e
    }
}

/// Dense sample of `sup_t |f_d(t + tau) - f_d(t)|` over `t in [0, span]`.
fn sampled_sup(d: &DiscretePart, tau: f64, span: f64, step: f64) -> f64 {
    let n = (span / step).ceil() as usize;
    (0..=n)
        .map(|i| {
            let t = step * i as f64;
            (d.cf(t + tau) - d.cf(t)).norm()
        })
        .fold(0.0, f64::max)
}

/// Searches `[0, window]` for `eps mu`-translation numbers of `f_d`.
///
/// A shift `tau` is accepted when `sum_j 2 p_j |sin(x_j tau/2)| < eps mu`,
/// which bounds `sup_t |f_d(t + tau) - f_d(t)|` from above. Accepted shifts
/// form clusters; each cluster is represented by its best point. When
/// `t_eps` is given, the translates `t_eps + tau_{eps,k}` and the radius
/// `delta` are built and the smallness chain is checked on a grid.
pub fn translation_numbers(
    d: &DiscretePart,
    epsilon: f64,
    mu: f64,
    window: f64,
    t_eps: Option<f64>,
) -> Result<TranslationStructure, HarnessError> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(HarnessError::Precondition(format!("epsilon must lie in (0, 1/4), got {epsilon}")));
    }
    if !(mu > 0.0) || !(window > 0.0) || !window.is_finite() {
        return Err(HarnessError::Precondition("mu and window must be > 0".into()));
    }
    let target = epsilon * mu;
    let lip = d.abs_moment();
    if lip == 0.0 {
        return Err(HarnessError::Precondition("degenerate law at 0: every shift is a translation number".into()));
    }
    let tau_step = target / (10.0 * lip);
    let n = (window / tau_step).ceil() as usize;
    if n > 50_000_000 {
        return Err(HarnessError::Precondition(format!("window {window} needs {n} grid points")));
    }

    // clusters of accepted grid points, as index ranges
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for i in 0..=n {
        let ok = translation_bound(d, tau_step * i as f64) < target;
        match (ok, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                clusters.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        clusters.push((s, n));
    }
    let taus: Vec<f64> = clusters
        .iter()
        .map(|&(s, e)| {
            if s == 0 {
                return 0.0;
            }
            let a = tau_step * s.saturating_sub(1) as f64;
            let b = tau_step * (e + 1) as f64;
            let m = golden_min(|x| translation_bound(d, x), a, b);
            if translation_bound(d, m) < target {
                m
            } else {
                tau_step * ((s + e) / 2) as f64
            }
        })
        .collect();
    if taus.len() < 2 {
        return Err(HarnessError::NoTranslation { window });
    }
    let ell = taus.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let delta = (target / lip).min(0.5 * ell);

    let t_step = (target / (20.0 * lip)).min(0.01);
    let span = (2.0 * ell).max(100.0);
    let sup_bounds: Vec<f64> = taus.iter().map(|&tau| translation_bound(d, tau)).collect();
    let sup_sampled: Vec<f64> = taus.par_iter().map(|&tau| sampled_sup(d, tau, span, t_step)).collect();

    let chain = match t_eps {
        None => None,
        Some(t0) => {
            let m0 = d.cf(t0).norm();
            if !(m0 < target) {
                return Err(HarnessError::Precondition(format!(
                    "|f_d(t_eps)| = {m0} is not below eps mu = {target}"
                )));
            }
            // tau_{eps,k} from S_{eps,k} = [(2k - 1/2) ell, (2k + 1/2) ell]; negative k by symmetry
            let mut pos = vec![(0i64, 0.0)];
            let mut k = 1i64;
            loop {
                let lo = (2.0 * k as f64 - 0.5) * ell;
                let hi = (2.0 * k as f64 + 0.5) * ell;
                if hi > window {
                    break;
                }
                match taus.iter().find(|&&x| x >= lo && x <= hi) {
                    Some(&x) => pos.push((k, x)),
                    None => break,
                }
                k += 1;
            }
            let mut all: Vec<(i64, f64)> = pos.iter().rev().filter(|p| p.0 > 0).map(|&(k, x)| (-k, -x)).collect();
            all.extend(pos.iter().copied());
            let disjoint = all.windows(2).all(|w| (t0 + w[0].1) + delta < (t0 + w[1].1) - delta);
            let grid = linspace(0.0, delta, 64);
            let max_modulus = all
                .iter()
                .flat_map(|&(_, tau)| grid[..grid.len() - 1].iter().map(move |&dd| d.cf(t0 + tau + dd).norm()))
                .fold(0.0, f64::max);
            Some(TranslationChain {
                t_eps: t0,
                modulus_t_eps: m0,
                taus: all,
                disjoint,
                max_modulus,
                bound: 3.0 * target,
            })
        }
    };

    Ok(TranslationStructure {
        epsilon,
        mu,
        ell,
        taus,
        sup_bounds,
        sup_sampled,
        delta,
        tau_step,
        t_step,
        window,
        chain,
    })
}
