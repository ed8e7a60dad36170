//! Characteristic functions of the mixture parts and derived functionals:
//! the symmetrized modulus `|f_c|^2`, the mean value `M(t, T)` and
//! derivative (Lipschitz) bounds.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist_model::{
    continuous_mix, AbsContKind, AbsContPart, CantorLaw, DiscretePart, DistributionSpec,
};
use crate::quad::{integrate, QuadOptions};

/// A characteristic-function value.
pub type CfValue = Complex64;

/// Cantor products stop once `scale |t| / 3^k` falls below this.
pub const CANTOR_TRUNCATION: f64 = 1e-8;
/// Hard cap on the number of Cantor factors.
pub const CANTOR_MAX_DEPTH: usize = 64;
/// Target absolute error of `M(t, T)`.
pub const MEAN_VALUE_TOL: f64 = 1e-9;
/// `M(t, T)` is reported as failed when its error bound exceeds this.
pub const MEAN_VALUE_FAIL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "d")]
    Discrete,
    #[serde(rename = "a")]
    AbsCont,
    #[serde(rename = "s")]
    Singular,
    #[serde(rename = "c")]
    Continuous,
}

impl Part {
    pub const ALL: [Part; 5] = [Part::Full, Part::Discrete, Part::AbsCont, Part::Singular, Part::Continuous];

    pub fn as_str(&self) -> &'static str {
        match self {
            Part::Full => "full",
            Part::Discrete => "d",
            Part::AbsCont => "a",
            Part::Singular => "s",
            Part::Continuous => "c",
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Part {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" | "f" => Ok(Part::Full),
            "d" | "discrete" => Ok(Part::Discrete),
            "a" | "abscont" => Ok(Part::AbsCont),
            "s" | "singular" => Ok(Part::Singular),
            "c" | "continuous" => Ok(Part::Continuous),
            other => Err(format!("unknown part `{other}` (expected full, d, a, s or c)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharFnError {
    #[error("the spec has no `{0}` part")]
    MissingPart(Part),
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("c_d = 1: the continuous part is not defined")]
    NoContinuousPart,
    #[error("window half-width must be > 0, got {0}")]
    BadWindow(f64),
    #[error("mean-value quadrature did not reach its target (error bound {error:e})")]
    Quadrature { error: f64 },
}

fn unit(phase: f64) -> Complex64 {
    let (s, c) = phase.sin_cos();
    Complex64::new(c, s)
}

/// `sin(x) / x` with the removable singularity filled in.
pub(crate) fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

impl AbsContKind {
    pub fn cf(&self, t: f64) -> Complex64 {
        match *self {
            AbsContKind::Gaussian { mean, variance } => unit(mean * t) * (-0.5 * variance * t * t).exp(),
            AbsContKind::Uniform { a, b } => unit(0.5 * (a + b) * t) * sinc(0.5 * (b - a) * t),
            AbsContKind::Exponential { rate } => Complex64::new(rate, 0.0) / Complex64::new(rate, -t),
            AbsContKind::Laplace { mean, scale } => unit(mean * t) / (1.0 + scale * scale * t * t),
        }
    }

    /// Upper bound on `E|X|`, hence on `|d/dt cf(t)|`.
    pub fn abs_moment_bound(&self) -> f64 {
        match *self {
            AbsContKind::Gaussian { mean, variance } => mean.abs() + (variance * FRAC_2_PI).sqrt(),
            AbsContKind::Uniform { a, b } => {
                if a < 0.0 && b > 0.0 {
                    (a * a + b * b) / (2.0 * (b - a))
                } else {
                    0.5 * (a + b).abs()
                }
            }
            AbsContKind::Exponential { rate } => 1.0 / rate,
            AbsContKind::Laplace { mean, scale } => mean.abs() + scale * (-mean.abs() / scale).exp(),
        }
    }

    /// Upper bound on `sup_{|t| >= t0} |cf(t)|` for `t0 > 0`.
    pub fn tail_modulus_bound(&self, t0: f64) -> f64 {
        let t0 = t0.abs();
        match *self {
            AbsContKind::Gaussian { variance, .. } => (-0.5 * variance * t0 * t0).exp(),
            AbsContKind::Uniform { a, b } => (2.0 / ((b - a) * t0)).min(1.0),
            AbsContKind::Exponential { rate } => 1.0 / (1.0 + (t0 / rate).powi(2)).sqrt(),
            AbsContKind::Laplace { scale, .. } => 1.0 / (1.0 + scale * scale * t0 * t0),
        }
    }

    /// Upper bound on `sup_{|t| >= t0} |cf'(t)|`.
    pub fn tail_derivative_bound(&self, t0: f64) -> f64 {
        let t0 = t0.abs();
        match *self {
            AbsContKind::Gaussian { mean, variance } => {
                // (|m| + v t) e^{-v t^2 / 2} decreases once v t^2 + |m| t >= 1
                let m = mean.abs();
                let peak = (-m + (m * m + 4.0 * variance).sqrt()) / (2.0 * variance);
                let t = t0.max(peak);
                (m + variance * t) * (-0.5 * variance * t * t).exp()
            }
            AbsContKind::Uniform { a, b } => {
                let w = 0.5 * (b - a);
                let u = w * t0;
                let sinc_slope = if u > 0.0 { (1.0 / u + 1.0 / (u * u)).min(1.0) } else { 1.0 };
                0.5 * (a + b).abs() * self.tail_modulus_bound(t0) + w * sinc_slope
            }
            AbsContKind::Exponential { rate } => rate / (rate * rate + t0 * t0),
            AbsContKind::Laplace { mean, scale } => {
                let u = (scale * t0).max(1.0 / 3f64.sqrt());
                mean.abs() / (1.0 + scale * scale * t0 * t0) + 2.0 * scale * u / (1.0 + u * u).powi(2)
            }
        }
    }
}

impl AbsContPart {
    pub fn cf(&self, t: f64) -> Complex64 {
        self.components.iter().map(|c| c.kind.cf(t) * c.weight).sum()
    }

    pub fn abs_moment_bound(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.kind.abs_moment_bound()).sum()
    }

    pub fn tail_modulus_bound(&self, t0: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.kind.tail_modulus_bound(t0)).sum()
    }

    pub fn tail_derivative_bound(&self, t0: f64) -> f64 {
        self.components.iter().map(|c| c.weight * c.kind.tail_derivative_bound(t0)).sum()
    }
}

impl DiscretePart {
    pub fn cf(&self, t: f64) -> Complex64 {
        self.atoms.iter().map(|a| unit(a.location * t) * a.mass).sum()
    }

    pub fn abs_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.location.abs()).sum()
    }
}

fn pow3(k: usize) -> f64 {
    3f64.powi(k as i32)
}

impl CantorLaw {
    /// Number of product factors used at `t`.
    pub fn truncation_depth(&self, t: f64) -> usize {
        let x = (self.scale * t).abs();
        (1..=CANTOR_MAX_DEPTH)
            .find(|&k| x / pow3(k) < CANTOR_TRUNCATION)
            .unwrap_or(CANTOR_MAX_DEPTH)
    }

    /// `e^{it(offset + scale/2)} prod_{k>=1} cos(scale t / 3^k)`, truncated.
    pub fn cf(&self, t: f64) -> Complex64 {
        let depth = self.truncation_depth(t);
        self.cf_with_depth(t, depth)
    }

    /// The product with exactly `depth` cosine factors.
    pub fn cf_with_depth(&self, t: f64, depth: usize) -> Complex64 {
        let x = self.scale * t;
        let prod: f64 = (1..=depth).map(|k| (x / pow3(k)).cos()).product();
        unit((self.offset + 0.5 * self.scale) * t) * prod
    }

    /// Support bound `max |x|` over `[offset, offset + scale]`, an upper bound on `E|X|`.
    pub fn abs_moment_bound(&self) -> f64 {
        self.offset.abs() + self.scale
    }
}

fn check_t(t: f64) -> Result<(), CharFnError> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(CharFnError::NonFinite(t))
    }
}

/// `f_c(t) = (c_a f_a(t) + c_s f_s(t)) / (c_a + c_s)`.
fn continuous_cf(spec: &DistributionSpec, t: f64) -> Result<Complex64, CharFnError> {
    let mix = continuous_mix(spec).map_err(|_| CharFnError::NoContinuousPart)?;
    let mut v = Complex64::new(0.0, 0.0);
    if let Some(a) = &spec.abscont {
        v += a.cf(t) * mix.abscont_share;
    }
    if let Some(s) = &spec.singular {
        v += s.cantor.cf(t) * mix.singular_share;
    }
    Ok(v)
}

/// Evaluates the characteristic function of one part of the spec at `t`.
pub fn eval_part(spec: &DistributionSpec, part: Part, t: f64) -> Result<CfValue, CharFnError> {
    check_t(t)?;
    match part {
        Part::Full => {
            let mut v = Complex64::new(0.0, 0.0);
            if let Some(d) = &spec.discrete {
                v += d.cf(t) * spec.c_d;
            }
            if let Some(a) = &spec.abscont {
                v += a.cf(t) * spec.c_a;
            }
            if let Some(s) = &spec.singular {
                v += s.cantor.cf(t) * spec.c_s;
            }
            Ok(v)
        }
        Part::Discrete => spec
            .discrete
            .as_ref()
            .map(|d| d.cf(t))
            .ok_or(CharFnError::MissingPart(part)),
        Part::AbsCont => spec
            .abscont
            .as_ref()
            .map(|a| a.cf(t))
            .ok_or(CharFnError::MissingPart(part)),
        Part::Singular => spec
            .singular
            .as_ref()
            .map(|s| s.cantor.cf(t))
            .ok_or(CharFnError::MissingPart(part)),
        Part::Continuous => continuous_cf(spec, t),
    }
}

/// `|f_c(t)|^2`, the characteristic function of the symmetrized continuous part.
pub fn symmetrized_modulus_sq(spec: &DistributionSpec, t: f64) -> Result<f64, CharFnError> {
    check_t(t)?;
    Ok(continuous_cf(spec, t)?.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub t: f64,
    /// Half-width of the averaging window.
    pub window: f64,
    pub value: f64,
    pub quadrature_error: f64,
}

fn single_gaussian(spec: &DistributionSpec) -> Option<f64> {
    if spec.singular.is_some() {
        return None;
    }
    match spec.abscont.as_ref()?.components.as_slice() {
        [c] => match c.kind {
            AbsContKind::Gaussian { variance, .. } => Some(variance),
            _ => None,
        },
        _ => None,
    }
}

/// `int_{lo}^{hi} e^{-v s^2} ds`, written with `erfc` on the far side of zero
/// so that both ends in one tail do not cancel.
fn gaussian_sq_integral(v: f64, lo: f64, hi: f64) -> f64 {
    let r = v.sqrt();
    let k = 0.5 * (PI / v).sqrt();
    if lo >= 0.0 {
        k * (libm::erfc(r * lo) - libm::erfc(r * hi))
    } else if hi <= 0.0 {
        k * (libm::erfc(-r * hi) - libm::erfc(-r * lo))
    } else {
        k * (libm::erf(r * hi) - libm::erf(r * lo))
    }
}

/// `M(t, T) = (1/2T) int_{-T}^{T} |f_c(t + h)|^2 dh`.
pub fn mean_value(spec: &DistributionSpec, t: f64, window: f64) -> Result<MeanValue, CharFnError> {
    check_t(t)?;
    if !(window > 0.0) || !window.is_finite() {
        return Err(CharFnError::BadWindow(window));
    }
    continuous_mix(spec).map_err(|_| CharFnError::NoContinuousPart)?;
    if let Some(v) = single_gaussian(spec) {
        let value = gaussian_sq_integral(v, t - window, t + window) / (2.0 * window);
        return Ok(MeanValue {
            t,
            window,
            value,
            quadrature_error: 0.0,
        });
    }
    let lip = lipschitz_const(spec, Part::Continuous)?;
    let panel_width = 1.0 / (1.0 + lip);
    let panels = ((2.0 * window / panel_width).ceil() as usize).clamp(1, 50_000);
    let opts = QuadOptions {
        abs_tol: MEAN_VALUE_TOL * 2.0 * window,
        max_panels: 400_000,
        initial_panels: panels,
    };
    let r = integrate(
        |h: f64| continuous_cf(spec, t + h).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
        -window,
        window,
        &opts,
    );
    let value = r.value / (2.0 * window);
    let quadrature_error = r.error / (2.0 * window);
    if !value.is_finite() || quadrature_error > MEAN_VALUE_FAIL {
        return Err(CharFnError::Quadrature { error: quadrature_error });
    }
    Ok(MeanValue {
        t,
        window,
        value,
        quadrature_error,
    })
}

/// Upper bound `L` on `|d/dt|` of the part's characteristic function.
pub fn lipschitz_const(spec: &DistributionSpec, part: Part) -> Result<f64, CharFnError> {
    let d = || spec.discrete.as_ref().map(|d| d.abs_moment());
    let a = || spec.abscont.as_ref().map(|a| a.abs_moment_bound());
    let s = || spec.singular.as_ref().map(|s| s.cantor.abs_moment_bound());
    match part {
        Part::Full => Ok(spec.c_d * d().unwrap_or(0.0) + spec.c_a * a().unwrap_or(0.0) + spec.c_s * s().unwrap_or(0.0)),
        Part::Discrete => d().ok_or(CharFnError::MissingPart(part)),
        Part::AbsCont => a().ok_or(CharFnError::MissingPart(part)),
        Part::Singular => s().ok_or(CharFnError::MissingPart(part)),
        Part::Continuous => {
            let mix = continuous_mix(spec).map_err(|_| CharFnError::NoContinuousPart)?;
            Ok(mix.abscont_share * a().unwrap_or(0.0) + mix.singular_share * s().unwrap_or(0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist_model::{Atom, SingularPart};

    fn bern(p: f64) -> DistributionSpec {
        DistributionSpec::discrete(vec![Atom::new(0.0, 1.0 - p), Atom::new(1.0, p)])
    }

    fn gauss() -> DistributionSpec {
        DistributionSpec::abscont(AbsContPart::single(AbsContKind::Gaussian { mean: 0.0, variance: 1.0 }))
    }

    #[test]
    fn degenerate_atom_is_constant() {
        let spec = DistributionSpec::discrete(vec![Atom::new(0.0, 1.0)]);
        for t in [-7.0, 0.0, 3.3, 1e6] {
            assert_eq!(eval_part(&spec, Part::Discrete, t).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert_eq!(lipschitz_const(&spec, Part::Discrete).unwrap(), 0.0);
    }

    #[test]
    fn fair_coin_vanishes_at_pi() {
        let v = eval_part(&bern(0.5), Part::Discrete, PI).unwrap();
        assert!(v.norm() < 1e-16);
    }

    #[test]
    fn gaussian_closed_form() {
        let v = eval_part(&gauss(), Part::AbsCont, 1.0).unwrap();
        assert!((v - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 1e-15);
        assert!((v.re - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn cantor_self_similarity_at_one_point() {
        let c = CantorLaw::STANDARD;
        let t = 1.7;
        let lhs = c.cf(3.0 * t);
        let rhs = unit(t) * t.cos() * c.cf(t);
        assert!((lhs - rhs).norm() < 1e-10);
        // oracle: a fixed, deeper product
        let deep = c.cf_with_depth(t, 60);
        assert!((c.cf(t) - deep).norm() < 1e-14);
        assert!(c.truncation_depth(1e20) <= CANTOR_MAX_DEPTH);
    }

    #[test]
    fn missing_parts_and_bad_arguments() {
        assert_eq!(eval_part(&gauss(), Part::Discrete, 1.0), Err(CharFnError::MissingPart(Part::Discrete)));
        assert!(matches!(eval_part(&gauss(), Part::Full, f64::NAN), Err(CharFnError::NonFinite(_))));
        assert!(matches!(eval_part(&gauss(), Part::Full, f64::INFINITY), Err(CharFnError::NonFinite(_))));
        assert_eq!(symmetrized_modulus_sq(&bern(0.3), 1.0), Err(CharFnError::NoContinuousPart));
        assert_eq!(mean_value(&bern(0.3), 0.0, 1.0), Err(CharFnError::NoContinuousPart));
        assert_eq!(mean_value(&gauss(), 0.0, 0.0), Err(CharFnError::BadWindow(0.0)));
    }

    #[test]
    fn symmetrized_modulus_examples() {
        assert_eq!(symmetrized_modulus_sq(&gauss(), 0.0).unwrap(), 1.0);
        assert!((symmetrized_modulus_sq(&gauss(), 1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        let u = DistributionSpec::abscont(AbsContPart::single(AbsContKind::Uniform { a: -1.0, b: 1.0 }));
        assert!(symmetrized_modulus_sq(&u, PI).unwrap() < 1e-30);
    }

    #[test]
    fn gaussian_mean_value_closed_form() {
        let m = mean_value(&gauss(), 0.0, 10.0).unwrap();
        let expected = PI.sqrt() / 20.0 * libm::erf(10.0);
        assert!((m.value - expected).abs() < 1e-15);
        assert_eq!(m.quadrature_error, 0.0);
        assert!((m.value - 0.08862).abs() < 1e-5);
        // far from the origin the erfc branch keeps precision
        let far = mean_value(&gauss(), 20.0, 10.0).unwrap();
        let brute = crate::quad::simpson(|s: f64| (-s * s).exp(), 10.0, 30.0, 200_000) / 20.0;
        assert!(brute > 0.0);
        assert!((far.value - brute).abs() < brute * 1e-7, "{} vs {}", far.value, brute);
    }

    #[test]
    fn uniform_mean_value_matches_brute_force() {
        let u = DistributionSpec::abscont(AbsContPart::single(AbsContKind::Uniform { a: -1.0, b: 1.0 }));
        let m = mean_value(&u, 0.0, 100.0).unwrap();
        let brute = crate::quad::simpson(|h: f64| sinc(h).powi(2), -100.0, 100.0, 1_000_000) / 200.0;
        assert!((m.value - brute).abs() < 1e-8, "{} vs {}", m.value, brute);
        assert!(m.value <= 1.0 + m.quadrature_error);
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(lipschitz_const(&bern(0.25), Part::Discrete).unwrap(), 0.25);
        assert!((lipschitz_const(&gauss(), Part::AbsCont).unwrap() - 0.79788).abs() < 1e-5);
        let s = DistributionSpec::singular(CantorLaw { offset: -2.0, scale: 3.0 });
        assert_eq!(lipschitz_const(&s, Part::Singular).unwrap(), 5.0);
    }

    #[test]
    fn continuous_part_mixes_renormalized() {
        let spec = DistributionSpec {
            c_d: 0.2,
            c_a: 0.4,
            c_s: 0.4,
            discrete: Some(DiscretePart::new(vec![Atom::new(0.0, 1.0)])),
            abscont: Some(AbsContPart::single(AbsContKind::Gaussian { mean: 0.0, variance: 1.0 })),
            singular: Some(SingularPart { cantor: CantorLaw::STANDARD }),
        };
        let t = 0.9;
        let c = eval_part(&spec, Part::Continuous, t).unwrap();
        let expected = 0.5 * AbsContKind::Gaussian { mean: 0.0, variance: 1.0 }.cf(t) + 0.5 * CantorLaw::STANDARD.cf(t);
        assert!((c - expected).norm() < 1e-15);
        let full = eval_part(&spec, Part::Full, t).unwrap();
        assert!((full - (0.2 + 0.8 * c)).norm() < 1e-15);
    }
}
