//! Spectral pairs `(gamma, G)` with a signed spectral measure `G`, the
//! Lévy–Khintchine-type exponent
//!
//! ```text
//! psi(t) = i t gamma + int (e^{itx} - 1 - i t sin x) (1 + x^2) / x^2 dG(x),
//! ```
//!
//! its Hahn–Jordan split into two classical (nonnegative) pairs, and the
//! recovery of `(gamma, G)` from the characteristic function of a zero-free
//! lattice law.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charfn::CfValue;
use crate::dist_model::DiscretePart;
use crate::quad::{integrate, QuadOptions};

/// Absolute quadrature target for density-segment integrals.
pub const SEGMENT_QUAD_TOL: f64 = 1e-12;
/// `lk_charfn` refuses exponents whose real part exceeds this.
pub const MAX_EXPONENT_RE: f64 = 700.0;
/// Extraction refuses characteristic functions whose modulus dips below this.
pub const ZERO_HIT: f64 = 1e-9;
/// Largest tolerated Fourier coefficient in the trailing band.
pub const ALIASING_TOL: f64 = 1e-10;
/// Round-trip tolerance of extracted pairs.
pub const ROUND_TRIP_TOL: f64 = 1e-8;
/// Extracted Fourier coefficients below this are dropped.
pub const COEFFICIENT_FLOOR: f64 = 1e-15;
const MAX_GRID: usize = 1 << 20;

/// A point mass of `G`, serialized as `[location, weight]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct SpectralAtom {
    pub location: f64,
    pub weight: f64,
}

impl From<[f64; 2]> for SpectralAtom {
    fn from(v: [f64; 2]) -> Self {
        Self {
            location: v[0],
            weight: v[1],
        }
    }
}

impl From<SpectralAtom> for [f64; 2] {
    fn from(a: SpectralAtom) -> Self {
        [a.location, a.weight]
    }
}

/// Constant density `level` on `[start, end)`, serialized as `[start, end, level]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct DensitySegment {
    pub start: f64,
    pub end: f64,
    pub level: f64,
}

impl From<[f64; 3]> for DensitySegment {
    fn from(v: [f64; 3]) -> Self {
        Self {
            start: v[0],
            end: v[1],
            level: v[2],
        }
    }
}

impl From<DensitySegment> for [f64; 3] {
    fn from(s: DensitySegment) -> Self {
        [s.start, s.end, s.level]
    }
}

/// A finite signed measure: weighted atoms plus piecewise-constant density.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SignedMeasure {
    #[serde(default)]
    pub atoms: Vec<SpectralAtom>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<DensitySegment>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid signed measure: {0}")]
    InvalidMeasure(String),
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("exponent real part {re} at t = {t} overflows exp")]
    Overflow { t: f64, re: f64 },
    #[error("discrete part has no lattice structure; extraction needs a period")]
    NotLattice,
    #[error("characteristic function modulus {modulus:e} at t = {t} is below {ZERO_HIT:e}; no logarithm exists")]
    ZeroHit { t: f64, modulus: f64 },
    #[error("trailing Fourier coefficients reach {max_trailing:e} on a {grid}-point grid (aliasing)")]
    Aliasing { max_trailing: f64, grid: usize },
    #[error("extracted pair misses the characteristic function by {error:e}")]
    RoundTrip { error: f64 },
    #[error("malformed pair JSON: {0}")]
    Json(String),
}

impl SignedMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, SpectralError> {
        Self::new(
            atoms
                .into_iter()
                .map(|(location, weight)| SpectralAtom { location, weight })
                .collect(),
            Vec::new(),
        )
    }

    /// Builds a measure, sorting atoms and segments and checking the invariants.
    pub fn new(mut atoms: Vec<SpectralAtom>, mut segments: Vec<DensitySegment>) -> Result<Self, SpectralError> {
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        segments.sort_by(|a, b| a.start.total_cmp(&b.start));
        let m = Self { atoms, segments };
        m.check()?;
        Ok(m)
    }

    pub fn check(&self) -> Result<(), SpectralError> {
        let bad = |msg: String| Err(SpectralError::InvalidMeasure(msg));
        for a in &self.atoms {
            if !a.location.is_finite() || !a.weight.is_finite() {
                return bad(format!("non-finite atom [{}, {}]", a.location, a.weight));
            }
            if a.weight == 0.0 {
                return bad(format!("zero-weight atom at {}", a.location));
            }
        }
        for w in self.atoms.windows(2) {
            if !(w[0].location < w[1].location) {
                return bad(format!("atom locations must be distinct and sorted ({} then {})", w[0].location, w[1].location));
            }
        }
        for s in &self.segments {
            if !s.start.is_finite() || !s.end.is_finite() || !s.level.is_finite() || !(s.start < s.end) {
                return bad(format!("bad segment [{}, {}) level {}", s.start, s.end, s.level));
            }
        }
        for w in self.segments.windows(2) {
            if w[1].start < w[0].end {
                return bad(format!("segments [{}, {}) and [{}, {}) overlap", w[0].start, w[0].end, w[1].start, w[1].end));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.weight == 0.0) && self.segments.iter().all(|s| s.level == 0.0)
    }

    /// Signed total mass `G(R)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.segments.iter().map(|s| s.level * (s.end - s.start)).sum::<f64>()
    }

    /// Hahn–Jordan split `G = G+ - G-` into nonnegative measures.
    pub fn jordan(&self) -> (SignedMeasure, SignedMeasure) {
        let split_atoms = |positive: bool| {
            self.atoms
                .iter()
                .filter(|a| (a.weight > 0.0) == positive && a.weight != 0.0)
                .map(|a| SpectralAtom {
                    location: a.location,
                    weight: a.weight.abs(),
                })
                .collect::<Vec<_>>()
        };
        let split_segments = |positive: bool| {
            self.segments
                .iter()
                .filter(|s| (s.level > 0.0) == positive && s.level != 0.0)
                .map(|s| DensitySegment { level: s.level.abs(), ..*s })
                .collect::<Vec<_>>()
        };
        (
            SignedMeasure {
                atoms: split_atoms(true),
                segments: split_segments(true),
            },
            SignedMeasure {
                atoms: split_atoms(false),
                segments: split_segments(false),
            },
        )
    }
}

/// Total variation `||G|| = G+(R) + G-(R)`.
pub fn total_variation(g: &SignedMeasure) -> f64 {
    g.atoms.iter().map(|a| a.weight.abs()).sum::<f64>()
        + g.segments.iter().map(|s| s.level.abs() * (s.end - s.start)).sum::<f64>()
}

/// Shift `gamma` together with the spectral measure `G`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectralPair {
    pub gamma: f64,
    #[serde(flatten)]
    pub measure: SignedMeasure,
}

impl SpectralPair {
    pub fn new(gamma: f64, measure: SignedMeasure) -> Self {
        Self { gamma, measure }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `gamma = sin(1)`, `G = (1/2) delta_1`: the Poisson(1) law.
    pub fn poisson(rate: f64, jump: f64) -> Self {
        let w = rate * jump * jump / (1.0 + jump * jump);
        Self::new(
            rate * jump.sin(),
            SignedMeasure {
                atoms: vec![SpectralAtom { location: jump, weight: w }],
                segments: vec![],
            },
        )
    }

    /// `G = variance * delta_0`: the centered Gaussian law.
    pub fn gaussian(variance: f64) -> Self {
        Self::new(
            0.0,
            SignedMeasure {
                atoms: vec![SpectralAtom {
                    location: 0.0,
                    weight: variance,
                }],
                segments: vec![],
            },
        )
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let pair: SpectralPair = serde_json::from_str(text).map_err(|e| SpectralError::Json(e.to_string()))?;
        let measure = SignedMeasure::new(pair.measure.atoms, pair.measure.segments)?;
        if !pair.gamma.is_finite() {
            return Err(SpectralError::InvalidMeasure(format!("gamma = {}", pair.gamma)));
        }
        Ok(Self::new(pair.gamma, measure))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pair serialization cannot fail")
    }

    pub fn total_variation(&self) -> f64 {
        total_variation(&self.measure)
    }
}

/// `(sin(tx) - t sin x) / x^2` near the origin, by its odd power series.
fn odd_remainder_series(t: f64, x: f64) -> f64 {
    let u = t * x;
    // term_n = (-1)^{(n-1)/2} (t^2 u^{n-2} - t x^{n-2}) / n!, n = 3, 5, ...
    let mut sum = 0.0;
    let mut up = u; // u^{n-2}
    let mut xp = x; // x^{n-2}
    let mut fact = 6.0; // n!
    let mut sign = -1.0;
    let mut n = 3.0;
    while n < 22.0 {
        sum += sign * (t * t * up - t * xp) / fact;
        up *= u * u;
        xp *= x * x;
        fact *= (n + 1.0) * (n + 2.0);
        sign = -sign;
        n += 2.0;
    }
    sum
}

/// Integrand `(e^{itx} - 1 - i t sin x)(1 + x^2)/x^2`, continued to `-t^2/2` at `x = 0`.
pub fn lk_kernel(t: f64, x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(-0.5 * t * t, 0.0);
    }
    let s = (0.5 * t * x).sin();
    let q = s / x;
    // (cos(tx) - 1)(1 + x^2)/x^2 = -2 sin^2(tx/2) (1/x^2 + 1)
    let re = -2.0 * (q * q + s * s);
    let rem = if x.abs() < 0.1 && (t * x).abs() < 0.1 {
        odd_remainder_series(t, x)
    } else {
        ((t * x).sin() - t * x.sin()) / (x * x)
    };
    Complex64::new(re, rem * (1.0 + x * x))
}

pub(crate) fn segment_integral<F: Fn(f64) -> Complex64>(f: F, seg: &DensitySegment, t: f64) -> Complex64 {
    let len = seg.end - seg.start;
    let freq = t.abs().max(1.0);
    let panels = ((len * freq / PI).ceil() as usize).clamp(1, 10_000);
    let opts = QuadOptions {
        abs_tol: SEGMENT_QUAD_TOL,
        max_panels: 100_000,
        initial_panels: panels,
    };
    integrate(f, seg.start, seg.end, &opts).value * seg.level
}

/// `psi(t)`: the exponent of the Lévy–Khintchine-type representation.
pub fn lk_exponent(pair: &SpectralPair, t: f64) -> Result<Complex64, SpectralError> {
    if !t.is_finite() {
        return Err(SpectralError::NonFinite(t));
    }
    let mut psi = Complex64::new(0.0, t * pair.gamma);
    for a in &pair.measure.atoms {
        psi += lk_kernel(t, a.location) * a.weight;
    }
    for seg in &pair.measure.segments {
        psi += segment_integral(|x| lk_kernel(t, x), seg, t);
    }
    Ok(psi)
}

/// `f(t) = exp(psi(t))`.
pub fn lk_charfn(pair: &SpectralPair, t: f64) -> Result<CfValue, SpectralError> {
    let psi = lk_exponent(pair, t)?;
    if psi.re > MAX_EXPONENT_RE {
        return Err(SpectralError::Overflow { t, re: psi.re });
    }
    Ok(psi.exp())
}

/// Splits a pair into `(gamma, G+)` and `(0, G-)`, so that
/// `f = f_plus / f_minus` with both factors infinitely divisible.
pub fn hahn_jordan(pair: &SpectralPair) -> (SpectralPair, SpectralPair) {
    let (plus, minus) = pair.measure.jordan();
    (SpectralPair::new(pair.gamma, plus), SpectralPair::new(0.0, minus))
}

/// Result of recovering the spectral pair of a lattice law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeExtraction {
    pub pair: SpectralPair,
    /// Fourier coefficients `c_k` of the periodic part of `log f`, `k != 0`.
    pub coefficients: Vec<(i64, f64)>,
    /// Largest imaginary part seen among the coefficients (should vanish).
    pub max_imag: f64,
    /// Net winding number of `f e^{-irt}` over one period.
    pub winding: i64,
    pub offset: f64,
    pub span: f64,
    pub grid: usize,
    /// Largest `|lk_charfn(pair, t) - f_d(t)|` over the check points.
    pub round_trip_error: f64,
}

impl LatticeExtraction {
    pub fn coefficient(&self, k: i64) -> f64 {
        self.coefficients
            .iter()
            .find(|(j, _)| *j == k)
            .map(|(_, c)| *c)
            .unwrap_or(0.0)
    }
}

fn wrap_angle(a: f64) -> f64 {
    let mut w = a % TAU;
    if w > PI {
        w -= TAU;
    } else if w <= -PI {
        w += TAU;
    }
    w
}

struct UnwrappedLog {
    log: Vec<Complex64>,
    winding: i64,
    max_step: f64,
}

/// Continuous logarithm of samples of a zero-free periodic function over
/// one full period, with the linear winding term removed.
fn unwrap_log(samples: &[Complex64]) -> UnwrappedLog {
    let n = samples.len();
    let mut phase = Vec::with_capacity(n);
    let mut acc = samples[0].arg();
    let mut max_step: f64 = 0.0;
    phase.push(acc);
    for j in 1..n {
        let step = wrap_angle(samples[j].arg() - samples[j - 1].arg());
        max_step = max_step.max(step.abs());
        acc += step;
        phase.push(acc);
    }
    let closing = wrap_angle(samples[0].arg() - samples[n - 1].arg());
    max_step = max_step.max(closing.abs());
    let total = acc + closing - phase[0];
    let winding = (total / TAU).round() as i64;
    let log = samples
        .iter()
        .zip(&phase)
        .enumerate()
        .map(|(j, (z, &ph))| {
            let theta = TAU * j as f64 / n as f64;
            Complex64::new(z.norm().ln(), ph - winding as f64 * theta)
        })
        .collect();
    UnwrappedLog { log, winding, max_step }
}

/// Recovers `(gamma, G)` for a zero-free lattice law on `r + h Z`.
///
/// `f_d(t) e^{-irt}` is sampled over one period, its continuous logarithm
/// is split into the winding drift `i t h w` and a periodic remainder whose
/// Fourier coefficients `c_k` give `G`-atoms at `h k` of weight
/// `c_k (hk)^2 / (1 + (hk)^2)`, and
/// `gamma = r + h w + sum_k c_k sin(hk)`.
pub fn extract_lattice_spectral(d: &DiscretePart) -> Result<LatticeExtraction, SpectralError> {
    let hint = d
        .lattice_hint
        .or_else(|| crate::dist_model::infer_lattice(&d.atoms))
        .ok_or(SpectralError::NotLattice)?;
    let (r, h) = (hint.offset, hint.span);
    let ks: Vec<(i64, f64)> = d
        .atoms
        .iter()
        .map(|a| {
            hint.index_of(a.location)
                .map(|k| (k, a.mass))
                .ok_or(SpectralError::NotLattice)
        })
        .collect::<Result<_, _>>()?;
    let kmin = ks.iter().map(|p| p.0).min().unwrap_or(0);
    let kmax = ks.iter().map(|p| p.0).max().unwrap_or(0);
    let span_k = (kmax - kmin) as usize + 1;
    let mut n = (8 * d.atoms.len()).max(4 * span_k).max(256).next_power_of_two();

    // g(theta) = sum p_k e^{i k theta}, theta = h t
    let g = |theta: f64| -> Complex64 {
        ks.iter()
            .map(|&(k, p)| {
                let (s, c) = (k as f64 * theta).sin_cos();
                Complex64::new(c, s) * p
            })
            .sum()
    };

    let mut planner = FftPlanner::<f64>::new();
    loop {
        let samples: Vec<Complex64> = (0..n).map(|j| g(TAU * j as f64 / n as f64)).collect();
        if let Some((j, z)) = samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        {
            if z.norm() < ZERO_HIT {
                return Err(SpectralError::ZeroHit {
                    t: TAU * j as f64 / (n as f64 * h),
                    modulus: z.norm(),
                });
            }
        }
        let unwrapped = unwrap_log(&samples);
        let mut buf = unwrapped.log.clone();
        planner.plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let coeff = |k: i64| -> Complex64 {
            let idx = if k >= 0 { k as usize } else { (n as i64 + k) as usize };
            buf[idx] * scale
        };
        let half = (n / 2) as i64;
        let max_trailing = (half / 2..half)
            .flat_map(|k| [coeff(k).norm(), coeff(-k).norm()])
            .fold(0.0, f64::max);
        let resolved = unwrapped.max_step < 0.5 * PI;
        if max_trailing > ALIASING_TOL || !resolved {
            if n >= MAX_GRID {
                return Err(SpectralError::Aliasing { max_trailing, grid: n });
            }
            n *= 2;
            continue;
        }

        let mut coefficients = Vec::new();
        let mut max_imag: f64 = 0.0;
        for k in (1 - half)..half {
            if k == 0 {
                continue;
            }
            let c = coeff(k);
            max_imag = max_imag.max(c.im.abs());
            if c.re.abs() > COEFFICIENT_FLOOR {
                coefficients.push((k, c.re));
            }
        }
        let mut gamma = r + h * unwrapped.winding as f64;
        let mut atoms = Vec::with_capacity(coefficients.len());
        for &(k, c) in &coefficients {
            let x = h * k as f64;
            gamma += c * x.sin();
            atoms.push(SpectralAtom {
                location: x,
                weight: c * x * x / (1.0 + x * x),
            });
        }
        let pair = SpectralPair::new(gamma, SignedMeasure { atoms, segments: vec![] });

        // check between the sampling nodes, where aliasing would show
        let period = TAU / h;
        let mut round_trip_error: f64 = 0.0;
        for j in 0..n {
            let t = (j as f64 + 0.5) * period / n as f64;
            let direct = d.cf(t);
            let synth = lk_charfn(&pair, t)?;
            round_trip_error = round_trip_error.max((direct - synth).norm());
        }
        if round_trip_error > ROUND_TRIP_TOL {
            return Err(SpectralError::RoundTrip { error: round_trip_error });
        }
        return Ok(LatticeExtraction {
            pair,
            coefficients,
            max_imag,
            winding: unwrapped.winding,
            offset: r,
            span: h,
            grid: n,
            round_trip_error,
        });
    }
}
