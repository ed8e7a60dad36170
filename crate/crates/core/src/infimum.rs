//! Certified bounds on `inf |f|` and `inf |f_d|` by Lipschitz
//! branch-and-bound, and the membership condition report built on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charfn::{eval_part, CharFnError, Part};
use crate::dist_model::{DiscretePart, DistributionSpec};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const NODE_CAP: usize = 10_000_000;
/// Moduli below this count as zeros.
pub const ZERO_THRESHOLD: f64 = 1e-9;
/// Allowance for rounding in one evaluation of a modulus, subtracted from
/// every certified lower bound.
pub const EVAL_SLACK: f64 = 1e-13;
/// Smallest accepted gap tolerance.
pub const MIN_TOL: f64 = 1e-12;
/// Window half-widths used for `inf |f_d|` when the discrete part is not lattice.
pub const MU_D_LADDER: [f64; 3] = [1e2, 1e3, 1e4];
/// Window half-widths used for `inf |f|`.
pub const MU_LADDER: [f64; 3] = [1e1, 1e2, 1e3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Full,
    #[serde(rename = "d")]
    Discrete,
}

impl Target {
    fn part(self) -> Part {
        match self {
            Target::Full => Part::Full,
            Target::Discrete => Part::Discrete,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMode {
    /// Bounds hold for the infimum over the whole line (periodic modulus).
    ExactPeriod,
    /// Bounds hold for the infimum over `[-T, T]` only.
    Window,
}

/// Search domain of [`certify_inf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `[0, length)`, for a modulus with that period.
    Period(f64),
    /// `[-half_width, half_width]`.
    Window(f64),
}

impl Domain {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Period(p) => (0.0, p),
            Domain::Window(t) => (-t, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfCertificate {
    pub target: Target,
    pub mode: CertMode,
    /// Half-width `T` of the window (window mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_t: Option<f64>,
    /// Period searched (exact-period mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub argmin_t: f64,
    pub lipschitz_l: f64,
    pub gap: f64,
    pub tol: f64,
    pub nodes: usize,
}

impl InfCertificate {
    pub fn is_zero_hit(&self) -> bool {
        self.upper_bound < ZERO_THRESHOLD
    }

    pub fn certified_positive(&self) -> bool {
        self.lower_bound > ZERO_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfError {
    #[error("lipschitz bound must be finite and >= 0, got {0}")]
    BadLipschitz(f64),
    #[error("tolerance must be >= {MIN_TOL:e}, got {0}")]
    BadTolerance(f64),
    #[error("search domain must have positive length")]
    BadDomain,
    #[error("node budget exhausted; best so far [{:e}, {:e}], gap {:e}", .partial.lower_bound, .partial.upper_bound, .partial.gap)]
    Budget { partial: InfCertificate },
    #[error(transparent)]
    CharFn(#[from] CharFnError),
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy)]
struct Node {
    a: f64,
    b: f64,
    lower: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: smallest lower bound first, then leftmost interval
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Options for [`certify_inf`].
#[derive(Debug, Clone, Copy)]
pub struct BranchBound {
    pub tol: f64,
    pub node_cap: usize,
    /// A known sample `(t, modulus)` inside the domain to start from.
    pub incumbent: Option<(f64, f64)>,
}

impl BranchBound {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            node_cap: NODE_CAP,
            incumbent: None,
        }
    }
}

/// Lipschitz branch-and-bound for the infimum of a nonnegative function.
///
/// On an interval with midpoint `m` and half-width `rho` the function is at
/// least `modulus(m) - L rho`. Intervals are refined best-first until the
/// smallest such bound is within `tol` of the best sample.
pub fn certify_inf<F: Fn(f64) -> f64>(
    modulus: F,
    lipschitz: f64,
    domain: Domain,
    target: Target,
    opts: &BranchBound,
) -> Result<InfCertificate, InfError> {
    certify_inf_by(
        |a, b| (modulus(0.5 * (a + b)), lipschitz * 0.5 * (b - a)),
        &modulus,
        lipschitz,
        domain,
        target,
        opts,
    )
}

/// Branch-and-bound with an interval oracle.
///
/// `sample(a, b)` returns the modulus at the midpoint `m` of `[a, b]` and an
/// upper bound on `sup_{t in [a, b]} (|f(m)| - |f(t)|)`. `lipschitz` must
/// be a valid global bound; it is reported in the certificate, and a zero
/// value short-cuts to a single evaluation.
pub fn certify_inf_by<S, F>(
    sample: S,
    modulus: F,
    lipschitz: f64,
    domain: Domain,
    target: Target,
    opts: &BranchBound,
) -> Result<InfCertificate, InfError>
where
    S: Fn(f64, f64) -> (f64, f64),
    F: Fn(f64) -> f64,
{
    if !lipschitz.is_finite() || lipschitz < 0.0 {
        return Err(InfError::BadLipschitz(lipschitz));
    }
    if !(opts.tol >= MIN_TOL) {
        return Err(InfError::BadTolerance(opts.tol));
    }
    let (lo, hi) = domain.bounds();
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(InfError::BadDomain);
    }
    let (mode, window_t, period) = match domain {
        Domain::Period(p) => (CertMode::ExactPeriod, None, Some(p)),
        Domain::Window(t) => (CertMode::Window, Some(t), None),
    };
    let cert = |lower: f64, upper: f64, argmin: f64, nodes: usize| InfCertificate {
        target,
        mode,
        window_t,
        period,
        lower_bound: lower,
        upper_bound: upper,
        argmin_t: argmin,
        lipschitz_l: lipschitz,
        gap: upper - lower,
        tol: opts.tol,
        nodes,
    };

    if lipschitz == 0.0 {
        let v = modulus(lo);
        return Ok(cert((v - EVAL_SLACK).max(0.0), v, lo, 1));
    }

    let mut upper = f64::INFINITY;
    let mut argmin = lo;
    let mut nodes = 0usize;
    let offer = |t: f64, v: f64, upper: &mut f64, argmin: &mut f64| {
        if v < *upper || (v == *upper && t < *argmin) {
            *upper = v;
            *argmin = t;
        }
    };
    if let Some((t, v)) = opts.incumbent {
        if t >= lo && t <= hi {
            offer(t, v, &mut upper, &mut argmin);
        }
    }
    // endpoints are samples too; the right end of a period repeats the left
    let ends: &[f64] = match domain {
        Domain::Period(_) => &[lo],
        Domain::Window(_) => &[lo, hi],
    };
    for &t in ends {
        let v = modulus(t);
        nodes += 1;
        offer(t, v, &mut upper, &mut argmin);
    }

    let len = hi - lo;
    let n0 = ((len * lipschitz.max(1.0)).ceil() as usize).clamp(1, 1 << 16);
    let mut heap = BinaryHeap::with_capacity(n0 * 4);
    let push = |a: f64, b: f64, heap: &mut BinaryHeap<Node>, upper: &mut f64, argmin: &mut f64, nodes: &mut usize| {
        let (v, var) = sample(a, b);
        *nodes += 1;
        offer(0.5 * (a + b), v, upper, argmin);
        let lower = (v - var - EVAL_SLACK).max(0.0);
        heap.push(Node { a, b, lower });
    };
    let w = len / n0 as f64;
    for i in 0..n0 {
        let a = lo + w * i as f64;
        let b = if i + 1 == n0 { hi } else { lo + w * (i + 1) as f64 };
        push(a, b, &mut heap, &mut upper, &mut argmin, &mut nodes);
    }

    loop {
        let top = *heap.peek().expect("partition is never empty");
        if upper - top.lower <= opts.tol {
            let lower = top.lower.min(upper);
            return Ok(cert(lower, upper, argmin, nodes));
        }
        if nodes >= opts.node_cap {
            let lower = top.lower.min(upper);
            return Err(InfError::Budget {
                partial: cert(lower, upper, argmin, nodes),
            });
        }
        heap.pop();
        let m = 0.5 * (top.a + top.b);
        if m <= top.a || m >= top.b {
            // adjacent floats: the two endpoints are the whole interval
            let (va, vb) = (modulus(top.a), modulus(top.b));
            nodes += 2;
            offer(top.a, va, &mut upper, &mut argmin);
            offer(top.b, vb, &mut upper, &mut argmin);
            heap.push(Node {
                lower: (va.min(vb) - EVAL_SLACK).max(0.0),
                ..top
            });
            continue;
        }
        push(top.a, m, &mut heap, &mut upper, &mut argmin, &mut nodes);
        push(m, top.b, &mut heap, &mut upper, &mut argmin, &mut nodes);
    }
}

/// Weighted median of the atom locations.
fn median_location(d: &DiscretePart) -> f64 {
    let mut atoms = d.atoms.clone();
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    let half = 0.5 * d.total_mass();
    let mut acc = 0.0;
    for a in &atoms {
        acc += a.mass;
        if acc >= half {
            return a.location;
        }
    }
    atoms.last().map_or(0.0, |a| a.location)
}

/// Interval oracle for `|f|` or `|f_d|` of a spec.
///
/// Moduli are unchanged by the factor `e^{-ict}`, so each part is
/// differenced after centering at `c`, which makes its Lipschitz constant
/// `E|X - c|`. For the absolutely continuous part the difference is also at
/// most `|f_a(m)| + sup_{[a,b]} |f_a|`, which is small far from the origin.
struct SpecOracle<'a> {
    spec: &'a DistributionSpec,
    target: Target,
    center: f64,
    l_d: f64,
    l_a: f64,
    l_s: f64,
}

impl<'a> SpecOracle<'a> {
    fn new(spec: &'a DistributionSpec, target: Target) -> Result<Self, InfError> {
        let d = spec.discrete.as_ref();
        if target == Target::Discrete && d.is_none() {
            return Err(CharFnError::MissingPart(Part::Discrete).into());
        }
        let c = match d {
            Some(d) if spec.c_d > 0.0 || target == Target::Discrete => median_location(d),
            _ => 0.0,
        };
        let l_d = d.map_or(0.0, |d| d.atoms.iter().map(|a| a.mass * (a.location - c).abs()).sum());
        let l_a = spec.abscont.as_ref().map_or(0.0, |a| a.abs_moment_bound() + c.abs());
        let l_s = spec
            .singular
            .as_ref()
            .map_or(0.0, |s| (s.cantor.offset - c).abs().max((s.cantor.offset + s.cantor.scale - c).abs()));
        Ok(Self {
            spec,
            target,
            center: c,
            l_d,
            l_a,
            l_s,
        })
    }

    fn lipschitz(&self) -> f64 {
        match self.target {
            Target::Discrete => self.l_d,
            Target::Full => self.spec.c_d * self.l_d + self.spec.c_a * self.l_a + self.spec.c_s * self.l_s,
        }
    }

    fn point(&self, t: f64) -> f64 {
        eval_part(self.spec, self.target.part(), t).map(|v| v.norm()).unwrap_or(f64::NAN)
    }

    fn sample(&self, a: f64, b: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let rho = 0.5 * (b - a);
        let s = self.spec;
        let d = s.discrete.as_ref();
        if self.target == Target::Discrete {
            let v = d.map_or(f64::NAN, |d| d.cf(m).norm());
            return (v, (self.l_d * rho).min(2.0));
        }
        let mut f = Complex64::new(0.0, 0.0);
        let mut var = 0.0;
        if let Some(d) = d {
            f += d.cf(m) * s.c_d;
            var += s.c_d * (self.l_d * rho).min(2.0);
        }
        if let Some(ac) = &s.abscont {
            let v = ac.cf(m);
            f += v * s.c_a;
            let local = if a <= 0.0 && b >= 0.0 {
                self.l_a * rho
            } else {
                let t0 = a.abs().min(b.abs());
                let sup = ac.tail_modulus_bound(t0).min(1.0);
                let slope = self.center.abs() * sup + ac.tail_derivative_bound(t0);
                (self.l_a * rho).min(v.norm() + sup).min(slope * rho)
            };
            var += s.c_a * local;
        }
        if let Some(sg) = &s.singular {
            f += sg.cantor.cf(m) * s.c_s;
            var += s.c_s * (self.l_s * rho).min(2.0);
        }
        (f.norm(), var)
    }
}

/// Certifies `inf |f|` (or `|f_d|`) of `spec` over `domain`.
pub fn certify_spec(spec: &DistributionSpec, target: Target, domain: Domain, opts: &BranchBound) -> Result<InfCertificate, InfError> {
    let oracle = SpecOracle::new(spec, target)?;
    certify_inf_by(
        |a, b| oracle.sample(a, b),
        |t| oracle.point(t),
        oracle.lipschitz(),
        domain,
        target,
        opts,
    )
}

/// Status of the global tail bound used in [`estimate_mu`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticStatus {
    /// `c_d mu_d - c_a sup_{|t|>T}|f_a| - c_s` bounds `|f|` beyond `T`.
    Valid,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub window_t: f64,
    /// Lower bound on `|f(t)|` for `|t| > T`.
    pub tail_lower: f64,
    /// `min(window lower bound, tail_lower)`, a bound over the whole line.
    pub global_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTier {
    pub status: AsymptoticStatus,
    pub reason: String,
    pub bounds: Vec<TailBound>,
}

/// Certified information about an infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfEstimate {
    pub target: Target,
    pub lattice: bool,
    pub certificates: Vec<InfCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<AsymptoticTier>,
    /// Lower bound valid over the whole real line, when one exists.
    pub global_lower: Option<f64>,
    /// Smallest modulus sampled anywhere (an upper bound on the infimum).
    pub upper_bound: f64,
    pub argmin_t: f64,
    pub notes: Vec<String>,
}

impl InfEstimate {
    pub fn certified_positive(&self) -> bool {
        self.global_lower.is_some_and(|l| l > ZERO_THRESHOLD)
    }

    pub fn zero_hit(&self) -> bool {
        self.upper_bound < ZERO_THRESHOLD
    }
}

fn window_ladder(
    spec: &DistributionSpec,
    target: Target,
    ladder: &[f64],
    tol: f64,
) -> Result<Vec<InfCertificate>, InfError> {
    let mut certs: Vec<InfCertificate> = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let mut opts = BranchBound::new(tol);
        opts.incumbent = certs.last().map(|c| (c.argmin_t, c.upper_bound));
        certs.push(certify_spec(spec, target, Domain::Window(t), &opts)?);
    }
    Ok(certs)
}

/// `mu_d = inf |f_d|`: over one period for lattice parts, on a window
/// ladder otherwise.
pub fn estimate_mu_d(spec: &DistributionSpec, tol: f64) -> Result<InfEstimate, InfError> {
    if !(spec.c_d > 0.0) {
        return Err(InfError::Precondition("mu_d needs c_d > 0".into()));
    }
    let d = spec.discrete.as_ref().ok_or(CharFnError::MissingPart(Part::Discrete))?;
    let hint = d.lattice_hint.or_else(|| crate::dist_model::infer_lattice(&d.atoms));
    let mut notes = Vec::new();
    let (certificates, global_lower) = match hint {
        Some(h) => {
            let c = certify_spec(spec, Target::Discrete, Domain::Period(h.period()), &BranchBound::new(tol))?;
            (vec![c], Some(c.lower_bound))
        }
        None => {
            notes.push("discrete part is not lattice: bounds hold on the stated windows only".into());
            (window_ladder(spec, Target::Discrete, &MU_D_LADDER, tol)?, None)
        }
    };
    let best = certificates
        .iter()
        .min_by(|a, b| a.upper_bound.total_cmp(&b.upper_bound))
        .copied()
        .expect("at least one certificate");
    Ok(InfEstimate {
        target: Target::Discrete,
        lattice: hint.is_some(),
        certificates,
        asymptotic: None,
        global_lower,
        upper_bound: best.upper_bound,
        argmin_t: best.argmin_t,
        notes,
    })
}

/// `mu = inf |f|`: window certificates on a ladder plus, for lattice
/// discrete parts, a tail bound that extends them to the whole line.
pub fn estimate_mu(spec: &DistributionSpec, tol: f64) -> Result<InfEstimate, InfError> {
    estimate_mu_with(spec, tol, None)
}

fn estimate_mu_with(
    spec: &DistributionSpec,
    tol: f64,
    mu_d: Option<&InfEstimate>,
) -> Result<InfEstimate, InfError> {
    let certificates = window_ladder(spec, Target::Full, &MU_LADDER, tol)?;
    let mut notes = Vec::new();

    let computed;
    let mu_d = match (mu_d, spec.c_d > 0.0) {
        (Some(m), _) => Some(m),
        (None, true) => {
            computed = estimate_mu_d(spec, tol)?;
            Some(&computed)
        }
        (None, false) => None,
    };

    let asymptotic = match mu_d {
        None => AsymptoticTier {
            status: AsymptoticStatus::Inconclusive,
            reason: "c_d = 0: no discrete part to bound |f| away from zero".into(),
            bounds: vec![],
        },
        Some(m) if !m.lattice => AsymptoticTier {
            status: AsymptoticStatus::Inconclusive,
            reason: "discrete part is not lattice: no certified mu_d on the whole line".into(),
            bounds: vec![],
        },
        Some(m) => {
            let mu_d_lower = m.global_lower.unwrap_or(0.0);
            let bounds = certificates
                .iter()
                .map(|c| {
                    let t = c.window_t.unwrap_or(0.0);
                    let tail_a = spec.abscont.as_ref().map(|a| a.tail_modulus_bound(t)).unwrap_or(0.0);
                    let tail_lower = spec.c_d * mu_d_lower - spec.c_a * tail_a - spec.c_s;
                    TailBound {
                        window_t: t,
                        tail_lower,
                        global_lower: c.lower_bound.min(tail_lower).max(0.0),
                    }
                })
                .collect();
            AsymptoticTier {
                status: AsymptoticStatus::Valid,
                reason: "lattice discrete part: |f| >= c_d mu_d - c_a sup|f_a| - c_s beyond each window".into(),
                bounds,
            }
        }
    };

    let global_lower = match asymptotic.status {
        AsymptoticStatus::Valid => asymptotic
            .bounds
            .iter()
            .map(|b| b.global_lower)
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x)))),
        AsymptoticStatus::Inconclusive => {
            notes.push(format!("global bound unavailable: {}", asymptotic.reason));
            None
        }
    };
    let best = certificates
        .iter()
        .min_by(|a, b| a.upper_bound.total_cmp(&b.upper_bound))
        .copied()
        .expect("ladder is not empty");
    let (upper_bound, argmin_t) = match mu_d {
        Some(m) if m.lattice && spec.c_d == 1.0 && m.upper_bound < best.upper_bound => (m.upper_bound, m.argmin_t),
        _ => (best.upper_bound, best.argmin_t),
    };
    Ok(InfEstimate {
        target: Target::Full,
        lattice: mu_d.is_some_and(|m| m.lattice),
        certificates,
        asymptotic: Some(asymptotic),
        global_lower,
        upper_bound,
        argmin_t,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
    NotApplicable,
}

/// Condition 1: `f(t) != 0` for all `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ZeroFree {
    /// Follows from a certified positive `inf |f|` over the whole line.
    Holds,
    HoldsOnWindow { window_t: f64, lower_bound: f64 },
    ViolatedAt { t: f64, modulus: f64 },
    Inconclusive { window_t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    MemberByCriterion,
    NecessaryConditionsFail,
    NecessaryHoldSufficiencyUnknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub c_d: f64,
    pub c_a: f64,
    pub c_s: f64,
    pub cond1_zero_free: ZeroFree,
    pub cond2_mu_d_positive: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_d: Option<InfEstimate>,
    pub cond3_mu_positive: Status,
    pub mu: InfEstimate,
    pub dominated_singular: bool,
    pub mass_over_half: bool,
    pub verdict: Verdict,
    /// Which criterion produced the verdict.
    pub tier: String,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "coefficients: c_d = {}, c_a = {}, c_s = {}", self.c_d, self.c_a, self.c_s);
        let _ = writeln!(s, "cond1 (zero-free):      {:?}", self.cond1_zero_free);
        let _ = writeln!(s, "cond2 (inf|f_d| > 0):   {:?}", self.cond2_mu_d_positive);
        if let Some(m) = &self.mu_d {
            let _ = writeln!(
                s,
                "  mu_d in [{:.9}, {:.9}]{}",
                m.global_lower.unwrap_or(0.0),
                m.upper_bound,
                if m.lattice { " (whole line)" } else { " (windows only)" }
            );
        }
        let _ = writeln!(s, "cond3 (inf|f| > 0):     {:?}", self.cond3_mu_positive);
        let _ = writeln!(
            s,
            "  mu in [{:.9}, {:.9}]{}",
            self.mu.global_lower.unwrap_or(0.0),
            self.mu.upper_bound,
            if self.mu.global_lower.is_some() { " (whole line)" } else { " (upper bound only)" }
        );
        let _ = writeln!(s, "dominated singular part: {}", self.dominated_singular);
        let _ = writeln!(s, "point mass > 1/2:        {}", self.mass_over_half);
        let _ = writeln!(s, "verdict: {:?} ({})", self.verdict, self.tier);
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

fn status_of(est: &InfEstimate) -> Status {
    if est.zero_hit() {
        Status::Fails
    } else if est.certified_positive() {
        Status::Holds
    } else {
        Status::Inconclusive
    }
}

/// Evaluates conditions 1)–3), the dominated-singular assumption and the
/// point-mass criterion, and assigns a verdict tier.
pub fn check_conditions(spec: &DistributionSpec, tol: f64) -> Result<ConditionReport, InfError> {
    let mut notes = Vec::new();
    let mu_d = if spec.c_d > 0.0 {
        Some(estimate_mu_d(spec, tol)?)
    } else {
        None
    };
    let mu = estimate_mu_with(spec, tol, mu_d.as_ref())?;
    notes.extend(mu.notes.iter().cloned());

    let cond2 = mu_d.as_ref().map_or(Status::NotApplicable, status_of);
    let cond3 = status_of(&mu);

    let widest = mu.certificates.last().expect("ladder is not empty");
    let window_t = widest.window_t.unwrap_or(0.0);
    let cond1 = if cond3 == Status::Holds {
        ZeroFree::Holds
    } else if mu.zero_hit() {
        ZeroFree::ViolatedAt {
            t: mu.argmin_t,
            modulus: mu.upper_bound,
        }
    } else if widest.certified_positive() {
        ZeroFree::HoldsOnWindow {
            window_t,
            lower_bound: widest.lower_bound,
        }
    } else {
        ZeroFree::Inconclusive { window_t }
    };
    if matches!(cond1, ZeroFree::ViolatedAt { .. }) {
        notes.push(format!(
            "cond1: |f| < {ZERO_THRESHOLD:e} at t = {}; numerically indistinguishable from a zero",
            mu.argmin_t
        ));
    }

    let mu_d_lower = mu_d.as_ref().and_then(|m| m.global_lower).unwrap_or(0.0);
    let dominated_singular = spec.c_d > 0.0
        && (spec.c_s == 0.0 || (cond2 == Status::Holds && spec.c_s < spec.c_d * mu_d_lower));
    let mass_over_half = spec.max_point_mass() > 0.5;

    let (verdict, tier) = if spec.c_d > 0.0 && (cond2 == Status::Fails || cond3 == Status::Fails) {
        let which = match (cond2 == Status::Fails, cond3 == Status::Fails) {
            (true, true) => "inf|f_d| = 0 and inf|f| = 0",
            (true, false) => "inf|f_d| = 0",
            _ => "inf|f| = 0",
        };
        (
            Verdict::NecessaryConditionsFail,
            format!("c_d > 0 and {which}: necessary conditions for membership fail"),
        )
    } else if mass_over_half {
        (
            Verdict::MemberByCriterion,
            "point mass > 1/2".to_string(),
        )
    } else if spec.c_d > 0.0 && dominated_singular && cond2 == Status::Holds && cond3 == Status::Holds {
        let t = if spec.c_s == 0.0 {
            "c_d > 0, c_s = 0 with conditions 1) and 2)"
        } else {
            "dominated singular part c_s < c_d mu_d with conditions 1) and 2)"
        };
        (Verdict::MemberByCriterion, t.to_string())
    } else {
        let mut why = Vec::new();
        if spec.c_d == 0.0 {
            why.push(format!(
                "c_d = 0, cond3 {}: the necessary conditions only apply when c_d > 0",
                match cond3 {
                    Status::Fails => "fails",
                    Status::Holds => "holds",
                    _ => "is inconclusive",
                }
            ));
        }
        if spec.c_d > 0.0 && !dominated_singular {
            why.push("singular part is not dominated: no cited sufficient criterion applies".to_string());
        }
        if cond2 == Status::Inconclusive {
            why.push("inf|f_d| is not certified on the whole line".to_string());
        }
        if cond3 == Status::Inconclusive {
            why.push("inf|f| is not certified on the whole line".to_string());
        }
        (Verdict::NecessaryHoldSufficiencyUnknown, why.join("; "))
    };

    Ok(ConditionReport {
        c_d: spec.c_d,
        c_a: spec.c_a,
        c_s: spec.c_s,
        cond1_zero_free: cond1,
        cond2_mu_d_positive: cond2,
        mu_d,
        cond3_mu_positive: cond3,
        mu,
        dominated_singular,
        mass_over_half,
        verdict,
        tier,
        notes,
    })
}
