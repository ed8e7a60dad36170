//! Declarative model of a distribution as a weighted mixture of a discrete
//! part, an absolutely continuous catalog part and a Cantor-type singular
//! part, with validation and lattice inference.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on every "sums to one" check.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance used when reconstructing a common lattice span.
pub const LATTICE_TOL: f64 = 1e-9;
/// Relative tolerance for a location to sit on a lattice `r + h k`.
pub const LATTICE_MEMBERSHIP_TOL: f64 = 1e-12;
/// Smallest admissible atom mass.
pub const MIN_ATOM_MASS: f64 = 1e-15;
/// Largest denominator tried by the rational reconstruction of span ratios.
pub const MAX_LATTICE_DENOMINATOR: u64 = 10_000;

/// A point mass, serialized as `[location, mass]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

impl Atom {
    pub fn new(location: f64, mass: f64) -> Self {
        Self { location, mass }
    }
}

impl From<[f64; 2]> for Atom {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Atom> for [f64; 2] {
    fn from(a: Atom) -> Self {
        [a.location, a.mass]
    }
}

/// Support `offset + span * k`, `k` integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeHint {
    pub offset: f64,
    pub span: f64,
}

impl LatticeHint {
    /// Period of `|f_d|`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.span
    }

    /// Integer index of `location` on the lattice, if it lies on it.
    pub fn index_of(&self, location: f64) -> Option<i64> {
        let k = ((location - self.offset) / self.span).round();
        let resid = (location - self.offset - k * self.span).abs();
        (resid <= LATTICE_MEMBERSHIP_TOL * location.abs().max(1.0)).then_some(k as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePart {
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_hint: Option<LatticeHint>,
}

impl DiscretePart {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self {
            atoms,
            lattice_hint: None,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn max_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).fold(0.0, f64::max)
    }
}

/// Closed-form absolutely continuous families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbsContKind {
    Gaussian { mean: f64, variance: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Laplace { mean: f64, scale: f64 },
}

impl AbsContKind {
    fn check(&self) -> Option<String> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            AbsContKind::Gaussian { mean, variance } => {
                if !finite(&[mean, variance]) || variance <= 0.0 {
                    Some(format!("gaussian needs finite mean and variance > 0, got ({mean}, {variance})"))
                } else {
                    None
                }
            }
            AbsContKind::Uniform { a, b } => {
                if !finite(&[a, b]) || a >= b {
                    Some(format!("uniform needs finite a < b, got ({a}, {b})"))
                } else {
                    None
                }
            }
            AbsContKind::Exponential { rate } => {
                if !rate.is_finite() || rate <= 0.0 {
                    Some(format!("exponential needs rate > 0, got {rate}"))
                } else {
                    None
                }
            }
            AbsContKind::Laplace { mean, scale } => {
                if !finite(&[mean, scale]) || scale <= 0.0 {
                    Some(format!("laplace needs finite mean and scale > 0, got ({mean}, {scale})"))
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsContComponent {
    #[serde(flatten)]
    pub kind: AbsContKind,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsContPart {
    pub components: Vec<AbsContComponent>,
}

impl AbsContPart {
    pub fn single(kind: AbsContKind) -> Self {
        Self {
            components: vec![AbsContComponent { kind, weight: 1.0 }],
        }
    }
}

/// The standard Cantor law on `[0, 1]` mapped affinely onto `[offset, offset + scale]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorLaw {
    pub offset: f64,
    pub scale: f64,
}

impl CantorLaw {
    pub const STANDARD: CantorLaw = CantorLaw {
        offset: 0.0,
        scale: 1.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPart {
    pub cantor: CantorLaw,
}

/// `F = c_d F_d + c_a F_a + c_s F_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub c_d: f64,
    pub c_a: f64,
    pub c_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrete: Option<DiscretePart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abscont: Option<AbsContPart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular: Option<SingularPart>,
}

impl DistributionSpec {
    pub fn discrete(atoms: Vec<Atom>) -> Self {
        Self {
            c_d: 1.0,
            c_a: 0.0,
            c_s: 0.0,
            discrete: Some(DiscretePart::new(atoms)),
            abscont: None,
            singular: None,
        }
    }

    pub fn abscont(part: AbsContPart) -> Self {
        Self {
            c_d: 0.0,
            c_a: 1.0,
            c_s: 0.0,
            discrete: None,
            abscont: Some(part),
            singular: None,
        }
    }

    pub fn singular(cantor: CantorLaw) -> Self {
        Self {
            c_d: 0.0,
            c_a: 0.0,
            c_s: 1.0,
            discrete: None,
            abscont: None,
            singular: Some(SingularPart { cantor }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: DistributionSpec = serde_json::from_str(text)?;
        Ok(spec.validated()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    /// Validates and stores the inferred lattice hint, if any.
    pub fn validated(mut self) -> Result<Self, ValidationError> {
        let report = validate(&self);
        if !report.is_ok() {
            return Err(ValidationError {
                violations: report.violations,
            });
        }
        if let Some(d) = self.discrete.as_mut() {
            if d.lattice_hint.is_none() {
                d.lattice_hint = report.lattice_hint;
            }
        }
        Ok(self)
    }

    pub fn lattice_hint(&self) -> Option<LatticeHint> {
        self.discrete.as_ref().and_then(|d| d.lattice_hint)
    }

    /// Largest point mass of the full law (continuous parts carry none).
    pub fn max_point_mass(&self) -> f64 {
        self.discrete
            .as_ref()
            .map(|d| self.c_d * d.max_mass())
            .unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Lattice structure of the discrete part: the supplied hint when present
    /// and consistent, otherwise the inferred one.
    pub lattice_hint: Option<LatticeHint>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

#[derive(Debug, Clone, Error)]
#[error("invalid distribution spec: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixError {
    #[error("c_d = 1: the continuous part is not defined")]
    NoContinuousPart,
}

fn sums_to_one(x: f64) -> bool {
    (x - 1.0).abs() <= NORMALIZATION_TOL
}

/// Checks every structural invariant and infers a lattice hint for the
/// discrete part. Problems are returned as data.
pub fn validate(spec: &DistributionSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    let coeffs = [("c_d", spec.c_d), ("c_a", spec.c_a), ("c_s", spec.c_s)];
    for (name, c) in coeffs {
        if !c.is_finite() || c < 0.0 {
            report.push(name, format!("coefficient must be finite and >= 0, got {c}"));
        }
    }
    let total = spec.c_d + spec.c_a + spec.c_s;
    if !sums_to_one(total) {
        report.push("c_d+c_a+c_s", format!("coefficients sum to {total}"));
    }

    let presence = [
        ("discrete", spec.c_d, spec.discrete.is_some()),
        ("abscont", spec.c_a, spec.abscont.is_some()),
        ("singular", spec.c_s, spec.singular.is_some()),
    ];
    for (name, c, present) in presence {
        if c > 0.0 && !present {
            report.push(name, format!("coefficient is {c} but the part is missing"));
        } else if c <= 0.0 && present {
            report.push(name, "part is present but its coefficient is 0");
        }
    }

    if let Some(d) = &spec.discrete {
        validate_discrete(d, &mut report);
    }

    if let Some(a) = &spec.abscont {
        if a.components.is_empty() {
            report.push("abscont.components", "no components");
        }
        let mut sum = 0.0;
        for (i, comp) in a.components.iter().enumerate() {
            if !(comp.weight > 0.0 && comp.weight <= 1.0) {
                report.push(
                    format!("abscont.components[{i}].weight"),
                    format!("weight must be in (0, 1], got {}", comp.weight),
                );
            }
            if let Some(msg) = comp.kind.check() {
                report.push(format!("abscont.components[{i}]"), msg);
            }
            sum += comp.weight;
        }
        if !a.components.is_empty() && !sums_to_one(sum) {
            report.push("abscont.components", format!("weights sum to {sum}"));
        }
    }

    if let Some(s) = &spec.singular {
        let c = s.cantor;
        if !c.offset.is_finite() || !c.scale.is_finite() || c.scale <= 0.0 {
            report.push(
                "singular.cantor",
                format!("needs finite offset and scale > 0, got ({}, {})", c.offset, c.scale),
            );
        }
    }

    report
}

fn validate_discrete(d: &DiscretePart, report: &mut ValidationReport) {
    if d.atoms.is_empty() {
        report.push("discrete.atoms", "no atoms");
        return;
    }
    let mut ok = true;
    for (i, a) in d.atoms.iter().enumerate() {
        if !a.location.is_finite() {
            report.push(format!("discrete.atoms[{i}]"), format!("non-finite location {}", a.location));
            ok = false;
        }
        if !a.mass.is_finite() || a.mass < MIN_ATOM_MASS || a.mass > 1.0 {
            report.push(
                format!("discrete.atoms[{i}]"),
                format!("mass must be in [{MIN_ATOM_MASS:e}, 1], got {}", a.mass),
            );
            ok = false;
        }
        if i > 0 && !(d.atoms[i - 1].location < a.location) {
            report.push(
                format!("discrete.atoms[{i}]"),
                format!(
                    "locations must be strictly increasing ({} then {})",
                    d.atoms[i - 1].location, a.location
                ),
            );
            ok = false;
        }
    }
    let sum = d.total_mass();
    if !sums_to_one(sum) {
        report.push("discrete.atoms", format!("masses sum to {sum}"));
        ok = false;
    }
    match d.lattice_hint {
        Some(h) => {
            if !(h.span > 0.0) || !h.span.is_finite() || !h.offset.is_finite() {
                report.push("discrete.lattice_hint", format!("span must be > 0, got {}", h.span));
            } else if let Some(a) = d.atoms.iter().find(|a| h.index_of(a.location).is_none()) {
                report.push(
                    "discrete.lattice_hint",
                    format!("location {} is not on {} + {} k", a.location, h.offset, h.span),
                );
            } else {
                report.lattice_hint = Some(h);
            }
        }
        None if ok => report.lattice_hint = infer_lattice(&d.atoms),
        None => {}
    }
}

/// Best rational approximation `p/q` of `x` with `q <= max_den` and
/// `|x - p/q| <= tol`, found through continued-fraction convergents.
pub fn rational_reconstruction(x: f64, tol: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2 as i64, q2 as u64));
        }
        let frac = rem - a;
        if frac == 0.0 {
            return None;
        }
        rem = 1.0 / frac;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Infers `offset + span k` support for sorted, distinct atoms.
///
/// The offset is the smallest location; the span is the greatest common
/// divisor of the differences to it, found by rational reconstruction of
/// each difference against the first one.
pub fn infer_lattice(atoms: &[Atom]) -> Option<LatticeHint> {
    let x0 = atoms.first()?.location;
    if atoms.len() == 1 {
        return Some(LatticeHint {
            offset: x0,
            span: 1.0,
        });
    }
    let g = atoms[1].location - x0;
    if !(g > 0.0) {
        return None;
    }
    let mut lcm: u64 = 1;
    for a in &atoms[2..] {
        let d = a.location - x0;
        let tol = LATTICE_TOL * d.abs().max(1.0) / g;
        let (_, q) = rational_reconstruction(d / g, tol, MAX_LATTICE_DENOMINATOR)?;
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > MAX_LATTICE_DENOMINATOR {
            return None;
        }
    }
    let hint = LatticeHint {
        offset: x0,
        span: g / lcm as f64,
    };
    atoms
        .iter()
        .all(|a| hint.index_of(a.location).is_some())
        .then_some(hint)
}

/// Weight and renormalized sub-weights of the continuous part
/// `F_c = (c_a F_a + c_s F_s) / (c_a + c_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousMix {
    /// `1 - c_d`.
    pub weight: f64,
    pub abscont_share: f64,
    pub singular_share: f64,
}

pub fn continuous_mix(spec: &DistributionSpec) -> Result<ContinuousMix, MixError> {
    let denom = spec.c_a + spec.c_s;
    if spec.c_d >= 1.0 || denom <= 0.0 {
        return Err(MixError::NoContinuousPart);
    }
    let abscont_share = spec.c_a / denom;
    Ok(ContinuousMix {
        weight: 1.0 - spec.c_d,
        abscont_share,
        singular_share: 1.0 - abscont_share,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atoms(xs: &[(f64, f64)]) -> Vec<Atom> {
        xs.iter().map(|&(x, m)| Atom::new(x, m)).collect()
    }

    #[test]
    fn two_point_lattice_is_inferred() {
        let spec = DistributionSpec::discrete(atoms(&[(0.0, 0.5), (1.0, 0.5)]));
        let r = validate(&spec);
        assert!(r.is_ok());
        assert_eq!(r.lattice_hint, Some(LatticeHint { offset: 0.0, span: 1.0 }));
    }

    #[test]
    fn overweight_masses_are_reported() {
        let spec = DistributionSpec::discrete(atoms(&[(0.0, 0.6), (1.0, 0.6)]));
        let r = validate(&spec);
        assert!(!r.is_ok());
        assert!(r.violations.iter().any(|v| v.message == "masses sum to 1.2"), "{:?}", r.violations);
    }

    #[test]
    fn irrational_ratio_has_no_lattice() {
        let spec = DistributionSpec::discrete(atoms(&[(0.0, 0.5), (1.0, 0.3), (2f64.sqrt(), 0.2)]));
        let r = validate(&spec);
        assert!(r.is_ok());
        assert_eq!(r.lattice_hint, None);
        // the closest convergent with an admissible denominator misses by ~1e-8
        assert_eq!(rational_reconstruction(2f64.sqrt(), 1.5e-9, MAX_LATTICE_DENOMINATOR), None);
        assert_eq!(rational_reconstruction(2f64.sqrt(), 2e-8, MAX_LATTICE_DENOMINATOR), Some((8119, 5741)));
    }

    #[test]
    fn span_is_the_gcd_of_differences() {
        let h = infer_lattice(&atoms(&[(-1.0, 0.2), (3.0, 0.3), (5.0, 0.5)])).unwrap();
        assert_eq!(h.offset, -1.0);
        assert!((h.span - 2.0).abs() < 1e-15);
        let h = infer_lattice(&atoms(&[(0.0, 0.2), (0.1, 0.3), (0.3, 0.5)])).unwrap();
        assert!((h.span - 0.1).abs() < 1e-15);
    }

    #[test]
    fn single_atom_gets_unit_span() {
        let h = infer_lattice(&atoms(&[(2.5, 1.0)])).unwrap();
        assert_eq!(h, LatticeHint { offset: 2.5, span: 1.0 });
    }

    #[test]
    fn structural_violations() {
        let mut spec = DistributionSpec::discrete(atoms(&[(1.0, 0.5), (0.0, 0.5)]));
        assert!(validate(&spec).violations.iter().any(|v| v.message.contains("strictly increasing")));
        spec.discrete = Some(DiscretePart::new(atoms(&[(0.0, 1.0 - 1e-16), (1.0, 1e-16)])));
        assert!(validate(&spec).violations.iter().any(|v| v.message.contains("mass must be")));
        spec.discrete = None;
        assert!(validate(&spec).violations.iter().any(|v| v.path == "discrete"));

        let mut g = DistributionSpec::abscont(AbsContPart::single(AbsContKind::Gaussian { mean: 0.0, variance: -1.0 }));
        assert!(!validate(&g).is_ok());
        g.abscont = Some(AbsContPart::single(AbsContKind::Uniform { a: 1.0, b: 0.0 }));
        assert!(!validate(&g).is_ok());
        g.c_a = 0.9;
        assert!(validate(&g).violations.iter().any(|v| v.path == "c_d+c_a+c_s"));
    }

    #[test]
    fn bad_hint_is_rejected() {
        let mut d = DiscretePart::new(atoms(&[(0.0, 0.5), (1.0, 0.5)]));
        d.lattice_hint = Some(LatticeHint { offset: 0.0, span: 0.7 });
        let spec = DistributionSpec {
            discrete: Some(d),
            ..DistributionSpec::discrete(vec![])
        };
        assert!(validate(&spec).violations.iter().any(|v| v.path == "discrete.lattice_hint"));
    }

    #[test]
    fn mix_weights() {
        let mut spec = DistributionSpec {
            c_d: 0.5,
            c_a: 0.5,
            c_s: 0.0,
            discrete: Some(DiscretePart::new(atoms(&[(0.0, 1.0)]))),
            abscont: Some(AbsContPart::single(AbsContKind::Gaussian { mean: 0.0, variance: 1.0 })),
            singular: None,
        };
        let m = continuous_mix(&spec).unwrap();
        assert_eq!((m.weight, m.abscont_share, m.singular_share), (0.5, 1.0, 0.0));

        spec.c_d = 0.2;
        spec.c_a = 0.4;
        spec.c_s = 0.4;
        spec.singular = Some(SingularPart { cantor: CantorLaw::STANDARD });
        let m = continuous_mix(&spec).unwrap();
        assert_eq!((m.abscont_share, m.singular_share), (0.5, 0.5));

        let disc = DistributionSpec::discrete(atoms(&[(0.0, 1.0)]));
        assert_eq!(continuous_mix(&disc), Err(MixError::NoContinuousPart));
    }

    #[test]
    fn json_field_names() {
        let text = r#"{
            "c_d": 0.6, "c_a": 0.4, "c_s": 0.0,
            "discrete": {"atoms": [[0, 0.75], [1, 0.25]]},
            "abscont": {"components": [{"kind": "gaussian", "mean": 0, "variance": 1, "weight": 1}]}
        }"#;
        let spec = DistributionSpec::from_json(text).unwrap();
        assert_eq!(spec.lattice_hint(), Some(LatticeHint { offset: 0.0, span: 1.0 }));
        let back = DistributionSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);

        let bad = r#"{"c_d": 1, "c_a": 0, "c_s": 0, "discrete": {"atoms": [[0, 0.6], [1, 0.6]]}}"#;
        assert!(matches!(DistributionSpec::from_json(bad), Err(SpecError::Invalid(_))));
        assert!(matches!(DistributionSpec::from_json("{"), Err(SpecError::Json(_))));
    }

    proptest! {
        #[test]
        fn lattice_inference_is_idempotent(
            offset in -5i32..5, span_num in 1u32..20, span_den in 1u32..8,
            ks in proptest::collection::btree_set(0i64..40, 1..6),
        ) {
            let span = span_num as f64 / span_den as f64;
            let n = ks.len() as f64;
            let atoms: Vec<Atom> = ks.iter().map(|&k| Atom::new(offset as f64 + span * k as f64, 1.0 / n)).collect();
            let mass: f64 = atoms.iter().map(|a| a.mass).sum();
            prop_assume!(sums_to_one(mass));
            let spec = DistributionSpec::discrete(atoms);
            let first = spec.clone().validated().unwrap();
            let hint = first.lattice_hint().unwrap();
            let second = validate(&first);
            prop_assert_eq!(second.lattice_hint, Some(hint));
            prop_assert!(second.is_ok());
        }

        #[test]
        fn continuous_shares_sum_to_one(c_d in 0.0f64..0.99, split in 0.0f64..=1.0) {
            let rest = 1.0 - c_d;
            let spec = DistributionSpec {
                c_d, c_a: rest * split, c_s: rest * (1.0 - split),
                discrete: None, abscont: None, singular: None,
            };
            prop_assume!(spec.c_a + spec.c_s > 0.0);
            let m = continuous_mix(&spec).unwrap();
            prop_assert_eq!(m.abscont_share + m.singular_share, 1.0);
        }
    }
}
