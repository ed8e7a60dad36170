//! Named distributions and spectral pairs used by the tests, the CLI and the
//! Python bindings.

use crate::dist_model::{
    AbsContComponent, AbsContKind, AbsContPart, Atom, CantorLaw, DiscretePart, DistributionSpec, SingularPart,
};
use crate::spectral::{DensitySegment, SignedMeasure, SpectralAtom, SpectralPair};

/// Poisson(`rate`) atoms `0..=K`, keeping every `p_k >= cutoff`.
pub fn poisson_atoms(rate: f64, cutoff: f64) -> Vec<Atom> {
    let mut atoms = Vec::new();
    let mut p = (-rate).exp();
    let mut k = 0u32;
    while p >= cutoff {
        atoms.push(Atom::new(k as f64, p));
        k += 1;
        p *= rate / k as f64;
    }
    atoms
}

pub fn bernoulli(p: f64) -> DiscretePart {
    DiscretePart::new(vec![Atom::new(0.0, 1.0 - p), Atom::new(1.0, p)])
}

pub fn gaussian(mean: f64, variance: f64) -> AbsContPart {
    AbsContPart::single(AbsContKind::Gaussian { mean, variance })
}

fn mixed(c_d: f64, d: DiscretePart, c_a: f64, a: Option<AbsContPart>, c_s: f64, s: Option<CantorLaw>) -> DistributionSpec {
    DistributionSpec {
        c_d,
        c_a,
        c_s,
        discrete: (c_d > 0.0).then_some(d),
        abscont: a,
        singular: s.map(|cantor| SingularPart { cantor }),
    }
}

/// The named specs, validated.
pub fn specs() -> Vec<(&'static str, DistributionSpec)> {
    let raw = vec![
        ("degenerate_atom", DistributionSpec::discrete(vec![Atom::new(0.0, 1.0)])),
        ("bernoulli_0.25", DistributionSpec::discrete(bernoulli(0.25).atoms)),
        ("bernoulli_0.5", DistributionSpec::discrete(bernoulli(0.5).atoms)),
        ("poisson_1", DistributionSpec::discrete(poisson_atoms(1.0, 1e-16))),
        (
            "two_sided_atoms",
            DistributionSpec::discrete(vec![Atom::new(-1.0, 0.3), Atom::new(1.0, 0.7)]),
        ),
        (
            "non_lattice_sqrt2",
            DistributionSpec::discrete(vec![Atom::new(0.0, 0.5), Atom::new(1.0, 0.3), Atom::new(2f64.sqrt(), 0.2)]),
        ),
        ("gaussian", DistributionSpec::abscont(gaussian(0.0, 1.0))),
        (
            "uniform",
            DistributionSpec::abscont(AbsContPart::single(AbsContKind::Uniform { a: -1.0, b: 1.0 })),
        ),
        (
            "exponential",
            DistributionSpec::abscont(AbsContPart::single(AbsContKind::Exponential { rate: 1.0 })),
        ),
        (
            "laplace",
            DistributionSpec::abscont(AbsContPart::single(AbsContKind::Laplace { mean: 0.0, scale: 1.0 })),
        ),
        ("cantor", DistributionSpec::singular(CantorLaw::STANDARD)),
        (
            "bernoulli_0.25_gaussian",
            mixed(0.6, bernoulli(0.25), 0.4, Some(gaussian(0.0, 1.0)), 0.0, None),
        ),
        (
            "bernoulli_0.5_gaussian",
            mixed(0.6, bernoulli(0.5), 0.4, Some(gaussian(0.0, 1.0)), 0.0, None),
        ),
        (
            "heavy_atom_gaussian",
            mixed(0.6, DiscretePart::new(vec![Atom::new(0.0, 1.0)]), 0.4, Some(gaussian(0.0, 1.0)), 0.0, None),
        ),
        (
            "bernoulli_cantor_gaussian",
            mixed(0.5, bernoulli(0.25), 0.25, Some(gaussian(0.0, 1.0)), 0.25, Some(CantorLaw::STANDARD)),
        ),
        (
            "dominated_cantor",
            mixed(
                0.8,
                bernoulli(0.25),
                0.1,
                Some(AbsContPart::single(AbsContKind::Uniform { a: -1.0, b: 1.0 })),
                0.1,
                Some(CantorLaw::STANDARD),
            ),
        ),
        (
            "gaussian_laplace_mixture",
            DistributionSpec::abscont(AbsContPart {
                components: vec![
                    AbsContComponent {
                        kind: AbsContKind::Gaussian { mean: 1.0, variance: 0.5 },
                        weight: 0.7,
                    },
                    AbsContComponent {
                        kind: AbsContKind::Laplace { mean: -1.0, scale: 2.0 },
                        weight: 0.3,
                    },
                ],
            }),
        ),
    ];
    raw.into_iter()
        .map(|(name, s)| (name, s.validated().unwrap_or_else(|e| panic!("catalog spec {name}: {e}"))))
        .collect()
}

pub fn spec(name: &str) -> Option<DistributionSpec> {
    specs().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

/// The named spectral pairs, each with `||G|| <= 1`.
pub fn pairs() -> Vec<(&'static str, SpectralPair)> {
    let atom = |location, weight| SpectralAtom { location, weight };
    vec![
        ("poisson_1", SpectralPair::poisson(1.0, 1.0)),
        ("gaussian_atom", SpectralPair::gaussian(0.5)),
        (
            "inverse_poisson_1",
            SpectralPair::new(-(1f64.sin()), SignedMeasure::from_atoms([(1.0, -0.5)]).expect("valid")),
        ),
        (
            "signed_atoms",
            SpectralPair::new(0.2, SignedMeasure::new(vec![atom(1.0, 0.3), atom(2.0, -0.1)], vec![]).expect("valid")),
        ),
        (
            "segment_and_atom",
            SpectralPair::new(
                -0.3,
                SignedMeasure::new(
                    vec![atom(-0.5, -0.15)],
                    vec![DensitySegment {
                        start: -1.0,
                        end: 1.5,
                        level: 0.2,
                    }],
                )
                .expect("valid"),
            ),
        ),
    ]
}

pub fn pair(name: &str) -> Option<SpectralPair> {
    pairs().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}
