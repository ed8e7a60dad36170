use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use qid_core::catalog;
use qid_core::charfn::{eval_part, lipschitz_const, Part};
use qid_core::dist_model::{Atom, DistributionSpec};
use qid_core::harness::{parseval_a, TrigPoly};
use qid_core::infimum::{certify_spec, estimate_mu, BranchBound, Domain, Target};
use qid_core::spectral::{extract_lattice_spectral, hahn_jordan, lk_charfn, SignedMeasure, SpectralPair};

fn lattice_law() -> impl Strategy<Value = DistributionSpec> {
    (prop::collection::vec((-4i32..=4, 0.05f64..1.0), 1..5), -1.0f64..1.0, prop::sample::select(vec![0.5, 1.0, 2.0]))
        .prop_map(|(raw, offset, span)| {
            let mut atoms: Vec<Atom> = Vec::new();
            for (k, w) in raw {
                let x = offset + span * k as f64;
                match atoms.iter_mut().find(|a| a.location == x) {
                    Some(a) => a.mass += w,
                    None => atoms.push(Atom::new(x, w)),
                }
            }
            atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
            let total: f64 = atoms.iter().map(|a| a.mass).sum();
            for a in &mut atoms {
                a.mass /= total;
            }
            let fix: f64 = 1.0 - atoms.iter().map(|a| a.mass).sum::<f64>();
            atoms[0].mass += fix;
            DistributionSpec::discrete(atoms).validated().unwrap()
        })
}

#[test]
fn catalog_characteristic_functions_are_hermitian_and_bounded() {
    for (name, spec) in catalog::specs() {
        assert_abs_diff_eq!(eval_part(&spec, Part::Full, 0.0).unwrap().re, 1.0, epsilon = 1e-12);
        for i in 0..400 {
            let t = -50.0 + 0.25 * i as f64 + 0.013;
            let f = eval_part(&spec, Part::Full, t).unwrap();
            let g = eval_part(&spec, Part::Full, -t).unwrap();
            assert!((f - g.conj()).norm() < 1e-12, "{name} at {t}");
            assert!(f.norm() <= 1.0 + 1e-9, "{name} at {t}");
        }
    }
}

#[test]
fn catalog_lipschitz_constants_hold() {
    for (name, spec) in catalog::specs() {
        let l = lipschitz_const(&spec, Part::Full).unwrap();
        let mut prev = eval_part(&spec, Part::Full, -20.0).unwrap();
        for i in 1..4000 {
            let t = -20.0 + 0.01 * i as f64;
            let cur = eval_part(&spec, Part::Full, t).unwrap();
            assert!((cur - prev).norm() <= l * 0.01 + 1e-12, "{name} at {t}");
            prev = cur;
        }
    }
}

#[test]
fn window_certificates_are_sound_and_monotone() {
    for name in ["bernoulli_0.25_gaussian", "heavy_atom_gaussian", "dominated_cantor", "laplace", "uniform"] {
        let spec = catalog::spec(name).unwrap();
        let est = estimate_mu(&spec, 1e-6).unwrap();
        for w in est.certificates.windows(2) {
            assert!(w[1].upper_bound <= w[0].upper_bound, "{name}");
        }
        let c = est.certificates[0];
        let t_max = c.window_t.unwrap();
        for i in 0..=20_000 {
            let t = -t_max + 2.0 * t_max * i as f64 / 20_000.0;
            let v = eval_part(&spec, Part::Full, t).unwrap().norm();
            assert!(v >= c.lower_bound, "{name}: |f({t})| = {v} < {}", c.lower_bound);
        }
    }
}

#[test]
fn parseval_means_converge_monotonically() {
    for name in ["bernoulli_0.25", "two_sided_atoms", "poisson_1"] {
        let d = catalog::spec(name).unwrap().discrete.unwrap();
        let r = parseval_a(&TrigPoly::from_discrete(&d, 0.7), &[1e2, 1e3, 1e4]).unwrap();
        assert!(r.a_exact > 0.0);
        let e = r.errors();
        assert!(e[1] <= e[0] && e[2] <= e[1], "{name}: {e:?}");
    }
}

#[test]
fn reflected_product_matches_pointwise() {
    let d = catalog::spec("non_lattice_sqrt2").unwrap().discrete.unwrap();
    let phi = TrigPoly::from_discrete(&d, 1.3);
    let prod = phi.reflected_product().unwrap();
    for h in [-3.0, 0.0, 0.4, 11.0] {
        let direct = phi.eval(h) * phi.eval(-h);
        assert!((prod.eval(h) - direct).norm() < 1e-14);
    }
    // 3 atoms: 0, +-1, +-sqrt2, +-(sqrt2 - 1)
    assert_eq!(prod.terms.len(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lattice_modulus_is_periodic(spec in lattice_law(), t in -30.0f64..30.0) {
        let hint = spec.lattice_hint().unwrap();
        let a = eval_part(&spec, Part::Discrete, t).unwrap().norm();
        let b = eval_part(&spec, Part::Discrete, t + hint.period()).unwrap().norm();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn period_certificate_is_sound(spec in lattice_law(), probes in prop::collection::vec(0.0f64..1.0, 64)) {
        let hint = spec.lattice_hint().unwrap();
        let c = certify_spec(&spec, Target::Discrete, Domain::Period(hint.period()), &BranchBound::new(1e-6)).unwrap();
        prop_assert!(c.gap <= 1e-6 + 1e-15);
        for u in probes {
            let v = eval_part(&spec, Part::Discrete, u * hint.period()).unwrap().norm();
            prop_assert!(v >= c.lower_bound);
        }
    }

    #[test]
    fn extraction_round_trips_when_zero_free(spec in lattice_law()) {
        let d = spec.discrete.as_ref().unwrap();
        if let Ok(ex) = extract_lattice_spectral(d) {
            prop_assert!(ex.max_imag < 1e-10);
            for i in 0..50 {
                let t = -7.0 + 0.29 * i as f64;
                let f = eval_part(&spec, Part::Discrete, t).unwrap();
                let g = lk_charfn(&ex.pair, t).unwrap();
                prop_assert!((f - g).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn jordan_split_preserves_variation(weights in prop::collection::vec(-0.4f64..0.4, 1..6), t in -5.0f64..5.0) {
        let atoms = weights.iter().enumerate().map(|(i, &w)| (0.5 + i as f64 * 0.7, w));
        let pair = SpectralPair::new(0.3, SignedMeasure::from_atoms(atoms).unwrap());
        let (plus, minus) = hahn_jordan(&pair);
        prop_assert!((plus.total_variation() + minus.total_variation() - pair.total_variation()).abs() < 1e-15);
        let q: Complex64 = lk_charfn(&plus, t).unwrap() / lk_charfn(&minus, t).unwrap();
        prop_assert!((q - lk_charfn(&pair, t).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn spec_json_round_trip(spec in lattice_law()) {
        let back = DistributionSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }
}
