//! Characteristic functions of mixed laws, spectral pairs of
//! Lévy–Khintchine type with signed spectral measures, certified infima of
//! `|f|`, and numerical checks of the inequalities behind the separation of
//! `|f|` from zero for rational-infinitely-divisible laws.

pub mod catalog;
pub mod charfn;
pub mod dist_model;
pub mod harness;
pub mod infimum;
pub mod quad;
pub mod spectral;

pub use charfn::{eval_part, lipschitz_const, mean_value, CfValue, CharFnError, MeanValue, Part};
pub use dist_model::{
    validate, AbsContKind, AbsContPart, Atom, CantorLaw, DiscretePart, DistributionSpec, LatticeHint, SpecError,
    ValidationReport,
};
pub use harness::{
    elem_inequality_scan, parseval_a, proof_integrals, quotient_check, translation_numbers, HarnessError,
    ProofIntegrals, QuotientCheck, TranslationStructure, TrigPoly,
};
pub use infimum::{
    certify_inf, check_conditions, estimate_mu, estimate_mu_d, ConditionReport, InfCertificate, InfError, InfEstimate,
    Verdict,
};
pub use spectral::{
    extract_lattice_spectral, hahn_jordan, lk_charfn, lk_exponent, total_variation, LatticeExtraction, SignedMeasure,
    SpectralError, SpectralPair,
};

/// Caps the rayon pool at `QIDLAB_THREADS` when set. Call once, early.
pub fn init_threads() {
    if let Some(n) = std::env::var("QIDLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
