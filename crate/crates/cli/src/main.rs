use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qid_core::catalog;
use qid_core::charfn::{eval_part, CharFnError, Part};
use qid_core::dist_model::{DistributionSpec, SpecError};
use qid_core::harness::{
    adjudicate_kappa, elem_inequality_scan, mean_value_decay, linspace, parseval_a, proof_integrals, step_grid,
    translation_numbers, ElemScan, HarnessError, KappaAdjudication, TrigPoly,
};
use qid_core::infimum::{check_conditions, estimate_mu, estimate_mu_d, InfError, Target, DEFAULT_TOL};
use qid_core::spectral::{extract_lattice_spectral, lk_charfn, SpectralError, SpectralPair};

/// Exit status 1: bad input. Exit status 2: a numerical procedure failed.
#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CharFnError> for Failure {
    fn from(e: CharFnError) -> Self {
        match e {
            CharFnError::MissingPart(_) | CharFnError::NoContinuousPart | CharFnError::BadWindow(_) | CharFnError::NonFinite(_) => {
                Failure::Input(e.to_string())
            }
            CharFnError::Quadrature { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidMeasure(_) | SpectralError::NonFinite(_) | SpectralError::Json(_) | SpectralError::NotLattice => {
                Failure::Input(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<InfError> for Failure {
    fn from(e: InfError) -> Self {
        match e {
            InfError::CharFn(c) => c.into(),
            InfError::Budget { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Spectral(s) => s.into(),
            HarnessError::CharFn(c) => c.into(),
            HarnessError::Precondition(_) => Failure::Input(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qid-lab", version, about = "Characteristic functions, spectral pairs and certified infima")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one part of a characteristic function on a grid.
    Eval(EvalArgs),
    /// Certify bounds on inf |f| or inf |f_d|.
    Inf(InfArgs),
    /// Check the separation conditions and report a verdict.
    Check(CheckArgs),
    /// Recover the spectral pair of a lattice discrete part.
    Spectral(SpectralArgs),
    /// Evaluate the characteristic function of a spectral pair on a grid.
    Synth(SynthArgs),
    /// Run one of the verification harnesses.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    t_max: f64,
    #[arg(long, default_value_t = 1001)]
    n: usize,
}

impl GridArgs {
    fn points(&self) -> Result<Vec<f64>, Failure> {
        if self.n < 2 {
            return Err(Failure::Input(format!("--n must be >= 2, got {}", self.n)));
        }
        if !(self.t_min < self.t_max) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(Failure::Input(format!("need t_min < t_max, got {} and {}", self.t_min, self.t_max)));
        }
        Ok(linspace(self.t_min, self.t_max, self.n))
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "full")]
    part: Part,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum InfTarget {
    Full,
    D,
}

#[derive(Args)]
struct InfArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value_t = InfTarget::Full)]
    target: InfTarget,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print a plain-text summary on stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write only the recovered pair, in the format `synth --pair` reads.
    #[arg(long)]
    pair_out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    pair: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Lemma {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Args)]
#[command(group(ArgGroup::new("which").required(true).args(["lemma", "integrals", "parseval", "translations"])))]
struct VerifyArgs {
    #[arg(long, value_enum)]
    lemma: Option<Lemma>,
    /// Proof integrals I, J, J_d, J_c at (--t, --tau).
    #[arg(long)]
    integrals: bool,
    /// Parseval constant of h -> f_d(--t + h).
    #[arg(long)]
    parseval: bool,
    /// Translation numbers of f_d.
    #[arg(long)]
    translations: bool,

    /// Spec file; defaults depend on the check.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Spectral pair file for --lemma 1; the catalog pairs are used otherwise.
    #[arg(long)]
    pair: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 20.0)]
    tau: f64,
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Step of the (h, x) grid on [-100, 100]^2 for the elementary inequality.
    #[arg(long, default_value_t = 0.01)]
    elem_step: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 100.0)]
    window: f64,
    #[arg(long, allow_hyphen_values = true)]
    t_eps: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-grid-point rows.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<DistributionSpec, Failure> {
    Ok(DistributionSpec::from_json(&read(path)?)?)
}

fn load_pair(path: &Path) -> Result<SpectralPair, Failure> {
    Ok(SpectralPair::from_json(&read(path)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Rows of `eval` and `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub source: String,
    pub samples: Vec<Sample>,
}

fn sample_table(samples: &Samples, format: Format) -> String {
    match format {
        Format::Json => to_json(samples),
        Format::Csv => {
            let mut s = String::from("t,re,im,abs\n");
            for r in &samples.samples {
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.re, r.im, r.abs);
            }
            s
        }
    }
}

fn eval(a: &EvalArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let samples = a
        .grid
        .points()?
        .into_iter()
        .map(|t| {
            eval_part(&spec, a.part, t).map(|v| Sample {
                t,
                re: v.re,
                im: v.im,
                abs: v.norm(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = Samples {
        source: format!("part {}", a.part),
        samples,
    };
    emit(a.out.as_deref(), &sample_table(&out, a.format))
}

fn inf(a: &InfArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let est = match a.target {
        InfTarget::Full => estimate_mu(&spec, a.tol)?,
        InfTarget::D => estimate_mu_d(&spec, a.tol)?,
    };
    debug_assert_eq!(est.target, if a.target == InfTarget::Full { Target::Full } else { Target::Discrete });
    emit(a.out.as_deref(), &to_json(&est))
}

fn check(a: &CheckArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let report = check_conditions(&spec, a.tol)?;
    if a.summary {
        eprint!("{}", report.summary());
    }
    emit(a.out.as_deref(), &to_json(&report))
}

fn spectral(a: &SpectralArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let d = spec
        .discrete
        .as_ref()
        .ok_or_else(|| Failure::Input("spec has no discrete part".into()))?;
    let ex = extract_lattice_spectral(d)?;
    if let Some(p) = &a.pair_out {
        emit(Some(p), &to_json(&ex.pair))?;
    }
    emit(a.out.as_deref(), &to_json(&ex))
}

fn synth(a: &SynthArgs) -> Result<(), Failure> {
    let pair = load_pair(&a.pair)?;
    let samples = a
        .grid
        .points()?
        .into_iter()
        .map(|t| {
            lk_charfn(&pair, t).map(|v| Sample {
                t,
                re: v.re,
                im: v.im,
                abs: v.norm(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = Samples {
        source: "spectral pair".into(),
        samples,
    };
    emit(a.out.as_deref(), &sample_table(&out, a.format))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub pairs: Vec<String>,
    pub t_grid: Vec<f64>,
    pub h_grid: Vec<f64>,
    pub quotient: KappaAdjudication,
    pub elem_step: f64,
    pub elementary: ElemScan,
}

fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let spec_or = |default: &str| -> Result<DistributionSpec, Failure> {
        match &a.spec {
            Some(p) => load_spec(p),
            None => Ok(catalog::spec(default).expect("catalog entry")),
        }
    };
    let mut csv = String::new();
    let json = if let Some(lemma) = a.lemma {
        match lemma {
            Lemma::One => {
                let (names, pairs): (Vec<String>, Vec<SpectralPair>) = match &a.pair {
                    Some(p) => (vec![p.display().to_string()], vec![load_pair(p)?]),
                    None => catalog::pairs().into_iter().map(|(n, p)| (n.to_string(), p)).unzip(),
                };
                if !(a.elem_step > 0.0) {
                    return Err(Failure::Input(format!("--elem-step must be > 0, got {}", a.elem_step)));
                }
                let t_grid = linspace(-4.0, 4.0, 32);
                let h_grid = linspace(-2.0, 2.0, 32);
                let quotient = adjudicate_kappa(&pairs, &t_grid, &h_grid)?;
                let g = step_grid(-100.0, 100.0, a.elem_step);
                let elementary = elem_inequality_scan(&g, &g);
                csv.push_str("pair,t,h,ratio,residual_paper,residual_corrected,margin_paper,margin_corrected\n");
                for (i, c) in &quotient.rows {
                    let _ = writeln!(
                        csv,
                        "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        names[*i],
                        c.t,
                        c.h,
                        c.ratio,
                        c.identity_residual_paper,
                        c.identity_residual_corrected,
                        c.bound_margin_paper,
                        c.bound_margin_corrected
                    );
                }
                to_json(&QuotientReport {
                    pairs: names,
                    t_grid,
                    h_grid,
                    quotient,
                    elem_step: a.elem_step,
                    elementary,
                })
            }
            Lemma::Two => {
                let spec = spec_or("gaussian")?;
                let rows = mean_value_decay(&spec, &linspace(-50.0, 50.0, 201), &[10.0, 100.0, 1000.0])?;
                csv.push_str("window,max_mean,argmax_t,max_quadrature_error\n");
                for r in &rows {
                    let _ = writeln!(
                        csv,
                        "{:.16e},{:.16e},{:.16e},{:.16e}",
                        r.window, r.max_mean, r.argmax_t, r.max_quadrature_error
                    );
                }
                to_json(&rows)
            }
        }
    } else if a.integrals {
        let spec = spec_or("bernoulli_0.25_gaussian")?;
        let p = proof_integrals(&spec, a.t, a.tau, a.tol)?;
        csv.push_str("t,tau,I,J,J_d,J_c,identity_residual,chain_margin\n");
        let _ = writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.t, p.tau, p.I, p.J, p.J_d, p.J_c, p.identity_residual, p.chain_margin
        );
        to_json(&p)
    } else if a.parseval {
        let spec = spec_or("bernoulli_0.25")?;
        let d = spec
            .discrete
            .as_ref()
            .ok_or_else(|| Failure::Input("spec has no discrete part".into()))?;
        let r = parseval_a(&TrigPoly::from_discrete(d, a.t), &[1e2, 1e3, 1e4])?;
        csv.push_str("window,mean,abs_error\n");
        for (m, e) in r.means.iter().zip(r.errors()) {
            let _ = writeln!(csv, "{:.16e},{:.16e},{:.16e}", m.0, m.1, e);
        }
        to_json(&r)
    } else {
        let spec = spec_or("bernoulli_0.25")?;
        let d = spec
            .discrete
            .as_ref()
            .ok_or_else(|| Failure::Input("spec has no discrete part".into()))?;
        let ts = translation_numbers(d, a.epsilon, a.mu, a.window, a.t_eps)?;
        csv.push_str("tau,sup_bound,sup_sampled\n");
        for ((t, b), s) in ts.taus.iter().zip(&ts.sup_bounds).zip(&ts.sup_sampled) {
            let _ = writeln!(csv, "{t:.16e},{b:.16e},{s:.16e}");
        }
        to_json(&ts)
    };
    if let Some(p) = &a.csv {
        emit(Some(p), &csv)?;
    }
    emit(a.out.as_deref(), &json)
}

fn main() -> ExitCode {
    qid_core::init_threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Inf(a) => inf(a),
        Command::Check(a) => check(a),
        Command::Spectral(a) => spectral(a),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qid-lab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
