mod io;
mod report;
mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mukai_lab::fm::{fm_components_explicit, induced_h2_isometry, standard_fm_isometry, verify_fm_axioms, FMIsometry};
use mukai_lab::lattice::{
    euler_characteristic_and_dimension, hyperbolic_completion, k3_lattice, orthogonal_complement_quotient,
    IntegerLattice, MukaiLattice, MukaiVector,
};
use mukai_lab::report::Check;
use mukai_lab::t4_nahm::{self, NahmConfig};
use mukai_lab::{BigInt, Error, Result};
use report::RunReport;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Mukai lattices, Fourier-Mukai isometries, the 4D spin module and a
/// numerical Nahm transform on the flat four-torus.
#[derive(Parser, Debug)]
#[command(name = "mukai-lab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the Nahm sweep.
    #[arg(long, global = true, env = "MUKAI_LAB_THREADS")]
    threads: Option<usize>,
    /// Seed for every random sample; overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Float tolerance: spin identities, or `cg_tol` for Nahm runs.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// `text` prints the headline value instead of the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mukai-lattice arithmetic.
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    /// Fourier-Mukai isometries on cohomology.
    Fm {
        #[command(subcommand)]
        op: FmOp,
    },
    /// The Clifford module of R⁴.
    Spin {
        #[command(subcommand)]
        op: SpinOp,
    },
    /// Numerical Nahm transform on T⁴.
    Nahm {
        #[command(subcommand)]
        op: NahmOp,
    },
    /// Lattice, FM, spin and a small Nahm run, aggregated.
    VerifyAll {
        /// Nahm config JSON; an empty object gives the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct LatticeArgs {
    /// JSON with optional `lattice` ({"gram": ...}), `v` and `w`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Mukai vector, `(r,c,s)` with `c` = 0 or `[c1,...]`.
    #[arg(short = 'v', long = "v")]
    v: Option<String>,
    #[arg(short = 'w', long = "w")]
    w: Option<String>,
}

#[derive(Subcommand, Debug)]
enum LatticeOp {
    /// Mukai pairing (v, w).
    Pair(LatticeArgs),
    /// χ(v, w) = −(v, w) and the moduli dimension when v = w.
    Chi(LatticeArgs),
    /// Moduli dimension (v, v) + 2.
    Dim(LatticeArgs),
    /// Invariants of v^⊥ / Zv.
    Quotient(LatticeArgs),
    /// Isotropic w with (v, w) = 1.
    Complete(LatticeArgs),
}

#[derive(Args, Debug, Clone)]
struct FmArgs {
    /// JSON with `matrix` ([[rat]]), `v` and optional `alpha`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// File holding the matrix, bare or as {"matrix": ...}.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(short = 'v', long = "v")]
    v: Option<String>,
    /// H² class as a comma-separated list.
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Subcommand, Debug)]
enum FmOp {
    /// Standard FM isometry sending v to the point class.
    Build(FmArgs),
    /// Axiom suite for a given matrix and v.
    Verify(FmArgs),
    /// Component formulas and μ-map on one class.
    Components(FmArgs),
    /// Induced isometry v^⊥ / Zv → H².
    Induced(FmArgs),
}

#[derive(Subcommand, Debug)]
enum SpinOp {
    /// Every identity of the spin module.
    Verify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Samples for the exact Gaussian-rational pass.
        #[arg(long, default_value_t = 1000)]
        exact_samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct NahmArgs {
    /// Config JSON; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the F̂ components per dual point as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Dual point for `identities`, as `x1,x2,x3,x4`.
    #[arg(long)]
    xi: Option<String>,
}

#[derive(Subcommand, Debug)]
enum NahmOp {
    /// Dual-grid sweep of the transformed curvature.
    Run(NahmArgs),
    /// Finite-difference checks of the Green-operator identities.
    Identities(NahmArgs),
    /// Rank-level Fourier inversion.
    Invert(NahmArgs),
}

const DEFAULT_SPIN_TOL: f64 = 1e-12;
const DEFAULT_XI: [f64; 4] = [0.1, 0.3, 0.6, 0.2];

struct Ctx<'a> {
    global: &'a Global,
    report: RunReport,
    text: Option<String>,
}

impl Ctx<'_> {
    fn threads(&self) -> usize {
        self.global.threads.unwrap_or(1)
    }
}

fn load_input(path: &Option<PathBuf>) -> Result<Value> {
    match path {
        Some(p) => io::read_json(p),
        None => Ok(json!({})),
    }
}

fn lattice_inputs(args: &LatticeArgs) -> Result<(MukaiLattice, Option<MukaiVector>, Option<MukaiVector>)> {
    let input = load_input(&args.input)?;
    let h2 = match input.get("lattice") {
        Some(l) => io::parse_lattice(l)?,
        None => k3_lattice(),
    };
    let rank = h2.rank();
    let pick = |flag: &Option<String>, key: &str| -> Result<Option<MukaiVector>> {
        match (flag, input.get(key)) {
            (Some(s), _) => MukaiVector::parse_short(s, rank).map(Some),
            (None, Some(v)) => io::parse_vector(v, rank).map(Some),
            (None, None) => Ok(None),
        }
    };
    let v = pick(&args.v, "v")?;
    let w = pick(&args.w, "w")?;
    Ok((MukaiLattice::new(h2), v, w))
}

fn require<T>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| Error::input(format!("missing {what}")))
}

fn is_k3(h2: &IntegerLattice) -> bool {
    h2 == &k3_lattice()
}

fn run_lattice(ctx: &mut Ctx, op: &LatticeOp) -> Result<()> {
    let args = match op {
        LatticeOp::Pair(a) | LatticeOp::Chi(a) | LatticeOp::Dim(a) | LatticeOp::Quotient(a) | LatticeOp::Complete(a) => a,
    };
    let (mukai, v, w) = lattice_inputs(args)?;
    ctx.report.config_echo = json!({
        "h2_rank": mukai.h2_rank(),
        "v": v.as_ref().map(io::vector_json),
        "w": w.as_ref().map(io::vector_json),
    });
    let v = require(v, "vector v")?;
    match op {
        LatticeOp::Pair(_) => {
            let w = require(w, "vector w")?;
            let p = mukai.pair(&v, &w)?;
            ctx.report.result = json!({ "pairing": io::big(&p) });
            ctx.text = Some(p.to_string());
        }
        LatticeOp::Chi(_) => {
            let w = w.unwrap_or_else(|| v.clone());
            let (chi, dim) = euler_characteristic_and_dimension(&v, &w, mukai.h2())?;
            ctx.report.result = json!({ "chi": io::big(&chi), "dim": dim.as_ref().map(io::big) });
            ctx.text = Some(chi.to_string());
        }
        LatticeOp::Dim(_) => {
            let (_, dim) = euler_characteristic_and_dimension(&v, &v, mukai.h2())?;
            let dim = dim.expect("v = v");
            ctx.report.result = json!({ "dim": io::big(&dim) });
            ctx.text = Some(dim.to_string());
        }
        LatticeOp::Quotient(_) => {
            let q = orthogonal_complement_quotient(&v, &mukai)?;
            let inv = q.quotient.invariants();
            if is_k3(mukai.h2()) {
                ctx.report.add_checks(mukai_lab::report::CheckList {
                    checks: vec![Check::exact(
                        "quotient_is_k3_lattice",
                        inv.rank == 22 && inv.determinant == BigInt::from(-1) && inv.signature == (3, 19) && inv.is_even,
                    )],
                });
            }
            ctx.text = Some(format!(
                "rank {} det {} signature ({}, {}) even {}",
                inv.rank, inv.determinant, inv.signature.0, inv.signature.1, inv.is_even
            ));
            ctx.report.result = json!({
                "invariants": inv,
                "gram": io::int_matrix_json(q.quotient.gram()),
                "quotient_basis": q.quotient_basis.iter().map(io::vector_json).collect::<Vec<_>>(),
            });
        }
        LatticeOp::Complete(_) => {
            let w = hyperbolic_completion(&v, &mukai)?;
            let vw = mukai.pair(&v, &w)?;
            let ww = mukai.pair(&w, &w)?;
            ctx.report.add_checks(mukai_lab::report::CheckList {
                checks: vec![
                    Check::exact("pairing_with_v_is_one", vw == BigInt::from(1)),
                    Check::exact("completion_is_isotropic", ww == BigInt::from(0)),
                ],
            });
            ctx.text = Some(w.to_string());
            ctx.report.result = json!({ "w": io::vector_json(&w) });
        }
    }
    Ok(())
}

fn fm_isometry(args: &FmArgs, build_if_missing: bool) -> Result<(FMIsometry, Value)> {
    let input = load_input(&args.input)?;
    let mukai = MukaiLattice::k3();
    let v = match (&args.v, input.get("v")) {
        (Some(s), _) => MukaiVector::parse_short(s, 22)?,
        (None, Some(v)) => io::parse_vector(v, 22)?,
        (None, None) => return Err(Error::input("missing vector v")),
    };
    let matrix = match (&args.matrix, input.get("matrix")) {
        (Some(p), _) => Some(io::parse_rat_matrix(&io::read_json(p)?)?),
        (None, Some(m)) => Some(io::parse_rat_matrix(m)?),
        (None, None) => None,
    };
    let echo = json!({ "v": io::vector_json(&v), "matrix_given": matrix.is_some() });
    let fm = match matrix {
        Some(m) => FMIsometry::new(m, v, mukai)?,
        None if build_if_missing => standard_fm_isometry(&v, &mukai)?,
        None => return Err(Error::input("missing matrix")),
    };
    Ok((fm, echo))
}

fn alpha_input(args: &FmArgs) -> Result<Vec<BigInt>> {
    if let Some(text) = &args.alpha {
        return Ok(io::parse_list::<i64>(text, "alpha")?.into_iter().map(BigInt::from).collect());
    }
    let input = load_input(&args.input)?;
    let a = input.get("alpha").and_then(Value::as_array).ok_or_else(|| Error::input("missing alpha"))?;
    a.iter().map(io::parse_int).collect()
}

fn run_fm(ctx: &mut Ctx, op: &FmOp) -> Result<()> {
    match op {
        FmOp::Build(args) => {
            let (fm, echo) = fm_isometry(&FmArgs { matrix: None, ..args.clone() }, true)?;
            ctx.report.config_echo = echo;
            let checks = ctx.report.timed("axioms", || verify_fm_axioms(&fm));
            ctx.report.add_checks(checks);
            ctx.report.result = json!({ "matrix": io::rat_matrix_json(&fm.matrix) });
        }
        FmOp::Verify(args) => {
            let (fm, echo) = fm_isometry(args, false)?;
            ctx.report.config_echo = echo;
            let checks = ctx.report.timed("axioms", || verify_fm_axioms(&fm));
            ctx.report.add_checks(checks);
        }
        FmOp::Components(args) => {
            let (fm, mut echo) = fm_isometry(args, true)?;
            let alpha = alpha_input(args)?;
            echo["alpha"] = json!(alpha.iter().map(io::big).collect::<Vec<_>>());
            ctx.report.config_echo = echo;
            let rep = fm_components_explicit(&fm, &alpha)?;
            ctx.report.result = json!({
                "h0": io::rational(&rep.h0),
                "h2": rep.h2.iter().map(io::rational).collect::<Vec<_>>(),
                "h4": io::rational(&rep.h4),
                "mu_of_alpha": rep.mu_of_alpha.iter().map(io::rational).collect::<Vec<_>>(),
                "c_hat": rep.c_hat.iter().map(io::rational).collect::<Vec<_>>(),
                "r": io::big(&rep.r),
            });
            ctx.report.add_checks(rep.checks);
        }
        FmOp::Induced(args) => {
            let (fm, echo) = fm_isometry(args, true)?;
            ctx.report.config_echo = echo;
            let ind = induced_h2_isometry(&fm)?;
            ctx.report.result = json!({
                "matrix": io::int_matrix_json(&ind.matrix),
                "quotient_gram": io::int_matrix_json(&ind.quotient_gram),
            });
            ctx.report.add_checks(ind.checks);
        }
    }
    Ok(())
}

fn nahm_config(ctx: &Ctx, path: &Option<PathBuf>) -> Result<NahmConfig> {
    let value = load_input(path)?;
    let mut cfg: NahmConfig =
        serde_json::from_value(value).map_err(|e| Error::input(format!("bad Nahm config: {e}")))?;
    if let Some(seed) = ctx.global.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = ctx.global.tol {
        cfg.cg_tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn write_csv(path: &Path, report: &t4_nahm::NahmReport) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::input(format!("cannot create {}: {e}", path.display())))?;
    report
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

fn run_nahm(ctx: &mut Ctx, op: &NahmOp) -> Result<()> {
    let args = match op {
        NahmOp::Run(a) | NahmOp::Identities(a) | NahmOp::Invert(a) => a,
    };
    let cfg = nahm_config(ctx, &args.config)?;
    let flux = cfg.flux_data()?;
    ctx.report.config_echo = json!({ "config": to_value(&cfg), "threads": ctx.threads() });
    let threads = ctx.threads();
    match op {
        NahmOp::Run(_) => {
            let rep = ctx.report.timed("nahm_checks", || t4_nahm::nahm_checks(&flux, &cfg, threads))?;
            if let Some(path) = &args.csv {
                write_csv(path, &rep)?;
            }
            ctx.report.add_checks(rep.identity_checks.clone());
            ctx.text = Some(format!("kernel_dim {} asd_residual {:.3e}", rep.kernel_dim, rep.asd_residual));
            ctx.report.result = to_value(&rep);
        }
        NahmOp::Identities(_) => {
            let xi = match &args.xi {
                Some(text) => {
                    let v = io::parse_list::<f64>(text, "xi")?;
                    <[f64; 4]>::try_from(v).map_err(|_| Error::input("xi needs four coordinates"))?
                }
                None => DEFAULT_XI,
            };
            ctx.report.config_echo["xi"] = json!(xi);
            let rep = ctx.report.timed("identities", || t4_nahm::operator_identity_checks(&flux, xi, &cfg))?;
            for w in &rep.warnings {
                eprintln!("mukai-lab: warning: {w}");
            }
            ctx.report.add_checks(rep.checks.clone());
            ctx.report.result = to_value(&rep);
        }
        NahmOp::Invert(_) => {
            let rep = ctx.report.timed("inversion", || t4_nahm::inversion_rank_check(&flux, &cfg, threads))?;
            ctx.report.add_checks(rep.checks.clone());
            ctx.text = Some(format!("double transform dims {:?}", rep.double_transform_dims));
            ctx.report.result = to_value(&rep);
        }
    }
    Ok(())
}

fn run_verify_all(ctx: &mut Ctx, config: &Option<PathBuf>) -> Result<()> {
    let cfg = nahm_config(ctx, config)?;
    let seed = ctx.global.seed.unwrap_or(1);
    let spin_tol = DEFAULT_SPIN_TOL;
    ctx.report.config_echo = json!({ "nahm": to_value(&cfg), "seed": seed, "spin_tol": spin_tol, "threads": ctx.threads() });
    let lattice = ctx.report.timed("lattice", suites::lattice_suite)?;
    ctx.report.add_checks(suites::prefixed("lattice", lattice));
    let fm = ctx.report.timed("fm", suites::fm_suite)?;
    ctx.report.add_checks(fm);
    let spin = ctx.report.timed("spin", || suites::spin_suite(1000, 200, spin_tol, seed))?;
    ctx.report.add_checks(suites::prefixed("spin", spin));
    let flux = cfg.flux_data()?;
    let threads = ctx.threads();
    let nahm = ctx.report.timed("nahm", || t4_nahm::nahm_checks(&flux, &cfg, threads))?;
    ctx.report.add_checks(suites::prefixed("nahm", nahm.identity_checks.clone()));
    ctx.report.result = json!({
        "nahm": {
            "kernel_dim": nahm.kernel_dim,
            "asd_residual": nahm.asd_residual,
            "asd_bound": nahm.asd_bound,
            "metric_check": nahm.metric_check,
        }
    });
    Ok(())
}

fn command_name(cmd: &Command) -> String {
    let sub = |s: &str, op: String| format!("{s} {}", op.to_lowercase());
    match cmd {
        Command::Lattice { op } => sub("lattice", format!("{op:?}").split('(').next().unwrap_or("").to_string()),
        Command::Fm { op } => sub("fm", format!("{op:?}").split('(').next().unwrap_or("").to_string()),
        Command::Spin { .. } => "spin verify".to_string(),
        Command::Nahm { op } => sub("nahm", format!("{op:?}").split('(').next().unwrap_or("").to_string()),
        Command::VerifyAll { .. } => "verify-all".to_string(),
    }
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<()> {
    match cmd {
        Command::Lattice { op } => run_lattice(ctx, op),
        Command::Fm { op } => run_fm(ctx, op),
        Command::Spin { op: SpinOp::Verify { samples, exact_samples } } => {
            let seed = ctx.global.seed.unwrap_or(1);
            let tol = ctx.global.tol.unwrap_or(DEFAULT_SPIN_TOL);
            ctx.report.config_echo = json!({ "samples": samples, "exact_samples": exact_samples, "tol": tol, "seed": seed });
            let checks = ctx.report.timed("spin", || suites::spin_suite(*samples, *exact_samples, tol, seed))?;
            ctx.report.add_checks(checks);
            Ok(())
        }
        Command::Nahm { op } => run_nahm(ctx, op),
        Command::VerifyAll { config } => run_verify_all(ctx, config),
    }
}

fn main() {
    let cli = Cli::parse();
    let mut ctx = Ctx { global: &cli.global, report: RunReport::new(command_name(&cli.command), Value::Null), text: None };
    let outcome = dispatch(&mut ctx, &cli.command);
    let mut report = std::mem::replace(&mut ctx.report, RunReport::new("", Value::Null));
    if let Err(e) = &outcome {
        eprintln!("mukai-lab: {e}");
        report = report.failed_with(e);
    }
    let report = report.finish();
    if let Some(name) = &report.first_failure {
        eprintln!("mukai-lab: check failed: {name}");
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &cli.global.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("mukai-lab: cannot write {}: {e}", path.display());
            std::process::exit(2);
        }
    }
    match cli.global.format {
        Format::Text => {
            let status = format!("{:?}", report.status).to_lowercase();
            println!("{}", ctx.text.clone().unwrap_or(status));
        }
        Format::Json if cli.global.out.is_none() => println!("{json}"),
        Format::Json => {}
    }
    std::process::exit(report.exit_code());
}
