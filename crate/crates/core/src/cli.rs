//! The `unitarize` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails
//! on well-formed input, 2 on usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::braided::factorize_braided_equivalence;
use crate::checks::{self, CheckResult};
use crate::cohomology::{
    build_vecg_category, polar_split_cocycle, trivialize_positive_cocycle, unitarize_cocycle, verify_cocycle, Cochain,
};
use crate::error::{Error, Result};
use crate::fusion::{apply_gauge, verify_pentagon, DEFAULT_TOL};
use crate::io::{self, Dataset, LoadOptions, Validation};
use crate::library;
use crate::module_cats::unitarize_module_equivalence;
use crate::polar::polar_decompose_gauge;
use crate::report::Residual;
use crate::unitarizer::{
    factorize_equivalence, search_unitary_gauge, trivialize_positive_monoidal, unitarize_equivalence, unitarize_nat_iso,
    EquivalenceData, FactorizationCertificates,
};

pub const TOL_ENV: &str = "UNITARIZE_TOL";

#[derive(Debug, Parser)]
#[command(name = "unitarize", version, about = "Verify and unitarize fusion-categorical data")]
struct Cli {
    /// Numerical tolerance; overrides the dataset and the UNITARIZE_TOL variable.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized algorithms.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Iteration budget for gauge search.
    #[arg(long, global = true, default_value_t = 500)]
    max_iters: usize,
    /// Write the resulting dataset here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the declared checks, or those given with --check.
    Verify {
        file: PathBuf,
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Replace an equivalence (and nat-iso, if present) by a unitary one.
    Unitarize { file: PathBuf },
    /// Split an equivalence into a unitary equivalence and a positive gauge.
    Factorize { file: PathBuf },
    /// Polar decomposition of the `gauge` section.
    Polar { file: PathBuf },
    /// Look for a gauge making the F-symbols unitary.
    GaugeSearch { file: PathBuf },
    /// Group cochains.
    Cocycle {
        op: CocycleOp,
        file: PathBuf,
        /// Required degree of the cochain.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Module categories.
    Module { op: ModuleOp, file: PathBuf },
    /// Builtin datasets.
    Examples { op: ExamplesOp, name: Option<String> },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CocycleOp {
    Verify,
    Split,
    Trivialize,
    Unitarize,
    BuildVecg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModuleOp {
    Verify,
    Unitarize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExamplesOp {
    List,
    Emit,
}

/// Machine-readable outcome of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub dataset: Option<String>,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl Report {
    fn new(command: &str, dataset: Option<String>, tolerance: f64) -> Self {
        Report {
            command: command.into(),
            dataset,
            tolerance,
            checks: Vec::new(),
            values: BTreeMap::new(),
            warnings: Vec::new(),
            error: None,
            pass: true,
            elapsed_seconds: None,
        }
    }

    fn check(&mut self, name: &str, residual: Residual) {
        self.pass &= residual.pass;
        self.checks.push(CheckResult {
            name: name.into(),
            residual,
        });
    }

    fn value(&mut self, name: &str, v: Value) {
        self.values.insert(name.into(), v);
    }
}

struct Ctx {
    tol: Option<f64>,
    default_tol: f64,
    seed: u64,
    max_iters: usize,
    out: Option<PathBuf>,
}

impl Ctx {
    fn load(&self, path: &Path, validation: Validation) -> Result<Dataset> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        io::parse_dataset_with(
            &text,
            &LoadOptions {
                default_tol: self.default_tol,
                tol_override: self.tol,
                validation,
            },
        )
    }

    fn write_out(&self, ds: &Dataset) -> Result<()> {
        if let Some(path) = &self.out {
            let text = io::emit_dataset(ds)?;
            std::fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn default_tol_from_env() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::Input(format!("{TOL_ENV} must be a positive number, got `{s}`"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cochain_json(c: &Cochain) -> Value {
    Value::Array(c.values().iter().map(|&z| complex_json(z)).collect())
}

fn need<'a, T>(v: &'a Option<T>, command: &str, section: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Input(format!("`{command}` needs the `{section}` section")))
}

fn certificate(value: f64, tol: f64) -> Residual {
    Residual::new(value, tol, None, 1)
}

fn factorization_checks(rep: &mut Report, c: &FactorizationCertificates, tol: f64) {
    rep.check("recomposition", certificate(c.recomposition, tol));
    rep.check("unitary-part", certificate(c.unitarity, tol));
    rep.check("unitary-coherence", c.unitary_coherence.clone());
    rep.check("positive-coherence", c.positive_coherence.clone());
    rep.check("positive-root", certificate(c.positive_root, tol));
    if let Some(t) = &c.transport {
        rep.check("transport", t.clone());
    }
}

fn equivalence_of(ds: &Dataset, command: &str) -> Result<EquivalenceData> {
    match (&ds.equivalence, &ds.gauge, &ds.f) {
        (Some(s), _, _) => Ok(s.equivalence.clone()),
        (None, Some(g), Some(f)) => EquivalenceData::from_gauge(f, g),
        _ => Err(Error::Input(format!("`{command}` needs an `equivalence` section, or `f_symbols` with a `gauge`"))),
    }
}

fn cmd_verify(ctx: &Ctx, file: &Path, requested: &[String]) -> Result<Report> {
    let ds = ctx.load(file, Validation::WarnOnly)?;
    let mut rep = Report::new("verify", ds.name.clone(), ds.tol);
    rep.warnings = ds.warnings.clone();
    let names: Vec<String> = if !requested.is_empty() {
        requested.to_vec()
    } else if !ds.checks.is_empty() {
        ds.checks.clone()
    } else {
        checks::applicable_checks(&ds).into_iter().map(String::from).collect()
    };
    for name in &names {
        match checks::run_check(&ds, name) {
            Ok(r) => rep.check(&r.name, r.residual),
            Err(e) if e.is_input_error() => return Err(e),
            Err(e) => rep.check(name, Residual::new(f64::INFINITY, ds.tol, Some(e.to_string()), 0)),
        }
    }
    Ok(rep)
}

fn cmd_unitarize(ctx: &Ctx, file: &Path) -> Result<Report> {
    let mut ds = ctx.load(file, Validation::Strict)?;
    let input = ds.clone();
    let tol = ds.tol;
    let mut rep = Report::new("unitarize", ds.name.clone(), tol);
    let mut did = false;
    if ds.equivalence.is_some() || ds.gauge.is_some() {
        let e = equivalence_of(&ds, "unitarize")?;
        let u = unitarize_equivalence(&e)?;
        factorization_checks(&mut rep, &u.factorization, tol);
        rep.check("trivialization-lstsq", certificate(u.trivialization.lstsq_residual, tol));
        rep.check("trivialization-reconstruction", certificate(u.trivialization.reconstruction, tol));
        rep.check("unitarity", u.unitarity.clone());
        rep.check("coherence", u.coherence.clone());
        rep.check("monoidality", u.monoidality.clone());
        rep.value(
            "nat_iso",
            Value::Array(u.nat_iso.components().iter().map(|&z| complex_json(z)).collect()),
        );
        let target_r = ds.equivalence.as_ref().and_then(|s| s.target_r.clone());
        ds.equivalence = Some(io::EquivalenceSection {
            equivalence: u.equivalence,
            target_r,
        });
        did = true;
    }
    if let Some(sec) = ds.nat_iso.clone() {
        let e1 = checks::nat_iso_domain(&input)?;
        let e2 = checks::nat_iso_codomain(&input)?;
        let n = unitarize_nat_iso(&sec.eta, &e1, &e2)?;
        rep.check("nat-iso-certificate", certificate(n.certificate, tol));
        rep.check("nat-iso-monoidality", n.monoidality.clone());
        rep.check("nat-iso-character", certificate(n.character_residual, tol));
        ds.nat_iso = Some(io::NatIsoSection {
            eta: n.unitary,
            target_tensorator: sec.target_tensorator,
        });
        did = true;
    }
    if let (Some(p), Some(f)) = (&ds.positive_gauge, &ds.f) {
        let t = trivialize_positive_monoidal(p, f)?;
        rep.check("positive-gauge-lstsq", certificate(t.lstsq_residual, tol));
        rep.check("positive-gauge-reconstruction", certificate(t.reconstruction, tol));
        rep.value(
            "positive_gauge_mu",
            Value::Array(t.mu.components().iter().map(|&z| complex_json(z)).collect()),
        );
        did = true;
    }
    if !did {
        return Err(Error::Input(
            "`unitarize` needs an `equivalence`, `gauge`, `nat_iso` or `positive_gauge` section".into(),
        ));
    }
    ctx.write_out(&ds)?;
    Ok(rep)
}

fn cmd_factorize(ctx: &Ctx, file: &Path) -> Result<Report> {
    let mut ds = ctx.load(file, Validation::Strict)?;
    let tol = ds.tol;
    let mut rep = Report::new("factorize", ds.name.clone(), tol);
    let e = equivalence_of(&ds, "factorize")?;
    let braided = match (&ds.r, ds.equivalence.as_ref().and_then(|s| s.target_r.as_ref())) {
        (Some(src), Some(tgt)) => Some((src.clone(), tgt.clone())),
        _ => None,
    };
    let fact = match braided {
        Some((src, tgt)) => {
            let b = factorize_braided_equivalence(&e, &src, &tgt)?;
            rep.check("braided", b.compatibility.clone());
            rep.check("commutation", b.commutation.clone());
            rep.check("unitary-braided", b.unitary_braided.clone());
            b.factorization
        }
        None => factorize_equivalence(&e)?,
    };
    factorization_checks(&mut rep, &fact.certificates, tol);
    let target_r = ds.equivalence.as_ref().and_then(|s| s.target_r.clone());
    ds.equivalence = Some(io::EquivalenceSection {
        equivalence: fact.unitary_equivalence,
        target_r,
    });
    ds.positive_gauge = Some(fact.positive_part);
    ds.gauge = None;
    ctx.write_out(&ds)?;
    Ok(rep)
}

fn cmd_polar(ctx: &Ctx, file: &Path) -> Result<Report> {
    let mut ds = ctx.load(file, Validation::Strict)?;
    let tol = ds.tol;
    let mut rep = Report::new("polar", ds.name.clone(), tol);
    let g = need(&ds.gauge, "polar", "gauge")?;
    let p = polar_decompose_gauge(g)?;
    rep.check("recomposition", certificate(p.residual, tol));
    rep.check("unitary-part", certificate(p.unitary_part.unitarity_residual(), tol));
    ds.gauge = Some(p.unitary_part);
    ds.positive_gauge = Some(p.positive_part);
    ctx.write_out(&ds)?;
    Ok(rep)
}

fn cmd_gauge_search(ctx: &Ctx, file: &Path) -> Result<Report> {
    let mut ds = ctx.load(file, Validation::Strict)?;
    let tol = ds.tol;
    let mut rep = Report::new("gauge-search", ds.name.clone(), tol);
    let f = need(&ds.f, "gauge-search", "f_symbols")?;
    let s = search_unitary_gauge(f, ctx.max_iters, ctx.seed);
    rep.check("unitary", certificate(s.residual, tol));
    rep.value("iterations", json!(s.iterations));
    rep.value("converged", json!(s.converged));
    rep.value("seed", json!(ctx.seed));
    let gauged = apply_gauge(f, &s.gauge)?;
    ds.f = Some(gauged);
    ds.gauge = Some(s.gauge);
    ctx.write_out(&ds)?;
    Ok(rep)
}

fn cmd_cocycle(ctx: &Ctx, op: CocycleOp, file: &Path, degree: Option<usize>) -> Result<Report> {
    let mut ds = ctx.load(file, Validation::Strict)?;
    let tol = ds.tol;
    let omega = need(&ds.cochain, "cocycle", "cochain")?.clone();
    if let Some(d) = degree {
        if d != omega.degree() {
            return Err(Error::Input(format!(
                "--degree {d} given but the cochain has degree {}",
                omega.degree()
            )));
        }
    }
    let name = match op {
        CocycleOp::Verify => "cocycle verify",
        CocycleOp::Split => "cocycle split",
        CocycleOp::Trivialize => "cocycle trivialize",
        CocycleOp::Unitarize => "cocycle unitarize",
        CocycleOp::BuildVecg => "cocycle build-vecg",
    };
    let mut rep = Report::new(name, ds.name.clone(), tol);
    let cocycle_residual = |c: &Cochain| {
        let r = verify_cocycle(c, tol);
        Residual::new(r.residual, tol, r.violation.map(|t| format!("{t:?}")), 1)
    };
    match op {
        CocycleOp::Verify => rep.check("cocycle", cocycle_residual(&omega)),
        CocycleOp::Split => {
            let (u, r) = polar_split_cocycle(&omega, tol)?;
            rep.check("unitary-part", cocycle_residual(&u));
            rep.check("positive-part", cocycle_residual(&r));
            rep.value("unitary", cochain_json(&u));
            rep.value("positive", cochain_json(&r));
            ds.cochain = Some(u);
        }
        CocycleOp::Trivialize => {
            let t = trivialize_positive_cocycle(&omega, tol)?;
            rep.check("coboundary", certificate(t.residual, tol));
            rep.value("eta", cochain_json(&t.eta));
            ds.cochain = Some(t.eta);
        }
        CocycleOp::Unitarize => {
            let u = unitarize_cocycle(&omega, tol)?;
            rep.check("certificate", certificate(u.certificate, tol));
            rep.check("unitary-cocycle", cocycle_residual(&u.unitary));
            rep.value("eta", cochain_json(&u.eta));
            ds.cochain = Some(u.unitary);
        }
        CocycleOp::BuildVecg => {
            let group = need(&ds.group, "cocycle", "group")?;
            let (ring, f) = build_vecg_category(group, &omega, tol)?;
            rep.check("pentagon", verify_pentagon(&f)?);
            let mut out = Dataset::new(&format!("vec-{}", group.name().to_lowercase()));
            out.tolerance = ds.tolerance;
            out.ring = Some(ring);
            out.f = Some(f);
            out.checks = vec!["ring".into(), "pentagon".into()];
            ds = out;
        }
    }
    ctx.write_out(&ds)?;
    Ok(rep)
}

fn cmd_module(ctx: &Ctx, op: ModuleOp, file: &Path) -> Result<Report> {
    match op {
        ModuleOp::Verify => {
            let ds = ctx.load(file, Validation::WarnOnly)?;
            let mut rep = Report::new("module verify", ds.name.clone(), ds.tol);
            need(&ds.module, "module verify", "module_data")?;
            for name in checks::applicable_checks(&ds).into_iter().filter(|c| c.starts_with("module-")) {
                match checks::run_check(&ds, name) {
                    Ok(r) => rep.check(&r.name, r.residual),
                    Err(e) if e.is_input_error() => return Err(e),
                    Err(e) => rep.check(name, Residual::new(f64::INFINITY, ds.tol, Some(e.to_string()), 0)),
                }
            }
            Ok(rep)
        }
        ModuleOp::Unitarize => {
            let mut ds = ctx.load(file, Validation::Strict)?;
            let tol = ds.tol;
            let mut rep = Report::new("module unitarize", ds.name.clone(), tol);
            let e = need(&ds.module_equivalence, "module unitarize", "module_equivalence")?;
            let u = unitarize_module_equivalence(e)?;
            let fact = &u.factorization;
            rep.check("recomposition", certificate(fact.recomposition, tol));
            rep.check("unitary-part", certificate(fact.unitarity, tol));
            rep.check("unitary-coherence", fact.unitary_coherence.clone());
            rep.check("positive-coherence", fact.positive_coherence.clone());
            rep.check("trivialization-lstsq", certificate(u.trivialization.lstsq_residual, tol));
            rep.check("trivialization-reconstruction", certificate(u.trivialization.reconstruction, tol));
            rep.check("unitarity", u.unitarity.clone());
            rep.check("coherence", u.coherence.clone());
            rep.check("naturality", u.naturality.clone());
            rep.value("nat_iso", json!(u.nat_iso));
            ds.module_equivalence = Some(u.equivalence);
            ctx.write_out(&ds)?;
            Ok(rep)
        }
    }
}

fn cmd_examples(ctx: &Ctx, op: ExamplesOp, name: Option<&str>, stdout: &mut dyn Write) -> Result<Report> {
    let rep = Report::new("examples", name.map(String::from), ctx.tol.unwrap_or(ctx.default_tol));
    match op {
        ExamplesOp::List => {
            for ds in library::all() {
                let _ = writeln!(
                    stdout,
                    "{:<28} {}",
                    ds.name.as_deref().unwrap_or(""),
                    ds.description.as_deref().unwrap_or("")
                );
            }
        }
        ExamplesOp::Emit => {
            let name = name.ok_or_else(|| Error::Input("`examples emit` needs a dataset name".into()))?;
            let ds = library::example(name).ok_or_else(|| {
                Error::Input(format!("unknown example `{name}`; run `unitarize examples list`"))
            })?;
            match &ctx.out {
                Some(_) => ctx.write_out(&ds)?,
                None => {
                    let _ = stdout.write_all(io::emit_dataset(&ds)?.as_bytes());
                }
            }
        }
    }
    Ok(rep)
}

fn print_report(rep: &Report, out: &mut dyn Write) {
    for w in &rep.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    for c in &rep.checks {
        let r = &c.residual;
        let _ = write!(
            out,
            "{:<30} {:>10.3e}  tol {:.1e}  {}",
            c.name,
            r.residual,
            r.tolerance,
            if r.pass { "ok" } else { "FAIL" }
        );
        match &r.worst {
            Some(w) if !r.pass => {
                let _ = writeln!(out, "  at {w}");
            }
            _ => {
                let _ = writeln!(out);
            }
        }
    }
    for (k, v) in &rep.values {
        let _ = writeln!(out, "{k}: {v}");
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Output goes to the given writers.
pub fn run_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let default_tol = match default_tol_from_env() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            let _ = writeln!(stderr, "error: --tol must be positive, got {t}");
            return 2;
        }
    }
    let ctx = Ctx {
        tol: cli.tol,
        default_tol,
        seed: cli.seed,
        max_iters: cli.max_iters,
        out: cli.out.clone(),
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Verify { file, checks } => cmd_verify(&ctx, file, checks),
        Command::Unitarize { file } => cmd_unitarize(&ctx, file),
        Command::Factorize { file } => cmd_factorize(&ctx, file),
        Command::Polar { file } => cmd_polar(&ctx, file),
        Command::GaugeSearch { file } => cmd_gauge_search(&ctx, file),
        Command::Cocycle { op, file, degree } => cmd_cocycle(&ctx, *op, file, *degree),
        Command::Module { op, file } => cmd_module(&ctx, *op, file),
        Command::Examples { op, name } => cmd_examples(&ctx, *op, name.as_deref(), stdout),
    };
    let (mut rep, code) = match result {
        Ok(rep) => {
            let code = if rep.pass { 0 } else { 1 };
            (rep, code)
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let code = if e.is_input_error() { 2 } else { 1 };
            let mut rep = Report::new("error", None, ctx.tol.unwrap_or(default_tol));
            rep.pass = false;
            rep.error = Some(e.to_string());
            (rep, code)
        }
    };
    if cli.timings {
        rep.elapsed_seconds = Some(start.elapsed().as_secs_f64());
    }
    if !matches!(cli.command, Command::Examples { .. }) {
        print_report(&rep, stdout);
        let _ = writeln!(stdout, "{}", if rep.pass { "PASS" } else { "FAIL" });
    }
    if let Some(path) = &cli.report {
        let text = serde_json::to_string_pretty(&rep).expect("reports serialize") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    code
}

/// [`run_with`] on the process streams.
pub fn run_command(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(args, &mut out, &mut err)
}
