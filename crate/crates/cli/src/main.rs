//! `gost`: command-line front end for the gost-mi toolkit.

mod svg;
mod table;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use gost_mi::critical::{self, StabilityDiagram};
use gost_mi::floquet_hill::{self, FloquetProblem};
use gost_mi::{mi_index, stokes, symbols, DispersionSymbol, Error, ModelParams};

use table::{Format, Table};

/// Environment variable naming the directory that relative output paths are
/// resolved against.
const OUT_DIR_VAR: &str = "GOST_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "gost",
    version,
    about = "Stokes waves and modulational instability for dispersion-generalized Ostrovsky equations"
)]
struct Cli {
    /// Output format for records.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,

    /// Write records to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Directory for relative output paths.
    #[arg(long, env = OUT_DIR_VAR, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Symbol specification `name[:key=value,...]`.
    #[arg(long, default_value = "kdv")]
    symbol: String,

    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha")]
    beta: Option<f64>,

    #[arg(long, allow_hyphen_values = true, conflicts_with = "alpha")]
    gamma: Option<f64>,

    /// Sets beta = sign(alpha), gamma = |alpha|.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,

    /// Surface tension for kdv_st / whitham_st.
    #[arg(long = "T")]
    tension: Option<f64>,

    /// Exponent for fkdv.
    #[arg(long)]
    delta: Option<f64>,
}

impl ModelArgs {
    fn symbol_parts(&self) -> Result<(String, BTreeMap<String, f64>)> {
        let (name, mut params) = symbols::parse_spec(&self.symbol)?;
        if let Some(t) = self.tension {
            params.insert("T".into(), t);
        }
        if let Some(d) = self.delta {
            params.insert("delta".into(), d);
        }
        Ok((name, params))
    }

    fn symbol(&self) -> Result<DispersionSymbol> {
        let (name, params) = self.symbol_parts()?;
        Ok(symbols::make_symbol(&name, &params)?)
    }

    fn params(&self) -> Result<ModelParams> {
        Ok(match self.alpha {
            Some(a) => ModelParams::from_alpha(a)?,
            None => ModelParams::new(self.beta.unwrap_or(1.0), self.gamma.unwrap_or(1.0))?,
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the symbol hypotheses on a k grid.
    Symbols {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100.0)]
        kmax: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Stokes expansion coefficients and residual.
    Stokes {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        a: f64,
        /// Cosine modes used for the residual norm.
        #[arg(long, default_value_t = 16)]
        modes: usize,
        /// Number of profile samples to write.
        #[arg(long, requires = "profile_output")]
        profile_points: Option<usize>,
        #[arg(long, requires = "profile_points")]
        profile_output: Option<PathBuf>,
    },
    /// Modulational instability index at one k or over a grid.
    Index {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, conflicts_with_all = ["k_min", "k_max", "nk"])]
        k: Option<f64>,
        #[arg(long, requires_all = ["k_max", "nk"])]
        k_min: Option<f64>,
        #[arg(long, requires_all = ["k_min", "nk"])]
        k_max: Option<f64>,
        #[arg(long, requires_all = ["k_min", "k_max"])]
        nk: Option<usize>,
    },
    /// Critical wavenumbers.
    Kc {
        #[command(flatten)]
        model: ModelArgs,
        /// Use bisection even when a closed form exists.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = critical::DEFAULT_BRACKET.0)]
        k_lo: f64,
        #[arg(long, default_value_t = critical::DEFAULT_BRACKET.1)]
        k_hi: f64,
    },
    /// Surface tension where the critical-wavenumber count changes.
    Tc {
        #[arg(long, default_value = "whitham_st")]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Floquet-Hill spectrum of the linearization about a Stokes wave.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, default_value_t = floquet_hill::DEFAULT_MODES)]
        modes: usize,
        /// Radius of the modulational window; defaults to 0.25 min(gamma, 1).
        #[arg(long)]
        window: Option<f64>,
    },
    /// Stability diagram over (k, T) for a surface-tension family.
    Diagram {
        #[arg(long, default_value = "kdv_st")]
        family: String,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        k_max: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        nk: usize,
        #[arg(long, default_value_t = 100)]
        nt: usize,
        /// Also render the diagram as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Re-check this many random cells against the Hill spectrum.
        #[arg(long, default_value_t = 0)]
        spot_checks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Argument combinations rejected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Spot checks that disagree with the diagram labels.
#[derive(Debug)]
struct ValidationFailure(String);

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationFailure {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn resolve(out_dir: Option<&Path>, path: &Path) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

struct Sink<'a> {
    format: Format,
    output: Option<PathBuf>,
    out_dir: Option<&'a Path>,
}

impl Sink<'_> {
    fn path(&self, p: &Path) -> PathBuf {
        resolve(self.out_dir, p)
    }

    fn emit(&self, t: &Table) -> Result<()> {
        match &self.output {
            Some(p) => {
                let path = self.path(p);
                let mut w = create(&path)?;
                t.write(self.format, &mut w)?;
                w.flush()
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                t.write(self.format, &mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(usage("--nk must be positive"));
    }
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(usage(format!("need 0 < k-min <= k-max, got [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn run_symbols(model: &ModelArgs, kmax: f64, samples: usize) -> Result<Table> {
    let s = model.symbol()?;
    let r = symbols::check_hypotheses(&s, kmax, samples)?;
    let mut t = Table::new(&[
        "symbol",
        "h1_passed",
        "m_at_zero",
        "h2_passed",
        "alpha",
        "fitted_slope",
        "c1",
        "c2",
        "h3_passed",
        "h3_n",
        "h3_k",
    ]);
    t.push(vec![
        s.to_string().into(),
        r.h1_passed.into(),
        r.m_at_zero.into(),
        r.h2.passed.into(),
        r.h2.alpha.into(),
        r.h2.fitted_slope.into(),
        r.h2.c1.into(),
        r.h2.c2.into(),
        r.h3_passed.into(),
        r.h3_first_violation.map(|v| v.n).into(),
        r.h3_first_violation.map(|v| v.k).into(),
    ]);
    Ok(t)
}

fn run_stokes(
    sink: &Sink,
    model: &ModelArgs,
    k: f64,
    a: f64,
    modes: usize,
    profile: Option<(usize, &Path)>,
) -> Result<Table> {
    let s = model.symbol()?;
    let p = model.params()?;
    let wave = stokes::expand(&s, &p, k)?;
    let residual = wave.residual_norm(a, modes)?;
    if let Some((n, path)) = profile {
        if n == 0 {
            return Err(usage("--profile-points must be positive"));
        }
        let mut prof = Table::new(&["z", "w", "order"]);
        for x in wave.sample(a, n)? {
            prof.push(vec![x.z.into(), x.w.into(), x.order.into()]);
        }
        let path = sink.path(path);
        let mut w = create(&path)?;
        prof.write(sink.format, &mut w)?;
        w.flush()?;
    }
    let mut t = Table::new(&[
        "k",
        "beta",
        "gamma",
        "c0",
        "c2",
        "A2",
        "A3",
        "residual_norm",
    ]);
    t.push(vec![
        k.into(),
        p.beta.into(),
        p.gamma.into(),
        wave.c0.into(),
        wave.c2.into(),
        wave.a2.into(),
        wave.a3.into(),
        residual.into(),
    ]);
    Ok(t)
}

fn run_index(model: &ModelArgs, ks: &[f64]) -> Result<Table> {
    let s = model.symbol()?;
    let p = model.params()?;
    let mut t = Table::new(&["k", "f1", "f2", "delta", "ratio", "class"]);
    for &k in ks {
        let r = mi_index::index(&s, &p, k)?;
        t.push(vec![
            r.k.into(),
            r.f1.into(),
            r.f2.into(),
            r.delta.into(),
            r.ratio.into(),
            r.classification.as_str().into(),
        ]);
    }
    Ok(t)
}

const CLOSED_FORMS: [&str; 3] = ["kdv", "fkdv", "kdv_st"];

fn run_kc(model: &ModelArgs, numeric: bool, bracket: (f64, f64)) -> Result<Table> {
    let (name, params) = model.symbol_parts()?;
    let p = model.params()?;
    let results = if !numeric && CLOSED_FORMS.contains(&name.as_str()) {
        let s = symbols::make_symbol(&name, &params)?;
        vec![critical::kc_closed_form(&name, &p, s.params())?]
    } else {
        let s = symbols::make_symbol(&name, &params)?;
        let scan = critical::kc_numeric(&s, &p, bracket)?;
        for d in &scan.diagnostics {
            eprintln!("warning: {d}");
        }
        scan.roots
    };
    let mut t = Table::new(&[
        "model",
        "beta",
        "gamma",
        "delta",
        "T",
        "kc",
        "mechanism",
        "method",
    ]);
    for r in results {
        t.push(vec![
            r.model.into(),
            r.beta.into(),
            r.gamma.into(),
            r.extra.get("delta").copied().into(),
            r.extra.get("T").copied().into(),
            r.kc.into(),
            r.mechanism.as_str().into(),
            match r.method {
                critical::Method::ClosedForm => "closed_form",
                critical::Method::Bisection => "bisection",
            }
            .into(),
        ]);
    }
    Ok(t)
}

fn run_tc(family: &str, alpha: f64, tol: f64) -> Result<Table> {
    let r = critical::tc_of_alpha(family, alpha, tol)?;
    let mut t = Table::new(&[
        "family",
        "alpha",
        "tc",
        "count_below",
        "count_above",
        "bracket_lo",
        "bracket_hi",
    ]);
    t.push(vec![
        r.variant.into(),
        r.alpha.into(),
        r.tc.into(),
        r.count_below.into(),
        r.count_above.into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
    ]);
    Ok(t)
}

fn run_spectrum(
    model: &ModelArgs,
    k: f64,
    a: f64,
    xi: f64,
    modes: usize,
    window: Option<f64>,
) -> Result<Table> {
    if xi == 0.0 {
        return Err(usage(
            "--xi must be non-zero: the n = 0 mode is singular at xi = 0",
        ));
    }
    let s = model.symbol()?;
    let p = model.params()?;
    let window = window.unwrap_or_else(|| floquet_hill::default_window(&p));
    if !(window > 0.0 && window.is_finite()) {
        return Err(usage(format!("--window must be positive, got {window}")));
    }
    let wave = stokes::expand(&s, &p, k)?;
    let spec = FloquetProblem::new(&wave, a, xi, modes)?.spectrum(window)?;
    eprintln!(
        "max_real_in_window={:e} N={} xi={} a={}",
        spec.max_real_in_window, spec.n_modes, xi, a
    );
    let mut t = Table::new(&["re", "im"]);
    for z in &spec.eigenvalues {
        t.push(vec![z.re.into(), z.im.into()]);
    }
    Ok(t)
}

fn diagram_table(d: &StabilityDiagram) -> Table {
    let mut t = Table::new(&["k", "T", "k_sqrtT", "label", "f1", "f2", "delta"]);
    for c in &d.cells {
        t.push(vec![
            c.k.into(),
            c.t.into(),
            c.k_sqrt_t.into(),
            c.label.label().into(),
            c.f1.into(),
            c.f2.into(),
            c.delta.into(),
        ]);
    }
    t
}

fn summarize_diagram(d: &StabilityDiagram) {
    eprintln!(
        "{} alpha={} beta={} gamma={}: {} stable and {} unstable regions, {} phase-curve and {} group-curve points",
        d.family,
        d.alpha,
        d.beta,
        d.gamma,
        d.stable_regions,
        d.unstable_regions,
        d.phase_curve.len(),
        d.group_curve.len()
    );
    for p in &d.intersections {
        eprintln!("curves intersect near T={:.6} k={:.6}", p.t, p.k);
    }
}

#[allow(clippy::too_many_arguments)]
fn run_diagram(
    sink: &Sink,
    family: &str,
    alpha: f64,
    k_max: f64,
    t_max: f64,
    nk: usize,
    nt: usize,
    svg_path: Option<&Path>,
    spot_checks: usize,
    seed: u64,
) -> Result<Table> {
    let d = critical::diagram(family, alpha, k_max, t_max, nk, nt)?;
    summarize_diagram(&d);
    if let Some(path) = svg_path {
        let path = sink.path(path);
        let mut w = create(&path)?;
        w.write_all(svg::render(&d).as_bytes())?;
        w.flush()?;
    }
    let table = diagram_table(&d);
    if spot_checks > 0 {
        let report = critical::spot_check(&d, spot_checks, seed)?;
        let bad: Vec<_> = report.checks.iter().filter(|c| !c.agrees).collect();
        eprintln!(
            "spot checks: {} checked, {} skipped, {} disagree",
            report.checks.len(),
            report.skipped,
            bad.len()
        );
        for c in &bad {
            eprintln!(
                "  cell ({}, {}) k={:.6} T={:.6} label={} hill_growth={:e}",
                c.i,
                c.j,
                c.k,
                c.t,
                c.label.label(),
                c.hill_growth
            );
        }
        if !bad.is_empty() {
            sink.emit(&table)?;
            return Err(ValidationFailure(format!(
                "{} of {} spot checks disagree with the diagram",
                bad.len(),
                report.checks.len()
            ))
            .into());
        }
    }
    Ok(table)
}

fn run(cli: Cli) -> Result<()> {
    let sink = Sink {
        format: cli.format,
        output: cli.output,
        out_dir: cli.out_dir.as_deref(),
    };
    let table = match &cli.command {
        Command::Symbols {
            model,
            kmax,
            samples,
        } => run_symbols(model, *kmax, *samples)?,
        Command::Stokes {
            model,
            k,
            a,
            modes,
            profile_points,
            profile_output,
        } => {
            let profile = profile_points.zip(profile_output.as_deref());
            run_stokes(&sink, model, *k, *a, *modes, profile)?
        }
        Command::Index {
            model,
            k,
            k_min,
            k_max,
            nk,
        } => {
            let ks = match (k, k_min, k_max, nk) {
                (Some(k), ..) => vec![*k],
                (None, Some(lo), Some(hi), Some(n)) => linear_grid(*lo, *hi, *n)?,
                _ => return Err(usage("index needs --k or --k-min/--k-max/--nk")),
            };
            run_index(model, &ks)?
        }
        Command::Kc {
            model,
            numeric,
            k_lo,
            k_hi,
        } => run_kc(model, *numeric, (*k_lo, *k_hi))?,
        Command::Tc { family, alpha, tol } => run_tc(family, *alpha, *tol)?,
        Command::Spectrum {
            model,
            k,
            a,
            xi,
            modes,
            window,
        } => run_spectrum(model, *k, *a, *xi, *modes, *window)?,
        Command::Diagram {
            family,
            alpha,
            k_max,
            t_max,
            nk,
            nt,
            svg,
            spot_checks,
            seed,
        } => run_diagram(
            &sink,
            family,
            *alpha,
            *k_max,
            *t_max,
            *nk,
            *nt,
            svg.as_deref(),
            *spot_checks,
            *seed,
        )?,
    };
    sink.emit(&table)
}

/// 1 for failures of the mathematics (resonance, T = 1/3, no root, I/O),
/// 2 for arguments the library rejects up front.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<ValidationFailure>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::UnknownSymbol(_)
            | Error::InvalidParameter { .. }
            | Error::MissingParameter(_)
            | Error::MalformedSpec(_)
            | Error::NonPositiveWavenumber(_)
            | Error::AmplitudeTooLarge { .. }
            | Error::FloquetExponent { .. }
            | Error::Truncation(_)
            | Error::UnsupportedModel(_)
            | Error::InvalidBracket { .. }
            | Error::InvalidArgument(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
