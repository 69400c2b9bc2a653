//! Command-line front end: point set files in, JSON reports and CSV traces out.
//!
//! Exit codes: 0 on success, 1 when a verification reported by the command
//! fails, 2 on usage or input errors.

pub mod format;
pub mod report;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ap_functions::{ExpPolynomial, Grid, Term};
use crate::error::{Error, Result};
use crate::generators::{perturbed_lattice, sine_example, IndexBox, LatticeMatrix};
use crate::kronecker::common_integer_almost_periods;
use crate::matching::{bottleneck_eps, card_bound, center_sweep, density, scan_periods, MatchPolicy};
use crate::measures::{convolve_line, signed_density, weak_ap_sup_diff, Mollifier};
use crate::model::{Point, Window};
use crate::one_dim::{decompose, f_shift_quality, shift_counts, sort_line};
use crate::signed_examples::{
    corollary_set, max_even_offset, theorem1_set, theorem2_set, verify_distributional_ap, verify_not_ap,
    verify_unbounded_variation,
};

use report::{Outcome, Provenance, Report};

#[derive(Debug, Parser)]
#[command(name = "apset", version, about = "Almost periodic discrete point sets")]
pub struct Cli {
    /// Worker threads for the parallel scans.
    #[arg(long, env = "APSET_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set file.
    Generate(GenerateArgs),
    /// Scan candidate shifts for ε-almost periods.
    Periods(PeriodsArgs),
    /// Check a single shift.
    Check(CheckArgs),
    /// Counting density over balls.
    Density(DensityArgs),
    /// Shift differences of the mollified measure.
    Convolve(ConvolveArgs),
    /// Split a set on the line as `a_k = D·k + f(k)`.
    Decompose(DecomposeArgs),
    /// Verification tables for the 2-adic constructions.
    Counterexample(CounterexampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Perturbed,
    Sine,
    Theorem1,
    Theorem2,
    Corollary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Theorem1,
    Theorem2,
    Corollary,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: GenerateKind,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Symmetric index bound: `k ∈ [-K, K]^d`.
    #[arg(long = "K", default_value_t = 100)]
    pub k: i64,
    /// Range bound of the 2-adic constructions.
    #[arg(long = "N", default_value_t = 8192)]
    pub n: i64,
    /// Lattice matrix, rows separated by `;`, entries by `,`.
    #[arg(long)]
    pub gamma: Option<String>,
    /// One perturbation component per flag: `freq:a_sin[:b_cos]` terms joined by `+`.
    #[arg(long = "F")]
    pub f: Vec<String>,
    /// Also certify integer almost periods at this ε.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub bound: i64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PeriodsArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    /// `lo:step:hi` on the line, or vectors separated by `;`.
    #[arg(long, conflicts_with = "kronecker")]
    pub candidates: Option<String>,
    /// Use certified integer periods of the perturbation as candidates.
    #[arg(long, requires = "f")]
    pub kronecker: bool,
    #[arg(long = "F")]
    pub f: Vec<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub bound: i64,
    /// CSV trace of `ε*(τ)`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    /// Include every matched pair in the report.
    #[arg(long)]
    pub pairs: bool,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "10,50,100")]
    pub radii: String,
    /// Centers separated by `;`; defaults to the window center.
    #[arg(long, allow_hyphen_values = true)]
    pub centers: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.4)]
    pub scale: f64,
    /// Shifts separated by `;`.
    #[arg(long = "tau-list", allow_hyphen_values = true)]
    pub tau_list: String,
    /// Grid box `lo;hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    /// CSV trace of `g` on the grid (line only).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub input: PathBuf,
    /// Integer shifts `q` for the repetition table of `f`.
    #[arg(long = "q-list", default_value = "1,2,3", allow_hyphen_values = true)]
    pub q_list: String,
    /// Almost periods to pair with index shifts.
    #[arg(long, allow_hyphen_values = true)]
    pub taus: Option<String>,
    /// CSV of `k, a_k, f(k)`.
    #[arg(long = "f-csv")]
    pub f_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    pub name: ExampleName,
    #[arg(long = "N", default_value_t = 8192)]
    pub n: i64,
    #[arg(long = "K", default_value_t = 12)]
    pub k: u32,
    #[arg(long, default_value_t = 0.4)]
    pub scale: f64,
    /// Grid box `lo;hi` for the convolution table.
    #[arg(long, default_value = "-200;200", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long = "grid-step", default_value_t = 1e-3)]
    pub grid_step: f64,
    #[arg(long, default_value = "3,4,5,6,7,8")]
    pub levels: String,
    #[arg(long, default_value_t = 2)]
    pub multiples: u32,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 4.0)]
    pub margin: f64,
    /// Integer shifts `2..=tau-max` for the bottleneck scan.
    #[arg(long = "tau-max", default_value_t = 256)]
    pub tau_max: i64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut report = outcome.report;
    report.wall_time = start.elapsed().as_secs_f64();
    let text = report.to_json();
    let written = match &cli.report {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.verified {
        0
    } else {
        eprintln!("verification failed");
        1
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Periods(a) => cmd_periods(a),
        Command::Check(a) => cmd_check(a),
        Command::Density(a) => cmd_density(a),
        Command::Convolve(a) => cmd_convolve(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Counterexample(a) => cmd_counterexample(a),
    }
}

fn outcome(command: &str, inputs: Value, results: Value, policy: Value, verified: bool) -> Outcome {
    Outcome {
        report: Report {
            command: command.to_string(),
            inputs,
            results,
            policy,
            provenance: Provenance::default(),
            wall_time: 0.0,
        },
        verified,
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| invalid(format!("{s:?}: {e}")))
}

/// `"1,2,3"`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',').map(parse_num).collect()
}

/// `"1,0;0,1"`.
pub fn parse_vectors(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_list).collect()
}

/// `"lo:step:hi"`, endpoints included.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s.split(':').map(parse_num).collect::<Result<_>>()?;
    let [lo, step, hi] = parts[..] else {
        return Err(invalid(format!("range must be lo:step:hi, got {s:?}")));
    };
    if !(step > 0.0) || hi < lo {
        return Err(invalid(format!("empty range {s:?}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// One component `freq:a_sin[:b_cos]` with terms joined by `+`; vector
/// frequencies use `,`.
pub fn parse_perturbation(s: &str, dim: usize) -> Result<ExpPolynomial> {
    let mut total = ExpPolynomial::zero(dim);
    for term in s.split('+') {
        let parts: Vec<&str> = term.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(invalid(format!("term must be freq:a[:b], got {term:?}")));
        }
        let freq: Vec<f64> = parse_list(parts[0])?;
        let a: f64 = parse_num(parts[1])?;
        let b: f64 = parts.get(2).map_or(Ok(0.0), |p| parse_num(p))?;
        if freq.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: freq.len(),
            });
        }
        total = total.add(&ExpPolynomial::trig(freq, a, b)?)?;
    }
    Ok(total)
}

fn lattice_from(gamma: Option<&str>, dim: usize) -> Result<LatticeMatrix> {
    match gamma {
        None => Ok(LatticeMatrix::identity(dim)),
        Some(g) => LatticeMatrix::new(parse_vectors(g)?),
    }
}

fn perturbation_from(specs: &[String], dim: usize) -> Result<Vec<ExpPolynomial>> {
    if specs.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: specs.len(),
        });
    }
    specs.iter().map(|s| parse_perturbation(s, dim)).collect()
}

fn terms_json(f: &ExpPolynomial) -> Value {
    Value::Array(
        f.terms()
            .iter()
            .map(|t: &Term| json!({ "frequency": t.frequency, "re": t.coefficient.re, "im": t.coefficient.im }))
            .collect(),
    )
}

fn points_from(vectors: Vec<Vec<f64>>) -> Result<Vec<Point>> {
    vectors.into_iter().map(Point::new).collect()
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn window_json(w: &Window) -> Value {
    json!({ "lower": w.lower().coords(), "upper": w.upper().coords() })
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<Outcome> {
    let mut results = serde_json::Map::new();
    let certify = |lattice: &crate::generators::PerturbedLattice, results: &mut serde_json::Map<String, Value>| {
        if let Some(eps) = a.eps {
            let periods = lattice.certified_periods(eps, a.bound)?;
            let list: Vec<Value> = periods
                .iter()
                .map(|p| json!({ "r": p.r, "tau": p.tau.coords(), "set_eps": p.set_eps }))
                .collect();
            results.insert("certified_periods".into(), Value::Array(list));
        }
        results.insert("injective".into(), json!(lattice.is_injective()));
        Ok::<_, Error>(())
    };
    let set = match a.kind {
        GenerateKind::Sine => {
            let g = sine_example(a.dim, &IndexBox::symmetric(a.dim, a.k)?)?;
            certify(&g, &mut results)?;
            g.set
        }
        GenerateKind::Perturbed => {
            let lattice = lattice_from(a.gamma.as_deref(), a.dim)?;
            let f = perturbation_from(&a.f, lattice.dim())?;
            let g = perturbed_lattice(&lattice, &f, &IndexBox::symmetric(lattice.dim(), a.k)?)?;
            results.insert(
                "perturbation".into(),
                Value::Array(f.iter().map(terms_json).collect()),
            );
            certify(&g, &mut results)?;
            g.set
        }
        GenerateKind::Theorem1 => theorem1_set(a.n)?,
        GenerateKind::Theorem2 => theorem2_set(a.n)?,
        GenerateKind::Corollary => corollary_set(a.n)?,
    };
    format::write(&a.out, &set)?;
    results.insert("records".into(), json!(set.len()));
    results.insert("total_mass".into(), json!(set.total_mass()));
    results.insert("window".into(), window_json(set.window()));
    let inputs = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "dim": a.dim, "K": a.k, "N": a.n, "gamma": a.gamma, "F": a.f,
        "out": a.out.display().to_string(),
    });
    let policy = json!({ "eps": a.eps, "bound": a.bound });
    Ok(outcome("generate", inputs, Value::Object(results), policy, true))
}

pub fn cmd_periods(a: &PeriodsArgs) -> Result<Outcome> {
    let set = format::read(&a.input)?;
    let policy = MatchPolicy::new(a.margin)?;
    let candidates: Vec<Point> = if a.kronecker {
        let lattice = lattice_from(a.gamma.as_deref(), set.dim())?;
        let f = perturbation_from(&a.f, set.dim())?;
        common_integer_almost_periods(&f, a.eps, a.bound)?
            .iter()
            .map(|r| Point::new(lattice.apply(r)))
            .collect::<Result<_>>()?
    } else {
        let spec = a
            .candidates
            .as_deref()
            .ok_or_else(|| invalid("either --candidates or --kronecker is required"))?;
        if spec.contains(':') {
            parse_range(spec)?.into_iter().map(Point::scalar).collect()
        } else {
            points_from(parse_vectors(spec)?)?
        }
    };
    let scan = scan_periods(&set, a.eps, &candidates, &policy)?;
    if let Some(path) = &a.csv {
        write_csv(
            path,
            "tau,eps_star",
            scan.entries
                .iter()
                .map(|e| vec![e.tau[0], e.eps_star.unwrap_or(f64::INFINITY)]),
        )?;
    }
    let inputs = json!({
        "input": a.input.display().to_string(), "candidates": a.candidates,
        "kronecker": a.kronecker, "F": a.f, "gamma": a.gamma, "bound": a.bound,
        "candidate_count": candidates.len(),
    });
    let results = json!({
        "accepted": scan.accepted,
        "max_gap": scan.max_gap,
        "table": scan.entries,
    });
    let policy = json!({ "eps": a.eps, "margin": policy.margin });
    Ok(outcome("periods", inputs, results, policy, true))
}

pub fn cmd_check(a: &CheckArgs) -> Result<Outcome> {
    let set = format::read(&a.input)?;
    let tau = Point::new(parse_list(&a.tau)?)?;
    let policy = MatchPolicy::new(a.margin)?;
    if a.eps > policy.margin {
        return Err(Error::MarginTooSmall { margin: policy.margin });
    }
    let inputs = json!({ "input": a.input.display().to_string(), "tau": tau.coords() });
    let policy_json = json!({ "eps": a.eps, "margin": a.margin });
    let (verdict, results) = match bottleneck_eps(&set, &tau, &policy) {
        Ok(mut report) => {
            let verdict = report.eps_star < a.eps;
            if !a.pairs {
                report.matched_pairs.clear();
            }
            (verdict, json!({ "verdict": verdict, "match": report }))
        }
        Err(Error::MarginTooSmall { .. }) => (
            false,
            json!({ "verdict": false, "match": Value::Null, "reason": "bottleneck exceeds margin" }),
        ),
        Err(e) => return Err(e),
    };
    Ok(outcome("check", inputs, results, policy_json, verdict))
}

pub fn cmd_density(a: &DensityArgs) -> Result<Outcome> {
    let set = format::read(&a.input)?;
    let radii: Vec<f64> = parse_list(&a.radii)?;
    let centers = match &a.centers {
        Some(c) => points_from(parse_vectors(c)?)?,
        None => vec![set.window().center()],
    };
    let table = if set.is_signed() {
        signed_density(&set, &centers, &radii)?
    } else {
        density(&set, &centers, &radii)?
    };
    let inputs = json!({ "input": a.input.display().to_string(), "radii": radii,
        "centers": centers.iter().map(|c| c.coords().to_vec()).collect::<Vec<_>>() });
    let results = json!({ "signed": set.is_signed(), "estimate": table.estimate, "rows": table.rows });
    Ok(outcome("density", inputs, results, json!({ "balls": "open" }), true))
}

fn grid_from(spec: &str, step: Option<f64>) -> Result<Grid> {
    let v = parse_vectors(spec)?;
    let [lo, hi] = &v[..] else {
        return Err(invalid(format!("grid must be lo;hi, got {spec:?}")));
    };
    let w = Window::new(Point::new(lo.clone())?, Point::new(hi.clone())?)?;
    match step {
        Some(s) => Grid::new(w, s),
        None => Ok(Grid::with_default_step(w)),
    }
}

pub fn cmd_convolve(a: &ConvolveArgs) -> Result<Outcome> {
    let set = format::read(&a.input)?;
    let phi = Mollifier::new(a.scale)?;
    let grid = grid_from(&a.grid, a.grid_step)?;
    let taus = points_from(parse_vectors(&a.tau_list)?)?;
    let rows = taus
        .iter()
        .map(|tau| Ok(json!({ "tau": tau.coords(), "sup_diff": weak_ap_sup_diff(&set, &phi, tau, &grid)? })))
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = &a.csv {
        if set.dim() != 1 {
            return Err(invalid("the g(x) trace is only written on the line"));
        }
        let xs: Vec<f64> = grid.nodes().map(|n| n[0]).collect();
        let g = convolve_line(&set, &phi, &xs);
        write_csv(path, "x,g", xs.iter().zip(&g).map(|(x, y)| vec![*x, *y]))?;
    }
    let inputs = json!({ "input": a.input.display().to_string(), "grid": window_json(&grid.window),
        "taus": taus.iter().map(|t| t.coords().to_vec()).collect::<Vec<_>>() });
    let results = json!({ "deriv_sup": phi.deriv_sup(), "deriv_argmax": phi.deriv_argmax(), "rows": rows });
    let policy = json!({ "scale": a.scale, "grid_step": grid.step });
    Ok(outcome("convolve", inputs, results, policy, true))
}

pub fn cmd_decompose(a: &DecomposeArgs) -> Result<Outcome> {
    let set = format::read(&a.input)?;
    let line = sort_line(&set)?;
    let d = decompose(&line)?;
    let qs: Vec<i64> = parse_list(&a.q_list)?;
    let quality = qs
        .iter()
        .map(|&q| Ok(json!({ "q": q, "quality": f_shift_quality(&d.f, q)? })))
        .collect::<Result<Vec<_>>>()?;
    let pairs = match &a.taus {
        Some(t) => shift_counts(&d, &parse_list::<f64>(t)?)?,
        None => Vec::new(),
    };
    let bound = match center_sweep(set.window(), 1.0, 0.25) {
        Ok(centers) => Some(card_bound(&set, &centers)?),
        Err(_) => None,
    };
    if let Some(path) = &a.f_csv {
        write_csv(
            path,
            "k,a_k,f_k",
            (d.f.k_min..=d.f.k_max()).map(|k| vec![k as f64, line.get(k).expect("indexed"), d.f.get(k).expect("indexed")]),
        )?;
    }
    let inputs = json!({ "input": a.input.display().to_string(), "q_list": qs, "taus": a.taus });
    let results = json!({
        "slope": d.slope,
        "endpoint_slope": d.endpoint_slope,
        "density": d.density,
        "anchor_offset": d.anchor_offset,
        "k_range": [d.f.k_min, d.f.k_max()],
        "discrepancy": d.discrepancy,
        "card_bound": bound,
        "four_card_bound": bound.map(|b| 4 * b),
        "shift_quality": quality,
        "shift_counts": pairs,
    });
    Ok(outcome("decompose", inputs, results, json!({ "card_bound_center_step": 0.25 }), true))
}

pub fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Outcome> {
    let phi = Mollifier::new(a.scale)?;
    let grid = grid_from(&a.grid, Some(a.grid_step))?;
    let levels: Vec<u32> = parse_list(&a.levels)?;
    let top = a.tau_max.min(a.n / 2);
    let candidates: Vec<f64> = (2..=top).map(|t| t as f64).collect();
    let mut results = serde_json::Map::new();
    let verified = match a.name {
        ExampleName::Theorem1 => {
            let set = theorem1_set(a.n)?;
            let var = verify_unbounded_variation(&set, a.k)?;
            let weak = verify_distributional_ap(&set, &phi, &levels, a.multiples, &grid, a.tolerance)?;
            if let Some(path) = &a.csv {
                write_csv(path, "k,variation", var.rows.iter().map(|r| vec![r.k as f64, r.variation as f64]))?;
            }
            let ok = var.holds && weak.holds;
            results.insert("variation".into(), json!(var));
            results.insert("weak_ap".into(), json!(weak));
            ok
        }
        ExampleName::Theorem2 => {
            let set = theorem2_set(a.n)?;
            let weak = verify_distributional_ap(&set, &phi, &levels, a.multiples, &grid, a.tolerance)?;
            let (plus, _) = set.split_signs();
            let non_ap = verify_not_ap(&plus, a.eps, &candidates, a.margin)?;
            let offset = max_even_offset(&plus);
            if let Some(path) = &a.csv {
                write_csv(
                    path,
                    "tau,eps_star",
                    non_ap.entries.iter().map(|e| vec![e.tau, e.eps_star.unwrap_or(f64::INFINITY)]),
                )?;
            }
            let ok = weak.holds && non_ap.holds && offset < 0.25;
            results.insert("weak_ap".into(), json!(weak));
            results.insert("positive_part_scan".into(), json!(non_ap));
            results.insert("max_even_offset".into(), json!(offset));
            ok
        }
        ExampleName::Corollary => {
            let set = corollary_set(a.n)?;
            let radius = (a.n / 2) as f64;
            let dens = density(&set, &[Point::scalar(1.0)], &[radius / 4.0, radius / 2.0, radius])?;
            let non_ap = verify_not_ap(&set, a.eps, &candidates, a.margin)?;
            if let Some(path) = &a.csv {
                write_csv(
                    path,
                    "tau,eps_star",
                    non_ap.entries.iter().map(|e| vec![e.tau, e.eps_star.unwrap_or(f64::INFINITY)]),
                )?;
            }
            let ok = non_ap.holds;
            results.insert("density".into(), json!(dens));
            results.insert("scan".into(), json!(non_ap));
            ok
        }
    };
    let inputs = json!({ "name": format!("{:?}", a.name).to_lowercase(), "N": a.n, "K": a.k,
        "levels": levels, "multiples": a.multiples, "grid": window_json(&grid.window), "tau_max": top });
    let policy = json!({ "scale": a.scale, "grid_step": a.grid_step, "tolerance": a.tolerance,
        "eps": a.eps, "margin": a.margin });
    Ok(outcome("counterexample", inputs, Value::Object(results), policy, verified))
}
