//! Command implementations behind the `fsketch` binary.
//!
//! Exit codes: 0 success, 1 recovery failure or failed experiment, 2 usage
//! or validation error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fsketch_core::analysis;
use fsketch_core::experiment::{self, ExperimentOutput};
use fsketch_core::lsh::gen_index_vector;
use fsketch_core::rational::parse_rational;
use fsketch_core::recover::{recover_fixed, recover_fixed_parallel, recover_sweep, timed};
use fsketch_core::sketch::{streams, validate_params, SketchFile, SketchParams};
use fsketch_core::{
    BitString, CodeSpec, Error, IndexVector, Rational, RecoveryReport, SeededRng, Sketcher,
};

pub const CSV_SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "fsketch",
    version,
    about = "Secure sketch over bit-sampling hashes and binary linear codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sketch a secret read from a text file of 0/1 characters.
    Sketch(SketchArgs),
    /// Recover a secret from a sketch file and a noisy reading.
    Recover(RecoverArgs),
    /// Print every bound for a parameter set.
    Bounds(BoundsArgs),
    /// Run a seeded Monte-Carlo experiment and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct SketchArgs {
    /// File holding the secret as a 0/1 string.
    #[arg(long)]
    pub input: PathBuf,
    /// Expected secret length; must equal the inner code dimension.
    #[arg(long)]
    pub k_star: Option<usize>,
    /// Inner code, `m':t` (BCH) or `random:n*:k*`.
    #[arg(long)]
    pub inner: CodeSpec,
    /// Outer code, `m':t` (BCH) or `random:n:k`.
    #[arg(long)]
    pub outer: CodeSpec,
    /// Error rate `a/b` or decimal, within [1/(2k*), 1/4].
    #[arg(long, value_parser = rational_arg)]
    pub eps_ss: Rational,
    /// Optional file with one comma-separated line of 1-based indices.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    #[arg(long)]
    pub sketch: PathBuf,
    /// File holding the noisy reading as a 0/1 string.
    #[arg(long)]
    pub input: PathBuf,
    /// Fixed recovery error rate.
    #[arg(long, value_parser = rational_arg, conflicts_with = "sweep", required_unless_present = "sweep")]
    pub eps_rec: Option<Rational>,
    /// Try weights 0, 1, … up to --max-weight.
    #[arg(long)]
    pub sweep: bool,
    /// Sweep cap; defaults to floor(k*/2).
    #[arg(long, requires = "sweep")]
    pub max_weight: Option<usize>,
    /// Split the fixed-weight enumeration across threads.
    #[arg(long, conflicts_with = "sweep")]
    pub parallel: bool,
    /// CSV file for the report row.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k_star: usize,
    #[arg(long)]
    pub n_star: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational_arg)]
    pub eps_ss: Rational,
    /// Defaults to 2·eps_ss.
    #[arg(long, value_parser = rational_arg)]
    pub eps_rec: Option<Rational>,
    /// Tolerance rate for the threshold table; defaults to 2·eps_ss.
    #[arg(long, value_parser = rational_arg)]
    pub xi: Option<Rational>,
    /// Print `quantity,value` CSV instead of aligned text.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKindArg {
    Lsh,
    Concentration,
    Correctness,
    #[value(name = "false_accept")]
    FalseAccept,
    Complexity,
    Budget,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKindArg,
    /// Secret length(s); complexity accepts a comma list.
    #[arg(long, value_delimiter = ',')]
    pub k_star: Vec<usize>,
    /// Distance(s) between secret and reading (lsh, concentration).
    #[arg(long, value_delimiter = ',')]
    pub distance: Vec<usize>,
    /// Resilient-vector length(s) (lsh, concentration, false_accept).
    #[arg(long, value_delimiter = ',')]
    pub rv_len: Vec<usize>,
    #[arg(long)]
    pub inner: Option<CodeSpec>,
    #[arg(long)]
    pub outer: Option<CodeSpec>,
    /// Error rate for sketching (correctness) or the tail width (concentration).
    #[arg(long, value_parser = rational_arg)]
    pub eps_ss: Option<Rational>,
    /// Recovery error rate(s) (complexity).
    #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
    pub eps_rec: Vec<Rational>,
    /// k - n* for the false_accept experiment.
    #[arg(long)]
    pub prefix_len: Option<usize>,
    /// Largest offset between w_e and the reading (correctness).
    #[arg(long)]
    pub max_offset: Option<usize>,
    /// Sweep cap (correctness); defaults to floor(k*/2).
    #[arg(long)]
    pub max_weight: Option<usize>,
    /// Candidates per code pair (false_accept).
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// What a successful command run amounted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
        }
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<Status> {
    match cli.command {
        Command::Sketch(a) => cmd_sketch(&a, out),
        Command::Recover(a) => cmd_recover(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out),
    }
}

fn read_bits(path: &Path) -> Result<BitString> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.trim().parse::<BitString>()?)
}

pub fn cmd_sketch(a: &SketchArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let w = read_bits(&a.input)?;
    if let Some(k_star) = a.k_star {
        if w.len() != k_star {
            return Err(Error::Dimension {
                what: "secret length",
                expected: k_star,
                got: w.len(),
            }
            .into());
        }
    }
    let master = SeededRng::new(a.seed);
    let inner = a.inner.build(&mut master.derive(streams::INNER_CODE))?;
    let outer = a.outer.build(&mut master.derive(streams::OUTER_CODE))?;
    if let Some(k_star) = a.k_star {
        if inner.k() != k_star {
            bail!(Error::Parameter(format!(
                "--k-star {k_star} differs from inner code dimension {}",
                inner.k()
            )));
        }
    }
    let sketcher = Sketcher::new(inner, outer, a.eps_ss)?;
    let p = *sketcher.params();
    let index = match &a.index {
        Some(path) => {
            let line =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            IndexVector::parse_line(&line, p.k_star)?
        }
        None => gen_index_vector(p.k_star, p.n, &mut master.derive(streams::INDEX_VECTOR))?,
    };
    let sketch = sketcher.sketch(&w, &index, &mut master.derive(streams::ERROR))?;
    let (inner, outer) = sketcher.into_codes();
    let bytes = SketchFile {
        sketch,
        inner,
        outer,
    }
    .to_bytes()?;
    fs::write(&a.out, bytes).with_context(|| format!("writing {}", a.out.display()))?;
    writeln!(out, "n = {}", p.n)?;
    writeln!(out, "k - n* = {}", p.prefix_len())?;
    writeln!(
        out,
        "eps_ss = {} (error weight {})",
        p.eps_ss,
        p.error_weight()
    )?;
    writeln!(out, "{}", validate_params(&p, None))?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(Status::Ok)
}

pub fn cmd_recover(a: &RecoverArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let bytes = fs::read(&a.sketch).with_context(|| format!("reading {}", a.sketch.display()))?;
    let file = SketchFile::from_bytes(&bytes)?;
    let w_prime = read_bits(&a.input)?;
    let sk = &file.sketch;
    let (report, wall_ms): (Result<RecoveryReport, Error>, u128) = timed(|| {
        if a.sweep {
            let max = a.max_weight.unwrap_or(sk.params.k_star / 2);
            recover_sweep(sk, &w_prime, &file.inner, &file.outer, max)
        } else {
            let eps = a.eps_rec.expect("clap requires --eps-rec without --sweep");
            if a.parallel {
                recover_fixed_parallel(sk, &w_prime, eps, &file.inner, &file.outer)
            } else {
                recover_fixed(sk, &w_prime, eps, &file.inner, &file.outer)
            }
        }
    });
    let report = report?;
    match report.outcome.recovered() {
        Some(w) => writeln!(out, "{w}")?,
        None => writeln!(out, "FAIL")?,
    }
    writeln!(out, "{report}")?;
    if let Some(path) = &a.out {
        let csv = format!(
            "{}\n{}\n",
            RecoveryReport::CSV_HEADER,
            report.csv_row(wall_ms)
        );
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.is_success() {
        Status::Ok
    } else {
        Status::Failed
    })
}

pub fn cmd_bounds(a: &BoundsArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let params = SketchParams {
        k_star: a.k_star,
        n_star: a.n_star,
        k: a.k,
        n: a.n,
        eps_ss: a.eps_ss,
    };
    let eps_rec = a.eps_rec.unwrap_or(a.eps_ss * 2);
    let report = validate_params(&params, Some(eps_rec));
    if !report.is_valid() {
        bail!(Error::Parameter(report.violations.join("; ")));
    }
    let xi = a.xi.unwrap_or(a.eps_ss * 2);
    let th = analysis::thresholds(a.k_star, a.n, xi, a.eps_ss)?;
    let support = analysis::support_size(a.k_star, eps_rec)?;
    let eff = analysis::efficiency_bound_check(a.k_star, eps_rec, a.k, a.n_star)?;
    let residual = analysis::residual_entropy_bound(a.n, a.eps_ss, a.k, a.n_star)?;
    let leak = a.k - a.n_star;
    let mut rows: Vec<(String, String)> = vec![
        ("k*".into(), a.k_star.to_string()),
        ("n*".into(), a.n_star.to_string()),
        ("k".into(), a.k.to_string()),
        ("n".into(), a.n.to_string()),
        ("k-n*".into(), leak.to_string()),
        ("eps_ss".into(), a.eps_ss.to_string()),
        ("eps_rec".into(), eps_rec.to_string()),
        (
            "h2(eps_rec)".into(),
            analysis::h2_rational(eps_rec)?.to_string(),
        ),
        (
            "hoeffding exp(-2n eps_ss^2)".into(),
            analysis::hoeffding_bound(a.n, a.eps_ss).to_string(),
        ),
        (
            "concentration holds".into(),
            report.concentration_ok.to_string(),
        ),
        (
            "min n for concentration".into(),
            analysis::min_n_for_concentration(leak, a.eps_ss)?.to_string(),
        ),
        (
            "support size C(k*, floor(k* eps_rec))".into(),
            support.exact.to_string(),
        ),
        (
            "support log2 bound k* h2(eps_rec)".into(),
            support.log2_bound.to_string(),
        ),
        ("efficiency lhs k* h2(eps_rec)".into(), eff.lhs.to_string()),
        ("efficiency holds".into(), eff.holds.to_string()),
        ("xi".into(), th.xi.to_string()),
        ("t_max".into(), th.t_max.to_string()),
        ("t_min".into(), th.t_min.to_string()),
        ("t_plus'".into(), th.t_plus_prime.to_string()),
        ("t_minus'".into(), th.t_minus_prime.to_string()),
        ("t_plus".into(), th.t_plus.to_string()),
        ("t_minus".into(), th.t_minus.to_string()),
        ("residual entropy floor".into(), residual.floor.to_string()),
        (
            "false accept rate".into(),
            analysis::false_accept_rate(a.k, a.n_star)?.to_string(),
        ),
    ];
    if leak <= a.k_star {
        let rb = analysis::rate_bounds(a.k_star, a.k, a.n_star, a.eps_ss, eps_rec)?;
        rows.push(("rate R".into(), rb.rate.to_string()));
        rows.push((
            "shannon upper 1-h2(eps_rec)".into(),
            rb.shannon_ub.to_string(),
        ));
        rows.push(("gv lower 1-h2(2 eps_ss)".into(), rb.gv_lb.to_string()));
        rows.push(("rate regime".into(), format!("{:?}", rb.regime)));
    }
    if a.csv {
        writeln!(out, "quantity,value")?;
        for (k, v) in &rows {
            writeln!(out, "{k},{v}")?;
        }
    } else {
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &rows {
            writeln!(out, "{k:<width$}  {v}")?;
        }
    }
    Ok(Status::Ok)
}

fn first_or<T: Copy>(xs: &[T], default: T) -> T {
    xs.first().copied().unwrap_or(default)
}

fn list_or<T: Clone>(xs: &[T], default: &[T]) -> Vec<T> {
    if xs.is_empty() {
        default.to_vec()
    } else {
        xs.to_vec()
    }
}

/// Builds and runs the experiment described by the flags.
pub fn run_experiment(a: &ExperimentArgs) -> Result<ExperimentOutput> {
    let r = Rational::new;
    let out = match a.kind {
        ExperimentKindArg::Lsh => experiment::lsh(&experiment::LshConfig {
            k_star: first_or(&a.k_star, 16),
            distance: first_or(&a.distance, 4),
            n: first_or(&a.rv_len, 512),
            trials: a.trials.unwrap_or(10_000),
            seed: a.seed,
        })?,
        ExperimentKindArg::Concentration => {
            experiment::concentration(&experiment::ConcentrationConfig {
                k_star: first_or(&a.k_star, 16),
                lengths: list_or(&a.rv_len, &[128, 512]),
                distances: list_or(&a.distance, &[2, 4, 6, 8]),
                eps: a.eps_ss.unwrap_or(r(1, 8)),
                trials: a.trials.unwrap_or(100_000),
                seed: a.seed,
            })?
        }
        ExperimentKindArg::Correctness => {
            experiment::correctness(&experiment::CorrectnessConfig {
                inner: a.inner.unwrap_or(CodeSpec::Bch { m: 4, t: 2 }),
                outer: a.outer.unwrap_or(CodeSpec::Bch { m: 5, t: 3 }),
                eps_ss: a.eps_ss.unwrap_or(r(1, 14)),
                max_offset: a.max_offset.unwrap_or(2),
                max_weight: a.max_weight,
                trials: a.trials.unwrap_or(1000),
                seed: a.seed,
            })?
        }
        ExperimentKindArg::FalseAccept => {
            experiment::false_accept(&experiment::FalseAcceptConfig {
                k_star: first_or(&a.k_star, 16),
                n: first_or(&a.rv_len, 64),
                prefix_len: a.prefix_len.unwrap_or(3),
                trials: a.trials.unwrap_or(100),
                iterations_per_trial: a.iterations.unwrap_or(100),
                seed: a.seed,
            })?
        }
        ExperimentKindArg::Complexity => experiment::complexity(&experiment::ComplexityConfig {
            k_stars: list_or(&a.k_star, &[8, 12, 16]),
            eps_recs: list_or(&a.eps_rec, &[r(1, 8), r(1, 4), r(1, 2)]),
            trials: a.trials.unwrap_or(4),
            seed: a.seed,
        })?,
        ExperimentKindArg::Budget => experiment::budget(&experiment::BudgetConfig {
            cases: experiment::default_budget_cases(),
            trials: a.trials.unwrap_or(200),
            seed: a.seed,
        })?,
    };
    Ok(out)
}

/// CSV text: a `#` header with schema and config, the column line, one row
/// per trial, a summary row, and a trailing `#` tolerance line.
pub fn experiment_csv(out: &ExperimentOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# fsketch-experiment schema={CSV_SCHEMA} {}", out.config);
    let _ = writeln!(s, "row,trial,trial_seed,value,aux,reference,verdict");
    for row in &out.rows {
        let verdict = match row.verdict {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "",
        };
        let _ = writeln!(
            s,
            "trial,{},{},{},{},{},{}",
            row.trial, row.trial_seed, row.value, row.aux, row.reference, verdict
        );
    }
    let sm = &out.summary;
    let _ = writeln!(
        s,
        "summary,,,{},,{},{}",
        sm.statistic,
        sm.reference,
        if sm.pass { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(s, "# tolerance: {}", sm.tolerance);
    s
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let result = run_experiment(a)?;
    let csv = experiment_csv(&result);
    match &a.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => out.write_all(csv.as_bytes())?,
    }
    let sm = &result.summary;
    writeln!(
        out,
        "{}: statistic {} reference {} [{}] {}",
        result.kind,
        sm.statistic,
        sm.reference,
        sm.tolerance,
        if sm.pass { "PASS" } else { "FAIL" }
    )?;
    Ok(if sm.pass { Status::Ok } else { Status::Failed })
}
