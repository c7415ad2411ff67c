//! `ietshrink`: config-driven experiments and small exact computations on IETs.
//!
//! Exit codes: 0 success, 1 usage, 2 a theorem check failed, 3 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ietshrink::experiment::{exact_columns, run_experiment, Experiment, ExperimentConfig, SamplerSpec};
use ietshrink::rauzy::{characteristic_polynomial, perron_iet, rv_path, RvStep};
use ietshrink::rotations::{rotation_iet, three_gaps};
use ietshrink::sample::{rng, sample_with};
use ietshrink::targets::TargetSequence;
use ietshrink::{ExactNumber, Iet, Metric, Permutation};

#[derive(Parser, Debug)]
#[command(name = "ietshrink", version, about = "Exact interval exchange experiments")]
struct Cli {
    /// JSON experiment config; its `kind` must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON output (default: CSV to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampled IETs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    metric: Option<MetricArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Interval,
    Circle,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Interval => Metric::Interval,
            MetricArg::Circle => Metric::Circle,
        }
    }
}

fn exact(s: &str) -> Result<ExactNumber, String> {
    s.parse().map_err(|e: ietshrink::Error| e.to_string())
}

fn perm(s: &str) -> Result<Permutation, String> {
    s.parse().map_err(|e: ietshrink::Error| e.to_string())
}

/// `N:M` checkpoint.
fn checkpoint(s: &str) -> Result<(u64, u64), String> {
    let (n, m) = s.split_once(':').ok_or("expected N:M")?;
    Ok((n.parse().map_err(|_| "bad N")?, m.parse().map_err(|_| "bad M")?))
}

/// JSON, or `family:c` / `power:c:s`.
fn target(s: &str) -> Result<TargetSequence, String> {
    if s.trim_start().starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let parts: Vec<&str> = s.split(':').collect();
    let c = || parts.get(1).ok_or("missing constant").and_then(|c| exact(c).map_err(|_| "bad constant"));
    Ok(match parts[0] {
        "harmonic" => TargetSequence::Harmonic { c: c()? },
        "log-harmonic" | "log_harmonic" => TargetSequence::LogHarmonic { c: c()? },
        "power" => TargetSequence::Power {
            c: c()?,
            s: parts.get(2).and_then(|s| s.parse().ok()).ok_or("power needs c:s")?,
        },
        other => return Err(format!("unknown target family `{other}`")),
    })
}

/// Where the trial IETs come from.
#[derive(Args, Debug, Default)]
struct Trials {
    /// Interval lengths, e.g. `5/8,3/8` or `(3-1*sqrt(5))/2,(-1+1*sqrt(5))/2`.
    #[arg(long, value_delimiter = ',', value_parser = exact)]
    lengths: Vec<ExactNumber>,
    /// Permutation in one-based image form, e.g. `2,1`.
    #[arg(long, value_parser = perm)]
    perm: Option<Permutation>,
    /// Rotation by this angle in (0, 1).
    #[arg(long, value_parser = exact)]
    rotation: Option<ExactNumber>,
    /// Sample `count` random IETs with this many intervals.
    #[arg(long)]
    sample_d: Option<usize>,
    /// Common denominator of sampled lengths.
    #[arg(long, default_value_t = 1_000_000)]
    sample_q: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rauzy–Veech path: steps, column sums and the return-time identity.
    RvPath {
        #[command(flatten)]
        trials: Trials,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Rauzy class of a permutation.
    RauzyClass {
        #[command(flatten)]
        trials: Trials,
    },
    /// The self-similar IET of an induction loop.
    Perron {
        #[arg(long, value_parser = perm)]
        perm: Permutation,
        /// Step word such as `abba`.
        #[arg(long)]
        word: String,
    },
    /// First-return map to `[u, v)`.
    Induce {
        #[command(flatten)]
        trials: Trials,
        #[arg(long, value_parser = exact)]
        u: ExactNumber,
        #[arg(long, value_parser = exact)]
        v: ExactNumber,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Exact hit-union measures over `N:M` checkpoints.
    TargetMeasure {
        #[command(flatten)]
        trials: Trials,
        /// `harmonic:1/10`, `power:1/2:2`, `log-harmonic:1/5` or JSON.
        #[arg(long, value_parser = target)]
        target: Option<TargetSequence>,
        #[arg(long, value_parser = exact)]
        x: Option<ExactNumber>,
        #[arg(long = "checkpoint", value_parser = checkpoint)]
        checkpoints: Vec<(u64, u64)>,
        #[arg(long, default_value_t = 100)]
        grid: u64,
    },
    /// Hitting times of `B(y, 2^-k)` and their exponents.
    HittingTime {
        #[command(flatten)]
        trials: Trials,
        #[arg(long, value_parser = exact)]
        x: Option<ExactNumber>,
        #[arg(long, value_parser = exact)]
        y: Option<ExactNumber>,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
        #[arg(long, default_value_t = 12)]
        k_max: u32,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
    },
    /// Separation statistics of orbit windows, with the separation checks.
    SeparationStats {
        #[command(flatten)]
        trials: Trials,
        #[arg(long, value_delimiter = ',')]
        ns: Vec<u64>,
        #[arg(long, value_parser = exact)]
        x: Option<ExactNumber>,
    },
    /// Rigidity towers and the rigid target sequence's block measures.
    RigiditySearch {
        #[command(flatten)]
        trials: Trials,
        #[arg(long, default_value_t = 3)]
        j_max: u32,
        #[arg(long, default_value_t = 2_000)]
        n_search: usize,
        #[arg(long, value_parser = exact)]
        x: Option<ExactNumber>,
    },
    /// Continued fraction, convergents and growth exponents.
    Cf {
        #[arg(long, value_parser = exact)]
        alpha: Option<ExactNumber>,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Gaps cut on the circle by `0, α, …, nα`.
    ThreeGap {
        #[arg(long, value_parser = exact)]
        alpha: ExactNumber,
        #[arg(long)]
        n: u64,
    },
    /// Random IETs as JSON lines.
    Sample {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<ietshrink::Error> for Failure {
    fn from(e: ietshrink::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl Trials {
    fn iets(&self) -> Result<Vec<Iet>, Failure> {
        match (&self.perm, self.lengths.is_empty()) {
            (Some(p), false) => Ok(vec![Iet::new(self.lengths.clone(), p.clone())?]),
            (None, false) => Err(usage("--lengths needs --perm")),
            _ => Ok(match &self.rotation {
                Some(a) => vec![rotation_iet(a)?],
                None => Vec::new(),
            }),
        }
    }

    fn sampler(&self, seed: Option<u64>) -> Option<SamplerSpec> {
        self.sample_d.map(|d| SamplerSpec {
            d,
            q: self.sample_q,
            seed: seed.unwrap_or(0),
            count: self.count,
        })
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing {flag} (or pass --config)")))
}

/// The experiment a subcommand describes from its inline flags, or `None`
/// for the direct subcommands.
fn inline_experiment(cmd: &Command) -> Result<Option<(Experiment, Option<&Trials>)>, Failure> {
    let zero = ExactNumber::zero;
    Ok(Some(match cmd {
        Command::RvPath { trials, n } => (Experiment::RvPath { n: required(*n, "--n")? }, Some(trials)),
        Command::RauzyClass { trials } => {
            // a bare --perm names the class; with --lengths it is a trial IET
            let perm = trials.lengths.is_empty().then(|| trials.perm.clone()).flatten();
            let trials = (!trials.lengths.is_empty() || trials.sample_d.is_some()).then_some(trials);
            (Experiment::RauzyClass { perm }, trials)
        }
        Command::TargetMeasure {
            trials,
            target,
            x,
            checkpoints,
            grid,
        } => {
            if checkpoints.is_empty() {
                return Err(usage("missing --checkpoint N:M (or pass --config)"));
            }
            let exp = Experiment::TargetMeasure {
                target: required(target.clone(), "--target")?,
                x: x.clone().unwrap_or_else(zero),
                schedule: checkpoints.clone(),
                grid: *grid,
            };
            (exp, Some(trials))
        }
        Command::HittingTime {
            trials,
            x,
            y,
            k_min,
            k_max,
            cap,
        } => {
            let exp = Experiment::HittingTime {
                x: x.clone().unwrap_or_else(zero),
                y: required(y.clone(), "--y")?,
                k_min: *k_min,
                k_max: *k_max,
                cap: *cap,
            };
            (exp, Some(trials))
        }
        Command::SeparationStats { trials, ns, x } => {
            if ns.is_empty() {
                return Err(usage("missing --ns (or pass --config)"));
            }
            let exp = Experiment::SeparationStats {
                ns: ns.clone(),
                x: x.clone().unwrap_or_else(zero),
            };
            (exp, Some(trials))
        }
        Command::RigiditySearch {
            trials,
            j_max,
            n_search,
            x,
        } => {
            let exp = Experiment::RigiditySearch {
                j_max: *j_max,
                n_search: *n_search,
                x: x.clone().unwrap_or_else(zero),
            };
            (exp, Some(trials))
        }
        Command::Cf { alpha, n } => (
            Experiment::Cf {
                alpha: required(alpha.clone(), "--alpha")?,
                n: *n,
            },
            None,
        ),
        _ => return Ok(None),
    }))
}

fn kind_of(cmd: &Command) -> &'static str {
    match cmd {
        Command::RvPath { .. } => "rv-path",
        Command::RauzyClass { .. } => "rauzy-class",
        Command::Perron { .. } => "perron",
        Command::Induce { .. } => "induce",
        Command::TargetMeasure { .. } => "target-measure",
        Command::HittingTime { .. } => "hitting-time",
        Command::SeparationStats { .. } => "separation-stats",
        Command::RigiditySearch { .. } => "rigidity-search",
        Command::Cf { .. } => "cf",
        Command::ThreeGap { .. } => "three-gap",
        Command::Sample { .. } => "sample",
    }
}

fn experiment_config(cli: &Cli) -> Result<Option<ExperimentConfig>, Failure> {
    let kind = kind_of(&cli.command);
    let mut config = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path).map_err(|e| usage(e.to_string()))?;
            if cfg.experiment.name() != kind {
                return Err(usage(format!("config is a `{}` experiment, not `{kind}`", cfg.experiment.name())));
            }
            cfg
        }
        None => {
            let Some((experiment, trials)) = inline_experiment(&cli.command)? else {
                return Ok(None);
            };
            let (iets, sampler) = match trials {
                Some(t) => (t.iets()?, t.sampler(cli.seed)),
                None => (Vec::new(), None),
            };
            ExperimentConfig {
                experiment,
                iet: None,
                iets,
                sampler,
                metric: Metric::default(),
                out: None,
            }
        }
    };
    if let (Some(seed), Some(s)) = (cli.seed, config.sampler.as_mut()) {
        s.seed = seed;
    }
    if let Some(m) = cli.metric {
        config.metric = m.into();
    }
    if cli.out.is_some() {
        config.out = cli.out.clone();
    }
    Ok(Some(config))
}

fn emit(out: Option<&Path>, name: &str, ext: &str, text: &str) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            let io = |e: std::io::Error| Failure::Runtime(format!("cannot write to {}: {e}", dir.display()));
            std::fs::create_dir_all(dir).map_err(io)?;
            let path = dir.join(format!("{name}.{ext}"));
            std::fs::write(&path, text).map_err(io)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

fn direct(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Perron { perm, word } => {
            let steps = RvStep::parse_word(word).map_err(|e| usage(e.to_string()))?;
            let t = perron_iet(perm, &steps)?;
            let rec = rv_path(&t, steps.len())?;
            let poly: Vec<String> = characteristic_polynomial(&rec.matrix).iter().map(ToString::to_string).collect();
            let v = json!({
                "iet": t,
                "characteristic_polynomial": poly,
                "rescaling": rec.induced.is_rescaling_of(&t),
            });
            emit(out, "perron", "json", &pretty(&v))
        }
        Command::Induce { trials, u, v, cap } => {
            let t = trials.iets()?.into_iter().next().ok_or_else(|| usage("induce needs --lengths/--perm or --rotation"))?;
            let ind = t.induce(u, v, *cap)?;
            let v = json!({
                "iet": ind.iet,
                "return_times": ind.return_times,
                "offset": ind.offset,
            });
            emit(out, "induce", "json", &pretty(&v))
        }
        Command::ThreeGap { alpha, n } => {
            if *n == 0 {
                return Err(usage("--n must be positive"));
            }
            let mut w = String::from("gap_num,gap_den,gap_approx,multiplicity\n");
            for (g, m) in three_gaps(alpha, *n) {
                let [a, b, c] = exact_columns(&g);
                w.push_str(&format!("{a},{b},{c},{m}\n"));
            }
            emit(out, "three-gap", "csv", &w)
        }
        Command::Sample { d, q, count } => {
            let mut r = rng(cli.seed.unwrap_or(0));
            let mut lines = String::new();
            for _ in 0..*count {
                let t = sample_with(&mut r, *d, *q).map_err(|e| usage(e.to_string()))?;
                lines.push_str(&serde_json::to_string(&t).expect("serializable"));
                lines.push('\n');
            }
            emit(out, "sample", "jsonl", &lines)
        }
        _ => unreachable!("experiment subcommands are handled by the runner"),
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let Some(config) = experiment_config(cli)? else {
        direct(cli)?;
        return Ok(true);
    };
    let output = run_experiment(&config)?;
    let kind = config.experiment.name();
    match &config.out {
        Some(dir) => {
            let (csv, json) = output.write(dir, kind)?;
            eprintln!("wrote {} and {}", csv.display(), json.display());
        }
        None => print!("{}", output.csv),
    }
    for c in &output.checks {
        if c.failed > 0 {
            eprintln!("check `{}`: {} passed, {} failed", c.name, c.passed, c.failed);
        }
    }
    Ok(!output.theorem_failed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("a theorem check failed");
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
