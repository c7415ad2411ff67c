//! Config-driven batch experiments with deterministic CSV and JSON output.
//!
//! Exact numbers go to CSV as a numerator column, a denominator column and an
//! approximate decimal column; `(num)/den` parses back to the same number.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::iet::{Iet, Metric, Permutation};
use crate::interval_set::{Interval, IntervalSet};
use crate::numerics::ExactNumber;
use crate::rauzy::{rauzy_class, rv_step, RvMatrix, RvStep};
use crate::rigidity::{block_bound, block_measure, rigid_sequence, verify_tower};
use crate::rotations::kurzweil_exponent;
use crate::sample::{rng, sample_with};
use crate::targets::{check_separated_bound, SeparationCheck, hitting_time_exponents, limsup_profile, separated_count, TargetSequence};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub d: usize,
    #[serde(alias = "Q")]
    pub q: u64,
    pub seed: u64,
    pub count: usize,
}

fn zero() -> ExactNumber {
    ExactNumber::zero()
}

fn default_grid() -> u64 {
    100
}

/// What to run; the `kind` tag selects the experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    TargetMeasure {
        target: TargetSequence,
        #[serde(default = "zero")]
        x: ExactNumber,
        /// `(N, M)` checkpoints.
        schedule: Vec<(u64, u64)>,
        #[serde(default = "default_grid")]
        grid: u64,
    },
    RvPath {
        n: usize,
    },
    RigiditySearch {
        j_max: u32,
        n_search: usize,
        #[serde(default = "zero")]
        x: ExactNumber,
    },
    SeparationStats {
        /// Orbit windows `T^n x, …, T^{2n} x`.
        ns: Vec<u64>,
        #[serde(default = "zero")]
        x: ExactNumber,
    },
    HittingTime {
        #[serde(default = "zero")]
        x: ExactNumber,
        y: ExactNumber,
        k_min: u32,
        k_max: u32,
        cap: u64,
    },
    RauzyClass {
        #[serde(default)]
        perm: Option<Permutation>,
    },
    Cf {
        alpha: ExactNumber,
        n: usize,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::TargetMeasure { .. } => "target-measure",
            Experiment::RvPath { .. } => "rv-path",
            Experiment::RigiditySearch { .. } => "rigidity-search",
            Experiment::SeparationStats { .. } => "separation-stats",
            Experiment::HittingTime { .. } => "hitting-time",
            Experiment::RauzyClass { .. } => "rauzy-class",
            Experiment::Cf { .. } => "cf",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iet: Option<Iet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iets: Vec<Iet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default)]
    pub metric: Metric,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses JSON, reporting the line and column of any error.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            input: "experiment config".into(),
            reason: format!("line {} column {}: {e}", e.line(), e.column()),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The trial IETs: explicit ones first, then sampled ones in draw order.
    pub fn trials(&self) -> Result<Vec<Iet>> {
        let mut out: Vec<Iet> = self.iet.iter().chain(&self.iets).cloned().collect();
        if let Some(s) = &self.sampler {
            let mut r = rng(s.seed);
            for _ in 0..s.count {
                out.push(sample_with(&mut r, s.d, s.q)?);
            }
        }
        Ok(out)
    }
}

/// A named invariant evaluated during a run; `theorem` marks checks whose
/// failure means a proved statement was contradicted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub theorem: bool,
    pub passed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub csv: String,
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl ExperimentOutput {
    pub fn theorem_failed(&self) -> bool {
        self.checks.iter().any(|c| c.theorem && c.failed > 0)
    }

    /// Writes `<kind>.csv` and `<kind>.json` into `dir`.
    pub fn write(&self, dir: &Path, kind: &str) -> Result<(PathBuf, PathBuf)> {
        let io = |e: std::io::Error| Error::InvalidParams(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let csv = dir.join(format!("{kind}.csv"));
        let json = dir.join(format!("{kind}.json"));
        std::fs::write(&csv, &self.csv).map_err(io)?;
        let text = serde_json::to_string_pretty(&self.summary).expect("json value");
        std::fs::write(&json, text + "\n").map_err(io)?;
        Ok((csv, json))
    }
}

/// Numerator text, denominator text and an approximate decimal.
pub fn exact_columns(x: &ExactNumber) -> [String; 3] {
    let approx = format!("{:.12e}", x.to_f64());
    match x {
        ExactNumber::Rational(r) => [r.numer().to_string(), r.denom().to_string(), approx],
        ExactNumber::Quadratic(q) => {
            let sign = if q.b() < &BigInt::from(0) { '-' } else { '+' };
            let b = if sign == '-' { -q.b() } else { q.b().clone() };
            [format!("{}{}{}*sqrt({})", q.a(), sign, b, q.radicand()), q.c().to_string(), approx]
        }
    }
}

/// Inverse of [`exact_columns`].
pub fn parse_columns(num: &str, den: &str) -> Result<ExactNumber> {
    if num.contains("sqrt") {
        format!("({num})/{den}").parse()
    } else {
        format!("{num}/{den}").parse()
    }
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    fn row(&mut self, fields: Vec<String>) {
        self.writer.write_record(&fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.writer.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn ex(x: &ExactNumber) -> Vec<String> {
    exact_columns(x).to_vec()
}

fn check(name: &str, theorem: bool, results: impl IntoIterator<Item = bool>) -> Check {
    let (mut passed, mut failed) = (0, 0);
    for r in results {
        if r {
            passed += 1
        } else {
            failed += 1
        }
    }
    Check {
        name: name.into(),
        theorem,
        passed,
        failed,
    }
}

/// Runs an experiment. Trials are evaluated in parallel and written in trial order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let trials = config.trials()?;
    let metric = config.metric;
    let (csv, checks, details) = match &config.experiment {
        Experiment::TargetMeasure { target, x, schedule, grid } => {
            target_measure(&trials, target, x, schedule, *grid, metric)?
        }
        Experiment::RvPath { n } => rv_path_rows(&trials, *n),
        Experiment::RigiditySearch { j_max, n_search, x } => rigidity_rows(&trials, *j_max, *n_search, x, metric)?,
        Experiment::SeparationStats { ns, x } => separation_rows(&trials, ns, x)?,
        Experiment::HittingTime { x, y, k_min, k_max, cap } => {
            hitting_rows(&trials, x, y, *k_min..=*k_max, *cap, metric)?
        }
        Experiment::RauzyClass { perm } => class_rows(&trials, perm.as_ref())?,
        Experiment::Cf { alpha, n } => cf_rows(alpha, *n)?,
    };
    let summary = json!({
        "kind": config.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "trials": trials.len(),
        "checks": checks,
        "details": details,
    });
    Ok(ExperimentOutput { csv, summary, checks })
}

type Rows = (String, Vec<Check>, Value);

fn target_measure(
    trials: &[Iet],
    target: &TargetSequence,
    x: &ExactNumber,
    schedule: &[(u64, u64)],
    grid: u64,
    metric: Metric,
) -> Result<Rows> {
    let mut table = Table::new(&[
        "trial",
        "checkpoint_N",
        "checkpoint_M",
        "measure_num",
        "measure_den",
        "measure_approx",
        "measure_upper",
        "hit_fraction",
    ]);
    let reports = trials
        .par_iter()
        .map(|t| limsup_profile(t, x, target, schedule, metric, grid))
        .collect::<Result<Vec<_>>>()?;
    for (i, r) in reports.iter().enumerate() {
        for c in &r.checkpoints {
            let mut row = vec![i.to_string(), c.n.to_string(), c.m.to_string()];
            row.extend(ex(&c.measure));
            row.push(c.measure_upper.as_ref().map(ToString::to_string).unwrap_or_default());
            row.push(c.hit_fraction.to_string());
            table.row(row);
        }
    }
    let checks = vec![
        check("measure non-decreasing in M", false, reports.iter().map(|r| r.monotone)),
        check(
            "measure at most total length",
            false,
            reports
                .iter()
                .zip(trials)
                .map(|(r, t)| r.checkpoints.iter().all(|c| &c.measure <= t.total())),
        ),
    ];
    Ok((table.finish(), checks, Value::Null))
}

/// Direct first-return time of `[0, λ)` starting at `p`, capped.
fn first_return(t: &Iet, p: &ExactNumber, lambda: &ExactNumber, cap: u64) -> Option<u64> {
    let mut y = p.clone();
    for n in 1..=cap {
        y = t.apply(&y).ok()?;
        if &y < lambda {
            return Some(n);
        }
    }
    None
}

fn rv_path_rows(trials: &[Iet], n: usize) -> Rows {
    let mut table = Table::new(&["trial", "perm", "lengths", "depth", "steps", "column_sums", "return_times", "identity", "error"]);
    let rows: Vec<_> = trials
        .par_iter()
        .map(|t| {
            let mut cur = t.clone();
            let mut matrix = RvMatrix::identity(t.d());
            let mut steps: Vec<RvStep> = Vec::new();
            let mut error = String::new();
            for depth in 0..n {
                match rv_step(&cur) {
                    Ok((s, next, m)) => match matrix.checked_mul(&m) {
                        Ok(prod) => {
                            matrix = prod;
                            steps.push(s);
                            cur = next;
                        }
                        Err(e) => {
                            error = e.to_string();
                            break;
                        }
                    },
                    Err(Error::NotInGeneralPosition { .. }) => {
                        error = Error::NotInGeneralPosition { depth }.to_string();
                        break;
                    }
                    Err(e) => {
                        error = e.to_string();
                        break;
                    }
                }
            }
            let sums = matrix.column_sums();
            let lambda = cur.total().clone();
            let returns: Vec<Option<u64>> = (0..t.d())
                .map(|j| first_return(t, &cur.interval(j).lo, &lambda, sums[j].saturating_mul(2).max(1)))
                .collect();
            let identity = sums.iter().zip(&returns).all(|(s, r)| Some(*s) == *r);
            (t, steps, sums, returns, identity, error)
        })
        .collect();
    for (i, (t, steps, sums, returns, identity, error)) in rows.iter().enumerate() {
        let join = |v: Vec<String>| v.join(" ");
        table.row(vec![
            i.to_string(),
            t.perm().to_string(),
            join(t.lengths().iter().map(ToString::to_string).collect()),
            steps.len().to_string(),
            RvStep::word(steps),
            join(sums.iter().map(ToString::to_string).collect()),
            join(returns.iter().map(|r| r.map_or("-".into(), |v| v.to_string())).collect()),
            identity.to_string(),
            error.clone(),
        ]);
    }
    let checks = vec![check("column sum equals return time", true, rows.iter().map(|r| r.4))];
    (table.finish(), checks, Value::Null)
}

fn rigidity_rows(trials: &[Iet], j_max: u32, n_search: usize, x: &ExactNumber, metric: Metric) -> Result<Rows> {
    let mut table = Table::new(&[
        "trial",
        "j",
        "N_j",
        "block_measure_num",
        "block_measure_den",
        "block_measure_approx",
        "bound_num",
        "bound_den",
        "bound_approx",
        "below",
    ]);
    let mut towers = Vec::new();
    let mut verified = Vec::new();
    let mut below = Vec::new();
    for (i, t) in trials.iter().enumerate() {
        let rs = match rigid_sequence(t, j_max, n_search) {
            Ok(rs) => rs,
            Err(e) => {
                towers.push(json!({ "trial": i, "error": e.to_string() }));
                continue;
            }
        };
        let heights = rs.heights();
        for st in &rs.stages {
            let tw = &st.tower;
            let v = verify_tower(t, &tw.base, tw.height, &tw.epsilon)?;
            verified.push(v.holds);
            towers.push(json!({
                "trial": i,
                "j": st.j,
                "J": [tw.base.lo.to_string(), tw.base.hi.to_string()],
                "N": tw.height,
                "cover": tw.cover.to_string(),
                "overlap": tw.overlap.to_string(),
                "verified": v.holds,
            }));
        }
        let measures = (1..=j_max)
            .into_par_iter()
            .map(|j| block_measure(t, x, &heights, j, metric))
            .collect::<Result<Vec<_>>>()?;
        for (j, m) in (1..=j_max).zip(measures) {
            let bound = block_bound(j);
            let ok = m < bound;
            below.push(ok);
            let mut row = vec![i.to_string(), j.to_string(), heights[j as usize - 1].to_string()];
            row.extend(ex(&m));
            row.extend(ex(&bound));
            row.push(ok.to_string());
            table.row(row);
        }
    }
    let checks = vec![
        check("tower conditions re-verified", false, verified),
        check("block measure below bound", false, below),
    ];
    Ok((table.finish(), checks, json!({ "towers": towers })))
}

fn separation_rows(trials: &[Iet], ns: &[u64], x: &ExactNumber) -> Result<Rows> {
    let mut table = Table::new(&[
        "trial",
        "n",
        "e_T_num",
        "e_T_den",
        "e_T_approx",
        "points",
        "separated",
        "window",
        "lemma_lhs",
        "lemma_rhs",
        "lemma_holds",
    ]);
    let rows = trials
        .par_iter()
        .map(|t| ns.iter().map(|&n| separation_row(t, n, x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut windows = Vec::new();
    let mut lemma = Vec::new();
    for (i, trial) in rows.iter().enumerate() {
        for r in trial {
            let mut row = vec![i.to_string(), r.n.to_string()];
            row.extend(ex(&r.gap));
            row.push(r.points.to_string());
            row.push(r.separated.to_string());
            row.push(r.window.map_or("skipped".into(), |w| w.to_string()));
            match &r.lemma {
                Some(c) => row.extend([c.lhs.to_string(), c.rhs.to_string(), c.holds.to_string()]),
                None => row.extend(["".into(), "".into(), "skipped".into()]),
            }
            table.row(row);
            windows.extend(r.window);
            lemma.extend(r.lemma.as_ref().map(|c| c.holds));
        }
    }
    let checks = vec![
        check("continuity window exists", true, windows),
        check("separation lemma", true, lemma),
    ];
    Ok((table.finish(), checks, Value::Null))
}

struct SeparationRow {
    n: u64,
    gap: ExactNumber,
    points: usize,
    separated: usize,
    window: Option<bool>,
    /// `None` when `e_T(n) = 0` (a rational IET with colliding discontinuity orbits).
    lemma: Option<SeparationCheck>,
}

/// Separation statistics for the window `T^n x, …, T^{2n} x`, with the two
/// theorem checks instantiated on it.
fn separation_row(t: &Iet, n: u64, x: &ExactNumber) -> Result<SeparationRow> {
    if n == 0 {
        return Err(Error::InvalidParams("window length must be positive".into()));
    }
    let gap = t.min_gap(n as usize);
    let start = t.orbit_point(x, n)?;
    let points: Vec<ExactNumber> = t.orbit_iter(&start)?.take(n as usize + 1).collect();
    let separated = separated_count(&points, &gap);
    // an interval shorter than e_T(n) has a continuity window of length n
    if !gap.is_positive() {
        return Ok(SeparationRow {
            n,
            gap,
            points: points.len(),
            separated,
            window: None,
            lemma: None,
        });
    }
    let window = t.discontinuity_orbits_distinct(2 * n as usize).then(|| {
        let half = &gap / &ExactNumber::from(2u64);
        let lo = if &(x + &half) <= t.total() { x.clone() } else { t.total() - &half };
        t.continuity_window(&Interval::new(lo.clone(), &lo + &half), n as usize).is_some()
    });
    // separated subset, S = earlier orbit balls
    let mut sorted = points.clone();
    sorted.sort();
    sorted.dedup();
    let mut chosen: Vec<ExactNumber> = Vec::new();
    for p in sorted {
        if chosen.last().map_or(true, |l| &(&p - l) >= &gap) {
            chosen.push(p);
        }
    }
    let m = ExactNumber::from(chosen.len() as u64);
    let e = &gap * &m;
    let delta = &gap / &ExactNumber::from(4u64);
    let r = &gap / &ExactNumber::from(8u64);
    let s: IntervalSet = t
        .orbit_iter(x)?
        .skip(1)
        .take((n - 1) as usize)
        .flat_map(|z| Metric::Interval.ball(&z, &r, t.total()).iter().cloned().collect::<Vec<_>>())
        .collect();
    let lemma = Some(check_separated_bound(&chosen, &s, &e, &delta)?);
    Ok(SeparationRow {
        n,
        gap,
        points: points.len(),
        separated,
        window,
        lemma,
    })
}

fn hitting_rows(
    trials: &[Iet],
    x: &ExactNumber,
    y: &ExactNumber,
    ks: std::ops::RangeInclusive<u32>,
    cap: u64,
    metric: Metric,
) -> Result<Rows> {
    let mut table = Table::new(&["trial", "k", "tau", "exponent_lo", "exponent_hi", "exponent_approx"]);
    let rows = trials
        .par_iter()
        .map(|t| hitting_time_exponents(t, x, y, ks.clone(), cap, metric, 64))
        .collect::<Result<Vec<_>>>()?;
    for (i, est) in rows.iter().enumerate() {
        for e in est {
            let text = |v: &Option<num_rational::BigRational>| {
                v.clone().map(|r| ExactNumber::from(r).to_string()).unwrap_or_default()
            };
            table.row(vec![
                i.to_string(),
                e.k.to_string(),
                e.tau.map(|t| t.to_string()).unwrap_or_default(),
                text(&e.lo),
                text(&e.hi),
                e.midpoint().map(|m| format!("{m:.6}")).unwrap_or_default(),
            ]);
        }
    }
    Ok((table.finish(), Vec::new(), Value::Null))
}

fn class_rows(trials: &[Iet], perm: Option<&Permutation>) -> Result<Rows> {
    let mut table = Table::new(&["source", "index", "permutation"]);
    let mut perms: Vec<Permutation> = perm.into_iter().cloned().collect();
    perms.extend(trials.iter().map(|t| t.perm().clone()));
    let mut sizes = Vec::new();
    for p in &perms {
        let class = rauzy_class(p)?;
        sizes.push(json!({ "permutation": p.to_string(), "size": class.len() }));
        for (k, q) in class.iter().enumerate() {
            table.row(vec![p.to_string(), k.to_string(), q.to_string()]);
        }
    }
    Ok((table.finish(), Vec::new(), json!({ "classes": sizes })))
}

fn cf_rows(alpha: &ExactNumber, n: usize) -> Result<Rows> {
    let cf = crate::rotations::cf_expand(alpha, n)?;
    let report = kurzweil_exponent(alpha, n.max(1))?;
    let mut table = Table::new(&["k", "a_k", "p_k", "q_k", "exponent_lo", "exponent_hi"]);
    for (k, (a, (p, q))) in cf.quotients.iter().zip(&cf.convergents).enumerate() {
        let (lo, hi) = match k.checked_sub(1).and_then(|i| report.per_index.get(i)) {
            Some(e) => (ExactNumber::from(e.lo.clone()).to_string(), ExactNumber::from(e.hi.clone()).to_string()),
            None => (String::new(), String::new()),
        };
        table.row(vec![k.to_string(), a.to_string(), p.to_string(), q.to_string(), lo, hi]);
    }
    let details = json!({
        "terminated": cf.terminated,
        "period": cf.period,
        "max_quotient": report.max_quotient.to_string(),
        "exponent": [ExactNumber::from(report.exponent.lo.clone()).to_string(), ExactNumber::from(report.exponent.hi.clone()).to_string()],
    });
    Ok((table.finish(), Vec::new(), details))
}
