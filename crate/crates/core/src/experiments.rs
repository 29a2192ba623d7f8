//! Seeded Monte Carlo experiments: SNR sweeps, mirror-size sweeps, MM
//! convergence traces and single-scenario runs.
//!
//! A run produces one [`ResultRow`] per (scenario, method, realization).
//! Failures (infeasible floors, rank-deficient channels) are rows with a
//! status, never omissions. Realizations run on the rayon pool; rows are
//! sorted afterwards so the output does not depend on scheduling.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternating::{solve, PhaseWeighting, SolveOptions, Status, WaterfillMethod};
use crate::baselines::{global_search, grid_oracle, random_phase_baseline, BaselineResult, GlobalSearchOptions, GRID_MAX_STEPS, GRID_MAX_UNITS};
use crate::error::{Error, Result};
use crate::linalg::pinv;
use crate::phase_mm::{build_reduced_map, mm_loop, MmMode, Weighting};
use crate::scenario::{snr_config, ChannelSet, Dims, IterationCaps, RateFloorMode, RngSeed, ScenarioConfig, Stream, Tolerances};
use crate::zf::{cascade, zf_precoder, PhaseVector};

/// Redraws allowed for a rank-deficient channel before the row is marked as such.
pub const MAX_RESAMPLES: u32 = 8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SweepSnr,
    SweepN,
    Convergence,
    #[default]
    Single,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::SweepSnr => "sweep_snr",
            ExperimentKind::SweepN => "sweep_n",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Single => "single",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Algorithm1,
    RandomPhase,
    GlobalSearch,
    Grid,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Algorithm1 => "algorithm1",
            Method::RandomPhase => "random_phase",
            Method::GlobalSearch => "global_search",
            Method::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioPoint {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub snr_db: f64,
}

impl ScenarioPoint {
    pub fn dims(&self) -> Dims {
        Dims::new(self.k, self.m, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub surrogate: MmMode,
    pub weighting: PhaseWeighting,
    pub waterfill: WaterfillMethod,
    pub tolerances: Tolerances,
    pub caps: IterationCaps,
    pub global_search: GlobalSearchOptions,
    /// Grid points per phase for the `grid` method.
    pub grid_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let opts = SolveOptions::default();
        Self {
            surrogate: opts.surrogate,
            weighting: opts.weighting,
            waterfill: opts.waterfill,
            tolerances: Tolerances::default(),
            caps: IterationCaps::default(),
            global_search: GlobalSearchOptions::default(),
            grid_steps: 720,
        }
    }
}

impl SolverSettings {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            surrogate: self.surrogate,
            weighting: self.weighting,
            waterfill: self.waterfill,
        }
    }
}

fn default_rate_floor() -> RateFloorMode {
    RateFloorMode::SnrScaled
}

fn default_realizations() -> usize {
    100
}

/// A full experiment description, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub scenarios: Vec<ScenarioPoint>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_rate_floor")]
    pub rate_floor: RateFloorMode,
    #[serde(default)]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.scenarios.is_empty() {
            return bad("at least one scenario is required".into());
        }
        if let RateFloorMode::Fixed { value } = self.rate_floor {
            if !(value >= 0.0 && value.is_finite()) {
                return bad(format!("fixed rate floor must be nonnegative, got {value}"));
            }
        }
        let s = &self.solver;
        if s.grid_steps == 0 || s.grid_steps > GRID_MAX_STEPS {
            return bad(format!("grid_steps must be in 1..={GRID_MAX_STEPS}"));
        }
        if s.global_search.restarts == 0 {
            return bad("global_search.restarts must be at least 1".into());
        }
        for p in &self.scenarios {
            if self.experiment == ExperimentKind::Convergence {
                p.dims().validate_positive()?;
                continue;
            }
            // Builds and validates the scenario config.
            self.scenario_config(p)?;
            if self.methods.contains(&Method::Grid) && p.n > GRID_MAX_UNITS {
                return Err(Error::DimensionTooLarge(p.n));
            }
        }
        if self.experiment != ExperimentKind::Convergence && self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        Ok(())
    }

    pub fn scenario_config(&self, p: &ScenarioPoint) -> Result<ScenarioConfig> {
        snr_config(p.dims(), p.snr_db, self.rate_floor)?
            .with_tolerances(self.solver.tolerances)?
            .with_caps(self.solver.caps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Converged,
    MaxIterations,
    /// Feasible baseline result.
    Ok,
    Infeasible,
    RankDeficient,
    BudgetExceeded,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Converged => "converged",
            RowStatus::MaxIterations => "max_iterations",
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::RankDeficient => "rank_deficient",
            RowStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

impl From<Status> for RowStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => RowStatus::Converged,
            Status::MaxIterations => RowStatus::MaxIterations,
            Status::Infeasible => RowStatus::Infeasible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub snr_db: f64,
    pub r_min_mode: String,
    pub method: Method,
    pub realization: u64,
    pub status: RowStatus,
    /// Zero for infeasible and rank-deficient rows.
    pub sum_rate: f64,
    pub power_cost: f64,
    pub mm_iterations: usize,
    pub outer_iterations: usize,
    pub wall_time_ms: f64,
    /// Channel redraws needed before a full-rank realization was found.
    pub resamples: u32,
    /// Sum rate after each outer iteration (`algorithm1` rows only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outer_trace: Vec<f64>,
}

/// Draw the realization's channel, redrawing while it is rank deficient.
fn draw_channel(dims: Dims, seed: RngSeed, zf_tol: f64, need_zf: bool) -> (ChannelSet, u32, bool) {
    let mut ch = ChannelSet::generate(dims, seed);
    for attempt in 0..=MAX_RESAMPLES {
        if attempt > 0 {
            ch = ChannelSet::generate_attempt(dims, seed, attempt);
        }
        let h1_ok = pinv(&ch.h1, zf_tol).rank == dims.pim_units.min(dims.bs_antennas);
        let h2_ok = pinv(&ch.h2, zf_tol).rank == dims.users.min(dims.pim_units);
        let w_ok = !need_zf
            || zf_precoder(&cascade(&ch, &PhaseVector::zeros(dims.pim_units)), zf_tol).is_full_rank();
        if h1_ok && h2_ok && w_ok {
            return (ch, attempt, true);
        }
    }
    (ch, MAX_RESAMPLES, false)
}

struct Outcome {
    status: RowStatus,
    sum_rate: f64,
    power_cost: f64,
    mm_iterations: usize,
    outer_iterations: usize,
    outer_trace: Vec<f64>,
}

impl Outcome {
    fn failed(status: RowStatus) -> Self {
        Self {
            status,
            sum_rate: 0.0,
            power_cost: 0.0,
            mm_iterations: 0,
            outer_iterations: 0,
            outer_trace: Vec::new(),
        }
    }

    fn from_error(e: Error) -> Result<Self> {
        match e {
            Error::Infeasible { .. } => Ok(Self::failed(RowStatus::Infeasible)),
            Error::RankDeficient { .. } => Ok(Self::failed(RowStatus::RankDeficient)),
            Error::BudgetExceeded { .. } => Ok(Self::failed(RowStatus::BudgetExceeded)),
            other => Err(other),
        }
    }

    fn from_baseline(r: Result<BaselineResult>) -> Result<Self> {
        match r {
            Ok(b) => Ok(Self {
                status: RowStatus::Ok,
                sum_rate: b.sum_rate,
                power_cost: b.power_cost,
                mm_iterations: 0,
                outer_iterations: 0,
                outer_trace: Vec::new(),
            }),
            Err(e) => Self::from_error(e),
        }
    }
}

fn run_method(method: Method, ch: &ChannelSet, cfg: &ScenarioConfig, seed: RngSeed, spec: &ExperimentSpec) -> Result<Outcome> {
    let s = &spec.solver;
    match method {
        Method::Algorithm1 => match solve(ch, cfg, seed, &s.solve_options()) {
            Ok(sol) => Ok(Outcome {
                status: sol.status.into(),
                sum_rate: sol.sum_rate,
                power_cost: if sol.status == Status::Infeasible { 0.0 } else { sol.power_cost() },
                mm_iterations: sol.mm_iterations(),
                outer_iterations: sol.outer_iterations(),
                outer_trace: sol.outer_trace.iter().map(|r| r.sum_rate).collect(),
            }),
            Err(e) => Outcome::from_error(e),
        },
        Method::RandomPhase => Outcome::from_baseline(random_phase_baseline(ch, cfg, seed, s.waterfill)),
        Method::GlobalSearch => Outcome::from_baseline(global_search(ch, cfg, &s.global_search, seed)),
        Method::Grid => Outcome::from_baseline(grid_oracle(ch, cfg, s.grid_steps, s.waterfill)),
    }
}

fn run_realization(spec: &ExperimentSpec, point: &ScenarioPoint, realization: u64) -> Result<Vec<ResultRow>> {
    let cfg = spec.scenario_config(point)?;
    let seed = RngSeed::new(spec.master_seed, realization);
    let (ch, resamples, full_rank) = draw_channel(cfg.dims, seed, cfg.tolerances.zf_tol, true);
    let label = spec.rate_floor.label();
    spec.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let out = if full_rank {
                run_method(method, &ch, &cfg, seed, spec)?
            } else {
                Outcome::failed(RowStatus::RankDeficient)
            };
            Ok(ResultRow {
                experiment: spec.experiment,
                k: point.k,
                m: point.m,
                n: point.n,
                snr_db: point.snr_db,
                r_min_mode: label.clone(),
                method,
                realization,
                status: out.status,
                sum_rate: out.sum_rate,
                power_cost: out.power_cost,
                mm_iterations: out.mm_iterations,
                outer_iterations: out.outer_iterations,
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                resamples,
                outer_trace: out.outer_trace,
            })
        })
        .collect()
}

/// Run every scenario, method and realization. Rows are ordered by scenario
/// (as listed), method (as listed), then realization.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    if spec.experiment == ExperimentKind::Convergence {
        return Err(Error::InvalidConfig("use convergence_report for convergence experiments".into()));
    }
    let jobs: Vec<(usize, u64)> = (0..spec.scenarios.len())
        .flat_map(|s| (0..spec.realizations as u64).map(move |r| (s, r)))
        .collect();
    let chunks: Vec<Vec<ResultRow>> = jobs
        .par_iter()
        .map(|&(s, r)| run_realization(spec, &spec.scenarios[s], r))
        .collect::<Result<_>>()?;

    let method_pos = |m: Method| spec.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
    let mut indexed: Vec<(usize, ResultRow)> = jobs
        .iter()
        .zip(chunks)
        .flat_map(|(&(s, _), rows)| rows.into_iter().map(move |row| (s, row)))
        .collect();
    indexed.sort_by_key(|(s, row)| (*s, method_pos(row.method), row.realization));
    Ok(indexed.into_iter().map(|(_, row)| row).collect())
}

pub const CSV_HEADER: [&str; 14] = [
    "experiment",
    "K",
    "M",
    "N",
    "snr_db",
    "r_min_mode",
    "method",
    "realization",
    "status",
    "sum_rate_bps_hz",
    "power_cost",
    "mm_iterations",
    "outer_iterations",
    "wall_time_ms",
];

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.as_str().to_string(),
            r.k.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.snr_db.to_string(),
            r.r_min_mode.clone(),
            r.method.as_str().to_string(),
            r.realization.to_string(),
            r.status.as_str().to_string(),
            r.sum_rate.to_string(),
            r.power_cost.to_string(),
            r.mm_iterations.to_string(),
            r.outer_iterations.to_string(),
            format!("{:.3}", r.wall_time_ms),
        ])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput<'a> {
    pub spec: &'a ExperimentSpec,
    pub rows: &'a [ResultRow],
    pub summary: Vec<SummaryRow>,
}

pub fn write_json<W: Write>(spec: &ExperimentSpec, rows: &[ResultRow], out: W) -> std::io::Result<()> {
    let summary = aggregate(rows, &GroupKey::DEFAULT).unwrap_or_default();
    let doc = ExperimentOutput { spec, rows, summary };
    serde_json::to_writer_pretty(out, &doc).map_err(std::io::Error::from)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Experiment,
    Users,
    Antennas,
    Units,
    SnrDb,
    RateFloor,
    Method,
}

impl GroupKey {
    /// Everything except the realization.
    pub const DEFAULT: [GroupKey; 7] = [
        GroupKey::Experiment,
        GroupKey::Users,
        GroupKey::Antennas,
        GroupKey::Units,
        GroupKey::SnrDb,
        GroupKey::RateFloor,
        GroupKey::Method,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GroupKey::Experiment => "experiment",
            GroupKey::Users => "K",
            GroupKey::Antennas => "M",
            GroupKey::Units => "N",
            GroupKey::SnrDb => "snr_db",
            GroupKey::RateFloor => "r_min_mode",
            GroupKey::Method => "method",
        }
    }

    fn value(&self, r: &ResultRow) -> String {
        match self {
            GroupKey::Experiment => r.experiment.as_str().into(),
            GroupKey::Users => r.k.to_string(),
            GroupKey::Antennas => r.m.to_string(),
            GroupKey::Units => r.n.to_string(),
            GroupKey::SnrDb => r.snr_db.to_string(),
            GroupKey::RateFloor => r.r_min_mode.clone(),
            GroupKey::Method => r.method.as_str().into(),
        }
    }
}

/// Sum-rate statistics of one group (population standard deviation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            count: values.len(),
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub keys: Vec<(String, String)>,
    /// `None` when every row of the group was rank deficient.
    pub stats: Option<Stats>,
    pub infeasible: usize,
    pub rank_deficient: usize,
}

/// Group rows and summarize their sum rates. Infeasible rows count as zero
/// rate; rank-deficient rows are skipped and counted. Groups appear in order
/// of first occurrence.
pub fn aggregate(rows: &[ResultRow], keys: &[GroupKey]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut order: Vec<Vec<String>> = Vec::new();
    let mut groups: std::collections::HashMap<Vec<String>, Vec<&ResultRow>> = Default::default();
    for r in rows {
        let key: Vec<String> = keys.iter().map(|k| k.value(r)).collect();
        let entry = groups.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(r);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let usable: Vec<f64> = members
                .iter()
                .filter(|r| r.status != RowStatus::RankDeficient)
                .map(|r| r.sum_rate)
                .collect();
            SummaryRow {
                keys: keys.iter().map(|k| k.name().to_string()).zip(key.iter().cloned()).collect(),
                stats: Stats::of(&usable),
                infeasible: members.iter().filter(|r| r.status == RowStatus::Infeasible).count(),
                rank_deficient: members.iter().filter(|r| r.status == RowStatus::RankDeficient).count(),
            }
        })
        .collect())
}

/// Plain-text rendering of a summary, one group per line.
pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut s = String::new();
    for row in summary {
        let keys: Vec<String> = row.keys.iter().map(|(k, v)| format!("{k}={v}")).collect();
        match row.stats {
            Some(st) => s.push_str(&format!(
                "{}  n={} mean={:.4} std={:.4} min={:.4} max={:.4} infeasible={} rank_deficient={}\n",
                keys.join(" "),
                st.count,
                st.mean,
                st.std,
                st.min,
                st.max,
                row.infeasible,
                row.rank_deficient
            )),
            None => s.push_str(&format!("{}  empty group (rank_deficient={})\n", keys.join(" "), row.rank_deficient)),
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub realization: u64,
    pub iterations: usize,
    pub converged: bool,
    pub mse_trace: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub realizations: usize,
    pub converged: usize,
    /// Median iterations to reach the MSE tolerance (capped runs count at the cap).
    pub median_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub mse_tol: f64,
    pub traces: Vec<ConvergenceTrace>,
    pub summary: Vec<ConvergenceSummary>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// MM convergence on the unweighted power cost, from uniform random phases.
///
/// Only the reduced map is needed, so `K > M` is allowed here.
pub fn convergence_report(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    if spec.experiment != ExperimentKind::Convergence {
        return Err(Error::InvalidConfig("convergence_report needs experiment = convergence".into()));
    }
    let s = &spec.solver;
    let jobs: Vec<(usize, u64)> = (0..spec.scenarios.len())
        .flat_map(|p| (0..spec.realizations as u64).map(move |r| (p, r)))
        .collect();
    let traces: Vec<ConvergenceTrace> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let point = &spec.scenarios[p];
            let dims = point.dims();
            let seed = RngSeed::new(spec.master_seed, r);
            let (ch, _, _) = draw_channel(dims, seed, s.tolerances.zf_tol, false);
            let map = build_reduced_map(&ch, Weighting::Unweighted, s.tolerances.zf_tol)?;
            let x0 = PhaseVector::random(dims.pim_units, &mut seed.rng(Stream::InitialPhases));
            let st = mm_loop(&map, &x0, s.tolerances.mm_mse_tol, s.caps.mm_max_iter, s.surrogate);
            Ok(ConvergenceTrace {
                k: point.k,
                m: point.m,
                n: point.n,
                realization: r,
                iterations: st.iterations,
                converged: st.converged,
                mse_trace: st.mse_trace,
                objective_trace: st.objective_trace,
            })
        })
        .collect::<Result<_>>()?;

    let summary = spec
        .scenarios
        .iter()
        .enumerate()
        .map(|(p, point)| {
            let mine: Vec<&ConvergenceTrace> = jobs
                .iter()
                .zip(&traces)
                .filter(|((q, _), _)| *q == p)
                .map(|(_, t)| t)
                .collect();
            let its: Vec<f64> = mine.iter().map(|t| t.iterations as f64).collect();
            ConvergenceSummary {
                k: point.k,
                m: point.m,
                n: point.n,
                realizations: mine.len(),
                converged: mine.iter().filter(|t| t.converged).count(),
                median_iterations: median(&its),
            }
        })
        .collect();
    Ok(ConvergenceReport {
        mse_tol: s.tolerances.mm_mse_tol,
        traces,
        summary,
    })
}

pub fn write_convergence_csv<W: Write>(report: &ConvergenceReport, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["experiment", "K", "M", "N", "realization", "iteration", "mse", "objective"])?;
    for t in &report.traces {
        for (i, mse) in t.mse_trace.iter().enumerate() {
            w.write_record([
                "convergence".to_string(),
                t.k.to_string(),
                t.m.to_string(),
                t.n.to_string(),
                t.realization.to_string(),
                (i + 1).to_string(),
                mse.to_string(),
                t.objective_trace[i + 1].to_string(),
            ])?;
        }
    }
    w.flush()
}

pub fn write_convergence_json<W: Write>(report: &ConvergenceReport, out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, report).map_err(std::io::Error::from)
}
