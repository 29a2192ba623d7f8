//! Reference points for Algorithm-style comparisons: a frozen random mirror,
//! a multi-start phase search, and an exhaustive phase grid for tiny mirrors.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::alternating::{power_step, WaterfillMethod};
use crate::error::{Error, Result};
use crate::power_wf::PowerAllocation;
use crate::scenario::{ChannelSet, RngSeed, ScenarioConfig, Stream};
use crate::zf::{cascade, power_cost, sum_rate, zf_precoder, PhaseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    RandomPhase,
    GlobalSearch,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub kind: BaselineKind,
    pub sum_rate: f64,
    pub phases: PhaseVector,
    pub powers: PowerAllocation,
    pub power_cost: f64,
    /// Phase configurations scored.
    pub evaluations: usize,
}

/// Scores a phase configuration by its water-filled sum rate.
///
/// Infeasible phases score `p_max - floor_cost < 0`, so searches are pulled
/// towards feasibility; rank-deficient cascades score `-inf`.
struct Evaluator<'a> {
    ch: &'a ChannelSet,
    cfg: &'a ScenarioConfig,
    floors: Vec<f64>,
    method: WaterfillMethod,
}

struct Scored {
    merit: f64,
    /// `(allocation, its power cost)` when feasible.
    powers: Option<(PowerAllocation, f64)>,
}

impl<'a> Evaluator<'a> {
    fn new(ch: &'a ChannelSet, cfg: &'a ScenarioConfig, method: WaterfillMethod) -> Result<Self> {
        cfg.validate()?;
        if ch.dims() != cfg.dims {
            return Err(Error::InvalidConfig("channel dimensions do not match the scenario".into()));
        }
        Ok(Self {
            ch,
            cfg,
            floors: cfg.power_floors(),
            method,
        })
    }

    fn score(&self, phases: &PhaseVector) -> Result<Scored> {
        let prec = zf_precoder(&cascade(self.ch, phases), self.cfg.tolerances.zf_tol);
        if !prec.is_full_rank() {
            return Ok(Scored {
                merit: f64::NEG_INFINITY,
                powers: None,
            });
        }
        match power_step(&prec, self.cfg, &self.floors, self.method)? {
            Some(a) => {
                let cost = power_cost(&prec, &a.p);
                Ok(Scored {
                    merit: sum_rate(&a.p, self.cfg.noise_power),
                    powers: Some((a, cost)),
                })
            }
            None => {
                let floor_cost: f64 = prec.user_weights().iter().zip(&self.floors).map(|(w, f)| w * f).sum();
                Ok(Scored {
                    merit: (self.cfg.p_max - floor_cost).min(-f64::MIN_POSITIVE),
                    powers: None,
                })
            }
        }
    }

    fn finish(&self, kind: BaselineKind, phases: PhaseVector, scored: Scored, evaluations: usize) -> Result<BaselineResult> {
        match scored.powers {
            Some((powers, power_cost)) => Ok(BaselineResult {
                kind,
                sum_rate: scored.merit,
                phases,
                powers,
                power_cost,
                evaluations,
            }),
            None => {
                let required = self.cfg.p_max - scored.merit;
                Err(Error::Infeasible {
                    required,
                    budget: self.cfg.p_max,
                })
            }
        }
    }
}

/// Freeze one uniformly random mirror configuration and only allocate power.
pub fn random_phase_baseline(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    seed: RngSeed,
    method: WaterfillMethod,
) -> Result<BaselineResult> {
    let eval = Evaluator::new(ch, cfg, method)?;
    let phases = PhaseVector::random(cfg.dims.pim_units, &mut seed.rng(Stream::BaselinePhases));
    let scored = eval.score(&phases)?;
    eval.finish(BaselineKind::RandomPhase, phases, scored, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlobalSearchOptions {
    pub restarts: usize,
    /// Evaluation cap for a single start.
    pub max_evals_per_start: usize,
    /// First coordinate step (radians); halved whenever a sweep finds no improvement.
    pub initial_step: f64,
    /// A start has converged once the step falls below this.
    pub min_step: f64,
}

impl Default for GlobalSearchOptions {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_evals_per_start: 20_000,
            initial_step: PI / 2.0,
            min_step: 1e-7,
        }
    }
}

/// Upper bound on `N * restarts * max_evals_per_start`.
pub const GLOBAL_SEARCH_WORK_CAP: u128 = 1 << 36;

/// Multi-start coordinate search over all phases, each candidate scored by
/// exact water-filling; the best start wins.
///
/// Starts are drawn in sequence from one stream, so the first `r` starts are
/// shared by every run with `restarts >= r`. Ties keep the lexicographically
/// smallest phase vector.
pub fn global_search(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    opts: &GlobalSearchOptions,
    seed: RngSeed,
) -> Result<BaselineResult> {
    let eval = Evaluator::new(ch, cfg, WaterfillMethod::Exact)?;
    let n = cfg.dims.pim_units;
    let work = n as u128 * opts.restarts as u128 * opts.max_evals_per_start as u128;
    if opts.restarts == 0 || opts.max_evals_per_start == 0 || work > GLOBAL_SEARCH_WORK_CAP {
        return Err(Error::InvalidConfig(format!(
            "global search needs restarts >= 1 and N * restarts * evals <= {GLOBAL_SEARCH_WORK_CAP}"
        )));
    }
    let mut rng = seed.rng(Stream::GlobalSearch);
    let mut best: Option<(Scored, PhaseVector)> = None;
    let mut evaluations = 0;
    let mut any_converged = false;

    for _ in 0..opts.restarts {
        let mut theta = PhaseVector::random(n, &mut rng).theta().to_vec();
        let mut current = eval.score(&PhaseVector::new(theta.clone()))?;
        let mut evals = 1;
        let mut step = opts.initial_step;
        while step >= opts.min_step && evals < opts.max_evals_per_start {
            let mut improved = false;
            'coords: for i in 0..n {
                for dir in [1.0, -1.0] {
                    let mut trial = theta.clone();
                    trial[i] += dir * step;
                    let trial = PhaseVector::new(trial);
                    let scored = eval.score(&trial)?;
                    evals += 1;
                    if scored.merit > current.merit {
                        theta = trial.theta().to_vec();
                        current = scored;
                        improved = true;
                        continue 'coords;
                    }
                    if evals >= opts.max_evals_per_start {
                        break 'coords;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        any_converged |= step < opts.min_step;
        evaluations += evals;
        let candidate = PhaseVector::new(theta);
        let better = match &best {
            None => true,
            Some((b, bp)) => {
                current.merit > b.merit
                    || (current.merit == b.merit && candidate.theta() < bp.theta())
            }
        };
        if better {
            best = Some((current, candidate));
        }
    }
    if !any_converged {
        return Err(Error::BudgetExceeded {
            cap: opts.max_evals_per_start,
        });
    }
    let (scored, phases) = best.expect("restarts >= 1");
    eval.finish(BaselineKind::GlobalSearch, phases, scored, evaluations)
}

pub const GRID_MAX_UNITS: usize = 3;
pub const GRID_MAX_STEPS: usize = 3600;

/// Exhaustive search over the uniform grid `theta_i = 2 pi j / steps_per_dim`.
///
/// A common rotation of all phases only rotates `W` by a unit scalar, which
/// leaves every `||g_k||` unchanged, so the first phase is pinned to zero and
/// `steps_per_dim^(N-1)` points cover the full grid.
pub fn grid_oracle(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    steps_per_dim: usize,
    method: WaterfillMethod,
) -> Result<BaselineResult> {
    let n = cfg.dims.pim_units;
    if n > GRID_MAX_UNITS {
        return Err(Error::DimensionTooLarge(n));
    }
    if steps_per_dim == 0 || steps_per_dim > GRID_MAX_STEPS {
        return Err(Error::InvalidConfig(format!(
            "steps_per_dim must be in 1..={GRID_MAX_STEPS}, got {steps_per_dim}"
        )));
    }
    let eval = Evaluator::new(ch, cfg, method)?;
    let free = n - 1;
    let total = steps_per_dim.pow(free as u32);
    let mut best: Option<(Scored, PhaseVector)> = None;
    let mut idx = vec![0usize; free];
    for _ in 0..total {
        let mut theta = vec![0.0; n];
        for (t, &j) in theta[1..].iter_mut().zip(&idx) {
            *t = j as f64 * TAU / steps_per_dim as f64;
        }
        let phases = PhaseVector::new(theta);
        let scored = eval.score(&phases)?;
        if best.as_ref().is_none_or(|(b, _)| scored.merit > b.merit) {
            best = Some((scored, phases));
        }
        // odometer, last index fastest
        for d in (0..free).rev() {
            idx[d] += 1;
            if idx[d] < steps_per_dim {
                break;
            }
            idx[d] = 0;
        }
    }
    let (scored, phases) = best.expect("grid has at least one point");
    eval.finish(BaselineKind::Grid, phases, scored, total)
}
