//! The alternating outer loop: phase step, feasibility test, power step,
//! repeated until the sum rate settles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::phase_mm::{build_reduced_map, mm_loop, MmMode, Weighting};
use crate::power_wf::{feasibility_check, waterfill_exact, waterfill_paper, PowerAllocation, WaterfillInput};
use crate::scenario::{ChannelSet, RngSeed, ScenarioConfig, Stream};
use crate::zf::{cascade, power_cost, sum_rate, zf_precoder, PhaseVector, Precoder};

/// Which cost the phase step minimizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseWeighting {
    /// `tr(G P G^H)` with the current powers.
    #[default]
    Weighted,
    /// `tr(G G^H)`, ignoring the powers.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaterfillMethod {
    #[default]
    Exact,
    /// Closed-form eigenvalue expression, re-checked against the true budget.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub surrogate: MmMode,
    pub weighting: PhaseWeighting,
    pub waterfill: WaterfillMethod,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            surrogate: MmMode::Spectral,
            weighting: PhaseWeighting::Weighted,
            waterfill: WaterfillMethod::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    Infeasible,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIterations => "max_iterations",
            Status::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub sum_rate: f64,
    pub power_cost: f64,
    pub mm_iterations: usize,
    /// `false` when the phase step was rolled back because it raised the true cost.
    pub phase_step_kept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub phases: PhaseVector,
    pub powers: PowerAllocation,
    /// Zero when infeasible.
    pub sum_rate: f64,
    pub outer_trace: Vec<OuterRecord>,
    pub status: Status,
}

impl Solution {
    pub fn outer_iterations(&self) -> usize {
        self.outer_trace.len()
    }

    pub fn mm_iterations(&self) -> usize {
        self.outer_trace.iter().map(|r| r.mm_iterations).sum()
    }

    pub fn power_cost(&self) -> f64 {
        self.outer_trace.last().map_or(0.0, |r| r.power_cost)
    }
}

fn true_cost(ch: &ChannelSet, phases: &PhaseVector, p: &[f64], zf_tol: f64) -> f64 {
    let prec = zf_precoder(&cascade(ch, phases), zf_tol);
    if prec.is_full_rank() {
        power_cost(&prec, p)
    } else {
        f64::INFINITY
    }
}

/// Power step for fixed phases. `Ok(None)` means the floors do not fit the budget.
pub(crate) fn power_step(
    prec: &Precoder,
    cfg: &ScenarioConfig,
    floors: &[f64],
    method: WaterfillMethod,
) -> Result<Option<PowerAllocation>> {
    let inp = WaterfillInput {
        weights: prec.user_weights(),
        p_floor: floors.to_vec(),
        p_max: cfg.p_max,
        noise_power: cfg.noise_power,
    };
    if !feasibility_check(&inp) {
        return Ok(None);
    }
    let alloc = match method {
        WaterfillMethod::Exact => waterfill_exact(&inp)?,
        WaterfillMethod::Paper => {
            // Eigenvalues of W W^H are the inverse eigenvalues of G^H G.
            let gram_inv = prec.g.adjoint() * &prec.g;
            let eig: Vec<f64> = hermitian_eigenvalues(&gram_inv)
                .into_iter()
                .map(|v| if v > 0.0 { 1.0 / v } else { 0.0 })
                .collect();
            waterfill_paper(&eig, floors, cfg.p_max, cfg.noise_power, &inp.weights)?
        }
    };
    Ok(alloc.feasible.then_some(alloc))
}

/// Alternate phase and power optimization for one channel realization.
///
/// Phases start i.i.d. uniform from the realization's seed and powers start
/// at the QoS floors. Each outer iteration runs the MM phase step, declares
/// the problem infeasible if the floors no longer fit the budget, and
/// otherwise water-fills. In weighted mode a phase step that raises the true
/// power cost of the current powers is rolled back, which makes the sum-rate
/// trace non-decreasing.
///
/// A rank-deficient cascade is returned as [`Error::RankDeficient`] so Monte
/// Carlo drivers can redraw the realization.
pub fn solve(ch: &ChannelSet, cfg: &ScenarioConfig, seed: RngSeed, opts: &SolveOptions) -> Result<Solution> {
    cfg.validate()?;
    if ch.dims() != cfg.dims {
        return Err(Error::InvalidConfig("channel dimensions do not match the scenario".into()));
    }
    let tol = cfg.tolerances;
    let floors = cfg.power_floors();
    let mut phases = PhaseVector::random(cfg.dims.pim_units, &mut seed.rng(Stream::InitialPhases));
    let mut p = floors.clone();
    let mut outer_trace: Vec<OuterRecord> = Vec::new();
    let mut powers = None;
    let mut status = Status::MaxIterations;

    for _ in 0..cfg.caps.outer_max_iter {
        let weighting = match opts.weighting {
            PhaseWeighting::Weighted => Weighting::PowerWeighted(p.clone()),
            PhaseWeighting::PaperLiteral => Weighting::Unweighted,
        };
        let map = build_reduced_map(ch, weighting, tol.zf_tol)?;
        let mm = mm_loop(&map, &phases, tol.mm_mse_tol, cfg.caps.mm_max_iter, opts.surrogate);

        let kept = match opts.weighting {
            PhaseWeighting::Weighted => {
                true_cost(ch, &mm.phases, &p, tol.zf_tol) <= true_cost(ch, &phases, &p, tol.zf_tol)
            }
            PhaseWeighting::PaperLiteral => true,
        };
        if kept {
            phases = mm.phases;
        }

        let prec = zf_precoder(&cascade(ch, &phases), tol.zf_tol).require_full_rank()?;
        let Some(alloc) = power_step(&prec, cfg, &floors, opts.waterfill)? else {
            status = Status::Infeasible;
            break;
        };
        p = alloc.p.clone();
        let rate = sum_rate(&p, cfg.noise_power);
        let prev = outer_trace.last().map(|r| r.sum_rate);
        outer_trace.push(OuterRecord {
            sum_rate: rate,
            power_cost: power_cost(&prec, &p),
            mm_iterations: mm.iterations,
            phase_step_kept: kept,
        });
        powers = Some(alloc);
        if let Some(prev) = prev {
            if (rate - prev).abs() <= tol.outer_rel_tol * prev.abs() {
                status = Status::Converged;
                break;
            }
        }
    }

    if status == Status::Infeasible {
        return Ok(Solution {
            phases,
            powers: PowerAllocation {
                active_floor_mask: vec![true; floors.len()],
                p: floors,
                feasible: false,
                water_level: f64::NAN,
            },
            sum_rate: 0.0,
            outer_trace,
            status,
        });
    }
    let powers = powers.expect("at least one outer iteration ran");
    Ok(Solution {
        sum_rate: sum_rate(&powers.p, cfg.noise_power),
        phases,
        powers,
        outer_trace,
        status,
    })
}

/// `R_min,k - log2(1 + p_k / sigma^2)` per user; nonpositive entries are satisfied.
pub fn qos_violation(sol: &Solution, cfg: &ScenarioConfig) -> Vec<f64> {
    sol.powers
        .p
        .iter()
        .zip(&cfg.rate_floors)
        .map(|(p, r)| r - (p / cfg.noise_power).ln_1p() / std::f64::consts::LN_2)
        .collect()
}
