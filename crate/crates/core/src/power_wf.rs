//! Power allocation for fixed mirror phases.
//!
//! With zero-forcing the per-user SINR is `p_k / sigma^2`, so the power step
//! is a concave rate maximization under one linear budget
//! `sum_k w_k p_k <= p_max` (with `w_k = ||g_k||^2`) and per-user floors.
//! [`waterfill_exact`] solves it exactly. [`waterfill_paper`] evaluates the
//! closed-form eigenvalue expression as written, and is only trusted after a
//! feasibility re-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    pub p: Vec<f64>,
    pub feasible: bool,
    /// For the exact solver `w_k (sigma^2 + p_k)` of every user above its floor.
    pub water_level: f64,
    /// `true` where the user sits on its QoS floor.
    pub active_floor_mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillInput {
    /// Budget weight per user, `[(W W^H)^{-1}]_kk = ||g_k||^2` for a ZF precoder.
    pub weights: Vec<f64>,
    pub p_floor: Vec<f64>,
    pub p_max: f64,
    pub noise_power: f64,
}

impl WaterfillInput {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.weights.len() != self.p_floor.len() {
            return bad("weights and floors differ in length");
        }
        if self.weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return bad("water-filling weights must be positive and finite");
        }
        if self.p_floor.iter().any(|f| !(*f >= 0.0 && f.is_finite())) {
            return bad("power floors must be nonnegative and finite");
        }
        if !(self.noise_power > 0.0) || !(self.p_max >= 0.0) {
            return bad("noise power must be positive and p_max nonnegative");
        }
        Ok(())
    }

    /// Budget consumed when every user sits on its floor.
    pub fn floor_cost(&self) -> f64 {
        self.weights.iter().zip(&self.p_floor).map(|(w, f)| w * f).sum()
    }
}

/// `p_floor,k = sigma^2 (2^{R_min,k} - 1)`.
pub fn min_powers(rate_floors: &[f64], noise_power: f64) -> Vec<f64> {
    rate_floors
        .iter()
        .map(|r| noise_power * (r * std::f64::consts::LN_2).exp_m1())
        .collect()
}

/// Whether the floors alone fit in the budget.
pub fn feasibility_check(inp: &WaterfillInput) -> bool {
    inp.floor_cost() <= inp.p_max
}

/// Exact maximizer of `sum log2(1 + p_k / sigma^2)` subject to
/// `sum w_k p_k <= p_max` and `p_k >= p_floor,k`.
///
/// Stationarity gives `p_k = max(p_floor,k, mu / w_k - sigma^2)` for a common
/// level `mu`. The budget as a function of `mu` is piecewise linear with
/// breakpoints `w_k (p_floor,k + sigma^2)`, so `mu` is found exactly by
/// walking the sorted breakpoints.
pub fn waterfill_exact(inp: &WaterfillInput) -> Result<PowerAllocation> {
    inp.validate()?;
    let required = inp.floor_cost();
    if required > inp.p_max {
        return Err(Error::Infeasible {
            required,
            budget: inp.p_max,
        });
    }
    let k = inp.weights.len();
    let s2 = inp.noise_power;
    let threshold = |i: usize| inp.weights[i] * (inp.p_floor[i] + s2);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| threshold(a).total_cmp(&threshold(b)).then(a.cmp(&b)));

    let mut floor_part = required;
    let mut active_weight = 0.0;
    let mut level = f64::NAN;
    for (j, &i) in order.iter().enumerate() {
        floor_part -= inp.weights[i] * inp.p_floor[i];
        active_weight += inp.weights[i];
        let mu = (inp.p_max - floor_part + s2 * active_weight) / (j + 1) as f64;
        let next = order.get(j + 1).map_or(f64::INFINITY, |&n| threshold(n));
        if mu <= next {
            level = mu.max(threshold(order[0]));
            break;
        }
    }

    let p: Vec<f64> = (0..k)
        .map(|i| (level / inp.weights[i] - s2).max(inp.p_floor[i]))
        .collect();
    let active_floor_mask = (0..k)
        .map(|i| level / inp.weights[i] - s2 <= inp.p_floor[i])
        .collect();
    Ok(PowerAllocation {
        p,
        feasible: true,
        water_level: level,
        active_floor_mask,
    })
}

/// Closed-form eigenvalue water-filling,
/// `p_k = [alpha lambda_k - sigma^2]^+ + p_floor,k / lambda_k` with
/// `alpha = (p_max - sum_k p_floor,k / lambda_k + sigma^2 sum_{k<=q} 1/lambda_k) / q`.
///
/// Eigenvalues are sorted in descending order and paired with users sorted by
/// descending floor (stable in user index). The result is returned as the
/// formula gives it; `feasible` comes from re-checking the true budget
/// `sum w_k p_k <= p_max` with `weights` and the floors.
pub fn waterfill_paper(
    eigenvalues: &[f64],
    p_floor: &[f64],
    p_max: f64,
    noise_power: f64,
    weights: &[f64],
) -> Result<PowerAllocation> {
    let k = eigenvalues.len();
    if p_floor.len() != k || weights.len() != k {
        return Err(Error::InvalidConfig("eigenvalues, floors and weights differ in length".into()));
    }
    let lambda_max = eigenvalues.iter().copied().fold(0.0, f64::max);
    if !(lambda_max > 0.0) {
        return Err(Error::NoPositiveEigenvalues);
    }
    let tol = 1e-12 * lambda_max;

    let mut lambdas = eigenvalues.to_vec();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let mut users: Vec<usize> = (0..k).collect();
    users.sort_by(|&a, &b| p_floor[b].total_cmp(&p_floor[a]).then(a.cmp(&b)));
    let mut lambda_of = vec![0.0; k];
    for (rank, &u) in users.iter().enumerate() {
        lambda_of[u] = lambdas[rank];
    }

    let q = lambdas.iter().filter(|&&l| l > tol).count();
    let floor_terms: f64 = (0..k)
        .filter(|&u| lambda_of[u] > tol)
        .map(|u| p_floor[u] / lambda_of[u])
        .sum();
    let noise_terms: f64 = lambdas[..q].iter().map(|l| noise_power / l).sum();
    let alpha = (p_max - floor_terms + noise_terms) / q as f64;

    let p: Vec<f64> = (0..k)
        .map(|u| {
            let l = lambda_of[u];
            if l > tol {
                (alpha * l - noise_power).max(0.0) + p_floor[u] / l
            } else {
                0.0
            }
        })
        .collect();

    let cost: f64 = weights.iter().zip(&p).map(|(w, p)| w * p).sum();
    let floors_met = p.iter().zip(p_floor).all(|(p, f)| *p >= f - 1e-9);
    let feasible = floors_met && cost <= p_max * (1.0 + 1e-9);
    let active_floor_mask = (0..k)
        .map(|u| lambda_of[u] <= tol || alpha * lambda_of[u] <= noise_power)
        .collect();
    Ok(PowerAllocation {
        p,
        feasible,
        water_level: alpha,
        active_floor_mask,
    })
}

/// Residuals of the optimality conditions of an exact allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktCertificate {
    /// `|sum w_k p_k - p_max| / p_max` (absolute when `p_max == 0`).
    pub budget_residual: f64,
    /// Relative spread `max/min - 1` of `w_k (sigma^2 + p_k)` over users above their floors.
    pub marginal_spread: f64,
    /// `max_k (p_floor,k - p_k)^+`.
    pub floor_violation: f64,
    pub any_above_floor: bool,
}

impl KktCertificate {
    /// Tolerances: budget `1e-8` relative, marginal utility `1e-6` relative.
    pub fn passes(&self) -> bool {
        let budget_ok = !self.any_above_floor || self.budget_residual <= 1e-8;
        budget_ok && self.marginal_spread <= 1e-6 && self.floor_violation <= 0.0
    }
}

pub fn kkt_certificate(inp: &WaterfillInput, alloc: &PowerAllocation) -> KktCertificate {
    let used: f64 = inp.weights.iter().zip(&alloc.p).map(|(w, p)| w * p).sum();
    let budget_residual = if inp.p_max > 0.0 {
        (used - inp.p_max).abs() / inp.p_max
    } else {
        (used - inp.p_max).abs()
    };
    let marginals: Vec<f64> = (0..alloc.p.len())
        .filter(|&i| alloc.p[i] > inp.p_floor[i] * (1.0 + 1e-12) + 1e-15)
        .map(|i| inp.weights[i] * (inp.noise_power + alloc.p[i]))
        .collect();
    let marginal_spread = match (
        marginals.iter().copied().reduce(f64::min),
        marginals.iter().copied().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) => hi / lo - 1.0,
        _ => 0.0,
    };
    let floor_violation = inp
        .p_floor
        .iter()
        .zip(&alloc.p)
        .map(|(f, p)| (f - p).max(0.0))
        .fold(0.0, f64::max);
    KktCertificate {
        budget_residual,
        marginal_spread,
        floor_violation,
        any_above_floor: !marginals.is_empty(),
    }
}
