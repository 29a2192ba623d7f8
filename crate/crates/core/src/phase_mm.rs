//! Majorization-minimization over unit-modulus mirror coefficients.
//!
//! The power cost is written through the factored pseudo-inverse
//! `H1^+ diag(x) H2^+ P^{1/2}` with `x_i = e^{-j theta_i}`. Since the middle
//! factor is diagonal, the cost is `||b x||^2` for a `(K M) x N` matrix `b`
//! whose column `i` is `vec(H1^+[:, i] (H2^+[i, :] P^{1/2}))`. This is the
//! Kronecker form `(H2^{+T} (x) H1^+) vec(diag(x))` with the structurally zero
//! columns dropped.
//!
//! The factored form equals `tr(W^+ P W^{+H})` of the cascade `W = H2 Theta H1`
//! when `K = N <= M`. For other shapes it is a surrogate cost: an upper bound
//! on the true cost when `N <= M`, and not a right inverse of `W` at all
//! when `N > M`.
//!
//! Two majorizers are available at an expansion point `x_t`:
//!
//! * [`SurrogateKind::Spectral`]: with `R = b^H b` and `lambda = lambda_max(R)`,
//!   `f(x) = lambda ||x||^2 + 2 Re{x^H (R - lambda I) x_t} + x_t^H (lambda I - R) x_t`.
//!   `f - ||b x||^2 = (x - x_t)^H (lambda I - R)(x - x_t) >= 0`, so every step
//!   is a descent step. The minimizer over the unit circle is `e^{j arg y}`
//!   with `y = (lambda I - R) x_t`.
//! * [`SurrogateKind::Magnitude`]: the closed form built from
//!   `c_t = |b x_t|`, `c_max = max c_t`, `Mq = c_max R` and
//!   `L = b^H (diag(c_t) - N^2 I) b`, minimized through `y = Mq^+ (Mq - L) x_t`.
//!   Neither tangency nor dominance holds in general; use it through
//!   [`MmMode::Auto`], which falls back to the spectral surrogate as soon as
//!   a step fails to descend.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_lambda_max, pinv, quad_form, CMat, CVec};
use crate::scenario::ChannelSet;
use crate::zf::PhaseVector;

#[derive(Debug, Clone, PartialEq)]
pub enum Weighting {
    Unweighted,
    /// Fold `P^{1/2}` into the map, one power per user.
    PowerWeighted(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct ReducedMap {
    b: CMat,
    gram: CMat,
    lambda_max: f64,
    pub weighting: Weighting,
}

impl ReducedMap {
    /// Wrap an explicit map matrix.
    pub fn from_matrix(b: CMat) -> Self {
        let gram = b.adjoint() * &b;
        let lambda_max = hermitian_lambda_max(&gram).max(0.0);
        Self {
            b,
            gram,
            lambda_max,
            weighting: Weighting::Unweighted,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.b
    }

    /// `R = b^H b`.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn units(&self) -> usize {
        self.b.ncols()
    }
}

pub fn build_reduced_map(ch: &ChannelSet, weighting: Weighting, zf_tol: f64) -> Result<ReducedMap> {
    let dims = ch.dims();
    let (k, m, n) = (dims.users, dims.bs_antennas, dims.pim_units);
    let h1p = pinv(&ch.h1, zf_tol);
    if h1p.rank < n.min(m) {
        return Err(Error::RankDeficient {
            rank: h1p.rank,
            required: n.min(m),
        });
    }
    let h2p = pinv(&ch.h2, zf_tol);
    if h2p.rank < k.min(n) {
        return Err(Error::RankDeficient {
            rank: h2p.rank,
            required: k.min(n),
        });
    }
    let scale: Vec<f64> = match &weighting {
        Weighting::Unweighted => vec![1.0; k],
        Weighting::PowerWeighted(p) => {
            if p.len() != k || p.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "power weighting needs {k} nonnegative powers"
                )));
            }
            p.iter().map(|v| v.sqrt()).collect()
        }
    };
    let (a, c) = (&h1p.matrix, &h2p.matrix);
    let b = CMat::from_fn(k * m, n, |row, i| {
        let (kk, mm) = (row / m, row % m);
        a[(mm, i)] * c[(i, kk)] * scale[kk]
    });
    let mut map = ReducedMap::from_matrix(b);
    map.weighting = weighting;
    Ok(map)
}

/// `||b x||^2`.
pub fn objective_power(map: &ReducedMap, x: &CVec) -> f64 {
    (&map.b * x).norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurrogateKind {
    #[serde(rename = "paper")]
    Magnitude,
    #[serde(rename = "spectral")]
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurrogateAux {
    Magnitude { c_t: Vec<f64>, c_max: f64 },
    Spectral { lambda_max: f64 },
}

/// `f(x | x_t) = x^H Q x + 2 Re{x^H q_lin} + const_term`.
#[derive(Debug, Clone)]
pub struct Surrogate {
    pub kind: SurrogateKind,
    pub expansion: CVec,
    pub q_lin: CVec,
    pub const_term: f64,
    pub aux: SurrogateAux,
    /// `Q` for the magnitude kind; the spectral kind uses `lambda_max I`.
    quadratic: Option<CMat>,
}

impl Surrogate {
    pub fn value(&self, x: &CVec) -> f64 {
        let quad = match (&self.quadratic, &self.aux) {
            (Some(q), _) => quad_form(q, x),
            (None, SurrogateAux::Spectral { lambda_max }) => lambda_max * x.norm_squared(),
            (None, SurrogateAux::Magnitude { .. }) => unreachable!("magnitude surrogate stores Q"),
        };
        quad + 2.0 * x.dotc(&self.q_lin).re + self.const_term
    }

    /// `|f(x_t | x_t) - ||b x_t||^2|`.
    pub fn tangency_gap(&self, map: &ReducedMap) -> f64 {
        (self.value(&self.expansion) - objective_power(map, &self.expansion)).abs()
    }

    /// Smallest `f(x) - ||b x||^2` over `samples` random unit-modulus points.
    pub fn min_dominance_margin(&self, map: &ReducedMap, samples: usize, rng: &mut impl Rng) -> f64 {
        let n = self.expansion.len();
        (0..samples)
            .map(|_| {
                let x = PhaseVector::random(n, rng).x();
                self.value(&x) - objective_power(map, &x)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn build_surrogate_paper(map: &ReducedMap, x_t: &CVec) -> Surrogate {
    let n = map.units() as f64;
    let bx = &map.b * x_t;
    let c_t: Vec<f64> = bx.iter().map(|z| z.norm()).collect();
    let c_max = c_t.iter().copied().fold(0.0, f64::max);

    let mq = &map.gram * Complex64::new(c_max, 0.0);
    // b^H diag(c_t) b
    let mut scaled = map.b.clone();
    for (mut row, c) in scaled.row_iter_mut().zip(&c_t) {
        row *= Complex64::new(*c, 0.0);
    }
    let l = map.b.adjoint() * scaled - &map.gram * Complex64::new(n * n, 0.0);

    let l_minus_m = &l - &mq;
    let q_lin = &l_minus_m * x_t;
    let const_term = -x_t.dotc(&q_lin).re;
    Surrogate {
        kind: SurrogateKind::Magnitude,
        expansion: x_t.clone(),
        q_lin,
        const_term,
        aux: SurrogateAux::Magnitude { c_t, c_max },
        quadratic: Some(mq),
    }
}

pub fn build_surrogate_spectral(map: &ReducedMap, x_t: &CVec) -> Surrogate {
    let lambda = map.lambda_max;
    let rx = &map.gram * x_t;
    let q_lin = &rx - x_t * Complex64::new(lambda, 0.0);
    let const_term = lambda * x_t.norm_squared() - x_t.dotc(&rx).re;
    Surrogate {
        kind: SurrogateKind::Spectral,
        expansion: x_t.clone(),
        q_lin,
        const_term,
        aux: SurrogateAux::Spectral { lambda_max: lambda },
        quadratic: None,
    }
}

/// The vector whose phases define the surrogate minimizer.
fn direction(s: &Surrogate) -> CVec {
    let rhs = -&s.q_lin;
    match (&s.kind, &s.quadratic) {
        (SurrogateKind::Magnitude, Some(q)) => pinv(q, 1e-12).matrix * rhs,
        _ => rhs,
    }
}

/// Closed-form minimizer over the unit circle.
///
/// Both `e^{+j arg y}` and `e^{-j arg y}` are scored on the true objective
/// and the better one is kept (the `+` candidate wins ties). Components with
/// `|y_i| <= 1e-14 max_j |y_j|` keep their previous phase.
pub fn minimize_surrogate(s: &Surrogate, map: &ReducedMap) -> PhaseVector {
    let y = direction(s);
    let y_max = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let keep = |i: usize| y[i].norm() <= 1e-14 * y_max;
    let prev_args: Vec<f64> = s.expansion.iter().map(|z| z.arg()).collect();

    let plus = PhaseVector::from_x_args((0..y.len()).map(|i| if keep(i) { prev_args[i] } else { y[i].arg() }));
    let minus = PhaseVector::from_x_args((0..y.len()).map(|i| if keep(i) { prev_args[i] } else { -y[i].arg() }));
    if objective_power(map, &minus.x()) < objective_power(map, &plus.x()) {
        minus
    } else {
        plus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MmMode {
    /// Magnitude surrogate throughout.
    Paper,
    Spectral,
    /// Magnitude surrogate until its first non-descending step, spectral afterwards.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmState {
    pub phases: PhaseVector,
    /// Objective at the start point, then after every iteration.
    pub objective_trace: Vec<f64>,
    /// `||x_{t+1} - x_t||^2 / N` per iteration.
    pub mse_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Iteration at which auto mode switched to the spectral surrogate.
    pub switched_at: Option<usize>,
}

impl MmState {
    pub fn x(&self) -> CVec {
        self.phases.x()
    }

    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts with the initial objective")
    }
}

pub fn mm_loop(map: &ReducedMap, x0: &PhaseVector, mse_tol: f64, max_iter: usize, mode: MmMode) -> MmState {
    let n = map.units();
    assert_eq!(x0.len(), n, "phase vector length must match the map");
    let mut phases = x0.clone();
    let mut x = phases.x();
    let mut obj = objective_power(map, &x);
    let mut objective_trace = vec![obj];
    let mut mse_trace = Vec::new();
    let mut kind = match mode {
        MmMode::Spectral => SurrogateKind::Spectral,
        MmMode::Paper | MmMode::Auto => SurrogateKind::Magnitude,
    };
    let mut switched_at = None;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let mut next = step(map, &x, kind);
        let mut next_x = next.x();
        let mut next_obj = objective_power(map, &next_x);
        if mode == MmMode::Auto && kind == SurrogateKind::Magnitude && !(next_obj < obj) {
            kind = SurrogateKind::Spectral;
            switched_at = Some(iterations);
            next = step(map, &x, kind);
            next_x = next.x();
            next_obj = objective_power(map, &next_x);
        }
        let mse = (&next_x - &x).norm_squared() / n as f64;
        phases = next;
        x = next_x;
        obj = next_obj;
        objective_trace.push(obj);
        mse_trace.push(mse);
        if mse < mse_tol {
            converged = true;
            break;
        }
    }
    MmState {
        phases,
        objective_trace,
        mse_trace,
        iterations,
        converged,
        switched_at,
    }
}

fn step(map: &ReducedMap, x: &CVec, kind: SurrogateKind) -> PhaseVector {
    let s = match kind {
        SurrogateKind::Magnitude => build_surrogate_paper(map, x),
        SurrogateKind::Spectral => build_surrogate_spectral(map, x),
    };
    minimize_surrogate(&s, map)
}

/// Unit-modulus vector with the given phases, for callers working in `x` directly.
pub fn unit_vector(args: &[f64]) -> CVec {
    DVector::from_iterator(args.len(), args.iter().map(|&a| Complex64::from_polar(1.0, a)))
}
