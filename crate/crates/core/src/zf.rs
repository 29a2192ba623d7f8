//! Cascaded channel, zero-forcing precoder and the rate/power bookkeeping
//! built on it.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pinv, CMat, CVec};
use crate::scenario::ChannelSet;

/// Mirror phases `theta_i` in `[0, 2pi)`.
///
/// Only the angles are stored. The reflection coefficients `e^{j theta}` and
/// the optimization variable `x = e^{-j theta}` are rebuilt on demand, so
/// they are unit-modulus by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(theta: Vec<f64>) -> Self {
        Self(theta.into_iter().map(wrap_phase).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self((0..n).map(|_| rng.random_range(0.0..TAU)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.0
    }

    /// Reflection coefficients `phi_i = e^{j theta_i}`.
    pub fn phi(&self) -> CVec {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&t| Complex64::from_polar(1.0, t)))
    }

    /// `x_i = conj(phi_i) = e^{-j theta_i}`, the diagonal of the inverse phase matrix.
    pub fn x(&self) -> CVec {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&t| Complex64::from_polar(1.0, -t)))
    }

    /// Phases whose `x` has the given arguments.
    pub fn from_x_args(args: impl IntoIterator<Item = f64>) -> Self {
        Self::new(args.into_iter().map(|a| -a).collect())
    }
}

pub(crate) fn wrap_phase(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    // rem_euclid may round up to exactly TAU for tiny negative inputs.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `W = H2 diag(e^{j theta}) H1`, shape `K x M`.
pub fn cascade(ch: &ChannelSet, phases: &PhaseVector) -> CMat {
    let phi = phases.phi();
    let mut scaled = ch.h1.clone();
    for (mut row, p) in scaled.row_iter_mut().zip(phi.iter()) {
        row *= *p;
    }
    &ch.h2 * scaled
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondReport {
    pub min_singular_value: f64,
    pub max_singular_value: f64,
}

#[derive(Debug, Clone)]
pub struct Precoder {
    /// `M x K`, column `k` is user `k`'s beamformer.
    pub g: CMat,
    /// `W g`, the identity for a full-rank cascade.
    pub effective_channel: CMat,
    pub cond_report: CondReport,
    pub rank: usize,
}

impl Precoder {
    pub fn users(&self) -> usize {
        self.g.ncols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.users()
    }

    pub fn require_full_rank(self) -> Result<Self> {
        if self.is_full_rank() {
            Ok(self)
        } else {
            Err(Error::RankDeficient {
                rank: self.rank,
                required: self.users(),
            })
        }
    }

    /// `||g_k||^2` per user: the power cost of one unit of power for user `k`.
    pub fn user_weights(&self) -> Vec<f64> {
        self.g
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }
}

/// Pseudo-inverse precoder of the cascade `w` (`K x M`).
///
/// Rank deficiency is reported through [`Precoder::rank`], not as an error.
pub fn zf_precoder(w: &CMat, zf_tol: f64) -> Precoder {
    let pi = pinv(w, zf_tol);
    let effective_channel = w * &pi.matrix;
    Precoder {
        cond_report: CondReport {
            min_singular_value: pi.min_singular_value(),
            max_singular_value: pi.max_singular_value(),
        },
        rank: pi.rank,
        effective_channel,
        g: pi.matrix,
    }
}

/// `tr(G P G^H) = sum_k p_k ||g_k||^2`.
pub fn power_cost(prec: &Precoder, p: &[f64]) -> f64 {
    assert_eq!(p.len(), prec.users(), "one power per user");
    prec.user_weights().iter().zip(p).map(|(w, p)| w * p).sum()
}

/// Per-user SINR for arbitrary beamformers (does not assume interference is nulled).
pub fn sinr(ch: &ChannelSet, phases: &PhaseVector, g: &CMat, p: &[f64], noise_power: f64) -> Vec<f64> {
    let gains = cascade(ch, phases) * g;
    let k_users = gains.nrows();
    assert_eq!(p.len(), gains.ncols());
    (0..k_users)
        .map(|k| {
            let signal = p[k] * gains[(k, k)].norm_sqr();
            let interference: f64 = (0..p.len())
                .filter(|&i| i != k)
                .map(|i| p[i] * gains[(k, i)].norm_sqr())
                .sum();
            signal / (interference + noise_power)
        })
        .collect()
}

/// `sum_k log2(1 + p_k / sigma^2)`, the zero-forcing sum rate.
pub fn sum_rate(p: &[f64], noise_power: f64) -> f64 {
    p.iter().map(|pk| (pk / noise_power).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Dims, RngSeed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_channel(h1: f64, h2: f64) -> ChannelSet {
        ChannelSet::new(CMat::from_element(1, 1, c(h1)), CMat::from_element(1, 1, c(h2))).unwrap()
    }

    #[test]
    fn scalar_cascade() {
        let w = cascade(&scalar_channel(2.0, 3.0), &PhaseVector::zeros(1));
        assert_eq!(w[(0, 0)], c(6.0));
    }

    #[test]
    fn zero_phases_give_plain_product() {
        let ch = ChannelSet::generate(Dims::new(2, 3, 4), RngSeed::new(1, 0));
        let w = cascade(&ch, &PhaseVector::zeros(4));
        assert!((w - &ch.h2 * &ch.h1).norm() < 1e-14);
    }

    #[test]
    fn cascade_matches_triple_loop() {
        let ch = ChannelSet::generate(Dims::new(2, 3, 2), RngSeed::new(5, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ph = PhaseVector::random(2, &mut rng);
        let w = cascade(&ch, &ph);
        for k in 0..2 {
            for m in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..2 {
                    acc += ch.h2[(k, n)] * Complex64::from_polar(1.0, ph.theta()[n]) * ch.h1[(n, m)];
                }
                assert!((acc - w[(k, m)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn precoder_basics() {
        let id = CMat::identity(2, 2);
        let p = zf_precoder(&id, 1e-10);
        assert!((&p.g - &id).norm() < 1e-15);
        assert!(p.is_full_rank());

        let p = zf_precoder(&CMat::from_element(1, 1, c(6.0)), 1e-10);
        assert!((p.g[(0, 0)] - c(1.0 / 6.0)).norm() < 1e-15);
        assert!((power_cost(&p, &[36.0]) - 1.0).abs() < 1e-12);

        let p = zf_precoder(&id, 1e-10);
        assert!((power_cost(&p, &[1.0, 2.0]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn random_wide_cascade_is_inverted() {
        let ch = ChannelSet::generate(Dims::new(3, 5, 4), RngSeed::new(2, 2));
        let w = cascade(&ch, &PhaseVector::zeros(4));
        let p = zf_precoder(&w, 1e-10);
        assert_eq!(p.rank, 3);
        assert!((&w * &p.g - CMat::identity(3, 3)).norm() < 1e-9);
        assert!(p.cond_report.min_singular_value > 0.0);
        assert!(p.cond_report.max_singular_value >= p.cond_report.min_singular_value);
    }

    #[test]
    fn rank_deficiency_is_flagged() {
        let w = CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        let p = zf_precoder(&w, 1e-10);
        assert_eq!(p.rank, 1);
        assert!(matches!(p.require_full_rank(), Err(Error::RankDeficient { rank: 1, required: 2 })));
    }

    #[test]
    fn power_cost_matches_direct_trace() {
        let ch = ChannelSet::generate(Dims::new(3, 4, 5), RngSeed::new(8, 1));
        let prec = zf_precoder(&cascade(&ch, &PhaseVector::zeros(5)), 1e-10);
        let p = [0.5, 2.0, 1.25];
        let pm = CMat::from_diagonal(&DVector::from_iterator(3, p.iter().map(|&v| c(v))));
        let direct = (&prec.g * pm * prec.g.adjoint()).trace().re;
        assert!((power_cost(&prec, &p) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn zf_sinr_is_power_over_noise() {
        let ch = ChannelSet::generate(Dims::new(2, 3, 3), RngSeed::new(4, 0));
        let ph = PhaseVector::new(vec![0.1, 2.0, 4.0]);
        let prec = zf_precoder(&cascade(&ch, &ph), 1e-10);
        let g = sinr(&ch, &ph, &prec.g, &[4.0, 9.0], 1.0);
        assert!((g[0] - 4.0).abs() < 1e-6 && (g[1] - 9.0).abs() < 1e-6);
        let g = sinr(&ch, &ph, &prec.g, &[0.0, 0.0], 1.0);
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn sinr_with_arbitrary_beamformers() {
        let ch = ChannelSet::generate(Dims::new(2, 3, 3), RngSeed::new(4, 1));
        let ph = PhaseVector::new(vec![1.0, 0.5, 3.0]);
        let g = CMat::from_fn(3, 2, |i, j| {
            Complex64::new(0.5 + 0.3 * i as f64 - 0.2 * j as f64, 0.1 * (i + j) as f64)
        });
        let p = [1.5, 0.7];
        let got = sinr(&ch, &ph, &g, &p, 0.3);
        for k in 0..2 {
            let hk = |i: usize| {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..3 {
                    let mut hm = Complex64::new(0.0, 0.0);
                    for n in 0..3 {
                        hm += ch.h2[(k, n)] * Complex64::from_polar(1.0, ph.theta()[n]) * ch.h1[(n, m)];
                    }
                    acc += hm * g[(m, i)];
                }
                acc.norm_sqr()
            };
            let other = 1 - k;
            let expect = p[k] * hk(k) / (p[other] * hk(other) + 0.3);
            assert!((got[k] - expect).abs() < 1e-10 * expect.max(1.0));
        }
    }

    #[test]
    fn sum_rate_values() {
        assert!((sum_rate(&[3.0, 3.0], 1.0) - 4.0).abs() < 1e-14);
        assert_eq!(sum_rate(&[0.0, 0.0], 1.0), 0.0);
        let expect = 1.5f64.log2() + 2f64.log2() + 3f64.log2();
        assert!((sum_rate(&[1.0, 2.0, 4.0], 2.0) - expect).abs() < 1e-14);
    }

    #[test]
    fn phases_wrap_into_range() {
        let p = PhaseVector::new(vec![-1e-18, TAU, 7.0, -0.5]);
        assert!(p.theta().iter().all(|t| (0.0..TAU).contains(t)));
        let x = p.x();
        let phi = p.phi();
        for i in 0..4 {
            assert!((x[i] - phi[i].conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn scalar_singular_value_ignores_phase() {
        let ch = scalar_channel(2.0, -1.5);
        for t in [0.0, 1.0, 2.5, 6.0] {
            let p = zf_precoder(&cascade(&ch, &PhaseVector::new(vec![t])), 1e-10);
            assert!((p.cond_report.max_singular_value - 3.0).abs() < 1e-14);
        }
    }
}
