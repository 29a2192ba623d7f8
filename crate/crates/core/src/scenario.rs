//! Scenarios, channel realizations and reproducible seeding.
//!
//! Every random draw in a realization comes from a ChaCha stream keyed by
//! `(master_seed, purpose)` and positioned by `realization_index`, so any
//! realization can be regenerated on its own, in any order, on any thread.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Problem dimensions: users `K`, BS antennas `M`, mirror units `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub users: usize,
    pub bs_antennas: usize,
    pub pim_units: usize,
}

impl Dims {
    pub fn new(users: usize, bs_antennas: usize, pim_units: usize) -> Self {
        Self {
            users,
            bs_antennas,
            pim_units,
        }
    }

    pub fn validate_positive(&self) -> Result<()> {
        if self.users == 0 || self.bs_antennas == 0 || self.pim_units == 0 {
            return Err(Error::InvalidConfig(format!(
                "dimensions must be positive, got K={} M={} N={}",
                self.users, self.bs_antennas, self.pim_units
            )));
        }
        Ok(())
    }

    /// Zero-forcing needs `K <= M` and `K <= N`.
    pub fn validate_zf(&self) -> Result<()> {
        self.validate_positive()?;
        if self.users > self.bs_antennas || self.users > self.pim_units {
            return Err(Error::InvalidConfig(format!(
                "zero-forcing needs K <= M and K <= N, got K={} M={} N={}",
                self.users, self.bs_antennas, self.pim_units
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative singular-value cutoff for pseudo-inverses.
    pub zf_tol: f64,
    /// Stop the phase iterations once the successive-iterate MSE drops below this.
    pub mm_mse_tol: f64,
    /// Stop the outer loop once the relative sum-rate change drops below this.
    pub outer_rel_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zf_tol: 1e-10,
            mm_mse_tol: 1e-8,
            outer_rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IterationCaps {
    pub mm_max_iter: usize,
    pub outer_max_iter: usize,
}

impl Default for IterationCaps {
    fn default() -> Self {
        Self {
            mm_max_iter: 1000,
            outer_max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub dims: Dims,
    /// Transmit power budget (linear units).
    pub p_max: f64,
    /// Noise power, strictly positive.
    pub noise_power: f64,
    /// Per-user minimum rates in bits/s/Hz.
    pub rate_floors: Vec<f64>,
    pub tolerances: Tolerances,
    pub caps: IterationCaps,
}

impl ScenarioConfig {
    pub fn new(dims: Dims, p_max: f64, noise_power: f64, rate_floors: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            dims,
            p_max,
            noise_power,
            rate_floors,
            tolerances: Tolerances::default(),
            caps: IterationCaps::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Result<Self> {
        self.tolerances = tolerances;
        self.validate()?;
        Ok(self)
    }

    pub fn with_caps(mut self, caps: IterationCaps) -> Result<Self> {
        self.caps = caps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.dims.validate_zf()?;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return bad(format!("noise power must be positive, got {}", self.noise_power));
        }
        if !(self.p_max >= 0.0 && self.p_max.is_finite()) {
            return bad(format!("p_max must be nonnegative, got {}", self.p_max));
        }
        if self.rate_floors.len() != self.dims.users {
            return bad(format!(
                "expected {} rate floors, got {}",
                self.dims.users,
                self.rate_floors.len()
            ));
        }
        if self.rate_floors.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return bad("rate floors must be finite and nonnegative".into());
        }
        let t = &self.tolerances;
        if [t.zf_tol, t.mm_mse_tol, t.outer_rel_tol]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return bad("tolerances must be positive".into());
        }
        if self.caps.mm_max_iter == 0 || self.caps.outer_max_iter == 0 {
            return bad("iteration caps must be positive".into());
        }
        Ok(())
    }

    /// Minimum per-user powers implied by the rate floors.
    pub fn power_floors(&self) -> Vec<f64> {
        crate::power_wf::min_powers(&self.rate_floors, self.noise_power)
    }
}

/// How per-user rate floors are set in an SNR-parameterized scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RateFloorMode {
    /// Every user gets the same floor.
    Fixed { value: f64 },
    /// `R_min = log2(1 + SNR / (2K))` for every user.
    SnrScaled,
}

impl RateFloorMode {
    pub fn floor(&self, users: usize, snr_linear: f64) -> f64 {
        match *self {
            RateFloorMode::Fixed { value } => value,
            RateFloorMode::SnrScaled => (1.0 + snr_linear / (2.0 * users as f64)).log2(),
        }
    }

    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match self {
            RateFloorMode::Fixed { value } => format!("fixed:{value}"),
            RateFloorMode::SnrScaled => "snr_scaled".to_string(),
        }
    }
}

/// Build a scenario with unit noise power and `p_max = 10^(snr_db/10)`.
pub fn snr_config(dims: Dims, snr_db: f64, mode: RateFloorMode) -> Result<ScenarioConfig> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig(format!("snr_db must be finite, got {snr_db}")));
    }
    let snr = 10f64.powf(snr_db / 10.0);
    let floor = mode.floor(dims.users, snr);
    ScenarioConfig::new(dims, snr, 1.0, vec![floor; dims.users])
}

/// BS-to-mirror (`N x M`) and mirror-to-users (`K x N`) channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h1: CMat,
    pub h2: CMat,
}

impl ChannelSet {
    pub fn new(h1: CMat, h2: CMat) -> Result<Self> {
        if h2.ncols() != h1.nrows() {
            return Err(Error::InvalidConfig(format!(
                "h2 has {} columns but h1 has {} rows",
                h2.ncols(),
                h1.nrows()
            )));
        }
        Ok(Self { h1, h2 })
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.h2.nrows(), self.h1.ncols(), self.h1.nrows())
    }

    /// Draw i.i.d. `CN(0, 1)` entries for the given dimensions.
    pub fn generate(dims: Dims, seed: RngSeed) -> Self {
        Self::generate_attempt(dims, seed, 0)
    }

    /// Like [`ChannelSet::generate`], but on an independent stream per
    /// `attempt`, used to redraw rank-deficient realizations.
    pub fn generate_attempt(dims: Dims, seed: RngSeed, attempt: u32) -> Self {
        let mut rng = seed.rng(Stream::Channels { attempt });
        let h1 = cn_matrix(dims.pim_units, dims.bs_antennas, &mut rng);
        let h2 = cn_matrix(dims.users, dims.pim_units, &mut rng);
        Self { h1, h2 }
    }
}

pub fn generate_channels(cfg: &ScenarioConfig, seed: RngSeed) -> ChannelSet {
    ChannelSet::generate(cfg.dims, seed)
}

fn cn_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// What a random stream is used for. Each purpose gets an independent key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Channels { attempt: u32 },
    InitialPhases,
    BaselinePhases,
    GlobalSearch,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Channels { attempt } => 0x100 + attempt as u64,
            Stream::InitialPhases => 1,
            Stream::BaselinePhases => 2,
            Stream::GlobalSearch => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master_seed: u64,
    pub realization_index: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64, realization_index: u64) -> Self {
        Self {
            master_seed,
            realization_index,
        }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let key = splitmix64(self.master_seed ^ splitmix64(stream.tag()));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        rng.set_stream(self.realization_index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_follow_dims() {
        let ch = ChannelSet::generate(Dims::new(2, 4, 4), RngSeed::new(7, 0));
        assert_eq!(ch.h1.shape(), (4, 4));
        assert_eq!(ch.h2.shape(), (2, 4));
        let ch = ChannelSet::generate(Dims::new(2, 5, 3), RngSeed::new(7, 0));
        assert_eq!(ch.h1.shape(), (3, 5));
        assert_eq!(ch.h2.shape(), (2, 3));
        assert_eq!(ch.dims(), Dims::new(2, 5, 3));
    }

    #[test]
    fn generation_is_deterministic() {
        let d = Dims::new(2, 4, 4);
        let a = ChannelSet::generate(d, RngSeed::new(7, 0));
        let b = ChannelSet::generate(d, RngSeed::new(7, 0));
        assert_eq!(a, b);
        let c = ChannelSet::generate(d, RngSeed::new(7, 1));
        assert_ne!(a, c);
        let e = ChannelSet::generate_attempt(d, RngSeed::new(7, 0), 1);
        assert_ne!(a, e);
    }

    #[test]
    fn order_of_generation_does_not_matter() {
        let d = Dims::new(3, 3, 3);
        let forward: Vec<_> = (0..8).map(|i| ChannelSet::generate(d, RngSeed::new(3, i))).collect();
        let backward: Vec<_> = (0..8)
            .rev()
            .map(|i| ChannelSet::generate(d, RngSeed::new(3, i)))
            .collect();
        for (i, ch) in backward.iter().rev().enumerate() {
            assert_eq!(ch, &forward[i]);
        }
    }

    #[test]
    fn entries_have_unit_power_and_no_correlation() {
        let d = Dims::new(8, 8, 8);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut n = 0usize;
        let mut cross = Complex64::new(0.0, 0.0);
        let mut cross_sq = 0.0;
        let mut pairs = 0usize;
        for r in 0..10_000 {
            let ch = ChannelSet::generate(d, RngSeed::new(11, r));
            for z in ch.h1.iter().chain(ch.h2.iter()) {
                let p = z.norm_sqr();
                sum += p;
                sum_sq += p * p;
                n += 1;
            }
            let prod = ch.h1[(0, 0)] * ch.h1[(1, 0)].conj();
            cross += prod;
            cross_sq += prod.norm_sqr();
            pairs += 1;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let se = (var / n as f64).sqrt();
        assert!((mean - 1.0).abs() <= 1.96 * se, "mean {mean}, se {se}");
        assert!((mean - 1.0).abs() < 0.05);

        let c = cross / pairs as f64;
        let se_c = (cross_sq / pairs as f64 / pairs as f64).sqrt();
        assert!(c.norm() <= 3.0 * se_c, "corr {c}, se {se_c}");
    }

    #[test]
    fn snr_scaled_floors() {
        let cfg = snr_config(Dims::new(16, 16, 16), 20.0, RateFloorMode::SnrScaled).unwrap();
        assert!((cfg.p_max - 100.0).abs() < 1e-12);
        assert_eq!(cfg.noise_power, 1.0);
        for r in &cfg.rate_floors {
            assert!((r - 4.125f64.log2()).abs() < 1e-12);
            assert!((r - 2.0444).abs() < 1e-4);
        }
    }

    #[test]
    fn fixed_floors() {
        let cfg = snr_config(Dims::new(3, 4, 4), 0.0, RateFloorMode::Fixed { value: 0.0 }).unwrap();
        assert!((cfg.p_max - 1.0).abs() < 1e-15);
        assert!(cfg.rate_floors.iter().all(|r| *r == 0.0));
        let cfg = snr_config(Dims::new(16, 16, 16), 20.0, RateFloorMode::Fixed { value: 2.0 }).unwrap();
        assert!(cfg.rate_floors.iter().all(|r| *r == 2.0));
        assert_eq!(cfg.power_floors(), vec![3.0; 16]);
    }

    #[test]
    fn config_validation() {
        assert!(ScenarioConfig::new(Dims::new(3, 2, 4), 1.0, 1.0, vec![0.0; 3]).is_err());
        assert!(ScenarioConfig::new(Dims::new(3, 4, 2), 1.0, 1.0, vec![0.0; 3]).is_err());
        assert!(ScenarioConfig::new(Dims::new(2, 2, 2), 1.0, 0.0, vec![0.0; 2]).is_err());
        assert!(ScenarioConfig::new(Dims::new(2, 2, 2), -1.0, 1.0, vec![0.0; 2]).is_err());
        assert!(ScenarioConfig::new(Dims::new(2, 2, 2), 1.0, 1.0, vec![-0.1, 0.0]).is_err());
        assert!(ScenarioConfig::new(Dims::new(2, 2, 2), 1.0, 1.0, vec![0.0]).is_err());
        assert!(snr_config(Dims::new(1, 1, 1), f64::NAN, RateFloorMode::SnrScaled).is_err());
        assert!(ScenarioConfig::new(Dims::new(2, 2, 2), 0.0, 1.0, vec![0.0; 2]).is_ok());
    }
}
