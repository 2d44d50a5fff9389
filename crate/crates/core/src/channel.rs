//! Quasi-static Rayleigh MIMO channel with AWGN and distance-based
//! large-scale fading.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::tensorlin::ComplexMatrix;
use crate::{Error, Result};

/// Path-loss geometry with uniformly distributed user distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioGeometry {
    pub r_min: f64,
    pub r_max: f64,
    /// Path-loss slope in dB per decade.
    pub beta: f64,
}

impl ScenarioGeometry {
    pub fn new(r_min: f64, r_max: f64, beta: f64) -> Result<Self> {
        let g = ScenarioGeometry { r_min, r_max, beta };
        g.validate()?;
        Ok(g)
    }

    /// Non-line-of-sight urban micro: β = 35.3 dB/decade, r_min = 10 m.
    pub fn umi(r_max: f64) -> Result<Self> {
        Self::new(10.0, r_max, 35.3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max >= self.r_min && self.beta.is_finite()) {
            return Err(Error::Config(format!(
                "geometry needs r_max >= r_min > 0 (got {} / {})",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    /// `E[log10 r]` for `r ~ U(r_min, r_max)`.
    pub fn mean_log10_distance(&self) -> f64 {
        let (a, b) = (self.r_min, self.r_max);
        if b - a <= 1e-12 * a {
            return a.log10();
        }
        let prim = |r: f64| r * r.ln() - r;
        (prim(b) - prim(a)) / ((b - a) * std::f64::consts::LN_10)
    }

    /// Offset making the expected received power 0 dB.
    pub fn alpha_db(&self) -> f64 {
        self.beta * self.mean_log10_distance()
    }

    pub fn lsfc_db(&self, r: f64) -> f64 {
        self.alpha_db() - self.beta * r.log10()
    }
}

/// Per-user large-scale fading coefficients (linear scale).
pub fn sample_lsfc<R: Rng + ?Sized>(geom: &ScenarioGeometry, k_a: usize, rng: &mut R) -> Vec<f64> {
    (0..k_a)
        .map(|_| {
            let r = if geom.r_max > geom.r_min { rng.gen_range(geom.r_min..geom.r_max) } else { geom.r_min };
            10f64.powf(geom.lsfc_db(r) / 10.0)
        })
        .collect()
}

/// Circularly-symmetric complex Gaussian with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

/// Channel matrix `H` (`M × K_a`), column `k` distributed as `CN(0, γ_k I)`.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub h: ComplexMatrix,
    pub lsfc: Vec<f64>,
}

impl ChannelRealization {
    pub fn new(h: ComplexMatrix, lsfc: Vec<f64>) -> Result<Self> {
        if h.cols() != lsfc.len() {
            return Err(Error::Shape(format!("{} channel columns vs {} LSFCs", h.cols(), lsfc.len())));
        }
        if lsfc.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::Config("large-scale fading coefficients must be positive".into()));
        }
        Ok(ChannelRealization { h, lsfc })
    }

    pub fn antennas(&self) -> usize {
        self.h.rows()
    }
}

pub fn sample_channel<R: Rng + ?Sized>(lsfc: &[f64], m: usize, rng: &mut R) -> Result<ChannelRealization> {
    if m == 0 {
        return Err(Error::Config("need at least one receive antenna".into()));
    }
    let mut h = ComplexMatrix::zeros(m, lsfc.len());
    for (k, &g) in lsfc.iter().enumerate() {
        for r in 0..m {
            h[(r, k)] = complex_gaussian(rng, g);
        }
    }
    ChannelRealization::new(h, lsfc.to_vec())
}

/// `rows × cols` matrix of i.i.d. `CN(0, sigma2)` entries.
pub fn awgn<R: Rng + ?Sized>(rows: usize, cols: usize, sigma2: f64, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng, sigma2)).collect();
    ComplexMatrix::from_rows(rows, cols, data)
}

/// `X Hᵀ + noise` for a given noise matrix.
pub fn apply_channel_with_noise(
    x: &ComplexMatrix,
    channel: &ChannelRealization,
    noise: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if x.cols() != channel.h.cols() {
        return Err(Error::Shape(format!("X has {} users, H has {}", x.cols(), channel.h.cols())));
    }
    if noise.shape() != (x.rows(), channel.antennas()) {
        return Err(Error::Shape("noise shape".into()));
    }
    Ok(x.matmul(&channel.h.transpose()).add(noise))
}

/// `Y = X Hᵀ + Z` with `Z` i.i.d. `CN(0, sigma2)`.
pub fn apply_channel<R: Rng + ?Sized>(
    x: &ComplexMatrix,
    channel: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if x.cols() != channel.h.cols() {
        return Err(Error::Shape(format!("X has {} users, H has {}", x.cols(), channel.h.cols())));
    }
    let noise = awgn(x.rows(), channel.antennas(), sigma2, rng);
    apply_channel_with_noise(x, channel, &noise)
}

/// Noise variance for a target `E_b/N_0 = n / (B σ²)`.
pub fn sigma2_from_ebn0(ebn0_db: f64, n: usize, b: usize) -> f64 {
    n as f64 / (b as f64 * 10f64.powf(ebn0_db / 10.0))
}
