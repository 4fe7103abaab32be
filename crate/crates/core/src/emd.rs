//! Empirical Mode Decomposition by sifting, and its noise-assisted ensemble
//! variant (EEMD).
//!
//! Envelopes are natural cubic splines through the local extrema, with two
//! extrema mirrored about each end of the signal. A sift stops once the
//! Cauchy-type criterion `Σ(h_prev − h)² / Σ h_prev²` drops below
//! [`EmdConfig::sift_stop_sd`] and the extrema/zero-crossing counts differ by
//! at most one, or after [`EmdConfig::max_sift_iters`] passes.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{write_wav_f32_multichannel, SampleBuffer};

/// Fewer extrema than this means there is nothing left to sift.
const MIN_EXTREMA: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmdConfig {
    pub max_imfs: usize,
    pub sift_stop_sd: f64,
    pub max_sift_iters: usize,
    pub ensemble_size: usize,
    /// Added noise standard deviation as a fraction of the signal's.
    pub wgn_std_ratio: f64,
    pub rng_seed: u64,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            max_imfs: 8,
            sift_stop_sd: 0.2,
            max_sift_iters: 50,
            ensemble_size: 100,
            wgn_std_ratio: 0.2,
            rng_seed: 0,
        }
    }
}

impl EmdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_imfs == 0 || self.max_sift_iters == 0 || self.ensemble_size == 0 {
            return Err(Error::InvalidConfig(
                "max_imfs, max_sift_iters and ensemble_size must be positive".into(),
            ));
        }
        if !(self.sift_stop_sd > 0.0) {
            return Err(Error::InvalidConfig("sift_stop_sd must be positive".into()));
        }
        // Zero is accepted: it reduces EEMD to plain EMD.
        if !(self.wgn_std_ratio >= 0.0) || !self.wgn_std_ratio.is_finite() {
            return Err(Error::InvalidConfig(
                "wgn_std_ratio must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Decomposition modes, fastest first, plus the residual trend.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub sample_rate_hz: u32,
}

impl ImfSet {
    pub fn source_len(&self) -> usize {
        self.residual.len()
    }

    pub fn num_imfs(&self) -> usize {
        self.imfs.len()
    }

    /// Mode `k`, counting from 1.
    pub fn imf(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(1)
            .and_then(|i| self.imfs.get(i))
            .map(Vec::as_slice)
    }

    /// Σ IMFs + residual.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        out
    }

    /// Mean power of each mode.
    pub fn energies(&self) -> Vec<f64> {
        self.imfs
            .iter()
            .map(|m| m.iter().map(|v| v * v).sum::<f64>() / m.len().max(1) as f64)
            .collect()
    }

    /// Writes modes and residual as channels of a 32-bit float WAV.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut channels: Vec<&[f64]> = self.imfs.iter().map(Vec::as_slice).collect();
        channels.push(&self.residual);
        write_wav_f32_multichannel(path, &channels, self.sample_rate_hz)
    }
}

#[derive(Debug, Default)]
struct Extrema {
    max_pos: Vec<usize>,
    max_val: Vec<f64>,
    min_pos: Vec<usize>,
    min_val: Vec<f64>,
}

impl Extrema {
    fn count(&self) -> usize {
        self.max_pos.len() + self.min_pos.len()
    }
}

/// Local maxima and minima, excluding the end points. Flat runs count once,
/// at their middle sample.
fn find_extrema(x: &[f64], out: &mut Extrema) {
    out.max_pos.clear();
    out.max_val.clear();
    out.min_pos.clear();
    out.min_val.clear();
    let n = x.len();
    if n < 3 {
        return;
    }
    let mut i = 1;
    while i < n - 1 {
        let prev = x[i - 1];
        let cur = x[i];
        if cur == prev {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == cur {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let next = x[j + 1];
        let mid = (i + j) / 2;
        if cur > prev && cur > next {
            out.max_pos.push(mid);
            out.max_val.push(cur);
        } else if cur < prev && cur < next {
            out.min_pos.push(mid);
            out.min_val.push(cur);
        }
        i = j + 1;
    }
}

pub fn count_extrema(x: &[f64]) -> usize {
    let mut e = Extrema::default();
    find_extrema(x, &mut e);
    e.count()
}

pub fn count_zero_crossings(x: &[f64]) -> usize {
    x.windows(2)
        .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
        .count()
}

/// Reusable buffers for spline envelopes.
#[derive(Default)]
struct SplineScratch {
    knots_x: Vec<f64>,
    knots_y: Vec<f64>,
    second: Vec<f64>,
    c_prime: Vec<f64>,
    d_prime: Vec<f64>,
}

impl SplineScratch {
    /// Fills knots from extrema plus two mirrored points at each end.
    fn set_knots(&mut self, pos: &[usize], val: &[f64], len: usize) {
        self.knots_x.clear();
        self.knots_y.clear();
        let last = (len - 1) as f64;
        let m = pos.len().min(2);
        for i in (0..m).rev() {
            self.knots_x.push(-(pos[i] as f64));
            self.knots_y.push(val[i]);
        }
        for (&p, &v) in pos.iter().zip(val) {
            self.knots_x.push(p as f64);
            self.knots_y.push(v);
        }
        let k = pos.len();
        for i in 0..m {
            self.knots_x.push(2.0 * last - pos[k - 1 - i] as f64);
            self.knots_y.push(val[k - 1 - i]);
        }
    }

    /// Natural cubic spline through the knots, evaluated at `0..len`.
    fn evaluate(&mut self, len: usize, out: &mut [f64]) {
        let x = &self.knots_x;
        let y = &self.knots_y;
        let n = x.len();
        self.second.clear();
        self.second.resize(n, 0.0);
        if n >= 3 {
            // Thomas algorithm for the interior second derivatives.
            let m = n - 2;
            self.c_prime.clear();
            self.c_prime.resize(m, 0.0);
            self.d_prime.clear();
            self.d_prime.resize(m, 0.0);
            for i in 0..m {
                let k = i + 1;
                let h0 = x[k] - x[k - 1];
                let h1 = x[k + 1] - x[k];
                let a = h0;
                let b = 2.0 * (h0 + h1);
                let c = h1;
                let d = 6.0 * ((y[k + 1] - y[k]) / h1 - (y[k] - y[k - 1]) / h0);
                if i == 0 {
                    self.c_prime[i] = c / b;
                    self.d_prime[i] = d / b;
                } else {
                    let denom = b - a * self.c_prime[i - 1];
                    self.c_prime[i] = c / denom;
                    self.d_prime[i] = (d - a * self.d_prime[i - 1]) / denom;
                }
            }
            for i in (0..m).rev() {
                let next = if i + 1 < m { self.second[i + 2] } else { 0.0 };
                self.second[i + 1] = self.d_prime[i] - self.c_prime[i] * next;
            }
        }
        let s = &self.second;
        let mut seg = 0;
        for (t, o) in out.iter_mut().enumerate().take(len) {
            let tf = t as f64;
            while seg + 2 < n && tf > x[seg + 1] {
                seg += 1;
            }
            let h = x[seg + 1] - x[seg];
            let a = (x[seg + 1] - tf) / h;
            let b = (tf - x[seg]) / h;
            *o = a * y[seg]
                + b * y[seg + 1]
                + ((a * a * a - a) * s[seg] + (b * b * b - b) * s[seg + 1]) * h * h / 6.0;
        }
    }
}

struct Sifter {
    extrema: Extrema,
    spline: SplineScratch,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl Sifter {
    fn new() -> Self {
        Self {
            extrema: Extrema::default(),
            spline: SplineScratch::default(),
            upper: Vec::new(),
            lower: Vec::new(),
        }
    }

    /// Extracts one IMF from `r`.
    fn sift(&mut self, r: &[f64], cfg: &EmdConfig) -> Vec<f64> {
        let n = r.len();
        let mut h = r.to_vec();
        self.upper.resize(n, 0.0);
        self.lower.resize(n, 0.0);
        let mut last_sd = f64::INFINITY;
        for _ in 0..cfg.max_sift_iters {
            find_extrema(&h, &mut self.extrema);
            let ext = self.extrema.count();
            if last_sd < cfg.sift_stop_sd {
                let zc = count_zero_crossings(&h);
                if ext.abs_diff(zc) <= 1 {
                    break;
                }
            }
            if self.extrema.max_pos.is_empty() || self.extrema.min_pos.is_empty() {
                break;
            }
            self.spline
                .set_knots(&self.extrema.max_pos, &self.extrema.max_val, n);
            self.spline.evaluate(n, &mut self.upper);
            self.spline
                .set_knots(&self.extrema.min_pos, &self.extrema.min_val, n);
            self.spline.evaluate(n, &mut self.lower);
            let mut num = 0.0;
            let mut den = 0.0;
            for ((hv, u), l) in h.iter_mut().zip(&self.upper).zip(&self.lower) {
                let mean = 0.5 * (u + l);
                num += mean * mean;
                den += *hv * *hv;
                *hv -= mean;
            }
            last_sd = if den > 0.0 { num / den } else { 0.0 };
        }
        h
    }
}

fn decompose_raw(x: &[f64], cfg: &EmdConfig) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut sifter = Sifter::new();
    let mut residual = x.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < cfg.max_imfs {
        if count_extrema(&residual) < MIN_EXTREMA {
            break;
        }
        let imf = sifter.sift(&residual, cfg);
        for (r, v) in residual.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(imf);
    }
    (imfs, residual)
}

/// Plain EMD. Inputs with fewer than four extrema come back as zero modes
/// with the input as residual.
pub fn emd_decompose(x: &SampleBuffer, cfg: &EmdConfig) -> Result<ImfSet> {
    cfg.validate()?;
    let (imfs, residual) = decompose_raw(x.samples(), cfg);
    Ok(ImfSet {
        imfs,
        residual,
        sample_rate_hz: x.sample_rate_hz(),
    })
}

fn trial_seed(base: u64, trial: usize) -> u64 {
    base ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One ensemble member: EMD of `x` plus its own white-noise realization.
pub fn eemd_trial(x: &SampleBuffer, cfg: &EmdConfig, trial: usize) -> Result<ImfSet> {
    cfg.validate()?;
    let sigma = cfg.wgn_std_ratio * x.std_dev();
    let noisy: Vec<f64> = if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.rng_seed, trial));
        x.samples()
            .iter()
            .map(|v| {
                let z: f64 = StandardNormal.sample(&mut rng);
                v + sigma * z
            })
            .collect()
    } else {
        x.samples().to_vec()
    };
    let (imfs, residual) = decompose_raw(&noisy, cfg);
    Ok(ImfSet {
        imfs,
        residual,
        sample_rate_hz: x.sample_rate_hz(),
    })
}

/// Ensemble EMD: the average of `ensemble_size` noise-perturbed EMDs.
///
/// Trials missing a high-index mode contribute zeros to it. Trials run in
/// parallel but are accumulated in trial order, so the result does not
/// depend on scheduling.
pub fn eemd_decompose(x: &SampleBuffer, cfg: &EmdConfig) -> Result<ImfSet> {
    cfg.validate()?;
    let n = x.len();
    let chunk = (rayon::current_num_threads() * 2).max(4);
    let mut imf_sums: Vec<Vec<f64>> = Vec::new();
    let mut residual_sum = vec![0.0; n];
    let mut start = 0;
    while start < cfg.ensemble_size {
        let end = (start + chunk).min(cfg.ensemble_size);
        let trials: Vec<ImfSet> = (start..end)
            .into_par_iter()
            .map(|t| eemd_trial(x, cfg, t))
            .collect::<Result<_>>()?;
        for trial in &trials {
            if imf_sums.len() < trial.imfs.len() {
                imf_sums.resize(trial.imfs.len(), vec![0.0; n]);
            }
            for (acc, imf) in imf_sums.iter_mut().zip(&trial.imfs) {
                for (a, v) in acc.iter_mut().zip(imf) {
                    *a += v;
                }
            }
            for (a, v) in residual_sum.iter_mut().zip(&trial.residual) {
                *a += v;
            }
        }
        start = end;
    }
    let inv = 1.0 / cfg.ensemble_size as f64;
    for acc in imf_sums.iter_mut() {
        acc.iter_mut().for_each(|v| *v *= inv);
    }
    residual_sum.iter_mut().for_each(|v| *v *= inv);
    Ok(ImfSet {
        imfs: imf_sums,
        residual: residual_sum,
        sample_rate_hz: x.sample_rate_hz(),
    })
}
