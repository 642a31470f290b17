//! Conservation quantities, moments, peaks and leakage for the two models.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::walk::{QuantumState, RwState};

/// Relative height (against the maximum) a local maximum needs to count as a peak.
pub const PEAK_THRESHOLD: f64 = 0.1;

/// Per-site nonnegative mass; site `s` (1-based) is at index `s - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sitewise sum of several distributions of equal length.
    pub fn sum_of<'a>(parts: impl IntoIterator<Item = &'a Distribution>) -> Distribution {
        let mut out: Vec<f64> = Vec::new();
        for p in parts {
            if out.is_empty() {
                out = vec![0.0; p.len()];
            }
            for (o, v) in out.iter_mut().zip(&p.0) {
                *o += v;
            }
        }
        Distribution(out)
    }

    /// `(site, value)` pairs on the sites of the parity class that holds
    /// more mass. Discrete walks populate alternating sites, so this removes
    /// the zero valleys between occupied sites.
    pub fn parity_majority(&self) -> Vec<(usize, f64)> {
        let mass = |offset: usize| self.0.iter().skip(offset).step_by(2).sum::<f64>();
        let offset = if mass(1) > mass(0) { 1 } else { 0 };
        self.0
            .iter()
            .enumerate()
            .skip(offset)
            .step_by(2)
            .map(|(i, v)| (i + 1, *v))
            .collect()
    }
}

/// Sum over both coin distributions.
pub fn energy(dist0: &Distribution, dist1: &Distribution) -> f64 {
    dist0.total() + dist1.total()
}

/// Unscaled sum of every chain entry.
pub fn population(state: &RwState) -> Complex64 {
    state.population()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moments {
    /// Mass-weighted mean site (1-based).
    pub mean: f64,
    pub variance: f64,
    /// 1-based sites of local maxima above the relative threshold.
    pub peaks: Vec<usize>,
}

impl Moments {
    pub fn stddev(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub fn moments(dist: &Distribution) -> Result<Moments> {
    moments_with_threshold(dist, PEAK_THRESHOLD)
}

pub fn moments_with_threshold(dist: &Distribution, threshold: f64) -> Result<Moments> {
    let total = dist.total();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::UndefinedMoments);
    }
    let site = |i: usize| (i + 1) as f64;
    let mean = dist.0.iter().enumerate().map(|(i, p)| site(i) * p).sum::<f64>() / total;
    let variance = dist
        .0
        .iter()
        .enumerate()
        .map(|(i, p)| (site(i) - mean).powi(2) * p)
        .sum::<f64>()
        / total;
    Ok(Moments {
        mean,
        variance,
        peaks: peaks(dist, threshold),
    })
}

/// Local maxima of the parity-majority subsequence whose height is at least
/// `threshold` times the largest value. A plateau reports its first site.
pub fn peaks(dist: &Distribution, threshold: f64) -> Vec<usize> {
    let seq = dist.parity_majority();
    let max = seq.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        // extent of the plateau starting at i
        let mut j = i;
        while j + 1 < seq.len() && seq[j + 1].1 == seq[i].1 {
            j += 1;
        }
        let left_lower = i == 0 || seq[i - 1].1 < seq[i].1;
        let right_lower = j + 1 == seq.len() || seq[j + 1].1 < seq[i].1;
        if left_lower && right_lower && seq[i].1 >= threshold * max {
            out.push(seq[i].0);
        }
        i = j + 1;
    }
    out
}

/// Site of the single mode of the parity-majority subsequence, or `None`
/// when that subsequence rises and falls more than once.
pub fn unimodal_mode(dist: &Distribution) -> Option<usize> {
    let seq = dist.parity_majority();
    let values: Vec<f64> = seq.iter().map(|(_, v)| *v).collect();
    let argmax = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    let rising = values[..=argmax].windows(2).all(|w| w[0] <= w[1]);
    let falling = values[argmax..].windows(2).all(|w| w[0] >= w[1]);
    (rising && falling && !values.is_empty()).then(|| seq[argmax].0)
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Conserved total of a state: squared norm for the quantum walk, real part
/// of the unscaled population for the chain.
pub trait Mass {
    fn mass(&self) -> f64;
}

impl Mass for QuantumState {
    fn mass(&self) -> f64 {
        self.norm_sqr()
    }
}

impl Mass for RwState {
    fn mass(&self) -> f64 {
        self.population().re
    }
}

impl Mass for f64 {
    fn mass(&self) -> f64 {
        *self
    }
}

/// Mass lost between the first and last entries of a run history,
/// accumulated step by step.
pub fn leakage<S: Mass>(history: &[S]) -> f64 {
    history.windows(2).map(|w| w[0].mass() - w[1].mass()).sum()
}

/// Summary of a combined quantum / chain run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub energy: f64,
    pub population_re: f64,
    pub population_im: f64,
    /// Squared quantum norm that left the lattice over the run.
    pub leak: f64,
    /// Unscaled chain population (real part) that left the lattice.
    pub leak_population: f64,
    pub moments: BTreeMap<String, Option<Moments>>,
    pub residuals: BTreeMap<String, f64>,
    pub config_echo: BTreeMap<String, String>,
}
