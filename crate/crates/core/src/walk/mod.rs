//! Quantum and chain states on a finite line of `d` sites, stepped with
//! matrix-free structured operators.
//!
//! Layout is site-major: the quantum amplitude for site `s` (1-based) and
//! coin `r` lives at 0-based index `2(s-1) + (r-1)`, and the chain
//! population for row `r` at `4(s-1) + (r-1)`. Chain rows are ordered
//! `|0>`, `|1>`, `-|1>`, `-|0>`.
//!
//! One step applies the coin (or the transition matrix) at every site and
//! then shifts. Under column-vector action the shift moves coin `|0>` (chain
//! rows 1 and 4) one site toward lower indices and coin `|1>` (rows 2 and 3)
//! one site toward higher indices. Content pushed past either edge is
//! dropped, and the stepping functions report how much was lost.

pub mod dense;

use num_complex::Complex64;

use crate::coin::{HADAMARD, TRANSITION_A};
use crate::error::{Error, Result};

pub use dense::{build_dense, DenseMatrix, DenseOperator, OperatorRole, MAX_DENSE_SITES};

/// Lattice size, start site (1-based) and step count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LatticeConfig {
    d: usize,
    start: usize,
    n: usize,
}

impl LatticeConfig {
    pub const MIN_SITES: usize = 4;

    pub fn new(d: usize, start: usize, n: usize) -> Result<Self> {
        if d < Self::MIN_SITES {
            return Err(Error::config(format!(
                "lattice needs at least {} sites, got d={d}",
                Self::MIN_SITES
            )));
        }
        if start < 1 || start > d {
            return Err(Error::config(format!("start site {start} outside [1, {d}]")));
        }
        Ok(Self { d, start, n })
    }

    /// `d` sites, start at the center site `floor(d/2)`.
    pub fn centered(d: usize, n: usize) -> Result<Self> {
        Self::new(d, d / 2, n)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_steps(self, n: usize) -> Self {
        Self { n, ..self }
    }

    /// True when `n` steps from `start` can never touch either edge.
    pub fn interior_safe(&self) -> bool {
        self.n < (self.start - 1).min(self.d - self.start)
    }
}

/// Coined walker amplitudes, `2d` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amp: Vec<Complex64>,
}

impl QuantumState {
    pub fn zeros(d: usize) -> Self {
        Self {
            amp: vec![Complex64::new(0.0, 0.0); 2 * d],
        }
    }

    /// Coin pair placed at 1-based `site`.
    ///
    /// # Panics
    /// If `site` is not in `[1, d]`.
    pub fn point(d: usize, site: usize, coin: [Complex64; 2]) -> Self {
        assert!((1..=d).contains(&site), "site {site} outside [1, {d}]");
        let mut state = Self::zeros(d);
        state.amp[2 * (site - 1)] = coin[0];
        state.amp[2 * (site - 1) + 1] = coin[1];
        state
    }

    pub fn from_amplitudes(amp: Vec<Complex64>) -> Result<Self> {
        if amp.is_empty() || !amp.len().is_multiple_of(2) {
            return Err(Error::config(format!(
                "quantum amplitude vector length {} is not a positive multiple of 2",
                amp.len()
            )));
        }
        Ok(Self { amp })
    }

    pub fn d(&self) -> usize {
        self.amp.len() / 2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    /// Coin pair at 1-based `site`.
    pub fn coin(&self, site: usize) -> [Complex64; 2] {
        let i = 2 * (site - 1);
        [self.amp[i], self.amp[i + 1]]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// One coin-then-shift step in place. Returns the squared norm that left
    /// the lattice.
    pub fn advance(&mut self) -> f64 {
        let d = self.d();
        let h = HADAMARD.0;
        for pair in self.amp.chunks_exact_mut(2) {
            let (a, b) = (pair[0], pair[1]);
            pair[0] = a * h[0][0] + b * h[0][1];
            pair[1] = a * h[1][0] + b * h[1][1];
        }

        let zero = Complex64::new(0.0, 0.0);
        let lost_down = self.amp[0];
        for s in 0..d - 1 {
            self.amp[2 * s] = self.amp[2 * (s + 1)];
        }
        self.amp[2 * (d - 1)] = zero;

        let lost_up = self.amp[2 * (d - 1) + 1];
        for s in (1..d).rev() {
            self.amp[2 * s + 1] = self.amp[2 * (s - 1) + 1];
        }
        self.amp[1] = zero;

        lost_down.norm_sqr() + lost_up.norm_sqr()
    }
}

/// Four-row chain populations, `4d` entries, plus a power-of-two scale.
///
/// The physical vector compared against the quantum walk is
/// `2^(scale_exp / 2) * pop`. Stored entries are never rescaled.
#[derive(Clone, Debug, PartialEq)]
pub struct RwState {
    pop: Vec<Complex64>,
    scale_exp: u32,
}

impl RwState {
    pub fn zeros(d: usize) -> Self {
        Self {
            pop: vec![Complex64::new(0.0, 0.0); 4 * d],
            scale_exp: 0,
        }
    }

    /// Row values placed at 1-based `site`.
    ///
    /// # Panics
    /// If `site` is not in `[1, d]`.
    pub fn point(d: usize, site: usize, rows: [Complex64; 4]) -> Self {
        assert!((1..=d).contains(&site), "site {site} outside [1, {d}]");
        let mut state = Self::zeros(d);
        state.pop[4 * (site - 1)..4 * site].copy_from_slice(&rows);
        state
    }

    pub fn from_populations(pop: Vec<Complex64>, scale_exp: u32) -> Result<Self> {
        if pop.is_empty() || !pop.len().is_multiple_of(4) {
            return Err(Error::config(format!(
                "chain population vector length {} is not a positive multiple of 4",
                pop.len()
            )));
        }
        Ok(Self { pop, scale_exp })
    }

    /// Inverse of [`RwState::devectorize`]: `rows[r][s]` is row `r+1` at site `s+1`.
    pub fn vectorize(rows: &[Vec<Complex64>; 4]) -> Result<Self> {
        let d = rows[0].len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::config("chain rows must be non-empty and equally long"));
        }
        let mut state = Self::zeros(d);
        for (r, row) in rows.iter().enumerate() {
            for (s, &v) in row.iter().enumerate() {
                state.pop[4 * s + r] = v;
            }
        }
        Ok(state)
    }

    pub fn d(&self) -> usize {
        self.pop.len() / 4
    }

    pub fn populations(&self) -> &[Complex64] {
        &self.pop
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    /// Row values at 1-based `site`.
    pub fn rows_at(&self, site: usize) -> [Complex64; 4] {
        let i = 4 * (site - 1);
        [self.pop[i], self.pop[i + 1], self.pop[i + 2], self.pop[i + 3]]
    }

    /// Row `r` (1-based) across all sites: entries `r, r+4, r+8, ...`.
    pub fn row(&self, r: usize) -> Vec<Complex64> {
        assert!((1..=4).contains(&r), "chain row {r} outside [1, 4]");
        self.pop.iter().skip(r - 1).step_by(4).copied().collect()
    }

    /// The 4 x d population array, `out[r][s]` = row `r+1` at site `s+1`.
    pub fn devectorize(&self) -> [Vec<Complex64>; 4] {
        [self.row(1), self.row(2), self.row(3), self.row(4)]
    }

    /// Unscaled sum of every entry.
    pub fn population(&self) -> Complex64 {
        self.pop.iter().sum()
    }

    /// One transition-then-shift step in place. Returns the unscaled
    /// population that left the lattice. With `scaled`, the scale exponent
    /// grows by one.
    pub fn advance(&mut self, scaled: bool) -> Complex64 {
        let d = self.d();
        let a = TRANSITION_A.0;
        for block in self.pop.chunks_exact_mut(4) {
            let v = [block[0], block[1], block[2], block[3]];
            for (out, row) in block.iter_mut().zip(a.iter()) {
                *out = v[0] * row[0] + v[1] * row[1] + v[2] * row[2] + v[3] * row[3];
            }
        }

        let zero = Complex64::new(0.0, 0.0);
        let mut lost = zero;
        // rows |0> and -|0> move toward site 1
        for r in [0, 3] {
            lost += self.pop[r];
            for s in 0..d - 1 {
                self.pop[4 * s + r] = self.pop[4 * (s + 1) + r];
            }
            self.pop[4 * (d - 1) + r] = zero;
        }
        // rows |1> and -|1> move toward site d
        for r in [1, 2] {
            lost += self.pop[4 * (d - 1) + r];
            for s in (1..d).rev() {
                self.pop[4 * s + r] = self.pop[4 * (s - 1) + r];
            }
            self.pop[r] = zero;
        }

        if scaled {
            self.scale_exp += 1;
        }
        lost
    }
}

pub fn init_quantum(cfg: &LatticeConfig, coin: [Complex64; 2]) -> QuantumState {
    QuantumState::point(cfg.d, cfg.start, coin)
}

pub fn init_rw(cfg: &LatticeConfig, rows: [Complex64; 4]) -> RwState {
    RwState::point(cfg.d, cfg.start, rows)
}

pub fn step_quantum(state: &QuantumState) -> QuantumState {
    let mut next = state.clone();
    next.advance();
    next
}

pub fn step_rw(state: &RwState, scaled: bool) -> RwState {
    let mut next = state.clone();
    next.advance(scaled);
    next
}

/// Apply `stepper` `steps` times; zero steps returns the input.
pub fn evolve<S, F>(state: S, steps: usize, mut stepper: F) -> S
where
    F: FnMut(&S) -> S,
{
    (0..steps).fold(state, |s, _| stepper(&s))
}

pub fn devectorize(state: &RwState) -> [Vec<Complex64>; 4] {
    state.devectorize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn config_validation() {
        assert!(LatticeConfig::new(3, 2, 0).is_err());
        assert!(LatticeConfig::new(4, 0, 0).is_err());
        assert!(LatticeConfig::new(4, 5, 0).is_err());
        let cfg = LatticeConfig::new(80, 40, 20).unwrap();
        assert!(cfg.interior_safe());
        assert_eq!(LatticeConfig::centered(80, 20).unwrap(), cfg);
        assert!(!LatticeConfig::new(80, 40, 39).unwrap().interior_safe());
        assert!(LatticeConfig::new(80, 40, 38).unwrap().interior_safe());
    }

    #[test]
    fn quantum_point_placement() {
        let s = QuantumState::point(3, 2, [ONE, ZERO]);
        let nonzero: Vec<_> = s.amplitudes().iter().enumerate().filter(|(_, z)| **z != ZERO).collect();
        // 1-based index 3
        assert_eq!(nonzero, vec![(2, &ONE)]);

        let cfg = LatticeConfig::new(4, 1, 0).unwrap();
        assert_eq!(init_quantum(&cfg, [ZERO, ZERO]).norm_sqr(), 0.0);
    }

    #[test]
    fn rw_point_placement() {
        let cfg = LatticeConfig::new(5, 3, 0).unwrap();
        let s = init_rw(&cfg, [ONE, ZERO, ZERO, ZERO]);
        assert_eq!(s.populations()[8], ONE);
        assert_eq!(s.population(), ONE);
        assert_eq!(s.scale_exp(), 0);

        let cfg = LatticeConfig::new(80, 40, 20).unwrap();
        let s = init_rw(&cfg, [c(1.0, 0.5), ZERO, ZERO, c(1.0, -0.5)]);
        assert_eq!(s.population(), c(2.0, 0.0));
    }

    #[test]
    fn quantum_step_from_coin_zero() {
        let s = step_quantum(&QuantumState::point(3, 2, [ONE, ZERO]));
        let r = FRAC_1_SQRT_2;
        assert_eq!(s.coin(1), [c(r, 0.0), ZERO]);
        assert_eq!(s.coin(2), [ZERO, ZERO]);
        assert_eq!(s.coin(3), [ZERO, c(r, 0.0)]);
    }

    #[test]
    fn quantum_step_from_coin_one() {
        let s = step_quantum(&QuantumState::point(3, 2, [ZERO, ONE]));
        let r = FRAC_1_SQRT_2;
        assert_eq!(s.coin(1), [c(r, 0.0), ZERO]);
        assert_eq!(s.coin(3), [ZERO, c(-r, 0.0)]);
    }

    #[test]
    fn rw_step_routes_row_zero() {
        let s = step_rw(&RwState::point(5, 3, [ONE, ZERO, ZERO, ZERO]), false);
        assert_eq!(s.rows_at(2), [c(0.5, 0.0), ZERO, ZERO, ZERO]);
        assert_eq!(s.rows_at(4), [ZERO, c(0.5, 0.0), ZERO, ZERO]);
        assert_eq!(s.population(), ONE);
        assert_eq!(s.scale_exp(), 0);
    }

    #[test]
    fn scaled_step_only_touches_exponent() {
        let s = step_rw(&RwState::zeros(6), true);
        assert_eq!(s.populations(), RwState::zeros(6).populations());
        assert_eq!(s.scale_exp(), 1);
        let s = evolve(s, 3, |x| step_rw(x, true));
        assert_eq!(s.scale_exp(), 4);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let s = QuantumState::point(8, 4, [c(0.3, 0.1), c(-0.2, 0.9)]);
        assert_eq!(evolve(s.clone(), 0, step_quantum), s);
    }

    #[test]
    fn edge_mass_is_dropped_and_reported() {
        // coin |0> at site 1 after the coin: half the norm moves off the lower edge
        let mut s = QuantumState::point(4, 1, [ONE, ZERO]);
        let lost = s.advance();
        assert!((lost - 0.5).abs() < 1e-15);
        assert!((s.norm_sqr() - 0.5).abs() < 1e-15);

        let mut r = RwState::point(4, 4, [ZERO, ONE, ZERO, ZERO]);
        let lost = r.advance(false);
        assert_eq!(lost, c(0.5, 0.0));
        assert_eq!(r.population(), c(0.5, 0.0));
    }

    #[test]
    fn devectorize_strides() {
        let pop: Vec<_> = (0..12).map(|i| c(i as f64 + 1.0, 0.0)).collect();
        let s = RwState::from_populations(pop, 0).unwrap();
        let rows = s.devectorize();
        let re = |v: &Vec<Complex64>| v.iter().map(|z| z.re).collect::<Vec<_>>();
        assert_eq!(re(&rows[0]), vec![1.0, 5.0, 9.0]);
        assert_eq!(re(&rows[1]), vec![2.0, 6.0, 10.0]);
        assert_eq!(re(&rows[2]), vec![3.0, 7.0, 11.0]);
        assert_eq!(re(&rows[3]), vec![4.0, 8.0, 12.0]);
        assert_eq!(RwState::vectorize(&rows).unwrap(), s);
    }

    #[test]
    fn appendix_initial_condition_layout() {
        let cfg = LatticeConfig::new(80, 40, 20).unwrap();
        let s = init_rw(&cfg, [c(1.0, 0.5), ZERO, ZERO, c(1.0, -0.5)]);
        let rows = devectorize(&s);
        for (r, row) in rows.iter().enumerate() {
            for (site, v) in row.iter().enumerate() {
                if site != 39 {
                    assert_eq!(*v, ZERO);
                }
            }
            let expected = [c(1.0, 0.5), ZERO, ZERO, c(1.0, -0.5)][r];
            assert_eq!(row[39], expected);
        }
    }

    #[test]
    fn bad_vector_lengths_are_rejected() {
        assert!(QuantumState::from_amplitudes(vec![ONE; 3]).is_err());
        assert!(RwState::from_populations(vec![ONE; 6], 0).is_err());
        assert!(RwState::from_populations(vec![], 0).is_err());
    }
}
