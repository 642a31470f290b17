//! Projection between the four-row chain and the coined walk, probability
//! extraction from chain populations, and residual checks for the
//! intertwining identities
//!
//! ```text
//! u (I_d (x) B)   = sqrt(2)   (I_d (x) B) U
//! u^n (I_d (x) B) = sqrt(2)^n (I_d (x) B) U^n
//! ```
//!
//! Dense residuals build the operators explicitly; probe residuals apply
//! both sides matrix-free to seeded random chain vectors.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::Distribution;
use crate::coin::{CoinAlgebra, Matrix2x4};
use crate::error::{Error, Result};
use crate::walk::dense::{check_capacity, DenseMatrix};
use crate::walk::{DenseOperator, OperatorRole, QuantumState, RwState};

/// Largest lattice for which residuals are computed from dense matrices.
pub const DENSE_RESIDUAL_MAX_SITES: usize = 64;

/// `(I_d (x) B)` applied to a chain state. Carries the chain's scale exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedVector {
    amp: Vec<Complex64>,
    scale_exp: u32,
}

impl LiftedVector {
    /// Unscaled projected entries, `2d` long.
    pub fn entries(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn scale_exp(&self) -> u32 {
        self.scale_exp
    }

    /// The quantum state this vector represents, `2^(k/2)` times the entries.
    pub fn to_quantum(&self) -> QuantumState {
        let k = sqrt2_pow(self.scale_exp);
        let amp = self.amp.iter().map(|z| z * k).collect();
        QuantumState::from_amplitudes(amp).expect("lifted vector has even length")
    }
}

/// `sqrt(2)^k`, exact for even `k`.
pub fn sqrt2_pow(k: u32) -> f64 {
    let even = 2f64.powi((k / 2) as i32);
    if k % 2 == 1 {
        even * SQRT_2
    } else {
        even
    }
}

fn apply_b(b: &Matrix2x4, rows: &[Complex64]) -> [Complex64; 2] {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (o, brow) in out.iter_mut().zip(b.0.iter()) {
        *o = rows.iter().zip(brow).map(|(p, w)| p * w).sum();
    }
    out
}

/// Per-site `B` applied to the chain rows.
pub fn lift(state: &RwState) -> LiftedVector {
    lift_with(&CoinAlgebra::standard(), state)
}

pub fn lift_with(alg: &CoinAlgebra, state: &RwState) -> LiftedVector {
    let amp = state
        .populations()
        .chunks_exact(4)
        .flat_map(|rows| apply_b(&alg.b, rows))
        .collect();
    LiftedVector {
        amp,
        scale_exp: state.scale_exp(),
    }
}

/// Per-site `B^T / 2` applied to the coin pair: `(a, b)` becomes rows
/// `(a/2, b/2, -b/2, -a/2)`. Right inverse of [`lift`].
pub fn canonical_embed(state: &QuantumState) -> RwState {
    let pop = state
        .amplitudes()
        .chunks_exact(2)
        .flat_map(|c| {
            let (a, b) = (c[0] * 0.5, c[1] * 0.5);
            [a, b, -b, -a]
        })
        .collect();
    RwState::from_populations(pop, 0).expect("embedding has length 4d")
}

/// Per-site coin probabilities `|amp|^2` of a quantum state.
pub fn quantum_distribution(state: &QuantumState) -> (Distribution, Distribution) {
    let amp = state.amplitudes();
    let p0 = amp.iter().step_by(2).map(|z| z.norm_sqr()).collect();
    let p1 = amp.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).collect();
    (Distribution::new(p0), Distribution::new(p1))
}

/// Scale factor to apply to `|difference|` before squaring.
fn extraction_scale(scale_exp: u32, n: usize) -> Result<f64> {
    let n32 = u32::try_from(n).map_err(|_| Error::Usage(format!("step count {n} too large")))?;
    if scale_exp == 0 || scale_exp == n32 {
        Ok(sqrt2_pow(n32))
    } else {
        Err(Error::Usage(format!(
            "state carries scale exponent {scale_exp} but {n} steps were claimed"
        )))
    }
}

/// Coin probabilities recovered from chain populations after `n` steps:
/// `2^n |P_0 - P_-0|^2` and `2^n |P_1 - P_-1|^2` per site.
///
/// The state may come from unscaled stepping (exponent 0) or scaled
/// stepping (exponent `n`); any other exponent is a usage error.
pub fn quantum_distribution_from_rw(state: &RwState, n: usize) -> Result<(Distribution, Distribution)> {
    let k = extraction_scale(state.scale_exp(), n)?;
    let mut p0 = Vec::with_capacity(state.d());
    let mut p1 = Vec::with_capacity(state.d());
    for rows in state.populations().chunks_exact(4) {
        p0.push(((rows[0] - rows[3]).norm() * k).powi(2));
        p1.push(((rows[1] - rows[2]).norm() * k).powi(2));
    }
    Ok((Distribution::new(p0), Distribution::new(p1)))
}

/// The same probabilities read off a lifted vector: odd entries give coin
/// `|0>`, even entries coin `|1>` (1-based).
pub fn distribution_from_lift(lifted: &LiftedVector, n: usize) -> Result<(Distribution, Distribution)> {
    let k = extraction_scale(lifted.scale_exp, n)?;
    let sq = |z: &Complex64| (z.norm() * k).powi(2);
    let p0 = lifted.amp.iter().step_by(2).map(sq).collect();
    let p1 = lifted.amp.iter().skip(1).step_by(2).map(sq).collect();
    Ok((Distribution::new(p0), Distribution::new(p1)))
}

fn dense_projection(alg: &CoinAlgebra, d: usize) -> Result<DenseMatrix> {
    check_capacity(d)?;
    Ok(DenseMatrix::identity(d).kron(&DenseMatrix::from_real(&alg.b)))
}

fn dense_steps(d: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let u = DenseOperator::build(d, OperatorRole::QuantumStep)?.into_matrix();
    let big_u = DenseOperator::build(d, OperatorRole::ChainStep)?.into_matrix();
    Ok((u, big_u))
}

/// Max-abs entry of `u (I (x) B) - sqrt(2) (I (x) B) U`, dense.
pub fn intertwining_residual(d: usize) -> Result<f64> {
    intertwining_residual_with(&CoinAlgebra::standard(), d)
}

pub fn intertwining_residual_with(alg: &CoinAlgebra, d: usize) -> Result<f64> {
    power_residual_dense_with(alg, d, 1)
}

/// Max-abs entry of `u^n (I (x) B) - sqrt(2)^n (I (x) B) U^n`, dense.
pub fn power_residual_dense(d: usize, n: usize) -> Result<f64> {
    power_residual_dense_with(&CoinAlgebra::standard(), d, n)
}

pub fn power_residual_dense_with(alg: &CoinAlgebra, d: usize, n: usize) -> Result<f64> {
    let (u, big_u) = dense_steps(d)?;
    let lift = dense_projection(alg, d)?;
    let lhs = u.pow(n).matmul(&lift);
    let rhs = lift.matmul(&big_u.pow(n)).scale(sqrt2_pow(n as u32));
    Ok(lhs.max_abs_diff(&rhs))
}

/// Seeded random chain vector with entries uniform in the unit square.
pub fn random_rw_state(d: usize, rng: &mut impl Rng) -> RwState {
    let pop = (0..4 * d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    RwState::from_populations(pop, 0).expect("length 4d")
}

/// Seeded random quantum state with entries uniform in the unit square.
pub fn random_quantum_state(d: usize, rng: &mut impl Rng) -> QuantumState {
    let amp = (0..2 * d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    QuantumState::from_amplitudes(amp).expect("length 2d")
}

/// Matrix-free `n`-step residual over `probes` random chain vectors:
/// evolve the lift with the quantum step, and compare against the lift of
/// the chain evolved with scaled steps.
pub fn power_residual_probes(d: usize, n: usize, probes: usize, seed: u64) -> f64 {
    power_residual_probes_with(&CoinAlgebra::standard(), d, n, probes, seed)
}

pub fn power_residual_probes_with(alg: &CoinAlgebra, d: usize, n: usize, probes: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes {
        let chain = random_rw_state(d, &mut rng);
        let mut quantum = lift_with(alg, &chain).to_quantum();
        let mut evolved = chain;
        for _ in 0..n {
            quantum.advance();
            evolved.advance(true);
        }
        let rhs = lift_with(alg, &evolved).to_quantum();
        let diff = quantum
            .amplitudes()
            .iter()
            .zip(rhs.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    worst
}

/// `n`-step residual, dense up to [`DENSE_RESIDUAL_MAX_SITES`] and matrix-free
/// with random probes beyond.
pub fn power_residual(d: usize, n: usize, seed: u64) -> Result<f64> {
    if d <= DENSE_RESIDUAL_MAX_SITES {
        power_residual_dense(d, n)
    } else {
        Ok(power_residual_probes(d, n, 16, seed))
    }
}

/// Max-abs entry of `U (I (x) B^T)(I (x) B) - (I (x) B^T)(I (x) B) U`, dense.
pub fn u_commutation_residual(d: usize) -> Result<f64> {
    u_commutation_residual_with(&CoinAlgebra::standard(), d)
}

pub fn u_commutation_residual_with(alg: &CoinAlgebra, d: usize) -> Result<f64> {
    let (_, big_u) = dense_steps(d)?;
    let lift = dense_projection(alg, d)?;
    let gram = lift.transpose().matmul(&lift);
    Ok(big_u.matmul(&gram).max_abs_diff(&gram.matmul(&big_u)))
}

/// Max-abs entry of `(I (x) B)(I (x) B^T) - 2 I`, dense.
pub fn lift_gram_residual(d: usize) -> Result<f64> {
    let lift = dense_projection(&CoinAlgebra::standard(), d)?;
    let gram = lift.matmul(&lift.transpose());
    Ok(gram.max_abs_diff(&DenseMatrix::identity(2 * d).scale(2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{evolve, step_quantum, step_rw};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn lift_of_appendix_init_is_i_zero() {
        let s = RwState::point(80, 40, [c(1.0, 0.5), ZERO, ZERO, c(1.0, -0.5)]);
        let l = lift(&s);
        assert_eq!(l.entries().len(), 160);
        assert_eq!(l.entries()[78], c(0.0, 1.0));
        assert_eq!(l.entries()[79], ZERO);
        assert_eq!(l.entries().iter().filter(|z| **z != ZERO).count(), 1);
        assert!(lift(&RwState::zeros(5)).entries().iter().all(|z| *z == ZERO));
    }

    #[test]
    fn embed_rows_and_zero() {
        let e = canonical_embed(&QuantumState::point(4, 2, [c(1.0, 0.0), ZERO]));
        assert_eq!(e.rows_at(2), [c(0.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert_eq!(e.scale_exp(), 0);
        assert_eq!(canonical_embed(&QuantumState::zeros(6)), RwState::zeros(6));
    }

    #[test]
    fn lift_is_left_inverse_of_embed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let q = random_quantum_state(9, &mut rng);
            let back = lift(&canonical_embed(&q)).to_quantum();
            assert_eq!(back, q);
        }
    }

    #[test]
    fn zero_step_extraction() {
        let s = RwState::point(6, 3, [c(1.0, 0.0), ZERO, ZERO, ZERO]);
        let (p0, p1) = quantum_distribution_from_rw(&s, 0).unwrap();
        assert_eq!(p0.values()[2], 1.0);
        assert_eq!(p0.total(), 1.0);
        assert_eq!(p1.total(), 0.0);
    }

    #[test]
    fn scaled_and_unscaled_extraction_agree() {
        let s0 = RwState::point(40, 20, [c(1.0, 0.5), ZERO, ZERO, c(1.0, -0.5)]);
        let plain = evolve(s0.clone(), 9, |s| step_rw(s, false));
        let scaled = evolve(s0, 9, |s| step_rw(s, true));
        let a = quantum_distribution_from_rw(&plain, 9).unwrap();
        let b = quantum_distribution_from_rw(&scaled, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_exponent_is_rejected() {
        let s = evolve(RwState::zeros(8), 3, |s| step_rw(s, true));
        let err = quantum_distribution_from_rw(&s, 5).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        assert!(quantum_distribution_from_rw(&s, 3).is_ok());
    }

    #[test]
    fn both_extraction_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = evolve(random_rw_state(12, &mut rng), 4, |s| step_rw(s, false));
        let a = quantum_distribution_from_rw(&s, 4).unwrap();
        let b = distribution_from_lift(&lift(&s), 4).unwrap();
        for (x, y) in
            a.0.values()
                .iter()
                .zip(b.0.values())
                .chain(a.1.values().iter().zip(b.1.values()))
        {
            assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn one_step_path_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_rw_state(10, &mut rng);
        let left = step_quantum(&lift(&v).to_quantum());
        let right = lift(&step_rw(&v, true)).to_quantum();
        for (a, b) in left.amplitudes().iter().zip(right.amplitudes()) {
            assert!((a - b).norm() <= 1e-14);
        }
    }

    #[test]
    fn dense_identities_small() {
        assert!(intertwining_residual(4).unwrap() <= 1e-14);
        assert!(intertwining_residual(16).unwrap() <= 1e-14);
        assert_eq!(power_residual_dense(6, 0).unwrap(), 0.0);
        assert_eq!(power_residual_dense(6, 1).unwrap(), intertwining_residual(6).unwrap());
        assert!(u_commutation_residual(4).unwrap() <= 1e-15);
        assert!(u_commutation_residual(8).unwrap() <= 1e-15);
        assert_eq!(lift_gram_residual(5).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_projection_breaks_intertwining() {
        let alg = CoinAlgebra::standard().with_perturbed_b(1e-3);
        assert!(intertwining_residual_with(&alg, 4).unwrap() > 1e-6);
        assert!(power_residual_probes_with(&alg, 8, 3, 4, 1) > 1e-6);
    }

    #[test]
    fn sqrt2_powers() {
        assert_eq!(sqrt2_pow(0), 1.0);
        assert_eq!(sqrt2_pow(1), SQRT_2);
        assert_eq!(sqrt2_pow(20), 1024.0);
        assert!((sqrt2_pow(7) - 8.0 * SQRT_2).abs() < 1e-15);
    }
}
