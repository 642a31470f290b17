//! The identity and equivalence checks, swept over lattice sizes and step
//! counts, each compared against a fixed bound.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bridge::{self, random_quantum_state, random_rw_state};
use crate::coin::CoinAlgebra;
use crate::error::Result;
use crate::walk::{DenseOperator, OperatorRole};

pub const DECOMPOSITION_TOL: f64 = 1e-15;
pub const INTERTWINING_TOL: f64 = 1e-14;
pub const POWER_TOL: f64 = 1e-11;
pub const U_COMMUTATION_TOL: f64 = 1e-15;
pub const ENGINE_TOL: f64 = 1e-12;

pub const DEFAULT_SITES: [usize; 5] = [4, 8, 16, 32, 64];
pub const DEFAULT_STEPS: [usize; 4] = [0, 1, 5, 12];

/// Largest lattice on which the dense-vs-matrix-free comparison runs.
pub const ENGINE_CHECK_MAX_SITES: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            bound,
            passed: residual <= bound,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} residual={:.3e} bound={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.bound
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyPlan {
    pub sites: Vec<usize>,
    pub steps: Vec<usize>,
    pub seed: u64,
    pub algebra: CoinAlgebra,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        Self {
            sites: DEFAULT_SITES.to_vec(),
            steps: DEFAULT_STEPS.to_vec(),
            seed: 0,
            algebra: CoinAlgebra::standard(),
        }
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise gap between matrix-free stepping and the dense matrix
/// power, over both models, for one random initial state each.
pub fn engine_residual(d: usize, n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q0 = random_quantum_state(d, &mut rng);
    let p0 = random_rw_state(d, &mut rng);

    let dense_q = DenseOperator::build(d, OperatorRole::QuantumStep)?.apply_power(n, q0.amplitudes());
    let dense_p = DenseOperator::build(d, OperatorRole::ChainStep)?.apply_power(n, p0.populations());

    let (mut q, mut p) = (q0, p0);
    for _ in 0..n {
        q.advance();
        p.advance(false);
    }
    Ok(max_abs_diff(&dense_q, q.amplitudes()).max(max_abs_diff(&dense_p, p.populations())))
}

/// Run every check in the plan. Residuals are bit-reproducible for a
/// fixed seed.
pub fn run(plan: &VerifyPlan) -> Result<VerifyReport> {
    let alg = &plan.algebra;
    let mut checks = vec![
        CheckResult::new(
            "decomposition H = BAB^T/sqrt2",
            alg.verify_decomposition(),
            DECOMPOSITION_TOL,
        ),
        CheckResult::new("projector identities", alg.verify_projector_identities(), 0.0),
        CheckResult::new("commutators with B^T B", alg.verify_commutators(), 0.0),
    ];
    for (di, &d) in plan.sites.iter().enumerate() {
        checks.push(CheckResult::new(
            format!("intertwining d={d}"),
            bridge::intertwining_residual_with(alg, d)?,
            INTERTWINING_TOL,
        ));
        checks.push(CheckResult::new(
            format!("U commutation d={d}"),
            bridge::u_commutation_residual_with(alg, d)?,
            U_COMMUTATION_TOL,
        ));
        for (ni, &n) in plan.steps.iter().enumerate() {
            let case_seed = plan.seed ^ ((di as u64) << 32 | ni as u64);
            let residual = if d <= bridge::DENSE_RESIDUAL_MAX_SITES {
                bridge::power_residual_dense_with(alg, d, n)?
            } else {
                bridge::power_residual_probes_with(alg, d, n, 16, case_seed)
            };
            checks.push(CheckResult::new(
                format!("power identity d={d} n={n}"),
                residual,
                POWER_TOL,
            ));
            if d <= ENGINE_CHECK_MAX_SITES {
                checks.push(CheckResult::new(
                    format!("dense vs matrix-free d={d} n={n}"),
                    engine_residual(d, n, case_seed)?,
                    ENGINE_TOL,
                ));
            }
        }
    }
    Ok(VerifyReport { checks })
}
