//! Wall-clock timing of matrix-free and dense single steps.

use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::linear_fit;
use crate::error::Result;
use crate::walk::dense::check_capacity;
use crate::walk::{DenseOperator, OperatorRole, QuantumState, RwState};

pub const MATRIX_FREE_SITES: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
pub const DENSE_SITES: [usize; 4] = [64, 128, 256, 512];
/// Accepted range for the log-log slope of step time against `d`.
pub const EXPONENT_RANGE: (f64, f64) = (0.8, 1.3);

/// Minimum measured wall time per timing sample.
const SAMPLE_BUDGET: Duration = Duration::from_millis(20);
const SAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    MatrixFree,
    Dense,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::MatrixFree => "matrix-free",
            Backend::Dense => "dense",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Quantum,
    Chain,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Quantum => "quantum",
            Model::Chain => "chain",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub backend: Backend,
    pub model: Model,
    pub d: usize,
    pub seconds_per_step: f64,
}

/// Best-of-`SAMPLES` mean time of `f`, each sample repeating `f` until it
/// has run for at least `SAMPLE_BUDGET`.
fn time_per_call(mut f: impl FnMut()) -> f64 {
    f();
    let mut best = f64::INFINITY;
    for _ in 0..SAMPLES {
        let start = Instant::now();
        let mut calls = 0u32;
        while start.elapsed() < SAMPLE_BUDGET || calls == 0 {
            f();
            calls += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / f64::from(calls));
    }
    best
}

fn seeded_values(len: usize) -> Vec<Complex64> {
    // deterministic, nonzero, and not trivially compressible
    (0..len)
        .map(|i| {
            let t = i as f64 * 0.618_033_988_749_895;
            Complex64::new((t.fract() - 0.5) * 1e-3, (t * 1.7).fract() * 1e-3)
        })
        .collect()
}

pub fn time_matrix_free(model: Model, d: usize) -> Timing {
    let seconds_per_step = match model {
        Model::Quantum => {
            let mut s = QuantumState::from_amplitudes(seeded_values(2 * d)).expect("even length");
            time_per_call(|| {
                black_box(s.advance());
            })
        }
        Model::Chain => {
            let mut s = RwState::from_populations(seeded_values(4 * d), 0).expect("length 4d");
            time_per_call(|| {
                black_box(s.advance(false));
            })
        }
    };
    Timing {
        backend: Backend::MatrixFree,
        model,
        d,
        seconds_per_step,
    }
}

/// Dense matrix-vector step time. Refused with a capacity error above the
/// dense size limit.
pub fn time_dense(model: Model, d: usize) -> Result<Timing> {
    check_capacity(d)?;
    let (role, len) = match model {
        Model::Quantum => (OperatorRole::QuantumStep, 2 * d),
        Model::Chain => (OperatorRole::ChainStep, 4 * d),
    };
    let op = DenseOperator::build(d, role)?;
    let mut v = seeded_values(len);
    let seconds_per_step = time_per_call(|| {
        v = op.apply(black_box(&v));
    });
    Ok(Timing {
        backend: Backend::Dense,
        model,
        d,
        seconds_per_step,
    })
}

/// Slope of `log(time)` against `log(d)`.
pub fn fit_exponent(timings: &[Timing]) -> f64 {
    let x: Vec<f64> = timings.iter().map(|t| (t.d as f64).ln()).collect();
    let y: Vec<f64> = timings.iter().map(|t| t.seconds_per_step.ln()).collect();
    linear_fit(&x, &y).0
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub timings: Vec<Timing>,
    pub quantum_exponent: f64,
    pub chain_exponent: f64,
}

impl BenchReport {
    pub fn exponents_in_range(&self) -> bool {
        let ok = |e: f64| (EXPONENT_RANGE.0..=EXPONENT_RANGE.1).contains(&e);
        ok(self.quantum_exponent) && ok(self.chain_exponent)
    }
}

pub fn run(matrix_free_sites: &[usize], dense_sites: &[usize]) -> Result<BenchReport> {
    let mut timings = Vec::new();
    let mut exponents = [0.0; 2];
    for (k, model) in [Model::Quantum, Model::Chain].into_iter().enumerate() {
        let mf: Vec<Timing> = matrix_free_sites.iter().map(|&d| time_matrix_free(model, d)).collect();
        exponents[k] = fit_exponent(&mf);
        timings.extend(mf);
        for &d in dense_sites {
            timings.push(time_dense(model, d)?);
        }
    }
    Ok(BenchReport {
        timings,
        quantum_exponent: exponents[0],
        chain_exponent: exponents[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_refuses_large_lattice() {
        let err = time_dense(Model::Chain, 100_000).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn exponent_of_synthetic_linear_timings() {
        let t: Vec<Timing> = [10usize, 100, 1000]
            .iter()
            .map(|&d| Timing {
                backend: Backend::MatrixFree,
                model: Model::Chain,
                d,
                seconds_per_step: 3e-9 * d as f64,
            })
            .collect();
        assert!((fit_exponent(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_free_step_completes() {
        let t = time_matrix_free(Model::Chain, 1_000);
        assert!(t.seconds_per_step > 0.0);
    }
}
