//! Explicit Kronecker-product matrices for the walk operators.
//!
//! These are the reference oracle for the matrix-free steppers. They cost
//! `O(d^2)` memory and `O(d^3)` per matrix product, so construction is
//! refused above [`MAX_DENSE_SITES`].

use std::fmt;

use num_complex::Complex64;

use super::LatticeConfig;
use crate::coin::{Mat, HADAMARD, HAT_ONE, HAT_ZERO, ONE, TRANSITION_A, ZERO};
use crate::error::{Error, Result};

/// Largest lattice for which dense operators are built.
pub const MAX_DENSE_SITES: usize = 512;

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real<const R: usize, const C: usize>(m: &Mat<R, C>) -> Self {
        let mut out = Self::zeros(R, C);
        for i in 0..R {
            for j in 0..C {
                out.data[i * C + j] = Complex64::new(m.0[i][j], 0.0);
            }
        }
        out
    }

    /// `d x d` matrix with ones on the superdiagonal: `Right(j, j+1) = 1`.
    pub fn right_shift(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for j in 0..d.saturating_sub(1) {
            m.data[j * d + j + 1] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// `d x d` matrix with ones on the subdiagonal: `Left(j+1, j) = 1`.
    pub fn left_shift(d: usize) -> Self {
        Self::right_shift(d).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] = a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|z| **z != Complex64::new(0.0, 0.0)).count()
    }

    /// `self^n` by repeated squaring. Square matrices only.
    pub fn pow(&self, mut n: usize) -> Self {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }
}

/// Which Kronecker expression a dense operator realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorRole {
    /// Quantum shift, `Right (x) Zero + Left (x) One`.
    QuantumShift,
    /// Quantum coin, `I_d (x) H`.
    QuantumCoin,
    /// Full quantum step, `Right (x) Zero H + Left (x) One H`.
    QuantumStep,
    /// Chain shift, `Right (x) HatZero + Left (x) HatOne`.
    ChainShift,
    /// Chain transition, `I_d (x) A`.
    ChainTransition,
    /// Full chain step, `Right (x) HatZero A + Left (x) HatOne A`.
    ChainStep,
}

impl OperatorRole {
    pub const ALL: [OperatorRole; 6] = [
        OperatorRole::QuantumShift,
        OperatorRole::QuantumCoin,
        OperatorRole::QuantumStep,
        OperatorRole::ChainShift,
        OperatorRole::ChainTransition,
        OperatorRole::ChainStep,
    ];

    /// Short tag: `x`, `y`, `u` for the quantum walk, `X`, `Y`, `U` for the chain.
    pub fn tag(self) -> &'static str {
        match self {
            OperatorRole::QuantumShift => "x",
            OperatorRole::QuantumCoin => "y",
            OperatorRole::QuantumStep => "u",
            OperatorRole::ChainShift => "X",
            OperatorRole::ChainTransition => "Y",
            OperatorRole::ChainStep => "U",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.tag() == tag)
    }

    /// Internal dimension per site: 2 for the quantum walk, 4 for the chain.
    pub fn block(self) -> usize {
        match self {
            OperatorRole::QuantumShift | OperatorRole::QuantumCoin | OperatorRole::QuantumStep => 2,
            _ => 4,
        }
    }
}

impl fmt::Display for OperatorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A square operator over the whole lattice, tagged with its role.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    role: OperatorRole,
    matrix: DenseMatrix,
}

impl DenseOperator {
    /// Build the operator for a `d`-site lattice.
    pub fn build(d: usize, role: OperatorRole) -> Result<Self> {
        check_capacity(d)?;
        let right = DenseMatrix::right_shift(d);
        let left = DenseMatrix::left_shift(d);
        let eye = DenseMatrix::identity(d);
        let m = |x: &Mat<2, 2>| DenseMatrix::from_real(x);
        let m4 = |x: &Mat<4, 4>| DenseMatrix::from_real(x);
        let matrix = match role {
            OperatorRole::QuantumShift => right.kron(&m(&ZERO)).add(&left.kron(&m(&ONE))),
            OperatorRole::QuantumCoin => eye.kron(&m(&HADAMARD)),
            OperatorRole::QuantumStep => right
                .kron(&m(&(ZERO * HADAMARD)))
                .add(&left.kron(&m(&(ONE * HADAMARD)))),
            OperatorRole::ChainShift => right.kron(&m4(&HAT_ZERO)).add(&left.kron(&m4(&HAT_ONE))),
            OperatorRole::ChainTransition => eye.kron(&m4(&TRANSITION_A)),
            OperatorRole::ChainStep => right
                .kron(&m4(&(HAT_ZERO * TRANSITION_A)))
                .add(&left.kron(&m4(&(HAT_ONE * TRANSITION_A)))),
        };
        Ok(Self { role, matrix })
    }

    pub fn role(&self) -> OperatorRole {
        self.role
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.apply(v)
    }

    /// Apply `self^n` to `v`, forming the matrix power explicitly.
    pub fn apply_power(&self, n: usize, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.pow(n).apply(v)
    }
}

pub fn build_dense(cfg: &LatticeConfig, role: OperatorRole) -> Result<DenseOperator> {
    DenseOperator::build(cfg.d(), role)
}

/// `I_d (x) B`, the `2d x 4d` projection from chain to coin space.
pub fn dense_lift(d: usize) -> Result<DenseMatrix> {
    check_capacity(d)?;
    Ok(DenseMatrix::identity(d).kron(&DenseMatrix::from_real(&crate::coin::PROJECTION_B)))
}

pub(crate) fn check_capacity(d: usize) -> Result<()> {
    if d > MAX_DENSE_SITES {
        return Err(Error::Capacity(format!(
            "dense operators are limited to d <= {MAX_DENSE_SITES} (requested d={d}, a {n}x{n} matrix)",
            n = 4 * d
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantum_shift_has_two_nonzeros_per_bond() {
        let x = DenseOperator::build(3, OperatorRole::QuantumShift).unwrap();
        assert_eq!(x.matrix().nonzero_count(), 4);
        assert!(x
            .matrix()
            .entries()
            .iter()
            .all(|z| *z == Complex64::new(0.0, 0.0) || *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn chain_transition_is_block_diagonal() {
        let y = DenseOperator::build(3, OperatorRole::ChainTransition).unwrap();
        let m = y.matrix();
        for i in 0..12 {
            for j in 0..12 {
                let expected = if i / 4 == j / 4 {
                    TRANSITION_A.0[i % 4][j % 4]
                } else {
                    0.0
                };
                assert_eq!(m.get(i, j), Complex64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn full_steps_factor_into_shift_times_coin() {
        for d in [3, 4, 9] {
            let op = |r| DenseOperator::build(d, r).unwrap().into_matrix();
            let u = op(OperatorRole::QuantumStep);
            let xy = op(OperatorRole::QuantumShift).matmul(&op(OperatorRole::QuantumCoin));
            assert!(u.max_abs_diff(&xy) <= 1e-15);
            let big_u = op(OperatorRole::ChainStep);
            let big_xy = op(OperatorRole::ChainShift).matmul(&op(OperatorRole::ChainTransition));
            assert!(big_u.max_abs_diff(&big_xy) <= 1e-15);
        }
    }

    #[test]
    fn shift_matrices_match_their_definition() {
        let r = DenseMatrix::right_shift(4);
        assert_eq!(r.get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(r.get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(r.nonzero_count(), 3);
        assert_eq!(DenseMatrix::left_shift(4).get(1, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let u = DenseOperator::build(5, OperatorRole::ChainStep).unwrap().into_matrix();
        let mut direct = DenseMatrix::identity(20);
        for n in 0..7 {
            assert!(u.pow(n).max_abs_diff(&direct) <= 1e-15, "n={n}");
            direct = direct.matmul(&u);
        }
    }

    #[test]
    fn role_tags_round_trip() {
        for role in OperatorRole::ALL {
            assert_eq!(OperatorRole::from_tag(role.tag()), Some(role));
        }
        assert_eq!(OperatorRole::from_tag("z"), None);
    }

    #[test]
    fn oversized_lattice_is_refused() {
        let err = DenseOperator::build(100_000, OperatorRole::ChainStep).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(dense_lift(MAX_DENSE_SITES + 1).is_err());
    }
}
