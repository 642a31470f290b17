//! Fixed coin matrices and the small-matrix identities that connect the
//! Hadamard coin to the four-state stochastic chain.
//!
//! Everything here is a tiny dense real matrix. The chain matrices
//! (`A`, `B`, the projectors) hold only integers and halves, so products of
//! them are exact in binary floating point and their identity residuals are
//! compared against exactly zero.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

/// Row-major `R x C` real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const R: usize, const C: usize>(pub [[f64; C]; R]);

pub type Matrix2x2 = Mat<2, 2>;
pub type Matrix2x4 = Mat<2, 4>;
pub type Matrix4x2 = Mat<4, 2>;
pub type Matrix4x4 = Mat<4, 4>;

impl<const R: usize, const C: usize> Mat<R, C> {
    pub const fn zeros() -> Self {
        Mat([[0.0; C]; R])
    }

    pub fn transpose(&self) -> Mat<C, R> {
        let mut out = Mat::<C, R>::zeros();
        for i in 0..R {
            for j in 0..C {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|x| *x *= k);
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn row_sums(&self) -> [f64; R] {
        let mut out = [0.0; R];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().sum();
        }
        out
    }

    pub fn col_sums(&self) -> [f64; C] {
        let mut out = [0.0; C];
        for row in &self.0 {
            for (j, x) in row.iter().enumerate() {
                out[j] += x;
            }
        }
        out
    }

    /// Matrix-vector product on a column vector.
    pub fn apply(&self, v: [f64; C]) -> [f64; R] {
        let mut out = [0.0; R];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }
}

impl<const N: usize> Mat<N, N> {
    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            out.0[i][i] = 1.0;
        }
        out
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<const R: usize, const K: usize, const C: usize> Mul<Mat<K, C>> for Mat<R, K> {
    type Output = Mat<R, C>;

    fn mul(self, rhs: Mat<K, C>) -> Mat<R, C> {
        let mut out = Mat::<R, C>::zeros();
        for i in 0..R {
            for j in 0..C {
                let mut acc = 0.0;
                for k in 0..K {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }
}

impl<const R: usize, const C: usize> Add for Mat<R, C> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const R: usize, const C: usize> Sub for Mat<R, C> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

/// Determinant of a 2x2 matrix.
pub fn det2(m: &Matrix2x2) -> f64 {
    m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0]
}

/// Determinant of a 4x4 matrix by cofactor expansion along the first row.
pub fn det4(m: &Matrix4x4) -> f64 {
    fn det3(a: [[f64; 3]; 3]) -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    let mut det = 0.0;
    for col in 0..4 {
        let mut minor = [[0.0; 3]; 3];
        for (r, row) in m.0[1..].iter().enumerate() {
            let mut c = 0;
            for (j, x) in row.iter().enumerate() {
                if j != col {
                    minor[r][c] = *x;
                    c += 1;
                }
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m.0[0][col] * det3(minor);
    }
    det
}

pub const HADAMARD: Matrix2x2 = Mat([[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]);

pub const TRANSITION_A: Matrix4x4 = Mat([
    [0.5, 0.5, 0.0, 0.0],
    [0.5, 0.0, 0.5, 0.0],
    [0.0, 0.5, 0.0, 0.5],
    [0.0, 0.0, 0.5, 0.5],
]);

pub const PROJECTION_B: Matrix2x4 = Mat([[1.0, 0.0, 0.0, -1.0], [0.0, 1.0, -1.0, 0.0]]);

/// Projector onto coin `|0>`.
pub const ZERO: Matrix2x2 = Mat([[1.0, 0.0], [0.0, 0.0]]);
/// Projector onto coin `|1>`.
pub const ONE: Matrix2x2 = Mat([[0.0, 0.0], [0.0, 1.0]]);
/// Chain rows that move with coin `|0>`: rows `|0>` and `-|0>`.
pub const HAT_ZERO: Matrix4x4 = Mat([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
]);
/// Chain rows that move with coin `|1>`: rows `|1>` and `-|1>`.
pub const HAT_ONE: Matrix4x4 = Mat([
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
]);

pub fn hadamard() -> Matrix2x2 {
    HADAMARD
}

pub fn transition_a() -> Matrix4x4 {
    TRANSITION_A
}

pub fn projection_b() -> Matrix2x4 {
    PROJECTION_B
}

/// The complete set of constant matrices.
///
/// The verifiers take an algebra by reference so that a deliberately
/// corrupted copy can be checked as a negative control.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinAlgebra {
    pub h: Matrix2x2,
    pub a: Matrix4x4,
    pub b: Matrix2x4,
    pub zero: Matrix2x2,
    pub one: Matrix2x2,
    pub hat_zero: Matrix4x4,
    pub hat_one: Matrix4x4,
}

impl Default for CoinAlgebra {
    fn default() -> Self {
        Self::standard()
    }
}

impl CoinAlgebra {
    pub const fn standard() -> Self {
        Self {
            h: HADAMARD,
            a: TRANSITION_A,
            b: PROJECTION_B,
            zero: ZERO,
            one: ONE,
            hat_zero: HAT_ZERO,
            hat_one: HAT_ONE,
        }
    }

    /// Copy of this algebra with `eps` added to `B[0][0]`.
    pub fn with_perturbed_b(mut self, eps: f64) -> Self {
        self.b.0[0][0] += eps;
        self
    }

    /// `B^T B`, the 4x4 Gram matrix of the projection.
    pub fn btb(&self) -> Matrix4x4 {
        self.b.transpose() * self.b
    }

    /// `(1/sqrt 2) B A B^T`, which should reproduce the Hadamard coin.
    pub fn reconstructed_hadamard(&self) -> Matrix2x2 {
        (self.b * self.a * self.b.transpose()).scale(FRAC_1_SQRT_2)
    }

    /// Max-abs residual of `H - (1/sqrt 2) B A B^T`.
    pub fn verify_decomposition(&self) -> f64 {
        (self.h - self.reconstructed_hadamard()).max_abs()
    }

    /// Max residual over `B B^T = 2 I`, `Zero = B HatZero B^T / 2` and
    /// `One = B HatOne B^T / 2`.
    pub fn verify_projector_identities(&self) -> f64 {
        let bt = self.b.transpose();
        let gram = (self.b * bt - Matrix2x2::identity().scale(2.0)).max_abs();
        let zero = (self.zero - (self.b * self.hat_zero * bt).scale(0.5)).max_abs();
        let one = (self.one - (self.b * self.hat_one * bt).scale(0.5)).max_abs();
        gram.max(zero).max(one)
    }

    /// Max-abs entry over `[HatZero, B^T B]`, `[HatOne, B^T B]` and `[A, B^T B]`.
    pub fn verify_commutators(&self) -> f64 {
        let btb = self.btb();
        [self.hat_zero, self.hat_one, self.a]
            .iter()
            .map(|m| m.commutator(&btb).max_abs())
            .fold(0.0, f64::max)
    }
}

pub fn verify_decomposition() -> f64 {
    CoinAlgebra::standard().verify_decomposition()
}

pub fn verify_projector_identities() -> f64 {
    CoinAlgebra::standard().verify_projector_identities()
}

pub fn verify_commutators() -> f64 {
    CoinAlgebra::standard().verify_commutators()
}
