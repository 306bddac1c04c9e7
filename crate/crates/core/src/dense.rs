//! Small dense real matrices in the computational basis.
//!
//! Basis convention: qubit `q` (0-based) is bit `q` of the basis index, and
//! `|0⟩` is the `+1` eigenvector of `Z`. Two-qubit local matrices acting on
//! qubits `(i, j)` are indexed by `bit_i + 2 * bit_j`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// Default cap on the qubit count for dense oracles.
pub const DEFAULT_DENSE_CAP: usize = 10;

/// Eigenvalues at or below this are rejected by [`DenseSymmetric::log`].
pub const LOG_EIGEN_FLOOR: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// A real symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymmetric(Matrix);

/// Eigen-decomposition with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: Matrix,
}

impl DenseSymmetric {
    /// Wraps `m`, symmetrizing away rounding noise. `m` must be square.
    pub fn new(m: Matrix) -> Self {
        assert!(m.is_square(), "symmetric matrix must be square");
        let sym = (&m + m.transpose()) * 0.5;
        DenseSymmetric(sym)
    }

    pub fn zeros(dim: usize) -> Self {
        DenseSymmetric(Matrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        DenseSymmetric(Matrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        asymmetry(&self.0)
    }

    pub fn eigen(&self) -> Result<SymmetricEigen> {
        let eig = self
            .0
            .clone()
            .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::EigensolveFailure)?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
        let mut vectors = Matrix::zeros(self.dim(), self.dim());
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(SymmetricEigen { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigen()?.values.iter().copied().collect())
    }

    /// Applies `func` to the spectrum.
    pub fn map_spectrum(&self, func: impl Fn(f64) -> f64) -> Result<DenseSymmetric> {
        let eig = self.eigen()?;
        let mapped = DVector::from_iterator(eig.values.len(), eig.values.iter().map(|&x| func(x)));
        let m = &eig.vectors * DMatrix::from_diagonal(&mapped) * eig.vectors.transpose();
        Ok(DenseSymmetric::new(m))
    }

    /// Principal logarithm of a positive-definite matrix.
    pub fn log(&self) -> Result<DenseSymmetric> {
        let eig = self.eigen()?;
        let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= LOG_EIGEN_FLOOR {
            return Err(Error::NotPositiveDefinite(min));
        }
        let logs = DVector::from_iterator(eig.values.len(), eig.values.iter().map(|x| x.ln()));
        let m = &eig.vectors * DMatrix::from_diagonal(&logs) * eig.vectors.transpose();
        Ok(DenseSymmetric::new(m))
    }

    pub fn exp(&self) -> Result<DenseSymmetric> {
        self.map_spectrum(f64::exp)
    }

    /// Spectral norm, the largest absolute eigenvalue.
    pub fn norm(&self) -> Result<f64> {
        Ok(self
            .eigen()?
            .values
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs())))
    }
}

impl std::ops::Add for &DenseSymmetric {
    type Output = DenseSymmetric;
    fn add(self, rhs: &DenseSymmetric) -> DenseSymmetric {
        DenseSymmetric(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &DenseSymmetric {
    type Output = DenseSymmetric;
    fn sub(self, rhs: &DenseSymmetric) -> DenseSymmetric {
        DenseSymmetric(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul<f64> for &DenseSymmetric {
    type Output = DenseSymmetric;
    fn mul(self, rhs: f64) -> DenseSymmetric {
        DenseSymmetric(&self.0 * rhs)
    }
}

impl std::ops::AddAssign<&DenseSymmetric> for DenseSymmetric {
    fn add_assign(&mut self, rhs: &DenseSymmetric) {
        self.0 += &rhs.0;
    }
}

pub fn asymmetry(m: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in (r + 1)..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)]).abs());
        }
    }
    worst
}

/// Largest singular value of a general matrix.
pub fn spectral_norm(m: &Matrix) -> f64 {
    m.singular_values().iter().fold(0.0f64, |acc, &x| acc.max(x))
}

pub fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::DimensionTooLarge { n, cap });
    }
    Ok(())
}

#[inline]
fn bit(x: usize, q: usize) -> usize {
    (x >> q) & 1
}

/// Embeds a 2×2 matrix acting on qubit `q` into `n` qubits.
pub fn embed_one(local: &Matrix, n: usize, q: usize) -> Matrix {
    assert_eq!(local.shape(), (2, 2));
    assert!(q < n);
    let dim = 1usize << n;
    let mask = 1usize << q;
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let rest = col & !mask;
        for b in 0..2 {
            let row = rest | (b << q);
            let v = local[(b, bit(col, q))];
            if v != 0.0 {
                out[(row, col)] = v;
            }
        }
    }
    out
}

/// Embeds a 4×4 matrix acting on qubits `(i, j)` into `n` qubits.
pub fn embed_two(local: &Matrix, n: usize, i: usize, j: usize) -> Matrix {
    assert_eq!(local.shape(), (4, 4));
    assert!(i < n && j < n && i != j);
    let dim = 1usize << n;
    let mask = (1usize << i) | (1usize << j);
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let rest = col & !mask;
        let lc = bit(col, i) + 2 * bit(col, j);
        for lr in 0..4 {
            let v = local[(lr, lc)];
            if v != 0.0 {
                let row = rest | ((lr & 1) << i) | ((lr >> 1) << j);
                out[(row, col)] = v;
            }
        }
    }
    out
}

/// `X ⊗ X` as a local 4×4 matrix.
pub fn local_xx() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    for x in 0..4 {
        m[(x ^ 3, x)] = 1.0;
    }
    m
}

/// `Y ⊗ Y` as a local 4×4 matrix (real: `-1` between `00,11`, `+1` between `01,10`).
pub fn local_yy() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    for x in 0..4usize {
        let parity_equal = (x & 1) == (x >> 1);
        m[(x ^ 3, x)] = if parity_equal { -1.0 } else { 1.0 };
    }
    m
}

/// `X` on local bit 0 of a two-qubit space, the `I ⊗ X` of the gate definitions.
pub fn local_x_low() -> Matrix {
    let mut m = Matrix::zeros(4, 4);
    for x in 0..4usize {
        m[(x ^ 1, x)] = 1.0;
    }
    m
}

/// `X_i X_j` on `n` qubits.
pub fn pauli_xx(n: usize, i: usize, j: usize) -> Matrix {
    embed_two(&local_xx(), n, i, j)
}

/// `Y_i Y_j` on `n` qubits.
pub fn pauli_yy(n: usize, i: usize, j: usize) -> Matrix {
    embed_two(&local_yy(), n, i, j)
}

/// `I + Z_q` on `n` qubits: `2` on basis states with bit `q` clear.
pub fn identity_plus_z(n: usize, q: usize) -> Matrix {
    let dim = 1usize << n;
    Matrix::from_diagonal(&DVector::from_iterator(
        dim,
        (0..dim).map(|x| if bit(x, q) == 0 { 2.0 } else { 0.0 }),
    ))
}
