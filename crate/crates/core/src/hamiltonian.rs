//! The ferromagnetic XY-type Hamiltonian family and its dense thermal oracles.
//!
//! ```text
//! H = Σ_{i<j} (−b_ij X_i X_j + c_ij Y_i Y_j) + Σ_i d_i (I + Z_i),   |c_ij| ≤ b_ij
//! ```

use serde::{Deserialize, Serialize};

use crate::dense::{self, check_dense_cap, DenseSymmetric, Matrix, DEFAULT_DENSE_CAP};
use crate::{Error, Result};

/// One coupling as it appears in the Hamiltonian file. Qubits are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPair {
    pub i: usize,
    pub j: usize,
    pub b: f64,
    pub c: f64,
}

/// Unvalidated coefficients, the on-disk Hamiltonian format.
///
/// Pairs that are not listed have `b = c = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawHamiltonian {
    pub n: usize,
    #[serde(default)]
    pub pairs: Vec<RawPair>,
    #[serde(default)]
    pub d: Vec<f64>,
}

impl RawHamiltonian {
    /// `n` qubits, no couplings, zero fields.
    pub fn new(n: usize) -> Self {
        RawHamiltonian {
            n,
            pairs: Vec::new(),
            d: vec![0.0; n],
        }
    }

    /// Adds coupling `(i, j)` (1-based).
    pub fn pair(mut self, i: usize, j: usize, b: f64, c: f64) -> Self {
        self.pairs.push(RawPair { i, j, b, c });
        self
    }

    /// Sets the field on qubit `i` (1-based).
    pub fn field(mut self, i: usize, d: f64) -> Self {
        if i >= 1 && i <= self.d.len() {
            self.d[i - 1] = d;
        }
        self
    }

    pub fn validate(&self) -> Result<FerroHamiltonian> {
        FerroHamiltonian::validate(self)
    }
}

#[inline]
fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn check_range(what: impl FnOnce() -> String, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: what(),
            value,
            range,
        })
    }
}

/// A validated Hamiltonian. Qubit indices in the accessors are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct FerroHamiltonian {
    n: usize,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

/// `p_ij = (b_ij − c_ij)/2` and `q_ij = (b_ij + c_ij)/2`, so that
/// `H = Σ p (−XX − YY) + Σ q (−XX + YY) + Σ d (I + Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitCoefficients {
    n: usize,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl SplitCoefficients {
    pub fn p(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        self.p[pair_index(self.n, i, j)]
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        self.q[pair_index(self.n, i, j)]
    }
}

impl FerroHamiltonian {
    pub fn validate(raw: &RawHamiltonian) -> Result<Self> {
        let n = raw.n;
        if n == 0 {
            return Err(Error::InconsistentSize("n must be positive".into()));
        }
        if raw.d.len() != n {
            return Err(Error::InconsistentSize(format!(
                "d has {} entries for n = {n}",
                raw.d.len()
            )));
        }
        let npairs = n * (n - 1) / 2;
        let mut b = vec![0.0; npairs];
        let mut c = vec![0.0; npairs];
        let mut seen = vec![false; npairs];
        for p in &raw.pairs {
            if p.i == 0 || p.j == 0 || p.i > n || p.j > n || p.i == p.j {
                return Err(Error::InconsistentSize(format!(
                    "pair ({},{}) is not a pair of distinct qubits in 1..={n}",
                    p.i, p.j
                )));
            }
            let (i, j) = (p.i.min(p.j), p.i.max(p.j));
            let k = pair_index(n, i - 1, j - 1);
            if seen[k] {
                return Err(Error::InconsistentSize(format!("pair ({i},{j}) listed twice")));
            }
            seen[k] = true;
            check_range(|| format!("b[{i},{j}]"), p.b, 0.0, 1.0, "[0, 1]")?;
            check_range(|| format!("c[{i},{j}]"), p.c, -1.0, 1.0, "[-1, 1]")?;
            if p.c.abs() > p.b {
                return Err(Error::NotFerromagnetic {
                    i,
                    j,
                    b: p.b,
                    c_abs: p.c.abs(),
                });
            }
            b[k] = p.b;
            c[k] = p.c;
        }
        for (k, &dk) in raw.d.iter().enumerate() {
            check_range(|| format!("d[{}]", k + 1), dk, -1.0, 1.0, "[-1, 1]")?;
        }
        Ok(FerroHamiltonian {
            n,
            b,
            c,
            d: raw.d.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        self.b[pair_index(self.n, i, j)]
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        let (i, j) = (i.min(j), i.max(j));
        self.c[pair_index(self.n, i, j)]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.d[i]
    }

    /// All pairs `i < j` (0-based) in lexicographic order with `(b, c)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            ((i + 1)..n).map(move |j| {
                let k = pair_index(n, i, j);
                (i, j, self.b[k], self.c[k])
            })
        })
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.b.iter().chain(&self.c).chain(&self.d).all(|&x| x == 0.0)
    }

    /// Bound on every eigenvalue magnitude: `Σ (b + |c|) + 2 Σ |d|`.
    pub fn norm_bound(&self) -> f64 {
        self.b.iter().zip(&self.c).map(|(b, c)| b + c.abs()).sum::<f64>()
            + 2.0 * self.d.iter().map(|d| d.abs()).sum::<f64>()
    }

    pub fn to_raw(&self) -> RawHamiltonian {
        let pairs = self
            .pairs()
            .filter(|&(_, _, b, c)| b != 0.0 || c != 0.0)
            .map(|(i, j, b, c)| RawPair {
                i: i + 1,
                j: j + 1,
                b,
                c,
            })
            .collect();
        RawHamiltonian {
            n: self.n,
            pairs,
            d: self.d.clone(),
        }
    }

    pub fn split_coefficients(&self) -> SplitCoefficients {
        let p = self.b.iter().zip(&self.c).map(|(b, c)| (b - c) / 2.0).collect();
        let q = self.b.iter().zip(&self.c).map(|(b, c)| (b + c) / 2.0).collect();
        SplitCoefficients { n: self.n, p, q }
    }

    pub fn to_dense(&self) -> Result<DenseSymmetric> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<DenseSymmetric> {
        check_dense_cap(self.n, cap)?;
        let n = self.n;
        let dim = 1usize << n;
        let mut m = Matrix::zeros(dim, dim);
        for (i, j, b, c) in self.pairs() {
            if b != 0.0 {
                m -= dense::pauli_xx(n, i, j) * b;
            }
            if c != 0.0 {
                m += dense::pauli_yy(n, i, j) * c;
            }
        }
        for (i, &d) in self.d.iter().enumerate() {
            if d != 0.0 {
                m += dense::identity_plus_z(n, i) * d;
            }
        }
        Ok(DenseSymmetric::new(m))
    }

    /// All `2^n` eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        self.to_dense()?.eigenvalues()
    }

    /// `log Tr e^{−βH}`, evaluated stably from the spectrum.
    pub fn exact_log_partition(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(log_partition_from_spectrum(&self.spectrum()?, beta))
    }

    /// `Tr e^{−βH}`.
    pub fn exact_partition(&self, beta: f64) -> Result<f64> {
        Ok(self.exact_log_partition(beta)?.exp())
    }

    /// `F(β) = −β⁻¹ log Z(β)`.
    pub fn exact_free_energy(&self, beta: f64) -> Result<f64> {
        Ok(-self.exact_log_partition(beta)? / beta)
    }

    /// Smallest eigenvalue.
    pub fn exact_ground_energy(&self) -> Result<f64> {
        Ok(self.spectrum()?[0])
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "beta".into(),
            value: beta,
            range: "(0, inf)",
        })
    }
}

pub(crate) fn log_partition_from_spectrum(spectrum: &[f64], beta: f64) -> f64 {
    let e0 = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    let tail: f64 = spectrum.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    -beta * e0 + tail.ln()
}
