//! Trotter–Suzuki compilation of `e^{−βH}` into the gate set `{f, g, h}`.
//!
//! One half-period is
//!
//! ```text
//! C = Π_i f_i(e^{−d'_i}) · Π_{i<j} g_ij(q'_ij) · Π_{i<j} h_ij(p'_ij),   x' = (β/r) x
//! ```
//!
//! and the full sequence is `(C C^T)^r`. All three gate matrices are
//! symmetric with nonnegative entries, so `C^T` is `C` with its gate order
//! reversed.

use serde::{Deserialize, Serialize};

use crate::dense::{self, check_dense_cap, DenseSymmetric, Matrix, DEFAULT_DENSE_CAP};
use crate::hamiltonian::FerroHamiltonian;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    F,
    G,
    H,
}

/// An elementary gate. Qubit indices are 0-based; two-qubit gates have `i < j`.
///
/// `F { t }` is the diagonal gate `diag(t, 1)`, valid for `0 < t < 2`.
/// `G` and `H` take `0 < t < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    F { qubit: usize, t: f64 },
    G { i: usize, j: usize, t: f64 },
    H { i: usize, j: usize, t: f64 },
}

fn check_open(kind: &str, t: f64, hi: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 && t < hi {
        Ok(())
    } else {
        Err(Error::InvalidGate(format!("{kind} parameter {t} outside (0, {hi})")))
    }
}

fn check_pair(i: usize, j: usize) -> Result<()> {
    if i < j {
        Ok(())
    } else {
        Err(Error::InvalidGate(format!("qubit pair ({i},{j}) must satisfy i < j")))
    }
}

impl Gate {
    pub fn f(qubit: usize, t: f64) -> Result<Gate> {
        check_open("f", t, 2.0)?;
        Ok(Gate::F { qubit, t })
    }

    pub fn g(i: usize, j: usize, t: f64) -> Result<Gate> {
        check_pair(i, j)?;
        check_open("g", t, 1.0)?;
        Ok(Gate::G { i, j, t })
    }

    pub fn h(i: usize, j: usize, t: f64) -> Result<Gate> {
        check_pair(i, j)?;
        check_open("h", t, 1.0)?;
        Ok(Gate::H { i, j, t })
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::F { .. } => GateKind::F,
            Gate::G { .. } => GateKind::G,
            Gate::H { .. } => GateKind::H,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Gate::F { t, .. } | Gate::G { t, .. } | Gate::H { t, .. } => t,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::F { qubit, .. } => vec![qubit],
            Gate::G { i, j, .. } | Gate::H { i, j, .. } => vec![i, j],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Gate::F { .. } => 1,
            _ => 2,
        }
    }

    /// Re-checks the parameter range (useful after deserialization).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Gate::F { t, .. } => check_open("f", t, 2.0),
            Gate::G { i, j, t } => check_pair(i, j).and(check_open("g", t, 1.0)),
            Gate::H { i, j, t } => check_pair(i, j).and(check_open("h", t, 1.0)),
        }
    }

    /// The 2×2 or 4×4 matrix on the gate's own qubits.
    pub fn local_matrix(&self) -> Matrix {
        match *self {
            Gate::F { t, .. } => f_local(t),
            Gate::G { t, .. } => g_local(t),
            Gate::H { t, .. } => h_local(t),
        }
    }
}

pub fn f_local(t: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[t, 0.0, 0.0, 1.0])
}

pub fn g_local(t: f64) -> Matrix {
    #[rustfmt::skip]
    let m = Matrix::from_row_slice(4, 4, &[
        1.0 + t * t, 0.0, 0.0, t,
        0.0,         1.0, 0.0, 0.0,
        0.0,         0.0, 1.0, 0.0,
        t,           0.0, 0.0, 1.0,
    ]);
    m
}

pub fn h_local(t: f64) -> Matrix {
    #[rustfmt::skip]
    let m = Matrix::from_row_slice(4, 4, &[
        1.0, 0.0,         0.0, 0.0,
        0.0, 1.0 + t * t, t,   0.0,
        0.0, t,           1.0, 0.0,
        0.0, 0.0,         0.0, 1.0,
    ]);
    m
}

/// The gate embedded in the `2^n`-dimensional space.
pub fn gate_matrix(gate: &Gate, n: usize) -> DenseSymmetric {
    let m = match *gate {
        Gate::F { qubit, t } => dense::embed_one(&f_local(t), n, qubit),
        Gate::G { i, j, t } => dense::embed_two(&g_local(t), n, i, j),
        Gate::H { i, j, t } => dense::embed_two(&h_local(t), n, i, j),
    };
    DenseSymmetric::new(m)
}

/// `m ← G m`, touching only the rows the gate mixes.
pub fn apply_gate_left(m: &mut Matrix, gate: &Gate) {
    let dim = m.nrows();
    let cols = m.ncols();
    match *gate {
        Gate::F { qubit, t } => {
            for row in (0..dim).filter(|r| (r >> qubit) & 1 == 0) {
                for c in 0..cols {
                    m[(row, c)] *= t;
                }
            }
        }
        Gate::G { i, j, t } | Gate::H { i, j, t } => {
            let (bi, bj) = (1usize << i, 1usize << j);
            let is_g = matches!(gate, Gate::G { .. });
            for base in (0..dim).filter(|r| r & (bi | bj) == 0) {
                let (a, b) = if is_g { (base, base | bi | bj) } else { (base | bi, base | bj) };
                for c in 0..cols {
                    let x = m[(a, c)];
                    let y = m[(b, c)];
                    m[(a, c)] = (1.0 + t * t) * x + t * y;
                    m[(b, c)] = t * x + y;
                }
            }
        }
    }
}

/// Half-period layout of a Trotter sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    /// Gates in one half-period `C` after eliding identities.
    pub period_len: usize,
    /// Number of `C C^T` repetitions.
    pub r: usize,
    /// Identity gates elided over the whole sequence.
    pub skipped: usize,
}

/// An ordered gate list `G_1, G_2, …`; the represented operator is `G_J ⋯ G_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSequence {
    n: usize,
    gates: Vec<Gate>,
    period: Option<Period>,
}

impl GateSequence {
    /// An arbitrary circuit without Trotter structure.
    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate()?;
            if g.qubits().iter().any(|&q| q >= n) {
                return Err(Error::InvalidGate(format!("{g:?} acts outside {n} qubits")));
            }
        }
        Ok(GateSequence {
            n,
            gates,
            period: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn period(&self) -> Option<Period> {
        self.period
    }

    /// Gate count per qubit.
    pub fn gate_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for g in &self.gates {
            for q in g.qubits() {
                counts[q] += 1;
            }
        }
        counts
    }

    /// Qubits no gate touches; each contributes a factor 2 to the trace.
    pub fn idle_qubits(&self) -> usize {
        self.gate_counts().iter().filter(|&&c| c == 0).count()
    }

    /// Dense product `G_J ⋯ G_1`.
    pub fn dense_product(&self) -> Result<Matrix> {
        check_dense_cap(self.n, DEFAULT_DENSE_CAP)?;
        let dim = 1usize << self.n;
        let mut m = Matrix::identity(dim, dim);
        for g in &self.gates {
            apply_gate_left(&mut m, g);
        }
        Ok(m)
    }

    /// Dense half-period `C = G_1 G_2 ⋯ G_L`, so that one period equals `C C^T`.
    pub fn half_period_matrix(&self) -> Result<Matrix> {
        let period = self
            .period
            .ok_or_else(|| Error::InvalidParameter("sequence has no period structure".into()))?;
        check_dense_cap(self.n, DEFAULT_DENSE_CAP)?;
        let dim = 1usize << self.n;
        let mut m = Matrix::identity(dim, dim);
        for g in self.gates[..period.period_len].iter().rev() {
            apply_gate_left(&mut m, g);
        }
        Ok(m)
    }

    /// `log Tr[G_J ⋯ G_1]`, with the running product renormalized so long
    /// sequences neither overflow nor underflow.
    pub fn log_trace(&self) -> Result<f64> {
        check_dense_cap(self.n, DEFAULT_DENSE_CAP)?;
        let dim = 1usize << self.n;
        let mut m = Matrix::identity(dim, dim);
        let mut log_scale = 0.0;
        for (k, g) in self.gates.iter().enumerate() {
            apply_gate_left(&mut m, g);
            if k % 16 == 15 {
                let s = m.amax();
                if s > 0.0 {
                    m /= s;
                    log_scale += s.ln();
                }
            }
        }
        Ok(m.trace().ln() + log_scale)
    }

    /// `Z_J = Tr[G_J ⋯ G_1]`; `2^n` for the empty sequence.
    pub fn trace_exact(&self) -> Result<f64> {
        Ok(self.log_trace()?.exp())
    }

    pub fn to_record(&self) -> SequenceRecord {
        SequenceRecord {
            n: self.n,
            gates: self.gates.iter().map(GateRecord::from).collect(),
            period: self.period,
        }
    }

    pub fn from_record(rec: &SequenceRecord) -> Result<Self> {
        let gates = rec.gates.iter().map(Gate::try_from).collect::<Result<Vec<_>>>()?;
        let mut seq = GateSequence::from_gates(rec.n, gates)?;
        seq.period = rec.period;
        Ok(seq)
    }
}

/// Free function form of [`GateSequence::trace_exact`].
pub fn sequence_trace_exact(seq: &GateSequence) -> Result<f64> {
    seq.trace_exact()
}

/// JSON form of a gate; qubits are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub t: f64,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        GateRecord {
            kind: g.kind(),
            qubits: g.qubits().iter().map(|q| q + 1).collect(),
            t: g.param(),
        }
    }
}

impl TryFrom<&GateRecord> for Gate {
    type Error = Error;

    fn try_from(rec: &GateRecord) -> Result<Gate> {
        let q: Vec<usize> = rec
            .qubits
            .iter()
            .map(|&q| q.checked_sub(1).ok_or_else(|| Error::InvalidGate("qubit 0 in 1-based record".into())))
            .collect::<Result<_>>()?;
        match (rec.kind, q.as_slice()) {
            (GateKind::F, &[a]) => Gate::f(a, rec.t),
            (GateKind::G, &[a, b]) => Gate::g(a, b, rec.t),
            (GateKind::H, &[a, b]) => Gate::h(a, b, rec.t),
            _ => Err(Error::InvalidGate(format!(
                "{:?} gate with {} qubits",
                rec.kind,
                q.len()
            ))),
        }
    }
}

/// JSON form of a sequence: `{n, gates, period_len, r, skipped}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub n: usize,
    pub gates: Vec<GateRecord>,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Period>,
}

fn check_beta_eps(beta: f64, eps: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::OutOfRange {
            what: "beta".into(),
            value: beta,
            range: "(0, inf)",
        });
    }
    // ε = 1 is accepted: the bound stays meaningful and the error split
    // upstream only ever passes ε/4.
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::OutOfRange {
            what: "eps".into(),
            value: eps,
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// Bound on `‖Q‖` in `G_J ⋯ G_1 = e^{−βH + Q}`: `2n²β²/r + 2π·27·β³n⁶/r²`.
pub fn q_norm_bound(n: usize, beta: f64, r: usize) -> f64 {
    let (n, r) = (n as f64, r as f64);
    2.0 * n * n * beta * beta / r + 2.0 * std::f64::consts::PI * 27.0 * beta.powi(3) * n.powi(6) / (r * r)
}

/// Bound on `‖W_ij‖` for partial products: `4n²β/r + ‖Q‖` bound.
pub fn partial_product_bound(n: usize, beta: f64, r: usize) -> f64 {
    4.0 * (n * n) as f64 * beta / r as f64 + q_norm_bound(n, beta, r)
}

fn r_admissible(n: usize, beta: f64, eps: f64, r: usize) -> bool {
    let rf = r as f64;
    let nn = (n * n) as f64;
    rf > 2.0 * beta && 6.0 * beta * nn <= rf && partial_product_bound(n, beta, r) <= eps / 4.0
}

/// Smallest period count `r` with `r > 2β`, `6βn²/r ≤ 1` and
/// `4n²β/r + 2n²β²/r + 2π·27·β³n⁶/r² ≤ ε/4`.
pub fn choose_r(n: usize, beta: f64, eps: f64) -> Result<usize> {
    check_beta_eps(beta, eps)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    // All three conditions are monotone in r: gallop, then bisect.
    let mut hi = 1usize;
    while !r_admissible(n, beta, eps, hi) {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidParameter("no admissible r fits in usize".into()))?;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if r_admissible(n, beta, eps, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The half-period gates and the number of identity gates elided from it.
fn half_period(h: &FerroHamiltonian, beta: f64, r: usize) -> Result<(Vec<Gate>, usize)> {
    let n = h.n();
    let scale = beta / r as f64;
    let split = h.split_coefficients();
    let mut gates = Vec::with_capacity(n * n);
    let mut skipped = 0;
    for i in 0..n {
        let d = scale * h.d(i);
        if d == 0.0 {
            skipped += 1;
        } else {
            gates.push(Gate::f(i, (-d).exp())?);
        }
    }
    for (i, j, _, _) in h.pairs() {
        let q = scale * split.q(i, j);
        if q == 0.0 {
            skipped += 1;
        } else {
            gates.push(Gate::g(i, j, q)?);
        }
    }
    for (i, j, _, _) in h.pairs() {
        let p = scale * split.p(i, j);
        if p == 0.0 {
            skipped += 1;
        } else {
            gates.push(Gate::h(i, j, p)?);
        }
    }
    Ok((gates, skipped))
}

/// Trotter sequence with `r = choose_r(n, β, ε)`.
pub fn build_sequence(h: &FerroHamiltonian, beta: f64, eps: f64) -> Result<GateSequence> {
    let r = choose_r(h.n(), beta, eps)?;
    build_sequence_with_r(h, beta, r)
}

/// Trotter sequence with a caller-chosen period count.
///
/// Fails with [`Error::InvalidGate`] when `r` is too small for the gate
/// parameters to stay inside the gate set.
pub fn build_sequence_with_r(h: &FerroHamiltonian, beta: f64, r: usize) -> Result<GateSequence> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::OutOfRange {
            what: "beta".into(),
            value: beta,
            range: "(0, inf)",
        });
    }
    if r == 0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let (half, skipped_half) = half_period(h, beta, r)?;
    let mut gates = Vec::with_capacity(2 * r * half.len());
    for _ in 0..r {
        gates.extend_from_slice(&half);
        gates.extend(half.iter().rev());
    }
    Ok(GateSequence {
        n: h.n(),
        gates,
        period: Some(Period {
            period_len: half.len(),
            r,
            skipped: 2 * r * skipped_half,
        }),
    })
}

/// `|log Z_J − log Z(β, H)|`.
pub fn trotter_log_error(seq: &GateSequence, h: &FerroHamiltonian, beta: f64) -> Result<f64> {
    Ok((seq.log_trace()? - h.exact_log_partition(beta)?).abs())
}

/// `R(t) = cosh⁻¹(1 + t²/2) / √(1 + t²/4)`, the exact exchange angle of `g(t)`.
pub fn r_function(t: f64) -> f64 {
    (1.0 + t * t / 2.0).acosh() / (1.0 + t * t / 4.0).sqrt()
}

/// `E(t) = log g(t) + (t/2)(Y⊗Y − X⊗X)` as a local 4×4 matrix.
pub fn g_remainder(t: f64) -> Result<DenseSymmetric> {
    let log_g = DenseSymmetric::new(g_local(t)).log()?;
    let generator = (dense::local_yy() - dense::local_xx()) * (t / 2.0);
    Ok(DenseSymmetric::new(log_g.as_matrix() + generator))
}

/// `F(t) = (I⊗X) E(t) (I⊗X)`, the remainder of `h(t)`.
pub fn h_remainder(t: f64) -> Result<DenseSymmetric> {
    let x = dense::local_x_low();
    let e = g_remainder(t)?;
    Ok(DenseSymmetric::new(&x * e.as_matrix() * &x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderNorms {
    pub t: f64,
    pub e_norm: f64,
    pub f_norm: f64,
}

/// Spectral norms of `E(t)` and `F(t)`; both are bounded by `t²` on `(0, 1)`.
pub fn verify_prop1(t: f64) -> Result<RemainderNorms> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange {
            what: "t".into(),
            value: t,
            range: "(0, 1)",
        });
    }
    Ok(RemainderNorms {
        t,
        e_norm: g_remainder(t)?.norm()?,
        f_norm: h_remainder(t)?.norm()?,
    })
}

/// Measured error terms of one Trotter sequence against their bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterDiagnostics {
    /// Measured `‖Q‖` where `(C C^T)^r = e^{−βH + Q}`.
    pub q_norm: f64,
    pub q_bound: f64,
    /// Measured `‖Δ‖` where `C C^T = e^{H_1 + … + H_L + Δ}`.
    pub magnus_delta_norm: f64,
    /// `2π (δ L)³` with `δ = 3β/r` and `L = n²`.
    pub magnus_bound: f64,
    /// Remainder norms for each distinct two-qubit gate parameter.
    pub prop1_norms: Vec<RemainderNorms>,
}

/// Compares the exact logarithm of one period against the sum of the
/// per-gate generators, and the full product against `−βH`.
pub fn verify_magnus(seq: &GateSequence, beta: f64, h: &FerroHamiltonian) -> Result<TrotterDiagnostics> {
    let period = seq
        .period
        .ok_or_else(|| Error::InvalidParameter("sequence has no period structure".into()))?;
    let n = seq.n;
    check_dense_cap(n, DEFAULT_DENSE_CAP)?;
    if h.n() != n {
        return Err(Error::InconsistentSize(format!(
            "sequence has {n} qubits, Hamiltonian {}",
            h.n()
        )));
    }
    let r = period.r;
    let c = seq.half_period_matrix()?;
    let one_period = DenseSymmetric::new(&c * c.transpose());
    let log_period = one_period.log()?;

    let h_dense = h.to_dense()?;
    let mut first_order = &h_dense * (-beta / r as f64);
    let mut params = Vec::new();
    for g in &seq.gates[..period.period_len] {
        match *g {
            Gate::G { i, j, t } => {
                first_order += &DenseSymmetric::new(dense::embed_two(g_remainder(t)?.as_matrix(), n, i, j) * 2.0);
                params.push(t);
            }
            Gate::H { i, j, t } => {
                first_order += &DenseSymmetric::new(dense::embed_two(h_remainder(t)?.as_matrix(), n, i, j) * 2.0);
                params.push(t);
            }
            Gate::F { .. } => {}
        }
    }
    let delta = &log_period - &first_order;
    let q = &(&log_period * r as f64) + &(&h_dense * beta);

    params.sort_by(f64::total_cmp);
    params.dedup();
    let prop1_norms = params.into_iter().map(verify_prop1).collect::<Result<Vec<_>>>()?;

    let step = 3.0 * beta / r as f64;
    let l = (n * n) as f64;
    Ok(TrotterDiagnostics {
        q_norm: q.norm()?,
        q_bound: q_norm_bound(n, beta, r),
        magnus_delta_norm: delta.norm()?,
        magnus_bound: 2.0 * std::f64::consts::PI * (step * l).powi(3),
        prop1_norms,
    })
}
