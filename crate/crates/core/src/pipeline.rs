//! End-to-end estimates of `Z(β, H)`, the free energy, and the ground energy.
//!
//! The relative error `ε` is split between the Trotter product (`ε/4`) and
//! the matching estimator (`ε/2`); `e^{ε/4}(1 + ε/2) ≤ 1 + ε` holds on
//! `(0, 1)` and is re-checked numerically for every run.

use serde::{Deserialize, Serialize};

use crate::estimator::{estimate_perfmatch, AmplifiedReport, EstimatorConfig};
use crate::exact::{perfmatch_exact, MATCHING_ORACLE_CAP};
use crate::hamiltonian::FerroHamiltonian;
use crate::matchgraph::{compile_circuit, WeightedMultigraph};
use crate::trotter::{build_sequence, build_sequence_with_r, choose_r, GateSequence};
use crate::{Error, Mode, Result};

/// Samples per level when practical mode is not told otherwise.
pub const DEFAULT_PRACTICAL_SAMPLES: usize = 2000;

/// Default refusal threshold for theory mode, in chain steps.
pub const DEFAULT_THEORY_BUDGET: f64 = 1e10;

/// Largest `n` for which cross-checking computes dense oracles.
pub const CROSS_CHECK_MAX_QUBITS: usize = 3;

/// Agreement tolerance for exact stages in cross-checking.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub beta: f64,
    pub eps: f64,
    pub mode: Mode,
    /// Trotter period count; `None` uses the error-driven choice.
    pub r: Option<usize>,
    /// Samples per level; practical mode only.
    pub samples: Option<usize>,
    /// Chain steps per sample; practical mode only.
    pub steps: Option<u64>,
    pub seed: u64,
    pub trials: usize,
    pub q_coeff: f64,
    /// Theory mode refuses to start above this many projected chain steps.
    pub budget: f64,
    /// Attach exact oracle values (`n ≤ 3`).
    pub cross_check: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            beta: 1.0,
            eps: 0.5,
            mode: Mode::Practical,
            r: None,
            samples: None,
            steps: None,
            seed: 0,
            trials: 1,
            q_coeff: 1.0,
            budget: DEFAULT_THEORY_BUDGET,
            cross_check: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::OutOfRange {
                what: "beta".into(),
                value: self.beta,
                range: "(0, inf)",
            });
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::OutOfRange {
                what: "eps".into(),
                value: self.eps,
                range: "(0, 1)",
            });
        }
        if self.trials == 0 || self.trials % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "trials must be odd and positive, got {}",
                self.trials
            )));
        }
        Ok(())
    }
}

/// How the relative error is shared between stages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub eps: f64,
    pub trotter: f64,
    pub estimator: f64,
    /// `e^{ε/4}(1 + ε/2)`.
    pub composed: f64,
    pub holds: bool,
}

impl ErrorBudget {
    pub fn new(eps: f64) -> Self {
        let composed = (eps / 4.0).exp() * (1.0 + eps / 2.0);
        ErrorBudget {
            eps,
            trotter: eps / 4.0,
            estimator: eps / 2.0,
            composed,
            holds: composed <= 1.0 + eps,
        }
    }
}

/// Every size and count that determines the work of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub n: usize,
    pub r: usize,
    pub gates: usize,
    pub idle_qubits: usize,
    pub vertices: usize,
    pub edges: usize,
    /// Absent when the circuit is empty and nothing is sampled.
    pub estimator: Option<EstimatorConfig>,
    pub projected_steps: f64,
}

/// Exact values for small instances. `flags` names stages whose exact
/// values disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub exact_z: f64,
    pub exact_z_trotter: f64,
    pub exact_perfmatch: Option<f64>,
    pub trotter_log_error: f64,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub estimate: f64,
    pub beta: f64,
    pub mode: Mode,
    pub seed: u64,
    pub error_budget: ErrorBudget,
    pub plan: Plan,
    pub estimator: Option<AmplifiedReport>,
    pub cross_check: Option<CrossCheck>,
}

struct Prepared {
    seq: GateSequence,
    graph: Option<WeightedMultigraph>,
    plan: Plan,
}

fn prepare(h: &FerroHamiltonian, cfg: &PipelineConfig) -> Result<Prepared> {
    cfg.validate()?;
    let budget = ErrorBudget::new(cfg.eps);
    let seq = match cfg.r {
        Some(r) => build_sequence_with_r(h, cfg.beta, r)?,
        None => build_sequence(h, cfg.beta, budget.trotter)?,
    };
    let r = match seq.period() {
        Some(p) => p.r,
        None => choose_r(h.n(), cfg.beta, budget.trotter)?,
    };
    let mut plan = Plan {
        n: h.n(),
        r,
        gates: seq.len(),
        idle_qubits: seq.idle_qubits(),
        vertices: 0,
        edges: 0,
        estimator: None,
        projected_steps: 0.0,
    };
    if seq.is_empty() {
        return Ok(Prepared { seq, graph: None, plan });
    }
    let graph = compile_circuit(&seq)?;
    plan.vertices = graph.num_vertices();
    plan.edges = graph.num_edges();
    let ecfg = match cfg.mode {
        Mode::Theory => EstimatorConfig::theory(&graph, budget.estimator, cfg.q_coeff, cfg.seed, cfg.trials)?,
        Mode::Practical => {
            let mut e = EstimatorConfig::practical(
                &graph,
                budget.estimator,
                cfg.samples.unwrap_or(DEFAULT_PRACTICAL_SAMPLES),
                cfg.steps,
                cfg.seed,
                cfg.trials,
            )?;
            e.q_coeff = cfg.q_coeff;
            e.validate()?;
            e
        }
    };
    plan.projected_steps = ecfg.projected_steps(graph.num_vertices() / 2);
    plan.estimator = Some(ecfg);
    Ok(Prepared {
        seq,
        graph: Some(graph),
        plan,
    })
}

/// The parameters a run would use, without running it.
pub fn plan_partition(h: &FerroHamiltonian, cfg: &PipelineConfig) -> Result<Plan> {
    Ok(prepare(h, cfg)?.plan)
}

/// `Z(β, H)` to relative error `ε` (with the estimator's success probability).
pub fn estimate_partition(h: &FerroHamiltonian, cfg: &PipelineConfig) -> Result<PartitionReport> {
    let Prepared { seq, graph, plan } = prepare(h, cfg)?;
    let error_budget = ErrorBudget::new(cfg.eps);
    if !error_budget.holds {
        return Err(Error::InvalidParameter(format!(
            "error split does not compose for eps = {}",
            cfg.eps
        )));
    }
    if cfg.mode == Mode::Theory && plan.projected_steps > cfg.budget {
        return Err(Error::BudgetExceeded {
            projected: plan.projected_steps,
            budget: cfg.budget,
        });
    }
    let idle_factor = 2f64.powi(plan.idle_qubits as i32);
    let (estimate, estimator) = match (&graph, &plan.estimator) {
        (Some(g), Some(ecfg)) => {
            let rep = estimate_perfmatch(g, ecfg)?;
            (idle_factor * rep.estimate, Some(rep))
        }
        // No gates: the product is the identity.
        _ => (idle_factor, None),
    };
    let cross_check = if cfg.cross_check {
        Some(cross_check(h, cfg.beta, &seq, graph.as_ref(), plan.idle_qubits)?)
    } else {
        None
    };
    Ok(PartitionReport {
        estimate,
        beta: cfg.beta,
        mode: cfg.mode,
        seed: cfg.seed,
        error_budget,
        plan,
        estimator,
        cross_check,
    })
}

fn cross_check(
    h: &FerroHamiltonian,
    beta: f64,
    seq: &GateSequence,
    graph: Option<&WeightedMultigraph>,
    idle: usize,
) -> Result<CrossCheck> {
    if h.n() > CROSS_CHECK_MAX_QUBITS {
        return Err(Error::DimensionTooLarge {
            n: h.n(),
            cap: CROSS_CHECK_MAX_QUBITS,
        });
    }
    let log_z = h.exact_log_partition(beta)?;
    let log_zj = seq.log_trace()?;
    let exact_perfmatch = match graph {
        Some(g) if g.num_vertices() <= MATCHING_ORACLE_CAP => Some(perfmatch_exact(g)?),
        Some(_) => None,
        None => Some(1.0),
    };
    let mut flags = Vec::new();
    if let Some(pm) = exact_perfmatch {
        let traced = pm * 2f64.powi(idle as i32);
        let zj = log_zj.exp();
        if ((traced - zj) / zj).abs() > CROSS_CHECK_TOL {
            flags.push(format!("trace identity: PerfMatch gives {traced}, dense trace {zj}"));
        }
    }
    Ok(CrossCheck {
        exact_z: log_z.exp(),
        exact_z_trotter: log_zj.exp(),
        exact_perfmatch,
        trotter_log_error: (log_zj - log_z).abs(),
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyReport {
    pub free_energy: f64,
    pub beta: f64,
    pub delta_abs: f64,
    /// Relative error requested from the partition-function estimate.
    pub eps: f64,
    pub partition: PartitionReport,
}

/// `ε = min(1/2, βΔ/2)`: a relative error `ε ≤ 1/2` on `Z` moves
/// `−β⁻¹ ln Z` by at most `2ε/β ≤ Δ`.
pub fn free_energy_eps(beta: f64, delta_abs: f64) -> f64 {
    (beta * delta_abs / 2.0).min(0.5)
}

/// `F(β) = −β⁻¹ ln Z(β, H)` to absolute error `Δ`. `cfg.beta` is replaced
/// by `beta` and `cfg.eps` by [`free_energy_eps`].
pub fn estimate_free_energy(
    h: &FerroHamiltonian,
    beta: f64,
    delta_abs: f64,
    cfg: &PipelineConfig,
) -> Result<FreeEnergyReport> {
    if !(delta_abs > 0.0 && delta_abs.is_finite()) {
        return Err(Error::OutOfRange {
            what: "delta".into(),
            value: delta_abs,
            range: "(0, inf)",
        });
    }
    let eps = free_energy_eps(beta, delta_abs);
    let run = PipelineConfig {
        beta,
        eps,
        ..cfg.clone()
    };
    let partition = estimate_partition(h, &run)?;
    Ok(FreeEnergyReport {
        free_energy: -partition.estimate.ln() / beta,
        beta,
        delta_abs,
        eps,
        partition,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundEnergyReport {
    pub ground_energy: f64,
    pub delta_abs: f64,
    pub free_energy: FreeEnergyReport,
}

/// `β = 2n/Δ`.
pub fn ground_state_beta(n: usize, delta_abs: f64) -> f64 {
    2.0 * n as f64 / delta_abs
}

/// `E_0` to absolute error `Δ`: at `β = 2n/Δ`, `0 ≤ E_0 − F ≤ n ln2/β < Δ/2`,
/// and `F` is estimated to `Δ/2`.
pub fn estimate_ground_energy(h: &FerroHamiltonian, delta_abs: f64, cfg: &PipelineConfig) -> Result<GroundEnergyReport> {
    if !(delta_abs > 0.0 && delta_abs.is_finite()) {
        return Err(Error::OutOfRange {
            what: "delta".into(),
            value: delta_abs,
            range: "(0, inf)",
        });
    }
    let beta = ground_state_beta(h.n(), delta_abs);
    let free_energy = estimate_free_energy(h, beta, delta_abs / 2.0, cfg)?;
    Ok(GroundEnergyReport {
        ground_energy: free_energy.free_energy,
        delta_abs,
        free_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::RawHamiltonian;

    fn field_one() -> FerroHamiltonian {
        RawHamiltonian::new(1).field(1, 1.0).validate().unwrap()
    }

    #[test]
    fn error_budget_composes_on_unit_interval() {
        for k in 1..100 {
            let b = ErrorBudget::new(k as f64 / 100.0);
            assert!(b.holds, "eps {}", b.eps);
            assert_eq!(b.trotter * 2.0, b.estimator);
        }
    }

    #[test]
    fn zero_hamiltonian_is_two_to_the_n() {
        let h = RawHamiltonian::new(3).validate().unwrap();
        let rep = estimate_partition(&h, &PipelineConfig::default()).unwrap();
        assert_eq!(rep.estimate, 8.0);
        assert!(rep.estimator.is_none());
        let f = estimate_free_energy(&h, 2.0, 0.1, &PipelineConfig::default()).unwrap();
        assert!((f.free_energy + 3.0 * 2f64.ln() / 2.0).abs() < 1e-15);
        let e0 = estimate_ground_energy(&h, 0.5, &PipelineConfig::default()).unwrap();
        assert!(e0.ground_energy.abs() <= 0.5);
    }

    #[test]
    fn free_energy_eps_rule() {
        assert_eq!(free_energy_eps(1.0, 0.05), 0.025);
        assert_eq!(free_energy_eps(1.0, 0.025), 0.0125);
        assert_eq!(free_energy_eps(10.0, 1.0), 0.5);
        assert_eq!(ground_state_beta(2, 0.5), 8.0);
    }

    #[test]
    fn idle_qubits_double_the_estimate() {
        // Qubit 2 carries no terms.
        let h = RawHamiltonian::new(2).field(1, 1.0).validate().unwrap();
        let cfg = PipelineConfig {
            r: Some(1),
            samples: Some(200),
            steps: Some(50),
            cross_check: true,
            ..Default::default()
        };
        let rep = estimate_partition(&h, &cfg).unwrap();
        assert_eq!(rep.plan.idle_qubits, 1);
        // One f gate wrapped twice: the graph is a 4-cycle, N = 2, one level.
        assert_eq!(rep.plan.vertices, 4);
        let cc = rep.cross_check.unwrap();
        assert!(cc.flags.is_empty(), "{:?}", cc.flags);
        assert!((cc.exact_perfmatch.unwrap() * 2.0 - cc.exact_z_trotter).abs() < 1e-12);
    }

    #[test]
    fn single_field_end_to_end() {
        let h = field_one();
        let exact = h.exact_partition(1.0).unwrap();
        let mut hits = 0;
        for seed in 0..20 {
            let cfg = PipelineConfig {
                r: Some(1),
                samples: Some(3000),
                steps: Some(100),
                seed,
                ..Default::default()
            };
            let rep = estimate_partition(&h, &cfg).unwrap();
            if (rep.estimate / exact - 1.0).abs() <= 0.1 {
                hits += 1;
            }
        }
        assert!(hits >= 15, "{hits}/20");
    }

    #[test]
    fn theory_mode_refuses_large_runs() {
        let h = RawHamiltonian::new(2).pair(1, 2, 1.0, 0.5).validate().unwrap();
        let cfg = PipelineConfig {
            mode: Mode::Theory,
            beta: 0.5,
            ..Default::default()
        };
        let plan = plan_partition(&h, &cfg).unwrap();
        assert!(plan.projected_steps > DEFAULT_THEORY_BUDGET);
        assert!(matches!(
            estimate_partition(&h, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn config_validation() {
        let h = field_one();
        for bad in [
            PipelineConfig { beta: 0.0, ..Default::default() },
            PipelineConfig { eps: 1.0, ..Default::default() },
            PipelineConfig { trials: 2, ..Default::default() },
        ] {
            assert!(estimate_partition(&h, &bad).is_err());
        }
        assert!(estimate_free_energy(&h, 1.0, 0.0, &PipelineConfig::default()).is_err());
    }
}
