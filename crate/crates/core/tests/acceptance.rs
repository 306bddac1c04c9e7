//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line with the measured quantity. Every tolerance, sample
//! count, and seed is pinned below.

mod common;

use std::time::{Duration, Instant};

use common::{open_unit, random_circuit, random_graph, random_hamiltonian, rel_err, rng};
use qferro::dense::{embed_one, Matrix};
use qferro::estimator::{algorithm_b, EstimatorConfig, McmcSampler};
use qferro::exact::{all_omegas, check_log_concavity, nearperfmatch_exact, perfmatch_exact};
use qferro::hamiltonian::RawHamiltonian;
use qferro::matchgraph::{compile_circuit, gadget_for, implemented_gate, WeightedMultigraph};
use qferro::pipeline::{estimate_partition, PipelineConfig};
use qferro::sampler::{
    default_steps, sample_many, stationary_exact_scaled, transition_matrix, SamplerConfig, WeightView,
};
use qferro::trotter::{
    build_sequence, build_sequence_with_r, choose_r, f_local, g_local, h_local, verify_magnus, verify_prop1,
    Gate, GateSequence,
};
use qferro::Mode;
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {id:>2} {name:<28} {}  {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

// ---------------------------------------------------------------------------
// 1. Gadget fidelity
// ---------------------------------------------------------------------------

const GADGET_TOL: f64 = 1e-12;
const GADGET_TS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// `|1⟩⟨0|` on bit `k` of an `m`-bit register.
fn raise(m: usize, k: usize) -> Matrix {
    embed_one(&Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]), m, k)
}

/// `|0⟩⟨1|` on bit `k`.
fn lower(m: usize, k: usize) -> Matrix {
    raise(m, k).transpose()
}

/// Worst entry error over every nonempty set of at most two dangling edges,
/// against `(Π_{out k} |0⟩⟨1|_k) G (Π_{in k} |1⟩⟨0|_k)`. Returns the error
/// and the number of variants checked.
fn dangling_variants(gate: &Gate, local: &Matrix) -> (f64, usize) {
    let gd = gadget_for(gate);
    let m = gd.arity();
    // (vertex, is_input, slot) for every distinguished vertex.
    let mut spots = Vec::new();
    for k in 0..m {
        spots.push((gd.inputs[k], true, k));
        spots.push((gd.outputs[k], false, k));
    }
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut subsets: Vec<Vec<usize>> = (0..spots.len()).map(|a| vec![a]).collect();
    for a in 0..spots.len() {
        for b in a + 1..spots.len() {
            subsets.push(vec![a, b]);
        }
    }
    for subset in subsets {
        let at: Vec<usize> = subset.iter().map(|&s| spots[s].0).collect();
        let got = implemented_gate(&gd.with_dangling(&at).unwrap()).unwrap();
        let mut expect = local.clone();
        for &s in &subset {
            let (_, is_input, k) = spots[s];
            expect = if is_input { &expect * raise(m, k) } else { lower(m, k) * &expect };
        }
        worst = worst.max((got - expect).amax());
        count += 1;
    }
    (worst, count)
}

#[test]
fn criterion_01_gadget_fidelity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut variants = (0, 0);
    for &t in &GADGET_TS {
        let f = Gate::f(0, t).unwrap();
        let g = Gate::g(0, 1, t).unwrap();
        let h = Gate::h(0, 1, t).unwrap();
        worst = worst.max((implemented_gate(&gadget_for(&f)).unwrap() - f_local(t)).amax());
        worst = worst.max((implemented_gate(&gadget_for(&g)).unwrap() - g_local(t)).amax());
        worst = worst.max((implemented_gate(&gadget_for(&h)).unwrap() - h_local(t)).amax());
        let (eg, ng) = dangling_variants(&g, &g_local(t));
        let (eh, nh) = dangling_variants(&h, &h_local(t));
        worst = worst.max(eg).max(eh);
        variants = (ng, nh);
    }
    let elapsed = start.elapsed();
    let pass = worst <= GADGET_TOL && variants == (10, 10) && within(elapsed, 1);
    report(
        1,
        "gadget fidelity",
        pass,
        format!("max entry error {worst:.2e}, dangling variants g={} h={}, {elapsed:.2?}", variants.0, variants.1),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 2. Trace identity
// ---------------------------------------------------------------------------

const TRACE_TOL: f64 = 1e-9;

#[test]
fn criterion_02_trace_identity() {
    let start = Instant::now();
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.gen_range(1..=3);
        let len = r.gen_range(1..=8);
        let seq = random_circuit(&mut r, n, len);
        let g = compile_circuit(&seq).unwrap();
        let traced = perfmatch_exact(&g).unwrap() * 2f64.powi(seq.idle_qubits() as i32);
        let dense = seq.dense_product().unwrap().trace();
        worst = worst.max(((traced - dense) / dense).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= TRACE_TOL && within(elapsed, 30);
    report(2, "trace identity", pass, format!("max rel error {worst:.2e} over 100 circuits, {elapsed:.2?}"));
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 3. Trotter accuracy
// ---------------------------------------------------------------------------

const TROTTER_EPS: f64 = 0.5;
/// Accepted range for the error ratio under one doubling of `r`.
const SLOPE_RATIO: (f64, f64) = (1.6, 2.4);
const SLOPE_R0: usize = 8;

#[test]
fn criterion_03_trotter_accuracy() {
    let start = Instant::now();
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let n = 1 + case % 2;
        let beta = if case < 5 { 0.5 } else { 1.0 };
        let h = random_hamiltonian(&mut r, n);
        let seq = build_sequence(&h, beta, TROTTER_EPS).unwrap();
        let err = (seq.log_trace().unwrap() - h.exact_log_partition(beta).unwrap()).abs();
        assert_eq!(seq.period().unwrap().r, choose_r(n, beta, TROTTER_EPS).unwrap());
        worst = worst.max(err / (TROTTER_EPS / 4.0));
    }
    // Convergence slope: error roughly halves per doubling of r.
    let h = RawHamiltonian::new(2)
        .pair(1, 2, 0.8, 0.3)
        .field(1, 0.4)
        .field(2, -0.2)
        .validate()
        .unwrap();
    let beta = 1.0;
    let log_z = h.exact_log_partition(beta).unwrap();
    let errs: Vec<f64> = (0..4)
        .map(|k| {
            let seq = build_sequence_with_r(&h, beta, SLOPE_R0 << k).unwrap();
            (seq.log_trace().unwrap() - log_z).abs()
        })
        .collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let slope_ok = ratios.iter().all(|q| (SLOPE_RATIO.0..=SLOPE_RATIO.1).contains(q));
    let elapsed = start.elapsed();
    let pass = worst <= 1.0 && slope_ok && within(elapsed, 300);
    report(
        3,
        "trotter accuracy",
        pass,
        format!("max error/(eps/4) {worst:.3}, doubling ratios {ratios:.3?}, {elapsed:.2?}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 4. Remainder and Magnus bounds
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_remainder_and_magnus_bounds() {
    let start = Instant::now();
    let mut worst_prop = 0.0f64;
    for k in 1..=20 {
        let t = k as f64 / 21.0;
        let norms = verify_prop1(t).unwrap();
        worst_prop = worst_prop.max(norms.e_norm.max(norms.f_norm) / (t * t));
    }
    let mut r = rng(4);
    let mut worst_magnus = 0.0f64;
    for _ in 0..5 {
        let h = random_hamiltonian(&mut r, 2);
        let beta = r.gen_range(0.2..1.0);
        let seq = build_sequence(&h, beta, 0.5).unwrap();
        let d = verify_magnus(&seq, beta, &h).unwrap();
        worst_magnus = worst_magnus.max(d.magnus_delta_norm / d.magnus_bound);
    }
    let elapsed = start.elapsed();
    let pass = worst_prop <= 1.0 && worst_magnus <= 1.0 && within(elapsed, 10);
    report(
        4,
        "remainder/magnus bounds",
        pass,
        format!("max |E(t)|/t^2 {worst_prop:.3}, max |Delta|/bound {worst_magnus:.3e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 5. Log-concavity
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_log_concavity() {
    let start = Instant::now();
    let mut r = rng(5);
    let mut violations = 0;
    for _ in 0..50 {
        let nv = r.gen_range(2..=12);
        let ne = r.gen_range(1..=24);
        let g = random_graph(&mut r, nv, ne, 0.05, 3.0);
        let lc = check_log_concavity(&g).unwrap();
        violations += (!lc.holds) as usize + (!lc.ratios_monotone) as usize;
    }
    let elapsed = start.elapsed();
    let pass = violations == 0 && within(elapsed, 30);
    report(5, "log-concavity", pass, format!("{violations} violations in 50 graphs, {elapsed:.2?}"));
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 6. Ratio bound and Omega decomposition
// ---------------------------------------------------------------------------

const RATIO_COEFF: f64 = 10.0;
const OMEGA_REL_TOL: f64 = 1e-12;

#[test]
fn criterion_06_ratio_bound() {
    let start = Instant::now();
    let mut r = rng(6);
    let mut worst_ratio = 0.0f64;
    let mut worst_omega = 0.0f64;
    for _ in 0..20 {
        let n = r.gen_range(1..=3);
        let j = r.gen_range(1..=8);
        let seq = random_circuit(&mut r, n, j);
        let g = compile_circuit(&seq).unwrap();
        let pm = perfmatch_exact(&g).unwrap();
        let near = nearperfmatch_exact(&g).unwrap();
        worst_ratio = worst_ratio.max(near / pm / (RATIO_COEFF * (j * j) as f64));
        let sum: f64 = all_omegas(&g).unwrap().iter().map(|(_, w)| w).sum();
        worst_omega = worst_omega.max(((sum - near) / near).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst_ratio <= 1.0 && worst_omega <= OMEGA_REL_TOL && within(elapsed, 120);
    report(
        6,
        "ratio bound",
        pass,
        format!("max ratio/(10 J^2) {worst_ratio:.3}, omega sum rel error {worst_omega:.1e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 7. Sampler correctness
// ---------------------------------------------------------------------------

const BALANCE_TOL: f64 = 1e-14;
const TV_LIMIT: f64 = 0.05;
const TV_SAMPLES: usize = 100_000;
const TV_DELTA: f64 = 0.1;

/// Every edge multiset of size at most 4 drawn from `pool`.
fn multisets(pool: &[(usize, usize)], max: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(pool: &[(usize, usize)], from: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>, repeat: bool) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            go(pool, if repeat { i } else { i + 1 }, left - 1, cur, out, repeat);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, 0, max, &mut Vec::new(), &mut out, false);
    out
}

fn multisets_with_repeats(pool: &[(usize, usize)], max: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(pool: &[(usize, usize)], from: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in from..pool.len() {
            cur.push(pool[i]);
            go(pool, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, 0, max, &mut Vec::new(), &mut out);
    out
}

fn complete(nv: usize) -> Vec<(usize, usize)> {
    (0..nv).flat_map(|u| (u + 1..nv).map(move |v| (u, v))).collect()
}

fn tv_graphs() -> Vec<(&'static str, WeightedMultigraph)> {
    vec![
        ("single edge w=3", WeightedMultigraph::from_edges(2, &[(0, 1, 3.0)]).unwrap()),
        ("path P4", WeightedMultigraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap()),
        (
            "weighted K4",
            WeightedMultigraph::from_edges(
                4,
                &[(0, 1, 0.5), (0, 2, 1.5), (0, 3, 1.0), (1, 2, 2.0), (1, 3, 0.7), (2, 3, 1.2)],
            )
            .unwrap(),
        ),
        (
            "weighted 6-cycle with chord",
            WeightedMultigraph::from_edges(
                6,
                &[(0, 1, 1.0), (1, 2, 0.4), (2, 3, 1.8), (3, 4, 1.0), (4, 5, 0.6), (5, 0, 1.3), (0, 3, 0.9)],
            )
            .unwrap(),
        ),
        ("compiled g gadget loop", {
            let seq = GateSequence::from_gates(2, vec![Gate::g(0, 1, 0.6).unwrap(), Gate::f(0, 0.8).unwrap()]).unwrap();
            compile_circuit(&seq).unwrap()
        }),
    ]
}

#[test]
fn criterion_07_sampler_correctness() {
    let start = Instant::now();
    let mut r = rng(7);
    // Detailed balance on every simple graph with at most 4 edges (labeled on
    // 8 vertices, which realizes every isomorphism class) and on every
    // multigraph with at most 4 edges on 4 vertices.
    let mut edge_sets = multisets(&complete(8), 4);
    edge_sets.extend(multisets_with_repeats(&complete(4), 4).into_iter().filter(|s| {
        s.windows(2).any(|w| w[0] == w[1])
    }));
    let mut worst_balance = 0.0f64;
    let mut worst_row = 0.0f64;
    let mut min_diag = f64::INFINITY;
    for edges in &edge_sets {
        let weighted: Vec<(usize, usize, f64)> = edges.iter().map(|&(u, v)| (u, v, r.gen_range(0.1..3.0))).collect();
        let g = WeightedMultigraph::from_edges(8, &weighted).unwrap();
        let view = WeightView::new(&g, r.gen_range(0.3..3.0));
        let table = stationary_exact_scaled(&view).unwrap();
        let p = transition_matrix(&view, &table).unwrap();
        for i in 0..table.len() {
            worst_row = worst_row.max((p.row(i).sum() - 1.0).abs());
            min_diag = min_diag.min(p[(i, i)]);
            for j in 0..table.len() {
                worst_balance = worst_balance.max((table.probs[i] * p[(i, j)] - table.probs[j] * p[(j, i)]).abs());
            }
        }
    }
    let mut tvs = Vec::new();
    for (name, g) in tv_graphs() {
        let steps = default_steps(&g, TV_DELTA, Mode::Practical).unwrap();
        let cfg = SamplerConfig::new(steps, Mode::Practical, 0x7777).unwrap();
        let (samples, _) = sample_many(&WeightView::plain(&g), &cfg, &[], TV_SAMPLES);
        let tv = qferro::sampler::stationary_exact(&g).unwrap().tv_distance(&samples);
        tvs.push((name, steps, tv));
    }
    let worst_tv = tvs.iter().map(|t| t.2).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let pass = worst_balance <= BALANCE_TOL
        && worst_row <= BALANCE_TOL
        && min_diag > 0.0
        && worst_tv <= TV_LIMIT
        && within(elapsed, 300);
    report(
        7,
        "sampler correctness",
        pass,
        format!(
            "{} graphs balanced (max defect {worst_balance:.1e}), max TV {worst_tv:.4}, {elapsed:.2?}",
            edge_sets.len()
        ),
    );
    for (name, steps, tv) in &tvs {
        println!("    {name:<28} steps {steps:>6}  TV {tv:.4}");
    }
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 8. Estimator
// ---------------------------------------------------------------------------

const EST_TRIALS: u64 = 20;
const EST_REQUIRED: usize = 15;
const EST_REL_TOL: f64 = 0.2;
const EST_SAMPLES: usize = 6000;
/// Chain length per sample as a multiple of `|E||V|`.
const EST_STEP_FACTOR: u64 = 2;

fn estimator_graphs() -> Vec<(&'static str, WeightedMultigraph)> {
    let mut r = rng(8);
    let mut out = vec![
        (
            "4-cycle",
            WeightedMultigraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap(),
        ),
        (
            "weighted K4",
            WeightedMultigraph::from_edges(
                4,
                &[(0, 1, 0.5), (0, 2, 1.5), (0, 3, 1.0), (1, 2, 2.0), (1, 3, 0.7), (2, 3, 1.2)],
            )
            .unwrap(),
        ),
        (
            "weighted 6-cycle",
            WeightedMultigraph::from_edges(
                6,
                &[(0, 1, 0.8), (1, 2, 1.2), (2, 3, 0.5), (3, 4, 1.7), (4, 5, 1.0), (5, 0, 0.6)],
            )
            .unwrap(),
        ),
        (
            "prism",
            WeightedMultigraph::from_edges(
                6,
                &[
                    (0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 3, 1.0),
                    (0, 3, 0.5), (1, 4, 0.5), (2, 5, 0.5),
                ],
            )
            .unwrap(),
        ),
        ("K3,3", {
            let edges: Vec<(usize, usize, f64)> =
                (0..3).flat_map(|a| (3..6).map(move |b| (a, b, 0.4 + 0.3 * ((a + b) % 3) as f64))).collect();
            WeightedMultigraph::from_edges(6, &edges).unwrap()
        }),
        ("cube", {
            let mut edges = Vec::new();
            for v in 0..8usize {
                for bit in 0..3 {
                    let u = v ^ (1 << bit);
                    if v < u {
                        edges.push((v, u, 0.5 + 0.25 * bit as f64));
                    }
                }
            }
            WeightedMultigraph::from_edges(8, &edges).unwrap()
        }),
        ("ladder 2x5", {
            let mut edges = Vec::new();
            for k in 0..5 {
                edges.push((2 * k, 2 * k + 1, 1.0));
                if k + 1 < 5 {
                    edges.push((2 * k, 2 * k + 2, 0.8));
                    edges.push((2 * k + 1, 2 * k + 3, 1.3));
                }
            }
            WeightedMultigraph::from_edges(10, &edges).unwrap()
        }),
        (
            "XY circuit graph",
            compile_circuit(
                &build_sequence_with_r(&RawHamiltonian::new(2).pair(1, 2, 1.0, -1.0).validate().unwrap(), 0.5, 1)
                    .unwrap(),
            )
            .unwrap(),
        ),
    ];
    // Two random graphs with a Hamiltonian cycle so PerfMatch > 0.
    for nv in [8usize, 12] {
        let mut edges: Vec<(usize, usize, f64)> = (0..nv).map(|v| (v, (v + 1) % nv, r.gen_range(0.3..2.0))).collect();
        for _ in 0..nv / 2 {
            let u = r.gen_range(0..nv);
            let v = r.gen_range(0..nv);
            if u != v {
                edges.push((u, v, open_unit(&mut r) + 0.2));
            }
        }
        out.push((if nv == 8 { "random 8" } else { "random 12" }, WeightedMultigraph::from_edges(nv, &edges).unwrap()));
    }
    out
}

#[test]
fn criterion_08_estimator() {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (name, g) in estimator_graphs() {
        assert!(g.num_vertices() <= 12);
        let exact = perfmatch_exact(&g).unwrap();
        let steps = EST_STEP_FACTOR * (g.num_edges() * g.num_vertices()) as u64;
        let cfg = EstimatorConfig::practical(&g, EST_REL_TOL, EST_SAMPLES, Some(steps), 0x8888, 1).unwrap();
        let sampler = McmcSampler { steps, seed: cfg.seed };
        let hits = (0..EST_TRIALS)
            .filter(|&t| {
                let rep = algorithm_b(&g, &cfg, &sampler, t).unwrap();
                rep.estimate.is_some_and(|e| rel_err(e, exact) <= EST_REL_TOL)
            })
            .count();
        all_ok &= hits >= EST_REQUIRED;
        rows.push((name, g.num_vertices(), exact, hits));
    }
    let elapsed = start.elapsed();
    let pass = all_ok && within(elapsed, 900);
    let min_hits = rows.iter().map(|r| r.3).min().unwrap();
    report(8, "estimator", pass, format!("min hits {min_hits}/20 over {} graphs, {elapsed:.2?}", rows.len()));
    for (name, nv, exact, hits) in &rows {
        println!("    {name:<18} |V|={nv:>2} PerfMatch {exact:>10.4}  hits {hits}/20");
    }
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 9. End to end
// ---------------------------------------------------------------------------

const E2E_REL_TOL: f64 = 0.15;
const E2E_SAMPLES: usize = 12_000;
const E2E_STEPS: u64 = 300;

#[test]
fn criterion_09_end_to_end() {
    let start = Instant::now();
    let cases = [
        ("n=1 d=1 beta=1", RawHamiltonian::new(1).field(1, 1.0).validate().unwrap(), 1.0),
        ("n=2 XY beta=0.5", RawHamiltonian::new(2).pair(1, 2, 1.0, -1.0).validate().unwrap(), 0.5),
    ];
    let mut rows = Vec::new();
    for (name, h, beta) in cases {
        let exact = h.exact_partition(beta).unwrap();
        let hits = (0..20u64)
            .filter(|&seed| {
                let cfg = PipelineConfig {
                    beta,
                    eps: 0.5,
                    r: Some(1),
                    samples: Some(E2E_SAMPLES),
                    steps: Some(E2E_STEPS),
                    seed,
                    ..Default::default()
                };
                let rep = estimate_partition(&h, &cfg).unwrap();
                rel_err(rep.estimate, exact) <= E2E_REL_TOL
            })
            .count();
        rows.push((name, exact, hits));
    }
    let elapsed = start.elapsed();
    let pass = rows.iter().all(|r| r.2 >= 15) && within(elapsed, 1800);
    report(
        9,
        "end to end",
        pass,
        format!(
            "{}; {elapsed:.2?}",
            rows.iter().map(|(n, z, h)| format!("{n}: Z={z:.4} hits {h}/20")).collect::<Vec<_>>().join("; ")
        ),
    );
    assert!(pass);
}

// ---------------------------------------------------------------------------
// 10. Determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_determinism() {
    let h = RawHamiltonian::new(2).pair(1, 2, 0.9, 0.2).field(1, 0.3).validate().unwrap();
    let cfg = PipelineConfig {
        beta: 0.5,
        r: Some(1),
        samples: Some(2000),
        steps: Some(200),
        seed: 1234,
        trials: 3,
        cross_check: true,
        ..Default::default()
    };
    let json = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string(&estimate_partition(&h, &cfg).unwrap()).unwrap())
    };
    let a = json(1);
    let b = json(1);
    let c = json(4);
    let other_seed = {
        let alt = PipelineConfig { seed: 4321, ..cfg.clone() };
        serde_json::to_string(&estimate_partition(&h, &alt).unwrap()).unwrap()
    };
    let pass = a == b && a == c && a != other_seed;
    report(
        10,
        "determinism",
        pass,
        format!("{} byte report identical across repeats and 1/4 threads", a.len()),
    );
    assert!(pass);
}
