mod common;

use std::collections::BTreeMap;

use common::intensity_by_quadrature;
use ctbp_select::engine::{
    next_offspring_time, simulate, simulate_observed, simulate_with_retries, ClockSample, CollapsedVertex, CtbpNode,
    SimObserver, SimOutcome,
};
use ctbp_select::model::{AgingSpec, BatchRate, ModelClass, ModelConfig, OutDegreePmf, PrefAttachSpec};
use ctbp_select::seed::SimRng;
use ctbp_select::Error;
use proptest::prelude::*;
use rand::SeedableRng;

fn config(class: ModelClass, params: &[(&str, f64)]) -> ModelConfig {
    let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    ModelConfig::from_params(class, &map, OutDegreePmf::default_shared()).unwrap()
}

#[derive(Default)]
struct Trace {
    clocks: Vec<ClockSample>,
    fires: Vec<(f64, u32, u32, u32)>,
}

impl SimObserver for Trace {
    fn on_clock(&mut self, sample: &ClockSample) {
        self.clocks.push(*sample);
    }
    fn on_fire(&mut self, time: f64, parent: u32, child: u32, child_batch: u32) {
        self.fires.push((time, parent, child, child_batch));
    }
}

/// Replays a trace against the collapsing rules: batches fill in arrival
/// order, every member inherits the first member's birth time and fitness,
/// the rate is `eta * f(k) * share`, and each clock solves the integrated
/// intensity equation.
fn check_trace(cfg: &ModelConfig, trace: &Trace, vertices: &[CollapsedVertex], edges_out: &[(f64, u32, u32)]) {
    let pa = *cfg.pa();
    let aging = *cfg.aging();
    let mut node_batch = vec![0u32];
    let mut node_children = vec![0u32];
    let mut births = vec![0.0f64];
    let mut filled = vec![1u32];
    let mut pending: BTreeMap<u32, f64> = BTreeMap::new();
    let mut clocks = trace.clocks.iter();

    let mut check_clock = |node: u32, now: f64, node_batch: &[u32], node_children: &[u32], births: &[f64]| {
        let c = clocks.next().expect("a clock per scheduling");
        let b = node_batch[node as usize];
        let v = &vertices[b as usize];
        assert_eq!(c.node, node);
        assert_eq!(c.batch, b);
        assert_eq!(c.birth_reference, births[b as usize], "member shares the batch birth time");
        assert_eq!(c.now, now);
        assert_eq!(c.indegree, node_children[node as usize]);
        let share = cfg.batch_rate().share(v.out_target.unwrap());
        let expected_rate = v.fitness.unwrap() * pa.value(c.indegree as u64) * share;
        assert!((c.rate_factor - expected_rate).abs() <= 1e-12 * expected_rate);
        if c.next_time.is_finite() {
            let mass = intensity_by_quadrature(&aging, c.rate_factor, c.birth_reference, c.now, c.next_time);
            assert!((mass - c.draw).abs() <= 1e-6 * c.draw.max(1.0), "quadrature {mass} vs draw {}", c.draw);
        } else {
            let remaining = c.rate_factor * aging.remaining(c.now - c.birth_reference);
            assert!(remaining <= c.draw);
        }
        c.next_time
    };

    let t0 = check_clock(0, 0.0, &node_batch, &node_children, &births);
    pending.insert(0, t0);
    for (k, &(time, parent, child, child_batch)) in trace.fires.iter().enumerate() {
        // the earliest pending clock fires
        let (&first, &t_first) = pending.iter().min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0))).unwrap();
        assert_eq!((first, t_first), (parent, time), "fire {k}");
        pending.remove(&parent);
        assert_eq!(child as usize, node_batch.len());
        let open = births.len() - 1;
        let expected_batch = if filled[open] >= vertices[open].out_target.unwrap() {
            births.push(time);
            filled.push(1);
            open + 1
        } else {
            filled[open] += 1;
            open
        };
        assert_eq!(child_batch as usize, expected_batch);
        node_batch.push(child_batch);
        node_children.push(0);
        assert_eq!(edges_out[k], (time, child_batch, node_batch[parent as usize]));
        if births.len() == vertices.len() && expected_batch == open + 1 {
            assert_eq!(k + 1, trace.fires.len(), "run stops when the target vertex opens");
            break;
        }
        node_children[parent as usize] += 1;
        for node in [parent, child] {
            let t = check_clock(node, time, &node_batch, &node_children, &births);
            if t.is_finite() {
                pending.insert(node, t);
            }
        }
    }
    for (v, &b) in vertices.iter().zip(&births) {
        assert_eq!(v.birth_time, b);
    }
}

#[test]
fn ten_vertex_traces_follow_the_collapsing_rules() {
    let cases = [
        config(ModelClass::AP, &[("a", 3.5), ("b", 2.0), ("mu", 0.5), ("sigma", 1.0)]),
        config(ModelClass::FExpAP, &[("a", 1.5), ("b", 2.0), ("lambda", 0.8), ("mu", 1.0), ("sigma", 1.0)]),
        config(ModelClass::FPlA, &[("x_min", 0.8), ("tau", 2.3), ("mu", 0.2), ("sigma", 1.0)]),
        config(ModelClass::P, &[("a", 2.0), ("b", 1.0)]),
        config(ModelClass::FUnifP, &[("a", 1.0), ("b", 3.0), ("c", 0.5), ("d", 2.0)]),
    ];
    let mut checked = 0;
    for cfg in &cases {
        for mode in [BatchRate::Undivided, BatchRate::Divided] {
            let cfg = cfg.clone().with_batch_rate(mode);
            for seed in 0..20 {
                let mut trace = Trace::default();
                let mut rng = SimRng::seed_from_u64(seed);
                if let SimOutcome::Survived(rec) = simulate_observed(&cfg, 10, &mut rng, None, &mut trace) {
                    let edges: Vec<(f64, u32, u32)> = rec.edges.iter().map(|e| (e.time, e.source, e.target)).collect();
                    check_trace(&cfg, &trace, &rec.vertices, &edges);
                    assert_eq!(rec.num_vertices(), 10);
                    rec.validate().unwrap();
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 50, "only {checked} surviving traces");
}

#[test]
fn constant_rate_clock_is_exponential() {
    let owner = CollapsedVertex {
        birth_time: 0.0,
        fitness: Some(2.0),
        out_target: Some(4),
        members_born: 1,
    };
    let node = CtbpNode {
        id: 0,
        batch_id: 0,
        indegree: 3,
        next_event_time: 0.0,
    };
    let pa = PrefAttachSpec::Affine { a: 1.0, b: 1.0 };
    let t = next_offspring_time(&node, &owner, &AgingSpec::None, &pa, BatchRate::Divided, 1.0, 0.7);
    // rate 2 * 4 / 4 = 2
    assert!((t - 1.35).abs() < 1e-12);
    let t = next_offspring_time(&node, &owner, &AgingSpec::None, &pa, BatchRate::Undivided, 1.0, 0.8);
    assert!((t - 1.1).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn aging_clock_matches_quadrature(
        mu in 0.1f64..3.0,
        eta in 0.05f64..5.0,
        k in 0u32..20,
        age in 0.0f64..30.0,
        draw in 1e-4f64..3.0,
    ) {
        let aging = AgingSpec::Lognormal { mu, sigma: 1.0 };
        let pa = PrefAttachSpec::Affine { a: 1.3, b: 2.0 };
        let owner = CollapsedVertex { birth_time: 1.0, fitness: Some(eta), out_target: Some(3), members_born: 3 };
        let node = CtbpNode { id: 5, batch_id: 0, indegree: k, next_event_time: 0.0 };
        let now = 1.0 + age;
        let rate = eta * pa.value(k as u64);
        let t = next_offspring_time(&node, &owner, &aging, &pa, BatchRate::Undivided, now, draw);
        if t.is_finite() {
            prop_assert!(t > now);
            let mass = intensity_by_quadrature(&aging, rate, 1.0, now, t);
            prop_assert!((mass - draw).abs() <= 1e-6 * draw.max(1.0), "mass {} draw {}", mass, draw);
        } else {
            prop_assert!(rate * aging.remaining(age) <= draw * (1.0 + 1e-12));
        }
    }
}

#[test]
fn preferential_attachment_favours_old_vertices() {
    let cfg = config(ModelClass::P, &[("a", 1.0), ("b", 1.0)]);
    let mut decile_means = vec![0.0; 10];
    for seed in 0..5 {
        let rec = simulate(&cfg, 2000, &mut SimRng::seed_from_u64(seed), None).survived().unwrap();
        let deg = rec.in_degrees();
        for (d, chunk) in decile_means.iter_mut().zip(deg.chunks(200)) {
            *d += chunk.iter().map(|&x| x as f64).sum::<f64>() / 200.0;
        }
    }
    assert!(
        decile_means.windows(2).all(|w| w[0] > w[1]),
        "birth-decile mean in-degrees not decreasing: {decile_means:?}"
    );
}

#[test]
fn supercritical_aging_sometimes_dies() {
    let cfg = config(ModelClass::FExpA, &[("lambda", 0.4), ("mu", 1.0), ("sigma", 1.0)]);
    let extinct = (0..40)
        .filter(|&s| matches!(simulate(&cfg, 2000, &mut SimRng::seed_from_u64(s), None), SimOutcome::Extinct { .. }))
        .count();
    assert!(extinct > 0 && extinct < 40, "{extinct}/40 extinct");
}

#[test]
fn subcritical_aging_exhausts_retries() {
    let cfg = config(ModelClass::FExpA, &[("lambda", 2.0), ("mu", 1.0), ("sigma", 1.0)]);
    match simulate_with_retries(&cfg, 2000, 50, 7, 0) {
        Err(Error::AllExtinct { attempts }) => assert_eq!(attempts, 50),
        other => panic!("expected AllExtinct, got {other:?}"),
    }
}

#[test]
fn retries_are_reproducible() {
    let cfg = config(ModelClass::FPlA, &[("x_min", 0.7), ("tau", 2.4), ("mu", 1.0), ("sigma", 1.0)]);
    let a = simulate_with_retries(&cfg, 500, 1000, 11, 3).unwrap();
    let b = simulate_with_retries(&cfg, 500, 1000, 11, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.record.num_vertices(), 500);
}
