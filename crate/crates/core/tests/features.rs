mod common;

use common::*;
use ctbp_select::dynamic::{
    cohort_boundaries, compute_dfm, degree_groups, delta_matrices, CohortMode, CohortSpec, DegreeMode,
};
use ctbp_select::engine::GrowthRecord;
use ctbp_select::model::ModelClass;
use ctbp_select::static_features::{
    assortativity, coreness, local_clustering, simplify, static_vector, transitivity, triangles_per_vertex,
    SimpleGraph, STATIC_FEATURE_NAMES,
};
use proptest::prelude::*;

#[test]
fn per_vertex_quantities_match_brute_force_on_random_graphs() {
    for seed in 0..50u64 {
        let p = 0.15 + 0.6 * (seed as f64 / 49.0);
        let edges = random_graph(12, p, seed);
        let g = SimpleGraph::from_undirected(12, &edges);
        let a = adjacency_matrix(12, &edges);

        let degrees: Vec<usize> = (0..12).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, brute_degrees(&a), "degrees, seed {seed}");
        assert_eq!(triangles_per_vertex(&g), brute_triangles(&a), "triangles, seed {seed}");
        assert_eq!(coreness(&g), brute_coreness(&a), "coreness, seed {seed}");
        for (x, y) in local_clustering(&g).iter().zip(brute_local_clustering(&a)) {
            assert!((x - y).abs() < 1e-12, "clustering, seed {seed}");
        }
        assert!((transitivity(&g) - brute_transitivity(&a)).abs() < 1e-12, "transitivity, seed {seed}");
        let assort = assortativity(&g);
        match brute_assortativity(&a) {
            Some(r) => assert!((assort.value - r).abs() < 1e-9 && !assort.degenerate, "assortativity, seed {seed}"),
            None => assert!(assort.degenerate && assort.value == 0.0),
        }
    }
}

#[test]
fn simplify_drops_loops_and_merges_parallel_edges() {
    let rec = GrowthRecord::from_parts(
        &[0.0, 1.0, 2.0],
        &[(1.0, 1, 1), (1.5, 1, 0), (2.0, 1, 0), (2.5, 2, 0), (3.0, 2, 1)],
        3.0,
    )
    .unwrap();
    let g = simplify(&rec);
    assert_eq!(g.num_edges(), 3);
    assert_eq!(g.in_degrees(), &[2, 1, 0]);
    assert!((transitivity(&g) - 1.0).abs() < 1e-12);
}

#[test]
fn static_vector_of_a_star() {
    // four leaves citing one hub
    let rec = GrowthRecord::from_parts(
        &[0.0, 1.0, 2.0, 3.0, 4.0],
        &[(1.0, 1, 0), (2.0, 2, 0), (3.0, 3, 0), (4.0, 4, 0)],
        4.0,
    )
    .unwrap();
    let v = static_vector(&simplify(&rec));
    assert_eq!(v.values.len(), STATIC_FEATURE_NAMES.len());
    assert_eq!(v.get("degree_max"), Some(4.0));
    assert_eq!(v.get("degree_min"), Some(0.0));
    assert_eq!(v.get("coreness_max"), Some(1.0));
    assert_eq!(v.get("triangles_max"), Some(0.0));
    assert_eq!(v.get("transitivity"), Some(0.0));
    // every edge joins degree 4 to degree 1
    assert!((v.get("assortativity").unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn hand_instance_matrix_is_exact() {
    let spec = CohortSpec::new(CohortMode::Time, 2, 2).unwrap();
    let dfm = compute_dfm(&hand_record(), &spec).unwrap();
    assert_eq!(dfm.values, HAND_DFM.to_vec());
    assert_eq!(dfm.normalization, Some(0.5));
}

/// DFM from in-degree snapshots at every cohort boundary.
fn dfm_oracle(record: &GrowthRecord, mode: CohortMode, s: usize, r: usize) -> Vec<f64> {
    let n = record.num_vertices();
    let indeg_at = |t: f64| {
        let mut d = vec![0u64; n];
        for e in record.edges.iter().filter(|e| e.time <= t) {
            d[e.target as usize] += 1;
        }
        d
    };
    let final_deg = indeg_at(f64::INFINITY);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(final_deg[v]), v));
    let mut members = vec![Vec::new(); r];
    for (rank, &v) in order.iter().enumerate() {
        members[rank * r / n].push(v);
    }
    let taus: Vec<f64> = (0..=s)
        .map(|i| match (i, mode) {
            (0, _) => f64::NEG_INFINITY,
            (i, _) if i == s => f64::INFINITY,
            (i, CohortMode::Time) => record.final_time * i as f64 / s as f64,
            (i, CohortMode::Size) => {
                let k = n * i / s;
                if k == 0 { 0.0 } else { record.vertices[k - 1].birth_time }
            }
        })
        .collect();
    let snaps: Vec<Vec<u64>> = taus.iter().map(|&t| indeg_at(t)).collect();
    let mut out = Vec::new();
    for i in 0..s {
        for group in &members {
            let inc: u64 = group.iter().map(|&v| snaps[i + 1][v] - snaps[i][v]).sum();
            out.push(inc as f64 / group.len() as f64);
        }
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|x| *x /= total);
    }
    out
}

prop_compose! {
    fn arb_record()(n in 2usize..30, gaps in prop::collection::vec(0.01f64..2.0, 30),
                    picks in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 0..80))
                    -> GrowthRecord {
        let mut births = vec![0.0];
        for g in &gaps[..n - 1] {
            births.push(births.last().unwrap() + g);
        }
        let end = births[n - 1] + 1.0;
        let mut edges: Vec<(f64, u32, u32)> = picks
            .iter()
            .map(|&(a, b, c)| {
                let src = 1 + ((a * (n - 1) as f64) as usize).min(n - 2);
                let tgt = ((b * src as f64) as usize).min(src - 1);
                let t = births[src] + 1e-3 + c * (end - births[src] - 1e-3);
                (t, src as u32, tgt as u32)
            })
            .collect();
        edges.sort_by(|x, y| x.0.total_cmp(&y.0));
        GrowthRecord::from_parts(&births, &edges, end).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dfm_matches_snapshot_oracle(rec in arb_record(), s in 1usize..6, r in 1usize..4, size in any::<bool>()) {
        prop_assume!(r <= rec.num_vertices());
        let mode = if size { CohortMode::Size } else { CohortMode::Time };
        let dfm = compute_dfm(&rec, &CohortSpec::new(mode, s, r).unwrap()).unwrap();
        let oracle = dfm_oracle(&rec, mode, s, r);
        for (x, y) in dfm.values.iter().zip(&oracle) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        if rec.edges.is_empty() {
            prop_assert!(dfm.is_degenerate());
        } else {
            prop_assert!((dfm.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn time_rescaling_leaves_time_cohorts_unchanged(rec in arb_record(), k in 0.1f64..10.0) {
        let spec = CohortSpec::new(CohortMode::Time, 4, 2.min(rec.num_vertices())).unwrap();
        let mut scaled = rec.clone();
        scaled.vertices.iter_mut().for_each(|v| v.birth_time *= k);
        scaled.edges.iter_mut().for_each(|e| e.time *= k);
        scaled.final_time *= k;
        let a = compute_dfm(&rec, &spec).unwrap();
        let b = compute_dfm(&scaled, &spec).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn groups_have_balanced_sizes(rec in arb_record(), r in 1usize..8) {
        prop_assume!(r <= rec.num_vertices());
        let groups = degree_groups(&rec, r, DegreeMode::InDegree).unwrap();
        let mut sizes = vec![0usize; r];
        groups.iter().for_each(|&g| sizes[g] += 1);
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
        let deg = rec.in_degrees();
        for u in 0..deg.len() {
            for v in 0..deg.len() {
                if groups[u] < groups[v] {
                    prop_assert!(deg[u] >= deg[v]);
                }
            }
        }
    }

    #[test]
    fn boundaries_are_monotone(rec in arb_record(), s in 1usize..8, size in any::<bool>()) {
        let mode = if size { CohortMode::Size } else { CohortMode::Time };
        let taus = cohort_boundaries(&rec, s, mode);
        prop_assert_eq!(taus.len(), s + 1);
        prop_assert_eq!(taus[0], 0.0);
        prop_assert_eq!(taus[s], rec.final_time);
        prop_assert!(taus.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn deltas_sum_to_zero(means in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 9)) {
        let class_means: Vec<(ModelClass, Vec<f64>)> = ModelClass::ALL.iter().copied().zip(means).collect();
        let deltas = delta_matrices(&class_means).unwrap();
        for cell in 0..6 {
            let sum: f64 = deltas.iter().map(|d| d.values[cell]).sum();
            prop_assert!(sum.abs() < 1e-9);
            prop_assert!(deltas.iter().all(|d| d.values[cell] >= -1.0 - 1e-12));
        }
    }

    #[test]
    fn static_quantities_match_brute_force(edges in prop::collection::vec((0u32..10, 0u32..10), 0..40)) {
        let g = SimpleGraph::from_undirected(10, &edges);
        let a = adjacency_matrix(10, &edges);
        prop_assert_eq!(triangles_per_vertex(&g), brute_triangles(&a));
        prop_assert_eq!(coreness(&g), brute_coreness(&a));
        prop_assert!((transitivity(&g) - brute_transitivity(&a)).abs() < 1e-12);
    }
}
