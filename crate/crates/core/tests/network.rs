use fqg::geometry::{build_level, sample_points, HanoiParams};
use fqg::network::*;
use proptest::prelude::*;

fn random_network(n: usize, extra: &[(usize, usize, f64)], chain: &[f64]) -> ResistorNetwork {
    let mut net = ResistorNetwork::new(n);
    // a spanning path keeps it connected
    for i in 1..n {
        net.add(i - 1, i, chain[i - 1]).unwrap();
    }
    for &(a, b, rho) in extra {
        if a % n != b % n {
            net.add(a % n, b % n, rho).unwrap();
        }
    }
    net
}

fn net_strategy() -> impl Strategy<Value = ResistorNetwork> {
    (3usize..9).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0usize..20, 0usize..20, 0.1f64..5.0), 0..12),
            prop::collection::vec(0.1f64..5.0, n - 1),
        )
            .prop_map(|(n, extra, chain)| random_network(n, &extra, &chain))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn effective_resistance_is_a_metric(net in net_strategy()) {
        let n = net.n_nodes;
        let r = |a, b| effective_resistance(&net, a, b).unwrap();
        for a in 0..n {
            for b in 0..n {
                if a == b { continue; }
                prop_assert!(r(a, b) > 0.0);
                prop_assert!((r(a, b) - r(b, a)).abs() < 1e-12 * r(a, b).max(1.0));
                for c in 0..n {
                    prop_assert!(r(a, c) <= r(a, b) + r(b, c) + 1e-10);
                }
            }
        }
    }

    #[test]
    fn star_delta_round_trip(a in 0.01f64..10.0, b in 0.01f64..10.0, c in 0.01f64..10.0) {
        let (x, y, z) = delta_to_y(a, b, c).unwrap();
        let (a2, b2, c2) = y_to_delta(x, y, z).unwrap();
        prop_assert!((a - a2).abs() < 1e-12 * a.max(1.0));
        prop_assert!((b - b2).abs() < 1e-12 * b.max(1.0));
        prop_assert!((c - c2).abs() < 1e-12 * c.max(1.0));
    }

    #[test]
    fn level1_reduction_matches_recurrence(alpha in 0.01f64..0.99, rr in 0.0f64..2.0) {
        let rr = rr + 1e-3;
        let ((s12, s23, s31), _) = level1_reduction(alpha, rr).unwrap();
        let wire = recurrence_step(rr, alpha);
        for s in [s12, s23, s31] {
            prop_assert!((s - wire).abs() < 1e-12 * wire.max(1.0));
        }
    }
}

#[test]
fn reduction_steps_preserve_terminal_resistances() {
    for (alpha, rr) in [(0.2, 1.0), (0.1, 0.3), (0.7, 2.5)] {
        let (_, tr) = level1_reduction(alpha, rr).unwrap();
        assert_eq!(tr.steps.len(), 14);
        let t = &tr.terminals;
        let pairs = [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])];
        let base: Vec<f64> = pairs.iter().map(|&(a, b)| effective_resistance(&tr.initial, a, b).unwrap()).collect();
        for step in &tr.steps {
            for (i, &(a, b)) in pairs.iter().enumerate() {
                let r = effective_resistance(&step.after, a, b).unwrap();
                assert!((r - base[i]).abs() < 1e-12, "{:?}", step.kind);
            }
        }
    }
}

#[test]
fn sandwich_and_geometric_convergence() {
    for alpha in [0.1, 0.2, 0.3, 0.6] {
        let p = HanoiParams::new(alpha, 3).unwrap();
        let seq = resistance_sequence(p, 0..=6, (0, 1)).unwrap();
        let lim = corner_resistance_limit(alpha);
        let q = 5.0 * p.r() / 3.0;
        for w in seq.rows.windows(2) {
            assert!(w[1].r_shorted >= w[0].r_shorted - 1e-12);
            assert!(w[1].r_full <= w[0].r_full + 1e-12);
        }
        for row in &seq.rows {
            assert!(row.r_shorted <= lim + 1e-12 && lim <= row.r_full + 1e-12);
            // the gap is exactly 2/3 q^n; the slack covers the numeric solves
            assert!(row.r_full - row.r_shorted <= q.powi(row.n as i32) * 2.0 / 3.0 + 1e-9);
            assert!((row.r_shorted - row.rec_lower.unwrap()).abs() < 1e-9);
            assert!((row.r_full - row.rec_upper.unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn other_corner_pairs_agree_by_symmetry() {
    let p = HanoiParams::new(0.25, 3).unwrap();
    let a = resistance_sequence(p, 3..=3, (0, 1)).unwrap();
    let b = resistance_sequence(p, 3..=3, (1, 2)).unwrap();
    assert!((a.rows[0].r_full - b.rows[0].r_full).abs() < 1e-12);
    assert!((a.rows[0].r_shorted - b.rows[0].r_shorted).abs() < 1e-12);
}

#[test]
fn four_branch_sequence_is_monotone() {
    let p = HanoiParams::new(0.2, 4).unwrap();
    let seq = resistance_sequence(p, 0..=4, (0, 2)).unwrap();
    assert!(seq.limit.is_none());
    for w in seq.rows.windows(2) {
        assert!(w[1].r_shorted >= w[0].r_shorted - 1e-12);
        assert!(w[1].r_full <= w[0].r_full + 1e-12);
        assert!(w[1].r_shorted <= w[1].r_full);
    }
    assert!(seq.to_csv().lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn resistance_is_bi_lipschitz_to_euclidean() {
    let alpha = 0.2;
    let g = build_level(HanoiParams::new(alpha, 3).unwrap(), 4).unwrap();
    let pts = sample_points(&g, 40, 3);
    let (net, ids) = full_network_with_points(&g, &pts).unwrap();
    let solver = ResistanceSolver::new(&net, ids[0]).unwrap();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let e: f64 = pts[i].coords(&g).iter().zip(pts[j].coords(&g)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let r = solver.resistance(ids[i], ids[j]).unwrap();
            assert!(alpha / 3.0 * e <= r + 1e-12 && r <= 3.0 / alpha * e + 1e-12, "{e} {r}");
        }
    }
}
