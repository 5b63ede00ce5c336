use fqg::geometry::{build_level, HanoiParams, Word};
use fqg::measure::{rs_product, MeasureParams};
use fqg::spectral::*;

fn setup(alpha: f64, beta: f64, n0: usize, n: usize) -> (fqg::geometry::MetricGraph, MeasureParams) {
    (build_level(HanoiParams::new(alpha, n0).unwrap(), n).unwrap(), MeasureParams::new(beta, n0).unwrap())
}

#[test]
fn neumann_dirichlet_interlace() {
    for (alpha, beta, n0) in [(0.2, 0.1, 3), (0.02, 0.02, 3), (0.2, 0.1, 4)] {
        let (g, mp) = setup(alpha, beta, n0, 3);
        let n = solve_eig(&assemble(&g, &mp, 6, Bc::Neumann).unwrap(), EigenCount::All).unwrap();
        let d = solve_eig(&assemble(&g, &mp, 6, Bc::Dirichlet).unwrap(), EigenCount::All).unwrap();
        assert_eq!(n.eigenvalues[0], 0.0);
        assert!(n.eigenvalues[1] > 1e-9);
        assert!(d.eigenvalues[0] > 0.0);
        assert!(n.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for &x in d.eigenvalues.iter().chain(&n.eigenvalues) {
            for y in [x * (1.0 - 1e-9), x * (1.0 + 1e-9)] {
                let cn = counting_function(&n, y).unwrap().value as i64;
                let cd = counting_function(&d, y).unwrap().value as i64;
                assert!((0..=n0 as i64).contains(&(cn - cd)), "{cn} {cd} at {y}");
            }
        }
    }
}

#[test]
fn assembly_invariants() {
    for n0 in [3, 4] {
        for n in 0..=4 {
            for p in [1, 3, 8] {
                let (g, mp) = setup(0.3, 0.05, n0, n);
                let sys = assemble(&g, &mp, p, Bc::Neumann).unwrap();
                assert!(sys.k.is_symmetric() && sys.m.is_symmetric());
                assert!((sys.m.total() - 1.0).abs() < 1e-12);
                assert!(sys.k.row_sums().iter().all(|r| r.abs() < 1e-9 * (1.0 / g.params.alpha)));
                let edges = fqg::geometry::joining_edge_count(n0, n);
                assert_eq!(sys.n_dofs(), g.cell_count() + edges * (p - 1));
                let dir = assemble(&g, &mp, p, Bc::Dirichlet).unwrap();
                // at level 0 the three corners share the single cell
                assert_eq!(dir.n_dofs() + if n == 0 { 1 } else { n0 }, sys.n_dofs());
            }
        }
    }
}

#[test]
fn interval_fem_converges_at_second_order() {
    let (len, mass) = (0.5, 0.1);
    for bc in [Bc::Neumann, Bc::Dirichlet] {
        let exact: Vec<f64> = interval_spectrum(len, mass, bc).unwrap().take(40).collect();
        let err = |p: usize| -> Vec<f64> {
            let s = solve_eig(&interval_system(len, mass, p, bc).unwrap(), EigenCount::All).unwrap();
            s.eigenvalues.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b.max(1.0)).collect()
        };
        let (e1, e2) = (err(64), err(128));
        let first = if bc == Bc::Neumann { 1 } else { 0 };
        for k in first..8 {
            let order = (e1[k] / e2[k]).log2();
            assert!(order >= 1.9, "{bc:?} {k} {order}");
        }
        assert!(e1[first] < 0.005);
    }
}

#[test]
fn interval_counting_closed_form() {
    let (len, mass) = (1.3, 0.7);
    let s = solve_eig(&interval_system(len, mass, 400, Bc::Neumann).unwrap(), EigenCount::All).unwrap();
    for x in [0.5, 20.0, 150.0, 900.0] {
        let want = 1 + ((len * mass * x).sqrt() / std::f64::consts::PI).floor() as usize;
        assert_eq!(counting_function(&s, x).unwrap().value, want);
    }
}

#[test]
fn sturm_agrees_with_dense_above_small_sizes() {
    let (g, mp) = setup(0.2, 0.1, 3, 4);
    let sys = assemble(&g, &mp, 10, Bc::Dirichlet).unwrap();
    let dense = solve_eig(&sys, EigenCount::Lowest(300)).unwrap();
    let sturm = sturm_eigenvalues(&sys, 300);
    for (a, b) in dense.eigenvalues.iter().zip(&sturm) {
        assert!((a - b).abs() <= 1e-8 * a, "{a} {b}");
    }
}

#[test]
fn trusted_window_is_refinement_stable_and_grows() {
    let (g, mp) = setup(0.2, 0.1, 3, 3);
    for bc in [Bc::Neumann, Bc::Dirichlet] {
        let mut prev = 0;
        for p in [16, 32, 64] {
            let spec = refined_spectrum(&g, &mp, p, bc, RefinementPolicy::default()).unwrap();
            let t = spec.trusted.unwrap();
            let coarse = solve_eig(&assemble(&g, &mp, p, bc).unwrap(), EigenCount::Lowest(t)).unwrap();
            for (a, b) in coarse.eigenvalues.iter().zip(&spec.eigenvalues[..t]) {
                assert!((a - b).abs() < 0.01 * b || *b == 0.0);
            }
            // bounded by the level-1 edges, which carry the most modes per element
            assert!(t >= p && t > prev, "{p} {t} {prev}");
            prev = t;
        }
    }
}

#[test]
fn neumann_count_below_decoupled_bound() {
    let (g, mp) = setup(0.2, 0.1, 3, 3);
    let p = 8;
    let full = assemble(&g, &mp, p, Bc::Neumann).unwrap();
    let spec = solve_eig(&full, EigenCount::All).unwrap();
    // cells alone have no stiffness: every cell dof is a zero mode
    let cells = g.cell_count();
    let hp = g.params;
    let pieces: Vec<(AssembledSystem, usize)> = (1..=3)
        .map(|k| {
            let len = hp.alpha * hp.r().powi(k as i32 - 1);
            let count = 3usize.pow(k as u32);
            (interval_system(len, mp.joining_mass(k), p, Bc::Neumann).unwrap(), count)
        })
        .collect();
    for &x in spec.eigenvalues.iter().step_by(7) {
        for y in [x * 0.999, x * 1.001] {
            let lhs = counting_function(&spec, y).unwrap().value;
            let rhs = cells + pieces.iter().map(|(s, c)| c * s.count_below(y)).sum::<usize>();
            assert!(lhs <= rhs, "{lhs} > {rhs} at {y}");
        }
    }
}

#[test]
fn cell_ground_state_scales_with_rs() {
    // cells of length m in a level m+3 build are scaled copies of the level-3 problem
    let mp = MeasureParams::new(0.1, 3).unwrap();
    let hp = HanoiParams::new(0.2, 3).unwrap();
    let rs = rs_product(&hp, &mp).unwrap().rs;
    let lambda1 = |m: usize| {
        let g = build_level(hp, m + 3).unwrap();
        let sys = assemble_cell(&g, &mp, 8, &Word::repeat(1, m), Bc::Dirichlet).unwrap();
        solve_eig(&sys, EigenCount::Lowest(1)).unwrap().eigenvalues[0]
    };
    let l: Vec<f64> = (1..=4).map(lambda1).collect();
    for w in l.windows(2) {
        let ratio = w[1] / w[0] * rs;
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
        assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
    }
}

#[test]
fn fit_rejects_short_spectra() {
    let (g, mp) = setup(0.2, 0.1, 3, 2);
    let spec = refined_spectrum(&g, &mp, 4, Bc::Neumann, RefinementPolicy::default()).unwrap();
    let e = dimension_fit(&spec, &g.params, &mp, FitPolicy::default()).unwrap_err();
    assert!(matches!(e, fqg::FqgError::InsufficientData(_)));
}

#[test]
fn spectrum_csv_marks_trust() {
    let (g, mp) = setup(0.2, 0.1, 3, 2);
    let spec = refined_spectrum(&g, &mp, 8, Bc::Dirichlet, RefinementPolicy::default()).unwrap();
    let csv = spec.to_csv();
    assert!(csv.starts_with("index,lambda,trusted\n0,"));
    let t = spec.trusted.unwrap();
    assert_eq!(csv.lines().filter(|l| l.ends_with(",true")).count(), t);
}
