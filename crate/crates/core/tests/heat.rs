use fqg::geometry::*;
use fqg::heat::*;

fn half(level: usize) -> MetricGraph {
    build_level(HanoiParams::new(0.5, 3).unwrap(), level).unwrap()
}

#[test]
fn trace_matches_quadrature() {
    let g = half(4);
    let hs = full_graph_spectrum(&g, default_element_size(&g, 800), 800).unwrap();
    for t in [1e-3, 1e-2, 1e-1] {
        let (a, b) = (hs.trace(t), hs.trace_quadrature(t));
        assert!((a - b).abs() <= 0.01 * a, "{t} {a} {b}");
    }
}

#[test]
fn trace_is_completely_monotone_on_grid() {
    let g = half(3);
    let hs = full_graph_spectrum(&g, default_element_size(&g, 300), 300).unwrap();
    let v: Vec<f64> = (0..30).map(|i| hs.trace(1e-3 * 1.2f64.powi(i))).collect();
    for w in v.windows(3) {
        assert!(w[1] < w[0]);
        assert!(w[2] - 2.0 * w[1] + w[0] > 0.0);
    }
}

#[test]
fn kernel_positive_and_symmetric_on_samples() {
    let g = half(3);
    let hs = full_graph_spectrum(&g, default_element_size(&g, 400), 400).unwrap();
    let pts = sample_points(&g, 12, 5);
    for t in [5e-3, 5e-2] {
        for &x in &pts {
            for &y in &pts {
                let p = hs.kernel(t, x, y).unwrap();
                assert_eq!(p, hs.kernel(t, y, x).unwrap());
                assert!(p >= -1e-8, "{p}");
            }
        }
    }
}

#[test]
fn single_interval_modes() {
    let params = HanoiParams::new(0.5, 3).unwrap();
    let g = MetricGraph {
        params,
        level: 0,
        vertices: vec![Vertex { id: 0, coords: vec![0.0, 0.0] }, Vertex { id: 1, coords: vec![1.0, 0.0] }],
        edges: vec![Edge { id: 0, u: 0, v: 1, len: 1.0, kind: EdgeKind::Triangle, level: 0, word: Word::empty() }],
        corners: vec![0, 1],
    };
    let hs = full_graph_spectrum(&g, 1.0 / 400.0, 200).unwrap();
    for k in 1..6 {
        let want = (k as f64 * std::f64::consts::PI).powi(2);
        assert!((hs.eigenvalues[k] - want).abs() < 1e-3 * want);
        let x = Point::OnEdge { edge: 0, offset: 0.3 };
        let phi = hs.eigenfunctions_at(x).unwrap()[k];
        let exact = 2f64.sqrt() * (k as f64 * std::f64::consts::PI * 0.3).cos();
        assert!((phi.abs() - exact.abs()).abs() < 1e-3);
    }
    // on an interval p(t,x,x) sqrt(t) is close to 1/sqrt(4 pi t) * sqrt(t) away from the ends
    let mid = Point::OnEdge { edge: 0, offset: 0.5 };
    let v = hs.kernel(1e-3, mid, mid).unwrap() * 1e-3f64.sqrt();
    assert!((v - 1.0 / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-3);
}

#[test]
fn gaussian_report_has_decay() {
    let g = half(3);
    let hs = full_graph_spectrum(&g, default_element_size(&g, 600), 600).unwrap();
    let rep = gaussian_diagnostic(&hs, (1e-2, 1e-1), 20, 1).unwrap();
    assert!(rep.band[0] > 0.0 && rep.ratio >= 1.0);
    assert!(rep.offdiag_slope < 0.0 && rep.corr > 0.5);
}

#[test]
fn regularity_rejects_infinite_length() {
    let g = build_level(HanoiParams::new(0.3, 3).unwrap(), 3).unwrap();
    assert!(measure_regularity(&g, (1e-3, 1e-1), 10, 0).is_err());
    let rep = measure_regularity(&half(4), (1e-3, 1e-1), 100, 0).unwrap();
    assert!(rep.within(1e-9));
    assert_eq!(rep.upper_bound, 27.0);
}
