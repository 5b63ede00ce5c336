use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::kernel::HeatSetup;
use crate::error::{invalid, Result};
use crate::geometry::{
    ball_measure, distances_from, sample_points, total_joining_length, JoiningLength, MetricGraph, Point,
};
use crate::spectral::{geometric_grid, line_fit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianReport {
    /// Range of `p(t,x,x) sqrt(t)` over the sampled points and times.
    pub band: [f64; 2],
    pub ratio: f64,
    /// Time at which off-diagonal decay is examined.
    pub t_offdiag: f64,
    /// Slope of `log p(t,x,y)` against `d(x,y)^2 / t`, geodesic `d`.
    pub offdiag_slope: f64,
    /// Correlation of `log p(t,x,y)` with `-d(x,y)^2 / t`, geodesic `d`.
    pub corr: f64,
    pub offdiag_slope_euclidean: f64,
    pub corr_euclidean: f64,
    /// Pairs used in the off-diagonal fit.
    pub pairs: usize,
    /// Kernel values in `[-1e-8, 0]` clamped away (excluded from the fit).
    pub clamped: usize,
    /// Kernel values below `-1e-8`.
    pub negative: usize,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// On-diagonal band and off-diagonal Gaussian decay over sampled points.
///
/// `t_range` is sampled at 10 points per decade; the off-diagonal fit uses
/// the geometric mean of its ends.
pub fn gaussian_diagnostic(hs: &HeatSetup, t_range: (f64, f64), samples: usize, seed: u64) -> Result<GaussianReport> {
    let (t0, t1) = t_range;
    if !(t0 > 0.0 && t1 >= t0) {
        return invalid(format!("bad t range [{t0}, {t1}]"));
    }
    if samples < 3 {
        return invalid("need at least three sample points");
    }
    let g = &hs.graph;
    let pts = sample_points(g, samples, seed);
    let ts = if t1 > t0 { geometric_grid(t0, t1, 10) } else { vec![t0] };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in &pts {
        for &t in &ts {
            let v = hs.kernel(t, x, x)? * t.sqrt();
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }

    let t = (t0 * t1).sqrt();
    let mut geo = (Vec::new(), Vec::new());
    let mut euc = (Vec::new(), Vec::new());
    let (mut clamped, mut negative) = (0, 0);
    for (i, &x) in pts.iter().enumerate() {
        let dx = distances_from(g, x)?;
        let cx = x.coords(g);
        for &y in &pts[i + 1..] {
            let p = hs.kernel(t, x, y)?;
            if p <= 0.0 {
                if p >= -1e-8 {
                    clamped += 1;
                } else {
                    negative += 1;
                }
                continue;
            }
            let d = geodesic_from(g, x, &dx, y);
            let e = dist(&cx, &y.coords(g));
            geo.0.push(d * d / t);
            geo.1.push(p.ln());
            euc.0.push(e * e / t);
            euc.1.push(p.ln());
        }
    }
    if geo.0.len() < 3 {
        return invalid("too few positive kernel values for an off-diagonal fit");
    }
    let fg = line_fit(&geo.0, &geo.1);
    let fe = line_fit(&euc.0, &euc.1);
    Ok(GaussianReport {
        band: [lo, hi],
        ratio: hi / lo,
        t_offdiag: t,
        offdiag_slope: fg.slope,
        corr: -fg.corr,
        offdiag_slope_euclidean: fe.slope,
        corr_euclidean: -fe.corr,
        pairs: geo.0.len(),
        clamped,
        negative,
    })
}

fn geodesic_from(g: &MetricGraph, a: Point, dist: &[f64], b: Point) -> f64 {
    match b {
        Point::Vertex(v) => dist[v],
        Point::OnEdge { edge, offset } => {
            let e = &g.edges[edge];
            let mut d = (dist[e.u] + offset).min(dist[e.v] + e.len - offset);
            if let Point::OnEdge { edge: ea, offset: oa } = a {
                if ea == edge {
                    d = d.min((oa - offset).abs());
                }
            }
            d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Total length of the limit space.
    pub limit_length: f64,
    pub lower_bound: f64,
    /// `4 * limit_length + 3`.
    pub upper_bound: f64,
    pub samples: usize,
}

impl RegularityReport {
    pub fn within(&self, eps: f64) -> bool {
        self.min_ratio >= self.lower_bound - eps && self.max_ratio <= self.upper_bound + eps
    }
}

/// Ratios `length(B_t(x)) / t` over sampled centres and radii `t` in `t_range`.
pub fn measure_regularity(g: &MetricGraph, t_range: (f64, f64), samples: usize, seed: u64) -> Result<RegularityReport> {
    let limit_length = match total_joining_length(g.params, None) {
        JoiningLength::Finite(x) => x,
        JoiningLength::Diverges => {
            return invalid(format!("alpha = {} gives a limit space of infinite length", g.params.alpha))
        }
    };
    let (t0, t1) = t_range;
    if !(t0 > 0.0 && t1 >= t0) {
        return invalid(format!("bad t range [{t0}, {t1}]"));
    }
    let pts = sample_points(g, samples, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for &x in &pts {
        let t = t0 * (t1 / t0).powf(rng.gen::<f64>());
        let ratio = ball_measure(g, x, t)? / t;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    Ok(RegularityReport {
        min_ratio,
        max_ratio,
        limit_length,
        lower_bound: 2.0,
        upper_bound: 4.0 * limit_length + 3.0,
        samples,
    })
}
