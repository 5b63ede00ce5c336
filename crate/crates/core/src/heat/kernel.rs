use faer::Mat;

use crate::error::{invalid, FqgError, Result};
use crate::geometry::{total_joining_length, JoiningLength, MetricGraph, Point};
use crate::spectral::{dense_eigen, length_measure_system, AssembledSystem, DENSE_CAP};

/// Relative size of the neglected eigen-expansion tail accepted by [`HeatSetup::kernel`].
pub const TRUNCATION_RTOL: f64 = 1e-6;

/// Eigenpairs of the Kirchhoff Laplacian on a full metric graph.
pub struct HeatSetup {
    pub graph: MetricGraph,
    pub sys: AssembledSystem,
    /// Lowest `k` eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `phi[(dof, k)]`, orthonormal in `L^2` of the length measure.
    pub phi: Mat<f64>,
    /// Trapezoid weights of the FEM nodes (row sums of the mass matrix).
    pub weights: Vec<f64>,
    pub total_length: f64,
    phi_max2: f64,
}

/// Element size giving about `1.5 k_max` nodes.
pub fn default_element_size(g: &MetricGraph, k_max: usize) -> f64 {
    g.total_length() / (1.5 * k_max as f64)
}

/// Lowest `k_max` eigenpairs with linear elements of size at most `h`.
pub fn full_graph_spectrum(g: &MetricGraph, h: f64, k_max: usize) -> Result<HeatSetup> {
    if total_joining_length(g.params, None) == JoiningLength::Diverges {
        return invalid(format!(
            "alpha = {} gives a limit space of infinite length; heat kernels need n0 * r < 1",
            g.params.alpha
        ));
    }
    if k_max == 0 {
        return invalid("k_max must be positive");
    }
    let sys = length_measure_system(g, h)?;
    let n = sys.n_dofs();
    if n > DENSE_CAP {
        return Err(FqgError::ResourceCap(format!("{n} nodes exceed the dense cap of {DENSE_CAP}; increase h")));
    }
    let (vals, vecs) = dense_eigen(&sys.k, &sys.m, true)?;
    let vecs = vecs.expect("vectors requested");
    let k = k_max.min(n);
    let mut eigenvalues: Vec<f64> = vals[..k].to_vec();
    eigenvalues[0] = 0.0;
    let total_length = g.total_length();
    // fix signs: first nonzero entry positive, constant mode exactly constant
    let mut phi = Mat::<f64>::from_fn(n, k, |i, j| vecs[(i, j)]);
    for j in 0..k {
        let sign = (0..n).map(|i| phi[(i, j)]).find(|v| v.abs() > 1e-12).map_or(1.0, f64::signum);
        for i in 0..n {
            phi[(i, j)] *= sign;
        }
    }
    let c0 = total_length.sqrt().recip();
    for i in 0..n {
        phi[(i, 0)] = c0;
    }
    let mut phi_max2: f64 = 0.0;
    for j in 0..k {
        for i in 0..n {
            phi_max2 = phi_max2.max(phi[(i, j)].powi(2));
        }
    }
    let weights = sys.m.row_sums();
    Ok(HeatSetup { graph: g.clone(), sys, eigenvalues, phi, weights, total_length, phi_max2 })
}

impl HeatSetup {
    pub fn k_max(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Interpolation weights `(dof, w)` of a point.
    fn stencil(&self, x: Point) -> Result<[(usize, f64); 2]> {
        let model = &self.sys.model;
        match x {
            Point::Vertex(v) if v < self.graph.vertices.len() => {
                let d = model.junction_dof(v).expect("all vertices are free");
                Ok([(d, 1.0), (d, 0.0)])
            }
            Point::OnEdge { edge, offset } if edge < self.graph.edges.len() => {
                let c = model.classes[model.edges[edge].class];
                if !(0.0..=c.len).contains(&offset) {
                    return invalid(format!("offset {offset} outside [0, {}]", c.len));
                }
                let h = c.h();
                let k = ((offset / h).floor() as usize).min(c.p - 1);
                let t = ((offset - k as f64 * h) / h).clamp(0.0, 1.0);
                let a = model.edge_node_dof(edge, k).expect("free node");
                let b = model.edge_node_dof(edge, k + 1).expect("free node");
                Ok([(a, 1.0 - t), (b, t)])
            }
            _ => invalid(format!("{x:?} is not on the graph")),
        }
    }

    /// Values of all retained eigenfunctions at `x`.
    pub fn eigenfunctions_at(&self, x: Point) -> Result<Vec<f64>> {
        let s = self.stencil(x)?;
        Ok((0..self.k_max()).map(|j| s[0].1 * self.phi[(s[0].0, j)] + s[1].1 * self.phi[(s[1].0, j)]).collect())
    }

    /// Bound on the neglected tail, `k_max * exp(-lambda_last t) * max phi^2`.
    pub fn tail_bound(&self, t: f64) -> f64 {
        let last = *self.eigenvalues.last().expect("nonempty");
        self.k_max() as f64 * (-last * t).exp() * self.phi_max2
    }

    fn check_t(&self, t: f64, reference: f64) -> Result<()> {
        if !(t > 0.0) {
            return invalid(format!("t must be positive, got {t}"));
        }
        if self.k_max() < self.sys.n_dofs() && self.tail_bound(t) > TRUNCATION_RTOL * reference {
            // smallest k with the extrapolated tail below tolerance, using lambda_k ~ k^2
            let last = *self.eigenvalues.last().expect("nonempty");
            let km = self.k_max() as f64;
            let mut k = km;
            while k * (-last * (k / km).powi(2) * t).exp() * self.phi_max2 > TRUNCATION_RTOL * reference {
                k *= 1.1;
            }
            return Err(FqgError::InsufficientData(format!(
                "t = {t} is below the resolvable scale for k_max = {}; about k_max = {} needed",
                self.k_max(),
                k.ceil()
            )));
        }
        Ok(())
    }

    fn kernel_from(&self, t: f64, fx: &[f64], fy: &[f64]) -> f64 {
        self.eigenvalues.iter().zip(fx.iter().zip(fy)).map(|(l, (a, b))| (-l * t).exp() * (a * b)).sum()
    }

    /// `p(t, x, y)` from the truncated eigen-expansion.
    pub fn kernel(&self, t: f64, x: Point, y: Point) -> Result<f64> {
        let fx = self.eigenfunctions_at(x)?;
        let fy = self.eigenfunctions_at(y)?;
        let diag = self.kernel_from(t, &fx, &fx).max(1.0 / self.total_length);
        self.check_t(t, diag)?;
        Ok(self.kernel_from(t, &fx, &fy))
    }

    /// `p(t, x, node)` at every FEM node.
    pub fn kernel_row(&self, t: f64, x: Point) -> Result<Vec<f64>> {
        let fx = self.eigenfunctions_at(x)?;
        let diag = self.kernel_from(t, &fx, &fx).max(1.0 / self.total_length);
        self.check_t(t, diag)?;
        let c: Vec<f64> = self.eigenvalues.iter().zip(&fx).map(|(l, a)| (-l * t).exp() * a).collect();
        let n = self.sys.n_dofs();
        Ok((0..n).map(|i| (0..c.len()).map(|j| c[j] * self.phi[(i, j)]).sum()).collect())
    }

    /// `int p(t, x, y) dy` by trapezoid quadrature.
    pub fn conservation(&self, t: f64, x: Point) -> Result<f64> {
        Ok(self.kernel_row(t, x)?.iter().zip(&self.weights).map(|(p, w)| p * w).sum())
    }

    /// `int p(s, x, z) p(t, z, y) dz` by trapezoid quadrature.
    pub fn chapman_kolmogorov(&self, s: f64, t: f64, x: Point, y: Point) -> Result<f64> {
        let a = self.kernel_row(s, x)?;
        let b = self.kernel_row(t, y)?;
        Ok(a.iter().zip(&b).zip(&self.weights).map(|((p, q), w)| p * q * w).sum())
    }

    /// `sum_k exp(-lambda_k t)`.
    pub fn trace(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|l| (-l * t).exp()).sum()
    }

    /// `int p(t, x, x) dx` by trapezoid quadrature.
    pub fn trace_quadrature(&self, t: f64) -> f64 {
        let n = self.sys.n_dofs();
        (0..n)
            .map(|i| {
                let d: f64 = (0..self.k_max()).map(|j| (-self.eigenvalues[j] * t).exp() * self.phi[(i, j)].powi(2)).sum();
                d * self.weights[i]
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_level, HanoiParams};

    #[test]
    fn rejects_infinite_length() {
        let g = build_level(HanoiParams::new(0.3, 3).unwrap(), 2).unwrap();
        let e = full_graph_spectrum(&g, 0.05, 100).err().unwrap();
        assert!(e.to_string().contains("infinite length"));
    }

    #[test]
    fn constant_mode_and_long_time_limit() {
        let g = build_level(HanoiParams::new(0.5, 3).unwrap(), 2).unwrap();
        let hs = full_graph_spectrum(&g, 0.02, 150).unwrap();
        assert_eq!(hs.eigenvalues[0], 0.0);
        assert!(hs.eigenvalues[1] > 1e-3);
        let x = Point::OnEdge { edge: 3, offset: 0.03 };
        let y = Point::Vertex(5);
        let p = hs.kernel(200.0, x, y).unwrap();
        assert!((p - 1.0 / g.total_length()).abs() < 1e-9);
        let a = hs.kernel(0.05, x, y).unwrap();
        let b = hs.kernel(0.05, y, x).unwrap();
        assert_eq!(a, b);
        assert!((hs.conservation(0.05, x).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_t_is_rejected() {
        let g = build_level(HanoiParams::new(0.5, 3).unwrap(), 2).unwrap();
        let hs = full_graph_spectrum(&g, 0.02, 20).unwrap();
        let e = hs.kernel(1e-6, Point::Vertex(0), Point::Vertex(0)).unwrap_err();
        assert!(matches!(e, FqgError::InsufficientData(_)));
    }
}
