use std::collections::{BTreeMap, HashMap};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{invalid, FqgError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resistor {
    pub a: usize,
    pub b: usize,
    pub rho: f64,
}

/// Resistor multigraph on nodes `0..n_nodes`, with optional node labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResistorNetwork {
    pub n_nodes: usize,
    pub resistors: Vec<Resistor>,
    pub labels: BTreeMap<String, usize>,
}

impl ResistorNetwork {
    pub fn new(n_nodes: usize) -> Self {
        Self { n_nodes, ..Default::default() }
    }

    pub fn add_node(&mut self) -> usize {
        self.n_nodes += 1;
        self.n_nodes - 1
    }

    pub fn add(&mut self, a: usize, b: usize, rho: f64) -> Result<()> {
        if a >= self.n_nodes || b >= self.n_nodes {
            return invalid(format!("resistor ({a},{b}) references a missing node"));
        }
        if a == b {
            return invalid(format!("self-loop at node {a}"));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return invalid(format!("resistance must be positive, got {rho}"));
        }
        self.resistors.push(Resistor { a, b, rho });
        Ok(())
    }

    pub fn label(&mut self, name: impl Into<String>, node: usize) {
        self.labels.insert(name.into(), node);
    }

    pub fn node(&self, name: &str) -> Option<usize> {
        self.labels.get(name).copied()
    }

    /// Component index of each node.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_nodes).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for r in &self.resistors {
            let (x, y) = (find(&mut parent, r.a), find(&mut parent, r.b));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
        (0..self.n_nodes).map(|x| find(&mut parent, x)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let c = self.components();
        c.iter().all(|&x| x == c.first().copied().unwrap_or(0))
    }
}

/// Node count above which the grounded Laplacian is solved by conjugate gradients.
pub const DIRECT_LIMIT: usize = 20_000;
const CG_RTOL: f64 = 1e-12;

enum Backend {
    Direct(faer::sparse::linalg::solvers::Llt<usize, f64>),
    Iterative(Cg),
    Trivial,
}

/// Grounded-Laplacian solver for one connected component of a network.
///
/// The factorization is computed once, so repeated queries are cheap.
pub struct ResistanceSolver {
    /// Position of each network node in the reduced system (`None` for the
    /// ground node and for nodes outside the component).
    slot: Vec<Option<usize>>,
    component: Vec<usize>,
    comp_id: usize,
    m: usize,
    backend: Backend,
}

impl ResistanceSolver {
    /// Prepares solves on the component containing `anchor`.
    pub fn new(net: &ResistorNetwork, anchor: usize) -> Result<Self> {
        Self::with_limit(net, anchor, DIRECT_LIMIT)
    }

    pub fn with_limit(net: &ResistorNetwork, anchor: usize, direct_limit: usize) -> Result<Self> {
        if anchor >= net.n_nodes {
            return invalid(format!("node {anchor} not in network"));
        }
        let component = net.components();
        let comp_id = component[anchor];
        let mut slot = vec![None; net.n_nodes];
        let mut m = 0;
        for v in 0..net.n_nodes {
            if component[v] == comp_id && v != anchor {
                slot[v] = Some(m);
                m += 1;
            }
        }
        let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
        for r in &net.resistors {
            if component[r.a] != comp_id {
                continue;
            }
            let c = 1.0 / r.rho;
            let (sa, sb) = (slot[r.a], slot[r.b]);
            if let Some(i) = sa {
                *entries.entry((i, i)).or_default() += c;
            }
            if let Some(j) = sb {
                *entries.entry((j, j)).or_default() += c;
            }
            if let (Some(i), Some(j)) = (sa, sb) {
                *entries.entry((i, j)).or_default() -= c;
                *entries.entry((j, i)).or_default() -= c;
            }
        }
        let mut trip: Vec<_> = entries.into_iter().collect();
        trip.sort_by_key(|&((i, j), _)| (j, i));
        let backend = if m == 0 {
            Backend::Trivial
        } else if m <= direct_limit {
            let t: Vec<Triplet<usize, usize, f64>> =
                trip.iter().filter(|((i, j), _)| i >= j).map(|&((i, j), v)| Triplet::new(i, j, v)).collect();
            let a = SparseColMat::<usize, f64>::try_new_from_triplets(m, m, &t)
                .map_err(|e| FqgError::Numerical(format!("{e:?}")))?;
            let llt = a
                .sp_cholesky(Side::Lower)
                .map_err(|e| FqgError::Numerical(format!("grounded Laplacian not positive definite: {e:?}")))?;
            Backend::Direct(llt)
        } else {
            Backend::Iterative(Cg::new(m, &trip))
        };
        Ok(Self { slot, component, comp_id, m, backend })
    }

    /// Effective resistance between `a` and `b`; zero when `a == b`.
    pub fn resistance(&self, a: usize, b: usize) -> Result<f64> {
        for x in [a, b] {
            if x >= self.component.len() {
                return invalid(format!("node {x} not in network"));
            }
            if self.component[x] != self.comp_id {
                return Err(FqgError::Disconnected(format!("node {x} is not connected to the solver component")));
            }
        }
        if a == b {
            return Ok(0.0);
        }
        let m = self.m;
        let mut rhs = vec![0.0; m];
        if let Some(i) = self.slot[a] {
            rhs[i] += 1.0;
        }
        if let Some(j) = self.slot[b] {
            rhs[j] -= 1.0;
        }
        let x = match &self.backend {
            Backend::Direct(llt) => {
                let mut col = Mat::<f64>::from_fn(m, 1, |i, _| rhs[i]);
                llt.solve_in_place(col.as_mut());
                (0..m).map(|i| col[(i, 0)]).collect::<Vec<_>>()
            }
            Backend::Iterative(cg) => cg.solve(&rhs)?,
            Backend::Trivial => Vec::new(),
        };
        let va = self.slot[a].map_or(0.0, |i| x[i]);
        let vb = self.slot[b].map_or(0.0, |i| x[i]);
        Ok(va - vb)
    }
}

/// Effective resistance between nodes `a` and `b`.
pub fn effective_resistance(net: &ResistorNetwork, a: usize, b: usize) -> Result<f64> {
    ResistanceSolver::new(net, b)?.resistance(a, b)
}

/// Jacobi-preconditioned conjugate gradients on a CSR matrix.
struct Cg {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    inv_diag: Vec<f64>,
}

impl Cg {
    fn new(n: usize, trip: &[((usize, usize), f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &((i, j), v) in trip {
            rows[i].push((j, v));
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut inv_diag = vec![0.0; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for &(j, v) in row.iter() {
                if i == j {
                    inv_diag[i] = 1.0 / v;
                }
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals, inv_diag }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        let bnorm = dot(b, b).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut q = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for _ in 0..(20 * n).max(1000) {
            self.apply(&p, &mut q);
            let step = rz / dot(&p, &q);
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            if dot(&r, &r).sqrt() <= CG_RTOL * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * self.inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(FqgError::Numerical("conjugate gradients did not converge".into()))
    }
}
