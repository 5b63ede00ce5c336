use serde::{Deserialize, Serialize};

use super::sparse::SymSparse;

/// Boundary condition of an eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bc {
    #[serde(rename = "d")]
    Dirichlet,
    #[serde(rename = "n")]
    Neumann,
}

/// Edge family sharing length, mass and element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeClass {
    pub len: f64,
    pub mass: f64,
    /// Number of linear elements along the edge.
    pub p: usize,
}

impl EdgeClass {
    pub fn h(&self) -> f64 {
        self.len / self.p as f64
    }

    pub fn density(&self) -> f64 {
        self.mass / self.len
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEdge {
    pub a: usize,
    pub b: usize,
    pub class: usize,
}

/// Junctions carrying lumped masses, joined by edges discretized with
/// piecewise-linear elements of uniform density.
///
/// Inactive junctions are pinned to zero (Dirichlet). Dofs are ordered as
/// active junctions, then the interior nodes of each edge running from `a` to `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModel {
    pub junction_mass: Vec<f64>,
    pub active: Vec<bool>,
    pub classes: Vec<EdgeClass>,
    pub edges: Vec<ChainEdge>,
    junction_dof: Vec<Option<usize>>,
    edge_first: Vec<usize>,
    n_dofs: usize,
}

impl ChainModel {
    pub fn new(junction_mass: Vec<f64>, active: Vec<bool>, classes: Vec<EdgeClass>, edges: Vec<ChainEdge>) -> Self {
        assert_eq!(junction_mass.len(), active.len());
        let mut junction_dof = vec![None; active.len()];
        let mut next = 0;
        for (j, &on) in active.iter().enumerate() {
            if on {
                junction_dof[j] = Some(next);
                next += 1;
            }
        }
        let mut edge_first = Vec::with_capacity(edges.len());
        for e in &edges {
            edge_first.push(next);
            next += classes[e.class].p - 1;
        }
        Self { junction_mass, active, classes, edges, junction_dof, edge_first, n_dofs: next }
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn junction_dof(&self, j: usize) -> Option<usize> {
        self.junction_dof[j]
    }

    /// Dof of node `k` (`0..=p`) along edge `e`; `None` for pinned junctions.
    pub fn edge_node_dof(&self, e: usize, k: usize) -> Option<usize> {
        let ed = &self.edges[e];
        let p = self.classes[ed.class].p;
        if k == 0 {
            self.junction_dof[ed.a]
        } else if k == p {
            self.junction_dof[ed.b]
        } else {
            Some(self.edge_first[e] + k - 1)
        }
    }

    /// Stiffness `int u'v' dx` and mass matrices.
    pub fn assemble(&self) -> (SymSparse, SymSparse) {
        let mut kt = Vec::new();
        let mut mt = Vec::new();
        for (j, &m) in self.junction_mass.iter().enumerate() {
            if let Some(d) = self.junction_dof[j] {
                mt.push((d, d, m));
                kt.push((d, d, 0.0));
            }
        }
        for (e, ed) in self.edges.iter().enumerate() {
            let c = self.classes[ed.class];
            let h = c.h();
            let rho = c.density();
            let (kd, ko) = (1.0 / h, -1.0 / h);
            let (md, mo) = (rho * h / 3.0, rho * h / 6.0);
            for k in 0..c.p {
                let (x, y) = (self.edge_node_dof(e, k), self.edge_node_dof(e, k + 1));
                if let Some(x) = x {
                    kt.push((x, x, kd));
                    mt.push((x, x, md));
                }
                if let Some(y) = y {
                    kt.push((y, y, kd));
                    mt.push((y, y, md));
                }
                if let (Some(x), Some(y)) = (x, y) {
                    if x == y {
                        // loop edge with a single element
                        kt.push((x, x, 2.0 * ko));
                        mt.push((x, x, 2.0 * mo));
                    } else {
                        kt.push((x.min(y), x.max(y), ko));
                        mt.push((x.min(y), x.max(y), mo));
                    }
                }
            }
        }
        (SymSparse::from_entries(self.n_dofs, kt), SymSparse::from_entries(self.n_dofs, mt))
    }

    /// Total mass of the model (junctions plus edges), ignoring pinning.
    pub fn total_mass(&self) -> f64 {
        self.junction_mass.iter().sum::<f64>() + self.edges.iter().map(|e| self.classes[e.class].mass).sum::<f64>()
    }
}
