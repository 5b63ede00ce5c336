use serde::Serialize;

use super::inertia::InertiaCounter;
use super::model::{Bc, ChainEdge, ChainModel, EdgeClass};
use super::sparse::SymSparse;
use crate::error::{invalid, FqgError, Result};
use crate::geometry::{EdgeKind, HanoiParams, MetricGraph, Word};
use crate::measure::MeasureParams;

/// Default bound on the number of degrees of freedom of an assembly.
pub const DEFAULT_DOF_CAP: usize = 20_000_000;

/// Metadata of a discretized eigenproblem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discretization {
    pub level: usize,
    pub n0: usize,
    /// Linear elements per edge.
    pub p: usize,
    pub bc: Bc,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub n_dofs: usize,
}

/// Stiffness and mass matrices together with the chain structure they came from.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub k: SymSparse,
    pub m: SymSparse,
    pub model: ChainModel,
    pub disc: Discretization,
}

impl AssembledSystem {
    pub fn from_model(model: ChainModel, disc: Discretization) -> Self {
        let (k, m) = model.assemble();
        Self { k, m, model, disc }
    }

    pub fn n_dofs(&self) -> usize {
        self.model.n_dofs()
    }

    /// `#{lambda < x}` by inertia.
    pub fn count_below(&self, x: f64) -> usize {
        InertiaCounter::new(&self.model).count_below(x)
    }
}

fn check_pairing(g: &MetricGraph, mp: &MeasureParams, p: usize) -> Result<()> {
    if g.n0() != mp.n0 {
        return invalid(format!("graph has n0 = {} but measure n0 = {}", g.n0(), mp.n0));
    }
    if p == 0 {
        return invalid("at least one element per edge is required");
    }
    Ok(())
}

fn level_classes(hp: &HanoiParams, mp: &MeasureParams, n: usize, p: usize) -> Vec<EdgeClass> {
    let r = hp.r();
    (1..=n)
        .map(|k| EdgeClass { len: hp.alpha * r.powi(k as i32 - 1), mass: mp.joining_mass(k), p })
        .collect()
}

fn dof_cap(cells: usize, edges: usize, p: usize, cap: usize) -> Result<()> {
    let dofs = edges.checked_mul(p - 1).and_then(|x| x.checked_add(cells));
    match dofs {
        Some(d) if d <= cap => Ok(()),
        _ => Err(FqgError::ResourceCap(format!("{cells} cells, {edges} edges at p = {p} exceed {cap} dofs"))),
    }
}

/// `mu`-weighted Laplacian on the collapsed-cell space of a level-`n` build.
///
/// Every `n`-cell is one dof with lumped mass `s^n`; joining edges carry `p`
/// linear elements with density `s^(k-1) beta / (alpha r^(k-1))`. Dirichlet
/// pins the corner cells `i^n`.
pub fn assemble(g: &MetricGraph, mp: &MeasureParams, p: usize, bc: Bc) -> Result<AssembledSystem> {
    check_pairing(g, mp, p)?;
    let n0 = g.n0();
    let n = g.level;
    let cells = g.cell_count();
    let edges: Vec<_> = g.edges_of_kind(EdgeKind::Joining).collect();
    dof_cap(cells, edges.len(), p, DEFAULT_DOF_CAP)?;
    let mut active = vec![true; cells];
    if bc == Bc::Dirichlet {
        for &c in &g.corners {
            active[c / n0] = false;
        }
    }
    let model = ChainModel::new(
        vec![mp.s().powi(n as i32); cells],
        active,
        level_classes(&g.params, mp, n, p),
        edges.iter().map(|e| ChainEdge { a: e.u / n0, b: e.v / n0, class: e.level - 1 }).collect(),
    );
    let disc = Discretization {
        level: n,
        n0,
        p,
        bc,
        alpha: g.params.alpha,
        beta: Some(mp.beta),
        n_dofs: model.n_dofs(),
    };
    Ok(AssembledSystem::from_model(model, disc))
}

/// The collapsed-cell problem restricted to the cell `F_w` of a level-`n`
/// build, keeping the global masses and lengths. Dirichlet pins the cell's
/// own corners `w i^(n-|w|)`.
pub fn assemble_cell(g: &MetricGraph, mp: &MeasureParams, p: usize, w: &Word, bc: Bc) -> Result<AssembledSystem> {
    check_pairing(g, mp, p)?;
    let n0 = g.n0();
    let n = g.level;
    let m = w.len();
    if m > n || w.0.iter().any(|&c| c as usize >= n0) {
        return invalid(format!("word {w} is not a cell of level {n}"));
    }
    let tail = n0.pow((n - m) as u32);
    let first = w.index(n0) * tail;
    let local = |c: usize| c.checked_sub(first).filter(|&x| x < tail);
    let edges: Vec<ChainEdge> = g
        .edges_of_kind(EdgeKind::Joining)
        .filter_map(|e| match (local(e.u / n0), local(e.v / n0)) {
            (Some(a), Some(b)) => Some(ChainEdge { a, b, class: e.level - 1 }),
            _ => None,
        })
        .collect();
    let mut active = vec![true; tail];
    if bc == Bc::Dirichlet {
        for i in 0..n0 {
            let corner = Word::repeat(i as u8, n - m).index(n0);
            active[corner] = false;
        }
    }
    let model =
        ChainModel::new(vec![mp.s().powi(n as i32); tail], active, level_classes(&g.params, mp, n, p), edges);
    let disc = Discretization {
        level: n,
        n0,
        p,
        bc,
        alpha: g.params.alpha,
        beta: Some(mp.beta),
        n_dofs: model.n_dofs(),
    };
    Ok(AssembledSystem::from_model(model, disc))
}

/// A single interval of length `len` and uniform total mass `mass`, split into `p` elements.
pub fn interval_system(len: f64, mass: f64, p: usize, bc: Bc) -> Result<AssembledSystem> {
    if !(len > 0.0 && mass > 0.0) || p == 0 {
        return invalid(format!("interval needs positive length and mass and p >= 1 (len {len}, mass {mass}, p {p})"));
    }
    if bc == Bc::Dirichlet && p < 2 {
        return invalid("Dirichlet interval needs at least two elements");
    }
    let on = bc == Bc::Neumann;
    let model = ChainModel::new(
        vec![0.0, 0.0],
        vec![on, on],
        vec![EdgeClass { len, mass, p }],
        vec![ChainEdge { a: 0, b: 1, class: 0 }],
    );
    let disc = Discretization { level: 0, n0: 0, p, bc, alpha: f64::NAN, beta: None, n_dofs: model.n_dofs() };
    Ok(AssembledSystem::from_model(model, disc))
}

/// Full graph with length measure, every edge split into `ceil(len/h)` elements.
pub fn length_measure_system(g: &MetricGraph, h: f64) -> Result<AssembledSystem> {
    if !(h > 0.0) {
        return invalid(format!("element size must be positive, got {h}"));
    }
    let classes: Vec<EdgeClass> = g
        .edges
        .iter()
        .map(|e| EdgeClass { len: e.len, mass: e.len, p: ((e.len / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize })
        .collect();
    let dofs: usize = g.vertices.len() + classes.iter().map(|c| c.p - 1).sum::<usize>();
    if dofs > DEFAULT_DOF_CAP {
        return Err(FqgError::ResourceCap(format!("{dofs} dofs exceed {DEFAULT_DOF_CAP}")));
    }
    let edges = g.edges.iter().enumerate().map(|(i, e)| ChainEdge { a: e.u, b: e.v, class: i }).collect();
    let model = ChainModel::new(vec![0.0; g.vertices.len()], vec![true; g.vertices.len()], classes, edges);
    let disc = Discretization {
        level: g.level,
        n0: g.n0(),
        p: 0,
        bc: Bc::Neumann,
        alpha: g.params.alpha,
        beta: None,
        n_dofs: model.n_dofs(),
    };
    Ok(AssembledSystem::from_model(model, disc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_level;

    fn setup(n: usize) -> (MetricGraph, MeasureParams) {
        (build_level(HanoiParams::new(0.2, 3).unwrap(), n).unwrap(), MeasureParams::new(0.1, 3).unwrap())
    }

    #[test]
    fn level_one_p1_by_hand() {
        let (g, mp) = setup(1);
        let sys = assemble(&g, &mp, 1, Bc::Neumann).unwrap();
        assert_eq!(sys.n_dofs(), 3);
        let s = mp.s();
        for i in 0..3 {
            assert!((sys.k.get(i, i) - 2.0 / 0.2).abs() < 1e-12);
            assert!((sys.m.get(i, i) - (s + 2.0 * 0.1 / 3.0)).abs() < 1e-15);
            for j in 0..3 {
                if i != j {
                    assert!((sys.k.get(i, j) + 1.0 / 0.2).abs() < 1e-12);
                    assert!((sys.m.get(i, j) - 0.1 / 6.0).abs() < 1e-15);
                }
            }
        }
        assert!((sys.m.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dof_counts_and_kernel() {
        let (g, mp) = setup(3);
        for p in [1, 2, 5] {
            let nn = assemble(&g, &mp, p, Bc::Neumann).unwrap();
            assert_eq!(nn.n_dofs(), 27 + 39 * (p - 1));
            let dd = assemble(&g, &mp, p, Bc::Dirichlet).unwrap();
            assert_eq!(dd.n_dofs(), nn.n_dofs() - 3);
            let ones = vec![1.0; nn.n_dofs()];
            assert!(nn.k.matvec(&ones).iter().all(|v| v.abs() < 1e-9));
            assert!(nn.k.is_symmetric() && nn.m.is_symmetric());
            assert!((nn.m.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_checked() {
        let (g, _) = setup(2);
        assert!(assemble(&g, &MeasureParams::new(0.1, 4).unwrap(), 2, Bc::Neumann).is_err());
        assert!(assemble(&g, &MeasureParams::new(0.1, 3).unwrap(), 0, Bc::Neumann).is_err());
    }

    #[test]
    fn cell_restriction() {
        let (g, mp) = setup(3);
        let sys = assemble_cell(&g, &mp, 2, &Word(vec![1]), Bc::Dirichlet).unwrap();
        // 9 cells minus 3 corners, 12 internal joining edges with one interior node each
        assert_eq!(sys.n_dofs(), 6 + 12);
        assert!(assemble_cell(&g, &mp, 2, &Word(vec![0, 0, 0, 0]), Bc::Neumann).is_err());
    }

    #[test]
    fn length_measure_totals() {
        let g = build_level(HanoiParams::new(0.5, 3).unwrap(), 2).unwrap();
        let sys = length_measure_system(&g, 0.05).unwrap();
        assert!((sys.m.total() - g.total_length()).abs() < 1e-12);
    }
}
