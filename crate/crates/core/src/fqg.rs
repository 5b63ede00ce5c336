//! Abstract fractal quantum graphs given by length systems.
//!
//! A length system is a countable family of segments whose endpoints are
//! glued to junctions. The truncation `R_n` keeps the first `n` segments as
//! resistors and contracts every connected piece of the remainder to a point.
//! Resistances here are solved with a dense Cholesky factorization, independent
//! of the sparse solver in [`crate::network`].

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, FqgError, Result};
use crate::geometry::{HanoiParams, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: usize,
    pub len: f64,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSystem {
    /// In truncation order.
    pub segments: Vec<Segment>,
    pub junctions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<BTreeMap<String, Vec<f64>>>,
}

/// A point of a length system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SysPoint {
    Junction(usize),
    OnSegment { seg: usize, offset: f64 },
}

struct Indexed {
    ends: Vec<(usize, usize)>,
}

impl LengthSystem {
    pub fn new(segments: Vec<Segment>, junctions: Vec<String>) -> Result<Self> {
        let s = Self { segments, junctions, coords: None };
        s.index()?;
        Ok(s)
    }

    fn index(&self) -> Result<Indexed> {
        let mut pos: HashMap<&str, usize> = HashMap::new();
        for (i, j) in self.junctions.iter().enumerate() {
            if pos.insert(j.as_str(), i).is_some() {
                return invalid(format!("duplicate junction {j:?}"));
            }
        }
        let mut ends = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            if !(s.len > 0.0 && s.len.is_finite()) {
                return invalid(format!("segment {} has non-positive length {}", s.id, s.len));
            }
            let a = *pos.get(s.a.as_str()).ok_or_else(|| FqgError::InvalidParameter(format!("unknown junction {:?}", s.a)))?;
            let b = *pos.get(s.b.as_str()).ok_or_else(|| FqgError::InvalidParameter(format!("unknown junction {:?}", s.b)))?;
            ends.push((a, b));
        }
        Ok(Indexed { ends })
    }

    pub fn junction(&self, label: &str) -> Option<SysPoint> {
        self.junctions.iter().position(|j| j == label).map(SysPoint::Junction)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sys: Self = serde_json::from_str(s).map_err(|e| FqgError::Parse(e.to_string()))?;
        sys.index()?;
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("length system serialization cannot fail")
    }
}

/// `R_n` on a list of point pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMetricTable {
    pub n: usize,
    pub pairs: Vec<(SysPoint, SysPoint)>,
    pub values: Vec<f64>,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Resistance pseudo-metric of the `n`-th truncation.
pub fn rn_pseudometric(sys: &LengthSystem, n: usize, pairs: &[(SysPoint, SysPoint)]) -> Result<PseudoMetricTable> {
    let idx = sys.index()?;
    let nj = sys.junctions.len();
    let n = n.min(sys.segments.len());
    let mut parent: Vec<usize> = (0..nj).collect();
    for &(a, b) in &idx.ends[n..] {
        let (x, y) = (find(&mut parent, a), find(&mut parent, b));
        parent[x.max(y)] = x.min(y);
    }
    let mut node_of_root = vec![usize::MAX; nj];
    let mut nodes = 0;
    let mut junction_node = vec![0; nj];
    for j in 0..nj {
        let r = find(&mut parent, j);
        if node_of_root[r] == usize::MAX {
            node_of_root[r] = nodes;
            nodes += 1;
        }
        junction_node[j] = node_of_root[r];
    }

    // interior points on kept segments become extra nodes
    let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); n];
    for p in pairs.iter().flat_map(|(x, y)| [x, y]) {
        match *p {
            SysPoint::Junction(j) if j < nj => {}
            SysPoint::OnSegment { seg, offset } if seg < sys.segments.len() => {
                let len = sys.segments[seg].len;
                if !(0.0..=len).contains(&offset) {
                    return invalid(format!("offset {offset} outside segment {seg} of length {len}"));
                }
                if seg < n && offset > 0.0 && offset < len {
                    cuts[seg].push(offset);
                }
            }
            _ => return invalid(format!("{p:?} is not a point of the system")),
        }
    }
    let mut resistors: Vec<(usize, usize, f64)> = Vec::new();
    let mut cut_nodes: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for k in 0..n {
        let (a, b) = idx.ends[k];
        let c = &mut cuts[k];
        c.sort_by(f64::total_cmp);
        c.dedup();
        let mut prev = (0.0, junction_node[a]);
        for &off in c.iter() {
            let x = nodes;
            nodes += 1;
            resistors.push((prev.1, x, off - prev.0));
            cut_nodes[k].push((off, x));
            prev = (off, x);
        }
        resistors.push((prev.1, junction_node[b], sys.segments[k].len - prev.0));
    }
    let node = |p: &SysPoint| -> usize {
        match *p {
            SysPoint::Junction(j) => junction_node[j],
            SysPoint::OnSegment { seg, offset } => {
                let (a, b) = idx.ends[seg];
                if seg >= n || offset == 0.0 {
                    junction_node[a]
                } else if offset == sys.segments[seg].len {
                    junction_node[b]
                } else {
                    cut_nodes[seg].iter().find(|c| c.0 == offset).expect("cut registered").1
                }
            }
        }
    };

    let mut comp: Vec<usize> = (0..nodes).collect();
    for &(a, b, _) in &resistors {
        let (x, y) = (find(&mut comp, a), find(&mut comp, b));
        comp[x.max(y)] = x.min(y);
    }
    let mut solvers: HashMap<usize, GroundedSolver> = HashMap::new();
    let mut values = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        let (a, b) = (node(x), node(y));
        if a == b {
            values.push(0.0);
            continue;
        }
        let (ca, cb) = (find(&mut comp, a), find(&mut comp, b));
        if ca != cb {
            return Err(FqgError::Disconnected(format!("{x:?} and {y:?} are not connected at truncation {n}")));
        }
        if !solvers.contains_key(&ca) {
            let members: Vec<usize> = (0..nodes).filter(|&v| find(&mut comp, v) == ca).collect();
            solvers.insert(ca, GroundedSolver::new(&members, &resistors, nodes)?);
        }
        values.push(solvers[&ca].resistance(a, b));
    }
    Ok(PseudoMetricTable { n, pairs: pairs.to_vec(), values })
}

/// Grounded-Laplacian Cholesky factor of one component (ground = first member).
struct GroundedSolver {
    slot: Vec<Option<usize>>,
    chol: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl GroundedSolver {
    fn new(members: &[usize], resistors: &[(usize, usize, f64)], nodes: usize) -> Result<Self> {
        let mut slot = vec![None; nodes];
        for (i, &v) in members.iter().skip(1).enumerate() {
            slot[v] = Some(i);
        }
        let m = members.len() - 1;
        if m == 0 {
            return Ok(Self { slot, chol: None });
        }
        let mut l = DMatrix::<f64>::zeros(m, m);
        for &(a, b, rho) in resistors {
            let c = 1.0 / rho;
            if let Some(i) = slot[a] {
                l[(i, i)] += c;
            }
            if let Some(j) = slot[b] {
                l[(j, j)] += c;
            }
            if let (Some(i), Some(j)) = (slot[a], slot[b]) {
                l[(i, j)] -= c;
                l[(j, i)] -= c;
            }
        }
        let chol = l
            .cholesky()
            .ok_or_else(|| FqgError::Numerical("grounded Laplacian is not positive definite".into()))?;
        Ok(Self { slot, chol: Some(chol) })
    }

    fn resistance(&self, a: usize, b: usize) -> f64 {
        let Some(chol) = &self.chol else { return 0.0 };
        let mut rhs = DVector::<f64>::zeros(chol.l_dirty().nrows());
        if let Some(i) = self.slot[a] {
            rhs[i] += 1.0;
        }
        if let Some(j) = self.slot[b] {
            rhs[j] -= 1.0;
        }
        let x = chol.solve(&rhs);
        self.slot[a].map_or(0.0, |i| x[i]) - self.slot[b].map_or(0.0, |j| x[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub pair: (SysPoint, SysPoint),
    pub truncations: Vec<usize>,
    pub values: Vec<f64>,
    pub monotone: bool,
    /// Difference of the last two values.
    pub last_gap: f64,
    /// Every value is zero: the pair is never separated at these truncations.
    pub unseparated: bool,
}

/// `R_n` for each pair at the listed truncations.
pub fn convergence_probe_at(
    sys: &LengthSystem,
    pairs: &[(SysPoint, SysPoint)],
    truncations: &[usize],
) -> Result<Vec<ProbeRow>> {
    let tables: Vec<PseudoMetricTable> =
        truncations.iter().map(|&n| rn_pseudometric(sys, n, pairs)).collect::<Result<_>>()?;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(i, &pair)| {
            let values: Vec<f64> = tables.iter().map(|t| t.values[i]).collect();
            let monotone = values.windows(2).all(|w| w[1] >= w[0] - 1e-10);
            let last_gap = match values.len() {
                0 | 1 => 0.0,
                l => values[l - 1] - values[l - 2],
            };
            let unseparated = values.iter().all(|&v| v == 0.0);
            ProbeRow { pair, truncations: truncations.to_vec(), values, monotone, last_gap, unseparated }
        })
        .collect())
}

/// `R_1, .., R_n_max` for each pair.
pub fn convergence_probe(sys: &LengthSystem, pairs: &[(SysPoint, SysPoint)], n_max: usize) -> Result<Vec<ProbeRow>> {
    let t: Vec<usize> = (1..=n_max).collect();
    convergence_probe_at(sys, pairs, &t)
}

/// Hanoi attractor of depth `depth` as a length system: junctions are the
/// `depth`-cells (labelled `w` + word), segments the joining edges in level order.
///
/// Returns the system and, for each level `n = 0..=depth`, the number of
/// segments of level at most `n`.
pub fn hanoi_length_system(hp: HanoiParams, depth: usize) -> Result<(LengthSystem, Vec<usize>)> {
    let HanoiParams { alpha, n0 } = HanoiParams::new(hp.alpha, hp.n0)?;
    let cells = n0
        .checked_pow(depth as u32)
        .filter(|&c| c <= crate::geometry::DEFAULT_CELL_CAP)
        .ok_or_else(|| FqgError::ResourceCap(format!("{n0}^{depth} cells exceed the cap")))?;
    let label = |w: &Word| format!("w{w}");
    let junctions: Vec<String> = (0..cells).map(|c| label(&Word::from_index(c, n0, depth))).collect();
    let r = hp.r();
    let mut segments = Vec::new();
    let mut bounds = vec![0];
    for k in 1..=depth {
        let len = alpha * r.powi(k as i32 - 1);
        for u in 0..n0.pow(k as u32 - 1) {
            let prefix = Word::from_index(u, n0, k - 1);
            for i in 0..n0 as u8 {
                for j in i + 1..n0 as u8 {
                    let mut a = prefix.push(j);
                    a.0.extend(std::iter::repeat(i).take(depth - k));
                    let mut b = prefix.push(i);
                    b.0.extend(std::iter::repeat(j).take(depth - k));
                    segments.push(Segment { id: segments.len(), len, a: label(&a), b: label(&b) });
                }
            }
        }
        bounds.push(segments.len());
    }
    Ok((LengthSystem::new(segments, junctions)?, bounds))
}

/// The infinite broom truncated to `k_max` bristles: a handle of length 1
/// from the origin `o` to `h`, and bristles of length `sqrt(1 + k^-2)` from
/// `o` to `t{k}` at `(1, 1/k)`.
pub fn broom_system(k_max: usize) -> LengthSystem {
    let mut junctions = vec!["o".to_string(), "h".to_string()];
    let mut segments = vec![Segment { id: 0, len: 1.0, a: "o".into(), b: "h".into() }];
    let mut coords = BTreeMap::new();
    coords.insert("o".to_string(), vec![0.0, 0.0]);
    coords.insert("h".to_string(), vec![1.0, 0.0]);
    for k in 1..=k_max {
        let t = format!("t{k}");
        let kf = k as f64;
        segments.push(Segment { id: k, len: (1.0 + 1.0 / (kf * kf)).sqrt(), a: "o".into(), b: t.clone() });
        coords.insert(t.clone(), vec![1.0, 1.0 / kf]);
        junctions.push(t);
    }
    LengthSystem { segments, junctions, coords: Some(coords) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BroomRow {
    pub k: usize,
    pub euclidean_gap: f64,
    pub r_gap: f64,
}

/// Euclidean and resistance distance between each bristle tip and the handle tip.
pub fn broom_demo(k_max: usize) -> Result<Vec<BroomRow>> {
    if k_max == 0 {
        return invalid("k_max must be at least 1");
    }
    let sys = broom_system(k_max);
    let coords = sys.coords.as_ref().expect("broom has coordinates");
    let h = sys.junction("h").expect("handle tip");
    let pairs: Vec<(SysPoint, SysPoint)> =
        (1..=k_max).map(|k| (sys.junction(&format!("t{k}")).expect("tip"), h)).collect();
    let table = rn_pseudometric(&sys, sys.segments.len(), &pairs)?;
    Ok((1..=k_max)
        .map(|k| {
            let (p, q) = (&coords[&format!("t{k}")], &coords["h"]);
            let euclidean_gap = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            BroomRow { k, euclidean_gap, r_gap: table.values[k - 1] }
        })
        .collect())
}
