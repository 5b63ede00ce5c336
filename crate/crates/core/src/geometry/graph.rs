use serde::{Deserialize, Serialize};

use super::params::{HanoiParams, Word};
use super::simplex::simplex_vertices;
use crate::error::{FqgError, Result};

/// Default bound on the number of `n`-cells `n0^n` of a build.
pub const DEFAULT_CELL_CAP: usize = 1_000_000;
/// Default bound on the vertex count produced by [`MetricGraph::subdivide`].
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "T")]
    Triangle,
    #[serde(rename = "J")]
    Joining,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub coords: Vec<f64>,
}

/// Edge of a metric graph.
///
/// `level` is `n` for triangle edges and `k` for a joining edge created at
/// level `k`. `word` is the owning cell for triangle edges and the prefix of
/// length `k-1` for joining edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub len: f64,
    pub kind: EdgeKind,
    pub level: usize,
    pub word: Word,
}

impl Edge {
    /// Endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub params: HanoiParams,
    pub level: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Vertex ids of the corners `p_1, .., p_n0` (the boundary `V_0`).
    pub corners: Vec<usize>,
}

fn cell_cap_check(n0: usize, n: usize, cap: usize) -> Result<usize> {
    let cells = n0
        .checked_pow(n as u32)
        .filter(|&c| c <= cap)
        .ok_or_else(|| FqgError::ResourceCap(format!("{n0}^{n} cells exceed the cap of {cap}")))?;
    Ok(cells)
}

/// Index of the constant word `i^m` among words of length `m`.
fn const_word_index(i: usize, n0: usize, m: usize) -> usize {
    (0..m).fold(0, |acc, _| acc * n0 + i)
}

/// Level-`n` metric graph `G_n` of the Hanoi-type attractor with the default cell cap.
pub fn build_level(params: HanoiParams, n: usize) -> Result<MetricGraph> {
    build_level_capped(params, n, DEFAULT_CELL_CAP)
}

/// Level-`n` metric graph with an explicit cap on `n0^n`.
///
/// Vertex `cell * n0 + i` is the image of corner `p_i` under the cell map
/// `F_w`, cells ordered lexicographically. Joining edges of level `k` have
/// length `alpha * r^(k-1)` and triangle edges length `r^n`.
pub fn build_level_capped(params: HanoiParams, n: usize, cap: usize) -> Result<MetricGraph> {
    let HanoiParams { alpha, n0 } = params;
    let params = HanoiParams::new(alpha, n0)?;
    let cells = cell_cap_check(n0, n, cap)?;
    let r = params.r();
    let p = simplex_vertices(n0)?;
    let dim = n0 - 1;

    let rn = r.powi(n as i32);
    let mut vertices = Vec::with_capacity(cells * n0);
    for c in 0..cells {
        let w = Word::from_index(c, n0, n);
        let mut offset = vec![0.0; dim];
        let mut scale = 1.0 - r;
        for &s in &w.0 {
            for (o, x) in offset.iter_mut().zip(&p[s as usize]) {
                *o += scale * x;
            }
            scale *= r;
        }
        for (i, pi) in p.iter().enumerate() {
            let coords = offset.iter().zip(pi).map(|(o, x)| o + rn * x).collect();
            vertices.push(Vertex { id: c * n0 + i, coords });
        }
    }

    let mut edges = Vec::new();
    for c in 0..cells {
        let w = Word::from_index(c, n0, n);
        for i in 0..n0 {
            for j in i + 1..n0 {
                edges.push(Edge {
                    id: edges.len(),
                    u: c * n0 + i,
                    v: c * n0 + j,
                    len: rn,
                    kind: EdgeKind::Triangle,
                    level: n,
                    word: w.clone(),
                });
            }
        }
    }
    for k in 1..=n {
        let len = alpha * r.powi(k as i32 - 1);
        let tail = n0.pow((n - k) as u32);
        for u in 0..n0.pow(k as u32 - 1) {
            let prefix = Word::from_index(u, n0, k - 1);
            for i in 0..n0 {
                for j in i + 1..n0 {
                    let cell_a = (u * n0 + j) * tail + const_word_index(i, n0, n - k);
                    let cell_b = (u * n0 + i) * tail + const_word_index(j, n0, n - k);
                    edges.push(Edge {
                        id: edges.len(),
                        u: cell_a * n0 + i,
                        v: cell_b * n0 + j,
                        len,
                        kind: EdgeKind::Joining,
                        level: k,
                        word: prefix.clone(),
                    });
                }
            }
        }
    }
    let corners = (0..n0).map(|i| const_word_index(i, n0, n) * n0 + i).collect();
    Ok(MetricGraph { params, level: n, vertices, edges, corners })
}

/// Number of joining edges of `G_n`: `C(n0,2) * sum_{k=1..n} n0^(k-1)`.
pub fn joining_edge_count(n0: usize, n: usize) -> usize {
    n0 * (n0 - 1) / 2 * (1..=n).map(|k| n0.pow(k as u32 - 1)).sum::<usize>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JoiningLength {
    Finite(f64),
    Diverges,
}

/// Total length of the joining edges up to level `n`, or of all of them for `None`.
pub fn total_joining_length(params: HanoiParams, n: Option<usize>) -> JoiningLength {
    let HanoiParams { alpha, n0 } = params;
    let r = params.r();
    let pairs = (n0 * (n0 - 1) / 2) as f64;
    match n {
        Some(n) => JoiningLength::Finite(
            (1..=n)
                .map(|k| pairs * (n0 as f64).powi(k as i32 - 1) * alpha * r.powi(k as i32 - 1))
                .sum(),
        ),
        None => {
            let q = n0 as f64 * r;
            if q >= 1.0 {
                JoiningLength::Diverges
            } else {
                JoiningLength::Finite(pairs * alpha / (1.0 - q))
            }
        }
    }
}

/// `max(1, ln n0 / (ln 2 - ln(1 - alpha)))`.
pub fn hausdorff_dimension(params: HanoiParams) -> f64 {
    if params.alpha >= 1.0 {
        return 1.0;
    }
    let d = (params.n0 as f64).ln() / (2f64.ln() - (1.0 - params.alpha).ln());
    d.max(1.0)
}

/// A subdivided graph together with the sub-edge ranges of each original edge.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: MetricGraph,
    /// `pieces[e] = (first sub-edge id, count)`; sub-edges run from `u` to `v`.
    pub pieces: Vec<(usize, usize)>,
}

impl Subdivision {
    /// Re-expresses a point of the original graph on the subdivided graph.
    pub fn map_point(&self, p: super::Point) -> super::Point {
        use super::Point;
        match p {
            Point::Vertex(v) => Point::Vertex(v),
            Point::OnEdge { edge, offset } => {
                let (first, count) = self.pieces[edge];
                let h = self.graph.edges[first].len;
                let k = ((offset / h).floor() as usize).min(count - 1);
                Point::OnEdge { edge: first + k, offset: (offset - k as f64 * h).clamp(0.0, h) }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    alpha: f64,
    n0: usize,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    u: usize,
    v: usize,
    len: f64,
    kind: EdgeKind,
    level: usize,
    word: String,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    params: ParamsJson,
    level: usize,
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    corners: Vec<usize>,
}

impl MetricGraph {
    pub fn n0(&self) -> usize {
        self.params.n0
    }

    pub fn cell_count(&self) -> usize {
        self.params.n0.pow(self.level as u32)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    /// `adj[v]` lists `(neighbour, edge id)` pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push((e.v, e.id));
            adj[e.v].push((e.u, e.id));
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.vertices.len()
    }

    pub fn subdivide(&self, h: f64) -> Result<Subdivision> {
        self.subdivide_capped(h, DEFAULT_VERTEX_CAP)
    }

    /// Splits every edge into `ceil(len/h)` equal pieces. Original vertices keep their ids.
    pub fn subdivide_capped(&self, h: f64, cap: usize) -> Result<Subdivision> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(FqgError::InvalidParameter(format!("granularity must be positive, got {h}")));
        }
        // relative slack so that e.g. 0.4/0.05 counts as 8 pieces, not 9
        let counts: Vec<usize> =
            self.edges.iter().map(|e| ((e.len / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize).collect();
        let extra: usize = counts.iter().map(|c| c - 1).sum();
        let total = self.vertices.len() + extra;
        if total > cap {
            return Err(FqgError::ResourceCap(format!("subdivision needs {total} vertices, cap {cap}")));
        }
        let mut vertices = self.vertices.clone();
        let mut edges = Vec::with_capacity(self.edges.len() + extra);
        let mut pieces = Vec::with_capacity(self.edges.len());
        for (e, &m) in self.edges.iter().zip(&counts) {
            pieces.push((edges.len(), m));
            let piece = e.len / m as f64;
            let (a, b) = (&self.vertices[e.u].coords, &self.vertices[e.v].coords);
            let mut prev = e.u;
            for k in 1..=m {
                let next = if k == m {
                    e.v
                } else {
                    let t = k as f64 / m as f64;
                    let coords = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                    let id = vertices.len();
                    vertices.push(Vertex { id, coords });
                    id
                };
                edges.push(Edge {
                    id: edges.len(),
                    u: prev,
                    v: next,
                    len: piece,
                    kind: e.kind,
                    level: e.level,
                    word: e.word.clone(),
                });
                prev = next;
            }
        }
        let graph = MetricGraph {
            params: self.params,
            level: self.level,
            vertices,
            edges,
            corners: self.corners.clone(),
        };
        Ok(Subdivision { graph, pieces })
    }

    pub fn to_json(&self) -> String {
        let g = GraphJson {
            params: ParamsJson { alpha: self.params.alpha, n0: self.params.n0 },
            level: self.level,
            vertices: self.vertices.iter().map(|v| VertexJson { id: v.id, coords: v.coords.clone() }).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id,
                    u: e.u,
                    v: e.v,
                    len: e.len,
                    kind: e.kind,
                    level: e.level,
                    word: e.word.to_string(),
                })
                .collect(),
            corners: self.corners.clone(),
        };
        serde_json::to_string(&g).expect("graph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(s).map_err(|e| FqgError::Parse(e.to_string()))?;
        let params = HanoiParams::new(g.params.alpha, g.params.n0)?;
        let nv = g.vertices.len();
        let mut vertices = Vec::with_capacity(nv);
        for (i, v) in g.vertices.into_iter().enumerate() {
            if v.id != i {
                return Err(FqgError::Parse(format!("vertex id {} at position {i}", v.id)));
            }
            vertices.push(Vertex { id: v.id, coords: v.coords });
        }
        let mut edges = Vec::with_capacity(g.edges.len());
        for (i, e) in g.edges.into_iter().enumerate() {
            if e.id != i || e.u >= nv || e.v >= nv || !(e.len > 0.0) {
                return Err(FqgError::Parse(format!("malformed edge at position {i}")));
            }
            edges.push(Edge {
                id: e.id,
                u: e.u,
                v: e.v,
                len: e.len,
                kind: e.kind,
                level: e.level,
                word: Word::parse(&e.word, params.n0)?,
            });
        }
        if g.corners.iter().any(|&c| c >= nv) {
            return Err(FqgError::Parse("corner id out of range".into()));
        }
        Ok(MetricGraph { params, level: g.level, vertices, edges, corners: g.corners })
    }
}
