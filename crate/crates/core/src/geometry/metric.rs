use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::MetricGraph;
use crate::error::{FqgError, Result};

/// A point of a metric graph: a vertex, or a position along an edge measured from its `u` end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Vertex(usize),
    OnEdge { edge: usize, offset: f64 },
}

impl Point {
    fn check(&self, g: &MetricGraph) -> Result<()> {
        match *self {
            Point::Vertex(v) if v < g.vertices.len() => Ok(()),
            Point::OnEdge { edge, offset } if edge < g.edges.len() => {
                let len = g.edges[edge].len;
                if (0.0..=len).contains(&offset) {
                    Ok(())
                } else {
                    Err(FqgError::InvalidParameter(format!("offset {offset} outside [0, {len}]")))
                }
            }
            _ => Err(FqgError::InvalidParameter(format!("{self:?} is not on the graph"))),
        }
    }

    /// Euclidean coordinates by linear interpolation along the edge.
    pub fn coords(&self, g: &MetricGraph) -> Vec<f64> {
        match *self {
            Point::Vertex(v) => g.vertices[v].coords.clone(),
            Point::OnEdge { edge, offset } => {
                let e = &g.edges[edge];
                let t = offset / e.len;
                let (a, b) = (&g.vertices[e.u].coords, &g.vertices[e.v].coords);
                a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
            }
        }
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Geodesic distance from `a` to every vertex (`inf` where unreachable).
pub fn distances_from(g: &MetricGraph, a: Point) -> Result<Vec<f64>> {
    a.check(g)?;
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; g.vertices.len()];
    let mut heap = BinaryHeap::new();
    match a {
        Point::Vertex(v) => {
            dist[v] = 0.0;
            heap.push(Item(0.0, v));
        }
        Point::OnEdge { edge, offset } => {
            let e = &g.edges[edge];
            dist[e.u] = offset;
            dist[e.v] = dist[e.v].min(e.len - offset);
            heap.push(Item(dist[e.u], e.u));
            heap.push(Item(dist[e.v], e.v));
        }
    }
    while let Some(Item(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, eid) in &adj[x] {
            let nd = d + g.edges[eid].len;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Item(nd, y));
            }
        }
    }
    Ok(dist)
}

/// Distance to `b` given vertex distances from `a`.
fn resolve(g: &MetricGraph, a: Point, dist: &[f64], b: Point) -> f64 {
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

/// Shortest-path length between two points of the graph.
pub fn geodesic_distance(g: &MetricGraph, a: Point, b: Point) -> Result<f64> {
    b.check(g)?;
    let dist = distances_from(g, a)?;
    let d = resolve(g, a, &dist, b);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(FqgError::Disconnected(format!("{a:?} and {b:?} lie in different components")))
    }
}

/// Total edge length of the closed geodesic ball of radius `t` about `center`.
pub fn ball_measure(g: &MetricGraph, center: Point, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(FqgError::InvalidParameter(format!("radius must be positive, got {t}")));
    }
    let dist = distances_from(g, center)?;
    let mut total = 0.0;
    for e in &g.edges {
        let len = e.len;
        let mut iv: Vec<(f64, f64)> = Vec::with_capacity(3);
        if dist[e.u] <= t {
            iv.push((0.0, (t - dist[e.u]).min(len)));
        }
        if dist[e.v] <= t {
            iv.push(((len - (t - dist[e.v])).max(0.0), len));
        }
        if let Point::OnEdge { edge, offset } = center {
            if edge == e.id {
                iv.push(((offset - t).max(0.0), (offset + t).min(len)));
            }
        }
        total += union_length(&mut iv);
    }
    Ok(total)
}

/// `count` points drawn uniformly with respect to length, reproducibly from `seed`.
pub fn sample_points(g: &MetricGraph, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cum = Vec::with_capacity(g.edges.len());
    let mut acc = 0.0;
    for e in &g.edges {
        acc += e.len;
        cum.push(acc);
    }
    (0..count)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let edge = cum.partition_point(|&c| c <= u).min(g.edges.len() - 1);
            let offset = rng.gen::<f64>() * g.edges[edge].len;
            Point::OnEdge { edge, offset }
        })
        .collect()
}

fn union_length(iv: &mut [(f64, f64)]) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for &(a, b) in iv.iter() {
        match cur {
            Some((ca, cb)) if a <= cb => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}
