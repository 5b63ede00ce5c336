use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::resistor::{ResistanceSolver, ResistorNetwork};
use crate::error::{invalid, Result};
use crate::fmt::num;
use crate::geometry::{build_level, EdgeKind, HanoiParams, MetricGraph, Point};

/// Network with every `n`-cell contracted to one node; joining edges become resistors.
pub fn shorted_network(g: &MetricGraph) -> Result<ResistorNetwork> {
    let n0 = g.n0();
    let mut net = ResistorNetwork::new(g.cell_count());
    for e in g.edges_of_kind(EdgeKind::Joining) {
        net.add(e.u / n0, e.v / n0, e.len)?;
    }
    for (i, &c) in g.corners.iter().enumerate() {
        net.label(format!("p{}", i + 1), c / n0);
    }
    Ok(net)
}

/// One node per vertex and one resistor per edge.
pub fn full_network(g: &MetricGraph) -> Result<ResistorNetwork> {
    let mut net = ResistorNetwork::new(g.vertices.len());
    for e in &g.edges {
        net.add(e.u, e.v, e.len)?;
    }
    for (i, &c) in g.corners.iter().enumerate() {
        net.label(format!("p{}", i + 1), c);
    }
    Ok(net)
}

/// Full network with the given points inserted as nodes (edges split at interior points).
///
/// Returns the network and the node of each point.
pub fn full_network_with_points(g: &MetricGraph, points: &[Point]) -> Result<(ResistorNetwork, Vec<usize>)> {
    let mut net = ResistorNetwork::new(g.vertices.len());
    let mut on_edge: Vec<Vec<(f64, usize)>> = vec![Vec::new(); g.edges.len()];
    for (i, p) in points.iter().enumerate() {
        match *p {
            Point::Vertex(v) if v < g.vertices.len() => {}
            Point::OnEdge { edge, offset } if edge < g.edges.len() && (0.0..=g.edges[edge].len).contains(&offset) => {
                on_edge[edge].push((offset, i));
            }
            _ => return invalid(format!("{p:?} is not on the graph")),
        }
    }
    let mut node_of = vec![usize::MAX; points.len()];
    for (i, p) in points.iter().enumerate() {
        if let Point::Vertex(v) = *p {
            node_of[i] = v;
        }
    }
    for e in &g.edges {
        let list = &mut on_edge[e.id];
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prev = (0.0, e.u);
        for &(off, i) in list.iter() {
            let node = if off == 0.0 {
                e.u
            } else if off == e.len {
                e.v
            } else if off == prev.0 {
                prev.1
            } else {
                let x = net.add_node();
                net.add(prev.1, x, off - prev.0)?;
                prev = (off, x);
                x
            };
            node_of[i] = node;
        }
        net.add(prev.1, e.v, e.len - prev.0)?;
    }
    Ok((net, node_of))
}

/// `(5/3) r R + alpha`: corner-delta wire resistance one level up.
pub fn recurrence_step(rr: f64, alpha: f64) -> f64 {
    let r = (1.0 - alpha) / 2.0;
    debug_assert!(5.0 * r / 3.0 < 1.0);
    5.0 / 3.0 * r * rr + alpha
}

/// Wire resistances `R_0 = seed, R_1, .., R_n_max`.
pub fn recurrence_sequence(alpha: f64, seed: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut x = seed;
    out.push(x);
    for _ in 0..n_max {
        x = recurrence_step(x, alpha);
        out.push(x);
    }
    out
}

/// Limiting corner resistance `4 alpha / (1 + 5 alpha)` for `n0 = 3`.
pub fn corner_resistance_limit(alpha: f64) -> f64 {
    4.0 * alpha / (1.0 + 5.0 * alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceRow {
    pub n: usize,
    pub r_shorted: f64,
    pub r_full: f64,
    /// Recurrence prediction from the shorted seed (`n0 = 3` only).
    pub rec_lower: Option<f64>,
    /// Recurrence prediction from the unit-triangle seed (`n0 = 3` only).
    pub rec_upper: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceSequence {
    pub params: HanoiParams,
    pub pair: (usize, usize),
    pub rows: Vec<ResistanceRow>,
    pub limit: Option<f64>,
}

/// Corner-to-corner resistances on the shorted and full networks over `levels`.
///
/// `pair` holds zero-based corner indices.
pub fn resistance_sequence(
    params: HanoiParams,
    levels: RangeInclusive<usize>,
    pair: (usize, usize),
) -> Result<ResistanceSequence> {
    let n0 = params.n0;
    if pair.0 >= n0 || pair.1 >= n0 || pair.0 == pair.1 {
        return invalid(format!("corner pair {pair:?} invalid for n0 = {n0}"));
    }
    let levels: Vec<usize> = levels.collect();
    let n_max = levels.iter().copied().max().unwrap_or(0);
    let lower = recurrence_sequence(params.alpha, 0.0, n_max);
    let upper = recurrence_sequence(params.alpha, 1.0, n_max);
    let rows = levels
        .par_iter()
        .map(|&n| {
            let g = build_level(params, n)?;
            let (a, b) = (g.corners[pair.0], g.corners[pair.1]);
            let sh = shorted_network(&g)?;
            let r_shorted = ResistanceSolver::new(&sh, b / n0)?.resistance(a / n0, b / n0)?;
            let full = full_network(&g)?;
            let r_full = ResistanceSolver::new(&full, b)?.resistance(a, b)?;
            let (rec_lower, rec_upper) =
                if n0 == 3 { (Some(2.0 / 3.0 * lower[n]), Some(2.0 / 3.0 * upper[n])) } else { (None, None) };
            Ok(ResistanceRow { n, r_shorted, r_full, rec_lower, rec_upper })
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = (n0 == 3).then(|| corner_resistance_limit(params.alpha));
    Ok(ResistanceSequence { params, pair, rows, limit })
}

impl ResistanceSequence {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        let mut s = String::from("n,R_shorted,R_full,rec_lower,rec_upper,limit\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                num(r.r_shorted),
                num(r.r_full),
                opt(r.rec_lower),
                opt(r.rec_upper),
                opt(self.limit)
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::effective_resistance;

    fn hp(a: f64) -> HanoiParams {
        HanoiParams::new(a, 3).unwrap()
    }

    #[test]
    fn network_shapes() {
        let g = build_level(hp(0.2), 1).unwrap();
        let s = shorted_network(&g).unwrap();
        assert_eq!(s.n_nodes, 3);
        assert_eq!(s.resistors.len(), 3);
        assert!(s.resistors.iter().all(|r| (r.rho - 0.2).abs() < 1e-15));
        let f = full_network(&g).unwrap();
        assert_eq!((f.n_nodes, f.resistors.len()), (9, 12));

        let g0 = build_level(hp(0.2), 0).unwrap();
        let s0 = shorted_network(&g0).unwrap();
        assert_eq!((s0.n_nodes, s0.resistors.len()), (1, 0));
        assert_eq!(effective_resistance(&s0, 0, 0).unwrap(), 0.0);

        let g2 = build_level(hp(0.2), 2).unwrap();
        let s2 = shorted_network(&g2).unwrap();
        assert_eq!((s2.n_nodes, s2.resistors.len()), (9, 12));
        assert_eq!(s2.resistors.iter().filter(|r| (r.rho - 0.08).abs() < 1e-15).count(), 9);
    }

    #[test]
    fn inserted_points_split_edges() {
        let g = build_level(hp(0.2), 0).unwrap();
        let pts = [
            Point::OnEdge { edge: 0, offset: 0.25 },
            Point::OnEdge { edge: 0, offset: 0.75 },
            Point::Vertex(2),
            Point::OnEdge { edge: 1, offset: 0.0 },
        ];
        let (net, nodes) = full_network_with_points(&g, &pts).unwrap();
        assert_eq!(net.n_nodes, 5);
        assert_eq!(nodes[2], 2);
        assert_eq!(nodes[3], g.edges[1].u);
        // two points on one side of a unit triangle: 0.5 in parallel with 2.5
        let r = effective_resistance(&net, nodes[0], nodes[1]).unwrap();
        assert!((r - 0.5 * 2.5 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn recurrence_values() {
        assert!((recurrence_step(1.0, 0.2) - 0.866_666_666_666_666_7).abs() < 1e-15);
        assert_eq!(recurrence_step(0.0, 0.3), 0.3);
        for a in [0.05, 0.2, 0.7] {
            let z0 = 6.0 * a / (1.0 + 5.0 * a);
            assert!((recurrence_step(z0, a) - z0).abs() < 1e-15);
            assert!((2.0 / 3.0 * z0 - corner_resistance_limit(a)).abs() < 1e-15);
        }
        assert!((corner_resistance_limit(0.2) - 0.4).abs() < 1e-15);
        assert!((corner_resistance_limit(1.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn small_sequence() {
        let seq = resistance_sequence(hp(0.2), 0..=3, (0, 1)).unwrap();
        assert!((seq.rows[1].r_shorted - 0.4 / 3.0).abs() < 1e-14);
        assert!((seq.rows[0].r_full - 2.0 / 3.0).abs() < 1e-14);
        for r in &seq.rows {
            assert!((r.r_shorted - r.rec_lower.unwrap()).abs() < 1e-12);
            assert!((r.r_full - r.rec_upper.unwrap()).abs() < 1e-12);
        }
        let csv = seq.to_csv();
        assert!(csv.starts_with("n,R_shorted,R_full,rec_lower,rec_upper,limit\n0,0,"));
        assert!(resistance_sequence(hp(0.2), 0..=1, (1, 1)).is_err());
    }

    #[test]
    fn four_branch_sandwich() {
        let seq = resistance_sequence(HanoiParams::new(0.2, 4).unwrap(), 0..=3, (0, 2)).unwrap();
        assert!(seq.limit.is_none());
        for w in seq.rows.windows(2) {
            assert!(w[1].r_shorted >= w[0].r_shorted - 1e-12);
            assert!(w[1].r_full <= w[0].r_full + 1e-12);
        }
        assert!(seq.to_csv().lines().nth(1).unwrap().ends_with(",,,"));
    }
}
