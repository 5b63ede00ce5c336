use super::resistor::ResistorNetwork;
use crate::error::{invalid, FqgError, Result};
use crate::geometry::{build_level, EdgeKind, HanoiParams};

/// Star arms `(a, b, c)` equivalent to the delta with sides `ab`, `bc`, `ca`.
pub fn delta_to_y(ab: f64, bc: f64, ca: f64) -> Result<(f64, f64, f64)> {
    if !(ab > 0.0 && bc > 0.0 && ca > 0.0) {
        return invalid(format!("delta sides must be positive: ({ab}, {bc}, {ca})"));
    }
    let sum = ab + bc + ca;
    Ok((ab * ca / sum, ab * bc / sum, bc * ca / sum))
}

/// Delta sides `(ab, bc, ca)` equivalent to the star with arms `a`, `b`, `c`.
pub fn y_to_delta(a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return invalid(format!("star arms must be positive: ({a}, {b}, {c})"));
    }
    let p = a * b + b * c + c * a;
    Ok((p / c, p / a, p / b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    DeltaToY,
    YToDelta,
    Series,
    Parallel,
}

/// One network transformation, with the network as it stands afterwards.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub nodes: Vec<usize>,
    pub values: Vec<f64>,
    pub after: ResistorNetwork,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub initial: ResistorNetwork,
    /// Nodes that survive every step.
    pub terminals: Vec<usize>,
    pub steps: Vec<ReductionStep>,
}

fn take(net: &mut ResistorNetwork, a: usize, b: usize) -> Result<f64> {
    let idx = net
        .resistors
        .iter()
        .position(|r| (r.a == a && r.b == b) || (r.a == b && r.b == a))
        .ok_or_else(|| FqgError::InvalidParameter(format!("no resistor between {a} and {b}")))?;
    Ok(net.resistors.remove(idx).rho)
}

fn incident(net: &ResistorNetwork, x: usize) -> Vec<usize> {
    (0..net.resistors.len()).filter(|&i| net.resistors[i].a == x || net.resistors[i].b == x).collect()
}

impl ReductionTrace {
    pub fn new(initial: ResistorNetwork, terminals: Vec<usize>) -> Self {
        Self { initial, terminals, steps: Vec::new() }
    }

    pub fn current(&self) -> &ResistorNetwork {
        self.steps.last().map_or(&self.initial, |s| &s.after)
    }

    fn record(&mut self, kind: StepKind, nodes: Vec<usize>, values: Vec<f64>, after: ResistorNetwork) {
        self.steps.push(ReductionStep { kind, nodes, values, after });
    }

    /// Replaces the triangle on `a, b, c` by a star; returns the new centre node.
    pub fn delta_to_y(&mut self, a: usize, b: usize, c: usize) -> Result<usize> {
        let mut net = self.current().clone();
        let ab = take(&mut net, a, b)?;
        let bc = take(&mut net, b, c)?;
        let ca = take(&mut net, c, a)?;
        let (ra, rb, rc) = delta_to_y(ab, bc, ca)?;
        let o = net.add_node();
        net.add(o, a, ra)?;
        net.add(o, b, rb)?;
        net.add(o, c, rc)?;
        self.record(StepKind::DeltaToY, vec![a, b, c, o], vec![ra, rb, rc], net);
        Ok(o)
    }

    /// Replaces the star centred at `o` by a triangle on its three ends.
    pub fn y_to_delta(&mut self, o: usize) -> Result<(usize, usize, usize)> {
        let mut net = self.current().clone();
        let inc = incident(&net, o);
        if inc.len() != 3 {
            return invalid(format!("node {o} has degree {}, expected 3", inc.len()));
        }
        let ends: Vec<usize> = inc.iter().map(|&i| net.resistors[i].a + net.resistors[i].b - o).collect();
        let arms: Vec<f64> = inc.iter().map(|&i| net.resistors[i].rho).collect();
        for &i in inc.iter().rev() {
            net.resistors.remove(i);
        }
        let (ab, bc, ca) = y_to_delta(arms[0], arms[1], arms[2])?;
        let (a, b, c) = (ends[0], ends[1], ends[2]);
        net.add(a, b, ab)?;
        net.add(b, c, bc)?;
        net.add(c, a, ca)?;
        self.record(StepKind::YToDelta, vec![o, a, b, c], vec![ab, bc, ca], net);
        Ok((a, b, c))
    }

    /// Merges the two resistors meeting at the degree-2 node `x`.
    pub fn series(&mut self, x: usize) -> Result<(usize, usize)> {
        let mut net = self.current().clone();
        let inc = incident(&net, x);
        if inc.len() != 2 {
            return invalid(format!("node {x} has degree {}, expected 2", inc.len()));
        }
        let (r0, r1) = (net.resistors[inc[0]], net.resistors[inc[1]]);
        let (a, b) = (r0.a + r0.b - x, r1.a + r1.b - x);
        net.resistors.remove(inc[1]);
        net.resistors.remove(inc[0]);
        net.add(a, b, r0.rho + r1.rho)?;
        self.record(StepKind::Series, vec![a, x, b], vec![r0.rho + r1.rho], net);
        Ok((a, b))
    }

    /// Merges all parallel resistors between `a` and `b`.
    pub fn parallel(&mut self, a: usize, b: usize) -> Result<f64> {
        let mut net = self.current().clone();
        let mut g = 0.0;
        let mut count = 0;
        while let Ok(rho) = take(&mut net, a, b) {
            g += 1.0 / rho;
            count += 1;
        }
        if count == 0 {
            return invalid(format!("no resistor between {a} and {b}"));
        }
        net.add(a, b, 1.0 / g)?;
        self.record(StepKind::Parallel, vec![a, b], vec![1.0 / g], net);
        Ok(1.0 / g)
    }
}

/// Reduces the level-1 network whose three cells are deltas of wire
/// resistance `r * rr` to a single delta on the corners.
///
/// Returns the three corner-delta sides `(p1p2, p2p3, p3p1)` and the trace.
pub fn level1_reduction(alpha: f64, rr: f64) -> Result<((f64, f64, f64), ReductionTrace)> {
    let hp = HanoiParams::new(alpha, 3)?;
    if !(rr > 0.0) {
        return invalid(format!("cell wire resistance must be positive, got {rr}"));
    }
    let g = build_level(hp, 1)?;
    let r = hp.r();
    let mut net = ResistorNetwork::new(g.vertices.len());
    for e in &g.edges {
        let rho = match e.kind {
            EdgeKind::Triangle => r * rr,
            EdgeKind::Joining => e.len,
        };
        net.add(e.u, e.v, rho)?;
    }
    for (i, &c) in g.corners.iter().enumerate() {
        net.label(format!("p{}", i + 1), c);
    }
    let mut tr = ReductionTrace::new(net, g.corners.clone());

    let centres: Vec<usize> =
        (0..3).map(|c| tr.delta_to_y(3 * c, 3 * c + 1, 3 * c + 2)).collect::<Result<_>>()?;
    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::Joining) {
        tr.series(e.u)?;
        tr.series(e.v)?;
    }
    let o = tr.delta_to_y(centres[0], centres[1], centres[2])?;
    for &c in &centres {
        tr.series(c)?;
    }
    tr.y_to_delta(o)?;

    let net = tr.current();
    let side = |a: usize, b: usize| {
        net.resistors
            .iter()
            .find(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
            .map(|x| x.rho)
            .ok_or_else(|| FqgError::Numerical("reduction did not end in a corner delta".into()))
    };
    let p = &g.corners;
    let sides = (side(p[0], p[1])?, side(p[1], p[2])?, side(p[2], p[0])?);
    Ok((sides, tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::effective_resistance;

    #[test]
    fn symmetric_transforms() {
        let (a, b, c) = delta_to_y(0.9, 0.9, 0.9).unwrap();
        for x in [a, b, c] {
            assert!((x - 0.3).abs() < 1e-15);
        }
        let (ab, bc, ca) = y_to_delta(0.3, 0.3, 0.3).unwrap();
        for x in [ab, bc, ca] {
            assert!((x - 0.9).abs() < 1e-15);
        }
    }

    #[test]
    fn asymmetric_delta() {
        let (a, b, c) = delta_to_y(1.0, 1.0, 2.0).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 0.25).abs() < 1e-15 && (c - 0.5).abs() < 1e-15);
        let (ab, bc, ca) = y_to_delta(a, b, c).unwrap();
        assert!((ab - 1.0).abs() < 1e-12 && (bc - 1.0).abs() < 1e-12 && (ca - 2.0).abs() < 1e-12);
        assert!(delta_to_y(1.0, 0.0, 1.0).is_err());
        assert!(y_to_delta(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn star_matches_delta_resistances() {
        let (ab, bc, ca) = (1.3, 0.4, 2.2);
        let mut d = ResistorNetwork::new(3);
        d.add(0, 1, ab).unwrap();
        d.add(1, 2, bc).unwrap();
        d.add(2, 0, ca).unwrap();
        let (a, b, c) = delta_to_y(ab, bc, ca).unwrap();
        let mut y = ResistorNetwork::new(4);
        y.add(3, 0, a).unwrap();
        y.add(3, 1, b).unwrap();
        y.add(3, 2, c).unwrap();
        for (p, q) in [(0, 1), (1, 2), (2, 0)] {
            let x = effective_resistance(&d, p, q).unwrap();
            let z = effective_resistance(&y, p, q).unwrap();
            assert!((x - z).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_merge() {
        let mut n = ResistorNetwork::new(2);
        n.add(0, 1, 2.0).unwrap();
        n.add(0, 1, 2.0).unwrap();
        let mut t = ReductionTrace::new(n, vec![0, 1]);
        assert!((t.parallel(0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(t.current().resistors.len(), 1);
    }

    #[test]
    fn level1_symmetric_sides() {
        let ((a, b, c), tr) = level1_reduction(0.2, 1.0).unwrap();
        let want = 5.0 / 3.0 * 0.4 + 0.2;
        for x in [a, b, c] {
            assert!((x - want).abs() < 1e-12);
        }
        assert_eq!(tr.steps.len(), 3 + 6 + 1 + 3 + 1);
    }
}
