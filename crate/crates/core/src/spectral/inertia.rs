//! Eigenvalue counting by Sylvester inertia.
//!
//! The number of eigenvalues of `K u = lambda M u` below `x` equals the
//! number of negative pivots in an `LDL^T` factorization of `K - x M`.
//! Interior edge nodes are eliminated chain by chain in closed form (all
//! edges of a class share the same pivots), leaving a small junction Schur
//! complement that is factored along a minimum-degree ordering.

use std::collections::HashMap;

use super::model::{ChainModel, EdgeClass};

#[derive(Debug, Clone, Copy)]
struct ChainSchur {
    saa: f64,
    sbb: f64,
    sab: f64,
    neg: usize,
}

fn guard(d: f64, scale: f64) -> f64 {
    let tiny = f64::EPSILON * scale;
    if d.abs() < tiny {
        -tiny
    } else {
        d
    }
}

fn chain_schur(c: &EdgeClass, x: f64) -> ChainSchur {
    let h = c.h();
    let rho = c.density();
    let d_end = 1.0 / h - x * rho * h / 3.0;
    let e = -1.0 / h - x * rho * h / 6.0;
    if c.p == 1 {
        return ChainSchur { saa: d_end, sbb: d_end, sab: e, neg: 0 };
    }
    let d_in = 2.0 * d_end;
    let scale = d_in.abs() + 2.0 * e.abs();
    let mut saa = d_end;
    let mut coupling = e;
    let mut piv = d_in;
    let mut neg = 0;
    for i in 1..c.p {
        let d = guard(piv, scale);
        if d < 0.0 {
            neg += 1;
        }
        saa -= coupling * coupling / d;
        if i + 1 < c.p {
            coupling = -coupling * e / d;
            piv = d_in - e * e / d;
        } else {
            return ChainSchur { saa, sbb: d_end - e * e / d, sab: -coupling * e / d, neg };
        }
    }
    unreachable!("loop returns on its last iteration")
}

struct Step {
    pivot: usize,
    nbrs: Vec<usize>,
    nbr_slots: Vec<usize>,
    /// Slots for neighbour pairs `(i, j)`, `i < j`, in row-major order.
    pair_slots: Vec<usize>,
}

/// Precomputed elimination program for a [`ChainModel`].
pub struct InertiaCounter<'a> {
    model: &'a ChainModel,
    /// Junction index -> position among active junctions.
    pos: Vec<Option<usize>>,
    n_active: usize,
    edge_slot: Vec<Option<usize>>,
    n_slots: usize,
    steps: Vec<Step>,
    zero_modes: usize,
}

impl<'a> InertiaCounter<'a> {
    pub fn new(model: &'a ChainModel) -> Self {
        let nj = model.active.len();
        let mut pos = vec![None; nj];
        let mut n_active = 0;
        for j in 0..nj {
            if model.active[j] {
                pos[j] = Some(n_active);
                n_active += 1;
            }
        }
        let mut slots: HashMap<(usize, usize), usize> = HashMap::new();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_active];
        let mut edge_slot = Vec::with_capacity(model.edges.len());
        for e in &model.edges {
            match (pos[e.a], pos[e.b]) {
                (Some(a), Some(b)) if a != b => {
                    let key = (a.min(b), a.max(b));
                    let n = slots.len();
                    let s = *slots.entry(key).or_insert_with(|| {
                        adj[a].push(b);
                        adj[b].push(a);
                        n
                    });
                    edge_slot.push(Some(s));
                }
                _ => edge_slot.push(None),
            }
        }

        // greedy minimum degree, ties broken by index
        let mut adj: Vec<std::collections::BTreeSet<usize>> =
            adj.into_iter().map(|v| v.into_iter().collect()).collect();
        let mut done = vec![false; n_active];
        let mut steps = Vec::with_capacity(n_active);
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> =
            (0..n_active).map(|v| std::cmp::Reverse((adj[v].len(), v))).collect();
        while let Some(std::cmp::Reverse((deg, v))) = heap.pop() {
            if done[v] || deg != adj[v].len() {
                continue;
            }
            done[v] = true;
            let nbrs: Vec<usize> = adj[v].iter().copied().collect();
            let nbr_slots = nbrs.iter().map(|&a| slots[&(v.min(a), v.max(a))]).collect();
            let mut pair_slots = Vec::new();
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    let n = slots.len();
                    let s = *slots.entry((a.min(b), a.max(b))).or_insert(n);
                    pair_slots.push(s);
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
            for &a in &nbrs {
                adj[a].remove(&v);
                heap.push(std::cmp::Reverse((adj[a].len(), a)));
            }
            adj[v].clear();
            steps.push(Step { pivot: v, nbrs, nbr_slots, pair_slots });
        }

        // constants are in the kernel of every component without pinned junctions
        let mut parent: Vec<usize> = (0..nj).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &model.edges {
            let (x, y) = (find(&mut parent, e.a), find(&mut parent, e.b));
            parent[x.max(y)] = x.min(y);
        }
        let mut pinned = vec![false; nj];
        let mut roots = vec![false; nj];
        for j in 0..nj {
            let r = find(&mut parent, j);
            roots[r] = true;
            if !model.active[j] {
                pinned[r] = true;
            }
        }
        let zero_modes = (0..nj).filter(|&r| roots[r] && !pinned[r]).count();

        Self { model, pos, n_active, edge_slot, n_slots: slots.len(), steps, zero_modes }
    }

    /// Multiplicity of the eigenvalue zero.
    pub fn zero_modes(&self) -> usize {
        self.zero_modes
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let m = self.model;
        let schur: Vec<ChainSchur> = m.classes.iter().map(|c| chain_schur(c, x)).collect();
        let mut diag = vec![0.0; self.n_active];
        for (j, &p) in self.pos.iter().enumerate() {
            if let Some(p) = p {
                diag[p] = -x * m.junction_mass[j];
            }
        }
        let mut off = vec![0.0; self.n_slots];
        let mut neg = 0;
        for (e, ed) in m.edges.iter().enumerate() {
            let s = schur[ed.class];
            neg += s.neg;
            match (self.pos[ed.a], self.pos[ed.b]) {
                (Some(a), Some(b)) if a == b => diag[a] += s.saa + s.sbb + 2.0 * s.sab,
                (pa, pb) => {
                    if let Some(a) = pa {
                        diag[a] += s.saa;
                    }
                    if let Some(b) = pb {
                        diag[b] += s.sbb;
                    }
                    if let Some(slot) = self.edge_slot[e] {
                        off[slot] += s.sab;
                    }
                }
            }
        }
        let scale = diag.iter().fold(0.0f64, |a, d| a.max(d.abs())).max(f64::MIN_POSITIVE);
        let mut l = Vec::new();
        for st in &self.steps {
            let d = guard(diag[st.pivot], scale);
            if d < 0.0 {
                neg += 1;
            }
            l.clear();
            l.extend(st.nbr_slots.iter().map(|&s| off[s]));
            let mut k = 0;
            for i in 0..st.nbrs.len() {
                diag[st.nbrs[i]] -= l[i] * l[i] / d;
                for j in i + 1..st.nbrs.len() {
                    off[st.pair_slots[k]] -= l[i] * l[j] / d;
                    k += 1;
                }
            }
        }
        neg
    }

    /// Lowest `k` eigenvalues (with multiplicity) by bisection to relative width `rtol`.
    pub fn lowest(&self, k: usize, rtol: f64) -> Vec<f64> {
        let k = k.min(self.model.n_dofs());
        let z = self.zero_modes.min(k);
        let mut out = vec![0.0; k];
        if k == z {
            return out;
        }
        let mut hi = 1.0;
        let mut chi = self.count_below(hi);
        while chi < k {
            hi *= 4.0;
            chi = self.count_below(hi);
        }
        let mut stack = vec![(0.0, hi, z, chi)];
        while let Some((lo, hi, clo, chi)) = stack.pop() {
            if chi <= clo || clo >= k {
                continue;
            }
            if hi - lo <= rtol * hi {
                let mid = 0.5 * (lo + hi);
                for v in &mut out[clo..chi.min(k)] {
                    *v = mid;
                }
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let cm = self.count_below(mid).clamp(clo, chi);
            stack.push((mid, hi, cm, chi));
            stack.push((lo, mid, clo, cm));
        }
        out
    }
}
