use crate::error::{invalid, Result};

/// Vertices of the regular unit simplex with `n0` corners in `R^(n0-1)`.
///
/// The first corner is the origin, the second lies on the first axis, and
/// corner `k` sits above the centroid of the previous ones along axis `k-1`.
pub fn simplex_vertices(n0: usize) -> Result<Vec<Vec<f64>>> {
    if n0 < 3 {
        return invalid(format!("n0 must be at least 3, got {n0}"));
    }
    let dim = n0 - 1;
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for k in 1..n0 {
        let mut c = vec![0.0; dim];
        for p in &pts {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        for ci in &mut c {
            *ci /= k as f64;
        }
        // circumradius of a regular simplex with k unit-spaced vertices
        let rad2 = (k as f64 - 1.0) / (2.0 * k as f64);
        c[k - 1] = (1.0 - rad2).sqrt();
        pts.push(c);
    }
    Ok(pts)
}
