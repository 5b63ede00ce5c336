use faer::Mat;

/// Symmetric sparse matrix in CSR form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSparse {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SymSparse {
    /// Builds from `(i, j, v)` entries of the upper or lower triangle (or
    /// both, summed); duplicates are summed and off-diagonals mirrored.
    pub fn from_entries(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        let mut mirrored = Vec::with_capacity(entries.len() * 2);
        for &(i, j, v) in &entries {
            if i != j {
                mirrored.push((j, i, v));
            }
        }
        entries.extend(mirrored);
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *vals.last_mut().expect("entry present") += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).map_or(0.0, |k| self.vals[self.row_ptr[i] + k])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum())
            .collect()
    }

    /// `x^T A y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        self.matvec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `1^T A 1`, with compensated summation.
    pub fn total(&self) -> f64 {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &v in &self.vals {
            let t = sum + v;
            comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
        sum + comp
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| self.get(self.cols[k], i) == self.vals[k])
        })
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_and_mirror() {
        let a = SymSparse::from_entries(3, vec![(0, 0, 1.0), (0, 1, 2.0), (0, 1, 0.5), (2, 2, 4.0), (1, 2, -1.0)]);
        assert_eq!(a.get(1, 0), 2.5);
        assert_eq!(a.get(0, 1), 2.5);
        assert_eq!(a.get(2, 1), -1.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert!(a.is_symmetric());
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![3.5, 1.5, 3.0]);
        assert_eq!(a.total(), 8.0);
        assert_eq!(a.to_dense()[(2, 1)], -1.0);
    }
}
