//! Banded Gaussian elimination with partial pivoting.
//!
//! Rows are stored as contiguous column segments, so row exchanges are cheap
//! and fill-in simply widens the segment of the updated row.

#[derive(Debug, Clone, Default)]
struct Segment {
    start: usize,
    vals: Vec<f64>,
}

impl Segment {
    fn end(&self) -> usize {
        self.start + self.vals.len()
    }

    fn get(&self, col: usize) -> f64 {
        if col < self.start {
            return 0.0;
        }
        self.vals.get(col - self.start).copied().unwrap_or(0.0)
    }

    fn add(&mut self, col: usize, v: f64) {
        if self.vals.is_empty() {
            self.start = col;
            self.vals.push(v);
            return;
        }
        if col < self.start {
            let grow = self.start - col;
            self.vals.splice(0..0, std::iter::repeat_n(0.0, grow));
            self.start = col;
        }
        let idx = col - self.start;
        if idx >= self.vals.len() {
            self.vals.resize(idx + 1, 0.0);
        }
        self.vals[idx] += v;
    }

    /// `self -= factor * other` restricted to columns `from..`.
    fn eliminate(&mut self, other: &Segment, factor: f64, from: usize) {
        let lo = from.max(other.start);
        for col in lo..other.end() {
            let v = other.get(col);
            if v != 0.0 {
                self.add(col, -factor * v);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularBand {
    pub column: usize,
}

/// Square sparse-banded system `A x = b`.
#[derive(Debug, Clone)]
pub struct BandSystem {
    rows: Vec<Segment>,
    rhs: Vec<f64>,
}

impl BandSystem {
    pub fn new(n: usize) -> Self {
        BandSystem {
            rows: vec![Segment::default(); n],
            rhs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `A[i][j] += v`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j < self.dim(), "column {j} out of range");
        if v != 0.0 {
            self.rows[i].add(j, v);
        }
    }

    pub fn add_rhs(&mut self, i: usize, v: f64) {
        self.rhs[i] += v;
    }

    /// `(lower, upper)` bandwidths of the current matrix.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.vals.is_empty())
            .fold((0, 0), |(lo, up), (i, r)| {
                (lo.max(i.saturating_sub(r.start)), up.max((r.end() - 1).saturating_sub(i)))
            })
    }

    /// Residual `max_i |(A x - b)_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| {
                let ax: f64 = r.vals.iter().enumerate().map(|(k, v)| v * x[r.start + k]).sum();
                (ax - b).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn solve(&self) -> Result<Vec<f64>, SingularBand> {
        let n = self.dim();
        let (lower, _) = self.bandwidths();
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        for k in 0..n {
            let last = (k + lower).min(n - 1);
            let (p, pivot) = (k..=last)
                .map(|i| (i, rows[i].get(k)))
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("non-empty pivot window");
            if pivot == 0.0 {
                return Err(SingularBand { column: k });
            }
            rows.swap(k, p);
            rhs.swap(k, p);
            let (head, tail) = rows.split_at_mut(k + 1);
            let pivot_row = &head[k];
            for (off, row) in tail.iter_mut().take(last - k).enumerate() {
                let a = row.get(k);
                if a == 0.0 {
                    continue;
                }
                let factor = a / pivot;
                row.eliminate(pivot_row, factor, k + 1);
                // drop the eliminated column
                if row.start <= k {
                    let cut = k + 1 - row.start;
                    row.vals.drain(..cut.min(row.vals.len()));
                    row.start = k + 1;
                }
                rhs[k + 1 + off] -= factor * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let row = &rows[k];
            let mut acc = rhs[k];
            for col in (k + 1)..row.end() {
                acc -= row.get(col) * x[col];
            }
            x[k] = acc / row.get(k);
        }
        Ok(x)
    }
}
