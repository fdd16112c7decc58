//! Model atoms lifted to MPFR floats.

use rug::Float;

use crate::model::{ModelSpec, NET_INCOME};

/// Atoms of `X`, `Y`, `S` and the derived summaries at a fixed precision.
///
/// Every `f64` atom converts exactly, so the extended-precision recurrences
/// run on precisely the same (truncated) model as the `f64` code.
pub(crate) struct HpModel {
    pub prec: u32,
    x: Vec<Float>,
    y: Vec<Float>,
    s: Vec<Float>,
    zero: Float,
    /// `4 - E S`.
    pub margin: Float,
}

impl HpModel {
    pub fn new(m: &ModelSpec, prec: u32) -> Self {
        let lift = |v: &[f64]| v.iter().map(|&p| Float::with_val(prec, p)).collect::<Vec<_>>();
        let s = lift(m.s().probs());
        let mut mean = Float::with_val(prec, 0);
        for (u, p) in s.iter().enumerate() {
            mean += Float::with_val(prec, p * u as u32);
        }
        HpModel {
            prec,
            x: lift(m.x().probs()),
            y: lift(m.y().probs()),
            s,
            zero: Float::new(prec),
            margin: Float::with_val(prec, NET_INCOME - &mean),
        }
    }

    pub fn x(&self, i: usize) -> &Float {
        self.x.get(i).unwrap_or(&self.zero)
    }

    pub fn y(&self, i: usize) -> &Float {
        self.y.get(i).unwrap_or(&self.zero)
    }

    pub fn s(&self, i: usize) -> &Float {
        self.s.get(i).unwrap_or(&self.zero)
    }

    pub fn s_support(&self) -> usize {
        self.s.len() - 1
    }

    pub fn zero(&self) -> Float {
        Float::new(self.prec)
    }

    pub fn val(&self, v: f64) -> Float {
        Float::with_val(self.prec, v)
    }

    /// `X̄(u) = 1 - Σ_{i≤u} x_i`.
    pub fn x_tail(&self, u: usize) -> Float {
        let mut acc = self.val(1.0);
        for i in 0..=u {
            acc -= self.x(i);
        }
        acc
    }

    /// `S(u) = Σ_{i≤u} s_i`.
    pub fn s_cdf(&self, u: usize) -> Float {
        let mut acc = self.zero();
        for i in 0..=u {
            acc += self.s(i);
        }
        acc
    }

    /// `Σ_{k=lo}^{n-1} s_{n+shift-k} seq[k]` where `lo = max(1, n+shift-supp)`.
    pub fn conv_tail(&self, seq: &[Float], n: usize, shift: usize) -> Float {
        let lo = (n + shift).saturating_sub(self.s_support()).max(1);
        let mut acc = self.zero();
        for (k, v) in seq.iter().enumerate().take(n).skip(lo) {
            acc += Float::with_val(self.prec, self.s(n + shift - k) * v);
        }
        acc
    }

    /// Product of two lifted values at model precision.
    pub fn mul(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.prec, a * b)
    }
}

/// Binary exponent of the largest magnitude in `values` (0 if all vanish).
pub(crate) fn max_exponent<'a>(values: impl IntoIterator<Item = &'a Float>) -> i32 {
    values
        .into_iter()
        .filter_map(|v| v.get_exp())
        .max()
        .unwrap_or(0)
        .max(0)
}
