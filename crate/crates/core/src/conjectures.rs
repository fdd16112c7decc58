//! Principal determinants of the difference systems and the conjectured
//! patterns they follow.

use std::cmp::Ordering;

use rug::Float;

use crate::error::{Error, Result};
use crate::model::{CaseTag, ModelSpec};
use crate::ultimate::sequences::SequenceSet;
use crate::ultimate::solve::{determinant, sequences_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjecture {
    /// 3×3 determinants `D_n` of case A; conjectured `1 ≤ D_{2n} ≤ D_{2n+2}`
    /// and `-1 ≥ D_{2n+1} ≥ D_{2n+3}`.
    Conjecture1,
    /// 2×2 determinants `D̄_n` of case B; conjectured `1 ≤ D̄_n ≤ D̄_{n+1}`.
    Conjecture2,
}

impl Conjecture {
    fn case(self) -> CaseTag {
        match self {
            Conjecture::Conjecture1 => CaseTag::A,
            Conjecture::Conjecture2 => CaseTag::B,
        }
    }

    fn dim(self) -> usize {
        match self {
            Conjecture::Conjecture1 => 3,
            Conjecture::Conjecture2 => 2,
        }
    }

    /// Distance between compared indices in the magnitude pattern.
    fn stride(self) -> usize {
        match self {
            Conjecture::Conjecture1 => 2,
            Conjecture::Conjecture2 => 1,
        }
    }
}

/// Determinants for `n = 0..=n_max` and deviations from the conjectured pattern.
#[derive(Debug, Clone)]
pub struct DeterminantTrace {
    pub which: Conjecture,
    pub values: Vec<Float>,
    /// Indices where the determinant vanished even at doubled precision.
    pub zeros: Vec<usize>,
    /// `(n, description)` for every failed printed inequality.
    pub violations: Vec<(usize, String)>,
    pub precision_bits: u32,
}

impl DeterminantTrace {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Float::to_f64).collect()
    }

    /// `n` where `|D_n| < 1`.
    pub fn below_unit(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&n| Float::with_val(self.precision_bits, self.values[n].abs_ref()) < 1)
            .collect()
    }

    /// `n` where `|D_n|` drops below `|D_{n-stride}|` within its parity class
    /// (stride 2 for the 3×3 trace, 1 for the 2×2 trace).
    pub fn magnitude_drops(&self) -> Vec<usize> {
        let k = self.which.stride();
        (k..self.values.len())
            .filter(|&n| self.values[n].cmp_abs(&self.values[n - k]) == Some(Ordering::Less))
            .collect()
    }
}

/// Rows `(c_{n+i} - c_n)` over the unknown columns, `i = 1..=k`.
pub fn system_rows(seq: &SequenceSet, n: usize) -> Vec<Vec<Float>> {
    let prec = seq.precision_bits;
    let cols = seq.unknown_columns();
    (1..=cols.len())
        .map(|i| {
            cols.iter()
                .map(|c| Float::with_val(prec, &c[n + i] - &c[n]))
                .collect()
        })
        .collect()
}

fn determinants(seq: &SequenceSet, n_max: usize) -> Vec<(Float, Float)> {
    (0..=n_max)
        .map(|n| determinant(seq.precision_bits, &system_rows(seq, n)))
        .collect()
}

fn is_negligible(prec: u32, det: &Float, scale: &Float) -> bool {
    if det.is_zero() {
        return true;
    }
    let threshold = Float::with_val(prec, scale * Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32))));
    Float::with_val(prec, det.abs_ref()) < threshold
}

/// Computes `D_n` (or `D̄_n`) from the same sequences the solver uses.
pub fn determinant_trace(
    m: &ModelSpec,
    which: Conjecture,
    n_max: usize,
    precision_bits: u32,
) -> Result<DeterminantTrace> {
    let tag = m.classify()?;
    if tag != which.case() {
        return Err(Error::WrongCase(format!(
            "{which:?} concerns case {}, model is {tag}",
            which.case()
        )));
    }
    let k = which.dim();
    let n_seq = (n_max + k).max(8);
    let (seq, prec) = sequences_for(m, tag, n_seq, precision_bits)?;
    let mut dets = determinants(&seq, n_max);
    let suspicious: Vec<usize> = (0..=n_max)
        .filter(|&n| is_negligible(prec, &dets[n].0, &dets[n].1))
        .collect();
    let mut zeros = Vec::new();
    let mut final_prec = prec;
    if !suspicious.is_empty() {
        let (seq2, prec2) = sequences_for(m, tag, n_seq, 2 * prec)?;
        let dets2 = determinants(&seq2, n_max);
        for &n in &suspicious {
            if is_negligible(prec2, &dets2[n].0, &dets2[n].1) {
                zeros.push(n);
            }
        }
        dets = dets2;
        final_prec = prec2;
    }
    let values: Vec<Float> = dets.into_iter().map(|(d, _)| d).collect();
    let mut violations: Vec<(usize, String)> = zeros
        .iter()
        .map(|&n| (n, "determinant vanishes".to_string()))
        .collect();
    violations.extend(printed_pattern_violations(which, &values));
    violations.sort_by_key(|(n, _)| *n);
    Ok(DeterminantTrace {
        which,
        values,
        zeros,
        violations,
        precision_bits: final_prec,
    })
}

fn printed_pattern_violations(which: Conjecture, d: &[Float]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let fmt = |v: &Float| format!("{:.6e}", v.to_f64());
    for n in 0..d.len() {
        let (lower_ok, towards) = match which {
            Conjecture::Conjecture1 if n % 2 == 0 => (d[n] >= 1, "D_n >= 1"),
            Conjecture::Conjecture1 => (d[n] <= -1, "D_n <= -1"),
            Conjecture::Conjecture2 => (d[n] >= 1, "D_n >= 1"),
        };
        if !lower_ok {
            out.push((n, format!("{towards} fails: D_{n} = {}", fmt(&d[n]))));
        }
        let step = which.stride();
        if n + step < d.len() {
            let ok = match which {
                Conjecture::Conjecture1 if n % 2 == 1 => d[n] >= d[n + step],
                _ => d[n] <= d[n + step],
            };
            if !ok {
                let rel = if which == Conjecture::Conjecture1 && n % 2 == 1 { ">=" } else { "<=" };
                out.push((
                    n,
                    format!(
                        "D_{n} {rel} D_{} fails: {} vs {}",
                        n + step,
                        fmt(&d[n]),
                        fmt(&d[n + step])
                    ),
                ));
            }
        }
    }
    out
}
