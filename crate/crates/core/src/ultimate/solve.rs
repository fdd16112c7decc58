//! Initial values of the ultimate survival recurrence.

use rug::Float;

use super::hp::HpModel;
use super::sequences::{build_with, SequenceSet};
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{CScenario, CaseTag, DScenario, ModelSpec};

/// Solved `φ(0..=k)` with solver metadata.
#[derive(Debug, Clone)]
pub struct Initials {
    pub case: CaseTag,
    /// `φ(0), ..., φ(k)`; the forward recurrence takes over from `k + 1`.
    pub values: Vec<Float>,
    /// Index `n` at which the difference system was solved (0 for closed forms).
    pub n_solve: usize,
    /// Determinant of the difference system at `n_solve`.
    pub determinant: Option<Float>,
    /// Largest change of the initial values between `n_solve - 1` and `n_solve`.
    pub change: f64,
    pub precision_bits: u32,
}

impl Initials {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Float::to_f64).collect()
    }
}

/// Index past `n` that the difference system at `n` reads.
fn lookahead(tag: CaseTag) -> usize {
    match tag {
        CaseTag::A => 3,
        CaseTag::B => 2,
        _ => 1,
    }
}

fn unknown_count(tag: CaseTag) -> u32 {
    match tag {
        CaseTag::A => 3,
        CaseTag::B => 2,
        _ => 1,
    }
}

/// Solves for the initial values, doubling `n` until consecutive solutions
/// agree to `opts.agreement_tol` or `opts.n_cap` is reached.
pub fn solve_initials(m: &ModelSpec, tag: CaseTag, opts: &SolverOptions) -> Result<Initials> {
    if let CaseTag::NoNetProfit(_) = tag {
        return Err(Error::WrongCase(format!(
            "initial values need E S < 4, model is {tag}"
        )));
    }
    if let CaseTag::D(v) = tag {
        return closed_form(m, v, opts.precision_bits);
    }
    if opts.n_solve < 8 {
        return Err(Error::InvalidParameter(format!(
            "n_solve must be at least 8, got {}",
            opts.n_solve
        )));
    }
    let cap = opts.n_cap.max(opts.n_solve);
    let mut n = opts.n_solve;
    loop {
        let (seq, prec) = sequences_for(m, tag, n + lookahead(tag), opts.precision_bits)?;
        let hp = HpModel::new(m, prec);
        let (values, det) = solve_at(&hp, &seq, n)?;
        let (previous, _) = solve_at(&hp, &seq, n - 1)?;
        let change = values
            .iter()
            .zip(&previous)
            .map(|(a, b)| Float::with_val(prec, a - b).abs().to_f64())
            .fold(0.0, f64::max);
        if change <= opts.agreement_tol {
            return Ok(Initials {
                case: tag,
                values,
                n_solve: n,
                determinant: Some(det),
                change,
                precision_bits: prec,
            });
        }
        if n >= cap {
            return Err(Error::NoConvergence {
                n_cap: cap,
                last_change: change,
            });
        }
        n = (2 * n).min(cap);
    }
}

/// Builds sequences, re-running at higher precision when the coefficient
/// magnitudes would eat into the working precision of a `k×k` solve.
pub(crate) fn sequences_for(
    m: &ModelSpec,
    tag: CaseTag,
    n_max: usize,
    requested: u32,
) -> Result<(SequenceSet, u32)> {
    let hp = HpModel::new(m, requested);
    let seq = build_with(&hp, tag, n_max)?;
    let needed = required_precision(&seq, unknown_count(tag));
    if needed <= requested {
        return Ok((seq, requested));
    }
    let hp = HpModel::new(m, needed);
    Ok((build_with(&hp, tag, n_max)?, needed))
}

/// Products of `k` coefficients of magnitude `2^E` cancel down to `O(1)`.
pub(crate) fn required_precision(seq: &SequenceSet, k: u32) -> u32 {
    let e = seq.max_exponent().max(0) as u32;
    k * e + 128
}

fn diff(prec: u32, col: &[Float], n: usize, i: usize) -> Float {
    Float::with_val(prec, &col[n + i] - &col[n])
}

/// Solution of the difference system at `n` with zero right-hand side.
pub(crate) fn solve_at(hp: &HpModel, seq: &SequenceSet, n: usize) -> Result<(Vec<Float>, Float)> {
    let prec = hp.prec;
    let margin = &hp.margin;
    let cols = seq.unknown_columns();
    let k = cols.len();
    let matrix: Vec<Vec<Float>> = (1..=k)
        .map(|i| cols.iter().map(|c| diff(prec, c, n, i)).collect())
        .collect();
    let rhs: Vec<Float> = (1..=k)
        .map(|i| Float::with_val(prec, -(diff(prec, &seq.coeff_margin, n, i) * margin)))
        .collect();
    let (sol, det) = cramer(prec, &matrix, &rhs).ok_or_else(|| Error::SingularSystem {
        n,
        determinant: format!("{:.6e}", determinant(prec, &matrix).0),
    })?;
    Ok((complete(hp, seq.case, sol), det))
}

/// Fills in the values that follow explicitly from the solved unknowns.
fn complete(hp: &HpModel, tag: CaseTag, sol: Vec<Float>) -> Vec<Float> {
    let prec = hp.prec;
    let y = |i| hp.y(i);
    let xt1 = hp.x_tail(1);
    let xt2 = hp.x_tail(2);
    // coefficient of φ(1) in the constraint, without the S terms
    let w1 = hp.mul(&xt2, y(0)) + hp.mul(&xt1, y(1));
    match tag {
        CaseTag::A => {
            let (p0, p1, p2) = (&sol[0], &sol[1], &sol[2]);
            let c1 = Float::with_val(prec, &w1 + hp.s_cdf(2));
            let c2 = hp.s_cdf(1) + hp.mul(&xt1, y(0));
            let num = Float::with_val(prec, &hp.margin - p0) - hp.mul(&c1, p1) - hp.mul(&c2, p2);
            let p3 = num / hp.s(0);
            let mut v = sol;
            v.push(p3);
            v
        }
        CaseTag::B => {
            let (p0, p1) = (&sol[0], &sol[1]);
            let c1 = Float::with_val(prec, &w1 + hp.s_cdf(2));
            let den = Float::with_val(prec, hp.s(1) + hp.mul(&xt1, y(0)));
            let num = Float::with_val(prec, &hp.margin - p0) - hp.mul(&c1, p1);
            let mut v = sol;
            v.push(num / den);
            v
        }
        CaseTag::C(CScenario::S1 | CScenario::S2) => {
            // φ(1) = α̂_1 φ(0) + δ̂_1 (4 - E S), α̂_1 = -δ̂_1 = -1/(X̄(1) y1 + s2)
            let inv = Float::with_val(prec, 1 / (hp.mul(&xt1, y(1)) + hp.s(2)));
            let p1 = Float::with_val(prec, &hp.margin - &sol[0]) * inv;
            vec![sol[0].clone(), p1]
        }
        CaseTag::C(CScenario::S3) => {
            // φ(2) = (4 - E S - (y0 + y1) φ(1)) / y0
            let p1 = &sol[0];
            let num = Float::with_val(prec, &hp.margin - hp.mul(&Float::with_val(prec, y(0) + y(1)), p1));
            vec![hp.zero(), p1.clone(), num / y(0)]
        }
        _ => unreachable!("closed-form cases do not reach the difference solve"),
    }
}

/// Closed forms under `s_0 = s_1 = s_2 = 0`.
///
/// Under v.2/v.4, (2) at `u = 0` gives `(s_3 - x_3 y_0 - x_2 y_1) φ(1) = φ(0)`
/// and `s_3 - x_3 y_0 - x_2 y_1 = x_1 y_2 + x_0 y_3`; that sum is the
/// denominator of `φ(1)`.
fn closed_form(m: &ModelSpec, v: DScenario, prec: u32) -> Result<Initials> {
    let hp = HpModel::new(m, prec);
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let margin = &hp.margin;
    let values = match v {
        DScenario::V1 => vec![hp.zero(), Float::with_val(prec, margin / y(1))],
        DScenario::V3 => vec![hp.zero(), hp.zero(), Float::with_val(prec, margin / y(0))],
        DScenario::V2 | DScenario::V4 => {
            let q = hp.mul(x(1), y(2)) + hp.mul(x(0), y(3));
            if q.is_zero() {
                return Err(Error::Internal("x1 y2 + x0 y3 vanishes".into()));
            }
            let ratio = Float::with_val(prec, hp.mul(&hp.x_tail(1), y(1)) / &q);
            let p0 = Float::with_val(prec, margin / (1 + ratio));
            let p1 = Float::with_val(prec, &p0 / &q);
            vec![p0, p1]
        }
    };
    Ok(Initials {
        case: CaseTag::D(v),
        values,
        n_solve: 0,
        determinant: None,
        change: 0.0,
        precision_bits: prec,
    })
}

/// Determinant by cofactor expansion, with the largest product magnitude
/// seen along the way.
pub(crate) fn determinant(prec: u32, a: &[Vec<Float>]) -> (Float, Float) {
    let mul = |p: &Float, q: &Float| Float::with_val(prec, p * q);
    match a.len() {
        1 => (a[0][0].clone(), Float::with_val(prec, a[0][0].abs_ref())),
        2 => {
            let l = mul(&a[0][0], &a[1][1]);
            let r = mul(&a[0][1], &a[1][0]);
            let scale = Float::with_val(prec, l.abs_ref()).max(&Float::with_val(prec, r.abs_ref()));
            (l - r, scale)
        }
        3 => {
            let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
                mul(&a[r1][c1], &a[r2][c2]) - mul(&a[r1][c2], &a[r2][c1])
            };
            let terms = [
                mul(&a[0][0], &minor(1, 2, 1, 2)),
                mul(&a[0][1], &minor(1, 2, 0, 2)),
                mul(&a[0][2], &minor(1, 2, 0, 1)),
            ];
            let scale = terms
                .iter()
                .map(|t| Float::with_val(prec, t.abs_ref()))
                .fold(Float::new(prec), |acc, t| acc.max(&t));
            let [t0, t1, t2] = terms;
            (t0 - t1 + t2, scale)
        }
        n => panic!("determinant of {n}x{n} matrix not supported"),
    }
}

/// Cramer's rule; `None` when the determinant vanishes.
pub(crate) fn cramer(prec: u32, a: &[Vec<Float>], b: &[Float]) -> Option<(Vec<Float>, Float)> {
    let (det, _) = determinant(prec, a);
    if det.is_zero() {
        return None;
    }
    let sol = (0..a.len())
        .map(|j| {
            let replaced: Vec<Vec<Float>> = a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    let mut r = row.clone();
                    r[j] = bi.clone();
                    r
                })
                .collect();
            Float::with_val(prec, determinant(prec, &replaced).0 / &det)
        })
        .collect();
    Some((sol, det))
}
