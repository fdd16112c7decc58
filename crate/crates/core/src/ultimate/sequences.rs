//! Recurrent coefficient sequences expressing `φ(n)` through the unknown
//! initial values and the margin `4 - E S`.
//!
//! | case        | unknowns        | sequences        | pivot |
//! |-------------|-----------------|------------------|-------|
//! | A           | φ(0), φ(1), φ(2)| α, β, γ, δ       | s_0   |
//! | B           | φ(0), φ(1)      | ᾱ, β̄, δ̄          | s_1   |
//! | C s.1, s.2  | φ(0)            | α̂, δ̂             | s_2   |
//! | C s.3       | φ(1)            | α̃, δ̃ (φ(0) = 0)  | s_2   |

use rug::Float;

use super::hp::{max_exponent, HpModel};
use crate::error::{Error, Result};
use crate::model::{CScenario, CaseTag, ModelSpec};

/// Coefficients of `φ(n) = c0[n]·φ(0) + c1[n]·φ(1) + c2[n]·φ(2) + cm[n]·(4 - E S)`.
///
/// A column is `None` when the corresponding value is not an unknown of the case.
#[derive(Debug, Clone)]
pub struct SequenceSet {
    pub case: CaseTag,
    pub coeff_phi0: Option<Vec<Float>>,
    pub coeff_phi1: Option<Vec<Float>>,
    pub coeff_phi2: Option<Vec<Float>>,
    pub coeff_margin: Vec<Float>,
    pub precision_bits: u32,
}

impl SequenceSet {
    /// Number of computed terms (indices `0..len`).
    pub fn len(&self) -> usize {
        self.coeff_margin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeff_margin.is_empty()
    }

    /// Columns of the unknowns in order `φ(0), φ(1), φ(2)`, skipping absent ones.
    pub fn unknown_columns(&self) -> Vec<&[Float]> {
        [&self.coeff_phi0, &self.coeff_phi1, &self.coeff_phi2]
            .into_iter()
            .flatten()
            .map(Vec::as_slice)
            .collect()
    }

    /// Indices of `φ` that are unknowns of this case.
    pub fn unknown_indices(&self) -> Vec<usize> {
        [&self.coeff_phi0, &self.coeff_phi1, &self.coeff_phi2]
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|_| i))
            .collect()
    }

    /// `Σ coeff[n]·φ(i) + coeff_margin[n]·margin` for the given values `φ(0..=2)`.
    pub fn represent(&self, n: usize, phi: &[Float], margin: &Float) -> Float {
        let prec = self.precision_bits;
        let mut acc = Float::with_val(prec, &self.coeff_margin[n] * margin);
        for (i, col) in [&self.coeff_phi0, &self.coeff_phi1, &self.coeff_phi2]
            .into_iter()
            .enumerate()
        {
            if let Some(col) = col {
                acc += Float::with_val(prec, &col[n] * &phi[i]);
            }
        }
        acc
    }

    /// Largest binary exponent among all coefficients.
    pub fn max_exponent(&self) -> i32 {
        let cols = self.unknown_columns();
        max_exponent(
            cols.into_iter()
                .flatten()
                .chain(self.coeff_margin.iter()),
        )
    }
}

/// Builds the case's sequences for `n = 0..=n_max` at `precision_bits`.
pub fn build_sequences(
    m: &ModelSpec,
    tag: CaseTag,
    n_max: usize,
    precision_bits: u32,
) -> Result<SequenceSet> {
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!("n_max must be at least 8, got {n_max}")));
    }
    let hp = HpModel::new(m, precision_bits);
    build_with(&hp, tag, n_max)
}

pub(crate) fn build_with(hp: &HpModel, tag: CaseTag, n_max: usize) -> Result<SequenceSet> {
    match tag {
        CaseTag::A => case_a(hp, n_max),
        CaseTag::B => case_b(hp, n_max),
        CaseTag::C(CScenario::S1 | CScenario::S2) => case_c_hat(hp, tag, n_max),
        CaseTag::C(CScenario::S3) => case_c_tilde(hp, n_max),
        other => Err(Error::WrongCase(format!(
            "coefficient sequences exist for cases A, B and C only, not {other}"
        ))),
    }
}

fn pivot(hp: &HpModel, value: Float, what: &str) -> Result<Float> {
    if value.is_zero() {
        return Err(Error::Internal(format!("zero pivot {what}")));
    }
    Ok(Float::with_val(hp.prec, 1 / value))
}

fn case_a(hp: &HpModel, n_max: usize) -> Result<SequenceSet> {
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let inv = pivot(hp, hp.s(0).clone(), "s0")?;
    let xt1 = hp.x_tail(1);
    let xt2 = hp.x_tail(2);
    // row 3 comes from the constraint on φ(0..=3)
    let b3 = hp.s_cdf(2) + hp.mul(&xt2, y(0)) + hp.mul(&xt1, y(1));
    let c3 = hp.s_cdf(1) + hp.mul(&xt1, y(0));
    let z = hp.zero();
    let one = hp.val(1.0);
    let mut a = vec![one.clone(), z.clone(), z.clone(), Float::with_val(hp.prec, -&inv)];
    let mut b = vec![z.clone(), one.clone(), z.clone(), Float::with_val(hp.prec, -(b3 * &inv))];
    let mut g = vec![z.clone(), z.clone(), one, Float::with_val(hp.prec, -(c3 * &inv))];
    let mut d = vec![z.clone(), z.clone(), z, inv.clone()];
    for n in 4..=n_max {
        let beta_src = hp.mul(x(n - 1), y(0)) + hp.mul(x(n - 2), y(1));
        let gamma_src = hp.mul(x(n - 2), y(0));
        let an = (Float::with_val(hp.prec, &a[n - 4] - hp.conv_tail(&a, n, 0))) * &inv;
        let bn = (Float::with_val(hp.prec, &b[n - 4] - hp.conv_tail(&b, n, 0)) + beta_src) * &inv;
        let gn = (Float::with_val(hp.prec, &g[n - 4] - hp.conv_tail(&g, n, 0)) + gamma_src) * &inv;
        let dn = (Float::with_val(hp.prec, &d[n - 4] - hp.conv_tail(&d, n, 0))) * &inv;
        a.push(an);
        b.push(bn);
        g.push(gn);
        d.push(dn);
    }
    Ok(SequenceSet {
        case: CaseTag::A,
        coeff_phi0: Some(a),
        coeff_phi1: Some(b),
        coeff_phi2: Some(g),
        coeff_margin: d,
        precision_bits: hp.prec,
    })
}

// The printed ᾱ recurrence reads α_{n-3} and the printed δ̄ recurrence divides
// by s_0; substituting (2) shows both must use the bar sequence and s_1:
//   s_1 φ(n) = φ(n-3) + (x_n y_0 + x_{n-1} y_1) φ(1) + x_{n-1} y_0 φ(2)
//              - Σ_{k=1}^{n-1} s_{n+1-k} φ(k)
// with φ(2) = ᾱ_2 φ(0) + β̄_2 φ(1) + δ̄_2 (4 - E S).
fn case_b(hp: &HpModel, n_max: usize) -> Result<SequenceSet> {
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let inv = pivot(hp, hp.s(1).clone(), "s1")?;
    let xt1 = hp.x_tail(1);
    let xt2 = hp.x_tail(2);
    let den = Float::with_val(hp.prec, hp.s(1) + hp.mul(&xt1, y(0)));
    let inv2 = pivot(hp, den, "s1 + X̄(1) y0")?;
    let b2 = hp.s_cdf(2) + hp.mul(&xt2, y(0)) + hp.mul(&xt1, y(1));
    let z = hp.zero();
    let one = hp.val(1.0);
    let mut a = vec![one.clone(), z.clone(), Float::with_val(hp.prec, -&inv2)];
    let mut b = vec![z.clone(), one, Float::with_val(hp.prec, -(b2 * &inv2))];
    let mut d = vec![z.clone(), z, inv2];
    for n in 3..=n_max {
        let w = hp.mul(x(n - 1), y(0));
        let beta_src = hp.mul(x(n), y(0)) + hp.mul(x(n - 1), y(1));
        let an = (Float::with_val(hp.prec, &a[n - 3] - hp.conv_tail(&a, n, 1)) + hp.mul(&w, &a[2])) * &inv;
        let bn = (Float::with_val(hp.prec, &b[n - 3] - hp.conv_tail(&b, n, 1))
            + beta_src
            + hp.mul(&w, &b[2]))
            * &inv;
        let dn = (Float::with_val(hp.prec, &d[n - 3] - hp.conv_tail(&d, n, 1)) + hp.mul(&w, &d[2])) * &inv;
        a.push(an);
        b.push(bn);
        d.push(dn);
    }
    Ok(SequenceSet {
        case: CaseTag::B,
        coeff_phi0: Some(a),
        coeff_phi1: Some(b),
        coeff_phi2: None,
        coeff_margin: d,
        precision_bits: hp.prec,
    })
}

/// Scenarios s.1 and s.2 (`y_0 = 0`): `φ(n) = α̂_n φ(0) + δ̂_n (4 - E S)`.
fn case_c_hat(hp: &HpModel, tag: CaseTag, n_max: usize) -> Result<SequenceSet> {
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let inv = pivot(hp, hp.s(2).clone(), "s2")?;
    let den = Float::with_val(hp.prec, hp.mul(&hp.x_tail(1), y(1)) + hp.s(2));
    let inv1 = pivot(hp, den, "X̄(1) y1 + s2")?;
    let mut a = vec![hp.val(1.0), Float::with_val(hp.prec, -&inv1)];
    let mut d = vec![hp.zero(), inv1];
    for n in 2..=n_max {
        let w = hp.mul(x(n), y(1));
        let an = (Float::with_val(hp.prec, &a[n - 2] - hp.conv_tail(&a, n, 2)) + hp.mul(&w, &a[1])) * &inv;
        let dn = (Float::with_val(hp.prec, &d[n - 2] - hp.conv_tail(&d, n, 2)) + hp.mul(&w, &d[1])) * &inv;
        a.push(an);
        d.push(dn);
    }
    Ok(SequenceSet {
        case: tag,
        coeff_phi0: Some(a),
        coeff_phi1: None,
        coeff_phi2: None,
        coeff_margin: d,
        precision_bits: hp.prec,
    })
}

/// Scenario s.3 (`φ(0) = 0`): `φ(n) = α̃_n φ(1) + δ̃_n (4 - E S)` for `n ≥ 1`.
/// Index 0 holds zeros so the columns line up with `φ(0)`.
fn case_c_tilde(hp: &HpModel, n_max: usize) -> Result<SequenceSet> {
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let inv = pivot(hp, hp.s(2).clone(), "s2")?;
    let inv_y0 = pivot(hp, y(0).clone(), "y0")?;
    // divide rather than multiply by 1/y0 so that y1 = 0 gives exactly -1
    let a2 = -(Float::with_val(hp.prec, y(0) + y(1)) / y(0));
    let mut a = vec![hp.zero(), hp.val(1.0), a2];
    let mut d = vec![hp.zero(), hp.zero(), inv_y0];
    for n in 3..=n_max {
        let src = hp.mul(&Float::with_val(hp.prec, x(n + 1) - x(n)), y(0));
        let an = (Float::with_val(hp.prec, &a[n - 2] - hp.conv_tail(&a, n, 2)) + src) * &inv;
        let dn = (Float::with_val(hp.prec, &d[n - 2] - hp.conv_tail(&d, n, 2)) + x(n)) * &inv;
        a.push(an);
        d.push(dn);
    }
    Ok(SequenceSet {
        case: CaseTag::C(CScenario::S3),
        coeff_phi0: None,
        coeff_phi1: Some(a),
        coeff_phi2: None,
        coeff_margin: d,
        precision_bits: hp.prec,
    })
}
