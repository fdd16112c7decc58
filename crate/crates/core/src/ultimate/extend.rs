//! Forward extension of `φ` by the master relation and its residual checks.
//!
//! The master relation (2) for `u ≥ 0` reads
//!
//! ```text
//! φ(u) = Σ_{k=1}^{u+4} φ(k) s_{u+4-k} - (x_{u+3} y_0 + x_{u+2} y_1) φ(1) - x_{u+2} y_0 φ(2).
//! ```
//!
//! With `m* = min{u : s_u > 0}` the highest index it touches is `u + 4 - m*`,
//! which turns it into a forward recurrence for `φ(v)`, `v = u + 4 - m*`.

use rug::Float;

use super::hp::HpModel;
use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// Extends `initials = φ(0..=k)` to `φ(0..=u_max)` in extended precision.
///
/// When `v ∈ {1, 2}` the unknown also appears among the `φ(1)`, `φ(2)`
/// terms; its coefficient is folded into the pivot. A vanishing pivot means
/// the value must come from the initial data.
pub(crate) fn extend_hp(
    hp: &HpModel,
    lowest: usize,
    initials: &[Float],
    u_max: usize,
) -> Result<Vec<Float>> {
    let prec = hp.prec;
    let (x, y) = (|i| hp.x(i), |i| hp.y(i));
    let mut phi: Vec<Float> = initials.to_vec();
    for v in initials.len()..=u_max {
        if v + lowest < 4 {
            return Err(Error::Internal(format!(
                "index {v} precedes the first recurrence row for lowest atom {lowest}"
            )));
        }
        let u = v + lowest - 4;
        let c1 = hp.mul(x(u + 3), y(0)) + hp.mul(x(u + 2), y(1));
        let c2 = hp.mul(x(u + 2), y(0));
        let mut pivot = hp.s(lowest).clone();
        let mut rhs = phi[u].clone();
        for (k, p) in phi.iter().enumerate().take(v).skip(1) {
            rhs -= Float::with_val(prec, hp.s(u + 4 - k) * p);
        }
        if v == 1 {
            pivot -= &c1;
        } else {
            rhs += Float::with_val(prec, &c1 * &phi[1]);
        }
        if v == 2 {
            pivot -= &c2;
        } else if v > 2 {
            rhs += Float::with_val(prec, &c2 * &phi[2]);
        } else if !c2.is_zero() {
            return Err(Error::Internal("φ(2) is needed before it is known".into()));
        }
        if pivot.is_zero() {
            return Err(Error::Internal(format!(
                "degenerate pivot for φ({v}); it must be supplied as an initial value"
            )));
        }
        phi.push(rhs / pivot);
    }
    phi.truncate(u_max + 1);
    Ok(phi)
}

/// Residuals of a candidate `φ` against the master relation and the
/// constraint on `φ(0..=3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `max_u |LHS - RHS|` of (2) over `u ≤ len - 5`.
    pub master: f64,
    /// `|LHS - (4 - E S) φ(∞)|` of the constraint.
    pub constraint: f64,
}

/// Evaluates both residuals in double precision.
///
/// `φ(∞)` is taken as `1` under the net profit condition and as the last
/// entry of `phi` otherwise.
pub fn residuals(m: &ModelSpec, phi: &[f64]) -> Residuals {
    assert!(phi.len() >= 8, "residuals need at least 8 values");
    let (x, y, s) = (m.x(), m.y(), m.s());
    let mut master: f64 = 0.0;
    for u in 0..=phi.len() - 5 {
        let mut rhs = 0.0;
        for (k, p) in phi.iter().enumerate().take(u + 5).skip(1) {
            rhs += p * s.prob(u + 4 - k);
        }
        rhs -= (x.prob(u + 3) * y.prob(0) + x.prob(u + 2) * y.prob(1)) * phi[1];
        rhs -= x.prob(u + 2) * y.prob(0) * phi[2];
        master = master.max((phi[u] - rhs).abs());
    }
    let margin = m.margin().value;
    let at_infinity = if margin > 0.0 { 1.0 } else { *phi.last().expect("non-empty") };
    let lhs = phi[0]
        + (x.tail(2) * y.prob(0) + x.tail(1) * y.prob(1)) * phi[1]
        + x.tail(1) * y.prob(0) * phi[2]
        + (1..=3).map(|k| phi[k] * s.cdf(3 - k)).sum::<f64>();
    Residuals {
        master,
        constraint: (lhs - margin * at_infinity).abs(),
    }
}
