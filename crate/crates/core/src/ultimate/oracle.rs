//! Independent check of `φ(u)` through a truncated boundary-value problem.
//!
//! Setting `φ(u) = 1` for `u ≥ u_big` turns the master relation for
//! `u = 0..u_big-2` and the constraint on `φ(0..=3)` into a square, nearly
//! banded linear system in `φ(0..u_big)`.

use crate::banded::BandSystem;
use crate::error::{Error, Result};
use crate::model::ModelSpec;

pub const DEFAULT_U_BIG: usize = 400;

/// `φ(0..=u_max)` from the truncated system with `φ = 1` beyond `u_big`.
pub fn boundary_oracle(m: &ModelSpec, u_big: usize, u_max: usize) -> Result<Vec<f64>> {
    let margin = m.margin();
    if margin.value - margin.error_bound <= 0.0 {
        return Err(Error::WrongCase(format!(
            "boundary oracle needs E S < 4, margin is {}",
            margin.value
        )));
    }
    if u_big < 8 || u_max >= u_big {
        return Err(Error::InvalidParameter(format!(
            "need 8 <= u_big and u_max < u_big, got u_big={u_big}, u_max={u_max}"
        )));
    }
    let (x, y, s) = (m.x(), m.y(), m.s());
    let mut sys = BandSystem::new(u_big);
    let put = |sys: &mut BandSystem, row: usize, col: usize, v: f64| {
        if col < u_big {
            sys.add(row, col, v);
        } else {
            sys.add_rhs(row, -v);
        }
    };

    // φ(0) + (X̄(2)y0 + X̄(1)y1)φ(1) + X̄(1)y0 φ(2) + Σ_{k=1}^{3} φ(k)S(3-k) = 4 - E S
    put(&mut sys, 0, 0, 1.0);
    put(&mut sys, 0, 1, x.tail(2) * y.prob(0) + x.tail(1) * y.prob(1));
    put(&mut sys, 0, 2, x.tail(1) * y.prob(0));
    for k in 1..=3 {
        put(&mut sys, 0, k, s.cdf(3 - k));
    }
    sys.add_rhs(0, margin.value);

    // φ(u) - Σ_{k=1}^{u+4} φ(k)s_{u+4-k} + (x_{u+3}y0 + x_{u+2}y1)φ(1) + x_{u+2}y0 φ(2) = 0
    let s_top = s.support_max();
    for u in 0..u_big - 1 {
        let row = u + 1;
        put(&mut sys, row, u, 1.0);
        let lo = (u + 4).saturating_sub(s_top).max(1);
        for k in lo..=u + 4 {
            put(&mut sys, row, k, -s.prob(u + 4 - k));
        }
        put(&mut sys, row, 1, x.prob(u + 3) * y.prob(0) + x.prob(u + 2) * y.prob(1));
        put(&mut sys, row, 2, x.prob(u + 2) * y.prob(0));
    }

    let phi = sys.solve().map_err(|e| {
        Error::OracleFailure(format!("truncated system is singular at column {}", e.column))
    })?;
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::OracleFailure("non-finite solution".into()));
    }
    Ok(phi[..=u_max].to_vec())
}
