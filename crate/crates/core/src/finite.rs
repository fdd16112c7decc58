//! Finite-horizon survival `φ(u, T)`.
//!
//! [`survival_finite`] runs the two-step layer recursion; [`dp_oracle`] and
//! [`mc_estimate`] evaluate the same probability from the surplus process
//! directly and share nothing with it beyond PMF lookups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{ModelSpec, PREMIUM};

/// Layers narrower than this are filled sequentially.
const PAR_MIN_WIDTH: usize = 512;

/// `φ(u, T)` for `u in 0..=u_max`, `T in 1..=t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalGrid {
    u_max: usize,
    t_max: usize,
    /// Row-major by horizon: `values[(t - 1) * (u_max + 1) + u]`.
    values: Vec<f64>,
    /// Conservative bound on the effect of PMF truncation.
    pub error_bound: f64,
}

impl SurvivalGrid {
    pub fn u_max(&self) -> usize {
        self.u_max
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    /// `φ(u, t)`; panics outside the computed window.
    pub fn get(&self, u: usize, t: usize) -> f64 {
        assert!(u <= self.u_max && (1..=self.t_max).contains(&t), "({u}, {t}) outside grid");
        self.values[(t - 1) * (self.u_max + 1) + u]
    }

    /// Row of `φ(·, t)`.
    pub fn row(&self, t: usize) -> &[f64] {
        let w = self.u_max + 1;
        &self.values[(t - 1) * w..t * w]
    }
}

/// Finite-time survival probabilities via the two-step recursion
///
/// ```text
/// φ(u,1) = X(u+1)
/// φ(u,2) = Σ_{k=0}^{u+1} x_k Y(u+3-k)
/// φ(u,T) = Σ_{k=0}^{u+3} φ(u+4-k,T-2) s_k - x_{u+2} y_0 φ(2,T-2)
///          - (x_{u+2} y_1 + x_{u+3} y_0) φ(1,T-2)
/// ```
///
/// Layer `T` is needed for `u` up to `u_max + 2 (t_max - T)`, since layer
/// `T` reads layer `T-2` up to index `u + 4`.
pub fn survival_finite(m: &ModelSpec, u_max: usize, t_max: usize) -> SurvivalGrid {
    assert!(t_max >= 1, "t_max must be at least 1");
    let (x, y, s) = (m.x(), m.y(), m.s());
    let width = |t: usize| u_max + 2 * (t_max - t);
    let cols = u_max + 1;
    let mut values = vec![0.0; cols * t_max];

    let layer1: Vec<f64> = (0..=width(1)).map(|u| x.cdf(u + 1)).collect();
    values[..cols].copy_from_slice(&layer1[..cols]);
    if t_max == 1 {
        return finish(u_max, t_max, values, m);
    }

    let layer2: Vec<f64> = (0..=width(2))
        .map(|u| {
            let mut acc = 0.0;
            for k in 0..=(u + 1).min(x.support_max()) {
                acc += x.prob(k) * y.cdf(u + 3 - k);
            }
            acc
        })
        .collect();
    values[cols..2 * cols].copy_from_slice(&layer2[..cols]);

    // prev2 holds layer T-2, prev1 layer T-1.
    let mut prev2 = layer1;
    let mut prev1 = layer2;
    let (y0, y1) = (y.prob(0), y.prob(1));
    for t in 3..=t_max {
        let w = width(t);
        let back = &prev2;
        let entry = |u: usize| {
            let mut acc = 0.0;
            for k in 0..=(u + 3).min(s.support_max()) {
                acc += back[u + 4 - k] * s.prob(k);
            }
            acc - x.prob(u + 2) * y0 * back[2] - (x.prob(u + 2) * y1 + x.prob(u + 3) * y0) * back[1]
        };
        let layer: Vec<f64> = if w + 1 >= PAR_MIN_WIDTH {
            (0..=w).into_par_iter().map(entry).collect()
        } else {
            (0..=w).map(entry).collect()
        };
        values[(t - 1) * cols..t * cols].copy_from_slice(&layer[..cols]);
        prev2 = std::mem::replace(&mut prev1, layer);
    }
    finish(u_max, t_max, values, m)
}

fn finish(u_max: usize, t_max: usize, mut values: Vec<f64>, m: &ModelSpec) -> SurvivalGrid {
    // cancellation in the recursion can leave -1e-17 where the value is 0;
    // the carried layers keep the raw values
    for v in &mut values {
        *v = v.max(0.0);
    }
    SurvivalGrid {
        u_max,
        t_max,
        values,
        error_bound: t_max as f64 * (m.x().mass_defect() + m.y().mass_defect()),
    }
}

/// Survival probability up to horizon `t` by propagating the law of the
/// surplus `W(τ) = u + 2τ - Σ Z_i` forward, absorbing at `W ≤ 0`.
pub fn dp_oracle(m: &ModelSpec, u: usize, t: usize) -> f64 {
    let premium = PREMIUM as usize;
    // law[w] = P(W(τ) = w, no ruin so far); index = surplus value
    let mut law = vec![0.0; u + 1];
    law[u] = 1.0;
    for tau in 1..=t {
        let claim = if tau % 2 == 1 { m.x() } else { m.y() };
        let mut next = vec![0.0; law.len() + premium];
        for (w, &p) in law.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let funds = w + premium;
            // surviving claims are z < funds
            for z in 0..funds.min(claim.support_max() + 1) {
                next[funds - z] += p * claim.prob(z);
            }
        }
        law = next;
    }
    law.iter().sum()
}

/// Monte Carlo estimate of `φ(u, t)` with its binomial standard error.
///
/// Trial `i` draws from a ChaCha stream keyed by `(seed, i)`, so the estimate
/// does not depend on how trials are scheduled across threads.
pub fn mc_estimate(m: &ModelSpec, u: usize, t: usize, trials: u64, seed: u64) -> (f64, f64) {
    assert!(trials >= 1, "at least one trial");
    let premium = PREMIUM as i64;
    let (x_cdf, y_cdf) = (m.x().cdf_values(), m.y().cdf_values());
    let survived: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut w = u as i64;
            for tau in 1..=t {
                let cdf = if tau % 2 == 1 { x_cdf } else { y_cdf };
                match sample(cdf, rng.random::<f64>()) {
                    Some(z) => w += premium - z as i64,
                    // truncated tail: treated as an unboundedly large claim
                    None => return 0,
                }
                if w <= 0 {
                    return 0;
                }
            }
            1
        })
        .sum();
    let p = survived as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

fn sample(cdf: &[f64], uniform: f64) -> Option<usize> {
    let i = cdf.partition_point(|&c| c <= uniform);
    (i < cdf.len()).then_some(i)
}
