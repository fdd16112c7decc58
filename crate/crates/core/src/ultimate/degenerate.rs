//! Survival without the net profit condition.

use crate::model::{ModelSpec, NoNetProfitCase};

/// `φ(0..=u_max)` when `E S ≥ 4`.
///
/// Ruin is certain unless `S` is the point mass at 4, in which case the
/// surplus is deterministic and survives from the pattern's threshold on.
pub fn no_net_profit_values(_m: &ModelSpec, sub: NoNetProfitCase, u_max: usize) -> Vec<f64> {
    match sub {
        NoNetProfitCase::Exceeds | NoNetProfitCase::Balanced => vec![0.0; u_max + 1],
        NoNetProfitCase::Degenerate(pair) => {
            let from = pair.survival_threshold();
            (0..=u_max).map(|u| if u >= from { 1.0 } else { 0.0 }).collect()
        }
    }
}
