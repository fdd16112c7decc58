//! Ultimate-time survival probabilities `φ(u)`.

pub mod degenerate;
pub mod extend;
mod hp;
pub mod oracle;
pub mod sequences;
pub mod solve;

use rug::Float;

use crate::error::{Error, Result};
use crate::model::{CaseTag, ModelSpec};
use hp::HpModel;

pub use degenerate::no_net_profit_values;
pub use extend::{residuals, Residuals};
pub use oracle::{boundary_oracle, DEFAULT_U_BIG};
pub use sequences::{build_sequences, SequenceSet};
pub use solve::{solve_initials, Initials};

/// Default significand precision of the extended-precision arithmetic.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
/// Default index at which the difference systems are solved.
pub const DEFAULT_N_SOLVE: usize = 150;

/// Tuning of the initial-value solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// First index tried for the difference system.
    pub n_solve: usize,
    /// Requested precision; raised automatically when coefficients demand it.
    pub precision_bits: u32,
    /// Largest index tried before giving up.
    pub n_cap: usize,
    /// Required agreement of the initial values solved at `n` and `n - 1`.
    pub agreement_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n_solve: DEFAULT_N_SOLVE,
            precision_bits: DEFAULT_PRECISION_BITS,
            n_cap: 2000,
            agreement_tol: 1e-9,
        }
    }
}

/// `φ(0..=u_max)` with solver diagnostics.
#[derive(Debug, Clone)]
pub struct UltimateResult {
    pub case: CaseTag,
    /// Raw, unclamped values.
    pub phi: Vec<f64>,
    /// Initial values the forward recurrence started from.
    pub initials: Vec<f64>,
    pub n_solve: usize,
    pub residual_master: f64,
    pub residual_constraint: f64,
    pub determinant_at_solve: Option<Float>,
    /// Change of the initial values between `n_solve - 1` and `n_solve`.
    pub solve_change: f64,
    /// Largest gap between the extended values and the coefficient
    /// representation over `n ≤ n_solve` (0 where no sequences exist).
    pub representation_error: f64,
    pub precision_bits: u32,
}

impl UltimateResult {
    /// Values clamped to `[0, 1]` for presentation.
    pub fn phi_clamped(&self) -> Vec<f64> {
        self.phi.iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}

/// Extends solved initial values to `φ(0..=u_max)` in the initials' precision.
pub fn extend_ultimate(m: &ModelSpec, initials: &Initials, u_max: usize) -> Result<Vec<f64>> {
    let lowest = initials
        .case
        .lowest_atom()
        .ok_or_else(|| Error::WrongCase(format!("no recurrence for {}", initials.case)))?;
    let hp = HpModel::new(m, initials.precision_bits);
    let phi = extend_hp(&hp, lowest, &initials.values, u_max)?;
    Ok(phi.iter().map(Float::to_f64).collect())
}

use extend::extend_hp;

/// Bits lost per step of the forward recurrence, from the pivot `s_{m*}`.
fn growth_bits(m: &ModelSpec, lowest: usize, steps: usize) -> u32 {
    let pivot = m.s().prob(lowest);
    let per_step = (-pivot.log2()).max(0.0) / (4 - lowest) as f64;
    (per_step * steps as f64).ceil() as u32
}

/// Classifies the model, solves for its initial values and extends them
/// to `φ(0..=u_max)`.
pub fn survival_ultimate(m: &ModelSpec, u_max: usize, opts: &SolverOptions) -> Result<UltimateResult> {
    let tag = m.classify()?;
    // residuals need a few values past u_max
    let check_len = u_max.max(7);
    if let CaseTag::NoNetProfit(sub) = tag {
        let phi = no_net_profit_values(m, sub, check_len);
        let r = residuals(m, &phi);
        return Ok(UltimateResult {
            case: tag,
            initials: phi[..4].to_vec(),
            phi: phi[..=u_max].to_vec(),
            n_solve: 0,
            residual_master: r.master,
            residual_constraint: r.constraint,
            determinant_at_solve: None,
            solve_change: 0.0,
            representation_error: 0.0,
            precision_bits: opts.precision_bits,
        });
    }
    let lowest = tag.lowest_atom().expect("net profit cases have a lowest atom");
    let (initials, seq) = match tag {
        CaseTag::D(_) => {
            // exact initials; only rounding is amplified by the recurrence
            let prec = opts.precision_bits + growth_bits(m, lowest, check_len);
            let o = SolverOptions {
                precision_bits: prec,
                ..opts.clone()
            };
            (solve_initials(m, tag, &o)?, None)
        }
        _ => {
            // the solved values stay controlled only up to the solve index
            let o = SolverOptions {
                n_solve: opts.n_solve.max(check_len + 10),
                ..opts.clone()
            };
            let init = solve_initials(m, tag, &o)?;
            let (seq, _) = solve::sequences_for(m, tag, init.n_solve, init.precision_bits)?;
            (init, Some(seq))
        }
    };
    let hp = HpModel::new(m, initials.precision_bits.max(seq.as_ref().map_or(0, |s| s.precision_bits)));
    let reach = check_len.max(initials.n_solve);
    let full = extend_hp(&hp, lowest, &initials.values, reach)?;
    let representation_error = match &seq {
        Some(seq) => {
            let mut first3: Vec<Float> = full.iter().take(3).cloned().collect();
            first3.resize(3, hp.zero());
            (0..=initials.n_solve.min(seq.len() - 1))
                .map(|n| {
                    let rep = seq.represent(n, &first3, &hp.margin);
                    Float::with_val(hp.prec, &full[n] - &rep).abs().to_f64()
                })
                .fold(0.0, f64::max)
        }
        None => 0.0,
    };
    let full: Vec<f64> = full.iter().map(Float::to_f64).collect();
    let r = residuals(m, &full[..=check_len]);
    Ok(UltimateResult {
        case: tag,
        phi: full[..=u_max].to_vec(),
        initials: initials.to_f64(),
        n_solve: initials.n_solve,
        residual_master: r.master,
        residual_constraint: r.constraint,
        determinant_at_solve: initials.determinant.clone(),
        solve_change: initials.change,
        representation_error,
        precision_bits: hp.prec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{make_displaced_poisson, Pmf};

    fn dp(l: f64, s: usize) -> Pmf {
        make_displaced_poisson(l, s, 1e-12).unwrap()
    }

    fn run(x: Pmf, y: Pmf, u_max: usize) -> UltimateResult {
        survival_ultimate(&ModelSpec::new(x, y), u_max, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn example1_row() {
        let r = run(dp(1.0, 0), dp(2.0, 0), 15);
        assert!((r.phi[10] - 0.997).abs() < 5e-4, "{:?}", r.phi);
        assert!((r.phi[15] - 1.0).abs() < 5e-4);
        assert!(r.residual_master < 1e-8 && r.residual_constraint < 1e-8, "{r:?}");
        assert!(r.representation_error < 1e-6, "{}", r.representation_error);
    }

    #[test]
    fn example3_row() {
        let r = run(dp(1.0, 1), dp(0.9, 1), 40);
        assert!((r.phi[40] - 0.983).abs() < 5e-4, "{:?}", r.phi);
        assert!((r.phi[0] - 0.048).abs() < 5e-4);
        assert!(r.residual_master < 1e-8 && r.residual_constraint < 1e-8, "{r:?}");
    }

    #[test]
    fn no_claims_survive_surely() {
        let r = run(Pmf::point_mass(0), Pmf::point_mass(0), 20);
        for v in r.phi {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example5_is_all_zero() {
        let r = run(dp(2.0, 1), dp(1.0, 1), 50);
        assert!(r.phi.iter().all(|&v| v == 0.0));
        assert_eq!(r.residual_master, 0.0);
    }

    #[test]
    fn perturbed_constraint_is_detected() {
        let m = ModelSpec::new(dp(1.0, 0), dp(2.0, 0));
        let mut phi = survival_ultimate(&m, 20, &SolverOptions::default()).unwrap().phi;
        phi[0] += 0.01;
        assert!(residuals(&m, &phi).constraint >= 0.009);
    }

    #[test]
    fn zero_phi_solves_master_relation() {
        let m = ModelSpec::new(dp(2.0, 1), dp(1.0, 1));
        assert_eq!(residuals(&m, &[0.0; 30]).master, 0.0);
    }

    #[test]
    fn example4_extends_from_closed_form() {
        let r = run(dp(0.5, 2), dp(1.0 / 3.0, 1), 200);
        assert_eq!(r.phi[0], 0.0);
        assert!((r.phi[1] - 0.23261).abs() < 1e-5);
        assert!(r.phi.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((r.phi[200] - 1.0).abs() < 1e-9, "{}", r.phi[200]);
    }

    #[test]
    fn clamped_view_leaves_raw_values() {
        let r = UltimateResult {
            case: CaseTag::A,
            phi: vec![-1e-12, 0.5, 1.0 + 1e-12],
            initials: vec![],
            n_solve: 0,
            residual_master: 0.0,
            residual_constraint: 0.0,
            determinant_at_solve: None,
            solve_change: 0.0,
            representation_error: 0.0,
            precision_bits: 64,
        };
        assert_eq!(r.phi_clamped(), vec![0.0, 0.5, 1.0]);
        assert!(r.phi[0] < 0.0);
    }
}
