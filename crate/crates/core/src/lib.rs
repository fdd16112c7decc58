//! Survival probabilities of a discrete-time risk model in which claims
//! alternate between two distributions `X` and `Y` and premium income is 2
//! per period.
//!
//! * [`dist`]: integer PMFs, displaced Poisson, convolution, spec parsing.
//! * [`model`]: the model and its case classification.
//! * [`finite`]: `φ(u, T)` by recursion, an independent DP and Monte Carlo.
//! * [`ultimate`]: `φ(u)` from recurrent coefficient sequences, plus a
//!   boundary-value oracle.
//! * [`conjectures`]: determinant traces of the difference systems.
//! * [`published`]: published tables and a cell-by-cell checker.

pub mod banded;
pub mod conjectures;
pub mod dist;
pub mod error;
pub mod finite;
pub mod model;
pub mod published;
pub mod ultimate;

pub use conjectures::{determinant_trace, Conjecture, DeterminantTrace};
pub use dist::{convolve, make_displaced_poisson, parse_pmf_spec, summarize, Pmf, Summary};
pub use error::{Error, Result};
pub use finite::{dp_oracle, mc_estimate, survival_finite, SurvivalGrid};
pub use model::{classify, net_profit_margin, CaseTag, Margin, ModelSpec, NoNetProfitCase};
pub use ultimate::{
    boundary_oracle, build_sequences, extend_ultimate, no_net_profit_values, residuals,
    solve_initials, survival_ultimate, SolverOptions, UltimateResult,
};
