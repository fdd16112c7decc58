//! The bi-seasonal model with premium rate two and its case classification.

use std::fmt;

use crate::dist::{convolve, Pmf};
use crate::error::{Error, Result};

/// Income per period. The recurrences in this crate are specific to it.
pub const PREMIUM: u32 = 2;

/// Two-period income; the net profit condition is `E S < NET_INCOME`.
pub const NET_INCOME: f64 = 4.0;

/// Slack used when deciding whether a mean sits exactly on `E S = 4`.
const BOUNDARY_EPS: f64 = 1e-12;

/// Claims alternate `X, Y, X, Y, ...` while income accrues at [`PREMIUM`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    x: Pmf,
    y: Pmf,
    s: SDist,
}

/// Distribution of `S = X + Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SDist {
    pub s: Pmf,
    pub mean_s: f64,
}

/// `4 - E S` with a bound on the truncation error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    /// `4 - E S` on the retained masses.
    pub value: f64,
    /// Truncation can lower the true margin by at most this much.
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `s_0 > 0`.
    A,
    /// `s_0 = 0, s_1 > 0`.
    B,
    /// `s_0 = s_1 = 0, s_2 > 0`.
    C(CScenario),
    /// `s_0 = s_1 = s_2 = 0, s_3 > 0`.
    D(DScenario),
    /// `E S ≥ 4`.
    NoNetProfit(NoNetProfitCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CScenario {
    /// `x_0 = y_0 = 0, x_1 > 0, y_1 > 0`.
    S1,
    /// `x_0 > 0, y_0 = y_1 = 0, y_2 > 0`.
    S2,
    /// `x_0 = 0, y_0 > 0, x_1 = 0, x_2 > 0`.
    S3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DScenario {
    /// `x_0 = y_0 = x_1 = 0, y_1 > 0, x_2 > 0`.
    V1,
    /// `x_0 = y_0 = y_1 = 0, x_1 > 0, y_2 > 0`.
    V2,
    /// `x_0 = 0, y_0 > 0, x_1 = x_2 = 0, x_3 > 0`.
    V3,
    /// `x_0 > 0, y_0 = y_1 = y_2 = 0, y_3 > 0`.
    V4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoNetProfitCase {
    /// `E S > 4`.
    Exceeds,
    /// `E S = 4` and `s_4 < 1`.
    Balanced,
    /// `E S = 4` and `S ≡ 4`: both claims are point masses.
    Degenerate(PointMassPair),
}

/// The five ways two point masses can add up to four, as `(x atom, y atom)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointMassPair {
    X4Y0,
    X3Y1,
    X2Y2,
    X1Y3,
    X0Y4,
}

impl PointMassPair {
    pub fn from_x_atom(x: usize) -> Option<Self> {
        Some(match x {
            4 => PointMassPair::X4Y0,
            3 => PointMassPair::X3Y1,
            2 => PointMassPair::X2Y2,
            1 => PointMassPair::X1Y3,
            0 => PointMassPair::X0Y4,
            _ => return None,
        })
    }

    pub fn x_atom(self) -> usize {
        match self {
            PointMassPair::X4Y0 => 4,
            PointMassPair::X3Y1 => 3,
            PointMassPair::X2Y2 => 2,
            PointMassPair::X1Y3 => 1,
            PointMassPair::X0Y4 => 0,
        }
    }

    /// Smallest initial surplus that survives forever.
    pub fn survival_threshold(self) -> usize {
        match self {
            PointMassPair::X4Y0 => 3,
            PointMassPair::X3Y1 => 2,
            _ => 1,
        }
    }
}

impl CaseTag {
    /// Smallest atom of `S`, for the net-profit cases.
    pub fn lowest_atom(self) -> Option<usize> {
        match self {
            CaseTag::A => Some(0),
            CaseTag::B => Some(1),
            CaseTag::C(_) => Some(2),
            CaseTag::D(_) => Some(3),
            CaseTag::NoNetProfit(_) => None,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::A => write!(f, "A (s0>0)"),
            CaseTag::B => write!(f, "B (s0=0, s1>0)"),
            CaseTag::C(sc) => {
                let n = match sc {
                    CScenario::S1 => 1,
                    CScenario::S2 => 2,
                    CScenario::S3 => 3,
                };
                write!(f, "C.s{n} (s0=s1=0, s2>0)")
            }
            CaseTag::D(v) => {
                let n = match v {
                    DScenario::V1 => 1,
                    DScenario::V2 => 2,
                    DScenario::V3 => 3,
                    DScenario::V4 => 4,
                };
                write!(f, "D.v{n} (s0=s1=s2=0, s3>0)")
            }
            CaseTag::NoNetProfit(NoNetProfitCase::Exceeds) => write!(f, "no net profit (E S > 4)"),
            CaseTag::NoNetProfit(NoNetProfitCase::Balanced) => {
                write!(f, "no net profit (E S = 4, s4 < 1)")
            }
            CaseTag::NoNetProfit(NoNetProfitCase::Degenerate(p)) => write!(
                f,
                "no net profit (E S = 4, x{}=y{}=1)",
                p.x_atom(),
                4 - p.x_atom()
            ),
        }
    }
}

impl ModelSpec {
    pub fn new(x: Pmf, y: Pmf) -> Self {
        let s = convolve(&x, &y);
        let mean_s = s.mean();
        ModelSpec {
            x,
            y,
            s: SDist { s, mean_s },
        }
    }

    /// Rejects any premium other than [`PREMIUM`].
    pub fn with_premium(x: Pmf, y: Pmf, premium: u32) -> Result<Self> {
        if premium != PREMIUM {
            return Err(Error::UnsupportedPremium(premium));
        }
        Ok(Self::new(x, y))
    }

    pub fn premium(&self) -> u32 {
        PREMIUM
    }

    /// Odd-period claim.
    pub fn x(&self) -> &Pmf {
        &self.x
    }

    /// Even-period claim.
    pub fn y(&self) -> &Pmf {
        &self.y
    }

    pub fn s(&self) -> &Pmf {
        &self.s.s
    }

    pub fn s_dist(&self) -> &SDist {
        &self.s
    }

    /// `E S` on the retained masses.
    pub fn mean_s(&self) -> f64 {
        self.s.mean_s
    }

    pub fn margin(&self) -> Margin {
        net_profit_margin(self)
    }

    pub fn classify(&self) -> Result<CaseTag> {
        classify(self)
    }
}

pub fn net_profit_margin(m: &ModelSpec) -> Margin {
    Margin {
        value: NET_INCOME - m.mean_s(),
        error_bound: m.s().mean_tail_bound(),
    }
}

pub fn classify(m: &ModelSpec) -> Result<CaseTag> {
    let lower = m.mean_s();
    let upper = lower + m.s().mean_tail_bound();
    if upper < NET_INCOME - BOUNDARY_EPS {
        return classify_net_profit(m);
    }
    if lower > NET_INCOME + BOUNDARY_EPS {
        return Ok(CaseTag::NoNetProfit(NoNetProfitCase::Exceeds));
    }
    if upper - lower <= BOUNDARY_EPS && (lower - NET_INCOME).abs() <= BOUNDARY_EPS {
        return Ok(CaseTag::NoNetProfit(balanced_subcase(m)));
    }
    Err(Error::PrecisionInsufficient { lower, upper })
}

fn balanced_subcase(m: &ModelSpec) -> NoNetProfitCase {
    if m.s().prob(4) < 1.0 - BOUNDARY_EPS {
        return NoNetProfitCase::Balanced;
    }
    let x = m.x();
    let atom = (0..=4)
        .find(|&i| x.prob(i) >= 1.0 - BOUNDARY_EPS && m.y().prob(4 - i) >= 1.0 - BOUNDARY_EPS);
    match atom.and_then(PointMassPair::from_x_atom) {
        Some(pair) => NoNetProfitCase::Degenerate(pair),
        None => NoNetProfitCase::Balanced,
    }
}

fn classify_net_profit(m: &ModelSpec) -> Result<CaseTag> {
    let s = m.s();
    let x = |i| m.x().prob(i) > 0.0;
    let y = |i| m.y().prob(i) > 0.0;
    match s.min_atom() {
        Some(0) => Ok(CaseTag::A),
        Some(1) => Ok(CaseTag::B),
        Some(2) => {
            let sc = if !x(0) && !y(0) && x(1) && y(1) {
                CScenario::S1
            } else if x(0) && !y(0) && !y(1) && y(2) {
                CScenario::S2
            } else if !x(0) && y(0) && !x(1) && x(2) {
                CScenario::S3
            } else {
                return Err(Error::InconsistentModel(
                    "s2 > 0 but no scenario predicate holds".into(),
                ));
            };
            Ok(CaseTag::C(sc))
        }
        Some(3) => {
            let v = if !x(0) && !y(0) && !x(1) && y(1) && x(2) {
                DScenario::V1
            } else if !x(0) && !y(0) && !y(1) && x(1) && y(2) {
                DScenario::V2
            } else if !x(0) && y(0) && !x(1) && !x(2) && x(3) {
                DScenario::V3
            } else if x(0) && !y(0) && !y(1) && !y(2) && y(3) {
                DScenario::V4
            } else {
                return Err(Error::InconsistentModel(
                    "s3 > 0 but no scenario predicate holds".into(),
                ));
            };
            Ok(CaseTag::D(v))
        }
        _ => Err(Error::InconsistentModel(format!(
            "s0 = s1 = s2 = s3 = 0 while E S = {} < 4",
            m.mean_s()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::make_displaced_poisson;

    fn dp(l: f64, s: usize) -> Pmf {
        make_displaced_poisson(l, s, 1e-12).unwrap()
    }

    fn pm(masses: &[f64]) -> Pmf {
        Pmf::from_masses(masses).unwrap()
    }

    #[test]
    fn example_cases() {
        assert_eq!(ModelSpec::new(dp(1.0, 0), dp(2.0, 0)).classify(), Ok(CaseTag::A));
        assert_eq!(ModelSpec::new(dp(1.0, 1), dp(1.9, 0)).classify(), Ok(CaseTag::B));
        assert_eq!(
            ModelSpec::new(dp(1.0, 1), dp(0.9, 1)).classify(),
            Ok(CaseTag::C(CScenario::S1))
        );
        assert_eq!(
            ModelSpec::new(dp(0.5, 2), dp(1.0 / 3.0, 1)).classify(),
            Ok(CaseTag::D(DScenario::V1))
        );
        assert_eq!(
            ModelSpec::new(dp(2.0, 1), dp(1.0, 1)).classify(),
            Ok(CaseTag::NoNetProfit(NoNetProfitCase::Exceeds))
        );
    }

    #[test]
    fn margins() {
        let m1 = ModelSpec::new(dp(1.0, 0), dp(2.0, 0)).margin();
        assert!((m1.value - 1.0).abs() < 1e-10);
        assert!(m1.error_bound < 1e-10);
        let m4 = ModelSpec::new(dp(0.5, 2), dp(1.0 / 3.0, 1)).margin();
        // (0.5 + 2) + (1/3 + 1) from the summarized means of each component
        let oracle = 4.0 - (dp(0.5, 2).summarize().mean + dp(1.0 / 3.0, 1).summarize().mean);
        assert!((m4.value - oracle).abs() < 1e-12);
        assert!((m4.value - 1.0 / 6.0).abs() < 1e-10);
        let m5 = ModelSpec::new(dp(2.0, 1), dp(1.0, 1)).margin();
        assert!((m5.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn scenario_predicates() {
        let c = |x: &[f64], y: &[f64]| ModelSpec::new(pm(x), pm(y)).classify().unwrap();
        assert_eq!(c(&[0.0, 0.5, 0.5], &[0.0, 0.5, 0.5]), CaseTag::C(CScenario::S1));
        assert_eq!(c(&[0.5, 0.5], &[0.0, 0.0, 1.0]), CaseTag::C(CScenario::S2));
        assert_eq!(c(&[0.0, 0.0, 0.6, 0.4], &[0.5, 0.5]), CaseTag::C(CScenario::S3));
        assert_eq!(c(&[0.0, 0.0, 1.0], &[0.0, 0.9, 0.1]), CaseTag::D(DScenario::V1));
        assert_eq!(c(&[0.0, 1.0], &[0.0, 0.0, 0.95, 0.05]), CaseTag::D(DScenario::V2));
        assert_eq!(c(&[0.0, 0.0, 0.0, 1.0], &[0.9, 0.1]), CaseTag::D(DScenario::V3));
        assert_eq!(c(&[0.9, 0.1], &[0.0, 0.0, 0.0, 1.0]), CaseTag::D(DScenario::V4));
    }

    #[test]
    fn balanced_models() {
        let c = |x: &[f64], y: &[f64]| ModelSpec::new(pm(x), pm(y)).classify().unwrap();
        for i in 0..=4 {
            let m = ModelSpec::new(Pmf::point_mass(i), Pmf::point_mass(4 - i));
            let expected = PointMassPair::from_x_atom(i).unwrap();
            assert_eq!(
                m.classify().unwrap(),
                CaseTag::NoNetProfit(NoNetProfitCase::Degenerate(expected))
            );
        }
        assert_eq!(
            c(&[0.5, 0.0, 0.0, 0.0, 0.5], &[0.0, 0.0, 1.0]),
            CaseTag::NoNetProfit(NoNetProfitCase::Balanced)
        );
    }

    #[test]
    fn x0_y0_positive_is_case_a_or_no_profit() {
        for (x, y) in [(0.3, 0.2), (1.0, 3.5), (2.0, 2.5)] {
            let tag = ModelSpec::new(dp(x, 0), dp(y, 0)).classify().unwrap();
            assert!(matches!(tag, CaseTag::A | CaseTag::NoNetProfit(_)), "{tag:?}");
        }
    }

    #[test]
    fn straddling_boundary_is_refused() {
        // E S = 4 for the untruncated pair; truncation leaves an interval around 4
        let m = ModelSpec::new(dp(1.0, 1), dp(1.0, 1));
        assert!(matches!(m.classify(), Err(Error::PrecisionInsufficient { .. })));
    }

    #[test]
    fn premium_guard() {
        assert_eq!(
            ModelSpec::with_premium(Pmf::point_mass(0), Pmf::point_mass(0), 3),
            Err(Error::UnsupportedPremium(3))
        );
        assert!(ModelSpec::with_premium(Pmf::point_mass(0), Pmf::point_mass(0), 2).is_ok());
    }
}
