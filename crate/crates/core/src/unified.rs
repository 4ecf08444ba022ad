//! Unified-(q,s) entropy and entanglement.
//!
//! All logarithms are natural, so the q→1 limit is the von Neumann entropy
//! in nats (entanglement of formation is usually quoted in bits; divide by
//! `ln 2` to convert).
//!
//! Near the removable singularities of the generic formula the closed limits
//! are used instead:
//!
//! | regime      | condition        | value                     |
//! |-------------|------------------|---------------------------|
//! | `QNearOne`  | `|q − 1| < 1e-6` | `−Σ λ ln λ`               |
//! | `SNearZero` | `s < 1e-6`       | `ln(tr ρ^q)/(1 − q)`      |
//! | `SNearOne`  | `|s − 1| < 1e-6` | `(tr ρ^q − 1)/(1 − q)`    |
//! | `Generic`   | otherwise        | `[(tr ρ^q)^s − 1]/((1 − q)s)` |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{DensityMatrix, PureState};

pub mod roof;

pub use roof::{convex_roof_ue_rank2, RoofOptions, RoofResult};

/// Half-width of each limit regime.
pub const REGIME_TOL: f64 = 1e-6;
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    QNearOne,
    SNearZero,
    SNearOne,
}

/// The `(q, s)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UeParams {
    q: f64,
    s: f64,
}

impl UeParams {
    pub fn new(q: f64, s: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::OutOfRange {
                what: "q",
                value: q,
                range: "(0, inf)",
            });
        }
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::OutOfRange {
                what: "s",
                value: s,
                range: "[0, inf)",
            });
        }
        Ok(UeParams { q, s })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn regime(&self) -> Regime {
        if (self.q - 1.0).abs() < REGIME_TOL {
            Regime::QNearOne
        } else if self.s < REGIME_TOL {
            Regime::SNearZero
        } else if (self.s - 1.0).abs() < REGIME_TOL {
            Regime::SNearOne
        } else {
            Regime::Generic
        }
    }

    pub fn in_region_r(&self) -> bool {
        in_region_r(self)
    }

    /// `q ≥ 1, 0 ≤ s ≤ 1, qs ≤ 3`.
    pub fn satisfies_lemma8(&self) -> bool {
        self.q >= 1.0 && (0.0..=1.0).contains(&self.s) && self.q * self.s <= 3.0
    }

    /// Which of the two hypothesis sets for `U = f_{q,s}(C)` this pair meets.
    pub fn hypothesis_tags(&self) -> HypothesisTags {
        HypothesisTags {
            region_r: self.in_region_r(),
            lemma8: self.satisfies_lemma8(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisTags {
    pub region_r: bool,
    pub lemma8: bool,
}

/// Lower q-boundary of region ℛ.
///
/// `(√(9s²−24s+28) − (2+3s)) / (2(2−3s))` rationalized to
/// `6 / (√(9s²−24s+28) + 2 + 3s)`, which is regular at `s = 2/3` (value 3/4).
pub fn region_r_lower(s: f64) -> f64 {
    6.0 / ((9.0 * s * s - 24.0 * s + 28.0).sqrt() + 2.0 + 3.0 * s)
}

/// Upper q-boundary of region ℛ, `(5+√13)/(2s)`; infinite at `s = 0`.
pub fn region_r_upper(s: f64) -> f64 {
    if s == 0.0 {
        f64::INFINITY
    } else {
        (5.0 + 13f64.sqrt()) / (2.0 * s)
    }
}

pub fn in_region_r(params: &UeParams) -> bool {
    let (q, s) = (params.q, params.s);
    (0.0..=1.0).contains(&s) && region_r_lower(s) <= q && q <= region_r_upper(s)
}

fn check_unit_interval(what: &'static str, x: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(Error::OutOfRange {
            what,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `f_{q,s}(x)`: unified-(q,s) entanglement of a Schmidt-rank-2 pure state
/// with concurrence `x`.
pub fn f_qs(x: f64, params: &UeParams) -> Result<f64> {
    let x = check_unit_interval("concurrence", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let r = (1.0 - x * x).sqrt();
    Ok(match params.regime() {
        Regime::Generic => {
            let (q, s) = (params.q, params.s);
            let two_qs = 2f64.powf(q * s);
            (((1.0 + r).powf(q) + (1.0 - r).powf(q)).powf(s) - two_qs) / ((1.0 - q) * s * two_qs)
        }
        _ => spectrum_entropy(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0], params),
    })
}

/// `g_{q,s}(y)` with `g_{q,s}(x²) = f_{q,s}(x)`.
pub fn g_qs(y: f64, params: &UeParams) -> Result<f64> {
    let y = check_unit_interval("squared concurrence", y)?;
    if y == 0.0 {
        return Ok(0.0);
    }
    let r = (1.0 - y).sqrt();
    Ok(match params.regime() {
        Regime::Generic => {
            let (q, s) = (params.q, params.s);
            let two_qs = 2f64.powf(q * s);
            (((1.0 + r).powf(q) + (1.0 - r).powf(q)).powf(s) - two_qs) / ((1.0 - q) * s * two_qs)
        }
        _ => spectrum_entropy(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0], params),
    })
}

/// Unified entropy of a probability vector, dispatching on the regime.
pub fn spectrum_entropy(probs: &[f64], params: &UeParams) -> f64 {
    let probs = probs.iter().map(|&p| p.max(0.0));
    let (q, s) = (params.q, params.s);
    match params.regime() {
        Regime::QNearOne => -probs.filter(|&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>(),
        Regime::SNearZero => power_trace(probs, q).ln() / (1.0 - q),
        Regime::SNearOne => (power_trace(probs, q) - 1.0) / (1.0 - q),
        Regime::Generic => (power_trace(probs, q).powf(s) - 1.0) / ((1.0 - q) * s),
    }
}

/// The generic formula `[(tr ρ^q)^s − 1]/((1 − q)s)` with no regime switch.
/// Used to probe the limits numerically.
pub fn spectrum_entropy_generic(probs: &[f64], q: f64, s: f64) -> f64 {
    let t = power_trace(probs.iter().map(|&p| p.max(0.0)), q);
    (t.powf(s) - 1.0) / ((1.0 - q) * s)
}

fn power_trace(probs: impl Iterator<Item = f64>, q: f64) -> f64 {
    probs.filter(|&p| p > 0.0).map(|p| p.powf(q)).sum()
}

/// Natural-log von Neumann entropy.
pub fn von_neumann(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Natural-log Rényi-q entropy `ln(tr ρ^q)/(1−q)`.
pub fn renyi(probs: &[f64], q: f64) -> f64 {
    power_trace(probs.iter().copied(), q).ln() / (1.0 - q)
}

/// Tsallis-q entropy `(tr ρ^q − 1)/(1−q)`.
pub fn tsallis(probs: &[f64], q: f64) -> f64 {
    (power_trace(probs.iter().copied(), q) - 1.0) / (1.0 - q)
}

pub fn unified_entropy(rho: &DensityMatrix, params: &UeParams) -> f64 {
    spectrum_entropy(&rho.eigenvalues(), params)
}

/// Unified-(q,s) entanglement of a pure state across `side_a | rest`.
pub fn ue_pure(psi: &PureState, side_a: &[usize], params: &UeParams) -> Result<f64> {
    if side_a.len() >= psi.num_subsystems() {
        return Err(Error::InvalidSubsystems(
            "side A must be a proper subset".into(),
        ));
    }
    Ok(unified_entropy(&psi.reduce(side_a)?, params))
}

/// Unified-(q,s) entanglement of a GW reduction with concurrence `c`.
pub fn ue_gw_reduced(c: f64, params: &UeParams) -> Result<f64> {
    f_qs(c, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::GwState;
    use approx::assert_abs_diff_eq;

    fn p(q: f64, s: f64) -> UeParams {
        UeParams::new(q, s).unwrap()
    }

    #[test]
    fn f_examples() {
        let p21 = p(2.0, 1.0);
        assert_abs_diff_eq!(f_qs(0.5f64.sqrt(), &p21).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(f_qs(0.0, &p(3.0, 0.4)).unwrap(), 0.0);
        assert_abs_diff_eq!(f_qs(1.0, &p21).unwrap(), 0.5, epsilon = 1e-15);
        assert!(f_qs(1.1, &p21).is_err());
        assert!(f_qs(-0.1, &p21).is_err());
    }

    #[test]
    fn g_examples() {
        let p21 = p(2.0, 1.0);
        assert_abs_diff_eq!(g_qs(8.0 / 25.0, &p21).unwrap(), 4.0 / 25.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g_qs(41.0 / 50.0, &p21).unwrap(), 41.0 / 100.0, epsilon = 1e-15);
        assert_eq!(g_qs(0.0, &p21).unwrap(), 0.0);
    }

    #[test]
    fn generic_branch_matches_spectrum_formula() {
        // Closed form and the eigenvalue route agree.
        for &(q, s) in &[(2.0, 0.5), (0.8, 0.3), (3.5, 0.9), (1.5, 2.0)] {
            let params = p(q, s);
            for k in 1..=20 {
                let x = k as f64 / 20.0;
                let r = (1.0 - x * x).sqrt();
                let spec = spectrum_entropy_generic(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0], q, s);
                assert_abs_diff_eq!(f_qs(x, &params).unwrap(), spec, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn region_membership() {
        assert!(p(2.0, 1.0).in_region_r());
        assert!(!p(4.31, 1.0).in_region_r());
        assert!(!p(2.0, 1.2).in_region_r());
        assert!(p(100.0, 0.0).in_region_r());
        assert_abs_diff_eq!(region_r_lower(1.0), (5.0 - 13f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(region_r_upper(1.0), (5.0 + 13f64.sqrt()) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn region_lower_matches_printed_form() {
        let printed = |s: f64| ((9.0 * s * s - 24.0 * s + 28.0).sqrt() - (2.0 + 3.0 * s)) / (2.0 * (2.0 - 3.0 * s));
        for k in 0..=100 {
            let s = k as f64 / 100.0;
            if (s - 2.0 / 3.0).abs() > 1e-3 {
                assert_abs_diff_eq!(region_r_lower(s), printed(s), epsilon = 1e-12);
            }
        }
        // one-sided limits of the printed expression approach 3/4
        let h = 1e-7;
        assert_abs_diff_eq!(printed(2.0 / 3.0 - h), 0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(printed(2.0 / 3.0 + h), 0.75, epsilon = 1e-6);
        assert_abs_diff_eq!(region_r_lower(2.0 / 3.0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let psi = GwState::uniform_w(3).unwrap().state_vector().unwrap();
        assert_abs_diff_eq!(unified_entropy(&psi.projector(), &p(2.0, 0.5)), 0.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(unified_entropy(&mixed, &p(2.0, 1.0)), 0.5, epsilon = 1e-14);

        let rho = psi.reduce(&[0]).unwrap();
        let expected = -(2.0f64 / 3.0) * (2.0f64 / 3.0).ln() - (1.0f64 / 3.0) * (1.0f64 / 3.0).ln();
        assert_abs_diff_eq!(unified_entropy(&rho, &p(1.0, 0.7)), expected, epsilon = 1e-13);
        assert_abs_diff_eq!(expected, 0.6365, epsilon = 1e-4);
    }

    #[test]
    fn ue_pure_examples() {
        let bell = GwState::uniform_w(2).unwrap().state_vector().unwrap();
        assert_abs_diff_eq!(ue_pure(&bell, &[0], &p(2.0, 1.0)).unwrap(), 0.5, epsilon = 1e-14);
        let w6 = GwState::uniform_w(6).unwrap().state_vector().unwrap();
        assert_abs_diff_eq!(ue_pure(&w6, &[0, 1, 2, 3], &p(2.0, 1.0)).unwrap(), 4.0 / 9.0, epsilon = 1e-13);
        assert!(ue_pure(&w6, &[0, 1, 2, 3, 4, 5], &p(2.0, 1.0)).is_err());
    }

    #[test]
    fn ue_gw_reduced_examples() {
        let p21 = p(2.0, 1.0);
        assert_abs_diff_eq!(ue_gw_reduced(0.5f64.sqrt(), &p21).unwrap(), 0.25, epsilon = 1e-15);
        assert_eq!(ue_gw_reduced(0.0, &p21).unwrap(), 0.0);
        assert_abs_diff_eq!(ue_gw_reduced(2.0 * 2f64.sqrt() / 5.0, &p21).unwrap(), 4.0 / 25.0, epsilon = 1e-15);
    }

    #[test]
    fn regimes() {
        assert_eq!(p(1.0 + 1e-7, 0.5).regime(), Regime::QNearOne);
        assert_eq!(p(2.0, 1e-7).regime(), Regime::SNearZero);
        assert_eq!(p(2.0, 1.0).regime(), Regime::SNearOne);
        assert_eq!(p(2.0, 0.5).regime(), Regime::Generic);
        assert!(UeParams::new(0.0, 1.0).is_err());
        assert!(UeParams::new(1.0, -0.1).is_err());
    }

    #[test]
    fn hypothesis_tags_can_differ() {
        let t = p(0.8, 1.0).hypothesis_tags();
        assert!(t.region_r && !t.lemma8);
        let t = p(4.0, 1.0).hypothesis_tags();
        assert!(t.region_r && !t.lemma8);
        let t = p(5.0, 1.0).hypothesis_tags();
        assert!(!t.region_r && !t.lemma8);
        let t = p(2.0, 1.0).hypothesis_tags();
        assert!(t.region_r && t.lemma8);
    }
}
