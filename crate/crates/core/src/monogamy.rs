//! Monogamy inequalities for unified-(q,s) entanglement of GW states.
//!
//! Every checker validates its hypotheses first and refuses (returns
//! [`Error::HypothesisRefused`]) instead of reporting a violation that the
//! theorem never claimed. `margin` is signed so that a non-negative margin
//! means the inequality holds: `lhs − rhs` for `≥` relations and `rhs − lhs`
//! for `≤`/`<` relations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concurrence::{bipartite_concurrence, gw_block_concurrence_oracle, PairConcurrenceSource};
use crate::error::{Error, Result};
use crate::states::{GwState, Partition, PureState};
use crate::table::Table;
use crate::unified::{f_qs, g_qs, spectrum_entropy, unified_entropy, UeParams};

/// Additive slack on every margin.
pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Hypothesis {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Hypothesis {
            name: name.to_string(),
            ok,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub inequality_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub params: BTreeMap<String, f64>,
}

impl MonogamyReport {
    pub fn hypotheses_ok(&self) -> bool {
        self.hypotheses.iter().all(|h| h.ok)
    }

    pub fn holds(&self) -> bool {
        self.margin >= -MARGIN_TOL
    }

    /// Hypotheses met but the margin is negative beyond tolerance.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_ok() && !self.holds()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn require(hyps: &[Hypothesis]) -> Result<()> {
    match hyps.iter().find(|h| !h.ok) {
        Some(h) => Err(Error::refused(&h.name, &h.detail)),
        None => Ok(()),
    }
}

fn region_hypothesis(params: &UeParams) -> Hypothesis {
    Hypothesis::new(
        "region_r",
        params.in_region_r(),
        format!("(q, s) = ({}, {}) must lie in region R", params.q(), params.s()),
    )
}

fn ue_params_map(params: &UeParams) -> BTreeMap<String, f64> {
    BTreeMap::from([("q".to_string(), params.q()), ("s".to_string(), params.s())])
}

/// Squared concurrences for one partition and focus block, computed once and
/// reused across parameter grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusConcurrences {
    /// `C²(P_focus | rest of partition)`.
    pub whole_sq: f64,
    /// `C²(P_focus P_i)` for each other block, in partition order.
    pub pair_sq: Vec<f64>,
    /// Spectrum of `ρ_{P_focus}` when the partition covers the whole register.
    pure_spectrum: Option<Vec<f64>>,
}

impl FocusConcurrences {
    pub fn compute(
        state: &GwState,
        partition: &Partition,
        focus: usize,
        source: PairConcurrenceSource,
    ) -> Result<Self> {
        if source == PairConcurrenceSource::PrintedClosedForm {
            return Err(Error::Unsupported(
                "printed closed forms exist only for uniform-W block cuts; use the oracle".into(),
            ));
        }
        let psi = state.state_vector()?;
        Self::from_vector(&psi, partition, focus)
    }

    pub fn from_vector(psi: &PureState, partition: &Partition, focus: usize) -> Result<Self> {
        let blocks = partition.blocks();
        if focus >= blocks.len() {
            return Err(Error::InvalidSubsystems(format!(
                "focus block {focus} out of range for {} blocks",
                blocks.len()
            )));
        }
        let rest = partition.rest_of(focus);
        let whole_sq = bipartite_concurrence(psi, &blocks[focus], &rest)?.powi(2);
        let pair_sq = blocks
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != focus)
            .map(|(_, b)| gw_block_concurrence_oracle(psi, &blocks[focus], b).map(|c| c * c))
            .collect::<Result<Vec<_>>>()?;
        let pure_spectrum = if partition.covers(psi.num_subsystems()) {
            Some(psi.schmidt_spectrum(&blocks[focus])?)
        } else {
            None
        };
        Ok(FocusConcurrences {
            whole_sq,
            pair_sq,
            pure_spectrum,
        })
    }

    /// `U(ρ_{P_focus|rest})` via `g_{q,s}(C²)`, cross-checked against the
    /// entropy of the reduced state when the partition covers the register.
    pub fn whole_ue(&self, params: &UeParams) -> Result<f64> {
        let via_g = g_qs(self.whole_sq, params)?;
        if let Some(spec) = &self.pure_spectrum {
            let via_entropy = spectrum_entropy(spec, params);
            if (via_entropy - via_g).abs() > MARGIN_TOL {
                return Err(Error::Unsupported(format!(
                    "entropy route {via_entropy} and g route {via_g} disagree"
                )));
            }
        }
        Ok(via_g)
    }

    pub fn pair_ues(&self, params: &UeParams) -> Result<Vec<f64>> {
        self.pair_sq.iter().map(|&c2| g_qs(c2, params)).collect()
    }
}

/// `U²(P_1|P_2…P_r) ≥ Σ_i U²(P_1 P_i)` on precomputed concurrences.
pub fn squared_monogamy_report(fc: &FocusConcurrences, params: &UeParams) -> Result<MonogamyReport> {
    let hyps = vec![region_hypothesis(params)];
    require(&hyps)?;
    let lhs = fc.whole_ue(params)?.powi(2);
    let rhs: f64 = fc.pair_ues(params)?.iter().map(|u| u * u).sum();
    Ok(MonogamyReport {
        inequality_id: "squared_monogamy".into(),
        lhs,
        rhs,
        margin: lhs - rhs,
        hypotheses: hyps,
        params: ue_params_map(params),
    })
}

pub fn check_squared_monogamy(
    state: &GwState,
    partition: &Partition,
    focus: usize,
    params: &UeParams,
    source: PairConcurrenceSource,
) -> Result<MonogamyReport> {
    require(&[region_hypothesis(params)])?;
    let fc = FocusConcurrences::compute(state, partition, focus, source)?;
    squared_monogamy_report(&fc, params)
}

/// α-power relation: `U^α(P_1|rest) ≥ Σ U^α(P_1 P_i)` for `α ≥ 2`, strict
/// reverse for `α ≤ 0`.
pub fn alpha_monogamy_report(
    fc: &FocusConcurrences,
    params: &UeParams,
    alpha: f64,
) -> Result<MonogamyReport> {
    let alpha_ok = alpha >= 2.0 || alpha <= 0.0;
    let hyps = vec![
        region_hypothesis(params),
        Hypothesis::new(
            "alpha_range",
            alpha_ok,
            format!("alpha = {alpha} must satisfy alpha >= 2 or alpha <= 0"),
        ),
    ];
    require(&hyps)?;
    let whole = fc.whole_ue(params)?;
    let pairs = fc.pair_ues(params)?;
    if alpha <= 0.0 {
        if let Some(z) = pairs.iter().find(|&&u| u <= 0.0) {
            return Err(Error::OutOfRange {
                what: "pair UE under a non-positive power",
                value: *z,
                range: "(0, inf)",
            });
        }
    }
    let lhs = whole.powf(alpha);
    let rhs: f64 = pairs.iter().map(|u| u.powf(alpha)).sum();
    let margin = if alpha >= 2.0 { lhs - rhs } else { rhs - lhs };
    let mut map = ue_params_map(params);
    map.insert("alpha".into(), alpha);
    Ok(MonogamyReport {
        inequality_id: if alpha >= 2.0 { "alpha_monogamy" } else { "alpha_reverse_strict" }.into(),
        lhs,
        rhs,
        margin,
        hypotheses: hyps,
        params: map,
    })
}

pub fn check_alpha_monogamy(
    state: &GwState,
    partition: &Partition,
    focus: usize,
    params: &UeParams,
    source: PairConcurrenceSource,
    alpha: f64,
) -> Result<MonogamyReport> {
    if !(alpha >= 2.0 || alpha <= 0.0) {
        return Err(Error::refused(
            "alpha_range",
            format!("alpha = {alpha} lies in (0, 2) where no relation is claimed"),
        ));
    }
    require(&[region_hypothesis(params)])?;
    let fc = FocusConcurrences::compute(state, partition, focus, source)?;
    alpha_monogamy_report(&fc, params, alpha)
}

/// Parameters of the tightened α-power bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TighteningParams {
    pub mu: f64,
    pub h: f64,
    pub tightening_factor: f64,
    pub alpha: f64,
}

/// `p^{α/2−1} U12^α + ((μ+h)^{α/2} − p^{α/2−1} h^{α/2}) U13^α` without any
/// hypothesis checks.
pub fn tightened_bound_formula(u12: f64, u13: f64, t: &TighteningParams) -> f64 {
    let e = t.alpha / 2.0 - 1.0;
    let pe = t.tightening_factor.powf(e);
    pe * u12.powf(t.alpha) + ((t.mu + t.h).powf(t.alpha / 2.0) - pe * t.h.powf(t.alpha / 2.0)) * u13.powf(t.alpha)
}

/// Hypotheses of the tightened bound for given pair entanglements.
pub fn theorem4_hypotheses(u12: f64, u13: f64, t: &TighteningParams) -> Vec<Hypothesis> {
    let ceiling = if u12 == 0.0 {
        f64::INFINITY
    } else {
        1.0 + t.mu * u13 * u13 / (u12 * u12)
    };
    let p = t.tightening_factor;
    vec![
        Hypothesis::new("mu_ge_1", t.mu >= 1.0, format!("mu = {}", t.mu)),
        Hypothesis::new("h_ge_1", t.h >= 1.0, format!("h = {}", t.h)),
        Hypothesis::new("alpha_ge_2", t.alpha >= 2.0, format!("alpha = {}", t.alpha)),
        Hypothesis::new(
            "pair_ratio",
            u12 * u12 >= t.h * u13 * u13,
            format!("U12^2 = {} must be >= h U13^2 = {}", u12 * u12, t.h * u13 * u13),
        ),
        Hypothesis::new(
            "tightening_factor_range",
            (1.0..=ceiling).contains(&p),
            format!("p = {p} must lie in [1, {ceiling}]"),
        ),
    ]
}

/// Tightened lower bound on `U^α(P_1|P_2P_3)`. Refuses when a hypothesis fails.
pub fn tighter_bound_theorem4(u12: f64, u13: f64, t: &TighteningParams) -> Result<f64> {
    require(&theorem4_hypotheses(u12, u13, t))?;
    Ok(tightened_bound_formula(u12, u13, t))
}

/// Full check of the tightened bound against `U(P_1|P_2P_3)`, including the
/// `U²(P_1|P_2P_3) ≥ U12² + μ U13²` premise.
pub fn check_theorem4(whole: f64, u12: f64, u13: f64, t: &TighteningParams) -> Result<MonogamyReport> {
    let mut hyps = theorem4_hypotheses(u12, u13, t);
    let premise = u12 * u12 + t.mu * u13 * u13;
    hyps.push(Hypothesis::new(
        "mu_premise",
        whole * whole >= premise,
        format!("U^2(P1|P2P3) = {} must be >= U12^2 + mu U13^2 = {premise}", whole * whole),
    ));
    require(&hyps)?;
    let lhs = whole.powf(t.alpha);
    let rhs = tightened_bound_formula(u12, u13, t);
    Ok(MonogamyReport {
        inequality_id: "tightened_alpha_bound".into(),
        lhs,
        rhs,
        margin: lhs - rhs,
        hypotheses: hyps,
        params: BTreeMap::from([
            ("mu".to_string(), t.mu),
            ("h".to_string(), t.h),
            ("p".to_string(), t.tightening_factor),
            ("alpha".to_string(), t.alpha),
        ]),
    })
}

/// Comparison bound `U12^α + ((μ+h)^{α/γ} − h^{α/γ}) U13^α`.
pub fn ref34_bound(u12: f64, u13: f64, mu: f64, h: f64, alpha: f64, gamma: f64) -> Result<f64> {
    let hyps = [
        Hypothesis::new("gamma_ge_1", gamma >= 1.0, format!("gamma = {gamma}")),
        Hypothesis::new("alpha_ge_gamma", alpha >= gamma, format!("alpha = {alpha}, gamma = {gamma}")),
        Hypothesis::new("mu_ge_1", mu >= 1.0, format!("mu = {mu}")),
        Hypothesis::new("h_ge_1", h >= 1.0, format!("h = {h}")),
    ];
    require(&hyps)?;
    let e = alpha / gamma;
    Ok(u12.powf(alpha) + ((mu + h).powf(e) - h.powf(e)) * u13.powf(alpha))
}

/// Inputs for the chained bound over a partition `{A, B_1, …, B_{r−1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainInput {
    /// `U(ρ_{A B_t})`, t = 1..r−1.
    pub pair_ues: Vec<f64>,
    /// `U(ρ_{A|B_t…B_{r−1}})`, t = 1..r−1 (the last entry is the last pair).
    pub tail_ues: Vec<f64>,
    /// `μ_t, h_t, p_t`, t = 1..r−2.
    pub mu: Vec<f64>,
    pub h: Vec<f64>,
    pub p: Vec<f64>,
    /// Number of leading steps that use the `U(AB_i) ≥ …` orientation.
    pub k: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainedBound {
    pub value: f64,
    pub hypotheses: Vec<Hypothesis>,
}

impl ChainedBound {
    /// The bound, or a refusal naming the first unmet hypothesis.
    pub fn checked(&self) -> Result<f64> {
        require(&self.hypotheses)?;
        Ok(self.value)
    }
}

impl ChainInput {
    fn r(&self) -> usize {
        self.pair_ues.len() + 1
    }

    fn gamma(&self, t: usize) -> f64 {
        let a2 = self.alpha / 2.0;
        (self.mu[t] + self.h[t]).powf(a2) - self.p[t].powf(a2 - 1.0) * self.h[t].powf(a2)
    }

    fn validate_shape(&self) -> Result<()> {
        let r = self.r();
        if r < 4 {
            return Err(Error::InvalidSubsystems(format!("chained bound needs r >= 4, got {r}")));
        }
        for (name, len) in [
            ("tail_ues", self.tail_ues.len()),
            ("mu", self.mu.len() + 1),
            ("h", self.h.len() + 1),
            ("p", self.p.len() + 1),
        ] {
            if len != r - 1 {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has the wrong length for r = {r}"
                )));
            }
        }
        if !(1..=r - 3).contains(&self.k) {
            return Err(Error::OutOfRange {
                what: "k",
                value: self.k as f64,
                range: "[1, r-3]",
            });
        }
        Ok(())
    }
}

/// Closed-form chained bound (sum of weighted pair terms) with the hypothesis
/// families evaluated on the supplied UE values. Indices below are 0-based:
/// step `t` pairs `U(AB_t)` with the tail `U(A|B_{t+1}…)`.
///
/// For steps after `k` the admissible range of `p_j` is checked as
/// `1 ≤ p_j ≤ μ_j U²(AB_j)/U²(A|B_{j+1}…)`, without the `1 +` that the
/// leading steps carry.
pub fn chained_bound_theorem5(input: &ChainInput) -> Result<ChainedBound> {
    input.validate_shape()?;
    if input.alpha < 2.0 {
        return Err(Error::refused("alpha_ge_2", format!("alpha = {}", input.alpha)));
    }
    if let Some(t) = (0..input.mu.len()).find(|&t| input.mu[t] < 1.0 || input.h[t] < 1.0) {
        return Err(Error::refused(
            "mu_h_ge_1",
            format!("mu_{} = {}, h_{} = {}", t + 1, input.mu[t], t + 1, input.h[t]),
        ));
    }
    let r = input.r();
    let k = input.k;
    let pair = &input.pair_ues;
    let tail = &input.tail_ues;
    let sq = |x: f64| x * x;

    let mut hyps = Vec::new();
    for t in 0..r - 2 {
        let (mu, h, p) = (input.mu[t], input.h[t], input.p[t]);
        let step = t + 1;
        if t < k {
            hyps.push(Hypothesis::new(
                &format!("step{step}_ratio"),
                sq(pair[t]) >= h * sq(tail[t + 1]),
                "U^2(AB_i) >= h_i U^2(A|B_{i+1}..)",
            ));
            hyps.push(Hypothesis::new(
                &format!("step{step}_premise"),
                sq(tail[t]) >= sq(pair[t]) + mu * sq(tail[t + 1]),
                "U^2(A|B_i..) >= U^2(AB_i) + mu_i U^2(A|B_{i+1}..)",
            ));
            let ceiling = if pair[t] == 0.0 { f64::INFINITY } else { 1.0 + mu * sq(tail[t + 1]) / sq(pair[t]) };
            hyps.push(Hypothesis::new(
                &format!("step{step}_p_range"),
                (1.0..=ceiling).contains(&p),
                format!("p = {p} in [1, {ceiling}]"),
            ));
        } else {
            hyps.push(Hypothesis::new(
                &format!("step{step}_ratio"),
                sq(tail[t + 1]) >= h * sq(pair[t]),
                "U^2(A|B_{j+1}..) >= h_j U^2(AB_j)",
            ));
            hyps.push(Hypothesis::new(
                &format!("step{step}_premise"),
                sq(tail[t]) >= mu * sq(pair[t]) + sq(tail[t + 1]),
                "U^2(A|B_j..) >= mu_j U^2(AB_j) + U^2(A|B_{j+1}..)",
            ));
            let ceiling = if tail[t + 1] == 0.0 { f64::INFINITY } else { mu * sq(pair[t]) / sq(tail[t + 1]) };
            hyps.push(Hypothesis::new(
                &format!("step{step}_p_range"),
                (1.0..=ceiling).contains(&p),
                format!("p = {p} in [1, {ceiling}]"),
            ));
        }
    }

    let alpha = input.alpha;
    let e = alpha / 2.0 - 1.0;
    let ua = |t: usize| pair[t].powf(alpha);
    let gammas: Vec<f64> = (0..r - 2).map(|t| input.gamma(t)).collect();
    let prod = |from: usize, to: usize| gammas[from..to].iter().product::<f64>();
    let p_prod = |from: usize, to: usize| input.p[from..to].iter().product::<f64>().powf(e);

    let mut value = input.p[0].powf(e) * ua(0);
    for i in 1..k {
        value += prod(0, i) * input.p[i].powf(e) * ua(i);
    }
    value += prod(0, k + 1) * ua(k);
    let lead = prod(0, k);
    #[allow(clippy::needless_range_loop)]
    for j in k + 1..r - 2 {
        value += lead * p_prod(k, j) * gammas[j] * ua(j);
    }
    value += lead * p_prod(k, r - 2) * ua(r - 2);

    Ok(ChainedBound { value, hypotheses: hyps })
}

/// The same bound obtained by folding the two-term bound from the last
/// block backwards, substituting each tail by the bound on it.
pub fn chained_bound_by_folding(input: &ChainInput) -> Result<f64> {
    input.validate_shape()?;
    let r = input.r();
    let alpha = input.alpha;
    let step = |t: usize| TighteningParams {
        mu: input.mu[t],
        h: input.h[t],
        tightening_factor: input.p[t],
        alpha,
    };
    let mut acc = input.pair_ues[r - 2].powf(alpha);
    for t in (input.k..r - 2).rev() {
        // roles swapped: the tail plays the dominant pair
        acc = tightened_bound_formula(acc.powf(alpha.recip()), input.pair_ues[t], &step(t));
    }
    for t in (0..input.k).rev() {
        acc = tightened_bound_formula(input.pair_ues[t], acc.powf(alpha.recip()), &step(t));
    }
    Ok(acc)
}

/// State-dependent inputs of the β-power bounds for one site pair: the
/// spectrum of `ρ_{AB}` and the pair concurrences of A and of B with every
/// other site. Reused across (β, s).
#[derive(Debug, Clone, PartialEq)]
pub struct BetaInputs {
    pub site_a: usize,
    pub site_b: usize,
    pub n: usize,
    ab_spectrum: Vec<f64>,
    c_ab: f64,
    c_a: Vec<f64>,
    c_b: Vec<f64>,
}

impl BetaInputs {
    pub fn compute(state: &GwState, site_a: usize, site_b: usize) -> Result<Self> {
        let n = state.n();
        if site_a >= n || site_b >= n || site_a == site_b {
            return Err(Error::InvalidSubsystems(format!(
                "sites A = {site_a}, B = {site_b} must be distinct and < {n}"
            )));
        }
        let psi = state.state_vector()?;
        let c = |x: usize, y: usize| gw_block_concurrence_oracle(&psi, &[x], &[y]);
        let others: Vec<usize> = (0..n).filter(|&k| k != site_a && k != site_b).collect();
        Ok(BetaInputs {
            site_a,
            site_b,
            n,
            ab_spectrum: psi.reduce(&[site_a, site_b])?.eigenvalues(),
            c_ab: c(site_a, site_b)?,
            c_a: others.iter().map(|&k| c(site_a, k)).collect::<Result<_>>()?,
            c_b: others.iter().map(|&k| c(site_b, k)).collect::<Result<_>>()?,
        })
    }

    /// `U(ρ_{AB})`, `X` and `Y` at `(q, s) = (2, s)`.
    fn terms(&self, params: &UeParams) -> Result<(f64, f64, f64)> {
        let ab = f_qs(self.c_ab, params)?;
        let mut x = ab;
        for &c in &self.c_a {
            x += f_qs(c, params)?;
        }
        let mut y = ab;
        for &c in &self.c_b {
            y += f_qs(c, params)?;
        }
        Ok((spectrum_entropy(&self.ab_spectrum, params).max(0.0), x, y))
    }

    fn setup(&self, beta: f64, s: f64) -> Result<(UeParams, Vec<Hypothesis>)> {
        let hyps = vec![
            Hypothesis::new("s_range", (0.5..=1.0).contains(&s), format!("s = {s} must lie in [1/2, 1]")),
            Hypothesis::new("beta_range", (0.0..=1.0).contains(&beta), format!("beta = {beta} must lie in [0, 1]")),
            Hypothesis::new("n_ge_3", self.n >= 3, format!("n = {}", self.n)),
        ];
        require(&hyps)?;
        Ok((UeParams::new(2.0, s)?, hyps))
    }

    #[allow(clippy::too_many_arguments)]
    fn report(&self, id: &str, lhs: f64, rhs: f64, margin: f64, hyps: Vec<Hypothesis>, beta: f64, s: f64) -> MonogamyReport {
        MonogamyReport {
            inequality_id: id.into(),
            lhs,
            rhs,
            margin,
            hypotheses: hyps,
            params: BTreeMap::from([
                ("q".to_string(), 2.0),
                ("s".to_string(), s),
                ("beta".to_string(), beta),
                ("site_a".to_string(), self.site_a as f64),
                ("site_b".to_string(), self.site_b as f64),
            ]),
        }
    }

    /// `U^β(ρ_{AB}) ≥ |X^β − Y^β|`.
    pub fn lower_bound(&self, beta: f64, s: f64) -> Result<MonogamyReport> {
        let (params, hyps) = self.setup(beta, s)?;
        let (u, x, y) = self.terms(&params)?;
        let lhs = u.powf(beta);
        let rhs = (x.powf(beta) - y.powf(beta)).abs();
        Ok(self.report("beta_lower_bound", lhs, rhs, lhs - rhs, hyps, beta, s))
    }

    /// `U^β(ρ_{AB}) ≤ X^β + Y^β`.
    pub fn upper_bound(&self, beta: f64, s: f64) -> Result<MonogamyReport> {
        let (params, hyps) = self.setup(beta, s)?;
        let (u, x, y) = self.terms(&params)?;
        let lhs = u.powf(beta);
        let rhs = x.powf(beta) + y.powf(beta);
        Ok(self.report("beta_upper_bound", lhs, rhs, rhs - lhs, hyps, beta, s))
    }
}

/// `U^β(ρ_{AB}) ≥ |X^β − Y^β|` with q = 2.
pub fn beta_lower_bound_theorem6(state: &GwState, site_a: usize, site_b: usize, beta: f64, s: f64) -> Result<MonogamyReport> {
    BetaInputs::compute(state, site_a, site_b)?.lower_bound(beta, s)
}

/// `U^β(ρ_{AB}) ≤ X^β + Y^β` with q = 2.
pub fn beta_upper_bound_theorem7(state: &GwState, site_a: usize, site_b: usize, beta: f64, s: f64) -> Result<MonogamyReport> {
    BetaInputs::compute(state, site_a, site_b)?.upper_bound(beta, s)
}

/// Gaps `(U(AB) − |U(A) − U(B)|, U(A) + U(B) − U(AB))` of the subadditivity
/// sandwich on the two-site reduction of a pure state.
pub fn subadditivity_gaps(psi: &PureState, site_a: usize, site_b: usize, params: &UeParams) -> Result<(f64, f64)> {
    let ua = unified_entropy(&psi.reduce(&[site_a])?, params);
    let ub = unified_entropy(&psi.reduce(&[site_b])?, params);
    let uab = unified_entropy(&psi.reduce(&[site_a, site_b])?, params);
    Ok((uab - (ua - ub).abs(), ua + ub - uab))
}

/// `(1+x)^m − p^{m−1}x^m − (1+h)^m + p^{m−1}h^m`.
pub fn lemma5_gap(x: f64, h: f64, p: f64, m: f64) -> Result<f64> {
    let ceiling = if x > 0.0 { 1.0 + x.recip() } else { f64::INFINITY };
    let hyps = [
        Hypothesis::new("x_ge_h_ge_0", x >= h && h >= 0.0, format!("x = {x}, h = {h}")),
        Hypothesis::new("p_range", (1.0..=ceiling).contains(&p), format!("p = {p} in [1, {ceiling}]")),
        Hypothesis::new("m_ge_1", m >= 1.0, format!("m = {m}")),
    ];
    require(&hyps)?;
    let pm = p.powf(m - 1.0);
    Ok((1.0 + x).powf(m) - pm * x.powf(m) - (1.0 + h).powf(m) + pm * h.powf(m))
}

/// `((x−y)^β − (x^β − y^β), x^β + y^β − (x+y)^β)`.
pub fn lemma6_check(x: f64, y: f64, beta: f64) -> Result<(f64, f64)> {
    let hyps = [
        Hypothesis::new("x_ge_y_ge_0", x >= y && y >= 0.0, format!("x = {x}, y = {y}")),
        Hypothesis::new("beta_range", (0.0..=1.0).contains(&beta), format!("beta = {beta}")),
    ];
    require(&hyps)?;
    Ok((
        (x - y).powf(beta) - (x.powf(beta) - y.powf(beta)),
        x.powf(beta) + y.powf(beta) - (x + y).powf(beta),
    ))
}

/// The six Example 1 quantities, computed from the four-site GW state
/// through partial traces and the block oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example1 {
    pub c_whole: f64,
    pub c12: f64,
    pub c13: f64,
    pub u_whole: f64,
    pub u12: f64,
    pub u13: f64,
}

pub fn example1_quantities() -> Result<Example1> {
    let psi = GwState::example1().state_vector()?;
    let params = UeParams::new(2.0, 1.0)?;
    let c_whole = gw_block_concurrence_oracle(&psi, &[0], &[1, 2])?;
    let c12 = gw_block_concurrence_oracle(&psi, &[0], &[1])?;
    let c13 = gw_block_concurrence_oracle(&psi, &[0], &[2])?;
    Ok(Example1 {
        c_whole,
        c12,
        c13,
        u_whole: f_qs(c_whole, &params)?,
        u12: f_qs(c12, &params)?,
        u13: f_qs(c13, &params)?,
    })
}

/// α-sweep over `[2, 5]` in steps of 0.05: exact `U^α(P1|P2P3)`, the
/// tightened bound at p = 2.6 and p = 1.8, and the comparison bound, all at
/// μ = 4, h = 1.
pub fn fig1_series() -> Result<Table> {
    let ex = example1_quantities()?;
    let mut t = Table::new(
        "alpha sweep, example 1, mu=4 h=1",
        ["alpha", "exact", "bound_p2.6", "bound_p1.8", "ref34"].map(String::from).to_vec(),
    );
    for k in 0..=60 {
        let alpha = 2.0 + 0.05 * k as f64;
        let tight = |p| TighteningParams {
            mu: 4.0,
            h: 1.0,
            tightening_factor: p,
            alpha,
        };
        t.push_row(vec![
            alpha,
            ex.u_whole.powf(alpha),
            tighter_bound_theorem4(ex.u12, ex.u13, &tight(2.6))?,
            tighter_bound_theorem4(ex.u12, ex.u13, &tight(1.8))?,
            ref34_bound(ex.u12, ex.u13, 4.0, 1.0, alpha, 2.0)?,
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const U12: f64 = 0.25;
    const U13: f64 = 0.16;
    const ORACLE: PairConcurrenceSource = PairConcurrenceSource::EffectiveQubitOracle;

    fn p21() -> UeParams {
        UeParams::new(2.0, 1.0).unwrap()
    }

    fn example1_partition() -> Partition {
        Partition::singletons(&[0, 1, 2], 4).unwrap()
    }

    fn tight(p: f64, alpha: f64) -> TighteningParams {
        TighteningParams {
            mu: 4.0,
            h: 1.0,
            tightening_factor: p,
            alpha,
        }
    }

    #[test]
    fn squared_monogamy_example1() {
        let rep = check_squared_monogamy(&GwState::example1(), &example1_partition(), 0, &p21(), ORACLE).unwrap();
        assert_abs_diff_eq!(rep.lhs, 0.41f64.powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.rhs, 0.0625 + 0.0256, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.margin, 0.08, epsilon = 1e-12);
        assert!(rep.hypotheses_ok() && rep.holds());
    }

    #[test]
    fn two_blocks_saturate() {
        let gw = GwState::example1();
        let p = Partition::new(vec![vec![0], vec![1, 2, 3]], 4).unwrap();
        let rep = check_squared_monogamy(&gw, &p, 0, &p21(), ORACLE).unwrap();
        assert!(rep.margin.abs() < 1e-9);
    }

    #[test]
    fn squared_monogamy_refusals() {
        let gw = GwState::example1();
        let outside = UeParams::new(5.0, 1.0).unwrap();
        assert!(matches!(
            check_squared_monogamy(&gw, &example1_partition(), 0, &outside, ORACLE),
            Err(Error::HypothesisRefused { .. })
        ));
        assert!(matches!(
            check_squared_monogamy(&gw, &example1_partition(), 0, &p21(), PairConcurrenceSource::PrintedClosedForm),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn alpha_examples() {
        let gw = GwState::example1();
        let part = example1_partition();
        let two = check_alpha_monogamy(&gw, &part, 0, &p21(), ORACLE, 2.0).unwrap();
        let sq = check_squared_monogamy(&gw, &part, 0, &p21(), ORACLE).unwrap();
        assert_abs_diff_eq!(two.margin, sq.margin, epsilon = 1e-15);

        let three = check_alpha_monogamy(&gw, &part, 0, &p21(), ORACLE, 3.0).unwrap();
        assert_abs_diff_eq!(three.lhs, 0.068921, epsilon = 1e-6);
        assert_abs_diff_eq!(three.rhs, 0.015625 + 0.004096, epsilon = 1e-12);

        let neg = check_alpha_monogamy(&gw, &part, 0, &p21(), ORACLE, -1.0).unwrap();
        assert_abs_diff_eq!(neg.lhs, 1.0 / 0.41, epsilon = 1e-10);
        assert_abs_diff_eq!(neg.rhs, 10.25, epsilon = 1e-10);
        assert!(neg.margin > 0.0);

        assert!(matches!(
            check_alpha_monogamy(&gw, &part, 0, &p21(), ORACLE, 1.0),
            Err(Error::HypothesisRefused { .. })
        ));
    }

    #[test]
    fn alpha_negative_rejects_zero_pair() {
        // site 3 carries no excitation weight on this state
        let gw = GwState::qubits(&[0.6, 0.8, 0.0].map(|x| crate::states::C64::new(x, 0.0))).unwrap();
        let p = Partition::singletons(&[0, 1, 2], 3).unwrap();
        assert!(matches!(
            check_alpha_monogamy(&gw, &p, 0, &p21(), ORACLE, -1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn theorem4_examples() {
        assert_abs_diff_eq!(tighter_bound_theorem4(U12, U13, &tight(1.7, 2.0)).unwrap(), 0.1649, epsilon = 1e-15);
        assert_abs_diff_eq!(tighter_bound_theorem4(U12, U13, &tight(2.6, 4.0)).unwrap(), 0.024836, epsilon = 1e-6);
        for alpha in [2.0, 3.0, 4.5] {
            let t = tighter_bound_theorem4(U12, U13, &tight(1.0, alpha)).unwrap();
            let r = ref34_bound(U12, U13, 4.0, 1.0, alpha, 2.0).unwrap();
            assert_abs_diff_eq!(t, r, epsilon = 1e-15);
        }
        // ceiling is 1 + 4·0.0256/0.0625 = 2.6384
        let err = tighter_bound_theorem4(U12, U13, &tight(2.7, 4.0)).unwrap_err();
        assert!(err.to_string().contains("tightening_factor_range"));
        assert!(tighter_bound_theorem4(U13, U12, &tight(1.0, 4.0)).is_err());
    }

    #[test]
    fn theorem4_report_on_example1() {
        let rep = check_theorem4(0.41, U12, U13, &tight(2.6, 3.0)).unwrap();
        assert!(rep.hypotheses_ok() && rep.margin > 0.0);
        // μ = 5 breaks the μ-premise: 0.0625 + 5·0.0256 > 0.1681
        let bad = TighteningParams { mu: 5.0, ..tight(1.0, 3.0) };
        assert!(check_theorem4(0.41, U12, U13, &bad).is_err());
    }

    #[test]
    fn ref34_examples() {
        assert_abs_diff_eq!(ref34_bound(U12, U13, 4.0, 1.0, 4.0, 2.0).unwrap(), 0.0196349, epsilon = 1e-7);
        let at_gamma = ref34_bound(U12, U13, 4.0, 1.0, 3.0, 3.0).unwrap();
        assert_abs_diff_eq!(at_gamma, U12.powi(3) + 4.0 * U13.powi(3), epsilon = 1e-15);
        assert!(ref34_bound(U12, U13, 4.0, 1.0, 1.5, 2.0).is_err());
        assert!(ref34_bound(U12, U13, 0.5, 1.0, 3.0, 2.0).is_err());
    }

    fn chain(alpha: f64, r: usize, k: usize) -> ChainInput {
        ChainInput {
            pair_ues: (0..r - 1).map(|t| 0.3 / (t as f64 + 1.0)).collect(),
            tail_ues: (0..r - 1).map(|t| 0.5 / (t as f64 + 1.0)).collect(),
            mu: vec![1.5; r - 2],
            h: vec![1.2; r - 2],
            p: (0..r - 2).map(|t| 1.0 + 0.1 * t as f64).collect(),
            k,
            alpha,
        }
    }

    #[test]
    fn chained_gamma_at_unit_params() {
        let mut c = chain(3.0, 5, 1);
        c.mu = vec![1.0; 3];
        c.h = vec![1.0; 3];
        c.p = vec![1.0; 3];
        for t in 0..3 {
            assert_abs_diff_eq!(c.gamma(t), 2f64.powf(1.5) - 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn chained_matches_fold() {
        for (r, k) in [(4, 1), (5, 1), (5, 2), (7, 3)] {
            for alpha in [2.0, 2.5, 4.0] {
                let c = chain(alpha, r, k);
                let closed = chained_bound_theorem5(&c).unwrap().value;
                let fold = chained_bound_by_folding(&c).unwrap();
                assert_abs_diff_eq!(closed, fold, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn chained_r4_is_two_nested_steps() {
        let c = chain(3.0, 4, 1);
        let step = |t: usize| TighteningParams { mu: c.mu[t], h: c.h[t], tightening_factor: c.p[t], alpha: 3.0 };
        let inner = tightened_bound_formula(c.pair_ues[2], c.pair_ues[1], &step(1));
        let outer = tightened_bound_formula(c.pair_ues[0], inner.powf(1.0 / 3.0), &step(0));
        assert_abs_diff_eq!(chained_bound_theorem5(&c).unwrap().value, outer, epsilon = 1e-14);
    }

    #[test]
    fn chained_alpha_two_reduces_to_mu_weights() {
        let c = chain(2.0, 5, 2);
        let u2 = |t: usize| c.pair_ues[t].powi(2);
        let expected = u2(0) + c.mu[0] * u2(1) + c.mu[0] * c.mu[1] * c.mu[2] * u2(2) + c.mu[0] * c.mu[1] * u2(3);
        assert_abs_diff_eq!(chained_bound_theorem5(&c).unwrap().value, expected, epsilon = 1e-15);
    }

    #[test]
    fn chained_shape_errors() {
        let mut c = chain(3.0, 5, 1);
        c.mu.pop();
        assert!(chained_bound_theorem5(&c).is_err());
        assert!(chained_bound_theorem5(&chain(3.0, 5, 3)).is_err());
        assert!(chained_bound_theorem5(&chain(3.0, 3, 1)).is_err());
        assert!(chained_bound_theorem5(&chain(1.5, 5, 1)).is_err());
    }

    #[test]
    fn beta_zero_cases() {
        let gw = GwState::example1();
        let lo = beta_lower_bound_theorem6(&gw, 0, 1, 0.0, 1.0).unwrap();
        assert_eq!((lo.lhs, lo.rhs), (1.0, 0.0));
        let hi = beta_upper_bound_theorem7(&gw, 0, 1, 0.0, 1.0).unwrap();
        assert_eq!(hi.rhs, 2.0);
        assert!(hi.margin >= 1.0);
    }

    #[test]
    fn beta_symmetric_state() {
        let w = GwState::uniform_w(4).unwrap();
        let lo = beta_lower_bound_theorem6(&w, 0, 1, 0.5, 0.75).unwrap();
        assert!(lo.rhs.abs() < 1e-12);
        let hi = beta_upper_bound_theorem7(&w, 0, 1, 1.0, 1.0).unwrap();
        assert!(hi.holds());
    }

    #[test]
    fn beta_example1_full_pipeline() {
        let rep = beta_lower_bound_theorem6(&GwState::example1(), 0, 1, 1.0, 1.0).unwrap();
        assert!(rep.margin >= -MARGIN_TOL);
    }

    #[test]
    fn beta_tsallis2_reduction() {
        // β = 1, s = 1: X = U(ρ_A), Y = U(ρ_B) for Tsallis-2, so the upper
        // bound is exactly the subadditivity bound.
        let gw = GwState::example1();
        let psi = gw.state_vector().unwrap();
        let rep = beta_upper_bound_theorem7(&gw, 0, 1, 1.0, 1.0).unwrap();
        let (_, upper_gap) = subadditivity_gaps(&psi, 0, 1, &p21()).unwrap();
        assert_abs_diff_eq!(rep.margin, upper_gap, epsilon = 1e-12);
    }

    #[test]
    fn beta_refusals() {
        let gw = GwState::example1();
        assert!(beta_lower_bound_theorem6(&gw, 0, 1, 1.2, 1.0).is_err());
        assert!(beta_lower_bound_theorem6(&gw, 0, 1, 0.5, 0.4).is_err());
        assert!(beta_upper_bound_theorem7(&gw, 0, 0, 0.5, 1.0).is_err());
    }

    #[test]
    fn lemma5_examples() {
        assert_abs_diff_eq!(lemma5_gap(2.0, 2.0, 1.2, 3.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lemma5_gap(2.0, 1.0, 1.5, 3.0).unwrap(), 3.25, epsilon = 1e-12);
        assert!(lemma5_gap(3.0, 1.0, 1.0, 2.5).unwrap() >= 0.0);
        assert!(lemma5_gap(1.0, 2.0, 1.0, 2.0).is_err());
        assert!(lemma5_gap(2.0, 1.0, 1.6, 2.0).is_err());
    }

    #[test]
    fn lemma6_examples() {
        assert_eq!(lemma6_check(3.0, 0.0, 0.4).unwrap(), (0.0, 0.0));
        let (a, b) = lemma6_check(3.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        let (a, b) = lemma6_check(4.0, 1.0, 0.5).unwrap();
        assert_abs_diff_eq!(a, 3f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 3.0 - 5f64.sqrt(), epsilon = 1e-15);
        assert!(lemma6_check(1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn example1_pipeline() {
        let ex = example1_quantities().unwrap();
        assert_abs_diff_eq!(ex.c_whole, (41.0f64 / 50.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(ex.c12, 2f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.c13, 2.0 * 2f64.sqrt() / 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.u_whole, 0.41, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.u12, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(ex.u13, 0.16, epsilon = 1e-12);
    }

    #[test]
    fn fig1_ordering() {
        let t = fig1_series().unwrap();
        assert_eq!(t.rows.len(), 61);
        for r in &t.rows {
            assert!(r[1] >= r[2] && r[2] >= r[3] && r[3] >= r[4] - 1e-15);
        }
    }

    #[test]
    fn report_json_fields() {
        let rep = check_squared_monogamy(&GwState::example1(), &example1_partition(), 0, &p21(), ORACLE).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        for key in ["inequality_id", "lhs", "rhs", "margin", "hypotheses", "params"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["hypotheses"][0]["name"], "region_r");
    }
}
