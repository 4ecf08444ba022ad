//! Partition-dependent residual entanglements Υ and Υ′ under a two-level
//! block cut, their tables and q-sweep series.

use serde::{Deserialize, Serialize};

use crate::concurrence::{
    bipartite_concurrence, gw_block_concurrence_oracle, pair_concurrence_sq, printed_pair_concurrence_sq, BlockCut,
    BlockPair, PairConcurrenceSource,
};
use crate::error::{Error, Result};
use crate::monogamy::{Hypothesis, MonogamyReport, MARGIN_TOL};
use crate::states::{GwState, PureState};
use crate::table::Table;
use crate::unified::{g_qs, region_r_lower, region_r_upper, UeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreKind {
    Upsilon,
    UpsilonPrime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreResult {
    pub kind: PreKind,
    pub n: usize,
    pub m: usize,
    /// Absent for Υ′.
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub q: f64,
    pub s: f64,
    pub value: f64,
    pub source: PairConcurrenceSource,
}

fn require_region(params: &UeParams) -> Result<()> {
    if params.in_region_r() {
        Ok(())
    } else {
        Err(Error::refused(
            "region_r",
            format!("(q, s) = ({}, {}) lies outside region R", params.q(), params.s()),
        ))
    }
}

/// Squared concurrences entering Υ and Υ′ for one cut of the uniform W
/// state, computed once and reused across (q, s).
#[derive(Debug, Clone, PartialEq)]
pub struct CutConcurrences {
    pub cut: BlockCut,
    pub source: PairConcurrenceSource,
    pub top_sq: f64,
    /// In the order of [`BlockPair::PAIRS`].
    pub block_sq: [f64; 4],
    pub qubit_pair_sq: f64,
}

impl CutConcurrences {
    pub fn uniform_w(cut: BlockCut, source: PairConcurrenceSource) -> Result<Self> {
        if source == PairConcurrenceSource::PrintedClosedForm {
            let c = |p| printed_pair_concurrence_sq(&cut, p);
            return Ok(CutConcurrences {
                cut,
                source,
                top_sq: c(BlockPair::TopCut),
                block_sq: BlockPair::PAIRS.map(c),
                qubit_pair_sq: c(BlockPair::QubitPair),
            });
        }
        let w = GwState::uniform_w(cut.n)?.state_vector()?;
        let c = |p| pair_concurrence_sq(&cut, p, source, &w);
        let [b0, b1, b2, b3] = BlockPair::PAIRS.map(c);
        Ok(CutConcurrences {
            cut,
            source,
            top_sq: c(BlockPair::TopCut)?,
            block_sq: [b0?, b1?, b2?, b3?],
            qubit_pair_sq: c(BlockPair::QubitPair)?,
        })
    }

    pub fn upsilon(&self, params: &UeParams) -> Result<f64> {
        require_region(params)?;
        let g2 = |y: f64| g_qs(y, params).map(|g| g * g);
        let mut v = g2(self.top_sq)?;
        for &y in &self.block_sq {
            v -= g2(y)?;
        }
        Ok(v)
    }

    pub fn upsilon_prime(&self, params: &UeParams) -> Result<f64> {
        require_region(params)?;
        let (n, m) = (self.cut.n, self.cut.m);
        let g2 = |y: f64| g_qs(y, params).map(|g| g * g);
        Ok(g2(self.top_sq)? - (m * (n - m)) as f64 * g2(self.qubit_pair_sq)?)
    }
}

/// Υ for the uniform W state.
pub fn upsilon(cut: &BlockCut, params: &UeParams, source: PairConcurrenceSource) -> Result<f64> {
    require_region(params)?;
    CutConcurrences::uniform_w(*cut, source)?.upsilon(params)
}

/// Υ′ for the uniform W state, where all qubit-pair terms coincide.
pub fn upsilon_prime(n: usize, m: usize, params: &UeParams, source: PairConcurrenceSource) -> Result<f64> {
    require_region(params)?;
    if !(1..n).contains(&m) {
        return Err(Error::OutOfRange {
            what: "m",
            value: m as f64,
            range: "[1, n-1]",
        });
    }
    CutConcurrences::uniform_w(BlockCut::top(n, m)?, source)?.upsilon_prime(params)
}

/// The three tiers `U²(P11P12|P21P22)`, `Σ` block-pair `U²` and
/// `Σ_{i≤m<j} U²(A_i A_j)` for an arbitrary GW state, from oracle concurrences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreTiers {
    pub top: f64,
    pub blocks: f64,
    pub qubit_pairs: f64,
}

impl PreTiers {
    pub fn upsilon(&self) -> f64 {
        self.top - self.blocks
    }

    pub fn upsilon_prime(&self) -> f64 {
        self.top - self.qubit_pairs
    }
}

pub fn pre_tiers(state: &GwState, cut: &BlockCut, params: &UeParams) -> Result<PreTiers> {
    require_region(params)?;
    if state.n() != cut.n {
        return Err(Error::DimensionMismatch(format!(
            "cut is for {} sites but the state has {}",
            cut.n,
            state.n()
        )));
    }
    let psi = state.state_vector()?;
    pre_tiers_vector(&psi, cut, params)
}

fn pre_tiers_vector(psi: &PureState, cut: &BlockCut, params: &UeParams) -> Result<PreTiers> {
    let u2 = |c: f64| g_qs(c * c, params).map(|g| g * g);
    let left: Vec<usize> = (0..cut.m).collect();
    let right: Vec<usize> = (cut.m..cut.n).collect();
    let top = u2(bipartite_concurrence(psi, &left, &right)?)?;

    let [p11, p12, p21, p22] = cut.blocks();
    let mut blocks = 0.0;
    for (p, q) in [(&p11, &p21), (&p12, &p21), (&p11, &p22), (&p12, &p22)] {
        if !p.is_empty() && !q.is_empty() {
            blocks += u2(gw_block_concurrence_oracle(psi, p, q)?)?;
        }
    }
    let mut qubit_pairs = 0.0;
    for &i in &left {
        for &j in &right {
            qubit_pairs += u2(gw_block_concurrence_oracle(psi, &[i], &[j])?)?;
        }
    }
    Ok(PreTiers {
        top,
        blocks,
        qubit_pairs,
    })
}

/// Υ for an arbitrary GW state via the oracle.
pub fn upsilon_general(state: &GwState, cut: &BlockCut, params: &UeParams) -> Result<f64> {
    Ok(pre_tiers(state, cut, params)?.upsilon())
}

/// Υ′ for an arbitrary GW state, as the explicit double sum over qubit pairs.
pub fn upsilon_prime_general(state: &GwState, m: usize, params: &UeParams) -> Result<f64> {
    Ok(pre_tiers(state, &BlockCut::top(state.n(), m)?, params)?.upsilon_prime())
}

/// Both links of `U²(top) ≥ Σ block-pair U² ≥ Σ qubit-pair U²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreChainReport {
    pub tiers: PreTiers,
    /// `top ≥ blocks`; margin Υ.
    pub upper: MonogamyReport,
    /// `blocks ≥ qubit_pairs`.
    pub lower: MonogamyReport,
}

impl PreChainReport {
    pub fn holds(&self) -> bool {
        self.upper.holds() && self.lower.holds()
    }
}

pub fn monogamy_like_pre_check(state: &GwState, cut: &BlockCut, params: &UeParams) -> Result<PreChainReport> {
    let tiers = pre_tiers(state, cut, params)?;
    let hyps = vec![Hypothesis::new("region_r", true, "(q, s) lies in region R")];
    let mut map = std::collections::BTreeMap::from([
        ("q".to_string(), params.q()),
        ("s".to_string(), params.s()),
        ("n".to_string(), cut.n as f64),
        ("m".to_string(), cut.m as f64),
        ("a".to_string(), cut.a as f64),
        ("b".to_string(), cut.b as f64),
    ]);
    map.insert("tolerance".into(), MARGIN_TOL);
    let report = |id: &str, lhs: f64, rhs: f64| MonogamyReport {
        inequality_id: id.into(),
        lhs,
        rhs,
        margin: lhs - rhs,
        hypotheses: hyps.clone(),
        params: map.clone(),
    };
    Ok(PreChainReport {
        tiers,
        upper: report("pre_block_tier", tiers.top, tiers.blocks),
        lower: report("pre_qubit_tier", tiers.blocks, tiers.qubit_pairs),
    })
}

/// Υ over `q_list × a_list` for fixed `(n, m, b, s)`; rows are q.
pub fn upsilon_table(
    q_list: &[f64],
    s: f64,
    n: usize,
    m: usize,
    b: usize,
    a_list: &[usize],
    source: PairConcurrenceSource,
) -> Result<Table> {
    let mut columns = vec!["q".to_string()];
    columns.extend(a_list.iter().map(|a| format!("upsilon(q,{a},{b})")));
    let mut table = Table::new(format!("upsilon s={s} m={m} b={b} n={n}"), columns);
    table.notes.push(format!("source={}", source.label()));
    let cuts = a_list
        .iter()
        .map(|&a| CutConcurrences::uniform_w(BlockCut::new(n, m, a, b)?, source))
        .collect::<Result<Vec<_>>>()?;
    for &q in q_list {
        let params = UeParams::new(q, s)?;
        let mut row = vec![q];
        for c in &cuts {
            row.push(c.upsilon(&params)?);
        }
        table.push_row(row);
    }
    Ok(table)
}

/// Υ′ over `q_list × m_list` for fixed `(n, s)`; rows are q.
pub fn upsilon_prime_table(q_list: &[f64], s: f64, n: usize, m_list: &[usize], source: PairConcurrenceSource) -> Result<Table> {
    let mut columns = vec!["q".to_string()];
    columns.extend(m_list.iter().map(|m| format!("upsilon_prime(q,{m})")));
    let mut table = Table::new(format!("upsilon_prime s={s} n={n}"), columns);
    table.notes.push(format!("source={}", source.label()));
    let cuts = m_list
        .iter()
        .map(|&m| CutConcurrences::uniform_w(BlockCut::top(n, m)?, source))
        .collect::<Result<Vec<_>>>()?;
    for &q in q_list {
        let params = UeParams::new(q, s)?;
        let mut row = vec![q];
        for c in &cuts {
            row.push(c.upsilon_prime(&params)?);
        }
        table.push_row(row);
    }
    Ok(table)
}

/// Generic grid entry point: `kind` selects Υ (columns over `a`) or Υ′
/// (columns over `m`).
#[allow(clippy::too_many_arguments)]
pub fn pre_table(
    kind: PreKind,
    q_list: &[f64],
    s: f64,
    n: usize,
    m: usize,
    b: usize,
    columns: &[usize],
    source: PairConcurrenceSource,
) -> Result<Table> {
    if q_list.is_empty() || columns.is_empty() {
        return Err(Error::InvalidSubsystems("table grid must be non-empty".into()));
    }
    match kind {
        PreKind::Upsilon => upsilon_table(q_list, s, n, m, b, columns, source),
        PreKind::UpsilonPrime => upsilon_prime_table(q_list, s, n, columns, source),
    }
}

pub const TABLE_Q: [f64; 5] = [2.0, 2.1, 2.2, 2.3, 2.4];

pub fn table1(source: PairConcurrenceSource) -> Result<Table> {
    upsilon_table(&TABLE_Q, 1.0, 6, 4, 5, &[1, 2, 3, 4], source)
}

pub fn table2(source: PairConcurrenceSource) -> Result<Table> {
    upsilon_table(&TABLE_Q, 1.0, 6, 4, 6, &[1, 2, 3, 4], source)
}

pub fn table3(source: PairConcurrenceSource) -> Result<Table> {
    upsilon_prime_table(&TABLE_Q, 1.0, 6, &[1, 2, 3, 4, 5], source)
}

/// `points` evenly spaced q values spanning the admissible q-range at `s`.
pub fn q_sweep(s: f64, points: usize) -> Vec<f64> {
    let (lo, hi) = (region_r_lower(s), region_r_upper(s));
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

pub const FIGURE_POINTS: usize = 101;

/// q-sweep of Υ at n = 6, m = 4, s = 1 for `b` = 5 or 6, one column per a.
pub fn upsilon_figure(b: usize, source: PairConcurrenceSource) -> Result<Table> {
    let mut t = upsilon_table(&q_sweep(1.0, FIGURE_POINTS), 1.0, 6, 4, b, &[1, 2, 3, 4], source)?;
    t.title = format!("upsilon q-sweep s=1 m=4 b={b} n=6");
    Ok(t)
}

/// q-sweep of Υ′ at n = 6, s = 1, one column per m.
pub fn upsilon_prime_figure(source: PairConcurrenceSource) -> Result<Table> {
    let mut t = upsilon_prime_table(&q_sweep(1.0, FIGURE_POINTS), 1.0, 6, &[1, 2, 3, 4, 5], source)?;
    t.title = "upsilon_prime q-sweep s=1 n=6".into();
    Ok(t)
}

/// Printed versus oracle squared concurrences for the uniform n-qubit W
/// state under `cut`. Columns: printed, oracle, oracle − printed; one row per
/// pair kind in the order of `DISCREPANCY_ROWS`.
pub fn discrepancy_table(cut: &BlockCut) -> Result<Table> {
    let w = GwState::uniform_w(cut.n)?.state_vector()?;
    let mut t = Table::new(
        format!("pair concurrence squared, uniform W n={} m={} a={} b={}", cut.n, cut.m, cut.a, cut.b),
        vec!["row".into(), "printed".into(), "oracle".into(), "difference".into()],
    );
    for (k, &pair) in DISCREPANCY_ROWS.iter().enumerate() {
        let printed = printed_pair_concurrence_sq(cut, pair);
        let oracle = pair_concurrence_sq(cut, pair, PairConcurrenceSource::EffectiveQubitOracle, &w)?;
        t.push_row(vec![k as f64, printed, oracle, oracle - printed]);
    }
    t.notes = DISCREPANCY_ROWS.iter().map(|p| format!("{p:?}")).collect();
    Ok(t)
}

pub const DISCREPANCY_ROWS: [BlockPair; 6] = [
    BlockPair::TopCut,
    BlockPair::P11P21,
    BlockPair::P12P21,
    BlockPair::P11P22,
    BlockPair::P12P22,
    BlockPair::QubitPair,
];
