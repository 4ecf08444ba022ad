//! Concurrence: exact pure-state values, the printed closed forms for block
//! cuts of the uniform n-qubit W state, and a mixed-state oracle for
//! two-block reductions of GW states.
//!
//! Two pair-concurrence routes exist side by side and callers pick one with
//! [`PairConcurrenceSource`]. The closed forms reproduce the published PRE
//! tables; the oracle embeds the rank-2 reduced state into an effective
//! two-qubit space and applies the Wootters formula. For the uniform W state
//! they disagree (e.g. `C²(A_i A_j)` is `[√(4+(n−2)²) − (n−2)]²/n²` printed
//! but `4/n²` from the oracle), so the two are never mixed silently.
//!
//! The concurrence of assistance `C^a` only enters through the identity
//! `C(ρ_{P_s P_k}) = C^a(ρ_{P_s P_k})` for GW reductions and is not computed.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{gram_spectrum, validate_selection, DensityMatrix, Partition, PureState, C64};

/// Eigenvalue cut-off when deciding the rank of a reduced state.
pub const RANK_TOL: f64 = 1e-10;
/// Allowed weight outside the effective two-qubit support.
pub const SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairConcurrenceSource {
    PrintedClosedForm,
    EffectiveQubitOracle,
}

impl PairConcurrenceSource {
    pub fn label(self) -> &'static str {
        match self {
            PairConcurrenceSource::PrintedClosedForm => "printed",
            PairConcurrenceSource::EffectiveQubitOracle => "oracle",
        }
    }
}

/// Two-level cut of an n-qubit register:
/// `P11 = {1..a}`, `P12 = {a+1..m}`, `P21 = {m+1..b}`, `P22 = {b+1..n}`
/// (1-based, as in the PRE tables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCut {
    pub n: usize,
    pub m: usize,
    pub a: usize,
    pub b: usize,
}

impl BlockCut {
    pub fn new(n: usize, m: usize, a: usize, b: usize) -> Result<Self> {
        if !(1 <= a && a <= m && m < b && b <= n) {
            return Err(Error::InvalidSubsystems(format!(
                "block cut needs 1 <= a <= m < b <= n, got n={n} m={m} a={a} b={b}"
            )));
        }
        Ok(BlockCut { n, m, a, b })
    }

    /// Only the first-level cut matters (for Υ′); `a = m`, `b = n`.
    pub fn top(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, m, n)
    }

    /// 0-based site lists of `P11, P12, P21, P22`. `P12`/`P22` may be empty.
    pub fn blocks(&self) -> [Vec<usize>; 4] {
        [
            (0..self.a).collect(),
            (self.a..self.m).collect(),
            (self.m..self.b).collect(),
            (self.b..self.n).collect(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockPair {
    P11P21,
    P12P21,
    P11P22,
    P12P22,
    TopCut,
    QubitPair,
}

impl BlockPair {
    pub const PAIRS: [BlockPair; 4] = [
        BlockPair::P11P21,
        BlockPair::P12P21,
        BlockPair::P11P22,
        BlockPair::P12P22,
    ];
}

/// `√(2(1 − tr ρ_A²))` for the bipartition `side_a | rest`.
pub fn concurrence_pure(psi: &PureState, side_a: &[usize]) -> Result<f64> {
    let n = psi.num_subsystems();
    validate_selection(side_a, n)?;
    if side_a.len() == n {
        return Err(Error::InvalidSubsystems(
            "side A must be a proper subset".into(),
        ));
    }
    // Complementary reductions share their spectrum; trace out the larger side.
    let complement: Vec<usize> = (0..n).filter(|i| !side_a.contains(i)).collect();
    let dim = |s: &[usize]| s.iter().map(|&i| psi.dims()[i]).product::<usize>();
    let small = if dim(side_a) <= dim(&complement) {
        side_a
    } else {
        &complement
    };
    let purity = psi.reduce(small)?.purity();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Wootters concurrence of a two-qubit state.
///
/// The λ's are the singular values of `τ_jk = v_jᵀ (σ_y⊗σ_y) v_k` built from
/// the subnormalized eigenvectors `v_k = √p_k e_k` of ρ. They coincide with
/// the square roots of the eigenvalues of `ρ ρ̃` but avoid taking square
/// roots of round-off-level eigenvalues.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "Wootters concurrence needs a 2x2 system, got dims {:?}",
            rho.dims()
        )));
    }
    let (values, vectors) = rho.eigen();
    let support: Vec<DVector<C64>> = values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-15)
        .map(|(k, &p)| vectors.column(k).scale(p.sqrt()))
        .collect();
    if support.is_empty() {
        return Ok(0.0);
    }
    let flip = spin_flip();
    let r = support.len();
    let tau = DMatrix::from_fn(r, r, |j, k| (support[j].transpose() * &flip * &support[k])[(0, 0)]);
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1..].iter().sum::<f64>();
    Ok(c.max(0.0))
}

fn spin_flip() -> DMatrix<C64> {
    let m = Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0,
    );
    DMatrix::from_fn(4, 4, |r, c| C64::new(m[(r, c)], 0.0))
}

/// Mixed-state concurrence `C(ρ_{PQ})` of the reduction of a GW (or GWV)
/// state to blocks `P` and `Q`.
///
/// Each block's local support is `span{|0…0⟩, |x⟩}` with `|x⟩` the block's
/// normalized excitation pattern, read off the block's amplitude matrix
/// (whose Gram matrix is the block's reduced state). The two-block reduction
/// is compressed onto the product of those supports and the Wootters formula
/// applied. Any weight left outside the 4-dimensional effective space, or a
/// rank above 2, means the input is not a GW reduction.
pub fn gw_block_concurrence_oracle(
    psi: &PureState,
    block_p: &[usize],
    block_q: &[usize],
) -> Result<f64> {
    let n = psi.num_subsystems();
    let joint: Vec<usize> = block_p.iter().chain(block_q).copied().collect();
    validate_selection(block_p, n)?;
    validate_selection(block_q, n)?;
    validate_selection(&joint, n)?;

    // ρ_{PQ} = M M†; work with M to avoid forming ρ on large blocks.
    let m = psi.amplitude_matrix(&joint)?;
    let rank = gram_spectrum(&m).iter().filter(|&&x| x > RANK_TOL).count();
    if rank > 2 {
        return Err(Error::RankTooLarge { rank });
    }

    let iso_p = block_support(psi, block_p)?;
    let iso_q = block_support(psi, block_q)?;
    let w = iso_p.kronecker(&iso_q).adjoint() * &m;
    let compressed = &w * w.adjoint();
    let leakage = 1.0 - compressed.trace().re;
    if leakage.abs() > SUPPORT_TOL {
        return Err(Error::EffectiveSupport { leakage });
    }
    let eff = DensityMatrix::new(vec![2, 2], compressed)?;
    wootters_concurrence(&eff)
}

/// `dim(block) × 2` isometry with columns `|0…0⟩` and the block's excitation.
fn block_support(psi: &PureState, block: &[usize]) -> Result<DMatrix<C64>> {
    let mut m = psi.amplitude_matrix(block)?;
    let dim = m.nrows();
    m.row_mut(0).fill(C64::new(0.0, 0.0));
    // For GW/GWV inputs the vacuum-projected amplitude matrix is rank one.
    let (best, norm) = (0..m.ncols())
        .map(|c| (c, m.column(c).norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one column");
    let mut iso = DMatrix::<C64>::zeros(dim, 2);
    iso[(0, 0)] = C64::new(1.0, 0.0);
    if norm > 1e-14 {
        let col = m.column(best).unscale(norm);
        iso.column_mut(1).copy_from(&col);
    } else {
        // No excitation on this block: any direction orthogonal to vacuum.
        iso[(1, 1)] = C64::new(1.0, 0.0);
    }
    Ok(iso)
}

/// Concurrence across `side_a | side_b` of the state reduced to their union.
/// Uses the exact pure-state formula when the union is the whole register and
/// the GW oracle otherwise.
pub fn bipartite_concurrence(psi: &PureState, side_a: &[usize], side_b: &[usize]) -> Result<f64> {
    if side_a.len() + side_b.len() == psi.num_subsystems() {
        let joint: Vec<usize> = side_a.iter().chain(side_b).copied().collect();
        validate_selection(&joint, psi.num_subsystems())?;
        concurrence_pure(psi, side_a)
    } else {
        gw_block_concurrence_oracle(psi, side_a, side_b)
    }
}

/// Printed closed forms for squared block concurrences of the uniform
/// n-qubit W state.
pub fn printed_pair_concurrence_sq(cut: &BlockCut, pair: BlockPair) -> f64 {
    let n = cut.n as f64;
    let m = cut.m as f64;
    let a = cut.a as f64;
    let b = cut.b as f64;
    let nm = n - m;
    let bracket = |k: f64| ((nm * nm + 4.0 * k).sqrt() - nm).powi(2) / (n * n);
    match pair {
        BlockPair::TopCut => 4.0 * m * (n - m) / (n * n),
        BlockPair::P11P21 => bracket(a * (b - m)),
        BlockPair::P12P21 => bracket((m - a) * (b - m)),
        BlockPair::P11P22 => bracket(a * (n - b)),
        BlockPair::P12P22 => bracket((m - a) * (n - b)),
        BlockPair::QubitPair => ((4.0 + (n - 2.0).powi(2)).sqrt() - (n - 2.0)).powi(2) / (n * n),
    }
}

/// Squared block concurrence from either source. The oracle path builds the
/// uniform W state and evaluates the corresponding blocks (`QubitPair` uses
/// sites 0 and m). Empty blocks give 0.
pub fn pair_concurrence_sq(
    cut: &BlockCut,
    pair: BlockPair,
    source: PairConcurrenceSource,
    uniform_w: &PureState,
) -> Result<f64> {
    if source == PairConcurrenceSource::PrintedClosedForm {
        return Ok(printed_pair_concurrence_sq(cut, pair));
    }
    let [p11, p12, p21, p22] = cut.blocks();
    let (p, q): (Vec<usize>, Vec<usize>) = match pair {
        BlockPair::TopCut => ((0..cut.m).collect(), (cut.m..cut.n).collect()),
        BlockPair::P11P21 => (p11, p21),
        BlockPair::P12P21 => (p12, p21),
        BlockPair::P11P22 => (p11, p22),
        BlockPair::P12P22 => (p12, p22),
        BlockPair::QubitPair => (vec![0], vec![cut.m]),
    };
    if p.is_empty() || q.is_empty() {
        return Ok(0.0);
    }
    Ok(bipartite_concurrence(uniform_w, &p, &q)?.powi(2))
}

/// `C²(P_s | rest) − Σ_{k≠s} C²(P_s P_k)`, which vanishes for GW states.
pub fn lemma4_residual(psi: &PureState, partition: &Partition, s_index: usize) -> Result<f64> {
    let blocks = partition.blocks();
    if s_index >= blocks.len() {
        return Err(Error::InvalidSubsystems(format!(
            "block index {s_index} out of range for {} blocks",
            blocks.len()
        )));
    }
    let focus = &blocks[s_index];
    let rest = partition.rest_of(s_index);
    let whole = bipartite_concurrence(psi, focus, &rest)?.powi(2);
    let mut pairs = 0.0;
    for (k, block) in blocks.iter().enumerate() {
        if k != s_index {
            pairs += gw_block_concurrence_oracle(psi, focus, block)?.powi(2);
        }
    }
    Ok(whole - pairs)
}
