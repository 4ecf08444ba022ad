//! Generalized W-class (GW) states, their superposition with the vacuum (GWV),
//! dense state vectors and partial traces.
//!
//! Sites are numbered from 0. Site 0 is the most significant digit of a basis
//! label, so for four qubits `|1000⟩` is the excitation on site 0. A GW
//! coefficient `a[s][i]` multiplies `|0…0 i 0…0⟩` with level `i ∈ 1..d` on
//! site `s`; the n-qubit W-class family is the `d = 2` slice.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Squared-norm deviation that is silently renormalized.
pub const NORM_SLACK: f64 = 1e-9;
/// Default cap on the number of dense amplitudes.
pub const DEFAULT_AMPLITUDE_CAP: usize = 1 << 24;

const PURE_NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// n-qudit generalized W-class state. Coefficients are stored site-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GwState {
    n: usize,
    d: usize,
    coeffs: Vec<C64>,
}

impl GwState {
    /// Builds a GW state, silently renormalizing when the squared norm is
    /// within [`NORM_SLACK`] of one and failing otherwise.
    pub fn new(n: usize, d: usize, coeffs: Vec<C64>) -> Result<Self> {
        Self::build(n, d, coeffs, false)
    }

    /// Like [`GwState::new`] but rescales any non-zero coefficient table.
    pub fn normalized(n: usize, d: usize, coeffs: Vec<C64>) -> Result<Self> {
        Self::build(n, d, coeffs, true)
    }

    fn build(n: usize, d: usize, mut coeffs: Vec<C64>, renormalize: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch(format!("n = {n}, need n >= 2")));
        }
        if d < 2 {
            return Err(Error::DimensionMismatch(format!("d = {d}, need d >= 2")));
        }
        if coeffs.len() != n * (d - 1) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients for n = {n}, d = {d}, got {}",
                n * (d - 1),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite coefficient".into()));
        }
        let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !renormalize && (norm_sq - 1.0).abs() > NORM_SLACK {
            return Err(Error::NormDeviation {
                norm_sq,
                tolerance: NORM_SLACK,
            });
        }
        let scale = norm_sq.sqrt().recip();
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Ok(GwState { n, d, coeffs })
    }

    /// n-qubit W-class state from one amplitude per site.
    pub fn qubits(amplitudes: &[C64]) -> Result<Self> {
        Self::new(amplitudes.len(), 2, amplitudes.to_vec())
    }

    /// The uniform n-qubit W state.
    pub fn uniform_w(n: usize) -> Result<Self> {
        let a = C64::new((n as f64).sqrt().recip(), 0.0);
        Self::new(n, 2, vec![a; n])
    }

    /// The 4-qubit state `0.3|0001⟩ + 0.4|0010⟩ + 0.5|0100⟩ + √0.5|1000⟩`.
    pub fn example1() -> Self {
        let amps = [0.5f64.sqrt(), 0.5, 0.4, 0.3].map(|x| C64::new(x, 0.0));
        Self::qubits(&amps).expect("example state is normalized")
    }

    /// Coefficients drawn from a complex Gaussian, then normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        let coeffs = (0..n * d.saturating_sub(1))
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(n, d, coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient `a[site][level]`, `level ∈ 1..d`.
    pub fn coeff(&self, site: usize, level: usize) -> C64 {
        assert!(site < self.n && (1..self.d).contains(&level));
        self.coeffs[site * (self.d - 1) + level - 1]
    }

    /// Total excitation weight `Σ_i |a[site][i]|²` on one site.
    pub fn site_weight(&self, site: usize) -> f64 {
        (1..self.d).map(|i| self.coeff(site, i).norm_sqr()).sum()
    }

    pub fn state_vector(&self) -> Result<PureState> {
        self.state_vector_capped(DEFAULT_AMPLITUDE_CAP)
    }

    pub fn state_vector_capped(&self, cap: usize) -> Result<PureState> {
        GwvState {
            gw: self.clone(),
            vacuum_weight: 1.0,
        }
        .state_vector_capped(cap)
    }
}

/// `√p |GW⟩ + √(1−p) |0…0⟩`. `vacuum_weight` is the weight `p` on the GW part.
#[derive(Debug, Clone, PartialEq)]
pub struct GwvState {
    gw: GwState,
    vacuum_weight: f64,
}

impl GwvState {
    pub fn new(gw: GwState, vacuum_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&vacuum_weight) {
            return Err(Error::OutOfRange {
                what: "vacuum_weight",
                value: vacuum_weight,
                range: "[0, 1]",
            });
        }
        Ok(GwvState { gw, vacuum_weight })
    }

    pub fn gw(&self) -> &GwState {
        &self.gw
    }

    pub fn vacuum_weight(&self) -> f64 {
        self.vacuum_weight
    }

    pub fn state_vector(&self) -> Result<PureState> {
        self.state_vector_capped(DEFAULT_AMPLITUDE_CAP)
    }

    pub fn state_vector_capped(&self, cap: usize) -> Result<PureState> {
        let GwState { n, d, .. } = self.gw;
        let total = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::SizeCap {
                amplitudes: total,
                cap,
            });
        }
        let total = total as usize;
        let mut amps = DVector::<C64>::zeros(total);
        let gw_scale = self.vacuum_weight.sqrt();
        amps[0] = C64::new((1.0 - self.vacuum_weight).sqrt(), 0.0);
        for site in 0..n {
            let stride = d.pow((n - 1 - site) as u32);
            for level in 1..d {
                amps[level * stride] += self.gw.coeff(site, level) * gw_scale;
            }
        }
        PureState::new(vec![d; n], amps)
    }
}

/// Dense pure state over a list of local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: DVector<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {total}",
                amps.len()
            )));
        }
        let norm_sq = amps.norm_squared();
        if (norm_sq - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NormDeviation {
                norm_sq,
                tolerance: PURE_NORM_TOL,
            });
        }
        Ok(PureState { dims, amps })
    }

    /// Normalizes `amps` before validation.
    pub fn normalized(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(dims, amps.unscale(norm))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Amplitude of the basis label `digits` (one level per subsystem).
    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        assert_eq!(digits.len(), self.dims.len());
        let idx = digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &dim)| acc * dim + x);
        self.amps[idx]
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amps * self.amps.adjoint();
        DensityMatrix::from_parts(self.dims.clone(), m)
    }

    /// Partial trace keeping `keep`, ordered by sorted subsystem index.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        self.reduce_ordered(&sorted)
    }

    /// Partial trace keeping `keep` in exactly the given order, so the
    /// reduced tensor factors follow `keep[0] ⊗ keep[1] ⊗ …`.
    pub fn reduce_ordered(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = self.amplitude_matrix(keep)?;
        let rho = &m * m.adjoint();
        let dims = keep.iter().map(|&i| self.dims[i]).collect();
        Ok(DensityMatrix::from_parts(dims, rho))
    }

    /// The amplitudes reshaped to `dim(keep) × dim(rest)`, rows ordered as
    /// `keep[0] ⊗ keep[1] ⊗ …`. The reduced state on `keep` is `M M†`.
    pub fn amplitude_matrix(&self, keep: &[usize]) -> Result<DMatrix<C64>> {
        let n = self.dims.len();
        validate_selection(keep, n)?;
        let rest: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        let dk: usize = keep.iter().map(|&i| self.dims[i]).product();
        let dr: usize = rest.iter().map(|&i| self.dims[i]).product();

        // Row-major strides of the full register.
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let kept_offsets = offsets(keep, &self.dims, &strides);
        let rest_offsets = offsets(&rest, &self.dims, &strides);
        Ok(DMatrix::from_fn(dk, dr, |r, c| self.amps[kept_offsets[r] + rest_offsets[c]]))
    }

    /// Squared Schmidt coefficients across `keep | rest`, descending. Only
    /// the smaller side's Gram matrix is diagonalized.
    pub fn schmidt_spectrum(&self, keep: &[usize]) -> Result<Vec<f64>> {
        Ok(gram_spectrum(&self.amplitude_matrix(keep)?))
    }
}

/// Eigenvalues (descending) of `M M†` or `M† M`, whichever is smaller.
pub(crate) fn gram_spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let mut ev: Vec<f64> = SymmetricEigen::new(g).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Full-register offsets of every basis label over `sites`, with `sites[0]`
/// as the most significant digit.
fn offsets(sites: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in sites {
        out = out
            .iter()
            .flat_map(|&base| (0..dims[s]).map(move |x| base + x * strides[s]))
            .collect();
    }
    out
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::DimensionMismatch(format!(
            "local dimensions {dims:?} must be non-empty and >= 2"
        )));
    }
    Ok(())
}

pub(crate) fn validate_selection(sites: &[usize], n: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::InvalidSubsystems("empty subsystem set".into()));
    }
    for (k, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::InvalidSubsystems(format!(
                "index {s} out of range for {n} subsystems"
            )));
        }
        if sites[..k].contains(&s) {
            return Err(Error::InvalidSubsystems(format!("index {s} repeated")));
        }
    }
    Ok(())
}

/// Hermitian, unit-trace, positive semidefinite matrix over `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants.
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for total dimension {total}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let asym = (&mat - mat.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max deviation {asym:e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let rho = DensityMatrix { dims, mat };
        let min = rho.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    /// Trusted constructor for matrices produced by partial traces.
    pub(crate) fn from_parts(dims: Vec<usize>, mat: DMatrix<C64>) -> Self {
        DensityMatrix { dims, mat }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        let v = C64::new((total as f64).recip(), 0.0);
        Self::new(dims, DMatrix::from_diagonal_element(total, total, v))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `tr ρ²`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Hermitian eigendecomposition with eigenvalues sorted descending.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let herm = (&self.mat + self.mat.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(herm);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        (values, vectors)
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }
}

/// Ordered list of disjoint, non-empty blocks of site indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates blocks against `n` sites. The union may be a proper subset.
    pub fn new(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidSubsystems(
                "a partition needs at least two blocks".into(),
            ));
        }
        let flat: Vec<usize> = blocks.iter().flatten().copied().collect();
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::InvalidSubsystems("empty block".into()));
        }
        validate_selection(&flat, n)?;
        Ok(Partition { blocks })
    }

    /// Every site in its own block.
    pub fn singletons(sites: &[usize], n: usize) -> Result<Self> {
        Self::new(sites.iter().map(|&s| vec![s]).collect(), n)
    }

    /// `k` non-empty blocks over a random subset of at least `k` of the `n`
    /// sites. Block order and contents are random.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::InvalidSubsystems(format!("cannot split {n} sites into {k} blocks")));
        }
        let size = rng.gen_range(k..=n);
        let mut sites: Vec<usize> = (0..n).collect();
        sites.shuffle(rng);
        sites.truncate(size);
        let mut blocks: Vec<Vec<usize>> = sites[..k].iter().map(|&x| vec![x]).collect();
        for &x in &sites[k..] {
            let j = rng.gen_range(0..k);
            blocks[j].push(x);
        }
        Self::new(blocks, n)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sites(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    pub fn covers(&self, n: usize) -> bool {
        self.sites().len() == n
    }

    /// Union of every block except `focus`.
    pub fn rest_of(&self, focus: usize) -> Vec<usize> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != focus)
            .flat_map(|(_, b)| b.iter().copied())
            .collect()
    }
}

/// On-disk state description: `{n, d, coeffs: [[re, im], …], vacuum_weight?}`.
/// Coefficients are listed site-major, levels `1..d` within a site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub d: usize,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuum_weight: Option<f64>,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn gw_state(&self) -> Result<GwState> {
        let coeffs = self.coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect();
        GwState::new(self.n, self.d, coeffs)
    }

    pub fn gwv_state(&self) -> Result<GwvState> {
        GwvState::new(self.gw_state()?, self.vacuum_weight.unwrap_or(1.0))
    }

    pub fn from_gw(gw: &GwState) -> Self {
        StateFile {
            n: gw.n(),
            d: gw.d(),
            coeffs: gw.coeffs().iter().map(|c| [c.re, c.im]).collect(),
            vacuum_weight: None,
        }
    }
}
