//! Numerical convex roof of the unified-(q,s) entanglement for rank-2 states.
//!
//! A size-K decomposition of `ρ = Σ_k |w_k⟩⟨w_k|` (`w_k = √λ_k e_k`) is
//! `|φ_i⟩ = Σ_k U_ik |w_k⟩` for a K×2 isometry `U`. The isometry is obtained
//! by Gram–Schmidt on a free complex K×2 matrix whose 4K real entries are
//! searched by a Hooke–Jeeves pattern search (coordinate moves with step
//! halving plus pattern moves). Each pure term is scored
//! by the unified entropy of its reduced state, so the minimizer never sees
//! `f_{q,s}` or any concurrence formula.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{spectrum_entropy, UeParams};
use crate::error::{Error, Result};
use crate::states::{validate_selection, DensityMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofOptions {
    /// Largest decomposition size tried; every size from 2 up is searched.
    pub decomposition_size: usize,
    pub restarts: usize,
    pub step_tol: f64,
    pub max_sweeps: usize,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions {
            decomposition_size: 4,
            restarts: 20,
            step_tol: 1e-10,
            max_sweeps: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofResult {
    pub value: f64,
    /// Decomposition size that attained `value`.
    pub best_size: usize,
    pub converged_restarts: usize,
    pub total_restarts: usize,
}

/// Minimizes `Σ_i p_i U_{q,s}(φ_i)` over pure-state decompositions of `rho`
/// across the cut `side_a | rest` (positions within `rho.dims()`).
pub fn convex_roof_ue_rank2<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    side_a: &[usize],
    params: &UeParams,
    options: &RoofOptions,
    rng: &mut R,
) -> Result<RoofResult> {
    let n = rho.dims().len();
    validate_selection(side_a, n)?;
    if side_a.len() == n {
        return Err(Error::InvalidSubsystems(
            "side A must be a proper subset".into(),
        ));
    }
    let (values, vectors) = rho.eigen();
    let rank = values.iter().filter(|&&x| x > 1e-10).count();
    if rank > 2 {
        return Err(Error::RankTooLarge { rank });
    }
    let cut = Bipartition::new(rho.dims(), side_a);

    if rank <= 1 {
        let phi = vectors.column(0).into_owned();
        return Ok(RoofResult {
            value: cut.pure_entropy(&phi, params),
            best_size: 1,
            converged_restarts: 0,
            total_restarts: 0,
        });
    }

    let weights = [
        vectors.column(0).scale(values[0].max(0.0).sqrt()),
        vectors.column(1).scale(values[1].max(0.0).sqrt()),
    ];
    let objective = |x: &[f64], k: usize| -> f64 {
        let Some(iso) = isometry(x, k) else {
            return f64::INFINITY;
        };
        (0..k)
            .map(|i| {
                let phi = &weights[0] * iso[(i, 0)] + &weights[1] * iso[(i, 1)];
                let p = phi.norm_squared();
                if p < 1e-300 {
                    0.0
                } else {
                    p * cut.pure_entropy(&phi.unscale(p.sqrt()), params)
                }
            })
            .sum()
    };

    let mut best = RoofResult {
        value: f64::INFINITY,
        best_size: 0,
        converged_restarts: 0,
        total_restarts: 0,
    };
    for k in 2..=options.decomposition_size.max(2) {
        for _ in 0..options.restarts {
            let start: Vec<f64> = (0..4 * k).map(|_| rng.sample(StandardNormal)).collect();
            let (value, converged) = pattern_search(&|x| objective(x, k), start, options);
            best.total_restarts += 1;
            if converged {
                best.converged_restarts += 1;
            }
            if value < best.value {
                best.value = value;
                best.best_size = k;
            }
        }
    }
    if best.converged_restarts == 0 {
        return Err(Error::NonConvergence {
            sweeps: options.max_sweeps,
            restarts: best.total_restarts,
        });
    }
    Ok(best)
}

const MIN_GAIN: f64 = 1e-15;

/// Hooke–Jeeves pattern search: coordinate exploration with step halving,
/// plus pattern moves along the last successful displacement. Returns the
/// best value and whether the step shrank below tolerance.
fn pattern_search(
    f: &dyn Fn(&[f64]) -> f64,
    mut base: Vec<f64>,
    options: &RoofOptions,
) -> (f64, bool) {
    let mut f_base = f(&base);
    let mut step = 0.5;
    for _ in 0..options.max_sweeps {
        let (mut x, mut fx) = explore(f, base.clone(), f_base, step);
        if fx < f_base - MIN_GAIN {
            loop {
                let pattern: Vec<f64> = x.iter().zip(&base).map(|(a, b)| 2.0 * a - b).collect();
                base = x;
                f_base = fx;
                let f_pattern = f(&pattern);
                let (y, fy) = explore(f, pattern, f_pattern, step);
                if fy < f_base - MIN_GAIN {
                    x = y;
                    fx = fy;
                } else {
                    break;
                }
            }
        } else {
            step *= 0.5;
            if step < options.step_tol {
                return (f_base, true);
            }
        }
    }
    (f_base, false)
}

/// One sweep of ±step trial moves per coordinate, keeping improvements.
fn explore(f: &dyn Fn(&[f64]) -> f64, mut x: Vec<f64>, mut fx: f64, step: f64) -> (Vec<f64>, f64) {
    for j in 0..x.len() {
        let old = x[j];
        for dir in [1.0, -1.0] {
            x[j] = old + dir * step;
            let trial = f(&x);
            if trial < fx - MIN_GAIN {
                fx = trial;
                break;
            }
            x[j] = old;
        }
    }
    (x, fx)
}

/// K×2 matrix with orthonormal columns from 4K reals; `None` if degenerate.
fn isometry(x: &[f64], k: usize) -> Option<DMatrix<C64>> {
    let mut m = DMatrix::from_fn(k, 2, |r, c| {
        let base = 2 * (c * k + r);
        C64::new(x[base], x[base + 1])
    });
    let n0 = m.column(0).norm();
    if n0 < 1e-12 {
        return None;
    }
    m.column_mut(0).unscale_mut(n0);
    let overlap = m.column(0).dotc(&m.column(1));
    let proj = m.column(0) * overlap;
    let mut c1 = m.column(1).into_owned() - proj;
    let n1 = c1.norm();
    if n1 < 1e-12 {
        return None;
    }
    c1.unscale_mut(n1);
    m.column_mut(1).copy_from(&c1);
    Some(m)
}

/// Index bookkeeping for reshaping a vector over `dims` into a
/// `dim(A) × dim(B)` matrix.
struct Bipartition {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Bipartition {
    fn new(dims: &[usize], side_a: &[usize]) -> Self {
        let n = dims.len();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let rest: Vec<usize> = (0..n).filter(|i| !side_a.contains(i)).collect();
        let strides = &strides;
        let expand = |sites: &[usize]| {
            let mut out = vec![0usize];
            for &s in sites {
                out = out
                    .iter()
                    .flat_map(|&b| (0..dims[s]).map(move |x| b + x * strides[s]))
                    .collect();
            }
            out
        };
        let mut rows = expand(side_a);
        let mut cols = expand(&rest);
        if rows.len() > cols.len() {
            std::mem::swap(&mut rows, &mut cols);
        }
        Bipartition { rows, cols }
    }

    /// Unified entropy of the smaller-side reduced state of a unit vector.
    fn pure_entropy(&self, phi: &DVector<C64>, params: &UeParams) -> f64 {
        let m = DMatrix::from_fn(self.rows.len(), self.cols.len(), |r, c| {
            phi[self.rows[r] + self.cols[c]]
        });
        let gram = &m * m.adjoint();
        let spectrum: Vec<f64> = if gram.nrows() == 2 {
            let a = gram[(0, 0)].re;
            let d = gram[(1, 1)].re;
            let off = gram[(0, 1)].norm_sqr();
            let disc = ((a - d).powi(2) / 4.0 + off).sqrt();
            let mid = (a + d) / 2.0;
            vec![mid + disc, mid - disc]
        } else {
            SymmetricEigen::new(gram).eigenvalues.iter().copied().collect()
        };
        spectrum_entropy(&spectrum, params)
    }
}
