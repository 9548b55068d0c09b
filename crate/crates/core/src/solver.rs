//! Mode-by-mode periodic solution `x̂(k) = Δ_k^{-1} f̂(k)` and its
//! time-domain verification.

use rayon::prelude::*;

use crate::certify::tail_mode;
use crate::error::{Error, Result};
use crate::fourier::{derivative_coeffs, grid_node};
use crate::model::{DelaySystem, FourierCoefficients};
use crate::scalar::{vnorm, CVector, Real};
use crate::symbol::assemble_delta;

#[derive(Debug, Clone)]
pub struct PeriodicSolution<T: Real> {
    pub coeffs: FourierCoefficients<T>,
    pub deriv_coeffs: FourierCoefficients<T>,
    pub truncation_k: usize,
    pub residual_sup: T,
    pub forcing_ref: String,
}

impl<T: Real> PeriodicSolution<T> {
    pub fn evaluate(&self, t: T) -> CVector<T> {
        self.coeffs.evaluate(t)
    }
}

/// Default truncation: `max(max_mode(f), tail_K)`.
pub fn default_truncation<T: Real>(sys: &DelaySystem<T>, f: &FourierCoefficients<T>) -> usize {
    f.max_mode().max(tail_mode(sys))
}

/// Default residual grid `4(2K + 1)`.
pub fn default_residual_grid(truncation: usize) -> usize {
    4 * (2 * truncation + 1)
}

/// Solves for the unique periodic solution of a band-limited forcing.
///
/// Fails with [`Error::SingularMode`] listing every forcing mode whose symbol
/// is singular.
pub fn solve<T: Real>(
    sys: &DelaySystem<T>,
    f: &FourierCoefficients<T>,
    truncation: usize,
) -> Result<PeriodicSolution<T>> {
    let (sol, obstructed) = solve_forced(sys, f, truncation)?;
    if obstructed.is_empty() {
        Ok(sol)
    } else {
        Err(Error::SingularMode(obstructed))
    }
}

/// Like [`solve`], but skips obstructed modes (leaving them zero) and returns
/// them alongside the partial solution.
pub fn solve_forced<T: Real>(
    sys: &DelaySystem<T>,
    f: &FourierCoefficients<T>,
    truncation: usize,
) -> Result<(PeriodicSolution<T>, Vec<i64>)> {
    check_dims(sys, f)?;
    if f.max_mode() > truncation {
        return Err(Error::TruncationTooSmall {
            max_mode: f.max_mode(),
            truncation,
        });
    }
    let forcing: Vec<(i64, CVector<T>)> = f.iter().map(|(k, v)| (k, v.clone())).collect();
    let solved: Vec<(i64, Option<CVector<T>>)> = forcing
        .par_iter()
        .map(|(k, v)| (*k, assemble_delta(sys, *k).apply_inverse(v).ok()))
        .collect();
    let mut coeffs = FourierCoefficients::zero(sys.dim());
    let mut obstructed = Vec::new();
    for (k, x) in solved {
        match x {
            Some(x) => coeffs.set(k, x),
            None => obstructed.push(k),
        }
    }
    let deriv_coeffs = derivative_coeffs(&coeffs);
    let residual_sup = equation_defect(sys, &coeffs, f, default_residual_grid(truncation));
    Ok((
        PeriodicSolution {
            coeffs,
            deriv_coeffs,
            truncation_k: truncation,
            residual_sup,
            forcing_ref: String::from("inline"),
        },
        obstructed,
    ))
}

fn check_dims<T: Real>(sys: &DelaySystem<T>, f: &FourierCoefficients<T>) -> Result<()> {
    if f.dim() != sys.dim() {
        return Err(Error::Invalid(vec![crate::error::Violation::DimensionMismatch {
            what: "forcing".into(),
            expected: sys.dim(),
            found: f.dim(),
        }]));
    }
    Ok(())
}

/// Sup over `t_m = 2πm/M` of `‖x′ − Ax − Σ_j B x(· − r_j) − f‖₂` for a
/// solution object; see [`equation_defect`].
pub fn residual<T: Real>(
    sys: &DelaySystem<T>,
    sol: &PeriodicSolution<T>,
    f: &FourierCoefficients<T>,
    grid: usize,
) -> Result<T> {
    if grid < 2 * sol.truncation_k + 1 {
        return Err(Error::WindowTooSmall {
            samples: grid,
            max_mode: sol.truncation_k,
        });
    }
    Ok(equation_defect(sys, &sol.coeffs, f, grid))
}

/// Time-domain defect of a candidate trigonometric polynomial `x`. Every
/// term, including the delayed arguments, is evaluated exactly from
/// coefficients.
pub fn equation_defect<T: Real>(
    sys: &DelaySystem<T>,
    x: &FourierCoefficients<T>,
    f: &FourierCoefficients<T>,
    grid: usize,
) -> T {
    let dx = derivative_coeffs(x);
    (0..grid.max(1))
        .into_par_iter()
        .map(|m| {
            let t: T = grid_node(m, grid.max(1));
            let delayed: Vec<CVector<T>> = sys.delays().iter().map(|&r| x.evaluate(t - r)).collect();
            let rhs = sys.apply_rhs(&x.evaluate(t), &delayed) + f.evaluate(t);
            vnorm(&(dx.evaluate(t) - rhs))
        })
        .reduce(T::zero, |a, b| a.max(b))
}

/// Null vector of a singular symbol, giving the homogeneous solution `e^{ikt} x`.
#[derive(Debug, Clone)]
pub struct HomogeneousMode<T: Real> {
    pub mode: i64,
    pub null_vector: CVector<T>,
    /// Time-domain defect of `u(t) = e^{ikt} x` with zero forcing.
    pub defect: T,
}

/// Returns `None` (no kernel) when `Δ_k` is invertible.
pub fn homogeneous_mode<T: Real>(sys: &DelaySystem<T>, k: i64) -> Option<HomogeneousMode<T>> {
    let entry = assemble_delta(sys, k);
    if entry.invertible {
        return None;
    }
    let svd = entry.delta.clone().svd(false, true);
    let v_t = svd.v_t?;
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))?;
    let x: CVector<T> = v_t.row(imin).transpose().map(|z| z.conj());
    let nrm = vnorm(&x);
    let x = x.map(|z| z.unscale(nrm));
    let u = FourierCoefficients::from_modes(sys.dim(), [(k, x.clone())]).ok()?;
    let zero = FourierCoefficients::zero(sys.dim());
    let defect = equation_defect(sys, &u, &zero, default_residual_grid(k.unsigned_abs() as usize));
    Some(HomogeneousMode {
        mode: k,
        null_vector: x,
        defect,
    })
}
