//! Semigroup (mild-solution) view of the periodic problem: `T(t) = e^{tA}`,
//! the variation-of-constants formula, its integrated form, and the modal
//! identity satisfied by every mild solution.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{analyze, SampledSignal};
use crate::model::{DelaySystem, FourierCoefficients};
use crate::quad::{cumulative_simpson, simpson, simpson_weight};
use crate::scalar::{from_int, vnorm, CMatrix, CVector, Real, C};
use crate::solver::PeriodicSolution;
use crate::symbol::assemble_delta;

/// `e^{tA}` by scaling and squaring of a truncated Taylor series.
///
/// The series for `tA / 2^s` (Frobenius norm at most 1/2) is summed until the
/// next term drops below `tol / 2^s` relative to the partial sum, so the
/// squared result satisfies `‖T(t) − e^{tA}‖₂ ≲ tol · e^{t‖A‖}`.
pub fn semigroup<T: Real>(a: &CMatrix<T>, t: T, tol: T) -> CMatrix<T> {
    let d = a.nrows();
    let x = a * C::new(t, T::zero());
    let norm = x.norm();
    let mut squarings = 0u32;
    let mut scale = T::one();
    let half = T::lit(0.5);
    while norm * scale > half {
        scale *= half;
        squarings += 1;
    }
    let x = x * C::new(scale, T::zero());
    let floor = T::default_epsilon();
    let tol = (tol * scale).max(floor);
    let mut sum = CMatrix::identity(d, d);
    let mut term = CMatrix::identity(d, d);
    for j in 1..64 {
        term = &term * &x * C::new(T::one() / from_int::<T>(j), T::zero());
        sum += &term;
        if term.norm() <= tol * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `T(jh)` for `j = 0..=n`, built once and read-only afterwards.
#[derive(Debug, Clone)]
pub struct SemigroupTable<T: Real> {
    step: T,
    mats: Vec<CMatrix<T>>,
}

impl<T: Real> SemigroupTable<T> {
    pub fn new(a: &CMatrix<T>, step: T, n: usize) -> Self {
        let tol = T::default_epsilon();
        let mats = (0..=n)
            .into_par_iter()
            .map(|j| semigroup(a, step * from_int::<T>(j as i64), tol))
            .collect();
        Self { step, mats }
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn at(&self, j: usize) -> &CMatrix<T> {
        &self.mats[j]
    }
}

/// Residuals of the mild-solution relations for a periodic candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct MildCheck<T: Real> {
    /// `φ = x(0)`.
    pub phi: CVector<T>,
    /// `‖φ − T(2π)φ − ∫_0^{2π} T(2π−s) g(s) ds‖₂` with `g = Σ_j B x(·−r_j) + f`.
    pub fixed_point_residual: T,
    /// Sup over the grid of `‖x(t) − T(t)φ − ∫_0^t T(t−s) g(s) ds‖₂`.
    pub formula_residual_sup: T,
    /// Sup over the grid of `‖x(t) − φ − A∫_0^t x − ∫_0^t g‖₂`.
    pub integrated_residual_sup: T,
}

impl<T: Real> MildCheck<T> {
    pub fn max_residual(&self) -> T {
        self.fixed_point_residual
            .max(self.formula_residual_sup)
            .max(self.integrated_residual_sup)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MildOptions {
    /// Output grid size `M`; residuals are taken at `2πm/M`, `m = 0..=M`.
    pub grid: usize,
    /// Simpson panels `N` on `[0, 2π]`; must be a multiple of `4M`.
    pub panels: usize,
    /// Tolerance used by the halving-panel resolution check.
    pub tol: f64,
}

impl Default for MildOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            panels: 2048,
            tol: 1e-6,
        }
    }
}

/// Checks a spectral solution against the mild formulation, with `φ = x(0)`.
pub fn mild_check<T: Real>(
    sys: &DelaySystem<T>,
    sol: &PeriodicSolution<T>,
    f: &FourierCoefficients<T>,
    opts: MildOptions,
) -> Result<MildCheck<T>> {
    mild_check_coeffs(sys, &sol.coeffs, f, opts)
}

/// [`mild_check`] for an arbitrary trigonometric polynomial candidate.
pub fn mild_check_coeffs<T: Real>(
    sys: &DelaySystem<T>,
    x: &FourierCoefficients<T>,
    f: &FourierCoefficients<T>,
    opts: MildOptions,
) -> Result<MildCheck<T>> {
    let MildOptions { grid, panels, tol } = opts;
    if grid == 0 || panels == 0 || panels % (4 * grid) != 0 {
        return Err(Error::InvalidArgument(format!(
            "panel count {panels} must be a positive multiple of 4 x grid ({grid})"
        )));
    }
    let fine = mild_residuals(sys, x, f, grid, panels);
    let coarse = mild_residuals(sys, x, f, grid, panels / 2);
    let disagreement = [
        (fine.fixed_point_residual - coarse.fixed_point_residual).abs(),
        (fine.formula_residual_sup - coarse.formula_residual_sup).abs(),
        (fine.integrated_residual_sup - coarse.integrated_residual_sup).abs(),
    ]
    .into_iter()
    .fold(T::zero(), |m, v| m.max(v))
    .as_f64();
    if disagreement > 10.0 * tol {
        return Err(Error::QuadratureUnderresolved { disagreement });
    }
    Ok(fine)
}

fn mild_residuals<T: Real>(
    sys: &DelaySystem<T>,
    x: &FourierCoefficients<T>,
    f: &FourierCoefficients<T>,
    grid: usize,
    panels: usize,
) -> MildCheck<T> {
    let d = sys.dim();
    let h = T::two_pi() / from_int::<T>(panels as i64);
    let table = SemigroupTable::new(sys.a(), h, panels);
    let nodes: Vec<T> = (0..=panels).map(|i| h * from_int::<T>(i as i64)).collect();
    let xs: Vec<CVector<T>> = nodes.par_iter().map(|&s| x.evaluate(s)).collect();
    let gs: Vec<CVector<T>> = nodes
        .par_iter()
        .map(|&s| {
            let delayed: Vec<CVector<T>> = sys.delays().iter().map(|&r| x.evaluate(s - r)).collect();
            let mut g = f.evaluate(s);
            for xd in &delayed {
                g += sys.b() * xd;
            }
            g
        })
        .collect();
    let phi = xs[0].clone();
    let stride = panels / grid;

    // Convolution ∫_0^{t_n} T(t_n − s) g(s) ds by Simpson on nodes 0..=n (n even).
    let conv = |n: usize| -> CVector<T> {
        let mut acc = CVector::zeros(d);
        if n == 0 {
            return acc;
        }
        for i in 0..=n {
            let w = simpson_weight(i, n, h);
            acc += table.at(n - i) * &gs[i] * C::new(w, T::zero());
        }
        acc
    };

    let formula: Vec<(usize, CVector<T>)> = (0..=grid)
        .into_par_iter()
        .map(|m| (m, conv(m * stride)))
        .collect();
    let mut formula_residual_sup = T::zero();
    let mut fixed_point_residual = T::zero();
    for (m, integral) in &formula {
        let n = m * stride;
        let free = table.at(n) * &phi;
        let r = vnorm(&(&xs[n] - &free - integral));
        formula_residual_sup = formula_residual_sup.max(r);
        if n == panels {
            fixed_point_residual = vnorm(&(&phi - free - integral));
        }
    }

    let int_x = cumulative_simpson(&xs, h, CVector::zeros(d));
    let int_g = cumulative_simpson(&gs, h, CVector::zeros(d));
    let integrated_residual_sup = (0..=grid)
        .map(|m| {
            let n = m * stride;
            vnorm(&(&xs[n] - &phi - sys.a() * &int_x[n] - &int_g[n]))
        })
        .fold(T::zero(), |a, b| a.max(b));

    MildCheck {
        phi,
        fixed_point_residual,
        formula_residual_sup,
        integrated_residual_sup,
    }
}

/// `max_{|k| ≤ K} ‖Δ_k x̂(k) − f̂(k)‖₂` with `x̂` taken from trajectory samples.
pub fn fourier_consistency<T: Real>(
    sys: &DelaySystem<T>,
    samples: &SampledSignal<T>,
    f: &FourierCoefficients<T>,
    max_mode: usize,
) -> Result<T> {
    let xh = analyze(samples, max_mode)?;
    let kmax = max_mode as i64;
    Ok((-kmax..=kmax)
        .into_par_iter()
        .map(|k| {
            let delta = assemble_delta(sys, k).delta;
            vnorm(&(delta * xh.coeff(k) - f.coeff(k)))
        })
        .reduce(T::zero, |a, b| a.max(b)))
}

/// Both sides of `A∫_0^t∫_0^s T(s−ξ)g(ξ)dξds = ∫_0^t (T(t−s) − I) g(s) ds`.
#[derive(Debug, Clone)]
pub struct GeneratorIdentity<T: Real> {
    pub lhs: CVector<T>,
    pub rhs: CVector<T>,
    pub residual: T,
}

/// Evaluates both sides by nested Simpson quadrature on `panels` panels and
/// cross-checks against `panels / 2`.
pub fn generator_integral_identity<T, G>(
    a: &CMatrix<T>,
    g: G,
    t: T,
    panels: usize,
    tol: f64,
) -> Result<GeneratorIdentity<T>>
where
    T: Real,
    G: Fn(T) -> CVector<T> + Sync,
{
    if panels < 4 || !panels.is_multiple_of(4) {
        return Err(Error::InvalidArgument(format!(
            "panel count {panels} must be a positive multiple of 4"
        )));
    }
    if t < T::zero() {
        return Err(Error::InvalidArgument("t must be nonnegative".into()));
    }
    let fine = identity_sides(a, &g, t, panels);
    let coarse = identity_sides(a, &g, t, panels / 2);
    let disagreement = vnorm(&(&fine.lhs - &coarse.lhs)).max(vnorm(&(&fine.rhs - &coarse.rhs))).as_f64();
    if disagreement > 10.0 * tol {
        return Err(Error::QuadratureUnderresolved { disagreement });
    }
    Ok(fine)
}

fn identity_sides<T: Real, G: Fn(T) -> CVector<T> + Sync>(
    a: &CMatrix<T>,
    g: &G,
    t: T,
    panels: usize,
) -> GeneratorIdentity<T> {
    let d = a.nrows();
    let h = t / from_int::<T>(panels as i64);
    let table = SemigroupTable::new(a, h, panels);
    let gs: Vec<CVector<T>> = (0..=panels)
        .into_par_iter()
        .map(|i| g(h * from_int::<T>(i as i64)))
        .collect();
    // Inner convolution F(s_j) = ∫_0^{s_j} T(s_j − ξ) g(ξ) dξ, one rule per node.
    let inner: Vec<CVector<T>> = (0..=panels)
        .into_par_iter()
        .map(|j| {
            if j == 1 {
                let mid = semigroup(a, h / T::lit(2.0), T::default_epsilon()) * g(h / T::lit(2.0));
                let sum = table.at(1) * &gs[0] + mid * C::new(T::lit(4.0), T::zero()) + &gs[1];
                return sum * C::new(h / T::lit(6.0), T::zero());
            }
            let vals: Vec<CVector<T>> = (0..=j).map(|i| table.at(j - i) * &gs[i]).collect();
            cumulative_simpson(&vals, h, CVector::zeros(d))
                .pop()
                .expect("at least one node")
        })
        .collect();
    let lhs = a * simpson(&inner, h);
    let eye = CMatrix::<T>::identity(d, d);
    let outer: Vec<CVector<T>> = (0..=panels)
        .map(|i| (table.at(panels - i) - &eye) * &gs[i])
        .collect();
    let rhs = simpson(&outer, h);
    let residual = vnorm(&(&lhs - &rhs));
    GeneratorIdentity { lhs, rhs, residual }
}
