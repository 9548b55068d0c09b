//! Discrete Fourier analysis on the uniform grid `t_m = 2πm/M`, Dirichlet and
//! Fejér partial sums, and the coefficient rules for derivatives and
//! antiderivatives.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::FourierCoefficients;
use crate::quad::CompositeGauss;
use crate::scalar::{cis, from_int, imag, vnorm, CVector, Real, C};

/// Samples of a `C^d`-valued function at `t_m = 2πm/M`, `m = 0..M`.
#[derive(Debug, Clone)]
pub struct SampledSignal<T: Real> {
    dim: usize,
    values: Vec<CVector<T>>,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(dim: usize, values: Vec<CVector<T>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a signal needs at least one sample".into()));
        }
        for (m, v) in values.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "sample {m} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("sample {m} is not finite")));
            }
        }
        Ok(Self { dim, values })
    }

    /// Samples `f` on the `M`-point grid.
    pub fn from_fn<F: FnMut(T) -> CVector<T>>(dim: usize, count: usize, mut f: F) -> Result<Self> {
        let values = (0..count).map(|m| f(grid_node(m, count))).collect();
        Self::new(dim, values)
    }

    pub fn from_coeffs(coeffs: &FourierCoefficients<T>, count: usize) -> Result<Self> {
        Self::from_fn(coeffs.dim(), count, |t| coeffs.evaluate(t))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[CVector<T>] {
        &self.values
    }

    /// `(1/M) Σ_m ‖values[m]‖²`.
    pub fn mean_energy(&self) -> T {
        let s = self.values.iter().fold(T::zero(), |acc, v| {
            let n = vnorm(v);
            acc + n * n
        });
        s / from_int::<T>(self.values.len() as i64)
    }

    /// Largest sample norm.
    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(vnorm(v)))
    }
}

/// `2πm/M`.
pub fn grid_node<T: Real>(m: usize, count: usize) -> T {
    T::two_pi() * from_int::<T>(m as i64) / from_int::<T>(count as i64)
}

/// DFT coefficients `(1/M) Σ_m e^{−ikt_m} values[m]` for `|k| ≤ K`.
pub fn analyze<T: Real>(signal: &SampledSignal<T>, max_mode: usize) -> Result<FourierCoefficients<T>> {
    let count = signal.len();
    if count < 2 * max_mode + 1 {
        return Err(Error::WindowTooSmall {
            samples: count,
            max_mode,
        });
    }
    let inv_m = T::one() / from_int::<T>(count as i64);
    let kmax = max_mode as i64;
    let mut out = FourierCoefficients::zero(signal.dim());
    for k in -kmax..=kmax {
        let mut acc = CVector::zeros(signal.dim());
        for (m, v) in signal.values().iter().enumerate() {
            // Reduce k*m modulo M before scaling so the phase stays exact for large grids.
            let phase = (k * m as i64).rem_euclid(count as i64);
            let e = cis(-grid_node::<T>(phase as usize, count));
            acc.axpy(e, v, C::new(T::one(), T::zero()));
        }
        out.set(k, acc.map(|z| C::new(z.re * inv_m, z.im * inv_m)));
    }
    Ok(out)
}

/// Dirichlet partial sum `S_m(t) = Σ_{|k| ≤ m} e^{ikt} c_k`.
pub fn dirichlet_sum<T: Real>(coeffs: &FourierCoefficients<T>, m: usize, t: T) -> CVector<T> {
    let mut out = CVector::zeros(coeffs.dim());
    for (k, v) in coeffs.iter() {
        if k.unsigned_abs() as usize <= m {
            out.axpy(cis(from_int::<T>(k) * t), v, C::new(T::one(), T::zero()));
        }
    }
    out
}

/// Fejér mean `σ_l(t) = Σ_{|k| ≤ l} (1 − |k|/(l+1)) e^{ikt} c_k`.
pub fn fejer_sum<T: Real>(coeffs: &FourierCoefficients<T>, l: usize, t: T) -> CVector<T> {
    let denom = from_int::<T>(l as i64 + 1);
    let mut out = CVector::zeros(coeffs.dim());
    for (k, v) in coeffs.iter() {
        let ak = k.unsigned_abs() as usize;
        if ak <= l {
            let w = T::one() - from_int::<T>(ak as i64) / denom;
            out.axpy(cis(from_int::<T>(k) * t) * w, v, C::new(T::one(), T::zero()));
        }
    }
    out
}

/// Fejér mean as the Cesàro average `(1/(l+1)) Σ_{m=0}^{l} S_m(t)`.
pub fn fejer_sum_cesaro<T: Real>(coeffs: &FourierCoefficients<T>, l: usize, t: T) -> CVector<T> {
    let mut acc = CVector::zeros(coeffs.dim());
    for m in 0..=l {
        acc += dirichlet_sum(coeffs, m, t);
    }
    let inv = T::one() / from_int::<T>(l as i64 + 1);
    acc.map(|z| C::new(z.re * inv, z.im * inv))
}

/// Fejér approximant as a coefficient set (triangular weights applied).
pub fn fejer_coeffs<T: Real>(coeffs: &FourierCoefficients<T>, l: usize) -> FourierCoefficients<T> {
    let denom = from_int::<T>(l as i64 + 1);
    let mut out = FourierCoefficients::zero(coeffs.dim());
    for (k, v) in coeffs.iter() {
        let ak = k.unsigned_abs() as usize;
        if ak <= l {
            let w = T::one() - from_int::<T>(ak as i64) / denom;
            out.set(k, v.map(|z| C::new(z.re * w, z.im * w)));
        }
    }
    out
}

/// Coefficients of the derivative: `c_k ← ik c_k`.
pub fn derivative_coeffs<T: Real>(coeffs: &FourierCoefficients<T>) -> FourierCoefficients<T> {
    let mut out = FourierCoefficients::zero(coeffs.dim());
    for (k, v) in coeffs.iter() {
        let ik = imag::<T>(from_int(k));
        out.set(k, v * ik);
    }
    out
}

/// Residual of `ĝ(k) = (i/k) f̂(0) − (i/k) f̂(k)` for `g(t) = ∫_0^t f(s) ds`.
///
/// `g` is built by composite Gauss–Legendre quadrature of `f` on panels of
/// width at most `2π / (20 · max_mode)`, and `ĝ(k)` is taken by the same rule
/// over `[0, 2π]`. The polynomial `f` is only ever evaluated pointwise.
pub fn antiderivative_check<T: Real>(f: &FourierCoefficients<T>, k: i64) -> Result<T> {
    Ok(antiderivative_residuals(f, &[k])?[0])
}

/// [`antiderivative_check`] for several modes, sharing one quadrature of `g`.
pub fn antiderivative_residuals<T: Real>(f: &FourierCoefficients<T>, ks: &[i64]) -> Result<Vec<T>> {
    if ks.contains(&0) {
        return Err(Error::ZeroModeRequested);
    }
    let kmax = ks.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    let band = f.max_mode().max(kmax).max(1);
    let panels = 20 * band;
    let rule = CompositeGauss::<T>::new(12);
    let two_pi = T::two_pi();
    let width = two_pi / from_int::<T>(panels as i64);

    // Running integral at panel boundaries.
    let pieces: Vec<CVector<T>> = (0..panels)
        .into_par_iter()
        .map(|p| {
            let a = width * from_int::<T>(p as i64);
            rule.integrate(a, a + width, 1, |s| f.evaluate(s))
        })
        .collect();
    let mut at_edge = Vec::with_capacity(panels + 1);
    at_edge.push(CVector::<T>::zeros(f.dim()));
    for (p, piece) in pieces.iter().enumerate() {
        let next = &at_edge[p] + piece;
        at_edge.push(next);
    }
    let points = rule.points(T::zero(), two_pi, panels);
    let g: Vec<CVector<T>> = points
        .par_iter()
        .map(|&(t, _)| {
            let p = ((t / width).floor().as_f64() as usize).min(panels - 1);
            let a = width * from_int::<T>(p as i64);
            &at_edge[p] + rule.integrate(a, t, 1, |s| f.evaluate(s))
        })
        .collect();

    let inv = T::one() / two_pi;
    Ok(ks
        .iter()
        .map(|&k| {
            let kf: T = from_int(k);
            let mut acc = CVector::zeros(f.dim());
            for ((t, w), gv) in points.iter().zip(&g) {
                acc.axpy(cis(-kf * *t) * (*w * inv), gv, C::new(T::one(), T::zero()));
            }
            let i_over_k = imag::<T>(T::one() / kf);
            let predicted = f.coeff(0) * i_over_k - f.coeff(k) * i_over_k;
            vnorm(&(acc - predicted))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::ComplexField;
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    fn c(re: f64) -> C<f64> {
        cplx(re, 0.0)
    }

    fn cosine() -> FourierCoefficients<f64> {
        FourierCoefficients::scalar([(-1, c(0.5)), (1, c(0.5))])
    }

    #[test]
    fn single_mode_is_recovered() {
        let s = SampledSignal::from_fn(1, 8, |t: f64| CVector::from_element(1, cis(t))).unwrap();
        let f = analyze(&s, 2).unwrap();
        for k in -2..=2 {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((f.coeff(k)[0] - c(want)).modulus() <= 1e-15, "k={k}");
        }
    }

    #[test]
    fn constant_signal_is_its_mean() {
        let z = cplx(0.3, -2.0);
        let s = SampledSignal::from_fn(1, 5, |_| CVector::from_element(1, z)).unwrap();
        let f = analyze(&s, 0).unwrap();
        assert!((f.coeff(0)[0] - z).modulus() < 1e-15);
    }

    #[test]
    fn cosine_splits_into_two_modes() {
        let s = SampledSignal::from_fn(1, 16, |t: f64| CVector::from_element(1, c(t.cos()))).unwrap();
        let f = analyze(&s, 3).unwrap();
        assert!(f.max_abs_diff(&cosine()) < 1e-15);
    }

    #[test]
    fn window_too_small() {
        let s = SampledSignal::from_fn(1, 4, |_| CVector::from_element(1, c(1.0))).unwrap();
        assert_eq!(
            analyze(&s, 2).unwrap_err(),
            Error::WindowTooSmall { samples: 4, max_mode: 2 }
        );
    }

    #[test]
    fn dirichlet_examples() {
        assert!(dirichlet_sum(&cosine(), 0, 0.3)[0].modulus() < 1e-16);
        assert!((dirichlet_sum(&cosine(), 1, 0.0)[0] - c(1.0)).modulus() < 1e-16);
        let hi = FourierCoefficients::scalar([(2, c(1.0))]);
        assert!(dirichlet_sum(&hi, 1, 0.7)[0].modulus() < 1e-16);
    }

    #[test]
    fn fejer_of_cosine() {
        assert!((fejer_sum(&cosine(), 1, 0.0)[0] - c(0.5)).modulus() < 1e-15);
        for l in [1usize, 2, 5, 17] {
            let t: f64 = 0.4;
            let want = l as f64 / (l as f64 + 1.0) * t.cos();
            assert!((fejer_sum(&cosine(), l, t)[0] - c(want)).modulus() < 1e-15);
            assert!((fejer_sum_cesaro(&cosine(), l, t)[0] - c(want)).modulus() < 1e-14);
        }
    }

    #[test]
    fn fejer_converges_for_large_index() {
        let f = FourierCoefficients::scalar([(-3, cplx(0.2, 0.1)), (0, c(1.0)), (2, cplx(-0.4, 0.9))]);
        let l = 3_000_000;
        for t in [0.0, 1.1, 4.0] {
            assert!((fejer_sum(&f, l, t) - f.evaluate(t)).norm() < 1e-5);
        }
    }

    #[test]
    fn derivative_rules() {
        let d = derivative_coeffs(&FourierCoefficients::scalar([(1, c(1.0))]));
        assert!((d.coeff(1)[0] - cplx(0.0, 1.0)).modulus() < 1e-16);
        assert!(derivative_coeffs(&FourierCoefficients::scalar([(0, c(3.0))])).is_zero());
        let d = derivative_coeffs(&FourierCoefficients::scalar([(-2, c(1.0))]));
        assert!((d.coeff(-2)[0] - cplx(0.0, -2.0)).modulus() < 1e-16);
    }

    #[test]
    fn antiderivative_examples() {
        let e1 = FourierCoefficients::scalar([(1, c(1.0))]);
        assert!(antiderivative_check(&e1, 1).unwrap() < 1e-12);
        let one = FourierCoefficients::scalar([(0, c(1.0))]);
        assert!(antiderivative_check(&one, 1).unwrap() < 1e-8);
        assert_eq!(antiderivative_check(&one, 0), Err(Error::ZeroModeRequested));
    }

    #[test]
    fn grid_node_endpoints() {
        assert_eq!(grid_node::<f64>(0, 7), 0.0);
        assert!((grid_node::<f64>(7, 7) - 2.0 * PI).abs() < 1e-15);
    }
}
