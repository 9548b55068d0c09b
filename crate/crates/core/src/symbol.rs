//! Per-mode symbol `Δ_k = ikI − A − Σ_j e^{−ik r_j} B`, its multiplier
//! `M_k = ik Δ_k^{-1}`, and the variation terms `k(M_{k+1} − M_k)`.

use crate::error::{Error, Result};
use crate::model::DelaySystem;
use crate::scalar::{from_int, imag, opnorm, singular_values, CMatrix, CVector, Real, C};

/// Factored symbol at one integer mode.
#[derive(Debug, Clone)]
pub struct SymbolEntry<T: Real> {
    pub mode: i64,
    pub delta: CMatrix<T>,
    pub invertible: bool,
    /// Relative condition number `max(σ_max, |k| + ‖A‖ + n‖B‖) / σ_min`;
    /// infinite when `σ_min = 0`.
    pub cond: T,
    /// `‖ik Δ_k^{-1}‖₂ = |k| / σ_min`, zero for `k = 0`, infinite when singular.
    pub multiplier_norm: T,
    pub sigma_min: T,
    pub sigma_max: T,
}

/// `C_k = ikI − Σ_j e^{−ik r_j} B`, so that `Δ_k = C_k − A`.
pub fn shifted_delay_symbol<T: Real>(sys: &DelaySystem<T>, k: i64) -> CMatrix<T> {
    let d = sys.dim();
    let ik = imag::<T>(from_int(k));
    CMatrix::identity(d, d) * ik - sys.b() * sys.delay_weight(k)
}

/// `C_k − C_{k+1}` in closed form: `−iI − Σ_j e^{−ik r_j}(1 − e^{−i r_j}) B`.
pub fn delay_symbol_step<T: Real>(sys: &DelaySystem<T>, k: i64) -> CMatrix<T> {
    let d = sys.dim();
    let kf: T = from_int(k);
    let one = C::new(T::one(), T::zero());
    let w = sys.delays().iter().fold(C::new(T::zero(), T::zero()), |acc, &r| {
        acc + crate::scalar::cis(-kf * r) * (one - crate::scalar::cis(-r))
    });
    CMatrix::identity(d, d) * imag(-T::one()) - sys.b() * w
}

/// Assembles `Δ_k` and classifies it with an SVD.
pub fn assemble_delta<T: Real>(sys: &DelaySystem<T>, k: i64) -> SymbolEntry<T> {
    let delta = shifted_delay_symbol(sys, k) - sys.a();
    classify(sys, k, delta)
}

fn classify<T: Real>(sys: &DelaySystem<T>, k: i64, delta: CMatrix<T>) -> SymbolEntry<T> {
    let sv = singular_values(&delta);
    let sigma_max = sv.first().copied().unwrap_or_else(T::zero);
    let sigma_min = sv.last().copied().unwrap_or_else(T::zero);
    let kf: T = from_int(k);
    let data_scale = kf.abs() + sys.norm_a() + from_int::<T>(sys.n_delays() as i64) * sys.norm_b();
    let scale = sigma_max.max(data_scale);
    let inf = T::max_value().unwrap_or_else(T::one) * T::lit(2.0);
    let cond = if sigma_min > T::zero() {
        scale / sigma_min
    } else {
        inf
    };
    let invertible = cond.is_finite() && cond <= T::lit(T::SINGULAR_COND);
    let multiplier_norm = if !invertible {
        inf
    } else if k == 0 {
        T::zero()
    } else {
        kf.abs() / sigma_min
    };
    SymbolEntry {
        mode: k,
        delta,
        invertible,
        cond,
        multiplier_norm,
        sigma_min,
        sigma_max,
    }
}

impl<T: Real> SymbolEntry<T> {
    /// Backward-stable solve `Δ_k v = rhs` by LU with partial pivoting.
    pub fn apply_inverse(&self, rhs: &CVector<T>) -> Result<CVector<T>> {
        if !self.invertible {
            return Err(Error::SingularMode(vec![self.mode]));
        }
        self.delta
            .clone()
            .lu()
            .solve(rhs)
            .ok_or(Error::SingularMode(vec![self.mode]))
    }

    /// `Δ_k^{-1} R` for a matrix right-hand side.
    pub fn solve_matrix(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        if !self.invertible {
            return Err(Error::SingularMode(vec![self.mode]));
        }
        self.delta
            .clone()
            .lu()
            .solve(rhs)
            .ok_or(Error::SingularMode(vec![self.mode]))
    }

    /// The multiplier `M_k = ik Δ_k^{-1}` as a matrix.
    pub fn multiplier(&self) -> Result<CMatrix<T>> {
        let d = self.delta.nrows();
        let inv = self.solve_matrix(&CMatrix::identity(d, d))?;
        Ok(inv * imag::<T>(from_int(self.mode)))
    }
}

/// Free-function form of [`SymbolEntry::apply_inverse`].
pub fn apply_inverse<T: Real>(entry: &SymbolEntry<T>, rhs: &CVector<T>) -> Result<CVector<T>> {
    entry.apply_inverse(rhs)
}

/// `M_k = ikΔ_k^{-1}` for a mode, failing on a singular symbol.
pub fn multiplier<T: Real>(sys: &DelaySystem<T>, k: i64) -> Result<CMatrix<T>> {
    assemble_delta(sys, k).multiplier()
}

/// Both routes to the variation term `k(M_{k+1} − M_k)`.
#[derive(Debug, Clone)]
pub struct MultiplierPair<T: Real> {
    pub k: i64,
    pub m_k: CMatrix<T>,
    pub m_k1: CMatrix<T>,
    /// `k(M_{k+1} − M_k)` computed by subtraction.
    pub direct_diff: CMatrix<T>,
    /// `(−ik/(k+1)) M_{k+1}(C_k − C_{k+1})M_k + (k/(k+1)) M_{k+1}`.
    pub factored_diff: CMatrix<T>,
}

impl<T: Real> MultiplierPair<T> {
    /// `‖direct − factored‖₂ / (1 + ‖direct‖₂)`.
    pub fn relative_gap(&self) -> T {
        opnorm(&(&self.direct_diff - &self.factored_diff)) / (T::one() + opnorm(&self.direct_diff))
    }
}

/// Computes `k(M_{k+1} − M_k)` directly and through the factored identity.
pub fn variation_pair<T: Real>(sys: &DelaySystem<T>, k: i64) -> Result<MultiplierPair<T>> {
    if k == -1 {
        return Err(Error::DegenerateMode(-1));
    }
    let e0 = assemble_delta(sys, k);
    let e1 = assemble_delta(sys, k + 1);
    let singular: Vec<i64> = [&e0, &e1]
        .iter()
        .filter(|e| !e.invertible)
        .map(|e| e.mode)
        .collect();
    if !singular.is_empty() {
        return Err(Error::SingularMode(singular));
    }
    let m_k = e0.multiplier()?;
    let m_k1 = e1.multiplier()?;
    let kf: T = from_int(k);
    let k1f: T = from_int(k + 1);
    let direct_diff = (&m_k1 - &m_k) * C::new(kf, T::zero());
    let step = shifted_delay_symbol(sys, k) - shifted_delay_symbol(sys, k + 1);
    let factored_diff = &m_k1 * step * &m_k * imag(-kf / k1f) + &m_k1 * C::new(kf / k1f, T::zero());
    Ok(MultiplierPair {
        k,
        m_k,
        m_k1,
        direct_diff,
        factored_diff,
    })
}
