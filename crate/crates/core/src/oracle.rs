//! Independent time-domain reference: classical RK4 by the method of steps,
//! with delayed values read from the stored trajectory through cubic Hermite
//! interpolation.

use crate::error::{Error, Result};
use crate::model::{DelaySystem, FourierCoefficients};
use crate::scalar::{from_int, vnorm, CVector, Real, C};
use crate::solver::PeriodicSolution;

const DIVERGENCE_NORM: f64 = 1e12;

/// Per-period contraction factor above which the oracle is not trusted.
pub const MAX_CONTRACTION: f64 = 0.9;

/// Dense RK4 output on a uniform grid starting at `-hist_steps * dt`.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    /// Effective step: `2π / steps_per_period`.
    pub dt: T,
    pub steps_per_period: usize,
    pub periods: usize,
    /// Number of grid points strictly before `t = 0`.
    pub hist_steps: usize,
    pub history: CVector<T>,
    pub values: Vec<CVector<T>>,
    pub derivs: Vec<CVector<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn time(&self, i: usize) -> T {
        self.dt * from_int::<T>(i as i64 - self.hist_steps as i64)
    }

    /// Index of `t = 0`.
    pub fn origin(&self) -> usize {
        self.hist_steps
    }

    /// Cubic Hermite interpolation between stored nodes.
    pub fn value_at(&self, t: T) -> CVector<T> {
        let s = t / self.dt + from_int::<T>(self.hist_steps as i64);
        let last = self.values.len() - 1;
        let i = (s.floor().as_f64().max(0.0) as usize).min(last.saturating_sub(1));
        let theta = s - from_int::<T>(i as i64);
        hermite(
            &self.values[i],
            &self.derivs[i],
            &self.values[i + 1],
            &self.derivs[i + 1],
            theta,
            self.dt,
        )
    }
}

fn hermite<T: Real>(
    x0: &CVector<T>,
    d0: &CVector<T>,
    x1: &CVector<T>,
    d1: &CVector<T>,
    theta: T,
    h: T,
) -> CVector<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = two * t3 - three * t2 + one;
    let h10 = t3 - two * t2 + theta;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    let r = |w: T| C::new(w, T::zero());
    x0 * r(h00) + d0 * r(h10 * h) + x1 * r(h01) + d1 * r(h11 * h)
}

/// Integrates `x' = Ax + Σ_j B x(t − r_j) + f(t)` from a constant history
/// over `periods` periods with RK4.
///
/// The step is shrunk to `2π / ⌈2π / dt⌉` so that periods fall on grid nodes.
pub fn integrate<T: Real>(
    sys: &DelaySystem<T>,
    f: &FourierCoefficients<T>,
    history: &CVector<T>,
    periods: usize,
    dt: T,
) -> Result<Trajectory<T>> {
    let limit = sys.min_delay() / T::lit(4.0);
    if !(dt > T::zero()) || dt > limit {
        return Err(Error::StepTooLarge {
            dt: dt.as_f64(),
            limit: limit.as_f64(),
        });
    }
    if periods < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 periods, got {periods}")));
    }
    if history.len() != sys.dim() || f.dim() != sys.dim() {
        return Err(Error::InvalidArgument("history/forcing dimension mismatch".into()));
    }
    let steps_per_period = (T::two_pi() / dt).ceil().as_f64() as usize;
    let h = T::two_pi() / from_int::<T>(steps_per_period as i64);
    let hist_steps = (sys.max_delay() / h).ceil().as_f64() as usize + 1;
    let total = steps_per_period * periods;

    let mut traj = Trajectory {
        dt: h,
        steps_per_period,
        periods,
        hist_steps,
        history: history.clone(),
        values: Vec::with_capacity(hist_steps + total + 1),
        derivs: Vec::with_capacity(hist_steps + total + 1),
    };
    let zero = CVector::zeros(sys.dim());
    for _ in 0..=hist_steps {
        traj.values.push(history.clone());
        traj.derivs.push(zero.clone());
    }

    let half = h / T::lit(2.0);
    let sixth = C::new(h / T::lit(6.0), T::zero());
    let two = C::new(T::lit(2.0), T::zero());
    let field = |traj: &Trajectory<T>, t: T, x: &CVector<T>| -> CVector<T> {
        let delayed: Vec<CVector<T>> = sys
            .delays()
            .iter()
            .map(|&r| {
                let tau = t - r;
                if tau <= T::zero() {
                    traj.history.clone()
                } else {
                    traj.value_at(tau)
                }
            })
            .collect();
        sys.apply_rhs(x, &delayed) + f.evaluate(t)
    };

    for step in 0..total {
        let i = hist_steps + step;
        let t = h * from_int::<T>(step as i64);
        let x = traj.values[i].clone();
        let k1 = field(&traj, t, &x);
        traj.derivs[i] = k1.clone();
        let k2 = field(&traj, t + half, &(&x + &k1 * C::new(half, T::zero())));
        let k3 = field(&traj, t + half, &(&x + &k2 * C::new(half, T::zero())));
        let k4 = field(&traj, t + h, &(&x + &k3 * C::new(h, T::zero())));
        let next = &x + (k1 + &k2 * two + &k3 * two + k4) * sixth;
        if !(vnorm(&next).as_f64() <= DIVERGENCE_NORM) {
            return Err(Error::Divergence { t: (t + h).as_f64() });
        }
        traj.values.push(next);
        traj.derivs.push(zero.clone());
    }
    let last = traj.values.len() - 1;
    let t_end = traj.time(last);
    let x_end = traj.values[last].clone();
    traj.derivs[last] = field(&traj, t_end, &x_end);
    Ok(traj)
}

/// Result of comparing the oracle with a spectral solution.
#[derive(Debug, Clone)]
pub struct Comparison<T: Real> {
    pub sup_error_last_period: T,
    /// Entry `m` is the sup-difference between periods `m + 1` and `m`.
    pub convergence_ratios: Vec<T>,
    /// Geometric-mean per-period contraction of those differences.
    pub contraction_rate: f64,
}

/// Compares the last period of the oracle with `sol`, after certifying that
/// successive periods contract.
pub fn periodic_compare<T: Real>(traj: &Trajectory<T>, sol: &PeriodicSolution<T>) -> Result<Comparison<T>> {
    periodic_compare_with(traj, |t| sol.evaluate(t))
}

pub fn periodic_compare_with<T: Real, F: Fn(T) -> CVector<T>>(
    traj: &Trajectory<T>,
    reference: F,
) -> Result<Comparison<T>> {
    if traj.periods < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 periods to certify contraction, got {}",
            traj.periods
        )));
    }
    let n = traj.steps_per_period;
    let o = traj.origin();
    let at = |p: usize, j: usize| &traj.values[o + p * n + j];
    let convergence_ratios: Vec<T> = (0..traj.periods - 1)
        .map(|m| {
            (0..=n)
                .map(|j| vnorm(&(at(m + 1, j) - at(m, j))))
                .fold(T::zero(), |a, b| a.max(b))
        })
        .collect();
    let first = convergence_ratios[0].as_f64();
    let last = convergence_ratios[convergence_ratios.len() - 1].as_f64();
    let contraction_rate = if first == 0.0 || last == 0.0 {
        0.0
    } else if convergence_ratios.len() == 1 {
        1.0
    } else {
        (last / first).powf(1.0 / (convergence_ratios.len() - 1) as f64)
    };
    if !(contraction_rate <= MAX_CONTRACTION) {
        return Err(Error::OracleNotConverged {
            rate: contraction_rate,
        });
    }
    let p = traj.periods - 1;
    let sup_error_last_period = (0..=n)
        .map(|j| {
            let t = traj.dt * from_int::<T>(j as i64);
            vnorm(&(at(p, j) - reference(t)))
        })
        .fold(T::zero(), |a, b| a.max(b));
    Ok(Comparison {
        sup_error_last_period,
        convergence_ratios,
        contraction_rate,
    })
}
