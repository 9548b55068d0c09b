//! Finite-time decision of periodic solvability: a scan over a window of
//! modes, a Neumann-series certificate for the infinite tail, and a
//! Rademacher-average estimate of the R-bound of the multiplier family.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::DelaySystem;
use crate::scalar::{from_int, opnorm, vnorm, CMatrix, CVector, Real, C};
use crate::symbol::{assemble_delta, SymbolEntry};

/// Bound on `‖M_k‖₂` guaranteed for every `|k| ≥ tail_K`.
pub const TAIL_BOUND: f64 = 2.0;

/// Largest subfamily drawn by the R-bound estimator (`2^10` sign patterns).
pub const MAX_SUBFAMILY: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Solvable,
    Unsolvable(Vec<i64>),
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Solvable => "SOLVABLE",
            Verdict::Unsolvable(_) => "UNSOLVABLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolvabilityReport<T: Real> {
    pub scan_k: usize,
    pub singular_modes: Vec<i64>,
    /// Max `‖M_k‖₂` over the invertible modes of the window.
    pub sup_multiplier_norm: T,
    pub tail_k: usize,
    pub tail_bound: T,
    pub rbound_estimate: Option<T>,
    /// `sup ‖k(M_{k+1} − M_k)‖₂` over the window, when every needed mode is invertible.
    pub variation_sup: Option<T>,
    pub verdict: Verdict,
}

impl<T: Real> SolvabilityReport<T> {
    /// Certified R₂ bound: `max(sup over the window, tail bound)`, valid for
    /// `p = 2` on a Hilbert space where the R-bound equals the uniform norm bound.
    pub fn certified_rbound(&self) -> Option<T> {
        (self.verdict == Verdict::Solvable).then(|| self.sup_multiplier_norm.max(self.tail_bound))
    }
}

/// `⌈2(‖A‖ + n‖B‖)⌉ + 1`. For `|k|` at or beyond it, `‖(A + Σ B_{j,k})/(ik)‖ ≤ 1/2`,
/// so `Δ_k` is invertible with `‖ikΔ_k^{-1}‖₂ ≤ 2`.
pub fn tail_mode<T: Real>(sys: &DelaySystem<T>) -> usize {
    let n = sys.n_delays() as f64;
    let s = 2.0 * (sys.norm_a().as_f64() + n * sys.norm_b().as_f64());
    s.ceil() as usize + 1
}

/// Symbol entries for `k = -K..=K`, in order.
pub fn scan_entries<T: Real>(sys: &DelaySystem<T>, window: usize) -> Vec<SymbolEntry<T>> {
    let w = window as i64;
    (-w..=w).into_par_iter().map(|k| assemble_delta(sys, k)).collect()
}

/// Scans `|k| ≤ K` and fills everything except the R-bound estimate.
pub fn scan<T: Real>(sys: &DelaySystem<T>, window: usize) -> SolvabilityReport<T> {
    let entries = scan_entries(sys, window);
    report_from_entries(sys, window, &entries)
}

fn report_from_entries<T: Real>(
    sys: &DelaySystem<T>,
    window: usize,
    entries: &[SymbolEntry<T>],
) -> SolvabilityReport<T> {
    let singular_modes: Vec<i64> = entries.iter().filter(|e| !e.invertible).map(|e| e.mode).collect();
    let sup_multiplier_norm = entries
        .iter()
        .filter(|e| e.invertible)
        .fold(T::zero(), |m, e| m.max(e.multiplier_norm));
    let tail_k = tail_mode(sys);
    let verdict = if !singular_modes.is_empty() {
        Verdict::Unsolvable(singular_modes.clone())
    } else if window >= tail_k {
        Verdict::Solvable
    } else {
        Verdict::Inconclusive
    };
    SolvabilityReport {
        scan_k: window,
        singular_modes,
        sup_multiplier_norm,
        tail_k,
        tail_bound: T::lit(TAIL_BOUND),
        rbound_estimate: None,
        variation_sup: None,
        verdict,
    }
}

/// Settings for the Rademacher estimator.
#[derive(Debug, Clone, Copy)]
pub struct RboundConfig {
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for RboundConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            trials: 10_000,
            seed: 0,
        }
    }
}

/// Full analysis: scan, tail certificate, R-bound estimate over the
/// invertible multipliers of the window, and the variation diagnostic.
pub fn analyze_system<T: Real>(
    sys: &DelaySystem<T>,
    window: usize,
    cfg: RboundConfig,
) -> SolvabilityReport<T> {
    let entries = scan_entries(sys, window);
    let mut report = report_from_entries(sys, window, &entries);
    let family: Vec<CMatrix<T>> = entries
        .iter()
        .filter(|e| e.invertible)
        .filter_map(|e| e.multiplier().ok())
        .collect();
    report.rbound_estimate = rbound_estimate(&family, cfg.p, cfg.trials, cfg.seed).ok();
    report.variation_sup = variation_report(sys, window).ok();
    report
}

/// Lower estimate of the R_p-bound of `family`.
///
/// Maximizes the ratio `(E‖Σ r_l T_l x_l‖^p)^{1/p} / (E‖Σ r_l x_l‖^p)^{1/p}` over
/// every singleton (with its top right-singular vector) and over `trials`
/// random subfamilies of size at most [`MAX_SUBFAMILY`] with Gaussian vectors.
/// The expectation over signs is exact: all `2^m` patterns are enumerated.
/// Each trial draws from its own seeded stream, so the result is a running
/// maximum that never decreases as `trials` grows.
pub fn rbound_estimate<T: Real>(family: &[CMatrix<T>], p: f64, trials: usize, seed: u64) -> Result<T> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be at least 1")));
    }
    let singles = family
        .par_iter()
        .filter_map(|t| {
            let x = top_right_singular_vector(t)?;
            rademacher_ratio(&[t], &[x], p)
        })
        .reduce(|| 0.0, f64::max);
    let sampled = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let m = rng.random_range(1..=family.len().min(MAX_SUBFAMILY));
            let picks = sample(&mut rng, family.len(), m);
            let ops: Vec<&CMatrix<T>> = picks.iter().map(|i| &family[i]).collect();
            let d = family[0].ncols();
            let xs: Vec<CVector<T>> = (0..m)
                .map(|_| {
                    CVector::from_fn(d, |_, _| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        C::new(T::lit(re), T::lit(im))
                    })
                })
                .collect();
            rademacher_ratio(&ops, &xs, p)
        })
        .reduce(|| 0.0, f64::max);
    Ok(T::lit(singles.max(sampled)))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn top_right_singular_vector<T: Real>(t: &CMatrix<T>) -> Option<CVector<T>> {
    let svd = t.clone().svd(false, true);
    let v_t = svd.v_t?;
    let (imax, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))?;
    Some(v_t.row(imax).transpose().map(|z| z.conj()))
}

/// Exact sign-expectation ratio for one tuple, by Gray-code enumeration.
/// `None` when the denominator vanishes.
fn rademacher_ratio<T: Real>(ops: &[&CMatrix<T>], xs: &[CVector<T>], p: f64) -> Option<f64> {
    let m = ops.len();
    let images: Vec<CVector<T>> = ops.iter().zip(xs).map(|(t, x)| *t * x).collect();
    let mut num_vec: CVector<T> = images.iter().fold(CVector::zeros(images[0].len()), |a, v| a + v);
    let mut den_vec: CVector<T> = xs.iter().fold(CVector::zeros(xs[0].len()), |a, v| a + v);
    let mut signs = vec![true; m];
    let pow = |v: &CVector<T>| vnorm(v).as_f64().powf(p);
    let (mut num, mut den) = (pow(&num_vec), pow(&den_vec));
    let two = C::new(T::lit(2.0), T::zero());
    for step in 1u64..(1u64 << m) {
        let j = step.trailing_zeros() as usize;
        let s = if signs[j] { -two } else { two };
        signs[j] = !signs[j];
        num_vec.axpy(s, &images[j], C::new(T::one(), T::zero()));
        den_vec.axpy(s, &xs[j], C::new(T::one(), T::zero()));
        num += pow(&num_vec);
        den += pow(&den_vec);
    }
    (den > 0.0 && den.is_finite()).then(|| (num / den).powf(1.0 / p))
}

/// `sup_{|k| ≤ K} ‖k(M_{k+1} − M_k)‖₂`.
pub fn variation_report<T: Real>(sys: &DelaySystem<T>, window: usize) -> Result<T> {
    let w = window as i64;
    let entries: Vec<SymbolEntry<T>> = (-w..=w + 1).into_par_iter().map(|k| assemble_delta(sys, k)).collect();
    let singular: Vec<i64> = entries.iter().filter(|e| !e.invertible).map(|e| e.mode).collect();
    if !singular.is_empty() {
        return Err(Error::SingularMode(singular));
    }
    let mults = entries
        .iter()
        .map(SymbolEntry::multiplier)
        .collect::<Result<Vec<_>>>()?;
    Ok(mults
        .windows(2)
        .zip(-w..=w)
        .map(|(pair, k)| opnorm(&((&pair[1] - &pair[0]) * C::new(from_int::<T>(k), T::zero()))))
        .fold(T::zero(), |m, x| m.max(x)))
}

/// The delay family `{Σ_j e^{−ik r_j} B : |k| ≤ K}`.
pub fn delay_family<T: Real>(sys: &DelaySystem<T>, window: usize) -> Vec<CMatrix<T>> {
    let w = window as i64;
    (-w..=w).map(|k| sys.b() * sys.delay_weight(k)).collect()
}

/// `2^{1/p} n ‖B‖`, the claimed R_p-bound of the delay family.
pub fn delay_family_bound<T: Real>(sys: &DelaySystem<T>, p: f64) -> T {
    T::lit(2f64.powf(1.0 / p)) * from_int::<T>(sys.n_delays() as i64) * sys.norm_b()
}
