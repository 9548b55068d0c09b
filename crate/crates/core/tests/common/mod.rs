#![allow(dead_code)]

use std::f64::consts::PI;

use perdde::{cplx, CMatrix64, CVector64, Complex64, DelaySystem64, FourierCoefficients64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    cplx(re, 0.0)
}

/// d = 1, A = −1, B = 0.5, r = π.
pub fn s1() -> DelaySystem64 {
    DelaySystem64::scalar(c(-1.0), c(0.5), vec![PI]).unwrap()
}

/// Singular at k = 1: A = 1 + i, B = 1, r = π.
pub fn singular_at_one() -> DelaySystem64 {
    DelaySystem64::scalar(cplx(1.0, 1.0), c(1.0), vec![PI]).unwrap()
}

pub fn real_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix64 {
    CMatrix64::from_fn(d, d, |_, _| c(rng.random_range(-1.0..=1.0) * scale))
}

pub fn complex_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix64 {
    CMatrix64::from_fn(d, d, |_, _| {
        cplx(rng.random_range(-1.0..=1.0) * scale, rng.random_range(-1.0..=1.0) * scale)
    })
}

pub fn delays(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(1e-3..=2.0 * PI)).collect()
}

/// d ≤ 4, n ≤ 3, real entries in [−1, 1], delays in (0, 2π].
pub fn random_system(rng: &mut ChaCha8Rng) -> DelaySystem64 {
    let d = rng.random_range(1..=4);
    let n = rng.random_range(1..=3);
    let a = real_matrix(rng, d, 1.0);
    let b = real_matrix(rng, d, 1.0);
    let r = delays(rng, n);
    DelaySystem64::new(a, b, r).unwrap()
}

/// Systems whose semigroup stays bounded on [0, 2π]: A = R − I with small R.
pub fn damped_system(rng: &mut ChaCha8Rng) -> DelaySystem64 {
    let d = rng.random_range(1..=3);
    let n = rng.random_range(1..=2);
    let a = complex_matrix(rng, d, 0.4 / d as f64) - CMatrix64::identity(d, d) * c(1.0);
    let b = complex_matrix(rng, d, 0.5 / d as f64);
    let r = delays(rng, n);
    DelaySystem64::new(a, b, r).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector64 {
    CVector64::from_fn(d, |_, _| cplx(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
}

/// Random trigonometric polynomial with `terms` modes in `[−max_mode, max_mode]`.
pub fn random_poly(rng: &mut ChaCha8Rng, d: usize, max_mode: i64, terms: usize) -> FourierCoefficients64 {
    let modes = (0..terms).map(|_| {
        let k = rng.random_range(-max_mode..=max_mode);
        (k, random_vector(rng, d))
    });
    FourierCoefficients64::from_modes(d, modes.collect::<Vec<_>>()).unwrap()
}

/// Real-valued polynomial: conjugate-symmetric coefficients.
pub fn random_real_poly(rng: &mut ChaCha8Rng, d: usize, max_mode: i64) -> FourierCoefficients64 {
    let mut f = FourierCoefficients64::zero(d);
    let dc = CVector64::from_fn(d, |_, _| c(rng.random_range(-1.0..=1.0)));
    f.set(0, dc);
    for k in 1..=max_mode {
        let v = random_vector(rng, d);
        f.set(-k, v.map(|z| z.conj()));
        f.set(k, v);
    }
    f.mark_real().unwrap()
}
