//! Quadrature rules used by the verification routines.

use std::ops::Add;

use crate::scalar::{from_int, CMatrix, CVector, Real, C};

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand<T: Real>: Clone + Add<Output = Self> {
    fn scaled(&self, w: T) -> Self;
}

impl<T: Real> Integrand<T> for T {
    fn scaled(&self, w: T) -> Self {
        *self * w
    }
}

impl<T: Real> Integrand<T> for C<T> {
    fn scaled(&self, w: T) -> Self {
        C::new(self.re * w, self.im * w)
    }
}

impl<T: Real> Integrand<T> for CVector<T> {
    fn scaled(&self, w: T) -> Self {
        self.map(|z| C::new(z.re * w, z.im * w))
    }
}

impl<T: Real> Integrand<T> for CMatrix<T> {
    fn scaled(&self, w: T) -> Self {
        self.map(|z| C::new(z.re * w, z.im * w))
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule with fixed nodes per panel.
#[derive(Debug, Clone)]
pub struct CompositeGauss<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> CompositeGauss<T> {
    pub fn new(points: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        Self { nodes, weights }
    }

    /// `∫_a^b f` split into `panels` equal panels.
    pub fn integrate<V, F>(&self, a: T, b: T, panels: usize, mut f: F) -> V
    where
        V: Integrand<T>,
        F: FnMut(T) -> V,
    {
        let h = (b - a) / from_int::<T>(panels.max(1) as i64);
        let half = h / T::lit(2.0);
        let mut acc: Option<V> = None;
        for p in 0..panels.max(1) {
            let mid = a + h * from_int::<T>(p as i64) + half;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let term = f(mid + half * *x).scaled(*w * half);
                acc = Some(match acc {
                    Some(s) => s + term,
                    None => term,
                });
            }
        }
        acc.expect("at least one node")
    }

    /// Node/weight pairs mapped onto `[a, b]` with `panels` panels.
    pub fn points(&self, a: T, b: T, panels: usize) -> Vec<(T, T)> {
        let h = (b - a) / from_int::<T>(panels.max(1) as i64);
        let half = h / T::lit(2.0);
        let mut out = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels.max(1) {
            let mid = a + h * from_int::<T>(p as i64) + half;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + half * *x, *w * half));
            }
        }
        out
    }
}

/// Simpson weights for `n` (even) panels of width `h`: `h/3 (1, 4, 2, …, 4, 1)`.
pub fn simpson_weight<T: Real>(i: usize, n: usize, h: T) -> T {
    let third = h / T::lit(3.0);
    if i == 0 || i == n {
        third
    } else if i % 2 == 1 {
        third * T::lit(4.0)
    } else {
        third * T::lit(2.0)
    }
}

/// Composite Simpson over equally spaced samples (`values.len() - 1` even).
pub fn simpson<T, V>(values: &[V], h: T) -> V
where
    T: Real,
    V: Integrand<T>,
{
    let n = values.len() - 1;
    assert!(n >= 2 && n.is_multiple_of(2), "Simpson needs an even panel count");
    let mut acc = values[0].scaled(simpson_weight(0, n, h));
    for (i, v) in values.iter().enumerate().skip(1) {
        acc = acc + v.scaled(simpson_weight(i, n, h));
    }
    acc
}

/// Running integral `∫_{x_0}^{x_i}` at every sample, fourth order.
///
/// Even nodes use Simpson pairs; each odd node adds the quadratic
/// one-interval rule `h/12 (5f_0 + 8f_1 − f_2)` to the preceding even node.
pub fn cumulative_simpson<T, V>(values: &[V], h: T, zero: V) -> Vec<V>
where
    T: Real,
    V: Integrand<T>,
{
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(zero);
    let twelfth = h / T::lit(12.0);
    let third = h / T::lit(3.0);
    let mut i = 1;
    while i < n {
        let base = out[i - 1].clone();
        if i + 1 < n {
            let (f0, f1, f2) = (&values[i - 1], &values[i], &values[i + 1]);
            let half = base.clone()
                + (f0.scaled(T::lit(5.0)) + f1.scaled(T::lit(8.0)) + f2.scaled(-T::one())).scaled(twelfth);
            let full = base + (f0.clone() + f1.scaled(T::lit(4.0)) + f2.clone()).scaled(third);
            out.push(half);
            out.push(full);
            i += 2;
        } else if i < 2 {
            out.push(base + (values[0].clone() + values[1].clone()).scaled(h / T::lit(2.0)));
            i += 1;
        } else {
            // Trailing odd interval: mirror the quadratic rule backwards.
            let (fm, f0, f1) = (&values[i - 2], &values[i - 1], &values[i]);
            out.push(
                base + (f1.scaled(T::lit(5.0)) + f0.scaled(T::lit(8.0)) + fm.scaled(-T::one())).scaled(twelfth),
            );
            i += 1;
        }
    }
    out
}
