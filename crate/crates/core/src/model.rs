//! Problem data: the delay system and trigonometric polynomials.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result, Violation};
use crate::scalar::{cis, from_int, opnorm, vnorm, CMatrix, CVector, Real, C};

/// Unvalidated problem description, as ingested from a problem file.
#[derive(Debug, Clone)]
pub struct RawSystem<T> {
    pub dim: usize,
    pub a: Vec<Vec<C<T>>>,
    pub b: Vec<Vec<C<T>>>,
    pub delays: Vec<T>,
    /// Dimension of the forcing, when one accompanies the system.
    pub forcing_dim: Option<usize>,
}

/// `x'(t) = A x(t) + sum_j B x(t - r_j) + f(t)` on the 2π-periodic circle.
///
/// Immutable after construction. The operator norms of `A` and `B` are
/// computed once and cached.
#[derive(Debug, Clone)]
pub struct DelaySystem<T: Real> {
    a: CMatrix<T>,
    b: CMatrix<T>,
    delays: Vec<T>,
    norm_a: T,
    norm_b: T,
}

impl<T: Real> DelaySystem<T> {
    /// Builds a system from matrices, checking every invariant.
    pub fn new(a: CMatrix<T>, b: CMatrix<T>, delays: Vec<T>) -> Result<Self> {
        let mut bad = Vec::new();
        check_square("A", a.nrows(), a.ncols(), false, &mut bad);
        check_square("B", b.nrows(), b.ncols(), false, &mut bad);
        if a.nrows() != b.nrows() {
            bad.push(Violation::DimensionMismatch {
                what: "B".into(),
                expected: a.nrows(),
                found: b.nrows(),
            });
        }
        if a.nrows() == 0 {
            bad.push(Violation::Other("dimension must be at least 1".into()));
        }
        check_delays(&delays, &mut bad);
        if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            bad.push(Violation::NonFiniteEntry { what: "A".into() });
        }
        if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            bad.push(Violation::NonFiniteEntry { what: "B".into() });
        }
        if !bad.is_empty() {
            return Err(Error::Invalid(bad));
        }
        let norm_a = opnorm(&a);
        let norm_b = opnorm(&b);
        Ok(Self {
            a,
            b,
            delays,
            norm_a,
            norm_b,
        })
    }

    /// Scalar (`d = 1`) convenience constructor.
    pub fn scalar(a: C<T>, b: C<T>, delays: Vec<T>) -> Result<Self> {
        Self::new(
            CMatrix::from_element(1, 1, a),
            CMatrix::from_element(1, 1, b),
            delays,
        )
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &CMatrix<T> {
        &self.b
    }

    pub fn delays(&self) -> &[T] {
        &self.delays
    }

    /// Number of delays `n`.
    pub fn n_delays(&self) -> usize {
        self.delays.len()
    }

    pub fn norm_a(&self) -> T {
        self.norm_a
    }

    pub fn norm_b(&self) -> T {
        self.norm_b
    }

    pub fn max_delay(&self) -> T {
        self.delays.iter().copied().fold(T::zero(), |m, r| m.max(r))
    }

    pub fn min_delay(&self) -> T {
        self.delays
            .iter()
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), |m, r| m.min(r))
    }

    /// The period is fixed at 2π; other periods require rescaling time.
    pub fn period(&self) -> T {
        T::two_pi()
    }

    /// `true` when `A` and `B` have no imaginary parts.
    pub fn is_real(&self) -> bool {
        self.a.iter().chain(self.b.iter()).all(|z| z.im == T::zero())
    }

    /// `sum_j e^{-i k r_j}`, the scalar weight of `B` in the mode-`k` symbol.
    pub fn delay_weight(&self, k: i64) -> C<T> {
        let kf: T = from_int(k);
        self.delays
            .iter()
            .fold(C::new(T::zero(), T::zero()), |acc, &r| acc + cis(-kf * r))
    }

    /// Right-hand side operator applied to a trajectory: `A x(t) + sum_j B x(t - r_j)`.
    pub fn apply_rhs(&self, x_now: &CVector<T>, x_delayed: &[CVector<T>]) -> CVector<T> {
        let mut acc = &self.a * x_now;
        for xd in x_delayed {
            acc += &self.b * xd;
        }
        acc
    }
}

fn check_square(name: &str, rows: usize, cols: usize, ragged: bool, bad: &mut Vec<Violation>) {
    if rows != cols || ragged {
        bad.push(Violation::NonSquareMatrix {
            name: name.into(),
            rows,
            cols,
            ragged,
        });
    }
}

fn check_delays<T: Real>(delays: &[T], bad: &mut Vec<Violation>) {
    if delays.is_empty() {
        bad.push(Violation::Other("at least one delay is required".into()));
    }
    for (index, &r) in delays.iter().enumerate() {
        if !r.is_finite() {
            bad.push(Violation::NonFiniteEntry {
                what: format!("delay #{index}"),
            });
        } else if r <= T::zero() {
            bad.push(Violation::NonPositiveDelay {
                index,
                value: r.as_f64(),
            });
        }
    }
}

fn to_matrix<T: Real>(
    name: &str,
    rows: &[Vec<C<T>>],
    dim: usize,
    bad: &mut Vec<Violation>,
) -> Option<CMatrix<T>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let ragged = rows.iter().any(|r| r.len() != ncols);
    let before = bad.len();
    check_square(name, nrows, ncols, ragged, bad);
    if bad.len() == before && nrows != dim {
        bad.push(Violation::DimensionMismatch {
            what: name.into(),
            expected: dim,
            found: nrows,
        });
    }
    if rows
        .iter()
        .flatten()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        bad.push(Violation::NonFiniteEntry { what: name.into() });
    }
    if bad.len() != before {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Validates a raw description, reporting every violated invariant at once.
pub fn validate_system<T: Real>(raw: &RawSystem<T>) -> Result<DelaySystem<T>> {
    let mut bad = Vec::new();
    if raw.dim == 0 {
        bad.push(Violation::Other("dim must be at least 1".into()));
    }
    let a = to_matrix("A", &raw.a, raw.dim, &mut bad);
    let b = to_matrix("B", &raw.b, raw.dim, &mut bad);
    check_delays(&raw.delays, &mut bad);
    if let Some(fd) = raw.forcing_dim {
        if fd != raw.dim {
            bad.push(Violation::DimensionMismatch {
                what: "forcing".into(),
                expected: raw.dim,
                found: fd,
            });
        }
    }
    match (a, b) {
        (Some(a), Some(b)) if bad.is_empty() => DelaySystem::new(a, b, raw.delays.clone()),
        _ => Err(Error::Invalid(bad)),
    }
}

/// Trigonometric polynomial `t -> sum_k e^{ikt} c_k` with `c_k` in `C^d`.
///
/// Absent modes are zero. Exact zero vectors are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients<T: Real> {
    dim: usize,
    entries: BTreeMap<i64, CVector<T>>,
    real_valued: bool,
}

impl<T: Real> FourierCoefficients<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
            real_valued: false,
        }
    }

    pub fn from_modes<I>(dim: usize, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, CVector<T>)>,
    {
        let mut c = Self::zero(dim);
        for (k, v) in modes {
            if v.len() != dim {
                return Err(Error::Invalid(vec![Violation::DimensionMismatch {
                    what: format!("coefficient of mode {k}"),
                    expected: dim,
                    found: v.len(),
                }]));
            }
            if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Invalid(vec![Violation::NonFiniteEntry {
                    what: format!("coefficient of mode {k}"),
                }]));
            }
            c.add_to_mode(k, &v);
        }
        Ok(c)
    }

    /// Scalar convenience: `d = 1` with the given complex coefficients.
    pub fn scalar<I: IntoIterator<Item = (i64, C<T>)>>(modes: I) -> Self {
        let mut c = Self::zero(1);
        for (k, z) in modes {
            c.add_to_mode(k, &CVector::from_element(1, z));
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest `|k|` carrying a nonzero coefficient (0 for the zero polynomial).
    pub fn max_mode(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: i64) -> Option<&CVector<T>> {
        self.entries.get(&k)
    }

    /// Coefficient of mode `k`, zero when absent.
    pub fn coeff(&self, k: i64) -> CVector<T> {
        self.entries
            .get(&k)
            .cloned()
            .unwrap_or_else(|| CVector::zeros(self.dim))
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &CVector<T>)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn real_valued(&self) -> bool {
        self.real_valued
    }

    /// Sets the coefficient of mode `k`, dropping it when exactly zero.
    pub fn set(&mut self, k: i64, v: CVector<T>) {
        assert_eq!(v.len(), self.dim, "coefficient dimension");
        self.real_valued = false;
        if v.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
    }

    pub fn add_to_mode(&mut self, k: i64, v: &CVector<T>) {
        let cur = self.coeff(k);
        self.set(k, cur + v);
    }

    /// Flags the polynomial as real-valued after checking conjugate symmetry
    /// `c_{-k} = conj(c_k)` componentwise within `1e-12`.
    pub fn mark_real(mut self) -> Result<Self> {
        let tol = T::lit(1e-12);
        for (&k, v) in &self.entries {
            let w = self.coeff(-k);
            let ok = v
                .iter()
                .zip(w.iter())
                .all(|(a, b)| (a - b.conj()).modulus() <= tol);
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "coefficients are not conjugate-symmetric at mode {k}"
                )));
            }
        }
        self.real_valued = true;
        Ok(self)
    }

    /// Exact evaluation `sum_k e^{ikt} c_k`. Valid for any real `t`,
    /// including delayed arguments `t - r`.
    pub fn evaluate(&self, t: T) -> CVector<T> {
        let mut out = CVector::zeros(self.dim);
        for (&k, v) in &self.entries {
            let e = cis(from_int::<T>(k) * t);
            out.axpy(e, v, C::new(T::one(), T::zero()));
        }
        out
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C<T>, other: &Self, beta: C<T>) -> Self {
        assert_eq!(self.dim, other.dim, "coefficient dimension");
        let mut out = Self::zero(self.dim);
        for (k, v) in self.iter() {
            out.add_to_mode(k, &(v * alpha));
        }
        for (k, v) in other.iter() {
            out.add_to_mode(k, &(v * beta));
        }
        out
    }

    /// Largest componentwise modulus difference to `other` over all modes.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut modes: Vec<i64> = self.modes().chain(other.modes()).collect();
        modes.sort_unstable();
        modes.dedup();
        modes
            .into_iter()
            .map(|k| {
                let d = self.coeff(k) - other.coeff(k);
                d.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
            })
            .fold(T::zero(), |m, x| m.max(x))
    }

    /// `sum_k ||c_k||^2`.
    pub fn energy(&self) -> T {
        self.entries
            .values()
            .map(|v| {
                let n = vnorm(v);
                n * n
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Free-function form of [`FourierCoefficients::evaluate`].
pub fn evaluate<T: Real>(coeffs: &FourierCoefficients<T>, t: T) -> CVector<T> {
    coeffs.evaluate(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use std::f64::consts::PI;

    fn c(re: f64) -> C<f64> {
        cplx(re, 0.0)
    }

    fn raw(a: Vec<Vec<C<f64>>>, b: Vec<Vec<C<f64>>>, delays: Vec<f64>) -> RawSystem<f64> {
        RawSystem {
            dim: a.len(),
            a,
            b,
            delays,
            forcing_dim: None,
        }
    }

    #[test]
    fn validates_scalar_system_and_caches_norms() {
        let sys = validate_system(&raw(vec![vec![c(-1.0)]], vec![vec![c(0.5)]], vec![PI])).unwrap();
        assert_eq!(sys.dim(), 1);
        assert!((sys.norm_a() - 1.0).abs() < 1e-15);
        assert!((sys.norm_b() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_delay_rejected() {
        let err = validate_system(&raw(vec![vec![c(-1.0)]], vec![vec![c(0.5)]], vec![0.0])).unwrap_err();
        match err {
            Error::Invalid(v) => assert!(matches!(v[0], Violation::NonPositiveDelay { .. })),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let a = vec![vec![c(1.0); 2]; 2];
        let b = vec![vec![c(1.0); 3]; 3];
        let mut r = raw(a, b, vec![1.0]);
        r.dim = 2;
        let Error::Invalid(v) = validate_system(&r).unwrap_err() else {
            panic!()
        };
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DimensionMismatch { what, .. } if what == "B")));
    }

    #[test]
    fn every_violation_listed() {
        let mut r = raw(
            vec![vec![c(1.0), c(2.0)], vec![c(f64::NAN)]],
            vec![vec![c(1.0)]],
            vec![-1.0, 2.0],
        );
        r.dim = 1;
        r.forcing_dim = Some(3);
        let Error::Invalid(v) = validate_system(&r).unwrap_err() else {
            panic!()
        };
        assert!(v.iter().any(|x| matches!(x, Violation::NonSquareMatrix { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NonFiniteEntry { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::NonPositiveDelay { index: 0, .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::DimensionMismatch { what, .. } if what == "forcing")));
    }

    #[test]
    fn evaluate_single_mode() {
        let f = FourierCoefficients::scalar([(1, c(1.0))]);
        assert!((f.evaluate(0.0)[0] - c(1.0)).modulus() < 1e-15);
        assert!((f.evaluate(PI)[0] - c(-1.0)).modulus() < 1e-15);
    }

    #[test]
    fn evaluate_cosine() {
        let f = FourierCoefficients::scalar([(-1, c(0.5)), (1, c(0.5))]);
        let v = f.evaluate(PI / 3.0)[0];
        assert!((v - c(0.5)).modulus() < 1e-15);
    }

    #[test]
    fn zeros_are_not_stored() {
        let f = FourierCoefficients::scalar([(3, c(1.0)), (3, c(-1.0)), (1, c(2.0))]);
        assert_eq!(f.max_mode(), 1);
        assert_eq!(f.modes().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn real_flag_requires_symmetry() {
        let ok = FourierCoefficients::scalar([(-2, cplx(1.0, -3.0)), (2, cplx(1.0, 3.0))]);
        assert!(ok.mark_real().is_ok());
        let bad = FourierCoefficients::scalar([(2, cplx(1.0, 3.0))]);
        assert!(bad.mark_real().is_err());
    }
}
