//! Periodic solutions of linear delay differential equations
//!
//! ```text
//! x'(t) = A x(t) + Σ_j B x(t − r_j) + f(t),   x 2π-periodic,
//! ```
//!
//! on `C^d`, solved mode by mode through the symbol
//! `Δ_k = ikI − A − Σ_j e^{−ik r_j} B`: a unique periodic solution exists for
//! every forcing exactly when every `Δ_k` is invertible and the multipliers
//! `ikΔ_k^{-1}` are uniformly (equivalently, R-) bounded, and then
//! `x̂(k) = Δ_k^{-1} f̂(k)`.
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which is what the command-line tool uses.

pub mod certify;
pub mod cli;
pub mod document;
pub mod error;
pub mod fourier;
pub mod mild;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod scalar;
pub mod solver;
pub mod symbol;

pub use certify::{
    analyze_system, rbound_estimate, scan, tail_mode, variation_report, RboundConfig, SolvabilityReport, Verdict,
};
pub use error::{Error, Result, Violation};
pub use fourier::{
    analyze, antiderivative_check, antiderivative_residuals, derivative_coeffs, dirichlet_sum, fejer_sum, fejer_sum_cesaro, SampledSignal,
};
pub use mild::{fourier_consistency, generator_integral_identity, mild_check, semigroup, MildCheck, MildOptions};
pub use model::{evaluate, validate_system, DelaySystem, FourierCoefficients, RawSystem};
pub use oracle::{integrate, periodic_compare, Comparison, Trajectory};
pub use scalar::{cplx, CMatrix, CVector, Real, C};
pub use solver::{homogeneous_mode, residual, solve, solve_forced, HomogeneousMode, PeriodicSolution};
pub use symbol::{apply_inverse, assemble_delta, variation_pair, MultiplierPair, SymbolEntry};

pub type Complex64 = C<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type CVector64 = CVector<f64>;
pub type DelaySystem64 = DelaySystem<f64>;
pub type FourierCoefficients64 = FourierCoefficients<f64>;
pub type SymbolEntry64 = SymbolEntry<f64>;
pub type MultiplierPair64 = MultiplierPair<f64>;
pub type SolvabilityReport64 = SolvabilityReport<f64>;
pub type PeriodicSolution64 = PeriodicSolution<f64>;
pub type SampledSignal64 = SampledSignal<f64>;
pub type MildCheck64 = MildCheck<f64>;
pub type Trajectory64 = Trajectory<f64>;

pub type DelaySystem32 = DelaySystem<f32>;
pub type FourierCoefficients32 = FourierCoefficients<f32>;
pub type PeriodicSolution32 = PeriodicSolution<f32>;
