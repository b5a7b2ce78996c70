//! Spectral gap of the discrete Schrödinger-type operator `H = L_γ + u·δ₀`
//! on the path graph with vertices `-k..=k`.
//!
//! * [`model`] builds instances and their symmetric tridiagonal operators.
//! * [`eigensolve`] computes the lowest eigenpairs (Sturm bisection plus
//!   inverse iteration) and carries a dense Jacobi oracle.
//! * [`theory`] holds closed forms and structural checks: exact unweighted
//!   eigenvalues, ground-state structure, the three-term recurrence of the
//!   ground state, the Dirichlet restriction and test vectors.
//! * [`asymptotics`] sweeps instance families over growing `k`, extrapolates
//!   limits and fits decay exponents.
//! * [`checks`] bundles the property suites driven by `gapscope verify`.

pub mod asymptotics;
pub mod checks;
pub mod eigensolve;
pub mod error;
pub mod model;
pub mod theory;

pub use asymptotics::{
    build_series, estimate_limit, fit_exponent, ExponentFit, Family, InstanceSummary, LimitEstimate, Quantity,
    ScalingSeries, Trend,
};
pub use eigensolve::{
    default_tol, dense_oracle_spectrum, eigenvalue_count_below, refined_gap, smallest_eigenvalues, EigenPair,
    Spectrum,
};
pub use error::{Error, Result};
pub use model::{assemble, quadratic_form, PathSpec, TridiagonalOperator, WeightProfile};
pub use theory::{GroundStateReport, RecurrenceModel, TestVector};
