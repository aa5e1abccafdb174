//! Monodromy matrices of limit-circle Hamburger Hamiltonians, the bridge to
//! half-line Jacobi matrices, and growth estimates for the Nevanlinna matrix.
//!
//! A Hamburger Hamiltonian is a piecewise-constant rank-one trace-normalized
//! 2×2 Hamiltonian on (0, L), determined by positive lengths l_j and real
//! angles φ_j. In the limit circle case (L < ∞, equivalently an
//! indeterminate moment problem) its monodromy matrix W_H(z) is entire of
//! order ρ ∈ [0, 1], and log |w_{H,22}(ir)| measures the growth of the whole
//! Nevanlinna matrix since w_{H,22} = −B up to constant conjugation.
//!
//! The crate computes W_H(z) exactly as a product of closed-form interval
//! factors with overflow-safe log scaling, converts between Jacobi and
//! Hamiltonian parameters, evaluates the lower/upper growth bounds as curves
//! in r, estimates convergence exponents, and packages preset families with
//! order-fit and sandwich reports.
//!
//! ## Examples
//!
//! One runnable example per capability lives in `examples/`:
//!
//! ```bash
//! cargo run --release --example two_interval_closed_form
//! cargo run --release --example convert_jacobi
//! cargo run --release --example indeterminacy
//! cargo run --release --example partition_counters
//! cargo run --release --example growth_curve
//! cargo run --release --example bounds_curves
//! cargo run --release --example exponent_estimates
//! cargo run --release --example berezanskii_verdict
//! cargo run --release --example order_sandwich
//! ```
//!
//! A thin CLI (`convert`, `eval`, `bounds`, `experiment`, `exponents`)
//! wraps the same entry points for file-based workflows.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod grid;
pub mod hamiltonian;
pub mod io;
pub mod jacobi;
mod kahan;
pub mod monodromy;

pub use error::{Error, Result};
pub use hamiltonian::{HamburgerHamiltonian, Interval, OmegaMatrix, SigmaPartition};
pub use jacobi::{JacobiParameters, PolyAtZero};
pub use monodromy::{interval_factor, log_abs_w22, monodromy, nevanlinna_log_b, ScaledMatrix2};
