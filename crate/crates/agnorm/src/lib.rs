//! Algebra norms of functions on finite groups.
//!
//! The norm `‖f‖_A` of `f: G → ℂ` is the nuclear norm of the left-convolution
//! operator `L_f v = f ∗ v` on `L²(μ_G)`, with `μ_G` the uniform probability
//! measure. Integer-valued functions of small norm are integer combinations
//! of coset indicators; [`decomposer::idempotent_decompose`] finds such a
//! combination, and the remaining modules supply the combinatorial and
//! spectral machinery around that statement as executable checks.
//!
//! Conventions used throughout:
//! * group elements are dense indices `0..n`;
//! * measures are stored as densities against `μ_G`, so `μ_A = (n/|A|)·1_A`
//!   and the Dirac mass at `y` is `n·1_{y}`;
//! * `(f ∗ g)(x) = (1/n) Σ_y f(y) g(y⁻¹x)` and `f̃(x) = conj f(x⁻¹)`.

pub mod bohr;
pub mod decomposer;
mod error;
pub mod freiman;
pub mod group_core;
pub mod io;
pub mod linalg;
pub mod mult_pairs;
pub mod set_structures;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use group_core::{build_group, GFunc, GSubset, Group};
pub use num_complex::Complex64;

/// Hard cap on group order for anything that materializes an `n × n` matrix.
pub const MAX_DENSE_ORDER: usize = 4096;
