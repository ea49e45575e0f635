//! Operator calculus for Wigner and Cohen-class time-frequency representations.
//!
//! The crate has three layers:
//!
//! * a symbolic layer ([`algebra`], [`dsl`]): the noncommutative Weyl algebra
//!   in the generators `M₁, M₂, D₁, D₂` (with `D = −i∂`), the kernel data
//!   `σ̂ = q·e^{−iP}`, the pushforward / bar / tilde operator transforms, and
//!   a small expression language for writing operators down;
//! * a numeric layer ([`grid`], [`polygauss`], [`cohen`], [`verify`]): sampled
//!   2-D functions with FFT-based transforms, an exact polynomial×Gaussian
//!   backend, and a residual harness that checks the intertwining identities
//!   on both backends;
//! * application layers ([`weights`], [`gallery`]): weight functions with
//!   Young conjugates and seminorm systems, plus the catalog of regular
//!   example operators with hypoellipticity probes and the twisted-Laplacian
//!   solver.

pub mod algebra;
pub mod cohen;
pub mod dsl;
pub mod gallery;
pub mod grid;
pub mod polygauss;
pub mod util;
pub mod verify;
pub mod weights;

pub use algebra::{Gen, KernelSpec, Poly2, Poly4, WeylOp};
pub use grid::Grid2;
pub use polygauss::PolyGauss;
