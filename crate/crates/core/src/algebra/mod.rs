//! The symbolic layer: commutative polynomials, the normal-ordered Weyl
//! algebra, kernel specifications and operator symbols.

mod kernel;
mod poly;
mod symbol;
mod weyl;

pub use kernel::{KernelError, KernelSpec};
pub use poly::Poly2;
pub use symbol::Poly4;
pub use weyl::{a_of_q, Gen, WeylOp};
