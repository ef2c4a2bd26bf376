//! Mod-2 cohomology of semi-complete real flag manifolds `F(1^k,m)` and
//! non-orientable surfaces, zero-divisor products in their tensor powers, and
//! the resulting bounds for the higher topological complexity `TC_s`.

pub mod algebra;
pub mod bits;
pub mod error;
pub mod f2poly;
pub mod flag_ring;
pub mod search;
pub mod space;
pub mod store;
pub mod suite;
pub mod surface;
pub mod tensor;
pub mod zcl;
pub mod zd;

pub use algebra::GradedAlgebra;
pub use bits::BitVector;
pub use error::{Error, Result};
pub use f2poly::{Monomial, RawPoly};
pub use flag_ring::{FlagRing, RingElement};
pub use space::Space;
pub use surface::SurfaceRing;
pub use tensor::{TensorElement, TensorRing};
pub use zd::ZdSpec;
