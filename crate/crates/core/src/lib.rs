//! Exact solver for tan²x₀ = tan x₁·tan x₂·tan x₃·tan x₄ over rational multiples of π.

pub mod angle;
pub mod arith;
pub mod basis;
pub mod closed;
pub mod error;
pub mod families;
pub mod numeric;
pub mod solver;
pub mod store;
pub mod tan;
pub mod triangles;

pub use angle::{canonical_rep, omega3_member, reduce_angle, GroupElement, Perm4, RationalAngle, Tuple5};
pub use basis::{BasisElement, BasisVector};
pub use error::{Error, Result};
