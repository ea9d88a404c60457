//! Exact wall-crossing calculator for rank-2 Donaldson invariants of
//! algebraic surfaces with `p_g = q = 0`.
//!
//! The crate enumerates the walls between two polarizations, computes the
//! numerical invariants of each wall and evaluates the closed-form change
//! `delta_{xi,l,r}` of the invariants. Every closed formula has a brute-force
//! counterpart in the Künneth model of `H^*(S^d)` ([`symring::Oracle`]).

pub mod arith;
pub mod config;
pub mod delta;
pub mod error;
pub mod poly;
pub mod report;
pub mod segre;
pub mod surface;
pub mod symring;
pub mod tensor;
pub mod verify;
pub mod walls;

pub use arith::Q;
pub use error::{Error, Result};
pub use surface::{H2Class, MixedClass, SurfaceData, SurfaceFlags};
