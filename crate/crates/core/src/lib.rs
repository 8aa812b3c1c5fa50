//! Computational core for the Birman–Craggs–Johnson homomorphism on the
//! Torelli group of a genus-`g` surface with one boundary component.
//!
//! The crate is `no_std` (with `alloc`). It provides
//!
//! - [`gf2`]: bit-packed vectors over F₂ and incremental span maintenance,
//! - [`surface`]: mod-2 and integral homology of Σ_{g,1} in the fixed
//!   symplectic basis, spines, subsurface bases and Sp(2g, F₂) matrices,
//! - [`boolring`]: the Boolean (square-free) polynomial algebra and the bar map,
//! - [`bcjmap`]: Johnson's formulas for σ on separating twists and bounding pairs,
//! - [`wedgespan`]: abelian-cycle images in ∧²B₂, partial orbits and the
//!   span search,
//! - [`cassonmorita`]: the integral Casson–Morita algebra with ρ, μ and
//!   evaluation homomorphisms.
//!
//! Coordinates are always ordered `a₁..a_g, b₁..b_g`; handles are numbered
//! from 1.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod bcjmap;
pub mod boolring;
pub mod cassonmorita;
mod error;
pub mod gf2;
pub mod surface;
pub mod wedgespan;

pub use error::{Error, Result};
