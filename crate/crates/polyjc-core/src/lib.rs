//! Exact computer algebra for Keller maps, locally nilpotent derivations,
//! boundary graphs of affine surfaces and étale endomorphisms of explicit
//! hypersurfaces.
//!
//! Everything here is pure computation over ℚ or a cyclotomic field. File
//! formats and the command line live in the `polyjc` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod casebook;
pub mod fibration;
pub mod field;
pub mod groebner;
pub mod keller;
pub mod lnd;
pub mod poly;

pub use field::{cyclotomic_field, FieldElem, Field, NumberField, Rational};
pub use poly::{Monomial, Poly, Ring, WDeg};
