//! Exact counting of visible elements in free-abelian, free and surface groups.
//!
//! A lattice point is *visible* when the gcd of its coordinates is 1; a group
//! element is visible when its abelianization is. The crate provides
//!
//! - number-theoretic helpers ([`numtheory`]): Möbius sieve, gcd classes, ζ(r);
//! - exact lattice censuses by gcd class and parity ([`lattice`]);
//! - words, free reduction and abelianization ([`words`]);
//! - exact sphere censuses of free groups by dynamic programming ([`freegrp`]);
//! - Dehn's algorithm, canonical geodesics and sphere enumeration for surface
//!   groups ([`surfgrp`]);
//! - limit formulas, mapping ratios and the homogeneous-equation decider
//!   ([`ratios`]);
//! - a name-keyed registry of interchangeable counting engines ([`registry`]).

pub mod census;
pub mod error;
pub mod freegrp;
pub mod lattice;
pub mod numtheory;
pub mod ratios;
pub mod registry;
pub mod surfgrp;
pub mod words;

pub use census::{GroupId, SphereCensus};
pub use error::{Error, Result};
pub use lattice::LatticeVector;
pub use numtheory::GcdClass;
