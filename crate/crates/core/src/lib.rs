//! Exact tame approximation of polynomial automorphisms and
//! symplectomorphisms, and lifting of tame symplectic words to the Weyl
//! algebra.
//!
//! Everything is computed over Q with exact arithmetic. Endomorphisms are
//! tuples of generator images; composition follows the point-map convention
//! `compose(f, g) = f ∘ g`, i.e. `g`'s images are substituted into `f`'s.

pub mod approx;
pub mod endo;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod tame;
pub mod weyl;

pub use endo::PolyEndo;
pub use error::{Error, Result};
pub use linalg::QMatrix;
pub use poly::{Height, Monomial, Poly};
pub use rational::Rational;
pub use tame::{ElementaryGen, TameWord};
