//! # qsm
//!
//! Numerics for the foundations of quantum statistical mechanics on
//! finite-dimensional Hilbert spaces.
//!
//! - [`operator`]: validated Hermitian operators, eigensystems and unit-trace
//!   positive state operators.
//! - [`decomposition`]: resolutions of a density operator into weighted
//!   rank-one projectors (spectral, completion from an arbitrary range
//!   vector, isometry mixing) and the qubit example with `a = 1/(1-2p)`.
//! - [`measure`]: discrete statistical-weight measures over state operators,
//!   their barycenter, and prepare-then-measure sampling.
//! - [`coins`]: the biased-coin preparation scheme, single and repeated
//!   tosses.
//! - [`equilibrium`]: von Neumann and Shannon entropies, canonical states
//!   and the energy/inverse-temperature inversion.
//! - [`sea`]: unitary plus steepest-entropy-ascent relaxation of state
//!   operators.
//! - [`cli`]: the `qsm` command-line front end.
//!
//! Units: `ħ = 1` and `k_B = 1`. Entropies are in units of `k_B` with the
//! natural logarithm.
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; every snippet in it is compiled and run as a doc-test.

#![forbid(unsafe_code)]

pub mod cli;
pub mod coins;
pub mod decomposition;
pub mod equilibrium;
pub mod error;
pub mod formats;
pub mod measure;
pub mod operator;
pub mod random;
pub mod sea;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix, the carrier for every operator.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/coins.md")]
    mod coins {}
    #[doc = include_str!("../../../book/src/equilibrium.md")]
    mod equilibrium {}
    #[doc = include_str!("../../../book/src/sea.md")]
    mod sea {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
