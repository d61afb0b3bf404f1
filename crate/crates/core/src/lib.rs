//! Greedy N-term wavelet approximation in weighted Orlicz spaces on finite
//! dyadic grids.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! YoungFunction ──► FundamentalProfile (φ, h⁺, h⁻, Boyd indices)
//! DyadicWeight  ──► cube masses w(Q), A_p estimates, disjoint-cube families
//! GridFunction  ──► WaveletExpansion (Haar / periodized Daubechies)
//!               ──► Luxemburg norms, greedy approximants, σ_N oracles
//!               ──► democracy probes, Lorentz/Besov sequence norms
//! ```
//!
//! Everything lives on a finite domain `[0, 2^M)^d` discretized into cells of
//! side `2^-J`, so all integrals are finite sums and can be computed exactly
//! (up to round-off) for piecewise-constant data.

pub mod besov;
pub mod config;
pub mod democracy;
pub mod error;
pub mod greedy;
pub mod grid;
pub mod lorentz;
pub mod orlicz;
pub mod selftest;
pub mod wavelets;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
pub use grid::{DyadicCube, GridFunction, GridGeometry};
pub use orlicz::OrliczSpace;
pub use wavelets::{WaveletExpansion, WaveletFamily};
pub use weights::DyadicWeight;
pub use young::{DilationMode, FundamentalProfile, YoungFunction};
