//! Approximation of random absolutely continuous invariant densities for cocycles of piecewise
//! expanding circle maps.
//!
//! Fiber operators are discretized either by Ulam's method ([`ulam`]) or by Fourier–Galerkin
//! projection with Cesàro/Fejér weighting ([`fourier`]), composed along an orbit of the base
//! rotation ([`driving`], [`cocycle`]), and measured with the norms in [`sobolev`].

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cocycle;
pub mod config;
pub mod driving;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod io;
pub mod maps;
pub mod plot;
pub mod quadrature;
pub mod sobolev;
pub mod ulam;

pub use error::{Error, Result};
