//! Finite-element simulation of coupled phase-field / poro-visco-elastic
//! tumor growth on the unit square.
//!
//! The crate implements three related models over the same Q1 discretization:
//! the Cahn–Hilliard equation, the Cahn–Larché equations (phase field plus
//! quasi-static elasticity) and the full Cahn–Hilliard–Biot system (phase
//! field, elasticity and Darcy flow coupled through a shared free energy).
//! Time stepping is semi-implicit Euler with a convex–concave splitting of
//! the double-well potential; the coupled blocks are resolved by an iterative
//! decoupling fixed point with a Newton solver for the phase-field block.
//!
//! See the `book/` directory for a guided tour; its code snippets are run as
//! doc-tests to keep them in sync with the library.

pub mod assembly;
pub mod config;
pub mod diagnostics;
pub mod energy;
pub mod grid;
pub mod io;
pub mod material;
pub mod quad;
pub mod sparse;
pub mod stepper;

pub mod app;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/discretization.md")]
    mod discretization {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
