//! Numerical toolkit for non-selfadjoint operator algebras that live inside
//! finite-dimensional C*-algebras `M_{n_1} ⊕ ... ⊕ M_{n_m}`.
//!
//! The crate computes boundary ideals, Shilov ideals and C*-envelopes,
//! compares C*-covers and builds their joins, constructs the extension
//! `A + I` by the Shilov ideal together with the maps between the two cover
//! lattices, and studies dilations (twist families, maximality, the
//! semi-Dirichlet property).
//!
//! Every cover handled here is a quotient of a fixed finite-dimensional
//! ambient algebra, so the lattices are the finite sub-lattices of quotient
//! covers of that ambient, not the full (generally infinite) lattice.

pub mod catalog;
pub mod covers;
pub mod dilation;
pub mod error;
pub mod fdca;
pub mod matcore;
pub mod opalg;
pub mod word;

pub use error::{Error, Result};
pub use matcore::{op_norm, herm_eigs, span_basis, ComplexMatrix, ToleranceConfig, C64};
