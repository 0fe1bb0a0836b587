//! Trace polynomials under plumbing and pleating rays in the Maskit embedding.

pub mod exactpoly;
pub mod holonomy;
pub mod surface;
pub mod traceform;
pub mod pleating;
pub mod cli;
