//! Sunada isospectral constructions at desk scale.
//!
//! - [`groups`]: exact finite groups, Gassmann pairs, coset actions.
//! - [`surfaces`]: pants gluings, Cayley and Schreier surfaces, collars.
//! - [`holonomy`]: Fenchel–Nielsen data to `SL(2,R)` spine graphs.
//! - [`spectrum`]: truncated length spectra and cover spectra.
//! - [`fingerprint`]: configuration graphs of short curves and their symmetries.

pub mod groups;
pub mod surfaces;
pub mod holonomy;
pub mod spectrum;
pub mod fingerprint;
