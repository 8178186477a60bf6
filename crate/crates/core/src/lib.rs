//! Exact computations in the centres of the group algebras `Z[Γ≀S_n]`, uniformly
//! in `n`, through the Farahat–Higman algebra and its description as
//! `R_Γ ⊗ Λ(Γ*)`.

pub mod characters;
pub mod error;
pub mod fh;
pub mod groupdata;
pub mod intpoly;
pub mod lambdagamma;
pub mod partitions;
pub mod rgamma;
pub mod verify;
pub mod wreath;

pub use error::{Error, Result};
