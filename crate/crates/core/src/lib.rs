//! Intercore spontaneous Raman scattering (ICSRS) in multicore fiber and its
//! effect on decoy-state BB84 key rates.
//!
//! The crate is `no_std` (it needs `alloc` for tables and sweep results) and
//! uses `libm` for every transcendental function, so results are bit-identical
//! across targets. File IO, configuration and CSV emission live in the
//! `icsrs-cli` companion crate.
//!
//! Internal units are km, km⁻¹, mW and nm throughout; conversions from
//! engineering units happen at construction time in [`units`].

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod dwdm;
mod error;
pub mod fiber;
mod math;
pub mod qkd;
pub mod quadrature;
pub mod raman;
pub mod units;

pub use error::{Error, Result};
