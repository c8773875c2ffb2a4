//! Simulation library for multimode cavity-magnonic systems.
//!
//! Hybrid photon-magnon hardware is modeled as a [`model::CouplingGraph`]:
//! bosonic modes coupled by complex-phased beam-splitter terms. On top of the
//! graph sit
//!
//! - [`gauge`]: per-mode phase rotations, spanning-tree phase reduction, and
//!   the gauge-invariant loop phases that survive it;
//! - [`spectrum`]: Hermitian diagonalization into polariton branches,
//!   parameter sweeps, anticrossing-gap location, brightness, and the rotated
//!   magnon basis;
//! - [`dispersive`]: the first-order Schrieffer-Wolff effective Hamiltonian
//!   with cavity-mediated magnon-magnon coupling;
//! - [`formfactor`]: form factor, coupling phase, and coupling strength from
//!   exported cavity field maps;
//! - [`inout`]: microwave transmission (S21) from input-output theory, both a
//!   closed form for the two-sphere system and a general dense solver.
//!
//! All frequencies and rates are in GHz (frequency/2pi convention); phases in
//! radians, canonically reduced to `[0, 2pi)`.

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod dispersive;
pub mod error;
pub mod formfactor;
pub mod gauge;
pub mod inout;
pub mod model;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{
    build_hamiltonian, two_sphere_system, Coupling, CouplingGraph, HamiltonianMatrix, Mode,
    ModeKind, SystemParams,
};

/// Format a float like C's `%.12e` (two-digit signed exponent).
pub fn fmt_e12(x: f64) -> String {
    let s = format!("{x:.12e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().expect("float exponent");
            format!(
                "{mantissa}e{}{:02}",
                if exp < 0 { '-' } else { '+' },
                exp.abs()
            )
        }
        None => s,
    }
}
