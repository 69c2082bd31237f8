//! Bounds, simulations and verification tools for locally accessible
//! information in bipartite quantum ensembles.
//!
//! The crate covers the full pipeline from raw linear algebra to
//! information accounting:
//!
//! - [`qmat`]: dense complex matrices, density operators, entropies.
//! - [`ensemble`]: state ensembles, Holevo quantities, reductions.
//! - [`measure`]: quantum instruments, LOCC protocol trees, chain-rule
//!   information accounting, restricted measurement optimization.
//! - [`entangle`]: entanglement measures (pure-state entropy, two-qubit
//!   EoF, negativity, relative entropy of entanglement over the PPT set).
//! - [`bounds`]: the Holevo-with-entanglement-correction bound for LOCC
//!   measurements, the n - E complementarity bound, and detector-based
//!   entanglement-production accounting.
//! - [`states`]: constructors for the standard ensembles (Bell bases,
//!   generalized Bell states, partially entangled quadruples and their
//!   tensor powers, classical-copy ensembles).
//! - [`random`]: seeded random states, instruments and ensembles.
//! - [`verify`]: randomized property suites with reproducible seeds.
//!
//! All information quantities are in bits; logarithms are base 2.

pub mod bounds;
pub mod ensemble;
pub mod entangle;
pub mod error;
pub mod measure;
pub mod qmat;
pub mod random;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use qmat::{CMatrix, CVector, Complex64, DensityMatrix, Spectrum};
