//! Joint-secrecy achievable rate regions for the `K`-transmitter discrete
//! memoryless multiple-access channel with an external eavesdropper.
//!
//! * [`subsets`]: indicator and presence vectors, compact forms of set families.
//! * [`infotheory`]: channel/input model, joint pmf, mutual information and
//!   the bound table `b+_J`, `b-_J`.
//! * [`fourier_motzkin`]: exact symbolic elimination of the randomization
//!   rates with compact-form pruning.
//! * [`region`]: the resulting polytope, membership and vertices.
//! * [`oracle`]: independent brute-force cross-checks.

pub mod error;
pub mod fourier_motzkin;
pub mod infotheory;
pub mod oracle;
pub mod random;
pub mod region;
pub mod spec_file;
pub mod subsets;
pub mod sweeps;

pub use error::{Error, Result};
