//! Resource theory of quantum coherence under strictly incoherent
//! operations (SIOs).
//!
//! The crate models density matrices on a fixed reference basis, SIO
//! channels as families of generalized-permutation Kraus operators, the two
//! standard coherence quantifiers (`c_l1`, `c_re`), and checkers that decide
//! — operationally and structurally — whether a given channel freezes a
//! coherence measure on a given state. Two structural characterizations are
//! implemented: one for states with connected off-diagonal support
//! ([`freeze`]) and one for X states via their direct-sum block form
//! ([`xfreeze`]). Brute-force verifiers and grid sweeps live in [`oracle`].
//!
//! Data-parallel sweeps use rayon when the `parallel` feature (default) is
//! enabled; disabling it falls back to plain sequential iteration with
//! identical results.

pub mod error;
pub mod exec;
pub mod freeze;
pub mod json;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod sio;
pub mod states;
pub mod tol;
pub mod xfreeze;

pub use error::{Error, Result};
pub use measures::{c_l1, c_re, dephase, entropy, CoherenceValue, Measure};
pub use states::{DensityMatrix, StateClass, StateTag};
pub use sio::{SioChannel, SioKraus};
