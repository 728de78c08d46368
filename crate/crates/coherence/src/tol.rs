//! Numerical tolerances used across the crate.
//!
//! Every comparison against "exact" algebra goes through one of these
//! constants so that verdicts stay auditable. The error budgets differ by
//! origin: plain arithmetic on matrix entries is good to ~1e-12, while
//! anything routed through the eigensolver carries a larger budget.

/// Hermiticity check: max |m - m†|.
pub const HERMITIAN: f64 = 1e-10;

/// Unitarity check: max |u·u† - I|.
pub const UNITARY: f64 = 1e-10;

/// Unit-trace check on density matrices.
pub const TRACE: f64 = 1e-10;

/// Smallest admissible eigenvalue of a density matrix.
pub const PSD: f64 = -1e-9;

/// Entrywise matrix equality.
pub const ENTRY_EQ: f64 = 1e-10;

/// An entry with modulus at or below this is treated as exactly zero in
/// structural checks (support sets, generalized-permutation patterns).
pub const ZERO_ENTRY: f64 = 1e-12;

/// Kraus completeness: max |ΣK†K - I|.
pub const COMPLETENESS: f64 = 1e-9;

/// Freezing tolerance for the l1 norm of coherence (arithmetic-limited).
pub const FREEZE_L1: f64 = 1e-9;

/// Freezing tolerance for the relative entropy of coherence
/// (eigenvalue-limited).
pub const FREEZE_RE: f64 = 1e-7;

/// Uniform-modulus test in the mixed-unitary decomposition.
pub const UNIFORM_MODULUS: f64 = 1e-9;

/// Triangle-equality test in phase-alignment checks.
pub const ALIGNMENT: f64 = 1e-9;

/// Row/column sums of a bistochastic matrix.
pub const BISTOCHASTIC: f64 = 1e-9;

/// Entrywise comparison of routed 2x2 blocks.
pub const BLOCK_EQ: f64 = 1e-9;

/// X-state decomposition reassembly.
pub const REASSEMBLY: f64 = 1e-10;

/// Eigensolver convergence: off-diagonal Frobenius norm target.
pub const EIGEN_OFFDIAG: f64 = 1e-12;

/// Eigendecomposition reconstruction residual.
pub const EIGEN_RESIDUAL: f64 = 1e-9;

/// Eigenvalues below this are treated as 0 in entropies.
pub const ENTROPY_CLIP: f64 = 1e-12;
