//! The two coherence quantifiers and their ingredients.
//!
//! * `c_l1` — l1 norm of coherence, Σ_{i≠j} |ρ_ij|.
//! * `c_re` — relative entropy of coherence, S(Δ(ρ)) − S(ρ), where Δ is full
//!   dephasing and S(ρ) = −Tr ρ log₂ ρ is the von Neumann entropy in bits.
//!   This sign convention is the one under which both quantities are
//!   nonnegative and vanish exactly on incoherent states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{herm_eigenvalues, CMatrix};
use crate::states::DensityMatrix;
use crate::tol;

/// Which coherence quantifier a value or verdict refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    L1,
    RelEnt,
}

impl Measure {
    /// Freezing tolerance: |C(ρ) − C(Φρ)| at or below this counts as equal.
    pub fn freeze_tol(self) -> f64 {
        match self {
            Measure::L1 => tol::FREEZE_L1,
            Measure::RelEnt => tol::FREEZE_RE,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::L1 => write!(f, "l1"),
            Measure::RelEnt => write!(f, "re"),
        }
    }
}

/// A nonnegative coherence value tagged with its measure.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct CoherenceValue {
    pub measure: Measure,
    pub value: f64,
}

impl CoherenceValue {
    fn new(measure: Measure, raw: f64) -> Self {
        // Clamp round-off that dips just below zero.
        let value = if raw < 0.0 && raw > -1e-9 { 0.0 } else { raw };
        Self { measure, value }
    }
}

/// Full dephasing: delete all off-diagonal entries.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut m = CMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = num_complex::Complex64::new(rho.entry(i, i).re, 0.0);
    }
    DensityMatrix::new(m).expect("dephasing a state yields a state")
}

/// Von Neumann entropy in bits, with 0·log 0 := 0.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = herm_eigenvalues(rho.mat())?;
    Ok(entropy_of_spectrum(&eigs))
}

/// Shannon entropy (bits) of a spectrum; values below the clip are zero.
pub fn entropy_of_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > tol::ENTROPY_CLIP)
        .map(|&l| -l * l.log2())
        .sum()
}

/// l1 norm of coherence: Σ_{i≠j} |ρ_ij|.
pub fn c_l1(rho: &DensityMatrix) -> CoherenceValue {
    let d = rho.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += rho.entry(i, j).norm();
            }
        }
    }
    CoherenceValue::new(Measure::L1, sum)
}

/// Relative entropy of coherence: S(Δρ) − S(ρ), in bits.
pub fn c_re(rho: &DensityMatrix) -> Result<CoherenceValue> {
    let diag_entropy = entropy_of_spectrum(&rho.diagonal());
    let state_entropy = entropy(rho)?;
    Ok(CoherenceValue::new(
        Measure::RelEnt,
        diag_entropy - state_entropy,
    ))
}

/// Evaluate one measure on a state.
pub fn coherence(rho: &DensityMatrix, measure: Measure) -> Result<CoherenceValue> {
    match measure {
        Measure::L1 => Ok(c_l1(rho)),
        Measure::RelEnt => c_re(rho),
    }
}
