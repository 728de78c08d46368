//! JSON wire formats for states and channels.
//!
//! State files: `{"dim": d, "entries": [[re, im], ...]}` with d² row-major
//! entries. Channel files: `{"dim": d, "kraus": [{"perm": [f(1), …, f(d)],
//! "coeffs": [[re, im], …]}, …]}` with 1-based permutation images, or
//! `{"dim": d, "kraus_dense": [matrix, …]}` where each matrix is a row-major
//! entry list in the state encoding; dense input is validated as a family of
//! generalized permutations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Permutation};
use crate::sio::{validate_sio, SioChannel, SioKraus};
use crate::states::DensityMatrix;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StateJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl StateJson {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            dim: rho.dim(),
            entries: rho.mat().entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn into_state(self) -> Result<DensityMatrix> {
        let entries: Vec<Complex64> = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        DensityMatrix::new(CMatrix::from_rows(self.dim, &entries)?)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct KrausJson {
    /// Permutation images f(1), …, f(d), 1-based.
    pub perm: Vec<usize>,
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ChannelJson {
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<KrausJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kraus_dense: Option<Vec<Vec<[f64; 2]>>>,
}

impl ChannelJson {
    pub fn from_channel(phi: &SioChannel) -> Self {
        Self {
            dim: phi.dim(),
            kraus: Some(
                phi.kraus()
                    .iter()
                    .map(|k| KrausJson {
                        perm: k.perm().one_based(),
                        coeffs: k.coeffs().iter().map(|z| [z.re, z.im]).collect(),
                    })
                    .collect(),
            ),
            kraus_dense: None,
        }
    }

    pub fn into_channel(self) -> Result<SioChannel> {
        match (self.kraus, self.kraus_dense) {
            (Some(parsed), None) => {
                let kraus: Result<Vec<SioKraus>> = parsed
                    .into_iter()
                    .map(|k| {
                        let f = Permutation::from_one_based(&k.perm)?;
                        let coeffs: Vec<Complex64> = k
                            .coeffs
                            .iter()
                            .map(|&[re, im]| Complex64::new(re, im))
                            .collect();
                        SioKraus::new(f, coeffs)
                    })
                    .collect();
                SioChannel::new(kraus?)
            }
            (None, Some(dense)) => {
                let matrices: Result<Vec<CMatrix>> = dense
                    .into_iter()
                    .map(|entries| {
                        let complex: Vec<Complex64> = entries
                            .iter()
                            .map(|&[re, im]| Complex64::new(re, im))
                            .collect();
                        CMatrix::from_rows(self.dim, &complex)
                    })
                    .collect();
                validate_sio(&matrices?)
            }
            (Some(_), Some(_)) => Err(Error::Format(
                "channel file sets both \"kraus\" and \"kraus_dense\"".into(),
            )),
            (None, None) => Err(Error::Format(
                "channel file needs either \"kraus\" or \"kraus_dense\"".into(),
            )),
        }
    }
}

pub fn state_to_string(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateJson::from_state(rho)).expect("state serializes")
}

pub fn state_from_str(text: &str) -> Result<DensityMatrix> {
    let parsed: StateJson = serde_json::from_str(text)?;
    parsed.into_state()
}

pub fn channel_to_string(phi: &SioChannel) -> String {
    serde_json::to_string_pretty(&ChannelJson::from_channel(phi)).expect("channel serializes")
}

pub fn channel_from_str(text: &str) -> Result<SioChannel> {
    let parsed: ChannelJson = serde_json::from_str(text)?;
    parsed.into_channel()
}
