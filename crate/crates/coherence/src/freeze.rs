//! Freezing checks for states with connected off-diagonal support (the set
//! Ω of [`crate::states`]).
//!
//! The structural facts implemented here:
//!
//! * An SIO freezes the l1 norm of coherence on Ω exactly when it is a
//!   convex mixture of strictly incoherent unitaries, Φ = Σ δ_α U_α·U_α†,
//!   whose routed contributions add up with a common argument at every
//!   output entry (triangle equality per (m, n); see
//!   [`phase_alignment_l1`]).
//! * It freezes the relative entropy of coherence on Ω exactly when a
//!   single strictly incoherent unitary U with Φ(ρ) = UρU† exists; the
//!   witness is recovered by [`find_freezing_unitary`].
//!
//! Every structural verdict is compared against the operational one (apply
//! the channel, evaluate the measure); a disagreement is a correctness
//! alarm and is dumped to stderr with a full reproduction witness.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json::{ChannelJson, StateJson};
use crate::linalg::{CMatrix, Permutation};
use crate::measures::{coherence, CoherenceValue, Measure};
use crate::sio::{random_permutation, SioChannel, SioKraus};
use crate::states::{classify, DensityMatrix};
use crate::tol;

/// One term of a mixed-unitary decomposition: weight δ, permutation f and
/// per-index phases θ reconstructing K = √δ Σ e^{iθ_i}|f(i)⟩⟨i|.
#[derive(Clone, Debug)]
pub struct MixedUnitaryTerm {
    pub delta: f64,
    pub f: Permutation,
    pub thetas: Vec<f64>,
}

/// Convex-mixture-of-strictly-incoherent-unitaries form of a channel.
#[derive(Clone, Debug)]
pub struct MixedUnitaryForm {
    pub terms: Vec<MixedUnitaryTerm>,
}

impl MixedUnitaryForm {
    pub fn dim(&self) -> usize {
        self.terms[0].f.dim()
    }

    /// Rebuild the channel K_α = √δ_α Σ_i e^{iθ_i^{(α)}}|f_α(i)⟩⟨i|.
    pub fn reconstruct_channel(&self) -> Result<SioChannel> {
        let kraus: Result<Vec<SioKraus>> = self
            .terms
            .iter()
            .map(|t| {
                let r = t.delta.sqrt();
                let coeffs = t
                    .thetas
                    .iter()
                    .map(|&th| Complex64::from_polar(r, th))
                    .collect();
                SioKraus::new(t.f.clone(), coeffs)
            })
            .collect();
        SioChannel::new(kraus?)
    }
}

/// Witness serialization payload (1-based permutations).
#[derive(Serialize, Clone, Debug)]
pub struct MixedUnitaryTermJson {
    pub delta: f64,
    pub perm: Vec<usize>,
    pub thetas: Vec<f64>,
}

/// Structural witness for a freezing verdict.
#[derive(Serialize, Clone, Debug)]
#[serde(rename_all = "snake_case")]
pub enum StructuralWitness {
    MixedUnitary { terms: Vec<MixedUnitaryTermJson> },
    Unitary { perm: Vec<usize>, thetas: Vec<f64> },
}

/// Outcome of a structural check, paired with the operational verdict.
#[derive(Serialize, Clone, Debug)]
pub struct StructuralReport {
    pub measure: Measure,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<StructuralWitness>,
    pub operational_frozen: bool,
    pub agreement: bool,
}

/// Operational + structural freeze report for one (channel, state, measure)
/// triple.
#[derive(Serialize, Clone, Debug)]
pub struct FreezeReport {
    pub measure: Measure,
    pub c_before: CoherenceValue,
    pub c_after: CoherenceValue,
    pub operational_frozen: bool,
    /// Present only when the state pair lies in a structured set.
    pub structural_frozen: Option<bool>,
    pub hypothesis_ok: bool,
    pub agreement: Option<bool>,
}

/// Doubly stochastic matrix acting on the diagonal of states.
#[derive(Clone, Debug)]
pub struct Bistochastic {
    dim: usize,
    entries: Vec<f64>,
}

impl Bistochastic {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        let b = Self { dim, entries };
        for k in 0..dim {
            let row: f64 = (0..dim).map(|j| b.get(k, j)).sum();
            let col: f64 = (0..dim).map(|i| b.get(i, k)).sum();
            if (row - 1.0).abs() > tol::BISTOCHASTIC || (col - 1.0).abs() > tol::BISTOCHASTIC {
                return Err(Error::NotProbabilityVector {
                    reason: format!("row/column {} sums to {row}/{col}", k + 1),
                });
            }
            if (0..dim).any(|j| b.get(k, j) < -tol::BISTOCHASTIC) {
                return Err(Error::NotProbabilityVector {
                    reason: format!("negative entry in row {}", k + 1),
                });
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Try to read a channel as a mixture of strictly incoherent unitaries.
///
/// Succeeds iff every Kraus operator has uniform coefficient moduli; then
/// δ_α = |d_{α,1}|² and θ_i^{(α)} = arg d_{α,i}. Absence is a verdict, not
/// an error.
pub fn decompose_mixed_unitary(phi: &SioChannel) -> Option<MixedUnitaryForm> {
    let mut terms = Vec::with_capacity(phi.kraus().len());
    for k in phi.kraus() {
        if k.modulus_spread() > tol::UNIFORM_MODULUS {
            return None;
        }
        let delta = k.coeff(0).norm_sqr();
        let thetas = k.coeffs().iter().map(|c| c.arg()).collect();
        terms.push(MixedUnitaryTerm {
            delta,
            f: k.perm().clone(),
            thetas,
        });
    }
    Some(MixedUnitaryForm { terms })
}

/// Triangle-equality test: for every output entry (m, n), m ≠ n, the routed
/// contributions δ_α e^{i(θ_i − θ_j)} ρ_ij (with i = f_α⁻¹(m), j = f_α⁻¹(n))
/// must attain |Σ z| = Σ |z|. When this holds, applying the channel leaves
/// Σ_{i≠j}|ρ_ij| unchanged.
pub fn phase_alignment_l1(form: &MixedUnitaryForm, rho: &DensityMatrix) -> bool {
    let d = form.dim();
    if rho.dim() != d {
        return false;
    }
    let inverses: Vec<Permutation> = form.terms.iter().map(|t| t.f.inverse()).collect();
    for m in 0..d {
        for n in 0..d {
            if m == n {
                continue;
            }
            let mut total = Complex64::ZERO;
            let mut modulus_sum = 0.0;
            for (term, inv) in form.terms.iter().zip(&inverses) {
                let i = inv.apply(m);
                let j = inv.apply(n);
                let entry = rho.entry(i, j);
                if entry.norm() <= tol::ZERO_ENTRY {
                    continue;
                }
                let z = term.delta
                    * Complex64::from_polar(1.0, term.thetas[i] - term.thetas[j])
                    * entry;
                total += z;
                modulus_sum += z.norm();
            }
            if modulus_sum - total.norm() > tol::ALIGNMENT {
                return false;
            }
        }
    }
    true
}

/// The doubly stochastic matrix moving diagonals: d_{mn} = Σ_{α: f_α(n)=m} δ_α.
pub fn bistochastic_of(form: &MixedUnitaryForm) -> Bistochastic {
    let d = form.dim();
    let mut entries = vec![0.0; d * d];
    for term in &form.terms {
        for n in 0..d {
            entries[term.f.apply(n) * d + n] += term.delta;
        }
    }
    Bistochastic::new(d, entries).expect("mixture weights sum to 1 per row/column")
}

/// x ≺ y: every k-prefix of the descending rearrangement of x is bounded by
/// that of y, with equality at k = d.
pub fn majorizes(y: &[f64], x: &[f64]) -> Result<bool> {
    check_probability_vector(y)?;
    check_probability_vector(x)?;
    if x.len() != y.len() {
        return Err(Error::DimMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    ys.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut px = 0.0;
    let mut py = 0.0;
    for (a, b) in xs.iter().zip(&ys) {
        px += a;
        py += b;
        if px > py + 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_probability_vector(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::NotProbabilityVector {
            reason: "empty vector".into(),
        });
    }
    if let Some(&bad) = v.iter().find(|&&p| p < -1e-9 || !p.is_finite()) {
        return Err(Error::NotProbabilityVector {
            reason: format!("entry {bad}"),
        });
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotProbabilityVector {
            reason: format!("sum {sum}"),
        });
    }
    Ok(())
}

/// Search limit: the permutation scan is exhaustive.
const UNITARY_SEARCH_MAX_DIM: usize = 8;

/// Find a strictly incoherent unitary U = P_π·diag(e^{iθ}) with
/// σ = UρU†, if one exists.
///
/// Scan permutations in lexicographic order (so the returned π is the
/// smallest match); for each candidate require diagonal match and
/// |σ_{π(i)π(j)}| = |ρ_ij|, then recover phase differences on the support
/// graph of ρ (gauge: θ = 0 at each component root and on untouched
/// indices) and verify by full reconstruction.
pub fn find_freezing_unitary(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<Option<(Permutation, Vec<f64>)>> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimMismatch {
            left: sigma.dim(),
            right: d,
        });
    }
    if d > UNITARY_SEARCH_MAX_DIM {
        return Err(Error::DimTooLarge {
            dim: d,
            max: UNITARY_SEARCH_MAX_DIM,
        });
    }

    use itertools::Itertools;
    'perms: for image in (0..d).permutations(d) {
        // Cheap filters before phase recovery.
        for i in 0..d {
            if (sigma.entry(image[i], image[i]).re - rho.entry(i, i).re).abs() > 1e-9 {
                continue 'perms;
            }
            for j in 0..d {
                if i != j
                    && (sigma.entry(image[i], image[j]).norm() - rho.entry(i, j).norm()).abs()
                        > 1e-9
                {
                    continue 'perms;
                }
            }
        }
        let pi = Permutation::from_zero_based(image.clone()).expect("permutation");
        if let Some(thetas) = recover_phases(rho, sigma, &pi) {
            return Ok(Some((pi, thetas)));
        }
    }
    Ok(None)
}

/// BFS phase assignment on the support graph, then full verification.
fn recover_phases(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    pi: &Permutation,
) -> Option<Vec<f64>> {
    let d = rho.dim();
    let mut thetas = vec![0.0; d];
    let mut visited = vec![false; d];
    let support = rho.support();

    for root in 0..d {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        thetas[root] = 0.0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..d {
                if visited[j] || !support.contains(i, j) {
                    continue;
                }
                // θ_i - θ_j = arg(σ_{π(i)π(j)} / ρ_ij) on support edges.
                let phase = (sigma.entry(pi.apply(i), pi.apply(j)) / rho.entry(i, j)).arg();
                thetas[j] = thetas[i] - phase;
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }

    // Global consistency by reconstruction: (UρU†)_{π(i)π(j)} =
    // e^{i(θ_i-θ_j)} ρ_ij.
    for i in 0..d {
        for j in 0..d {
            let rebuilt =
                Complex64::from_polar(1.0, thetas[i] - thetas[j]) * rho.entry(i, j);
            if (rebuilt - sigma.entry(pi.apply(i), pi.apply(j))).norm() > 1e-9 {
                return None;
            }
        }
    }
    Some(thetas)
}

/// Structural verdict for a (channel, state, measure) triple whose input and
/// output both lie in Ω; also runs the operational comparison and flags any
/// disagreement (the two must coincide).
pub fn structural_check(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<StructuralReport> {
    let sigma = phi.apply(rho)?;
    let class_in = classify(rho);
    let class_out = classify(&sigma);
    if !class_in.in_omega || !class_out.in_omega {
        return Err(Error::HypothesisNotMet {
            reason: format!(
                "state or image outside the connected-support set: input {}, image {}",
                class_in.tag(),
                class_out.tag()
            ),
        });
    }
    let (verdict, witness) = structural_verdict(phi, rho, &sigma, measure)?;
    let operational_frozen = operational_frozen(rho, &sigma, measure, measure.freeze_tol())?;
    let agreement = verdict == operational_frozen;
    let report = StructuralReport {
        measure,
        verdict,
        witness,
        operational_frozen,
        agreement,
    };
    if !agreement {
        emit_mismatch("omega-structural", phi, rho, &report);
    }
    Ok(report)
}

/// Verdict + witness with the hypothesis already established by the caller.
pub(crate) fn structural_verdict(
    phi: &SioChannel,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    measure: Measure,
) -> Result<(bool, Option<StructuralWitness>)> {
    match measure {
        Measure::L1 => match decompose_mixed_unitary(phi) {
            Some(form) => {
                let aligned = phase_alignment_l1(&form, rho);
                let witness = StructuralWitness::MixedUnitary {
                    terms: form
                        .terms
                        .iter()
                        .map(|t| MixedUnitaryTermJson {
                            delta: t.delta,
                            perm: t.f.one_based(),
                            thetas: t.thetas.clone(),
                        })
                        .collect(),
                };
                Ok((aligned, Some(witness)))
            }
            None => Ok((false, None)),
        },
        Measure::RelEnt => match find_freezing_unitary(rho, sigma)? {
            Some((pi, thetas)) => Ok((
                true,
                Some(StructuralWitness::Unitary {
                    perm: pi.one_based(),
                    thetas,
                }),
            )),
            None => Ok((false, None)),
        },
    }
}

pub(crate) fn operational_frozen(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    measure: Measure,
    freeze_tol: f64,
) -> Result<bool> {
    let before = coherence(rho, measure)?;
    let after = coherence(sigma, measure)?;
    Ok((before.value - after.value).abs() <= freeze_tol)
}

/// Dump a structural/operational disagreement to stderr with a full
/// reproduction witness.
pub(crate) fn emit_mismatch(
    context: &str,
    phi: &SioChannel,
    rho: &DensityMatrix,
    report: &impl Serialize,
) {
    #[derive(Serialize)]
    struct Payload<'a, R: Serialize> {
        context: &'a str,
        channel: ChannelJson,
        state: StateJson,
        report: &'a R,
    }
    let payload = Payload {
        context,
        channel: ChannelJson::from_channel(phi),
        state: StateJson::from_state(rho),
        report,
    };
    eprintln!(
        "structural-mismatch: {}",
        serde_json::to_string(&payload).unwrap_or_else(|e| format!("<serialize failed: {e}>"))
    );
}

/// Operational freeze check with structural verdicts where the hypotheses
/// apply: the connected-support route when ρ and Φ(ρ) are both in Ω, else
/// the X-state route when both are X states.
pub fn check_frozen(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<FreezeReport> {
    check_frozen_with_tol(phi, rho, measure, measure.freeze_tol())
}

/// [`check_frozen`] with an explicit freezing tolerance.
pub fn check_frozen_with_tol(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
    freeze_tol: f64,
) -> Result<FreezeReport> {
    let sigma = phi.apply(rho)?;
    let c_before = coherence(rho, measure)?;
    let c_after = coherence(&sigma, measure)?;
    let operational_frozen = (c_before.value - c_after.value).abs() <= freeze_tol;

    let class_in = classify(rho);
    let class_out = classify(&sigma);
    let structural_frozen = if class_in.in_omega && class_out.in_omega {
        Some(structural_verdict(phi, rho, &sigma, measure)?.0)
    } else if class_in.in_omega_x && class_out.in_omega_x {
        Some(crate::xfreeze::structural_verdict(phi, rho, measure)?)
    } else {
        None
    };
    let hypothesis_ok = structural_frozen.is_some();
    let agreement = structural_frozen.map(|s| s == operational_frozen);

    let report = FreezeReport {
        measure,
        c_before,
        c_after,
        operational_frozen,
        structural_frozen,
        hypothesis_ok,
        agreement,
    };
    if agreement == Some(false) {
        emit_mismatch("check-frozen", phi, rho, &report);
    }
    Ok(report)
}

/// A state with star-shaped support and a genuinely mixed channel whose
/// routed contributions phase-align on it, so the l1 norm of coherence is
/// frozen by construction. For d = 2 this is the two-unitary qubit family
/// with θ₁ + θ₂ + 2·arg(ρ₁₂) ≡ 0 (mod 2π).
pub fn sample_aligned_instance(
    d: usize,
    seed: u64,
) -> (DensityMatrix, SioChannel, MixedUnitaryForm) {
    assert!(d >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if d == 2 {
        let p: f64 = rng.gen_range(0.3..0.7);
        let bound = 0.9 * (p * (1.0 - p)).sqrt();
        let r = rng.gen_range(0.05..bound.max(0.06));
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = Complex64::new(p, 0.0);
        m[(1, 1)] = Complex64::new(1.0 - p, 0.0);
        m[(0, 1)] = Complex64::from_polar(r, theta);
        m[(1, 0)] = m[(0, 1)].conj();
        let rho = DensityMatrix::new(m).expect("PSD by construction");

        let delta = rng.gen_range(0.2..0.8);
        let theta1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let theta2 = -theta1 - 2.0 * theta;
        let form = MixedUnitaryForm {
            terms: vec![
                MixedUnitaryTerm {
                    delta,
                    f: Permutation::identity(2),
                    thetas: vec![theta1, 0.0],
                },
                MixedUnitaryTerm {
                    delta: 1.0 - delta,
                    f: Permutation::transposition(2, 0, 1),
                    thetas: vec![theta2, 0.0],
                },
            ],
        };
        let phi = form.reconstruct_channel().expect("weights sum to 1");
        return (rho, phi, form);
    }

    // Star-support state: edges (1, k). Diagonal dominance keeps it PSD.
    let mut diag: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = diag.iter().sum();
    diag.iter_mut().for_each(|p| *p /= total);
    let mut moduli = vec![0.0; d];
    let mut phases = vec![0.0; d];
    for k in 1..d {
        let cap = (diag[0] / d as f64).min(diag[k]) * 0.8;
        moduli[k] = rng.gen_range(0.25 * cap..cap);
        phases[k] = rng.gen_range(0.0..std::f64::consts::TAU);
    }
    let mut m = CMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = Complex64::new(diag[i], 0.0);
    }
    for k in 1..d {
        m[(0, k)] = Complex64::from_polar(moduli[k], phases[k]);
        m[(k, 0)] = m[(0, k)].conj();
    }
    let rho = DensityMatrix::new(m).expect("diagonally dominant, PSD");

    // Mixture of permutations fixing index 1; phases chosen so that every
    // contribution routed to (1, n) carries the argument of ρ_{1n}.
    let terms_count = 2 + (rng.gen_range(0..2u8) as usize);
    let mut deltas: Vec<f64> = (0..terms_count).map(|_| rng.gen_range(0.2..1.0)).collect();
    let dsum: f64 = deltas.iter().sum();
    deltas.iter_mut().for_each(|x| *x /= dsum);

    let mut terms = Vec::new();
    for (idx, &delta) in deltas.iter().enumerate() {
        let f = if idx == 0 {
            Permutation::identity(d)
        } else {
            // Random permutation of {2, …, d}, fixing 1.
            let sub = random_permutation(d - 1, &mut rng);
            let map: Vec<usize> = std::iter::once(0)
                .chain((1..d).map(|j| 1 + sub.apply(j - 1)))
                .collect();
            Permutation::from_zero_based(map).expect("bijection")
        };
        let thetas: Vec<f64> = (0..d)
            .map(|j| if j == 0 { 0.0 } else { phases[j] - phases[f.apply(j)] })
            .collect();
        terms.push(MixedUnitaryTerm { delta, f, thetas });
    }
    let form = MixedUnitaryForm { terms };
    let phi = form.reconstruct_channel().expect("weights sum to 1");
    (rho, phi, form)
}

/// Random SIO kept away from the mixed-unitary manifold: some Kraus operator
/// has coefficient moduli spread at least `min_spread`.
pub fn sample_nonuniform_channel(d: usize, seed: u64, min_spread: f64) -> SioChannel {
    let mut salt = 0u64;
    loop {
        let phi = crate::sio::random_channel(d, 2 + (seed as usize % 2), seed.wrapping_add(salt));
        if phi
            .kraus()
            .iter()
            .any(|k| k.modulus_spread() >= min_spread)
        {
            return phi;
        }
        salt = salt.wrapping_add(0x9e3779b97f4a7c15);
    }
}

/// Genuine two-permutation mixture of strictly incoherent unitaries.
pub fn sample_two_perm_mixture(d: usize, seed: u64) -> SioChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f1 = random_permutation(d, &mut rng);
    let f2 = loop {
        let f = random_permutation(d, &mut rng);
        if f != f1 {
            break f;
        }
    };
    let delta = rng.gen_range(0.25..0.75);
    let thetas = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..d)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect()
    };
    let form = MixedUnitaryForm {
        terms: vec![
            MixedUnitaryTerm {
                delta,
                f: f1,
                thetas: thetas(&mut rng),
            },
            MixedUnitaryTerm {
                delta: 1.0 - delta,
                f: f2,
                thetas: thetas(&mut rng),
            },
        ],
    };
    form.reconstruct_channel().expect("weights sum to 1")
}
