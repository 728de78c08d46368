//! Freezing checks on X states via their direct-sum block form.
//!
//! Under the pairing permutation π (π(i) = 2i-1, π(d+1-i) = 2i, 1-based),
//! an X state becomes a direct sum of 2×2 blocks, ⊕ λ_i ρ_i, plus a scalar
//! tail when d is odd. An SIO freezes coherence on X states exactly when
//! every conjugated Kraus operator P_π K P_π† factors as a permutation of
//! pair slots times per-block scalars δ_{αi} and diagonal phase blocks
//! (within-pair swaps fold into the permutation), with per-block
//! completeness Σ_α δ_{αi}² = 1, and:
//!
//! * l1 norm — the contributions routed into each target pair satisfy the
//!   triangle equality (common argument), or
//! * relative entropy — the routed block states themselves coincide at each
//!   target pair, which pins both phases and block contents.
//!
//! All index bookkeeping below happens in post-pairing coordinates;
//! conversion to the original basis happens only at the boundary.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freeze::{emit_mismatch, operational_frozen};
use crate::linalg::{CMatrix, Permutation};
use crate::measures::{c_re, Measure};
use crate::sio::{SioChannel, SioKraus};
use crate::states::{classify, DensityMatrix};
use crate::tol;

/// Direct-sum decomposition of an X state.
#[derive(Clone, Debug)]
pub struct XDecomposition {
    /// The pairing permutation.
    pub pi: Permutation,
    /// Block weights λ_i = ρ_ii + ρ_(d+1-i)(d+1-i).
    pub lambdas: Vec<f64>,
    /// Normalized 2×2 blocks.
    pub blocks: Vec<DensityMatrix>,
    /// Scalar weight of the unpaired center index (odd d).
    pub tail: Option<f64>,
}

impl XDecomposition {
    /// Rebuild the original state: P_π† (⊕ λ_i ρ_i [⊕ tail]) P_π.
    pub fn reassemble(&self) -> Result<DensityMatrix> {
        let d = self.pi.dim();
        let mut m = CMatrix::zeros(d);
        for (i, (lambda, block)) in self.lambdas.iter().zip(&self.blocks).enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    m[(2 * i + a, 2 * i + b)] =
                        Complex64::new(*lambda, 0.0) * block.entry(a, b);
                }
            }
        }
        if let Some(tail) = self.tail {
            m[(d - 1, d - 1)] = Complex64::new(tail, 0.0);
        }
        // P_π† M P_π = conjugation by π⁻¹.
        let back = crate::linalg::permute_conjugate(&m, &self.pi.inverse());
        DensityMatrix::new(back)
    }
}

/// Pairing permutation: π(i) = 2i-1 and π(d+1-i) = 2i for i = 1..⌊d/2⌋,
/// plus π(⌊d/2⌋+1) = d when d is odd (all 1-based).
pub fn pairing_permutation(d: usize) -> Permutation {
    assert!(d >= 2);
    let nb = d / 2;
    let mut map = vec![0usize; d];
    for j in 0..nb {
        map[j] = 2 * j;
        map[d - 1 - j] = 2 * j + 1;
    }
    if d % 2 == 1 {
        map[nb] = d - 1;
    }
    Permutation::from_zero_based(map).expect("pairing is a bijection")
}

/// Split an X state into its pairing blocks.
pub fn decompose_x(rho: &DensityMatrix) -> Result<XDecomposition> {
    let class = classify(rho);
    if !class.in_omega_x {
        return Err(Error::NotXState {
            reason: class.detail,
        });
    }
    let d = rho.dim();
    let nb = d / 2;
    let pi = pairing_permutation(d);
    let mut lambdas = Vec::with_capacity(nb);
    let mut blocks = Vec::with_capacity(nb);
    for i in 0..nb {
        let j = d - 1 - i;
        let lambda = rho.entry(i, i).re + rho.entry(j, j).re;
        let inv = Complex64::new(1.0 / lambda, 0.0);
        let mut b = CMatrix::zeros(2);
        b[(0, 0)] = rho.entry(i, i) * inv;
        b[(0, 1)] = rho.entry(i, j) * inv;
        b[(1, 0)] = rho.entry(j, i) * inv;
        b[(1, 1)] = rho.entry(j, j) * inv;
        lambdas.push(lambda);
        blocks.push(DensityMatrix::new(b)?);
    }
    let tail = (d % 2 == 1).then(|| rho.entry(d / 2, d / 2).re);
    Ok(XDecomposition {
        pi,
        lambdas,
        blocks,
        tail,
    })
}

/// Shape of the unpaired column for odd dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum OddKind {
    /// Even dimension: no tail.
    None,
    /// Coefficient on |d⟩⟨d| (may be zero).
    DiagonalTail(Complex64),
    /// Pure rank-one operator c·|target⟩⟨d| with everything else zero;
    /// `target` is a 0-based post-pairing row < d-1.
    RankOne { target: usize, coeff: Complex64 },
}

/// A Kraus operator in pair-block form (post-pairing coordinates):
/// P_π K P_π† = P_f · ⊕_i δ_i · diag(e^{iθ_i1}, e^{iθ_i2}) (+ tail term).
#[derive(Clone, Debug)]
pub struct BlockKrausForm {
    /// Full post-pairing permutation, including within-pair swaps.
    pub f: Permutation,
    /// Block-index routing i ↦ m derived from `f` (identity on zero-weight
    /// blocks).
    pub f_pair: Vec<usize>,
    /// Whether the routing of block i crosses within the target pair.
    pub crossed: Vec<bool>,
    /// Per-block scalars δ_i ≥ 0.
    pub deltas: Vec<f64>,
    /// Per-block phases (θ_i1, θ_i2).
    pub phase_pairs: Vec<(f64, f64)>,
    pub odd_kind: OddKind,
}

impl BlockKrausForm {
    /// Dense post-pairing matrix of this form.
    pub fn reconstruct(&self) -> CMatrix {
        let nb = self.deltas.len();
        let d = self.f.dim();
        let mut m = CMatrix::zeros(d);
        for i in 0..nb {
            if self.deltas[i] <= tol::ZERO_ENTRY {
                continue;
            }
            let target = self.f_pair[i];
            let (r0, r1) = if self.crossed[i] {
                (2 * target + 1, 2 * target)
            } else {
                (2 * target, 2 * target + 1)
            };
            m[(r0, 2 * i)] = Complex64::from_polar(self.deltas[i], self.phase_pairs[i].0);
            m[(r1, 2 * i + 1)] = Complex64::from_polar(self.deltas[i], self.phase_pairs[i].1);
        }
        match self.odd_kind {
            OddKind::None => {}
            OddKind::DiagonalTail(c) => {
                if c.norm() > tol::ZERO_ENTRY {
                    m[(d - 1, d - 1)] = c;
                }
            }
            OddKind::RankOne { target, coeff } => {
                m[(target, d - 1)] = coeff;
            }
        }
        m
    }
}

/// Conjugate a parsed Kraus operator into post-pairing coordinates:
/// returns P_π K P_π† still in parsed (permutation, coefficients) form.
fn pair_conjugate_kraus(k: &SioKraus, pi: &Permutation) -> SioKraus {
    let d = k.dim();
    let inv = pi.inverse();
    // Column c of the conjugated matrix is column π⁻¹(c) of K routed to
    // row π(f(π⁻¹(c))).
    let mut map = Vec::with_capacity(d);
    let mut coeffs = Vec::with_capacity(d);
    for c in 0..d {
        let src = inv.apply(c);
        map.push(pi.apply(k.perm().apply(src)));
        coeffs.push(k.coeff(src));
    }
    SioKraus::new(
        Permutation::from_zero_based(map).expect("conjugation preserves bijections"),
        coeffs,
    )
    .expect("dims preserved")
}

/// Inverse of [`pair_conjugate_kraus`]: map a post-pairing Kraus operator
/// back to the original basis.
fn unpair_kraus(post: &SioKraus, pi: &Permutation) -> SioKraus {
    pair_conjugate_kraus(post, &pi.inverse())
}

/// Build a channel from dense Kraus matrices given in post-pairing
/// coordinates (the basis in which X states are block diagonal).
pub fn channel_from_paired(matrices: &[CMatrix]) -> Result<SioChannel> {
    let Some(first) = matrices.first() else {
        return Err(Error::NotComplete { deviation: 1.0 });
    };
    let pi = pairing_permutation(first.dim());
    let kraus: Result<Vec<SioKraus>> = matrices
        .iter()
        .map(|m| Ok(unpair_kraus(&crate::sio::validate_kraus_matrix(m)?, &pi)))
        .collect();
    SioChannel::new(kraus?)
}

/// Try to read one Kraus operator in pair-block form. Absence means the
/// operator does not have the structure (so the channel cannot freeze
/// coherence on X states).
pub fn parse_block_form(k: &SioKraus, pi: &Permutation) -> Option<BlockKrausForm> {
    let d = k.dim();
    let nb = d / 2;
    let odd = d % 2 == 1;
    let post = pair_conjugate_kraus(k, pi);

    // Nonzero structure per column.
    let entry_of_col = |c: usize| -> Option<(usize, Complex64)> {
        let coeff = post.coeff(c);
        (coeff.norm() > tol::ZERO_ENTRY).then(|| (post.perm().apply(c), coeff))
    };
    let nonzero_count = (0..d).filter(|&c| entry_of_col(c).is_some()).count();

    // Odd d: the pure rank-one form |t⟩⟨d| with t < d-1.
    if odd && nonzero_count == 1 {
        if let Some((target, coeff)) = entry_of_col(d - 1) {
            if target < d - 1 {
                return Some(BlockKrausForm {
                    f: post.perm().clone(),
                    f_pair: (0..nb).collect(),
                    crossed: vec![false; nb],
                    deltas: vec![0.0; nb],
                    phase_pairs: vec![(0.0, 0.0); nb],
                    odd_kind: OddKind::RankOne { target, coeff },
                });
            }
        }
    }

    let odd_kind = if odd {
        match entry_of_col(d - 1) {
            None => OddKind::DiagonalTail(Complex64::ZERO),
            Some((row, coeff)) if row == d - 1 => OddKind::DiagonalTail(coeff),
            Some(_) => return None, // tail leaks into a pair without rank-one form
        }
    } else {
        OddKind::None
    };

    let mut f_pair = Vec::with_capacity(nb);
    let mut crossed = Vec::with_capacity(nb);
    let mut deltas = Vec::with_capacity(nb);
    let mut phase_pairs = Vec::with_capacity(nb);
    for i in 0..nb {
        let e0 = entry_of_col(2 * i);
        let e1 = entry_of_col(2 * i + 1);
        match (e0, e1) {
            (None, None) => {
                f_pair.push(i);
                crossed.push(false);
                deltas.push(0.0);
                phase_pairs.push((0.0, 0.0));
            }
            (Some((r0, c0)), Some((r1, c1))) => {
                if r0.max(r1) >= 2 * nb {
                    return None; // routed onto the tail index
                }
                let m = r0 / 2;
                if r1 / 2 != m {
                    return None; // pair split across targets
                }
                let is_crossed = r0 == 2 * m + 1;
                if (is_crossed && r1 != 2 * m) || (!is_crossed && r1 != 2 * m + 1) {
                    return None;
                }
                if (c0.norm() - c1.norm()).abs() > tol::UNIFORM_MODULUS {
                    return None; // non-uniform modulus inside the block
                }
                f_pair.push(m);
                crossed.push(is_crossed);
                deltas.push(0.5 * (c0.norm() + c1.norm()));
                phase_pairs.push((c0.arg(), c1.arg()));
            }
            _ => return None, // half-empty block
        }
    }
    Some(BlockKrausForm {
        f: post.perm().clone(),
        f_pair,
        crossed,
        deltas,
        phase_pairs,
        odd_kind,
    })
}

/// Witness payload for reports.
#[derive(Serialize, Clone, Debug)]
pub struct BlockFormJson {
    /// 1-based pair routing per source block.
    pub pair_map: Vec<usize>,
    pub crossed: Vec<bool>,
    pub deltas: Vec<f64>,
    pub phase_pairs: Vec<[f64; 2]>,
    pub odd: String,
}

impl BlockFormJson {
    fn from_form(form: &BlockKrausForm) -> Self {
        Self {
            pair_map: form.f_pair.iter().map(|&m| m + 1).collect(),
            crossed: form.crossed.clone(),
            deltas: form.deltas.clone(),
            phase_pairs: form.phase_pairs.iter().map(|&(a, b)| [a, b]).collect(),
            odd: match form.odd_kind {
                OddKind::None => "none".to_string(),
                OddKind::DiagonalTail(c) => format!("tail({:.6}{:+.6}i)", c.re, c.im),
                OddKind::RankOne { target, coeff } => {
                    format!("rank-one(target {}, {:.6}{:+.6}i)", target + 1, coeff.re, coeff.im)
                }
            },
        }
    }
}

/// Structural freeze report on the X-state route.
#[derive(Serialize, Clone, Debug)]
pub struct XStructuralReport {
    pub measure: Measure,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<BlockFormJson>>,
    pub operational_frozen: bool,
    pub agreement: bool,
}

/// One normalized 2×2 state contributed into a target pair, with its weight.
struct Contribution {
    weight: f64,
    state: CMatrix,
    /// Complex off-diagonal contribution to the target pair (unnormalized),
    /// used for the l1 triangle equality.
    offdiag: Complex64,
}

fn rotated_block(
    block: &DensityMatrix,
    phases: (f64, f64),
    crossed: bool,
) -> CMatrix {
    // U ρ U† with U = diag(e^{iθ1}, e^{iθ2}), then a within-pair swap if the
    // routing crosses.
    let mut m = CMatrix::zeros(2);
    let rot = Complex64::from_polar(1.0, phases.0 - phases.1);
    m[(0, 0)] = block.entry(0, 0);
    m[(1, 1)] = block.entry(1, 1);
    m[(0, 1)] = rot * block.entry(0, 1);
    m[(1, 0)] = m[(0, 1)].conj();
    if crossed {
        let mut s = CMatrix::zeros(2);
        s[(0, 0)] = m[(1, 1)];
        s[(1, 1)] = m[(0, 0)];
        s[(0, 1)] = m[(1, 0)];
        s[(1, 0)] = m[(0, 1)];
        s
    } else {
        m
    }
}

/// Structural verdict with hypotheses already established by the caller.
pub(crate) fn structural_verdict(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<bool> {
    Ok(verdict_and_witness(phi, rho, measure)?.0)
}

fn verdict_and_witness(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<(bool, Option<Vec<BlockFormJson>>)> {
    let d = phi.dim();
    let nb = d / 2;
    let pi = pairing_permutation(d);
    let xdec = decompose_x(rho)?;

    let mut forms = Vec::with_capacity(phi.kraus().len());
    for k in phi.kraus() {
        match parse_block_form(k, &pi) {
            Some(form) => forms.push(form),
            None => return Ok((false, None)),
        }
    }
    let witness: Vec<BlockFormJson> = forms.iter().map(BlockFormJson::from_form).collect();

    // Per-block completeness Σ_α δ_{αi}² = 1.
    for i in 0..nb {
        let sum: f64 = forms.iter().map(|f| f.deltas[i] * f.deltas[i]).sum();
        if (sum - 1.0).abs() > tol::COMPLETENESS {
            return Ok((false, Some(witness)));
        }
    }

    // Collect contributions per target pair.
    let mut per_target: Vec<Vec<Contribution>> = (0..nb).map(|_| Vec::new()).collect();
    for form in &forms {
        for i in 0..nb {
            let delta = form.deltas[i];
            if delta <= tol::ZERO_ENTRY {
                continue;
            }
            let weight = delta * delta * xdec.lambdas[i];
            let state = rotated_block(&xdec.blocks[i], form.phase_pairs[i], form.crossed[i]);
            let offdiag = Complex64::new(weight, 0.0) * state[(0, 1)];
            per_target[form.f_pair[i]].push(Contribution {
                weight,
                state,
                offdiag,
            });
        }
        if let OddKind::RankOne { target, coeff } = form.odd_kind {
            let tail = xdec.tail.expect("rank-one form implies odd dimension");
            let weight = coeff.norm_sqr() * tail;
            if weight > tol::ZERO_ENTRY {
                let mut spike = CMatrix::zeros(2);
                spike[(target % 2, target % 2)] = Complex64::ONE;
                per_target[target / 2].push(Contribution {
                    weight,
                    state: spike,
                    offdiag: Complex64::ZERO,
                });
            }
        }
    }

    let verdict = match measure {
        Measure::L1 => per_target.iter().all(|contribs| {
            let total: Complex64 = contribs.iter().map(|c| c.offdiag).sum();
            let modulus_sum: f64 = contribs.iter().map(|c| c.offdiag.norm()).sum();
            modulus_sum - total.norm() <= tol::ALIGNMENT
        }),
        Measure::RelEnt => per_target.iter().all(|contribs| {
            contribs.iter().all(|c| {
                c.weight <= tol::ZERO_ENTRY
                    || c.state.max_abs_diff(&contribs[0].state) <= tol::BLOCK_EQ
            })
        }),
    };
    Ok((verdict, Some(witness)))
}

/// Structural check on the X-state route: both ρ and Φ(ρ) must be X states.
/// The verdict is compared against the operational one; disagreement is a
/// correctness alarm dumped to stderr.
pub fn structural_check(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<XStructuralReport> {
    let sigma = phi.apply(rho)?;
    let class_in = classify(rho);
    let class_out = classify(&sigma);
    if !class_in.in_omega_x || !class_out.in_omega_x {
        return Err(Error::HypothesisNotMet {
            reason: format!(
                "state or image outside the X-state set: input {}, image {}",
                class_in.tag(),
                class_out.tag()
            ),
        });
    }
    let (verdict, witness) = verdict_and_witness(phi, rho, measure)?;
    let operational = operational_frozen(rho, &sigma, measure, measure.freeze_tol())?;
    let agreement = verdict == operational;
    let report = XStructuralReport {
        measure,
        verdict,
        witness,
        operational_frozen: operational,
        agreement,
    };
    if !agreement {
        emit_mismatch("x-structural", phi, rho, &report);
    }
    Ok(report)
}

/// Per-class bookkeeping of an invariance probe run.
#[derive(Serialize, Clone, Debug)]
pub struct ClassCount {
    pub class: String,
    pub samples: usize,
    /// Samples on which the channel froze the relative entropy of coherence.
    pub retained: usize,
    /// Retained samples whose class membership survived the channel.
    pub preserved: usize,
}

/// Result of [`omega_invariance_probe`].
#[derive(Serialize, Clone, Debug)]
pub struct InvarianceReport {
    pub counts: Vec<ClassCount>,
    /// Indices (into the sample list) of retained samples whose class was
    /// not preserved.
    pub violations: Vec<usize>,
}

impl InvarianceReport {
    pub fn all_preserved(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn retained_total(&self) -> usize {
        self.counts.iter().map(|c| c.retained).sum()
    }
}

/// Check class preservation of a channel over supplied states, retaining
/// only samples on which the channel freezes the relative entropy of
/// coherence (skipped samples are counted, not judged).
pub fn omega_invariance_probe(
    phi: &SioChannel,
    samples: &[DensityMatrix],
) -> Result<InvarianceReport> {
    let mut counts: std::collections::BTreeMap<String, ClassCount> = Default::default();
    let mut violations = Vec::new();
    for (idx, rho) in samples.iter().enumerate() {
        let class_in = classify(rho);
        let name = class_in.tag().to_string();
        let entry = counts.entry(name.clone()).or_insert(ClassCount {
            class: name,
            samples: 0,
            retained: 0,
            preserved: 0,
        });
        entry.samples += 1;

        let sigma = phi.apply(rho)?;
        let before = c_re(rho)?.value;
        let after = c_re(&sigma)?.value;
        if (before - after).abs() > tol::FREEZE_RE {
            continue; // not frozen on this sample
        }
        entry.retained += 1;

        let class_out = classify(&sigma);
        let preserved = (!class_in.in_omega || class_out.in_omega)
            && (!class_in.in_omega_x || class_out.in_omega_x)
            && (!class_in.incoherent || class_out.incoherent);
        if preserved {
            entry.preserved += 1;
        } else {
            violations.push(idx);
        }
    }
    Ok(InvarianceReport {
        counts: counts.into_values().collect(),
        violations,
    })
}

/// What a sampled (state, channel) pair is built to exercise.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum XInstanceKind {
    /// Both measures frozen: routed block states coincide by construction.
    ReFrozen,
    /// l1 frozen (phase-aligned collisions) but distinct routed states, so
    /// the relative entropy of coherence drops.
    L1AlignedOnly,
    /// Block-form channel with random phases: neither measure frozen.
    Misaligned,
    /// Valid SIO whose Kraus operators are not in pair-block form
    /// (non-uniform moduli within a block); support is preserved so the
    /// hypothesis still holds.
    NonBlock,
}

/// Construct a (state, channel) pair on X states for the given scenario.
pub fn sample_x_instance(
    d: usize,
    kind: XInstanceKind,
    seed: u64,
) -> (DensityMatrix, SioChannel) {
    assert!(d >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = d / 2;
    let odd = d % 2 == 1;
    let pi = pairing_permutation(d);
    let tau = std::f64::consts::TAU;

    // Random block weights plus tail.
    let slots = nb + usize::from(odd);
    let mut weights: Vec<f64> = (0..slots).map(|_| rng.gen_range(0.5..1.5)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let tail = odd.then(|| weights[nb]);

    // Blocks: for ReFrozen all blocks share diagonal and modulus and differ
    // by a phase rotation; otherwise fully generic coherent blocks.
    let shared_a: f64 = rng.gen_range(0.25..0.75);
    let shared_r = 0.8 * (shared_a * (1.0 - shared_a)).sqrt() * rng.gen_range(0.3..1.0);
    let mut block_phases = Vec::with_capacity(nb);
    let mut blocks = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (a, r, psi) = match kind {
            XInstanceKind::ReFrozen => {
                let psi = rng.gen_range(0.0..tau);
                (shared_a, shared_r, psi)
            }
            _ => {
                let a: f64 = rng.gen_range(0.2..0.8);
                let r = 0.8 * (a * (1.0 - a)).sqrt() * rng.gen_range(0.3..1.0);
                (a, r, rng.gen_range(0.0..tau))
            }
        };
        let mut b = CMatrix::zeros(2);
        b[(0, 0)] = Complex64::new(a, 0.0);
        b[(1, 1)] = Complex64::new(1.0 - a, 0.0);
        b[(0, 1)] = Complex64::from_polar(r, psi);
        b[(1, 0)] = b[(0, 1)].conj();
        block_phases.push(psi);
        blocks.push(DensityMatrix::new(b).expect("2x2 block is a state"));
    }
    let xdec = XDecomposition {
        pi: pi.clone(),
        lambdas: weights[..nb].to_vec(),
        blocks,
        tail,
    };
    let rho = xdec.reassemble().expect("assembled X state is valid");

    let kraus_count = 2 + usize::from(rng.gen_bool(0.4));

    if kind == XInstanceKind::NonBlock {
        // Identity routing with per-column (not per-block) coefficients.
        let mut columns: Vec<Vec<Complex64>> = vec![Vec::with_capacity(d); kraus_count];
        for _ in 0..d {
            let mut v: Vec<f64> = (0..kraus_count)
                .map(|_| rng.gen_range(0.2..1.0))
                .collect();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (alpha, x) in v.iter_mut().enumerate() {
                columns[alpha]
                    .push(Complex64::from_polar(*x / norm, rng.gen_range(0.0..tau)));
            }
        }
        let kraus: Vec<SioKraus> = columns
            .into_iter()
            .map(|coeffs| {
                let post =
                    SioKraus::new(Permutation::identity(d), coeffs).expect("dims match");
                unpair_kraus(&post, &pi)
            })
            .collect();
        let phi = SioChannel::new(kraus).expect("unit columns are complete");
        return (rho, phi);
    }

    // Per-block weights over Kraus operators: unit vectors, all entries
    // bounded away from zero.
    let mut delta_columns: Vec<Vec<f64>> = Vec::with_capacity(nb);
    for _ in 0..nb {
        let mut v: Vec<f64> = (0..kraus_count).map(|_| rng.gen_range(0.35..1.0)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        delta_columns.push(v);
    }
    let tail_column: Vec<f64> = {
        let mut v: Vec<f64> = (0..kraus_count).map(|_| rng.gen_range(0.35..1.0)).collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        v
    };

    // Target-pair arguments for aligned constructions.
    let chi: Vec<f64> = (0..nb).map(|_| rng.gen_range(0.0..tau)).collect();

    let mut kraus = Vec::with_capacity(kraus_count);
    for alpha in 0..kraus_count {
        // Pair routing: identity for the first operator; later operators
        // rotate the blocks (and may cross within pairs) so that targets
        // genuinely collect several distinct sources.
        let (shift, cross_all) = if alpha == 0 {
            (0, false)
        } else if nb >= 2 {
            (alpha % nb, rng.gen_bool(0.5))
        } else {
            (0, true)
        };
        let mut post = CMatrix::zeros(d);
        for i in 0..nb {
            let m = (i + shift) % nb;
            let delta = delta_columns[i][alpha];
            // ReFrozen keeps straight routing so the rotated blocks match.
            let crossed = cross_all && kind != XInstanceKind::ReFrozen;
            let dtheta = match kind {
                XInstanceKind::ReFrozen => block_phases[m] - block_phases[i],
                XInstanceKind::L1AlignedOnly => {
                    if crossed {
                        // conj-contribution aligns at -Δθ - ψ_i = χ_m.
                        -(chi[m] + block_phases[i])
                    } else {
                        chi[m] - block_phases[i]
                    }
                }
                XInstanceKind::Misaligned => rng.gen_range(0.0..tau),
                XInstanceKind::NonBlock => unreachable!(),
            };
            let theta2 = rng.gen_range(0.0..tau);
            let theta1 = dtheta + theta2;
            let (r0, r1) = if crossed {
                (2 * m + 1, 2 * m)
            } else {
                (2 * m, 2 * m + 1)
            };
            post[(r0, 2 * i)] = Complex64::from_polar(delta, theta1);
            post[(r1, 2 * i + 1)] = Complex64::from_polar(delta, theta2);
        }
        if odd {
            post[(d - 1, d - 1)] = Complex64::new(tail_column[alpha], 0.0);
        }
        let parsed = crate::sio::validate_kraus_matrix(&post).expect("built as block form");
        kraus.push(unpair_kraus(&parsed, &pi));
    }
    let phi = SioChannel::new(kraus).expect("per-block unit weights are complete");
    (rho, phi)
}
