//! Brute-force verifiers and grid sweeps.
//!
//! Everything here is deliberately naive: sweeps evaluate the channel
//! directly and compare plain coherence values, and the unitary oracle scans
//! all permutations against a phase grid. None of it shares logic with the
//! analytic checkers beyond the base linear algebra, which is what makes the
//! cross-checks meaningful.
//!
//! Sweeps run through [`crate::exec`], so they are data-parallel under the
//! `parallel` feature and sequential otherwise, with identical output either
//! way. The `*_seq` variants always run sequentially and exist for the
//! benchmark comparison.

use itertools::Itertools;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::freeze;
use crate::measures::{c_l1, c_re, coherence, Measure};
use crate::sio::{qubit_freeze_channel, SioChannel};
use crate::states::{bell_admissible, bell_diagonal, classify, DensityMatrix};
use crate::tol;
use crate::xfreeze;

/// Outcome of the exhaustive unitary scan.
#[derive(Clone, Copy, Debug)]
pub struct OracleOutcome {
    pub reproducible: bool,
    /// Smallest max-entry deviation found over the whole scan.
    pub best_deviation: f64,
    pub tolerance: f64,
}

/// Decide by brute force whether some strictly incoherent unitary on the
/// phase grid {2πk/n} maps ρ to σ, within max-entry tolerance 10/n.
///
/// All d! permutations are scanned with the first phase gauge-fixed to 0.
/// Only meant to cross-check the analytic witness recovery; the cost grows
/// as d!·n^(d-1).
pub fn exhaustive_unitary_oracle(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phase_grid_n: usize,
) -> Result<bool> {
    Ok(exhaustive_unitary_search(rho, sigma, phase_grid_n)?.reproducible)
}

/// [`exhaustive_unitary_oracle`] with the best deviation attained.
pub fn exhaustive_unitary_search(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    phase_grid_n: usize,
) -> Result<OracleOutcome> {
    assert!(phase_grid_n >= 8, "phase grid too coarse");
    let d = rho.dim();
    if d > 4 {
        return Err(Error::DimTooLarge { dim: d, max: 4 });
    }
    if sigma.dim() != d {
        return Err(Error::DimMismatch {
            left: sigma.dim(),
            right: d,
        });
    }
    let tolerance = 10.0 / phase_grid_n as f64;
    let n = phase_grid_n;
    let step = std::f64::consts::TAU / n as f64;
    let mut best = f64::INFINITY;

    let mut phases = vec![0.0f64; d];
    for image in (0..d).permutations(d) {
        // Diagonal must already match: phases cannot fix it.
        let diag_dev = (0..d)
            .map(|i| (sigma.entry(image[i], image[i]).re - rho.entry(i, i).re).abs())
            .fold(0.0, f64::max);
        if diag_dev > tolerance {
            best = best.min(diag_dev);
            continue;
        }
        // Odometer over θ_2..θ_d with θ_1 = 0 (global phase gauge).
        let mut counters = vec![0usize; d.saturating_sub(1)];
        loop {
            for (slot, &k) in counters.iter().enumerate() {
                phases[slot + 1] = step * k as f64;
            }
            let mut dev: f64 = diag_dev;
            'entries: for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let rebuilt = Complex64::from_polar(1.0, phases[i] - phases[j])
                        * rho.entry(i, j);
                    dev = dev.max((rebuilt - sigma.entry(image[i], image[j])).norm());
                    if dev > best && dev > tolerance {
                        break 'entries;
                    }
                }
            }
            best = best.min(dev);
            if best <= tolerance {
                return Ok(OracleOutcome {
                    reproducible: true,
                    best_deviation: best,
                    tolerance,
                });
            }
            // Advance the odometer.
            let mut slot = 0;
            loop {
                if slot >= counters.len() {
                    break;
                }
                counters[slot] += 1;
                if counters[slot] < n {
                    break;
                }
                counters[slot] = 0;
                slot += 1;
            }
            if slot >= counters.len() {
                break;
            }
        }
    }
    Ok(OracleOutcome {
        reproducible: false,
        best_deviation: best,
        tolerance,
    })
}

/// Lower bound on how far σ sits from every strictly incoherent unitary
/// conjugate of ρ: phases change neither the diagonal nor off-diagonal
/// moduli, so min over permutations π of the worst deviation among
/// diagonal entries and off-diagonal moduli bounds the reachable distance
/// from below.
pub fn unitary_reach_margin(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimMismatch {
            left: sigma.dim(),
            right: d,
        });
    }
    if d > 8 {
        return Err(Error::DimTooLarge { dim: d, max: 8 });
    }
    let mut best = f64::INFINITY;
    for image in (0..d).permutations(d) {
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let s = sigma.entry(image[i], image[j]);
                let r = rho.entry(i, j);
                dev = dev.max(if i == j {
                    (s.re - r.re).abs()
                } else {
                    (s.norm() - r.norm()).abs()
                });
            }
        }
        best = best.min(dev);
    }
    Ok(best)
}

/// Two-permutation mixture whose action on ρ sits at least `margin` away
/// (in the [`unitary_reach_margin`] sense) from every unitary conjugate,
/// so brute-force and analytic unitary searches must both reject it.
pub fn sample_mixture_away_from_unitaries(
    rho: &DensityMatrix,
    seed: u64,
    margin: f64,
) -> Result<SioChannel> {
    let d = rho.dim();
    for salt in 0..1000u64 {
        let phi = freeze::sample_two_perm_mixture(d, seed.wrapping_add(salt * 0x9e37));
        let sigma = phi.apply(rho)?;
        if unitary_reach_margin(rho, &sigma)? >= margin {
            return Ok(phi);
        }
    }
    Err(Error::SamplingExhausted { attempts: 1000 })
}

/// One evaluated grid point of a sweep.
#[derive(Serialize, Clone, Debug)]
pub struct SweepPoint {
    pub params: Vec<f64>,
    pub c_before: f64,
    pub c_after: f64,
    pub frozen: bool,
    /// The closed-form freezing condition at this point.
    pub condition_met: bool,
    /// Structural verdict, when the state pair lies in the checker's domain.
    pub structural: Option<bool>,
}

/// A structural/operational disagreement with its reproduction data.
#[derive(Serialize, Clone, Debug)]
pub struct Disagreement {
    pub point_index: usize,
    pub point: SweepPoint,
}

/// Result of a sweep: per-point data plus checker agreement bookkeeping.
#[derive(Serialize, Clone, Debug)]
pub struct SweepResult {
    pub description: String,
    pub param_names: Vec<String>,
    pub measure: Measure,
    pub points: Vec<SweepPoint>,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
}

impl SweepResult {
    fn assemble(
        description: String,
        param_names: Vec<String>,
        measure: Measure,
        points: Vec<SweepPoint>,
    ) -> Self {
        let mut agreements = 0;
        let mut disagreements = Vec::new();
        for (idx, point) in points.iter().enumerate() {
            if let Some(structural) = point.structural {
                if structural == point.frozen {
                    agreements += 1;
                } else {
                    disagreements.push(Disagreement {
                        point_index: idx,
                        point: point.clone(),
                    });
                }
            }
        }
        Self {
            description,
            param_names,
            measure,
            points,
            agreements,
            disagreements,
        }
    }

    /// Does the operational freeze verdict match the closed-form condition
    /// at every point?
    pub fn condition_matches_frozen(&self) -> bool {
        self.points.iter().all(|p| p.frozen == p.condition_met)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.param_names.join(","));
        out.push_str(",c_before,c_after,frozen,structural\n");
        for p in &self.points {
            let params = p
                .params
                .iter()
                .map(|x| format!("{x:.12e}"))
                .collect::<Vec<_>>()
                .join(",");
            let structural = match p.structural {
                Some(true) => "true",
                Some(false) => "false",
                None => "na",
            };
            out.push_str(&format!(
                "{params},{:.12e},{:.12e},{},{}\n",
                p.c_before, p.c_after, p.frozen, structural
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

/// Fixed probe state for the qubit sweep: diagonal (0.6, 0.4) and
/// |ρ₁₂| = 0.35 at the given argument.
fn qubit_probe_state(theta: f64) -> DensityMatrix {
    let mut m = crate::linalg::CMatrix::zeros(2);
    m[(0, 0)] = Complex64::new(0.6, 0.0);
    m[(1, 1)] = Complex64::new(0.4, 0.0);
    m[(0, 1)] = Complex64::from_polar(0.35, theta);
    m[(1, 0)] = m[(0, 1)].conj();
    DensityMatrix::new(m).expect("probe state is PSD")
}

const QUBIT_SWEEP_DELTAS: [f64; 3] = [0.25, 0.5, 0.75];

fn qubit_grid(grid_n: usize) -> Vec<(usize, usize, usize, f64)> {
    let mut points = Vec::with_capacity(grid_n * grid_n * grid_n * 3);
    for k1 in 0..grid_n {
        for k2 in 0..grid_n {
            for k3 in 0..grid_n {
                for delta in QUBIT_SWEEP_DELTAS {
                    points.push((k1, k2, k3, delta));
                }
            }
        }
    }
    points
}

fn eval_qubit_point(grid_n: usize, (k1, k2, k3, delta): (usize, usize, usize, f64)) -> SweepPoint {
    let step = std::f64::consts::TAU / grid_n as f64;
    let (theta1, theta2, theta) = (step * k1 as f64, step * k2 as f64, step * k3 as f64);
    // On-grid manifold membership is exact integer arithmetic.
    let condition_met = (k1 + k2 + 2 * k3) % grid_n == 0;

    let rho = qubit_probe_state(theta);
    let phi = qubit_freeze_channel(delta, theta1, theta2).expect("delta in (0,1)");
    let sigma = phi.apply(&rho).expect("dims match");
    let before = c_l1(&rho).value;
    let after = c_l1(&sigma).value;
    let frozen = (before - after).abs() <= tol::FREEZE_L1;

    let structural = if classify(&rho).in_omega && classify(&sigma).in_omega {
        freeze::decompose_mixed_unitary(&phi)
            .map(|form| freeze::phase_alignment_l1(&form, &rho))
            .or(Some(false))
    } else {
        None
    };

    SweepPoint {
        params: vec![theta1, theta2, theta, delta],
        c_before: before,
        c_after: after,
        frozen,
        condition_met,
        structural,
    }
}

/// Sweep the two-unitary qubit family over an n³ grid of (θ₁, θ₂, θ) and
/// δ ∈ {0.25, 0.5, 0.75}; the l1 norm of coherence freezes exactly on the
/// sublattice θ₁ + θ₂ + 2θ ≡ 0 (mod 2π).
pub fn qubit_condition_sweep(grid_n: usize) -> SweepResult {
    assert!(grid_n >= 16, "qubit sweep grid too coarse");
    let points = exec::map(qubit_grid(grid_n), move |p| eval_qubit_point(grid_n, p));
    SweepResult::assemble(
        format!("qubit two-unitary mixture, {grid_n}^3 phase grid"),
        vec!["theta1".into(), "theta2".into(), "theta".into(), "delta".into()],
        Measure::L1,
        points,
    )
}

/// Sequential variant of [`qubit_condition_sweep`] (benchmark baseline).
pub fn qubit_condition_sweep_seq(grid_n: usize) -> SweepResult {
    assert!(grid_n >= 16);
    let points = exec::map_seq(qubit_grid(grid_n), move |p| eval_qubit_point(grid_n, p));
    SweepResult::assemble(
        format!("qubit two-unitary mixture, {grid_n}^3 phase grid (sequential)"),
        vec!["theta1".into(), "theta2".into(), "theta".into(), "delta".into()],
        Measure::L1,
        points,
    )
}

fn bell_grid(grid_n: usize, qs: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (grid_n - 1) as f64;
    let mut points = Vec::new();
    for i in 0..grid_n {
        for j in 0..grid_n {
            for k in 0..grid_n {
                let (c1, c2, c3) = (coord(i), coord(j), coord(k));
                if !bell_admissible(c1, c2, c3) {
                    continue;
                }
                for &q in qs {
                    points.push((c1, c2, c3, q));
                }
            }
        }
    }
    points
}

fn eval_bell_point((c1, c2, c3, q): (f64, f64, f64, f64)) -> SweepPoint {
    let rho = bell_diagonal(c1, c2, c3).expect("admissible grid point");
    let phi = crate::sio::local_bit_flip(q).expect("q in [0,1]");
    let sigma = phi.apply(&rho).expect("dims match");
    let before = c_re(&rho).expect("Hermitian").value;
    let after = c_re(&sigma).expect("Hermitian").value;
    let frozen = (before - after).abs() <= tol::FREEZE_RE;
    let condition_met = (c2 + c1 * c3).abs() <= 1e-9;

    let structural = if classify(&rho).in_omega_x && classify(&sigma).in_omega_x {
        Some(xfreeze::structural_check(&phi, &rho, Measure::RelEnt).is_ok_and(|r| r.verdict))
    } else {
        None
    };

    SweepPoint {
        params: vec![c1, c2, c3, q],
        c_before: before,
        c_after: after,
        frozen,
        condition_met,
        structural,
    }
}

/// Sweep Bell-diagonal states against the local bit-flip family: the
/// relative entropy of coherence freezes exactly on c₂ = -c₁c₃.
pub fn bell_freeze_sweep(grid_n: usize, qs: &[f64]) -> SweepResult {
    assert!(grid_n >= 2);
    let points = exec::map(bell_grid(grid_n, qs), eval_bell_point);
    SweepResult::assemble(
        format!("Bell-diagonal × local bit-flip, {grid_n}^3 grid, q ∈ {qs:?}"),
        vec!["c1".into(), "c2".into(), "c3".into(), "q".into()],
        Measure::RelEnt,
        points,
    )
}

/// Sequential variant of [`bell_freeze_sweep`] (benchmark baseline).
pub fn bell_freeze_sweep_seq(grid_n: usize, qs: &[f64]) -> SweepResult {
    assert!(grid_n >= 2);
    let points = exec::map_seq(bell_grid(grid_n, qs), eval_bell_point);
    SweepResult::assemble(
        format!("Bell-diagonal × local bit-flip, {grid_n}^3 grid, q ∈ {qs:?} (sequential)"),
        vec!["c1".into(), "c2".into(), "c3".into(), "q".into()],
        Measure::RelEnt,
        points,
    )
}

/// One trial of the randomized monotonicity/agreement suite.
#[derive(Serialize, Clone, Debug)]
pub struct RandomSuiteRow {
    pub dim: usize,
    pub trial: usize,
    pub channel_kind: String,
    pub l1_before: f64,
    pub l1_after: f64,
    pub re_before: f64,
    pub re_after: f64,
    pub monotone: bool,
    /// check-frozen agreement per measure, when a structural route applied.
    pub agreement_l1: Option<bool>,
    pub agreement_re: Option<bool>,
}

#[derive(Serialize, Clone, Debug)]
pub struct RandomSuiteReport {
    pub seed: u64,
    pub trials_per_dim: usize,
    pub rows: Vec<RandomSuiteRow>,
    pub monotonicity_violations: usize,
    pub agreement_violations: usize,
}

impl RandomSuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dim,trial,channel_kind,l1_before,l1_after,re_before,re_after,monotone,agreement_l1,agreement_re\n",
        );
        let opt = |o: Option<bool>| match o {
            Some(true) => "true",
            Some(false) => "false",
            None => "na",
        };
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{},{},{}\n",
                r.dim,
                r.trial,
                r.channel_kind,
                r.l1_before,
                r.l1_after,
                r.re_before,
                r.re_after,
                r.monotone,
                opt(r.agreement_l1),
                opt(r.agreement_re),
            ));
        }
        out
    }
}

/// Randomized suite: per trial draw a state and an SIO, check monotonicity
/// of both measures and structural/operational agreement where a structured
/// route applies. Deterministic in the seed; rows are ordered by (dim,
/// trial).
pub fn random_suite(dims: &[usize], trials: usize, seed: u64) -> Result<RandomSuiteReport> {
    let mut jobs = Vec::new();
    for &d in dims {
        for t in 0..trials {
            jobs.push((d, t));
        }
    }
    let rows: Vec<Result<RandomSuiteRow>> = exec::map(jobs, move |(d, t)| {
        let trial_seed = seed
            .wrapping_mul(0x9e3779b97f4a7c15)
            .wrapping_add((d as u64) << 32)
            .wrapping_add(t as u64);
        run_trial(d, t, trial_seed)
    });
    let rows: Result<Vec<RandomSuiteRow>> = rows.into_iter().collect();
    let rows = rows?;
    let monotonicity_violations = rows.iter().filter(|r| !r.monotone).count();
    let agreement_violations = rows
        .iter()
        .filter(|r| r.agreement_l1 == Some(false) || r.agreement_re == Some(false))
        .count();
    Ok(RandomSuiteReport {
        seed,
        trials_per_dim: trials,
        rows,
        monotonicity_violations,
        agreement_violations,
    })
}

fn run_trial(d: usize, trial: usize, seed: u64) -> Result<RandomSuiteRow> {
    // Rotate through channel and state families.
    let (channel_kind, phi, rho): (&str, SioChannel, DensityMatrix) = match trial % 5 {
        0 => (
            "generic",
            crate::sio::random_channel(d, 2 + trial % 3, seed),
            crate::states::random_state(d, seed ^ 0xabcd),
        ),
        1 => (
            "unitary",
            crate::sio::random_unitary_channel(d, seed),
            crate::states::random_in_omega(d, seed ^ 0xabcd)?,
        ),
        2 => {
            let (rho, phi, _) = freeze::sample_aligned_instance(d, seed);
            ("aligned", phi, rho)
        }
        3 => (
            "two-perm",
            freeze::sample_two_perm_mixture(d, seed),
            crate::states::random_in_omega(d, seed ^ 0xabcd)?,
        ),
        _ => {
            let (rho, phi) =
                xfreeze::sample_x_instance(d, xfreeze::XInstanceKind::L1AlignedOnly, seed);
            ("x-aligned", phi, rho)
        }
    };
    let sigma = phi.apply(&rho)?;
    let l1_before = c_l1(&rho).value;
    let l1_after = c_l1(&sigma).value;
    let re_before = c_re(&rho)?.value;
    let re_after = c_re(&sigma)?.value;
    let monotone =
        l1_after <= l1_before + 1e-8 && re_after <= re_before + 1e-8;

    let report_l1 = freeze::check_frozen(&phi, &rho, Measure::L1)?;
    let report_re = freeze::check_frozen(&phi, &rho, Measure::RelEnt)?;
    Ok(RandomSuiteRow {
        dim: d,
        trial,
        channel_kind: channel_kind.to_string(),
        l1_before,
        l1_after,
        re_before,
        re_after,
        monotone,
        agreement_l1: report_l1.agreement,
        agreement_re: report_re.agreement,
    })
}

/// Convenience wrapper used by tests: evaluate one measure before/after.
pub fn before_after(
    phi: &SioChannel,
    rho: &DensityMatrix,
    measure: Measure,
) -> Result<(f64, f64)> {
    let sigma = phi.apply(rho)?;
    Ok((
        coherence(rho, measure)?.value,
        coherence(&sigma, measure)?.value,
    ))
}
