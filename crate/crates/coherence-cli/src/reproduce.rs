//! The worked example families behind the `reproduce` subcommand.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;

use coherence::error::Error;
use coherence::freeze;
use coherence::linalg::CMatrix;
use coherence::measures::Measure;
use coherence::oracle;
use coherence::states::DensityMatrix;
use coherence::xfreeze;
use num_complex::Complex64;

use crate::{emit, Format, OutputArgs, ReproduceCmd};

pub fn run(cmd: ReproduceCmd) -> Result<ExitCode, Error> {
    match cmd {
        ReproduceCmd::Qubit { grid, output } => qubit(grid, output),
        ReproduceCmd::Qutrit { output } => qutrit(output),
        ReproduceCmd::Bell { grid, q, output } => bell(grid, &q, output),
    }
}

fn sweep_text(sweep: &oracle::SweepResult, format: Format, condition_name: &str) -> String {
    match format {
        Format::Json => format!("{}\n", sweep.to_json()),
        Format::Csv => sweep.to_csv(),
        Format::Table => {
            let frozen = sweep.points.iter().filter(|p| p.frozen).count();
            format!(
                "{}\npoints: {} ({} frozen)\nfrozen ⇔ {}: {}\nstructural agreements: {}, disagreements: {}\n",
                sweep.description,
                sweep.points.len(),
                frozen,
                condition_name,
                sweep.condition_matches_frozen(),
                sweep.agreements,
                sweep.disagreements.len(),
            )
        }
    }
}

fn qubit(grid: usize, output: OutputArgs) -> Result<ExitCode, Error> {
    let sweep = oracle::qubit_condition_sweep(grid);
    let ok = sweep.condition_matches_frozen() && sweep.disagreements.is_empty();
    emit(
        &output,
        sweep_text(&sweep, output.format, "θ1+θ2+2θ ≡ 0 (mod 2π)"),
    )?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn bell(grid: usize, qs: &[f64], output: OutputArgs) -> Result<ExitCode, Error> {
    for &q in qs {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange {
                name: "q",
                value: q,
                range: "[0, 1]",
            });
        }
    }
    let sweep = oracle::bell_freeze_sweep(grid, qs);
    let ok = sweep.condition_matches_frozen() && sweep.disagreements.is_empty();
    emit(&output, sweep_text(&sweep, output.format, "c2 = -c1*c3"))?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn fmt_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        out.push_str("    [");
        for j in 0..m.dim() {
            let z = m[(i, j)];
            if z.norm() <= 1e-14 {
                out.push_str("        0        ");
            } else {
                out.push_str(&format!("{:+.3}{:+.3}i ", z.re, z.im));
            }
        }
        out.push_str("]\n");
    }
    out
}

/// Qutrit X state with the given center weight and off-diagonal r·e^{iθ}.
fn qutrit_x_state(r: f64, theta: f64) -> DensityMatrix {
    let mut m = CMatrix::zeros(3);
    m[(0, 0)] = Complex64::new(0.35, 0.0);
    m[(1, 1)] = Complex64::new(0.3, 0.0);
    m[(2, 2)] = Complex64::new(0.35, 0.0);
    m[(0, 2)] = Complex64::from_polar(r, theta);
    m[(2, 0)] = m[(0, 2)].conj();
    DensityMatrix::new(m).expect("qutrit X state is PSD")
}

fn qutrit(output: OutputArgs) -> Result<ExitCode, Error> {
    // The only Kraus shapes an l1-freezing SIO may have on qutrit X states,
    // written in the paired basis: a diagonal-phase block with a tail, its
    // within-pair swap, and the two rank-one forms consuming the tail.
    let (d11, d21) = (0.6, 0.8);
    let (d13, d23, d33, d43) = (0.5, 0.5, 0.5, 0.5);
    let (theta1, theta2) = (0.9, 1.3);

    let mut m1 = CMatrix::zeros(3);
    m1[(0, 0)] = Complex64::from_polar(d11, theta1);
    m1[(1, 1)] = Complex64::new(d11, 0.0);
    m1[(2, 2)] = Complex64::new(d13, 0.0);
    let mut m2 = CMatrix::zeros(3);
    m2[(0, 1)] = Complex64::new(d21, 0.0);
    m2[(1, 0)] = Complex64::from_polar(d21, theta2);
    m2[(2, 2)] = Complex64::new(d23, 0.0);
    let mut m3 = CMatrix::zeros(3);
    m3[(0, 2)] = Complex64::new(d33, 0.0);
    let mut m4 = CMatrix::zeros(3);
    m4[(1, 2)] = Complex64::new(d43, 0.0);

    let phi = xfreeze::channel_from_paired(&[m1.clone(), m2.clone(), m3.clone(), m4.clone()])?;

    // Freezing instance: arg ρ₁₃ on the manifold θ1+θ2+2θ = 2kπ.
    let theta = (TAU - theta1 - theta2) / 2.0;
    let frozen_state = qutrit_x_state(0.2, theta);
    let frozen = freeze::check_frozen(&phi, &frozen_state, Measure::L1)?;

    // Off-manifold control: shift the argument by 0.4 rad.
    let moved_state = qutrit_x_state(0.2, theta + 0.4);
    let moved = freeze::check_frozen(&phi, &moved_state, Measure::L1)?;

    let ok = frozen.operational_frozen
        && frozen.structural_frozen == Some(true)
        && frozen.agreement == Some(true)
        && !moved.operational_frozen
        && moved.structural_frozen == Some(false)
        && moved.agreement == Some(true);

    let text = match output.format {
        Format::Json => {
            let obj = serde_json::json!({
                "forms": ["diagonal-phase block + tail", "within-pair swap block + tail",
                          "rank-one |1⟩⟨3|", "rank-one |2⟩⟨3|"],
                "theta1": theta1,
                "theta2": theta2,
                "state_arg_on_manifold": theta,
                "frozen_instance": frozen,
                "off_manifold_instance": moved,
            });
            format!("{}\n", serde_json::to_string_pretty(&obj)?)
        }
        _ => {
            let mut t = String::from(
                "Admissible qutrit Kraus forms on X states (paired basis):\n",
            );
            for (label, m) in [
                ("(1) diagonal-phase block + tail", &m1),
                ("(2) within-pair swap block + tail", &m2),
                ("(3) rank-one |1⟩⟨3|", &m3),
                ("(4) rank-one |2⟩⟨3|", &m4),
            ] {
                t.push_str(&format!("  {label}:\n{}", fmt_matrix(m)));
            }
            t.push_str(&format!(
                "\nfreezing instance: θ1 = {theta1}, θ2 = {theta2}, arg ρ13 = {theta:.6} \
                 (θ1+θ2+2θ = {:.6}·2π)\n",
                (theta1 + theta2 + 2.0 * theta) / TAU
            ));
            t.push_str(&format!(
                "  C_l1 before = {:.12}, after = {:.12}, frozen = {}, structural = {}\n",
                frozen.c_before.value,
                frozen.c_after.value,
                frozen.operational_frozen,
                frozen
                    .structural_frozen
                    .map_or("n/a".to_string(), |b| b.to_string()),
            ));
            t.push_str(&format!(
                "off-manifold control (arg shifted by 0.4 rad ≈ {:.3}π):\n",
                0.4 / PI
            ));
            t.push_str(&format!(
                "  C_l1 before = {:.12}, after = {:.12}, frozen = {}, structural = {}\n",
                moved.c_before.value,
                moved.c_after.value,
                moved.operational_frozen,
                moved
                    .structural_frozen
                    .map_or("n/a".to_string(), |b| b.to_string()),
            ));
            t.push_str(&format!("verdicts consistent: {ok}\n"));
            t
        }
    };
    emit(&output, text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}
