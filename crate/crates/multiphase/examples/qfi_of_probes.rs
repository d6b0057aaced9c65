//! Quantum Fisher information matrices of the main probe families, with the
//! derivative-overlap oracle double-checking the closed-form builder.
//!
//! ```bash
//! cargo run --example qfi_of_probes
//! ```

use multiphase::fisher::{qcrb_report, qfi_matrix, qfi_via_derivatives};
use multiphase::fock::PhaseVector;
use multiphase::probes::{make_balanced_state, make_hb_state, make_noon_state, make_optimal_state, optimal_alpha};
use multiphase::ProbeState;

fn show(name: &str, psi: &ProbeState) -> multiphase::Result<()> {
    let fisher = qfi_matrix(psi);
    println!("{name}  (d = {}, N = {}, {} terms)", psi.d(), psi.photons(), psi.len());
    for row in 0..fisher.d() {
        let cells: Vec<String> = (0..fisher.d())
            .map(|col| format!("{:>9.4}", fisher.entry(row, col)))
            .collect();
        println!("    [{}]", cells.join(" "));
    }
    let report = qcrb_report(psi)?;
    println!(
        "    total-variance bound {:.6}   saturable: {}\n",
        report.total_variance, report.saturable
    );
    Ok(())
}

fn main() -> multiphase::Result<()> {
    show("N00N state, 4 photons", &make_noon_state(4, 1, 1)?)?;
    show(
        "optimal three-phase probe",
        &make_optimal_state(3, 6, optimal_alpha(3))?,
    )?;
    show("balanced three-phase probe", &make_balanced_state(3, 6)?)?;
    show("Holland-Burnett HB(1, 3)", &make_hb_state(1, 3)?)?;

    // the matrix is a pure occupation-moment expression; the overlap oracle
    // rebuilds it from derivative states at an arbitrary phase point
    let psi = make_optimal_state(2, 4, optimal_alpha(2))?;
    let theta = PhaseVector::new(vec![0.7, -1.2])?;
    let direct = qfi_matrix(&psi);
    let oracle = qfi_via_derivatives(&psi, &theta)?;
    println!(
        "oracle check at theta = (0.7, -1.2): max |direct - overlap| = {:.2e}",
        direct.max_abs_diff(&oracle)
    );
    Ok(())
}
