//! Machine-readable data products behind the command-line surface: the
//! strategy-comparison table, the Holland-Burnett sweeps, measurement
//! saturation checks, and CSV/JSON emission.
//!
//! Curves go out as CSV with a leading `# schema:` comment and a header row;
//! single objects (states, matrices, check reports) go out as JSON.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::MleExperimentRow;
use crate::fisher::{
    cfi_matrix, classical_bound, noon_individual_bound, psi_s_variance, qcrb_total_variance,
    qfi_matrix,
};
use crate::fock::{PhaseVector, ProbeState};
use crate::povm::{optimal_projectors_for, pnrd_measurement, upsilon_projectors, PovmSet};
use crate::probes::{
    make_balanced_state, make_hb_state, make_noon_state, make_optimal_state, optimal_alpha,
    MultiportUnitary,
};
use crate::search::{
    optimize_cfi_phase, search_optimal_probe, PhaseSearchConfig, ProbeSearchConfig,
};

/// One row of the strategy-comparison table at fixed photon number.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsRow {
    pub d: usize,
    pub var_psi_s: f64,
    pub var_noon_exact: f64,
    pub var_noon_approx: f64,
    pub var_classical: f64,
}

/// Total-variance bounds of the four strategies for each phase count in
/// `d_lo..=d_hi`, all using `photons` photons.
pub fn bounds_table(photons: u32, d_lo: usize, d_hi: usize) -> Result<Vec<BoundsRow>> {
    if d_lo == 0 || d_lo > d_hi {
        return Err(Error::InvalidArgument(format!(
            "bad phase-count range {d_lo}..={d_hi}"
        )));
    }
    (d_lo..=d_hi)
        .map(|d| {
            Ok(BoundsRow {
                d,
                var_psi_s: psi_s_variance(d, photons),
                var_noon_exact: noon_individual_bound(photons as u64, d, true)?,
                var_noon_approx: noon_individual_bound(photons as u64, d, false)?,
                var_classical: classical_bound(photons as f64, d)?,
            })
        })
        .collect()
}

pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from("# schema: multiphase.bounds.v1\n");
    out.push_str("d,var_psi_s,var_noon_exact,var_noon_approx,var_classical\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.d, r.var_psi_s, r.var_noon_exact, r.var_noon_approx, r.var_classical
        ));
    }
    out
}

/// One row of the Holland-Burnett bound sweep at fixed `d`.
#[derive(Clone, Debug, Serialize)]
pub struct HbSweepRow {
    pub n: u32,
    pub photons: u32,
    pub var_qcrb_hb: f64,
    pub var_noon: f64,
    pub var_psi_s: f64,
}

/// Quantum bound of `HB(n, d)` against the equal-photon-number references,
/// for `n` in `n_lo..=n_hi`.
pub fn hb_qcrb_sweep(d: usize, n_lo: u32, n_hi: u32) -> Result<Vec<HbSweepRow>> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(Error::InvalidArgument(format!(
            "bad photons-per-mode range {n_lo}..={n_hi}"
        )));
    }
    let mut rows: Vec<HbSweepRow> = (n_lo..=n_hi)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let psi = make_hb_state(n, d)?;
            let photons = psi.photons();
            Ok(HbSweepRow {
                n,
                photons,
                var_qcrb_hb: qcrb_total_variance(&qfi_matrix(&psi))?,
                var_noon: noon_individual_bound(photons as u64, d, true)?,
                var_psi_s: psi_s_variance(d, photons),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

pub fn hb_sweep_csv(rows: &[HbSweepRow]) -> String {
    let mut out = String::from("# schema: multiphase.hb_sweep.v1\n");
    out.push_str("n,photons,var_qcrb_hb,var_noon,var_psi_s\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.photons, r.var_qcrb_hb, r.var_noon, r.var_psi_s
        ));
    }
    out
}

/// One row of the measured-information sweep over the phase count.
#[derive(Clone, Debug, Serialize)]
pub struct HbCfiRow {
    pub d: usize,
    pub photons: u32,
    pub var_cfi_pnrd: f64,
    pub var_qcrb_hb: f64,
    pub var_noon: f64,
    pub var_psi_s: f64,
}

/// Optimized PNRD information of `HB(n, d)` behind a Fourier multiport, for
/// `d` in `d_lo..=d_hi`, next to the quantum bound and the references.
pub fn hb_cfi_sweep(
    d_lo: usize,
    d_hi: usize,
    photons_per_mode: u32,
    config: &PhaseSearchConfig,
) -> Result<Vec<HbCfiRow>> {
    if d_lo == 0 || d_lo > d_hi {
        return Err(Error::InvalidArgument(format!(
            "bad phase-count range {d_lo}..={d_hi}"
        )));
    }
    let mut rows: Vec<HbCfiRow> = (d_lo..=d_hi)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| {
            let psi = make_hb_state(photons_per_mode, d)?;
            let photons = psi.photons();
            let povm = pnrd_measurement(MultiportUnitary::qft(d + 1));
            let optimized = optimize_cfi_phase(&psi, &povm, config)?;
            Ok(HbCfiRow {
                d,
                photons,
                var_cfi_pnrd: optimized.total_variance,
                var_qcrb_hb: qcrb_total_variance(&qfi_matrix(&psi))?,
                var_noon: noon_individual_bound(photons as u64, d, true)?,
                var_psi_s: psi_s_variance(d, photons),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.d);
    Ok(rows)
}

pub fn hb_cfi_csv(rows: &[HbCfiRow]) -> String {
    let mut out = String::from("# schema: multiphase.hb_cfi.v1\n");
    out.push_str("d,photons,var_cfi_pnrd,var_qcrb_hb,var_noon,var_psi_s\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.d, r.photons, r.var_cfi_pnrd, r.var_qcrb_hb, r.var_noon, r.var_psi_s
        ));
    }
    out
}

/// Saturation check of the projective measurement constructions.
#[derive(Clone, Debug, Serialize)]
pub struct PovmCheckReport {
    pub d: usize,
    pub photons: u32,
    /// Largest |CFI - QFI| entry for the balanced probe with the staircase set.
    pub balanced_max_diff: f64,
    /// Largest |CFI - QFI| entry for the optimal probe with its tailored set.
    pub optimal_max_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl std::fmt::Display for PovmCheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "CFI=QFI at theta_s (balanced probe, staircase set): {}, max abs diff {:.3e}",
            if self.balanced_max_diff < self.tolerance { "PASS" } else { "FAIL" },
            self.balanced_max_diff
        )?;
        write!(
            f,
            "CFI=QFI at theta_s (optimal probe, tailored set):   {}, max abs diff {:.3e}",
            if self.optimal_max_diff < self.tolerance { "PASS" } else { "FAIL" },
            self.optimal_max_diff
        )
    }
}

/// Verifies that the measured information equals the quantum information at
/// the anchor phase point for both projective constructions.
pub fn povm_check(d: usize, photons: u32) -> Result<PovmCheckReport> {
    let tolerance = 1e-6;
    let theta = PhaseVector::zeros(d);

    let balanced = make_balanced_state(d, photons)?;
    let staircase = upsilon_projectors(d, photons)?;
    let balanced_max_diff = cfi_matrix(&balanced, &theta, &staircase)?
        .max_abs_diff(&qfi_matrix(&balanced));

    let optimal = make_optimal_state(d, photons, optimal_alpha(d))?;
    let tailored = optimal_projectors_for(&optimal, &theta)?;
    let optimal_max_diff =
        cfi_matrix(&optimal, &theta, &tailored)?.max_abs_diff(&qfi_matrix(&optimal));

    Ok(PovmCheckReport {
        d,
        photons,
        balanced_max_diff,
        optimal_max_diff,
        tolerance,
        passed: balanced_max_diff < tolerance && optimal_max_diff < tolerance,
    })
}

/// Outcome of the numerical probe search next to its analytic reference.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeSearchReport {
    pub d: usize,
    pub photons: u32,
    pub state: ProbeState,
    pub total_variance: f64,
    pub reference_variance: f64,
    pub matches_single_mode_family: bool,
    pub family_alpha: Option<f64>,
    pub converged: bool,
}

pub fn probe_search_report(
    d: usize,
    photons: u32,
    config: &ProbeSearchConfig,
) -> Result<ProbeSearchReport> {
    let result = search_optimal_probe(d, photons, config)?;
    Ok(ProbeSearchReport {
        d,
        photons,
        reference_variance: psi_s_variance(d, photons),
        total_variance: result.total_variance,
        matches_single_mode_family: result.matches_single_mode_family,
        family_alpha: result.family_alpha,
        converged: result.converged,
        state: result.state,
    })
}

pub fn mle_csv(d: usize, rows: &[MleExperimentRow]) -> String {
    let mut out = String::from("# schema: multiphase.mle.v1\n");
    out.push_str("M,replication");
    for mode in 1..=d {
        out.push_str(&format!(",theta_hat_{mode}"));
    }
    out.push_str(",sq_error\n");
    for r in rows {
        out.push_str(&format!("{},{}", r.trials, r.replication));
        for value in &r.theta_hat {
            out.push_str(&format!(",{value}"));
        }
        out.push_str(&format!(",{}\n", r.sq_error));
    }
    out
}

/// Probe descriptor grammar: `optimal:d=..,N=..[,alpha=..]`, `w:d=..,N=..`,
/// `noon:N=..[,d=..,mode=..]`, `hb:n=..,d=..`.
pub fn parse_probe(descriptor: &str) -> Result<ProbeState> {
    let (kind, params) = split_descriptor(descriptor);
    let fields = parse_fields(params)?;
    let get = |key: &str| -> Result<u64> {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("probe `{descriptor}` is missing `{key}`"))
            })
    };
    match kind {
        "optimal" => {
            let d = get("d")? as usize;
            let photons = get("N")? as u32;
            let alpha = fields
                .iter()
                .find(|(k, _)| k == "alpha")
                .map(|(_, v)| f64::from_bits(*v));
            make_optimal_state(d, photons, alpha.unwrap_or_else(|| optimal_alpha(d)))
        }
        "w" => make_balanced_state(get("d")? as usize, get("N")? as u32),
        "noon" => {
            let photons = get("N")? as u32;
            let d = fields
                .iter()
                .find(|(k, _)| k == "d")
                .map(|(_, v)| *v as usize)
                .unwrap_or(1);
            let mode = fields
                .iter()
                .find(|(k, _)| k == "mode")
                .map(|(_, v)| *v as usize)
                .unwrap_or(1);
            make_noon_state(photons, mode, d)
        }
        "hb" => make_hb_state(get("n")? as u32, get("d")? as usize),
        other => Err(Error::InvalidArgument(format!(
            "unknown probe family `{other}`"
        ))),
    }
}

/// Measurement descriptor grammar: `upsilon`, `pnrd:qft`, `pnrd:identity`.
/// The sector is taken from the probe.
pub fn parse_povm(descriptor: &str, psi: &ProbeState) -> Result<PovmSet> {
    match descriptor {
        "upsilon" => upsilon_projectors(psi.d(), psi.photons()),
        "pnrd:qft" => Ok(pnrd_measurement(MultiportUnitary::qft(psi.d() + 1))),
        "pnrd:identity" => Ok(pnrd_measurement(MultiportUnitary::identity(psi.d() + 1))),
        other => Err(Error::InvalidArgument(format!(
            "unknown measurement `{other}`"
        ))),
    }
}

fn split_descriptor(descriptor: &str) -> (&str, &str) {
    match descriptor.split_once(':') {
        Some((kind, rest)) => (kind, rest),
        None => (descriptor, ""),
    }
}

/// Parses `k=v` fields; float values are carried as bit patterns so one
/// vector serves both integer and real parameters.
fn parse_fields(params: &str) -> Result<Vec<(String, u64)>> {
    let mut fields = Vec::new();
    for piece in params.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = piece.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("bad descriptor field `{piece}`"))
        })?;
        let stored = if key == "alpha" {
            value
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad value in `{piece}`")))?
                .to_bits()
        } else {
            value
                .parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad value in `{piece}`")))?
        };
        fields.push((key.to_string(), stored));
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_table_reference_rows() {
        let rows = bounds_table(16, 1, 16).unwrap();
        let row4 = &rows[3];
        assert!((row4.var_psi_s - 0.0351562500).abs() < 1e-12);
        assert!((row4.var_noon_exact - 0.25).abs() < 1e-12);
        assert!((row4.var_noon_approx - 0.25).abs() < 1e-12);
        assert!((row4.var_classical - 1.0).abs() < 1e-12);

        let row1 = &rows[0];
        assert!((row1.var_psi_s - 1.0 / 256.0).abs() < 1e-15);
        assert!((row1.var_noon_exact - 1.0 / 256.0).abs() < 1e-15);

        let row16 = &rows[15];
        assert!((row16.var_classical - 16.0).abs() < 1e-12);
        assert!((row16.var_noon_exact - 16.0).abs() < 1e-12);
        assert!((row16.var_noon_approx - 16.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_csv_has_schema_and_header() {
        let rows = bounds_table(4, 1, 2).unwrap();
        let text = bounds_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# schema: multiphase.bounds.v1");
        assert_eq!(
            lines.next().unwrap(),
            "d,var_psi_s,var_noon_exact,var_noon_approx,var_classical"
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn povm_check_passes_for_three_phases() {
        let report = povm_check(3, 2).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.balanced_max_diff < 1e-6);
        assert!(report.optimal_max_diff < 1e-6);
    }

    #[test]
    fn probe_descriptors_parse() {
        let noon = parse_probe("noon:N=3").unwrap();
        assert_eq!(noon.photons(), 3);
        assert_eq!(noon.d(), 1);

        let w = parse_probe("w:d=2,N=2").unwrap();
        assert_eq!(w.len(), 3);

        let hb = parse_probe("hb:n=1,d=2").unwrap();
        assert_eq!(hb.photons(), 3);

        let custom = parse_probe("optimal:d=2,N=4,alpha=0.5").unwrap();
        assert_eq!(custom.len(), 3);

        assert!(parse_probe("squeezed:r=1").is_err());
        assert!(parse_probe("noon:d=1").is_err());
    }

    #[test]
    fn povm_descriptors_parse() {
        let psi = parse_probe("w:d=2,N=2").unwrap();
        assert!(parse_povm("upsilon", &psi).is_ok());
        assert!(parse_povm("pnrd:qft", &psi).is_ok());
        assert!(parse_povm("pnrd:identity", &psi).is_ok());
        assert!(parse_povm("sic", &psi).is_err());
    }
}
