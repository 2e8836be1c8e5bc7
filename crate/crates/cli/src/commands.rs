use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use wigner_kirkwood::moment::{
    bloch_matrix_from_spectrum, first_correction_order, fourier_potential, hbar_scaling_fit,
    ode_residual_check, MomentReport, MomentumGrid, ResidualEntry,
};
use wigner_kirkwood::oracle::{
    default_omega, quadratic_z, solve_spectrum, z_exact, BasisSpec, Spectrum, DEFAULT_BASIS_STEP,
    DEFAULT_LEVEL_TOLERANCE,
};
use wigner_kirkwood::psint::{assemble_z, check_decay, PsintError};
use wigner_kirkwood::verify::{run_case, VerifyCase};
use wigner_kirkwood::wk::wk_recursion;
use wigner_kirkwood::PotentialSpec;

use crate::config::RunConfig;
use crate::error::CliError;

const TAIL_TOLERANCE: f64 = 1e-8;

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Numerical(format!("stdout: {e}")))
        }
    }
}

/// Writes `W0.poly .. WK.poly` and `summary.txt` into the output directory.
pub fn expand(cfg: &RunConfig) -> Result<String, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| "wk-expand".into());
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let series = wk_recursion(&cfg.potential, cfg.order);
    let sp = cfg.potential.space();
    let mut summary = String::new();
    writeln!(summary, "# potential={} order={}", cfg.potential.hash_hex(), cfg.order).unwrap();
    writeln!(summary, "k,terms,degree,p_degree,t_degree,p_parity,coefficients").unwrap();
    for (k, w) in series.terms().iter().enumerate() {
        let path = dir.join(format!("W{k}.poly"));
        fs::write(&path, w.to_canonical_string())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        let (even, odd) = w.parity_filter(&sp.ps());
        let parity = match (even.is_zero(), odd.is_zero()) {
            (_, true) => "even",
            (true, false) => "odd",
            _ => "mixed",
        };
        let coeffs = if w.all_real() {
            "real"
        } else if w.all_imaginary() {
            "imaginary"
        } else {
            "complex"
        };
        let p_degree = sp.ps().iter().map(|&v| w.degree_in(v)).max().unwrap_or(0);
        writeln!(
            summary,
            "{k},{},{},{p_degree},{},{parity},{coeffs}",
            w.len(),
            w.total_degree(),
            w.degree_in(sp.t())
        )
        .unwrap();
    }
    let path = dir.join("summary.txt");
    fs::write(&path, &summary)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(summary)
}

fn oracle_spectrum(potential: &PotentialSpec, size: usize, omega: Option<f64>, hbar: f64) -> Result<Spectrum, CliError> {
    let omega = omega.unwrap_or_else(|| default_omega(potential, size, hbar));
    let basis = BasisSpec::new(size, omega, hbar).map_err(|e| CliError::Config(e.to_string()))?;
    let step = DEFAULT_BASIS_STEP.min(size / 2);
    solve_spectrum(potential, &basis, step).map_err(CliError::numerical)
}

fn psint_error(e: PsintError) -> CliError {
    CliError::Numerical(e.to_string())
}

/// CSV `t,Z0..ZK,Zsum[,Zexact]`. Quadratic potentials use the closed-form
/// reference; others diagonalize at `--basis-size`.
pub fn partition(cfg: &RunConfig) -> Result<(), CliError> {
    let series = wk_recursion(&cfg.potential, cfg.order);
    let z = assemble_z(&series, cfg.hbar, &cfg.grid, &cfg.domain).map_err(psint_error)?;
    let exact = match cfg.basis_size {
        Some(_) if quadratic_z(&cfg.potential, cfg.hbar, &cfg.grid).is_some() => {
            quadratic_z(&cfg.potential, cfg.hbar, &cfg.grid)
        }
        Some(m) => {
            let spectrum = oracle_spectrum(&cfg.potential, m, cfg.omega, cfg.hbar)?;
            let ze = z_exact(&spectrum, &cfg.grid, DEFAULT_LEVEL_TOLERANCE, TAIL_TOLERANCE)
                .map_err(CliError::numerical)?;
            Some(ze.values)
        }
        None => None,
    };
    let mut buf = Vec::new();
    z.write_csv(&mut buf, exact.as_deref()).expect("in-memory write");
    write_output(cfg.out.as_deref(), &String::from_utf8(buf).expect("utf-8 csv"))
}

/// Spectrum JSON `{basis, eigenvalues, convergence}`.
pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let m = cfg.basis_size.unwrap_or(40);
    let s = oracle_spectrum(&cfg.potential, m, cfg.omega, cfg.hbar)?;
    write_output(cfg.out.as_deref(), &(s.to_json() + "\n"))
}

/// Moment JSON `{potential, first_correction_order, hbar_scaling_exponent_fit, residuals}`.
pub fn moment(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = &cfg.potential;
    let order = first_correction_order(pot).map_err(|e| CliError::Config(e.to_string()))?;
    let t_ref = cfg.grid.values()[0];
    let exponent = if check_decay(pot).is_ok() {
        let hbars = [cfg.hbar, cfg.hbar / 2.0, cfg.hbar / 4.0];
        let size = cfg.basis_size.unwrap_or(80);
        Some(
            hbar_scaling_fit(pot, t_ref, &hbars, size, size + 240, 1e-8)
                .map_err(CliError::numerical)?
                .exponent,
        )
    } else {
        None
    };

    let mut residuals = Vec::new();
    if pot.dim() <= 2 {
        let (size, points) = if pot.dim() == 1 { (40, 64) } else { (28, 48) };
        let s = oracle_spectrum(pot, cfg.basis_size.unwrap_or(size), cfg.omega, cfg.hbar)?;
        let width = 7.5 * (cfg.hbar * s.basis.omega).sqrt();
        let grid = MomentumGrid::new(pot.dim(), points, width).map_err(CliError::numerical)?;
        let op = fourier_potential(pot);
        for &t in cfg.grid.values() {
            let dt = 1e-3 * t;
            let a = bloch_matrix_from_spectrum(&s, &grid, &[t - dt, t, t + dt], f64::INFINITY)
                .map_err(CliError::numerical)?;
            let r = ode_residual_check(&a, &op).map_err(CliError::numerical)?;
            residuals.push(ResidualEntry { check: "ode".into(), t, residual: r.max_relative });
        }
    }
    let report = MomentReport {
        potential: pot.to_file(),
        first_correction_order: order,
        hbar_scaling_exponent_fit: exponent,
        residuals,
    };
    write_output(cfg.out.as_deref(), &(report.to_json() + "\n"))
}

/// Runs a suite; JSON report on stdout (or `out`), human-readable lines on stderr.
pub fn verify(case: VerifyCase, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let report = run_case(case, seed).map_err(CliError::numerical)?;
    eprint!("{report}");
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_output(out, &json)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> =
            report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::Verification(format!("{case}: {}", failed.join(", "))))
    }
}
