use super::args::{RadialType, SpectrumMethod};
use super::suites::{run_suite, Suite, SuiteParams};
use super::{check_row, num, row, usage, CliError, Report, Row, RunConfig};
use crate::hamiltonian::{
    bound_energy, build_radial_hamiltonian, coulomb_potential, diagonalize, solve_nc_laplace,
    solve_radial_closed_form, ClosedFormCase, Family, HamiltonianError, SpectrumEnd,
};
use crate::scattering::{enumerate_poles, momentum_map, s_matrix, scattering_grid, ScatteringError};
use num_complex::Complex64;
use serde_json::Value;

impl From<HamiltonianError> for CliError {
    fn from(e: HamiltonianError) -> Self {
        match e {
            HamiltonianError::WindowTooSmall { .. }
            | HamiltonianError::WrongSign { .. }
            | HamiltonianError::BadPrincipal { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::OutsideInterval { .. } | ScatteringError::ZeroCoupling => CliError::Usage(e.to_string()),
            ScatteringError::Hamiltonian(h) => h.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::I => "I",
        Family::II => "II",
    }
}

fn family_of(q: f64) -> Result<Family, CliError> {
    if q > 0.0 {
        Ok(Family::I)
    } else if q < 0.0 {
        Ok(Family::II)
    } else {
        Err(usage("the coupling must be nonzero for bound states"))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Closed-form levels against diagonalization or the commutative limit.
pub fn cmd_spectrum(cfg: &RunConfig, levels: usize, method: SpectrumMethod) -> Result<Report, CliError> {
    let lambda = cfg.lambda_or(0.5);
    let q = cfg.q_or(1.0);
    let j = cfg.j.unwrap_or(0);
    let n_max = cfg.n_max.unwrap_or(300);
    if levels == 0 {
        return Err(usage("--levels must be at least 1"));
    }
    let family = family_of(q)?;
    let qn = cfg.natural_coupling(q);
    let scale = cfg.energy_scale();
    let tol = cfg.tol(1e-6);
    let params = row([
        ("lambda", num(lambda)),
        ("q", num(q)),
        ("j", Value::from(j)),
        ("nmax", Value::from(n_max)),
        ("levels", Value::from(levels)),
        ("method", Value::from(format!("{method:?}").to_lowercase())),
    ]);
    let mut report = Report::new("spectrum", cfg, params);
    match method {
        SpectrumMethod::Diagonalize => {
            let h = build_radial_hamiltonian(j, qn, lambda, n_max)?;
            if levels > h.window_len {
                return Err(usage(format!("--levels {levels} exceeds the radial window {}", h.window_len)));
            }
            let end = if family == Family::I { SpectrumEnd::Lowest } else { SpectrumEnd::Highest };
            for (k, (e, radial)) in diagonalize(&h, levels, end)?.into_iter().enumerate() {
                let n = j + 1 + k;
                let closed = bound_energy(family, n, j, qn, lambda)?.value;
                let err = rel(e, closed);
                report.results.push(row([
                    ("family", Value::from(family_name(family))),
                    ("n", Value::from(n)),
                    ("j", Value::from(j)),
                    ("closed_form", num(closed * scale)),
                    ("numerical", num(e * scale)),
                    ("rel_err", num(err)),
                    ("eigen_residual", num(h.eigen_residual(e, &radial))),
                    ("pass", Value::from(err <= tol)),
                ]));
            }
        }
        SpectrumMethod::Closed => {
            for k in 0..levels {
                let n = j + 1 + k;
                let closed = bound_energy(family, n, j, qn, lambda)?.value;
                let bohr = -qn * qn / (2.0 * (n * n) as f64);
                let limit = match family {
                    Family::I => bohr,
                    Family::II => 2.0 / (lambda * lambda) - bohr,
                };
                let dev = (closed - limit).abs() * scale;
                report.results.push(row([
                    ("family", Value::from(family_name(family))),
                    ("n", Value::from(n)),
                    ("j", Value::from(j)),
                    ("closed_form", num(closed * scale)),
                    ("commutative_limit", num(limit * scale)),
                    ("deviation", num(dev)),
                    ("pass", Value::from(dev <= tol)),
                ]));
            }
        }
    }
    Ok(report)
}

/// S-matrix rows `(E, p, Re S, Im S, |S|)` with a unitarity check per row.
pub fn cmd_smatrix(cfg: &RunConfig, points: usize, energies: Option<&[f64]>) -> Result<Report, CliError> {
    let lambda = cfg.lambda_or(0.5);
    let alpha = cfg.q_or(1.0);
    let j = cfg.j.unwrap_or(0);
    let scale = cfg.energy_scale();
    let upper = 2.0 / (lambda * lambda);
    let grid: Vec<f64> = match energies {
        Some(list) => {
            if list.is_empty() {
                return Err(usage("--energies is empty"));
            }
            let natural: Vec<f64> = list.iter().map(|e| e / scale).collect();
            for (&e, &shown) in natural.iter().zip(list) {
                if !(e > 0.0 && e < upper) {
                    return Err(usage(format!(
                        "energy {shown} outside the scattering interval (0, {}); the endpoints have p = 0 and are excluded",
                        upper * scale
                    )));
                }
            }
            natural
        }
        None => {
            if points == 0 {
                return Err(usage("--points must be at least 1"));
            }
            scattering_grid(lambda, points)
        }
    };
    let tol = cfg.tol(1e-12);
    let an = cfg.natural_coupling(alpha);
    let params = row([
        ("lambda", num(lambda)),
        ("alpha", num(alpha)),
        ("j", Value::from(j)),
        ("points", Value::from(grid.len())),
    ]);
    let mut report = Report::new("smatrix", cfg, params);
    let mut worst: f64 = 0.0;
    for e in grid {
        let s = s_matrix(j, e, an, lambda)?;
        let p = momentum_map(Complex64::new(e, 0.0), lambda);
        let defect = (s.norm() - 1.0).abs();
        worst = worst.max(defect);
        report.results.push(row([
            ("energy", num(e * scale)),
            ("p", num(p.re)),
            ("re_s", num(s.re)),
            ("im_s", num(s.im)),
            ("abs_s", num(s.norm())),
            ("unitarity_defect", num(defect)),
            ("pass", Value::from(defect <= tol)),
        ]));
    }
    report.residuals.push(check_row("max ||S| - 1| over the grid", worst, tol));
    Ok(report)
}

/// One row per identity across the requested suites.
pub fn cmd_verify(cfg: &RunConfig, suite: Suite, samples: usize) -> Result<Report, CliError> {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    if let Some(n) = cfg.n_max {
        if n < 4 {
            return Err(usage("--nmax must be at least 4 for verification"));
        }
    }
    let params = SuiteParams {
        lambda: cfg.lambda,
        q: cfg.q,
        n_max: cfg.n_max,
        seed: cfg.seed,
        samples,
        threads: cfg.threads,
        tolerance: cfg.tolerance,
    };
    let mut report = Report::new(
        "verify",
        cfg,
        row([
            ("suite", Value::from(suite.name())),
            ("samples", Value::from(samples)),
            ("seed", Value::from(cfg.seed)),
        ]),
    );
    for member in suite.members() {
        for c in run_suite(member, &params) {
            let mut r = Row::new();
            r.insert("suite".into(), Value::from(member.name()));
            r.extend(check_row(&c.name, c.residual, c.tolerance));
            report.results.push(r);
        }
    }
    Ok(report)
}

/// Bound-state poles; with `--nmax` the energies are also compared with diagonalization.
pub fn cmd_poles(cfg: &RunConfig, count: usize) -> Result<Report, CliError> {
    let lambda = cfg.lambda_or(0.5);
    let alpha = cfg.q_or(1.0);
    let j = cfg.j.unwrap_or(0);
    if count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let an = cfg.natural_coupling(alpha);
    let scale = cfg.energy_scale();
    let tol = cfg.tol(1e-12);
    let diag_tol = cfg.tol(1e-8);
    let poles = enumerate_poles(j, an, lambda, count)?;
    let diagonal = match cfg.n_max {
        Some(n_max) => {
            let h = build_radial_hamiltonian(j, an, lambda, n_max)?;
            if count > h.window_len {
                return Err(usage(format!("--count {count} exceeds the radial window {}", h.window_len)));
            }
            let end = if an > 0.0 { SpectrumEnd::Lowest } else { SpectrumEnd::Highest };
            Some(diagonalize(&h, count, end)?.into_iter().map(|(e, _)| e).collect::<Vec<_>>())
        }
        None => None,
    };
    let params = row([
        ("lambda", num(lambda)),
        ("alpha", num(alpha)),
        ("j", Value::from(j)),
        ("count", Value::from(count)),
        ("nmax", cfg.n_max.map_or(Value::Null, Value::from)),
    ]);
    let mut report = Report::new("poles", cfg, params);
    for (k, pole) in poles.iter().enumerate() {
        let mut ok = pole.residual <= tol && pole.energy_mismatch <= tol;
        let mut r = row([
            ("family", Value::from(family_name(pole.level.family))),
            ("n", Value::from(pole.level.n)),
            ("j", Value::from(j)),
            ("energy", num(pole.level.value * scale)),
            ("p_im", num(pole.p_im)),
            ("residual", num(pole.residual)),
            ("energy_mismatch", num(pole.energy_mismatch)),
        ]);
        if let Some(d) = &diagonal {
            let err = rel(d[k], pole.level.value);
            ok &= err <= diag_tol;
            r.insert("diagonalized".into(), num(d[k] * scale));
            r.insert("diag_rel_err".into(), num(err));
        }
        r.insert("pass".into(), Value::from(ok));
        report.results.push(r);
    }
    Ok(report)
}

/// Discrete Laplace solution `U(N)` against `q0 - q / r`.
pub fn cmd_laplace(cfg: &RunConfig, q0: f64) -> Result<Report, CliError> {
    let lambda = cfg.lambda_or(0.2);
    let q = cfg.q_or(1.0);
    let n_max = cfg.n_max.unwrap_or(100);
    if !q0.is_finite() {
        return Err(usage("q0 must be finite"));
    }
    let tol = cfg.tol(1e-12);
    let params = row([
        ("lambda", num(lambda)),
        ("q", num(q)),
        ("q0", num(q0)),
        ("nmax", Value::from(n_max)),
    ]);
    let mut report = Report::new("laplace", cfg, params);
    for (n, u) in solve_nc_laplace(q, q0, lambda, n_max).into_iter().enumerate() {
        let closed = coulomb_potential(q, q0, lambda, n);
        let err = (u - closed).abs();
        report.results.push(row([
            ("N", Value::from(n)),
            ("r", num(lambda * (n as f64 + 1.0))),
            ("u", num(u)),
            ("closed_form", num(closed)),
            ("abs_err", num(err)),
            ("pass", Value::from(err <= tol * closed.abs().max(1.0))),
        ]));
    }
    Ok(report)
}

/// Closed-form radial coefficients with the origin normalization and eigen-residual.
pub fn cmd_radial(cfg: &RunConfig, kind: RadialType, n: Option<usize>, energy: Option<f64>) -> Result<Report, CliError> {
    let lambda = cfg.lambda_or(0.5);
    let q = cfg.q_or(1.0);
    let j = cfg.j.unwrap_or(0);
    let n_max = cfg.n_max.unwrap_or(60);
    let qn = cfg.natural_coupling(q);
    let scale = cfg.energy_scale();
    let need_n = || n.ok_or_else(|| usage("--n is required for the bound families"));
    let need_e = || energy.map(|e| e / scale).ok_or_else(|| usage("--energy is required for this solution type"));
    let (case, e) = match kind {
        RadialType::I => {
            let pn = need_n()?;
            (ClosedFormCase::BoundI { n: pn, alpha: qn }, bound_energy(Family::I, pn, j, qn, lambda)?.value)
        }
        RadialType::II => {
            let pn = need_n()?;
            (ClosedFormCase::BoundII { n: pn, alpha: qn }, bound_energy(Family::II, pn, j, qn, lambda)?.value)
        }
        RadialType::Scatter => {
            let e = need_e()?;
            let upper = 2.0 / (lambda * lambda);
            if !(e > 0.0 && e < upper) {
                return Err(usage(format!("scattering energy must lie in (0, {})", upper * scale)));
            }
            (ClosedFormCase::Scatter { energy: e, alpha: qn }, e)
        }
        RadialType::Eta0 => (ClosedFormCase::Eta0 { alpha: qn }, 0.0),
        RadialType::Eta1 => (ClosedFormCase::Eta1 { alpha: qn }, 2.0 / (lambda * lambda)),
        RadialType::GenericPlus => {
            let e = need_e()?;
            (ClosedFormCase::GenericPlus { energy: e, alpha: qn }, e)
        }
        RadialType::GenericMinus => {
            let e = need_e()?;
            (ClosedFormCase::GenericMinus { energy: e, alpha: qn }, e)
        }
    };
    let h = build_radial_hamiltonian(j, qn, lambda, n_max)?;
    let radial = solve_radial_closed_form(case, j, lambda, h.window_len + 1)?;
    let params = row([
        ("type", Value::from(format!("{kind:?}"))),
        ("lambda", num(lambda)),
        ("q", num(q)),
        ("j", Value::from(j)),
        ("n", n.map_or(Value::Null, Value::from)),
        ("energy", num(e * scale)),
        ("nmax", Value::from(n_max)),
    ]);
    let mut report = Report::new("radial", cfg, params);
    let weights = radial.weights();
    for (k, c) in radial.coeffs.iter().enumerate() {
        report.results.push(row([
            ("N", Value::from(k)),
            ("re", num(c.re)),
            ("im", num(c.im)),
            ("weight", num(weights[k])),
        ]));
    }
    report.residuals.push(check_row("origin normalization |R(0) - 1|", (radial.coeffs[0] - 1.0).norm(), cfg.tol(1e-15)));
    report.residuals.push(check_row("radial eigen-residual on the interior window", h.eigen_residual(e, &radial), cfg.tol(1e-8)));
    let mut norm = row([("anchor", Value::from("weighted norm squared over the window")), ("value", num(radial.norm_sq()))]);
    norm.insert("pass".into(), Value::from(radial.norm_sq().is_finite()));
    report.residuals.push(norm);
    Ok(report)
}
