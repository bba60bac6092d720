//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Two criteria cannot hold as stated and are reported red together with
//! the measured values. The process fails only when the set of red criteria
//! differs from that expectation, so a regression in any green criterion or
//! a change in a red one is caught.

use fuzzy_qm::cli::suites::{
    algebra_suite, appendix_suite, closed_form_eigen_residual, confluent_limit_order, dynamics_suite,
    gamma_recurrence_residual, kummer_grid_residual, lrl_samples, ordering_suite, SuiteParams,
    EHRENFEST_CORRECTED, EHRENFEST_PRINTED, EHRENFEST_REORDERED,
};
use fuzzy_qm::dynamics::{spectrum_from_symmetry, Check};
use fuzzy_qm::hamiltonian::{bound_energy, build_radial_hamiltonian, diagonalize, reflection_check, Family, SpectrumEnd};
use fuzzy_qm::scattering::{enumerate_poles, s_matrix, s_matrix_standard, scattering_grid};
use std::time::Instant;

const EXPECTED_RED: [usize; 2] = [3, 9];

struct Outcome {
    id: usize,
    pass: bool,
    /// For a red criterion: whether the documented cause is what makes it red.
    explained: bool,
    detail: String,
}

fn outcome(id: usize, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        id,
        pass,
        explained: false,
        detail: detail.into(),
    }
}

fn red_outcome(id: usize, pass: bool, explained: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        explained,
        ..outcome(id, pass, detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn find<'a>(checks: &'a [Check], name: &str) -> &'a Check {
    checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"))
}

fn checks_pass(checks: &[Check]) -> (bool, f64) {
    let worst = checks.iter().map(|c| c.residual).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    (checks.iter().all(Check::pass), worst)
}

fn bound_spectrum() -> Outcome {
    let start = Instant::now();
    let h = build_radial_hamiltonian(0, 1.0, 0.5, 300).expect("radial operator");
    let levels = diagonalize(&h, 3, SpectrumEnd::Lowest).expect("eigenpairs");
    let secs = start.elapsed().as_secs_f64();
    let err = levels
        .iter()
        .enumerate()
        .map(|(k, (e, _))| rel(*e, bound_energy(Family::I, k + 1, 0, 1.0, 0.5).unwrap().value))
        .fold(0.0, f64::max);
    outcome(1, err <= 1e-6 && secs <= 10.0, format!("max rel err {err:.2e} (tol 1e-6), {secs:.2} s (limit 10 s)"))
}

fn mirror_spectrum() -> Outcome {
    let lam: f64 = 0.5;
    let h = build_radial_hamiltonian(0, -1.0, lam, 300).expect("radial operator");
    let levels = diagonalize(&h, 3, SpectrumEnd::Highest).expect("eigenpairs");
    let err = levels
        .iter()
        .enumerate()
        .map(|(k, (e, _))| {
            let mirror = 2.0 / (lam * lam) - bound_energy(Family::I, k + 1, 0, 1.0, lam).unwrap().value;
            rel(*e, mirror)
        })
        .fold(0.0, f64::max);
    outcome(2, err <= 1e-6, format!("max rel err against 2/lambda^2 - E^I: {err:.2e} (tol 1e-6)"))
}

fn small_lambda_coefficient() -> Outcome {
    let q: f64 = 1.0;
    let mut worst_ratio: f64 = 0.0;
    let mut parts = Vec::new();
    let mut pass = true;
    let mut eighth_holds = true;
    for n in 1..=2usize {
        let nf = n as f64;
        let coeff = |lam: f64| (bound_energy(Family::I, n, 0, q, lam).unwrap().value + q * q / (2.0 * nf * nf)) / (lam * lam);
        let (c1, c2, c3) = (coeff(1e-2), coeff(5e-3), coeff(2.5e-3));
        let (r1, r2) = ((4.0 * c2 - c1) / 3.0, (4.0 * c3 - c2) / 3.0);
        let extrapolated = (16.0 * r2 - r1) / 15.0;
        let target = q.powi(4) / (24.0 * nf.powi(4));
        let eighth = q.powi(4) / (8.0 * nf.powi(4));
        let ratio = extrapolated / target;
        worst_ratio = worst_ratio.max(ratio);
        pass &= rel(extrapolated, target) <= 0.05;
        eighth_holds &= rel(extrapolated, eighth) <= 1e-4;
        parts.push(format!("n={n}: {extrapolated:.6e} vs q^4/(24 n^4) = {target:.6e}, q^4/(8 n^4) = {eighth:.6e}"));
    }
    red_outcome(3, pass, eighth_holds, format!("{}; ratio to stated target {worst_ratio:.4}", parts.join("; ")))
}

fn degeneracy() -> Outcome {
    let (lam, q, n_max) = (0.5, 1.0, 160);
    let sectors: Vec<Vec<f64>> = (0..4usize)
        .map(|j| {
            let h = build_radial_hamiltonian(j, q, lam, n_max).expect("radial operator");
            diagonalize(&h, 4 - j, SpectrumEnd::Lowest).expect("eigenpairs").into_iter().map(|(e, _)| e).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for n in 1..=4usize {
        let reference = sectors[0][n - 1];
        for (j, sector) in sectors.iter().enumerate().take(n).skip(1) {
            worst = worst.max(rel(sector[n - 1 - j], reference));
        }
    }
    outcome(4, worst <= 1e-6, format!("n <= 4, j = 0..n-1: max spread {worst:.2e} (tol 1e-6)"))
}

fn algebra() -> Outcome {
    let checks = algebra_suite(&SuiteParams {
        n_max: Some(12),
        threads: threads(),
        ..Default::default()
    });
    let picked: Vec<Check> = checks.into_iter().filter(|c| !c.name.starts_with("angular norm")).collect();
    let (pass, worst) = checks_pass(&picked);
    outcome(5, pass && worst <= 1e-12, format!("{} identities at n_max = 12, worst abs residual {worst:.2e} (tol 1e-12)", picked.len()))
}

fn ordering() -> Outcome {
    let checks = ordering_suite(&SuiteParams {
        n_max: Some(30),
        threads: threads(),
        ..Default::default()
    });
    let (pass, _) = checks_pass(&checks);
    let detail = checks.iter().map(|c| format!("{:.2e}", c.residual)).collect::<Vec<_>>().join(", ");
    outcome(6, pass, format!("exact mismatches, negative powers, exponential: {detail}"))
}

fn special_functions() -> Outcome {
    let kummer = kummer_grid_residual().unwrap_or(f64::NAN);
    let gamma = gamma_recurrence_residual().unwrap_or(f64::NAN);
    let order = confluent_limit_order().unwrap_or(f64::NAN);
    let pass = kummer <= 1e-12 && gamma <= 1e-12 && order <= 0.05;
    outcome(
        7,
        pass,
        format!("Kummer {kummer:.2e}, gamma recurrence {gamma:.2e} (tol 1e-12); limit order defect {order:.2e}"),
    )
}

fn norm_consistency() -> Outcome {
    let checks = algebra_suite(&SuiteParams {
        n_max: Some(12),
        threads: threads(),
        ..Default::default()
    });
    let c = find(&checks, "angular norm formula equals weighted trace");
    outcome(8, c.residual <= 1e-12, format!("j in 0..=2, 20 random polynomial radial parts each: {:.2e} (tol 1e-12)", c.residual))
}

fn dynamics() -> Outcome {
    let checks = dynamics_suite(&SuiteParams {
        n_max: Some(10),
        samples: 20,
        threads: threads(),
        ..Default::default()
    });
    let (pass, _) = checks_pass(&checks);
    let others: Vec<Check> = checks
        .iter()
        .filter(|c| c.name != EHRENFEST_PRINTED && c.name != EHRENFEST_REORDERED)
        .cloned()
        .collect();
    let (others_pass, worst_other) = checks_pass(&others);
    let printed = find(&checks, EHRENFEST_PRINTED).residual;
    let reordered = find(&checks, EHRENFEST_REORDERED).residual;
    let corrected = find(&checks, EHRENFEST_CORRECTED).residual;
    red_outcome(
        9,
        pass,
        others_pass,
        format!(
            "20 waves at n_max = 10: Ehrenfest as printed {printed:.2e}, other ordering {reordered:.2e}, corrected {corrected:.2e}; remaining {} rows {} (worst {worst_other:.2e}, tol 1e-10)",
            others.len(),
            if others_pass { "pass" } else { "FAIL" }
        ),
    )
}

fn lrl() -> Outcome {
    let samples = lrl_samples(2.0, 1.0, 40, threads());
    let mut pass = true;
    let mut parts = Vec::new();
    for s in &samples {
        match &s.verdict {
            Ok(v) => {
                let (ok, worst) = checks_pass(&v.checks);
                pass &= ok;
                parts.push(format!("{} ({:?}) {worst:.1e}", s.label, v.algebra));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", s.label));
            }
        }
    }
    let mut symmetry: f64 = 0.0;
    for lam in [0.1, 0.5, 1.0] {
        for n in 1..=5 {
            let (lo, hi) = spectrum_from_symmetry(1.0, lam, n).expect("principal number");
            symmetry = symmetry
                .max(rel(lo, bound_energy(Family::I, n, 0, 1.0, lam).unwrap().value))
                .max(rel(hi, bound_energy(Family::II, n, 0, -1.0, lam).unwrap().value));
        }
    }
    pass &= symmetry <= 1e-12;
    outcome(10, pass, format!("{}; symmetry energies {symmetry:.2e} (tol 1e-12)", parts.join(", ")))
}

fn appendix() -> Outcome {
    let checks = appendix_suite(0.7, &SuiteParams {
        threads: threads(),
        ..Default::default()
    });
    let (pass, worst) = checks_pass(&checks);
    outcome(11, pass, format!("{} identities at n_max = 10, worst {worst:.2e} (tol 1e-10)", checks.len()))
}

fn scattering() -> Outcome {
    let (lam, alpha, j) = (0.5, 1.0, 0usize);
    let unitarity = scattering_grid(lam, 100)
        .into_iter()
        .map(|e| (s_matrix(j, e, alpha, lam).unwrap().norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut pole_residual: f64 = 0.0;
    let mut pole_vs_diag: f64 = 0.0;
    for a in [alpha, -alpha] {
        let poles = enumerate_poles(j, a, lam, 5).unwrap();
        let h = build_radial_hamiltonian(j, a, lam, 300).unwrap();
        let end = if a > 0.0 { SpectrumEnd::Lowest } else { SpectrumEnd::Highest };
        let diag = diagonalize(&h, 5, end).unwrap();
        for (p, (e, _)) in poles.iter().zip(&diag) {
            pole_residual = pole_residual.max(p.residual).max(p.energy_mismatch);
            pole_vs_diag = pole_vs_diag.max(rel(*e, p.level.value));
        }
    }
    let small = 1e-4;
    let standard = (1..=50)
        .map(|k| {
            let e = 0.1 * k as f64;
            let s = s_matrix(j, e, alpha, small).unwrap();
            let t = s_matrix_standard(j, e, alpha).unwrap();
            (s - t).norm() / t.norm()
        })
        .fold(0.0, f64::max);
    let pass = unitarity <= 1e-12 && pole_residual <= 1e-12 && standard <= 1e-6 && pole_vs_diag <= 1e-8;
    outcome(
        12,
        pass,
        format!(
            "||S|-1| {unitarity:.2e}; pole residual {pole_residual:.2e}; lambda = 1e-4 vs standard {standard:.2e}; poles vs diagonalization {pole_vs_diag:.2e}"
        ),
    )
}

fn reflection() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3usize {
        for j in 0..n.min(3) {
            for lam in [0.3, 0.5, 1.0] {
                worst = worst.max(reflection_check(n, j, 1.0, lam, 60).unwrap_or(f64::NAN));
            }
        }
    }
    outcome(13, worst <= 1e-10, format!("n <= 3, j <= 2: {worst:.2e} (tol 1e-10)"))
}

fn closed_form_vectors() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3usize {
        for j in 0..n {
            for family in [Family::I, Family::II] {
                worst = worst.max(closed_form_eigen_residual(family, n, j, 1.0, 0.5, 80).unwrap_or(f64::NAN));
            }
        }
    }
    outcome(14, worst <= 1e-8, format!("both families, n <= 3: {worst:.2e} (tol 1e-8)"))
}

fn main() {
    let criteria: [fn() -> Outcome; 14] = [
        bound_spectrum,
        mirror_spectrum,
        small_lambda_coefficient,
        degeneracy,
        algebra,
        ordering,
        special_functions,
        norm_consistency,
        dynamics,
        lrl,
        appendix,
        scattering,
        reflection,
        closed_form_vectors,
    ];
    let mut red = Vec::new();
    let mut unexplained = Vec::new();
    for f in criteria {
        let o = f();
        println!("criterion {:>2}: {} | {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            red.push(o.id);
            if !o.explained {
                unexplained.push(o.id);
            }
        }
    }
    println!("red criteria: {red:?} (expected {EXPECTED_RED:?})");
    if red != EXPECTED_RED || !unexplained.is_empty() {
        eprintln!("acceptance status changed; red without the documented cause: {unexplained:?}");
        std::process::exit(1);
    }
}
