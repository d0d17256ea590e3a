use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use sharpconc_core::bergman::{
    hyperbolic_circle_length, hyperbolic_disc_area, kernel_polynomial, AnalyticPolynomial,
    DiskPoint, MeasureVariant, SpaceParams, KERNEL_TAIL_TOL,
};
use sharpconc_core::concentration::fock::{bergman_to_fock_convergence, fock_limit_check};
use sharpconc_core::concentration::log_laplacian::{
    laplacian_log_g_check, transform_residuals, uniform_grid, LOG_LAPLACIAN_TOL,
};
use sharpconc_core::concentration::{
    bound_report, BoundVerdict, ConcentrationSolver, SolverOptions,
};
use sharpconc_core::specfun::pochhammer;
use sharpconc_core::symmetric::{
    b_partial_fraction_check, b_weighted_sum_check, c_coefficient_scan, coefficient_integral_check,
    main_inequality_scan, roots_and_residues, terminating_sum_check, PROVEN_MAX_N,
};
use sharpconc_core::{Estimate, ExactScalar, Result};

use crate::config::{ConfigError, FunctionSpec, RunConfig};
use crate::report::{float, ProfileRow, Record, Section, Verdict};

pub const COMMANDS: &[&str] = &["verify-exact", "profile", "fock", "lemma22", "isoperimetry"];

/// Tolerance of the profile ODE and convexity check.
const ODE_TOL: f64 = 1e-6;
/// Tolerance of the Euler and Pfaff transform residuals.
const TRANSFORM_TOL: f64 = 1e-11;
/// Tolerance of the circle isoperimetric residual.
const ISOPERIMETRY_TOL: f64 = 1e-12;
/// Largest index of the terminating-sum identity scan.
const IDENTITY_M_MAX: u64 = 40;
const FOCK_PAIRS: &[(u32, u32)] = &[(0, 2), (1, 2), (2, 4)];

type Job<'a> = Box<dyn Fn() -> Section + Send + Sync + 'a>;

/// Runs independent jobs in parallel and concatenates their output in job
/// order.
fn run_jobs(jobs: Vec<Job<'_>>) -> Section {
    let parts: Vec<Section> = jobs.par_iter().map(|job| job()).collect();
    let mut out = Section::default();
    for p in parts {
        out.records.extend(p.records);
        out.rows.extend(p.rows);
    }
    out
}

fn one(record: Record) -> Section {
    Section {
        records: vec![record],
        rows: Vec::new(),
    }
}

pub fn run(config: &RunConfig) -> Result<Section, ConfigError> {
    match config.command.as_str() {
        "verify-exact" => verify_exact(config),
        "profile" => Ok(profile(config)),
        "fock" => fock(config),
        "lemma22" => Ok(log_laplacian(config)),
        "isoperimetry" => Ok(isoperimetry()),
        other => Err(ConfigError::Invalid {
            key: "command".into(),
            detail: format!("unknown command {other:?}"),
        }),
    }
}

fn pairs(config: &RunConfig) -> Vec<(u64, ExactScalar)> {
    config
        .n
        .iter()
        .flat_map(|&n| config.alpha.iter().map(move |a| (n as u64, a.clone())))
        .collect()
}

fn na(n: u64, a: &ExactScalar) -> [(&'static str, String); 2] {
    [("n", n.to_string()), ("alpha", a.to_exact_string())]
}

pub fn verify_exact(config: &RunConfig) -> Result<Section, ConfigError> {
    if config.n.contains(&0) {
        return Err(ConfigError::Invalid {
            key: "n".into(),
            detail: "verify-exact needs n >= 1".into(),
        });
    }
    let mut jobs: Vec<Job> = Vec::new();
    for (n, a) in pairs(config) {
        let a2 = a.clone();
        jobs.push(Box::new(move || {
            one(main_inequality_record(n, &a2, config.l_max))
        }));
        let a2 = a.clone();
        jobs.push(Box::new(move || {
            one(coefficient_scan_record(n, &a2, config.c_k_max))
        }));
        let a2 = a.clone();
        jobs.push(Box::new(move || {
            one(b_identity_record(n, &a2, config.k_max))
        }));
        let a2 = a.clone();
        jobs.push(Box::new(move || one(residue_record(n, &a2))));
        let a2 = a.clone();
        jobs.push(Box::new(move || one(profile_at_one_record(n, &a2))));
        jobs.push(Box::new(move || {
            one(coefficient_integral_record(n, &a, config.k_max, config.tol))
        }));
    }
    let betas = [
        ExactScalar::from_integer(2),
        ExactScalar::ratio(7, 3),
        ExactScalar::ratio(11, 4),
    ];
    let ls = [
        ExactScalar::ratio(-3, 2),
        ExactScalar::zero(),
        ExactScalar::one(),
        ExactScalar::ratio(11, 2),
        ExactScalar::from_integer(20),
    ];
    for beta in &betas {
        for l in &ls {
            let (beta, l) = (beta.clone(), l.clone());
            jobs.push(Box::new(move || one(identity_record(&beta, &l))));
        }
    }
    Ok(run_jobs(jobs))
}

fn main_inequality_record(n: u64, a: &ExactScalar, l_max: u64) -> Record {
    let mut params = na(n, a).to_vec();
    params.push(("l_max", l_max.to_string()));
    let rec = Record::new("main_inequality", &params);
    match main_inequality_scan(n, a, l_max) {
        Err(e) => rec.failed(&e),
        Ok(r) => {
            let mut rec = rec.value("negative_count", r.negative_at.len() as u64);
            if let Some(at) = r.min_margin_at {
                rec = rec.value("min_margin_at", at);
            }
            if let Some(aux) = &r.auxiliary_min {
                rec = rec.value("auxiliary_min", aux);
            }
            if let Some(m) = &r.min_margin {
                rec = rec.margin(m);
            }
            let proven = n <= PROVEN_MAX_N as u64;
            if r.has_finding() {
                let shown: Vec<String> = r.negative_at.iter().take(8).map(u64::to_string).collect();
                rec.verdict(
                    Verdict::Finding,
                    format!(
                        "exploratory order; negative margins at l = {}",
                        shown.join(",")
                    ),
                )
            } else if proven {
                rec.verdict(
                    Verdict::Pass,
                    "nonnegative margins, zero exactly at l = 0, 1",
                )
            } else {
                rec.verdict(Verdict::Pass, "exploratory order; no negative margin found")
            }
        }
    }
}

/// Exact value of the profile polynomial at `t = 1`. Direct summation gives
/// `(alpha+n)_n / n!`, the reciprocal of the closed form `n! Γ(n+α)/Γ(2n+α)`
/// sometimes quoted for it; both are reported.
fn profile_at_one_record(n: u64, a: &ExactScalar) -> Record {
    let rec = Record::new("profile_at_one", &na(n, a));
    let params = match SpaceParams::new(a.clone(), n as u32) {
        Ok(p) => p,
        Err(e) => return rec.failed(&e),
    };
    let direct = params.profile_polynomial().eval(&ExactScalar::one());
    let factorial = ExactScalar::factorial(n);
    let summation_formula = pochhammer(&(a + n as i64), n) / &factorial;
    let quoted = &factorial / pochhammer(&(a + n as i64), n);
    let rec = rec
        .value("direct_sum", &direct)
        .value("quoted_closed_form", &quoted)
        .margin(&direct - &summation_formula);
    if direct == summation_formula {
        rec.verdict(
            Verdict::Pass,
            "direct sum equals (alpha+n)_n/n!, the reciprocal of the quoted closed form",
        )
    } else {
        rec.verdict(
            Verdict::Violation,
            "direct sum disagrees with (alpha+n)_n/n!",
        )
    }
}

fn coefficient_scan_record(n: u64, a: &ExactScalar, k_max: u64) -> Record {
    let mut params = na(n, a).to_vec();
    params.push(("k_max", k_max.to_string()));
    let rec = Record::new("c_coefficient", &params);
    match c_coefficient_scan(n, a, k_max) {
        Err(e) => rec.failed(&e),
        Ok(s) => {
            let rec = rec
                .value("strictly_increasing", s.strictly_increasing)
                .margin(&s.final_gap);
            if s.strictly_increasing {
                rec.verdict(Verdict::Pass, "c <= 1 with ratios above 1")
            } else {
                rec.verdict(Verdict::Violation, "1 - c is not strictly decreasing")
            }
        }
    }
}

fn b_identity_record(n: u64, a: &ExactScalar, k_max: u64) -> Record {
    let mut params = na(n, a).to_vec();
    params.push(("k_max", k_max.to_string()));
    let rec = Record::new("b_weights", &params);
    let run = || -> Result<()> {
        for k in n..=k_max.max(n) {
            b_partial_fraction_check(n, a, k)?;
        }
        for l in 0..=k_max {
            b_weighted_sum_check(n, a, l)?;
        }
        Ok(())
    };
    match run() {
        Err(e) => rec.failed(&e),
        Ok(()) => rec
            .margin(ExactScalar::zero())
            .verdict(Verdict::Pass, "both identities hold exactly"),
    }
}

fn residue_record(n: u64, a: &ExactScalar) -> Record {
    let rec = Record::new("roots_residues", &na(n, a));
    match roots_and_residues(n, a) {
        Err(e) => rec.failed(&e),
        Ok(d) => {
            let c = &d.checks;
            let rec = rec
                .value("residue_sum_error", float(c.residue_sum_error, 0.0))
                .value(
                    "partial_fraction_error",
                    float(c.partial_fraction_error, 0.0),
                )
                .value("complete_sum_error", float(c.complete_sum_error, 0.0))
                .value("vieta_error", float(c.vieta_error, 0.0));
            if c.passes() {
                rec.verdict(
                    Verdict::Pass,
                    "numeric roots agree with exact symmetric functions",
                )
            } else {
                rec.verdict(Verdict::Violation, "a cross-check exceeds its tolerance")
            }
        }
    }
}

fn coefficient_integral_record(n: u64, a: &ExactScalar, k_max: u64, tol: f64) -> Record {
    let mut params = na(n, a).to_vec();
    params.push(("k_max", k_max.to_string()));
    let rec = Record::new("coefficient_integral", &params);
    let mut worst = None;
    let mut negative = Vec::new();
    for k in n..=k_max.max(n) {
        match coefficient_integral_check(k, n, a, tol) {
            Err(e) => return rec.failed(&e),
            Ok(r) => {
                if r.is_negative() {
                    negative.push(k);
                }
                if worst
                    .as_ref()
                    .is_none_or(|(m, _): &(Estimate, u64)| r.margin.value < m.value)
                {
                    worst = Some((r.margin, k));
                }
            }
        }
    }
    let (m, at) = worst.expect("at least one coefficient");
    let rec = rec.value("min_margin_at", at).margin(m);
    if !negative.is_empty() {
        let shown: Vec<String> = negative.iter().take(8).map(u64::to_string).collect();
        rec.verdict(
            Verdict::Finding,
            format!(
                "exploratory order; negative margins at k = {}",
                shown.join(",")
            ),
        )
    } else {
        rec.verdict(Verdict::Pass, "margins nonnegative within error bars")
    }
}

fn identity_record(beta: &ExactScalar, l: &ExactScalar) -> Record {
    let params = [
        ("beta", beta.to_exact_string()),
        ("l", l.to_exact_string()),
        ("m_max", IDENTITY_M_MAX.to_string()),
    ];
    let rec = Record::new("terminating_sum_identity", &params);
    let run = || -> Result<()> {
        for m in 0..=IDENTITY_M_MAX {
            terminating_sum_check(m, beta, l)?;
        }
        Ok(())
    };
    match run() {
        Err(e) => rec.failed(&e),
        Ok(()) => rec
            .margin(ExactScalar::zero())
            .verdict(Verdict::Pass, "identity holds exactly"),
    }
}

fn build_function(spec: &FunctionSpec, alpha: f64) -> Result<AnalyticPolynomial> {
    match spec {
        FunctionSpec::One => Ok(AnalyticPolynomial::from_real(&[1.0])),
        FunctionSpec::Monomial(k) => Ok(AnalyticPolynomial::monomial(*k)),
        FunctionSpec::Kernel { re, im } => {
            let w = DiskPoint::new(Complex64::new(*re, *im))?;
            Ok(kernel_polynomial(w, alpha, KERNEL_TAIL_TOL, 10_000)?.0)
        }
    }
}

pub fn profile(config: &RunConfig) -> Section {
    let mut jobs: Vec<Job> = Vec::new();
    for f in &config.functions {
        for &n in &config.n {
            for a in &config.alpha {
                for &v in &config.variants {
                    jobs.push(Box::new(move || profile_job(config, f, n, a, v)));
                }
            }
        }
    }
    run_jobs(jobs)
}

fn profile_job(
    config: &RunConfig,
    f: &FunctionSpec,
    n: u32,
    a: &ExactScalar,
    v: MeasureVariant,
) -> Section {
    let params = [
        ("function", f.to_string()),
        ("n", n.to_string()),
        ("alpha", a.to_exact_string()),
        ("variant", v.name().to_string()),
    ];
    let rec = Record::new("profile", &params);
    let ode = Record::new("ode_convexity", &params);
    let solve = || -> Result<_> {
        let sp = SpaceParams::new(a.clone(), n)?;
        let poly = build_function(f, sp.alpha_f64())?;
        let options = SolverOptions {
            tol: config.tol,
            ..SolverOptions::default()
        };
        let solver = ConcentrationSolver::new(&poly, f.to_string(), &sp, v, options)?;
        let prof = solver.profile(&config.s_grid)?;
        let ode = solver.ode_convexity_check(&prof, ODE_TOL);
        Ok((prof, ode))
    };
    let (prof, ode_result) = match solve() {
        Ok(x) => x,
        Err(e) => {
            return Section {
                records: vec![rec.failed(&e), ode.failed(&e)],
                rows: Vec::new(),
            }
        }
    };
    let bound = bound_report(&prof);
    let rows = prof
        .samples
        .iter()
        .zip(&bound.margins)
        .map(|(s, m)| ProfileRow {
            function: f.to_string(),
            n,
            alpha: a.to_exact_string(),
            variant: v.name().to_string(),
            s: s.s,
            i_raw: s.i_raw,
            i_hat: s.i_hat,
            theta: s.theta,
            margin: m.margin,
            err: m.err,
        })
        .collect();
    let worst = bound
        .margins
        .iter()
        .min_by(|x, y| x.margin.total_cmp(&y.margin));
    let mut rec = rec
        .value("exponent", float(prof.exponent, 0.0))
        .value("level", prof.level as u64)
        .value("converged", prof.converged)
        .value("radial_path", prof.radial_path)
        .value("strict", bound.strict);
    if let Some(w) = worst {
        rec = rec
            .value("min_margin_at", float(w.s, 0.0))
            .margin(float(w.margin, w.err));
    }
    let rec = if bound.verdict == BoundVerdict::Violation {
        rec.verdict(
            Verdict::Violation,
            "profile exceeds the bound beyond its error bar",
        )
    } else if !prof.converged {
        rec.verdict(
            Verdict::NonConvergent,
            "refinement stopped before reaching the tolerance",
        )
    } else if bound.strict {
        rec.verdict(Verdict::Pass, "strictly below the bound")
    } else if n == 0 {
        rec.verdict(Verdict::Pass, "attains the bound within error bars")
    } else {
        rec.verdict(
            Verdict::Pass,
            "below the bound; some margins within their error bars",
        )
    };
    let ode = match ode_result {
        Err(e) => ode.failed(&e),
        Ok(r) => {
            let o = ode
                .value("ode_min", float(r.ode_min, r.tol))
                .value("ode_min_at", float(r.ode_min_at, 0.0))
                .value("convexity_min", float(r.convexity_min, r.tol))
                .margin(float(r.ode_min.min(r.convexity_min), r.tol));
            if r.passes {
                o.verdict(Verdict::Pass, "comparison inequality and convexity hold")
            } else {
                o.verdict(
                    Verdict::Violation,
                    "a residual is below minus the tolerance",
                )
            }
        }
    };
    Section {
        records: vec![rec, ode],
        rows,
    }
}

pub fn fock(config: &RunConfig) -> Result<Section, ConfigError> {
    let k_max = u32::try_from(config.k_max).map_err(|_| ConfigError::Invalid {
        key: "k_max".into(),
        detail: "too large".into(),
    })?;
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &config.n {
        for k in n..=k_max {
            jobs.push(Box::new(move || one(fock_record(k, n, config.tol))));
        }
    }
    for &(n, k) in FOCK_PAIRS {
        if config.n.contains(&n) && k <= k_max {
            jobs.push(Box::new(move || {
                one(convergence_record(k, n, &config.r_list, config.tol))
            }));
        }
    }
    Ok(run_jobs(jobs))
}

fn fock_record(k: u32, n: u32, tol: f64) -> Record {
    let rec = Record::new("fock_bound", &[("n", n.to_string()), ("k", k.to_string())]);
    match fock_limit_check(k, n, tol) {
        Err(e) => rec.failed(&e),
        Ok(r) => {
            let rec = rec
                .value("integral", r.integral)
                .value("bound", &r.bound)
                .margin(float(-r.margin, r.err));
            let detail = if r.margin.abs() <= r.err {
                "equality within error bars"
            } else {
                "integral below the bound"
            };
            rec.verdict(Verdict::Pass, detail)
        }
    }
}

fn convergence_record(k: u32, n: u32, r_list: &[f64], tol: f64) -> Record {
    let rec = Record::new(
        "fock_convergence",
        &[("n", n.to_string()), ("k", k.to_string())],
    );
    match bergman_to_fock_convergence(k, n, r_list, tol) {
        Err(e) => rec.failed(&e),
        Ok(c) => {
            let mut rec = rec.value("target", c.target);
            for row in &c.rows {
                rec = rec.value(
                    &format!("gap_r{}", row.r),
                    float(row.gap, row.value.error + c.target.error),
                );
            }
            if c.gaps_shrinking {
                rec.verdict(Verdict::Pass, "gaps shrink strictly as the weight grows")
            } else {
                rec.verdict(Verdict::NonConvergent, "gaps do not shrink strictly")
            }
        }
    }
}

pub fn log_laplacian(config: &RunConfig) -> Section {
    let grid = uniform_grid(0.995, 200);
    let transform_grid = uniform_grid(0.95, 50);
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &config.n {
        for a in &config.alpha {
            let (grid, transform_grid) = (&grid, &transform_grid);
            jobs.push(Box::new(move || Section {
                records: log_laplacian_records(n, a, grid, transform_grid),
                rows: Vec::new(),
            }));
        }
    }
    run_jobs(jobs)
}

fn log_laplacian_records(
    n: u32,
    a: &ExactScalar,
    grid: &[f64],
    transform_grid: &[f64],
) -> Vec<Record> {
    let params = [("n", n.to_string()), ("alpha", a.to_exact_string())];
    let rec = Record::new("log_laplacian", &params);
    let rec = match laplacian_log_g_check(n, a, grid) {
        Err(e) => rec.failed(&e),
        Ok(r) => {
            let rec = rec
                .value("at_zero", &r.at_zero)
                .value("min_at", float(r.min_at, 0.0))
                .value("series_gap", float(r.series_gap, 0.0))
                .margin(float(r.min_margin, LOG_LAPLACIAN_TOL));
            if !r.at_zero.is_zero() {
                rec.verdict(
                    Verdict::Violation,
                    "numerator does not vanish at the origin",
                )
            } else {
                rec.verdict(Verdict::Pass, "nonnegative on the grid, zero at the origin")
            }
        }
    };
    let tr = Record::new("transform_residuals", &params);
    let tr = match transform_residuals(n, a.to_f64(), transform_grid) {
        Err(e) => tr.failed(&e),
        Ok(r) => {
            let worst = r.euler_max.max(r.pfaff_max);
            let tr = tr
                .value("euler_max", float(r.euler_max, 0.0))
                .value("pfaff_max", float(r.pfaff_max, 0.0))
                .value("g_profile_ok", r.g_profile_ok)
                .margin(float(TRANSFORM_TOL - worst, 0.0));
            if r.g_profile_ok && worst <= TRANSFORM_TOL {
                tr.verdict(Verdict::Pass, "three evaluations agree")
            } else {
                tr.verdict(Verdict::Violation, "transformed forms disagree")
            }
        }
    };
    vec![rec, tr]
}

pub fn isoperimetry() -> Section {
    let records = (1..=19)
        .map(|i| {
            let r = 0.05 * i as f64;
            let l = hyperbolic_circle_length(r);
            let s = hyperbolic_disc_area(r);
            let residual = (l * l - 4.0 * PI * s - 4.0 * s * s).abs();
            let rounding = 8.0 * f64::EPSILON * (l * l + 4.0 * PI * s + 4.0 * s * s);
            let rec = Record::new("isoperimetry", &[("r", format!("{r:.2}"))])
                .value("length", float(l, 4.0 * f64::EPSILON * l))
                .value("area", float(s, 4.0 * f64::EPSILON * s))
                .margin(float(residual, rounding));
            if residual <= ISOPERIMETRY_TOL {
                rec.verdict(Verdict::Pass, "circle attains equality")
            } else {
                rec.verdict(Verdict::Violation, format!("residual {residual:e}"))
            }
        })
        .collect();
    Section {
        records,
        rows: Vec::new(),
    }
}
