use std::fmt::Write as _;

use serde::Serialize;
use toboggan::asympt::{build_case, compare_with_shooting, ell_for_tau, energy_estimate, rescale_f, Comparison};
use toboggan::complexpath::{stokes_sectors, symmetric_pairs};
use toboggan::eigensolve::{matrix_spectrum, shoot_spectrum, Eigenresult, MatrixConfig, Method, ShootingConfig};
use toboggan::exact::{rat_to_f64, GaussRat};
use toboggan::exactsolv::exact_table;
use toboggan::qmetric::{
    assemble_theta, completeness_residual, random_dyson_pencil, solve_biorthogonal, spectral_residuals, Pencil,
};
use toboggan::susy::{gamma_grid, sweep_csv, sweep_gamma, SweepConfig};
use toboggan::xform::{rectify, SturmProblem};
use toboggan::{Ratio, C64};

use crate::config::{
    monomials, parse_ratio, AsymptSection, ContourKind, ContourSection, ExactSection, FigSection, ProblemSection,
    RunConfig, SolverSection, SusySection, TermSection,
};
use crate::{Artifact, CliError, Command, ProblemFlags};

/// Seed used by `metric` when neither flag nor config gives one.
pub const DEFAULT_SEED: u64 = 0;
const DEFAULT_METRIC_DIM: usize = 8;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("artifact serializes")
}

fn fmt_e(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn dispatch(command: &Command, cfg: &RunConfig, seed: Option<u64>) -> Result<Artifact, CliError> {
    match command {
        Command::Wedges { power, phase } => wedges(*power, *phase),
        Command::Rectify { problem, m, numeric } => {
            let section = problem_section(problem, cfg)?;
            let m = m
                .or(section.map)
                .ok_or_else(|| CliError::config("problem.map", "rectify needs --m or problem.map"))?;
            rectify_text(&section, m, !numeric)
        }
        Command::Spectrum {
            problem,
            m,
            window,
            steps,
            epsilon,
        } => {
            let mut section = problem_section(problem, cfg)?;
            section.map = m.or(section.map);
            let mut solver = cfg.solver.clone();
            if let Some(w) = window {
                let base = solver.get_or_insert_with(|| SolverSection::new([w[0], w[1]]));
                base.window = [w[0], w[1]];
            }
            let mut solver = RunConfig::section(&solver, "solver")?.clone();
            if let Some(s) = steps {
                solver.steps = *s;
            }
            let mut contour = RunConfig::section(&cfg.contour, "contour")?.clone();
            if epsilon.is_some() {
                contour.epsilon = *epsilon;
            }
            spectrum(&section, &contour, &solver)
        }
        Command::ExactCheck { winding, m_max } => {
            let mut section = cfg.exact.clone().unwrap_or(ExactSection {
                winding: 1,
                m_max: 20,
                decay: None,
            });
            section.winding = winding.unwrap_or(section.winding);
            section.m_max = m_max.unwrap_or(section.m_max);
            exact_check(&section)
        }
        Command::SusySweep {
            gamma_min,
            gamma_max,
            gamma_den,
        } => {
            let mut section = cfg.susy.clone().unwrap_or_default();
            if let Some(g) = gamma_min {
                section.gamma_min = g.clone();
            }
            if let Some(g) = gamma_max {
                section.gamma_max = g.clone();
            }
            section.gamma_den = gamma_den.unwrap_or(section.gamma_den);
            susy_sweep(&section)
        }
        Command::Asympt { windings, taus } => {
            let mut section = cfg.asympt.clone().unwrap_or_default();
            if let Some(w) = windings {
                section.windings = w.clone();
            }
            if let Some(t) = taus {
                section.taus = t.clone();
            }
            asympt(&section)
        }
        Command::Metric { input, dim } => {
            let section = cfg.metric.clone().unwrap_or_default();
            let input = input.clone().or(section.input);
            let pencil = match input {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    Pencil::from_json(&text).map_err(|e| CliError::config("metric.input", e))?
                }
                None => {
                    let dim = dim.or(section.dim).unwrap_or(DEFAULT_METRIC_DIM);
                    random_dyson_pencil(dim, seed.unwrap_or(DEFAULT_SEED))
                        .map_err(|e| CliError::config("metric.dim", e))?
                        .pencil
                }
            };
            metric(&pencil)
        }
        Command::Fig { which } => {
            let section = cfg.fig.clone().unwrap_or_default();
            let which = which
                .or(section.which)
                .ok_or_else(|| CliError::config("fig.which", "missing"))?;
            figure(which, &section, cfg)
        }
    }
}

fn problem_section(flags: &ProblemFlags, cfg: &RunConfig) -> Result<ProblemSection, CliError> {
    let mut section = match (&cfg.problem, flags.terms.is_empty()) {
        (Some(p), true) => p.clone(),
        (_, false) => ProblemSection {
            terms: Vec::new(),
            ell: "0".into(),
            map: cfg.problem.as_ref().and_then(|p| p.map),
        },
        (None, true) => return Err(CliError::config("problem", "section missing and no --term given")),
    };
    if !flags.terms.is_empty() {
        section.terms = flags
            .terms
            .iter()
            .map(|t| {
                let (coeff, power) = t
                    .rsplit_once(':')
                    .ok_or_else(|| CliError::config("--term", format!("expected COEFF:POWER, got {t:?}")))?;
                let power = power.parse().map_err(|e| CliError::config("--term", e))?;
                Ok(TermSection {
                    coeff: coeff.to_string(),
                    power,
                })
            })
            .collect::<Result<_, CliError>>()?;
    }
    if let Some(ell) = &flags.ell {
        section.ell = ell.clone();
    }
    Ok(section)
}

fn sturm_problem(section: &ProblemSection) -> Result<SturmProblem, CliError> {
    let potential = section.potential()?;
    match section.map {
        Some(m) => rectify(&potential, m).map_err(|e| CliError::config("problem.map", e)),
        None => Ok(SturmProblem::plain(potential)),
    }
}

pub fn wedges(power: f64, phase: f64) -> Result<Artifact, CliError> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        center_angle: f64,
        half_width: f64,
        decay: bool,
        mirror: Option<usize>,
    }
    let p = power / 2.0 + 1.0;
    let sectors = stokes_sectors(p, phase).map_err(|e| CliError::config("--power", e))?;
    let pairs = symmetric_pairs(&sectors);
    let rows: Vec<Row> = sectors
        .iter()
        .enumerate()
        .map(|(index, w)| Row {
            index,
            center_angle: w.center_angle,
            half_width: w.half_width,
            decay: w.decay,
            mirror: pairs
                .iter()
                .find_map(|&(i, j)| (i == index).then_some(j).or((j == index).then_some(i))),
        })
        .collect();
    let mut csv = String::from("index,center_angle,half_width,decay,mirror\n");
    for r in &rows {
        let mirror = r.mirror.map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{mirror}",
            r.index,
            fmt_e(r.center_angle),
            fmt_e(r.half_width),
            r.decay
        );
    }
    Ok(Artifact {
        csv,
        json: to_json(&rows),
    })
}

pub fn rectify_text(section: &ProblemSection, m: u32, symbolic: bool) -> Result<Artifact, CliError> {
    let problem = rectify(&section.potential()?, m).map_err(|e| CliError::config("problem.map", e))?;
    let text = problem.equation_text("y", symbolic);
    #[derive(Serialize)]
    struct Out<'a> {
        equation: &'a str,
        problem: &'a SturmProblem,
    }
    Ok(Artifact {
        csv: format!("{text}\n"),
        json: to_json(&Out {
            equation: &text,
            problem: &problem,
        }),
    })
}

impl SolverSection {
    pub fn new(window: [f64; 2]) -> Self {
        Self {
            method: Method::Shooting,
            window,
            steps: 401,
            refine_tol: None,
            rel_tol: None,
            abs_tol: None,
            scan_rel_tol: None,
            s_far: None,
            grid_n: None,
            grid_s_max: None,
            targets: None,
        }
    }
}

pub fn spectrum(
    section: &ProblemSection,
    contour: &ContourSection,
    solver: &SolverSection,
) -> Result<Artifact, CliError> {
    let problem = sturm_problem(section)?;
    let path = contour.build()?;
    let result: Eigenresult = match solver.method {
        Method::Shooting => {
            let cfg: ShootingConfig = solver.shooting()?;
            shoot_spectrum(&problem, &path, &cfg).map_err(CliError::solver("shooting"))?
        }
        Method::Matrix => {
            let [lo, hi] = solver.window;
            let targets = solver
                .targets
                .clone()
                .unwrap_or_else(|| (0..8).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 8.0).collect());
            let mut cfg = MatrixConfig::new(
                solver.grid_n.unwrap_or(400),
                solver.grid_s_max.unwrap_or(match contour.kind {
                    ContourKind::RealLine | ContourKind::ShiftedLine => 8.0,
                    _ => 4.0,
                }),
                targets.into_iter().map(C64::from).collect(),
            );
            cfg.per_target = 2;
            let mut found = matrix_spectrum(&problem, &path, &cfg).map_err(CliError::solver("matrix"))?;
            found.eigenvalues.retain(|p| p.e.re >= lo && p.e.re <= hi);
            found
        }
    };
    Ok(Artifact {
        csv: result.to_csv(),
        json: result.to_json(),
    })
}

pub fn exact_check(section: &ExactSection) -> Result<Artifact, CliError> {
    let decay = section.decay.map(|[k, s]| (k, s));
    let rows = exact_table(section.winding, section.m_max, decay).map_err(CliError::solver("exact table"))?;
    let mut csv = String::from("N,M,ell,nu,bound,unphysical_abs,exact_zero,decay_ratio\n");
    for r in &rows {
        let c = &r.case;
        let ratio = r.decay_ratio.map(fmt_e).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{ratio}",
            c.winding,
            c.label,
            c.ell,
            c.nu,
            c.bound,
            fmt_e(r.unphysical_abs),
            r.unphysical_exact_zero
        );
    }
    Ok(Artifact {
        csv,
        json: to_json(&rows),
    })
}

pub fn susy_sweep(section: &SusySection) -> Result<Artifact, CliError> {
    let lo = parse_ratio(&section.gamma_min, "susy.gamma_min")?;
    let hi = parse_ratio(&section.gamma_max, "susy.gamma_max")?;
    if section.gamma_den < 1 {
        return Err(CliError::config("susy.gamma_den", "must be positive"));
    }
    let chi = monomials(&section.chi, "susy.chi")?;
    let mut cfg = SweepConfig::default();
    if let Some(e) = section.epsilon {
        cfg.epsilon = e;
    }
    if let Some(e) = section.e_cut {
        cfg.e_cut = e;
    }
    if let Some(t) = section.match_tol {
        cfg.match_tol = t;
    }
    let gammas = gamma_grid(lo, hi, section.gamma_den);
    let rows = sweep_gamma(&chi, &gammas, &cfg).map_err(CliError::solver("susy sweep"))?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: gamma = {}: {}",
            r.gamma,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(Artifact {
        csv: sweep_csv(&rows),
        json: to_json(&rows),
    })
}

fn comparison_rows(section: &AsymptSection) -> Result<Vec<Comparison>, CliError> {
    let cfg = ShootingConfig::new(toboggan::eigensolve::ScanWindow::new(0.0, 1.0, 2));
    let mut out = Vec::new();
    for &n in &section.windings {
        for &tau in &section.taus {
            let ell = ell_for_tau(n, tau, section.ell_den).map_err(|e| CliError::config("asympt.taus", e))?;
            match compare_with_shooting(n, ell, section.levels, section.steps_per_spacing, &cfg) {
                Ok(rows) => out.extend(rows),
                Err(e) => eprintln!("warning: N = {n}, tau = {tau}: {e}"),
            }
        }
    }
    Ok(out)
}

pub fn asympt(section: &AsymptSection) -> Result<Artifact, CliError> {
    let rows = comparison_rows(section)?;
    let mut csv = String::from("N,ell,tau,n,estimate,saddle,re_E,im_E,abs_error\n");
    for r in &rows {
        let (re, im) = r.shooting.map(|e| (fmt_e(e.re), fmt_e(e.im))).unwrap_or_default();
        let err = r.abs_error.map(fmt_e).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{re},{im},{err}",
            r.winding,
            fmt_e(r.ell),
            fmt_e(r.tau),
            r.n,
            fmt_e(r.estimate),
            fmt_e(r.saddle)
        );
    }
    Ok(Artifact {
        csv,
        json: to_json(&rows),
    })
}

pub fn metric(pencil: &Pencil) -> Result<Artifact, CliError> {
    let sys = solve_biorthogonal(pencil).map_err(CliError::solver("biorthogonal eigensolution"))?;
    let bundle = assemble_theta(&sys).map_err(CliError::solver("metric assembly"))?;
    let completeness = completeness_residual(&sys).map_err(CliError::solver("completeness"))?;
    let (spec_h, spec_w) = spectral_residuals(&sys).map_err(CliError::solver("spectral sums"))?;
    let real = bundle.all_real(1e-10);
    let rows: Vec<(&str, f64, Option<bool>)> = vec![
        ("dim", pencil.dim() as f64, None),
        ("weight_condition", pencil.weight_condition(), None),
        (
            "orthogonality",
            sys.orthogonality_defect(),
            Some(sys.orthogonality_defect() < 1e-12),
        ),
        ("hermiticity", bundle.hermiticity, Some(bundle.hermiticity < 1e-12)),
        (
            "dieudonne_h",
            bundle.dieudonne.0,
            Some(!real || bundle.dieudonne.0 < 1e-10),
        ),
        (
            "dieudonne_w",
            bundle.dieudonne.1,
            Some(!real || bundle.dieudonne.1 < 1e-10),
        ),
        ("completeness", completeness, Some(completeness < 1e-10)),
        ("spectral_h", spec_h, Some(spec_h < 1e-10)),
        ("spectral_w", spec_w, Some(spec_w < 1e-10)),
        ("positivity", bundle.positivity, Some(!real || bundle.positivity > 0.0)),
    ];
    let mut csv = String::from("quantity,value,verdict\n");
    let _ = writeln!(csv, "real_spectrum,{},", real);
    for (name, value, ok) in &rows {
        let verdict = ok.map(|b| if b { "PASS" } else { "FAIL" }).unwrap_or_default();
        let _ = writeln!(csv, "{name},{},{verdict}", fmt_e(*value));
    }
    #[derive(Serialize)]
    struct Out<'a> {
        eigenvalues: &'a [C64],
        real_spectrum: bool,
        calibration: &'a [f64],
        residuals: Vec<(&'a str, f64, Option<bool>)>,
    }
    let json = to_json(&Out {
        eigenvalues: &bundle.eigenvalues,
        real_spectrum: real,
        calibration: &bundle.calibration,
        residuals: rows.clone(),
    });
    Ok(Artifact { csv, json })
}

fn figure(which: u32, section: &FigSection, cfg: &RunConfig) -> Result<Artifact, CliError> {
    match which {
        1 => wedges(10.0, 0.0),
        8 => susy_sweep(&cfg.susy.clone().unwrap_or_default()),
        9 => rescaled_energies(section),
        10 => unrescaled_energies(section),
        other => Err(CliError::config(
            "fig.which",
            format!("no data for figure {other}; use 1, 8, 9 or 10"),
        )),
    }
}

fn fig_ells(section: &FigSection, default: &[&str]) -> Result<Vec<Ratio>, CliError> {
    match &section.ells {
        Some(list) => list.iter().map(|s| parse_ratio(s, "fig.ells")).collect(),
        None => default.iter().map(|s| parse_ratio(s, "fig.ells")).collect(),
    }
}

#[derive(Serialize)]
struct FigRow {
    winding: u32,
    rho: f64,
    n: u32,
    value: f64,
}

fn fig_artifact(rows: &[FigRow], value: &str) -> Artifact {
    let mut csv = format!("N,rho,n,{value}\n");
    for r in rows {
        let _ = writeln!(csv, "{},{},{},{}", r.winding, fmt_e(r.rho), r.n, fmt_e(r.value));
    }
    Artifact {
        csv,
        json: to_json(&rows),
    }
}

/// `F = rho^(3/5) E` from the closed-form large-`l` estimate.
fn rescaled_energies(section: &FigSection) -> Result<Artifact, CliError> {
    let windings = section.windings.clone().unwrap_or_else(|| (0..=8).collect());
    let levels = section.levels.unwrap_or(4);
    let ells = fig_ells(section, &["100", "200", "400", "800", "1600", "3200"])?;
    let mut rows = Vec::new();
    for &n in &windings {
        let m = f64::from(2 * n + 1);
        for &ell in &ells {
            let l = rat_to_f64(ell);
            let case = build_case(n, m * (l + 0.5) - 0.5).map_err(|e| CliError::config("fig.ells", e))?;
            for level in 0..levels {
                let (rho, f) =
                    rescale_f(energy_estimate(&case, level), l).map_err(|e| CliError::config("fig.ells", e))?;
                rows.push(FigRow {
                    winding: n,
                    rho,
                    n: level,
                    value: f,
                });
            }
        }
    }
    Ok(fig_artifact(&rows, "F"))
}

/// Shooting eigenvalues of the rectified cubic at moderate `l`.
fn unrescaled_energies(section: &FigSection) -> Result<Artifact, CliError> {
    let windings = section.windings.clone().unwrap_or_else(|| vec![0, 1]);
    let levels = section.levels.unwrap_or(5);
    let ells = fig_ells(section, &["1", "2", "3", "4", "6", "8"])?;
    let cfg = ShootingConfig::new(toboggan::eigensolve::ScanWindow::new(0.0, 1.0, 2));
    let mut rows = Vec::new();
    for &n in &windings {
        for &ell in &ells {
            let rho = (rat_to_f64(ell) + 0.5).powi(-2);
            match compare_with_shooting(n, ell, levels, 20, &cfg) {
                Ok(found) => rows.extend(found.iter().filter_map(|c| {
                    c.shooting.map(|e| FigRow {
                        winding: n,
                        rho,
                        n: c.n,
                        value: e.re,
                    })
                })),
                Err(e) => eprintln!("warning: N = {n}, l = {ell}: {e}"),
            }
        }
    }
    Ok(fig_artifact(&rows, "E"))
}

/// Gaussian-rational coefficient of a term, for tests and diagnostics.
pub fn term_coeff(term: &TermSection) -> Result<GaussRat, CliError> {
    crate::config::parse_gauss(&term.coeff, "term.coeff")
}
