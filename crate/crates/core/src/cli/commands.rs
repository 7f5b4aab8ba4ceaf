use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{read_json, FieldSource, ProblemConfig, RunOptions};
use super::output::Sink;
use super::{Command, RunConfig, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::sampling;
use crate::solve::{
    degenerate_sweep, domain_exhaustion, solve_closed, solve_dirichlet, Mode, ProblemSpec, SolveResult,
};
use crate::spectra::{random_instance, read_instances, run_battery, LemmaInstance};
use crate::subsol::{build_context, dichotomy_check, is_c_subsolution, sample_level_set, AxisOutcome, DichotomyCase};
use crate::symfunc::{check_structure, gamma_g_criteria, in_gamma_g, FuncFamily, LambdaTuple, DEFAULT_T_MAX};

/// What a successful run produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Lemma violations and failed checks; nonzero maps to exit status 2.
    pub findings: usize,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::LemmaCheck => lemma_check(cfg),
        Command::ConeCheck => cone_check(cfg),
        Command::SubsolCheck => subsol_check(cfg),
        Command::SolveClosed | Command::SolveDirichlet => solve(cfg),
        Command::DegenerateSweep => sweep(cfg),
        Command::Exhaustion => exhaustion(cfg),
        Command::EstimateReport => estimate_report(cfg),
    }
}

fn fmt_tuple(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}

fn optional<T: for<'de> Deserialize<'de> + Default>(cfg: &RunConfig) -> Result<T> {
    cfg.config.as_deref().map_or_else(|| Ok(T::default()), read_json)
}

fn finish(sink: Sink, findings: usize) -> Outcome {
    Outcome { files: sink.files, findings }
}

// ---------------------------------------------------------------- lemma-check

/// Seeded default battery: `n ∈ 2..=6`, `ε ∈ {0.1, 0.3, 1}`, corner
/// multipliers `{1, 1.5, 10}`.
pub fn default_lemma_battery(seed: u64, count: usize) -> Vec<LemmaInstance> {
    let mut rng = sampling::rng(seed);
    let eps = [0.1, 0.3, 1.0];
    (0..count).map(|i| random_instance(&mut rng, 2 + i % 5, eps[(i / 5) % 3], &[1.0, 1.5, 10.0])).collect()
}

fn lemma_check(cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let instances = match &cfg.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot open {}: {e}", p.display())))?;
            read_instances(&text)?
        }
        None => default_lemma_battery(seed, 1000),
    };
    let rows = run_battery(&instances)?;
    let mut sink = Sink::new(&cfg.out, seed, cfg.command.name())?;
    sink.csv("lemma_check.csv", &rows)?;
    let bad = rows.iter().filter(|r| !r.satisfied).count();
    Ok(finish(sink, bad))
}

// ----------------------------------------------------------------- cone-check

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConePoint {
    family: FuncFamily,
    lambda: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConeConfig {
    families: Vec<FuncFamily>,
    samples: usize,
    points: Vec<ConePoint>,
    /// Seeded Γ points per family for the criteria comparison.
    criteria_samples: usize,
    t_max: f64,
    seed: Option<u64>,
}

impl Default for ConeConfig {
    fn default() -> Self {
        let mixed = FuncFamily::guan_mixed(3, 2, vec![0.0, 1.0]).expect("valid family");
        Self {
            families: vec![
                FuncFamily::log_det(3).expect("valid family"),
                FuncFamily::sigma_root(3, 2).expect("valid family"),
                FuncFamily::sigma_root(4, 3).expect("valid family"),
                mixed.clone(),
            ],
            samples: 100,
            points: vec![
                ConePoint { family: mixed.clone(), lambda: vec![-0.4, 1.0, 1.0] },
                ConePoint { family: mixed, lambda: vec![1.0, 1.0, 1.0] },
                ConePoint { family: FuncFamily::log_det(3).expect("valid family"), lambda: vec![0.5, 1.0, 3.0] },
            ],
            criteria_samples: 50,
            t_max: DEFAULT_T_MAX,
            seed: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct StructureRow {
    family: String,
    samples: usize,
    min_gradient: f64,
    gradient_violations: usize,
    max_hessian_eig: f64,
    hessian_violations: usize,
    chord_worst: f64,
    chord_violations: usize,
    fd_mismatch: f64,
    fd_checked: usize,
    fd_violations: usize,
    clean: bool,
}

#[derive(Debug, Serialize)]
struct GammaRow {
    family: String,
    source: &'static str,
    lambda: String,
    in_gamma: bool,
    in_gamma_g: bool,
    margin: f64,
    ladder_bounded: Option<bool>,
    slope_nonnegative: Option<bool>,
    pairing_nonnegative: Option<bool>,
    consistent: bool,
}

fn gamma_row(f: &FuncFamily, lambda: &[f64], source: &'static str, t_max: f64, seed: u64) -> Result<GammaRow> {
    let l = LambdaTuple::from_slice(lambda)?;
    let v = in_gamma_g(f, &l, t_max)?;
    let crit = if v.in_gamma { Some(gamma_g_criteria(f, &l, t_max, 20, seed)?) } else { None };
    let consistent = crit.as_ref().map_or(true, |c| c.agree() && c.ladder_bounded == v.in_gamma_g);
    Ok(GammaRow {
        family: f.short_name(),
        source,
        lambda: fmt_tuple(lambda),
        in_gamma: v.in_gamma,
        in_gamma_g: v.in_gamma_g,
        margin: v.margin,
        ladder_bounded: crit.as_ref().map(|c| c.ladder_bounded),
        slope_nonnegative: crit.as_ref().map(|c| c.slope_nonnegative),
        pairing_nonnegative: crit.as_ref().map(|c| c.pairing_nonnegative),
        consistent,
    })
}

fn cone_check(cfg: &RunConfig) -> Result<Outcome> {
    let cc: ConeConfig = optional(cfg)?;
    let seed = cfg.seed.or(cc.seed).unwrap_or(DEFAULT_SEED);
    let mut structure = Vec::new();
    for (i, f) in cc.families.iter().enumerate() {
        f.validate().map_err(|e| Error::Config(e.to_string()))?;
        let r = check_structure(f, cc.samples, seed.wrapping_add(i as u64))?;
        structure.push(StructureRow {
            family: f.short_name(),
            samples: r.samples,
            min_gradient: r.min_gradient,
            gradient_violations: r.gradient_violations,
            max_hessian_eig: r.max_hessian_eig,
            hessian_violations: r.hessian_violations,
            chord_worst: r.chord_worst,
            chord_violations: r.chord_violations,
            fd_mismatch: r.fd_gradient_mismatch,
            fd_checked: r.fd_checked,
            fd_violations: r.fd_violations,
            clean: r.is_clean(),
        });
    }
    let mut gamma = Vec::new();
    for p in &cc.points {
        p.family.validate().map_err(|e| Error::Config(e.to_string()))?;
        if p.lambda.len() != p.family.n {
            return Err(Error::Config(format!("point {:?} has the wrong length for {}", p.lambda, p.family.short_name())));
        }
        gamma.push(gamma_row(&p.family, &p.lambda, "config", cc.t_max, seed)?);
    }
    for (i, f) in cc.families.iter().enumerate() {
        let mut rng = sampling::rng(seed.wrapping_add(1000 + i as u64));
        for _ in 0..cc.criteria_samples {
            let p = sampling::sample_cone(&mut rng, f.n, f.cone_index(), 0.9);
            gamma.push(gamma_row(f, &p, "sampled", cc.t_max, seed)?);
        }
    }
    let findings = structure.iter().filter(|r| !r.clean).count() + gamma.iter().filter(|r| !r.consistent).count();
    let mut sink = Sink::new(&cfg.out, seed, cfg.command.name())?;
    sink.csv("structure.csv", &structure)?;
    sink.csv("gamma_g.csv", &gamma)?;
    Ok(finish(sink, findings))
}

// --------------------------------------------------------------- subsol-check

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextSpec {
    family: FuncFamily,
    sigma: f64,
    mu: Vec<f64>,
    delta: f64,
    r: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CSubCase {
    family: FuncFamily,
    lambda: Vec<f64>,
    psi: f64,
    #[serde(default)]
    t_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SubsolConfig {
    contexts: Vec<ContextSpec>,
    samples: usize,
    sample_scale: f64,
    csub: Vec<CSubCase>,
    seed: Option<u64>,
}

impl Default for SubsolConfig {
    fn default() -> Self {
        let fam = |r: Result<FuncFamily>| r.expect("valid family");
        Self {
            contexts: vec![
                ContextSpec { family: fam(FuncFamily::sigma_root(3, 1)), sigma: 3.0, mu: vec![2.0; 3], delta: 0.5, r: 2.0 },
                ContextSpec { family: fam(FuncFamily::log_det(2)), sigma: 0.0, mu: vec![2.0; 2], delta: 0.25, r: 10.0 },
                ContextSpec { family: fam(FuncFamily::sigma_root(3, 2)), sigma: 1.5, mu: vec![2.0; 3], delta: 0.25, r: 10.0 },
            ],
            samples: 500,
            sample_scale: 3.0,
            csub: vec![
                CSubCase { family: fam(FuncFamily::log_det(3)), lambda: vec![0.1, 1.0, 5.0], psi: 4.0, t_max: None },
                CSubCase { family: fam(FuncFamily::sigma_quotient(3, 2, 1)), lambda: vec![1.0; 3], psi: 1.9, t_max: None },
                CSubCase { family: fam(FuncFamily::sigma_quotient(3, 2, 1)), lambda: vec![1.0; 3], psi: 2.5, t_max: None },
                CSubCase {
                    family: fam(FuncFamily::guan_mixed(3, 2, vec![0.0, 1.0])),
                    lambda: vec![-0.45, 1.0, 1.0],
                    psi: 50.0,
                    t_max: None,
                },
            ],
            seed: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct DichotomyRow {
    family: String,
    sigma: f64,
    mu: String,
    delta: f64,
    r: f64,
    r0: f64,
    eps1: f64,
    delta0: f64,
    epsilon: f64,
    rays: usize,
    crossings: usize,
    samples: usize,
    case1_only: usize,
    case2_only: usize,
    both: usize,
    neither: usize,
    sign_ties: usize,
}

#[derive(Debug, Serialize)]
struct CSubRow {
    family: String,
    lambda: String,
    psi: f64,
    t_max: f64,
    verdict: String,
    analytic: bool,
    axes: String,
}

fn axis_label(a: &AxisOutcome) -> String {
    match a {
        AxisOutcome::Exceeds(t) => format!("exceeds@{t}"),
        AxisOutcome::Bounded(v) => format!("bounded@{v}"),
        AxisOutcome::Rising(v) => format!("rising@{v}"),
    }
}

fn subsol_check(cfg: &RunConfig) -> Result<Outcome> {
    let sc: SubsolConfig = optional(cfg)?;
    let seed = cfg.seed.or(sc.seed).unwrap_or(DEFAULT_SEED);
    let mut rows = Vec::new();
    let mut contexts = Vec::new();
    for (i, c) in sc.contexts.iter().enumerate() {
        c.family.validate().map_err(|e| Error::Config(e.to_string()))?;
        let mu = LambdaTuple::from_slice(&c.mu)?;
        let ctx = build_context(&c.family, c.sigma, &mu, c.delta, c.r)?;
        let points = sample_level_set(&c.family, c.sigma, sc.samples, sc.sample_scale, seed.wrapping_add(i as u64))?;
        let mut row = DichotomyRow {
            family: c.family.short_name(),
            sigma: c.sigma,
            mu: fmt_tuple(&c.mu),
            delta: c.delta,
            r: c.r,
            r0: ctx.r0,
            eps1: ctx.eps1,
            delta0: ctx.delta0,
            epsilon: ctx.epsilon,
            rays: ctx.certificate.rays,
            crossings: ctx.certificate.crossings,
            samples: points.len(),
            case1_only: 0,
            case2_only: 0,
            both: 0,
            neither: 0,
            sign_ties: 0,
        };
        for p in &points {
            match dichotomy_check(&ctx, p) {
                Ok(r) => {
                    match r.case {
                        DichotomyCase::Case1 => row.case1_only += 1,
                        DichotomyCase::Case2 => row.case2_only += 1,
                        DichotomyCase::Both => row.both += 1,
                    }
                    row.sign_ties += r.sign_tie as usize;
                }
                Err(Error::LemmaViolation(_)) => row.neither += 1,
                Err(e) => return Err(e),
            }
        }
        rows.push(row);
        contexts.push(ctx);
    }
    let mut csub = Vec::new();
    for c in &sc.csub {
        let t_max = c.t_max.unwrap_or(DEFAULT_T_MAX);
        let r = is_c_subsolution(&c.family, &LambdaTuple::from_slice(&c.lambda)?, c.psi, t_max)?;
        csub.push(CSubRow {
            family: c.family.short_name(),
            lambda: fmt_tuple(&c.lambda),
            psi: c.psi,
            t_max,
            verdict: format!("{:?}", r.verdict).to_lowercase(),
            analytic: r.analytic,
            axes: r.axes.iter().map(axis_label).collect::<Vec<_>>().join(";"),
        });
    }
    let findings = rows.iter().map(|r| r.neither).sum();
    let mut sink = Sink::new(&cfg.out, seed, cfg.command.name())?;
    sink.csv("dichotomy.csv", &rows)?;
    sink.csv("c_subsolution.csv", &csub)?;
    sink.json("contexts.json", &contexts)?;
    Ok(finish(sink, findings))
}

// ------------------------------------------------------------- solver commands

struct Loaded {
    config: ProblemConfig,
    spec: ProblemSpec,
    seed: u64,
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or_else(|| Path::new("."))
}

fn load_problem(cfg: &RunConfig) -> Result<Loaded> {
    let path = cfg.config.as_deref().ok_or_else(|| Error::Config(format!("{} needs --config", cfg.command.name())))?;
    let config: ProblemConfig = read_json(path)?;
    let spec = config.build(base_dir(path))?;
    let seed = cfg.seed.or(config.options.seed).unwrap_or(DEFAULT_SEED);
    Ok(Loaded { config, spec, seed })
}

fn require_mode(l: &Loaded, mode: Mode, cmd: Command) -> Result<()> {
    if l.spec.mode != mode {
        return Err(Error::Config(format!("{} needs mode {:?}", cmd.name(), mode).to_lowercase()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolveRow {
    run_id: String,
    iterations: usize,
    residual: f64,
    c: Option<f64>,
    ratio2nd: f64,
    bdry_ratio: f64,
    sandwich_ok: bool,
    normal_order_ok: bool,
    admissible: bool,
    continuation_stages: usize,
    subsolution_t: Option<f64>,
}

impl SolveRow {
    fn new(run_id: String, r: &SolveResult) -> Self {
        Self {
            run_id,
            iterations: r.iterations,
            residual: r.final_residual(),
            c: r.c,
            ratio2nd: r.estimates.ratio2nd,
            bdry_ratio: r.estimates.bdry_ratio,
            sandwich_ok: r.estimates.sandwich_ok,
            normal_order_ok: r.estimates.normal_order_ok,
            admissible: r.admissible,
            continuation_stages: r.continuation_stages,
            subsolution_t: r.subsolution_t,
        }
    }
}

fn solve_spec(spec: &ProblemSpec, opts: &RunOptions) -> Result<SolveResult> {
    let o = opts.solve_options();
    match spec.mode {
        Mode::Closed => solve_closed(spec, &o),
        Mode::Dirichlet => solve_dirichlet(spec, &o),
    }
}

fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let l = load_problem(cfg)?;
    let mode = if cfg.command == Command::SolveClosed { Mode::Closed } else { Mode::Dirichlet };
    require_mode(&l, mode, cfg.command)?;
    let r = solve_spec(&l.spec, &l.config.options)?;
    let mut sink = Sink::new(&cfg.out, l.seed, cfg.command.name())?;
    let stem = cfg.command.name().replace('-', "_");
    sink.csv(&format!("{stem}.csv"), &[SolveRow::new(stem.clone(), &r)])?;
    sink.field("solution", &r.u)?;
    Ok(finish(sink, 0))
}

#[derive(Debug, Serialize)]
struct SweepRow {
    level: usize,
    epsilon: f64,
    rho: f64,
    iterations: usize,
    residual: f64,
    /// `‖u_k − u_{k+1}‖∞`, empty on the last level.
    cauchy: Option<f64>,
}

fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let l = load_problem(cfg)?;
    require_mode(&l, Mode::Dirichlet, cfg.command)?;
    let o = &l.config.options;
    let s = degenerate_sweep(&l.spec, &o.epsilon_ladder, o.boundary_shift, &o.solve_options())?;
    let rows: Vec<SweepRow> = s
        .results
        .iter()
        .enumerate()
        .map(|(k, r)| SweepRow {
            level: k,
            epsilon: s.epsilons[k],
            rho: s.rho[k],
            iterations: r.iterations,
            residual: r.final_residual(),
            cauchy: s.cauchy.get(k).copied(),
        })
        .collect();
    let mut sink = Sink::new(&cfg.out, l.seed, cfg.command.name())?;
    sink.csv("degenerate_sweep.csv", &rows)?;
    sink.csv("stability.csv", &s.stability)?;
    if let Some(last) = s.results.last() {
        sink.field("solution", &last.u)?;
    }
    if let Some(msg) = s.aborted {
        return Err(Error::Numeric(format!("sweep aborted: {msg}")));
    }
    let findings = usize::from(!s.monotone) + s.stability.iter().filter(|r| !r.ok).count();
    Ok(finish(sink, findings))
}

#[derive(Debug, Serialize)]
struct ExhaustionRow {
    alpha: Option<f64>,
    interior_nodes: usize,
    boundary_nodes: usize,
    iterations: usize,
    residual: f64,
    diff_full: Option<f64>,
    diff_prev: Option<f64>,
}

fn exhaustion(cfg: &RunConfig) -> Result<Outcome> {
    let l = load_problem(cfg)?;
    require_mode(&l, Mode::Dirichlet, cfg.command)?;
    let o = &l.config.options;
    let rep = domain_exhaustion(&l.spec, &o.alpha_ladder, &o.solve_options())?;
    let d = &l.spec.domain;
    let mut rows = vec![ExhaustionRow {
        alpha: None,
        interior_nodes: d.nodes_of(crate::grid::NodeKind::Interior).len(),
        boundary_nodes: d.nodes_of(crate::grid::NodeKind::Boundary).len(),
        iterations: rep.full.iterations,
        residual: rep.full.final_residual(),
        diff_full: None,
        diff_prev: None,
    }];
    rows.extend(rep.levels.iter().map(|lv| ExhaustionRow {
        alpha: Some(lv.alpha),
        interior_nodes: lv.interior_nodes,
        boundary_nodes: lv.boundary_nodes,
        iterations: lv.result.iterations,
        residual: lv.result.final_residual(),
        diff_full: Some(lv.diff_full),
        diff_prev: lv.diff_prev,
    }));
    let mut sink = Sink::new(&cfg.out, l.seed, cfg.command.name())?;
    sink.csv("exhaustion.csv", &rows)?;
    sink.field("solution", &rep.full.u)?;
    Ok(finish(sink, 0))
}

#[derive(Debug, Serialize)]
struct EstimateRow {
    run_id: String,
    amplitude: f64,
    iterations: usize,
    residual: f64,
    c: Option<f64>,
    sup_dbar: f64,
    grad_sq: f64,
    ratio2nd: f64,
    bdry_ratio: f64,
    sandwich_ok: bool,
    normal_order_ok: bool,
}

/// Rescales a manufactured amplitude; `None` for other sources.
fn scaled_manufactured(src: &FieldSource, factor: f64) -> Option<FieldSource> {
    match src {
        FieldSource::Expr(s) => {
            let amp: f64 = s.strip_prefix("manufactured:")?.trim().parse().ok()?;
            Some(FieldSource::Expr(format!("manufactured:{}", amp * factor)))
        }
        _ => None,
    }
}

/// Problem at amplitude `a`: manufactured data are rescaled, any other `ψ`
/// is multiplied by `a`.
fn amplitude_problem(l: &Loaded, base: &Path, a: f64) -> Result<ProblemSpec> {
    match scaled_manufactured(&l.config.psi, a) {
        Some(psi) => {
            let mut c = l.config.clone();
            c.psi = psi;
            if let Some(phi) = scaled_manufactured(&c.phi, a) {
                c.phi = phi;
            }
            c.build(base)
        }
        None => l.spec.with_psi(l.spec.psi.map(|v| a * v)),
    }
}

fn estimate_report(cfg: &RunConfig) -> Result<Outcome> {
    let l = load_problem(cfg)?;
    let base = base_dir(cfg.config.as_deref().expect("checked by load_problem")).to_path_buf();
    let mut rows = Vec::new();
    for (k, &a) in l.config.options.amplitudes.iter().enumerate() {
        let spec = amplitude_problem(&l, &base, a)?;
        let r = solve_spec(&spec, &l.config.options)?;
        let e = &r.estimates;
        if !(e.ratio2nd.is_finite() && e.bdry_ratio.is_finite()) {
            return Err(Error::Numeric(format!("non-finite estimate ratios at amplitude {a}")));
        }
        rows.push(EstimateRow {
            run_id: format!("amp{k}"),
            amplitude: a,
            iterations: r.iterations,
            residual: r.final_residual(),
            c: r.c,
            sup_dbar: e.sup_dbar,
            grad_sq: e.grad_sq,
            ratio2nd: e.ratio2nd,
            bdry_ratio: e.bdry_ratio,
            sandwich_ok: e.sandwich_ok,
            normal_order_ok: e.normal_order_ok,
        });
    }
    let mut sink = Sink::new(&cfg.out, l.seed, cfg.command.name())?;
    sink.csv("estimate_report.csv", &rows)?;
    Ok(finish(sink, 0))
}
