use liouville_core::collapse::{self, ScanWindow};
use liouville_core::disk::{self, DiskControl, DiskProblem, DiskSolution, LogPolarMesh, ScalingControl};
use liouville_core::mass_curve::{self, MassCurve, SweepSpec};
use liouville_core::radial::{self, IntegrationControl, RadialSolution, WeightSpec};
use liouville_core::relations::{self, HeightInputs};
use liouville_core::units::{self, MassUnit};
use liouville_core::vortex::{self, NewtonControl, VortexParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::*;
use crate::emit::{Cell, Emitter, Table};
use crate::error::{LabError, LabResult};

pub struct Context {
    pub emit: Emitter,
    pub unit: MassUnit,
    pub seed: u64,
}

impl Context {
    /// A beta-unit mass in the output unit.
    fn mass(&self, beta: f64) -> f64 {
        units::from_beta(beta, self.unit)
    }

    fn unit_name(&self) -> &'static str {
        match self.unit {
            MassUnit::Rho => "rho",
            MassUnit::Beta => "beta",
        }
    }
}

/// Run a subcommand; the returned summary is also written to `<name>.json`.
pub fn dispatch(cmd: &Command, ctx: &Context) -> LabResult<Vec<u8>> {
    let (name, summary) = match cmd {
        Command::Shoot(a) => ("shoot", shoot(a, ctx)?),
        Command::Beta(a) => ("beta", beta(a, ctx)?),
        Command::MassCurve(a) => ("mass_curve", mass_curve(a, ctx)?),
        Command::RhoBar(a) => ("rho_bar", rho_bar(a, ctx)?),
        Command::Classify(a) => ("classify", classify(a, ctx)?),
        Command::Collapse(a) => ("collapse", collapse(a, ctx)?),
        Command::LimitProfile(a) => ("limit_profile", limit_profile(a, ctx)?),
        Command::BlowupPoints(a) => ("blowup_points", blowup_points(a, ctx)?),
        Command::Masses(a) => ("masses", masses(a, ctx)?),
        Command::Height(a) => ("height", height(a)?),
        Command::DiskSolve(a) => ("disk", disk_solve(a, ctx)?),
        Command::Scaling(a) => ("scaling", scaling(a, ctx)?),
    };
    ctx.emit.json(&format!("{name}.json"), &summary)
}

fn control(fine: bool) -> IntegrationControl {
    if fine {
        IntegrationControl::fine()
    } else {
        IntegrationControl::default()
    }
}

fn weight(w: &WeightArgs) -> LabResult<WeightSpec> {
    if w.eps.is_none() && w.p.is_none() && w.q.is_none() {
        let spec = WeightSpec::pure(w.alpha);
        spec.validate()?;
        return Ok(spec);
    }
    Ok(WeightSpec::new(w.eps.unwrap_or(1.0), w.p.unwrap_or(w.alpha), w.q.unwrap_or(0.0))?)
}

fn trace_table(sol: &RadialSolution, ctx: &Context) -> Table {
    let mut t = Table::new(&["t", "r", "v", "slope", "mass", "forcing"]);
    for i in 0..sol.len() {
        t.push(vec![
            Cell::F(sol.grid[i]),
            Cell::F(sol.radius(i)),
            Cell::F(sol.v[i]),
            Cell::F(sol.slope[i]),
            Cell::F(ctx.mass(sol.mass[i])),
            Cell::F(sol.forcing[i]),
        ]);
    }
    t
}

fn shoot(args: &PointArgs, ctx: &Context) -> LabResult<Value> {
    let w = weight(&args.weight)?;
    let (m, c) = radial::beta_relaxed(&w, args.a, &control(args.weight.fine))?;
    let sol = radial::integrate_cauchy(&w, args.a, &c)?;
    ctx.emit.csv("shoot.csv", &trace_table(&sol, ctx))?;
    Ok(json!({
        "weight": w, "a": args.a, "unit": ctx.unit_name(),
        "beta": ctx.mass(m.beta), "tail": ctx.mass(m.tail), "converged": m.converged,
        "t_cut": m.t_cut, "points": sol.len(),
    }))
}

fn beta(args: &BetaArgs, ctx: &Context) -> LabResult<Value> {
    let p = &args.point;
    let w = weight(&p.weight)?;
    let (m, c) = radial::beta_relaxed(&w, p.a, &control(p.weight.fine))?;
    let mut out = json!({
        "weight": w, "a": p.a, "unit": ctx.unit_name(),
        "beta": ctx.mass(m.beta), "tail": ctx.mass(m.tail), "converged": m.converged, "t_cut": m.t_cut,
    });
    if args.derivative {
        out["beta_prime"] = json!(ctx.mass(radial::linearized(&w, p.a, &c)?.beta_prime));
    }
    Ok(out)
}

/// Sweep with samples evaluated on the current rayon pool; order is canonical.
fn sweep(args: &SweepArgs) -> LabResult<(MassCurve, IntegrationControl)> {
    let ctrl = control(args.fine);
    let curve = mass_curve::sweep_with(args.alpha, args.a_lo, args.a_hi, args.n, &ctrl, |grid| {
        grid.par_iter().map(|&a| mass_curve::sample(args.alpha, a, &ctrl)).collect()
    })?;
    Ok((curve, ctrl))
}

fn minimizer_json(curve: &MassCurve, ctx: &Context) -> Value {
    match curve.minimizer {
        Some(m) => json!({"a_star": m.a_star, "bar": ctx.mass(m.beta_bar), "beta_prime": ctx.mass(m.beta_prime)}),
        None => Value::Null,
    }
}

fn mass_curve(args: &MassCurveArgs, ctx: &Context) -> LabResult<Value> {
    let (curve, ctrl) = sweep(&args.sweep)?;
    let mut t = Table::new(&["a", "beta", "converged", "tail"]);
    for s in &curve.samples {
        t.push(vec![Cell::F(s.a), Cell::F(ctx.mass(s.beta)), Cell::B(s.converged), Cell::F(ctx.mass(s.tail))]);
    }
    ctx.emit.csv("mass_curve.csv", &t)?;
    let mut out = json!({
        "alpha": curve.alpha, "unit": ctx.unit_name(), "samples": curve.samples.len(),
        "converged": curve.converged().count(), "minimizer": minimizer_json(&curve, ctx),
        "monotonicity": curve.monotonicity(),
        "image": curve.image().map(|(lo, hi)| [ctx.mass(lo), ctx.mass(hi)]),
    });
    if let Some(target) = args.target {
        let roots = mass_curve::solve_for_mass(curve.alpha, units::to_beta(target, ctx.unit), &curve, &ctrl)?;
        out["target"] = json!(target);
        out["roots"] = json!(roots);
    }
    Ok(out)
}

fn rho_bar(args: &SweepArgs, ctx: &Context) -> LabResult<Value> {
    let (curve, _) = sweep(args)?;
    let m = curve.minimizer.ok_or(liouville_core::Error::NoInteriorMin)?;
    let window = if args.alpha > 1.0 && args.alpha < 3.0 {
        collapse::admissible_rho_window(args.alpha, m.beta_bar)
            .ok()
            .map(|(lo, hi)| [ctx.mass(units::rho_to_beta(lo)), ctx.mass(units::rho_to_beta(hi))])
    } else {
        None
    };
    Ok(json!({
        "alpha": args.alpha, "unit": ctx.unit_name(), "a_star": m.a_star,
        "bar": ctx.mass(m.beta_bar), "beta_prime": m.beta_prime, "collapse_window": window,
    }))
}

fn classify(args: &ClassifyArgs, ctx: &Context) -> LabResult<Value> {
    let s = &args.sweep;
    let (curve, ctrl) = sweep(s)?;
    let spec = SweepSpec { a_lo: s.a_lo, a_hi: s.a_hi, n: s.n, targets: args.targets };
    let mut r = mass_curve::classify_curve(&curve, spec, &ctrl)?;
    r.solvable.lo = ctx.mass(r.solvable.lo);
    r.solvable.hi = ctx.mass(r.solvable.hi);
    for b in &mut r.multiplicity {
        b.beta_lo = ctx.mass(b.beta_lo);
        b.beta_hi = ctx.mass(b.beta_hi);
    }
    if let Some(m) = &mut r.minimizer {
        m.beta_bar = ctx.mass(m.beta_bar);
    }
    Ok(json!({"unit": ctx.unit_name(), "report": r}))
}

fn collapse(args: &CollapseArgs, ctx: &Context) -> LabResult<Value> {
    let window = ScanWindow { first_center: args.center, below: args.below, above: args.above, points: args.points };
    let report = collapse::run_collapse_with(args.alpha, args.rho, &args.schedule, &control(args.fine), window)?;
    let run = &report.run;
    let mut t = Table::new(&["eps", "a_found", "beta_check", "plateau", "plateau_third", "r_probe", "roots"]);
    let mut profiles = Table::new(&["eps", "t", "r", "mass"]);
    let mut drift: f64 = 0.0;
    for rec in &run.records {
        let Some(s) = &rec.solved else {
            let nan = Cell::F(f64::NAN);
            t.push(vec![Cell::F(rec.eps), Cell::F(f64::NAN), nan, Cell::F(f64::NAN), Cell::F(f64::NAN), Cell::F(rec.r_probe), Cell::I(0)]);
            continue;
        };
        drift = drift.max((units::beta_to_rho(s.beta_check) - args.rho).abs() / args.rho);
        t.push(vec![
            Cell::F(rec.eps),
            Cell::F(s.a_found),
            Cell::F(ctx.mass(s.beta_check)),
            Cell::F(ctx.mass(s.plateau)),
            Cell::F(ctx.mass(s.plateau_third)),
            Cell::F(rec.r_probe),
            Cell::I(s.roots.len() as i64),
        ]);
        let sol = &s.solution;
        for i in 0..sol.len() {
            profiles.push(vec![Cell::F(rec.eps), Cell::F(sol.grid[i]), Cell::F(sol.radius(i)), Cell::F(ctx.mass(sol.mass[i]))]);
        }
    }
    ctx.emit.csv("collapse.csv", &t)?;
    ctx.emit.csv("collapse_profiles.csv", &profiles)?;
    Ok(json!({
        "note": report.note, "alpha": run.alpha, "rho": run.rho, "a_pow": run.a_pow,
        "a_pow_admissible": collapse::a_pow_admissible(run.a_pow), "unit": ctx.unit_name(),
        "final_plateau": report.final_plateau().map(|p| ctx.mass(p)),
        "missing": run.records.iter().filter(|r| r.solved.is_none()).count(),
        "max_relative_mass_drift": drift,
    }))
}

fn limit_profile(args: &LimitArgs, ctx: &Context) -> LabResult<Value> {
    let eta = collapse::limit_profile(args.alpha, args.rho, &control(args.fine))?;
    let mut t = Table::new(&["t", "r", "eta", "xi", "mass"]);
    for i in 0..eta.len() {
        let s = eta.grid[i];
        t.push(vec![Cell::F(s), Cell::F(eta.radius(i)), Cell::F(eta.v[i]), Cell::F(eta.v[i] - 4.0 * s), Cell::F(ctx.mass(eta.mass[i]))]);
    }
    ctx.emit.csv("limit_profile.csv", &t)?;
    Ok(json!({
        "note": collapse::REPORT_NOTE, "alpha": args.alpha, "rho": args.rho, "weight": eta.weight,
        "a": eta.a, "unit": ctx.unit_name(), "mass": eta.mass.last().map(|m| ctx.mass(*m)),
    }))
}

fn vortex_params(args: &BlowupArgs) -> LabResult<VortexParams> {
    let integral = |x: f64| x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64;
    if integral(args.alpha1) && integral(args.alpha2) {
        return Ok(VortexParams::new(args.alpha1 as u32, args.alpha2 as u32, args.m)?);
    }
    if !args.extrapolate {
        return Err(LabError::Invalid(format!(
            "strengths ({}, {}) are not non-negative integers; pass --extrapolate to evaluate anyway",
            args.alpha1, args.alpha2
        )));
    }
    Ok(VortexParams::extrapolated(args.alpha1, args.alpha2, args.m)?)
}

/// Newton from `starts` random configurations in `[-2, 2]^2`.
fn oracle(params: &VortexParams, reference: &[Complex64], starts: usize, seed: u64) -> LabResult<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<Complex64>> = (0..starts)
        .map(|_| (0..params.m).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect())
        .collect();
    let ctrl = NewtonControl::default();
    let results: Vec<Option<f64>> = draws
        .par_iter()
        .map(|z| vortex::newton_oracle(params, z, &ctrl).ok().map(|p| vortex::set_distance(&p, reference)))
        .collect();
    let dist: Vec<f64> = results.iter().flatten().copied().collect();
    let worst = dist.iter().copied().fold(0.0, f64::max);
    if worst > 1e-7 {
        return Err(LabError::OracleDisagrees(format!("set distance {worst:e} from a random start")));
    }
    Ok(json!({"starts": starts, "converged": dist.len(), "diverged": starts - dist.len(), "max_set_distance": worst}))
}

fn blowup_points(args: &BlowupArgs, ctx: &Context) -> LabResult<Value> {
    let params = vortex_params(args)?;
    let config = vortex::find_points(&params)?;
    let turn = Complex64::from_polar(1.0, args.rotation);
    let points: Vec<[f64; 2]> = config.points.iter().map(|z| z * turn).map(|z| [z.re, z.im]).collect();
    let mut out = json!({
        "params": config.params, "sym": config.sym, "poly": config.poly, "points": points,
        "residual": config.residual, "rotation": args.rotation,
    });
    if args.oracle_starts > 0 {
        out["oracle"] = oracle(&params, &config.points, args.oracle_starts, ctx.seed)?;
        out["seed"] = json!(ctx.seed);
    }
    Ok(out)
}

fn masses(args: &MassesArgs, ctx: &Context) -> LabResult<Value> {
    let list = relations::admissible_masses(args.alpha1, args.alpha2)?;
    let masses: Vec<(u32, f64)> = list.into_iter().map(|(m, s)| (m, ctx.mass(s))).collect();
    let (a1, a2) = (args.alpha1 as f64, args.alpha2 as f64);
    Ok(json!({
        "alpha1": args.alpha1, "alpha2": args.alpha2, "unit": ctx.unit_name(), "masses": masses,
        "double_root": ctx.mass(relations::pohozaev_double_root(a1, a2)),
    }))
}

pub fn read_height_inputs(path: &std::path::Path) -> LabResult<HeightInputs> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    let h: HeightInputs = serde_json::from_str(&text)?;
    h.validate()?;
    Ok(h)
}

fn height(args: &HeightArgs) -> LabResult<Value> {
    let h = read_height_inputs(&args.input)?;
    let idx: Vec<usize> = match args.index {
        Some(i) => vec![i],
        None => (0..h.m as usize).collect(),
    };
    let heights = idx.iter().map(|&i| relations::predict_height(&h, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "t": h.t, "m": h.m, "index": idx, "heights": heights,
        "log_coefficient": relations::height_log_coefficient(h.alpha1 as f64, h.alpha2 as f64, h.m),
    }))
}

fn disk_control(m: &MeshArgs) -> DiskControl {
    DiskControl { tol: m.tol, max_iter: m.max_iter }
}

/// `ln(8 (1+a)^2 mu^2 / (1 + mu^2 r^{2(1+a)})^2)`, exact for `W = |x|^{2a}`.
fn exact_bubble(a: f64, mu: f64, r: f64) -> f64 {
    (8.0 * (1.0 + a).powi(2) * mu * mu / (1.0 + mu * mu * r.powf(2.0 + 2.0 * a)).powi(2)).ln()
}

fn node_radius(mesh: &LogPolarMesh, k: usize) -> f64 {
    let x = mesh.node_point(k);
    x[0].hypot(x[1])
}

fn disk_solve(args: &DiskArgs, ctx: &Context) -> LabResult<Value> {
    let ma = &args.mesh;
    let (a1, a2, t) = match args.case {
        DiskCase::Vortex => (args.alpha1, args.alpha2, args.t),
        DiskCase::Bubble => (0, 0, 0.0),
        DiskCase::Singular => (1, 0, 0.0),
    };
    let a = (a1 + a2) as f64;
    let manufactured = args.case != DiskCase::Vortex;
    if manufactured && !(args.mu > 0.0) {
        return Err(LabError::Invalid(format!("mu = {} must be positive", args.mu)));
    }
    let t_min = args.t_min.unwrap_or(if t > 0.0 { disk::scaling_t_min(t) } else { 1e-4f64.ln() });
    let mesh = match args.n_r {
        Some(n) => LogPolarMesh::new(t_min, n, ma.n_theta)?,
        None => LogPolarMesh::with_spacing(t_min, ma.h, ma.n_theta)?,
    };
    let c = if manufactured { exact_bubble(a, args.mu, 1.0) } else { ma.boundary };
    let problem = DiskProblem::constant_boundary(mesh, |_| 1.0, a1, a2, t, c)?;
    let init = match (args.init, manufactured) {
        (Init::Zero, _) => vec![0.0; mesh.nodes()],
        (Init::Bubble, true) => (0..mesh.nodes()).map(|k| exact_bubble(a, 0.75 * args.mu, node_radius(&mesh, k))).collect(),
        (Init::Bubble, false) => problem.bubble_guess(),
    };
    let sol = disk::solve(&problem, &init, &disk_control(ma))?;
    ctx.emit.f64_array("disk.f64", &sol.u)?;
    let error = manufactured.then(|| {
        (0..mesh.nodes()).map(|k| (sol.u[k] - exact_bubble(a, args.mu, node_radius(&mesh, k))).abs()).fold(0.0, f64::max)
    });
    Ok(disk_summary(&sol, ctx, error))
}

fn disk_summary(sol: &DiskSolution, ctx: &Context, error: Option<f64>) -> Value {
    let p = &sol.problem;
    let (kmax, umax) = sol.max();
    let rho_mass = |m: f64| ctx.mass(units::rho_to_beta(m));
    json!({
        "file": "disk.f64", "dtype": "f64le", "len": sol.u.len(),
        "layout": "pole node first, then rings outward; node 1 + i * n_theta + j sits at log-radius t_min + i h, angle 2 pi j / n_theta",
        "mesh": p.mesh, "h": p.mesh.h(), "alpha1": p.alpha1, "alpha2": p.alpha2, "t_vortex": p.t_vortex,
        "boundary": p.boundary, "unit": ctx.unit_name(),
        "newton_iters": sol.newton_iters, "residual_norm": sol.residual_norm, "converged": sol.converged,
        "lambda": sol.lambda_extract, "max": {"node": kmax, "value": umax, "point": p.mesh.node_point(kmax)},
        "mass": rho_mass(sol.mass()), "mass_balance": sol.mass_balance(),
        "pohozaev": pohozaev_at(sol, 0.5, ctx), "sup_error": error,
    })
}

fn pohozaev_at(sol: &DiskSolution, r: f64, ctx: &Context) -> Value {
    let ring = sol.problem.mesh.nearest_ring(r);
    let radius = sol.problem.mesh.radius(ring);
    json!({"radius": radius, "residual": disk::pohozaev_residual(sol, r), "mass_inside": ctx.mass(units::rho_to_beta(sol.mass_within(ring)))})
}

fn scaling(args: &ScalingArgs, ctx: &Context) -> LabResult<Value> {
    let ma = &args.mesh;
    let Some(&t0) = args.schedule.first() else {
        return Err(LabError::Invalid("empty t schedule".into()));
    };
    if !(t0 > 0.0 && t0 <= 0.5) {
        return Err(LabError::Invalid(format!("schedule must lie in (0, 0.5], starts at {t0}")));
    }
    let mesh = LogPolarMesh::with_spacing(disk::scaling_t_min(t0), ma.h, ma.n_theta)?;
    let base = DiskProblem::constant_boundary(mesh, |_| 1.0, args.alpha, args.alpha, t0, ma.boundary)?;
    let ctrl = ScalingControl {
        newton: disk_control(ma),
        h: ma.h,
        separation: args.separation,
        pohozaev_radius: args.pohozaev_radius,
        warm_start: !args.cold,
    };
    let report = disk::continuation_in_t(&base, &args.schedule, &ctrl)?;
    let rho_mass = |m: f64| ctx.mass(units::rho_to_beta(m));
    let mut t = Table::new(&[
        "t", "n_r", "newton_iters", "residual_norm", "lambda", "m", "combination", "center_y1", "center_y2", "mass",
        "mass_balance", "pohozaev", "local_mass",
    ]);
    for e in &report.entries {
        t.push(vec![
            Cell::F(e.t),
            Cell::I(e.n_r as i64),
            Cell::I(e.newton_iters as i64),
            Cell::F(e.residual_norm),
            Cell::F(e.lambda),
            Cell::I(e.m as i64),
            Cell::F(e.combination),
            Cell::F(e.center[0]),
            Cell::F(e.center[1]),
            Cell::F(rho_mass(e.mass)),
            Cell::F(e.mass_balance),
            Cell::F(e.pohozaev),
            Cell::F(rho_mass(e.local_mass)),
        ]);
    }
    ctx.emit.csv("scaling.csv", &t)?;
    let summary = json!({
        "note": report.note, "alpha1": report.alpha1, "alpha2": report.alpha2, "unit": ctx.unit_name(),
        "schedule": args.schedule, "steps": report.entries.len(), "total_variation": report.total_variation(),
        "branch_lost_at": report.branch_lost_at, "warm_start": ctrl.warm_start,
    });
    if report.branch_lost_at.is_some() {
        ctx.emit.json("scaling.json", &summary)?;
        report.require_complete()?;
    }
    Ok(summary)
}
