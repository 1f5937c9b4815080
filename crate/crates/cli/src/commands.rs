use std::sync::Arc;
use std::time::Instant;

use charp_core::arith::{ModPoly, Monomial, PolyMatrix, Prime, Ring};
use charp_core::connections::{
    bracket_closure, cocycle_check, horizontal_fields, p_power_closure, taylor_stratification, ConnectionData,
};
use charp_core::frobenius::{
    cartier_descend, cartier_splitting, frobenius_pullback, standard_theta, theta_coalgebra_check, theta_rees_compat,
    CartierSplitting,
};
use charp_core::rees::{
    associated_higgs, conj_deform, griffiths_check, griffiths_check_rees, mconj_member, rees_build, ConjTriple,
    FilteredModule, GriffithsClass, ReesModuleFiber,
};
use charp_core::selftest::{selftest, Sizes};
use charp_core::{Error as CoreError, WeightMode};

use crate::problem::{Mode, ParseError, Problem};
use crate::report::{digest, Record, Report, Verdict};

pub const DEFAULT_MAX_LEVEL: u32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse { column, message } => CliError::Parse(ParseError { line: 0, column, message }),
            CoreError::Dimension(_) | CoreError::RingMismatch(_) | CoreError::LevelMismatch { .. } => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Precondition(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Flags shared by the file-based commands.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub prime: Option<u64>,
    pub level: Option<u32>,
    pub degree_bound: Option<u32>,
    pub exponent: Option<u32>,
    pub timing: bool,
    /// Cap on truncation levels.
    pub max_level: Option<u32>,
}

/// The level cap from `CHARP_MAX_LEVEL`, or the default.
pub fn max_level_from_env() -> CliResult<u32> {
    match std::env::var("CHARP_MAX_LEVEL") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map_err(|_| CliError::Precondition(format!("CHARP_MAX_LEVEL must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_LEVEL),
    }
}

struct Ctx {
    problem: Problem,
    inputs: String,
    timing: bool,
    report: Report,
}

impl Ctx {
    fn new(command: &str, problem: Problem, flags: &str, timing: bool) -> Self {
        let inputs = digest(&format!("{command}\n{flags}\n{}", problem.serialize()));
        Ctx { problem, inputs, timing, report: Report::new(command) }
    }

    /// Runs `f` and appends its record.
    fn check(&mut self, name: &str, f: impl FnOnce() -> CliResult<(bool, Vec<String>, Option<String>)>) -> CliResult<()> {
        let start = Instant::now();
        let (ok, values, witness) = f()?;
        let micros = self.timing.then(|| start.elapsed().as_micros() as u64);
        self.report.records.push(Record {
            check: name.to_string(),
            inputs: self.inputs.clone(),
            verdict: Verdict::from_bool(ok),
            values,
            witness: if ok { None } else { witness },
            micros,
        });
        Ok(())
    }

    fn connection(&self) -> CliResult<ConnectionData> {
        let p = &self.problem;
        Ok(ConnectionData::new(&p.ring(), p.mode.weight_mode(), p.connection.clone())?)
    }

    fn plain_dr(&self) -> CliResult<ConnectionData> {
        let c = self.connection()?;
        if c.mode() != WeightMode::Dr || c.ring().param().is_some() {
            return Err(CliError::Precondition(format!(
                "`{}` needs mode dr without a parameter",
                self.report.command
            )));
        }
        Ok(c)
    }
}

/// A 1x1 matrix renders as its entry.
fn render(m: &PolyMatrix) -> String {
    if m.rows() == 1 && m.cols() == 1 {
        m.get(0, 0).to_string()
    } else {
        m.to_string()
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn load(problem: Problem, opts: &Options) -> CliResult<Problem> {
    match opts.prime {
        Some(p) if p != problem.prime => {
            Prime::new(p).map_err(|e| CliError::Precondition(format!("--prime: {e}")))?;
            Ok(problem.with_prime(p)?)
        }
        _ => Ok(problem),
    }
}

fn level(opts: &Options, file: Option<u32>, default: u32) -> CliResult<u32> {
    let n = opts.level.or(file).unwrap_or(default);
    let cap = opts.max_level.unwrap_or(DEFAULT_MAX_LEVEL);
    if n > cap {
        return Err(CliError::Precondition(format!("level {n} exceeds the cap {cap} (CHARP_MAX_LEVEL)")));
    }
    Ok(n)
}

pub fn curvature(problem: Problem, opts: &Options) -> CliResult<Report> {
    let mut ctx = Ctx::new("curvature", load(problem, opts)?, "", opts.timing);
    let c = ctx.connection()?;
    ctx.check("curvature vanishes", || {
        let m = c.nvars();
        let mut values = Vec::new();
        let mut witness = None;
        for i in 0..m {
            for j in i + 1..m {
                let k = c.curvature(i, j);
                if witness.is_none() && !k.is_zero() {
                    witness = Some(format!("K_{}{} = {}", i + 1, j + 1, render(&k)));
                }
                values.push(format!("K_{}{} = {}", i + 1, j + 1, render(&k)));
            }
        }
        if values.is_empty() {
            values.push("one coordinate: no curvature components".into());
        }
        Ok((witness.is_none(), values, witness))
    })?;
    let x = ModPoly::var(c.ring(), 0);
    let v = PolyMatrix::column(c.ring(), (0..c.rank()).map(|k| ModPoly::var(c.ring(), 0).pow(k as u64 + 1)).collect());
    ctx.check("Leibniz rule", || {
        let ok = c.rank() == 0 || c.leibniz_check(&x, &v)?;
        Ok((ok, Vec::new(), Some(format!("f = {x}, v = {v}"))))
    })?;
    Ok(ctx.report)
}

pub fn pcurvature(problem: Problem, opts: &Options) -> CliResult<Report> {
    let mut ctx = Ctx::new("pcurvature", load(problem, opts)?, "", opts.timing);
    let c = ctx.connection()?;
    let pc = c.p_curvature()?;
    ctx.check("p-curvature is horizontal", || {
        let mut values: Vec<String> =
            pc.psi.iter().enumerate().map(|(i, m)| format!("psi(D{}) = {}", i + 1, render(m))).collect();
        values.push(format!("vanishes: {}", yes(pc.is_zero())));
        if !pc.integrable {
            return Ok((false, values, Some("connection is not integrable".into())));
        }
        let ok = c.psi_is_horizontal(&pc);
        Ok((ok, values, Some("some psi(D_i) is not horizontal".into())))
    })?;
    if ctx.problem.mode == Mode::Conj && !ctx.problem.psi.is_empty() {
        let triple = ConjTriple::new(c.clone(), ctx.problem.psi.clone())?;
        let t = c.ring().param_name().unwrap_or("t").to_string();
        ctx.check("conjugate membership", || {
            let ok = mconj_member(&triple)?;
            Ok((ok, vec![format!("p-curvature = {t}^{} * psi: {}", c.ring().p(), yes(ok))], Some("p-curvature differs from t^p psi".into())))
        })?;
    }
    Ok(ctx.report)
}

pub fn stratify(problem: Problem, opts: &Options) -> CliResult<Report> {
    let problem = load(problem, opts)?;
    let n = level(opts, problem.level, problem.prime as u32)?;
    let mut ctx = Ctx::new("stratify", problem, &format!("level={n}"), opts.timing);
    let c = ctx.plain_dr()?;
    let s = taylor_stratification(&c, n)?;
    let m = c.nvars();
    ctx.check("cocycle identity", || {
        let values = Monomial::all_up_to(m, n)
            .into_iter()
            .map(|a| format!("M{:?} = {}", a.exps(), render(&s.coefficient(&a))))
            .collect();
        Ok((cocycle_check(&s)?, values, Some("the two sides of the cocycle identity differ".into())))
    })?;
    ctx.check("counit is the identity", || {
        let e = s.counit();
        Ok((e == PolyMatrix::identity(c.ring(), c.rank()), Vec::new(), Some(render(&e))))
    })?;
    if n >= c.ring().p() as u32 {
        let psi_zero = c.p_curvature()?.is_zero();
        ctx.check("equalizer criterion", || {
            let id = s.quotient_mod_i().is_identity();
            let values = vec![format!("identity mod I: {}", yes(id)), format!("p-curvature vanishes: {}", yes(psi_zero))];
            Ok((id == psi_zero, values, Some("image mod I disagrees with the p-curvature".into())))
        })?;
    }
    Ok(ctx.report)
}

pub fn horizontal(problem: Problem, opts: &Options) -> CliResult<Report> {
    let mut ctx = Ctx::new("horizontal", load(problem, opts)?, "", opts.timing);
    let c = ctx.plain_dr()?;
    let h = horizontal_fields(&c)?;
    let flat = c.is_integrable();
    ctx.check("bracket closure iff flat", || {
        let closed = bracket_closure(&h);
        let values = vec![h.to_string(), format!("bracket closed: {}", yes(closed)), format!("flat: {}", yes(flat))];
        Ok((closed == flat, values, Some("bracket closure disagrees with the curvature".into())))
    })?;
    if flat {
        let psi_zero = c.p_curvature()?.is_zero();
        ctx.check("p-power closure iff p-curvature vanishes", || {
            let closed = p_power_closure(&h);
            let values = vec![format!("p-power closed: {}", yes(closed)), format!("p-curvature vanishes: {}", yes(psi_zero))];
            Ok((closed == psi_zero, values, Some("p-power closure disagrees with the p-curvature".into())))
        })?;
    }
    Ok(ctx.report)
}

pub fn cartier(problem: Problem, opts: &Options) -> CliResult<Report> {
    let problem = load(problem, opts)?;
    let bound = opts.degree_bound.or(problem.degree_bound);
    let flags = bound.map(|b| format!("degree={b}")).unwrap_or_default();
    let mut ctx = Ctx::new("cartier", problem, &flags, opts.timing);
    let c = ctx.plain_dr()?;
    let ring = c.ring().clone();
    let d = c.rank();
    let descent = cartier_descend(&c, bound)?;
    ctx.check("flat frame", || {
        let det = descent.frame.det()?;
        let ok = det.constant_value().is_some_and(|v| v != 0)
            && (0..c.nvars()).all(|i| c.apply(i, &descent.frame).map(|m| m.is_zero()).unwrap_or(false));
        let values = vec![format!("frame = {}", descent.frame), format!("flat sections found: {}", descent.solution_dim)];
        Ok((ok, values, Some(format!("det = {det}"))))
    })?;
    ctx.check("descent reproduces the connection", || {
        let back = ConnectionData::trivial(&ring, WeightMode::Dr, d)?.gauge_transform(&descent.gauge)?;
        Ok((back == c, vec![format!("gauge = {}", descent.gauge)], Some(format!("{back}"))))
    })?;
    let higgs = ctx.problem.higgs.clone();
    ctx.check("canonical connection has zero p-curvature", || {
        let pulled = frobenius_pullback(&ring, d, &higgs)?;
        let values = pulled.higgs.iter().enumerate().map(|(i, b)| format!("F*B{} = {}", i + 1, render(b))).collect();
        Ok((pulled.connection.p_curvature()?.is_zero(), values, Some("nonzero p-curvature".into())))
    })?;
    Ok(ctx.report)
}

pub fn theta_check(problem: Problem, opts: &Options) -> CliResult<Report> {
    let problem = load(problem, opts)?;
    let p = problem.prime;
    let n = level(opts, problem.level, (p * p) as u32)?;
    let mut ctx = Ctx::new("theta-check", problem, &format!("level={n}"), opts.timing);
    let ring = ctx.problem.ring().without_param();
    let rep = theta_coalgebra_check(&ring, n, &standard_theta(p));
    let checked = format!("basis monomials checked: {}", rep.checked);
    for (name, ok) in [("counit diagram", rep.counit), ("equalizer diagram", rep.equalizer), ("comultiplication diagram", rep.comultiplication)] {
        let w = rep.witness.clone();
        ctx.check(name, || Ok((ok, vec![checked.clone()], w)))?;
    }
    ctx.check("filtration compatibility", || {
        Ok((theta_rees_compat(&ring, n), Vec::new(), Some(format!("some tau^[k] with |k| <= {n} lands outside its filtration step"))))
    })?;
    Ok(ctx.report)
}

fn filtered(problem: &Problem, ring: &Arc<Ring>) -> CliResult<FilteredModule> {
    if problem.filtration.is_empty() {
        Ok(FilteredModule::trivial(ring, problem.rank))
    } else {
        Ok(FilteredModule::from_steps(ring, problem.rank, &problem.filtration)?)
    }
}

pub fn rees(problem: Problem, opts: &Options) -> CliResult<Report> {
    let mut ctx = Ctx::new("rees", load(problem, opts)?, "", opts.timing);
    let c = ctx.connection()?;
    let v = filtered(&ctx.problem, c.ring())?;
    let t = ctx.problem.param.clone().unwrap_or_else(|| "t".into());
    let rm = rees_build(&v, &t)?;
    ctx.check("Rees module is free", || {
        let values = vec![format!("filtration: {v}"), format!("generators = {}", rm.generators()), format!("shift = {}", rm.shift())];
        Ok((rm.is_free(), values, Some("generators are dependent".into())))
    })?;
    ctx.check("fibers at t = 1 and t = 0", || {
        let (one, zero) = (rm.fiber(1), rm.fiber(0));
        let ok = match (&one, &zero) {
            (ReesModuleFiber::Underlying(u), ReesModuleFiber::Graded(g)) => {
                *u == v.basis_matrix(rm.ring()) && g.iter().map(|(w, _)| *w).eq(v.weights().iter().copied())
            }
            _ => false,
        };
        let mut values = Vec::new();
        if let ReesModuleFiber::Graded(g) = &zero {
            values.extend(g.iter().map(|(w, b)| format!("gr^{w}: {b}")));
        }
        Ok((ok, values, Some("fiber mismatch".into())))
    })?;
    if c.mode() == WeightMode::Dr {
        let class = griffiths_check(&v, &c)?;
        let via_rees = griffiths_check_rees(&v, &c)?;
        let higgs = associated_higgs(&v, &c)?;
        ctx.check("Griffiths classification", || {
            let ok = class == via_rees && (class == GriffithsClass::Preserves) == higgs.iter().all(PolyMatrix::is_zero);
            let mut values = vec![format!("class: {class}")];
            values.extend(higgs.iter().enumerate().map(|(i, b)| format!("gr theta_{} = {}", i + 1, render(b))));
            Ok((ok, values, Some(format!("adapted basis gives {class}, Rees generators give {via_rees}"))))
        })?;
    }
    Ok(ctx.report)
}

pub fn deform(problem: Problem, opts: &Options) -> CliResult<Report> {
    let problem = load(problem, opts)?;
    let e = opts.exponent.unwrap_or(problem.prime as u32);
    let mut ctx = Ctx::new("deform", problem, &format!("exponent={e}"), opts.timing);
    let p = &ctx.problem;
    if p.higgs.is_empty() {
        return Err(CliError::Precondition("`deform` needs a [higgs] section".into()));
    }
    let base = p.ring().without_param();
    let zeta = if p.lift.is_empty() { CartierSplitting::standard(&base) } else { cartier_splitting(&base, p.lift.clone())? };
    let t = p.param.clone().unwrap_or_else(|| "t".into());
    let out = conj_deform(&p.higgs, &zeta, e, &t)?;
    ctx.check("deformed connection is integrable", || {
        let values = out.triple.connection().matrices().iter().enumerate().map(|(i, a)| format!("A{} = {}", i + 1, render(a))).collect();
        Ok((out.integrable, values, Some("nonzero curvature".into())))
    })?;
    ctx.check("connection form is closed", || Ok((out.closed, Vec::new(), Some("d(sum A_i dx_i) is nonzero".into()))))?;
    ctx.check("conjugate membership", || {
        let mut values = vec![format!("kappa = {}", out.kappa)];
        values.extend(out.triple.psi().iter().enumerate().map(|(i, m)| format!("psi{} = {}", i + 1, render(m))));
        values.extend(out.p_curvature.iter().enumerate().map(|(i, m)| format!("p-curvature(D{}) = {}", i + 1, render(m))));
        values.push(match out.measured_exponent {
            Some(k) => format!("measured t-exponent: {k}"),
            None => "measured t-exponent: none (p-curvature vanishes)".into(),
        });
        Ok((out.member, values, Some(format!("p-curvature is not {t}^{} psi", base.p()))))
    })?;
    Ok(ctx.report)
}

pub fn run_selftest(seed: u64, instances: usize) -> CliResult<Report> {
    let sizes = Sizes { instances, ..Sizes::default() };
    let inputs = digest(&format!("selftest\nseed={seed} instances={instances} degree={}", sizes.max_degree));
    let records = selftest(seed, &sizes)?;
    let mut report = Report::new("selftest");
    for r in records {
        report.records.push(Record {
            check: r.name.to_string(),
            inputs: inputs.clone(),
            verdict: Verdict::from_bool(r.passed),
            values: vec![format!("cases: {}", r.cases)],
            witness: r.witness,
            micros: None,
        });
    }
    Ok(report)
}
