//! One adapter per subcommand. Each validates its flags, calls into the
//! library and returns a [`Report`].

use clap::{Args, ValueEnum};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use piatetski::arith::{floor_pow, rho, RealExponent};
use piatetski::expsum::{eval_exp_sum, vdc_audit_2, PhaseSpec, Weight};
use piatetski::rosser::{
    build_lower_rosser, density_report, fundamental_sides, streaming_density, weighted_density, SieveConfig,
};
use piatetski::solver::{
    a_of_n, a_ratio, chain, derive_params, find_representations, theorem_scan, ParamRequest, PipelineParams,
    PrimeRange, SearchOptions,
};
use piatetski::vaughan::{build_coeffs, vaughan_split};
use piatetski::{CupSystem, FactorTable, VaalerSystem};

use crate::output::{num, Table};
use crate::{echo, Failure, Report};

type Outcome = Result<Report, Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure(msg.into())
}

fn report(params: Value, table: Table) -> Report {
    Report { params, summary: Vec::new(), table, violations: Vec::new() }
}

fn c_json(z: Complex<f64>) -> [Value; 2] {
    [num(z.re), num(z.im)]
}

/// Shared α, δ, c_P, ε₀ flags. Giving both α and δ switches to general mode.
#[derive(Debug, Args, Serialize)]
pub struct PipelineArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 1.01)]
    pub c: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "c-p", default_value_t = piatetski::solver::DEFAULT_C_P)]
    pub c_p: f64,
    #[arg(long, default_value_t = piatetski::solver::DEFAULT_EPS0)]
    pub eps0: f64,
}

impl PipelineArgs {
    fn derive(&self) -> Result<PipelineParams, Failure> {
        let mut req = match (self.alpha, self.delta) {
            (Some(a), Some(d)) => ParamRequest::general(self.n, self.c, a, d),
            (None, None) => ParamRequest::new(self.n, self.c),
            _ => return Err(bad("--alpha and --delta must be given together")),
        };
        req.c_p = self.c_p;
        req.eps0 = self.eps0;
        Ok(derive_params(&req)?)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ParamsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
}

pub fn cmd_params(a: &ParamsArgs) -> Outcome {
    let p = a.pipeline.derive()?;
    let mut t = Table::new(&[
        "N", "c", "gamma", "P", "alpha", "delta", "z", "D", "s", "theorem_mode", "bound", "H1", "Z1", "R1",
    ]);
    t.push(vec![
        json!(p.n),
        num(p.c),
        num(p.gamma),
        json!(p.p),
        num(p.alpha),
        num(p.delta),
        json!(p.z),
        json!(p.level),
        num(p.s),
        json!(p.theorem_mode),
        json!(p.bound),
        json!(p.h_of(1)),
        json!(p.z_of(1)),
        json!(p.r_of(1)),
    ]);
    let mut r = report(echo(a), t);
    r.summary.push(("constraints".into(), json!(p.constraints.join("; "))));
    Ok(r)
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 1.01)]
    pub c: f64,
    /// Keep only m without prime factors below this value.
    #[arg(long = "coprime-to")]
    pub coprime_to: Option<u64>,
    #[arg(long)]
    pub limit: Option<usize>,
}

pub fn cmd_solve(a: &SolveArgs) -> Outcome {
    let exp = RealExponent::new(a.c)?;
    let reps = find_representations(a.n, &exp, SearchOptions { coprime_to: a.coprime_to, limit: a.limit, p_range: None })?;
    let mut t = Table::new(&["N", "p", "m", "omega_m", "floor_p", "floor_m"]);
    let mut violations = Vec::new();
    for r in &reps {
        // recompute both floors from scratch
        let fp = floor_pow(r.p, exp.c())?.value;
        let fm = floor_pow(r.m, exp.c())?.value;
        if fp + fm != a.n {
            violations.push(format!("p = {}, m = {}: [p^c] + [m^c] = {} != N", r.p, r.m, fp + fm));
        }
        t.push(vec![json!(r.n), json!(r.p), json!(r.m), json!(r.omega_m), json!(fp), json!(fm)]);
    }
    let mut rep = report(echo(a), t);
    rep.summary.push(("representations".into(), json!(reps.len())));
    rep.violations = violations;
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 1.01)]
    pub c: f64,
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
}

pub fn cmd_scan(a: &ScanArgs) -> Outcome {
    let exp = RealExponent::new(a.c)?;
    let s = theorem_scan(a.from, a.to, &exp)?;
    let mut t = Table::new(&["N", "p", "m", "omega_m", "bound", "ok"]);
    for r in &s.rows {
        t.push(vec![json!(r.n), json!(r.p), json!(r.m), json!(r.omega_m), json!(r.bound), json!(r.ok)]);
    }
    let mut rep = report(echo(a), t);
    rep.summary.push(("missing".into(), json!(s.missing.len())));
    rep.summary.push(("over_bound".into(), json!(s.over_bound.len())));
    // a large Ω at small N is expected; only a missing representation is a finding
    rep.violations = s.missing.iter().map(|n| format!("N = {n} has no representation")).collect();
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub slack: f64,
}

pub fn cmd_gamma(a: &GammaArgs) -> Outcome {
    let p = a.pipeline.derive()?;
    let w = build_lower_rosser(&p.sieve_config())?;
    let ch = chain(&p, &w)?;
    let primes = PrimeRange::new(&p)?;
    let an = a_of_n(&p, &primes)?;
    let mut t = Table::new(&[
        "gamma", "sum_lambda_gd", "gamma0", "sigma0", "sigma1", "rhs", "support", "A", "A_ratio", "holds",
    ]);
    let holds = ch.holds(a.slack);
    t.push(vec![
        num(ch.gamma),
        num(ch.sum_lambda_gd),
        num(ch.gamma0),
        num(ch.sigma0),
        num(ch.sigma1),
        num(ch.gamma0 + ch.sigma0 - ch.sigma1),
        json!(ch.support),
        num(an),
        num(a_ratio(&p, an)),
        json!(holds),
    ]);
    let mut rep = report(echo(a), t);
    rep.summary.push(("z".into(), json!(p.z)));
    rep.summary.push(("D".into(), json!(p.level)));
    if !holds {
        rep.violations.push(format!("chain fails: Γ = {}, Γ₀ + Σ₀ - Σ₁ = {}", ch.gamma, ch.gamma0 + ch.sigma0 - ch.sigma1));
    }
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct SieveCheckArgs {
    #[arg(long)]
    pub z: u64,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub level: u64,
    /// Check the fundamental inequality for k up to this value.
    #[arg(long = "k-max", default_value_t = 100_000)]
    pub k_max: u64,
    /// Count the weights without storing them.
    #[arg(long)]
    pub streaming: bool,
}

pub fn cmd_sieve_check(a: &SieveCheckArgs) -> Outcome {
    let cfg = SieveConfig::explicit(a.z, a.level)?;
    let table = FactorTable::new(a.k_max.max(a.z).max(2))?;
    let (density, support, failures) = if a.streaming {
        let (d, n) = streaming_density(&cfg)?;
        (d, n, None)
    } else {
        let w = build_lower_rosser(&cfg)?;
        let mut fails = 0u64;
        for k in 1..=a.k_max {
            let (l, r) = fundamental_sides(&w, &table, k)?;
            if l < r {
                fails += 1;
            }
        }
        (weighted_density(&w), w.len() as u64, Some(fails))
    };
    let d = density_report(density, &cfg, &table)?;
    let mut t = Table::new(&["z", "D", "s", "support", "density", "mertens", "f_s", "ratio", "k_max", "failures"]);
    t.push(vec![
        json!(a.z),
        json!(a.level),
        num(cfg.s),
        json!(support),
        num(d.density),
        num(d.mertens),
        num(d.f_s),
        num(d.ratio),
        json!(if failures.is_some() { a.k_max } else { 0 }),
        json!(failures),
    ]);
    let mut rep = report(echo(a), t);
    if let Some(f) = failures.filter(|&f| f > 0) {
        rep.violations.push(format!("fundamental inequality fails for {f} values of k"));
    }
    if !(d.density > 0.0) {
        rep.violations.push(format!("weighted density {} is not positive", d.density));
    }
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct RosserWeightsArgs {
    #[arg(long)]
    pub z: u64,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub level: u64,
}

pub fn cmd_rosser_weights(a: &RosserWeightsArgs) -> Outcome {
    let w = build_lower_rosser(&SieveConfig::explicit(a.z, a.level)?)?;
    let mut t = Table::new(&["d", "lambda"]);
    for (d, l) in w.iter() {
        t.push(vec![json!(d), json!(l)]);
    }
    let mut rep = report(echo(a), t);
    rep.summary.push(("support".into(), json!(w.len())));
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct VaalerArgs {
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: usize,
    /// Grid points i/grid used for the majorant check.
    #[arg(long, default_value_t = 10_000)]
    pub grid: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub slack: f64,
}

pub fn cmd_vaaler(a: &VaalerArgs) -> Outcome {
    let v = VaalerSystem::<f64>::new(a.h)?;
    if a.grid == 0 {
        return Err(bad("--grid must be positive"));
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..a.grid {
        let t = i as f64 / a.grid as f64;
        worst = worst.max((rho(t) - v.rho_approx(t)).abs() - v.rho_majorant(t));
    }
    let mut t = Table::new(&["h", "re_c", "im_c", "d"]);
    t.push(vec![json!(0), num(0.0), num(0.0), num(v.d(0))]);
    for h in 1..=a.h as i64 {
        let [re, im] = c_json(v.c(h));
        t.push(vec![json!(h), re, im, num(v.d(h))]);
    }
    let mut rep = report(echo(a), t);
    rep.summary.push(("max_excess".into(), num(worst)));
    rep.summary.push(("c_constant".into(), num(v.c_constant())));
    rep.summary.push(("d_constant".into(), num(v.d_constant())));
    if worst > a.slack {
        rep.violations.push(format!("majorant inequality exceeded by {worst:e}"));
    }
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct CupsArgs {
    #[arg(long = "Z")]
    #[serde(rename = "Z")]
    pub z: u32,
    #[arg(long)]
    pub r: u32,
    /// Highest Fourier coefficient to tabulate.
    #[arg(long, default_value_t = 64)]
    pub cutoff: usize,
    /// Run the partition and complement checks instead of listing coefficients.
    #[arg(long = "check-partition")]
    pub check_partition: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
}

pub fn cmd_cups(a: &CupsArgs) -> Outcome {
    let cups = CupSystem::<f64>::new(a.z, a.r, a.cutoff)?;
    let mut rep;
    if a.check_partition {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let xs: Vec<f64> = (0..a.samples).map(|_| rng.gen()).collect();
        let part = cups.partition_check(&xs);
        let comp = cups.complement_check(&xs);
        let mut t = Table::new(&["check", "max_deviation", "tolerance"]);
        t.push(vec![json!("partition"), num(part), num(a.tolerance)]);
        t.push(vec![json!("complement"), num(comp), num(a.tolerance)]);
        rep = report(echo(a), t);
        for (name, dev) in [("partition", part), ("complement", comp)] {
            if !(dev <= a.tolerance) {
                rep.violations.push(format!("{name} identity deviates by {dev:e}"));
            }
        }
    } else {
        let mut t = Table::new(&["n", "beta", "envelope"]);
        for n in 0..=a.cutoff as i64 {
            t.push(vec![json!(n), num(cups.beta(n)), num(cups.beta_envelope(n))]);
        }
        rep = report(echo(a), t);
    }
    rep.summary.push(("width".into(), num(cups.width())));
    rep.summary.push(("tail_bound".into(), num(cups.tail_bound())));
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Zero,
    Power,
    Combined,
}

/// φ(t) = 0, coeff·t^c, or r t^c + v (T - t^c)^γ.
#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(long, value_enum, default_value = "zero")]
    pub phase: PhaseKind,
    #[arg(long, default_value_t = 1.01)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub coeff: f64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub r: i64,
    /// v as num/den.
    #[arg(long, default_value = "1/3")]
    pub v: String,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t_big: Option<f64>,
}

impl PhaseArgs {
    fn build(&self, default_t: f64) -> Result<PhaseSpec, Failure> {
        Ok(match self.phase {
            PhaseKind::Zero => PhaseSpec::Zero,
            PhaseKind::Power => PhaseSpec::power(self.coeff, self.c)?,
            PhaseKind::Combined => {
                let (n, d) = self
                    .v
                    .split_once('/')
                    .and_then(|(n, d)| Some((n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?)))
                    .ok_or_else(|| bad(format!("--v expects num/den, got {:?}", self.v)))?;
                let exp = RealExponent::new(self.c)?;
                PhaseSpec::combined(self.r, n, d, self.t_big.unwrap_or(default_t), &exp)?
            }
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VaughanArgs {
    #[arg(long = "P")]
    #[serde(rename = "P")]
    pub p: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub phase: PhaseArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

pub fn cmd_vaughan(a: &VaughanArgs) -> Outcome {
    let phase = a.phase.build(10.0 * a.p as f64)?;
    let k = build_coeffs(a.p)?;
    let s = vaughan_split(&k, &phase)?;
    let mut t = Table::new(&[
        "P", "u", "re_u1", "im_u1", "re_u2", "im_u2", "re_u3", "im_u3", "re_u4", "im_u4", "re_direct", "im_direct",
        "lambda_mass", "residual", "relative",
    ]);
    let mut row = vec![json!(a.p), json!(k.u)];
    for z in [s.u1, s.u2, s.u3, s.u4, s.direct] {
        row.extend(c_json(z));
    }
    row.extend([num(s.lambda_mass), num(s.residual), num(s.relative_residual())]);
    t.push(row);
    let mut rep = report(echo(a), t);
    if !(s.relative_residual() <= a.tolerance) {
        rep.violations.push(format!("identity residual {:e} exceeds {:e}", s.relative_residual(), a.tolerance));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Unit,
    Logp,
    Lambda,
}

#[derive(Debug, Args, Serialize)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long)]
    pub b: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub phase: PhaseArgs,
    #[arg(long, value_enum, default_value = "unit")]
    pub weight: WeightKind,
}

pub fn cmd_expsum(a: &ExpsumArgs) -> Outcome {
    let phase = a.phase.build(10.0 * a.b as f64)?;
    let w = match a.weight {
        WeightKind::Unit => Weight::Unit,
        WeightKind::Logp => Weight::LogpPrimes,
        WeightKind::Lambda => Weight::VonMangoldt,
    };
    let r = eval_exp_sum(a.a, a.b, &phase, w)?;
    let mut t = Table::new(&["a", "b", "re", "im", "abs", "terms", "weight_total"]);
    let [re, im] = c_json(r.value);
    t.push(vec![json!(a.a), json!(a.b), re, im, num(r.value.norm()), json!(r.terms), num(r.weight_total)]);
    let mut rep = report(echo(a), t);
    if r.value.norm() > r.weight_total * (1.0 + 1e-12) {
        rep.violations.push("|sum| exceeds the total weight".into());
    }
    Ok(rep)
}

#[derive(Debug, Args, Serialize)]
pub struct VdcAuditArgs {
    #[arg(long = "P")]
    #[serde(rename = "P")]
    pub p: u64,
    #[arg(long, default_value_t = 1.01)]
    pub c: f64,
    #[arg(long = "n-max", default_value_t = 1000)]
    pub n_max: u64,
    /// Largest acceptable fitted constant.
    #[arg(long = "max-constant", default_value_t = 10.0)]
    pub max_constant: f64,
}

pub fn cmd_vdc_audit(a: &VdcAuditArgs) -> Outcome {
    let ns: Vec<u64> = (1..=a.n_max).collect();
    let audit = vdc_audit_2(a.p, a.c, &ns)?;
    let mut t = Table::new(&["P", "n", "abs_h", "bound", "ratio"]);
    for r in &audit.rows {
        t.push(vec![json!(r.p), json!(r.n), num(r.abs_h), num(r.bound), num(r.ratio)]);
    }
    let mut rep = report(echo(a), t);
    rep.summary.push(("constant".into(), num(audit.constant)));
    if audit.constant > a.max_constant {
        rep.violations.push(format!("fitted constant {} exceeds {}", audit.constant, a.max_constant));
    }
    Ok(rep)
}
