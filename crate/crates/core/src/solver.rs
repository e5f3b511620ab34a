//! The equation `[p^c] + [m^c] = N`: parameter derivation, representation
//! search, the counting sum Γ and its sieve decomposition.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{floor_pow, power_value, root_of_floor, Dyadic, RealExponent, DEFAULT_LIMIT};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::expsum::e_dd;
use crate::harmonic::VaalerSystem;
use crate::rosser::{RosserWeights, SieveConfig};
use crate::sieve::{primes_between, FactorTable};
use crate::sum::{ComplexSum, Neumaier};

pub const DEFAULT_C_P: f64 = 0.25;
pub const DEFAULT_EPS0: f64 = 1e-3;

/// ⌊52/(29 - 28c)⌋ + 1, the prime-factor bound of the theorem.
pub fn theorem_bound(c: f64) -> u32 {
    (52.0 / (29.0 - 28.0 * c)).floor() as u32 + 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineParams {
    #[serde(rename = "N")]
    pub n: u64,
    pub c: f64,
    pub gamma: f64,
    #[serde(skip)]
    pub exp: RealExponent,
    pub c_p: f64,
    #[serde(rename = "P")]
    pub p: u64,
    pub alpha: f64,
    pub delta: f64,
    pub eps0: f64,
    pub z: u64,
    #[serde(rename = "D")]
    pub level: u64,
    pub s: f64,
    pub theorem_mode: bool,
    pub bound: u32,
    /// Constraints that were checked, in the order checked.
    pub constraints: Vec<String>,
}

/// Inputs of [`derive_params`]; `None` picks the theorem-mode defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRequest {
    pub n: u64,
    pub c: f64,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub c_p: f64,
    pub eps0: f64,
    pub theorem_mode: bool,
}

impl ParamRequest {
    pub fn new(n: u64, c: f64) -> Self {
        Self { n, c, alpha: None, delta: None, c_p: DEFAULT_C_P, eps0: DEFAULT_EPS0, theorem_mode: true }
    }

    /// Explicit α, δ with theorem-mode checks switched off.
    pub fn general(n: u64, c: f64, alpha: f64, delta: f64) -> Self {
        Self { alpha: Some(alpha), delta: Some(delta), theorem_mode: false, ..Self::new(n, c) }
    }
}

fn violation(what: impl Into<String>) -> Error {
    Error::ConstraintViolation(what.into())
}

pub fn derive_params(req: &ParamRequest) -> Result<PipelineParams> {
    let exp = RealExponent::new(req.c)?;
    let gamma = exp.gamma_f64();
    let n = req.n;
    if n < 3 {
        return Err(Error::InvalidArgument(format!("N >= 3 required, got {n}")));
    }
    if !(req.c_p > 0.0) {
        return Err(Error::InvalidArgument("c_P must be positive".into()));
    }
    let mut constraints = Vec::new();
    let nf = n as f64;
    let top = 29.0 * gamma - 28.0;
    let alpha = req.alpha.unwrap_or(top / 52.0 - req.eps0);
    let delta = req.delta.unwrap_or(2.0 * alpha + req.eps0);
    if !(alpha > 0.0 && delta > 0.0) {
        return Err(violation(format!("alpha > 0 and delta > 0 (alpha = {alpha}, delta = {delta})")));
    }
    let s = delta / alpha;
    if req.theorem_mode {
        constraints.push("28/29 < gamma < 1".to_string());
        if !(29.0 * gamma > 28.0 && gamma < 1.0) {
            return Err(violation(format!("28/29 < gamma < 1 (gamma = {gamma})")));
        }
        constraints.push("delta < (29 gamma - 28)/26".to_string());
        if !(delta < top / 26.0) {
            return Err(violation(format!("delta < (29 gamma - 28)/26 (delta = {delta}, limit = {})", top / 26.0)));
        }
        constraints.push("2 < delta/alpha < 3".to_string());
        if !(s > 2.0 && s < 3.0) {
            return Err(violation(format!("2 < delta/alpha < 3 (s = {s})")));
        }
    }
    let p = (req.c_p * nf.powf(gamma)).floor() as u64;
    if p < 1 {
        return Err(violation(format!("P >= 1 (P = {p})")));
    }
    constraints.push("(2P)^c < N/2".to_string());
    let top_floor = floor_pow(2 * p, exp.c())?.value;
    if !(2 * top_floor < n) {
        return Err(violation(format!("(2P)^c < N/2 ([(2P)^c] = {top_floor}, N = {n})")));
    }
    let z = (nf.powf(alpha).floor() as u64).max(2);
    let level = (nf.powf(delta).floor() as u64).max(z);
    Ok(PipelineParams {
        n,
        c: req.c,
        gamma,
        exp,
        c_p: req.c_p,
        p,
        alpha,
        delta,
        eps0: req.eps0,
        z,
        level,
        s,
        theorem_mode: req.theorem_mode,
        bound: theorem_bound(req.c),
        constraints,
    })
}

impl PipelineParams {
    fn per_d(&self, d: u64, power: i32) -> f64 {
        let nf = self.n as f64;
        d as f64 * nf.powf(1.0 - self.gamma) * nf.ln().powi(power)
    }

    /// H(d) = d N^{1-γ} (log N)^3, at least 2.
    pub fn h_of(&self, d: u64) -> usize {
        (self.per_d(d, 3).floor() as usize).max(2)
    }

    /// Z(d) = d N^{1-γ} (log N)^7, at least 2.
    pub fn z_of(&self, d: u64) -> u64 {
        (self.per_d(d, 7).floor() as u64).max(2)
    }

    /// R(d) = d N^{1-γ} (log N)^12.
    pub fn r_of(&self, d: u64) -> u64 {
        self.per_d(d, 12).floor() as u64
    }

    pub fn sieve_config(&self) -> SieveConfig {
        SieveConfig {
            n: Some(self.n),
            alpha: self.alpha,
            delta: self.delta,
            z: self.z,
            level: self.level,
            s: self.s,
            theorem_mode: self.theorem_mode,
        }
    }

    /// An m-range upper bound: every solution has m <= N^γ.
    pub fn m_max(&self) -> u64 {
        (self.n as f64).powf(self.gamma).ceil() as u64 + 1
    }
}

/// [m^c] for m = 0..=upto with root lookup; [m^c] is strictly increasing.
#[derive(Debug, Clone)]
pub struct FloorTable {
    values: Vec<u64>,
}

impl FloorTable {
    pub fn new(exp: &RealExponent, upto: u64) -> Result<Self> {
        Ok(Self { values: crate::arith::floor_table(exp.c(), upto)? })
    }

    pub fn upto(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, m: u64) -> u64 {
        self.values[m as usize]
    }

    /// The m >= 1 with [m^c] = k, if it lies in the table.
    pub fn root(&self, k: u64) -> Option<u64> {
        self.values[1..].binary_search(&k).ok().map(|i| i as u64 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentationResult {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub m: u64,
    pub omega_m: u32,
    pub floors: (u64, u64),
}

/// Options for [`find_representations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchOptions {
    /// Keep only m with no prime factor below z.
    pub coprime_to: Option<u64>,
    pub limit: Option<usize>,
    /// Only primes in (lo, hi].
    pub p_range: Option<(u64, u64)>,
}

/// All (p, m) with `[p^c] + [m^c] = N`, ordered by p.
pub fn find_representations(n: u64, exp: &RealExponent, opts: SearchOptions) -> Result<Vec<RepresentationResult>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("N >= 3 required, got {n}")));
    }
    let pmax = (n as f64).powf(exp.gamma_f64()).ceil() as u64 + 1;
    let (lo, hi) = opts.p_range.unwrap_or((1, pmax));
    let primes = primes_between(lo, hi.min(pmax))?.primes;
    let mmax = pmax.max(2);
    let table = FactorTable::new(mmax)?;
    let found: Vec<Option<RepresentationResult>> = primes
        .par_iter()
        .map(|&p| {
            let fp = floor_pow(p, exp.c())?.value;
            if fp >= n {
                return Ok(None);
            }
            let k = n - fp;
            let Some(m) = root_of_floor(k, exp)? else { return Ok(None) };
            if let Some(z) = opts.coprime_to {
                if m > 1 && table.spf(m)? < z {
                    return Ok(None);
                }
            }
            let omega_m = if m == 1 { 0 } else { table.big_omega(m)? };
            Ok(Some(RepresentationResult { n, p, m, omega_m, floors: (fp, k) }))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<RepresentationResult> = found.into_iter().flatten().collect();
    if let Some(l) = opts.limit {
        out.truncate(l);
    }
    Ok(out)
}

/// Per-prime data on (P, 2P].
#[derive(Debug, Clone)]
pub struct PrimeRange {
    pub primes: Vec<u64>,
    pub logs: Vec<f64>,
    pub floors: Vec<u64>,
}

impl PrimeRange {
    pub fn new(params: &PipelineParams) -> Result<Self> {
        let primes = primes_between(params.p, 2 * params.p)?.primes;
        let floors = primes
            .par_iter()
            .map(|&p| floor_pow(p, params.exp.c()).map(|f| f.value))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { logs: primes.iter().map(|&p| (p as f64).ln()).collect(), primes, floors })
    }

    fn sum(&self, f: impl Fn(usize) -> Result<f64> + Sync + Send) -> Result<f64> {
        let terms = (0..self.primes.len()).into_par_iter().map(f).collect::<Result<Vec<f64>>>()?;
        Ok(Neumaier::sum_iter(terms))
    }
}

/// (N + j - [p^c])^γ / d resolved with a certified integer part.
fn shifted_root(params: &PipelineParams, floor: u64, j: u64, d: u64) -> Result<crate::arith::PowerValue> {
    power_value(&Dyadic::from_u64(params.n + j - floor), params.exp.gamma(), d, true, DEFAULT_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub gamma: f64,
    pub witnesses: Vec<RepresentationResult>,
}

/// Γ = Σ log p over P < p <= 2P with a solution m coprime to B_z.
pub fn gamma_sum(params: &PipelineParams, primes: &PrimeRange) -> Result<GammaReport> {
    let table = FactorTable::new(params.m_max())?;
    let mut witnesses = Vec::new();
    let mut acc = Neumaier::new();
    for (i, &p) in primes.primes.iter().enumerate() {
        let k = params.n - primes.floors[i];
        let Some(m) = root_of_floor(k, &params.exp)? else { continue };
        if m > 1 && table.spf(m)? < params.z {
            continue;
        }
        acc.add(primes.logs[i]);
        let omega_m = if m == 1 { 0 } else { table.big_omega(m)? };
        witnesses.push(RepresentationResult { n: params.n, p, m, omega_m, floors: (primes.floors[i], k) });
    }
    Ok(GammaReport { gamma: acc.value(), witnesses })
}

/// A(N) = Σ (log p) ((N - [p^c] + 1)^γ - (N - [p^c])^γ).
pub fn a_of_n(params: &PipelineParams, primes: &PrimeRange) -> Result<f64> {
    let g = params.exp.gamma().to_dd();
    primes.sum(|i| {
        let k = params.n - primes.floors[i];
        let diff = Dd::from_u64(k + 1).powr(g) - Dd::from_u64(k).powr(g);
        Ok(primes.logs[i] * diff.to_f64())
    })
}

/// A(N) / N^{2γ-1}.
pub fn a_ratio(params: &PipelineParams, a: f64) -> f64 {
    a / (params.n as f64).powf(2.0 * params.gamma - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GdReport {
    pub d: u64,
    /// Σ (log p) #{m : d | m, [p^c] + [m^c] = N}
    pub direct: f64,
    /// A(N)/d + Σ (log p)(ρ(-y₀/d) - ρ(-y₁/d))
    pub formula: f64,
}

pub fn g_d(params: &PipelineParams, primes: &PrimeRange, a: f64, d: u64) -> Result<GdReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d >= 1 required".into()));
    }
    let direct = primes.sum(|i| {
        let k = params.n - primes.floors[i];
        Ok(match root_of_floor(k, &params.exp)? {
            Some(m) if m % d == 0 => primes.logs[i],
            _ => 0.0,
        })
    })?;
    let rho_part = primes.sum(|i| {
        let f = primes.floors[i];
        let r0 = shifted_root(params, f, 0, d)?.rho_neg();
        let r1 = shifted_root(params, f, 1, d)?.rho_neg();
        Ok(primes.logs[i] * (r0 - r1))
    })?;
    Ok(GdReport { d, direct, formula: a / d as f64 + rho_part })
}

/// Σ_j = Σ_d λ(d) Σ_p (log p) ρ(-(N + j - [p^c])^γ / d).
pub fn sigma_j(params: &PipelineParams, primes: &PrimeRange, weights: &RosserWeights, j: u64) -> Result<f64> {
    if j > 1 {
        return Err(Error::InvalidArgument("j must be 0 or 1".into()));
    }
    let mut acc = Neumaier::new();
    for (d, l) in weights.iter() {
        let inner = primes.sum(|i| Ok(primes.logs[i] * shifted_root(params, primes.floors[i], j, d)?.rho_neg()))?;
        acc.add(l as f64 * inner);
    }
    Ok(acc.value())
}

/// All terms of Γ >= Σ λ(d) G_d = Γ₀ + Σ₀ - Σ₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    pub gamma: f64,
    pub sum_lambda_gd: f64,
    pub gamma0: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub support: usize,
}

impl ChainReport {
    /// |Σ λ G_d - (Γ₀ + Σ₀ - Σ₁)|
    pub fn middle_gap(&self) -> f64 {
        (self.sum_lambda_gd - (self.gamma0 + self.sigma0 - self.sigma1)).abs()
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.gamma + slack >= self.gamma0 + self.sigma0 - self.sigma1
            && self.gamma + slack >= self.sum_lambda_gd
            && self.middle_gap() <= slack
    }
}

pub fn chain(params: &PipelineParams, weights: &RosserWeights) -> Result<ChainReport> {
    let primes = PrimeRange::new(params)?;
    let gamma = gamma_sum(params, &primes)?.gamma;
    let a = a_of_n(params, &primes)?;
    let mut gd = Neumaier::new();
    for (d, l) in weights.iter() {
        gd.add(l as f64 * g_d(params, &primes, a, d)?.direct);
    }
    Ok(ChainReport {
        gamma,
        sum_lambda_gd: gd.value(),
        gamma0: crate::rosser::gamma0_lower(weights, a),
        sigma0: sigma_j(params, &primes, weights, 0)?,
        sigma1: sigma_j(params, &primes, weights, 1)?,
        support: weights.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VaalerSplitReport {
    pub sigma: f64,
    pub sigma_prime: f64,
    pub majorant_bound: f64,
    /// Σ_d |λ(d)| θ / H(d), the size the majorant term is expected to have.
    pub scale: f64,
}

impl VaalerSplitReport {
    pub fn contained(&self, slack: f64) -> bool {
        (self.sigma - self.sigma_prime).abs() <= self.majorant_bound + slack
    }
}

/// Σ_j split into the Vaaler polynomial part (through W(-h/d)) and the
/// majorant bound on the remainder. `h_override` fixes H for every d.
pub fn sigma_vaaler_split(
    params: &PipelineParams,
    primes: &PrimeRange,
    weights: &RosserWeights,
    j: u64,
    h_override: Option<usize>,
) -> Result<VaalerSplitReport> {
    let sigma = sigma_j(params, primes, weights, j)?;
    let g = params.exp.gamma().to_dd();
    let y: Vec<Dd> = primes.floors.iter().map(|&f| Dd::from_u64(params.n + j - f).powr(g)).collect();
    let theta = Neumaier::sum_iter(primes.logs.iter().copied());
    let mut prime_part = Neumaier::new();
    let mut bound = Neumaier::new();
    let mut scale = Neumaier::new();
    for (d, l) in weights.iter() {
        let h = h_override.unwrap_or_else(|| params.h_of(d));
        let sys = VaalerSystem::<f64>::new(h)?;
        // Σ_{0<|h|<=H} c_h W(-h/d) = Σ_{h>=1} 2 Re(c_h W(-h/d))
        let terms: Vec<f64> = (1..=h as i64)
            .into_par_iter()
            .map(|k| {
                let v = Dd::ratio(-k, d as i64);
                let mut w = ComplexSum::<f64>::new();
                for (i, yi) in y.iter().enumerate() {
                    w.add(e_dd(v * *yi) * primes.logs[i]);
                }
                let cw: Complex<f64> = sys.c(k) * w.value();
                2.0 * cw.re
            })
            .collect();
        prime_part.add(l as f64 * Neumaier::sum_iter(terms));
        let maj = primes.sum(|i| {
            let t = -(y[i] / Dd::from_u64(d)).frac().to_f64();
            Ok(primes.logs[i] * sys.rho_majorant_fast(t))
        })?;
        bound.add(maj * (l as f64).abs());
        scale.add(theta / h as f64);
    }
    Ok(VaalerSplitReport { sigma, sigma_prime: prime_part.value(), majorant_bound: bound.value(), scale: scale.value() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub p: Option<u64>,
    pub m: Option<u64>,
    pub omega_m: Option<u32>,
    pub bound: u32,
    /// A representation exists and min Ω(m) <= bound.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// N without any representation.
    pub missing: Vec<u64>,
    /// N whose minimal Ω(m) exceeds the bound.
    pub over_bound: Vec<u64>,
}

/// For each N in [from, to]: the representation with minimal Ω(m)
/// (smallest p among ties).
pub fn theorem_scan(from: u64, to: u64, exp: &RealExponent) -> Result<ScanReport> {
    if from < 3 || to < from {
        return Err(Error::InvalidArgument(format!("need 3 <= from <= to, got [{from}, {to}]")));
    }
    let c = exp.c_f64();
    if !(28.0 * c < 29.0) {
        return Err(Error::InvalidArgument(format!("scan needs 1 < c < 29/28, got {c}")));
    }
    let bound = theorem_bound(c);
    let mmax = (to as f64).powf(exp.gamma_f64()).ceil() as u64 + 2;
    let floors = FloorTable::new(exp, mmax)?;
    let table = FactorTable::new(mmax)?;
    let primes: Vec<u64> = table.primes().to_vec();
    let rows: Vec<ScanRow> = (from..=to)
        .into_par_iter()
        .map(|n| {
            let mut best: Option<(u32, u64, u64)> = None;
            for &p in &primes {
                let fp = floors.get(p);
                if fp >= n {
                    break;
                }
                if let Some(m) = floors.root(n - fp) {
                    let om = if m == 1 { 0 } else { table.big_omega(m)? };
                    if best.map_or(true, |b| om < b.0) {
                        best = Some((om, p, m));
                    }
                }
            }
            Ok(match best {
                Some((om, p, m)) => ScanRow { n, p: Some(p), m: Some(m), omega_m: Some(om), bound, ok: om <= bound },
                None => ScanRow { n, p: None, m: None, omega_m: None, bound, ok: false },
            })
        })
        .collect::<Result<_>>()?;
    let missing = rows.iter().filter(|r| r.p.is_none()).map(|r| r.n).collect();
    let over_bound = rows.iter().filter(|r| r.p.is_some() && !r.ok).map(|r| r.n).collect();
    Ok(ScanReport { rows, missing, over_bound })
}
