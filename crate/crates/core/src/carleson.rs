//! Toeplitz operators with measure symbols and finite-evidence Carleson
//! diagnostics.
//!
//! A positive measure `mu` is Carleson when `A^p` embeds boundedly in
//! `L^p(mu)`, vanishing Carleson when the embedding is compact. Both are
//! characterized by the Berezin transform, the averaging function and lattice
//! sums; [`diagnose`] evaluates all three on boundary-seeking schedules and
//! classifies the measure from that evidence.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_domain, rho_pair, CPoint};
use crate::integrate::{in_pool, integrate_with, IntegrationResult, Proposal, RegionSpec};
use crate::kernel::kernel_unchecked;
use crate::measures::{
    averaging, berezin, berezin_proposal, boundary_exponent, DensityFamily, MeasureSpec,
    TestFunction,
};
use crate::metric::{bergman_distance, build_lattice_multi, BergmanBall, CoveringReport, LatticeConfig};
use crate::special::kernel_constant;

/// Heights `2^k`, `k = 1..=LADDER_LEVELS`, above the base point in the
/// tail component of the Toeplitz proposals.
const LADDER_LEVELS: usize = 30;

/// Mixture of `parts` (rescaled to total mass `1 - tail`) and a geometric
/// ladder of centers above `(0', i)` carrying mass `tail`.
fn with_tail(parts: &[(f64, CPoint)], tail: f64) -> Result<Proposal> {
    let n = parts[0].1.dim();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    let mut all: Vec<(f64, CPoint)> = parts
        .iter()
        .map(|(w, c)| ((1.0 - tail) * w / total, c.clone()))
        .collect();
    let norm: f64 = (1..=LADDER_LEVELS).map(|k| 2f64.powf(-(k as f64) / 2.0)).sum();
    for k in 1..=LADDER_LEVELS {
        let w = tail * 2f64.powf(-(k as f64) / 2.0) / norm;
        all.push((w, CPoint::on_axis(n, 2f64.powi(k as i32))));
    }
    Proposal::mixture(&all)
}

fn same_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Whether `int |K(z, w) f(w)| d mu(w)` diverges at infinity.
fn toeplitz_diverges(mu: &MeasureSpec, f: &TestFunction) -> bool {
    let e = match mu {
        MeasureSpec::Atomic { .. } => return false,
        MeasureSpec::Density {
            family: DensityFamily::RhoPower { exponent },
            ..
        } => *exponent,
        _ => 0.0,
    };
    let unbounded = mu
        .restriction()
        .is_none_or(|r| r.ball.is_none() && r.rho_max.is_infinite() && r.max_abs.is_infinite());
    unbounded && f.decay_exponent() <= e
}

/// `T_mu f(z) = int K(z, w) f(w) d mu(w)`.
///
/// Atomic measures give the finite sum. For densities the integral is
/// estimated by Monte Carlo; when it does not converge absolutely the result
/// is returned with `divergent = true`, a zero value and no samples spent.
pub fn toeplitz_apply(
    mu: &MeasureSpec,
    f: &TestFunction,
    z: &CPoint,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<Complex64>> {
    mu.validate()?;
    f.validate()?;
    same_dim(mu.dim(), f.dim())?;
    same_dim(mu.dim(), z.dim())?;
    check_domain(z)?;
    if let MeasureSpec::Atomic { atoms, .. } = mu {
        let v = atoms
            .iter()
            .map(|a| a.weight * kernel_unchecked(z, &a.point) * f.eval_unchecked(&a.point))
            .sum();
        return Ok(IntegrationResult::exact(v, atoms.len()));
    }
    if matches!(f, TestFunction::Zero { .. }) {
        return Ok(IntegrationResult::exact(Complex64::new(0.0, 0.0), 1));
    }
    if toeplitz_diverges(mu, f) {
        let mut r = IntegrationResult::exact(Complex64::new(0.0, 0.0), 1);
        r.divergent = true;
        return Ok(r);
    }
    let proposal = match mu.restriction().and_then(|r| r.ball.as_ref()) {
        Some(b) => Proposal::ball(b),
        None => with_tail(&[(0.6, z.clone()), (0.4, CPoint::base(z.dim()))], 0.2)?
            .with_radial_exponent(boundary_exponent(mu))?,
    };
    integrate_with(
        &proposal,
        |w| match mu.density_at(w) {
            Some(d) if d > 0.0 => d * kernel_unchecked(z, w) * f.eval_unchecked(w),
            _ => Complex64::new(0.0, 0.0),
        },
        count,
        seed,
    )
}

/// Both sides of `<T_mu f, g> = int f conj(g) d mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    /// Quadrature of `int_U T_mu f conj(g) dV`.
    pub lhs: IntegrationResult<Complex64>,
    /// Exact atomic sum.
    pub rhs: Complex64,
    pub sigma: f64,
}

impl DualityCheck {
    pub fn agrees(&self, k: f64) -> bool {
        self.lhs.agrees_with(self.rhs, k)
    }

    pub fn relative_sigma(&self) -> f64 {
        let scale = self.rhs.norm();
        if scale == 0.0 {
            if self.sigma == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.sigma / scale
        }
    }
}

/// Checks the duality identity for an atomic measure.
///
/// The decay exponents must satisfy `d(f) > n + 1/p` and
/// `d(g) > n + (p - 1)/p`; outside that range the pairing need not converge
/// and the call is rejected.
pub fn duality_check(
    mu: &MeasureSpec,
    f: &TestFunction,
    g: &TestFunction,
    p: f64,
    count: usize,
    seed: u64,
) -> Result<DualityCheck> {
    mu.validate()?;
    f.validate()?;
    g.validate()?;
    let n = mu.dim();
    same_dim(n, f.dim())?;
    same_dim(n, g.dim())?;
    let MeasureSpec::Atomic { atoms, .. } = mu else {
        return Err(Error::Precondition("duality_check needs an atomic measure".into()));
    };
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p,
            reason: "must lie in (1, inf)",
        });
    }
    let nf = n as f64;
    let (df, dg) = (f.decay_exponent(), g.decay_exponent());
    if !(df > nf + 1.0 / p) {
        return Err(Error::Hypothesis(format!(
            "f decays like |z_n + i|^-{df}, needs exponent > {}",
            nf + 1.0 / p
        )));
    }
    if !(dg > nf + (p - 1.0) / p) {
        return Err(Error::Hypothesis(format!(
            "g decays like |z_n + i|^-{dg}, needs exponent > {}",
            nf + (p - 1.0) / p
        )));
    }
    let fa: Vec<Complex64> = atoms.iter().map(|a| f.eval_unchecked(&a.point)).collect();
    let rhs: Complex64 = atoms
        .iter()
        .zip(&fa)
        .map(|(a, fv)| a.weight * fv * g.eval_unchecked(&a.point).conj())
        .sum();
    let coef: Vec<Complex64> = atoms.iter().zip(&fa).map(|(a, fv)| a.weight * fv).collect();
    if coef.iter().all(|c| c.norm() == 0.0) {
        return Ok(DualityCheck {
            lhs: IntegrationResult::exact(Complex64::new(0.0, 0.0), atoms.len()),
            rhs,
            sigma: 0.0,
        });
    }
    let mut parts: Vec<(f64, CPoint)> = atoms
        .iter()
        .zip(&coef)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(a, c)| (0.75 * c.norm(), a.point.clone()))
        .collect();
    let mass: f64 = parts.iter().map(|p| p.0).sum();
    parts.push((mass / 3.0, CPoint::base(n)));
    let proposal = with_tail(&parts, 0.2)?;
    let lhs = integrate_with(
        &proposal,
        |w| {
            let t: Complex64 = atoms
                .iter()
                .zip(&coef)
                .map(|(a, c)| c * kernel_unchecked(w, &a.point))
                .sum();
            t * g.eval_unchecked(w).conj()
        },
        count,
        seed,
    )?;
    let sigma = lhs.std_error;
    Ok(DualityCheck { lhs, rhs, sigma })
}

/// `int rho(a)^{n+1} / |rho(z, a)|^{2(n+1)} d mu(z)`, computed from its own
/// integrand rather than through the Berezin transform.
pub fn carleson_condition_b_integral(
    mu: &MeasureSpec,
    a: &CPoint,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult> {
    mu.validate()?;
    same_dim(mu.dim(), a.dim())?;
    let ra = check_domain(a)?;
    let np1 = a.dim() as i32 + 1;
    let weight = |z: &CPoint| ra.powi(np1) / rho_pair(z, a).norm_sqr().powi(np1);
    if let MeasureSpec::Atomic { atoms, .. } = mu {
        let v = atoms.iter().map(|at| at.weight * weight(&at.point)).sum();
        return Ok(IntegrationResult::exact(v, atoms.len()));
    }
    let proposal = berezin_proposal(mu, a)?;
    integrate_with(
        &proposal,
        |w| match mu.density_at(w) {
            Some(d) if d > 0.0 => Complex64::new(d * weight(w), 0.0),
            _ => Complex64::new(0.0, 0.0),
        },
        count,
        seed,
    )
    .map(|r| r.re())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedVerdict {
    CarlesonConsistent,
    NotCarleson,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingVerdict {
    VanishingConsistent,
    NotVanishing,
    Inconclusive,
}

/// Boundary regime of a shell: `rho -> 0` or `|z| -> infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Rho,
    Abs,
}

/// Paths of lattice balls leaving `(0', i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticePath {
    Origin,
    Down,
    Up,
    Lateral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "ii_berezin")]
    Berezin,
    #[serde(rename = "iii_averaging")]
    Averaging,
    #[serde(rename = "d_lattice_averaging")]
    LatticeAveraging,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub r: f64,
    pub seed: u64,
    pub lattice_seed: u64,
    /// Samples per Monte Carlo estimate.
    pub samples: usize,
    /// Dyadic shells `k = 0..=shells` in each boundary regime.
    pub shells: usize,
    /// Lattice balls per path, spaced `r` apart in the Bergman metric.
    pub path_steps: usize,
    pub bounded_threshold: f64,
    pub stability_ratio: f64,
    pub decay_fraction: f64,
    pub lattice: LatticeConfig,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            seed: 7,
            lattice_seed: 7,
            samples: 200_000,
            shells: 10,
            path_steps: 9,
            bounded_threshold: 1e3,
            stability_ratio: 1.05,
            decay_fraction: 0.05,
            lattice: LatticeConfig {
                patience: 300,
                max_candidates: 20_000,
                probes: 4_000,
                repair_rounds: 1,
            },
        }
    }
}

impl DiagnoseConfig {
    pub fn new(r: f64, seed: u64, samples: usize) -> Self {
        Self {
            r,
            seed,
            lattice_seed: seed,
            samples,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidRadius(self.r));
        }
        if self.samples == 0 {
            return Err(Error::NoSamples);
        }
        if self.shells < 3 || self.path_steps < 3 {
            return Err(Error::Precondition("need at least three shells and path steps".into()));
        }
        if !(self.bounded_threshold > 0.0)
            || !(self.stability_ratio >= 1.0)
            || !(self.decay_fraction > 0.0 && self.decay_fraction < 1.0)
        {
            return Err(Error::Precondition("thresholds out of range".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupWitness {
    pub value: f64,
    pub argmax: CPoint,
}

/// Per-probe statistics on the boundary schedules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub point: CPoint,
    pub regime: Regime,
    pub shell: usize,
    pub berezin: f64,
    pub berezin_sigma: f64,
    pub condition_b: f64,
    pub condition_b_sigma: f64,
    pub averaging: f64,
    pub averaging_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub center: CPoint,
    pub path: LatticePath,
    pub band: usize,
    pub averaging: f64,
    pub averaging_sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellTrend {
    pub condition: Condition,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<LatticePath>,
    pub shell: usize,
    /// Range of `rho` (regime `rho`) or `|z|` (regime `abs`) over the shell.
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub sup: SupWitness,
    /// Supremum over growing truncations of the schedule.
    pub sup_by_level: Vec<f64>,
    pub bounded: BoundedVerdict,
    pub vanishing: VanishingVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSummary {
    pub centers: usize,
    pub multiplicity_estimate: usize,
    pub covering: CoveringReport,
}

/// Evidence and verdicts of [`diagnose`]. Verdicts are classifications of
/// finite evidence, not proofs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub measure: MeasureSpec,
    pub config: DiagnoseConfig,
    pub berezin_sup: SupWitness,
    /// Sup of the averaging function over the lattice centers.
    pub averaging_sup: SupWitness,
    /// Sup of the averaging function over the probe grid.
    pub probe_averaging_sup: SupWitness,
    pub conditions: Vec<ConditionSummary>,
    pub shell_trend: Vec<ShellTrend>,
    /// Least-squares slope of `ln mu^_r` against `ln rho` on the `rho` shells.
    pub boundary_slope: Option<f64>,
    pub verdict_bounded: BoundedVerdict,
    pub verdict_vanishing: VanishingVerdict,
    pub lattice: LatticeSummary,
    pub probes: Vec<ProbeRecord>,
    pub lattice_values: Vec<LatticeRecord>,
    pub notes: Vec<String>,
}

impl DiagnosticsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Shell-trend table as CSV.
    pub fn shell_trend_csv(&self) -> String {
        let mut out = String::from("condition,regime,path,shell,lo,hi,mean,max,count\n");
        for s in &self.shell_trend {
            let cond = match s.condition {
                Condition::Berezin => "ii_berezin",
                Condition::Averaging => "iii_averaging",
                Condition::LatticeAveraging => "d_lattice_averaging",
            };
            let regime = match s.regime {
                Regime::Rho => "rho",
                Regime::Abs => "abs",
            };
            let path = match s.path {
                None => "",
                Some(LatticePath::Origin) => "origin",
                Some(LatticePath::Down) => "down",
                Some(LatticePath::Up) => "up",
                Some(LatticePath::Lateral) => "lateral",
            };
            let _ = writeln!(
                out,
                "{cond},{regime},{path},{},{:e},{:e},{:e},{:e},{}",
                s.shell, s.lo, s.hi, s.mean, s.max, s.count
            );
        }
        out
    }
}

struct Probe {
    point: CPoint,
    regime: Regime,
    shell: usize,
}

fn probe_grid(n: usize, shells: usize) -> Vec<Probe> {
    let zero = || vec![Complex64::new(0.0, 0.0); n - 1];
    let mut out = Vec::new();
    for k in 0..=shells {
        let h = 2f64.powi(-(k as i32));
        let mut pts = vec![
            CPoint::from_heisenberg(zero(), 0.0, h),
            CPoint::from_heisenberg(zero(), h, h),
            CPoint::from_heisenberg(zero(), -h, h),
        ];
        if n > 1 {
            let mut zp = zero();
            zp[0] = Complex64::new(0.5 * h.sqrt(), 0.0);
            pts.push(CPoint::from_heisenberg(zp, 0.0, h));
        }
        out.extend(pts.into_iter().map(|p| Probe {
            point: p.expect("finite probe"),
            regime: Regime::Rho,
            shell: k,
        }));
    }
    for k in 0..=shells {
        let big = 2f64.powi(k as i32);
        let mut pts = vec![
            CPoint::from_heisenberg(zero(), 0.0, big),
            CPoint::from_heisenberg(zero(), big, 1.0),
            CPoint::from_heisenberg(zero(), -big, 1.0),
        ];
        if n > 1 {
            let mut zp = zero();
            zp[0] = Complex64::new(big.sqrt(), 0.0);
            pts.push(CPoint::from_heisenberg(zp, 0.0, 1.0));
        }
        out.extend(pts.into_iter().map(|p| Probe {
            point: p.expect("finite probe"),
            regime: Regime::Abs,
            shell: k,
        }));
    }
    out
}

fn path_points(n: usize, r: f64, steps: usize) -> Vec<(LatticePath, usize, CPoint)> {
    let zero = || vec![Complex64::new(0.0, 0.0); n - 1];
    let mut out = vec![(LatticePath::Origin, 0, CPoint::base(n))];
    for m in 1..=steps {
        let t = m as f64 * r;
        out.push((LatticePath::Down, m, CPoint::on_axis(n, (-2.0 * t).exp())));
        out.push((LatticePath::Up, m, CPoint::on_axis(n, (2.0 * t).exp())));
        let lateral = CPoint::from_heisenberg(zero(), 2.0 * t.sinh(), 1.0).expect("finite");
        out.push((LatticePath::Lateral, m, lateral));
    }
    out
}

fn sup_of<'a>(items: impl Iterator<Item = (f64, &'a CPoint)>) -> SupWitness {
    let mut best: Option<(f64, &CPoint)> = None;
    for (v, p) in items {
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, p));
        }
    }
    let (value, p) = best.expect("non-empty schedule");
    SupWitness {
        value,
        argmax: p.clone(),
    }
}

fn bounded_verdict(levels: &[f64], cfg: &DiagnoseConfig) -> BoundedVerdict {
    let m = levels.len();
    let last = levels[m - 1];
    let prev = levels[m - 2];
    let ratio = if last == prev { 1.0 } else { last / prev };
    if last < cfg.bounded_threshold && ratio < cfg.stability_ratio {
        BoundedVerdict::CarlesonConsistent
    } else {
        BoundedVerdict::NotCarleson
    }
}

/// Outermost mean below `fraction * global_max` and the last three means
/// non-increasing.
fn decays(means: &[f64], global_max: f64, fraction: f64) -> bool {
    let m = means.len();
    if global_max <= 0.0 {
        return true;
    }
    m >= 3
        && means[m - 1] < fraction * global_max
        && means[m - 2] <= means[m - 3]
        && means[m - 1] <= means[m - 2]
}

fn mean_max(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, max)
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Probe-grid condition: shell trends, truncation sups and verdicts.
fn probe_condition(
    condition: Condition,
    probes: &[Probe],
    values: &[f64],
    cfg: &DiagnoseConfig,
    trend: &mut Vec<ShellTrend>,
) -> ConditionSummary {
    let shells = cfg.shells;
    let mut levels = vec![f64::NEG_INFINITY; shells + 1];
    let mut series: Vec<Vec<f64>> = Vec::new();
    for regime in [Regime::Rho, Regime::Abs] {
        let mut means = Vec::with_capacity(shells + 1);
        for k in 0..=shells {
            let members: Vec<usize> = (0..probes.len())
                .filter(|&i| probes[i].regime == regime && probes[i].shell == k)
                .collect();
            let vals: Vec<f64> = members.iter().map(|&i| values[i]).collect();
            let (mean, max) = mean_max(&vals);
            let coord = |i: usize| match regime {
                Regime::Rho => probes[i].point.rho(),
                Regime::Abs => probes[i].point.norm(),
            };
            let lo = members.iter().map(|&i| coord(i)).fold(f64::INFINITY, f64::min);
            let hi = members.iter().map(|&i| coord(i)).fold(f64::NEG_INFINITY, f64::max);
            trend.push(ShellTrend {
                condition,
                regime,
                path: None,
                shell: k,
                lo,
                hi,
                mean,
                max,
                count: vals.len(),
            });
            for level in levels.iter_mut().skip(k) {
                *level = level.max(max);
            }
            means.push(mean);
        }
        series.push(means);
    }
    let sup = sup_of(values.iter().copied().zip(probes.iter().map(|p| &p.point)));
    summarize(condition, sup, levels, &series, cfg)
}

fn summarize(
    condition: Condition,
    sup: SupWitness,
    levels: Vec<f64>,
    series: &[Vec<f64>],
    cfg: &DiagnoseConfig,
) -> ConditionSummary {
    let bounded = bounded_verdict(&levels, cfg);
    let vanishing = if bounded == BoundedVerdict::NotCarleson {
        VanishingVerdict::NotVanishing
    } else if series.iter().all(|s| decays(s, sup.value, cfg.decay_fraction)) {
        VanishingVerdict::VanishingConsistent
    } else {
        VanishingVerdict::NotVanishing
    };
    ConditionSummary {
        condition,
        sup,
        sup_by_level: levels,
        bounded,
        vanishing,
    }
}

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::Berezin => "(ii) Berezin transform",
        Condition::Averaging => "(iii) averaging function",
        Condition::LatticeAveraging => "(d) lattice averages",
    }
}

/// Carleson and vanishing-Carleson diagnostics for `mu`.
///
/// Condition (ii) is the Berezin transform and (iii) the averaging function
/// `mu^_r` on dyadic probe shells `rho = 2^-k` and `|z| ~ 2^k`; (d) is
/// `mu^_r` over an `r`-lattice of balls strung along three paths leaving
/// `(0', i)`. Each condition is bounded when its sup stays below the
/// threshold and stops growing over the last truncation, and vanishing when
/// its shell means fall off toward every boundary regime. Disagreement
/// between conditions makes the overall verdict inconclusive.
pub fn diagnose(mu: &MeasureSpec, cfg: &DiagnoseConfig) -> Result<DiagnosticsReport> {
    mu.validate()?;
    cfg.validate()?;
    let n = mu.dim();
    let (r, samples, seed) = (cfg.r, cfg.samples, cfg.seed);
    let probes = probe_grid(n, cfg.shells);
    let records = in_pool(|| {
        probes
            .par_iter()
            .map(|p| -> Result<ProbeRecord> {
                let b = berezin(mu, &p.point, samples, seed)?;
                let c = carleson_condition_b_integral(mu, &p.point, samples, seed)?;
                let a = averaging(mu, &p.point, r, samples, seed)?;
                Ok(ProbeRecord {
                    point: p.point.clone(),
                    regime: p.regime,
                    shell: p.shell,
                    berezin: b.value,
                    berezin_sigma: b.std_error,
                    condition_b: c.value,
                    condition_b_sigma: c.std_error,
                    averaging: a.value,
                    averaging_sigma: a.std_error,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let anchors = path_points(n, r, cfg.path_steps);
    let regions: Vec<_> = anchors
        .iter()
        .map(|(_, _, p)| BergmanBall::new(p.clone(), r).map(RegionSpec::from_ball))
        .collect::<Result<_>>()?;
    let lattice = build_lattice_multi(n, &regions, r, cfg.lattice_seed, &cfg.lattice)?;
    let lattice_values = in_pool(|| {
        lattice
            .centers
            .par_iter()
            .map(|c| -> Result<LatticeRecord> {
                let (path, band) = anchors
                    .iter()
                    .map(|(path, m, p)| (bergman_distance(c, p).unwrap_or(f64::INFINITY), *path, *m))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map(|(_, path, m)| (path, m))
                    .expect("anchors");
                let a = averaging(mu, c, r, samples, seed)?;
                Ok(LatticeRecord {
                    center: c.clone(),
                    path,
                    band,
                    averaging: a.value,
                    averaging_sigma: a.std_error,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut trend = Vec::new();
    let bz: Vec<f64> = records.iter().map(|p| p.berezin).collect();
    let az: Vec<f64> = records.iter().map(|p| p.averaging).collect();
    let ii = probe_condition(Condition::Berezin, &probes, &bz, cfg, &mut trend);
    let iii = probe_condition(Condition::Averaging, &probes, &az, cfg, &mut trend);

    // lattice bands: series along each path, band 0 shared
    let band_stats = |path: LatticePath, m: usize| -> Option<(f64, f64, f64, f64, usize)> {
        let want = if m == 0 { LatticePath::Origin } else { path };
        let members: Vec<&LatticeRecord> = lattice_values
            .iter()
            .filter(|l| l.path == want && l.band == m)
            .collect();
        if members.is_empty() {
            return None;
        }
        let vals: Vec<f64> = members.iter().map(|l| l.averaging).collect();
        let (mean, max) = mean_max(&vals);
        let coord = |l: &LatticeRecord| match path {
            LatticePath::Down => l.center.rho(),
            _ => l.center.norm(),
        };
        let lo = members.iter().map(|l| coord(l)).fold(f64::INFINITY, f64::min);
        let hi = members.iter().map(|l| coord(l)).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi, mean, max, vals.len()))
    };
    let steps = cfg.path_steps;
    let cut = |j: usize| (j * steps).div_ceil(3);
    let mut d_levels = vec![f64::NEG_INFINITY; 3];
    let mut d_series = Vec::new();
    for path in [LatticePath::Down, LatticePath::Up, LatticePath::Lateral] {
        let mut means = Vec::new();
        for m in 0..=steps {
            let Some((lo, hi, mean, max, count)) = band_stats(path, m) else { continue };
            trend.push(ShellTrend {
                condition: Condition::LatticeAveraging,
                regime: if path == LatticePath::Down { Regime::Rho } else { Regime::Abs },
                path: Some(if m == 0 { LatticePath::Origin } else { path }),
                shell: m,
                lo,
                hi,
                mean,
                max,
                count,
            });
            for (j, level) in d_levels.iter_mut().enumerate() {
                if m <= cut(j + 1) {
                    *level = level.max(max);
                }
            }
            means.push(mean);
        }
        d_series.push(means);
    }
    let d_sup = sup_of(lattice_values.iter().map(|l| (l.averaging, &l.center)));
    let d = summarize(Condition::LatticeAveraging, d_sup.clone(), d_levels, &d_series, cfg);

    let rho_points: Vec<(f64, f64)> = trend
        .iter()
        .filter(|s| s.condition == Condition::Averaging && s.regime == Regime::Rho && s.mean > 0.0)
        .map(|s| (s.lo.ln(), s.mean.ln()))
        .collect();
    let boundary_slope = slope(&rho_points);

    let conditions = vec![ii, iii, d];
    let mut notes = Vec::new();
    let first = &conditions[0];
    let verdict_bounded = if conditions.iter().all(|c| c.bounded == first.bounded) {
        first.bounded
    } else {
        for c in &conditions {
            notes.push(format!("{}: bounded verdict {:?}", condition_name(c.condition), c.bounded));
        }
        BoundedVerdict::Inconclusive
    };
    let verdict_vanishing = if verdict_bounded == BoundedVerdict::Inconclusive {
        VanishingVerdict::Inconclusive
    } else if conditions.iter().all(|c| c.vanishing == first.vanishing) {
        first.vanishing
    } else {
        for c in &conditions {
            notes.push(format!(
                "{}: vanishing verdict {:?}",
                condition_name(c.condition),
                c.vanishing
            ));
        }
        VanishingVerdict::Inconclusive
    };
    if lattice.covering.failures > 0 {
        notes.push(format!(
            "lattice covering: {} of {} probes farther than r from every center",
            lattice.covering.failures, lattice.covering.probes
        ));
    }
    if records.iter().any(|p| p.averaging_sigma > 0.0 || p.berezin_sigma > 0.0) {
        notes.push("Monte Carlo statistics; verdicts are consistent-with classifications".into());
    }

    Ok(DiagnosticsReport {
        measure: mu.clone(),
        config: cfg.clone(),
        berezin_sup: conditions[0].sup.clone(),
        averaging_sup: d_sup,
        probe_averaging_sup: conditions[1].sup.clone(),
        conditions,
        shell_trend: trend,
        boundary_slope,
        verdict_bounded,
        verdict_vanishing,
        lattice: LatticeSummary {
            centers: lattice.centers.len(),
            multiplicity_estimate: lattice.multiplicity_estimate,
            covering: lattice.covering,
        },
        probes: records,
        lattice_values,
        notes,
    })
}

/// `4 pi^n / n!`, the ratio between condition (b) and the Berezin transform.
pub fn bridge_constant(n: usize) -> f64 {
    1.0 / kernel_constant(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;
    use std::f64::consts::PI;

    fn axis(h: f64) -> CPoint {
        CPoint::on_axis(1, h)
    }

    fn resolvent(alpha: f64) -> TestFunction {
        TestFunction::ResolventPower { dim: 1, alpha }
    }

    #[test]
    fn toeplitz_of_an_atom() {
        let w0 = CPoint::new([], Complex64::new(0.3, 1.7)).unwrap();
        let z = CPoint::new([], Complex64::new(-0.5, 0.4)).unwrap();
        let f = resolvent(2.0);
        let t = toeplitz_apply(&MeasureSpec::unit_atom(w0.clone()), &f, &z, 1, 0).unwrap();
        let expected = crate::kernel::bergman_kernel(&z, &w0).unwrap() * f.eval(&w0).unwrap();
        assert!((t.value - expected).norm() < 1e-15 * expected.norm());
    }

    #[test]
    fn toeplitz_zero_function() {
        let ball = BergmanBall::new(axis(1.0), 1.0).unwrap();
        let mu = MeasureSpec::Lebesgue {
            dim: 1,
            restriction: Some(RegionSpec::from_ball(ball)),
        };
        let t = toeplitz_apply(&mu, &TestFunction::Zero { dim: 1 }, &axis(2.0), 100, 1).unwrap();
        assert_eq!(t.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn toeplitz_flags_divergence() {
        let t = toeplitz_apply(&MeasureSpec::lebesgue(1), &resolvent(0.0), &axis(1.0), 100, 1).unwrap();
        assert!(t.divergent);
    }

    #[test]
    fn duality_single_atom() {
        let mu = MeasureSpec::unit_atom(axis(1.0));
        let f = resolvent(2.0);
        let d = duality_check(&mu, &f, &f, 2.0, 20_000, 5).unwrap();
        assert!((d.rhs - Complex64::new(1.0 / 16.0, 0.0)).norm() < 1e-16);
        assert!(d.agrees(3.0), "{d:?}");
    }

    #[test]
    fn duality_empty_and_hypotheses() {
        let mu = MeasureSpec::Atomic { dim: 1, atoms: vec![] };
        let d = duality_check(&mu, &resolvent(2.0), &resolvent(2.0), 2.0, 10, 1).unwrap();
        assert_eq!(d.rhs, Complex64::new(0.0, 0.0));
        assert_eq!(d.lhs.value, Complex64::new(0.0, 0.0));
        let one = MeasureSpec::unit_atom(axis(1.0));
        assert!(matches!(
            duality_check(&one, &resolvent(1.2), &resolvent(2.0), 2.0, 10, 1),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            duality_check(&one, &resolvent(2.0), &resolvent(1.4), 2.0, 10, 1),
            Err(Error::Hypothesis(_))
        ));
        assert!(duality_check(&MeasureSpec::lebesgue(1), &resolvent(2.0), &resolvent(2.0), 2.0, 10, 1).is_err());
    }

    #[test]
    fn condition_b_examples() {
        let a = axis(3.0);
        let v = carleson_condition_b_integral(&MeasureSpec::unit_atom(a.clone()), &a, 1, 0).unwrap();
        assert!((v.value - 3f64.powi(-2)).abs() < 1e-15);
        let i = axis(1.0);
        let v = carleson_condition_b_integral(&MeasureSpec::unit_atom(i.clone()), &i, 1, 0).unwrap();
        assert_eq!(v.value, 1.0);
        let v = carleson_condition_b_integral(&MeasureSpec::lebesgue(1), &axis(0.2), 1000, 3).unwrap();
        assert!(v.agrees_with(4.0 * PI, 3.0), "{v:?}");
    }

    #[test]
    fn decay_rule() {
        assert!(decays(&[1.0, 0.5, 0.0, 0.0, 0.0], 1.0, 0.05));
        assert!(!decays(&[1.0, 1.0, 1.0], 1.0, 0.05));
        assert!(!decays(&[1.0, 0.01, 0.02, 0.01], 1.0, 0.05));
        assert!(decays(&[0.0, 0.0, 0.0], 0.0, 0.05));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 - 0.5 * k as f64)).collect();
        assert!((slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert_eq!(slope(&pts[..2]), None);
    }

    #[test]
    fn diagnose_atom_is_exact_and_vanishing() {
        let mu = MeasureSpec::Atomic {
            dim: 1,
            atoms: vec![Atom { point: axis(1.0), weight: 1.0 }],
        };
        let rep = diagnose(&mu, &DiagnoseConfig::new(1.0, 7, 100)).unwrap();
        assert_eq!(rep.verdict_bounded, BoundedVerdict::CarlesonConsistent);
        assert_eq!(rep.verdict_vanishing, VanishingVerdict::VanishingConsistent);
        let c = bridge_constant(1);
        for p in &rep.probes {
            assert!((p.condition_b - c * p.berezin).abs() <= 1e-12 * p.condition_b.abs());
        }
    }
}
