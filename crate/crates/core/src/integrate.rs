//! Monte-Carlo integration over the Siegel domain.
//!
//! Integrals over `U` are pulled back to the unit ball through
//! `w = sigma_c^{-1}(Phi(xi))`, which turns the unbounded domain into a bounded
//! one with an explicit density. Sampling is split into fixed blocks, each
//! driven by its own ChaCha stream keyed by `(seed, block)`, so the result does
//! not depend on how many worker threads run the blocks.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cayley, check_dim, rho_pair, BallPoint, CPoint, Coords, SigmaMap};
use crate::measures::MeasureSpec;
use crate::metric::BergmanBall;
use crate::special::{gamma, kernel_constant, unit_ball_volume};

/// Samples per RNG block.
pub const BLOCK: usize = 4096;

/// Samples closer than this to the Cayley pole are rejected.
pub const POLE_EPS: f64 = 1e-12;

/// Rejections tolerated per million samples.
pub const REJECTIONS_PER_MILLION: usize = 10;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SIEGEL_BERGMAN_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Cayley pullback from a single center.
    McBallPullback,
    /// Cayley pullback from a mixture of centers.
    McMixturePullback,
    /// Sampling restricted to a region.
    McRegion,
    /// Dyadic shells, each sampled separately.
    StratifiedShell,
    /// Finite sum or closed form, no sampling error.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult<V = f64> {
    pub value: V,
    pub std_error: f64,
    pub samples: usize,
    pub strategy: Strategy,
    #[serde(default)]
    pub rejected: usize,
    #[serde(default)]
    pub divergent: bool,
}

impl<V> IntegrationResult<V> {
    pub fn exact(value: V, terms: usize) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: terms.max(1),
            strategy: Strategy::Exact,
            rejected: 0,
            divergent: false,
        }
    }
}

impl IntegrationResult<f64> {
    /// `|value - truth| <= k sigma`, with a rounding floor of `1e-12 |truth|`.
    pub fn agrees_with(&self, truth: f64, k: f64) -> bool {
        (self.value - truth).abs() <= k * self.std_error + 1e-12 * truth.abs()
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.std_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.std_error / self.value.abs()
        }
    }
}

impl IntegrationResult<Complex64> {
    pub fn agrees_with(&self, truth: Complex64, k: f64) -> bool {
        (self.value - truth).norm() <= k * self.std_error + 1e-12 * truth.norm()
    }

    pub fn re(&self) -> IntegrationResult<f64> {
        IntegrationResult {
            value: self.value.re,
            std_error: self.std_error,
            samples: self.samples,
            strategy: self.strategy,
            rejected: self.rejected,
            divergent: self.divergent,
        }
    }
}

/// Running mean and centered second moment (Welford), mergeable with Chan's
/// formula. For complex samples `m2` accumulates `|x - mean|^2`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    n: u64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: Complex64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += (d.conj() * (x - self.mean)).re;
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += d * (nb / n as f64);
        self.m2 += other.m2 + d.norm_sqr() * na * nb / n as f64;
        self.n = n;
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        (self.m2.max(0.0) / (n - 1.0) / n).sqrt()
    }
}

/// Raw output of [`monte_carlo`].
#[derive(Clone, Copy, Debug)]
pub(crate) struct Tally {
    moments: Moments,
    pub rejected: usize,
}

impl Tally {
    pub fn mean(&self) -> Complex64 {
        self.moments.mean
    }

    pub fn std_error(&self) -> f64 {
        self.moments.std_error()
    }

    pub fn samples(&self) -> usize {
        self.moments.n as usize
    }

    pub fn result(&self, scale: f64, strategy: Strategy) -> IntegrationResult<Complex64> {
        IntegrationResult {
            value: self.mean() * scale,
            std_error: self.std_error() * scale.abs(),
            samples: self.samples(),
            strategy,
            rejected: self.rejected,
            divergent: false,
        }
    }

    pub fn real_result(&self, scale: f64, strategy: Strategy) -> IntegrationResult<f64> {
        self.result(scale, strategy).re()
    }
}

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok()?;
        if threads == 0 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()
    })
    .as_ref()
}

pub(crate) fn in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match pool() {
        Some(p) => p.install(f),
        None => f(),
    }
}

pub(crate) fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

pub(crate) fn rejection_budget(count: usize) -> usize {
    (count * REJECTIONS_PER_MILLION).div_ceil(1_000_000)
}

/// Averages `draw` over `count` samples. `None` or a non-finite value counts
/// as a rejected sample contributing zero.
pub(crate) fn monte_carlo<F>(count: usize, seed: u64, draw: F) -> Result<Tally>
where
    F: Fn(&mut ChaCha8Rng) -> Option<Complex64> + Sync,
{
    if count == 0 {
        return Err(Error::NoSamples);
    }
    let blocks = count.div_ceil(BLOCK);
    let parts: Vec<(Moments, usize)> = in_pool(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = block_rng(seed, b as u64);
                let len = BLOCK.min(count - b * BLOCK);
                let mut m = Moments::default();
                let mut rejected = 0;
                for _ in 0..len {
                    match draw(&mut rng) {
                        Some(v) if v.is_finite() => m.push(v),
                        _ => {
                            rejected += 1;
                            m.push(Complex64::new(0.0, 0.0));
                        }
                    }
                }
                (m, rejected)
            })
            .collect()
    });
    let mut moments = Moments::default();
    let mut rejected = 0;
    for (m, r) in &parts {
        moments.merge(m);
        rejected += r;
    }
    let budget = rejection_budget(count);
    if rejected > budget {
        return Err(Error::RejectionBudget {
            rejected,
            count,
            budget,
        });
    }
    Ok(Tally { moments, rejected })
}

/// Uniform direction on the unit sphere of `C^n`.
pub(crate) fn unit_direction<R: Rng>(n: usize, rng: &mut R) -> Coords {
    loop {
        let v: Coords = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// A point of the ball with `|xi|^2 = s` in a uniform direction.
pub(crate) fn ball_point_with_norm_sqr<R: Rng>(n: usize, s: f64, rng: &mut R) -> BallPoint {
    let r = s.sqrt();
    BallPoint::from_coords(unit_direction(n, rng).into_iter().map(|c| c * r).collect())
}

#[derive(Clone, Debug)]
struct Component {
    weight: f64,
    map: SigmaMap,
}

/// Sampling law on `U` obtained by pushing a radial law on the ball through
/// `sigma_c^{-1} o Phi`, mixed over several centers `c`.
///
/// Each component draws `xi` with density proportional to
/// `(1 - |xi|^2)^lambda` on `|xi| < radius` (`lambda = 0` when `radius < 1`).
/// For `lambda = 0, radius = 1` the pushed-forward density is
/// `|k_c(w)|^2 = n!/(4 pi^n) rho(c)^{n+1} / |rho(w, c)|^{2(n+1)}`.
#[derive(Clone, Debug)]
pub struct Proposal {
    n: usize,
    components: Vec<Component>,
    radial_exponent: f64,
    radius: f64,
    beta: Option<Beta<f64>>,
}

impl Proposal {
    /// Plain Cayley pullback (center `(0', i)`).
    pub fn cayley(n: usize) -> Self {
        Self::centered(&CPoint::base(n)).expect("base point lies in U")
    }

    pub fn centered(c: &CPoint) -> Result<Self> {
        Self::mixture(&[(1.0, c.clone())])
    }

    /// Weighted mixture of centered pullbacks; weights are normalized.
    pub fn mixture(parts: &[(f64, CPoint)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidSampler("empty mixture"))?;
        let n = first.1.dim();
        let mut components = Vec::with_capacity(parts.len());
        for (w, c) in parts {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidSampler("mixture weights must be positive"));
            }
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: c.dim(),
                });
            }
            components.push(Component {
                weight: *w,
                map: SigmaMap::new(c)?,
            });
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        for c in &mut components {
            c.weight /= total;
        }
        Ok(Self {
            n,
            components,
            radial_exponent: 0.0,
            radius: 1.0,
            beta: None,
        })
    }

    /// Half the mass at `z`, the rest spread over the heights
    /// `rho(z) 2^k`, `k = 1..=levels`, with weights proportional to `2^{-k/2}`.
    ///
    /// The high centers fatten the tail at infinity, which keeps the variance
    /// finite for integrands decaying only slightly faster than `dV`
    /// requires.
    pub fn ladder(z: &CPoint, levels: usize) -> Result<Self> {
        let mut parts = vec![(0.5, z.clone())];
        let total: f64 = (1..=levels).map(|k| 2f64.powf(-(k as f64) / 2.0)).sum();
        for k in 1..=levels {
            let h = z.rho() * 2f64.powi(k as i32);
            let c = CPoint::from_heisenberg(z.zprime().iter().copied(), z.zn().re, h)?;
            parts.push((0.5 * 2f64.powf(-(k as f64) / 2.0) / total, c));
        }
        Self::mixture(&parts)
    }

    /// Lebesgue-uniform sampling of the ball model of `D(c, r)` pushed to `U`.
    pub fn ball(ball: &BergmanBall) -> Self {
        let mut p = Self::centered(ball.center()).expect("ball center lies in U");
        p.radius = ball.radius().tanh();
        p
    }

    /// Radial weight `(1 - |xi|^2)^lambda`, `lambda > -1`.
    pub fn with_radial_exponent(mut self, lambda: f64) -> Result<Self> {
        if !(lambda > -1.0) || !lambda.is_finite() {
            return Err(Error::InvalidExponent {
                name: "lambda",
                value: lambda,
                reason: "radial exponent must exceed -1",
            });
        }
        if self.radius < 1.0 && lambda != 0.0 {
            return Err(Error::InvalidSampler("radial weights need the full ball"));
        }
        self.radial_exponent = lambda;
        self.beta = if lambda == 0.0 {
            None
        } else {
            Some(
                Beta::new(self.n as f64, lambda + 1.0)
                    .map_err(|_| Error::InvalidSampler("beta parameters"))?,
            )
        };
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components.len()
    }

    pub fn strategy(&self) -> Strategy {
        if self.components.len() == 1 {
            Strategy::McBallPullback
        } else {
            Strategy::McMixturePullback
        }
    }

    fn draw_ball<R: Rng>(&self, rng: &mut R) -> BallPoint {
        let n = self.n;
        let s = match &self.beta {
            Some(b) => b.sample(rng),
            None => {
                let u: f64 = rng.random();
                self.radius * self.radius * u.powf(1.0 / n as f64)
            }
        };
        ball_point_with_norm_sqr(n, s, rng)
    }

    /// One draw `w` and its density `q(w)` with respect to Lebesgue measure.
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> Option<(CPoint, f64)> {
        let k = if self.components.len() == 1 {
            0
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = self.components.len() - 1;
            for (i, c) in self.components.iter().enumerate() {
                acc += c.weight;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            pick
        };
        let xi = self.draw_ball(rng);
        if (Complex64::new(1.0, 0.0) + xi.last()).norm() < POLE_EPS {
            return None;
        }
        let u = cayley(&xi).ok()?;
        let w = self.components[k].map.inverse_unchecked(&u);
        let q = self.density(&w);
        (q > 0.0 && q.is_finite()).then_some((w, q))
    }

    /// Density of the proposal at `w`.
    pub fn density(&self, w: &CPoint) -> f64 {
        let n = self.n;
        let np1 = n as i32 + 1;
        let rw = w.rho();
        let kc = kernel_constant(n);
        let lambda = self.radial_exponent;
        let radial_norm = if lambda == 0.0 {
            1.0
        } else {
            // vol(B) / int_B (1 - |xi|^2)^lambda dV
            let b = PI.powi(n as i32) * gamma(lambda + 1.0).unwrap_or(f64::NAN)
                / gamma(n as f64 + lambda + 1.0).unwrap_or(f64::NAN);
            unit_ball_volume(n) / b
        };
        let r2 = self.radius * self.radius;
        let mut total = 0.0;
        for comp in &self.components {
            let c = comp.map.center();
            let rc = comp.map.height();
            let d = rho_pair(w, c).norm_sqr();
            let ratio = rc / d;
            let mut q = kc * ratio.powi(np1);
            // 1 - |xi|^2 for the ball point of w relative to c
            let depth = rw * rc / d;
            if lambda != 0.0 {
                q *= radial_norm * depth.powf(lambda);
            }
            if self.radius < 1.0 {
                if 1.0 - depth >= r2 {
                    continue;
                }
                q /= r2.powi(n as i32);
            }
            total += comp.weight * q;
        }
        total
    }
}

/// Estimates `int f dV` by sampling from `proposal`.
pub fn integrate_with<F>(
    proposal: &Proposal,
    f: F,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<Complex64>>
where
    F: Fn(&CPoint) -> Complex64 + Sync,
{
    let tally = monte_carlo(count, seed, |rng| {
        let (w, q) = proposal.sample(rng)?;
        Some(f(&w) / q)
    })?;
    Ok(tally.result(1.0, proposal.strategy()))
}

/// Real-valued form of [`integrate_with`].
pub fn integrate_with_real<F>(
    proposal: &Proposal,
    f: F,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<f64>>
where
    F: Fn(&CPoint) -> f64 + Sync,
{
    integrate_with(proposal, |w| Complex64::new(f(w), 0.0), count, seed).map(|r| r.re())
}

/// `int_U f dV = int_B f(Phi(xi)) 4 / |1 + xi_n|^{2(n+1)} dV(xi)`, estimated
/// from uniform samples of the ball.
pub fn integrate_u<F>(n: usize, f: F, count: usize, seed: u64) -> Result<IntegrationResult<f64>>
where
    F: Fn(&CPoint) -> f64 + Sync,
{
    check_dim(n)?;
    integrate_with_real(&Proposal::cayley(n), f, count, seed)
}

fn inf_or_number<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }
    match NumOrStr::deserialize(d)? {
        NumOrStr::Num(v) => Ok(v),
        NumOrStr::Str(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            other => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got \"{other}\""
            ))),
        },
    }
}

fn number_or_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn default_inf() -> f64 {
    f64::INFINITY
}

/// A truncation of `U`: `rho_min <= rho <= rho_max`, `|z| <= max_abs`,
/// optionally intersected with a Bergman ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default)]
    pub rho_min: f64,
    #[serde(
        default = "default_inf",
        deserialize_with = "inf_or_number",
        serialize_with = "number_or_inf"
    )]
    pub rho_max: f64,
    #[serde(
        default = "default_inf",
        deserialize_with = "inf_or_number",
        serialize_with = "number_or_inf"
    )]
    pub max_abs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BergmanBall>,
}

impl RegionSpec {
    pub fn new(rho_min: f64, rho_max: f64, max_abs: f64) -> Result<Self> {
        let r = Self {
            rho_min,
            rho_max,
            max_abs,
            ball: None,
        };
        r.validate()?;
        Ok(r)
    }

    /// All of `U`.
    pub fn full() -> Self {
        Self {
            rho_min: 0.0,
            rho_max: f64::INFINITY,
            max_abs: f64::INFINITY,
            ball: None,
        }
    }

    pub fn from_ball(ball: BergmanBall) -> Self {
        Self {
            ball: Some(ball),
            ..Self::full()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho_min.is_nan() || self.rho_max.is_nan() || self.max_abs.is_nan() {
            return Err(Error::Schema("region bounds must be numbers".into()));
        }
        if self.rho_min < 0.0 || self.rho_min.is_infinite() {
            return Err(Error::Schema("rho_min must be finite and >= 0".into()));
        }
        if self.rho_min >= self.rho_max || self.rho_min >= self.max_abs || self.max_abs <= 0.0 {
            return Err(Error::EmptyRegion);
        }
        Ok(())
    }

    /// Dimension fixed by the ball, if any.
    pub fn dim(&self) -> Option<usize> {
        self.ball.as_ref().map(|b| b.center().dim())
    }

    pub fn is_full(&self) -> bool {
        self.ball.is_none()
            && self.rho_min == 0.0
            && self.rho_max.is_infinite()
            && self.max_abs.is_infinite()
    }

    /// Finite Bergman volume, i.e. lattices can be built on it.
    pub fn is_bounded(&self) -> bool {
        self.ball.is_some() || (self.rho_min > 0.0 && self.max_abs.is_finite())
    }

    pub fn contains(&self, w: &CPoint) -> bool {
        let r = w.rho();
        r > 0.0
            && r >= self.rho_min
            && r <= self.rho_max
            && (self.max_abs.is_infinite() || w.norm() <= self.max_abs)
            && self.ball.as_ref().is_none_or(|b| b.contains(w))
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch {
                expected: n,
                actual: d,
            }),
            _ => Ok(()),
        }
    }
}

/// `int_region f dV`. Ball regions are sampled through the ball model of the
/// ball; other regions use the plain Cayley pullback with an indicator.
pub fn integrate_region<F>(
    n: usize,
    f: F,
    region: &RegionSpec,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<f64>>
where
    F: Fn(&CPoint) -> f64 + Sync,
{
    check_dim(n)?;
    region.validate()?;
    region.check_dim(n)?;
    let proposal = match &region.ball {
        Some(b) => Proposal::ball(b),
        None => Proposal::cayley(n),
    };
    let mut r = integrate_with_real(
        &proposal,
        |w| if region.contains(w) { f(w) } else { 0.0 },
        count,
        seed,
    )?;
    r.strategy = Strategy::McRegion;
    Ok(r)
}

/// Stratified variant of [`integrate_region`] for integrands concentrated near
/// `rho = 0`: the height range is split into dyadic shells
/// `[top 2^{-k-1}, top 2^{-k}]`, each sampled uniformly in Heisenberg
/// coordinates `(z', Re z_n, rho)` inside the box `|coordinate| <= max_abs`.
pub fn integrate_region_stratified<F>(
    n: usize,
    f: F,
    region: &RegionSpec,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<f64>>
where
    F: Fn(&CPoint) -> f64 + Sync,
{
    const MAX_SHELLS: usize = 40;
    check_dim(n)?;
    region.validate()?;
    region.check_dim(n)?;
    if region.max_abs.is_infinite() {
        return Err(Error::UnboundedRegion);
    }
    if count == 0 {
        return Err(Error::NoSamples);
    }
    let m = region.max_abs;
    let top = region.rho_max.min(m);
    let mut edges = vec![top];
    while edges.len() <= MAX_SHELLS {
        let next = edges[edges.len() - 1] / 2.0;
        if next <= region.rho_min {
            break;
        }
        edges.push(next);
    }
    edges.push(region.rho_min);
    let shells = edges.len() - 1;
    let per_shell = (count / shells).max(2);
    let real_dims = 2 * n - 1;
    let box_volume = (2.0 * m).powi(real_dims as i32);
    let mut value = 0.0;
    let mut var = 0.0;
    let mut rejected = 0;
    for k in 0..shells {
        let (hi, lo) = (edges[k], edges[k + 1]);
        let tally = monte_carlo(per_shell, seed ^ ((k as u64 + 1) << 40), |rng| {
            let rho = lo + (hi - lo) * rng.random::<f64>();
            let x = m * (2.0 * rng.random::<f64>() - 1.0);
            let zp: Coords = (0..n - 1)
                .map(|_| {
                    Complex64::new(
                        m * (2.0 * rng.random::<f64>() - 1.0),
                        m * (2.0 * rng.random::<f64>() - 1.0),
                    )
                })
                .collect();
            let w = CPoint::from_heisenberg(zp, x, rho).ok()?;
            Some(Complex64::new(
                if region.contains(&w) { f(&w) } else { 0.0 },
                0.0,
            ))
        })?;
        let vol = box_volume * (hi - lo);
        value += tally.mean().re * vol;
        var += (tally.std_error() * vol).powi(2);
        rejected += tally.rejected;
    }
    Ok(IntegrationResult {
        value,
        std_error: var.sqrt(),
        samples: per_shell * shells,
        strategy: Strategy::StratifiedShell,
        rejected,
        divergent: false,
    })
}

/// Number of hyperbolic shells used by [`mplus_check`].
pub const MPLUS_SHELLS: usize = 31;

/// Shell contributions below this ratio count as decaying.
pub const DIVERGENCE_RATIO: f64 = 0.95;

/// Estimates `int |z_n + i|^{-alpha} d mu(z)`.
///
/// Atomic measures give an exact sum. Density measures are integrated over
/// the ball model in shells `1 - |xi|^2 in [2^{-k-1}, 2^{-k})`; the result is
/// flagged divergent when the last three shell-to-shell ratios all stay above
/// [`DIVERGENCE_RATIO`].
pub fn mplus_check(
    mu: &MeasureSpec,
    alpha: f64,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidExponent {
            name: "alpha",
            value: alpha,
            reason: "must be positive",
        });
    }
    mu.validate()?;
    if let MeasureSpec::Atomic { atoms, .. } = mu {
        let sum = atoms
            .iter()
            .map(|a| a.weight * (a.point.zn() + Complex64::new(0.0, 1.0)).norm().powf(-alpha))
            .sum();
        return Ok(IntegrationResult::exact(sum, atoms.len()));
    }
    if count == 0 {
        return Err(Error::NoSamples);
    }
    let n = mu.dim();
    let nf = n as f64;
    let per_shell = (count / MPLUS_SHELLS).max(2);
    let vol_b = unit_ball_volume(n);
    let mut contributions = Vec::with_capacity(MPLUS_SHELLS);
    let mut var = 0.0;
    let mut rejected = 0;
    for k in 0..MPLUS_SHELLS {
        let s_hi = 1.0 - 2f64.powi(-(k as i32) - 1);
        let s_lo = if k == 0 { 0.0 } else { 1.0 - 2f64.powi(-(k as i32)) };
        let (a, b) = (s_lo.powf(nf), s_hi.powf(nf));
        let tally = monte_carlo(per_shell, seed ^ ((k as u64 + 1) << 40), |rng| {
            let s = (a + (b - a) * rng.random::<f64>()).powf(1.0 / nf);
            let xi = ball_point_with_norm_sqr(n, s, rng);
            let d = (Complex64::new(1.0, 0.0) + xi.last()).norm();
            if d < POLE_EPS {
                return None;
            }
            let z = cayley(&xi).ok()?;
            let dens = mu.density_at(&z)?;
            if dens == 0.0 {
                return Some(Complex64::new(0.0, 0.0));
            }
            let jac = 4.0 / d.powi(2 * (n as i32 + 1));
            let g = (z.zn() + Complex64::new(0.0, 1.0)).norm().powf(-alpha);
            Some(Complex64::new(g * dens * jac, 0.0))
        })?;
        let vol = vol_b * (b - a);
        contributions.push(tally.mean().re * vol);
        var += (tally.std_error() * vol).powi(2);
        rejected += tally.rejected;
    }
    let m = contributions.len();
    let divergent = (m - 3..m).all(|k| {
        let prev = contributions[k - 1];
        prev > 0.0 && contributions[k] / prev >= DIVERGENCE_RATIO
    });
    Ok(IntegrationResult {
        value: contributions.iter().sum(),
        std_error: var.sqrt(),
        samples: per_shell * MPLUS_SHELLS,
        strategy: Strategy::StratifiedShell,
        rejected,
        divergent,
    })
}

/// Exact value of `int_U |z_n + i|^{-alpha} dV`, i.e. `2^{-alpha} C_{n,alpha,0}`.
pub fn lebesgue_mplus_value(n: usize, alpha: f64) -> Option<f64> {
    crate::kernel::forelli_rudin_constant(n, alpha, 0.0)
        .value()
        .map(|c| c * 2f64.powf(-alpha))
}
