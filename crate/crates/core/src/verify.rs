//! Numerical identity suite: closed forms against Monte Carlo, algebraic
//! identities against independent evaluations, and inequalities over
//! randomized trials.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carleson::{duality_check, toeplitz_apply};
use crate::error::Result;
use crate::geometry::{
    cayley, cayley_inv, cayley_jacobian, cayleyinv_jacobian, hermitian_dot, moebius, rho_base,
    rho_pair, BallPoint, CPoint,
};
use crate::integrate::{
    ball_point_with_norm_sqr, in_pool, integrate_with_real, IntegrationResult, Proposal,
};
use crate::kernel::{
    diagonal_kernel, forelli_rudin_integral, growth_bound_sides, kernel_bound, kernel_norm,
    kernel_unchecked, mean_value_check, BOUND_SLACK,
};
use crate::measures::{averaging, berezin, Atom, MeasureSpec, TestFunction};
use crate::metric::{
    ball_volume, bergman_distance, bergman_distance_ball, qj_rho_bounds, quasi_invariance_sides,
    random_in_ball_model,
};

/// Radius of the ball from which random test points are drawn.
pub const SAMPLE_RADIUS: f64 = 0.999;
/// Relative tolerance of the algebraic identities.
const MEAN_VALUE_REFINEMENTS: u32 = 3;

pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Samples per Monte Carlo integral.
    pub samples: usize,
    pub seed: u64,
    /// Random points per algebraic identity.
    pub checks: usize,
    /// Randomized trials per inequality.
    pub trials: usize,
    /// Samples per integral in the duality rows.
    pub duality_samples: usize,
    /// Initial samples per ball integral in each mean-value trial.
    pub mean_value_samples: usize,
    pub dims: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 1,
            checks: 10_000,
            trials: 100_000,
            duality_samples: 200_000,
            mean_value_samples: 64,
            dims: vec![1, 2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub group: String,
    pub identity: String,
    pub expected: f64,
    pub estimate: f64,
    pub sigma: f64,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub rows: Vec<VerifyRow>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn row(group: &str, identity: String, expected: f64, estimate: f64, sigma: f64, tolerance: &str, pass: bool) -> VerifyRow {
    VerifyRow {
        group: group.into(),
        identity,
        expected,
        estimate,
        sigma,
        tolerance: tolerance.into(),
        pass,
    }
}

fn label(z: &CPoint) -> String {
    let zn = z.zn();
    if z.zprime().iter().all(|c| c.norm() == 0.0) && zn.re == 0.0 {
        format!("(0',{}i)", zn.im)
    } else {
        format!("{:?}", z.coords().as_slice())
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point of the ball of radius [`SAMPLE_RADIUS`].
pub(crate) fn random_ball_point<R: Rng>(n: usize, rng: &mut R) -> BallPoint {
    let s = SAMPLE_RADIUS * SAMPLE_RADIUS * rng.random::<f64>().powf(1.0 / n as f64);
    ball_point_with_norm_sqr(n, s, rng)
}

pub(crate) fn random_point<R: Rng>(n: usize, rng: &mut R) -> CPoint {
    cayley(&random_ball_point(n, rng)).expect("interior point")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 { 0.0 } else { (a - b).norm() / scale }
}

/// `|det|^2` of the complex Jacobian of `f` at `x`, with the partial
/// derivatives from the trapezoidal Cauchy integral on circles of radius `h`.
pub(crate) fn cauchy_real_jacobian<F>(f: F, x: &[Complex64], h: f64) -> f64
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    const NODES: usize = 32;
    let n = x.len();
    let mut jac = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for k in 0..NODES {
            let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / NODES as f64);
            let mut y = x.to_vec();
            y[j] += h * w;
            let fy = f(&y);
            for i in 0..n {
                jac[i][j] += fy[i] / (w * h * NODES as f64);
            }
        }
    }
    determinant(jac).norm_sqr()
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .expect("non-empty");
        if a[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= m * v;
            }
        }
    }
    det
}

fn cayley_raw(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let d = Complex64::new(1.0, 0.0) + x[n - 1];
    let mut out: Vec<Complex64> = x[..n - 1].iter().map(|c| c / d).collect();
    out.push(Complex64::new(0.0, 1.0) * (Complex64::new(1.0, 0.0) - x[n - 1]) / d);
    out
}

fn cayley_inv_raw(z: &[Complex64]) -> Vec<Complex64> {
    let n = z.len();
    let i = Complex64::new(0.0, 1.0);
    let d = i + z[n - 1];
    let mut out: Vec<Complex64> = z[..n - 1].iter().map(|c| 2.0 * i * c / d).collect();
    out.push((i - z[n - 1]) / d);
    out
}

/// Largest relative error of `check` over `count` random draws.
fn max_error<F>(count: usize, seed: u64, stream: u64, check: F) -> f64
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    in_pool(|| {
        (0..count)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_for(seed, (stream << 32) | k as u64);
                let e = check(&mut rng);
                if e.is_nan() { f64::INFINITY } else { e }
            })
            .reduce(|| 0.0, f64::max)
    })
}

/// Number of failing trials of `trial`.
fn violations<F>(count: usize, seed: u64, stream: u64, trial: F) -> usize
where
    F: Fn(&mut ChaCha8Rng, u64) -> bool + Sync,
{
    in_pool(|| {
        (0..count)
            .into_par_iter()
            .filter(|&k| {
                let mut rng = rng_for(seed, (stream << 32) | k as u64);
                !trial(&mut rng, k as u64)
            })
            .count()
    })
}

fn forelli_rudin_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    for &n in &cfg.dims {
        for z in [CPoint::base(n), CPoint::on_axis(n, 2.0)] {
            for (s, t) in [(4.0, 0.0), (5.0, 1.0), (6.0, 0.0)] {
                let truth = forelli_rudin_integral(&z, s, t)?
                    .value()
                    .expect("convergent exponents");
                let proposal = Proposal::ladder(&z, 40)?;
                let r = integrate_with_real(
                    &proposal,
                    |w| w.rho().powf(t) / rho_pair(&z, w).norm().powf(s),
                    cfg.samples,
                    cfg.seed,
                )?;
                let pass = r.agrees_with(truth, 3.0) && r.relative_error() <= 0.01;
                rows.push(row(
                    "1a",
                    format!("forelli_rudin n={n} (s,t)=({s},{t}) z={}", label(&z)),
                    truth,
                    r.value,
                    r.std_error,
                    "3 sigma, sigma/value <= 1%",
                    pass,
                ));
            }
        }
    }
    Ok(())
}

fn volume_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    for &n in &cfg.dims {
        for z in [CPoint::base(n), CPoint::on_axis(n, 2.0)] {
            let truth = ball_volume(&z, 1.0)?;
            let r = integrate_with_real(
                &Proposal::centered(&z)?,
                |w| if bergman_distance(&z, w).unwrap_or(f64::INFINITY) < 1.0 { 1.0 } else { 0.0 },
                cfg.samples,
                cfg.seed,
            )?;
            rows.push(row(
                "1b",
                format!("ball_volume n={n} D({},1)", label(&z)),
                truth,
                r.value,
                r.std_error,
                "3 sigma",
                r.agrees_with(truth, 3.0),
            ));
        }
    }
    Ok(())
}

fn kernel_norm_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    for &n in &cfg.dims {
        let i = CPoint::base(n);
        for p in [2.0, 3.0] {
            let truth = kernel_norm(&i, p)?;
            let r = integrate_with_real(
                &Proposal::centered(&i)?,
                |w| kernel_unchecked(w, &i).norm().powf(p),
                cfg.samples,
                cfg.seed,
            )?;
            let est = r.value.powf(1.0 / p);
            let sigma = est / (p * r.value) * r.std_error;
            let pass = (est - truth).abs() <= 3.0 * sigma + 1e-12 * truth;
            rows.push(row(
                "1c",
                format!("kernel_norm n={n} p={p} z=(0',1i)"),
                truth,
                est,
                sigma,
                "3 sigma",
                pass,
            ));
        }
        let exact = kernel_norm(&i, 2.0)?;
        let diag = diagonal_kernel(&i).sqrt();
        rows.push(row(
            "1c",
            format!("kernel_norm n={n} p=2 equals sqrt K(i,i)"),
            diag,
            exact,
            0.0,
            "relative 1e-12",
            (exact - diag).abs() <= 1e-12 * diag,
        ));
    }
    Ok(())
}

fn identity_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) {
    let one = Complex64::new(1.0, 0.0);
    for &n in &cfg.dims {
        let base = CPoint::base(n);
        let stream = 100 + n as u64 * 16;
        let checks: Vec<(&str, f64)> = vec![
            (
                "cayley (i) rho(Phi xi, Phi eta)",
                max_error(cfg.checks, cfg.seed, stream, |rng| {
                    let xi = random_ball_point(n, rng);
                    let eta = random_ball_point(n, rng);
                    let lhs = rho_pair(&cayley(&xi).unwrap(), &cayley(&eta).unwrap());
                    let rhs = (one - hermitian_dot(xi.coords(), eta.coords()))
                        / ((one + xi.last()) * (one + eta.last().conj()));
                    rel(lhs, rhs)
                }),
            ),
            (
                "cayley (ii) real Jacobian of Phi",
                max_error(cfg.checks, cfg.seed, stream + 1, |rng| {
                    let xi = random_ball_point(n, rng);
                    let h = 0.25 * (one + xi.last()).norm();
                    let oracle = cauchy_real_jacobian(cayley_raw, xi.coords(), h);
                    rel(cayley_jacobian(&xi).unwrap().into(), oracle.into())
                }),
            ),
            (
                "cayley (iii) 1 - Phi^-1 z . conj(Phi^-1 w)",
                max_error(cfg.checks, cfg.seed, stream + 2, |rng| {
                    let z = random_point(n, rng);
                    let w = random_point(n, rng);
                    let a = cayley_inv(&z).unwrap();
                    let b = cayley_inv(&w).unwrap();
                    let lhs = one - hermitian_dot(a.coords(), b.coords());
                    let rhs = rho_pair(&z, &w) / (rho_pair(&z, &base) * rho_pair(&base, &w));
                    rel(lhs, rhs)
                }),
            ),
            (
                "cayley (iv) 1 - |Phi^-1 z|^2",
                max_error(cfg.checks, cfg.seed, stream + 3, |rng| {
                    let z = random_point(n, rng);
                    let lhs = 1.0 - cayley_inv(&z).unwrap().norm_sqr();
                    let rhs = z.rho() / rho_base(&z).norm_sqr();
                    rel(lhs.into(), rhs.into())
                }),
            ),
            (
                "cayley (v) real Jacobian of Phi^-1",
                max_error(cfg.checks, cfg.seed, stream + 4, |rng| {
                    let z = random_point(n, rng);
                    let h = 0.25 * (z.zn() + Complex64::new(0.0, 1.0)).norm();
                    let oracle = cauchy_real_jacobian(cayley_inv_raw, &z.coords(), h);
                    rel(cayleyinv_jacobian(&z).unwrap().into(), oracle.into())
                }),
            ),
            (
                "moebius 1 - phi(eta) . conj(phi(omega))",
                max_error(cfg.checks, cfg.seed, stream + 5, |rng| {
                    let xi = random_ball_point(n, rng);
                    let eta = random_ball_point(n, rng);
                    let om = random_ball_point(n, rng);
                    let a = moebius(&xi, &eta).unwrap();
                    let b = moebius(&xi, &om).unwrap();
                    let lhs = one - hermitian_dot(a.coords(), b.coords());
                    let rhs = (1.0 - xi.norm_sqr()) * (one - hermitian_dot(eta.coords(), om.coords()))
                        / ((one - hermitian_dot(eta.coords(), xi.coords()))
                            * (one - hermitian_dot(xi.coords(), om.coords())));
                    rel(lhs, rhs)
                }),
            ),
        ];
        for (name, err) in checks {
            rows.push(row(
                "1d",
                format!("{name} n={n} ({} points)", cfg.checks),
                0.0,
                err,
                0.0,
                "max relative error <= 1e-10",
                err <= IDENTITY_TOL,
            ));
        }
        let err = max_error(cfg.checks, cfg.seed, stream + 6, |rng| {
            let z = random_point(n, rng);
            let w = random_point(n, rng);
            let a = bergman_distance(&z, &w).unwrap();
            let b = bergman_distance_ball(&z, &w).unwrap();
            (a - b).abs() / a.max(1.0)
        });
        rows.push(row(
            "1e",
            format!("metric closed form vs ball model n={n} ({} pairs)", cfg.checks),
            0.0,
            err,
            0.0,
            "max |difference| / max(1, beta) <= 1e-10",
            err <= IDENTITY_TOL,
        ));
    }
}

pub(crate) fn random_test_function<R: Rng>(n: usize, p: f64, rng: &mut R) -> TestFunction {
    let nf = n as f64;
    match rng.random_range(0..3) {
        0 => TestFunction::KernelPower {
            a: random_point(n, rng),
            exponent: p,
        },
        1 => TestFunction::ResolventPower {
            dim: n,
            alpha: (nf + 1.0) / p + 0.25 + 2.0 * rng.random::<f64>(),
        },
        _ => TestFunction::Kernel {
            w: random_point(n, rng),
        },
    }
}

fn inequality_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) {
    let t = cfg.trials;
    for &n in &cfg.dims {
        let stream = 200 + n as u64 * 16;
        let mut push = |name: String, bad: usize| {
            rows.push(row(
                "1f",
                format!("{name} n={n} ({t} trials)"),
                0.0,
                bad as f64,
                0.0,
                "zero violations",
                bad == 0,
            ));
        };
        push(
            "kernel bound".into(),
            violations(t, cfg.seed, stream, |rng, _| {
                let z = random_point(n, rng);
                let w = random_point(n, rng);
                kernel_unchecked(&z, &w).norm() <= kernel_bound(&z, &w).unwrap() * (1.0 + BOUND_SLACK)
            }),
        );
        push(
            "quasi-invariance".into(),
            violations(t, cfg.seed, stream + 1, |rng, _| {
                let r = 0.05 + 2.95 * rng.random::<f64>();
                let z = random_point(n, rng);
                let u = random_point(n, rng);
                let v = random_in_ball_model(&u, r * (1.0 - 1e-9), rng);
                match quasi_invariance_sides(&z, &u, &v, r) {
                    Ok((ratio, lo, hi)) => {
                        ratio >= lo * (1.0 - BOUND_SLACK) && ratio <= hi * (1.0 + BOUND_SLACK)
                    }
                    Err(_) => false,
                }
            }),
        );
        push(
            "Q_j height bounds".into(),
            violations(t, cfg.seed, stream + 2, |rng, _| {
                let j = rng.random_range(1..=4) as f64;
                let w = random_in_ball_model(&CPoint::base(n), j, rng);
                let (lo, hi) = qj_rho_bounds(j);
                let r = w.rho();
                r >= lo * (1.0 - BOUND_SLACK) && r <= hi * (1.0 + BOUND_SLACK)
            }),
        );
        push(
            "growth bound".into(),
            violations(t, cfg.seed, stream + 3, |rng, _| {
                let p = 1.1 + 2.9 * rng.random::<f64>();
                let f = random_test_function(n, p, rng);
                let z = random_point(n, rng);
                match growth_bound_sides(&f, p, &z) {
                    Ok((lhs, rhs)) => lhs <= rhs * (1.0 + BOUND_SLACK),
                    Err(_) => false,
                }
            }),
        );
        let mv = cfg.mean_value_samples;
        push(
            "mean-value bound".into(),
            violations(t, cfg.seed, stream + 4, |rng, k| {
                let p = 0.5 + 3.5 * rng.random::<f64>();
                let f = random_test_function(n, p.max(1.1), rng);
                let z = random_point(n, rng);
                let r = 0.2 + 1.3 * rng.random::<f64>();
                mean_value_holds(&f, p, &z, r, mv, cfg.seed ^ k)
            }),
        );
    }
}

/// A failed trial is re-estimated with fresh draws and sixteen times the
/// samples, up to `MEAN_VALUE_REFINEMENTS` times, before it counts.
fn mean_value_holds(f: &TestFunction, p: f64, z: &CPoint, r: f64, count: usize, seed: u64) -> bool {
    let mut count = count;
    for level in 0..=MEAN_VALUE_REFINEMENTS {
        match mean_value_check(f, p, z, r, count, seed ^ ((level as u64) << 48)) {
            Ok(m) if m.holds => return true,
            Ok(_) => count *= 16,
            Err(_) => return false,
        }
    }
    false
}

fn probe_points(n: usize) -> Vec<CPoint> {
    (0..10)
        .map(|k| {
            let h = 10f64.powf(-2.0 + 4.0 * k as f64 / 9.0);
            let mut zp = vec![Complex64::new(0.0, 0.0); n - 1];
            if let Some(c) = zp.first_mut() {
                *c = Complex64::new(0.3 * h.sqrt(), -0.2 * h.sqrt());
            }
            CPoint::from_heisenberg(zp, 0.7 * h * (k as f64 - 4.5), h).expect("finite probe")
        })
        .collect()
}

fn berezin_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    for &n in &cfg.dims {
        let mu = MeasureSpec::lebesgue(n);
        let mut worst: Option<IntegrationResult> = None;
        let mut pass = true;
        let mut max_avg_err: f64 = 0.0;
        for z in probe_points(n) {
            let b = berezin(&mu, &z, cfg.samples, cfg.seed)?;
            pass &= b.agrees_with(1.0, 3.0);
            if worst.as_ref().is_none_or(|w| (w.value - 1.0).abs() < (b.value - 1.0).abs()) {
                worst = Some(b);
            }
            for r in [0.5, 1.0, 2.0] {
                let a = averaging(&mu, &z, r, 1, cfg.seed)?;
                max_avg_err = max_avg_err.max((a.value - 1.0).abs());
            }
        }
        let w = worst.expect("probes");
        rows.push(row(
            "2",
            format!("berezin of Lebesgue = 1 n={n} (10 probes, rho in [1e-2, 1e2])"),
            1.0,
            w.value,
            w.std_error,
            "3 sigma",
            pass,
        ));
        rows.push(row(
            "2",
            format!("averaging of Lebesgue = 1 n={n} (10 probes, r in {{0.5,1,2}})"),
            1.0,
            1.0 + max_avg_err,
            0.0,
            "absolute 1e-12",
            max_avg_err <= 1e-12,
        ));
    }
    Ok(())
}

/// Atomic measures and `(p, alpha, gamma)` triples of the duality checks.
pub fn duality_cases() -> Vec<(String, MeasureSpec, f64, f64, f64)> {
    let i = CPoint::base(1);
    let two = CPoint::on_axis(1, 2.0);
    let single = MeasureSpec::unit_atom(i.clone());
    let pair = MeasureSpec::Atomic {
        dim: 1,
        atoms: vec![
            Atom { point: i, weight: 1.0 },
            Atom { point: two, weight: 0.5 },
        ],
    };
    let mut out = Vec::new();
    for (name, mu) in [("atom at (0',i)", single), ("atoms (0',i):1, (0',2i):0.5", pair)] {
        for (p, a, g) in [(2.0, 2.0, 2.0), (2.0, 2.5, 1.8)] {
            out.push((name.to_string(), mu.clone(), p, a, g));
        }
    }
    out
}

fn duality_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    for (name, mu, p, a, g) in duality_cases() {
        let f = TestFunction::ResolventPower { dim: 1, alpha: a };
        let gf = TestFunction::ResolventPower { dim: 1, alpha: g };
        let d = duality_check(&mu, &f, &gf, p, cfg.duality_samples, cfg.seed)?;
        let pass = d.agrees(3.0) && d.relative_sigma() <= 0.02;
        rows.push(row(
            "3",
            format!("duality {name} (p,alpha,gamma)=({p},{a},{g}) re"),
            d.rhs.re,
            d.lhs.value.re,
            d.sigma,
            "3 sigma (complex), sigma/|rhs| <= 2%",
            pass,
        ));
    }
    Ok(())
}

/// Probe points of the reproducing-property rows.
pub fn reproducing_probes() -> Vec<CPoint> {
    [(0.0, 1.0), (0.5, 0.3), (-1.0, 2.0), (2.0, 0.1), (0.0, 5.0)]
        .iter()
        .map(|&(x, y)| CPoint::new([], Complex64::new(x, y)).expect("upper half-plane"))
        .collect()
}

fn reproducing_rows(cfg: &VerifyConfig, rows: &mut Vec<VerifyRow>) -> Result<()> {
    let mu = MeasureSpec::lebesgue(1);
    for alpha in [2.0, 3.0] {
        let f = TestFunction::ResolventPower { dim: 1, alpha };
        for z in reproducing_probes() {
            let t = toeplitz_apply(&mu, &f, &z, cfg.samples, cfg.seed)?;
            let truth = f.eval(&z)?;
            rows.push(row(
                "4",
                format!("reproducing alpha={alpha} z={} |T f - f|", label(&z)),
                0.0,
                (t.value - truth).norm(),
                t.std_error,
                "3 sigma",
                t.agrees_with(truth, 3.0) && !t.divergent,
            ));
        }
    }
    Ok(())
}

/// Runs the full suite.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut rows = Vec::new();
    forelli_rudin_rows(cfg, &mut rows)?;
    volume_rows(cfg, &mut rows)?;
    kernel_norm_rows(cfg, &mut rows)?;
    identity_rows(cfg, &mut rows);
    inequality_rows(cfg, &mut rows);
    berezin_rows(cfg, &mut rows)?;
    duality_rows(cfg, &mut rows)?;
    reproducing_rows(cfg, &mut rows)?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(VerifyReport {
        config: cfg.clone(),
        failed: rows.len() - passed,
        passed,
        rows,
    })
}
