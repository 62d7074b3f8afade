//! Bergman kernel of the Siegel domain and the integrals built from it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_domain, rho_pair, same_dim, CPoint};
use crate::integrate::{monte_carlo, IntegrationResult, Proposal, Strategy};
use crate::measures::TestFunction;
use crate::metric::BergmanBall;
pub use crate::special::{factorial, gamma, ln_gamma};
use crate::special::kernel_constant;

/// Relative slack allowed in every inequality check.
pub const BOUND_SLACK: f64 = 1e-9;

/// `K(z, w) = n! / (4 pi^n) * rho(z, w)^{-(n+1)}`.
pub fn bergman_kernel(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    same_dim(z, w)?;
    check_domain(z)?;
    check_domain(w)?;
    Ok(kernel_unchecked(z, w))
}

#[inline]
pub(crate) fn kernel_unchecked(z: &CPoint, w: &CPoint) -> Complex64 {
    let n = z.dim();
    rho_pair(z, w).inv().powi(n as i32 + 1) * kernel_constant(n)
}

/// `k_z(w) = K(z, w) / sqrt(K(z, z))`.
pub fn normalized_kernel(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    let k = bergman_kernel(z, w)?;
    Ok(k / diagonal_kernel(z).sqrt())
}

/// `K(z, z) = n! / (4 pi^n) rho(z)^{-(n+1)}`, real and positive.
pub(crate) fn diagonal_kernel(z: &CPoint) -> f64 {
    let n = z.dim();
    kernel_constant(n) / z.rho().powi(n as i32 + 1)
}

/// Right-hand side of the pointwise kernel estimate
/// `|K(z, w)| <= 2^{n-1} n! / pi^n * min(rho(z), rho(w))^{-n-1}`.
pub fn kernel_bound(z: &CPoint, w: &CPoint) -> Result<f64> {
    same_dim(z, w)?;
    let rz = check_domain(z)?;
    let rw = check_domain(w)?;
    let n = z.dim() as i32;
    let c = 2f64.powi(n - 1) * factorial(z.dim())? as f64 / PI.powi(n);
    Ok(c / rz.min(rw).powi(n + 1))
}

/// A closed-form integral that may diverge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralValue {
    Finite(f64),
    Divergent,
}

impl IntegralValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralValue::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            IntegralValue::Finite(v) => Some(v),
            IntegralValue::Divergent => None,
        }
    }
}

/// `C_{n,s,t} = 4 pi^n Gamma(1+t) Gamma(s-t-n-1) / Gamma(s/2)^2`, finite
/// iff `t > -1` and `s - t > n + 1`.
pub fn forelli_rudin_constant(n: usize, s: f64, t: f64) -> IntegralValue {
    let nf = n as f64;
    if !(t > -1.0) || !(s - t > nf + 1.0) || !s.is_finite() || !t.is_finite() {
        return IntegralValue::Divergent;
    }
    let a = 1.0 + t;
    let b = s - t - nf - 1.0;
    let c = s / 2.0;
    let scale = 4.0 * PI.powi(n as i32);
    let direct = (|| -> Result<f64> {
        let g = gamma(c)?;
        Ok(scale * gamma(a)? * gamma(b)? / (g * g))
    })();
    match direct {
        Ok(v) if v.is_finite() => IntegralValue::Finite(v),
        _ => {
            let ln = scale.ln() + ln_gamma_pos(a) + ln_gamma_pos(b) - 2.0 * ln_gamma_pos(c);
            IntegralValue::Finite(ln.exp())
        }
    }
}

fn ln_gamma_pos(x: f64) -> f64 {
    ln_gamma(x).expect("positive argument")
}

/// `int_U rho(w)^t / |rho(z, w)|^s dV(w) = C_{n,s,t} rho(z)^{n+1+t-s}`.
pub fn forelli_rudin_integral(z: &CPoint, s: f64, t: f64) -> Result<IntegralValue> {
    let r = check_domain(z)?;
    let n = z.dim();
    Ok(match forelli_rudin_constant(n, s, t) {
        IntegralValue::Finite(c) => IntegralValue::Finite(c / r.powf(s - t - n as f64 - 1.0)),
        IntegralValue::Divergent => IntegralValue::Divergent,
    })
}

/// The constant in `||K_z||_p = c_np rho(z)^{-(n+1)/p'}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConstant {
    pub n: usize,
    pub p: f64,
    pub c_np: f64,
}

impl NormConstant {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        crate::geometry::check_dim(n)?;
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent {
                name: "p",
                value: p,
                reason: "kernel norms need 1 < p < infinity",
            });
        }
        let c = forelli_rudin_constant(n, p * (n as f64 + 1.0), 0.0)
            .value()
            .ok_or(Error::DivergentNorm)?;
        Ok(Self {
            n,
            p,
            c_np: kernel_constant(n) * c.powf(1.0 / p),
        })
    }

    /// `(n+1)/p'` with `p' = p/(p-1)`.
    pub fn exponent(&self) -> f64 {
        (self.n as f64 + 1.0) * (self.p - 1.0) / self.p
    }
}

/// `||K_z||_p = C_{n,p} rho(z)^{-(n+1)/p'}`.
pub fn kernel_norm(z: &CPoint, p: f64) -> Result<f64> {
    let r = check_domain(z)?;
    let c = NormConstant::new(z.dim(), p)?;
    Ok(c.c_np * r.powf(-c.exponent()))
}

/// Pointwise growth estimate for `A^p` functions:
/// `|f(z)| <= (4^n n! / pi^n)^{1/p} ||f||_p rho(z)^{-(n+1)/p}`.
pub fn growth_bound_check(f: &TestFunction, p: f64, z: &CPoint) -> Result<bool> {
    let (lhs, rhs) = growth_bound_sides(f, p, z)?;
    Ok(lhs <= rhs * (1.0 + BOUND_SLACK))
}

pub(crate) fn growth_bound_sides(f: &TestFunction, p: f64, z: &CPoint) -> Result<(f64, f64)> {
    let r = check_domain(z)?;
    let n = z.dim();
    let norm = f.lp_norm(p)?;
    let c = 4f64.powi(n as i32) * factorial(n)? as f64 / PI.powi(n as i32);
    let rhs = c.powf(1.0 / p) * norm * r.powf(-(n as f64 + 1.0) / p);
    Ok((f.eval(z)?.norm(), rhs))
}

/// Outcome of one mean-value (subharmonicity) trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanValueTrial {
    pub lhs: f64,
    pub rhs: IntegrationResult,
    pub holds: bool,
}

/// Checks `|f(z)|^p <= 4^n n! / (pi^n tanh^{2n} r) * rho(z)^{-(n+1)} * int_{D(z,r)} |f|^p dV`.
///
/// The ball integral is a Monte-Carlo estimate, half uniform on the ball and
/// half drawn from a pullback centered where `|f|` peaks; a trial fails only
/// if the left side exceeds the estimate by more than four standard errors.
pub fn mean_value_check(
    f: &TestFunction,
    p: f64,
    z: &CPoint,
    r: f64,
    count: usize,
    seed: u64,
) -> Result<MeanValueTrial> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidExponent {
            name: "p",
            value: p,
            reason: "must be positive",
        });
    }
    let ball = BergmanBall::new(z.clone(), r)?;
    let n = z.dim();
    let volume = ball.volume();
    let big_r = r.tanh();
    let c = 4f64.powi(n as i32) * factorial(n)? as f64
        / (PI.powi(n as i32) * big_r.powi(2 * n as i32))
        / z.rho().powi(n as i32 + 1);
    let lhs = f.eval(z)?.norm().powf(p);
    let peak = match f.peak() {
        Some(a) => Some(Proposal::centered(&a)?),
        None => None,
    };
    let uniform = 1.0 / volume;
    let tally = monte_carlo(count, seed, |rng| {
        let Some(peak) = &peak else {
            let w = ball.sample_one(rng);
            let v = f.eval_unchecked(&w).norm().powf(p) * volume;
            return Some(Complex64::new(v, 0.0));
        };
        let w = if rng.random::<bool>() {
            ball.sample_one(rng)
        } else {
            match peak.sample(rng) {
                Some((w, _)) if ball.contains(&w) => w,
                _ => return Some(Complex64::new(0.0, 0.0)),
            }
        };
        let q = 0.5 * (uniform + peak.density(&w));
        let v = f.eval_unchecked(&w).norm().powf(p) / q;
        Some(Complex64::new(v, 0.0))
    })?;
    let rhs = tally.real_result(c, Strategy::McRegion);
    let holds = lhs <= (rhs.value + 4.0 * rhs.std_error) * (1.0 + BOUND_SLACK);
    Ok(MeanValueTrial { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(h: f64) -> CPoint {
        CPoint::on_axis(1, h)
    }

    #[test]
    fn kernel_examples() {
        let i = axis(1.0);
        let k = bergman_kernel(&i, &i).unwrap();
        assert!((k.re - 1.0 / (4.0 * PI)).abs() < 1e-17);
        assert_eq!(k.im, 0.0);
        let k = bergman_kernel(&i, &axis(2.0)).unwrap();
        assert!((k.re - 1.0 / (9.0 * PI)).abs() < 1e-17);
        let nk = normalized_kernel(&i, &i).unwrap();
        assert!((nk.re - 0.5 / PI.sqrt()).abs() < 1e-16);
        assert!(bergman_kernel(&i, &axis(-1.0)).is_err());
    }

    #[test]
    fn forelli_rudin_examples() {
        let v = forelli_rudin_constant(1, 4.0, 0.0).value().unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-13);
        assert_eq!(forelli_rudin_constant(1, 2.0, 0.0), IntegralValue::Divergent);
        let v = forelli_rudin_constant(2, 6.0, 0.0).value().unwrap();
        assert!((v - 2.0 * PI * PI).abs() < 1e-12);
        let v = forelli_rudin_integral(&axis(2.0), 4.0, 0.0).unwrap().value().unwrap();
        assert!((v - PI).abs() < 1e-13);
        assert_eq!(
            forelli_rudin_integral(&axis(1.0), 4.0, -1.0).unwrap(),
            IntegralValue::Divergent
        );
    }

    #[test]
    fn forelli_rudin_large_arguments_use_logs() {
        let direct = forelli_rudin_constant(20, 400.0, 0.0).value().unwrap();
        assert!(direct.is_finite() && direct > 0.0);
    }

    #[test]
    fn kernel_norm_examples() {
        let n1 = kernel_norm(&axis(1.0), 2.0).unwrap();
        assert!((n1 - 0.5 / PI.sqrt()).abs() < 1e-15);
        let n2 = kernel_norm(&axis(2.0), 2.0).unwrap();
        assert!((n2 - 0.25 / PI.sqrt()).abs() < 1e-15);
        let n3 = kernel_norm(&axis(1.0), 3.0).unwrap();
        let expected = (6.0 * PI).powf(1.0 / 3.0) / (4.0 * PI);
        assert!((n3 - expected).abs() < 1e-15);
        assert!(matches!(
            kernel_norm(&axis(1.0), 1.0),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn kernel_norm_p2_is_sqrt_diagonal() {
        let z = CPoint::new([Complex64::new(0.3, 0.2)], Complex64::new(-1.0, 0.9)).unwrap();
        let a = kernel_norm(&z, 2.0).unwrap();
        let b = bergman_kernel(&z, &z).unwrap().re.sqrt();
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn growth_examples() {
        let i = axis(1.0);
        let f = TestFunction::NormalizedKernel { z: i.clone() };
        assert!(growth_bound_check(&f, 2.0, &i).unwrap());
        let (lhs, rhs) = growth_bound_sides(&f, 2.0, &i).unwrap();
        assert!((lhs - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((rhs - (4.0 / PI).sqrt()).abs() < 1e-14);
        assert!(growth_bound_check(&TestFunction::Zero { dim: 1 }, 2.0, &i).unwrap());
        let bad = TestFunction::ResolventPower { dim: 1, alpha: 0.5 };
        assert_eq!(growth_bound_check(&bad, 2.0, &i), Err(Error::DivergentNorm));
    }
}
