use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real arguments.
///
/// Lanczos approximation (g = 7, nine terms), with the reflection formula
/// below 1/2. Arguments above 170 overflow `f64` and are rejected.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(if x.is_finite() || x.is_nan() {
            Error::GammaDomain(x)
        } else {
            Error::GammaOverflow(x)
        });
    }
    if x > 170.0 {
        return Err(Error::GammaOverflow(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // t^(x+1/2) alone overflows long before Gamma does, so split the power.
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * a
}

/// `ln Gamma(x)` for `x > 0`, usable beyond the range of [`gamma`].
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::GammaDomain(x));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI.ln() - (PI * x).sin().ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `n!` in exact integer arithmetic; `n <= 20`.
pub fn factorial(n: usize) -> Result<u64> {
    if n > 20 {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok((1..=n as u64).product())
}

/// `n! / (4 pi^n)`, the Bergman kernel constant.
pub(crate) fn kernel_constant(n: usize) -> f64 {
    factorial(n).expect("dimension checked") as f64 / (4.0 * PI.powi(n as i32))
}

/// Euclidean volume of the unit ball of `C^n`, `pi^n / n!`.
pub(crate) fn unit_ball_volume(n: usize) -> f64 {
    PI.powi(n as i32) / factorial(n).expect("dimension checked") as f64
}
