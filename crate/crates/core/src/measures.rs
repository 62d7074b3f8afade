//! Positive measures on the Siegel domain, their Berezin transforms and
//! averaging functions, and the holomorphic test functions used to probe them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, check_domain, rho_pair, CPoint};
use crate::integrate::{
    integrate_with_real, monte_carlo, mplus_check, IntegrationResult, Proposal, RegionSpec,
    Strategy,
};
use crate::kernel::{
    diagonal_kernel, forelli_rudin_constant, kernel_norm, kernel_unchecked,
};
use crate::metric::BergmanBall;
use crate::special::kernel_constant;

/// A point mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub point: CPoint,
    pub weight: f64,
}

/// Densities with respect to Lebesgue measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityFamily {
    /// `rho(w)^exponent`
    RhoPower { exponent: f64 },
    /// The constant `scale`.
    Constant { scale: f64 },
}

/// A positive Borel measure on `U`.
///
/// JSON forms:
/// `{"type":"atomic","dim":n,"atoms":[{"point":{..},"weight":w}]}`,
/// `{"type":"density","dim":n,"family":"rho_power","exponent":e,"restriction":{..}}`,
/// `{"type":"density","dim":n,"family":"constant","scale":s}`,
/// `{"type":"lebesgue","dim":n,"restriction":{..}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub enum MeasureSpec {
    Atomic {
        dim: usize,
        atoms: Vec<Atom>,
    },
    Density {
        dim: usize,
        family: DensityFamily,
        restriction: Option<RegionSpec>,
    },
    Lebesgue {
        dim: usize,
        restriction: Option<RegionSpec>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    #[serde(rename = "type")]
    kind: String,
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    restriction: Option<RegionSpec>,
}

impl TryFrom<MeasureRepr> for MeasureSpec {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        let unexpected = |field: &str| Error::Schema(format!("field \"{field}\" not allowed for type \"{}\"", r.kind));
        let spec = match r.kind.as_str() {
            "atomic" => {
                if r.family.is_some() || r.exponent.is_some() || r.scale.is_some() {
                    return Err(unexpected("family"));
                }
                if r.restriction.is_some() {
                    return Err(unexpected("restriction"));
                }
                MeasureSpec::Atomic {
                    dim: r.dim,
                    atoms: r.atoms.ok_or_else(|| Error::Schema("atomic measure needs \"atoms\"".into()))?,
                }
            }
            "density" => {
                if r.atoms.is_some() {
                    return Err(unexpected("atoms"));
                }
                let family = match r.family.as_deref() {
                    Some("rho_power") => {
                        if r.scale.is_some() {
                            return Err(unexpected("scale"));
                        }
                        DensityFamily::RhoPower {
                            exponent: r.exponent.ok_or_else(|| {
                                Error::Schema("rho_power density needs \"exponent\"".into())
                            })?,
                        }
                    }
                    Some("constant") => {
                        if r.exponent.is_some() {
                            return Err(unexpected("exponent"));
                        }
                        DensityFamily::Constant {
                            scale: r.scale.ok_or_else(|| {
                                Error::Schema("constant density needs \"scale\"".into())
                            })?,
                        }
                    }
                    Some(other) => {
                        return Err(Error::Schema(format!("unknown density family \"{other}\"")))
                    }
                    None => return Err(Error::Schema("density measure needs \"family\"".into())),
                };
                MeasureSpec::Density {
                    dim: r.dim,
                    family,
                    restriction: r.restriction,
                }
            }
            "lebesgue" => {
                if r.atoms.is_some() || r.family.is_some() || r.exponent.is_some() || r.scale.is_some() {
                    return Err(unexpected("family"));
                }
                MeasureSpec::Lebesgue {
                    dim: r.dim,
                    restriction: r.restriction,
                }
            }
            other => return Err(Error::Schema(format!("unknown measure type \"{other}\""))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<MeasureSpec> for MeasureRepr {
    fn from(m: MeasureSpec) -> Self {
        let mut r = MeasureRepr {
            kind: String::new(),
            dim: m.dim(),
            atoms: None,
            family: None,
            exponent: None,
            scale: None,
            restriction: None,
        };
        match m {
            MeasureSpec::Atomic { atoms, .. } => {
                r.kind = "atomic".into();
                r.atoms = Some(atoms);
            }
            MeasureSpec::Density {
                family,
                restriction,
                ..
            } => {
                r.kind = "density".into();
                match family {
                    DensityFamily::RhoPower { exponent } => {
                        r.family = Some("rho_power".into());
                        r.exponent = Some(exponent);
                    }
                    DensityFamily::Constant { scale } => {
                        r.family = Some("constant".into());
                        r.scale = Some(scale);
                    }
                }
                r.restriction = restriction;
            }
            MeasureSpec::Lebesgue { restriction, .. } => {
                r.kind = "lebesgue".into();
                r.restriction = restriction;
            }
        }
        r
    }
}

impl MeasureSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn lebesgue(dim: usize) -> Self {
        MeasureSpec::Lebesgue {
            dim,
            restriction: None,
        }
    }

    pub fn unit_atom(point: CPoint) -> Self {
        MeasureSpec::Atomic {
            dim: point.dim(),
            atoms: vec![Atom { point, weight: 1.0 }],
        }
    }

    pub fn rho_power(dim: usize, exponent: f64) -> Self {
        MeasureSpec::Density {
            dim,
            family: DensityFamily::RhoPower { exponent },
            restriction: None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MeasureSpec::Atomic { dim, .. }
            | MeasureSpec::Density { dim, .. }
            | MeasureSpec::Lebesgue { dim, .. } => *dim,
        }
    }

    pub fn restriction(&self) -> Option<&RegionSpec> {
        match self {
            MeasureSpec::Atomic { .. } => None,
            MeasureSpec::Density { restriction, .. } | MeasureSpec::Lebesgue { restriction, .. } => {
                restriction.as_ref()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        check_dim(n)?;
        match self {
            MeasureSpec::Atomic { atoms, .. } => {
                for a in atoms {
                    if a.point.dim() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            actual: a.point.dim(),
                        });
                    }
                    check_domain(&a.point)?;
                    if !(a.weight > 0.0) || !a.weight.is_finite() {
                        return Err(Error::Schema(format!(
                            "atom weights must be positive and finite, got {}",
                            a.weight
                        )));
                    }
                }
            }
            MeasureSpec::Density { family, .. } => match *family {
                DensityFamily::RhoPower { exponent } => {
                    if !(exponent > -1.0) || !exponent.is_finite() {
                        return Err(Error::Schema(format!(
                            "rho_power exponent must be finite and > -1 (locally finite measure), got {exponent}"
                        )));
                    }
                }
                DensityFamily::Constant { scale } => {
                    if !(scale > 0.0) || !scale.is_finite() {
                        return Err(Error::Schema(format!(
                            "constant density scale must be positive, got {scale}"
                        )));
                    }
                }
            },
            MeasureSpec::Lebesgue { .. } => {}
        }
        if let Some(r) = self.restriction() {
            r.validate()?;
            r.check_dim(n)?;
        }
        Ok(())
    }

    /// Lebesgue density at `w` (zero outside the restriction); `None` for
    /// atomic measures.
    pub fn density_at(&self, w: &CPoint) -> Option<f64> {
        let inside = self.restriction().is_none_or(|r| r.contains(w));
        match self {
            MeasureSpec::Atomic { .. } => None,
            _ if !inside => Some(0.0),
            MeasureSpec::Lebesgue { .. } => Some(1.0),
            MeasureSpec::Density { family, .. } => Some(match *family {
                DensityFamily::RhoPower { exponent } => w.rho().powf(exponent),
                DensityFamily::Constant { scale } => scale,
            }),
        }
    }
}

/// Holomorphic functions used as probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `[rho(a)^{n+1} / rho(z, a)^{2(n+1)}]^{1/exponent}`.
    KernelPower { a: CPoint, exponent: f64 },
    /// `(z_n + i)^{-alpha}`.
    ResolventPower { dim: usize, alpha: f64 },
    /// `K(z, z0) / sqrt(K(z0, z0))`.
    NormalizedKernel { z: CPoint },
    /// `K(z, w)`.
    Kernel { w: CPoint },
    Zero { dim: usize },
}

fn principal_pow(base: Complex64, e: f64) -> Complex64 {
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        let k = e as i32;
        if k >= 0 {
            base.powi(k)
        } else {
            base.inv().powi(-k)
        }
    } else {
        base.powf(e)
    }
}

impl TestFunction {
    pub fn dim(&self) -> usize {
        match self {
            TestFunction::KernelPower { a, .. } => a.dim(),
            TestFunction::ResolventPower { dim, .. } | TestFunction::Zero { dim } => *dim,
            TestFunction::NormalizedKernel { z } => z.dim(),
            TestFunction::Kernel { w } => w.dim(),
        }
    }

    /// Point whose reproducing kernel has the same singularity as `f`.
    pub(crate) fn peak(&self) -> Option<CPoint> {
        match self {
            TestFunction::KernelPower { a, .. } => Some(a.clone()),
            TestFunction::ResolventPower { dim, .. } => Some(CPoint::base(*dim)),
            TestFunction::NormalizedKernel { z } => Some(z.clone()),
            TestFunction::Kernel { w } => Some(w.clone()),
            TestFunction::Zero { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim())?;
        match self {
            TestFunction::KernelPower { a, exponent } => {
                check_domain(a)?;
                if !(*exponent > 0.0) || !exponent.is_finite() {
                    return Err(Error::InvalidExponent {
                        name: "exponent",
                        value: *exponent,
                        reason: "must be positive",
                    });
                }
            }
            TestFunction::ResolventPower { alpha, .. } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidExponent {
                        name: "alpha",
                        value: *alpha,
                        reason: "must be finite",
                    });
                }
            }
            TestFunction::NormalizedKernel { z } => {
                check_domain(z)?;
            }
            TestFunction::Kernel { w } => {
                check_domain(w)?;
            }
            TestFunction::Zero { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, z: &CPoint) -> Result<Complex64> {
        self.validate()?;
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: z.dim(),
            });
        }
        check_domain(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &CPoint) -> Complex64 {
        let n = z.dim() as f64;
        match self {
            TestFunction::KernelPower { a, exponent } => {
                let p = *exponent;
                principal_pow(rho_pair(z, a), -2.0 * (n + 1.0) / p) * a.rho().powf((n + 1.0) / p)
            }
            TestFunction::ResolventPower { alpha, .. } => {
                principal_pow(z.zn() + Complex64::new(0.0, 1.0), -alpha)
            }
            TestFunction::NormalizedKernel { z: z0 } => {
                kernel_unchecked(z, z0) / diagonal_kernel(z0).sqrt()
            }
            TestFunction::Kernel { w } => kernel_unchecked(z, w),
            TestFunction::Zero { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// `d` with `|f(z)| ~ |z_n + i|^{-d}` at infinity.
    pub fn decay_exponent(&self) -> f64 {
        let n = self.dim() as f64;
        match self {
            TestFunction::KernelPower { exponent, .. } => 2.0 * (n + 1.0) / exponent,
            TestFunction::ResolventPower { alpha, .. } => *alpha,
            TestFunction::NormalizedKernel { .. } | TestFunction::Kernel { .. } => n + 1.0,
            TestFunction::Zero { .. } => f64::INFINITY,
        }
    }

    /// Closed-form `||f||_{L^p(U)}`; [`Error::DivergentNorm`] when infinite.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidExponent {
                name: "p",
                value: p,
                reason: "must be positive and finite",
            });
        }
        let n = self.dim();
        let nf = n as f64;
        match self {
            TestFunction::Zero { .. } => Ok(0.0),
            TestFunction::Kernel { w } => {
                if p <= 1.0 {
                    return Err(Error::DivergentNorm);
                }
                kernel_norm(w, p)
            }
            TestFunction::NormalizedKernel { z } => {
                if p <= 1.0 {
                    return Err(Error::DivergentNorm);
                }
                Ok(kernel_norm(z, p)? / diagonal_kernel(z).sqrt())
            }
            TestFunction::KernelPower { a, exponent } => {
                let s = 2.0 * (nf + 1.0) * p / exponent;
                let c = forelli_rudin_constant(n, s, 0.0)
                    .value()
                    .ok_or(Error::DivergentNorm)?;
                let pp = (nf + 1.0) * p / exponent;
                Ok((c * a.rho().powf(nf + 1.0 - pp)).powf(1.0 / p))
            }
            TestFunction::ResolventPower { alpha, .. } => {
                let s = alpha * p;
                let c = forelli_rudin_constant(n, s, 0.0)
                    .value()
                    .ok_or(Error::DivergentNorm)?;
                Ok((c * 2f64.powf(-s)).powf(1.0 / p))
            }
        }
    }
}

pub fn eval_test_function(f: &TestFunction, z: &CPoint) -> Result<Complex64> {
    f.eval(z)
}

/// `|k_z(w)|^2 = n!/(4 pi^n) rho(z)^{n+1} / |rho(z, w)|^{2(n+1)}`.
#[inline]
pub(crate) fn berezin_weight(z: &CPoint, w: &CPoint) -> f64 {
    let k = kernel_unchecked(z, w);
    k.norm_sqr() / diagonal_kernel(z)
}

/// Sampling law matched to `|k_z|^2 d mu` for a non-atomic `mu`.
pub(crate) fn berezin_proposal(mu: &MeasureSpec, z: &CPoint) -> Result<Proposal> {
    Ok(match mu.restriction() {
        Some(RegionSpec { ball: Some(b), .. }) => Proposal::ball(b),
        Some(_) => Proposal::mixture(&[(0.5, z.clone()), (0.5, CPoint::base(z.dim()))])?,
        None => Proposal::centered(z)?.with_radial_exponent(boundary_exponent(mu))?,
    })
}

/// Negative part of the density exponent, used as a radial weight.
pub(crate) fn boundary_exponent(mu: &MeasureSpec) -> f64 {
    match mu {
        MeasureSpec::Density {
            family: DensityFamily::RhoPower { exponent },
            ..
        } if *exponent < 0.0 => *exponent,
        _ => 0.0,
    }
}

/// Berezin transform `mu~(z) = int |k_z(w)|^2 d mu(w)`.
pub fn berezin(mu: &MeasureSpec, z: &CPoint, count: usize, seed: u64) -> Result<IntegrationResult> {
    mu.validate()?;
    if z.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            actual: z.dim(),
        });
    }
    check_domain(z)?;
    if let MeasureSpec::Atomic { atoms, .. } = mu {
        let v = atoms.iter().map(|a| a.weight * berezin_weight(z, &a.point)).sum();
        return Ok(IntegrationResult::exact(v, atoms.len()));
    }
    let proposal = berezin_proposal(mu, z)?;
    integrate_with_real(
        &proposal,
        |w| match mu.density_at(w) {
            Some(d) if d > 0.0 => d * berezin_weight(z, w),
            _ => 0.0,
        },
        count,
        seed,
    )
}

/// `mu^_r(z)` from `mu(D(z, r))`:
/// `n!/(4 pi^n) (1 - tanh^2 r)^{n+1} / tanh^{2n} r * mu(D) / rho(z)^{n+1}`.
pub fn averaging_from_mass(z: &CPoint, r: f64, mass: f64) -> f64 {
    let n = z.dim() as i32;
    let t = r.tanh();
    kernel_constant(z.dim()) * (1.0 - t * t).powi(n + 1) / t.powi(2 * n) * mass
        / z.rho().powi(n + 1)
}

/// Averaging function `mu^_r(z) = mu(D(z, r)) / |D(z, r)|`.
pub fn averaging(
    mu: &MeasureSpec,
    z: &CPoint,
    r: f64,
    count: usize,
    seed: u64,
) -> Result<IntegrationResult> {
    mu.validate()?;
    if z.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            actual: z.dim(),
        });
    }
    let ball = BergmanBall::new(z.clone(), r)?;
    match mu {
        MeasureSpec::Atomic { atoms, .. } => {
            let mass: f64 = atoms
                .iter()
                .filter(|a| ball.contains(&a.point))
                .map(|a| a.weight)
                .sum();
            Ok(IntegrationResult::exact(
                averaging_from_mass(z, r, mass),
                atoms.len(),
            ))
        }
        MeasureSpec::Lebesgue {
            restriction: None, ..
        } => Ok(IntegrationResult::exact(
            averaging_from_mass(z, r, ball.volume()),
            1,
        )),
        MeasureSpec::Density {
            family: DensityFamily::Constant { scale },
            restriction: None,
            ..
        } => Ok(IntegrationResult::exact(
            averaging_from_mass(z, r, scale * ball.volume()),
            1,
        )),
        _ => {
            let tally = monte_carlo(count, seed, |rng| {
                let w = ball.sample_one(rng);
                Some(Complex64::new(mu.density_at(&w).unwrap_or(0.0), 0.0))
            })?;
            Ok(tally.real_result(1.0, Strategy::McRegion))
        }
    }
}

/// Result of a supremum scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    pub sup: f64,
    pub argmax: CPoint,
    /// The shell maxima keep growing toward one of the boundary regimes.
    pub unbounded_trend: bool,
}

/// Number of dyadic shells per boundary regime in [`salpha_sup`].
pub const SUP_SHELLS: usize = 21;

/// Probe points on dyadic shells toward `rho -> 0` (`near`) and toward
/// infinity (`far`), deterministic per seed.
pub(crate) fn boundary_probes(n: usize, per_shell: usize, seed: u64) -> (Vec<Vec<CPoint>>, Vec<Vec<CPoint>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut near = Vec::with_capacity(SUP_SHELLS);
    let mut far = Vec::with_capacity(SUP_SHELLS);
    for k in 0..SUP_SHELLS {
        let h = 2f64.powi(-(k as i32));
        let mut shell = vec![CPoint::on_axis(n, h)];
        for _ in 1..per_shell {
            let zp: Vec<Complex64> = (0..n - 1)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let x = 2.0 * rng.random::<f64>() - 1.0;
            shell.push(CPoint::from_heisenberg(zp, x, h).expect("finite"));
        }
        near.push(shell);

        let big = 2f64.powi(k as i32);
        let mut shell = vec![CPoint::on_axis(n, big)];
        for _ in 1..per_shell {
            let theta = std::f64::consts::PI * (0.05 + 0.9 * rng.random::<f64>());
            let zn = Complex64::from_polar(big, theta) + Complex64::new(0.0, 1.0);
            shell.push(CPoint::new(zero.iter().copied(), zn).expect("finite"));
        }
        far.push(shell);
    }
    (near, far)
}

/// Growth test: the last three consecutive shell ratios all exceed `factor`.
pub(crate) fn growing_tail(maxima: &[f64], factor: f64) -> bool {
    let m = maxima.len();
    m >= 4 && (m - 3..m).all(|k| maxima[k - 1] > 0.0 && maxima[k] > factor * maxima[k - 1])
}

/// Empirical `sup_z |z_n + i|^alpha |f(z)|` over boundary-weighted probes.
pub fn salpha_sup(f: &TestFunction, alpha: f64, probes: usize, seed: u64) -> Result<SupReport> {
    f.validate()?;
    let n = f.dim();
    let per_shell = (probes / (2 * SUP_SHELLS)).max(1);
    let (near, far) = boundary_probes(n, per_shell, seed);
    let score = |z: &CPoint| {
        let v = (z.zn() + Complex64::new(0.0, 1.0)).norm().powf(alpha) * f.eval_unchecked(z).norm();
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut sup = f64::NEG_INFINITY;
    let mut argmax = CPoint::base(n);
    let mut trend = false;
    for shells in [&near, &far] {
        let mut maxima = Vec::with_capacity(shells.len());
        for shell in shells.iter() {
            let mut m = f64::NEG_INFINITY;
            for z in shell {
                let v = score(z);
                if v > m {
                    m = v;
                }
                if v > sup {
                    sup = v;
                    argmax = z.clone();
                }
            }
            maxima.push(m);
        }
        trend |= growing_tail(&maxima, 1.05);
    }
    Ok(SupReport {
        sup,
        argmax,
        unbounded_trend: trend,
    })
}

/// Smallest `alpha` in `{1, ..., 2(n+1)}` with `int |z_n + i|^{-alpha} d mu < infinity`
/// according to [`mplus_check`].
pub fn admissible_alpha(mu: &MeasureSpec, count: usize, seed: u64) -> Result<Option<f64>> {
    let n = mu.dim();
    for a in 1..=2 * (n + 1) {
        let r = mplus_check(mu, a as f64, count, seed)?;
        if !r.divergent && r.value.is_finite() {
            return Ok(Some(a as f64));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn axis(h: f64) -> CPoint {
        CPoint::on_axis(1, h)
    }

    #[test]
    fn schema_round_trip() {
        let src = r#"{"type":"density","dim":1,"family":"rho_power","exponent":-0.5}"#;
        let m = MeasureSpec::from_json(src).unwrap();
        assert_eq!(m, MeasureSpec::rho_power(1, -0.5));
        assert_eq!(m.to_json(), src);
        let src = r#"{"type":"lebesgue","dim":2,"restriction":{"rho_min":0.0,"rho_max":1.0,"max_abs":"inf"}}"#;
        let m = MeasureSpec::from_json(src).unwrap();
        assert_eq!(m.to_json(), src);
        let src = r#"{"type":"atomic","dim":1,"atoms":[{"point":{"zprime":[],"zn":[0.0,1.0]},"weight":1.0}]}"#;
        assert_eq!(MeasureSpec::from_json(src).unwrap().to_json(), src);
    }

    #[test]
    fn schema_errors() {
        for bad in [
            r#"{"type":"density","dim":1,"family":"rho_power"}"#,
            r#"{"type":"blob","dim":1}"#,
            r#"{"type":"atomic","dim":1,"atoms":[{"point":{"zprime":[],"zn":[0.0,1.0]},"weight":-1.0}]}"#,
            r#"{"type":"atomic","dim":2,"atoms":[{"point":{"zprime":[],"zn":[0.0,1.0]},"weight":1.0}]}"#,
            r#"{"type":"lebesgue","dim":1,"colour":3}"#,
            r#"{"type":"lebesgue","dim":0}"#,
            r#"not json"#,
        ] {
            assert!(MeasureSpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn berezin_examples() {
        let i = axis(1.0);
        let b = berezin(&MeasureSpec::unit_atom(i.clone()), &i, 1, 0).unwrap();
        assert!((b.value - 1.0 / (4.0 * PI)).abs() < 1e-16);
        let b = berezin(&MeasureSpec::unit_atom(axis(2.0)), &i, 1, 0).unwrap();
        assert!((b.value - 4.0 / (81.0 * PI)).abs() < 1e-16);
        let b = berezin(&MeasureSpec::lebesgue(1), &axis(0.3), 1000, 1).unwrap();
        assert!(b.agrees_with(1.0, 3.0), "{b:?}");
    }

    #[test]
    fn averaging_examples() {
        let i = axis(1.0);
        let a = averaging(&MeasureSpec::lebesgue(2), &CPoint::on_axis(2, 7.0), 0.5, 1, 0).unwrap();
        assert!((a.value - 1.0).abs() < 1e-12);
        let a = averaging(&MeasureSpec::unit_atom(i.clone()), &i, 1.0, 1, 0).unwrap();
        assert!((a.value - 1.0 / (PI * 2f64.sinh().powi(2))).abs() < 1e-15);
        assert!((a.value - 0.024_198_5).abs() < 1e-9);
        let a = averaging(&MeasureSpec::unit_atom(i), &axis(2.0), 0.3, 1, 0).unwrap();
        assert_eq!(a.value, 0.0);
        assert!(matches!(
            averaging(&MeasureSpec::lebesgue(1), &axis(1.0), 0.0, 1, 0),
            Err(Error::InvalidRadius(_))
        ));
    }

    #[test]
    fn test_function_examples() {
        let i = axis(1.0);
        let f = TestFunction::ResolventPower { dim: 1, alpha: 2.0 };
        assert_eq!(f.eval(&i).unwrap(), Complex64::new(-0.25, 0.0));
        let g = TestFunction::KernelPower {
            a: i.clone(),
            exponent: 2.0,
        };
        assert!((g.eval(&i).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let h = TestFunction::NormalizedKernel { z: i.clone() };
        assert!((h.eval(&i).unwrap().re - 0.5 / PI.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn salpha_examples() {
        let f = TestFunction::ResolventPower { dim: 1, alpha: 2.0 };
        let r = salpha_sup(&f, 2.0, 500, 1).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-12);
        assert!(!r.unbounded_trend);
        let r = salpha_sup(&f, 3.0, 500, 1).unwrap();
        assert!(r.unbounded_trend);
        let r = salpha_sup(&TestFunction::Zero { dim: 1 }, 3.0, 500, 1).unwrap();
        assert_eq!(r.sup, 0.0);
    }
}
