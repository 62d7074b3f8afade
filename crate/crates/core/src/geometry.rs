//! Coordinates on the Siegel upper half-space and the unit ball.
//!
//! A point of `C^n` is split as `z = (z', z_n)` with `z'` in `C^{n-1}`. The
//! domain is `U = { Im z_n > |z'|^2 }`; its defining function is
//! `rho(z) = Im z_n - |z'|^2` and its polarisation
//! `rho(z, w) = (i/2)(conj(w_n) - z_n) - z' . conj(w')`.
//!
//! The Cayley transform maps the unit ball `B` biholomorphically onto `U`,
//! sending the origin to the base point `(0', i)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported complex dimension (`n!` must fit in a `u64`).
pub const MAX_DIM: usize = 20;

pub(crate) type Coords = SmallVec<[Complex64; 4]>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `a . conj(b)` for equal-length slices.
#[inline]
pub fn hermitian_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
}

#[inline]
fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// A point `(z', z_n)` of `C^n`.
///
/// Any finite point can be represented; operations that need `z` inside the
/// domain check `rho(z) > 0` themselves. Boundary points (`rho = 0`) are
/// reported by [`CPoint::on_boundary`].
#[derive(Clone, PartialEq)]
pub struct CPoint {
    zprime: Coords,
    zn: Complex64,
}

impl CPoint {
    pub fn new<I: IntoIterator<Item = Complex64>>(zprime: I, zn: Complex64) -> Result<Self> {
        let zprime: Coords = zprime.into_iter().collect();
        check_dim(zprime.len() + 1)?;
        if !zn.is_finite() || zprime.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("CPoint"));
        }
        Ok(Self { zprime, zn })
    }

    pub(crate) fn from_parts(zprime: Coords, zn: Complex64) -> Self {
        Self { zprime, zn }
    }

    /// The base point `(0', i)`.
    pub fn base(n: usize) -> Self {
        Self::on_axis(n, 1.0)
    }

    /// `(0', i h)`.
    pub fn on_axis(n: usize, height: f64) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension out of range");
        Self {
            zprime: SmallVec::from_elem(Complex64::new(0.0, 0.0), n - 1),
            zn: Complex64::new(0.0, height),
        }
    }

    /// The point with the given `z'`, `Re z_n = x` and `rho = height`.
    pub fn from_heisenberg<I: IntoIterator<Item = Complex64>>(
        zprime: I,
        x: f64,
        height: f64,
    ) -> Result<Self> {
        let zprime: Coords = zprime.into_iter().collect();
        let lift = norm_sqr(&zprime);
        Self::new(zprime, Complex64::new(x, height + lift))
    }

    pub fn dim(&self) -> usize {
        self.zprime.len() + 1
    }

    pub fn zprime(&self) -> &[Complex64] {
        &self.zprime
    }

    pub fn zn(&self) -> Complex64 {
        self.zn
    }

    pub fn rho(&self) -> f64 {
        rho(self)
    }

    pub fn in_domain(&self) -> bool {
        rho(self) > 0.0
    }

    pub fn on_boundary(&self) -> bool {
        rho(self) == 0.0
    }

    /// Euclidean norm `|z|`.
    pub fn norm(&self) -> f64 {
        (norm_sqr(&self.zprime) + self.zn.norm_sqr()).sqrt()
    }

    /// All `n` coordinates, `z_n` last.
    pub fn coords(&self) -> Coords {
        let mut c = self.zprime.clone();
        c.push(self.zn);
        c
    }
}

impl fmt::Debug for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CPoint({:?}, {})", self.zprime.as_slice(), self.zn)
    }
}

#[derive(Serialize, Deserialize)]
struct CPointRepr {
    zprime: Vec<[f64; 2]>,
    zn: [f64; 2],
}

impl Serialize for CPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CPointRepr {
            zprime: self.zprime.iter().map(|c| [c.re, c.im]).collect(),
            zn: [self.zn.re, self.zn.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CPointRepr::deserialize(d)?;
        CPoint::new(
            repr.zprime.iter().map(|[re, im]| Complex64::new(*re, *im)),
            Complex64::new(repr.zn[0], repr.zn[1]),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// A point of the closed unit ball of `C^n`.
#[derive(Clone, PartialEq)]
pub struct BallPoint {
    coords: Coords,
}

impl BallPoint {
    /// Interior point; rejects `|xi| >= 1`.
    pub fn new<I: IntoIterator<Item = Complex64>>(coords: I) -> Result<Self> {
        let p = Self::new_unchecked(coords)?;
        let norm = p.norm_sqr().sqrt();
        if norm >= 1.0 {
            return Err(Error::OutsideBall { norm });
        }
        Ok(p)
    }

    /// Any finite point; used for boundary points of the ball.
    pub fn new_unchecked<I: IntoIterator<Item = Complex64>>(coords: I) -> Result<Self> {
        let coords: Coords = coords.into_iter().collect();
        check_dim(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("BallPoint"));
        }
        Ok(Self { coords })
    }

    pub(crate) fn from_coords(coords: Coords) -> Self {
        Self { coords }
    }

    pub fn origin(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension out of range");
        Self {
            coords: SmallVec::from_elem(Complex64::new(0.0, 0.0), n),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Last coordinate `xi_n`.
    pub fn last(&self) -> Complex64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl fmt::Debug for BallPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BallPoint({:?})", self.coords.as_slice())
    }
}

impl Serialize for BallPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.coords.iter().map(|c| [c.re, c.im]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BallPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        BallPoint::new_unchecked(v.iter().map(|[re, im]| Complex64::new(*re, *im)))
            .map_err(serde::de::Error::custom)
    }
}

/// `rho(z) = Im z_n - |z'|^2`.
#[inline]
pub fn rho(z: &CPoint) -> f64 {
    z.zn.im - norm_sqr(&z.zprime)
}

/// `rho(z, w) = (i/2)(conj(w_n) - z_n) - z' . conj(w')`.
pub fn rho2(z: &CPoint, w: &CPoint) -> Result<Complex64> {
    same_dim(z, w)?;
    Ok(rho_pair(z, w))
}

/// [`rho2`] without the dimension check.
#[inline]
pub(crate) fn rho_pair(z: &CPoint, w: &CPoint) -> Complex64 {
    let diag = Complex64::new(0.0, 0.5) * (w.zn.conj() - z.zn);
    let cross: f64 = z
        .zprime
        .iter()
        .zip(&w.zprime)
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    let cross_im: f64 = z
        .zprime
        .iter()
        .zip(&w.zprime)
        .map(|(a, b)| (a * b.conj()).im)
        .sum();
    Complex64::new(diag.re - cross, diag.im - cross_im)
}

/// `rho(z, i)` with `i = (0', i)`; equals `(1 - i z_n) / 2`.
#[inline]
pub fn rho_base(z: &CPoint) -> Complex64 {
    Complex64::new(0.0, 0.5) * (-I - z.zn)
}

pub(crate) fn same_dim(z: &CPoint, w: &CPoint) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            actual: w.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_domain(z: &CPoint) -> Result<f64> {
    let r = rho(z);
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::OutsideDomain { rho: r })
    }
}

/// Cayley transform `Phi(xi) = (xi' / (1 + xi_n), i (1 - xi_n) / (1 + xi_n))`.
pub fn cayley(xi: &BallPoint) -> Result<CPoint> {
    let n = xi.dim();
    let xn = xi.last();
    let denom = Complex64::new(1.0, 0.0) + xn;
    if denom.norm_sqr() == 0.0 {
        return Err(Error::CayleyPole);
    }
    let inv = denom.inv();
    let zprime: Coords = xi.coords[..n - 1].iter().map(|c| c * inv).collect();
    let zn = I * (Complex64::new(1.0, 0.0) - xn) * inv;
    Ok(CPoint::from_parts(zprime, zn))
}

/// Inverse Cayley transform `(2i z' / (i + z_n), (i - z_n) / (i + z_n))`.
pub fn cayley_inv(z: &CPoint) -> Result<BallPoint> {
    check_domain(z)?;
    let inv = (I + z.zn).inv();
    let mut coords: Coords = z.zprime.iter().map(|c| 2.0 * I * c * inv).collect();
    coords.push((I - z.zn) * inv);
    Ok(BallPoint::from_coords(coords))
}

/// Real Jacobian of the Cayley transform, `4 / |1 + xi_n|^{2(n+1)}`.
pub fn cayley_jacobian(xi: &BallPoint) -> Result<f64> {
    let d = (Complex64::new(1.0, 0.0) + xi.last()).norm_sqr();
    if d == 0.0 {
        return Err(Error::CayleyPole);
    }
    Ok(4.0 / d.powi(xi.dim() as i32 + 1))
}

/// Real Jacobian of the inverse Cayley transform, `1 / (4 |rho(z, i)|^{2(n+1)})`.
pub fn cayleyinv_jacobian(z: &CPoint) -> Result<f64> {
    check_domain(z)?;
    let d = rho_base(z).norm_sqr();
    Ok(0.25 / d.powi(z.dim() as i32 + 1))
}

/// Non-isotropic dilation `delta_t(u) = (t u', t^2 u_n)`.
pub fn dilation(t: f64, u: &CPoint) -> CPoint {
    CPoint::from_parts(u.zprime.iter().map(|c| c * t).collect(), u.zn * (t * t))
}

/// Heisenberg translation `h_z(u) = (u' - z', u_n - Re z_n - 2i u' . conj(z') + i |z'|^2)`.
pub fn heisenberg_translation(z: &CPoint, u: &CPoint) -> Result<CPoint> {
    same_dim(z, u)?;
    Ok(h_apply(z, u))
}

/// Inverse of [`heisenberg_translation`]:
/// `h_z^{-1}(v) = (v' + z', v_n + Re z_n + 2i v' . conj(z') + i |z'|^2)`.
pub fn heisenberg_translation_inv(z: &CPoint, v: &CPoint) -> Result<CPoint> {
    same_dim(z, v)?;
    Ok(h_inverse(z, v))
}

#[inline]
fn h_apply(z: &CPoint, u: &CPoint) -> CPoint {
    let zprime: Coords = u.zprime.iter().zip(&z.zprime).map(|(a, b)| a - b).collect();
    let cross = hermitian_dot(&u.zprime, &z.zprime);
    let lift = norm_sqr(&z.zprime);
    let zn = u.zn - z.zn.re - 2.0 * I * cross + I * lift;
    CPoint::from_parts(zprime, zn)
}

#[inline]
fn h_inverse(z: &CPoint, v: &CPoint) -> CPoint {
    let zprime: Coords = v.zprime.iter().zip(&z.zprime).map(|(a, b)| a + b).collect();
    let cross = hermitian_dot(&v.zprime, &z.zprime);
    let lift = norm_sqr(&z.zprime);
    let zn = v.zn + z.zn.re + 2.0 * I * cross + I * lift;
    CPoint::from_parts(zprime, zn)
}

/// The automorphism `sigma_z = delta_{rho(z)^{-1/2}} o h_z`, which sends `z`
/// to the base point and rescales `rho(., .)` by `1 / rho(z)`.
#[derive(Clone, Debug)]
pub struct SigmaMap {
    center: CPoint,
    height: f64,
    scale: f64,
}

impl SigmaMap {
    pub fn new(center: &CPoint) -> Result<Self> {
        let height = check_domain(center)?;
        Ok(Self {
            center: center.clone(),
            height,
            scale: height.sqrt(),
        })
    }

    pub fn center(&self) -> &CPoint {
        &self.center
    }

    /// `rho(center)`.
    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn apply(&self, u: &CPoint) -> Result<CPoint> {
        same_dim(&self.center, u)?;
        Ok(self.apply_unchecked(u))
    }

    pub fn inverse(&self, v: &CPoint) -> Result<CPoint> {
        same_dim(&self.center, v)?;
        Ok(self.inverse_unchecked(v))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, u: &CPoint) -> CPoint {
        dilation(1.0 / self.scale, &h_apply(&self.center, u))
    }

    #[inline]
    pub(crate) fn inverse_unchecked(&self, v: &CPoint) -> CPoint {
        h_inverse(&self.center, &dilation(self.scale, v))
    }
}

/// `sigma_z(u)`; requires `z, u` in the domain.
pub fn sigma(z: &CPoint, u: &CPoint) -> Result<CPoint> {
    check_domain(u)?;
    SigmaMap::new(z)?.apply(u)
}

/// `sigma_z^{-1}(v)`; requires `z, v` in the domain.
pub fn sigma_inv(z: &CPoint, v: &CPoint) -> Result<CPoint> {
    check_domain(v)?;
    SigmaMap::new(z)?.inverse(v)
}

/// Ball automorphism
/// `phi_xi(eta) = (xi - P eta - sqrt(1 - |xi|^2) Q eta) / (1 - eta . conj(xi))`
/// where `P` projects onto `span(xi)` and `Q = I - P`.
pub fn moebius(xi: &BallPoint, eta: &BallPoint) -> Result<BallPoint> {
    if xi.dim() != eta.dim() {
        return Err(Error::DimensionMismatch {
            expected: xi.dim(),
            actual: eta.dim(),
        });
    }
    let m = xi.norm_sqr();
    if m >= 1.0 {
        return Err(Error::OutsideBall { norm: m.sqrt() });
    }
    let eta_norm = eta.norm();
    if eta_norm > 1.0 {
        return Err(Error::OutsideBall { norm: eta_norm });
    }
    let a = hermitian_dot(&eta.coords, &xi.coords);
    let s = (1.0 - m).sqrt();
    let denom_inv = (Complex64::new(1.0, 0.0) - a).inv();
    let coords: Coords = if m == 0.0 {
        eta.coords.iter().map(|e| -e * denom_inv).collect()
    } else {
        let ratio = a / m;
        xi.coords
            .iter()
            .zip(&eta.coords)
            .map(|(x, e)| {
                let p = ratio * x;
                let q = e - p;
                (x - p - s * q) * denom_inv
            })
            .collect()
    };
    Ok(BallPoint::from_coords(coords))
}
