//! Bergman metric, metric balls and r-lattices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cayley, cayley_inv, check_dim, check_domain, hermitian_dot, moebius, rho_pair, same_dim,
    BallPoint, CPoint, Coords, SigmaMap,
};
use crate::integrate::{ball_point_with_norm_sqr, unit_direction, RegionSpec};
use crate::kernel::BOUND_SLACK;
use crate::special::factorial;

/// `atanh(x) = 1/2 log((1+x)/(1-x))` with `x` clamped to `1 - 1e-15`.
pub fn atanh_clamped(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0 - 1e-15);
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

/// Bergman distance `beta(z, w) = atanh sqrt(1 - rho(z) rho(w) / |rho(z, w)|^2)`.
///
/// Evaluated as `log((1 + x) / sqrt(q))` with `q = rho(z) rho(w) / |rho(z, w)|^2`
/// and `x^2 = 1 - q` obtained from coordinate differences, so neither nearby
/// nor distant pairs lose precision. Exactly symmetric.
pub fn bergman_distance(z: &CPoint, w: &CPoint) -> Result<f64> {
    same_dim(z, w)?;
    let rz = check_domain(z)?;
    let rw = check_domain(w)?;
    Ok(distance_unchecked(z, w, rz, rw))
}

#[inline]
pub(crate) fn distance_unchecked(z: &CPoint, w: &CPoint, rz: f64, rw: f64) -> f64 {
    let d = rho_pair(z, w).norm_sqr();
    let gap = 0.5 * (separation(z, w, rz) + separation(w, z, rw));
    let x = (gap / (4.0 * d)).sqrt().min(1.0);
    let q = (rz * rw / d).min(1.0);
    ((1.0 + x).ln() - 0.5 * q.ln()).max(0.0)
}

/// `4 (|rho(z, w)|^2 - rho(z) rho(w))`, written without cancellation:
/// `|dn - 2i dz' . conj(z')|^2 + 4 rho(z) |dz'|^2` with `d = w - z`.
#[inline]
fn separation(z: &CPoint, w: &CPoint, rz: f64) -> f64 {
    let dp: Coords = w
        .zprime()
        .iter()
        .zip(z.zprime())
        .map(|(a, b)| a - b)
        .collect();
    let dn = w.zn() - z.zn() - Complex64::new(0.0, 2.0) * hermitian_dot(&dp, z.zprime());
    let dp2: f64 = dp.iter().map(|c| c.norm_sqr()).sum();
    dn.norm_sqr() + 4.0 * rz * dp2
}

/// Bergman distance through the ball model:
/// `atanh |phi_{Phi^{-1} z}(Phi^{-1} w)|`.
pub fn bergman_distance_ball(z: &CPoint, w: &CPoint) -> Result<f64> {
    same_dim(z, w)?;
    let xi = cayley_inv(z)?;
    let eta = cayley_inv(w)?;
    Ok(atanh_clamped(moebius(&xi, &eta)?.norm()))
}

/// `|D(z, r)| = 4 pi^n / n! * tanh^{2n} r / (1 - tanh^2 r)^{n+1} * rho(z)^{n+1}`,
/// evaluated as `4 pi^n / n! * sinh^{2n} r * cosh^2 r * rho(z)^{n+1}`.
pub fn ball_volume(z: &CPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    let rz = check_domain(z)?;
    Ok(volume_unchecked(z.dim(), rz, r))
}

fn volume_unchecked(n: usize, rz: f64, r: f64) -> f64 {
    let ni = n as i32;
    4.0 * PI.powi(ni) / factorial(n).expect("dimension checked") as f64
        * r.sinh().powi(2 * ni)
        * r.cosh().powi(2)
        * rz.powi(ni + 1)
}

/// The Bergman ball `D(center, radius) = { w : beta(center, w) < radius }`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BergmanBall {
    center: CPoint,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallRepr {
    center: CPoint,
    radius: f64,
}

impl<'de> Deserialize<'de> for BergmanBall {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BallRepr::deserialize(d)?;
        BergmanBall::new(r.center, r.radius).map_err(serde::de::Error::custom)
    }
}

impl BergmanBall {
    pub fn new(center: CPoint, radius: f64) -> Result<Self> {
        check_domain(&center)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &CPoint {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        volume_unchecked(self.center.dim(), self.center.rho(), self.radius)
    }

    /// `beta(center, w) < radius`; points outside `U` are never contained.
    pub fn contains(&self, w: &CPoint) -> bool {
        if w.dim() != self.center.dim() {
            return false;
        }
        let rw = w.rho();
        rw > 0.0 && distance_unchecked(&self.center, w, self.center.rho(), rw) < self.radius
    }

    /// One Lebesgue-uniform point of the ball.
    ///
    /// After `sigma_center` the ball becomes `D(i, r)`. Slicing that set at
    /// fixed `w'` gives the Euclidean disc in the `w_n` plane with center
    /// `i cosh 2r` and squared radius `sinh^2 2r - 4 cosh^2 r |w'|^2`, so
    /// `|w'|^2 / sinh^2 r` follows `Beta(n-1, 2)` and the slice is a uniform
    /// disc draw. `sigma^{-1}` has constant Jacobian and keeps uniformity.
    pub(crate) fn sample_one<R: Rng>(&self, rng: &mut R) -> CPoint {
        let n = self.center.dim();
        let r = self.radius;
        let s = (2.0 * r).sinh();
        let t = if n == 1 {
            0.0
        } else {
            Beta::new(n as f64 - 1.0, 2.0)
                .expect("valid parameters")
                .sample(rng)
        };
        let zprime: Coords = if n == 1 {
            Coords::new()
        } else {
            let len = r.sinh() * t.sqrt();
            unit_direction(n - 1, rng)
                .into_iter()
                .map(|c| c * len)
                .collect()
        };
        let disc = s * (1.0 - t).max(0.0).sqrt() * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        let zn = Complex64::new(disc * theta.cos(), (2.0 * r).cosh() + disc * theta.sin());
        let u = CPoint::from_parts(zprime, zn);
        SigmaMap::new(&self.center)
            .expect("center lies in U")
            .inverse_unchecked(&u)
    }

    /// `count` Lebesgue-uniform points; deterministic per seed.
    pub fn sample_uniform(&self, count: usize, seed: u64) -> Vec<CPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng)).collect()
    }
}

pub fn ball_contains(ball: &BergmanBall, w: &CPoint) -> bool {
    ball.contains(w)
}

pub fn sample_ball_uniform(ball: &BergmanBall, count: usize, seed: u64) -> Vec<CPoint> {
    ball.sample_uniform(count, seed)
}

/// Two-sided estimate `(1 - tanh r)/(1 + tanh r) <= |rho(z,u)| / |rho(z,v)| <= (1 + tanh r)/(1 - tanh r)`
/// for `beta(u, v) <= r`.
pub fn quasi_invariance_check(z: &CPoint, u: &CPoint, v: &CPoint, r: f64) -> Result<bool> {
    let (ratio, lo, hi) = quasi_invariance_sides(z, u, v, r)?;
    Ok(ratio >= lo * (1.0 - BOUND_SLACK) && ratio <= hi * (1.0 + BOUND_SLACK))
}

pub(crate) fn quasi_invariance_sides(
    z: &CPoint,
    u: &CPoint,
    v: &CPoint,
    r: f64,
) -> Result<(f64, f64, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    same_dim(z, u)?;
    check_domain(z)?;
    let d = bergman_distance(u, v)?;
    if d > r * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "beta(u, v) = {d} exceeds r = {r}"
        )));
    }
    let ratio = rho_pair(z, u).norm() / rho_pair(z, v).norm();
    let t = r.tanh();
    Ok((ratio, (1.0 - t) / (1.0 + t), (1.0 + t) / (1.0 - t)))
}

/// Height range of `Q_j = closure D(i, j)`:
/// `(1 - tanh^2 j)/4 <= rho(w) <= 4/(1 - tanh^2 j)`.
pub fn qj_rho_bounds(j: f64) -> (f64, f64) {
    let s = 1.0 - j.tanh().powi(2);
    (s / 4.0, 4.0 / s)
}

/// Covering evidence from fresh probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub probes: usize,
    /// Probes farther than `r` from every center.
    pub failures: usize,
    pub max_nearest_distance: f64,
}

/// An `r`-separated family of centers covering a bounded region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub centers: Vec<CPoint>,
    pub r: f64,
    pub multiplicity_estimate: usize,
    pub regions: Vec<RegionSpec>,
    pub covering: CoveringReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Stop the greedy pass after this many consecutive rejected candidates.
    pub patience: usize,
    pub max_candidates: usize,
    /// Probes per repair round and for the final certificate.
    pub probes: usize,
    pub repair_rounds: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            patience: 2_000,
            max_candidates: 200_000,
            probes: 100_000,
            repair_rounds: 2,
        }
    }
}

const PRIMES: [u32; 41] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Maps a point of the unit cube to a Bergman-uniform point of a region.
enum RegionMap<'a> {
    Ball {
        region: &'a RegionSpec,
        ball: &'a BergmanBall,
        sigma: SigmaMap,
    },
    Box {
        region: &'a RegionSpec,
        n: usize,
        lo_pow: f64,
        hi_pow: f64,
    },
}

impl<'a> RegionMap<'a> {
    fn new(n: usize, region: &'a RegionSpec) -> Result<Self> {
        check_dim(n)?;
        region.validate()?;
        region.check_dim(n)?;
        if let Some(ball) = &region.ball {
            return Ok(RegionMap::Ball {
                region,
                ball,
                sigma: SigmaMap::new(ball.center())?,
            });
        }
        if !region.is_bounded() {
            return Err(Error::UnboundedRegion);
        }
        let top = region.rho_max.min(region.max_abs);
        let nf = n as f64;
        Ok(RegionMap::Box {
            region,
            n,
            lo_pow: region.rho_min.powf(-nf),
            hi_pow: top.powf(-nf),
        })
    }

    fn dims(n: usize) -> usize {
        2 * n + 1
    }

    fn map(&self, u: &[f64]) -> Option<CPoint> {
        match self {
            RegionMap::Ball {
                region,
                ball,
                sigma,
            } => {
                let n = ball.center().dim();
                // hyperbolic-uniform radius: v = sinh^2(r) u^{1/n}, |xi|^2 = v / (1 + v)
                let v = ball.radius().sinh().powi(2) * u[0].powf(1.0 / n as f64);
                let s = v / (1.0 + v);
                let mut dir = Coords::new();
                for k in 0..n {
                    let (a, b) = box_muller(u[1 + 2 * k], u[2 + 2 * k]);
                    dir.push(Complex64::new(a, b));
                }
                let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return None;
                }
                let scale = s.sqrt() / norm;
                let xi = BallPoint::from_coords(dir.into_iter().map(|c| c * scale).collect());
                let w = sigma.inverse_unchecked(&cayley(&xi).ok()?);
                region.contains(&w).then_some(w)
            }
            RegionMap::Box {
                region,
                n,
                lo_pow,
                hi_pow,
            } => {
                let nf = *n as f64;
                let m = region.max_abs;
                let rho = (lo_pow - u[0] * (lo_pow - hi_pow)).powf(-1.0 / nf);
                let x = m * (2.0 * u[1] - 1.0);
                let zp: Coords = (0..n - 1)
                    .map(|k| {
                        Complex64::new(m * (2.0 * u[2 + 2 * k] - 1.0), m * (2.0 * u[3 + 2 * k] - 1.0))
                    })
                    .collect();
                let w = CPoint::from_heisenberg(zp, x, rho).ok()?;
                region.contains(&w).then_some(w)
            }
        }
    }
}

fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let t = 2.0 * PI * u2;
    (r * t.cos(), r * t.sin())
}

struct Centers {
    points: Vec<CPoint>,
    heights: Vec<f64>,
}

impl Centers {
    fn nearest(&self, w: &CPoint) -> f64 {
        let rw = w.rho();
        self.points
            .iter()
            .zip(&self.heights)
            .map(|(c, rc)| distance_unchecked(c, w, *rc, rw))
            .fold(f64::INFINITY, f64::min)
    }

    fn is_separated(&self, w: &CPoint, r: f64) -> bool {
        let rw = w.rho();
        self.points
            .iter()
            .zip(&self.heights)
            .all(|(c, rc)| distance_unchecked(c, w, *rc, rw) >= r)
    }

    fn count_within(&self, w: &CPoint, r: f64) -> usize {
        let rw = w.rho();
        self.points
            .iter()
            .zip(&self.heights)
            .filter(|(c, rc)| distance_unchecked(c, w, **rc, rw) < r)
            .count()
    }

    fn push(&mut self, w: CPoint) {
        self.heights.push(w.rho());
        self.points.push(w);
    }
}

/// Greedy maximal `r`-separated subset of a low-discrepancy stream of `region`.
pub fn build_lattice(n: usize, region: &RegionSpec, r: f64, seed: u64) -> Result<Lattice> {
    build_lattice_multi(n, std::slice::from_ref(region), r, seed, &LatticeConfig::default())
}

/// [`build_lattice`] over a union of regions.
///
/// The greedy pass runs over a Halton stream with a seed-dependent
/// Cranley-Patterson shift. Uncovered probes found in the repair rounds are
/// added as centers (they are `r`-separated by construction); the covering
/// certificate and the multiplicity come from a final, independent probe set.
pub fn build_lattice_multi(
    n: usize,
    regions: &[RegionSpec],
    r: f64,
    seed: u64,
    config: &LatticeConfig,
) -> Result<Lattice> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    if regions.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let maps = regions
        .iter()
        .map(|reg| RegionMap::new(n, reg))
        .collect::<Result<Vec<_>>>()?;
    let dims = RegionMap::dims(n);
    let mut shift_rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| shift_rng.random()).collect();
    let mut centers = Centers {
        points: Vec::new(),
        heights: Vec::new(),
    };
    let mut u = vec![0.0; dims];
    for map in &maps {
        let mut misses = 0;
        for i in 1..=config.max_candidates as u64 {
            for (d, slot) in u.iter_mut().enumerate() {
                *slot = (radical_inverse(i, PRIMES[d]) + shift[d]).fract();
            }
            let Some(w) = map.map(&u) else { continue };
            if centers.is_separated(&w, r) {
                centers.push(w);
                misses = 0;
            } else {
                misses += 1;
                if misses >= config.patience {
                    break;
                }
            }
        }
    }
    if centers.points.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let probes_per_region = (config.probes / maps.len()).max(1);
    let draw_probes = |round: u64| -> Vec<CPoint> {
        let mut out = Vec::with_capacity(probes_per_region * maps.len());
        for (k, map) in maps.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
            rng.set_stream((round << 16) | k as u64);
            let mut got = 0;
            let mut tries = 0;
            while got < probes_per_region && tries < 50 * probes_per_region {
                tries += 1;
                let cube: Vec<f64> = (0..dims).map(|_| rng.random()).collect();
                if let Some(w) = map.map(&cube) {
                    out.push(w);
                    got += 1;
                }
            }
        }
        out
    };
    for round in 0..config.repair_rounds as u64 {
        let mut added = 0;
        for w in draw_probes(round + 1) {
            if centers.is_separated(&w, r) {
                centers.push(w);
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
    }
    let probes = draw_probes(0);
    let mut failures = 0;
    let mut max_nearest: f64 = 0.0;
    let mut multiplicity = 0;
    for w in &probes {
        let d = centers.nearest(w);
        if d >= r {
            failures += 1;
        }
        max_nearest = max_nearest.max(d);
        multiplicity = multiplicity.max(centers.count_within(w, 2.0 * r));
    }
    Ok(Lattice {
        centers: centers.points,
        r,
        multiplicity_estimate: multiplicity,
        regions: regions.to_vec(),
        covering: CoveringReport {
            probes: probes.len(),
            failures,
            max_nearest_distance: max_nearest,
        },
    })
}

/// Random point of the closed ball `D(center, r)` in the ball model, used by
/// the exhaustion checks.
pub(crate) fn random_in_ball_model<R: Rng>(center: &CPoint, r: f64, rng: &mut R) -> CPoint {
    let n = center.dim();
    let big_r = r.tanh();
    let s = big_r * big_r * rng.random::<f64>().powf(1.0 / n as f64);
    let xi = ball_point_with_norm_sqr(n, s, rng);
    let u = cayley(&xi).expect("interior point");
    SigmaMap::new(center)
        .expect("center lies in U")
        .inverse_unchecked(&u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(h: f64) -> CPoint {
        CPoint::on_axis(1, h)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(bergman_distance(&axis(1.0), &axis(1.0)).unwrap(), 0.0);
        let d = bergman_distance(&axis(1.0), &axis(2.0)).unwrap();
        assert!((d - 0.5 * 2f64.ln()).abs() < 1e-15);
        let b = bergman_distance_ball(&axis(1.0), &axis(2.0)).unwrap();
        assert!((b - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn volume_examples() {
        let v = ball_volume(&axis(1.0), 1.0).unwrap();
        assert!((v - PI * 2f64.sinh().powi(2)).abs() < 1e-12);
        assert!((v - 41.324_875_5).abs() < 1e-6);
        let v2 = ball_volume(&axis(2.0), 1.0).unwrap();
        assert!((v2 - 4.0 * v).abs() < 1e-12);
        assert_eq!(ball_volume(&axis(1.0), 0.0), Err(Error::InvalidRadius(0.0)));
    }

    #[test]
    fn contains_examples() {
        let b = BergmanBall::new(axis(1.0), 1.0).unwrap();
        assert!(b.contains(&axis(1.0)));
        assert!(!BergmanBall::new(axis(1.0), 0.3).unwrap().contains(&axis(2.0)));
        assert!(BergmanBall::new(axis(1.0), 0.35).unwrap().contains(&axis(2.0)));
    }

    #[test]
    fn uniform_samples_stay_inside_and_repeat() {
        for n in 1..=3 {
            let c = CPoint::from_heisenberg(
                vec![Complex64::new(0.3, -0.2); n - 1],
                0.7,
                2.5,
            )
            .unwrap();
            let b = BergmanBall::new(c, 1.3).unwrap();
            let a = b.sample_uniform(500, 4);
            assert!(a.iter().all(|w| b.contains(w) || bergman_distance(b.center(), w).unwrap() < 1.3 + 1e-9));
            assert_eq!(a, b.sample_uniform(500, 4));
        }
    }

    #[test]
    fn qj_bounds_at_zero() {
        assert_eq!(qj_rho_bounds(0.0), (0.25, 4.0));
    }

    #[test]
    fn quasi_invariance_precondition() {
        let r = quasi_invariance_check(&axis(1.0), &axis(1.0), &axis(100.0), 0.5);
        assert!(matches!(r, Err(Error::Precondition(_))));
        assert!(quasi_invariance_check(&axis(3.0), &axis(1.0), &axis(1.0), 0.5).unwrap());
    }

    #[test]
    fn tiny_ball_gives_one_center() {
        let region = RegionSpec::from_ball(BergmanBall::new(axis(1.0), 0.1).unwrap());
        let lat = build_lattice(1, &region, 1.0, 3).unwrap();
        assert_eq!(lat.centers.len(), 1);
        assert_eq!(lat.covering.failures, 0);
    }

    #[test]
    fn unbounded_region_rejected() {
        assert_eq!(
            build_lattice(1, &RegionSpec::full(), 1.0, 1).unwrap_err(),
            Error::UnboundedRegion
        );
    }
}
