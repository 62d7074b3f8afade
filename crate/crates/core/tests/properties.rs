use proptest::prelude::*;
use siegel_bergman::carleson::{bridge_constant, carleson_condition_b_integral};
use siegel_bergman::geometry::{
    cayley, cayley_inv, hermitian_dot, rho2, sigma, sigma_inv, BallPoint, CPoint,
};
use siegel_bergman::kernel::bergman_kernel;
use siegel_bergman::measures::{averaging, berezin, Atom, DensityFamily};
use siegel_bergman::metric::{bergman_distance, bergman_distance_ball, BergmanBall};
use siegel_bergman::{Complex64, MeasureSpec, RegionSpec};

fn rel(a: Complex64, b: Complex64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn c() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

/// Points with `rho` in `[e^-4, e^4]`, `|Re z_n| <= 5`, `|z'| <= 2 sqrt(2)`.
fn point(n: usize) -> impl Strategy<Value = CPoint> {
    (
        prop::collection::vec(c(), n - 1),
        -5.0..5.0f64,
        -4.0..4.0f64,
    )
        .prop_map(|(zp, re, lh)| CPoint::from_heisenberg(zp, re, lh.exp()).unwrap())
}

fn pair() -> impl Strategy<Value = (CPoint, CPoint)> {
    (1usize..=3).prop_flat_map(|n| (point(n), point(n)))
}

fn triple() -> impl Strategy<Value = (CPoint, CPoint, CPoint)> {
    (1usize..=3).prop_flat_map(|n| (point(n), point(n), point(n)))
}

/// Ball points with `|xi| <= 0.99`.
fn ball_point(n: usize) -> impl Strategy<Value = BallPoint> {
    (prop::collection::vec(c(), n), 0.0..0.99f64).prop_map(|(v, t)| {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        BallPoint::new(v.into_iter().map(|x| x * (t / norm))).unwrap()
    })
}

fn ball_pair() -> impl Strategy<Value = (BallPoint, BallPoint)> {
    (1usize..=3).prop_flat_map(|n| (ball_point(n), ball_point(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rho2_is_hermitian((z, w) in pair()) {
        prop_assert_eq!(rho2(&z, &w).unwrap(), rho2(&w, &z).unwrap().conj());
    }

    #[test]
    fn rho2_at_base_point_is_half_distance_to_minus_i(z in (1usize..=3).prop_flat_map(point)) {
        let i = CPoint::base(z.dim());
        let lhs = 2.0 * rho2(&z, &i).unwrap().norm();
        let rhs = (z.zn() + Complex64::i()).norm();
        prop_assert!((lhs - rhs).abs() <= 1e-15 * rhs, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn cayley_pulls_rho2_back((xi, eta) in ball_pair()) {
        let z = cayley(&xi).unwrap();
        let w = cayley(&eta).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let expected = (one - hermitian_dot(xi.coords(), eta.coords()))
            / ((one + xi.last()) * (one + eta.last().conj()));
        let got = rho2(&z, &w).unwrap();
        prop_assert!(rel(got, expected) <= 1e-12, "{} vs {}", got, expected);
    }

    #[test]
    fn cayley_inverse_inner_product((z, w) in pair()) {
        let i = CPoint::base(z.dim());
        let xi = cayley_inv(&z).unwrap();
        let eta = cayley_inv(&w).unwrap();
        let lhs = Complex64::new(1.0, 0.0) - hermitian_dot(xi.coords(), eta.coords());
        let rhs = rho2(&z, &w).unwrap() / (rho2(&z, &i).unwrap() * rho2(&i, &w).unwrap());
        prop_assert!(rel(lhs, rhs) <= 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn cayley_round_trip(z in (1usize..=3).prop_flat_map(point)) {
        let back = cayley(&cayley_inv(&z).unwrap()).unwrap();
        let scale = z.norm().max(1.0);
        for (a, b) in z.coords().iter().zip(back.coords().iter()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn sigma_centers_and_inverts((z, u) in pair()) {
        let i = CPoint::base(z.dim());
        let at_center = sigma(&z, &z).unwrap();
        for (a, b) in at_center.coords().iter().zip(i.coords().iter()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
        let v = sigma(&z, &u).unwrap();
        prop_assert!(v.in_domain());
        let back = sigma_inv(&z, &v).unwrap();
        let scale = u.norm().max(1.0);
        for (a, b) in u.coords().iter().zip(back.coords().iter()) {
            prop_assert!((a - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn kernel_transformation_law((z, w) in pair()) {
        let n = z.dim() as i32;
        let i = CPoint::base(z.dim());
        let lhs = bergman_kernel(&z, &w).unwrap();
        let rhs = bergman_kernel(&i, &sigma(&z, &w).unwrap()).unwrap() * z.rho().powi(-n - 1);
        prop_assert!(rel(lhs, rhs) <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn distance_is_symmetric_and_routes_agree((z, w) in pair()) {
        let b = bergman_distance(&z, &w).unwrap();
        prop_assert_eq!(b, bergman_distance(&w, &z).unwrap());
        prop_assert!(b >= 0.0);
        let ball = bergman_distance_ball(&z, &w).unwrap();
        prop_assert!((b - ball).abs() <= 1e-10 * b.max(1.0), "{} vs {}", b, ball);
    }

    #[test]
    fn triangle_inequality((z, u, w) in triple()) {
        let d = bergman_distance(&z, &w).unwrap();
        let via = bergman_distance(&z, &u).unwrap() + bergman_distance(&u, &w).unwrap();
        prop_assert!(d <= via + 1e-12 * via.max(1.0), "{} > {}", d, via);
    }

    #[test]
    fn ball_samples_stay_inside(z in (1usize..=3).prop_flat_map(point), r in 0.05..3.0f64, seed in any::<u64>()) {
        let ball = BergmanBall::new(z, r).unwrap();
        for w in ball.sample_uniform(64, seed) {
            prop_assert!(ball.contains(&w));
        }
    }

    #[test]
    fn berezin_of_atoms_matches_condition_b(
        (a, atoms) in (1usize..=2).prop_flat_map(|n| (
            point(n),
            prop::collection::vec((point(n), 0.01..10.0f64), 0..6),
        ))
    ) {
        let n = a.dim();
        let mu = MeasureSpec::Atomic {
            dim: n,
            atoms: atoms.into_iter().map(|(point, weight)| Atom { point, weight }).collect(),
        };
        let b = berezin(&mu, &a, 1, 0).unwrap().value;
        let cb = carleson_condition_b_integral(&mu, &a, 1, 0).unwrap().value;
        let scaled = cb / bridge_constant(n);
        prop_assert!((b - scaled).abs() <= 1e-12 * b.abs().max(scaled.abs()), "{} vs {}", b, scaled);
    }

    #[test]
    fn lebesgue_averaging_is_one(z in (1usize..=3).prop_flat_map(point), r in 0.05..3.0f64) {
        let mu = MeasureSpec::Lebesgue { dim: z.dim(), restriction: None };
        let a = averaging(&mu, &z, r, 16, 0).unwrap();
        prop_assert!((a.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn measure_json_round_trips(
        n in 1usize..=3,
        kind in 0usize..4,
        e in -0.9..3.0f64,
        rho_max in prop::option::of(1.0..100.0f64),
    ) {
        let restriction = rho_max.map(|m| RegionSpec::new(0.0, m, f64::INFINITY).unwrap());
        let mu = match kind {
            0 => MeasureSpec::Atomic {
                dim: n,
                atoms: vec![Atom { point: CPoint::on_axis(n, 1.0 + e.abs()), weight: 0.5 }],
            },
            1 => MeasureSpec::Density { dim: n, family: DensityFamily::RhoPower { exponent: e }, restriction },
            2 => MeasureSpec::Density { dim: n, family: DensityFamily::Constant { scale: e.abs() + 0.1 }, restriction },
            _ => MeasureSpec::Lebesgue { dim: n, restriction },
        };
        let text = serde_json::to_string(&mu).unwrap();
        let back: MeasureSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &mu);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
