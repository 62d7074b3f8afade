use siegel_bergman::geometry::{rho2, CPoint};
use siegel_bergman::integrate::integrate_u;
use siegel_bergman::kernel::{forelli_rudin_integral, IntegralValue};

const CASES: [(usize, f64, f64); 4] = [(1, 4.0, 0.0), (1, 5.0, 1.0), (1, 6.0, 0.0), (2, 6.0, 0.0)];

fn center(n: usize) -> CPoint {
    CPoint::from_heisenberg(vec![Default::default(); n - 1], 0.5, 2.0).unwrap()
}

fn truth(z: &CPoint, s: f64, t: f64) -> f64 {
    match forelli_rudin_integral(z, s, t).unwrap() {
        IntegralValue::Finite(v) => v,
        IntegralValue::Divergent => panic!("finite case"),
    }
}

fn estimate(z: &CPoint, s: f64, t: f64, count: usize, seed: u64) -> (f64, f64) {
    let r = integrate_u(
        z.dim(),
        |w| w.rho().powf(t) / rho2(z, w).unwrap().norm().powf(s),
        count,
        seed,
    )
    .unwrap();
    (r.value, r.std_error)
}

#[test]
fn mean_over_seeds_is_unbiased() {
    for (n, s, t) in CASES {
        let z = center(n);
        let exact = truth(&z, s, t);
        let runs: Vec<_> = (0..50).map(|k| estimate(&z, s, t, 20_000, 1000 + k)).collect();
        let mean = runs.iter().map(|r| r.0).sum::<f64>() / 50.0;
        let pooled = runs.iter().map(|r| r.1 * r.1).sum::<f64>().sqrt() / 50.0;
        assert!((mean - exact).abs() <= 3.0 * pooled, "n={n} s={s} t={t}: {mean} vs {exact} (pooled {pooled})");
    }
}

#[test]
fn two_sigma_coverage() {
    for (n, s, t) in CASES {
        let z = center(n);
        let exact = truth(&z, s, t);
        let seeds = 300;
        let hits = (0..seeds)
            .filter(|&k| {
                let (v, e) = estimate(&z, s, t, 20_000, 5000 + k);
                (v - exact).abs() <= 2.0 * e
            })
            .count();
        let coverage = hits as f64 / seeds as f64;
        assert!((0.90..=0.99).contains(&coverage), "n={n} s={s} t={t}: coverage {coverage}");
    }
}

#[test]
fn identical_seed_is_bit_identical() {
    let z = center(2);
    let f = |w: &CPoint| 1.0 / rho2(&z, w).unwrap().norm().powi(6);
    let a = integrate_u(2, f, 50_000, 9).unwrap();
    let b = integrate_u(2, f, 50_000, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    let c = integrate_u(2, f, 50_000, 10).unwrap();
    assert_ne!(a.value, c.value);
}
