mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;

use common::{factorial, integrate, integrate_2d};
use volrat::brascamp_lieb::{
    bl_ratio, circumscribed_body, cone_radial_integral, cone_section_formula, cone_section_integral, lift_to_cone,
    reverse_isoperimetric_constant, simplex_volume_bound, verify_decomposition, BLSystem, Density1D,
};
use volrat::measures::{isoperimetric_quotient, polytope_volume};
use volrat::{bodies, random, Error, McParams};

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_vec(xs.to_vec())
}

fn square_system() -> BLSystem {
    BLSystem::new(
        2,
        vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])],
        vec![0.5; 4],
    )
    .unwrap()
}

fn triangle_system() -> BLSystem {
    let u = (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            v(&[t.cos(), t.sin()])
        })
        .collect();
    BLSystem::new(2, u, vec![2.0 / 3.0; 3]).unwrap()
}

#[test]
fn residual_reports() {
    let r = verify_decomposition(&BLSystem::orthonormal(3));
    assert_eq!((r.frobenius, r.trace_gap), (0.0, 0.0));
    assert!((r.barycenter - 3f64.sqrt()).abs() < 1e-15);
    let r = verify_decomposition(&square_system());
    assert!(r.frobenius < 1e-15 && r.trace_gap < 1e-15 && r.barycenter < 1e-15);
    let mut s = square_system();
    s.weights = vec![0.51; 4];
    assert!((verify_decomposition(&s).trace_gap - 0.04).abs() < 1e-12);
    assert!(s.validate().is_err());
}

#[test]
fn square_indicator_matches_quadrature() {
    // The integrand is the indicator of [-1,1]^2; panels split at ±1 integrate it exactly.
    let lhs = integrate_2d(
        |x, y| if x.abs() <= 1.0 && y.abs() <= 1.0 { 1.0 } else { 0.0 },
        -2.0,
        2.0,
        4,
        4,
    );
    let quad = lhs / 2f64.powf(0.5 * 4.0);
    assert!((quad - 1.0).abs() < 1e-12);
    let f = vec![Density1D::Indicator { a: -1.0, b: 1.0 }; 4];
    let e = bl_ratio(&square_system(), &f, &McParams::new(400_000, 3)).unwrap();
    assert!(e.within(quad, 3.0), "{e}");
}

/// Length of the chord `{y : |<u_i, (x, y)>| <= 1 for all i}`.
fn hexagon_chord(u: &[DVector<f64>], x: f64) -> f64 {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for w in u {
        if w[1].abs() < 1e-14 {
            if (w[0] * x).abs() > 1.0 {
                return 0.0;
            }
            continue;
        }
        let a = (-1.0 - w[0] * x) / w[1];
        let b = (1.0 - w[0] * x) / w[1];
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (hi - lo).max(0.0)
}

#[test]
fn triangle_indicator_is_strict() {
    // Hexagon with vertices over x = -1, 0, 1: the chord is linear between them.
    let s = triangle_system();
    let area = integrate(|x| hexagon_chord(&s.vectors, x), -1.0, 1.0, 4, 8);
    assert!((area - 2.0 * 3f64.sqrt()).abs() < 1e-10, "{area}");
    let quad = area / 4.0;
    let f = vec![Density1D::Indicator { a: -1.0, b: 1.0 }; 3];
    let e = bl_ratio(&s, &f, &McParams::new(400_000, 5)).unwrap();
    assert!(e.within(quad, 3.0), "{e} vs {quad}");
    assert!(e.value + 3.0 * e.std_error < 1.0);
}

#[test]
fn equality_cases() {
    let mc = McParams::new(400_000, 7);
    let mut rng = random::rng(2);
    let fs: Vec<Density1D> = (0..3).map(|_| random::random_density(&mut rng)).collect();
    let e = bl_ratio(&BLSystem::orthonormal(3), &fs, &mc).unwrap();
    assert!(e.within(1.0, 3.0), "{e}");

    for d in 2..=3 {
        let (u, c) = random::random_decomposition(&mut rng, d, 2 * d, false);
        let s = BLSystem::new(d, u, c).unwrap();
        let g = vec![Density1D::Gaussian { sigma: 1.0 }; s.len()];
        let e = bl_ratio(&s, &g, &mc).unwrap();
        assert!(e.within(1.0, 3.0), "{e}");
    }
}

#[test]
fn random_systems_obey_the_inequality() {
    let mc = McParams::new(200_000, 0);
    for k in 0..50u64 {
        let mut rng = random::stream(1000, k);
        let d = 2 + (k % 2) as usize;
        let m = rng.random_range(d..=3 * d);
        let (u, c) = random::random_decomposition(&mut rng, d, m, k % 3 == 0);
        let s = BLSystem::new(d, u, c).unwrap();
        let fs: Vec<Density1D> = (0..s.len()).map(|_| random::random_density(&mut rng)).collect();
        let e = bl_ratio(&s, &fs, &McParams { seed: k, ..mc }).unwrap();
        assert!(e.value <= 1.0 + 3.0 * e.std_error, "system {k}: {e}");
    }
}

#[test]
fn invalid_inputs() {
    let s = square_system();
    let mc = McParams::new(1000, 0);
    assert!(bl_ratio(&s, &[Density1D::Exponential], &mc).is_err());
    let bad = vec![Density1D::Indicator { a: 1.0, b: 1.0 }; 4];
    assert!(matches!(bl_ratio(&s, &bad, &mc), Err(Error::ZeroIntegral)));
    let bad = vec![Density1D::Gaussian { sigma: f64::INFINITY }; 4];
    assert!(matches!(bl_ratio(&s, &bad, &mc), Err(Error::NonIntegrableDensity(_))));
}

#[test]
fn lifting_fixtures() {
    let s = BLSystem::new(1, vec![v(&[1.0]), v(&[-1.0])], vec![0.5, 0.5]).unwrap();
    let l = lift_to_cone(&s).unwrap();
    let h = 0.5f64.sqrt();
    assert!((&l.vectors[0] - v(&[-h, h])).amax() < 1e-15);
    assert!((&l.vectors[1] - v(&[h, h])).amax() < 1e-15);
    assert_eq!(l.weights, vec![1.0, 1.0]);
    assert!(l.residual().frobenius < 1e-15);

    let l = lift_to_cone(&triangle_system()).unwrap();
    assert!(l.weights.iter().all(|d| (d - 1.0).abs() < 1e-15));
    assert!(l.residual().frobenius < 1e-12);

    let lopsided = BLSystem::new(1, vec![v(&[1.0])], vec![1.0]).unwrap();
    assert!(matches!(lift_to_cone(&lopsided), Err(Error::NonzeroBarycenter(_))));
}

#[test]
fn lifting_random_centered_systems() {
    let mut rng = random::rng(44);
    for d in 1..=5 {
        for _ in 0..10 {
            let (u, c) = random::random_decomposition(&mut rng, d, d + 2, true);
            let s = BLSystem::new(d, u, c).unwrap();
            assert!(s.residual().frobenius <= 1e-12);
            let l = lift_to_cone(&s).unwrap();
            let r = l.residual();
            assert!(r.frobenius <= 1e-10 && r.trace_gap <= 1e-10, "{r:?}");
            assert!(l.vectors.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
        }
    }
}

#[test]
fn radial_integral_closed_form() {
    for n in 1..=6 {
        let nf = n as f64;
        let quad = integrate(
            |r| (-(nf + 1.0).sqrt() * r).exp() * (r / nf.sqrt()).powi(n as i32),
            0.0,
            80.0,
            400,
            16,
        );
        let closed = factorial(n) / (nf.powf(nf / 2.0) * (nf + 1.0).powf((nf + 1.0) / 2.0));
        assert!((quad - closed).abs() <= 1e-10, "n={n}: {quad} vs {closed}");
        assert!((cone_radial_integral(n) - closed).abs() <= 1e-12 * closed);
    }
}

#[test]
fn cone_section_at_n2() {
    let s = triangle_system();
    let k = polytope_volume(&circumscribed_body(&s).unwrap().to_vrep().unwrap()).unwrap();
    assert!((k - 3.0 * 3f64.sqrt()).abs() < 1e-12);
    for (i, r) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let e = cone_section_integral(&s, r, &McParams::new(400_000, i as u64)).unwrap();
        let f = cone_section_formula(2, r, k);
        assert!(e.within(f, 3.0), "r={r}: {e} vs {f}");
    }
}

#[test]
fn extremal_constants_match_the_extremal_bodies() {
    assert!((simplex_volume_bound(1) - 2.0).abs() < 1e-12);
    assert!((simplex_volume_bound(2) - 3.0 * 3f64.sqrt()).abs() < 1e-12);
    assert!((simplex_volume_bound(3) - 8.0 * 3f64.sqrt()).abs() < 1e-12);
    for n in 2..=4 {
        let tri = bodies::regular_simplex(n).to_vrep().unwrap();
        let q = isoperimetric_quotient(&tri).unwrap();
        assert!((q - reverse_isoperimetric_constant(n, false)).abs() < 1e-10 * q);
        let cube = bodies::cube(n).to_vrep().unwrap();
        let q = isoperimetric_quotient(&cube).unwrap();
        assert!((q - reverse_isoperimetric_constant(n, true)).abs() < 1e-10 * q);
    }
    assert!((reverse_isoperimetric_constant(2, false) - 4.55901).abs() < 1e-5);
    // the disc beats both
    assert!(2.0 * PI.sqrt() < reverse_isoperimetric_constant(2, true));
}

#[test]
fn json_round_trips() {
    let s = triangle_system();
    assert_eq!(BLSystem::from_json(&s.to_json()).unwrap(), s);
    let f = Density1D::Table {
        grid: vec![0.0, 1.0, 2.0],
        values: vec![0.0, 1.0, 0.0],
    };
    let text = serde_json::to_string(&f).unwrap();
    assert!(text.contains("\"kind\":\"table\""));
    assert_eq!(serde_json::from_str::<Density1D>(&text).unwrap(), f);
    assert_eq!(f.integral(), 1.0);
}
