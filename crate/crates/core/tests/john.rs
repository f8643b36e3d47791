use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use volrat::brascamp_lieb::{cube_volume_bound, simplex_volume_bound};
use volrat::geometry::apply_affine;
use volrat::john::{
    analyze, contact_points, john_decomposition, john_position, max_inscribed_ellipsoid, solve_max_inscribed_ellipsoid,
    volume_ratio, JohnDecomposition, SolverOptions,
};
use volrat::{bodies, random, AffineMap, HPolytope};

fn assert_unit_ball(p: &HPolytope, tol: f64) {
    let e = max_inscribed_ellipsoid(p).unwrap();
    let n = p.dim();
    assert!(
        (e.shape() - DMatrix::<f64>::identity(n, n)).amax() <= tol,
        "{}",
        e.shape()
    );
    assert!(e.center().amax() <= tol, "{}", e.center());
}

/// Affine image of `p` with the shift chosen so the origin stays interior.
fn affine_image(p: &HPolytope, seed: u64) -> HPolytope {
    let mut rng = random::rng(seed);
    let t = random::random_affine(&mut rng, p.dim());
    let t = AffineMap::new(t.linear().clone(), t.shift() * 0.1).unwrap();
    apply_affine(p, &t).unwrap()
}

#[test]
fn re_solving_john_position_gives_the_unit_ball() {
    for seed in 0..10 {
        for base in [
            bodies::cube(2),
            bodies::cube(3),
            bodies::regular_simplex(2),
            bodies::regular_simplex(3),
        ] {
            let image = affine_image(&base, seed);
            let (pos, _) = john_position(&image).unwrap();
            assert_unit_ball(&pos, 1e-7);
        }
    }
    let mut rng = random::rng(99);
    for _ in 0..20 {
        let p = random::random_polytope(&mut rng, 2, false).unwrap();
        let (pos, _) = john_position(&p).unwrap();
        assert_unit_ball(&pos, 1e-7);
    }
}

#[test]
fn box_goes_to_square() {
    let (pos, t) = john_position(&bodies::rect(&[4.0, 1.0])).unwrap();
    assert!((t.linear() - DMatrix::from_diagonal(&DVector::from_vec(vec![0.25, 1.0]))).amax() < 1e-8);
    for (a, &b) in pos.normals().iter().zip(pos.offsets()) {
        assert!((a.amax() - 1.0).abs() < 1e-8 && (b - 1.0).abs() < 1e-8);
    }
}

#[test]
fn triangle_contacts_are_120_degrees_apart() {
    let c = contact_points(&bodies::regular_simplex(2)).unwrap();
    assert_eq!(c.len(), 3);
    for i in 0..3 {
        for j in i + 1..3 {
            assert!((c[i].dot(&c[j]) + 0.5).abs() < 1e-12);
        }
    }
    let d = john_decomposition(&c, false).unwrap();
    assert!(d.weights.iter().all(|w| (w - 2.0 / 3.0).abs() < 1e-10));
}

#[test]
fn not_in_john_position_is_rejected() {
    assert!(contact_points(&bodies::rect(&[1.0, 0.5])).is_err());
}

#[test]
fn incomplete_contacts_are_infeasible() {
    let one_side = vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])];
    assert!(john_decomposition(&one_side, false).is_err());
    assert!(john_decomposition(&one_side, true).is_ok());
}

#[test]
fn decomposition_acts_like_an_orthonormal_basis() {
    let mut rng = random::rng(5);
    for (n, sym) in [(2, false), (3, false), (2, true), (3, true), (4, true)] {
        for _ in 0..5 {
            let p = random::random_polytope(&mut rng, n, sym).unwrap();
            let a = analyze(&p, sym).unwrap();
            let d = &a.decomposition;
            for _ in 0..100 {
                let x = random::unit_vector(&mut rng, n) * 3.0;
                let s: f64 = d
                    .contacts
                    .iter()
                    .zip(&d.weights)
                    .map(|(u, c)| c * u.dot(&x).powi(2))
                    .sum();
                assert!((s - x.norm_squared()).abs() <= 1e-7, "{s} vs {}", x.norm_squared());
            }
        }
    }
}

#[test]
fn ellipsoid_stays_inside_and_objective_is_monotone() {
    let mut rng = random::rng(17);
    for n in 2..=4 {
        for _ in 0..10 {
            let p = random::random_polytope(&mut rng, n, false).unwrap();
            let sol = solve_max_inscribed_ellipsoid(&p, &SolverOptions::default()).unwrap();
            let e = &sol.ellipsoid;
            for (a, &b) in p.normals().iter().zip(p.offsets()) {
                let slack = b - a.dot(e.center()) - (e.shape() * a).norm();
                assert!(slack >= -1e-9, "{slack}");
            }
            assert!(sol.kkt_residual <= 1e-8);
            assert!(
                sol.log_det_history.windows(2).all(|w| w[1] >= w[0] - 1e-12),
                "{:?}",
                sol.log_det_history
            );
        }
    }
}

#[test]
fn hexagon_volume_ratio() {
    // Regular hexagon with unit inradius: area 2√3, inscribed disc π.
    let vr = volume_ratio(&bodies::regular_polygon(6)).unwrap();
    assert!((vr - (2.0 * 3f64.sqrt() / std::f64::consts::PI).sqrt()).abs() < 1e-8);
}

#[test]
fn fine_polygons_have_volume_ratio_near_one() {
    let vr = volume_ratio(&bodies::regular_polygon(256)).unwrap();
    assert!((vr - 1.0).abs() < 1e-4, "{vr}");
}

#[test]
fn extremal_volume_bounds_on_random_bodies() {
    let mut rng = random::rng(123);
    for n in 2..=3 {
        for sym in [false, true] {
            let bound = if sym {
                cube_volume_bound(n)
            } else {
                simplex_volume_bound(n)
            };
            for _ in 0..25 {
                let p = random::random_polytope(&mut rng, n, sym).unwrap();
                let a = analyze(&p, sym).unwrap();
                assert!(a.volume <= bound * (1.0 + 1e-6), "{} > {bound}", a.volume);
            }
        }
    }
}

#[test]
fn decomposition_json_round_trip() {
    let c = contact_points(&bodies::cube(3)).unwrap();
    let d = john_decomposition(&c, true).unwrap();
    let back = JohnDecomposition::from_json(&d.to_json()).unwrap();
    assert_eq!(d, back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn volume_ratio_is_affine_invariant(seed in any::<u64>(), n in 2usize..=3, sym in any::<bool>()) {
        let mut rng = random::rng(seed);
        let p = random::random_polytope(&mut rng, n, sym).unwrap();
        let q = affine_image(&p, seed.wrapping_add(1));
        let a = volume_ratio(&p).unwrap();
        let b = volume_ratio(&q).unwrap();
        prop_assert!((a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }
}
