//! Volumes, surface areas, shadows, and the Monte Carlo estimators built on them.

mod exact;
pub mod mc;

use rand::Rng;

pub use exact::{isoperimetric_quotient, polytope_volume, projection_area, surface_area};
pub use mc::{sphere_point, Estimate, McParams};

use crate::error::{Error, Result};
use crate::geometry::{BodyOracle, VPolytope};
use crate::linalg::unit_ball_volume;

/// Hit-or-miss volume over the box `[-R, R]^n`.
pub fn mc_volume(body: &BodyOracle, mc: &McParams) -> Result<Estimate> {
    let n = body.dim();
    let r = body.radius();
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput(
            "bounding radius must be finite and positive".into(),
        ));
    }
    let moments = mc::sample_mean(mc, |rng| {
        let mut x = vec![0.0; n];
        for v in x.iter_mut() {
            *v = rng.random_range(-r..r);
        }
        if body.contains(&x) {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(moments.estimate().scaled((2.0 * r).powi(n as i32)))
}

fn require_planar_or_spatial(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// `n v_n / v_{n-1}`, the constant in Cauchy's surface area formula.
pub fn cauchy_constant(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n) / unit_ball_volume(n - 1)
}

/// Surface area as `(n v_n / v_{n-1})` times the mean shadow over uniform directions.
pub fn cauchy_surface_area(v: &VPolytope, mc: &McParams) -> Result<Estimate> {
    let n = v.dim();
    require_planar_or_spatial(n)?;
    let moments = mc::sample_mean(mc, |rng| {
        let mut theta = vec![0.0; n];
        sphere_point(rng, &mut theta);
        projection_area(v, &theta).expect("dimension checked")
    })?;
    Ok(moments.estimate().scaled(cauchy_constant(n)))
}

/// Petty's affine-invariant projection functional
/// `(|C|^(n-1) ∫ |P_θ C|^(-n) dσ(θ))^(-1/n)`.
///
/// The spherical integral is sampled; its standard error is carried through
/// the outer power by the delta method.
pub fn petty_functional(v: &VPolytope, mc: &McParams) -> Result<Estimate> {
    let n = v.dim();
    require_planar_or_spatial(n)?;
    let volume = polytope_volume(v)?;
    let nf = n as f64;
    let moments = mc::sample_mean(mc, |rng| {
        let mut theta = vec![0.0; n];
        sphere_point(rng, &mut theta);
        projection_area(v, &theta).expect("dimension checked").powf(-nf)
    })?;
    let inner = moments.mean;
    let value = (volume.powf(nf - 1.0) * inner).powf(-1.0 / nf);
    let std_error = value / (nf * inner) * moments.std_error_of_mean();
    Ok(Estimate {
        value,
        std_error,
        samples: moments.count as usize,
    })
}

/// Lower bound `(n v_n / v_{n-1}) · petty(C)` for the isoperimetric quotient (Hölder).
pub fn holder_quotient_bound(v: &VPolytope, mc: &McParams) -> Result<Estimate> {
    Ok(petty_functional(v, mc)?.scaled(cauchy_constant(v.dim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use std::f64::consts::PI;

    #[test]
    fn mc_disc_and_square() {
        let mc = McParams::new(200_000, 11);
        let disc = mc_volume(&BodyOracle::euclidean_ball(2), &mc).unwrap();
        assert!(disc.within(PI, 3.0), "{disc}");
        let sq = mc_volume(&BodyOracle::lp_ball(2, f64::INFINITY).with_radius(2.0), &mc).unwrap();
        assert!(sq.within(4.0, 3.0), "{sq}");
        let l1 = mc_volume(&BodyOracle::lp_ball(2, 1.0), &mc).unwrap();
        assert!(l1.within(2.0, 3.0), "{l1}");
    }

    #[test]
    fn mc_is_deterministic() {
        let mc = McParams::new(20_000, 5);
        let a = mc_volume(&BodyOracle::euclidean_ball(3), &mc).unwrap();
        let b = mc_volume(&BodyOracle::euclidean_ball(3), &mc.with_batch(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cauchy_square_and_triangle() {
        let mc = McParams::new(20_000, 3);
        let sq = cauchy_surface_area(&bodies::cube(2).to_vrep().unwrap(), &mc).unwrap();
        assert!(sq.within(8.0, 3.0), "{sq}");
        let tri = cauchy_surface_area(&bodies::regular_simplex(2).to_vrep().unwrap(), &mc).unwrap();
        assert!(tri.within(6.0 * 3f64.sqrt(), 3.0), "{tri}");
    }

    #[test]
    fn petty_of_disc() {
        let disc = bodies::disc_polygon(2000);
        let e = petty_functional(&disc, &McParams::new(5_000, 1)).unwrap();
        // every shadow of the disc has length 2
        assert!((e.value - 2.0 / PI.sqrt()).abs() < 1e-5, "{e}");
    }

    #[test]
    fn unsupported_dimensions() {
        let c = bodies::cube(4).to_vrep().unwrap();
        assert!(matches!(
            petty_functional(&c, &McParams::new(100, 1)),
            Err(Error::UnsupportedDimension(4))
        ));
    }
}
