use nalgebra::{DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{Facet, VPolytope};
use crate::linalg::orthogonal_complement;

/// Volume of the convex hull of `points` in their ambient dimension.
///
/// Fan decomposition from the vertex centroid: each facet `F` contributes the
/// cone `conv(c, F)` of volume `h_F |F| / k`, where `|F|` is computed by the
/// same routine one dimension down after projecting `F` into its hyperplane.
pub(crate) fn hull_volume(points: &[DVector<f64>]) -> Result<f64> {
    let k = points.first().map(|p| p.len()).unwrap_or(0);
    match k {
        0 => Ok(1.0),
        1 => {
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[0]), hi.max(p[0]))
            });
            Ok(hi - lo)
        }
        _ => {
            let poly = VPolytope::new(points.to_vec())?;
            let c = poly.centroid();
            let mut total = 0.0;
            for f in poly.facets()? {
                let height = f.offset - f.normal.dot(&c);
                total += height * facet_measure(&poly, &f)? / k as f64;
            }
            Ok(total)
        }
    }
}

/// `(n-1)`-dimensional measure of a facet.
pub(crate) fn facet_measure(poly: &VPolytope, facet: &Facet) -> Result<f64> {
    let n = poly.dim();
    if n == 1 {
        return Ok(1.0);
    }
    let basis = orthogonal_complement(&facet.normal);
    let projected: Vec<DVector<f64>> = facet
        .vertices
        .iter()
        .map(|&i| basis.transpose() * &poly.vertices()[i])
        .collect();
    hull_volume(&projected)
}

pub fn polytope_volume(v: &VPolytope) -> Result<f64> {
    hull_volume(v.vertices())
}

/// Sum of the `(n-1)`-volumes of the facets.
pub fn surface_area(v: &VPolytope) -> Result<f64> {
    let mut total = 0.0;
    for f in v.facets()? {
        total += facet_measure(v, &f)?;
    }
    Ok(total)
}

/// `|∂C| / |C|^((n-1)/n)`.
pub fn isoperimetric_quotient(v: &VPolytope) -> Result<f64> {
    let n = v.dim() as f64;
    Ok(surface_area(v)? / polytope_volume(v)?.powf((n - 1.0) / n))
}

/// Area of the planar convex hull (Andrew's monotone chain).
pub(crate) fn planar_hull_area(pts: &mut [Vector2<f64>]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let cross = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| {
        Matrix2::new(a.x - o.x, b.x - o.x, a.y - o.y, b.y - o.y).determinant()
    };
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    let mut area = 0.0;
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        area += a.x * b.y - a.y * b.x;
    }
    0.5 * area.abs()
}

/// `(n-1)`-volume of the orthogonal projection of `v` onto `theta^⊥`.
/// Exact for `n ∈ {2, 3}`; other dimensions are rejected.
pub fn projection_area(v: &VPolytope, theta: &[f64]) -> Result<f64> {
    let n = v.dim();
    if theta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: theta.len(),
        });
    }
    match n {
        2 => {
            let (px, py) = (-theta[1], theta[0]);
            let (lo, hi) = v
                .vertices()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    let s = px * p[0] + py * p[1];
                    (lo.min(s), hi.max(s))
                });
            Ok(hi - lo)
        }
        3 => {
            let t = DVector::from_row_slice(theta);
            let q = orthogonal_complement(&t);
            let mut pts: Vec<Vector2<f64>> = v
                .vertices()
                .iter()
                .map(|p| Vector2::new(q.column(0).dot(p), q.column(1).dot(p)))
                .collect();
            Ok(planar_hull_area(&mut pts))
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}
