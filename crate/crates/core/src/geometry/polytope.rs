use nalgebra::{DMatrix, DVector};

use super::dd::{extreme_rays, DD_TOL};
use super::AffineMap;
use crate::error::{Error, Result};
use crate::lp::positive_spanning_margin;

/// Largest dimension for which vertex/facet enumeration is attempted.
pub const MAX_EXACT_DIM: usize = 6;

/// `{x : <a_i, x> <= b_i}` with unit normals `a_i` and positive offsets `b_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
}

/// Convex hull of a finite point set.
#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope {
    vertices: Vec<DVector<f64>>,
}

/// A facet of a [`VPolytope`] together with the vertices lying on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: DVector<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

fn rank(rows: &[DVector<f64>], n: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

impl HPolytope {
    /// Builds the polytope, rescaling each `(a_i, b_i)` so that `|a_i| = 1`.
    pub fn new(normals: Vec<DVector<f64>>, offsets: Vec<f64>) -> Result<Self> {
        let poly = Self::new_unchecked_bounds(normals, offsets)?;
        let n = poly.dim();
        if rank(&poly.normals, n) < n || positive_spanning_margin(&poly.normals) <= 1e-12 {
            return Err(Error::Unbounded);
        }
        Ok(poly)
    }

    /// Validates normals and offsets but skips the boundedness linear program.
    pub(crate) fn new_unchecked_bounds(normals: Vec<DVector<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::InvalidInput("no half-spaces".into()));
        }
        if normals.len() != offsets.len() {
            return Err(Error::InvalidInput(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        let n = normals[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let mut unit = Vec::with_capacity(normals.len());
        let mut scaled = Vec::with_capacity(offsets.len());
        for (a, b) in normals.into_iter().zip(offsets) {
            if a.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.len(),
                });
            }
            let norm = a.norm();
            if !(norm > 0.0 && norm.is_finite() && b.is_finite()) {
                return Err(Error::InvalidInput("zero or non-finite normal".into()));
            }
            let b = b / norm;
            if b <= 0.0 {
                return Err(Error::OriginNotInterior);
            }
            unit.push(a / norm);
            scaled.push(b);
        }
        Ok(Self {
            normals: unit,
            offsets: scaled,
        })
    }

    /// Rows `[a_1 .. a_n, b]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let mut normals = Vec::with_capacity(rows.len());
        let mut offsets = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() < 2 {
                return Err(Error::InvalidInput("H row needs at least two entries".into()));
            }
            let (a, b) = r.split_at(r.len() - 1);
            normals.push(DVector::from_row_slice(a));
            offsets.push(b[0]);
        }
        Self::new(normals, offsets)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, &b)| a.iter().copied().chain(std::iter::once(b)).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[DVector<f64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn contains(&self, x: &DVector<f64>, slack: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, &b)| a.dot(x) <= b + slack)
    }

    /// Minkowski functional `max_i <a_i, x> / b_i` (origin is interior).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, &b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() / b)
            .fold(0.0, f64::max)
    }

    pub fn to_vrep(&self) -> Result<VPolytope> {
        let n = self.dim();
        if n > MAX_EXACT_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut rows: Vec<DVector<f64>> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, &b)| DVector::from_fn(n + 1, |i, _| if i < n { a[i] } else { -b }))
            .collect();
        rows.push(DVector::from_fn(n + 1, |i, _| if i < n { 0.0 } else { -1.0 }));
        let rays = extreme_rays(&rows)?;
        let mut vertices: Vec<DVector<f64>> = Vec::with_capacity(rays.len());
        for r in rays {
            let t = r[n];
            if t <= DD_TOL {
                return Err(Error::Unbounded);
            }
            let v = DVector::from_fn(n, |i, _| r[i] / t);
            let scale = 1.0 + v.norm();
            if !vertices.iter().any(|w| (w - &v).norm() <= 1e-9 * scale) {
                vertices.push(v);
            }
        }
        VPolytope::new(vertices)
    }
}

impl VPolytope {
    pub fn new(vertices: Vec<DVector<f64>>) -> Result<Self> {
        let n = vertices.first().ok_or(Error::InvalidInput("no vertices".into()))?.len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        if vertices.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let poly = Self { vertices };
        let c = poly.centroid();
        let centered: Vec<DVector<f64>> = poly.vertices.iter().map(|v| v - &c).collect();
        if poly.vertices.len() < n + 1 || rank(&centered, n) < n {
            return Err(Error::Degenerate("vertices do not span the space".into()));
        }
        Ok(poly)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_row_slice(r)).collect())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().copied().collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn centroid(&self) -> DVector<f64> {
        let n = self.vertices[0].len();
        self.vertices.iter().fold(DVector::zeros(n), |acc, v| acc + v) / self.vertices.len() as f64
    }

    /// Facets with their incident vertices, found by enumerating the vertices
    /// of the polar body about the vertex centroid.
    pub fn facets(&self) -> Result<Vec<Facet>> {
        let n = self.dim();
        if n > MAX_EXACT_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        let c = self.centroid();
        let scale = self.vertices.iter().map(|v| (v - &c).norm()).fold(0.0, f64::max);
        let mut rows: Vec<DVector<f64>> = self
            .vertices
            .iter()
            .map(|v| DVector::from_fn(n + 1, |i, _| if i < n { (v[i] - c[i]) / scale } else { -1.0 }))
            .collect();
        rows.push(DVector::from_fn(n + 1, |i, _| if i < n { 0.0 } else { -1.0 }));
        let rays = extreme_rays(&rows).map_err(|_| Error::Degenerate("hull is not full-dimensional".into()))?;

        let mut facets: Vec<Facet> = Vec::with_capacity(rays.len());
        for r in rays {
            let t = r[n];
            if t <= DD_TOL {
                return Err(Error::Degenerate("hull is not full-dimensional".into()));
            }
            // polar vertex y (in scaled coordinates): facet <y, x - c> = scale
            let y = DVector::from_fn(n, |i, _| r[i] / t);
            let norm = y.norm();
            let normal = &y / norm;
            let offset = scale / norm + normal.dot(&c);
            if facets
                .iter()
                .any(|f| (&f.normal - &normal).norm() < 1e-9 && (f.offset - offset).abs() < 1e-9 * scale)
            {
                continue;
            }
            let tol = 1e-9 * scale.max(1.0);
            let vertices = (0..self.vertices.len())
                .filter(|&i| (normal.dot(&self.vertices[i]) - offset).abs() <= tol)
                .collect();
            facets.push(Facet {
                normal,
                offset,
                vertices,
            });
        }
        Ok(facets)
    }

    /// Drops points that are not extreme and merges numerical duplicates.
    pub fn canonicalize(&self) -> Result<VPolytope> {
        let n = self.dim();
        let facets = self.facets()?;
        let mut kept: Vec<DVector<f64>> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let incident: Vec<DVector<f64>> = facets
                .iter()
                .filter(|f| f.vertices.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            if rank(&incident, n) < n {
                continue;
            }
            let s = 1.0 + v.norm();
            if !kept.iter().any(|w| (w - v).norm() <= 1e-9 * s) {
                kept.push(v.clone());
            }
        }
        VPolytope::new(kept)
    }

    /// H-representation; requires the origin to be interior.
    pub fn to_hrep(&self) -> Result<HPolytope> {
        let facets = self.facets()?;
        if facets.iter().any(|f| f.offset <= 1e-12) {
            return Err(Error::OriginNotInterior);
        }
        let (normals, offsets) = facets.into_iter().map(|f| (f.normal, f.offset)).unzip();
        HPolytope::new(normals, offsets)
    }
}

/// Bodies that can be pushed forward through an affine map.
pub trait AffineImage: Sized {
    fn apply_affine(&self, map: &AffineMap) -> Result<Self>;
}

impl AffineImage for HPolytope {
    fn apply_affine(&self, map: &AffineMap) -> Result<Self> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: map.dim(),
            });
        }
        let inv_t = map.linear().clone().try_inverse().ok_or(Error::Singular)?.transpose();
        let mut normals = Vec::with_capacity(self.len());
        let mut offsets = Vec::with_capacity(self.len());
        for (a, &b) in self.normals.iter().zip(&self.offsets) {
            let na = &inv_t * a;
            offsets.push(b + na.dot(map.shift()));
            normals.push(na);
        }
        // affine images of bounded bodies stay bounded
        HPolytope::new_unchecked_bounds(normals, offsets)
    }
}

impl AffineImage for VPolytope {
    fn apply_affine(&self, map: &AffineMap) -> Result<Self> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: map.dim(),
            });
        }
        VPolytope::new(self.vertices.iter().map(|v| map.apply(v)).collect())
    }
}

pub fn apply_affine<P: AffineImage>(body: &P, map: &AffineMap) -> Result<P> {
    body.apply_affine(map)
}

pub fn vrep_from_hrep(p: &HPolytope) -> Result<VPolytope> {
    p.to_vrep()
}

pub fn hrep_from_vrep(v: &VPolytope) -> Result<HPolytope> {
    v.to_hrep()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;

    fn pt(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn cube_vertices() {
        let v = bodies::cube(3).to_vrep().unwrap();
        assert_eq!(v.vertices().len(), 8);
        for p in v.vertices() {
            assert!(p.iter().all(|x| (x.abs() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn triangle_facets_at_unit_distance() {
        let v = VPolytope::new(vec![
            pt(&[0.0, 2.0]),
            pt(&[-3f64.sqrt(), -1.0]),
            pt(&[3f64.sqrt(), -1.0]),
        ])
        .unwrap();
        let h = v.to_hrep().unwrap();
        assert_eq!(h.len(), 3);
        for &b in h.offsets() {
            assert!((b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_polytope_facets() {
        let mut verts = Vec::new();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                verts.push(DVector::from_fn(3, |j, _| if i == j { s } else { 0.0 }));
            }
        }
        let h = VPolytope::new(verts).unwrap().to_hrep().unwrap();
        assert_eq!(h.len(), 8);
        let r3 = 3f64.sqrt();
        for (a, &b) in h.normals().iter().zip(h.offsets()) {
            assert!(a.iter().all(|x| (x.abs() - 1.0 / r3).abs() < 1e-12));
            assert!((b - 1.0 / r3).abs() < 1e-12);
        }
    }

    #[test]
    fn unbounded_rejected() {
        let rows = vec![vec![1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        assert_eq!(HPolytope::from_rows(&rows), Err(Error::Unbounded));
    }

    #[test]
    fn degenerate_rejected() {
        let v = VPolytope::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])]);
        assert!(matches!(v, Err(Error::Degenerate(_))));
    }

    #[test]
    fn box_by_scaling() {
        let map = AffineMap::linear_only(DMatrix::from_diagonal(&pt(&[2.0, 1.0]))).unwrap();
        let b = apply_affine(&bodies::cube(2), &map).unwrap();
        let expect = bodies::rect(&[2.0, 1.0]);
        for (a, &o) in expect.normals().iter().zip(expect.offsets()) {
            assert!(b
                .normals()
                .iter()
                .zip(b.offsets())
                .any(|(c, &p)| (c - a).norm() < 1e-14 && (p - o).abs() < 1e-14));
        }
    }

    #[test]
    fn canonicalize_drops_interior_points() {
        let v = VPolytope::new(vec![
            pt(&[1.0, 1.0]),
            pt(&[-1.0, 1.0]),
            pt(&[-1.0, -1.0]),
            pt(&[1.0, -1.0]),
            pt(&[0.2, 0.1]),
            pt(&[1.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(v.canonicalize().unwrap().vertices().len(), 4);
    }
}
