//! Double-description enumeration of the extreme rays of a pointed cone
//! `{y : <h_k, y> <= 0 for all k}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) const DD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    dir: DVector<f64>,
    zeros: Bits,
}

/// Extreme rays of the cone cut out by `rows` (each row `h` meaning `<h, y> <= 0`).
///
/// Fails with [`Error::Unbounded`] when the rows do not have full rank, i.e.
/// the cone contains a line.
pub(crate) fn extreme_rays(rows: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let dim = rows.first().ok_or(Error::InvalidInput("no constraints".into()))?.len();
    let rows: Vec<DVector<f64>> = rows
        .iter()
        .map(|h| {
            let n = h.norm();
            if n > 0.0 {
                h / n
            } else {
                h.clone()
            }
        })
        .collect();
    let m = rows.len();

    // Greedy choice of `dim` independent rows to seed a simplicial cone.
    let mut seed: Vec<usize> = Vec::with_capacity(dim);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for (k, h) in rows.iter().enumerate() {
        let mut r = h.clone();
        for q in &basis {
            r -= q * q.dot(&r);
        }
        let nr = r.norm();
        if nr > 1e-8 {
            basis.push(r / nr);
            seed.push(k);
            if seed.len() == dim {
                break;
            }
        }
    }
    if seed.len() < dim {
        return Err(Error::Unbounded);
    }

    let a0 = DMatrix::from_fn(dim, dim, |i, j| rows[seed[i]][j]);
    let inv = a0.try_inverse().ok_or(Error::Unbounded)?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let dir = -inv.column(j).into_owned();
            let dir = &dir / dir.norm();
            let mut zeros = Bits::new(m);
            for (i, &k) in seed.iter().enumerate() {
                if i != j {
                    zeros.set(k);
                }
            }
            Ray { dir, zeros }
        })
        .collect();

    for (k, h) in rows.iter().enumerate() {
        if seed.contains(&k) {
            continue;
        }
        let slack: Vec<f64> = rays.iter().map(|r| h.dot(&r.dir)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| slack[i] > DD_TOL).collect();
        if pos.is_empty() {
            for (r, &s) in rays.iter_mut().zip(&slack) {
                if s.abs() <= DD_TOL {
                    r.zeros.set(k);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| slack[i] < -DD_TOL).collect();

        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == q || !r.zeros.contains(&common));
                if !adjacent {
                    continue;
                }
                let dir = &rays[q].dir * slack[p] - &rays[p].dir * slack[q];
                let dir = &dir / dir.norm();
                let mut zeros = common;
                zeros.set(k);
                fresh.push(Ray { dir, zeros });
            }
        }

        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if slack[i] > DD_TOL {
                continue;
            }
            if slack[i].abs() <= DD_TOL {
                r.zeros.set(k);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }

    Ok(rays.into_iter().map(|r| r.dir).collect())
}
