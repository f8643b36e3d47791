//! Dense two-phase simplex for the small linear programs used to validate
//! and initialise polytopes (Chebyshev center, positive spanning).

use nalgebra::DVector;

const PIVOT_TOL: f64 = 1e-10;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `maximize c.x  subject to  rows,  x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Relation, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    cells: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.cells[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.cells[row][col];
        for v in self.cells[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.cells[row].clone();
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule simplex; `allowed` masks columns that may enter the basis.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Option<()> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.width).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| cost[b] * self.cells[i][j])
                        .sum::<f64>();
                reduced > PIVOT_TOL
            });
            let Some(col) = entering else {
                return Some(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.cells.len() {
                let a = self.cells[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_TOL || (ratio <= br + PIVOT_TOL && self.basis[i] < self.basis[bi]) {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    }
                }
            }
            let (row, _) = best?;
            self.pivot(row, col);
        }
        None
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn constrain(&mut self, row: Vec<f64>, rel: Relation, rhs: f64) -> &mut Self {
        self.rows.push((row, rel, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let nvars = self.objective.len();
        let m = self.rows.len();
        let mut normalized = Vec::with_capacity(m);
        for (row, rel, rhs) in &self.rows {
            if *rhs < 0.0 {
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                normalized.push((row.iter().map(|v| -v).collect::<Vec<_>>(), flipped, -rhs));
            } else {
                normalized.push((row.clone(), *rel, *rhs));
            }
        }
        let n_slack = normalized.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let width = nvars + n_slack + n_art;
        let mut cells = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0; m];
        let mut is_art = vec![false; width];
        let (mut s, mut a) = (nvars, nvars + n_slack);
        for (i, (row, rel, rhs)) in normalized.iter().enumerate() {
            cells[i][..nvars].copy_from_slice(row);
            cells[i][width] = *rhs;
            match rel {
                Relation::Le => {
                    cells[i][s] = 1.0;
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    cells[i][s] = -1.0;
                    s += 1;
                    cells[i][a] = 1.0;
                    is_art[a] = true;
                    basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    cells[i][a] = 1.0;
                    is_art[a] = true;
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        let mut tab = Tableau { cells, basis, width };

        if n_art > 0 {
            let cost: Vec<f64> = is_art.iter().map(|&b| if b { -1.0 } else { 0.0 }).collect();
            let all = vec![true; width];
            if tab.optimize(&cost, &all).is_none() {
                return LpOutcome::Infeasible;
            }
            let infeas: f64 = (0..m).filter(|&i| is_art[tab.basis[i]]).map(|i| tab.rhs(i)).sum();
            if infeas > 1e-9 {
                return LpOutcome::Infeasible;
            }
            for i in 0..m {
                if is_art[tab.basis[i]] {
                    if let Some(j) = (0..width).find(|&j| !is_art[j] && tab.cells[i][j].abs() > PIVOT_TOL) {
                        tab.pivot(i, j);
                    }
                }
            }
        }

        let mut cost = vec![0.0; width];
        cost[..nvars].copy_from_slice(&self.objective);
        let allowed: Vec<bool> = is_art.iter().map(|b| !b).collect();
        if tab.optimize(&cost, &allowed).is_none() {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; nvars];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < nvars {
                x[b] = tab.rhs(i);
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

/// Center and radius of the largest Euclidean ball inside `{x : <a_i, x> <= b_i}`
/// (normals assumed unit length).
pub fn chebyshev_center(normals: &[DVector<f64>], offsets: &[f64]) -> Option<(DVector<f64>, f64)> {
    let n = normals.first()?.len();
    // variables: d+ (n), d- (n), r
    let mut obj = vec![0.0; 2 * n + 1];
    obj[2 * n] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for (a, &b) in normals.iter().zip(offsets) {
        let mut row = Vec::with_capacity(2 * n + 1);
        row.extend(a.iter().copied());
        row.extend(a.iter().map(|v| -v));
        row.push(a.norm());
        lp.constrain(row, Relation::Le, b);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            let d = DVector::from_fn(n, |i, _| x[i] - x[n + i]);
            Some((d, value))
        }
        _ => None,
    }
}

/// Largest `t` such that some convex combination of the normals with every
/// coefficient at least `t` vanishes. Positive iff the origin is interior to
/// their convex hull (relative to their span).
pub fn positive_spanning_margin(normals: &[DVector<f64>]) -> f64 {
    let m = normals.len();
    if m == 0 {
        return 0.0;
    }
    let n = normals[0].len();
    // variables: mu_1..mu_m >= 0, t >= 0 with lambda_i = t + mu_i
    let mut obj = vec![0.0; m + 1];
    obj[m] = 1.0;
    let mut lp = LinearProgram::new(obj);
    let sum: DVector<f64> = normals.iter().fold(DVector::zeros(n), |acc, a| acc + a);
    for k in 0..n {
        let mut row: Vec<f64> = normals.iter().map(|a| a[k]).collect();
        row.push(sum[k]);
        lp.constrain(row, Relation::Eq, 0.0);
    }
    let mut row = vec![1.0; m];
    row.push(m as f64);
    lp.constrain(row, Relation::Eq, 1.0);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        _ => 0.0,
    }
}
