//! Dense revised simplex for `minimize c·x s.t. A x = b, x ≥ 0`.
//!
//! Two phases with one artificial column per row, Bland's rule for both the
//! entering and the leaving variable, an explicit basis inverse updated by
//! elementary row operations and refactored every `REFACTOR` pivots.
//! Artificials left basic after phase one sit on redundant rows at value
//! zero and are never allowed to re-enter.

use nalgebra::DMatrix;

use crate::error::{Error, Residuals, Result};

/// Constraint matrix stored by sparse columns.
#[derive(Clone, Debug)]
pub(crate) struct StandardLp {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, f64)>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const REFACTOR: usize = 50;
const PIVOT_TOL: f64 = 1e-9;

struct Tableau<'a> {
    lp: &'a StandardLp,
    sign: Vec<f64>,
    binv: DMatrix<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    xb: Vec<f64>,
    pivots: usize,
    max_pivots: usize,
    tol: f64,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a StandardLp, tol: f64, max_pivots: usize) -> Self {
        let m = lp.rows;
        let n = lp.cols.len();
        let sign: Vec<f64> = lp.b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let mut is_basic = vec![false; n + m];
        for flag in is_basic.iter_mut().skip(n) {
            *flag = true;
        }
        Self {
            lp,
            binv: DMatrix::identity(m, m),
            basis: (n..n + m).collect(),
            is_basic,
            xb: lp.b.iter().map(|v| v.abs()).collect(),
            sign,
            pivots: 0,
            max_pivots,
            tol,
        }
    }

    fn ncols(&self) -> usize {
        self.lp.cols.len()
    }

    /// Column `j` of the sign-normalized system, artificials included.
    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.ncols() {
            self.lp.cols[j].iter().map(|&(r, v)| (r, v * self.sign[r])).collect()
        } else {
            vec![(j - self.ncols(), 1.0)]
        }
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.lp.rows;
        let mut alpha = vec![0.0; m];
        for (r, v) in self.column(j) {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[(i, r)] * v;
            }
        }
        alpha
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.lp.rows;
        let mut pi = vec![0.0; m];
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = cost[bi];
            if cb != 0.0 {
                for (r, p) in pi.iter_mut().enumerate() {
                    *p += cb * self.binv[(i, r)];
                }
            }
        }
        pi
    }

    fn pivot(&mut self, r: usize, j: usize, alpha: &[f64]) -> Result<()> {
        let m = self.lp.rows;
        let theta = self.xb[r] / alpha[r];
        for i in 0..m {
            if i != r {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        let piv = alpha[r];
        for c in 0..m {
            self.binv[(r, c)] /= piv;
        }
        for i in 0..m {
            if i != r && alpha[i] != 0.0 {
                let f = alpha[i];
                for c in 0..m {
                    let v = self.binv[(r, c)];
                    self.binv[(i, c)] -= f * v;
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::SolverFailure {
                message: format!("simplex exceeded {} pivots", self.max_pivots),
                residuals: Residuals {
                    iterations: self.pivots,
                    ..Residuals::default()
                },
            });
        }
        if self.pivots % REFACTOR == 0 {
            self.refactor();
        }
        Ok(())
    }

    fn refactor(&mut self) {
        let m = self.lp.rows;
        let mut bmat = DMatrix::zeros(m, m);
        for (i, &j) in self.basis.iter().enumerate() {
            for (r, v) in self.column(j) {
                bmat[(r, i)] = v;
            }
        }
        if let Some(inv) = bmat.lu().try_inverse() {
            self.binv = inv;
            let b: Vec<f64> = self.lp.b.iter().map(|v| v.abs()).collect();
            for i in 0..m {
                self.xb[i] = (0..m).map(|c| self.binv[(i, c)] * b[c]).sum();
            }
        }
    }

    /// Runs Bland's rule to optimality over the columns accepted by `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> Result<()> {
        loop {
            let pi = self.duals(cost);
            let entering = (0..cost.len()).find(|&j| {
                if self.is_basic[j] || !allowed(j) {
                    return false;
                }
                let d = cost[j] - self.column(j).iter().map(|&(r, v)| pi[r] * v).sum::<f64>();
                d < -self.tol
            });
            let Some(j) = entering else {
                return Ok(());
            };
            let alpha = self.ftran(j);
            let mut leave: Option<(usize, f64)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if a > PIVOT_TOL {
                    let ratio = self.xb[i].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Infeasible("linear program is unbounded".into()));
            };
            self.xb[r] = self.xb[r].max(0.0);
            self.pivot(r, j, &alpha)?;
        }
    }
}

pub(crate) fn solve(lp: &StandardLp, tol: f64, max_pivots: usize) -> Result<SimplexResult> {
    let m = lp.rows;
    let n = lp.cols.len();
    let mut t = Tableau::new(lp, tol, max_pivots);

    let phase1: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    t.optimize(&phase1, |_| true)?;
    t.refactor();
    let infeasibility: f64 = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v.abs())
        .sum();
    let scale = 1.0 + lp.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if infeasibility > 1e-7 * scale {
        return Err(Error::Infeasible(format!(
            "linear program is infeasible (phase-one residual {infeasibility:e})"
        )));
    }

    // Drive basic artificials out where a structural column can replace them.
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        let row: Vec<f64> = (0..m).map(|c| t.binv[(r, c)]).collect();
        let replacement = (0..n).find(|&j| {
            !t.is_basic[j]
                && t.column(j).iter().map(|&(i, v)| row[i] * v).sum::<f64>().abs() > 1e-7
        });
        if let Some(j) = replacement {
            let alpha = t.ftran(j);
            t.xb[r] = 0.0;
            t.pivot(r, j, &alpha)?;
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.resize(n + m, 0.0);
    t.optimize(&phase2, |j| j < n)?;
    t.refactor();

    let mut x = vec![0.0; n];
    for (&j, &v) in t.basis.iter().zip(&t.xb) {
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
    Ok(SimplexResult {
        x,
        objective,
        pivots: t.pivots,
    })
}
