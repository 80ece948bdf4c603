//! Primal-dual interior-point method for
//!
//! ```text
//! maximize  b·y
//! s.t.      Z(y) = I + Σ_k y_k E_k ⪰ 0
//!           z_j(y) = 1 − s_j·y ≥ 0
//! ```
//!
//! where `E_k` is the symmetric unit matrix on the off-diagonal pair `k`.
//! `Z(y)` is the Gram matrix itself, so every iterate is a feasible Gram
//! matrix with unit diagonal. The conjugate problem is
//!
//! ```text
//! minimize  tr X + Σ_j x_j
//! s.t.      2·X_ab − Σ_j s_jk x_j = −b_k   for every pair k = (a, b)
//!           X ⪰ 0, x ≥ 0.
//! ```
//!
//! Search directions are HKM with Mehrotra predictor-corrector steps. `y`
//! starts at zero (strictly feasible) and stays strictly feasible, `X` and
//! `x` start at the identity and one.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Residuals, Result};

pub(crate) struct Lmi<'a> {
    pub n: usize,
    pub pairs: &'a [(usize, usize)],
    pub b: &'a [f64],
    /// Sparse rows `s_j` of the linear constraints `s_j·y ≤ 1`.
    pub rows: &'a [[(usize, f64); 3]],
}

pub(crate) struct IpmSettings {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

pub(crate) struct IpmResult {
    pub gram: DMatrix<f64>,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub iterations: usize,
}

const STEP_FRACTION: f64 = 0.98;

fn gram(n: usize, pairs: &[(usize, usize)], y: &DVector<f64>) -> DMatrix<f64> {
    let mut z = DMatrix::identity(n, n);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        z[(a, b)] = y[k];
        z[(b, a)] = y[k];
    }
    z
}

fn pair_matrix(n: usize, pairs: &[(usize, usize)], dy: &DVector<f64>) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(n, n);
    for (k, &(a, b)) in pairs.iter().enumerate() {
        z[(a, b)] = dy[k];
        z[(b, a)] = dy[k];
    }
    z
}

fn row_dot(row: &[(usize, f64); 3], y: &DVector<f64>) -> f64 {
    row.iter().map(|&(k, c)| c * y[k]).sum()
}

/// Largest `α` with `x + α·dx ⪰ 0` for positive definite `x`.
fn psd_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(linv) = l.clone().solve_lower_triangular(&DMatrix::identity(x.nrows(), x.nrows()))
    else {
        return 0.0;
    };
    let w = &linv * dx * linv.transpose();
    let w = (&w + w.transpose()) * 0.5;
    let lmin = SymmetricEigen::new(w).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn ratio_step(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&v, &d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

struct Direction {
    dy: DVector<f64>,
    dz_mat: DMatrix<f64>,
    dz: DVector<f64>,
    dx_mat: DMatrix<f64>,
    dx: DVector<f64>,
}

struct Iterate<'a> {
    p: &'a Lmi<'a>,
    x_mat: &'a DMatrix<f64>,
    x: &'a DVector<f64>,
    z: &'a DVector<f64>,
    g: &'a DMatrix<f64>,
    rp: &'a DVector<f64>,
    schur: &'a Cholesky<f64, Dyn>,
}

impl Iterate<'_> {
    /// Solves the Newton system for the complementarity right-hand sides
    /// `rc_g = (σμI − XZ − corr)·Z⁻¹` and `rc = σμ − x∘z − corr`.
    fn direction(&self, rc_g: &DMatrix<f64>, rc: &DVector<f64>) -> Direction {
        let p = self.p;
        let m = p.pairs.len();
        let mut rhs = DVector::zeros(m);
        for (k, &(a, b)) in p.pairs.iter().enumerate() {
            rhs[k] = rc_g[(a, b)] + rc_g[(b, a)] - self.rp[k];
        }
        for (j, row) in p.rows.iter().enumerate() {
            let t = rc[j] / self.z[j];
            for &(k, c) in row {
                rhs[k] -= c * t;
            }
        }
        let dy = self.schur.solve(&rhs);
        let dz_mat = pair_matrix(p.n, p.pairs, &dy);
        let dz = DVector::from_iterator(p.rows.len(), p.rows.iter().map(|r| -row_dot(r, &dy)));
        let dx_mat = rc_g - self.x_mat * &dz_mat * self.g;
        let dx_mat = (&dx_mat + dx_mat.transpose()) * 0.5;
        let dx = DVector::from_iterator(
            p.rows.len(),
            (0..p.rows.len()).map(|j| (rc[j] - self.x[j] * dz[j]) / self.z[j]),
        );
        Direction {
            dy,
            dz_mat,
            dz,
            dx_mat,
            dx,
        }
    }
}

fn schur_matrix(p: &Lmi, x_mat: &DMatrix<f64>, g: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let m = p.pairs.len();
    let mut mat = DMatrix::zeros(m, m);
    for (k, &(a, b)) in p.pairs.iter().enumerate() {
        for (l, &(c, e)) in p.pairs.iter().enumerate().skip(k) {
            let v = x_mat[(a, c)] * g[(e, b)]
                + x_mat[(a, e)] * g[(c, b)]
                + x_mat[(b, c)] * g[(e, a)]
                + x_mat[(b, e)] * g[(c, a)];
            mat[(k, l)] = v;
            mat[(l, k)] = v;
        }
    }
    for (j, row) in p.rows.iter().enumerate() {
        for &(k, ck) in row {
            for &(l, cl) in row {
                mat[(k, l)] += d[j] * ck * cl;
            }
        }
    }
    mat
}

fn factor(mat: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = mat.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut trial = mat.clone();
        for i in 0..trial.nrows() {
            trial[(i, i)] += reg;
        }
        if let Some(c) = Cholesky::new(trial) {
            return Some(c);
        }
        reg = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
    }
    None
}

pub(crate) fn solve(p: &Lmi, settings: &IpmSettings) -> Result<IpmResult> {
    let n = p.n;
    let m = p.pairs.len();
    let q = p.rows.len();
    let nu = (n + q) as f64;
    let b = DVector::from_column_slice(p.b);
    let mut y = DVector::zeros(m);
    let mut x_mat = DMatrix::identity(n, n);
    let mut x = DVector::from_element(q, 1.0);
    let mut last = Residuals::default();

    for it in 0..=settings.max_iter {
        let z_mat = gram(n, p.pairs, &y);
        let z = DVector::from_iterator(q, p.rows.iter().map(|r| 1.0 - row_dot(r, &y)));
        let mut rp = -&b;
        for (k, &(a, bb)) in p.pairs.iter().enumerate() {
            rp[k] -= 2.0 * x_mat[(a, bb)];
        }
        for (j, row) in p.rows.iter().enumerate() {
            for &(k, c) in row {
                rp[k] += c * x[j];
            }
        }
        let gap = x_mat.component_mul(&z_mat).sum() + x.dot(&z);
        let pinf = rp.amax();
        last = Residuals {
            primal_infeasibility: pinf,
            constraint_violation: 0.0,
            gap,
            iterations: it,
        };
        if pinf <= settings.feas_tol && gap <= settings.gap_tol {
            return Ok(IpmResult {
                gram: z_mat,
                gap,
                primal_infeasibility: pinf,
                iterations: it,
            });
        }
        if it == settings.max_iter {
            break;
        }
        let fail = |msg: &str| Error::SolverFailure {
            message: msg.to_string(),
            residuals: last,
        };
        let g = Cholesky::new(z_mat.clone())
            .ok_or_else(|| fail("Gram iterate lost positive definiteness"))?
            .inverse();
        let g = (&g + g.transpose()) * 0.5;
        let d = x.component_div(&z);
        let schur = factor(schur_matrix(p, &x_mat, &g, &d))
            .ok_or_else(|| fail("Schur complement is not positive definite"))?;
        let iterate = Iterate {
            p,
            x_mat: &x_mat,
            x: &x,
            z: &z,
            g: &g,
            rp: &rp,
            schur: &schur,
        };
        let mu = gap / nu;

        let xz = x.component_mul(&z);
        let aff = iterate.direction(&(-&x_mat), &(-&xz));
        let ap = psd_step(&x_mat, &aff.dx_mat).min(ratio_step(&x, &aff.dx)).min(1.0);
        let ad = psd_step(&z_mat, &aff.dz_mat).min(ratio_step(&z, &aff.dz)).min(1.0);
        let x_aff = &x_mat + &aff.dx_mat * ap;
        let z_aff = &z_mat + &aff.dz_mat * ad;
        let gap_aff = x_aff.component_mul(&z_aff).sum()
            + (&x + &aff.dx * ap).dot(&(&z + &aff.dz * ad));
        let sigma = (gap_aff.max(0.0) / gap).powi(3).clamp(0.0, 1.0);

        let rc_g = &g * (sigma * mu) - &x_mat - &aff.dx_mat * &aff.dz_mat * &g;
        let rc = DVector::from_element(q, sigma * mu) - &xz - aff.dx.component_mul(&aff.dz);
        let dir = iterate.direction(&rc_g, &rc);

        let ap = (STEP_FRACTION * psd_step(&x_mat, &dir.dx_mat).min(ratio_step(&x, &dir.dx))).min(1.0);
        let ad = (STEP_FRACTION * psd_step(&z_mat, &dir.dz_mat).min(ratio_step(&z, &dir.dz))).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            return Err(fail("step length collapsed"));
        }
        x_mat += &dir.dx_mat * ap;
        x_mat = (&x_mat + x_mat.transpose()) * 0.5;
        x += &dir.dx * ap;
        y += &dir.dy * ad;
    }
    Err(Error::SolverFailure {
        message: format!("no convergence within {} iterations", settings.max_iter),
        residuals: last,
    })
}
