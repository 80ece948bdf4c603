use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{Cut, WeightedGraph};
use crate::oracle::{brute_sparsest_cut, OracleLimits, SparsestCutInstance};

/// A non-uniform sparsest-cut solver with a declared approximation factor.
pub trait SparsestCutSolver: Sync {
    fn name(&self) -> &'static str;

    /// Declared `α ≥ 1` with `φ(returned) ≤ α·φ*`, if the solver has one.
    fn approx_factor(&self) -> Option<f64>;

    /// Returns a cut separating at least one demand pair.
    fn find_cut(&self, inst: &SparsestCutInstance) -> Result<Cut>;
}

/// Runs `solver` and recomputes the sparsity of the cut it returned.
pub fn solve_sparsest(
    solver: &dyn SparsestCutSolver,
    inst: &SparsestCutInstance,
) -> Result<(Cut, f64)> {
    let cut = solver.find_cut(inst)?;
    match inst.sparsity(&cut)? {
        Some(phi) => Ok((cut, phi)),
        None => Err(Error::Internal(format!(
            "sparsest-cut solver `{}` returned a cut separating no demand",
            solver.name()
        ))),
    }
}

/// Exhaustive enumeration; `α = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSparsestCut {
    pub limits: OracleLimits,
}

impl SparsestCutSolver for ExactSparsestCut {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn approx_factor(&self) -> Option<f64> {
        Some(1.0)
    }

    fn find_cut(&self, inst: &SparsestCutInstance) -> Result<Cut> {
        brute_sparsest_cut(inst, &self.limits).map(|r| r.cut)
    }
}

/// Sweep cuts along the low generalized eigenvectors of
/// `L_cap·x = λ·(L_dem + εI)·x`. Heuristic with no declared factor.
#[derive(Clone, Copy, Debug)]
pub struct SpectralSweep {
    /// Number of eigenvectors swept, smallest eigenvalues first.
    pub vectors: usize,
}

impl Default for SpectralSweep {
    fn default() -> Self {
        Self { vectors: 4 }
    }
}

fn laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.u, e.u)] += e.w;
        l[(e.v, e.v)] += e.w;
        l[(e.u, e.v)] -= e.w;
        l[(e.v, e.u)] -= e.w;
    }
    l
}

impl SparsestCutSolver for SpectralSweep {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn approx_factor(&self) -> Option<f64> {
        None
    }

    fn find_cut(&self, inst: &SparsestCutInstance) -> Result<Cut> {
        let n = inst.n();
        if n < 2 || !inst.is_feasible() {
            return Err(Error::Infeasible("no cut separates a demand pair".into()));
        }
        let lc = laplacian(inst.capacity_graph());
        let mut ld = laplacian(inst.demand_graph());
        let eps = 1e-9 * (1.0 + ld.trace() / n as f64);
        for i in 0..n {
            ld[(i, i)] += eps;
        }
        let chol = ld
            .cholesky()
            .ok_or_else(|| Error::Internal("demand Laplacian is not positive definite".into()))?;
        let linv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::Internal("singular Cholesky factor".into()))?;
        let c = &linv * lc * linv.transpose();
        let eig = SymmetricEigen::new((&c + c.transpose()) * 0.5);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

        let mut best: Option<(f64, Cut)> = None;
        for &idx in order.iter().take(self.vectors.max(1) + 1) {
            let x = linv.transpose() * eig.eigenvectors.column(idx);
            let mut verts: Vec<usize> = (0..n).collect();
            verts.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
            let mut side = vec![false; n];
            for &v in &verts[..n - 1] {
                side[v] = true;
                let cut = Cut::new(side.clone());
                if let Some(phi) = inst.sparsity(&cut)? {
                    if best.as_ref().is_none_or(|(b, _)| phi < *b) {
                        best = Some((phi, cut));
                    }
                }
            }
        }
        best.map(|(_, c)| c)
            .ok_or_else(|| Error::Infeasible("no sweep cut separates a demand pair".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance() -> SparsestCutInstance {
        // Two triangles joined by a light bridge; demand across the bridge.
        SparsestCutInstance::new(
            6,
            [
                (0, 1, 5.0),
                (1, 2, 5.0),
                (0, 2, 5.0),
                (3, 4, 5.0),
                (4, 5, 5.0),
                (3, 5, 5.0),
                (2, 3, 1.0),
            ],
            [(0, 5, 1.0), (1, 4, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn exact_matches_oracle() {
        let (cut, phi) = solve_sparsest(&ExactSparsestCut::default(), &instance()).unwrap();
        assert_eq!(phi, 0.5);
        assert!(cut.same_bipartition(&Cut::from_members(6, &[0, 1, 2]).unwrap()));
    }

    #[test]
    fn spectral_finds_the_bridge() {
        let (cut, phi) = solve_sparsest(&SpectralSweep::default(), &instance()).unwrap();
        assert_eq!(phi, 0.5);
        assert!(cut.same_bipartition(&Cut::from_members(6, &[0, 1, 2]).unwrap()));
        assert!(SpectralSweep::default().approx_factor().is_none());
    }
}
