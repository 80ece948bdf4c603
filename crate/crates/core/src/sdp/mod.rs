//! The Max Cut SDP strengthened with the triangle inequalities on the
//! signed vectors `{±ū}`, its integrality test, and the robust algorithm.
//!
//! Over the Gram matrix `X` with `X_uu = 1` the objective is
//! `¼·Σ w_uv (2 − 2X_uv)`. For every triple `a < b < c`, writing
//! `x = X_ab`, `y = X_bc`, `z = X_ac`, the four inequalities
//!
//! ```text
//!  x + y − z ≤ 1     x − y + z ≤ 1     −x + y + z ≤ 1     −x − y − z ≤ 1
//! ```
//!
//! are exactly the triangle inequalities among `±ā, ±b̄, ±c̄`. They are added
//! by exact separation in a cutting-plane loop.

mod ipm;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Residuals, Result};
use crate::graph::{cut_weight, Cut, WeightedGraph};

/// Coefficients on `(X_ab, X_bc, X_ac)` of the four signed forms.
pub const SIGN_PATTERNS: [[i8; 3]; 4] = [[1, 1, -1], [1, -1, 1], [-1, 1, 1], [-1, -1, -1]];

/// One inequality `s₀·X_ab + s₁·X_bc + s₂·X_ac ≤ 1` over a triple `a < b < c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TriangleConstraint {
    pub triple: (usize, usize, usize),
    pub signs: [i8; 3],
}

impl TriangleConstraint {
    pub fn value(&self, gram: &DMatrix<f64>) -> f64 {
        let (a, b, c) = self.triple;
        self.signs[0] as f64 * gram[(a, b)]
            + self.signs[1] as f64 * gram[(b, c)]
            + self.signs[2] as f64 * gram[(a, c)]
    }

    /// Amount by which the inequality is violated (negative when slack).
    pub fn violation(&self, gram: &DMatrix<f64>) -> f64 {
        self.value(gram) - 1.0
    }
}

/// The relaxation of one graph; triangle constraints are generated lazily.
#[derive(Clone, Debug)]
pub struct MaxCutSdpProblem {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// Weight of each unordered pair, zero when there is no edge.
    pair_weights: Vec<f64>,
    total_weight: f64,
}

impl MaxCutSdpProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// `4·C(n, 3)`.
    pub fn constraint_count(&self) -> usize {
        let n = self.n;
        if n < 3 {
            0
        } else {
            4 * n * (n - 1) * (n - 2) / 6
        }
    }

    pub fn triangle_constraints(&self) -> impl Iterator<Item = TriangleConstraint> + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| {
            (a + 1..n).flat_map(move |b| {
                (b + 1..n).flat_map(move |c| {
                    SIGN_PATTERNS.iter().map(move |&signs| TriangleConstraint {
                        triple: (a, b, c),
                        signs,
                    })
                })
            })
        })
    }

    /// `¼·Σ w_uv (2 − 2X_uv)`.
    pub fn objective(&self, gram: &DMatrix<f64>) -> f64 {
        self.pairs
            .iter()
            .zip(&self.pair_weights)
            .map(|(&(a, b), &w)| 0.5 * w * (1.0 - gram[(a, b)]))
            .sum()
    }

    /// Largest violation over every triangle constraint, with the violated
    /// constraints above `threshold` sorted by decreasing violation and then
    /// by triple and sign pattern.
    fn separate(&self, gram: &DMatrix<f64>, threshold: f64) -> (f64, Vec<TriangleConstraint>) {
        let n = self.n;
        let per_a: Vec<(f64, Vec<(f64, TriangleConstraint)>)> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut worst = f64::NEG_INFINITY;
                let mut found = Vec::new();
                for b in a + 1..n {
                    for c in b + 1..n {
                        for signs in SIGN_PATTERNS {
                            let t = TriangleConstraint {
                                triple: (a, b, c),
                                signs,
                            };
                            let v = t.violation(gram);
                            worst = worst.max(v);
                            if v > threshold {
                                found.push((v, t));
                            }
                        }
                    }
                }
                (worst, found)
            })
            .collect();
        let worst = per_a.iter().map(|(w, _)| *w).fold(f64::NEG_INFINITY, f64::max);
        let mut all: Vec<(f64, TriangleConstraint)> =
            per_a.into_iter().flat_map(|(_, f)| f).collect();
        all.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        (worst, all.into_iter().map(|(_, t)| t).collect())
    }
}

/// Builds the relaxation of `g`. Requires `n ≥ 2`.
pub fn build_sdp(g: &WeightedGraph) -> Result<MaxCutSdpProblem> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Validation(format!(
            "the SDP relaxation needs at least two vertices, got {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut p = MaxCutSdpProblem {
        n,
        pairs,
        pair_weights: Vec::new(),
        total_weight: g.total_weight(),
    };
    let mut weights = vec![0.0; p.pairs.len()];
    for e in g.edges() {
        weights[p.pair_index(e.u, e.v)] += e.w;
    }
    p.pair_weights = weights;
    Ok(p)
}

/// Solver tolerances. `obj` is relative to the total edge weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SdpTolerances {
    pub psd: f64,
    pub feas: f64,
    pub obj: f64,
    /// Integrality threshold: entries with `|X_uv| ≥ 1 − int` count as ±1.
    pub int: f64,
    pub max_iterations: usize,
    pub max_rounds: usize,
}

impl Default for SdpTolerances {
    fn default() -> Self {
        Self {
            psd: 1e-7,
            feas: 1e-7,
            obj: 1e-7,
            int: 1e-4,
            max_iterations: 200,
            max_rounds: 100,
        }
    }
}

impl SdpTolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("psd", self.psd), ("feas", self.feas), ("obj", self.obj), ("int", self.int)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// The same tolerances, ten times tighter.
    pub fn tightened(&self) -> Self {
        Self {
            psd: self.psd / 10.0,
            feas: self.feas / 10.0,
            obj: self.obj / 10.0,
            ..*self
        }
    }
}

fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpSolution {
    #[serde(serialize_with = "serialize_matrix")]
    pub gram: DMatrix<f64>,
    /// `¼·Σ w_uv (2 − 2X_uv)` at `gram`.
    pub objective: f64,
    /// Upper bound on the optimum implied by the final duality gap.
    pub upper_bound: f64,
    pub residuals: Residuals,
    pub min_eigenvalue: f64,
    pub rounds: usize,
    pub active_constraints: usize,
}

/// Solves the relaxation by cutting planes over the triangle inequalities.
///
/// Every round solves the problem with the current constraint set from
/// scratch, scans all `4·C(n,3)` inequalities, and adds up to `5n` of the
/// most violated ones. The loop stops when no inequality is violated by
/// more than `tol.feas`.
pub fn solve_sdp(p: &MaxCutSdpProblem, tol: &SdpTolerances) -> Result<SdpSolution> {
    tol.validate()?;
    let scale = if p.total_weight > 0.0 { p.total_weight } else { 1.0 };
    let b: Vec<f64> = p.pair_weights.iter().map(|w| -0.5 * w / scale).collect();
    let settings = ipm::IpmSettings {
        gap_tol: tol.obj,
        feas_tol: tol.psd.min(tol.feas),
        max_iter: tol.max_iterations,
    };
    let mut active: Vec<TriangleConstraint> = Vec::new();
    let mut iterations = 0;
    for round in 1..=tol.max_rounds {
        let rows: Vec<[(usize, f64); 3]> = active
            .iter()
            .map(|t| {
                let (a, b, c) = t.triple;
                [
                    (p.pair_index(a, b), t.signs[0] as f64),
                    (p.pair_index(b, c), t.signs[1] as f64),
                    (p.pair_index(a, c), t.signs[2] as f64),
                ]
            })
            .collect();
        let lmi = ipm::Lmi {
            n: p.n,
            pairs: &p.pairs,
            b: &b,
            rows: &rows,
        };
        let r = ipm::solve(&lmi, &settings).map_err(|e| match e {
            Error::SolverFailure { message, mut residuals } => {
                residuals.iterations += iterations;
                Error::SolverFailure {
                    message: format!("round {round}: {message}"),
                    residuals,
                }
            }
            other => other,
        })?;
        iterations += r.iterations;
        let (worst, violated) = p.separate(&r.gram, tol.feas);
        if worst <= tol.feas {
            let objective = p.objective(&r.gram);
            let min_eigenvalue = SymmetricEigen::new(r.gram.clone()).eigenvalues.min();
            return Ok(SdpSolution {
                objective,
                upper_bound: objective + (r.gap + r.primal_infeasibility) * scale,
                gram: r.gram,
                residuals: Residuals {
                    primal_infeasibility: r.primal_infeasibility,
                    constraint_violation: worst.max(0.0),
                    gap: r.gap * scale,
                    iterations,
                },
                min_eigenvalue,
                rounds: round,
                active_constraints: active.len(),
            });
        }
        let mut added = 0;
        for t in violated {
            if added == 5 * p.n {
                break;
            }
            if !active.contains(&t) {
                active.push(t);
                added += 1;
            }
        }
        if added == 0 {
            return Err(Error::SolverFailure {
                message: "active triangle constraints remain violated".into(),
                residuals: Residuals {
                    primal_infeasibility: r.primal_infeasibility,
                    constraint_violation: worst,
                    gap: r.gap * scale,
                    iterations,
                },
            });
        }
    }
    Err(Error::SolverFailure {
        message: format!("cutting-plane loop exceeded {} rounds", tol.max_rounds),
        residuals: Residuals {
            iterations,
            ..Residuals::default()
        },
    })
}

/// Off-diagonal Gram entry with the smallest magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GramWitness {
    pub u: usize,
    pub v: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Integrality {
    Integral { cut: Cut },
    NonIntegral { witness: GramWitness, sign_inconsistent: bool },
}

fn weakest_entry(gram: &DMatrix<f64>) -> GramWitness {
    let n = gram.nrows();
    let mut best = GramWitness {
        u: 0,
        v: 1,
        value: gram[(0, 1)],
    };
    for u in 0..n {
        for v in u + 1..n {
            if gram[(u, v)].abs() < best.value.abs() {
                best = GramWitness {
                    u,
                    v,
                    value: gram[(u, v)],
                };
            }
        }
    }
    best
}

/// Integral iff every off-diagonal entry has `|X_uv| ≥ 1 − eps` and the
/// signs factor as `sign(X_uv) = σ_u σ_v`. The cut is `{u : σ_u = +1}` with
/// `σ_0 = +1`.
pub fn check_integrality(gram: &DMatrix<f64>, eps: f64) -> Integrality {
    let n = gram.nrows();
    if n < 2 {
        return Integrality::Integral {
            cut: Cut::new(vec![true; n]),
        };
    }
    let side: Vec<bool> = (0..n).map(|u| u == 0 || gram[(0, u)] > 0.0).collect();
    let mut large = true;
    let mut consistent = true;
    for u in 0..n {
        for v in u + 1..n {
            let x = gram[(u, v)];
            if x.abs() < 1.0 - eps {
                large = false;
            }
            if (x > 0.0) != (side[u] == side[v]) {
                consistent = false;
            }
        }
    }
    if large && consistent {
        Integrality::Integral { cut: Cut::new(side) }
    } else {
        Integrality::NonIntegral {
            witness: weakest_entry(gram),
            sign_inconsistent: large && !consistent,
        }
    }
}

/// Gram matrix of `û = σ_u·ū` with `σ_u = +1` on `S` and `−1` off it.
pub fn flipped_gram(gram: &DMatrix<f64>, s: &Cut) -> DMatrix<f64> {
    let side = s.side();
    DMatrix::from_fn(gram.nrows(), gram.ncols(), |u, v| {
        if side[u] == side[v] {
            gram[(u, v)]
        } else {
            -gram[(u, v)]
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaxCutStatus {
    Optimal,
    NotStableCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustMaxCut {
    pub status: MaxCutStatus,
    pub cut: Option<Cut>,
    pub value: Option<f64>,
    pub witness: Option<GramWitness>,
    /// Set when an integral Gram matrix was rejected because the cut value
    /// fell short of the SDP value by more than `obj · W_total`.
    pub certificate_failed: bool,
    /// Whether the gray-zone re-solve at tighter tolerances was used.
    pub retried: bool,
    pub tolerances: SdpTolerances,
    pub sdp: SdpSolution,
}

const GRAY_ZONE: f64 = 1e-2;

/// Solves the SDP; returns the cut when the solution is integral and the
/// cut value certifies optimality, and a non-stability certificate
/// otherwise.
pub fn robust_max_cut(g: &WeightedGraph, tol: &SdpTolerances) -> Result<RobustMaxCut> {
    let p = build_sdp(g)?;
    let attempt = |tol: &SdpTolerances| -> Result<(SdpSolution, Integrality, bool)> {
        let sol = solve_sdp(&p, tol)?;
        let verdict = check_integrality(&sol.gram, tol.int);
        let certified = match &verdict {
            Integrality::Integral { cut } => {
                cut_weight(g, cut)? >= sol.objective - tol.obj * g.total_weight()
            }
            Integrality::NonIntegral { .. } => false,
        };
        Ok((sol, verdict, certified))
    };
    let (mut sol, mut verdict, mut certified) = attempt(tol)?;
    let mut used = *tol;
    let gray = match &verdict {
        Integrality::Integral { .. } => !certified,
        Integrality::NonIntegral { witness, .. } => witness.value.abs() >= 1.0 - GRAY_ZONE,
    };
    if gray {
        used = tol.tightened();
        (sol, verdict, certified) = attempt(&used)?;
    }
    let out = match verdict {
        Integrality::Integral { cut } if certified => RobustMaxCut {
            status: MaxCutStatus::Optimal,
            value: Some(cut_weight(g, &cut)?),
            cut: Some(cut),
            witness: None,
            certificate_failed: false,
            retried: gray,
            tolerances: used,
            sdp: sol,
        },
        Integrality::Integral { .. } => RobustMaxCut {
            status: MaxCutStatus::NotStableCertificate,
            cut: None,
            value: None,
            witness: Some(weakest_entry(&sol.gram)),
            certificate_failed: true,
            retried: gray,
            tolerances: used,
            sdp: sol,
        },
        Integrality::NonIntegral { witness, .. } => RobustMaxCut {
            status: MaxCutStatus::NotStableCertificate,
            cut: None,
            value: None,
            witness: Some(witness),
            certificate_failed: false,
            retried: gray,
            tolerances: used,
            sdp: sol,
        },
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> SdpTolerances {
        SdpTolerances::default()
    }

    #[test]
    fn single_edge() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let sol = solve_sdp(&build_sdp(&g).unwrap(), &tol()).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-6);
        assert!((sol.gram[(0, 1)] + 1.0).abs() < 1e-5);
    }

    #[test]
    fn unit_triangle_is_fractional() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let sol = solve_sdp(&build_sdp(&g).unwrap(), &tol()).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-5, "{}", sol.objective);
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            assert!((sol.gram[(u, v)] + 1.0 / 3.0).abs() < 1e-3);
        }
        assert!(matches!(
            check_integrality(&sol.gram, 1e-4),
            Integrality::NonIntegral { .. }
        ));
        let r = robust_max_cut(&g, &tol()).unwrap();
        assert_eq!(r.status, MaxCutStatus::NotStableCertificate);
        assert!(r.witness.is_some());
    }

    #[test]
    fn path_is_integral() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let r = robust_max_cut(&g, &tol()).unwrap();
        assert_eq!(r.status, MaxCutStatus::Optimal);
        assert_eq!(r.value, Some(2.0));
        assert!(r.cut.unwrap().same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
        assert!((r.sdp.objective - 2.0).abs() < 1e-6);
    }

    #[test]
    fn constraint_family() {
        let g = WeightedGraph::new(4, []).unwrap();
        let p = build_sdp(&g).unwrap();
        assert_eq!(p.constraint_count(), 16);
        assert_eq!(p.triangle_constraints().count(), 16);
        // The perimeter form on the unit triangle is the all-minus pattern.
        assert!(p
            .triangle_constraints()
            .any(|t| t.triple == (0, 1, 2) && t.signs == [-1, -1, -1]));
        for a in 0..4 {
            for b in a + 1..4 {
                let k = p.pair_index(a, b);
                assert_eq!(p.pairs[k], (a, b));
            }
        }
    }

    #[test]
    fn exact_rank_one_is_integral() {
        let s = [1.0, -1.0, -1.0, 1.0];
        let gram = DMatrix::from_fn(4, 4, |i, j| s[i] * s[j]);
        match check_integrality(&gram, 1e-12) {
            Integrality::Integral { cut } => assert_eq!(cut.members(), vec![0, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_signs_are_rejected() {
        // All entries -1 on three vertices: large but not a rank-one sign pattern.
        let gram = DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { -1.0 });
        assert!(matches!(
            check_integrality(&gram, 1e-4),
            Integrality::NonIntegral {
                sign_inconsistent: true,
                ..
            }
        ));
    }

    #[test]
    fn rejects_tiny_graphs() {
        let g = WeightedGraph::new(1, []).unwrap();
        assert!(build_sdp(&g).is_err());
    }
}
