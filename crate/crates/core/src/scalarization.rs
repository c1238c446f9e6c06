//! Gerstewitz (Tammer) scalarizing functional and minimization of linear
//! functionals and of the functional itself over representable sets.
//!
//! With a solid polyhedral cone K, facet normals y_i, and e in int K, the
//! functional inf{t | x in t e - K} has the closed form max_i (y_i·x)/(y_i·e).
//! The definitional one-dimensional search is kept in the tests as an
//! independent oracle.

use crate::cones::PolyhedralCone;
use crate::norm::{add, dot, scale, NormId};
use crate::numerics::{solve_lp, LpProblem, LpResult, Tolerance};
use crate::sets::UnionSet;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Gerstewitz {
    cone: PolyhedralCone,
    e: Vec<f64>,
    denoms: Vec<f64>,
}

impl Gerstewitz {
    pub fn new(cone: PolyhedralCone, e: Vec<f64>, tol: &Tolerance) -> Result<Self> {
        if !cone.is_solid() {
            return Err(Error::NotSolid);
        }
        if cone.dual_generators().is_empty() {
            return Err(Error::DegenerateCone(
                "whole-space cone admits no finite scalarization".into(),
            ));
        }
        if e.len() != cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: cone.dim(),
                got: e.len(),
            });
        }
        let denoms: Vec<f64> = cone.dual_generators().iter().map(|y| dot(y, &e)).collect();
        if denoms.iter().any(|&d| d <= tol.strict_margin) {
            return Err(Error::NotSolid); // e is not safely interior
        }
        Ok(Gerstewitz { cone, e, denoms })
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }
    pub fn direction(&self) -> &[f64] {
        &self.e
    }

    /// Closed-form evaluation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.cone.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.cone.dim(),
                got: x.len(),
            });
        }
        Ok(self
            .cone
            .dual_generators()
            .iter()
            .zip(&self.denoms)
            .map(|(y, d)| dot(y, x) / d)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

#[derive(Debug, Clone)]
pub struct SetMinimum {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// false when the functional fell outside the dual cone (the attainment
    /// lemma's hypothesis), in which case the minimum may be escaping.
    pub functional_in_dual: bool,
}

/// Minimize y·x over the union. Errors with the violating ray when some
/// recession direction descends.
pub fn minimize_linear(
    s: &UnionSet,
    y: &[f64],
    k: &PolyhedralCone,
    tol: &Tolerance,
) -> Result<SetMinimum> {
    if y.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: y.len(),
        });
    }
    let functional_in_dual = k.generators().iter().all(|g| dot(y, g) >= -tol.feas_tol);
    let mut best = f64::INFINITY;
    let mut argmin = vec![0.0; s.dim()];
    for comp in s.components() {
        for r in comp.rays() {
            if dot(y, r) < -tol.feas_tol {
                return Err(Error::Unbounded { ray: r.clone() });
            }
        }
        for p in comp.points() {
            let v = dot(y, p);
            if v < best {
                best = v;
                argmin = p.clone();
            }
        }
        if comp.radius() > 0.0 {
            let u = comp.norm().dual_achiever(y);
            let v = best - comp.radius() * comp.norm().dual(y);
            if v < best {
                argmin = add(&argmin, &scale(-comp.radius(), &u));
                best = v;
            }
        }
    }
    Ok(SetMinimum {
        value: best,
        argmin,
        functional_in_dual,
    })
}

/// Minimize the Gerstewitz functional over the union via one LP per
/// component: min t s.t. y_i·(P lambda + R mu [+ r u]) <= t d_i with lambda on
/// the simplex. Ball terms are exact for polyhedral norms (the unit ball
/// enters the LP) and a documented lower bound for l2 (subtract
/// r·max_i |y_i|/d_i).
pub fn minimize_gerstewitz(
    s: &UnionSet,
    g: &Gerstewitz,
    tol: &Tolerance,
) -> Result<SetMinimum> {
    if s.dim() != g.cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.cone.dim(),
            got: s.dim(),
        });
    }
    let n = s.dim();
    let duals = g.cone.dual_generators();
    let mut best = f64::INFINITY;
    let mut argmin = vec![0.0; n];

    for comp in s.components() {
        let np = comp.points().len();
        let nr = comp.rays().len();
        let r = comp.radius();
        let polyhedral_ball = r > 0.0 && comp.norm() != NormId::L2;
        // vars: lambda (np), mu (nr), [u+, u- (2n) if polyhedral ball], t
        let nu = if polyhedral_ball { 2 * n } else { 0 };
        let nv = np + nr + nu + 1;
        let t_col = nv - 1;

        let mut ineq_matrix: Vec<Vec<f64>> = Vec::new();
        let mut ineq_rhs: Vec<f64> = Vec::new();
        for (y, d) in duals.iter().zip(&g.denoms) {
            let mut row = vec![0.0; nv];
            for (j, p) in comp.points().iter().enumerate() {
                row[j] = dot(y, p);
            }
            for (j, ry) in comp.rays().iter().enumerate() {
                row[np + j] = dot(y, ry);
            }
            if polyhedral_ball {
                for j in 0..n {
                    row[np + nr + j] = r * y[j];
                    row[np + nr + n + j] = -r * y[j];
                }
            }
            row[t_col] = -d;
            ineq_matrix.push(row);
            ineq_rhs.push(0.0);
        }
        // nonnegativity of lambda, mu, u+-
        for j in 0..np + nr + nu {
            let mut row = vec![0.0; nv];
            row[j] = -1.0;
            ineq_matrix.push(row);
            ineq_rhs.push(0.0);
        }
        if polyhedral_ball {
            match comp.norm() {
                NormId::L1 => {
                    let mut row = vec![0.0; nv];
                    for j in 0..2 * n {
                        row[np + nr + j] = 1.0;
                    }
                    ineq_matrix.push(row);
                    ineq_rhs.push(1.0);
                }
                NormId::LInf => {
                    for j in 0..n {
                        let mut row = vec![0.0; nv];
                        row[np + nr + j] = 1.0;
                        row[np + nr + n + j] = 1.0;
                        ineq_matrix.push(row);
                        ineq_rhs.push(1.0);
                    }
                }
                NormId::L2 => unreachable!(),
            }
        }
        let mut eqrow = vec![0.0; nv];
        for v in eqrow.iter_mut().take(np) {
            *v = 1.0;
        }
        let mut objective = vec![0.0; nv];
        objective[t_col] = 1.0;
        let p = LpProblem {
            objective,
            ineq_matrix,
            ineq_rhs,
            eq_matrix: vec![eqrow],
            eq_rhs: vec![1.0],
        };
        match solve_lp(&p, tol)? {
            LpResult::Optimal { value, point } => {
                let mut v = value;
                let mut x = vec![0.0; n];
                for (j, pt) in comp.points().iter().enumerate() {
                    for i in 0..n {
                        x[i] += point[j] * pt[i];
                    }
                }
                for (j, ry) in comp.rays().iter().enumerate() {
                    for i in 0..n {
                        x[i] += point[np + j] * ry[i];
                    }
                }
                if polyhedral_ball {
                    for i in 0..n {
                        x[i] += r * (point[np + nr + i] - point[np + nr + n + i]);
                    }
                }
                if r > 0.0 && comp.norm() == NormId::L2 {
                    let corr = duals
                        .iter()
                        .zip(&g.denoms)
                        .map(|(y, d)| NormId::L2.eval(y) / d)
                        .fold(0.0f64, f64::max);
                    v -= r * corr;
                }
                if v < best {
                    best = v;
                    argmin = x;
                }
            }
            LpResult::Unbounded { ray } => {
                let mut rx = vec![0.0; n];
                for (j, pt) in comp.points().iter().enumerate() {
                    for i in 0..n {
                        rx[i] += ray[j] * pt[i];
                    }
                }
                for (j, ry) in comp.rays().iter().enumerate() {
                    for i in 0..n {
                        rx[i] += ray[np + j] * ry[i];
                    }
                }
                return Err(Error::Unbounded { ray: rx });
            }
            LpResult::Infeasible(_) => {
                return Err(Error::NumericalFailure(
                    "scalarization LP infeasible on a nonempty component".into(),
                ))
            }
        }
    }
    Ok(SetMinimum {
        value: best,
        argmin,
        functional_in_dual: true,
    })
}

/// The order-interval radius that makes the nonconvex cancellation law go
/// through: with m = min of the functional over B (positive since 0 is not
/// in B+K), the proof wants phi(b) > eps strictly; eps = m/2 and rho = eps/2
/// give a uniformly safe margin.
pub fn compute_rho(b: &UnionSet, g: &Gerstewitz, tol: &Tolerance) -> Result<f64> {
    let m = minimize_gerstewitz(b, g, tol)?.value;
    if m <= tol.strict_margin {
        return Err(Error::HypothesisFailed(format!(
            "0 lies in B+K (min of the scalarizing functional over B is {m:.3e})"
        )));
    }
    Ok(m / 4.0)
}
