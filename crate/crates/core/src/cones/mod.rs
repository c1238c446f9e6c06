//! Polyhedral ordering cones: primal/dual descriptions via double
//! description, pointedness/solidity, membership with margins, normality
//! constant estimation, order intervals, and Bouligand tangent cones of
//! polyhedral convex sets.

mod dd;

pub use dd::{double_description, DdCone};

use crate::norm::{add, dot, scale, sub, NormId};
use crate::numerics::{solve_lp, LpProblem, LpResult, Tolerance};
use crate::sample;
use crate::sets::GenSet;
use crate::{Error, Result};

/// Double-description dimension bound. Laws are exercised at desk scale.
pub const DD_DIM_CAP: usize = 16;

/// Closed convex polyhedral cone with both descriptions.
///
/// `dual_generators` are the facet normals: x is in the cone iff y·x >= 0
/// for every dual generator y. Both generator lists are unit-norm, deduped,
/// minimal, and sorted, so equal cones have equal representations.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    dual_generators: Vec<Vec<f64>>,
    pointed: bool,
    solid: bool,
}

impl PolyhedralCone {
    pub fn from_generators(dim: usize, rays: &[Vec<f64>], tol: &Tolerance) -> Result<Self> {
        check_dims(dim, rays)?;
        let generators = canonical_rays(rays, tol);
        // dual cone {y | y·r >= 0} described by the generators as normals
        let dual = double_description(dim, &generators, DD_DIM_CAP)?;
        let dual_generators = canonical_rays(&dual.ray_generators(), tol);
        Ok(Self::assemble(dim, generators, dual_generators, tol))
    }

    pub fn from_halfspaces(dim: usize, normals: &[Vec<f64>], tol: &Tolerance) -> Result<Self> {
        check_dims(dim, normals)?;
        let dual_generators = canonical_rays(normals, tol);
        let primal = double_description(dim, &dual_generators, DD_DIM_CAP)?;
        let generators = canonical_rays(&primal.ray_generators(), tol);
        Ok(Self::assemble(dim, generators, dual_generators, tol))
    }

    /// Nonnegative orthant of the given dimension.
    pub fn orthant(dim: usize, tol: &Tolerance) -> Self {
        let gens: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
        Self::from_generators(dim, &gens, tol).expect("orthant construction cannot fail")
    }

    /// The trivial cone {0}.
    pub fn zero(dim: usize, tol: &Tolerance) -> Self {
        Self::from_generators(dim, &[], tol).expect("zero cone construction cannot fail")
    }

    fn assemble(
        dim: usize,
        generators: Vec<Vec<f64>>,
        dual_generators: Vec<Vec<f64>>,
        tol: &Tolerance,
    ) -> Self {
        let generators = prune_redundant(generators, tol);
        let dual_generators = prune_redundant(dual_generators, tol);
        let solid = rank(&generators) == dim;
        let pointed = rank(&dual_generators) == dim;
        PolyhedralCone {
            dim,
            generators,
            dual_generators,
            pointed,
            solid,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }
    pub fn dual_generators(&self) -> &[Vec<f64>] {
        &self.dual_generators
    }
    pub fn is_pointed(&self) -> bool {
        self.pointed
    }
    pub fn is_solid(&self) -> bool {
        self.solid
    }
    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn require_pointed(&self) -> Result<()> {
        if self.pointed {
            Ok(())
        } else {
            Err(Error::DegenerateCone("cone contains a line".into()))
        }
    }

    /// min_i y_i·x over the facet normals; +inf when there are none
    /// (whole space).
    pub fn dual_margin(&self, x: &[f64]) -> f64 {
        self.dual_generators
            .iter()
            .map(|y| dot(y, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership test through the facet normals. Returns (verdict, margin).
    /// Strict membership means the interior and requires a solid cone; its
    /// margin bar scales with |x| because the interior of a cone is a cone.
    pub fn contains(&self, x: &[f64], strict: bool, tol: &Tolerance) -> Result<(bool, f64)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let margin = self.dual_margin(x);
        if strict {
            if !self.solid {
                return Err(Error::NotSolid);
            }
            if margin == f64::INFINITY {
                return Ok((true, margin)); // whole space
            }
            let nx = NormId::L2.eval(x);
            if nx <= tol.feas_tol {
                return Ok((false, margin)); // origin sits on the boundary
            }
            Ok((margin >= tol.strict_margin * nx, margin))
        } else {
            Ok((margin >= -tol.feas_tol, margin))
        }
    }

    /// Membership decided through the primal generators by LP feasibility.
    /// Independent of the dual description; used as the cross-check route.
    pub fn contains_via_generators(&self, x: &[f64], tol: &Tolerance) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if self.generators.is_empty() {
            return Ok(NormId::L2.eval(x) <= tol.feas_tol);
        }
        let m = self.generators.len();
        let mut eq_matrix = vec![vec![0.0; m]; self.dim];
        for (j, g) in self.generators.iter().enumerate() {
            for i in 0..self.dim {
                eq_matrix[i][j] = g[i];
            }
        }
        let mut ineq_matrix = Vec::with_capacity(m);
        for j in 0..m {
            let mut row = vec![0.0; m];
            row[j] = -1.0;
            ineq_matrix.push(row);
        }
        let p = LpProblem {
            objective: vec![0.0; m],
            ineq_matrix,
            ineq_rhs: vec![0.0; m],
            eq_matrix,
            eq_rhs: x.to_vec(),
        };
        Ok(solve_lp(&p, tol)?.is_feasible())
    }

    /// A unit direction of maximal facet margin (Chebyshev-like center of the
    /// cone). Errors with NotSolid when the interior is empty.
    pub fn interior_direction(&self, tol: &Tolerance) -> Result<Vec<f64>> {
        if !self.solid {
            return Err(Error::NotSolid);
        }
        if self.dual_generators.is_empty() {
            let mut e = vec![0.0; self.dim];
            e[0] = 1.0;
            return Ok(e);
        }
        // maximize t s.t. y_i·d >= t, -1 <= d_j <= 1; vars (d, t)
        let n = self.dim;
        let mut ineq_matrix = Vec::new();
        let mut ineq_rhs = Vec::new();
        for y in &self.dual_generators {
            let mut row = vec![0.0; n + 1];
            for j in 0..n {
                row[j] = -y[j];
            }
            row[n] = 1.0;
            ineq_matrix.push(row);
            ineq_rhs.push(0.0);
        }
        for j in 0..n {
            let mut hi = vec![0.0; n + 1];
            hi[j] = 1.0;
            ineq_matrix.push(hi);
            ineq_rhs.push(1.0);
            let mut lo = vec![0.0; n + 1];
            lo[j] = -1.0;
            ineq_matrix.push(lo);
            ineq_rhs.push(1.0);
        }
        let mut objective = vec![0.0; n + 1];
        objective[n] = -1.0;
        let p = LpProblem {
            objective,
            ineq_matrix,
            ineq_rhs,
            ..Default::default()
        };
        match solve_lp(&p, tol)? {
            LpResult::Optimal { value, point } => {
                if -value <= tol.strict_margin {
                    return Err(Error::NotSolid);
                }
                let mut d = point[..n].to_vec();
                let nn = NormId::L2.eval(&d);
                for v in d.iter_mut() {
                    *v /= nn;
                }
                Ok(d)
            }
            _ => Err(Error::NumericalFailure(
                "interior direction LP failed".into(),
            )),
        }
    }
}

fn check_dims(dim: usize, vecs: &[Vec<f64>]) -> Result<()> {
    if dim > DD_DIM_CAP {
        return Err(Error::DimensionTooLarge(dim, DD_DIM_CAP));
    }
    for v in vecs {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// Unit-normalize, drop near-zeros, dedupe, sort.
pub(crate) fn canonical_rays(rays: &[Vec<f64>], _tol: &Tolerance) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    'outer: for r in rays {
        let n = NormId::L2.eval(r);
        if n < 1e-12 {
            continue;
        }
        let u = scale(1.0 / n, r);
        for seen in &out {
            if sub(seen, &u).iter().all(|d| d.abs() < 1e-9) {
                continue 'outer;
            }
        }
        out.push(u);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Drop generators that are nonnegative combinations of the others.
fn prune_redundant(rays: Vec<Vec<f64>>, tol: &Tolerance) -> Vec<Vec<f64>> {
    if rays.len() <= 1 {
        return rays;
    }
    let dim = rays[0].len();
    let mut keep: Vec<Vec<f64>> = rays;
    let mut i = 0;
    while i < keep.len() {
        if keep.len() <= 1 {
            break;
        }
        let others: Vec<Vec<f64>> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if in_conic_hull(&keep[i], &others, dim, tol) {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    keep
}

fn in_conic_hull(x: &[f64], gens: &[Vec<f64>], dim: usize, tol: &Tolerance) -> bool {
    if gens.is_empty() {
        return NormId::L2.eval(x) <= tol.feas_tol;
    }
    let m = gens.len();
    let mut eq_matrix = vec![vec![0.0; m]; dim];
    for (j, g) in gens.iter().enumerate() {
        for i in 0..dim {
            eq_matrix[i][j] = g[i];
        }
    }
    let mut ineq_matrix = Vec::with_capacity(m);
    for j in 0..m {
        let mut row = vec![0.0; m];
        row[j] = -1.0;
        ineq_matrix.push(row);
    }
    let p = LpProblem {
        objective: vec![0.0; m],
        ineq_matrix,
        ineq_rhs: vec![0.0; m],
        eq_matrix,
        eq_rhs: x.to_vec(),
    };
    matches!(solve_lp(&p, tol), Ok(r) if r.is_feasible())
}

/// Rank of a vector family by modified Gram-Schmidt.
pub(crate) fn rank(vecs: &[Vec<f64>]) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let n = NormId::L2.eval(&w);
        if n > 1e-9 {
            basis.push(scale(1.0 / n, &w));
        }
    }
    basis.len()
}

/// The set (rho*e - K) cap (-rho*e + K): a symmetric order interval around 0.
#[derive(Debug, Clone)]
pub struct OrderInterval {
    pub cone: PolyhedralCone,
    pub e: Vec<f64>,
    pub rho: f64,
}

impl OrderInterval {
    pub fn new(cone: PolyhedralCone, e: Vec<f64>, rho: f64, tol: &Tolerance) -> Result<Self> {
        if rho < 0.0 {
            return Err(Error::InvalidValue("order interval radius < 0".into()));
        }
        let (inside, _) = cone.contains(&e, true, tol)?;
        if !inside {
            return Err(Error::NotSolid);
        }
        Ok(OrderInterval { cone, e, rho })
    }

    /// x in (rho e - K) cap (-rho e + K), both sides non-strict.
    pub fn contains(&self, x: &[f64], tol: &Tolerance) -> Result<bool> {
        let upper = sub(&scale(self.rho, &self.e), x);
        let lower = add(x, &scale(self.rho, &self.e));
        let (a, _) = self.cone.contains(&upper, false, tol)?;
        let (b, _) = self.cone.contains(&lower, false, tol)?;
        Ok(a && b)
    }
}

/// Bouligand tangent cone of a ball-free convex polyhedral set at zbar, which
/// is cl cone(M - zbar) = cone({p - zbar} U rays).
pub fn tangent_cone(m: &GenSet, zbar: &[f64], tol: &Tolerance) -> Result<PolyhedralCone> {
    if m.radius() > 0.0 {
        return Err(Error::UnsupportedSet("tangent cone needs a ball-free set"));
    }
    if m.distance_to_core(zbar, tol)? > tol.feas_tol {
        return Err(Error::PointNotInSet);
    }
    let mut gens: Vec<Vec<f64>> = m.points().iter().map(|p| sub(p, zbar)).collect();
    gens.extend(m.rays().iter().cloned());
    PolyhedralCone::from_generators(zbar.len(), &gens, tol)
}

/// Sampled lower-bound estimate of the normality constant: the largest |z|
/// over vertices of K cap (y - K) across unit y in K. Monotone nondecreasing
/// in the number of samples; never exceeds the true constant.
pub fn normality_constant_estimate(
    k: &PolyhedralCone,
    norm: NormId,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<f64> {
    k.require_pointed()?;
    if k.generators().is_empty() {
        return Ok(0.0); // trivial cone: the order relation only relates 0 to 0
    }
    let mut rng = sample::rng_from_seed(seed);
    let mut best = 0.0f64;
    let gens = k.generators();
    for trial in 0..samples.max(1) {
        let y = if trial < gens.len() {
            gens[trial].clone()
        } else {
            let w = sample::simplex_weights(&mut rng, gens.len());
            let mut y = vec![0.0; k.dim()];
            for (wi, g) in w.iter().zip(gens) {
                for (yj, gj) in y.iter_mut().zip(g) {
                    *yj += wi * gj;
                }
            }
            y
        };
        let ny = norm.eval(&y);
        if ny < 1e-12 {
            continue;
        }
        let y = scale(1.0 / ny, &y);
        for v in interval_vertices(k, &y)? {
            best = best.max(norm.eval(&v));
        }
    }
    let _ = tol;
    Ok(best)
}

/// Vertices of the polytope K cap (y - K) by homogenization + double
/// description.
fn interval_vertices(k: &PolyhedralCone, y: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = k.dim();
    let mut hs: Vec<Vec<f64>> = Vec::new();
    for d in k.dual_generators() {
        let mut row = d.clone();
        row.push(0.0);
        hs.push(row); // Y z >= 0
        let mut row2: Vec<f64> = d.iter().map(|v| -v).collect();
        row2.push(dot(d, y));
        hs.push(row2); // Y (y - z) >= 0, homogenized with t
    }
    let mut t_row = vec![0.0; n];
    t_row.push(1.0);
    hs.push(t_row);
    let cone = double_description(n + 1, &hs, DD_DIM_CAP + 1)?;
    let mut verts = Vec::new();
    for r in cone.rays {
        let t = r[n];
        if t > 1e-9 {
            verts.push(r[..n].iter().map(|v| v / t).collect());
        }
    }
    Ok(verts)
}
