//! The universal set representation and its Minkowski algebra.
//!
//! A `GenSet` denotes conv(points) + cone(rays) + radius * (unit ball of the
//! ambient norm); `UnionSet` is a finite union of those. Every set the laws
//! quantify over is representable this way, and every operation below works
//! directly on the V-representation.

use crate::cones::PolyhedralCone;
use crate::norm::{add, dot, sub, NormId};
use crate::numerics::{project_onto_vset, solve_lp, LpProblem, Tolerance};
use crate::sample;
use crate::{Error, Result};
use rand_chacha::ChaCha12Rng;

pub const COMPONENT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenSet {
    dim: usize,
    norm: NormId,
    points: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
    radius: f64,
    open_ball: bool,
}

impl GenSet {
    pub fn new(
        points: Vec<Vec<f64>>,
        rays: Vec<Vec<f64>>,
        radius: f64,
        open_ball: bool,
        norm: NormId,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointList);
        }
        let dim = points[0].len();
        for v in points.iter().chain(rays.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        if radius < 0.0 {
            return Err(Error::InvalidValue("ball radius < 0".into()));
        }
        if open_ball && radius == 0.0 {
            return Err(Error::InvalidValue("open ball needs radius > 0".into()));
        }
        let mut canon_points: Vec<Vec<f64>> = Vec::new();
        'pts: for p in points {
            for q in &canon_points {
                if sub(&p, q).iter().all(|d| d.abs() < 1e-12) {
                    continue 'pts;
                }
            }
            canon_points.push(p);
        }
        canon_points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let canon_rays = crate::cones::canonical_rays(&rays, &Tolerance::default());
        Ok(GenSet {
            dim,
            norm,
            points: canon_points,
            rays: canon_rays,
            radius,
            open_ball,
        })
    }

    pub fn singleton(p: Vec<f64>, norm: NormId) -> Self {
        GenSet::new(vec![p], vec![], 0.0, false, norm).expect("singleton is always valid")
    }

    pub fn ball(center: Vec<f64>, radius: f64, open: bool, norm: NormId) -> Result<Self> {
        GenSet::new(vec![center], vec![], radius, open, norm)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn norm(&self) -> NormId {
        self.norm
    }
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn is_open(&self) -> bool {
        self.open_ball
    }

    /// Drop the open flag, i.e. pass to the closure.
    pub fn closure(&self) -> GenSet {
        let mut s = self.clone();
        s.open_ball = false;
        s
    }

    pub fn translate(&self, v: &[f64]) -> Result<GenSet> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        GenSet::new(
            self.points.iter().map(|p| add(p, v)).collect(),
            self.rays.clone(),
            self.radius,
            self.open_ball,
            self.norm,
        )
    }

    /// Minkowski sum of two convex components.
    pub fn sum(&self, other: &GenSet) -> Result<GenSet> {
        self.check_compatible(other)?;
        let mut points = Vec::with_capacity(self.points.len() * other.points.len());
        for p in &self.points {
            for q in &other.points {
                points.push(add(p, q));
            }
        }
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        GenSet::new(
            points,
            rays,
            self.radius + other.radius,
            self.open_ball || other.open_ball,
            self.norm,
        )
    }

    /// Append cone generators as recession rays (the "+ K" operation).
    pub fn with_cone(&self, k: &PolyhedralCone) -> Result<GenSet> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        let mut rays = self.rays.clone();
        rays.extend(k.generators().iter().cloned());
        GenSet::new(
            self.points.clone(),
            rays,
            self.radius,
            self.open_ball,
            self.norm,
        )
    }

    pub fn inflate(&self, extra_radius: f64, open: bool) -> Result<GenSet> {
        GenSet::new(
            self.points.clone(),
            self.rays.clone(),
            self.radius + extra_radius,
            self.open_ball || (open && extra_radius > 0.0),
            self.norm,
        )
    }

    fn check_compatible(&self, other: &GenSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if self.norm != other.norm {
            return Err(Error::NormMismatch);
        }
        Ok(())
    }

    /// Distance from x to conv(points) + cone(rays), ignoring the ball term.
    pub fn distance_to_core(&self, x: &[f64], tol: &Tolerance) -> Result<f64> {
        Ok(project_onto_vset(x, &self.points, &self.rays, self.norm, tol)?.distance)
    }

    /// Distance from x to the closure of the whole component:
    /// max(0, d(x, core) - radius). Open flags are ignored, matching the
    /// closure-insensitivity of the excess.
    pub fn distance_to_convex(&self, x: &[f64], tol: &Tolerance) -> Result<f64> {
        Ok((self.distance_to_core(x, tol)? - self.radius).max(0.0))
    }

    /// sup over the component of y·x, or +inf if a ray escapes.
    pub fn support_core(&self, y: &[f64], tol: &Tolerance) -> f64 {
        for r in &self.rays {
            if dot(y, r) > tol.feas_tol {
                return f64::INFINITY;
            }
        }
        let best = self
            .points
            .iter()
            .map(|p| dot(y, p))
            .fold(f64::NEG_INFINITY, f64::max);
        best + self.radius * self.norm.dual(y)
    }

    /// Does every ray of `self` lie in cone(target_rays)? LP route, no dual
    /// description needed.
    fn rays_in_recession_of(&self, target: &GenSet, tol: &Tolerance) -> Result<Option<Vec<f64>>> {
        for r in &self.rays {
            if !in_conic_hull_lp(r, &target.rays, self.dim, tol)? {
                return Ok(Some(r.clone()));
            }
        }
        Ok(None)
    }

    /// Deterministic probe points: hull points, pairwise blends, short ray
    /// shifts. Used by the sampled union-coverage checks.
    pub fn probe_points(&self) -> Vec<Vec<f64>> {
        let mut out = self.points.clone();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                for t in [0.25, 0.5, 0.75] {
                    let m: Vec<f64> = self.points[i]
                        .iter()
                        .zip(&self.points[j])
                        .map(|(a, b)| a * (1.0 - t) + b * t)
                        .collect();
                    out.push(m);
                }
            }
        }
        let base = out.clone();
        for r in &self.rays {
            for p in &base {
                for t in [0.5, 1.0, 3.0] {
                    out.push(p.iter().zip(r).map(|(a, b)| a + t * b).collect());
                }
            }
        }
        out
    }

    /// Seeded random points of the component (hull blend + ray stretch + ball
    /// jitter, strictly inside an open ball).
    pub fn sample_points(&self, count: usize, rng: &mut ChaCha12Rng) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let w = sample::simplex_weights(rng, self.points.len());
            let mut x = vec![0.0; self.dim];
            for (wi, p) in w.iter().zip(&self.points) {
                for (xi, pi) in x.iter_mut().zip(p) {
                    *xi += wi * pi;
                }
            }
            for r in &self.rays {
                let t = sample::uniform_in(rng, 0.0, 2.0);
                for (xi, ri) in x.iter_mut().zip(r) {
                    *xi += t * ri;
                }
            }
            if self.radius > 0.0 {
                let d = sample::unit_direction(rng, self.dim);
                let nd = self.norm.eval(&d);
                let t = sample::uniform_in(rng, 0.0, 0.95 * self.radius);
                for (xi, di) in x.iter_mut().zip(&d) {
                    *xi += t * di / nd;
                }
            }
            out.push(x);
        }
        out
    }
}

/// Finite union of convex components sharing dimension and norm.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionSet {
    components: Vec<GenSet>,
}

impl From<GenSet> for UnionSet {
    fn from(g: GenSet) -> Self {
        UnionSet {
            components: vec![g],
        }
    }
}

/// Result of an inclusion check. `margin` is the worst slack (positive when
/// the inclusion holds with room); `exact` is false when union coverage was
/// decided by sampling rather than per-component convex inclusion.
#[derive(Debug, Clone)]
pub struct IncludeReport {
    pub holds: bool,
    pub margin: f64,
    pub witness: Option<Vec<f64>>,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConicPredicates {
    pub k_bounded: bool,
    pub k_convex: bool,
    pub k_closed: bool,
    /// true when k_closed refers to the closure of open components
    pub closure_caveat: bool,
    /// true when k_convex was decided by sampled union coverage
    pub k_convex_sampled: bool,
}

impl UnionSet {
    pub fn new(components: Vec<GenSet>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::EmptyPointList);
        };
        let (dim, norm) = (first.dim(), first.norm());
        for c in &components {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.dim(),
                });
            }
            if c.norm() != norm {
                return Err(Error::NormMismatch);
            }
        }
        Ok(UnionSet { components })
    }

    pub fn components(&self) -> &[GenSet] {
        &self.components
    }
    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }
    pub fn norm(&self) -> NormId {
        self.components[0].norm()
    }

    pub fn closure(&self) -> UnionSet {
        UnionSet {
            components: self.components.iter().map(|c| c.closure()).collect(),
        }
    }

    pub fn translate(&self, v: &[f64]) -> Result<UnionSet> {
        let comps: Result<Vec<GenSet>> =
            self.components.iter().map(|c| c.translate(v)).collect();
        Ok(UnionSet { components: comps? })
    }

    /// All rays of all components; the recession structure used by the
    /// K-boundedness predicate.
    pub fn pooled_rays(&self) -> Vec<Vec<f64>> {
        let mut rays = Vec::new();
        for c in &self.components {
            rays.extend(c.rays().iter().cloned());
        }
        rays
    }

    pub fn recession_cone(&self, tol: &Tolerance) -> Result<PolyhedralCone> {
        PolyhedralCone::from_generators(self.dim(), &self.pooled_rays(), tol)
    }

    /// Membership with margin. Non-strict tests against the closure of each
    /// component; strict requires clearing the ball radius by strict_margin,
    /// which is also the honest reading of an open ball.
    pub fn membership(&self, x: &[f64], strict: bool, tol: &Tolerance) -> Result<(bool, f64)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let mut best = f64::NEG_INFINITY;
        for c in &self.components {
            let d = c.distance_to_core(x, tol)?;
            best = best.max(c.radius() - d);
        }
        let holds = if strict {
            best >= tol.strict_margin
        } else {
            best >= -tol.feas_tol
        };
        Ok((holds, best))
    }

    /// sup over the union of y·x (+inf if some ray escapes along y).
    pub fn support_value(&self, y: &[f64], tol: &Tolerance) -> Result<f64> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.support_core(y, tol))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn minkowski_sum(&self, other: &UnionSet) -> Result<UnionSet> {
        let count = self.components.len() * other.components.len();
        if count > COMPONENT_CAP {
            return Err(Error::ComponentBlowup(count, COMPONENT_CAP));
        }
        let mut comps = Vec::with_capacity(count);
        for a in &self.components {
            for b in &other.components {
                comps.push(a.sum(b)?);
            }
        }
        UnionSet::new(comps)
    }

    pub fn with_cone(&self, k: &PolyhedralCone) -> Result<UnionSet> {
        let comps: Result<Vec<GenSet>> =
            self.components.iter().map(|c| c.with_cone(k)).collect();
        Ok(UnionSet { components: comps? })
    }

    /// cl conv of the union (plus K when given): pool the points and rays,
    /// keep the shared radius. Mixed radii are refused unless `overapprox`
    /// is set, in which case the largest radius is pooled and the result
    /// over-approximates the hull.
    pub fn convexify(
        &self,
        k: Option<&PolyhedralCone>,
        overapprox: bool,
        _tol: &Tolerance,
    ) -> Result<GenSet> {
        let r0 = self.components[0].radius();
        let mixed = self
            .components
            .iter()
            .any(|c| (c.radius() - r0).abs() > 1e-12);
        if mixed && !overapprox {
            return Err(Error::MixedRadii);
        }
        let radius = self
            .components
            .iter()
            .map(|c| c.radius())
            .fold(0.0, f64::max);
        let mut points = Vec::new();
        let mut rays = Vec::new();
        let mut open = false;
        for c in &self.components {
            points.extend(c.points().iter().cloned());
            rays.extend(c.rays().iter().cloned());
            open = open || c.is_open();
        }
        if let Some(k) = k {
            rays.extend(k.generators().iter().cloned());
        }
        GenSet::new(points, rays, radius, open, self.norm())
    }

    /// K-boundedness, K-convexity, K-closedness of the union.
    pub fn conic_predicates(&self, k: &PolyhedralCone, tol: &Tolerance) -> Result<ConicPredicates> {
        let mut k_bounded = true;
        for r in self.pooled_rays() {
            let (inside, _) = k.contains(&r, false, tol)?;
            if !inside {
                k_bounded = false;
                break;
            }
        }
        let closure_caveat = self.components.iter().any(|c| c.is_open());
        // every representable component plus polyhedral K is closed
        let k_closed = true;

        let (k_convex, k_convex_sampled) = if self.components.len() == 1 {
            (true, false) // a single component plus a cone is convex outright
        } else {
            let hull = self.convexify(Some(k), false, tol)?;
            let target = self.with_cone(k)?;
            let report = union_includes(&UnionSet::from(hull), &target, false, tol, 0x5e7c0)?;
            (report.holds, !report.exact)
        };
        Ok(ConicPredicates {
            k_bounded,
            k_convex,
            k_closed,
            closure_caveat,
            k_convex_sampled,
        })
    }
}

/// Inclusion of an arbitrary union in a single convex target. This is exact:
/// every ray must lie in the target's recession cone, after which the worst
/// hull point decides via d(x, C + rD) = max(0, d(x, C) - r) and the
/// component's own radius adds to the requirement.
pub fn includes(
    a: &UnionSet,
    target: &GenSet,
    strict: bool,
    tol: &Tolerance,
) -> Result<IncludeReport> {
    if a.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            got: a.dim(),
        });
    }
    if a.norm() != target.norm() {
        return Err(Error::NormMismatch);
    }
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for comp in a.components() {
        if let Some(bad_ray) = comp.rays_in_recession_of(target, tol)? {
            let far: Vec<f64> = comp.points()[0]
                .iter()
                .zip(&bad_ray)
                .map(|(p, r)| p + 1e3 * r)
                .collect();
            return Ok(IncludeReport {
                holds: false,
                margin: f64::NEG_INFINITY,
                witness: Some(far),
                exact: true,
            });
        }
        for p in comp.points() {
            let d = target.distance_to_core(p, tol)?;
            let slack = target.radius() - (d + comp.radius());
            if slack < margin {
                margin = slack;
                witness = Some(p.clone());
            }
        }
    }
    let holds = if strict {
        margin >= tol.strict_margin
    } else {
        margin >= -tol.feas_tol
    };
    Ok(IncludeReport {
        holds,
        margin,
        witness: if holds { None } else { witness },
        exact: true,
    })
}

/// Inclusion of a union in a union. Exact when each left component fits in a
/// single right component (or is a point, decided by membership); otherwise
/// joint coverage is probed on deterministic and seeded sample points and the
/// report is marked inexact.
pub fn union_includes(
    a: &UnionSet,
    target: &UnionSet,
    strict: bool,
    tol: &Tolerance,
    seed: u64,
) -> Result<IncludeReport> {
    let mut margin = f64::INFINITY;
    let mut witness: Option<Vec<f64>> = None;
    let mut exact = true;
    let mut holds = true;

    for comp in a.components() {
        let comp_union = UnionSet::from(comp.clone());
        // best single-component cover
        let mut best: Option<IncludeReport> = None;
        for t in target.components() {
            let rep = includes(&comp_union, t, strict, tol)?;
            let better = match &best {
                None => true,
                Some(b) => rep.margin > b.margin,
            };
            if better {
                best = Some(rep);
            }
        }
        let best = best.expect("target union is nonempty");
        if best.holds {
            margin = margin.min(best.margin);
            continue;
        }
        let pointlike =
            comp.points().len() == 1 && comp.rays().is_empty() && comp.radius() == 0.0;
        if pointlike {
            let (inside, m) = target.membership(&comp.points()[0], strict, tol)?;
            margin = margin.min(m);
            if !inside {
                holds = false;
                witness = Some(comp.points()[0].clone());
            }
            continue;
        }
        // joint coverage: sample the component
        exact = false;
        let mut probes = comp.probe_points();
        let mut rng = sample::rng_from_seed(seed);
        probes.extend(comp.sample_points(32, &mut rng));
        for x in probes {
            // the probe carries the component's ball around it
            let (inside, m) = target.membership(&x, strict, tol)?;
            let m_adj = m - comp.radius();
            let inside_adj = if strict {
                m_adj >= tol.strict_margin
            } else {
                m_adj >= -tol.feas_tol
            };
            margin = margin.min(m_adj);
            if !(inside && inside_adj) {
                holds = false;
                if witness.is_none() {
                    witness = Some(x.clone());
                }
            }
        }
    }
    Ok(IncludeReport {
        holds,
        margin,
        witness: if holds { None } else { witness },
        exact,
    })
}

/// Membership oracle for the star difference A -* B = {x | x + B subset A}
/// without constructing it: shift B by x and test inclusion in the convex A.
pub fn star_difference_contains(
    a: &GenSet,
    b: &UnionSet,
    x: &[f64],
    tol: &Tolerance,
) -> Result<bool> {
    let shifted = b.translate(x)?;
    Ok(includes(&shifted, a, false, tol)?.holds)
}

fn in_conic_hull_lp(x: &[f64], gens: &[Vec<f64>], dim: usize, tol: &Tolerance) -> Result<bool> {
    if gens.is_empty() {
        return Ok(NormId::L2.eval(x) <= tol.feas_tol);
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
    Ok(solve_lp(&p, tol)?.is_feasible())
}
