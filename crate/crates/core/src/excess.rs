//! Excess e(A,B) = sup_{x in A} d(x,B) and the Hausdorff distance, including
//! the conic variants and the invariance-under-summand identities.
//!
//! For a convex right-hand side the supremum is exact: d(·,B) is convex, so
//! it peaks at a hull point of each left component (rays only decrease it once
//! they lie in the target's recession cone), and ball radii fold into the
//! inflation level. For a union target the vertex scan is refined by a
//! definition-style sample scan and the report says which method produced the
//! value.


use crate::sets::{includes, union_includes, GenSet, UnionSet};
use crate::{cones::PolyhedralCone, numerics::Tolerance, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExcessMethod {
    #[serde(rename = "vertex-max")]
    VertexMax,
    #[serde(rename = "definition-scan")]
    DefinitionScan,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcessReport {
    /// Supremum of the pointwise distance; +inf when a recession direction of
    /// the left side escapes every right component.
    pub value: f64,
    pub attained_at: Option<Vec<f64>>,
    pub method: ExcessMethod,
}

impl ExcessReport {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Signed distance from a point to the closure of a union: negative values
/// measure how deep the point sits past a component's ball radius. Keeping
/// the sign matters because the left component's own radius is added before
/// clamping at zero.
fn signed_dist_to_union(x: &[f64], b: &UnionSet, tol: &Tolerance) -> Result<f64> {
    let mut best = f64::INFINITY;
    for c in b.components() {
        best = best.min(c.distance_to_core(x, tol)? - c.radius());
    }
    Ok(best)
}

/// Do all rays of `comp` lie in the recession cone of a single component of
/// `b`? That determines finiteness of the excess from that component.
fn rays_served(comp: &GenSet, b: &UnionSet, tol: &Tolerance) -> Result<bool> {
    if comp.rays().is_empty() {
        return Ok(true);
    }
    'targets: for t in b.components() {
        for r in comp.rays() {
            let rec = GenSet::new(
                vec![vec![0.0; comp.dim()]],
                t.rays().to_vec(),
                0.0,
                false,
                comp.norm(),
            )?;
            if rec.distance_to_core(r, tol)? > tol.feas_tol {
                continue 'targets;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

pub fn excess(a: &UnionSet, b: &UnionSet, tol: &Tolerance) -> Result<ExcessReport> {
    if a.dim() != b.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: b.dim(),
            got: a.dim(),
        });
    }
    if a.norm() != b.norm() {
        return Err(crate::Error::NormMismatch);
    }
    let mut value = 0.0f64;
    let mut attained: Option<Vec<f64>> = None;
    let mut method = ExcessMethod::VertexMax;
    let single_target = b.components().len() == 1;

    for comp in a.components() {
        if !rays_served(comp, b, tol)? {
            return Ok(ExcessReport {
                value: f64::INFINITY,
                attained_at: comp.points().first().cloned(),
                method: ExcessMethod::VertexMax,
            });
        }
        for p in comp.points() {
            let d = (signed_dist_to_union(p, b, tol)? + comp.radius()).max(0.0);
            if d > value {
                value = d;
                attained = Some(p.clone());
            }
        }
        if !single_target {
            // the sup over a hull can sit mid-face when the target is a
            // union; refine with deterministic probes
            method = ExcessMethod::DefinitionScan;
            for x in comp.probe_points() {
                let d = (signed_dist_to_union(&x, b, tol)? + comp.radius()).max(0.0);
                if d > value {
                    value = d;
                    attained = Some(x);
                }
            }
        }
    }
    Ok(ExcessReport {
        value,
        attained_at: attained,
        method,
    })
}

/// e(A, B + K): excess against the cone-inflated target.
pub fn conic_excess(
    a: &UnionSet,
    b: &UnionSet,
    k: &PolyhedralCone,
    tol: &Tolerance,
) -> Result<ExcessReport> {
    excess(a, &b.with_cone(k)?, tol)
}

/// The identity chain e(A,B+K) = e(A+K,B+K) = e(A,cl(B+K)) = e(clA+K,clB+K):
/// all four expressions, asserted pairwise within 2·feas_tol by the caller.
pub fn conic_excess_chain(
    a: &UnionSet,
    b: &UnionSet,
    k: &PolyhedralCone,
    tol: &Tolerance,
) -> Result<[f64; 4]> {
    let bk = b.with_cone(k)?;
    let e1 = excess(a, &bk, tol)?.value;
    let e2 = excess(&a.with_cone(k)?, &bk, tol)?.value;
    let e3 = excess(a, &bk.closure(), tol)?.value;
    let e4 = excess(&a.closure().with_cone(k)?, &b.closure().with_cone(k)?, tol)?.value;
    Ok([e1, e2, e3, e4])
}

pub fn hausdorff(a: &UnionSet, b: &UnionSet, tol: &Tolerance) -> Result<f64> {
    Ok(excess(a, b, tol)?.value.max(excess(b, a, tol)?.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvarianceVariant {
    /// C compact representable, cl B K-convex (open-ball identity).
    #[serde(rename = "open-ball")]
    OpenBall,
    /// C K-bounded, B + alpha D K-convex/K-closed on a grid of alpha.
    #[serde(rename = "closed-ball")]
    ClosedBall,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceCheck {
    pub variant: InvarianceVariant,
    pub hypotheses: Vec<(String, bool)>,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    /// hypotheses hold implies the two excesses agree within 2 feas_tol
    pub consistent: bool,
}

/// Is the set representable as compact: closed components and no rays.
pub fn compact_representable(s: &UnionSet) -> bool {
    s.pooled_rays().is_empty() && s.components().iter().all(|c| !c.is_open())
}

/// Compactness relative to K: closed components, recession inside K.
pub fn compact_wrt_cone(s: &UnionSet, k: &PolyhedralCone, tol: &Tolerance) -> Result<bool> {
    if s.components().iter().any(|c| c.is_open()) {
        return Ok(false);
    }
    for r in s.pooled_rays() {
        if !k.contains(&r, false, tol)?.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Invariance of the excess under a common summand:
/// e(A, B+K) vs e(A+C, B+K+C) with the variant's hypotheses.
pub fn excess_invariance_check(
    a: &UnionSet,
    b: &UnionSet,
    c: &UnionSet,
    k: &PolyhedralCone,
    variant: InvarianceVariant,
    tol: &Tolerance,
) -> Result<InvarianceCheck> {
    let mut hypotheses = Vec::new();
    match variant {
        InvarianceVariant::OpenBall => {
            hypotheses.push(("C compact representable".to_string(), compact_representable(c)));
            let clb = b.closure();
            let k_convex = clb.conic_predicates(k, tol)?.k_convex;
            hypotheses.push(("cl B K-convex".to_string(), k_convex));
        }
        InvarianceVariant::ClosedBall => {
            let cb = c.conic_predicates(k, tol)?;
            hypotheses.push(("C K-bounded".to_string(), cb.k_bounded));
            let mut ok = true;
            for alpha in [0.1, 0.5, 1.0, 2.0] {
                let inflated: Result<Vec<GenSet>> = b
                    .components()
                    .iter()
                    .map(|g| g.inflate(alpha, false))
                    .collect();
                let infl = UnionSet::new(inflated?)?;
                let preds = infl.conic_predicates(k, tol)?;
                ok = ok && preds.k_convex && preds.k_closed;
            }
            hypotheses.push(("B + alpha D K-convex and K-closed".to_string(), ok));
        }
    }
    let lhs = conic_excess(a, b, k, tol)?.value;
    let sum_a = a.minkowski_sum(c)?;
    let sum_b = b.with_cone(k)?.minkowski_sum(c)?;
    let rhs = excess(&sum_a, &sum_b, tol)?.value;
    let difference = if lhs.is_infinite() && rhs.is_infinite() {
        0.0
    } else {
        (lhs - rhs).abs()
    };
    let hyps_hold = hypotheses.iter().all(|(_, h)| *h);
    let consistent = !(hyps_hold && difference > 2.0 * tol.feas_tol);
    Ok(InvarianceCheck {
        variant,
        hypotheses,
        lhs,
        rhs,
        difference,
        consistent,
    })
}

/// rel1 at the computed value: A fits in B + (v+eps)·ball and does not fit in
/// B + (v-eps)·ball. Only meaningful for finite positive v.
pub fn rel1_bracket(a: &UnionSet, b: &UnionSet, v: f64, eps: f64, tol: &Tolerance) -> Result<(bool, bool)> {
    let fits = |alpha: f64| -> Result<bool> {
        if alpha < 0.0 {
            return Ok(false);
        }
        let inflated: Result<Vec<GenSet>> = b
            .components()
            .iter()
            .map(|g| g.inflate(alpha, false))
            .collect();
        let infl = UnionSet::new(inflated?)?;
        if infl.components().len() == 1 {
            Ok(includes(a, &infl.components()[0], false, tol)?.holds)
        } else {
            Ok(union_includes(a, &infl, false, tol, 0)?.holds)
        }
    };
    Ok((fits(v + eps)?, fits(v - eps)?))
}

/// e(A,B) = 0 iff A subset cl B; exposed for the property suites.
pub fn zero_excess_iff_included(a: &UnionSet, b: &UnionSet, tol: &Tolerance) -> Result<(bool, bool)> {
    let e = excess(a, b, tol)?.value;
    let incl = if b.components().len() == 1 {
        includes(a, &b.components()[0].closure(), false, tol)?.holds
    } else {
        union_includes(a, &b.closure(), false, tol, 1)?.holds
    };
    Ok((e <= 2.0 * tol.feas_tol, incl))
}
