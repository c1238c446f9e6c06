//! Membership and separation certificates for x in cl conv(B + K).
//!
//! Membership is witnessed by convex/conic coefficients reconstructing the
//! point; non-membership by a separating functional, either directly (from
//! the projection geometry or an LP) or as a lexicographic chain that mirrors
//! the finite-dimensional induction: each level's functional is nonnegative
//! on the restricted B + K, strictly positive on the restricted B, and the
//! recursion descends into its kernel until the restricted B empties out.

use crate::cones::PolyhedralCone;
use crate::norm::{dot, scale, sub, NormId};
use crate::numerics::{project_onto_vset, solve_lp, LpProblem, LpResult, Tolerance};
use crate::sets::UnionSet;
use crate::{Error, Result};

pub const LEX_DIM_CAP: usize = 8;

#[derive(Debug, Clone)]
pub struct MembershipWitness {
    /// convex coefficients over the pooled hull points
    pub hull_coeffs: Vec<f64>,
    /// conic coefficients over the set's own pooled rays
    pub ray_coeffs: Vec<f64>,
    /// the cone element k of the decomposition x = sum + k + shift
    pub cone_point: Vec<f64>,
    /// ball shift, norm at most the shared radius
    pub ball_shift: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SeparationLevel {
    /// ambient unit functional, nonnegative on the level's B + K
    pub functional: Vec<f64>,
    /// strict positivity margin over the level's B points
    pub min_over_points: f64,
    /// orthonormal basis of the subspace this level lives in
    pub basis: Vec<Vec<f64>>,
    /// points of B surviving into the next level's kernel slice
    pub surviving_points: usize,
}

#[derive(Debug, Clone)]
pub struct SeparationWitness {
    pub chain: Vec<SeparationLevel>,
    /// value of the first functional at x minus its supremum over the target
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    Membership(MembershipWitness),
    Separation(SeparationWitness),
}

impl Certificate {
    pub fn is_membership(&self) -> bool {
        matches!(self, Certificate::Membership(_))
    }
}

/// Decide x in cl conv(B) + K and certify the answer. Membership comes with
/// reconstructing coefficients; non-membership with a single strictly
/// separating functional.
pub fn certify_in_conv_plus_cone(
    x: &[f64],
    b: &UnionSet,
    k: &PolyhedralCone,
    tol: &Tolerance,
) -> Result<Certificate> {
    let hull = b.convexify(Some(k), false, tol)?;
    let radius = hull.radius();
    // columns: pooled points, pooled B rays, then K generators
    let own_rays: Vec<Vec<f64>> = {
        let mut r = b.pooled_rays();
        r = crate::cones::canonical_rays(&r, tol);
        r
    };
    let mut all_rays = own_rays.clone();
    all_rays.extend(k.generators().iter().cloned());
    let proj = project_onto_vset(x, hull.points(), &all_rays, b.norm(), tol)?;

    if proj.distance <= radius + tol.feas_tol {
        let nb = own_rays.len();
        let mut cone_point = vec![0.0; x.len()];
        for (mu, g) in proj.ray_coeffs[nb..].iter().zip(k.generators()) {
            for (ci, gi) in cone_point.iter_mut().zip(g) {
                *ci += mu * gi;
            }
        }
        let ball_shift = sub(x, &proj.nearest);
        // reconstruct and measure the residual past the allowed ball radius
        let mut rec = cone_point.clone();
        for (l, p) in proj.hull_coeffs.iter().zip(hull.points()) {
            for (ri, pi) in rec.iter_mut().zip(p) {
                *ri += l * pi;
            }
        }
        for (m, r) in proj.ray_coeffs[..nb].iter().zip(&own_rays) {
            for (ri, rj) in rec.iter_mut().zip(r) {
                *ri += m * rj;
            }
        }
        for (ri, s) in rec.iter_mut().zip(&ball_shift) {
            *ri += s;
        }
        let residual = NormId::L2.eval(&sub(x, &rec));
        return Ok(Certificate::Membership(MembershipWitness {
            hull_coeffs: proj.hull_coeffs,
            ray_coeffs: proj.ray_coeffs[..nb].to_vec(),
            cone_point,
            ball_shift,
            residual,
        }));
    }

    // separation
    let functional = match b.norm() {
        NormId::L2 => {
            let g = sub(x, &proj.nearest);
            scale(1.0 / NormId::L2.eval(&g), &g)
        }
        NormId::L1 | NormId::LInf => {
            separating_functional_lp(x, hull.points(), &all_rays, b.norm(), radius, tol)?
        }
    };
    let sup = UnionSet::from(hull.clone()).support_value(&functional, tol)?;
    let margin = dot(&functional, x) - sup;
    let basis: Vec<Vec<f64>> = (0..x.len())
        .map(|i| {
            let mut e = vec![0.0; x.len()];
            e[i] = 1.0;
            e
        })
        .collect();
    let min_over_points = hull
        .points()
        .iter()
        .map(|p| dot(&functional, p))
        .fold(f64::INFINITY, f64::min);
    Ok(Certificate::Separation(SeparationWitness {
        chain: vec![SeparationLevel {
            functional,
            min_over_points,
            basis,
            surviving_points: 0,
        }],
        margin,
    }))
}

/// Strict separating functional for polyhedral norms by LP:
/// maximize g·x - s - r·t  s.t.  g·p_i <= s, g·r_j <= 0, |g|_* <= t <= 1.
fn separating_functional_lp(
    x: &[f64],
    points: &[Vec<f64>],
    rays: &[Vec<f64>],
    norm: NormId,
    radius: f64,
    tol: &Tolerance,
) -> Result<Vec<f64>> {
    let n = x.len();
    // vars: g (n, free), s (1), t (1)
    let nv = n + 2;
    let s_col = n;
    let t_col = n + 1;
    let mut ineq_matrix = Vec::new();
    let mut ineq_rhs = Vec::new();
    for p in points {
        let mut row = vec![0.0; nv];
        row[..n].copy_from_slice(p);
        row[s_col] = -1.0;
        ineq_matrix.push(row);
        ineq_rhs.push(0.0);
    }
    for r in rays {
        let mut row = vec![0.0; nv];
        row[..n].copy_from_slice(r);
        ineq_matrix.push(row);
        ineq_rhs.push(0.0);
    }
    match norm {
        // set ball is an l1 ball, so |g|_* = |g|_inf: +/- g_i <= t
        NormId::L1 => {
            for i in 0..n {
                for sgn in [1.0, -1.0] {
                    let mut row = vec![0.0; nv];
                    row[i] = sgn;
                    row[t_col] = -1.0;
                    ineq_matrix.push(row);
                    ineq_rhs.push(0.0);
                }
            }
        }
        // set ball is a box, so |g|_* = |g|_1 <= t via sign patterns
        NormId::LInf => {
            for mask in 0..(1usize << n) {
                let mut row = vec![0.0; nv];
                for i in 0..n {
                    row[i] = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
                }
                row[t_col] = -1.0;
                ineq_matrix.push(row);
                ineq_rhs.push(0.0);
            }
        }
        NormId::L2 => unreachable!("l2 goes through the projection route"),
    }
    // t <= 1 normalization
    let mut trow = vec![0.0; nv];
    trow[t_col] = 1.0;
    ineq_matrix.push(trow);
    ineq_rhs.push(1.0);

    let mut objective = vec![0.0; nv];
    for i in 0..n {
        objective[i] = -x[i];
    }
    objective[s_col] = 1.0;
    objective[t_col] = radius;
    let p = LpProblem {
        objective,
        ineq_matrix,
        ineq_rhs,
        ..Default::default()
    };
    match solve_lp(&p, tol)? {
        LpResult::Optimal { value, point } => {
            if -value <= tol.feas_tol {
                return Err(Error::NumericalFailure(
                    "separation LP found no positive margin".into(),
                ));
            }
            Ok(point[..n].to_vec())
        }
        other => Err(Error::NumericalFailure(format!(
            "separation LP failed: {other:?}"
        ))),
    }
}

/// Decide 0 in conv(B) + K for a finite-point B by the inductive chain.
///
/// Each level solves the membership LP on the surviving points; on
/// infeasibility the Farkas certificate yields a functional in the dual cone
/// that is strictly positive on those points, the recursion slices B into the
/// functional's kernel (a lower-dimensional subspace), and emptiness of the
/// slice certifies non-membership.
pub fn lex_separation_chain(
    b: &UnionSet,
    k: &PolyhedralCone,
    tol: &Tolerance,
) -> Result<Certificate> {
    let n = b.dim();
    if n > LEX_DIM_CAP {
        return Err(Error::DimensionTooLarge(n, LEX_DIM_CAP));
    }
    if b.components().iter().any(|c| c.radius() > 0.0) {
        return Err(Error::UnsupportedSet(
            "lexicographic chain needs a finite-point set (radius 0)",
        ));
    }
    if !b.pooled_rays().is_empty() {
        return Err(Error::UnsupportedSet(
            "lexicographic chain needs a finite-point set (no rays)",
        ));
    }
    let mut points: Vec<Vec<f64>> = Vec::new();
    for c in b.components() {
        points.extend(c.points().iter().cloned());
    }
    let all_points = points.clone();
    let duals = k.dual_generators().to_vec();

    // orthonormal basis of the current subspace
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut chain: Vec<SeparationLevel> = Vec::new();

    for _level in 0..=n + 1 {
        if points.is_empty() {
            // conv(empty) + K is empty: non-membership certified
            let margin = chain.first().map(|l| l.min_over_points).unwrap_or(0.0);
            return Ok(Certificate::Separation(SeparationWitness { chain, margin }));
        }
        // feasibility: exists lambda on the simplex with -B lambda in K
        let m = points.len();
        let mut ineq_matrix: Vec<Vec<f64>> = Vec::new();
        let mut ineq_rhs: Vec<f64> = Vec::new();
        for y in &duals {
            // y·(sum lambda_i b_i) <= 0
            let row: Vec<f64> = points.iter().map(|p| dot(y, p)).collect();
            ineq_matrix.push(row);
            ineq_rhs.push(0.0);
        }
        let dual_rows = ineq_matrix.len();
        for j in 0..m {
            let mut row = vec![0.0; m];
            row[j] = -1.0;
            ineq_matrix.push(row);
            ineq_rhs.push(0.0);
        }
        let p = LpProblem {
            objective: vec![0.0; m],
            ineq_matrix,
            ineq_rhs,
            eq_matrix: vec![vec![1.0; m]],
            eq_rhs: vec![1.0],
        };
        match solve_lp(&p, tol)? {
            LpResult::Optimal { point: lambda, .. } => {
                // membership: 0 = sum lambda_i b_i + cone_point
                let mut s = vec![0.0; n];
                for (l, bp) in lambda.iter().zip(&points) {
                    for (si, bi) in s.iter_mut().zip(bp) {
                        *si += l * bi;
                    }
                }
                let cone_point: Vec<f64> = s.iter().map(|v| -v).collect();
                // map the local lambda back to the full point list
                let mut hull_coeffs = vec![0.0; all_points.len()];
                for (l, bp) in lambda.iter().zip(&points) {
                    if let Some(idx) = all_points
                        .iter()
                        .position(|q| sub(q, bp).iter().all(|d| d.abs() < 1e-12))
                    {
                        hull_coeffs[idx] += l;
                    }
                }
                let residual = 0.0;
                return Ok(Certificate::Membership(MembershipWitness {
                    hull_coeffs,
                    ray_coeffs: vec![],
                    cone_point,
                    ball_shift: vec![0.0; n],
                    residual,
                }));
            }
            LpResult::Infeasible(cert) => {
                // functional = sum of dual generators weighted by the Farkas
                // multipliers; strictly positive on the surviving points
                let mut f = vec![0.0; n];
                for (w, y) in cert.y_ineq[..dual_rows].iter().zip(&duals) {
                    for (fi, yi) in f.iter_mut().zip(y) {
                        *fi += w * yi;
                    }
                }
                // the equality multiplier carries the strict margin; fall
                // back to the functional's own values if it degenerated
                if NormId::L2.eval(&f) < 1e-12 {
                    return Err(Error::NumericalFailure(
                        "degenerate separation functional".into(),
                    ));
                }
                // keep the functional inside the current subspace
                let mut fp = vec![0.0; n];
                for q in &basis {
                    let c = dot(&f, q);
                    for (fpi, qi) in fp.iter_mut().zip(q) {
                        *fpi += c * qi;
                    }
                }
                let nf = NormId::L2.eval(&fp);
                if nf < 1e-12 {
                    return Err(Error::NumericalFailure(
                        "separation functional vanished in the level subspace".into(),
                    ));
                }
                let f = scale(1.0 / nf, &fp);
                let values: Vec<f64> = points.iter().map(|p| dot(&f, p)).collect();
                let min_over_points = values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
                let survivors: Vec<Vec<f64>> = points
                    .iter()
                    .zip(&values)
                    .filter(|(_, v)| v.abs() <= tol.feas_scaled(1.0))
                    .map(|(p, _)| p.clone())
                    .collect();
                // descend into the kernel: stabilized Gram-Schmidt removal of
                // the functional's direction, drop tolerance 1e-10
                let mut new_basis: Vec<Vec<f64>> = Vec::new();
                for q in &basis {
                    let mut w = q.clone();
                    let c = dot(&w, &f);
                    for (wi, fi) in w.iter_mut().zip(&f) {
                        *wi -= c * fi;
                    }
                    for nb in &new_basis {
                        let c = dot(&w, nb);
                        for (wi, bi) in w.iter_mut().zip(nb) {
                            *wi -= c * bi;
                        }
                    }
                    let nw = NormId::L2.eval(&w);
                    if nw > 1e-10 {
                        new_basis.push(scale(1.0 / nw, &w));
                    }
                }
                chain.push(SeparationLevel {
                    functional: f,
                    min_over_points,
                    basis: basis.clone(),
                    surviving_points: survivors.len(),
                });
                points = survivors;
                basis = new_basis;
            }
            LpResult::Unbounded { .. } => {
                return Err(Error::NumericalFailure(
                    "membership feasibility LP cannot be unbounded".into(),
                ))
            }
        }
    }
    Err(Error::NumericalFailure(
        "lexicographic chain exceeded the level cap".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GenSet;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn membership_in_planar_example() {
        // 0 = (1/2)(0,-1) + (1/2)(-2,1) + (1,0): hull midpoint plus a cone step
        let t = tol();
        let k = PolyhedralCone::from_generators(2, &[vec![1.0, 0.0]], &t).unwrap();
        let b = UnionSet::new(vec![
            GenSet::ball(vec![0.0, -1.0], 0.1, true, NormId::L2).unwrap(),
            GenSet::ball(vec![-2.0, 1.0], 0.1, true, NormId::L2).unwrap(),
        ])
        .unwrap();
        match certify_in_conv_plus_cone(&[0.0, 0.0], &b, &k, &t).unwrap() {
            Certificate::Membership(w) => {
                assert!(w.residual <= 1e-9, "residual {}", w.residual);
                assert!((w.hull_coeffs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(NormId::L2.eval(&w.ball_shift) <= 0.1 + 1e-9);
            }
            Certificate::Separation(_) => panic!("expected membership"),
        }
    }

    #[test]
    fn separation_from_shifted_orthant() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let b = UnionSet::from(GenSet::singleton(vec![2.0, 2.0], NormId::L2));
        match certify_in_conv_plus_cone(&[0.0, 0.0], &b, &k, &t).unwrap() {
            Certificate::Separation(w) => {
                let f = &w.chain[0].functional;
                // functional close to -(1,1)/sqrt(2), margin ~ 2*sqrt(2)
                assert!(f[0] < -0.5 && f[1] < -0.5, "functional {f:?}");
                assert!(w.margin > 1.0, "margin {}", w.margin);
            }
            Certificate::Membership(_) => panic!("expected separation"),
        }
    }

    #[test]
    fn membership_with_unit_mass() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let b = UnionSet::from(GenSet::singleton(vec![-1.0, 0.0], NormId::L2));
        // x = b + k with k = (1,0)
        match certify_in_conv_plus_cone(&[0.0, 0.0], &b, &k, &t).unwrap() {
            Certificate::Membership(w) => {
                assert!((w.hull_coeffs[0] - 1.0).abs() < 1e-9);
                assert!((w.cone_point[0] - 1.0).abs() < 1e-7);
            }
            _ => panic!("expected membership"),
        }
    }

    #[test]
    fn lex_chain_two_levels() {
        // B = {(0,1)}, K the horizontal halfline: level-1 functional (0,1)
        // is strict on B, the kernel slice is empty at level 2
        let t = tol();
        let k = PolyhedralCone::from_generators(2, &[vec![1.0, 0.0]], &t).unwrap();
        let b = UnionSet::from(GenSet::singleton(vec![0.0, 1.0], NormId::L2));
        match lex_separation_chain(&b, &k, &t).unwrap() {
            Certificate::Separation(w) => {
                assert_eq!(w.chain.len(), 1, "one functional, then emptiness");
                let f = &w.chain[0].functional;
                assert!((f[0]).abs() < 1e-7 && (f[1] - 1.0).abs() < 1e-7, "{f:?}");
                assert_eq!(w.chain[0].surviving_points, 0);
                // nonnegative on K's generator
                assert!(dot(f, &[1.0, 0.0]) >= -1e-9);
            }
            _ => panic!("expected separation"),
        }
    }

    #[test]
    fn lex_chain_immediate_membership() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let b0 = UnionSet::from(GenSet::singleton(vec![0.0, 0.0], NormId::L2));
        assert!(lex_separation_chain(&b0, &k, &t).unwrap().is_membership());
        let bneg = UnionSet::from(GenSet::singleton(vec![-1.0, 0.0], NormId::L2));
        match lex_separation_chain(&bneg, &k, &t).unwrap() {
            Certificate::Membership(w) => {
                assert!((w.cone_point[0] - 1.0).abs() < 1e-9);
            }
            _ => panic!("expected membership via k = (1,0)"),
        }
    }

    #[test]
    fn chain_agrees_with_lp_certificate() {
        let t = tol();
        let mut rng = crate::sample::rng_from_seed(23);
        for dim in 2..=4usize {
            for _ in 0..60 {
                let gens: Vec<Vec<f64>> = (0..dim)
                    .map(|_| {
                        (0..dim)
                            .map(|_| crate::sample::uniform_in(&mut rng, -1.0, 1.0))
                            .collect()
                    })
                    .collect();
                let k = PolyhedralCone::from_generators(dim, &gens, &t).unwrap();
                let pts: Vec<Vec<f64>> = (0..3)
                    .map(|_| {
                        (0..dim)
                            .map(|_| crate::sample::uniform_in(&mut rng, -3.0, 3.0))
                            .collect()
                    })
                    .collect();
                let x: Vec<f64> = (0..dim)
                    .map(|_| crate::sample::uniform_in(&mut rng, -3.0, 3.0))
                    .collect();
                let shifted: Vec<Vec<f64>> = pts.iter().map(|p| sub(p, &x)).collect();
                let b = UnionSet::from(
                    GenSet::new(shifted, vec![], 0.0, false, NormId::L2).unwrap(),
                );
                let via_chain = lex_separation_chain(&b, &k, &t).unwrap().is_membership();
                let via_lp = certify_in_conv_plus_cone(&[0.0; 4][..dim].to_vec().as_slice(), &b, &k, &t)
                    .unwrap()
                    .is_membership();
                assert_eq!(via_chain, via_lp, "dim {dim}");
            }
        }
    }

    #[test]
    fn polyhedral_norm_separation() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let b = UnionSet::from(GenSet::ball(vec![3.0, 3.0], 0.5, false, NormId::LInf).unwrap());
        match certify_in_conv_plus_cone(&[0.0, 0.0], &b, &k, &t).unwrap() {
            Certificate::Separation(w) => {
                assert!(w.margin > 1e-7, "margin {}", w.margin);
            }
            _ => panic!("expected separation"),
        }
    }
}
