//! Projection of a point onto conv(points) + cone(rays).
//!
//! The l1/linf cases reduce exactly to LPs. The l2 case runs accelerated
//! projected gradient over the barycentric/conic coefficients (simplex
//! projection for the hull part, clipping for the rays) and then polishes the
//! active face by a small KKT solve, which keeps everything V-representation
//! only.

use super::{solve_lp, LpProblem, LpResult, Tolerance};
use crate::norm::{dot, sub, NormId};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Projection {
    pub distance: f64,
    pub nearest: Vec<f64>,
    pub hull_coeffs: Vec<f64>,
    pub ray_coeffs: Vec<f64>,
}

pub fn project_onto_vset(
    x: &[f64],
    points: &[Vec<f64>],
    rays: &[Vec<f64>],
    norm: NormId,
    tol: &Tolerance,
) -> Result<Projection> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let n = x.len();
    for p in points.iter().chain(rays.iter()) {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
    }
    match norm {
        NormId::L2 => project_l2(x, points, rays, tol),
        NormId::L1 | NormId::LInf => project_polyhedral(x, points, rays, norm, tol),
    }
}

/// l1 and linf distances as LPs over (lambda, mu, t).
fn project_polyhedral(
    x: &[f64],
    points: &[Vec<f64>],
    rays: &[Vec<f64>],
    norm: NormId,
    tol: &Tolerance,
) -> Result<Projection> {
    let n = x.len();
    let np = points.len();
    let nr = rays.len();
    let nt = if norm == NormId::L1 { n } else { 1 };
    let nv = np + nr + nt;

    let mut objective = vec![0.0; nv];
    for t in 0..nt {
        objective[np + nr + t] = 1.0;
    }

    let mut ineq_matrix = Vec::new();
    let mut ineq_rhs = Vec::new();
    // residual_j = x_j - (P lambda + R mu)_j; |residual_j| <= t_(j or 0)
    for j in 0..n {
        let tcol = np + nr + if norm == NormId::L1 { j } else { 0 };
        let mut pos = vec![0.0; nv];
        let mut neg = vec![0.0; nv];
        for (i, p) in points.iter().enumerate() {
            pos[i] = -p[j];
            neg[i] = p[j];
        }
        for (i, r) in rays.iter().enumerate() {
            pos[np + i] = -r[j];
            neg[np + i] = r[j];
        }
        pos[tcol] = -1.0;
        neg[tcol] = -1.0;
        ineq_matrix.push(pos);
        ineq_rhs.push(-x[j]);
        ineq_matrix.push(neg);
        ineq_rhs.push(x[j]);
    }
    // lambda >= 0, mu >= 0, t >= 0
    for i in 0..nv {
        let mut row = vec![0.0; nv];
        row[i] = -1.0;
        ineq_matrix.push(row);
        ineq_rhs.push(0.0);
    }
    let mut eqrow = vec![0.0; nv];
    for v in eqrow.iter_mut().take(np) {
        *v = 1.0;
    }
    let p = LpProblem {
        objective,
        ineq_matrix,
        ineq_rhs,
        eq_matrix: vec![eqrow],
        eq_rhs: vec![1.0],
    };
    match solve_lp(&p, tol)? {
        LpResult::Optimal { point, .. } => {
            let hull_coeffs = point[..np].to_vec();
            let ray_coeffs = point[np..np + nr].to_vec();
            let nearest = combine(points, rays, &hull_coeffs, &ray_coeffs);
            let distance = norm.eval(&sub(x, &nearest));
            Ok(Projection {
                distance,
                nearest,
                hull_coeffs,
                ray_coeffs,
            })
        }
        other => Err(Error::NumericalFailure(format!(
            "projection LP did not reach an optimum: {other:?}"
        ))),
    }
}

fn combine(points: &[Vec<f64>], rays: &[Vec<f64>], lam: &[f64], mu: &[f64]) -> Vec<f64> {
    let n = points[0].len();
    let mut out = vec![0.0; n];
    for (l, p) in lam.iter().zip(points) {
        for j in 0..n {
            out[j] += l * p[j];
        }
    }
    for (m, r) in mu.iter().zip(rays) {
        for j in 0..n {
            out[j] += m * r[j];
        }
    }
    out
}

/// Euclidean projection of v onto the unit simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            rho = j + 1;
            theta = t;
        }
    }
    debug_assert!(rho > 0);
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

struct QuadModel<'a> {
    cols: Vec<&'a [f64]>, // n-dim columns: points then rays
    np: usize,
    x: &'a [f64],
}

impl QuadModel<'_> {
    fn residual(&self, z: &[f64]) -> Vec<f64> {
        let mut r = self.x.to_vec();
        for (c, zi) in self.cols.iter().zip(z) {
            for (rj, cj) in r.iter_mut().zip(*c) {
                *rj -= zi * cj;
            }
        }
        r
    }
    fn value(&self, z: &[f64]) -> f64 {
        let r = self.residual(z);
        0.5 * dot(&r, &r)
    }
    fn grad(&self, z: &[f64]) -> Vec<f64> {
        let r = self.residual(z);
        self.cols.iter().map(|c| -dot(c, &r)).collect()
    }
    fn prox(&self, z: &mut [f64]) {
        project_simplex(&mut z[..self.np]);
        for v in z[self.np..].iter_mut() {
            *v = v.max(0.0);
        }
    }
    /// Largest eigenvalue of G'G by power iteration.
    fn lipschitz(&self) -> f64 {
        let k = self.cols.len();
        let mut v = vec![1.0 / (k as f64).sqrt(); k];
        let mut lam = 1.0;
        for _ in 0..80 {
            // w = G'(G v)
            let n = self.x.len();
            let mut gv = vec![0.0; n];
            for (c, vi) in self.cols.iter().zip(&v) {
                for (g, cj) in gv.iter_mut().zip(*c) {
                    *g += vi * cj;
                }
            }
            let w: Vec<f64> = self.cols.iter().map(|c| dot(c, &gv)).collect();
            let nw = dot(&w, &w).sqrt();
            if nw < 1e-300 {
                return 1.0;
            }
            lam = nw;
            v = w.iter().map(|x| x / nw).collect();
        }
        lam.max(1e-12)
    }
}

fn project_l2(
    x: &[f64],
    points: &[Vec<f64>],
    rays: &[Vec<f64>],
    tol: &Tolerance,
) -> Result<Projection> {
    let np = points.len();
    let nr = rays.len();
    let model = QuadModel {
        cols: points.iter().chain(rays.iter()).map(|v| v.as_slice()).collect(),
        np,
        x,
    };
    let lip = model.lipschitz() * 1.05 + 1e-12;
    let step = 1.0 / lip;

    let mut z = vec![0.0; np + nr];
    z[0] = 1.0;
    let mut y = z.clone();
    let mut t_mom = 1.0f64;
    let mut fz = model.value(&z);
    let stop = tol.opt_tol * (1.0 + NormId::L2.eval(x));
    let mut gmap_norm = f64::INFINITY;

    for _ in 0..60_000 {
        let g = model.grad(&y);
        let mut z_next: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - step * gi).collect();
        model.prox(&mut z_next);
        let f_next = model.value(&z_next);

        // adaptive restart keeps the momentum from overshooting
        if f_next > fz {
            t_mom = 1.0;
            y = z.clone();
            let g = model.grad(&y);
            let mut z_r: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - step * gi).collect();
            model.prox(&mut z_r);
            let f_r = model.value(&z_r);
            gmap_norm = lip * NormId::L2.eval(&sub(&z_r, &y));
            z = z_r;
            fz = f_r;
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
            let beta = (t_mom - 1.0) / t_next;
            gmap_norm = lip * NormId::L2.eval(&sub(&z_next, &y));
            y = z_next
                .iter()
                .zip(&z)
                .map(|(zn, zo)| zn + beta * (zn - zo))
                .collect();
            z = z_next;
            fz = f_next;
            t_mom = t_next;
        }
        if gmap_norm <= stop {
            break;
        }
    }

    // Active-face polish: equality-constrained least squares on the support.
    if let Some(polished) = polish_active_face(&model, &z, tol) {
        if model.value(&polished) <= fz + tol.feas_tol {
            z = polished;
            fz = model.value(&z);
            gmap_norm = 0.0;
        }
    }

    // Interior polish: when the distance is almost zero the point is likely a
    // member, and an LP feasibility solve reconstructs it to simplex accuracy
    // where the first-order iterate stalls at sqrt-level error.
    if fz.sqrt() <= 1e-6 {
        if let Ok(lp) = project_polyhedral(x, points, rays, NormId::L1, tol) {
            if lp.distance <= tol.feas_tol {
                let mut cand = lp.hull_coeffs.clone();
                cand.extend(lp.ray_coeffs.iter().cloned());
                if model.value(&cand) < fz {
                    z = cand;
                    gmap_norm = 0.0;
                }
            }
        }
    }

    if gmap_norm > 1e-6 * (1.0 + NormId::L2.eval(x)) {
        return Err(Error::NumericalFailure(format!(
            "l2 projection stalled with gradient mapping {gmap_norm:.3e}"
        )));
    }

    let hull_coeffs = z[..np].to_vec();
    let ray_coeffs = z[np..].to_vec();
    let nearest = combine(points, rays, &hull_coeffs, &ray_coeffs);
    let distance = NormId::L2.eval(&sub(x, &nearest));
    Ok(Projection {
        distance,
        nearest,
        hull_coeffs,
        ray_coeffs,
    })
}

/// Solve min 1/2 |x - G_A z|^2 s.t. the active hull coefficients sum to 1,
/// keeping only coordinates that are active in `z`. Returns the full-length
/// candidate if the KKT solve succeeds and stays feasible.
fn polish_active_face(model: &QuadModel<'_>, z: &[f64], tol: &Tolerance) -> Option<Vec<f64>> {
    let act_tol = 1e-10;
    let active: Vec<usize> = z
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > act_tol)
        .map(|(i, _)| i)
        .collect();
    if active.is_empty() || !active.iter().any(|&i| i < model.np) {
        return None;
    }
    let k = active.len();
    // KKT: [G'G  a; a' 0] [z; nu] = [G'x; 1]
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    let mut rhs = vec![0.0; k + 1];
    for (ii, &i) in active.iter().enumerate() {
        for (jj, &j) in active.iter().enumerate() {
            m[ii][jj] = dot(model.cols[i], model.cols[j]);
        }
        m[ii][k] = if i < model.np { 1.0 } else { 0.0 };
        m[k][ii] = m[ii][k];
        rhs[ii] = dot(model.cols[i], model.x);
    }
    rhs[k] = 1.0;
    let sol = gauss_solve(&mut m, &mut rhs)?;
    let mut out = vec![0.0; z.len()];
    for (ii, &i) in active.iter().enumerate() {
        if sol[ii] < -tol.feas_tol {
            return None; // left the face; keep the iterate
        }
        out[i] = sol[ii].max(0.0);
    }
    let s: f64 = out[..model.np].iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return None;
    }
    Some(out)
}

/// Gaussian elimination with partial pivoting; None on (near-)singularity.
fn gauss_solve(m: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn orthogonal_ray() {
        let p = project_onto_vset(
            &[0.0, 0.0],
            &[vec![1.0, 0.0]],
            &[vec![0.0, 1.0]],
            NormId::L2,
            &tol(),
        )
        .unwrap();
        assert!((p.distance - 1.0).abs() < 1e-8);
        assert!((p.nearest[0] - 1.0).abs() < 1e-7 && p.nearest[1].abs() < 1e-7);
    }

    #[test]
    fn segment_plus_ray_reaches_origin() {
        // segment point (-1,0) plus one unit of ray (1,0) lands exactly on x
        let p = project_onto_vset(
            &[0.0, 0.0],
            &[vec![0.0, -1.0], vec![-2.0, 1.0]],
            &[vec![1.0, 0.0]],
            NormId::L2,
            &tol(),
        )
        .unwrap();
        assert!(p.distance < 1e-8, "raw distance should vanish: {}", p.distance);
    }

    #[test]
    fn single_point_with_useless_ray() {
        // oracle: min over mu of |(-mu, 1)| is 1 at mu = 0
        let p = project_onto_vset(
            &[0.0, 0.0],
            &[vec![0.0, -1.0]],
            &[vec![1.0, 0.0]],
            NormId::L2,
            &tol(),
        )
        .unwrap();
        assert!((p.distance - 1.0).abs() < 1e-8);
        assert!((p.nearest[1] + 1.0).abs() < 1e-7);
    }

    #[test]
    fn polyhedral_norms_match_hand_values() {
        // distance from origin to the point (3,4)
        let p1 = project_onto_vset(&[0.0, 0.0], &[vec![3.0, 4.0]], &[], NormId::L1, &tol()).unwrap();
        assert!((p1.distance - 7.0).abs() < 1e-8);
        let pi = project_onto_vset(&[0.0, 0.0], &[vec![3.0, 4.0]], &[], NormId::LInf, &tol()).unwrap();
        assert!((pi.distance - 4.0).abs() < 1e-8);
    }

    #[test]
    fn idempotent_projection() {
        let p = project_onto_vset(
            &[5.0, -3.0],
            &[vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, 2.0]],
            &[vec![0.0, 1.0]],
            NormId::L2,
            &tol(),
        )
        .unwrap();
        let q = project_onto_vset(
            &p.nearest,
            &[vec![0.0, 0.0], vec![1.0, 1.0], vec![-1.0, 2.0]],
            &[vec![0.0, 1.0]],
            NormId::L2,
            &tol(),
        )
        .unwrap();
        assert!(q.distance <= 1e-9, "re-projection distance {}", q.distance);
    }

    #[test]
    fn grid_oracle_dim2() {
        // brute force over lambda in [0,1], mu in [0,3] with step 1e-3
        let pts = [vec![0.5, -1.0], vec![-2.0, 1.5]];
        let ray = [vec![1.0, 0.25]];
        let x = [0.3, 0.7];
        let mut best = f64::INFINITY;
        let steps = 1000;
        for i in 0..=steps {
            let lam = i as f64 / steps as f64;
            for j in 0..=3 * steps {
                let mu = j as f64 / steps as f64;
                let cand = [
                    lam * pts[0][0] + (1.0 - lam) * pts[1][0] + mu * ray[0][0],
                    lam * pts[0][1] + (1.0 - lam) * pts[1][1] + mu * ray[0][1],
                ];
                let d = ((x[0] - cand[0]).powi(2) + (x[1] - cand[1]).powi(2)).sqrt();
                best = best.min(d);
            }
        }
        let p = project_onto_vset(&x, &pts, &ray, NormId::L2, &tol()).unwrap();
        assert!(
            (p.distance - best).abs() < 1e-3,
            "solver {} vs grid {}",
            p.distance,
            best
        );
        assert!(p.distance <= best + 1e-9, "solver can only be at least as good");
    }
}
