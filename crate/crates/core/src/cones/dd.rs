//! Double description: generators of {x | a_i · x >= 0} from the halfspace
//! normals a_i, with explicit lineality handling (Fukuda/cdd style).
//!
//! Rays carry their zero sets (indices of processed halfspaces they saturate)
//! so adjacency can be decided combinatorially.

use crate::norm::{dot, NormId};
use crate::{Error, Result};

const ZTOL: f64 = 1e-9;

/// V-description of a polyhedral cone: span(lineality) + cone(rays).
#[derive(Debug, Clone)]
pub struct DdCone {
    pub lineality: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

impl DdCone {
    /// All generators as rays (lineality expanded into +/- pairs).
    pub fn ray_generators(&self) -> Vec<Vec<f64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|v| -v).collect());
        }
        out
    }
}

struct Ray {
    v: Vec<f64>,
    zero_set: Vec<bool>, // per processed halfspace
}

fn normalize(v: &mut [f64]) -> bool {
    let n = NormId::L2.eval(v);
    if n < ZTOL {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

pub fn double_description(dim: usize, halfspaces: &[Vec<f64>], dim_cap: usize) -> Result<DdCone> {
    if dim > dim_cap {
        return Err(Error::DimensionTooLarge(dim, dim_cap));
    }
    for a in halfspaces {
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.len(),
            });
        }
    }
    let total = halfspaces.len();
    let mut lineality: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (idx, a_raw) in halfspaces.iter().enumerate() {
        let mut a = a_raw.clone();
        if !normalize(&mut a) {
            // null halfspace constrains nothing; keep zero sets aligned
            for r in rays.iter_mut() {
                r.zero_set.push(true);
            }
            continue;
        }

        // try to cut the lineality space first
        let pivot = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(&a, l)))
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap());
        if let Some((pi, pv)) = pivot {
            if pv.abs() > ZTOL {
                let mut l0 = lineality.swap_remove(pi);
                if pv < 0.0 {
                    for x in l0.iter_mut() {
                        *x = -*x;
                    }
                }
                let al0 = dot(&a, &l0);
                for l in lineality.iter_mut() {
                    let c = dot(&a, l) / al0;
                    for (x, y) in l.iter_mut().zip(&l0) {
                        *x -= c * y;
                    }
                    normalize(l);
                }
                for r in rays.iter_mut() {
                    let c = dot(&a, &r.v) / al0;
                    for (x, y) in r.v.iter_mut().zip(&l0) {
                        *x -= c * y;
                    }
                    normalize(&mut r.v);
                    r.zero_set.push(true);
                }
                let mut zs = vec![true; idx];
                zs.push(false);
                // align older entries: lineality was orthogonal to all
                // previously processed halfspaces, so its zero set is full
                zs.truncate(idx + 1);
                rays.push(Ray { v: l0, zero_set: zs });
                rays.retain(|r| NormId::L2.eval(&r.v) > ZTOL);
                dedupe(&mut rays);
                continue;
            }
        }

        // lineality is orthogonal to a: split the rays
        let mut pos = Vec::new();
        let mut zero = Vec::new();
        let mut neg = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            let s = dot(&a, &r.v);
            if s > ZTOL {
                pos.push(i);
            } else if s < -ZTOL {
                neg.push(i);
            } else {
                zero.push(i);
            }
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for &i in pos.iter().chain(zero.iter()) {
            let mut zs = rays[i].zero_set.clone();
            zs.push(zero.contains(&i));
            new_rays.push(Ray {
                v: rays[i].v.clone(),
                zero_set: zs,
            });
        }
        for &p in &pos {
            for &m in &neg {
                if !adjacent(&rays, p, m) {
                    continue;
                }
                let ap = dot(&a, &rays[p].v);
                let am = dot(&a, &rays[m].v);
                let mut w: Vec<f64> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[m].v)
                    .map(|(x, y)| ap * y - am * x)
                    .collect();
                if !normalize(&mut w) {
                    continue;
                }
                let mut zs: Vec<bool> = rays[p]
                    .zero_set
                    .iter()
                    .zip(&rays[m].zero_set)
                    .map(|(x, y)| *x && *y)
                    .collect();
                zs.push(true);
                new_rays.push(Ray { v: w, zero_set: zs });
            }
        }
        rays = new_rays;
        dedupe(&mut rays);
        if rays.len() > 100_000 {
            return Err(Error::NumericalFailure(
                "double description ray blowup".into(),
            ));
        }
    }
    let _ = total;
    Ok(DdCone {
        lineality,
        rays: rays.into_iter().map(|r| r.v).collect(),
    })
}

/// Combinatorial adjacency: no third ray saturates everything p and m both saturate.
fn adjacent(rays: &[Ray], p: usize, m: usize) -> bool {
    let common: Vec<usize> = rays[p]
        .zero_set
        .iter()
        .zip(&rays[m].zero_set)
        .enumerate()
        .filter(|(_, (x, y))| **x && **y)
        .map(|(i, _)| i)
        .collect();
    for (i, r) in rays.iter().enumerate() {
        if i == p || i == m {
            continue;
        }
        if common.iter().all(|&c| r.zero_set[c]) {
            return false;
        }
    }
    true
}

fn dedupe(rays: &mut Vec<Ray>) {
    let mut keep: Vec<Ray> = Vec::with_capacity(rays.len());
    'outer: for r in rays.drain(..) {
        for k in keep.iter_mut() {
            if r.v
                .iter()
                .zip(&k.v)
                .all(|(x, y)| (x - y).abs() < 10.0 * ZTOL)
            {
                // same ray met twice: merge zero sets (union is sound)
                for (a, b) in k.zero_set.iter_mut().zip(&r.zero_set) {
                    *a = *a || *b;
                }
                continue 'outer;
            }
        }
        keep.push(r);
    }
    *rays = keep;
}
