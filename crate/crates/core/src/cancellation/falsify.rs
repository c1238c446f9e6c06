//! Randomized falsification: drop a named hypothesis, search seeded random
//! instances for one whose remaining hypotheses hold while the conclusion
//! fails. Exhaustion without a hit is a normal result, and with no hypothesis
//! dropped it is the expected one.

use super::{verify_law, LawId, LawInstance, LawOptions, Verdict};
use crate::cones::PolyhedralCone;
use crate::norm::{scale, NormId};
use crate::numerics::Tolerance;
use crate::sample::{self, rng_for_trial, uniform_in};
use crate::scalarization::{compute_rho, Gerstewitz};
use crate::sets::{GenSet, UnionSet};
use crate::Result;
use rand_chacha::ChaCha12Rng;

#[derive(Debug)]
pub struct FalsifyOutcome {
    pub law: LawId,
    pub dropped: Option<String>,
    pub trials_run: u64,
    /// first trial whose remaining hypotheses hold and whose conclusion fails
    pub counterexample: Option<(u64, LawInstance, Verdict)>,
}

/// Search for a counterexample to `law` with `drop` left unchecked.
/// Deterministic under (seed, trials): trial i draws from stream i of the
/// base seed, and the lowest-index hit wins.
pub fn falsify(
    law: LawId,
    drop: Option<&str>,
    trials: u64,
    seed: u64,
    dim: usize,
    tol: &Tolerance,
) -> Result<FalsifyOutcome> {
    let base_opts = LawOptions {
        seed,
        samples: 16,
        tol: *tol,
        drop_conv_in_conclusion: drop.is_some_and(|d| d.eq_ignore_ascii_case("conv_in_conclusion")),
        dropped_hypothesis: drop
            .filter(|d| !d.eq_ignore_ascii_case("conv_in_conclusion"))
            .map(|s| s.to_string()),
        lazy_conclusion: true,
    };
    for trial in 0..trials {
        let mut rng = rng_for_trial(seed, trial);
        let Ok(instance) = random_instance(law, &mut rng, dim, tol, base_opts.dropped_hypothesis.as_deref())
        else {
            continue;
        };
        let mut opts = base_opts.clone();
        opts.seed = seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let Ok(verdict) = verify_law(law, &instance, &opts) else {
            continue;
        };
        let fails = !verdict.conclusion.holds
            && verdict.conclusion.margin < -10.0 * tol.feas_tol;
        if verdict.hypotheses_hold() && fails {
            return Ok(FalsifyOutcome {
                law,
                dropped: drop.map(|s| s.to_string()),
                trials_run: trial + 1,
                counterexample: Some((trial, instance, verdict)),
            });
        }
    }
    Ok(FalsifyOutcome {
        law,
        dropped: drop.map(|s| s.to_string()),
        trials_run: trials,
        counterexample: None,
    })
}

fn rand_point(rng: &mut ChaCha12Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| uniform_in(rng, -3.0, 3.0)).collect()
}

fn rand_points(rng: &mut ChaCha12Rng, dim: usize, max: usize) -> Vec<Vec<f64>> {
    let n = 1 + (uniform_in(rng, 0.0, max as f64) as usize).min(max - 1);
    (0..n).map(|_| rand_point(rng, dim)).collect()
}

fn rand_rays(rng: &mut ChaCha12Rng, dim: usize, max: usize) -> Vec<Vec<f64>> {
    let n = 1 + (uniform_in(rng, 0.0, max as f64) as usize).min(max - 1);
    (0..n).map(|_| sample::unit_direction(rng, dim)).collect()
}

fn rand_cone(rng: &mut ChaCha12Rng, dim: usize, need_solid: bool, tol: &Tolerance) -> PolyhedralCone {
    if uniform_in(rng, 0.0, 1.0) < 0.5 {
        return PolyhedralCone::orthant(dim, tol);
    }
    let gens: Vec<Vec<f64>> = (0..dim + 1)
        .map(|_| {
            // bias toward a pointed, usually solid cone around a random axis
            let mut v = sample::unit_direction(rng, dim);
            v[0] = v[0].abs() + 0.3;
            v
        })
        .collect();
    match PolyhedralCone::from_generators(dim, &gens, tol) {
        Ok(k) if (!need_solid || k.is_solid()) && !k.dual_generators().is_empty() => k,
        _ => PolyhedralCone::orthant(dim, tol),
    }
}

/// A point of B + K (+ t*e), staying strictly inside open balls.
fn point_in_b_plus_k(
    rng: &mut ChaCha12Rng,
    b: &UnionSet,
    k: &PolyhedralCone,
    extra_e: Option<(&[f64], f64)>,
) -> Vec<f64> {
    let comps = b.components();
    let ci = (uniform_in(rng, 0.0, comps.len() as f64) as usize).min(comps.len() - 1);
    let comp = &comps[ci];
    let pi = (uniform_in(rng, 0.0, comp.points().len() as f64) as usize)
        .min(comp.points().len() - 1);
    let mut x = comp.points()[pi].clone();
    if comp.radius() > 0.0 {
        let d = sample::unit_direction(rng, x.len());
        let nd = comp.norm().eval(&d);
        let t = uniform_in(rng, 0.0, 0.4 * comp.radius());
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += t * di / nd;
        }
    }
    for g in k.generators() {
        let t = uniform_in(rng, 0.0, 1.5);
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi += t * gi;
        }
    }
    if let Some((e, tmin)) = extra_e {
        let t = uniform_in(rng, tmin, tmin + 1.0);
        for (xi, ei) in x.iter_mut().zip(e) {
            *xi += t * ei;
        }
    }
    x
}

fn simple_union(points: Vec<Vec<f64>>, rays: Vec<Vec<f64>>, radius: f64, open: bool, norm: NormId) -> Result<UnionSet> {
    Ok(UnionSet::from(GenSet::new(points, rays, radius, open, norm)?))
}

/// Law-aware random instance. Hypotheses are enforced by construction except
/// the dropped one, which is actively violated so the search space is
/// nonempty.
pub fn random_instance(
    law: LawId,
    rng: &mut ChaCha12Rng,
    dim: usize,
    tol: &Tolerance,
    dropped: Option<&str>,
) -> Result<LawInstance> {
    let norm = NormId::L2;
    let is = |name: &str| dropped.is_some_and(|d| d.eq_ignore_ascii_case(name));
    let need_solid = matches!(law, LawId::SolidCancel | LawId::NonconvexRho);
    let cone = match law {
        LawId::RadstromClassic => None,
        _ => {
            if (is("K_solid")) && dim >= 2 {
                // a halfline is pointed but not solid in dim >= 2
                let mut g = vec![0.0; dim];
                g[0] = 1.0;
                Some(PolyhedralCone::from_generators(dim, &[g], tol)?)
            } else {
                Some(rand_cone(rng, dim, need_solid, tol))
            }
        }
    };
    let zero_k = PolyhedralCone::zero(dim, tol);
    let k = cone.as_ref().unwrap_or(&zero_k);

    // B
    let b_open = matches!(law, LawId::OpenCancel | LawId::StarDiff | LawId::OrderInsensitivity)
        && !is("B_open");
    let b_radius = if b_open {
        uniform_in(rng, 0.1, 0.4)
    } else if is("B_closed") {
        uniform_in(rng, 0.1, 0.4)
    } else if uniform_in(rng, 0.0, 1.0) < 0.4 {
        uniform_in(rng, 0.05, 0.3)
    } else {
        0.0
    };
    let b_open_flag = b_open || (is("B_closed") && b_radius > 0.0);
    let b_convex_required = matches!(law, LawId::RadstromClassic | LawId::OrderInsensitivity);
    let b_comps = if (b_convex_required && !is("B_convex")) || uniform_in(rng, 0.0, 1.0) < 0.5 {
        1
    } else {
        2
    };
    let mut b_components = Vec::new();
    for _ in 0..b_comps {
        b_components.push(GenSet::new(
            rand_points(rng, dim, 2),
            vec![],
            b_radius,
            b_open_flag,
            norm,
        )?);
    }
    let b = UnionSet::new(b_components)?;

    // interior direction for strict laws
    let e = if need_solid || matches!(law, LawId::NonconvexRho) {
        k.interior_direction(tol).ok()
    } else {
        None
    };

    // C (and D)
    let mut c: Option<UnionSet> = None;
    let mut d: Option<UnionSet> = None;
    match law {
        LawId::RadstromClassic => {
            let rays = if is("C_bounded") && uniform_in(rng, 0.0, 1.0) < 0.85 {
                rand_rays(rng, dim, 2)
            } else {
                vec![]
            };
            c = Some(simple_union(rand_points(rng, dim, 3), rays, 0.0, false, norm)?);
        }
        LawId::ConicRadstrom => {
            let rays = if is("C_k_bounded") {
                rand_rays(rng, dim, 2)
            } else if uniform_in(rng, 0.0, 1.0) < 0.5 && !k.generators().is_empty() {
                // recession inside K keeps C K-bounded
                let gi = (uniform_in(rng, 0.0, k.generators().len() as f64) as usize)
                    .min(k.generators().len() - 1);
                vec![k.generators()[gi].clone()]
            } else {
                vec![]
            };
            c = Some(simple_union(rand_points(rng, dim, 3), rays, 0.0, false, norm)?);
        }
        LawId::SolidCancel | LawId::OrderInsensitivity => {
            let name = if law == LawId::SolidCancel {
                "C_weakly_k_compact"
            } else {
                "C_compact"
            };
            let (rays, radius, open) = if is(name) {
                if uniform_in(rng, 0.0, 1.0) < 0.5 {
                    (rand_rays(rng, dim, 1), 0.0, false)
                } else {
                    (vec![], uniform_in(rng, 0.1, 0.3), true)
                }
            } else {
                (vec![], 0.0, false)
            };
            c = Some(simple_union(rand_points(rng, dim, 3), rays, radius, open, norm)?);
        }
        LawId::OpenCancel => {
            let rays = if is("C_compact_wrt_k") {
                rand_rays(rng, dim, 1)
            } else {
                vec![]
            };
            c = Some(simple_union(rand_points(rng, dim, 3), rays, 0.0, false, norm)?);
        }
        LawId::StarDiff => {
            let d_rays = if is("D_weakly_k_compact") {
                rand_rays(rng, dim, 1)
            } else {
                vec![]
            };
            let dd = simple_union(rand_points(rng, dim, 2), d_rays, 0.0, false, norm)?;
            // C = D + E with small E keeps the hypothesis and fills C -* D
            let e_pts: Vec<Vec<f64>> = (0..2)
                .map(|_| {
                    let u = sample::unit_direction(rng, dim);
                    scale(uniform_in(rng, 0.0, 0.4 * b_radius.max(0.1)), &u)
                })
                .collect();
            let e_set = simple_union(e_pts, vec![], 0.0, false, norm)?;
            c = Some(dd.minkowski_sum(&e_set)?);
            d = Some(dd);
        }
        LawId::NonconvexRho => {
            // C is filled in after rho is known
        }
        LawId::FiniteDim => {
            let rays = if is("C_k_seq_compact") {
                rand_rays(rng, dim, 2)
            } else {
                vec![]
            };
            c = Some(simple_union(rand_points(rng, dim, 3), rays, 0.0, false, norm)?);
        }
    }

    // A
    let enforce_outside = matches!(law, LawId::OrderInsensitivity | LawId::NonconvexRho);
    let a = if enforce_outside {
        let bk = b.with_cone(k)?;
        let mut pick = rand_point(rng, dim);
        if is("A_not_in_bk") {
            pick = point_in_b_plus_k(rng, &b, k, None);
        } else {
            let mut tries = 0;
            while bk.membership(&pick, false, tol)?.1 > -0.05 && tries < 40 {
                pick = rand_point(rng, dim);
                tries += 1;
            }
        }
        UnionSet::from(GenSet::singleton(pick, norm))
    } else {
        // with any hypothesis dropped, A must roam freely: the remaining
        // hypotheses act as the filter and the conclusion gets a chance to
        // fail (e.g. a half-line C absorbing the defect of A in B)
        let drop_inclusion = dropped.is_some();
        let npts = 1 + (uniform_in(rng, 0.0, 2.0) as usize).min(1);
        let pts: Vec<Vec<f64>> = (0..npts)
            .map(|_| {
                if drop_inclusion {
                    rand_point(rng, dim)
                } else if law == LawId::SolidCancel {
                    let e = e.as_ref().expect("solid cone has an interior direction");
                    point_in_b_plus_k(rng, &b, k, Some((e, 0.1)))
                } else {
                    point_in_b_plus_k(rng, &b, k, None)
                }
            })
            .collect();
        UnionSet::new(pts.into_iter().map(|p| GenSet::singleton(p, norm)).collect())?
    };

    if law == LawId::NonconvexRho {
        // rho is taken at the witness translation, matching the verifier
        let witness = a.components()[0].points()[0].clone();
        let c_set = if is("C_in_interval") {
            simple_union(rand_points(rng, dim, 3), vec![], 0.0, false, norm)?
        } else {
            let e_dir = e.clone().expect("solid cone required");
            let g = Gerstewitz::new(k.clone(), e_dir.clone(), tol)?;
            let shift: Vec<f64> = witness.iter().map(|v| -v).collect();
            let rho = compute_rho(&b.translate(&shift)?, &g, tol).unwrap_or(0.0);
            let pts: Vec<Vec<f64>> = (0..2)
                .map(|_| scale(uniform_in(rng, -0.5, 0.5) * rho, &e_dir))
                .collect();
            UnionSet::new(pts.into_iter().map(|p| GenSet::singleton(p, norm)).collect())?
        };
        c = Some(c_set);
    }

    Ok(LawInstance {
        a,
        b,
        c,
        d,
        cone,
        e,
    })
}
