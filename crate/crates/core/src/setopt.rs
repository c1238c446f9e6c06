//! Sharp weak minimality for constrained set optimization, the tangent-cone
//! necessary condition, and the perturbation stability bound.
//!
//! Universal quantifiers over the feasible set are sampled (deterministic
//! probes plus seeded random points) and every verdict discloses the sample
//! count: a pass is evidence, a fail carries the violating sample.

use crate::cones::{tangent_cone, PolyhedralCone};
use crate::norm::{add, scale, sub, NormId};
use crate::numerics::Tolerance;
use crate::sample;
use crate::setmaps::{subdiff_test, BoxMap, LinMap, SubdiffParams, SubdiffSide, TestVerdict};
use crate::sets::{includes, GenSet, UnionSet};
use crate::{Error, Result};
use serde::Serialize;

/// Data of a sharp-weak-minimum claim: zbar in M, modulus mu, direction e in
/// K minus 0.
#[derive(Debug, Clone)]
pub struct SharpInstance {
    pub f: BoxMap,
    pub feasible: GenSet,
    pub zbar: Vec<f64>,
    pub mu: f64,
    pub e: Vec<f64>,
    pub cone: PolyhedralCone,
    pub norm: NormId,
    /// restrict sampling to |z - zbar| <= r (local sharp minimality)
    pub local_radius: Option<f64>,
}

impl SharpInstance {
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        if self.mu <= 0.0 {
            return Err(Error::InvalidValue("mu must be positive".into()));
        }
        if self.feasible.radius() > 0.0 {
            return Err(Error::UnsupportedSet("feasible set must be ball-free"));
        }
        if self.feasible.distance_to_core(&self.zbar, tol)? > tol.feas_tol {
            return Err(Error::PointNotInSet);
        }
        if !self.cone.is_solid() {
            return Err(Error::NotSolid);
        }
        let (in_k, _) = self.cone.contains(&self.e, false, tol)?;
        if !in_k || NormId::L2.eval(&self.e) <= tol.feas_tol {
            return Err(Error::InvalidValue("e must lie in K and be nonzero".into()));
        }
        Ok(())
    }

    /// whether e sits in int K; callers record a warning otherwise
    pub fn e_interior(&self, tol: &Tolerance) -> bool {
        self.cone
            .contains(&self.e, true, tol)
            .map(|(b, _)| b)
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledCheck {
    pub holds: bool,
    pub worst_margin: f64,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
    pub notes: Vec<String>,
}

fn feasible_samples(
    m: &GenSet,
    zbar: &[f64],
    local_radius: Option<f64>,
    count: usize,
    seed: u64,
    norm: NormId,
) -> Vec<Vec<f64>> {
    let mut out = vec![zbar.to_vec()];
    out.extend(m.probe_points());
    let mut rng = sample::rng_from_seed(seed);
    out.extend(m.sample_points(count, &mut rng));
    if let Some(r) = local_radius {
        out.retain(|z| norm.eval(&sub(z, zbar)) <= r);
    }
    out
}

/// Sharp weak minimality: for every sampled z in M,
/// F(zbar) is NOT included in F(z) - mu |z - zbar| e + int K.
pub fn sharp_weak_min_check(
    inst: &SharpInstance,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<SampledCheck> {
    inst.validate(tol)?;
    let mut notes = Vec::new();
    if !inst.e_interior(tol) {
        notes.push("e lies on the boundary of K, not its interior".into());
    }
    // realize "+ int K" by shifting the left side against an interior
    // direction: x - delta d in S + K implies x in S + int K
    let d = inst.cone.interior_direction(tol)?;
    let delta_shift = scale(-tol.strict_margin, &d);
    let f_bar = inst.f.value(&inst.zbar, inst.norm)?;
    let zs = feasible_samples(
        &inst.feasible,
        &inst.zbar,
        inst.local_radius,
        samples,
        seed,
        inst.norm,
    );
    let mut holds = true;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for z in &zs {
        let dist = inst.norm.eval(&sub(z, &inst.zbar));
        let shift = scale(-inst.mu * dist, &inst.e);
        let target = inst
            .f
            .value(z, inst.norm)?
            .translate(&shift)?
            .with_cone(&inst.cone)?;
        let lhs = UnionSet::from(f_bar.translate(&delta_shift)?);
        let rep = includes(&lhs, &target, false, tol)?;
        // the claim is the NON-inclusion
        let margin = -rep.margin;
        if margin < worst {
            worst = margin;
            if rep.holds {
                witness = Some(z.clone());
            }
        }
        if rep.holds {
            holds = false;
        }
    }
    Ok(SampledCheck {
        holds,
        worst_margin: worst,
        witness,
        samples: zs.len(),
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessaryConditionCheck {
    /// upper subdifferential gate for T at zbar, recorded not enforced
    pub gate: TestVerdict,
    pub condition: SampledCheck,
}

/// Necessary optimality: for tangent directions u at zbar,
/// T(u) is never in mu |u| e - int K.
pub fn necessary_condition_check(
    inst: &SharpInstance,
    t_op: &LinMap,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<NecessaryConditionCheck> {
    inst.validate(tol)?;
    let params = SubdiffParams {
        seed,
        norm: inst.norm,
        ..Default::default()
    };
    let gate = subdiff_test(
        &inst.f,
        &inst.zbar,
        t_op,
        &inst.cone,
        SubdiffSide::Upper,
        &params,
        tol,
    )?
    .verdict;

    let tc = tangent_cone(&inst.feasible, &inst.zbar, tol)?;
    let mut dirs: Vec<Vec<f64>> = tc.generators().to_vec();
    dirs.push(vec![0.0; inst.zbar.len()]);
    let mut rng = sample::rng_from_seed(seed);
    for _ in 0..samples {
        if tc.generators().is_empty() {
            break;
        }
        let w = sample::simplex_weights(&mut rng, tc.generators().len());
        let mut u = vec![0.0; inst.zbar.len()];
        for (wi, g) in w.iter().zip(tc.generators()) {
            for (ui, gi) in u.iter_mut().zip(g) {
                *ui += wi * gi;
            }
        }
        let n = inst.norm.eval(&u);
        if n > 1e-12 {
            dirs.push(scale(1.0 / n, &u));
        }
    }
    let mut holds = true;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for u in &dirs {
        let point = sub(&scale(inst.mu * inst.norm.eval(u), &inst.e), &t_op.apply(u));
        let (inside, margin) = inst.cone.contains(&point, true, tol)?;
        // condition demands NON-membership of the interior
        let m = -margin;
        if m < worst {
            worst = m;
            if inside {
                witness = Some(u.clone());
            }
        }
        if inside {
            holds = false;
        }
    }
    Ok(NecessaryConditionCheck {
        gate,
        condition: SampledCheck {
            holds,
            worst_margin: worst,
            witness,
            samples: dirs.len(),
            notes: vec![],
        },
    })
}

/// Perturbed problem data for the stability bound |z_eps - zbar| <= eps/(mu-L).
#[derive(Debug, Clone)]
pub struct StabilityInstance {
    pub f: BoxMap,
    pub h: BoxMap,
    pub feasible: GenSet,
    pub zbar: Vec<f64>,
    pub z_eps: Vec<f64>,
    pub mu: f64,
    pub lipschitz: f64,
    pub eps: f64,
    pub e: Vec<f64>,
    pub cone: PolyhedralCone,
    pub norm: NormId,
}

impl StabilityInstance {
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        if !(self.lipschitz > 0.0 && self.lipschitz < self.mu) {
            return Err(Error::InvalidValue("need 0 < L < mu".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::InvalidValue("eps must be positive".into()));
        }
        if self.feasible.distance_to_core(&self.z_eps, tol)? > tol.feas_tol {
            return Err(Error::PointNotInSet);
        }
        let (inside, _) = self.cone.contains(&self.e, true, tol)?;
        if !inside {
            return Err(Error::InvalidValue("e must lie in int K".into()));
        }
        Ok(())
    }

    fn sharp_part(&self) -> SharpInstance {
        SharpInstance {
            f: self.f.clone(),
            feasible: self.feasible.clone(),
            zbar: self.zbar.clone(),
            mu: self.mu,
            e: self.e.clone(),
            cone: self.cone.clone(),
            norm: self.norm,
            local_radius: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityCheck {
    pub hypotheses: Vec<(String, bool, f64)>,
    pub bound: f64,
    pub deviation: f64,
    pub bound_holds: bool,
    /// bound minus deviation; nonnegative when the proposition's estimate is
    /// respected
    pub slack: f64,
    pub consistent: bool,
    pub samples: usize,
}

/// Check hypotheses (i) sharp minimality of F at zbar, (ii) H contracts with
/// constant L toward zbar, (iii) z_eps is eps-minimal for F + H; then the
/// distance bound.
pub fn stability_check(
    inst: &StabilityInstance,
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<StabilityCheck> {
    inst.validate(tol)?;
    let mut hypotheses = Vec::new();

    let sharp = sharp_weak_min_check(&inst.sharp_part(), samples, seed, tol)?;
    hypotheses.push(("sharp_weak_min".to_string(), sharp.holds, sharp.worst_margin));

    let zs = feasible_samples(&inst.feasible, &inst.zbar, None, samples, seed ^ 1, inst.norm);

    // (ii): H(z) + L |z - zbar| e inside H(zbar) + K
    let h_bar_k = inst.h.value(&inst.zbar, inst.norm)?.with_cone(&inst.cone)?;
    let mut ii_holds = true;
    let mut ii_margin = f64::INFINITY;
    for z in &zs {
        let dist = inst.norm.eval(&sub(z, &inst.zbar));
        let lhs = inst
            .h
            .value(z, inst.norm)?
            .translate(&scale(inst.lipschitz * dist, &inst.e))?;
        let rep = includes(&UnionSet::from(lhs), &h_bar_k, false, tol)?;
        ii_margin = ii_margin.min(rep.margin);
        ii_holds &= rep.holds;
    }
    hypotheses.push(("h_contracts".to_string(), ii_holds, ii_margin));

    // (iii): (F+H)(z) inside (F+H)(z_eps) - eps e + K
    let fh = |z: &[f64]| -> Result<GenSet> {
        inst.f.value(z, inst.norm)?.sum(&inst.h.value(z, inst.norm)?)
    };
    let target = fh(&inst.z_eps)?
        .translate(&scale(-inst.eps, &inst.e))?
        .with_cone(&inst.cone)?;
    let mut iii_holds = true;
    let mut iii_margin = f64::INFINITY;
    for z in &zs {
        let rep = includes(&UnionSet::from(fh(z)?), &target, false, tol)?;
        iii_margin = iii_margin.min(rep.margin);
        iii_holds &= rep.holds;
    }
    hypotheses.push(("eps_minimality".to_string(), iii_holds, iii_margin));

    let bound = inst.eps / (inst.mu - inst.lipschitz);
    let deviation = inst.norm.eval(&sub(&inst.z_eps, &inst.zbar));
    let bound_holds = deviation <= bound + tol.feas_tol;
    let hyps_hold = hypotheses.iter().all(|(_, h, _)| *h);
    Ok(StabilityCheck {
        hypotheses,
        bound,
        deviation,
        bound_holds,
        slack: bound - deviation,
        consistent: !(hyps_hold && !bound_holds),
        samples: zs.len(),
    })
}

/// The 1-d worked instance with the bound met at equality: F(z) = [z, z],
/// H(z) = [-L z, -L z] on [0, 1], mu = 1, z_eps = eps/(mu - L).
pub fn derived_line_instance(eps: f64, tol: &Tolerance) -> Result<StabilityInstance> {
    use crate::setmaps::Poly;
    let mu = 1.0;
    let lipschitz = 0.5;
    let z_eps = eps / (mu - lipschitz);
    if z_eps > 1.0 {
        return Err(Error::InvalidValue("eps too large for the unit interval".into()));
    }
    let lin = Poly::linear(1, 0, 1.0);
    let f = BoxMap::new(vec![lin.clone()], vec![lin], vec![0.0], vec![1.0], tol)?;
    let hlin = Poly::linear(1, 0, -lipschitz);
    let h = BoxMap::new(vec![hlin.clone()], vec![hlin], vec![0.0], vec![1.0], tol)?;
    Ok(StabilityInstance {
        f,
        h,
        feasible: GenSet::new(vec![vec![0.0], vec![1.0]], vec![], 0.0, false, NormId::L2)?,
        zbar: vec![0.0],
        z_eps: vec![z_eps],
        mu,
        lipschitz,
        eps,
        e: vec![1.0],
        cone: PolyhedralCone::orthant(1, tol),
        norm: NormId::L2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setmaps::Poly;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn line_band_sharp() -> SharpInstance {
        let t = tol();
        let lin = Poly::linear(1, 0, 1.0);
        let f = BoxMap::new(
            vec![lin.clone()],
            vec![lin.plus(&Poly::constant(1, 1.0))],
            vec![0.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        SharpInstance {
            f,
            feasible: GenSet::new(vec![vec![0.0], vec![1.0]], vec![], 0.0, false, NormId::L2)
                .unwrap(),
            zbar: vec![0.0],
            mu: 1.0,
            e: vec![1.0],
            cone: PolyhedralCone::orthant(1, &t),
            norm: NormId::L2,
            local_radius: None,
        }
    }

    #[test]
    fn line_band_is_sharp_at_zero() {
        let chk = sharp_weak_min_check(&line_band_sharp(), 64, 3, &tol()).unwrap();
        assert!(chk.holds, "worst margin {}", chk.worst_margin);
        assert!(chk.samples > 10);
    }

    #[test]
    fn constant_map_is_not_sharp() {
        // F constant and e interior: F(zbar) = F(z) sits inside
        // F(z) - mu d e + int K because the shift mu d e is itself interior,
        // so the non-inclusion fails at every z > 0
        let t = tol();
        let f = BoxMap::new(
            vec![Poly::constant(1, 0.0)],
            vec![Poly::constant(1, 1.0)],
            vec![0.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let inst = SharpInstance {
            f,
            ..line_band_sharp()
        };
        let chk = sharp_weak_min_check(&inst, 64, 3, &t).unwrap();
        assert!(!chk.holds);
        assert!(chk.witness.unwrap()[0] > 0.0);
    }

    #[test]
    fn vacuous_grid_at_zbar_only() {
        let mut inst = line_band_sharp();
        inst.feasible = GenSet::singleton(vec![0.0], NormId::L2);
        let chk = sharp_weak_min_check(&inst, 16, 3, &tol()).unwrap();
        assert!(chk.holds, "F(zbar) never fits in F(zbar) + int K for pointed K");
    }

    #[test]
    fn shallow_slope_is_not_sharp() {
        // F(z) = [2z, 2z+1] with mu = 1: inclusion appears at z > 0 since
        // F(z) - z + int K covers F(0) strictly
        let t = tol();
        let lin = Poly::linear(1, 0, 2.0);
        let f = BoxMap::new(
            vec![lin.clone()],
            vec![lin.plus(&Poly::constant(1, 1.0))],
            vec![0.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let inst = SharpInstance {
            f,
            mu: 1.0,
            ..line_band_sharp()
        };
        let chk = sharp_weak_min_check(&inst, 64, 3, &t).unwrap();
        assert!(!chk.holds);
        assert!(chk.witness.unwrap()[0] > 0.0);
    }

    #[test]
    fn necessary_condition_on_line_band() {
        let t = tol();
        let inst = line_band_sharp();
        let chk = necessary_condition_check(&inst, &LinMap::scalar(1.0), 32, 5, &t).unwrap();
        assert_eq!(chk.gate, TestVerdict::Pass, "T = 1 is an upper subgradient");
        assert!(chk.condition.holds, "u >= 0: u - u = 0 never interior");

        // T = 2 is not an upper subgradient; the gate records the failure
        // while the inequality itself still holds (2u >= u)
        let chk = necessary_condition_check(&inst, &LinMap::scalar(2.0), 32, 5, &t).unwrap();
        assert_eq!(chk.gate, TestVerdict::Fail);
        assert!(chk.condition.holds);
    }

    #[test]
    fn zero_direction_passes_trivially() {
        let t = tol();
        let mut inst = line_band_sharp();
        inst.feasible = GenSet::singleton(vec![0.0], NormId::L2);
        let chk = necessary_condition_check(&inst, &LinMap::scalar(1.0), 8, 5, &t).unwrap();
        assert!(chk.condition.holds, "mu*0*e - 0 = 0 is not interior");
    }

    #[test]
    fn derived_line_instance_is_tight() {
        let t = tol();
        let inst = derived_line_instance(0.25, &t).unwrap();
        let chk = stability_check(&inst, 64, 9, &t).unwrap();
        assert!(chk.hypotheses.iter().all(|(_, h, _)| *h), "{:?}", chk.hypotheses);
        assert!(chk.bound_holds);
        assert!(chk.slack.abs() <= 1e-9, "equality case, slack {}", chk.slack);
        assert!(chk.consistent);
    }

    #[test]
    fn z_eps_at_zbar_is_trivial() {
        let t = tol();
        let mut inst = derived_line_instance(0.25, &t).unwrap();
        inst.z_eps = vec![0.0];
        let chk = stability_check(&inst, 32, 9, &t).unwrap();
        assert!(chk.bound_holds);
        assert!(chk.slack > 0.0);
    }

    #[test]
    fn huge_eps_makes_bound_vacuous() {
        let t = tol();
        // eps >= (mu - L) * diam M makes the bound cover the whole interval
        let inst = derived_line_instance(0.5, &t).unwrap();
        let chk = stability_check(&inst, 32, 9, &t).unwrap();
        assert!(chk.bound >= 1.0);
        assert!(chk.bound_holds);
    }

    #[test]
    fn sharp_monotone_in_mu() {
        // pass at mu implies pass at smaller mu
        let t = tol();
        let base = line_band_sharp();
        let hi = sharp_weak_min_check(&base, 64, 3, &t).unwrap();
        assert!(hi.holds);
        for mu in [0.75, 0.5, 0.25] {
            let inst = SharpInstance { mu, ..base.clone() };
            let chk = sharp_weak_min_check(&inst, 64, 3, &t).unwrap();
            assert!(chk.holds, "mu = {mu}");
        }
    }
}
