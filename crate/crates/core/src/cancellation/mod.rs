//! Verifiers and randomized falsifiers for the conic cancellation laws.
//!
//! Every law is an implication: a set of named hypotheses over (A, B, C, D,
//! K, e) and a conclusion. `verify_law` evaluates each hypothesis with a
//! numeric margin, evaluates the conclusion, and reports a verdict whose
//! `consistent` flag only fires when all hypotheses hold and the conclusion
//! fails beyond tolerance — the converse direction is never claimed.

mod certificate;
mod falsify;

pub use certificate::{
    certify_in_conv_plus_cone, lex_separation_chain, Certificate, MembershipWitness,
    SeparationLevel, SeparationWitness, LEX_DIM_CAP,
};
pub use falsify::{falsify, random_instance, FalsifyOutcome};

use crate::cones::PolyhedralCone;
use crate::excess::{compact_representable, compact_wrt_cone};
use crate::norm::scale;
use crate::numerics::Tolerance;
use crate::sample;
use crate::scalarization::{compute_rho, Gerstewitz};
use crate::sets::{includes, union_includes, GenSet, UnionSet};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LawId {
    RadstromClassic,
    ConicRadstrom,
    SolidCancel,
    OpenCancel,
    StarDiff,
    OrderInsensitivity,
    NonconvexRho,
    FiniteDim,
}

impl LawId {
    pub const ALL: [LawId; 8] = [
        LawId::RadstromClassic,
        LawId::ConicRadstrom,
        LawId::SolidCancel,
        LawId::OpenCancel,
        LawId::StarDiff,
        LawId::OrderInsensitivity,
        LawId::NonconvexRho,
        LawId::FiniteDim,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LawId::RadstromClassic => "RADSTROM_CLASSIC",
            LawId::ConicRadstrom => "CONIC_RADSTROM",
            LawId::SolidCancel => "SOLID_CANCEL",
            LawId::OpenCancel => "OPEN_CANCEL",
            LawId::StarDiff => "STAR_DIFF",
            LawId::OrderInsensitivity => "ORDER_INSENSITIVITY",
            LawId::NonconvexRho => "NONCONVEX_RHO",
            LawId::FiniteDim => "FINITE_DIM",
        }
    }

    pub fn parse(s: &str) -> Option<LawId> {
        LawId::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for LawId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named objects a law instance supplies.
#[derive(Debug, Clone)]
pub struct LawInstance {
    pub a: UnionSet,
    pub b: UnionSet,
    pub c: Option<UnionSet>,
    pub d: Option<UnionSet>,
    pub cone: Option<PolyhedralCone>,
    pub e: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LawOptions {
    pub seed: u64,
    pub samples: usize,
    pub tol: Tolerance,
    /// diagnostic: test the conclusion against B + K instead of conv B + K
    pub drop_conv_in_conclusion: bool,
    /// hypothesis to leave unchecked (falsification mode)
    pub dropped_hypothesis: Option<String>,
    /// skip conclusion evaluation when some hypothesis already failed
    pub lazy_conclusion: bool,
}

impl Default for LawOptions {
    fn default() -> Self {
        LawOptions {
            seed: 0,
            samples: 32,
            tol: Tolerance::default(),
            drop_conv_in_conclusion: false,
            dropped_hypothesis: None,
            lazy_conclusion: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConclusionCheck {
    pub holds: bool,
    /// positive when the conclusion holds with room; negative margins measure
    /// the worst violation
    pub margin: f64,
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub law: LawId,
    pub hypotheses: Vec<HypothesisCheck>,
    pub conclusion: ConclusionCheck,
    pub consistent: bool,
    pub rng_seed: u64,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.skipped || h.holds)
    }
}

struct LawRun<'a> {
    opts: &'a LawOptions,
    hypotheses: Vec<HypothesisCheck>,
    notes: Vec<String>,
}

impl<'a> LawRun<'a> {
    fn new(opts: &'a LawOptions) -> Self {
        LawRun {
            opts,
            hypotheses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn dropped(&self, name: &str) -> bool {
        self.opts
            .dropped_hypothesis
            .as_deref()
            .is_some_and(|d| d.eq_ignore_ascii_case(name))
    }

    fn push(&mut self, name: &str, holds: bool, margin: f64) {
        let skipped = self.dropped(name);
        self.hypotheses.push(HypothesisCheck {
            name: name.to_string(),
            holds,
            margin,
            skipped,
        });
    }

    fn push_lazy(
        &mut self,
        name: &str,
        eval: impl FnOnce() -> Result<(bool, f64)>,
    ) -> Result<()> {
        if self.dropped(name) {
            self.hypotheses.push(HypothesisCheck {
                name: name.to_string(),
                holds: true,
                margin: f64::NAN,
                skipped: true,
            });
            return Ok(());
        }
        let (holds, margin) = eval()?;
        self.push(name, holds, margin);
        Ok(())
    }

    fn all_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.skipped || h.holds)
    }

    fn finish(self, law: LawId, conclusion: ConclusionCheck, tol: &Tolerance) -> Verdict {
        let fails_beyond = !conclusion.holds && conclusion.margin < -2.0 * tol.feas_tol;
        let consistent = !(self.all_hold() && fails_beyond);
        Verdict {
            law,
            hypotheses: self.hypotheses,
            conclusion,
            consistent,
            rng_seed: self.opts.seed,
            notes: self.notes,
        }
    }
}

fn need<'t, T>(obj: &'t Option<T>, name: &str) -> Result<&'t T> {
    obj.as_ref()
        .ok_or_else(|| Error::MissingObject(name.to_string()))
}

fn all_open(s: &UnionSet) -> bool {
    s.components().iter().all(|c| c.is_open())
}

fn is_bounded(s: &UnionSet) -> bool {
    s.pooled_rays().is_empty()
}

/// Inclusion of `lhs` in `base (+ K)` where the target is a union; margin
/// positive when it holds.
fn union_inclusion(
    lhs: &UnionSet,
    base: &UnionSet,
    k: Option<&PolyhedralCone>,
    tol: &Tolerance,
    seed: u64,
) -> Result<(bool, f64, Option<Vec<f64>>)> {
    let target = match k {
        Some(k) => base.with_cone(k)?,
        None => base.clone(),
    };
    let rep = union_includes(lhs, &target, false, tol, seed)?;
    Ok((rep.holds, rep.margin, rep.witness))
}

/// Inclusion of `lhs` in the convex `target`; margin positive when it holds.
fn convex_inclusion(
    lhs: &UnionSet,
    target: &GenSet,
    tol: &Tolerance,
) -> Result<(bool, f64, Option<Vec<f64>>)> {
    let rep = includes(lhs, target, false, tol)?;
    Ok((rep.holds, rep.margin, rep.witness))
}

/// Interior direction used to realize "+ int K" inclusions: x - delta * e in
/// S + K implies x in S + int K.
fn int_shift(instance: &LawInstance, k: &PolyhedralCone, tol: &Tolerance) -> Result<Vec<f64>> {
    let e = match &instance.e {
        Some(e) => e.clone(),
        None => k.interior_direction(tol)?,
    };
    let (inside, _) = k.contains(&e, true, tol)?;
    if !inside {
        return Err(Error::NotSolid);
    }
    let n = crate::norm::NormId::L2.eval(&e);
    Ok(scale(tol.strict_margin / n, &e))
}

pub fn verify_law(law: LawId, instance: &LawInstance, opts: &LawOptions) -> Result<Verdict> {
    let tol = &opts.tol;
    let mut run = LawRun::new(opts);
    let zero_cone;
    let k: &PolyhedralCone = match &instance.cone {
        Some(k) => k,
        None => {
            if law == LawId::RadstromClassic {
                zero_cone = PolyhedralCone::zero(instance.a.dim(), tol);
                &zero_cone
            } else {
                return Err(Error::MissingObject("cone".into()));
            }
        }
    };

    match law {
        LawId::RadstromClassic => {
            let c = need(&instance.c, "C")?;
            run.push("B_closed", !instance.b.components().iter().any(|x| x.is_open()), 0.0);
            run.push("B_convex", instance.b.components().len() == 1, 0.0);
            run.push_lazy("C_bounded", || Ok((is_bounded(c), 0.0)))?;
            let lhs = instance.a.minkowski_sum(c)?;
            let rhs = c.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, None, tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else {
                let (h, m, w) = union_inclusion(&instance.a, &instance.b, None, tol, opts.seed)?;
                ConclusionCheck {
                    holds: h,
                    margin: m,
                    witness: w,
                }
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::ConicRadstrom => {
            let c = need(&instance.c, "C")?;
            run.push_lazy("C_k_bounded", || {
                Ok((c.conic_predicates(k, tol)?.k_bounded, 0.0))
            })?;
            let lhs = instance.a.minkowski_sum(c)?;
            let rhs = c.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else if opts.drop_conv_in_conclusion {
                let (h, m, w) = union_inclusion(&instance.a, &instance.b, Some(k), tol, opts.seed)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            } else {
                let target = instance.b.convexify(Some(k), false, tol)?;
                let (h, m, w) = convex_inclusion(&instance.a, &target, tol)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::SolidCancel => {
            let c = need(&instance.c, "C")?;
            run.push("K_solid", k.is_solid(), 0.0);
            run.push_lazy("C_weakly_k_compact", || Ok((compact_representable(c), 0.0)))?;
            run.notes.push(
                "weakly K-compact operationalized as compact representable (closed components, no rays)"
                    .into(),
            );
            if !k.is_solid() {
                let conclusion = vacuous_conclusion();
                return Ok(run.finish(law, conclusion, tol));
            }
            let shift = int_shift(instance, k, tol)?;
            let neg_shift: Vec<f64> = shift.iter().map(|v| -v).collect();
            let lhs = instance.a.minkowski_sum(c)?.translate(&neg_shift)?;
            let rhs = c.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion_int", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else {
                let target = instance.b.convexify(None, false, tol)?.with_cone(k)?;
                let a_shift = instance.a.translate(&neg_shift)?;
                let (h, m, w) = convex_inclusion(&a_shift, &target, tol)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::OpenCancel => {
            let c = need(&instance.c, "C")?;
            run.push_lazy("C_compact_wrt_k", || {
                Ok((compact_wrt_cone(c, k, tol)?, 0.0))
            })?;
            run.push("B_open", all_open(&instance.b), 0.0);
            let lhs = instance.a.minkowski_sum(c)?;
            let rhs = c.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else if opts.drop_conv_in_conclusion {
                let (h, m, w) = union_inclusion(&instance.a, &instance.b, Some(k), tol, opts.seed)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            } else {
                let target = instance.b.convexify(None, false, tol)?.with_cone(k)?;
                let (h, m, w) = convex_inclusion(&instance.a, &target, tol)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::StarDiff => {
            let c = need(&instance.c, "C")?;
            let d = need(&instance.d, "D")?;
            run.push_lazy("D_weakly_k_compact", || Ok((compact_representable(d), 0.0)))?;
            run.push("B_open", all_open(&instance.b), 0.0);
            let lhs = instance.a.minkowski_sum(c)?;
            let rhs = d.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else {
                star_diff_conclusion(instance, c, d, k, &mut run, opts)?
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::OrderInsensitivity => {
            let c = need(&instance.c, "C")?;
            run.push_lazy("C_compact", || Ok((compact_representable(c), 0.0)))?;
            run.push("B_open", all_open(&instance.b), 0.0);
            run.push("B_convex", instance.b.components().len() == 1, 0.0);
            run.push_lazy("A_not_in_bk", || {
                let (h, m, _) =
                    union_inclusion(&instance.a, &instance.b, Some(k), tol, opts.seed)?;
                Ok((!h, -m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else {
                let lhs = instance.a.minkowski_sum(c)?;
                let rhs = c.minkowski_sum(&instance.b)?;
                let (h, m, w) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                // conclusion is the NON-inclusion
                ConclusionCheck {
                    holds: !h,
                    margin: -m,
                    witness: w,
                }
            };
            Ok(run.finish(law, conclusion, tol))
        }
        LawId::NonconvexRho => nonconvex_rho(instance, k, run, opts),
        LawId::FiniteDim => {
            let c = need(&instance.c, "C")?;
            run.push_lazy("C_k_seq_compact", || Ok((compact_representable(c), 0.0)))?;
            run.notes.push(
                "K-sequential compactness operationalized as compact representable".into(),
            );
            let lhs = instance.a.minkowski_sum(c)?;
            let rhs = c.minkowski_sum(&instance.b)?;
            run.push_lazy("inclusion", || {
                let (h, m, _) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
                Ok((h, m))
            })?;
            let conclusion = if opts.lazy_conclusion && !run.all_hold() {
                vacuous_conclusion()
            } else if opts.drop_conv_in_conclusion {
                let (h, m, w) = union_inclusion(&instance.a, &instance.b, Some(k), tol, opts.seed)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            } else {
                let target = instance.b.convexify(None, false, tol)?.with_cone(k)?;
                let (h, m, w) = convex_inclusion(&instance.a, &target, tol)?;
                ConclusionCheck { holds: h, margin: m, witness: w }
            };
            Ok(run.finish(law, conclusion, tol))
        }
    }
}

fn vacuous_conclusion() -> ConclusionCheck {
    ConclusionCheck {
        holds: true,
        margin: f64::INFINITY,
        witness: None,
    }
}

/// Sampled conclusion of the star-difference law: members z of C -* D must
/// ship A + z into conv B + K.
fn star_diff_conclusion(
    instance: &LawInstance,
    c: &UnionSet,
    d: &UnionSet,
    k: &PolyhedralCone,
    run: &mut LawRun<'_>,
    opts: &LawOptions,
) -> Result<ConclusionCheck> {
    let tol = &opts.tol;
    let target = instance.b.convexify(None, false, tol)?.with_cone(k)?;
    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; c.dim()]];
    for cc in c.components() {
        for cp in cc.points() {
            for dc in d.components() {
                for dp in dc.points() {
                    candidates.push(crate::norm::sub(cp, dp));
                }
            }
        }
    }
    let mut rng = sample::rng_from_seed(opts.seed);
    let base = candidates.clone();
    for z in base.iter().take(opts.samples) {
        let jitter: Vec<f64> = (0..z.len())
            .map(|_| sample::uniform_in(&mut rng, -0.05, 0.05))
            .collect();
        candidates.push(crate::norm::add(z, &jitter));
    }
    let mut members = 0usize;
    let mut holds = true;
    let mut margin = f64::INFINITY;
    let mut witness = None;
    for z in &candidates {
        // z in C -* D means z + D fits inside C (union-aware)
        let shifted = d.translate(z)?;
        if !union_includes(&shifted, c, false, tol, opts.seed)?.holds {
            continue;
        }
        members += 1;
        let a_shift = instance.a.translate(z)?;
        let (h, m, w) = convex_inclusion(&a_shift, &target, tol)?;
        if m < margin {
            margin = m;
            witness = w.or(Some(z.clone()));
        }
        if !h {
            holds = false;
        }
    }
    if members == 0 {
        run.notes
            .push("no star-difference members among the sampled candidates; conclusion vacuous".into());
        return Ok(vacuous_conclusion());
    }
    run.notes
        .push(format!("star-difference conclusion sampled on {members} member points"));
    Ok(ConclusionCheck {
        holds,
        margin,
        witness: if holds { None } else { witness },
    })
}

/// The nonconvex law: hypotheses pin B away from 0 via the scalarization
/// minimum, the order-interval radius comes from compute_rho, and the
/// conclusion (a non-inclusion) is checked for the supplied C or for sampled
/// compact C inside the interval when none is given.
fn nonconvex_rho(
    instance: &LawInstance,
    k: &PolyhedralCone,
    mut run: LawRun<'_>,
    opts: &LawOptions,
) -> Result<Verdict> {
    let tol = &opts.tol;
    let law = LawId::NonconvexRho;
    run.push("K_solid", k.is_solid(), 0.0);
    if !k.is_solid() {
        return Ok(run.finish(law, vacuous_conclusion(), tol));
    }
    let e = match &instance.e {
        Some(e) => e.clone(),
        None => k.interior_direction(tol)?,
    };
    let g = Gerstewitz::new(k.clone(), e.clone(), tol)?;
    run.push_lazy("B_compact_wrt_k", || {
        Ok((compact_wrt_cone(&instance.b, k, tol)?, 0.0))
    })?;
    // the worst-violating point of A doubles as the translation witness the
    // proof reduces to; rho is computed for B shifted by it
    let mut witness_point: Option<Vec<f64>> = None;
    let mut worst_membership = f64::INFINITY;
    {
        let bk = instance.b.with_cone(k)?;
        for comp in instance.a.components() {
            for p in comp.points() {
                let (_, m) = bk.membership(p, false, tol)?;
                if m < worst_membership {
                    worst_membership = m;
                    witness_point = Some(p.clone());
                }
            }
        }
    }
    run.push_lazy("A_not_in_bk", || {
        let (h, m, _) = union_inclusion(&instance.a, &instance.b, Some(k), tol, opts.seed)?;
        Ok((!h, -m))
    })?;
    let witness_point = witness_point.unwrap_or_else(|| vec![0.0; instance.a.dim()]);
    let neg_witness: Vec<f64> = witness_point.iter().map(|v| -v).collect();
    let rho = match compute_rho(&instance.b.translate(&neg_witness)?, &g, tol) {
        Ok(r) => r,
        Err(Error::HypothesisFailed(msg)) => {
            run.notes.push(format!("rho unavailable at the witness translation: {msg}"));
            run.push("C_in_interval", false, f64::NEG_INFINITY);
            return Ok(run.finish(law, vacuous_conclusion(), tol));
        }
        Err(e) => return Err(e),
    };
    run.notes
        .push(format!("order-interval radius rho = {rho:.6} at witness {witness_point:?}"));
    let interval = crate::cones::OrderInterval::new(k.clone(), e.clone(), rho, tol)?;

    let check_compact = |c: &UnionSet| -> Result<(bool, f64)> {
        Ok((compact_representable(c), 0.0))
    };
    let check_c = |c: &UnionSet| -> Result<(bool, f64)> {
        let mut ok = true;
        for comp in c.components() {
            if comp.radius() > tol.feas_tol {
                ok = false;
            }
            for p in comp.points() {
                if !interval.contains(p, tol)? {
                    ok = false;
                }
            }
        }
        Ok((ok, 0.0))
    };
    let conclusion_for = |c: &UnionSet| -> Result<(bool, f64, Option<Vec<f64>>)> {
        let lhs = instance.a.minkowski_sum(c)?;
        let rhs = c.minkowski_sum(&instance.b)?;
        let (h, m, w) = union_inclusion(&lhs, &rhs, Some(k), tol, opts.seed)?;
        Ok((!h, -m, w))
    };

    if let Some(c) = &instance.c {
        run.push_lazy("C_weakly_k_compact", || check_compact(c))?;
        run.push_lazy("C_in_interval", || check_c(c))?;
        let conclusion = if opts.lazy_conclusion && !run.all_hold() {
            vacuous_conclusion()
        } else {
            let (h, m, w) = conclusion_for(c)?;
            ConclusionCheck { holds: h, margin: m, witness: w }
        };
        return Ok(run.finish(law, conclusion, tol));
    }

    // sample candidate C sets: {0} first, then random finite subsets of the
    // interval (scaled multiples of e stay inside both shifted cones)
    run.push("C_weakly_k_compact", true, 0.0);
    run.push("C_in_interval", true, 0.0);
    if opts.lazy_conclusion && !run.all_hold() {
        return Ok(run.finish(law, vacuous_conclusion(), tol));
    }
    let mut rng = sample::rng_from_seed(opts.seed);
    let mut worst = ConclusionCheck {
        holds: true,
        margin: f64::INFINITY,
        witness: None,
    };
    let trials = opts.samples.max(1);
    for trial in 0..trials {
        let c = if trial == 0 {
            UnionSet::from(GenSet::singleton(vec![0.0; instance.a.dim()], instance.a.norm()))
        } else {
            let npts = 1 + (trial % 5);
            let pts: Vec<Vec<f64>> = (0..npts)
                .map(|_| {
                    let gamma = sample::uniform_in(&mut rng, -0.5, 0.5);
                    scale(gamma * rho, &e)
                })
                .collect();
            UnionSet::new(
                pts.into_iter()
                    .map(|p| GenSet::singleton(p, instance.a.norm()))
                    .collect(),
            )?
        };
        debug_assert!(check_c(&c)?.0);
        let (h, m, w) = conclusion_for(&c)?;
        if m < worst.margin {
            worst = ConclusionCheck { holds: h, margin: m, witness: w };
        }
        if !h {
            worst.holds = false;
            break;
        }
    }
    run.notes
        .push(format!("conclusion sampled over {trials} candidate C sets inside the interval"));
    Ok(run.finish(law, worst, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormId;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn planar_instance() -> LawInstance {
        let t = tol();
        let k = PolyhedralCone::from_generators(2, &[vec![1.0, 0.0]], &t).unwrap();
        LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![0.0, 0.0], NormId::L2)),
            b: UnionSet::new(vec![
                GenSet::ball(vec![0.0, -1.0], 0.1, true, NormId::L2).unwrap(),
                GenSet::ball(vec![-2.0, 1.0], 0.1, true, NormId::L2).unwrap(),
            ])
            .unwrap(),
            c: Some(
                UnionSet::new(vec![
                    GenSet::singleton(vec![1.0, 2.0], NormId::L2),
                    GenSet::singleton(vec![2.0, 1.0], NormId::L2),
                ])
                .unwrap(),
            ),
            d: None,
            cone: Some(k),
            e: None,
        }
    }

    #[test]
    fn finite_dim_on_planar_example() {
        let v = verify_law(LawId::FiniteDim, &planar_instance(), &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds, "{:?}", v.conclusion);
        assert!(v.consistent);
    }

    #[test]
    fn open_cancel_conv_cannot_be_dropped() {
        // as stated the law holds on the example instance
        let v = verify_law(LawId::OpenCancel, &planar_instance(), &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds && v.consistent);

        // diagnostic mode replaces conv B + K by B + K and the conclusion
        // collapses with the 0.8 margin of the planar example
        let opts = LawOptions {
            drop_conv_in_conclusion: true,
            ..Default::default()
        };
        let v = verify_law(LawId::OpenCancel, &planar_instance(), &opts).unwrap();
        assert!(v.hypotheses_hold());
        assert!(!v.conclusion.holds);
        // violation margin is the 0.9 distance from the origin to B + K
        assert!((v.conclusion.margin + 0.9).abs() < 1e-6, "margin {}", v.conclusion.margin);
        assert!(!v.consistent, "hypotheses hold but the modified conclusion fails");
    }

    #[test]
    fn radstrom_classic_trivial_instance() {
        let zero = UnionSet::from(GenSet::singleton(vec![0.0], NormId::L2));
        let inst = LawInstance {
            a: zero.clone(),
            b: zero.clone(),
            c: Some(zero),
            d: None,
            cone: None,
            e: None,
        };
        let v = verify_law(LawId::RadstromClassic, &inst, &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold() && v.conclusion.holds && v.consistent);
    }

    #[test]
    fn half_line_c_breaks_classic_radstrom() {
        // A = {1}, B = {0}, C = [0, inf): the inclusion hypothesis holds, C
        // is unbounded, and the conclusion A in B fails
        let t = tol();
        let inst = LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![1.0], NormId::L2)),
            b: UnionSet::from(GenSet::singleton(vec![0.0], NormId::L2)),
            c: Some(UnionSet::from(
                GenSet::new(vec![vec![0.0]], vec![vec![1.0]], 0.0, false, NormId::L2).unwrap(),
            )),
            d: None,
            cone: None,
            e: None,
        };
        let opts = LawOptions {
            dropped_hypothesis: Some("C_bounded".into()),
            ..Default::default()
        };
        let v = verify_law(LawId::RadstromClassic, &inst, &opts).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(!v.conclusion.holds);
        assert!(!v.consistent);
        let _ = t;
    }

    #[test]
    fn nonconvex_rho_with_sampled_c() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let inst = LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![0.0, 0.0], NormId::L2)),
            b: UnionSet::from(GenSet::singleton(vec![2.0, 2.0], NormId::L2)),
            c: None,
            d: None,
            cone: Some(k),
            e: Some(vec![1.0, 1.0]),
        };
        let v = verify_law(LawId::NonconvexRho, &inst, &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds, "{:?}", v.conclusion);
        assert!(v.consistent);
        assert!(v.notes.iter().any(|n| n.contains("rho")));
    }

    #[test]
    fn solid_cancel_constructed_instance() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        // A = b + k + 0.5 e stays strictly interior
        let inst = LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![1.5, 1.0], NormId::L2)),
            b: UnionSet::from(GenSet::singleton(vec![0.5, 0.25], NormId::L2)),
            c: Some(UnionSet::from(
                GenSet::new(
                    vec![vec![0.0, 0.0], vec![1.0, 0.5]],
                    vec![],
                    0.0,
                    false,
                    NormId::L2,
                )
                .unwrap(),
            )),
            d: None,
            cone: Some(k),
            e: Some(vec![1.0, 1.0]),
        };
        let v = verify_law(LawId::SolidCancel, &inst, &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds && v.consistent);
    }

    #[test]
    fn star_diff_constructed_instance() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let d = UnionSet::from(
            GenSet::new(
                vec![vec![0.0, 0.0], vec![0.5, 0.0]],
                vec![],
                0.0,
                false,
                NormId::L2,
            )
            .unwrap(),
        );
        let e_small = UnionSet::from(GenSet::singleton(vec![0.05, 0.05], NormId::L2));
        let c = d.minkowski_sum(&e_small).unwrap();
        let b = UnionSet::from(GenSet::ball(vec![1.0, 1.0], 0.3, true, NormId::L2).unwrap());
        // a = b-center + k stays well inside B + K after adding E
        let inst = LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![1.5, 1.0], NormId::L2)),
            b,
            c: Some(c),
            d: Some(d),
            cone: Some(k),
            e: None,
        };
        let v = verify_law(LawId::StarDiff, &inst, &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds, "{:?} notes {:?}", v.conclusion, v.notes);
        assert!(v.consistent);
    }

    #[test]
    fn order_insensitivity_on_outside_point() {
        let t = tol();
        let k = PolyhedralCone::from_generators(2, &[vec![1.0, 0.0]], &t).unwrap();
        let inst = LawInstance {
            a: UnionSet::from(GenSet::singleton(vec![0.0, 5.0], NormId::L2)),
            b: UnionSet::from(GenSet::ball(vec![0.0, 0.0], 0.2, true, NormId::L2).unwrap()),
            c: Some(
                UnionSet::new(vec![
                    GenSet::singleton(vec![1.0, 2.0], NormId::L2),
                    GenSet::singleton(vec![2.0, 1.0], NormId::L2),
                ])
                .unwrap(),
            ),
            d: None,
            cone: Some(k),
            e: None,
        };
        let v = verify_law(LawId::OrderInsensitivity, &inst, &LawOptions::default()).unwrap();
        assert!(v.hypotheses_hold(), "{:?}", v.hypotheses);
        assert!(v.conclusion.holds && v.consistent);
    }

    #[test]
    fn falsifier_finds_half_line_counterexample() {
        let t = tol();
        let out = falsify(LawId::RadstromClassic, Some("C_bounded"), 10_000, 7, 1, &t).unwrap();
        let (trial, inst, verdict) = out.counterexample.expect("counterexample expected");
        assert!(trial < 10_000);
        assert!(!inst.c.unwrap().pooled_rays().is_empty(), "C should be unbounded");
        assert!(verdict.hypotheses_hold());
        assert!(!verdict.conclusion.holds);
    }

    #[test]
    fn falsifier_is_deterministic() {
        let t = tol();
        let a = falsify(LawId::RadstromClassic, Some("C_bounded"), 2_000, 7, 1, &t).unwrap();
        let b = falsify(LawId::RadstromClassic, Some("C_bounded"), 2_000, 7, 1, &t).unwrap();
        match (&a.counterexample, &b.counterexample) {
            (Some((ta, _, _)), Some((tb, _, _))) => assert_eq!(ta, tb),
            (None, None) => {}
            _ => panic!("nondeterministic outcome"),
        }
    }

    #[test]
    fn soundness_spot_check_all_laws() {
        // small spot sweep: nothing dropped, hypotheses enforced by the
        // generator, no inconsistent verdicts allowed
        let t = tol();
        for law in LawId::ALL {
            let out = falsify(law, None, 150, 3, 2, &t).unwrap();
            assert!(
                out.counterexample.is_none(),
                "law {law} produced a spurious counterexample: {:?}",
                out.counterexample.map(|(t, i, v)| (t, i.a, v.conclusion))
            );
        }
    }
}
