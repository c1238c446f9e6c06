//! Set-valued maps with polynomial box values, their epigraphical maps, and
//! numeric Fréchet subdifferential machinery.
//!
//! The limit in the subdifferential definition is probed on a geometric
//! radius schedule with a pass/fail/inconclusive trichotomy: decay of the
//! excess ratio below eps_accept on the schedule tail is evidence (not
//! proof), while a ratio pinned above eps_reject at the smallest radius
//! refutes membership and ships a witness.

mod poly;

pub use poly::{Poly, Term};

use crate::cones::{normality_constant_estimate, PolyhedralCone};
use crate::excess::excess;
use crate::norm::{dot, scale, NormId};
use crate::numerics::Tolerance;
use crate::sample;
use crate::sets::{includes, GenSet, UnionSet};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const RANGE_DIM_CAP: usize = 4;

/// F(z) = prod_i [lower_i(z), upper_i(z)] over a sampling box.
#[derive(Debug, Clone)]
pub struct BoxMap {
    domain_dim: usize,
    range_dim: usize,
    lower: Vec<Poly>,
    upper: Vec<Poly>,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
}

impl BoxMap {
    /// Validates dimensions and checks lower_i <= upper_i + feas_tol on a
    /// deterministic grid plus seeded samples of the box.
    pub fn new(
        lower: Vec<Poly>,
        upper: Vec<Poly>,
        box_lo: Vec<f64>,
        box_hi: Vec<f64>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let range_dim = lower.len();
        if range_dim == 0 || range_dim != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: range_dim.max(1),
                got: upper.len(),
            });
        }
        if range_dim > RANGE_DIM_CAP {
            return Err(Error::RangeDimTooLarge(range_dim, RANGE_DIM_CAP));
        }
        let domain_dim = lower[0].dim;
        for p in lower.iter().chain(upper.iter()) {
            if p.dim != domain_dim {
                return Err(Error::DimensionMismatch {
                    expected: domain_dim,
                    got: p.dim,
                });
            }
        }
        if box_lo.len() != domain_dim || box_hi.len() != domain_dim {
            return Err(Error::DimensionMismatch {
                expected: domain_dim,
                got: box_lo.len(),
            });
        }
        let map = BoxMap {
            domain_dim,
            range_dim,
            lower,
            upper,
            box_lo,
            box_hi,
        };
        map.validate_order(tol)?;
        Ok(map)
    }

    fn validate_order(&self, tol: &Tolerance) -> Result<()> {
        let mut probes: Vec<Vec<f64>> = Vec::new();
        let steps = match self.domain_dim {
            1 => 33,
            2 => 9,
            _ => 4,
        };
        let mut idx = vec![0usize; self.domain_dim];
        loop {
            let z: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    self.box_lo[j]
                        + (self.box_hi[j] - self.box_lo[j]) * i as f64 / (steps - 1) as f64
                })
                .collect();
            probes.push(z);
            let mut j = 0;
            loop {
                if j == self.domain_dim {
                    break;
                }
                idx[j] += 1;
                if idx[j] < steps {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == self.domain_dim {
                break;
            }
        }
        let mut rng = sample::rng_from_seed(0xb0c5);
        for _ in 0..64 {
            probes.push(
                (0..self.domain_dim)
                    .map(|j| sample::uniform_in(&mut rng, self.box_lo[j], self.box_hi[j]))
                    .collect(),
            );
        }
        for z in &probes {
            for i in 0..self.range_dim {
                let lo = self.lower[i].eval(z);
                let hi = self.upper[i].eval(z);
                if lo > hi + tol.feas_tol {
                    return Err(Error::InvalidValue(format!(
                        "box map violates lower <= upper at z = {z:?} (component {i}: {lo} > {hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }
    pub fn range_dim(&self) -> usize {
        self.range_dim
    }
    pub fn box_lo(&self) -> &[f64] {
        &self.box_lo
    }
    pub fn box_hi(&self) -> &[f64] {
        &self.box_hi
    }
    pub fn lower(&self) -> &[Poly] {
        &self.lower
    }
    pub fn upper(&self) -> &[Poly] {
        &self.upper
    }

    pub fn corners(&self, z: &[f64]) -> Result<Vec<Vec<f64>>> {
        if z.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                expected: self.domain_dim,
                got: z.len(),
            });
        }
        let lo: Vec<f64> = self.lower.iter().map(|p| p.eval(z)).collect();
        let hi: Vec<f64> = self.upper.iter().map(|p| p.eval(z)).collect();
        let n = self.range_dim;
        let mut corners = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            corners.push(
                (0..n)
                    .map(|i| if mask & (1 << i) != 0 { hi[i] } else { lo[i] })
                    .collect(),
            );
        }
        Ok(corners)
    }

    /// The value F(z) as a box.
    pub fn value(&self, z: &[f64], norm: NormId) -> Result<GenSet> {
        GenSet::new(self.corners(z)?, vec![], 0.0, false, norm)
    }

    /// Epi F(z) = F(z) + K as a single convex component.
    pub fn epi_eval(&self, z: &[f64], k: &PolyhedralCone, norm: NormId) -> Result<GenSet> {
        self.value(z, norm)?.with_cone(k)
    }
}

/// Bounded linear operator as a dense range_dim x domain_dim matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinMap {
    pub rows: Vec<Vec<f64>>,
}

impl LinMap {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        for r in &rows {
            if r.len() != m || r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidValue("bad operator matrix".into()));
            }
        }
        Ok(LinMap { rows })
    }

    pub fn scalar(t: f64) -> Self {
        LinMap { rows: vec![vec![t]] }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| dot(r, u)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubdiffSide {
    #[serde(rename = "lower")]
    Lower,
    #[serde(rename = "upper")]
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubdiffReport {
    pub side: SubdiffSide,
    pub radii: Vec<f64>,
    /// worst excess ratio per radius: max over directions of e(..)/delta
    pub q: Vec<f64>,
    pub verdict: TestVerdict,
    pub witness: Option<Vec<f64>>,
    pub eps_accept: f64,
    pub eps_reject: f64,
    /// pass is evidence, not proof; fail with a witness is a refutation
    pub note: &'static str,
}

#[derive(Debug, Clone)]
pub struct SubdiffParams {
    pub delta0: f64,
    pub levels: usize,
    pub directions: usize,
    pub eps_accept: f64,
    pub eps_reject: f64,
    pub seed: u64,
    pub norm: NormId,
}

impl Default for SubdiffParams {
    fn default() -> Self {
        SubdiffParams {
            delta0: 0.5,
            levels: 9,
            directions: 64,
            eps_accept: 1e-3,
            eps_reject: 1e-1,
            seed: 0,
            norm: NormId::L2,
        }
    }
}

/// Subdifferential test against an arbitrary epigraph-valued map, so sums
/// F(.) + A reuse the same machinery.
pub fn subdiff_test_values<F>(
    values: F,
    zbar: &[f64],
    t_op: &LinMap,
    side: SubdiffSide,
    params: &SubdiffParams,
    tol: &Tolerance,
) -> Result<SubdiffReport>
where
    F: Fn(&[f64]) -> Result<UnionSet>,
{
    let e_bar = values(zbar)?;
    let dirs = sample::sphere_directions(params.seed, zbar.len(), params.directions);
    let mut radii = Vec::with_capacity(params.levels);
    let mut qs = Vec::with_capacity(params.levels);
    let mut worst_witness: Option<Vec<f64>> = None;
    for level in 0..params.levels {
        let delta = params.delta0 * 0.5f64.powi(level as i32);
        let mut q = 0.0f64;
        let mut witness: Option<Vec<f64>> = None;
        for u in &dirs {
            let z: Vec<f64> = zbar.iter().zip(u).map(|(a, b)| a + delta * b).collect();
            let e_z = values(&z)?;
            let shift = scale(delta, &t_op.apply(u));
            let shifted_bar = e_bar.translate(&shift)?;
            let value = match side {
                SubdiffSide::Lower => excess(&e_z, &shifted_bar, tol)?.value,
                SubdiffSide::Upper => excess(&shifted_bar, &e_z, tol)?.value,
            };
            let ratio = value / delta;
            if ratio > q {
                q = ratio;
                witness = Some(z);
            }
        }
        radii.push(delta);
        qs.push(q);
        if level == params.levels - 1 {
            worst_witness = witness;
        }
    }
    let n = qs.len();
    let tail_ok = n >= 2 && qs[n - 1] <= params.eps_accept && qs[n - 2] <= params.eps_accept;
    let verdict = if tail_ok {
        TestVerdict::Pass
    } else if qs[n - 1] >= params.eps_reject {
        TestVerdict::Fail
    } else {
        TestVerdict::Inconclusive
    };
    Ok(SubdiffReport {
        side,
        radii,
        q: qs,
        verdict,
        witness: if verdict == TestVerdict::Fail {
            worst_witness
        } else {
            None
        },
        eps_accept: params.eps_accept,
        eps_reject: params.eps_reject,
        note: "pass is sampling evidence, not proof; fail carries a refuting witness",
    })
}

/// Does T belong to the (lower or upper) Fréchet subdifferential of the box
/// map at zbar, as far as the radius schedule can tell?
pub fn subdiff_test(
    f: &BoxMap,
    zbar: &[f64],
    t_op: &LinMap,
    k: &PolyhedralCone,
    side: SubdiffSide,
    params: &SubdiffParams,
    tol: &Tolerance,
) -> Result<SubdiffReport> {
    let norm = params.norm;
    subdiff_test_values(
        |z| Ok(UnionSet::from(f.epi_eval(z, k, norm)?)),
        zbar,
        t_op,
        side,
        params,
        tol,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct SumInvarianceCheck {
    pub plain: SubdiffReport,
    pub shifted: SubdiffReport,
    /// verdicts agree, as the sum-invariance identity demands
    pub consistent: bool,
}

/// The subdifferential is invariant under adding a compact representable set
/// to the values: run the same test on F and on F(.) + A and compare.
pub fn subdiff_sum_invariance_test(
    f: &BoxMap,
    a: &UnionSet,
    zbar: &[f64],
    t_op: &LinMap,
    k: &PolyhedralCone,
    side: SubdiffSide,
    params: &SubdiffParams,
    tol: &Tolerance,
) -> Result<SumInvarianceCheck> {
    if !crate::excess::compact_representable(a) {
        return Err(Error::HypothesisFailed(
            "summand must be compact representable".into(),
        ));
    }
    let norm = params.norm;
    let plain = subdiff_test(f, zbar, t_op, k, side, params, tol)?;
    let shifted = subdiff_test_values(
        |z| {
            let epi = UnionSet::from(f.epi_eval(z, k, norm)?);
            epi.minkowski_sum(a)
        },
        zbar,
        t_op,
        side,
        params,
        tol,
    )?;
    let consistent = plain.verdict == shifted.verdict;
    Ok(SumInvarianceCheck {
        plain,
        shifted,
        consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzCheck {
    pub holds: bool,
    pub worst_margin: f64,
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub samples: usize,
}

/// K-Lipschitz test: F(z'') + l |z'' - z'| e inside F(z') + K on sampled
/// pairs around zbar. The direction e lives in the range space.
pub fn k_lipschitz_check(
    f: &BoxMap,
    zbar: &[f64],
    ell: f64,
    e: &[f64],
    radius: f64,
    samples: usize,
    k: &PolyhedralCone,
    norm: NormId,
    tol: &Tolerance,
) -> Result<LipschitzCheck> {
    if ell <= 0.0 {
        return Err(Error::InvalidValue("Lipschitz constant must be positive".into()));
    }
    let (inside, _) = k.contains(e, false, tol)?;
    if !inside {
        return Err(Error::HypothesisFailed("e must lie in K".into()));
    }
    let mut rng = sample::rng_from_seed(0x11b5);
    let m = zbar.len();
    let mut holds = true;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let pick = |rng: &mut rand_chacha::ChaCha12Rng| -> Vec<f64> {
            let u = sample::unit_direction(rng, m);
            let t = sample::uniform_in(rng, 0.0, radius);
            zbar.iter().zip(&u).map(|(a, b)| a + t * b).collect()
        };
        let z1 = pick(&mut rng);
        let z2 = pick(&mut rng);
        let dist = norm.eval(&crate::norm::sub(&z2, &z1));
        let lhs = f
            .value(&z2, norm)?
            .translate(&scale(ell * dist, e))?;
        let target = f.value(&z1, norm)?.with_cone(k)?;
        let rep = includes(&UnionSet::from(lhs), &target, false, tol)?;
        if rep.margin < worst {
            worst = rep.margin;
            if !rep.holds {
                witness = Some((z1.clone(), z2.clone()));
            }
        }
        holds &= rep.holds;
    }
    Ok(LipschitzCheck {
        holds,
        worst_margin: worst,
        witness,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubgradientBoundCheck {
    pub subdiff_gate: TestVerdict,
    pub lipschitz_gate: bool,
    pub alpha_estimate: f64,
    pub tested_directions: usize,
    pub holds: bool,
    pub worst_ratio: f64,
    pub witness: Option<Vec<f64>>,
    pub vacuous: bool,
}

/// |T u| <= alpha l |e| over unit u with Tu in K or -K, with alpha the
/// sampled normality lower bound. A too-small alpha estimate can flag a
/// violation on wild cones; the report carries the estimate for that reason.
#[allow(clippy::too_many_arguments)]
pub fn subgradient_bound_check(
    f: &BoxMap,
    zbar: &[f64],
    t_op: &LinMap,
    k: &PolyhedralCone,
    ell: f64,
    e: &[f64],
    samples: usize,
    seed: u64,
    norm: NormId,
    tol: &Tolerance,
) -> Result<SubgradientBoundCheck> {
    let params = SubdiffParams {
        seed,
        norm,
        ..Default::default()
    };
    let gate = subdiff_test(f, zbar, t_op, k, SubdiffSide::Lower, &params, tol)?;
    let lips = k_lipschitz_check(f, zbar, ell, e, 0.5, samples.min(64), k, norm, tol)?;
    let alpha = normality_constant_estimate(k, norm, samples.max(16), seed, tol)?;
    let bound = alpha * ell * norm.eval(e) + tol.feas_tol;

    let mut rng = sample::rng_from_seed(seed);
    let m = zbar.len();
    let mut tested = 0usize;
    let mut holds = true;
    let mut worst = 0.0f64;
    let mut witness = None;
    for _ in 0..samples.max(1) * 4 {
        let u = if m == 1 {
            vec![if sample::uniform_in(&mut rng, 0.0, 1.0) < 0.5 { 1.0 } else { -1.0 }]
        } else {
            sample::unit_direction(&mut rng, m)
        };
        let tu = t_op.apply(&u);
        let in_k = k.contains(&tu, false, tol)?.0;
        let neg_tu: Vec<f64> = tu.iter().map(|v| -v).collect();
        let in_neg = k.contains(&neg_tu, false, tol)?.0;
        if !(in_k || in_neg) {
            continue;
        }
        tested += 1;
        let ntu = norm.eval(&tu);
        if ntu > worst {
            worst = ntu;
        }
        if ntu > bound {
            holds = false;
            witness = Some(u);
        }
        if tested >= samples.max(1) {
            break;
        }
    }
    Ok(SubgradientBoundCheck {
        subdiff_gate: gate.verdict,
        lipschitz_gate: lips.holds,
        alpha_estimate: alpha,
        tested_directions: tested,
        holds,
        worst_ratio: worst / (alpha * ell * norm.eval(e)).max(1e-300),
        witness,
        vacuous: tested == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// F(z) = [z^2, z^2 + 1] on [-1, 1].
    fn parabola_band() -> BoxMap {
        let t = tol();
        let sq = Poly::new(1, vec![Term { coeff: 1.0, exponents: vec![2] }]).unwrap();
        let sq1 = sq.clone().plus(&Poly::constant(1, 1.0));
        BoxMap::new(vec![sq], vec![sq1], vec![-1.0], vec![1.0], &t).unwrap()
    }

    /// F(z) = [z, z + 1] on [-1, 1].
    fn line_band() -> BoxMap {
        let t = tol();
        let lin = Poly::linear(1, 0, 1.0);
        let lin1 = lin.clone().plus(&Poly::constant(1, 1.0));
        BoxMap::new(vec![lin], vec![lin1], vec![-1.0], vec![1.0], &t).unwrap()
    }

    #[test]
    fn epi_eval_shapes() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = parabola_band();
        let epi = f.epi_eval(&[0.0], &k, NormId::L2).unwrap();
        assert_eq!(epi.points().len(), 2); // 0 and 1
        assert_eq!(epi.rays().len(), 1);
        let epi2 = f.epi_eval(&[2.0], &k, NormId::L2).unwrap();
        assert!((epi2.points()[0][0] - 4.0).abs() < 1e-12);
        assert!((epi2.points()[1][0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn box_map_order_validated() {
        let t = tol();
        let lin = Poly::linear(1, 0, 1.0);
        let c = Poly::constant(1, 0.0);
        // lower = z, upper = 0 crosses on (0, 1]
        assert!(BoxMap::new(vec![lin], vec![c], vec![-1.0], vec![1.0], &t).is_err());
    }

    #[test]
    fn singleton_box() {
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let f = BoxMap::new(
            vec![Poly::linear(1, 0, 1.0), Poly::linear(1, 0, -1.0)],
            vec![Poly::linear(1, 0, 1.0), Poly::linear(1, 0, -1.0)],
            vec![-2.0],
            vec![2.0],
            &t,
        )
        .unwrap();
        let epi = f.epi_eval(&[1.0], &k, NormId::L2).unwrap();
        assert_eq!(epi.points().len(), 1);
        assert_eq!(epi.points()[0], vec![1.0, -1.0]);
    }

    #[test]
    fn zero_lower_subgradient_of_parabola_passes() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = parabola_band();
        let rep = subdiff_test(
            &f,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert_eq!(rep.verdict, TestVerdict::Pass);
        assert!(rep.q.iter().all(|&q| q <= 1e-9), "q = {:?}", rep.q);
    }

    #[test]
    fn parabola_upper_ratio_decays_linearly() {
        // e(Epi F(0) + 0, Epi F(z)) = z^2, so q(delta) = delta
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = parabola_band();
        let rep = subdiff_test(
            &f,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Upper,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        for (q, d) in rep.q.iter().zip(&rep.radii) {
            assert!((q / d - 1.0).abs() <= 0.1, "q = {q}, delta = {d}");
        }
    }

    #[test]
    fn shifted_slope_fails_with_witness() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = parabola_band();
        let rep = subdiff_test(
            &f,
            &[0.0],
            &LinMap::scalar(0.2),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert_eq!(rep.verdict, TestVerdict::Fail);
        let w = rep.witness.expect("fail ships a witness");
        assert!(w[0] > 0.0, "obstruction sits on the positive side: {w:?}");
    }

    #[test]
    fn line_band_cases() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = line_band();
        // T = 1 is both a lower and an upper subgradient: excesses vanish
        for side in [SubdiffSide::Lower, SubdiffSide::Upper] {
            let rep = subdiff_test(
                &f,
                &[0.0],
                &LinMap::scalar(1.0),
                &k,
                side,
                &SubdiffParams::default(),
                &t,
            )
            .unwrap();
            assert_eq!(rep.verdict, TestVerdict::Pass, "side {side:?}");
            assert!(rep.q.iter().all(|&q| q <= 1e-9));
        }
        // T = 0 fails the lower test with a witness z < 0 and ratio ~ 1
        let rep = subdiff_test(
            &f,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert_eq!(rep.verdict, TestVerdict::Fail);
        assert!((rep.q.last().unwrap() - 1.0).abs() < 0.05);
        assert!(rep.witness.unwrap()[0] < 0.0);
    }

    #[test]
    fn scalar_consistency_with_classical_subdifferential() {
        // smooth convex f: T = f'(zbar) passes, T = f'(zbar) +/- 0.2 fails
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let sq = Poly::new(1, vec![Term { coeff: 1.0, exponents: vec![2] }]).unwrap();
        let f = BoxMap::new(
            vec![sq.clone()],
            vec![sq.plus(&Poly::constant(1, 0.5))],
            vec![-2.0],
            vec![2.0],
            &t,
        )
        .unwrap();
        let zbar = [0.5];
        let grad = 2.0 * zbar[0];
        for (slope, expect_pass) in [(grad, true), (grad + 0.2, false), (grad - 0.2, false)] {
            let rep = subdiff_test(
                &f,
                &zbar,
                &LinMap::scalar(slope),
                &k,
                SubdiffSide::Lower,
                &SubdiffParams::default(),
                &t,
            )
            .unwrap();
            if expect_pass {
                assert_eq!(rep.verdict, TestVerdict::Pass, "slope {slope}");
            } else {
                assert_eq!(rep.verdict, TestVerdict::Fail, "slope {slope}");
            }
        }
    }

    #[test]
    fn concave_quadratic_halves_q_along_schedule() {
        // f(z) = -z^2, T = 0: q(delta) = delta, ratios sit near 1/2
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let neg_sq = Poly::new(1, vec![Term { coeff: -1.0, exponents: vec![2] }]).unwrap();
        let f = BoxMap::new(
            vec![neg_sq.clone()],
            vec![neg_sq.plus(&Poly::constant(1, 1.0))],
            vec![-1.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let rep = subdiff_test(
            &f,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        let n = rep.q.len();
        for i in n - 4..n {
            let ratio = rep.q[i] / rep.q[i - 1];
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio} at level {i}");
        }
    }

    #[test]
    fn product_formula_in_r2() {
        // F(z) = [f1, f1+1] x [f2, f2+1] with smooth f_i: the diagonal
        // gradient rows pass, any 0.2 perturbation fails
        let t = tol();
        let k = PolyhedralCone::orthant(2, &t);
        let f1 = Poly::new(1, vec![Term { coeff: 1.0, exponents: vec![2] }]).unwrap();
        let f2 = Poly::linear(1, 0, 3.0);
        let f = BoxMap::new(
            vec![f1.clone(), f2.clone()],
            vec![
                f1.plus(&Poly::constant(1, 1.0)),
                f2.plus(&Poly::constant(1, 1.0)),
            ],
            vec![-1.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let zbar = [0.25];
        let rows = vec![vec![2.0 * zbar[0]], vec![3.0]];
        let good = LinMap::new(rows.clone()).unwrap();
        let rep = subdiff_test(
            &f,
            &zbar,
            &good,
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert_eq!(rep.verdict, TestVerdict::Pass);
        for i in 0..2 {
            for s in [0.2, -0.2] {
                let mut bad_rows = rows.clone();
                bad_rows[i][0] += s;
                let rep = subdiff_test(
                    &f,
                    &zbar,
                    &LinMap::new(bad_rows).unwrap(),
                    &k,
                    SubdiffSide::Lower,
                    &SubdiffParams::default(),
                    &t,
                )
                .unwrap();
                assert_eq!(rep.verdict, TestVerdict::Fail, "row {i} shift {s}");
            }
        }
    }

    #[test]
    fn sum_invariance() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = parabola_band();
        let a = UnionSet::from(
            GenSet::new(vec![vec![0.0], vec![2.0]], vec![], 0.0, false, NormId::L2).unwrap(),
        );
        let chk = subdiff_sum_invariance_test(
            &f,
            &a,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert!(chk.consistent);
        assert_eq!(chk.plain.verdict, TestVerdict::Pass);

        // trivial summand gives identical reports
        let zero = UnionSet::from(GenSet::singleton(vec![0.0], NormId::L2));
        let chk = subdiff_sum_invariance_test(
            &f,
            &zero,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            SubdiffSide::Lower,
            &SubdiffParams::default(),
            &t,
        )
        .unwrap();
        assert!(chk.consistent);
        assert_eq!(chk.plain.q, chk.shifted.q);
    }

    #[test]
    fn lipschitz_band_cases() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = line_band();
        let chk =
            k_lipschitz_check(&f, &[0.0], 1.0, &[1.0], 0.5, 64, &k, NormId::L2, &t).unwrap();
        assert!(chk.holds, "1-Lipschitz band: worst {}", chk.worst_margin);

        let f = parabola_band();
        let chk =
            k_lipschitz_check(&f, &[0.0], 2.0, &[1.0], 1.0, 64, &k, NormId::L2, &t).unwrap();
        assert!(chk.holds, "slope bound 2 on |z| <= 1");
        let chk =
            k_lipschitz_check(&f, &[0.0], 0.5, &[1.0], 1.0, 128, &k, NormId::L2, &t).unwrap();
        assert!(!chk.holds, "slope 0.5 is violated near the rim");
        assert!(chk.witness.is_some());

        let constant = BoxMap::new(
            vec![Poly::constant(1, 1.0)],
            vec![Poly::constant(1, 2.0)],
            vec![-1.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let chk =
            k_lipschitz_check(&constant, &[0.0], 0.1, &[1.0], 1.0, 32, &k, NormId::L2, &t)
                .unwrap();
        assert!(chk.holds, "constant maps are K-Lipschitz for any positive l");
    }

    #[test]
    fn subgradient_bound_on_line_band() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let f = line_band();
        let chk = subgradient_bound_check(
            &f,
            &[0.0],
            &LinMap::scalar(1.0),
            &k,
            1.0,
            &[1.0],
            32,
            5,
            NormId::L2,
            &t,
        )
        .unwrap();
        assert_eq!(chk.subdiff_gate, TestVerdict::Pass);
        assert!(chk.lipschitz_gate);
        assert!((chk.alpha_estimate - 1.0).abs() < 1e-9);
        assert!(chk.holds, "|T u| = 1 <= 1");
        assert!(!chk.vacuous);

        // T = 0 passes vacuously tight
        let chk = subgradient_bound_check(
            &f,
            &[0.0],
            &LinMap::scalar(0.0),
            &k,
            1.0,
            &[1.0],
            32,
            5,
            NormId::L2,
            &t,
        )
        .unwrap();
        assert!(chk.holds);
    }

    #[test]
    fn steep_map_fails_lipschitz_gate_first() {
        let t = tol();
        let k = PolyhedralCone::orthant(1, &t);
        let lin = Poly::linear(1, 0, 2.0);
        let f = BoxMap::new(
            vec![lin.clone()],
            vec![lin.plus(&Poly::constant(1, 1.0))],
            vec![-1.0],
            vec![1.0],
            &t,
        )
        .unwrap();
        let chk = subgradient_bound_check(
            &f,
            &[0.0],
            &LinMap::scalar(2.0),
            &k,
            1.0,
            &[1.0],
            64,
            5,
            NormId::L2,
            &t,
        )
        .unwrap();
        assert!(!chk.lipschitz_gate, "slope 2 cannot be 1-Lipschitz");
    }
}
