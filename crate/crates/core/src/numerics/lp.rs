//! Dense two-phase simplex over sign-free variables.
//!
//! Instances in this crate are tiny (a handful of variables and rows), so a
//! dense tableau with Bland's anti-cycling rule is the robust choice.

use super::Tolerance;
use crate::{Error, Result};

/// min objective·x  s.t.  ineq_matrix·x <= ineq_rhs,  eq_matrix·x = eq_rhs,
/// x sign-free.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub ineq_matrix: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_dims(&self) -> Result<()> {
        let n = self.num_vars();
        if self.ineq_matrix.len() != self.ineq_rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ineq_matrix.len(),
                got: self.ineq_rhs.len(),
            });
        }
        if self.eq_matrix.len() != self.eq_rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eq_matrix.len(),
                got: self.eq_rhs.len(),
            });
        }
        for row in self.ineq_matrix.iter().chain(self.eq_matrix.iter()) {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }
}

/// Infeasibility witness: y_ineq >= 0 with
/// y_ineq'·A_ineq + y_eq'·A_eq = 0 and y_ineq'·b_ineq + y_eq'·b_eq < 0.
#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    pub y_ineq: Vec<f64>,
    pub y_eq: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum LpResult {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible(FarkasCertificate),
    Unbounded { ray: Vec<f64> },
}

impl LpResult {
    pub fn optimal(&self) -> Option<(f64, &[f64])> {
        match self {
            LpResult::Optimal { value, point } => Some((*value, point)),
            _ => None,
        }
    }
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpResult::Infeasible(_))
    }
}

/// Standard-form tableau. Columns: x+ (n), x- (n), slacks (m1), artificials (m).
struct Tableau {
    rows: Vec<Vec<f64>>, // m rows, each n_cols + 1 (rhs last)
    obj: Vec<f64>,       // reduced costs, value in last slot (negated objective value)
    basis: Vec<usize>,
    n_cols: usize,
    art_start: usize,
    row_sign: Vec<f64>, // sign applied to each original row to make rhs >= 0
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        let inv = 1.0 / piv;
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering = lowest-index eligible column with negative
    /// reduced cost; leaving = min-ratio row, ties broken by lowest basis var.
    /// Returns Ok(true) on optimality, Ok(false) if an unbounded column was
    /// found (stored in `unbounded_col`). Phase 1 is bounded below by zero,
    /// so there an unbounded signal is rounding noise and the column is
    /// banned instead.
    fn run_simplex(
        &mut self,
        phase1: bool,
        cap: usize,
        unbounded_col: &mut Option<usize>,
    ) -> Result<bool> {
        let col_limit = if phase1 { self.n_cols } else { self.art_start };
        let mut banned = vec![false; col_limit];
        for _ in 0..cap {
            let mut enter = None;
            for j in 0..col_limit {
                if !banned[j] && self.obj[j] < -COST_TOL {
                    enter = Some(j);
                    break;
                }
            }
            let Some(j) = enter else {
                return Ok(true);
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for r in 0..self.rows.len() {
                let a = self.rows[r][j];
                if a > PIVOT_TOL {
                    let ratio = self.rows[r][self.n_cols] / a;
                    if ratio < best - 1e-12
                        || (ratio < best + 1e-12
                            && leave.is_some_and(|l| self.basis[r] < self.basis[l]))
                    {
                        best = ratio;
                        leave = Some(r);
                    }
                }
            }
            match leave {
                Some(r) => {
                    banned.iter_mut().for_each(|b| *b = false);
                    self.pivot(r, j);
                }
                None if phase1 => {
                    banned[j] = true;
                }
                None => {
                    *unbounded_col = Some(j);
                    return Ok(false);
                }
            }
        }
        Err(Error::NumericalFailure(
            "simplex iteration cap exceeded".into(),
        ))
    }
}

/// Solve a dense LP. Returns the optimum with an attaining point, an
/// infeasibility certificate, or an unbounded feasible direction.
pub fn solve_lp(p: &LpProblem, tol: &Tolerance) -> Result<LpResult> {
    p.check_dims()?;
    let n = p.num_vars();
    let m1 = p.ineq_matrix.len();
    let m2 = p.eq_matrix.len();
    let m = m1 + m2;
    let n_cols = 2 * n + m1 + m;
    let art_start = 2 * n + m1;

    let mut rows = Vec::with_capacity(m);
    let mut row_sign = Vec::with_capacity(m);
    let mut bmax = 0.0f64;
    for i in 0..m {
        let (arow, b) = if i < m1 {
            (&p.ineq_matrix[i], p.ineq_rhs[i])
        } else {
            (&p.eq_matrix[i - m1], p.eq_rhs[i - m1])
        };
        let s = if b < 0.0 { -1.0 } else { 1.0 };
        bmax = bmax.max(b.abs());
        let mut row = vec![0.0; n_cols + 1];
        for j in 0..n {
            row[j] = s * arow[j];
            row[n + j] = -s * arow[j];
        }
        if i < m1 {
            row[2 * n + i] = s;
        }
        row[art_start + i] = 1.0;
        row[n_cols] = s * b;
        rows.push(row);
        row_sign.push(s);
    }

    // Phase 1: minimize the sum of artificials; basis = artificials.
    let mut obj = vec![0.0; n_cols + 1];
    for j in 0..n_cols + 1 {
        if j >= art_start && j < n_cols {
            continue; // reduced cost of basic artificials is 0
        }
        let mut acc = 0.0;
        for row in &rows {
            acc += row[j];
        }
        obj[j] = -acc;
    }
    let mut tab = Tableau {
        rows,
        obj,
        basis: (art_start..art_start + m).collect(),
        n_cols,
        art_start,
        row_sign,
    };
    let cap = 10 * (m + n_cols) * (m + n_cols);
    let mut unb = None;
    let optimal = tab.run_simplex(true, cap.max(200), &mut unb)?;
    debug_assert!(optimal, "phase 1 is bounded below by 0");

    let phase1_value = -tab.obj[n_cols];
    if phase1_value > tol.feas_scaled(bmax) {
        // Infeasible. Recover y = c_B' B^-1 from artificial reduced costs
        // (cost 1 each): obj[art_i] = 1 - y_i.
        let y: Vec<f64> = (0..m).map(|i| 1.0 - tab.obj[art_start + i]).collect();
        let mut y_ineq = Vec::with_capacity(m1);
        let mut y_eq = Vec::with_capacity(m2);
        for i in 0..m {
            // multiplier for the original (unflipped) row, negated so that
            // the inequality part is nonnegative
            let w = -(tab.row_sign[i] * y[i]);
            if i < m1 {
                y_ineq.push(w.max(0.0));
            } else {
                y_eq.push(w);
            }
        }
        return Ok(LpResult::Infeasible(FarkasCertificate { y_ineq, y_eq }));
    }

    // Drive basic artificials out; drop rows that turn out redundant.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= art_start {
            let mut pivoted = false;
            for j in 0..art_start {
                if tab.rows[r][j].abs() > 1e-8 {
                    tab.pivot(r, j);
                    pivoted = true;
                    break;
                }
            }
            if !pivoted {
                tab.rows.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2: real objective. Reduced costs c_j - c_B' T_j.
    let mut obj = vec![0.0; n_cols + 1];
    let cost = |j: usize| -> f64 {
        if j < n {
            p.objective[j]
        } else if j < 2 * n {
            -p.objective[j - n]
        } else {
            0.0
        }
    };
    for j in 0..n_cols + 1 {
        let mut acc = if j < n_cols { cost(j) } else { 0.0 };
        for (r, row) in tab.rows.iter().enumerate() {
            acc -= cost(tab.basis[r]) * row[j];
        }
        obj[j] = acc;
    }
    tab.obj = obj;

    let mut unb = None;
    let optimal = tab.run_simplex(false, cap.max(200), &mut unb)?;
    if !optimal {
        let j = unb.expect("unbounded column recorded");
        let mut d_std = vec![0.0; 2 * n];
        if j < 2 * n {
            d_std[j] = 1.0;
        }
        let mut ray = vec![0.0; n];
        if j < n {
            ray[j] += 1.0;
        } else if j < 2 * n {
            ray[j - n] -= 1.0;
        }
        for (r, row) in tab.rows.iter().enumerate() {
            let b = tab.basis[r];
            if b < 2 * n {
                let step = -row[j];
                if b < n {
                    ray[b] += step;
                } else {
                    ray[b - n] -= step;
                }
                d_std[b] = step;
            }
        }
        let _ = d_std;
        return Ok(LpResult::Unbounded { ray });
    }

    let mut point = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        let v = tab.rows[r][tab.n_cols];
        if b < n {
            point[b] += v;
        } else if b < 2 * n {
            point[b - n] -= v;
        }
    }
    let value: f64 = p.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpResult::Optimal { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn min_x_over_halfline() {
        // min x s.t. x >= 0  <=>  -x <= 0
        let p = LpProblem {
            objective: vec![1.0],
            ineq_matrix: vec![vec![-1.0]],
            ineq_rhs: vec![0.0],
            ..Default::default()
        };
        let (v, x) = solve_lp(&p, &tol()).unwrap().optimal().map(|(v, x)| (v, x.to_vec())).unwrap();
        assert!(v.abs() <= 1e-9);
        assert!(x[0].abs() <= 1e-9);
    }

    #[test]
    fn tight_constraint() {
        // min x1+x2 s.t. x1+x2 >= 1, x >= 0
        let p = LpProblem {
            objective: vec![1.0, 1.0],
            ineq_matrix: vec![vec![-1.0, -1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            ineq_rhs: vec![-1.0, 0.0, 0.0],
            ..Default::default()
        };
        let (v, _) = solve_lp(&p, &tol()).unwrap().optimal().unwrap();
        assert!((v - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn unbounded_with_ray() {
        // min -x s.t. x >= 0
        let p = LpProblem {
            objective: vec![-1.0],
            ineq_matrix: vec![vec![-1.0]],
            ineq_rhs: vec![0.0],
            ..Default::default()
        };
        match solve_lp(&p, &tol()).unwrap() {
            LpResult::Unbounded { ray } => {
                assert!(ray[0] > 0.0);
                // feasible direction with negative objective
                assert!(-ray[0] < 0.0);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_with_farkas() {
        // x <= -1, x >= 0
        let p = LpProblem {
            objective: vec![0.0],
            ineq_matrix: vec![vec![1.0], vec![-1.0]],
            ineq_rhs: vec![-1.0, 0.0],
            ..Default::default()
        };
        match solve_lp(&p, &tol()).unwrap() {
            LpResult::Infeasible(cert) => {
                assert!(cert.y_ineq.iter().all(|&y| y >= -1e-9));
                let comb: f64 = cert.y_ineq[0] * 1.0 + cert.y_ineq[1] * (-1.0);
                assert!(comb.abs() <= 1e-7, "combination must vanish: {comb}");
                let rhs = cert.y_ineq[0] * (-1.0) + cert.y_ineq[1] * 0.0;
                assert!(rhs < -1e-9, "certified contradiction: {rhs}");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn equality_constraints_and_free_vars() {
        // min x - y s.t. x + y = 1, x - y <= 3
        let p = LpProblem {
            objective: vec![1.0, -1.0],
            ineq_matrix: vec![vec![1.0, -1.0]],
            ineq_rhs: vec![3.0],
            eq_matrix: vec![vec![1.0, 1.0]],
            eq_rhs: vec![1.0],
        };
        // x - y minimized: x - y = -t free? x+y=1 fixes y = 1-x; obj = 2x-1,
        // x free below => would be unbounded except x - y <= 3 binds nothing below.
        match solve_lp(&p, &tol()).unwrap() {
            LpResult::Unbounded { ray } => {
                // ray must satisfy eq: r_x + r_y = 0 and objective decrease
                assert!((ray[0] + ray[1]).abs() <= 1e-9);
                assert!(ray[0] - ray[1] < -1e-12);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_rows() {
        // duplicated equality rows force artificial drive-out
        let p = LpProblem {
            objective: vec![1.0, 1.0],
            ineq_matrix: vec![vec![-1.0, 0.0], vec![0.0, -1.0]],
            ineq_rhs: vec![0.0, 0.0],
            eq_matrix: vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            eq_rhs: vec![1.0, 1.0, 2.0],
        };
        let (v, _) = solve_lp(&p, &tol()).unwrap().optimal().unwrap();
        assert!((v - 1.0).abs() <= 1e-9);
    }
}
