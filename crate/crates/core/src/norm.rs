use serde::{Deserialize, Serialize};

/// Ambient norm of a space. The unit ball of this norm is the only ball shape
/// sets may carry, so set radii and distances always refer to the same norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormId {
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "linf")]
    LInf,
}

impl NormId {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            NormId::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormId::L1 => x.iter().map(|v| v.abs()).sum(),
            NormId::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Dual norm, i.e. the support function of this norm's unit ball.
    pub fn dual(&self, y: &[f64]) -> f64 {
        match self {
            NormId::L2 => NormId::L2.eval(y),
            NormId::L1 => NormId::LInf.eval(y),
            NormId::LInf => NormId::L1.eval(y),
        }
    }

    /// A unit vector u (in this norm) maximizing y·u over the unit ball.
    /// Returns the zero vector when y = 0.
    pub fn dual_achiever(&self, y: &[f64]) -> Vec<f64> {
        match self {
            NormId::L2 => {
                let n = NormId::L2.eval(y);
                if n == 0.0 {
                    vec![0.0; y.len()]
                } else {
                    y.iter().map(|v| v / n).collect()
                }
            }
            NormId::L1 => {
                // ball is the cross-polytope: best vertex is ±e_j at the largest |y_j|
                let mut best = 0usize;
                for (j, v) in y.iter().enumerate() {
                    if v.abs() > y[best].abs() {
                        best = j;
                    }
                }
                let mut u = vec![0.0; y.len()];
                if y[best] != 0.0 {
                    u[best] = y[best].signum();
                }
                u
            }
            NormId::LInf => y
                .iter()
                .map(|v| if *v == 0.0 { 0.0 } else { v.signum() })
                .collect(),
        }
    }
}

impl std::fmt::Display for NormId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormId::L2 => write!(f, "l2"),
            NormId::L1 => write!(f, "l1"),
            NormId::LInf => write!(f, "linf"),
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(t: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| t * x).collect()
}

pub fn axpy(t: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += t * xi;
    }
}
