//! Thomas-algorithm solver for tridiagonal boundary-value recursions.
//!
//! Every linear system produced by the tail and sampling recursions is
//! strictly diagonally dominant (the dominance margin is `u * nu0 > 0`), so
//! plain LU elimination without pivoting is stable here.

use crate::error::{Error, Result};

/// A tridiagonal linear system `A x = rhs`.
///
/// `sub[i]` is `A[i+1][i]`, `diag[i]` is `A[i][i]`, `sup[i]` is `A[i][i+1]`;
/// `sub` and `sup` are one entry shorter than `diag`.
#[derive(Debug, Clone)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty tridiagonal system".into()));
        }
        if rhs.len() != n || sub.len() != n - 1 || sup.len() != n - 1 {
            return Err(Error::InvalidParameter(format!(
                "inconsistent band lengths: sub {}, diag {}, sup {}, rhs {}",
                sub.len(),
                n,
                sup.len(),
                rhs.len()
            )));
        }
        Ok(Self {
            sub,
            diag,
            sup,
            rhs,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Solves the system by forward elimination and back substitution.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c = vec![0.0; n]; // eliminated super-diagonal
        let mut d = vec![0.0; n]; // eliminated right-hand side

        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::SingularSystem { row: 0 });
        }
        if n > 1 {
            c[0] = self.sup[0] / pivot;
        }
        d[0] = self.rhs[0] / pivot;

        for i in 1..n {
            pivot = self.diag[i] - self.sub[i - 1] * c[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem { row: i });
            }
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            d[i] = (self.rhs[i] - self.sub[i - 1] * d[i - 1]) / pivot;
        }

        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= c[i] * next;
        }
        Ok(d)
    }

    /// Infinity norm of `A x - rhs`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut r = self.diag[i] * x[i] - self.rhs[i];
            if i > 0 {
                r += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                r += self.sup[i] * x[i + 1];
            }
            worst = worst.max(r.abs());
        }
        worst
    }
}
