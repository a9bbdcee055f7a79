//! SVD-based helpers: singular values, kernels, ranges and truncated
//! pseudo-inverse solves.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};

/// Full singular value decomposition of an `M x N` matrix, with all `N`
/// right singular vectors available (short matrices are padded with zero rows).
#[derive(Debug, Clone)]
pub struct FullSvd {
    rows: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Left singular vectors as columns, restricted to the original `M` rows.
    u: DMatrix<f64>,
    /// Right singular vectors as columns, `N x N`.
    v: DMatrix<f64>,
}

impl FullSvd {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        let (m, n) = a.shape();
        let padded = if m < n {
            let mut p = DMatrix::zeros(n, n);
            p.view_mut((0, 0), (m, n)).copy_from(a);
            p
        } else {
            a.clone()
        };
        let svd = SVD::new(padded, true, true);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let u_all = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let k = order.len();
        let mut u = DMatrix::zeros(m, k);
        let mut v = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            u.set_column(dst, &u_all.column(src).rows(0, m));
            v.set_column(dst, &v_t.row(src).transpose());
        }
        let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        Ok(Self {
            rows: m,
            singular_values: singular_values.into_iter().take(m.min(n)).collect(),
            u,
            v,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.v.nrows()
    }

    /// Orthonormal basis (as columns) of the kernel, given the numerical rank.
    pub fn kernel(&self, rank: usize) -> DMatrix<f64> {
        let n = self.num_cols();
        self.v.columns(rank, n - rank).into_owned()
    }

    /// Orthonormal basis (as columns) of the range, given the numerical rank.
    pub fn range(&self, rank: usize) -> DMatrix<f64> {
        self.u.columns(0, rank).into_owned()
    }

    /// Minimum-norm least-squares solution of `A x = b` using the leading `rank`
    /// singular triplets.
    pub fn solve_truncated(&self, b: &DVector<f64>, rank: usize) -> DVector<f64> {
        let mut x = DVector::zeros(self.num_cols());
        for k in 0..rank {
            let s = self.singular_values[k];
            if s == 0.0 {
                break;
            }
            let coef = self.u.column(k).dot(b) / s;
            x.axpy(coef, &self.v.column(k), 1.0);
        }
        x
    }
}
