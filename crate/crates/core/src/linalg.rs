//! Dense square-matrix helpers generic over real and dual-number scalars.

use ndarray::Array2;
use num_dual::DualNum;

/// Scalars the geometry kernels run on: `f64` and the `num-dual` types.
pub trait Scalar: DualNum<Primitive = f64> + Copy {}

impl<T: DualNum<Primitive = f64> + Copy> Scalar for T {}

/// Inverse and determinant by Gauss–Jordan elimination with partial
/// pivoting on the real part. Returns `None` for an exactly singular matrix.
pub fn inverse_and_det<S: Scalar>(m: &Array2<S>) -> Option<(Array2<S>, S)> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let mut a = m.clone();
    let mut inv = Array2::from_shape_fn((n, n), |(i, j)| S::from(if i == j { 1.0 } else { 0.0 }));
    let mut det = S::from(1.0);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[[i, col]].re().abs().total_cmp(&a[[j, col]].re().abs()))
            .expect("non-empty range");
        if a[[pivot, col]].re() == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap([pivot, k], [col, k]);
                inv.swap([pivot, k], [col, k]);
            }
            det = -det;
        }
        let p = a[[col, col]];
        det *= p;
        let p_inv = p.recip();
        for k in 0..n {
            a[[col, k]] *= p_inv;
            inv[[col, k]] *= p_inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[[row, col]];
            for k in 0..n {
                let (ak, ik) = (a[[col, k]], inv[[col, k]]);
                a[[row, k]] -= factor * ak;
                inv[[row, k]] -= factor * ik;
            }
        }
    }
    Some((inv, det))
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
