//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// Matrix exponential by scaling-and-squaring with a truncated Taylor series.
///
/// The argument is scaled down until its 1-norm is below 1/2, the series is
/// summed to machine precision, and the result squared back up. Adequate for
/// the small, well-scaled matrices used for group sampling.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), a.ncols(), "expm requires a square matrix");
    let n = a.nrows();
    let norm = a.iter().fold(0.0f64, |acc, x| acc + x.abs());
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * scale;
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..40 {
        term = (&term * &b) / k as f64;
        result += &term;
        if term.amax() < 1e-17 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Least-squares solve via SVD, returning the minimum-norm solution together
/// with the residual norm `‖Ax − b‖₂` and the rank of `A`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> (DVector<f64>, f64, usize) {
    let svd = a.clone().svd(true, true);
    let rank = svd.rank(tol);
    let x = svd.solve(b, tol).expect("SVD solve");
    let residual = (a * &x - b).norm();
    (x, residual, rank)
}

/// Rank of a matrix by singular values above `tol` (relative to the largest).
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let svd = a.clone().svd(false, false);
    let max = svd.singular_values.max();
    if max == 0.0 {
        return 0;
    }
    svd.singular_values.iter().filter(|&&s| s > tol * max).count()
}

/// Signature `(positive, negative, zero)` of a symmetric matrix, counting
/// eigenvalues relative to the largest magnitude.
pub fn signature(a: &DMatrix<f64>, tol: f64) -> (usize, usize, usize) {
    let n = a.nrows();
    if n == 0 {
        return (0, 0, 0);
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max == 0.0 {
        return (0, 0, n);
    }
    let mut pos = 0;
    let mut neg = 0;
    let mut zero = 0;
    for &v in eig.eigenvalues.iter() {
        if v > tol * max {
            pos += 1;
        } else if v < -tol * max {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    (pos, neg, zero)
}

/// Orthonormal basis of the column space of `a` (singular vectors with
/// singular value above `tol` relative to the largest).
pub fn column_space_basis(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.as_ref().expect("SVD with u");
    let max = svd.singular_values.max();
    let mut out = Vec::new();
    if max == 0.0 {
        return out;
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol * max {
            out.push(u.column(k).into_owned());
        }
    }
    out
}

/// Orthonormal basis of the null space of `a`.
///
/// Computed from the eigendecomposition of `aᵀa` (the SVD in nalgebra is
/// economy-size and omits the null directions of wide matrices); the
/// tolerance is relative on singular values, so eigenvalues are compared
/// against `tol²`.
pub fn null_space_basis(a: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    if a.ncols() == 0 {
        return Vec::new();
    }
    if a.nrows() == 0 {
        return (0..a.ncols())
            .map(|i| {
                let mut v = DVector::zeros(a.ncols());
                v[i] = 1.0;
                v
            })
            .collect();
    }
    let gram = a.transpose() * a;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let max = eig.eigenvalues.amax();
    // Roundoff in the eigensolver itself sits near eps·max; keep the cut
    // comfortably above it even for very small `tol`.
    let cut = max * (tol * tol).max(1e-14);
    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if max == 0.0 || lambda.abs() <= cut {
            out.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_series_for_rotation() {
        // exp of a 90° rotation generator.
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
            * std::f64::consts::FRAC_PI_2;
        let e = expm(&a);
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((e - expect).amax() < 1e-14);
    }

    #[test]
    fn expm_inverse_is_exp_of_negative() {
        let a = DMatrix::from_row_slice(3, 3, &[0.1, 2.0, -1.0, 0.0, -0.3, 0.5, 1.0, 0.0, 0.2]);
        let e = expm(&a);
        let einv = expm(&(-&a));
        assert!((e * einv - DMatrix::identity(3, 3)).amax() < 1e-13);
    }

    #[test]
    fn signature_of_diag() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0, 0.0, 3.0]));
        assert_eq!(signature(&a, 1e-12), (2, 1, 1));
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = null_space_basis(&a, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0] + v[1] + v[2]).abs() < 1e-12);
        }
    }
}
