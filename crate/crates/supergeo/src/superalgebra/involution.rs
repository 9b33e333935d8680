//! Involutive automorphisms and the induced symmetric decomposition
//! `g = k ⊕ p` into `+1` and `-1` eigenspaces.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grassmann::Parity;
use crate::linalg;

use super::{LieSuperalgebra, SparseMat};

/// Residuals of the three defining properties of an involutive automorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionReport {
    /// `‖σ² - I‖`.
    pub involutive: f64,
    /// Largest entry of σ mixing even with odd basis vectors.
    pub parity: f64,
    /// Worst defect of `σ[x,y] = [σx, σy]` over basis pairs.
    pub automorphism: f64,
}

impl InvolutionReport {
    pub fn max(&self) -> f64 {
        self.involutive.max(self.parity).max(self.automorphism)
    }
}

/// Lifts a map on realization matrices to a coordinate matrix by applying it
/// to each basis matrix and projecting the image back onto the basis. Errors
/// if the algebra has no realization or an image leaves the span.
pub fn matrix_involution<F>(g: &LieSuperalgebra, map: F) -> Result<DMatrix<f64>>
where
    F: Fn(&SparseMat) -> SparseMat,
{
    let r = g
        .realization()
        .ok_or_else(|| Error::NoRealization(g.name().into()))?;
    let d = g.dim();
    let mut sigma = DMatrix::zeros(d, d);
    for j in 0..d {
        let coords = r.basis().coords(&map(&r.matrices[j]), 1e-8)?;
        sigma.set_column(j, &coords);
    }
    Ok(sigma)
}

/// Checks that a coordinate matrix is a parity-preserving involutive
/// automorphism of the algebra.
pub fn check_involution(g: &LieSuperalgebra, sigma: &DMatrix<f64>) -> Result<InvolutionReport> {
    let d = g.dim();
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "involution is {}x{} but the algebra has dimension {d}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let involutive = (sigma * sigma - DMatrix::<f64>::identity(d, d)).amax();
    let mut parity = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if g.parity(i) != g.parity(j) {
                parity = parity.max(sigma[(i, j)].abs());
            }
        }
    }
    let mut automorphism = 0.0f64;
    for i in 0..d {
        let si = sigma.column(i).into_owned();
        for j in 0..d {
            let sj = sigma.column(j).into_owned();
            let rhs = g.bracket(&si, &sj);
            let mut lhs = DVector::zeros(d);
            for &(k, v) in g.bracket_basis(i, j) {
                lhs += sigma.column(k) * v;
            }
            automorphism = automorphism.max((lhs - rhs).amax());
        }
    }
    Ok(InvolutionReport {
        involutive,
        parity,
        automorphism,
    })
}

/// The symmetric decomposition induced by an involution: column bases of the
/// fixed space `k` and the `-1` eigenspace `p`, with bracket inclusion
/// residuals `[k,k] ⊂ k`, `[k,p] ⊂ p`, `[p,p] ⊂ k`.
#[derive(Debug, Clone)]
pub struct SymmetricDecomposition {
    pub k_basis: DMatrix<f64>,
    pub p_basis: DMatrix<f64>,
    pub k_parities: Vec<Parity>,
    pub p_parities: Vec<Parity>,
    pub kk_residual: f64,
    pub kp_residual: f64,
    pub pp_residual: f64,
}

impl SymmetricDecomposition {
    /// `(even, odd)` dimensions of `k`.
    pub fn k_dims(&self) -> (usize, usize) {
        let e = self
            .k_parities
            .iter()
            .filter(|&&p| p == Parity::Even)
            .count();
        (e, self.k_parities.len() - e)
    }

    /// `(even, odd)` dimensions of `p`.
    pub fn p_dims(&self) -> (usize, usize) {
        let e = self
            .p_parities
            .iter()
            .filter(|&&p| p == Parity::Even)
            .count();
        (e, self.p_parities.len() - e)
    }

    pub fn max_residual(&self) -> f64 {
        self.kk_residual.max(self.kp_residual).max(self.pp_residual)
    }
}

/// Splits the algebra into eigenspaces of an involution, block by parity so
/// each basis vector of `k` and `p` is homogeneous.
pub fn eigensplit(
    g: &LieSuperalgebra,
    sigma: &DMatrix<f64>,
    tol: f64,
) -> Result<SymmetricDecomposition> {
    let report = check_involution(g, sigma)?;
    if report.max() > tol {
        return Err(Error::InvalidInvolution {
            reason: "not an involutive parity-preserving automorphism".into(),
            residual: report.max(),
        });
    }
    let d = g.dim();
    let n0 = g.dim_even();

    // Collect eigenvectors per parity block so the split stays homogeneous.
    let mut k_cols: Vec<DVector<f64>> = Vec::new();
    let mut p_cols: Vec<DVector<f64>> = Vec::new();
    let mut k_parities = Vec::new();
    let mut p_parities = Vec::new();
    for (range, parity) in [
        (0..n0, Parity::Even),
        (n0..d, Parity::Odd),
    ] {
        let len = range.len();
        if len == 0 {
            continue;
        }
        let block = sigma.view((range.start, range.start), (len, len)).into_owned();
        let id = DMatrix::<f64>::identity(len, len);
        for (proj, cols, pars) in [
            ((&block + &id) * 0.5, &mut k_cols, &mut k_parities),
            ((-&block + &id) * 0.5, &mut p_cols, &mut p_parities),
        ] {
            for v in linalg::column_space_basis(&proj, 1e-10) {
                let mut full = DVector::zeros(d);
                for i in 0..len {
                    full[range.start + i] = v[i];
                }
                cols.push(full);
                pars.push(parity);
            }
        }
    }
    if k_cols.len() + p_cols.len() != d {
        return Err(Error::InvalidInvolution {
            reason: format!(
                "eigenspaces have dimensions {} + {} != {d}",
                k_cols.len(),
                p_cols.len()
            ),
            residual: report.max(),
        });
    }

    let k_basis = DMatrix::from_columns(&k_cols.iter().map(|v| v.column(0)).collect::<Vec<_>>());
    let p_basis = DMatrix::from_columns(&p_cols.iter().map(|v| v.column(0)).collect::<Vec<_>>());

    // Change of basis to (k, p) coordinates for inclusion residuals.
    let mut t = DMatrix::zeros(d, d);
    for (c, v) in k_cols.iter().chain(p_cols.iter()).enumerate() {
        t.set_column(c, &v.column(0));
    }
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::BadLinearSystem("eigenbasis is singular".into()))?;
    let nk = k_cols.len();

    let component = |z: &DVector<f64>, in_k: bool| -> f64 {
        let coords = &t_inv * z;
        let mut worst = 0.0f64;
        let range = if in_k { 0..nk } else { nk..d };
        for i in range {
            worst = worst.max(coords[i].abs());
        }
        worst
    };

    let mut kk = 0.0f64;
    let mut kp = 0.0f64;
    let mut pp = 0.0f64;
    for x in &k_cols {
        for y in &k_cols {
            kk = kk.max(component(&g.bracket(x, y), false));
        }
        for y in &p_cols {
            kp = kp.max(component(&g.bracket(x, y), true));
        }
    }
    for x in &p_cols {
        for y in &p_cols {
            pp = pp.max(component(&g.bracket(x, y), false));
        }
    }

    Ok(SymmetricDecomposition {
        k_basis,
        p_basis,
        k_parities,
        p_parities,
        kk_residual: kk,
        kp_residual: kp,
        pp_residual: pp,
    })
}

#[cfg(test)]
mod tests {
    use super::super::families;
    use super::*;

    /// Conjugation by diag(1, -1, 1) on osp(2|2) coordinates, built from the
    /// realization: a parity-preserving involutive automorphism.
    fn conjugation_involution(g: &LieSuperalgebra, signs: &[f64]) -> DMatrix<f64> {
        let r = g.realization().unwrap();
        let d = g.dim();
        let mut sigma = DMatrix::zeros(d, d);
        for j in 0..d {
            let m = &r.matrices[j];
            let mut conj = Vec::new();
            for &(row, col, v) in &m.entries {
                conj.push((row, col, signs[row] * v * signs[col]));
            }
            let cm = super::super::SparseMat::from_entries(m.size, &conj);
            let coords = r.basis().coords(&cm, 1e-9).unwrap();
            sigma.set_column(j, &coords);
        }
        sigma
    }

    #[test]
    fn split_of_gl_2_under_block_conjugation() {
        // gl(2|1) under Ad(diag(1,-1,1)): k = block-diagonal part.
        let g = families::gl(2, 1).unwrap();
        let sigma = conjugation_involution(&g, &[1.0, -1.0, 1.0]);
        let report = check_involution(&g, &sigma).unwrap();
        assert!(report.max() < 1e-12, "residual {}", report.max());
        let split = eigensplit(&g, &sigma, 1e-9).unwrap();
        // Even part: diag E11, E22, E33 and the pair E13, E31 stay fixed;
        // E12, E21 flip. Odd: E13-type entries touching row/col 2 flip.
        assert_eq!(split.k_dims(), (3, 2));
        assert_eq!(split.p_dims(), (2, 2));
        assert!(split.max_residual() < 1e-12);
    }

    #[test]
    fn non_involution_is_rejected() {
        let g = families::gl(1, 1).unwrap();
        let mut sigma = DMatrix::identity(4, 4);
        sigma[(0, 0)] = 2.0;
        assert!(eigensplit(&g, &sigma, 1e-9).is_err());
    }
}
