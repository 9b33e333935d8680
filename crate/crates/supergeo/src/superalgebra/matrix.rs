//! Sparse square matrices and super-matrix bases.
//!
//! Matrix realizations of Lie superalgebras are block matrices with an even
//! (upper-left) and odd (lower-right) diagonal block. Basis elements are very
//! sparse — a handful of entries each — so brackets and coordinate solves are
//! done sparsely and stay fast even for gl(4|4).

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::Parity;

/// A sparse square matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseMat {
    pub size: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseMat {
    pub fn zeros(size: usize) -> Self {
        SparseMat {
            size,
            entries: Vec::new(),
        }
    }

    pub fn identity(size: usize) -> Self {
        SparseMat {
            size,
            entries: (0..size).map(|i| (i, i, 1.0)).collect(),
        }
    }

    /// Builds from a list of entries, merging duplicates and dropping zeros.
    pub fn from_entries(size: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(r, c, v) in entries {
            assert!(r < size && c < size, "entry ({r},{c}) outside {size}x{size}");
            *map.entry((r, c)).or_insert(0.0) += v;
        }
        SparseMat {
            size,
            entries: map
                .into_iter()
                .filter(|&(_, v)| v != 0.0)
                .map(|((r, c), v)| (r, c, v))
                .collect(),
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        SparseMat {
            size: m.nrows(),
            entries,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn scale(&self, factor: f64) -> SparseMat {
        SparseMat {
            size: self.size,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, v * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.size, other.size);
        let mut all = self.entries.clone();
        all.extend_from_slice(&other.entries);
        Self::from_entries(self.size, &all)
    }

    pub fn matmul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.size, other.size);
        // Index other's rows for the join.
        let mut by_row: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        for &(r, c, v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(r1, c1, v1) in &self.entries {
            if let Some(row) = by_row.get(&c1) {
                for &(c2, v2) in row {
                    *acc.entry((r1, c2)).or_insert(0.0) += v1 * v2;
                }
            }
        }
        SparseMat {
            size: self.size,
            entries: acc
                .into_iter()
                .filter(|&(_, v)| v != 0.0)
                .map(|((r, c), v)| (r, c, v))
                .collect(),
        }
    }

    /// Super-commutator `[A,B] = AB - (-1)^{|A||B|} BA`.
    pub fn super_commutator(&self, other: &SparseMat, pa: Parity, pb: Parity) -> SparseMat {
        let sign = pa.sign_swap_with(pb);
        self.matmul(other).add(&other.matmul(self).scale(-sign))
    }

    /// Frobenius inner product `Σ A_ij B_ij`.
    pub fn dot(&self, other: &SparseMat) -> f64 {
        assert_eq!(self.size, other.size);
        let map: BTreeMap<(usize, usize), f64> = other
            .entries
            .iter()
            .map(|&(r, c, v)| ((r, c), v))
            .collect();
        self.entries
            .iter()
            .map(|&(r, c, v)| v * map.get(&(r, c)).copied().unwrap_or(0.0))
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        // from_entries guarantees merged entries for constructed matrices,
        // but be safe with raw ones.
        let merged = Self::from_entries(self.size, &self.entries);
        merged.entries.iter().map(|&(_, _, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|&&(r, c, _)| r == c)
            .map(|&(_, _, v)| v)
            .sum()
    }

    /// Supertrace with even block of size `p`: `tr(upper) - tr(lower)`.
    pub fn supertrace(&self, p: usize) -> f64 {
        self.entries
            .iter()
            .filter(|&&(r, c, _)| r == c)
            .map(|&(r, _, v)| if r < p { v } else { -v })
            .sum()
    }
}

/// A basis of sparse matrices with a precomputed Gram factorization, used to
/// express arbitrary matrices in basis coordinates by least squares.
#[derive(Debug, Clone)]
pub struct MatrixBasis {
    mats: Vec<SparseMat>,
    chol: Cholesky<f64, Dyn>,
}

impl MatrixBasis {
    pub fn new(mats: Vec<SparseMat>) -> Result<Self> {
        let d = mats.len();
        let mut gram = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = mats[i].dot(&mats[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let chol = Cholesky::new(gram).ok_or_else(|| {
            Error::InvalidParams("matrix basis is linearly dependent".into())
        })?;
        Ok(MatrixBasis { mats, chol })
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[SparseMat] {
        &self.mats
    }

    /// Coordinates of the orthogonal projection of `m` onto the basis span,
    /// together with the norm of the projection residual `m - Σ cᵢ Bᵢ`.
    ///
    /// Coordinates within `1e-6` of a quarter-integer are snapped to it when
    /// the snapped combination reproduces `m` at least as well, so exact
    /// structure constants are not smeared by factorization roundoff.
    pub fn project(&self, m: &SparseMat) -> (DVector<f64>, f64) {
        let d = self.mats.len();
        let mut rhs = DVector::zeros(d);
        for i in 0..d {
            rhs[i] = self.mats[i].dot(m);
        }
        let coords = self.chol.solve(&rhs);
        let residual = self.residual_norm(m, &coords);
        let mut snapped = coords.clone();
        let mut moved = false;
        for v in snapped.iter_mut() {
            let q = (*v * 4.0).round() / 4.0;
            if q != *v && (q - *v).abs() < 1e-6 {
                *v = q;
                moved = true;
            }
        }
        if moved {
            let scale = 1.0 + m.frobenius_norm();
            let snapped_residual = self.residual_norm(m, &snapped);
            if snapped_residual <= residual.max(1e-12 * scale) {
                return (snapped, snapped_residual);
            }
        }
        (coords, residual)
    }

    /// `‖m - Σ cᵢ Bᵢ‖_F`, computed sparsely.
    fn residual_norm(&self, m: &SparseMat, coords: &DVector<f64>) -> f64 {
        let mut recon = m.scale(-1.0);
        for (i, mat) in self.mats.iter().enumerate() {
            if coords[i] != 0.0 {
                recon = recon.add(&mat.scale(coords[i]));
            }
        }
        recon.frobenius_norm()
    }

    /// Coordinates of `m`, requiring it to lie in the span.
    pub fn coords(&self, m: &SparseMat, tol: f64) -> Result<DVector<f64>> {
        let (coords, residual) = self.project(m);
        let scale = 1.0 + m.frobenius_norm();
        if residual > tol * scale {
            return Err(Error::NotInSpan { residual });
        }
        Ok(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_product_matches_dense() {
        let a = SparseMat::from_entries(3, &[(0, 1, 2.0), (1, 2, -1.0), (2, 0, 0.5)]);
        let b = SparseMat::from_entries(3, &[(1, 1, 3.0), (2, 0, 1.0), (0, 2, -2.0)]);
        let sparse = a.matmul(&b).to_dense();
        let dense = a.to_dense() * b.to_dense();
        assert!((sparse - dense).amax() < 1e-15);
    }

    #[test]
    fn supertrace_splits_blocks() {
        let m = SparseMat::identity(3);
        // blocks (2|1): str = 2 - 1 = 1
        assert_eq!(m.supertrace(2), 1.0);
    }

    #[test]
    fn basis_coordinates_roundtrip() {
        // Basis {E00 - E11, E01, E10} of sl(2).
        let h = SparseMat::from_entries(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let e = SparseMat::from_entries(2, &[(0, 1, 1.0)]);
        let f = SparseMat::from_entries(2, &[(1, 0, 1.0)]);
        let basis = MatrixBasis::new(vec![h.clone(), e.clone(), f.clone()]).unwrap();
        let m = h.scale(0.5).add(&e.scale(-2.0)).add(&f.scale(3.0));
        let c = basis.coords(&m, 1e-12).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-14);
        assert!((c[1] + 2.0).abs() < 1e-14);
        assert!((c[2] - 3.0).abs() < 1e-14);
        // Identity is not in the span.
        assert!(basis.coords(&SparseMat::identity(2), 1e-12).is_err());
    }
}
