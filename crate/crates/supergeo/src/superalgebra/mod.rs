//! Finite-dimensional real Lie superalgebras.
//!
//! An algebra is stored through its structure constants over a homogeneous
//! basis (even basis vectors first, then odd), optionally together with a
//! sparse matrix realization. Brackets of basis elements are sparse lists,
//! which keeps Jacobi checks and Killing forms cheap.

mod families;
mod forms;
mod hc;
mod involution;
mod json;
mod matrix;

pub use families::{construct_named, d21, d21_unbalanced, gl, osp, psl, sl, u};
pub use forms::{
    ad_invariance_residual, biinv_connection, biinv_curvature, extend_odd_form, ExtendReport,
    FormChecks, GradedForm,
};
pub use hc::{
    ad_operator, ad_reduced_invariance, validate_hc_pair, AdAction, HarishChandraPair, HcReport,
};
pub use involution::{
    check_involution, eigensplit, matrix_involution, InvolutionReport, SymmetricDecomposition,
};
pub use json::{algebra_from_json, algebra_to_json, AlgebraDoc, GroupDoc, RealizationDoc};
pub use matrix::{MatrixBasis, SparseMat};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grassmann::Parity;

/// Description of the reduced Lie group attached to a constructed algebra,
/// for Harish-Chandra pair bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGroupInfo {
    pub name: String,
    pub dim: usize,
}

/// A matrix realization: sparse basis matrices in block form, with the even
/// block of size `even_block` in the upper left.
#[derive(Debug, Clone)]
pub struct Realization {
    pub even_block: usize,
    pub odd_block: usize,
    pub matrices: Vec<SparseMat>,
    /// `false` for quotient algebras whose representatives bracket only up to
    /// a central direction (psl); the matrices then live in the trace-zero
    /// complement and brackets are projected back onto it.
    pub faithful: bool,
    basis: MatrixBasis,
}

impl Realization {
    pub fn new(
        even_block: usize,
        odd_block: usize,
        matrices: Vec<SparseMat>,
        faithful: bool,
    ) -> Result<Self> {
        let basis = MatrixBasis::new(matrices.clone())?;
        Ok(Realization {
            even_block,
            odd_block,
            matrices,
            faithful,
            basis,
        })
    }

    pub fn matrix_size(&self) -> usize {
        self.even_block + self.odd_block
    }

    pub fn basis(&self) -> &MatrixBasis {
        &self.basis
    }
}

/// A finite-dimensional Lie superalgebra over ℝ with a homogeneous basis.
#[derive(Debug, Clone)]
pub struct LieSuperalgebra {
    name: String,
    labels: Vec<String>,
    parities: Vec<Parity>,
    /// Sparse structure constants: `c[i][j]` lists `(k, value)` with
    /// `[e_i, e_j] = Σ value · e_k`.
    c: Vec<Vec<Vec<(usize, f64)>>>,
    realization: Option<Realization>,
    reduced_group: Option<ReducedGroupInfo>,
}

impl LieSuperalgebra {
    /// Builds an algebra directly from structure constants.
    ///
    /// The parity layout must be homogeneous-ordered (all even basis vectors
    /// before all odd ones); constants violating the parity selection rule
    /// `|k| = |i| + |j|` are rejected.
    pub fn from_structure_constants(
        name: impl Into<String>,
        labels: Vec<String>,
        parities: Vec<Parity>,
        triples: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let dim = parities.len();
        if labels.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} basis elements",
                labels.len(),
                dim
            )));
        }
        if parities
            .windows(2)
            .any(|w| w[0] == Parity::Odd && w[1] == Parity::Even)
        {
            return Err(Error::InvalidParams(
                "basis must list even elements before odd ones".into(),
            ));
        }
        let mut c = vec![vec![Vec::new(); dim]; dim];
        for &(i, j, k, v) in triples {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "structure constant index ({i},{j},{k}) outside dimension {dim}"
                )));
            }
            if v == 0.0 {
                continue;
            }
            if parities[i].combine(parities[j]) != parities[k] {
                return Err(Error::InvalidParams(format!(
                    "structure constant ({i},{j},{k}) violates the parity rule"
                )));
            }
            c[i][j].push((k, v));
        }
        // Merge duplicate (i,j,k) triples.
        for row in &mut c {
            for list in row {
                list.sort_by_key(|&(k, _)| k);
                list.dedup_by(|b, a| {
                    if a.0 == b.0 {
                        a.1 += b.1;
                        true
                    } else {
                        false
                    }
                });
                list.retain(|&(_, v)| v != 0.0);
            }
        }
        Ok(LieSuperalgebra {
            name: name.into(),
            labels,
            parities,
            c,
            realization: None,
            reduced_group: None,
        })
    }

    /// Builds an algebra as the span of sparse matrices, deriving structure
    /// constants from super-commutators. Each bracket must land back in the
    /// span (residual below `1e-9` relative), graded antisymmetry is imposed
    /// exactly, and tiny least-squares noise below `1e-12` is dropped.
    pub fn from_matrix_span(
        name: impl Into<String>,
        even_block: usize,
        odd_block: usize,
        items: Vec<(String, Parity, SparseMat)>,
    ) -> Result<Self> {
        let name = name.into();
        let dim = items.len();
        let labels: Vec<String> = items.iter().map(|(l, _, _)| l.clone()).collect();
        let parities: Vec<Parity> = items.iter().map(|(_, p, _)| *p).collect();
        if parities
            .windows(2)
            .any(|w| w[0] == Parity::Odd && w[1] == Parity::Even)
        {
            return Err(Error::InvalidParams(
                "basis must list even elements before odd ones".into(),
            ));
        }
        let mats: Vec<SparseMat> = items.into_iter().map(|(_, _, m)| m).collect();
        let realization = Realization::new(even_block, odd_block, mats, true)?;
        let mut c = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in i..dim {
                let bracket = realization.matrices[i].super_commutator(
                    &realization.matrices[j],
                    parities[i],
                    parities[j],
                );
                let coords = realization.basis().coords(&bracket, 1e-9).map_err(|e| {
                    Error::InvalidParams(format!(
                        "[{}, {}] does not close in `{name}`: {e}",
                        labels[i], labels[j]
                    ))
                })?;
                let max = coords.amax();
                let target = parities[i].combine(parities[j]);
                let mut list = Vec::new();
                for (k, &v) in coords.iter().enumerate() {
                    if v.abs() <= 1e-12 * (1.0 + max) {
                        continue;
                    }
                    if parities[k] != target {
                        return Err(Error::InvalidParams(format!(
                            "[{}, {}] violates the parity rule in `{name}`",
                            labels[i], labels[j]
                        )));
                    }
                    list.push((k, v));
                }
                // Graded antisymmetry, imposed exactly.
                let swap_sign = -parities[i].sign_swap_with(parities[j]);
                if i != j {
                    c[j][i] = list.iter().map(|&(k, v)| (k, swap_sign * v)).collect();
                } else if swap_sign < 0.0 {
                    // [x,x] = -[x,x] for even x: force zero.
                    list.clear();
                }
                c[i][j] = list;
            }
        }
        Ok(LieSuperalgebra {
            name,
            labels,
            parities,
            c,
            realization: Some(realization),
            reduced_group: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn dim_even(&self) -> usize {
        self.parities.iter().filter(|&&p| p == Parity::Even).count()
    }

    pub fn dim_odd(&self) -> usize {
        self.dim() - self.dim_even()
    }

    /// Indices of the even basis elements (a contiguous prefix).
    pub fn even_indices(&self) -> std::ops::Range<usize> {
        0..self.dim_even()
    }

    pub fn odd_indices(&self) -> std::ops::Range<usize> {
        self.dim_even()..self.dim()
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_ref()
    }

    pub fn reduced_group(&self) -> Option<&ReducedGroupInfo> {
        self.reduced_group.as_ref()
    }

    pub fn set_reduced_group(&mut self, info: ReducedGroupInfo) {
        self.reduced_group = Some(info);
    }

    pub(crate) fn set_realization(&mut self, r: Realization) {
        self.realization = Some(r);
    }

    /// Sparse bracket of two basis elements.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[(usize, f64)] {
        &self.c[i][j]
    }

    /// Bracket of two coordinate vectors (bilinear; no homogeneity needed).
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        assert_eq!(x.len(), d);
        assert_eq!(y.len(), d);
        let mut out = DVector::zeros(d);
        for i in 0..d {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..d {
                let yj = y[j];
                if yj == 0.0 {
                    continue;
                }
                for &(k, v) in &self.c[i][j] {
                    out[k] += xi * yj * v;
                }
            }
        }
        out
    }

    /// The matrix of `ad_{e_i}` on the basis.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..d {
            for &(k, v) in &self.c[i][j] {
                m[(k, j)] = v;
            }
        }
        m
    }

    /// The matrix of `ad_x` for a coordinate vector `x`.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                for &(k, v) in &self.c[i][j] {
                    m[(k, j)] += x[i] * v;
                }
            }
        }
        m
    }

    /// Maximum graded-Jacobi defect over all basis triples:
    /// `[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]`.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        let mut acc = vec![0.0f64; d];
        for i in 0..d {
            for j in 0..d {
                let sign = self.parities[i].sign_swap_with(self.parities[j]);
                for k in 0..d {
                    for slot in acc.iter_mut() {
                        *slot = 0.0;
                    }
                    // [e_i, [e_j, e_k]]
                    for &(l, v) in &self.c[j][k] {
                        for &(r, w) in &self.c[i][l] {
                            acc[r] += v * w;
                        }
                    }
                    // -[[e_i, e_j], e_k]
                    for &(l, v) in &self.c[i][j] {
                        for &(r, w) in &self.c[l][k] {
                            acc[r] -= v * w;
                        }
                    }
                    // -(-1)^{|i||j|} [e_j, [e_i, e_k]]
                    for &(l, v) in &self.c[i][k] {
                        for &(r, w) in &self.c[j][l] {
                            acc[r] -= sign * v * w;
                        }
                    }
                    for &v in acc.iter() {
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        worst
    }

    /// Maximum graded-antisymmetry defect
    /// `c[i][j][k] + (-1)^{|i||j|} c[j][i][k]` over all triples.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let sign = self.parities[i].sign_swap_with(self.parities[j]);
                for &(k, v) in &self.c[i][j] {
                    let other = self.c[j][i]
                        .iter()
                        .find(|&&(kk, _)| kk == k)
                        .map(|&(_, w)| w)
                        .unwrap_or(0.0);
                    worst = worst.max((v + sign * other).abs());
                }
            }
        }
        worst
    }

    /// Supertrace of a realized matrix.
    pub fn supertrace(&self, m: &SparseMat) -> Result<f64> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::NoRealization(self.name.clone()))?;
        if m.size != r.matrix_size() {
            return Err(Error::DimensionMismatch(format!(
                "matrix size {} vs realization size {}",
                m.size,
                r.matrix_size()
            )));
        }
        Ok(m.supertrace(r.even_block))
    }

    /// Realizes a coordinate vector as a matrix.
    pub fn realize(&self, x: &DVector<f64>) -> Result<SparseMat> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::NoRealization(self.name.clone()))?;
        let mut out = SparseMat::zeros(r.matrix_size());
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                out = out.add(&r.matrices[i].scale(xi));
            }
        }
        Ok(out)
    }

    /// The supertrace form `S_ij = str(X_i X_j)` of a realized algebra.
    pub fn str_form(&self) -> Result<GradedForm> {
        let r = self
            .realization
            .as_ref()
            .ok_or_else(|| Error::NoRealization(self.name.clone()))?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if self.parities[i] != self.parities[j] {
                    continue; // str(X_i X_j) vanishes across parities
                }
                m[(i, j)] = r.matrices[i].matmul(&r.matrices[j]).supertrace(r.even_block);
            }
        }
        Ok(GradedForm {
            parities: self.parities.clone(),
            matrix: m,
        })
    }

    /// The Killing form `B_ij = str(ad_i ∘ ad_j)`, computed from structure
    /// constants. Entries across parities vanish by a block argument and are
    /// set to exact zero.
    pub fn killing_form(&self) -> GradedForm {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                if self.parities[i] != self.parities[j] {
                    continue;
                }
                let mut acc = 0.0;
                for l in 0..d {
                    for &(k, v1) in &self.c[i][l] {
                        let v2 = self.c[j][k]
                            .iter()
                            .find(|&&(ll, _)| ll == l)
                            .map(|&(_, w)| w)
                            .unwrap_or(0.0);
                        if v2 != 0.0 {
                            let sign = match self.parities[k] {
                                Parity::Even => 1.0,
                                Parity::Odd => -1.0,
                            };
                            acc += sign * v1 * v2;
                        }
                    }
                }
                m[(i, j)] = acc;
            }
        }
        GradedForm {
            parities: self.parities.clone(),
            matrix: m,
        }
    }

    /// Direct sum with block structure-constants; realizations are dropped.
    pub fn direct_sum(&self, other: &LieSuperalgebra) -> Result<LieSuperalgebra> {
        let name = format!("{}+{}", self.name, other.name);
        let (e1, e2) = (self.dim_even(), other.dim_even());
        let (d1, d2) = (self.dim(), other.dim());
        // New ordering: evens of both, then odds of both.
        let map1 = |i: usize| if i < e1 { i } else { e2 + i };
        let map2 = |i: usize| if i < e2 { e1 + i } else { d1 + i };
        let dim = d1 + d2;
        let mut labels = vec![String::new(); dim];
        let mut parities = vec![Parity::Even; dim];
        for i in 0..d1 {
            labels[map1(i)] = format!("{}.{}", 1, self.labels[i]);
            parities[map1(i)] = self.parities[i];
        }
        for i in 0..d2 {
            labels[map2(i)] = format!("{}.{}", 2, other.labels[i]);
            parities[map2(i)] = other.parities[i];
        }
        let mut triples = Vec::new();
        for i in 0..d1 {
            for j in 0..d1 {
                for &(k, v) in &self.c[i][j] {
                    triples.push((map1(i), map1(j), map1(k), v));
                }
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                for &(k, v) in &other.c[i][j] {
                    triples.push((map2(i), map2(j), map2(k), v));
                }
            }
        }
        Self::from_structure_constants(name, labels, parities, &triples)
    }

    /// An abelian algebra of the given even dimension.
    pub fn abelian(name: impl Into<String>, dim_even: usize) -> LieSuperalgebra {
        let labels = (0..dim_even).map(|i| format!("z{}", i + 1)).collect();
        LieSuperalgebra::from_structure_constants(
            name,
            labels,
            vec![Parity::Even; dim_even],
            &[],
        )
        .expect("abelian algebra is always valid")
    }

    /// All structure constants as flat `(i, j, k, value)` triples.
    pub fn structure_triples(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                for &(k, v) in &self.c[i][j] {
                    out.push((i, j, k, v));
                }
            }
        }
        out
    }
}
