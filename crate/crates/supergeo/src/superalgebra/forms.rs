//! Graded bilinear forms on Lie superalgebras: supertrace and Killing forms,
//! invariance diagnostics, and extension of an odd-odd form to the whole
//! algebra by solving the invariance equations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grassmann::Parity;
use crate::linalg;

use super::LieSuperalgebra;

/// An even bilinear form on a super vector space, stored as a dense matrix
/// `B_ij = ⟨e_i, e_j⟩` over a homogeneous basis (even elements first).
#[derive(Debug, Clone)]
pub struct GradedForm {
    pub parities: Vec<Parity>,
    pub matrix: DMatrix<f64>,
}

/// Scalar diagnostics of a graded form with respect to an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct FormChecks {
    /// Largest entry pairing an even with an odd basis vector.
    pub evenness: f64,
    /// Largest defect of `B_ij - (-1)^{|i||j|} B_ji`.
    pub graded_symmetry: f64,
    /// Worst infinitesimal invariance defect over basis generators.
    pub ad_invariance: f64,
    /// `(positive, negative, zero)` eigenvalue counts of the even block.
    pub even_signature: (usize, usize, usize),
    /// Rank of the antisymmetric odd block.
    pub odd_rank: usize,
    /// Dimension of the radical of the full form.
    pub radical_dim: usize,
}

impl GradedForm {
    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    fn dim_even(&self) -> usize {
        self.parities.iter().filter(|&&p| p == Parity::Even).count()
    }

    pub fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    /// Largest entry pairing basis vectors of different parity. An even form
    /// has none.
    pub fn evenness_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.parities[i] != self.parities[j] {
                    worst = worst.max(self.matrix[(i, j)].abs());
                }
            }
        }
        worst
    }

    /// Largest defect of graded symmetry `B(x,y) = (-1)^{|x||y|} B(y,x)`:
    /// symmetric on the even block, antisymmetric on the odd block.
    pub fn graded_symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let sign = self.parities[i].sign_swap_with(self.parities[j]);
                worst = worst.max((self.matrix[(i, j)] - sign * self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    /// The even-even submatrix (symmetric for a graded-symmetric form).
    pub fn even_block(&self) -> DMatrix<f64> {
        let n0 = self.dim_even();
        self.matrix.view((0, 0), (n0, n0)).into_owned()
    }

    /// The odd-odd submatrix (antisymmetric for a graded-symmetric form).
    pub fn odd_block(&self) -> DMatrix<f64> {
        let n0 = self.dim_even();
        let n1 = self.dim() - n0;
        self.matrix.view((n0, n0), (n1, n1)).into_owned()
    }

    pub fn rank(&self, tol: f64) -> usize {
        linalg::rank(&self.matrix, tol)
    }

    pub fn is_nondegenerate(&self, tol: f64) -> bool {
        self.rank(tol) == self.dim()
    }

    /// Basis of the radical `{x : B(x, ·) = 0}`.
    pub fn radical_basis(&self, tol: f64) -> Vec<DVector<f64>> {
        linalg::null_space_basis(&self.matrix.transpose(), tol)
    }

    /// Eigenvalue signature `(positive, negative, zero)` of the even block.
    pub fn even_signature(&self, tol: f64) -> (usize, usize, usize) {
        linalg::signature(&self.even_block(), tol)
    }

    pub fn odd_rank(&self, tol: f64) -> usize {
        linalg::rank(&self.odd_block(), tol)
    }

    /// Pulls the form back along a column basis: `B'_{ij} = B(c_i, c_j)`.
    /// The caller supplies the parities of the new basis vectors.
    pub fn restrict(&self, columns: &DMatrix<f64>, parities: Vec<Parity>) -> GradedForm {
        assert_eq!(columns.nrows(), self.dim());
        assert_eq!(columns.ncols(), parities.len());
        let matrix = columns.transpose() * &self.matrix * columns;
        GradedForm { parities, matrix }
    }

    /// Runs the full battery of diagnostics against an algebra.
    pub fn checks(&self, g: &LieSuperalgebra, tol: f64) -> FormChecks {
        FormChecks {
            evenness: self.evenness_residual(),
            graded_symmetry: self.graded_symmetry_residual(),
            ad_invariance: ad_invariance_residual(g, self),
            even_signature: self.even_signature(tol),
            odd_rank: self.odd_rank(tol),
            radical_dim: self.dim() - self.rank(tol),
        }
    }
}

/// Worst infinitesimal invariance defect
/// `B([a,y],z) + (-1)^{|a||y|} B(y,[a,z])` over basis generators `a`.
///
/// In matrix form the defect for generator `a` is `ad_aᵀ B + D_a B ad_a`
/// where `D_a` flips the sign of odd rows when `a` is odd.
pub fn ad_invariance_residual(g: &LieSuperalgebra, form: &GradedForm) -> f64 {
    let d = g.dim();
    assert_eq!(form.dim(), d, "form dimension must match the algebra");
    let mut worst = 0.0f64;
    for a in 0..d {
        let ad = g.ad_basis(a);
        let mut r = ad.transpose() * &form.matrix + &form.matrix * &ad;
        if g.parity(a) == Parity::Odd {
            // (-1)^{|a||y|}: rows indexed by odd y flip sign on the B·ad term,
            // which equals subtracting twice that contribution.
            let ba = &form.matrix * &ad;
            for y in g.odd_indices() {
                for z in 0..d {
                    r[(y, z)] -= 2.0 * ba[(y, z)];
                }
            }
        }
        worst = worst.max(r.amax());
    }
    worst
}

/// Outcome of extending an odd-odd form to a full invariant form.
#[derive(Debug, Clone)]
pub struct ExtendReport {
    /// The assembled form (even block from the solve, odd block as given).
    pub form: GradedForm,
    /// Whether the least-squares system pinned the even block uniquely.
    pub unique: bool,
    /// Rank of the linear system over `n0(n0+1)/2` unknowns.
    pub rank: usize,
    pub unknowns: usize,
    /// Residual of the invariance equations used in the solve.
    pub solve_residual: f64,
    /// Invariance defect of the assembled full form.
    pub invariance_residual: f64,
    /// Whether the odd-odd brackets span the even part (needed for
    /// uniqueness).
    pub span_ok: bool,
    /// Whether the even part acts faithfully on the odd part.
    pub faithful_ok: bool,
}

/// Extends an antisymmetric invariant form on the odd part to an even
/// graded-symmetric invariant form on the whole algebra.
///
/// The even block `B₀` is the unknown; for odd `u, v` and even `w` the
/// invariance equation `B₀([u,v], w) = B₁(v, [u,w])` is linear in `B₀` and is
/// solved in the least-squares sense. Uniqueness requires the odd-odd
/// brackets to span the even part; compatibility additionally requires `B₁`
/// itself to be invariant under the even part.
pub fn extend_odd_form(g: &LieSuperalgebra, odd_form: &DMatrix<f64>) -> Result<ExtendReport> {
    let n0 = g.dim_even();
    let n1 = g.dim_odd();
    if odd_form.nrows() != n1 || odd_form.ncols() != n1 {
        return Err(Error::DimensionMismatch(format!(
            "odd form is {}x{} but the odd part has dimension {}",
            odd_form.nrows(),
            odd_form.ncols(),
            n1
        )));
    }
    let antisym = (odd_form + odd_form.transpose()).amax();
    if antisym > 1e-10 * (1.0 + odd_form.amax()) {
        return Err(Error::InvalidParams(
            "the odd block of an even graded-symmetric form must be antisymmetric".into(),
        ));
    }

    // Unknowns: entries of the symmetric even block, upper triangle.
    let unknowns = n0 * (n0 + 1) / 2;
    let slot = |k: usize, w: usize| -> usize {
        let (a, b) = if k <= w { (k, w) } else { (w, k) };
        // Row-major upper triangle offset.
        a * n0 - a * (a + 1) / 2 + b
    };
    let odd0 = n0; // offset of the first odd index
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for u in g.odd_indices() {
        for v in g.odd_indices() {
            for w in g.even_indices() {
                let mut row = vec![0.0; unknowns];
                let mut nonzero = false;
                for &(k, cv) in g.bracket_basis(u, v) {
                    row[slot(k, w)] += cv;
                    nonzero = true;
                }
                let mut b = 0.0;
                for &(delta, cv) in g.bracket_basis(u, w) {
                    b += cv * odd_form[(v - odd0, delta - odd0)];
                }
                if nonzero || b != 0.0 {
                    rows.push(row);
                    rhs.push(b);
                }
            }
        }
    }

    let nrows = rows.len().max(1);
    let mut a = DMatrix::zeros(nrows, unknowns);
    let mut b = DVector::zeros(nrows);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            a[(r, c)] = v;
        }
        b[r] = rhs[r];
    }
    let (x, solve_residual, rank) = linalg::lstsq(&a, &b, 1e-10);

    // Assemble the full form.
    let d = g.dim();
    let mut m = DMatrix::zeros(d, d);
    for k in 0..n0 {
        for w in k..n0 {
            let v = x[slot(k, w)];
            m[(k, w)] = v;
            m[(w, k)] = v;
        }
    }
    for i in 0..n1 {
        for j in 0..n1 {
            m[(odd0 + i, odd0 + j)] = odd_form[(i, j)];
        }
    }
    let form = GradedForm {
        parities: g.parities().to_vec(),
        matrix: m,
    };
    let invariance_residual = ad_invariance_residual(g, &form);

    // Hypothesis: odd-odd brackets span the even part.
    let mut span = DMatrix::zeros(n1 * n1, n0);
    for (r, u) in g.odd_indices().enumerate() {
        for (s, v) in g.odd_indices().enumerate() {
            for &(k, cv) in g.bracket_basis(u, v) {
                span[(r * n1 + s, k)] = cv;
            }
        }
    }
    let span_ok = linalg::rank(&span, 1e-10) == n0;

    // Hypothesis: the even part acts faithfully on the odd part.
    let mut action = DMatrix::zeros(n0, n1 * n1);
    for w in g.even_indices() {
        for (s, beta) in g.odd_indices().enumerate() {
            for &(delta, cv) in g.bracket_basis(w, beta) {
                action[(w, s * n1 + (delta - odd0))] = cv;
            }
        }
    }
    let faithful_ok = linalg::rank(&action, 1e-10) == n0;

    Ok(ExtendReport {
        form,
        unique: rank == unknowns,
        rank,
        unknowns,
        solve_residual,
        invariance_residual,
        span_ok,
        faithful_ok,
    })
}

/// Levi-Civita connection of a bi-invariant metric on a Lie group, evaluated
/// on left-invariant fields: `∇_X Y = ½ [X, Y]`.
pub fn biinv_connection(g: &LieSuperalgebra, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    g.bracket(x, y) * 0.5
}

/// Curvature of a bi-invariant metric on left-invariant fields:
/// `R(X, Y) Z = -¼ [[X, Y], Z]`.
pub fn biinv_curvature(
    g: &LieSuperalgebra,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    g.bracket(&g.bracket(x, y), z) * -0.25
}
