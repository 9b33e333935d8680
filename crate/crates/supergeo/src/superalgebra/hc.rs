//! Harish-Chandra pairs: a Lie superalgebra together with a Lie group
//! integrating its even part and acting on the whole algebra.
//!
//! The group itself is handled through one-parameter subgroups `exp(tX)` for
//! even `X`; the action is either conjugation in a matrix realization or the
//! exponentiated adjoint action. Validation checks that the action consists
//! of parity-preserving automorphisms whose derivative at the identity is the
//! bracket.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

use super::{GradedForm, LieSuperalgebra, ReducedGroupInfo};

/// How the reduced group acts on the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdAction {
    /// `Ad_{exp(tX)} Y = exp(tX) · Y · exp(-tX)` in a matrix realization.
    Conjugation,
    /// `Ad_{exp(tX)} = exp(t · ad_X)` directly on coordinates.
    AdjointExp,
}

/// A Lie superalgebra paired with its reduced group.
#[derive(Debug, Clone)]
pub struct HarishChandraPair {
    pub algebra: LieSuperalgebra,
    pub group: ReducedGroupInfo,
    pub action: AdAction,
}

/// Residuals collected while validating a Harish-Chandra pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HcReport {
    /// Group dimension equals the even dimension of the algebra.
    pub dim_match: bool,
    /// Worst defect of `Ad_g [x,y] = [Ad_g x, Ad_g y]`.
    pub automorphism_residual: f64,
    /// Worst defect of `d/dt|₀ Ad_{exp(tX)} Y = [X, Y]`.
    pub derivative_residual: f64,
    /// Largest parity-mixing entry of any sampled `Ad_g`.
    pub parity_residual: f64,
}

impl HcReport {
    pub fn max_residual(&self) -> f64 {
        self.automorphism_residual
            .max(self.derivative_residual)
            .max(self.parity_residual)
    }
}

/// The operator `Ad_{exp(tX)}` on algebra coordinates, for even `X` given by
/// its basis index.
pub fn ad_operator(
    g: &LieSuperalgebra,
    action: AdAction,
    x: &DVector<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    match action {
        AdAction::AdjointExp => Ok(linalg::expm(&(g.ad_of(x) * t))),
        AdAction::Conjugation => {
            let r = g
                .realization()
                .ok_or_else(|| Error::NoRealization(g.name().to_string()))?;
            let m = g.realize(x)?.to_dense();
            let e = linalg::expm(&(&m * t));
            let e_inv = linalg::expm(&(&m * -t));
            let d = g.dim();
            let mut out = DMatrix::zeros(d, d);
            for j in 0..d {
                let yj = r.matrices[j].to_dense();
                let conj = super::SparseMat::from_dense(&(&e * yj * &e_inv));
                let (coords, _residual) = r.basis().project(&conj);
                out.set_column(j, &coords);
            }
            Ok(out)
        }
    }
}

/// Deterministic subsample of `0..n` with at most `cap` elements.
fn sample_indices(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        (0..n).collect()
    } else {
        // Evenly spaced, always including the endpoints.
        (0..cap).map(|i| i * (n - 1) / (cap - 1)).collect()
    }
}

/// Validates a Harish-Chandra pair by sampling one-parameter subgroups.
pub fn validate_hc_pair(pair: &HarishChandraPair) -> Result<HcReport> {
    let g = &pair.algebra;
    let d = g.dim();
    let dim_match = pair.group.dim == g.dim_even();

    let generators = sample_indices(g.dim_even(), 8);
    let pairs = sample_indices(d, 12);
    let mut automorphism = 0.0f64;
    let mut derivative = 0.0f64;
    let mut parity = 0.0f64;

    for &gen in &generators {
        let mut x = DVector::zeros(d);
        x[gen] = 1.0;
        let ad = g.ad_basis(gen);
        let scale = 1.0 + ad.amax();

        // Automorphism and parity checks at a finite group element.
        let a = ad_operator(g, pair.action, &x, 0.5)?;
        for i in 0..d {
            for j in 0..d {
                if g.parity(i) != g.parity(j) {
                    parity = parity.max(a[(i, j)].abs());
                }
            }
        }
        for &i in &pairs {
            let ai = a.column(i).into_owned();
            for &j in &pairs {
                let aj = a.column(j).into_owned();
                let rhs = g.bracket(&ai, &aj);
                let mut lhs = DVector::zeros(d);
                for &(k, v) in g.bracket_basis(i, j) {
                    lhs += a.column(k) * v;
                }
                automorphism = automorphism.max((lhs - rhs).amax() / scale);
            }
        }

        // Richardson-extrapolated derivative at the identity vs. ad_X.
        let t = 1e-2;
        let diff = |h: f64| -> Result<DMatrix<f64>> {
            let plus = ad_operator(g, pair.action, &x, h)?;
            let minus = ad_operator(g, pair.action, &x, -h)?;
            Ok((plus - minus) / (2.0 * h))
        };
        let coarse = diff(t)?;
        let fine = diff(t / 2.0)?;
        let extrapolated = (fine * 4.0 - coarse) / 3.0;
        derivative = derivative.max((extrapolated - &ad).amax() / scale);
    }

    Ok(HcReport {
        dim_match,
        automorphism_residual: automorphism,
        derivative_residual: derivative,
        parity_residual: parity,
    })
}

/// Worst defect of `B(Ad_g x, Ad_g y) = B(x, y)` over sampled one-parameter
/// group elements: `‖Ad_gᵀ B Ad_g - B‖`.
pub fn ad_reduced_invariance(
    g: &LieSuperalgebra,
    action: AdAction,
    form: &GradedForm,
    ts: &[f64],
) -> Result<f64> {
    let d = g.dim();
    let mut worst = 0.0f64;
    for gen in sample_indices(g.dim_even(), 8) {
        let mut x = DVector::zeros(d);
        x[gen] = 1.0;
        for &t in ts {
            let a = ad_operator(g, action, &x, t)?;
            let r = a.transpose() * &form.matrix * &a - &form.matrix;
            worst = worst.max(r.amax());
        }
    }
    Ok(worst)
}
