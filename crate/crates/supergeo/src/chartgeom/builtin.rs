//! Built-in charts with graded metrics, used as examples and test fixtures.
//!
//! All coefficient functions here are polynomial or rational, so every
//! derivative the solver takes is exact.

use crate::error::{Error, Result};
use crate::grassmann::{Coefficient, IndexSet, MultiPoly, Superfunction};

use super::{Chart, GradedMetric};

/// Names accepted by [`builtin_chart`].
pub const BUILTIN_CHARTS: &[&str] = &["flat-r22", "hyperbolic", "sphere", "r12-odd", "mixed-r22"];

/// Looks up a built-in chart by name.
///
/// * `flat-r22` — ℝ^{2|2} with the constant metric `I₂ ⊕ [[0,1],[-1,0]]`;
///   everything about it is flat.
/// * `hyperbolic` — the upper half-plane `ℝ²_{y>0}`, `g = (dx² + dy²)/y²`,
///   constant curvature `-1`.
/// * `sphere` — stereographic coordinates on the unit sphere,
///   `g = 4 (dx² + dy²) / (1 + x² + y²)²`, constant curvature `+1`.
/// * `r12-odd` — ℝ^{1|2} with `g_tt = 1` and odd block
///   `(1 + t²)·[[0,1],[-1,0]]`: purely even coefficients but genuinely
///   curved odd directions.
/// * `mixed-r22` — ℝ^{2|2} with soul corrections in the even block and
///   even-odd cross terms; exercises every sign in the solver.
pub fn builtin_chart(name: &str) -> Result<GradedMetric> {
    match name {
        "flat-r22" => flat_r22(),
        "hyperbolic" => hyperbolic(),
        "sphere" => sphere(),
        "r12-odd" => r12_odd(),
        "mixed-r22" => mixed_r22(),
        other => Err(Error::InvalidParams(format!(
            "unknown builtin chart `{other}` (available: {})",
            BUILTIN_CHARTS.join(", ")
        ))),
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn zero_matrix(n: usize, m: usize) -> Vec<Vec<Superfunction>> {
    vec![vec![Superfunction::zero(n, m); n + m]; n + m]
}

fn flat_r22() -> Result<GradedMetric> {
    let (n, m) = (2, 2);
    let mut g = zero_matrix(n, m);
    g[0][0] = Superfunction::constant(n, m, 1.0);
    g[1][1] = Superfunction::constant(n, m, 1.0);
    g[2][3] = Superfunction::constant(n, m, 1.0);
    g[3][2] = Superfunction::constant(n, m, -1.0);
    GradedMetric::new(
        Chart::new("flat-r22", names(&["x", "y"]), names(&["th1", "th2"])),
        g,
    )
}

fn hyperbolic() -> Result<GradedMetric> {
    let mut y_sq = MultiPoly::zero(2);
    y_sq.add_term(&[0, 2], 1.0);
    let conformal = Coefficient::rational(MultiPoly::constant(2, 1.0), y_sq)?;
    let entry = Superfunction::term(2, 0, IndexSet::EMPTY, conformal);
    let mut g = zero_matrix(2, 0);
    g[0][0] = entry.clone();
    g[1][1] = entry;
    GradedMetric::new(Chart::new("hyperbolic", names(&["x", "y"]), vec![]), g)
}

fn sphere() -> Result<GradedMetric> {
    // (1 + x² + y²)²
    let mut den = MultiPoly::zero(2);
    den.add_term(&[0, 0], 1.0);
    den.add_term(&[2, 0], 2.0);
    den.add_term(&[0, 2], 2.0);
    den.add_term(&[4, 0], 1.0);
    den.add_term(&[2, 2], 2.0);
    den.add_term(&[0, 4], 1.0);
    let conformal = Coefficient::rational(MultiPoly::constant(2, 4.0), den)?;
    let entry = Superfunction::term(2, 0, IndexSet::EMPTY, conformal);
    let mut g = zero_matrix(2, 0);
    g[0][0] = entry.clone();
    g[1][1] = entry;
    GradedMetric::new(Chart::new("sphere", names(&["x", "y"]), vec![]), g)
}

fn r12_odd() -> Result<GradedMetric> {
    let (n, m) = (1, 2);
    let mut b = MultiPoly::zero(1); // 1 + t²
    b.add_term(&[0], 1.0);
    b.add_term(&[2], 1.0);
    let b = Superfunction::term(n, m, IndexSet::EMPTY, Coefficient::from_poly(b));
    let mut g = zero_matrix(n, m);
    g[0][0] = Superfunction::constant(n, m, 1.0);
    g[1][2] = b.clone();
    g[2][1] = b.scale(-1.0);
    GradedMetric::new(Chart::new("r12-odd", names(&["t"]), names(&["th1", "th2"])), g)
}

fn mixed_r22() -> Result<GradedMetric> {
    let (n, m) = (2, 2);
    let x = MultiPoly::var(n, 0)?;
    let y = MultiPoly::var(n, 1)?;
    let both = IndexSet::from_indices(&[1, 2], m)?;
    let th1 = IndexSet::from_indices(&[1], m)?;
    let th2 = IndexSet::from_indices(&[2], m)?;

    let mut g = zero_matrix(n, m);
    // Even block: identity body plus soul corrections x·θ1θ2 and ½·θ1θ2.
    g[0][0] = Superfunction::constant(n, m, 1.0)
        .add(&Superfunction::term(n, m, both, Coefficient::from_poly(x)))?;
    g[1][1] = Superfunction::constant(n, m, 1.0).add(&Superfunction::term(
        n,
        m,
        both,
        Coefficient::constant(n, 0.5),
    ))?;
    // Even-odd coupling: g_{x,θ1} = y·θ2, g_{y,θ2} = ¼·θ1. Cross entries of
    // a graded-symmetric metric are symmetric, |x||θ| = 0.
    g[0][2] = Superfunction::term(n, m, th2, Coefficient::from_poly(y));
    g[2][0] = g[0][2].clone();
    g[1][3] = Superfunction::term(n, m, th1, Coefficient::constant(n, 0.25));
    g[3][1] = g[1][3].clone();
    // Odd block: (1 + x²)·[[0,1],[-1,0]].
    let mut b = MultiPoly::zero(n);
    b.add_term(&[0, 0], 1.0);
    b.add_term(&[2, 0], 1.0);
    let b = Superfunction::term(n, m, IndexSet::EMPTY, Coefficient::from_poly(b));
    g[2][3] = b.clone();
    g[3][2] = b.scale(-1.0);
    GradedMetric::new(
        Chart::new("mixed-r22", names(&["x", "y"]), names(&["th1", "th2"])),
        g,
    )
}
