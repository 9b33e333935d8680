//! Graded metrics on coordinate patches ℝ^{n|m} and their Levi-Civita
//! geometry.
//!
//! A chart carries `n` even and `m` odd coordinates; a graded metric is a
//! square matrix of superfunctions `g_ab = ⟨∂_a, ∂_b⟩` over the flat axis
//! order (even axes first). The metric must be even (entry `g_ab` has parity
//! `|a| + |b|`), graded symmetric (`g_ab = (-1)^{|a||b|} g_ba`), and have
//! invertible body blocks; the solver in this module turns it into
//! Christoffel symbols and curvature tensors at chosen points of the reduced
//! space.

pub mod builtin;
mod io;
mod solver;

pub use builtin::{builtin_chart, BUILTIN_CHARTS};
pub use io::{chart_from_json, chart_to_json, ChartDoc};
pub use solver::{
    christoffel_body, curvature, killing_residual, point_geometry, wrong_parity_mass,
    BodyChristoffel, BodySolver, CurvatureData, PointGeometry,
};

use crate::error::{Error, Result};
use crate::grassmann::{Parity, Superfunction};

/// Names and sizes of a coordinate patch ℝ^{n|m}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub even_names: Vec<String>,
    pub odd_names: Vec<String>,
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        even_names: Vec<String>,
        odd_names: Vec<String>,
    ) -> Chart {
        Chart {
            name: name.into(),
            even_names,
            odd_names,
        }
    }

    /// A chart with default coordinate names `x1..xn`, `th1..thm`.
    pub fn with_dims(name: impl Into<String>, n: usize, m: usize) -> Chart {
        Chart::new(
            name,
            (1..=n).map(|i| format!("x{i}")).collect(),
            (1..=m).map(|a| format!("th{a}")).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.even_names.len()
    }

    pub fn m(&self) -> usize {
        self.odd_names.len()
    }

    pub fn dim(&self) -> usize {
        self.n() + self.m()
    }

    /// Parity of a flat axis (even axes come first).
    pub fn parity_of(&self, a: usize) -> Parity {
        if a < self.n() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn axis_name(&self, a: usize) -> &str {
        if a < self.n() {
            &self.even_names[a]
        } else {
            &self.odd_names[a - self.n()]
        }
    }
}

/// Diagnostics of a graded metric over a set of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// Worst defect of `g_ab - (-1)^{|a||b|} g_ba` over samples.
    pub graded_symmetry: f64,
    /// Smallest singular value of the even body block over samples.
    pub even_body_min_sv: f64,
    /// Smallest singular value of the odd body block over samples.
    pub odd_body_min_sv: f64,
}

/// A graded metric: superfunction entries over the flat axes of a chart.
#[derive(Debug, Clone)]
pub struct GradedMetric {
    chart: Chart,
    entries: Vec<Vec<Superfunction>>,
}

impl GradedMetric {
    /// Builds a metric, enforcing the structural requirements that do not
    /// need sample points: shape and entry parities.
    pub fn new(chart: Chart, entries: Vec<Vec<Superfunction>>) -> Result<Self> {
        let dim = chart.dim();
        if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidMetric(format!(
                "metric must be a {dim}x{dim} matrix of superfunctions"
            )));
        }
        for (a, row) in entries.iter().enumerate() {
            for (b, f) in row.iter().enumerate() {
                if f.even_dim() != chart.n() || f.odd_dim() != chart.m() {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({a},{b}) lives on R^({}|{}), chart is R^({}|{})",
                        f.even_dim(),
                        f.odd_dim(),
                        chart.n(),
                        chart.m()
                    )));
                }
                let expected = chart.parity_of(a).combine(chart.parity_of(b));
                if !f.has_parity(expected) {
                    return Err(Error::InvalidMetric(format!(
                        "entry ({a},{b}) must be {expected:?} as a superfunction"
                    )));
                }
            }
        }
        Ok(GradedMetric { chart, entries })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn m(&self) -> usize {
        self.chart.m()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn entry(&self, a: usize, b: usize) -> &Superfunction {
        &self.entries[a][b]
    }

    /// Evaluates graded symmetry and body nondegeneracy at sample points.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<MetricReport> {
        let dim = self.dim();
        let n = self.n();
        let m = self.m();
        let mut symmetry = 0.0f64;
        let mut even_sv = f64::INFINITY;
        let mut odd_sv = f64::INFINITY;
        for x in points {
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "sample point has {} coordinates, chart has {n}",
                    x.len()
                )));
            }
            for a in 0..dim {
                for b in a..dim {
                    let sign = self.chart.parity_of(a).sign_swap_with(self.chart.parity_of(b));
                    let diff = self.entries[a][b]
                        .sub(&self.entries[b][a].scale(sign))?
                        .eval(x);
                    symmetry = symmetry.max(diff.max_abs());
                }
            }
            let even_body = nalgebra::DMatrix::from_fn(n, n, |i, j| self.entries[i][j].reduced(x));
            let odd_body =
                nalgebra::DMatrix::from_fn(m, m, |i, j| self.entries[n + i][n + j].reduced(x));
            for (block, slot) in [(even_body, &mut even_sv), (odd_body, &mut odd_sv)] {
                if block.nrows() == 0 {
                    continue;
                }
                let svd = block.svd(false, false);
                *slot = slot.min(svd.singular_values.min());
            }
        }
        if n == 0 {
            even_sv = 0.0;
        }
        if m == 0 {
            odd_sv = 0.0;
        }
        Ok(MetricReport {
            graded_symmetry: symmetry,
            even_body_min_sv: even_sv,
            odd_body_min_sv: odd_sv,
        })
    }

    /// Validates and errors out when symmetry is violated or a body block is
    /// numerically singular.
    pub fn require_valid(&self, points: &[Vec<f64>], tol: f64) -> Result<MetricReport> {
        let report = self.validate(points)?;
        if report.graded_symmetry > tol {
            return Err(Error::InvalidMetric(format!(
                "graded symmetry violated by {:.3e}",
                report.graded_symmetry
            )));
        }
        if self.n() > 0 && report.even_body_min_sv <= tol {
            return Err(Error::SingularMetric(format!(
                "even body block is singular (min sv {:.3e})",
                report.even_body_min_sv
            )));
        }
        if self.m() > 0 && report.odd_body_min_sv <= tol {
            return Err(Error::SingularMetric(format!(
                "odd body block is singular (min sv {:.3e})",
                report.odd_body_min_sv
            )));
        }
        Ok(report)
    }

    /// Metric, inverse, first metric derivatives, and Christoffel symbols at
    /// a point of the reduced space (odd directions stay symbolic).
    pub fn point_geometry(&self, x: &[f64]) -> Result<PointGeometry> {
        solver::point_geometry(self, x)
    }

    /// Point geometry plus Christoffel derivatives and curvature tensors.
    pub fn curvature(&self, x: &[f64]) -> Result<CurvatureData> {
        solver::curvature(self, x)
    }

    /// Body-level Christoffel symbols, enough for geodesic and transport
    /// integration: only parity-even index triples survive.
    pub fn christoffel_body(&self, x: &[f64]) -> Result<BodyChristoffel> {
        solver::christoffel_body(self, x)
    }
}
