//! Pointwise Levi-Civita solve for a graded metric.
//!
//! At a point `x` of the reduced space every metric entry becomes a Grassmann
//! number, so the whole computation — inverting the metric, the graded Koszul
//! formula, curvature — happens in the finite-dimensional Grassmann algebra
//! over the chart's odd generators. Derivatives along even axes differentiate
//! the coefficient functions; derivatives along odd axes act algebraically on
//! the generator monomials and are exact.
//!
//! Index conventions used throughout (flat axes, even first):
//! * `dg[a][b][c]` is `∂_a g_bc`,
//! * `gamma[a][b][e]` is the `e`-component of `∇_{∂_a} ∂_b`,
//! * `riemann[a][b][c][e]` is the `e`-component of `R(∂_a, ∂_b) ∂_c`,
//! * `riemann_lowered[a][b][c][d]` is `⟨R(∂_a, ∂_b) ∂_c, ∂_d⟩`.
//!
//! Coefficients of vector components sit to the *left* of the coordinate
//! frame, and the metric is linear in its first slot; all parity signs below
//! follow from those two choices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannNumber, Parity, Superfunction};

use super::GradedMetric;

/// Square matrix of Grassmann numbers.
type GMat = Vec<Vec<GrassmannNumber>>;
/// Rank-3 array of Grassmann numbers.
type GTen3 = Vec<Vec<Vec<GrassmannNumber>>>;
/// Rank-4 array of Grassmann numbers.
type GTen4 = Vec<Vec<Vec<Vec<GrassmannNumber>>>>;

/// `(-1)^{pq}` for two parities.
fn psign(p: Parity, q: Parity) -> f64 {
    p.sign_swap_with(q)
}

fn gadd(a: &GrassmannNumber, b: &GrassmannNumber) -> GrassmannNumber {
    a.add(b).expect("all values share the chart's generators")
}

fn gsub(a: &GrassmannNumber, b: &GrassmannNumber) -> GrassmannNumber {
    a.sub(b).expect("all values share the chart's generators")
}

fn gmul(a: &GrassmannNumber, b: &GrassmannNumber) -> GrassmannNumber {
    a.mul(b).expect("all values share the chart's generators")
}

fn gzeros(dim: usize, gens: usize) -> GMat {
    vec![vec![GrassmannNumber::zero(gens); dim]; dim]
}

fn gidentity(dim: usize, gens: usize) -> GMat {
    let mut out = gzeros(dim, gens);
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = GrassmannNumber::one(gens);
    }
    out
}

fn gmat_mul(a: &GMat, b: &GMat, gens: usize) -> GMat {
    let dim = a.len();
    let mut out = gzeros(dim, gens);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..dim {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = gadd(&out[i][j], &gmul(&a[i][k], &b[k][j]));
            }
        }
    }
    out
}

fn gmat_scale(a: &GMat, factor: f64) -> GMat {
    a.iter()
        .map(|row| row.iter().map(|v| v.scale(factor)).collect())
        .collect()
}

fn gmat_max_abs(a: &GMat) -> f64 {
    a.iter()
        .flat_map(|row| row.iter().map(GrassmannNumber::max_abs))
        .fold(0.0, f64::max)
}

/// Inverts the Grassmann-valued Gram matrix `g` (even axes before odd).
///
/// The body of `g` is block diagonal — even-odd entries are odd and have no
/// degree-0 part — so the two body blocks are inverted separately with plain
/// linear algebra, which keeps the exact zeros of the cross blocks. The soul
/// part `S = g - body(g)` is nilpotent, and the full inverse is the
/// terminating Neumann series `(Σ_k (-B⁻¹ S)^k) B⁻¹`.
fn invert_graded(g: &GMat, n: usize, m: usize) -> Result<GMat> {
    let dim = n + m;
    let even_body = DMatrix::from_fn(n, n, |i, j| g[i][j].body());
    let odd_body = DMatrix::from_fn(m, m, |i, j| g[n + i][n + j].body());
    let even_inv = even_body
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric("even body block is not invertible".into()))?;
    let odd_inv = odd_body
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric("odd body block is not invertible".into()))?;

    let mut binv = gzeros(dim, m);
    for i in 0..n {
        for j in 0..n {
            binv[i][j] = GrassmannNumber::scalar(m, even_inv[(i, j)]);
        }
    }
    for a in 0..m {
        for b in 0..m {
            binv[n + a][n + b] = GrassmannNumber::scalar(m, odd_inv[(a, b)]);
        }
    }

    let soul: GMat = g
        .iter()
        .map(|row| row.iter().map(GrassmannNumber::soul).collect())
        .collect();
    let step = gmat_scale(&gmat_mul(&binv, &soul, m), -1.0);

    let mut series = gidentity(dim, m);
    let mut power = step.clone();
    for _ in 0..m {
        if gmat_max_abs(&power) == 0.0 {
            break;
        }
        for i in 0..dim {
            for j in 0..dim {
                series[i][j] = gadd(&series[i][j], &power[i][j]);
            }
        }
        power = gmat_mul(&step, &power, m);
    }
    let inv = gmat_mul(&series, &binv, m);

    // The series terminates exactly; this only guards against a body inverse
    // that succeeded numerically but is too ill-conditioned to trust.
    let product = gmat_mul(g, &inv, m);
    let mut residual = 0.0f64;
    for (i, row) in product.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            let target = if i == j {
                GrassmannNumber::one(m)
            } else {
                GrassmannNumber::zero(m)
            };
            residual = residual.max(gsub(value, &target).max_abs());
        }
    }
    let scale = 1.0 + gmat_max_abs(g) * gmat_max_abs(&inv);
    if residual > 1e-8 * scale {
        return Err(Error::SingularMetric(format!(
            "inverse verification failed (residual {residual:.3e})"
        )));
    }
    Ok(inv)
}

/// Metric data, its inverse, first derivatives, and Christoffel symbols at a
/// point of the reduced space. All values are Grassmann numbers over the
/// chart's odd generators.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    /// Even coordinates of the evaluation point.
    pub x: Vec<f64>,
    /// Number of even axes.
    pub n: usize,
    /// Number of odd axes.
    pub m: usize,
    /// Metric values `g[a][b] = g_ab(x)`.
    pub g: GMat,
    /// Inverse metric `g_inv[c][e]`, verified so that `g · g_inv = id`.
    pub g_inv: GMat,
    /// First derivatives `dg[a][b][c] = ∂_a g_bc`.
    pub dg: GTen3,
    /// Koszul brackets `koszul[a][b][c] = ⟨∇_{∂_a} ∂_b, ∂_c⟩`.
    pub koszul: GTen3,
    /// Christoffel symbols `gamma[a][b][e]`.
    pub gamma: GTen3,
}

impl PointGeometry {
    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    /// Parity of a flat axis.
    pub fn parity(&self, a: usize) -> Parity {
        if a < self.n {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Worst violation of metric compatibility,
    /// `∂_a g_bc = ⟨∇_a ∂_b, ∂_c⟩ + (-1)^{|a||b|} ⟨∂_b, ∇_a ∂_c⟩`,
    /// over all index triples. Zero up to roundoff for a correct solve.
    pub fn metricity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let pb = self.parity(b);
                for c in 0..dim {
                    let pc = self.parity(c);
                    let mut r = self.dg[a][b][c].clone();
                    for d in 0..dim {
                        let pd = self.parity(d);
                        r = gsub(&r, &gmul(&self.gamma[a][b][d], &self.g[d][c]));
                        // Moving the coefficient Γ_ac^d of ∇_a ∂_c past ∂_b
                        // costs (-1)^{(|a|+|c|+|d|)|b|}; combined with the
                        // outer (-1)^{|a||b|} the |a||b| factors cancel.
                        let sign = psign(pc, pb) * psign(pd, pb);
                        r = gsub(
                            &r,
                            &gmul(&self.gamma[a][c][d], &self.g[b][d]).scale(sign),
                        );
                    }
                    worst = worst.max(r.max_abs());
                }
            }
        }
        worst
    }

    /// Worst violation of graded torsion-freeness,
    /// `Γ_ab^e = (-1)^{|a||b|} Γ_ba^e`.
    pub fn torsion_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let sign = psign(self.parity(a), self.parity(b));
                for e in 0..dim {
                    let diff = gsub(&self.gamma[a][b][e], &self.gamma[b][a][e].scale(sign));
                    worst = worst.max(diff.max_abs());
                }
            }
        }
        worst
    }

    /// Mass of Christoffel components with the wrong parity: `Γ_ab^e` must be
    /// homogeneous of parity `|a| + |b| + |e|`. Exactly zero for the solver
    /// here, since every step preserves parity.
    pub fn gamma_parity_residual(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                for e in 0..dim {
                    let expected = self
                        .parity(a)
                        .combine(self.parity(b))
                        .combine(self.parity(e));
                    worst = worst.max(wrong_parity_mass(&self.gamma[a][b][e], expected));
                }
            }
        }
        worst
    }
}

/// Largest coefficient of `value` sitting in a monomial whose parity differs
/// from `expected`.
pub fn wrong_parity_mass(value: &GrassmannNumber, expected: Parity) -> f64 {
    value
        .terms()
        .filter(|(set, _)| set.parity() != expected)
        .map(|(_, coeff)| coeff.abs())
        .fold(0.0, f64::max)
}

/// Solves the graded Koszul formula at `x`.
///
/// With the metric linear in its first slot, compatibility and
/// torsion-freeness combine into
/// `2 ⟨∇_a ∂_b, ∂_c⟩ = ∂_a g_bc + (-1)^{|a|(|b|+|c|)} ∂_b g_ca
///                    - (-1)^{|c|(|a|+|b|)} ∂_c g_ab`,
/// and `Γ_ab^e = Σ_c ⟨∇_a ∂_b, ∂_c⟩ (g⁻¹)_ce`.
pub fn point_geometry(metric: &GradedMetric, x: &[f64]) -> Result<PointGeometry> {
    let n = metric.n();
    let m = metric.m();
    let dim = metric.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, chart has {n} even axes",
            x.len()
        )));
    }
    let parity = |a: usize| metric.chart().parity_of(a);

    let mut g = gzeros(dim, m);
    for a in 0..dim {
        for b in 0..dim {
            g[a][b] = metric.entry(a, b).eval(x);
        }
    }
    let g_inv = invert_graded(&g, n, m)?;

    let mut dg = vec![gzeros(dim, m); dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                dg[a][b][c] = metric.entry(b, c).partial_flat(a)?.eval(x);
            }
        }
    }

    let mut koszul = vec![gzeros(dim, m); dim];
    for a in 0..dim {
        let pa = parity(a);
        for b in 0..dim {
            let pb = parity(b);
            for c in 0..dim {
                let pc = parity(c);
                let s_bca = psign(pa, pb) * psign(pa, pc);
                let s_cab = psign(pc, pa) * psign(pc, pb);
                let sum = gadd(&dg[a][b][c], &dg[b][c][a].scale(s_bca));
                koszul[a][b][c] = gsub(&sum, &dg[c][a][b].scale(s_cab)).scale(0.5);
            }
        }
    }

    let mut gamma = vec![gzeros(dim, m); dim];
    for a in 0..dim {
        for b in 0..dim {
            for e in 0..dim {
                let mut acc = GrassmannNumber::zero(m);
                for c in 0..dim {
                    acc = gadd(&acc, &gmul(&koszul[a][b][c], &g_inv[c][e]));
                }
                gamma[a][b][e] = acc;
            }
        }
    }

    Ok(PointGeometry {
        x: x.to_vec(),
        n,
        m,
        g,
        g_inv,
        dg,
        koszul,
        gamma,
    })
}

/// Christoffel derivatives and curvature tensors at a point.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub point: PointGeometry,
    /// `dgamma[d][a][b][e] = ∂_d Γ_ab^e`.
    pub dgamma: GTen4,
    /// `riemann[a][b][c][e]`: `e`-component of `R(∂_a, ∂_b) ∂_c`.
    pub riemann: GTen4,
    /// `riemann_lowered[a][b][c][d] = ⟨R(∂_a, ∂_b) ∂_c, ∂_d⟩`.
    pub riemann_lowered: GTen4,
}

impl CurvatureData {
    /// Worst violation of `R(∂_a, ∂_b) = -(-1)^{|a||b|} R(∂_b, ∂_a)`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let dim = self.point.dim();
        let mut worst = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                let sign = psign(self.point.parity(a), self.point.parity(b));
                for c in 0..dim {
                    for e in 0..dim {
                        let diff = gadd(
                            &self.riemann[a][b][c][e],
                            &self.riemann[b][a][c][e].scale(sign),
                        );
                        worst = worst.max(diff.max_abs());
                    }
                }
            }
        }
        worst
    }
}

/// Computes `PointGeometry` plus curvature at `x`.
///
/// The derivative of the Christoffel solve splits by the parity of the
/// derivative axis:
/// * even axis `i`: `∂_i Γ = (∂_i L) g⁻¹ + L ∂_i(g⁻¹)` with
///   `∂_i(g⁻¹) = -g⁻¹ (∂_i g) g⁻¹`, where `∂_i L` needs second metric
///   derivatives. Those are taken directly on the metric entries (not on
///   already-differentiated values), so coefficient functions with only
///   finite-difference access stay within their supported derivative order.
/// * odd axis: the Christoffel values depend on the odd generators
///   algebraically, so the odd derivative is exact.
///
/// The curvature tensor then is
/// `R_abc^e = ∂_a Γ_bc^e - (-1)^{|a||b|} ∂_b Γ_ac^e
///           + Σ_d (-1)^{|a|(|b|+|c|+|d|)} Γ_bc^d Γ_ad^e
///           - (-1)^{|a||b|} Σ_d (-1)^{|b|(|a|+|c|+|d|)} Γ_ac^d Γ_bd^e`.
pub fn curvature(metric: &GradedMetric, x: &[f64]) -> Result<CurvatureData> {
    let point = point_geometry(metric, x)?;
    let n = point.n;
    let m = point.m;
    let dim = n + m;
    let parity = |a: usize| point.parity(a);

    let mut dgamma: GTen4 = vec![vec![gzeros(dim, m); dim]; dim];
    for i in 0..n {
        // d²g[a][b][c] = ∂_i ∂_a g_bc, differentiating the original entries.
        let mut ddg = vec![gzeros(dim, m); dim];
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    ddg[a][b][c] = metric
                        .entry(b, c)
                        .partial_flat(a)?
                        .partial_flat(i)?
                        .eval(x);
                }
            }
        }
        let mut dl = vec![gzeros(dim, m); dim];
        for a in 0..dim {
            let pa = parity(a);
            for b in 0..dim {
                let pb = parity(b);
                for c in 0..dim {
                    let pc = parity(c);
                    let s_bca = psign(pa, pb) * psign(pa, pc);
                    let s_cab = psign(pc, pa) * psign(pc, pb);
                    let sum = gadd(&ddg[a][b][c], &ddg[b][c][a].scale(s_bca));
                    dl[a][b][c] = gsub(&sum, &ddg[c][a][b].scale(s_cab)).scale(0.5);
                }
            }
        }
        let dk = gmat_scale(
            &gmat_mul(&point.g_inv, &gmat_mul(&point.dg[i], &point.g_inv, m), m),
            -1.0,
        );
        for a in 0..dim {
            for b in 0..dim {
                for e in 0..dim {
                    let mut acc = GrassmannNumber::zero(m);
                    for c in 0..dim {
                        acc = gadd(&acc, &gmul(&dl[a][b][c], &point.g_inv[c][e]));
                        acc = gadd(&acc, &gmul(&point.koszul[a][b][c], &dk[c][e]));
                    }
                    dgamma[i][a][b][e] = acc;
                }
            }
        }
    }
    for alpha in 1..=m {
        let d = n + alpha - 1;
        for a in 0..dim {
            for b in 0..dim {
                for e in 0..dim {
                    dgamma[d][a][b][e] = point.gamma[a][b][e].odd_derivative(alpha)?;
                }
            }
        }
    }

    let mut riemann: GTen4 = vec![vec![gzeros(dim, m); dim]; dim];
    for a in 0..dim {
        let pa = parity(a);
        for b in 0..dim {
            let pb = parity(b);
            let sab = psign(pa, pb);
            for c in 0..dim {
                let pc = parity(c);
                for e in 0..dim {
                    let mut r = gsub(&dgamma[a][b][c][e], &dgamma[b][a][c][e].scale(sab));
                    for d in 0..dim {
                        let pd = parity(d);
                        let s_quad_a = psign(pa, pb) * psign(pa, pc) * psign(pa, pd);
                        let s_quad_b = psign(pb, pa) * psign(pb, pc) * psign(pb, pd);
                        let t_a =
                            gmul(&point.gamma[b][c][d], &point.gamma[a][d][e]).scale(s_quad_a);
                        let t_b = gmul(&point.gamma[a][c][d], &point.gamma[b][d][e])
                            .scale(-sab * s_quad_b);
                        r = gadd(&r, &gadd(&t_a, &t_b));
                    }
                    riemann[a][b][c][e] = r;
                }
            }
        }
    }

    let mut riemann_lowered: GTen4 = vec![vec![gzeros(dim, m); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    let mut acc = GrassmannNumber::zero(m);
                    for e in 0..dim {
                        acc = gadd(&acc, &gmul(&riemann[a][b][c][e], &point.g[e][d]));
                    }
                    riemann_lowered[a][b][c][d] = acc;
                }
            }
        }
    }

    Ok(CurvatureData {
        point,
        dgamma,
        riemann,
        riemann_lowered,
    })
}

/// Worst violation of the graded Killing equation
/// `⟨∇_a X, ∂_c⟩ + (-1)^{|X||a| + |X||c| + |a||c|} ⟨∇_c X, ∂_a⟩ = 0`
/// for the vector field `X = Σ_b X^b ∂_b` (components to the left of the
/// frame) at the point of `geometry`.
///
/// The field must be homogeneous: every component `X^e` must have parity
/// `|X| + |e|` for one fixed `|X|`.
pub fn killing_residual(geometry: &PointGeometry, field: &[Superfunction]) -> Result<f64> {
    let n = geometry.n;
    let m = geometry.m;
    let dim = n + m;
    if field.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "field has {} components, chart has {dim} axes",
            field.len()
        )));
    }
    for (e, component) in field.iter().enumerate() {
        if component.even_dim() != n || component.odd_dim() != m {
            return Err(Error::DimensionMismatch(format!(
                "field component {e} lives on R^({}|{}), chart is R^({n}|{m})",
                component.even_dim(),
                component.odd_dim()
            )));
        }
    }

    let mut field_parity: Option<Parity> = None;
    for (e, component) in field.iter().enumerate() {
        if component.is_structurally_zero() {
            continue;
        }
        let pe = component.parity().ok_or_else(|| {
            Error::InvalidParams(format!("field component {e} is not parity homogeneous"))
        })?;
        let px = pe.combine(geometry.parity(e));
        if let Some(prev) = field_parity {
            if prev != px {
                return Err(Error::InvalidParams(
                    "field components disagree on the field's parity".into(),
                ));
            }
        } else {
            field_parity = Some(px);
        }
    }
    let Some(px) = field_parity else {
        return Ok(0.0);
    };

    let x = &geometry.x;
    let values: Vec<GrassmannNumber> = field.iter().map(|f| f.eval(x)).collect();

    // nabla[a][e] = (∇_a X)^e
    //            = ∂_a X^e + Σ_b (-1)^{|a|(|X|+|b|)} X^b Γ_ab^e.
    let mut nabla = gzeros(dim, m);
    for a in 0..dim {
        let pa = geometry.parity(a);
        for e in 0..dim {
            let mut acc = field[e].partial_flat(a)?.eval(x);
            for b in 0..dim {
                let sign = psign(pa, px) * psign(pa, geometry.parity(b));
                acc = gadd(&acc, &gmul(&values[b], &geometry.gamma[a][b][e]).scale(sign));
            }
            nabla[a][e] = acc;
        }
    }

    let mut lowered = gzeros(dim, m);
    for a in 0..dim {
        for c in 0..dim {
            let mut acc = GrassmannNumber::zero(m);
            for e in 0..dim {
                acc = gadd(&acc, &gmul(&nabla[a][e], &geometry.g[e][c]));
            }
            lowered[a][c] = acc;
        }
    }

    let mut worst = 0.0f64;
    for a in 0..dim {
        let pa = geometry.parity(a);
        for c in 0..dim {
            let pc = geometry.parity(c);
            let sign = psign(px, pa) * psign(px, pc) * psign(pa, pc);
            let r = gadd(&lowered[a][c], &lowered[c][a].scale(sign));
            worst = worst.max(r.max_abs());
        }
    }
    Ok(worst)
}

/// Body-level Christoffel symbols at a point, for geodesic and transport
/// integration. Only index triples of even total parity can be nonzero; the
/// others vanish because an odd quantity has no degree-0 part.
#[derive(Debug, Clone)]
pub struct BodyChristoffel {
    pub n: usize,
    pub m: usize,
    /// `gamma[a][b][e]`: body of the Christoffel symbol `Γ_ab^e`.
    pub gamma: Vec<Vec<Vec<f64>>>,
    /// Body of the even metric block at the point.
    pub even_body: DMatrix<f64>,
    /// Body of the odd metric block at the point.
    pub odd_body: DMatrix<f64>,
}

impl BodyChristoffel {
    pub fn dim(&self) -> usize {
        self.n + self.m
    }

    pub fn value(&self, a: usize, b: usize, e: usize) -> f64 {
        self.gamma[a][b][e]
    }
}

/// Reusable body-level solver: differentiates the metric entries once and
/// evaluates Christoffel bodies at many points cheaply (the per-point work is
/// coefficient evaluation plus two small matrix inversions). Integrators call
/// this at every stage of every step.
pub struct BodySolver<'m> {
    metric: &'m GradedMetric,
    /// `dg[a][b][c] = ∂_a g_bc` as superfunctions.
    dg: Vec<Vec<Vec<Superfunction>>>,
}

impl<'m> BodySolver<'m> {
    pub fn new(metric: &'m GradedMetric) -> Result<Self> {
        let dim = metric.dim();
        let mut dg = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut plane = Vec::with_capacity(dim);
            for b in 0..dim {
                let mut row = Vec::with_capacity(dim);
                for c in 0..dim {
                    row.push(metric.entry(b, c).partial_flat(a)?);
                }
                plane.push(row);
            }
            dg.push(plane);
        }
        Ok(BodySolver { metric, dg })
    }

    pub fn metric(&self) -> &'m GradedMetric {
        self.metric
    }

    /// `BodyChristoffel` at a point of the reduced space.
    ///
    /// Taking bodies commutes with products and with even derivatives, so
    /// the body of `Γ = L g⁻¹` is the body of `L` times the block-diagonal
    /// inverse of the metric's body blocks.
    pub fn christoffel_at(&self, x: &[f64]) -> Result<BodyChristoffel> {
        let metric = self.metric;
        let n = metric.n();
        let m = metric.m();
        let dim = n + m;
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {n} even axes",
                x.len()
            )));
        }
        let parity = |a: usize| metric.chart().parity_of(a);

        let even_body = DMatrix::from_fn(n, n, |i, j| metric.entry(i, j).reduced(x));
        let odd_body = DMatrix::from_fn(m, m, |i, j| metric.entry(n + i, n + j).reduced(x));
        let even_inv = even_body
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMetric("even body block is not invertible".into()))?;
        let odd_inv = odd_body
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMetric("odd body block is not invertible".into()))?;

        let mut dg = vec![vec![vec![0.0f64; dim]; dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    dg[a][b][c] = self.dg[a][b][c].reduced(x);
                }
            }
        }

        let mut gamma = vec![vec![vec![0.0f64; dim]; dim]; dim];
        for a in 0..dim {
            let pa = parity(a);
            for b in 0..dim {
                let pb = parity(b);
                let mut koszul = vec![0.0f64; dim];
                for (c, slot) in koszul.iter_mut().enumerate() {
                    let pc = parity(c);
                    let s_bca = psign(pa, pb) * psign(pa, pc);
                    let s_cab = psign(pc, pa) * psign(pc, pb);
                    *slot = 0.5 * (dg[a][b][c] + s_bca * dg[b][c][a] - s_cab * dg[c][a][b]);
                }
                for e in 0..n {
                    gamma[a][b][e] = (0..n).map(|c| koszul[c] * even_inv[(c, e)]).sum();
                }
                for e in 0..m {
                    gamma[a][b][n + e] = (0..m).map(|c| koszul[n + c] * odd_inv[(c, e)]).sum();
                }
            }
        }

        Ok(BodyChristoffel {
            n,
            m,
            gamma,
            even_body,
            odd_body,
        })
    }
}

/// One-shot variant of [`BodySolver::christoffel_at`].
pub fn christoffel_body(metric: &GradedMetric, x: &[f64]) -> Result<BodyChristoffel> {
    BodySolver::new(metric)?.christoffel_at(x)
}

#[cfg(test)]
mod tests {
    use super::super::builtin::builtin_chart;
    use super::*;
    use crate::grassmann::IndexSet;

    fn index(m: usize, indices: &[usize]) -> IndexSet {
        IndexSet::from_indices(indices, m).unwrap()
    }

    #[test]
    fn flat_chart_has_vanishing_christoffels_and_curvature() {
        let metric = builtin_chart("flat-r22").unwrap();
        let data = metric.curvature(&[0.4, -1.3]).unwrap();
        let mut gamma_mass = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                for e in 0..4 {
                    gamma_mass = gamma_mass.max(data.point.gamma[a][b][e].max_abs());
                }
            }
        }
        assert_eq!(gamma_mass, 0.0);
        let mut r_mass = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        r_mass = r_mass.max(data.riemann[a][b][c][e].max_abs());
                    }
                }
            }
        }
        assert_eq!(r_mass, 0.0);
    }

    #[test]
    fn hyperbolic_christoffels_match_classical_values() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let y = 2.0;
        let pg = metric.point_geometry(&[0.3, y]).unwrap();
        // Upper half-plane: Γ_xy^x = Γ_yy^y = -1/y, Γ_xx^y = 1/y.
        let cases = [
            ((0, 1, 0), -1.0 / y),
            ((1, 0, 0), -1.0 / y),
            ((1, 1, 1), -1.0 / y),
            ((0, 0, 1), 1.0 / y),
            ((0, 0, 0), 0.0),
            ((1, 1, 0), 0.0),
            ((0, 1, 1), 0.0),
        ];
        for ((a, b, e), expected) in cases {
            assert!(
                (pg.gamma[a][b][e].body() - expected).abs() < 1e-12,
                "gamma[{a}][{b}][{e}] = {}, expected {expected}",
                pg.gamma[a][b][e].body()
            );
        }
        assert!(pg.metricity_residual() < 1e-12);
        assert!(pg.torsion_residual() < 1e-12);
    }

    #[test]
    fn hyperbolic_and_spherical_sectional_curvature() {
        // Upper half-plane: ⟨R(∂x,∂y)∂y,∂x⟩ = -1/y⁴ (constant curvature -1).
        let metric = builtin_chart("hyperbolic").unwrap();
        let y = 2.0;
        let data = metric.curvature(&[0.3, y]).unwrap();
        let r_1221 = data.riemann_lowered[0][1][1][0].body();
        assert!((r_1221 - (-1.0 / y.powi(4))).abs() < 1e-10);

        // Stereographic sphere, conformal factor λ = 4/(1+x²+y²)²:
        // ⟨R(∂x,∂y)∂y,∂x⟩ = +λ² (constant curvature +1).
        let metric = builtin_chart("sphere").unwrap();
        let (x, y): (f64, f64) = (0.5, -0.2);
        let lambda = 4.0 / (1.0 + x * x + y * y).powi(2);
        let data = metric.curvature(&[x, y]).unwrap();
        let r_1221 = data.riemann_lowered[0][1][1][0].body();
        assert!(
            (r_1221 - lambda * lambda).abs() < 1e-8,
            "r_1221 = {r_1221}, expected {}",
            lambda * lambda
        );
        assert!(data.antisymmetry_residual() < 1e-10);
    }

    #[test]
    fn odd_plane_christoffels_and_curvature_match_hand_computation() {
        // Chart R^{1|2}, g_tt = 1, odd block (1+t²)·[[0,1],[-1,0]].
        // With b(t) = 1+t²: Γ_{tθ1}^{θ1} = Γ_{tθ2}^{θ2} = b'/(2b),
        // Γ_{θ1θ2}^t = -b'/2, and the t-component of R(∂t,∂θ1)∂θ2 is
        // -b''/2 + b'²/(4b).
        let metric = builtin_chart("r12-odd").unwrap();
        let t = 1.0;
        let (b, db, ddb) = (1.0 + t * t, 2.0 * t, 2.0);
        let data = metric.curvature(&[t]).unwrap();
        let pg = &data.point;

        assert!((pg.gamma[0][1][1].body() - db / (2.0 * b)).abs() < 1e-12);
        assert!((pg.gamma[0][2][2].body() - db / (2.0 * b)).abs() < 1e-12);
        assert!((pg.gamma[1][2][0].body() - (-db / 2.0)).abs() < 1e-12);
        assert!((pg.gamma[2][1][0].body() - (db / 2.0)).abs() < 1e-12);

        assert!(pg.metricity_residual() < 1e-12);
        assert!(pg.torsion_residual() < 1e-12);
        assert_eq!(pg.gamma_parity_residual(), 0.0);

        let expected = -ddb / 2.0 + db * db / (4.0 * b);
        assert!(
            (data.riemann[0][1][2][0].body() - expected).abs() < 1e-10,
            "R_(t,θ1)θ2^t = {}, expected {expected}",
            data.riemann[0][1][2][0].body()
        );
        assert!(data.antisymmetry_residual() < 1e-10);
    }

    #[test]
    fn mixed_chart_satisfies_defining_equations() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let pg = metric.point_geometry(&[0.7, -0.4]).unwrap();
        assert!(
            pg.metricity_residual() < 1e-9,
            "metricity residual {}",
            pg.metricity_residual()
        );
        assert!(pg.torsion_residual() < 1e-9);
        assert_eq!(pg.gamma_parity_residual(), 0.0);
        let data = metric.curvature(&[0.7, -0.4]).unwrap();
        assert!(data.antisymmetry_residual() < 1e-8);
    }

    #[test]
    fn body_christoffels_match_the_full_solve() {
        for name in ["hyperbolic", "r12-odd", "mixed-r22"] {
            let metric = builtin_chart(name).unwrap();
            let x: Vec<f64> = (0..metric.n()).map(|i| 0.9 - 0.35 * i as f64).collect();
            let body = metric.christoffel_body(&x).unwrap();
            let pg = metric.point_geometry(&x).unwrap();
            for a in 0..metric.dim() {
                for b in 0..metric.dim() {
                    for e in 0..metric.dim() {
                        assert!(
                            (body.gamma[a][b][e] - pg.gamma[a][b][e].body()).abs() < 1e-10,
                            "{name}: body gamma[{a}][{b}][{e}] disagrees"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn flat_translations_are_killing_and_dilation_is_not() {
        let metric = builtin_chart("flat-r22").unwrap();
        let pg = metric.point_geometry(&[0.2, 0.8]).unwrap();

        // ∂x: components (1, 0 | 0, 0).
        let mut translation = vec![Superfunction::zero(2, 2); 4];
        translation[0] = Superfunction::constant(2, 2, 1.0);
        assert!(killing_residual(&pg, &translation).unwrap() < 1e-12);

        // The Euler field x∂x + y∂y rescales the flat metric.
        let dilation = vec![
            Superfunction::even_coord(2, 2, 0).unwrap(),
            Superfunction::even_coord(2, 2, 1).unwrap(),
            Superfunction::zero(2, 2),
            Superfunction::zero(2, 2),
        ];
        assert!(killing_residual(&pg, &dilation).unwrap() > 0.5);
    }

    #[test]
    fn hyperbolic_horizontal_translation_is_killing() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let pg = metric.point_geometry(&[-0.6, 1.7]).unwrap();
        let mut translation = vec![Superfunction::zero(2, 0); 2];
        translation[0] = Superfunction::constant(2, 0, 1.0);
        assert!(killing_residual(&pg, &translation).unwrap() < 1e-12);
        // Vertical translation is not an isometry of the upper half-plane.
        let mut vertical = vec![Superfunction::zero(2, 0); 2];
        vertical[1] = Superfunction::constant(2, 0, 1.0);
        assert!(killing_residual(&pg, &vertical).unwrap() > 0.1);
    }

    #[test]
    fn odd_plane_killing_fields_behave_as_expected() {
        // On r12-odd the odd block is b(t)·[[0,1],[-1,0]]. Linear odd fields
        // whose matrix lies in sl(2) preserve that pairing (both the
        // "hyperbolic" θ1∂θ1 - θ2∂θ2 and the rotation θ2∂θ1 - θ1∂θ2), while
        // the scaling θ1∂θ1 + θ2∂θ2 rescales it and is not Killing.
        let metric = builtin_chart("r12-odd").unwrap();
        let pg = metric.point_geometry(&[0.4]).unwrap();

        let theta1 = Superfunction::odd_coord(1, 2, 1).unwrap();
        let theta2 = Superfunction::odd_coord(1, 2, 2).unwrap();
        let zero = Superfunction::zero(1, 2);

        let hyperbolic = vec![zero.clone(), theta1.clone(), theta2.scale(-1.0)];
        assert!(killing_residual(&pg, &hyperbolic).unwrap() < 1e-12);

        let rotation = vec![zero.clone(), theta2.clone(), theta1.scale(-1.0)];
        assert!(killing_residual(&pg, &rotation).unwrap() < 1e-12);

        let scaling = vec![zero.clone(), theta1.clone(), theta2.clone()];
        assert!(killing_residual(&pg, &scaling).unwrap() > 0.5);

        // The odd translation ∂θ1 (an *odd* field, |X| odd) is Killing too:
        // the coefficients of the metric do not involve the odd coordinates.
        // Its lowered covariant derivative is nonzero, so this genuinely
        // exercises the odd-parity signs in the residual.
        let odd_translation = vec![
            zero.clone(),
            Superfunction::constant(1, 2, 1.0),
            zero.clone(),
        ];
        assert!(killing_residual(&pg, &odd_translation).unwrap() < 1e-12);

        // Mixed-parity components are rejected.
        let bad = vec![
            theta1.add(&Superfunction::constant(1, 2, 1.0)).unwrap(),
            zero.clone(),
            zero,
        ];
        assert!(killing_residual(&pg, &bad).is_err());
    }

    #[test]
    fn inverse_metric_handles_soul_corrections() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let pg = metric.point_geometry(&[0.3, 0.9]).unwrap();
        // g · g_inv must be the identity including all soul terms.
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = GrassmannNumber::zero(2);
                for k in 0..4 {
                    acc = gadd(&acc, &gmul(&pg.g[i][k], &pg.g_inv[k][j]));
                }
                let target = if i == j {
                    GrassmannNumber::one(2)
                } else {
                    GrassmannNumber::zero(2)
                };
                assert!(gsub(&acc, &target).max_abs() < 1e-12);
            }
        }
        // The inverse genuinely has soul terms on this chart.
        let soul_mass: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| pg.g_inv[i][j].soul().max_abs())
            .fold(0.0, f64::max);
        assert!(soul_mass > 1e-3, "soul mass {soul_mass}");
    }

    #[test]
    fn wrong_parity_mass_detects_misplaced_terms() {
        let v = GrassmannNumber::from_terms(
            2,
            &[(index(2, &[]), 1.0), (index(2, &[1]), 0.25)],
        );
        assert_eq!(wrong_parity_mass(&v, Parity::Even), 0.25);
        assert_eq!(wrong_parity_mass(&v, Parity::Odd), 1.0);
    }
}
