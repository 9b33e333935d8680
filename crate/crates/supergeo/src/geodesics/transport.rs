//! Parallel transport and covariant derivatives along supercurves.
//!
//! Values of superfunctions pulled back along a supercurve ℝ^{1|1} → M live
//! in `C^∞(ℝ)[ξ]` with a single odd generator: at a fixed time they are
//! numbers `a + b·ξ` ([`XiValue`]). A vector field along the curve has one
//! such value per coordinate axis.
//!
//! A field is *parallel* when the reduced parts of both covariant
//! derivatives (along `t` and along `ξ`) vanish. In coordinates that is a
//! first-order linear ODE for the `ξ⁰` parts of the components — driven only
//! by the body Christoffel symbols along the reduced curve — plus algebraic
//! relations fixing the `ξ¹` parts pointwise. Transport therefore integrates
//! the small ODE system with RK4 (matching the curve's samples, with cubic
//! Hermite interpolation for the half-step stages) and fills in the `ξ¹`
//! parts afterwards.
//!
//! The ODE's coefficient matrix is block diagonal in parity — its
//! parity-mixing entries are bodies of odd Christoffel symbols, which vanish
//! structurally — so transported even vectors stay exactly even and odd ones
//! exactly odd.

use std::ops::{Add, Mul, Neg, Sub};

use crate::chartgeom::{BodyChristoffel, BodySolver, GradedMetric};
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannNumber, IndexSet};

use super::{GeodesicResult, SupercurveState};

/// A value `even + odd·ξ` in `ℝ[ξ]`, the coefficient algebra of supercurves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct XiValue {
    pub even: f64,
    pub odd: f64,
}

impl XiValue {
    pub const ZERO: XiValue = XiValue { even: 0.0, odd: 0.0 };

    pub fn new(even: f64, odd: f64) -> XiValue {
        XiValue { even, odd }
    }

    pub fn scalar(even: f64) -> XiValue {
        XiValue { even, odd: 0.0 }
    }

    pub fn scale(self, factor: f64) -> XiValue {
        XiValue {
            even: factor * self.even,
            odd: factor * self.odd,
        }
    }

    /// The parity involution `a + bξ ↦ a - bξ` (multiplies each homogeneous
    /// part by `(-1)^{parity}`).
    pub fn flip(self) -> XiValue {
        XiValue {
            even: self.even,
            odd: -self.odd,
        }
    }

    pub fn abs_max(self) -> f64 {
        self.even.abs().max(self.odd.abs())
    }
}

impl Add for XiValue {
    type Output = XiValue;
    fn add(self, rhs: XiValue) -> XiValue {
        XiValue::new(self.even + rhs.even, self.odd + rhs.odd)
    }
}

impl Sub for XiValue {
    type Output = XiValue;
    fn sub(self, rhs: XiValue) -> XiValue {
        XiValue::new(self.even - rhs.even, self.odd - rhs.odd)
    }
}

impl Mul for XiValue {
    type Output = XiValue;
    fn mul(self, rhs: XiValue) -> XiValue {
        // ξ² = 0.
        XiValue::new(
            self.even * rhs.even,
            self.even * rhs.odd + self.odd * rhs.even,
        )
    }
}

impl Neg for XiValue {
    type Output = XiValue;
    fn neg(self) -> XiValue {
        XiValue::new(-self.even, -self.odd)
    }
}

/// A vector field along a sampled supercurve: one [`XiValue`] per coordinate
/// axis per sample.
#[derive(Debug, Clone)]
pub struct ParallelField {
    pub times: Vec<f64>,
    /// `components[s][a]`: the `a`-th coordinate component at sample `s`.
    pub components: Vec<Vec<XiValue>>,
}

impl ParallelField {
    pub fn initial(&self) -> &[XiValue] {
        self.components.first().expect("at least one sample")
    }

    pub fn terminal(&self) -> &[XiValue] {
        self.components.last().expect("at least one sample")
    }
}

/// The parallel fields obtained by transporting every coordinate basis
/// vector along a curve; `fields[a]` starts as `∂_a`.
#[derive(Debug, Clone)]
pub struct ParallelFrame {
    pub fields: Vec<ParallelField>,
}

/// `-Σ_i v_i Γ̃_ia^k f_a` — the right-hand side of the parallel ODE.
fn transport_rhs(gamma: &BodyChristoffel, v: &[f64], f: &[f64]) -> Vec<f64> {
    let dim = gamma.dim();
    let n = gamma.n;
    let mut out = vec![0.0; dim];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            if v[i] == 0.0 {
                continue;
            }
            for (a, fa) in f.iter().enumerate() {
                acc += v[i] * fa * gamma.gamma[i][a][k];
            }
        }
        *slot = -acc;
    }
    out
}

/// The `ξ¹` parts of a parallel field, determined algebraically from the
/// `ξ⁰` parts: for even axes `k`, `g_k = -Σ_{α,β} f_β h_α Γ̃_{αβ}^k`; for odd
/// axes `δ`, `g_δ = -Σ_{α,j} f_j h_α Γ̃_{αj}^δ`.
fn xi_parts(gamma: &BodyChristoffel, h: &[f64], f: &[f64]) -> Vec<f64> {
    let n = gamma.n;
    let m = gamma.m;
    let dim = n + m;
    let mut out = vec![0.0; dim];
    for (k, slot) in out.iter_mut().enumerate().take(n) {
        let mut acc = 0.0;
        for alpha in 0..m {
            for beta in 0..m {
                acc += f[n + beta] * h[alpha] * gamma.gamma[n + alpha][n + beta][k];
            }
        }
        *slot = -acc;
    }
    for delta in 0..m {
        let mut acc = 0.0;
        for alpha in 0..m {
            for j in 0..n {
                acc += f[j] * h[alpha] * gamma.gamma[n + alpha][j][n + delta];
            }
        }
        out[n + delta] = -acc;
    }
    out
}

/// Transports several initial vectors simultaneously (the Christoffel
/// evaluations along the curve are shared).
fn transport_many(
    metric: &GradedMetric,
    curve: &GeodesicResult,
    taus: &[Vec<f64>],
) -> Result<Vec<ParallelField>> {
    let dim = metric.dim();
    for tau in taus {
        if tau.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "initial vector has {} components, chart has {dim} axes",
                tau.len()
            )));
        }
    }
    if curve.states.is_empty() {
        return Err(Error::InvalidParams("curve has no samples".into()));
    }

    let solver = BodySolver::new(metric)?;
    let gammas: Vec<BodyChristoffel> = curve
        .states
        .iter()
        .map(|s| solver.christoffel_at(&s.g))
        .collect::<Result<_>>()?;

    let mut fs: Vec<Vec<f64>> = taus.to_vec();
    let mut fields: Vec<ParallelField> = taus
        .iter()
        .map(|_| ParallelField {
            times: Vec::with_capacity(curve.states.len()),
            components: Vec::with_capacity(curve.states.len()),
        })
        .collect();

    let record = |fields: &mut Vec<ParallelField>,
                  fs: &[Vec<f64>],
                  state: &SupercurveState,
                  gamma: &BodyChristoffel| {
        for (field, f) in fields.iter_mut().zip(fs) {
            let xi = xi_parts(gamma, &state.h, f);
            field.times.push(state.t);
            field
                .components
                .push(f.iter().zip(&xi).map(|(&e, &o)| XiValue::new(e, o)).collect());
        }
    };
    record(&mut fields, &fs, &curve.states[0], &gammas[0]);

    for s in 0..curve.states.len() - 1 {
        let (s0, s1) = (&curve.states[s], &curve.states[s + 1]);
        let dt = s1.t - s0.t;
        // Positions and velocities at the half step, via cubic Hermite
        // interpolation of (g, v) and (v, v') respectively; v' comes from
        // the geodesic right-hand side, keeping the stage coefficients
        // fourth-order accurate.
        let (dv0, _) = super::rhs_from_christoffels(&gammas[s], &s0.v, &s0.h);
        let (dv1, _) = super::rhs_from_christoffels(&gammas[s + 1], &s1.v, &s1.h);
        let g_mid: Vec<f64> = (0..metric.n())
            .map(|i| 0.5 * (s0.g[i] + s1.g[i]) + dt / 8.0 * (s0.v[i] - s1.v[i]))
            .collect();
        let v_mid: Vec<f64> = (0..metric.n())
            .map(|i| 0.5 * (s0.v[i] + s1.v[i]) + dt / 8.0 * (dv0[i] - dv1[i]))
            .collect();
        let gamma_mid = solver.christoffel_at(&g_mid)?;

        for f in fs.iter_mut() {
            let k1 = transport_rhs(&gammas[s], &s0.v, f);
            let y2: Vec<f64> = f.iter().zip(&k1).map(|(x, k)| x + dt / 2.0 * k).collect();
            let k2 = transport_rhs(&gamma_mid, &v_mid, &y2);
            let y3: Vec<f64> = f.iter().zip(&k2).map(|(x, k)| x + dt / 2.0 * k).collect();
            let k3 = transport_rhs(&gamma_mid, &v_mid, &y3);
            let y4: Vec<f64> = f.iter().zip(&k3).map(|(x, k)| x + dt * k).collect();
            let k4 = transport_rhs(&gammas[s + 1], &s1.v, &y4);
            for (i, x) in f.iter_mut().enumerate() {
                *x += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if !f.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFiniteState { t: s1.t });
            }
        }
        record(&mut fields, &fs, s1, &gammas[s + 1]);
    }
    Ok(fields)
}

/// Parallel-transports the tangent vector `tau` (its `dim` coordinate
/// components; even axes first) along the sampled curve.
pub fn parallel_transport(
    metric: &GradedMetric,
    curve: &GeodesicResult,
    tau: &[f64],
) -> Result<ParallelField> {
    let mut fields = transport_many(metric, curve, &[tau.to_vec()])?;
    Ok(fields.pop().expect("one field per input vector"))
}

/// Transports every coordinate basis vector along the curve.
pub fn parallel_frame(metric: &GradedMetric, curve: &GeodesicResult) -> Result<ParallelFrame> {
    let dim = metric.dim();
    let taus: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            let mut tau = vec![0.0; dim];
            tau[a] = 1.0;
            tau
        })
        .collect();
    Ok(ParallelFrame {
        fields: transport_many(metric, curve, &taus)?,
    })
}

/// The reduced inner products `⟨X_t, Y_t⟩~` along the curve.
///
/// Only the `ξ⁰` parts and the body blocks of the metric contribute to the
/// reduced value, and they pair within each parity block. Parallel transport
/// must keep this function constant in `t`.
pub fn reduced_inner_products(
    metric: &GradedMetric,
    curve: &GeodesicResult,
    x: &ParallelField,
    y: &ParallelField,
) -> Result<Vec<f64>> {
    let n = metric.n();
    let m = metric.m();
    if x.components.len() != curve.states.len() || y.components.len() != curve.states.len() {
        return Err(Error::DimensionMismatch(
            "fields are not sampled on the curve's time grid".into(),
        ));
    }
    let mut out = Vec::with_capacity(curve.states.len());
    for (s, state) in curve.states.iter().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += x.components[s][i].even
                    * y.components[s][j].even
                    * metric.entry(i, j).reduced(&state.g);
            }
        }
        for alpha in 0..m {
            for beta in 0..m {
                acc += x.components[s][n + alpha].even
                    * y.components[s][n + beta].even
                    * metric.entry(n + alpha, n + beta).reduced(&state.g);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Which derivative of ℝ^{1|1} to take along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveDerivative {
    /// `∇/dt`.
    Even,
    /// `∇/dξ`.
    Odd,
}

/// Weights of the 3-point Lagrange derivative at `at` for nodes `xs`.
fn lagrange3_weights(xs: [f64; 3], at: f64) -> [f64; 3] {
    let [x0, x1, x2] = xs;
    [
        ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2)),
        ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2)),
        ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1)),
    ]
}

/// Second-order time derivative of a sampled series at sample `s` (one-sided
/// at the ends, centered inside; handles a shorter final step).
fn series_derivative<T, F>(times: &[f64], value: F, s: usize) -> T
where
    T: Add<Output = T> + Default,
    F: Fn(usize) -> T,
    T: Copy + std::ops::Mul<f64, Output = T>,
{
    let len = times.len();
    let base = if s == 0 {
        0
    } else if s + 1 >= len {
        len - 3
    } else {
        s - 1
    };
    let xs = [times[base], times[base + 1], times[base + 2]];
    let ws = lagrange3_weights(xs, times[s]);
    value(base) * ws[0] + value(base + 1) * ws[1] + value(base + 2) * ws[2]
}

impl Mul<f64> for XiValue {
    type Output = XiValue;
    fn mul(self, rhs: f64) -> XiValue {
        self.scale(rhs)
    }
}

/// Pullback of a Grassmann value along the curve: substituting
/// `ξ_α ↦ h_α·ξ` keeps the body and turns each degree-1 coefficient into an
/// `h_α` multiple of `ξ`; higher degrees vanish.
fn pull_back(value: &GrassmannNumber, h: &[f64]) -> XiValue {
    let m = h.len();
    let mut odd = 0.0;
    for (alpha, h_alpha) in h.iter().enumerate() {
        if *h_alpha == 0.0 {
            continue;
        }
        let set = IndexSet::from_indices(&[alpha + 1], m).expect("index in range");
        odd += value.coeff(set) * h_alpha;
    }
    XiValue::new(value.body(), odd)
}

/// Covariant derivative of a sampled vector field along the curve.
///
/// `field[s][a]` is the `a`-th component at the `s`-th curve sample. For the
/// even derivative `∇/dt`,
/// `(∇/dt X)^k = ∂_t F_k + Σ_{i,j} F_j · ∂_t(γ*η_i) · γ*Γ_{ij}^k`,
/// with `∂_t` of the samples taken by second-order differencing (at least
/// three samples required). The odd derivative `∇/dξ` replaces `∂_t` by
/// `∂_ξ` — algebraic, no differencing — and flips the sign of odd-parity
/// component parts:
/// `(∇/dξ X)^k = ∂_ξ F_k + Σ_{i,j} (-1)^{|F_j|} F_j · ∂_ξ(γ*η_i) · γ*Γ_{ij}^k`.
///
/// The full (non-reduced) Christoffel pullbacks are used, so the result
/// carries both the `ξ⁰` and `ξ¹` parts of the derivative field.
pub fn covariant_derivative_along(
    metric: &GradedMetric,
    curve: &GeodesicResult,
    field: &[Vec<XiValue>],
    which: CurveDerivative,
) -> Result<Vec<Vec<XiValue>>> {
    let n = metric.n();
    let m = metric.m();
    let dim = n + m;
    let len = curve.states.len();
    if field.len() != len {
        return Err(Error::DimensionMismatch(
            "field is not sampled on the curve's time grid".into(),
        ));
    }
    if field.iter().any(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "field components must have {dim} axes"
        )));
    }
    if which == CurveDerivative::Even && len < 3 {
        return Err(Error::InvalidParams(
            "the t-derivative needs at least three samples".into(),
        ));
    }

    let times: Vec<f64> = curve.states.iter().map(|s| s.t).collect();
    let mut out = Vec::with_capacity(len);
    for s in 0..len {
        let state = &curve.states[s];
        let geometry = metric.point_geometry(&state.g)?;

        // γ*Γ_{ia}^k at this sample, as ξ-values.
        let pulled: Vec<Vec<Vec<XiValue>>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|a| {
                        (0..dim)
                            .map(|k| pull_back(&geometry.gamma[i][a][k], &state.h))
                            .collect()
                    })
                    .collect()
            })
            .collect();

        // ∂(γ*η_i) with respect to t or ξ.
        let d_eta: Vec<XiValue> = match which {
            CurveDerivative::Even => {
                let mut d = Vec::with_capacity(dim);
                for i in 0..n {
                    d.push(XiValue::scalar(state.v[i]));
                }
                for alpha in 0..m {
                    let dh =
                        series_derivative(&times, |idx| curve.states[idx].h[alpha], s);
                    d.push(XiValue::new(0.0, dh));
                }
                d
            }
            CurveDerivative::Odd => {
                let mut d = vec![XiValue::ZERO; n];
                for alpha in 0..m {
                    d.push(XiValue::scalar(state.h[alpha]));
                }
                d
            }
        };

        let mut row = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut acc = match which {
                CurveDerivative::Even => {
                    series_derivative(&times, |idx| field[idx][k], s)
                }
                // ∂_ξ (f + gξ) = g.
                CurveDerivative::Odd => XiValue::scalar(field[s][k].odd),
            };
            for i in 0..dim {
                if d_eta[i].abs_max() == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    let f_j = match which {
                        CurveDerivative::Even => field[s][j],
                        CurveDerivative::Odd => field[s][j].flip(),
                    };
                    acc = acc + f_j * d_eta[i] * pulled[i][j][k];
                }
            }
            row.push(acc);
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::integrate_geodesic;
    use super::*;
    use crate::chartgeom::builtin::builtin_chart;

    #[test]
    fn xi_value_algebra() {
        let a = XiValue::new(2.0, 3.0);
        let b = XiValue::new(-1.0, 0.5);
        assert_eq!(a + b, XiValue::new(1.0, 3.5));
        assert_eq!(a * b, XiValue::new(-2.0, -2.0)); // 2·0.5 + 3·(-1) = -2
        assert_eq!(a.flip(), XiValue::new(2.0, -3.0));
        assert_eq!((a * b), (b * a), "ℝ[ξ]/(ξ²) is commutative");
    }

    #[test]
    fn flat_transport_is_constant() {
        let metric = builtin_chart("flat-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.0, 0.0], &[1.0, 0.3], &[0.5, -0.5], 1.0, 0.05)
                .unwrap();
        let tau = [0.3, -0.7, 1.5, 0.25];
        let field = parallel_transport(&metric, &curve, &tau).unwrap();
        for row in &field.components {
            for (a, value) in row.iter().enumerate() {
                assert!((value.even - tau[a]).abs() < 1e-13);
                assert_eq!(value.odd, 0.0);
            }
        }
    }

    #[test]
    fn transport_preserves_parity_exactly() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.2, 0.1], &[0.8, -0.3], &[1.0, 0.5], 1.0, 0.02)
                .unwrap();

        let even_tau = [1.0, -2.0, 0.0, 0.0];
        let field = parallel_transport(&metric, &curve, &even_tau).unwrap();
        for row in &field.components {
            // Even field: odd axes carry no ξ⁰ part, even axes no ξ¹ part.
            assert_eq!(row[2].even, 0.0);
            assert_eq!(row[3].even, 0.0);
            assert_eq!(row[0].odd, 0.0);
            assert_eq!(row[1].odd, 0.0);
        }

        let odd_tau = [0.0, 0.0, 1.0, -1.0];
        let field = parallel_transport(&metric, &curve, &odd_tau).unwrap();
        for row in &field.components {
            assert_eq!(row[0].even, 0.0);
            assert_eq!(row[1].even, 0.0);
            assert_eq!(row[2].odd, 0.0);
            assert_eq!(row[3].odd, 0.0);
        }
        // The ξ¹ parts themselves are nonzero on this chart (the algebraic
        // relations genuinely fire).
        let xi_mass: f64 = field
            .components
            .iter()
            .flat_map(|row| row.iter().map(|v| v.odd.abs()))
            .fold(0.0, f64::max);
        assert!(xi_mass > 1e-4, "xi mass {xi_mass}");
    }

    #[test]
    fn transport_matches_the_analytic_decay_on_the_odd_plane() {
        // Along a curve with velocity v on r12-odd, odd components obey
        // f' = -v·(b'/2b)·f, so f(t) = f(0)·sqrt(b(t0)/b(t)).
        let metric = builtin_chart("r12-odd").unwrap();
        let curve = integrate_geodesic(&metric, &[0.2], &[1.0], &[0.0, 0.0], 0.8, 0.01).unwrap();
        let field = parallel_transport(&metric, &curve, &[0.0, 1.0, 0.0]).unwrap();
        let b = |t: f64| 1.0 + t * t;
        let t_end = curve.terminal().g[0];
        let expected = (b(0.2) / b(t_end)).sqrt();
        let got = field.terminal()[1].even;
        assert!((got - expected).abs() < 1e-9, "got {got}, expected {expected}");
    }

    #[test]
    fn transport_is_an_isometry() {
        for name in ["r12-odd", "mixed-r22", "hyperbolic"] {
            let metric = builtin_chart(name).unwrap();
            let n = metric.n();
            let m = metric.m();
            let p: Vec<f64> = (0..n).map(|i| 0.3 + 0.4 * i as f64).collect();
            let v: Vec<f64> = (0..n).map(|i| 1.0 - 0.6 * i as f64).collect();
            let w: Vec<f64> = (0..m).map(|a| 0.7 - 0.2 * a as f64).collect();
            let curve = integrate_geodesic(&metric, &p, &v, &w, 1.0, 1e-3).unwrap();
            let frame = parallel_frame(&metric, &curve).unwrap();

            for x in &frame.fields {
                for y in &frame.fields {
                    let ips = reduced_inner_products(&metric, &curve, x, y).unwrap();
                    let drift = ips
                        .iter()
                        .map(|ip| (ip - ips[0]).abs())
                        .fold(0.0, f64::max);
                    assert!(drift <= 1e-6, "{name}: inner product drift {drift}");
                }
            }
        }
    }

    #[test]
    fn transport_is_linear_in_the_initial_vector() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.0, 0.5], &[1.0, 0.2], &[0.3, 0.6], 0.7, 0.01)
                .unwrap();
        let t1 = [1.0, 0.0, 2.0, 0.0];
        let t2 = [0.0, -1.0, 0.0, 0.5];
        let combo: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        let f1 = parallel_transport(&metric, &curve, &t1).unwrap();
        let f2 = parallel_transport(&metric, &curve, &t2).unwrap();
        let fc = parallel_transport(&metric, &curve, &combo).unwrap();
        let end1 = f1.terminal();
        let end2 = f2.terminal();
        let endc = fc.terminal();
        for a in 0..4 {
            let expect = end1[a].scale(2.0) - end2[a].scale(3.0);
            assert!((endc[a] - expect).abs_max() < 1e-10);
        }
    }

    #[test]
    fn parallel_fields_have_vanishing_reduced_covariant_derivatives() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.2, 0.1], &[0.8, -0.3], &[1.0, 0.5], 1.0, 0.01)
                .unwrap();
        let field = parallel_transport(&metric, &curve, &[1.0, -0.5, 0.0, 0.0]).unwrap();

        let dt = covariant_derivative_along(
            &metric,
            &curve,
            &field.components,
            CurveDerivative::Even,
        )
        .unwrap();
        let worst_t = dt
            .iter()
            .flat_map(|row| row.iter().map(|v| v.even.abs()))
            .fold(0.0, f64::max);
        assert!(worst_t < 1e-3, "reduced ∇/dt residual {worst_t}");

        let dxi = covariant_derivative_along(
            &metric,
            &curve,
            &field.components,
            CurveDerivative::Odd,
        )
        .unwrap();
        let worst_xi = dxi
            .iter()
            .flat_map(|row| row.iter().map(|v| v.even.abs()))
            .fold(0.0, f64::max);
        assert!(worst_xi < 1e-12, "reduced ∇/dξ residual {worst_xi}");
    }

    #[test]
    fn geodesics_have_parallel_velocity() {
        // The defining property: the reduced part of ∇/dt dγ(∂_t) vanishes.
        let metric = builtin_chart("hyperbolic").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.0, 1.0], &[0.6, 0.8], &[], 1.0, 1e-3).unwrap();
        let thinned = curve.thin(10);
        let velocity: Vec<Vec<XiValue>> = thinned
            .states
            .iter()
            .map(|s| s.v.iter().map(|&vi| XiValue::scalar(vi)).collect())
            .collect();
        let dt = covariant_derivative_along(
            &metric,
            &thinned,
            &velocity,
            CurveDerivative::Even,
        )
        .unwrap();
        let worst = dt
            .iter()
            .flat_map(|row| row.iter().map(|v| v.even.abs()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "geodesic residual {worst}");
    }

    #[test]
    fn xi_derivative_of_the_odd_differential_vanishes() {
        // For every supercurve, ∇/dξ dγ(∂_ξ) = 0; dγ(∂_ξ) has the odd
        // coefficients h_α as its odd-axis components.
        let metric = builtin_chart("mixed-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.1, 0.3], &[0.5, 0.4], &[0.8, -0.6], 0.5, 0.05)
                .unwrap();
        let n = metric.n();
        let field: Vec<Vec<XiValue>> = curve
            .states
            .iter()
            .map(|s| {
                let mut row = vec![XiValue::ZERO; metric.dim()];
                for (alpha, h) in s.h.iter().enumerate() {
                    row[n + alpha] = XiValue::scalar(*h);
                }
                row
            })
            .collect();
        let dxi =
            covariant_derivative_along(&metric, &curve, &field, CurveDerivative::Odd).unwrap();
        let worst = dxi
            .iter()
            .flat_map(|row| row.iter().map(|v| v.abs_max()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "∇/dξ dγ(∂_ξ) mass {worst}");
    }

    #[test]
    fn flat_covariant_derivative_is_plain_differentiation() {
        let metric = builtin_chart("flat-r22").unwrap();
        let curve =
            integrate_geodesic(&metric, &[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], 1.0, 0.02)
                .unwrap();
        // Field with components (sin t, cos t, 0, 0).
        let field: Vec<Vec<XiValue>> = curve
            .states
            .iter()
            .map(|s| {
                vec![
                    XiValue::scalar(s.t.sin()),
                    XiValue::scalar(s.t.cos()),
                    XiValue::ZERO,
                    XiValue::ZERO,
                ]
            })
            .collect();
        let dt = covariant_derivative_along(&metric, &curve, &field, CurveDerivative::Even)
            .unwrap();
        for (s, row) in dt.iter().enumerate() {
            let t = curve.states[s].t;
            assert!((row[0].even - t.cos()).abs() < 1e-3);
            assert!((row[1].even + t.sin()).abs() < 1e-3);
        }
    }
}
