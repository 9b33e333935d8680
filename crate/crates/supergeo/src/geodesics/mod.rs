//! Supergeodesic integration and parallel transport along supercurves.
//!
//! A supercurve ℝ^{1|1} → M is described, in a chart with coordinates
//! `(x_i, ξ_α)`, by even components `g_i(t)` and odd coefficients `h_α(t)`
//! (the pullback of `ξ_α` is `h_α(t)·ξ`). A supergeodesic is a supercurve
//! whose reduced curve `g(t)` solves the classical geodesic equation of the
//! reduced metric and whose odd coefficients solve the *first-order* linear
//! system
//!
//! ```text
//! g_k'' + Σ_ij g_i' g_j' Γ̃_ij^k = 0,      h_δ' + Σ_iβ g_i' h_β Γ̃_iβ^δ = 0,
//! ```
//!
//! where `Γ̃` are the degree-0 (body) parts of the Christoffel symbols along
//! the reduced curve — the nilpotent parts drop out of both systems, so
//! integration happens entirely over the reals. Initial data is a point, an
//! even velocity, and the odd coefficient vector; that data determines the
//! supergeodesic uniquely.
//!
//! Everything uses fixed-step classical Runge-Kutta (RK4): deterministic,
//! fourth order, trivially reproducible.

mod transport;

pub use transport::{
    covariant_derivative_along, parallel_frame, parallel_transport, reduced_inner_products,
    CurveDerivative, ParallelField, ParallelFrame, XiValue,
};

use crate::chartgeom::{BodyChristoffel, BodySolver, GradedMetric};
use crate::error::{Error, Result};

/// State of a supercurve at one time: positions, velocities, and odd
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SupercurveState {
    pub t: f64,
    /// Reduced positions `g_i(t)`.
    pub g: Vec<f64>,
    /// Velocities `g_i'(t)`.
    pub v: Vec<f64>,
    /// Odd coefficients `h_α(t)`.
    pub h: Vec<f64>,
}

impl SupercurveState {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.g.iter().all(|x| x.is_finite())
            && self.v.iter().all(|x| x.is_finite())
            && self.h.iter().all(|x| x.is_finite())
    }
}

/// A sampled supergeodesic, one state per integrator step.
#[derive(Debug, Clone)]
pub struct GeodesicResult {
    /// States at `t = 0, ±step, ±2·step, …, t_end` (the sign follows
    /// `t_end`; the final step may be shorter).
    pub states: Vec<SupercurveState>,
    /// The step size used.
    pub step: f64,
    /// Worst mismatch between central differences of the samples and the
    /// right-hand side of the equations; `O(step²)` for a correct solve.
    pub equation_residual: f64,
    /// Worst drift of the reduced energy `Σ_ij v_i v_j g̃_ij(g)` relative to
    /// its initial value.
    pub energy_drift: f64,
}

impl GeodesicResult {
    pub fn initial(&self) -> &SupercurveState {
        self.states.first().expect("result holds at least one state")
    }

    pub fn terminal(&self) -> &SupercurveState {
        self.states.last().expect("result holds at least one state")
    }

    /// Keeps every `stride`-th sample (always keeping both endpoints).
    /// Useful before running the more expensive per-sample analyses.
    pub fn thin(&self, stride: usize) -> GeodesicResult {
        let stride = stride.max(1);
        let last = self.states.len() - 1;
        let states: Vec<SupercurveState> = self
            .states
            .iter()
            .enumerate()
            .filter(|(i, _)| i % stride == 0 || *i == last)
            .map(|(_, s)| s.clone())
            .collect();
        GeodesicResult {
            states,
            step: self.step * stride as f64,
            equation_residual: self.equation_residual,
            energy_drift: self.energy_drift,
        }
    }
}

/// Right-hand side of the supergeodesic system at a state:
/// `dv_k = -Σ_ij v_i v_j Γ̃_ij^k` and `dh_δ = -Σ_iβ v_i h_β Γ̃_iβ^δ`.
pub fn geodesic_rhs(metric: &GradedMetric, state: &SupercurveState) -> Result<(Vec<f64>, Vec<f64>)> {
    let solver = BodySolver::new(metric)?;
    let gamma = solver.christoffel_at(&state.g)?;
    Ok(rhs_from_christoffels(&gamma, &state.v, &state.h))
}

fn rhs_from_christoffels(
    gamma: &BodyChristoffel,
    v: &[f64],
    h: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = gamma.n;
    let m = gamma.m;
    let mut dv = vec![0.0; n];
    for (k, slot) in dv.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += v[i] * v[j] * gamma.gamma[i][j][k];
            }
        }
        *slot = -acc;
    }
    let mut dh = vec![0.0; m];
    for (delta, slot) in dh.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            for beta in 0..m {
                acc += v[i] * h[beta] * gamma.gamma[i][n + beta][n + delta];
            }
        }
        *slot = -acc;
    }
    (dv, dh)
}

/// Reduced energy `Σ_ij v_i v_j g̃_ij(g)`; constant along geodesics.
fn reduced_energy(gamma: &BodyChristoffel, v: &[f64]) -> f64 {
    let n = gamma.n;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * v[j] * gamma.even_body[(i, j)];
        }
    }
    acc
}

/// Flat state vector (g, v, h) used inside the integrator.
#[derive(Clone)]
struct RawState {
    g: Vec<f64>,
    v: Vec<f64>,
    h: Vec<f64>,
}

impl RawState {
    fn axpy(&self, dt: f64, d: &RawDeriv) -> RawState {
        RawState {
            g: self.g.iter().zip(&d.dg).map(|(x, dx)| x + dt * dx).collect(),
            v: self.v.iter().zip(&d.dv).map(|(x, dx)| x + dt * dx).collect(),
            h: self.h.iter().zip(&d.dh).map(|(x, dx)| x + dt * dx).collect(),
        }
    }
}

struct RawDeriv {
    dg: Vec<f64>,
    dv: Vec<f64>,
    dh: Vec<f64>,
}

fn eval_rhs(solver: &BodySolver, state: &RawState) -> Result<RawDeriv> {
    let gamma = solver.christoffel_at(&state.g)?;
    let (dv, dh) = rhs_from_christoffels(&gamma, &state.v, &state.h);
    Ok(RawDeriv {
        dg: state.v.clone(),
        dv,
        dh,
    })
}

/// Integrates the supergeodesic with initial point `p`, even velocity `v`,
/// and odd coefficients `w` up to `t_end` (either sign) with fixed-step RK4.
///
/// Errors if the metric becomes singular along the trajectory or the state
/// stops being finite.
pub fn integrate_geodesic(
    metric: &GradedMetric,
    p: &[f64],
    v: &[f64],
    w: &[f64],
    t_end: f64,
    step: f64,
) -> Result<GeodesicResult> {
    let n = metric.n();
    let m = metric.m();
    if p.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial point and velocity must have {n} components"
        )));
    }
    if w.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "odd coefficient vector must have {m} components"
        )));
    }
    if !(step > 0.0) || !step.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParams(
            "step must be positive and finite, t_end finite".into(),
        ));
    }

    let solver = BodySolver::new(metric)?;
    let direction = if t_end < 0.0 { -1.0 } else { 1.0 };
    let total = t_end.abs();

    let mut state = RawState {
        g: p.to_vec(),
        v: v.to_vec(),
        h: w.to_vec(),
    };
    let mut t = 0.0f64;
    let mut states = vec![SupercurveState {
        t: 0.0,
        g: state.g.clone(),
        v: state.v.clone(),
        h: state.h.clone(),
    }];

    let mut remaining = total;
    while remaining > 0.0 {
        let dt_abs = step.min(remaining);
        let dt = direction * dt_abs;

        let k1 = eval_rhs(&solver, &state)?;
        let k2 = eval_rhs(&solver, &state.axpy(dt / 2.0, &k1))?;
        let k3 = eval_rhs(&solver, &state.axpy(dt / 2.0, &k2))?;
        let k4 = eval_rhs(&solver, &state.axpy(dt, &k3))?;

        let combine = |a: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
            a.iter()
                .enumerate()
                .map(|(i, x)| x + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        };
        state = RawState {
            g: combine(&state.g, &k1.dg, &k2.dg, &k3.dg, &k4.dg),
            v: combine(&state.v, &k1.dv, &k2.dv, &k3.dv, &k4.dv),
            h: combine(&state.h, &k1.dh, &k2.dh, &k3.dh, &k4.dh),
        };
        remaining -= dt_abs;
        t = if remaining > 0.0 { t + dt } else { t_end };

        let sample = SupercurveState {
            t,
            g: state.g.clone(),
            v: state.v.clone(),
            h: state.h.clone(),
        };
        if !sample.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        states.push(sample);
    }

    // Diagnostics: re-substitute the samples into the equations (central
    // differences) and track the reduced-energy drift.
    let mut equation_residual = 0.0f64;
    let mut energy_drift = 0.0f64;
    let mut initial_energy = None;
    for (idx, s) in states.iter().enumerate() {
        let gamma = solver.christoffel_at(&s.g)?;
        let energy = reduced_energy(&gamma, &s.v);
        let e0 = *initial_energy.get_or_insert(energy);
        energy_drift = energy_drift.max((energy - e0).abs());

        if idx == 0 || idx + 1 >= states.len() {
            continue;
        }
        let (prev, next) = (&states[idx - 1], &states[idx + 1]);
        let span = next.t - prev.t;
        if span.abs() < f64::EPSILON {
            continue;
        }
        let (dv, dh) = rhs_from_christoffels(&gamma, &s.v, &s.h);
        for k in 0..n {
            let fd = (next.v[k] - prev.v[k]) / span;
            equation_residual = equation_residual.max((fd - dv[k]).abs());
        }
        for d in 0..m {
            let fd = (next.h[d] - prev.h[d]) / span;
            equation_residual = equation_residual.max((fd - dh[d]).abs());
        }
    }

    Ok(GeodesicResult {
        states,
        step,
        equation_residual,
        energy_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartgeom::builtin::builtin_chart;

    #[test]
    fn flat_chart_geodesics_are_straight_lines() {
        let metric = builtin_chart("flat-r22").unwrap();
        let result =
            integrate_geodesic(&metric, &[0.0, 0.0], &[1.0, -0.5], &[1.0, 0.0], 1.0, 0.01)
                .unwrap();
        let end = result.terminal();
        assert!((end.g[0] - 1.0).abs() < 1e-12);
        assert!((end.g[1] + 0.5).abs() < 1e-12);
        assert!((end.h[0] - 1.0).abs() < 1e-12);
        assert_eq!(end.h[1], 0.0);
        assert!(result.energy_drift < 1e-12);
    }

    #[test]
    fn hyperbolic_vertical_geodesic_reaches_e() {
        // On the upper half-plane, the unit-speed vertical geodesic through
        // (0,1) is y(t) = exp(t).
        let metric = builtin_chart("hyperbolic").unwrap();
        let result =
            integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[], 1.0, 1e-3).unwrap();
        let end = result.terminal();
        assert!((end.t - 1.0).abs() < 1e-15);
        assert!(end.g[0].abs() < 1e-12);
        assert!(
            (end.g[1] - std::f64::consts::E).abs() < 1e-6,
            "y(1) = {}, expected e",
            end.g[1]
        );
        assert!(result.energy_drift < 1e-9, "drift {}", result.energy_drift);
    }

    #[test]
    fn rk4_is_fourth_order_on_the_hyperbolic_plane() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let endpoint = |step: f64| {
            integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[], 1.0, step)
                .unwrap()
                .terminal()
                .g[1]
        };
        let err_coarse = (endpoint(0.1) - std::f64::consts::E).abs();
        let err_fine = (endpoint(0.05) - std::f64::consts::E).abs();
        let ratio = err_coarse / err_fine;
        assert!(
            (12.0..=20.0).contains(&ratio),
            "step halving changed the error by {ratio:.2}x"
        );
    }

    #[test]
    fn odd_coefficients_evolve_linearly() {
        let metric = builtin_chart("r12-odd").unwrap();
        let run = |w: &[f64]| {
            integrate_geodesic(&metric, &[0.2], &[1.0], w, 0.8, 0.01)
                .unwrap()
                .terminal()
                .h
                .clone()
        };
        let h1 = run(&[1.0, 0.0]);
        let h2 = run(&[0.0, 1.0]);
        let mix = run(&[0.3, -1.7]);
        for d in 0..2 {
            let superposed = 0.3 * h1[d] - 1.7 * h2[d];
            assert!(
                (mix[d] - superposed).abs() < 1e-10,
                "component {d}: {} vs {}",
                mix[d],
                superposed
            );
        }
        // Doubling w doubles h everywhere.
        let doubled = run(&[2.0, 0.0]);
        for d in 0..2 {
            assert!((doubled[d] - 2.0 * h1[d]).abs() < 1e-10);
        }
    }

    #[test]
    fn odd_coefficients_follow_the_decay_law() {
        // On r12-odd: h_δ' = -v·(b'/2b)·h_δ along a curve with velocity v,
        // so h(t) = h(0)·sqrt(b(t0)/b(t)) along the even motion t(t).
        // The even part is flat, so t(t) = t0 + v·t.
        let metric = builtin_chart("r12-odd").unwrap();
        let (t0, v) = (0.2, 1.0);
        let result = integrate_geodesic(&metric, &[t0], &[v], &[1.0, 0.5], 0.8, 1e-3).unwrap();
        let end = result.terminal();
        let b = |t: f64| 1.0 + t * t;
        let expected_scale = (b(t0) / b(end.g[0])).sqrt();
        assert!((end.h[0] - expected_scale).abs() < 1e-8, "h0 = {}", end.h[0]);
        assert!((end.h[1] - 0.5 * expected_scale).abs() < 1e-8);
        assert!(result.equation_residual < 1e-4);
    }

    #[test]
    fn integration_is_bitwise_deterministic() {
        let metric = builtin_chart("mixed-r22").unwrap();
        let run = || {
            integrate_geodesic(&metric, &[0.1, 0.4], &[0.7, -0.2], &[1.0, -1.0], 1.0, 0.01)
                .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.states.len(), b.states.len());
        for (sa, sb) in a.states.iter().zip(&b.states) {
            assert_eq!(sa, sb, "states must agree bitwise");
        }
    }

    #[test]
    fn geodesic_rhs_matches_classical_values() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let state = SupercurveState {
            t: 0.0,
            g: vec![0.0, 1.0],
            v: vec![1.0, 0.0],
            h: vec![],
        };
        let (dv, dh) = geodesic_rhs(&metric, &state).unwrap();
        // dv_y = -Γ_xx^y v_x² = -1/y = -1 at y = 1; dv_x = 0.
        assert!(dv[0].abs() < 1e-12);
        assert!((dv[1] + 1.0).abs() < 1e-12);
        assert!(dh.is_empty());
    }

    #[test]
    fn negative_time_integration_runs_backwards() {
        let metric = builtin_chart("hyperbolic").unwrap();
        let result =
            integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[], -1.0, 1e-3).unwrap();
        let end = result.terminal();
        assert!((end.t + 1.0).abs() < 1e-15);
        assert!((end.g[1] - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let metric = builtin_chart("hyperbolic").unwrap();
        assert!(integrate_geodesic(&metric, &[0.0], &[0.0, 1.0], &[], 1.0, 0.1).is_err());
        assert!(integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[1.0], 1.0, 0.1).is_err());
        assert!(integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[], 1.0, 0.0).is_err());
        assert!(
            integrate_geodesic(&metric, &[0.0, 1.0], &[0.0, 1.0], &[], f64::NAN, 0.1).is_err()
        );
    }

    #[test]
    fn singular_metric_at_the_start_point_fails_cleanly() {
        // g_tt = t degenerates at t = 0; the very first stage must error.
        let chart = crate::chartgeom::Chart::with_dims("degenerate", 1, 0);
        let entry = crate::grassmann::Superfunction::even_coord(1, 0, 0).unwrap();
        let metric = crate::chartgeom::GradedMetric::new(chart, vec![vec![entry]]).unwrap();
        let result = integrate_geodesic(&metric, &[0.0], &[1.0], &[], 1.0, 0.1);
        assert!(matches!(result, Err(Error::SingularMetric(_))));
    }

    #[test]
    fn non_finite_states_abort_the_integration() {
        let metric = builtin_chart("flat-r22").unwrap();
        let result = integrate_geodesic(
            &metric,
            &[0.0, 0.0],
            &[f64::INFINITY, 0.0],
            &[0.0, 0.0],
            1.0,
            0.1,
        );
        assert!(matches!(result, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn thinning_keeps_endpoints() {
        let metric = builtin_chart("flat-r22").unwrap();
        let result =
            integrate_geodesic(&metric, &[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], 1.0, 0.01)
                .unwrap();
        let thin = result.thin(10);
        assert_eq!(thin.initial().t, 0.0);
        assert_eq!(thin.terminal().t, 1.0);
        assert!(thin.states.len() < result.states.len());
    }
}
