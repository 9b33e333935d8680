//! Coefficient functions of the even coordinates.
//!
//! A superfunction is a finite sum of Grassmann monomials whose coefficients
//! are ordinary functions on ℝⁿ. Two representations are supported:
//!
//! * [`Coefficient::Rational`] — an exact ratio of multivariate polynomials
//!   (denominator 1 for plain polynomials). Sums, products and partial
//!   derivatives stay in this class and are computed symbolically, so
//!   downstream geometry (Christoffel symbols, curvature) is exact up to
//!   floating-point roundoff.
//! * [`Coefficient::Opaque`] — an arbitrary evaluable with derivative access
//!   through central finite differences (step `1e-5` for first order, `1e-4`
//!   for second order). Accuracy is documented on [`FD_STEP_FIRST`] /
//!   [`FD_STEP_SECOND`]; third derivatives are not available.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Step for first-order central differences on opaque coefficients.
/// Relative accuracy is about `1e-10` for well-scaled smooth functions.
pub const FD_STEP_FIRST: f64 = 1e-5;

/// Step for second-order central differences on opaque coefficients.
/// Relative accuracy is about `1e-7`; exact representations should be
/// preferred wherever that matters.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// A multivariate polynomial with `f64` coefficients, stored as a map from
/// exponent tuples to coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, value: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(&vec![0u16; nvars], value);
        p
    }

    /// The coordinate function `x_axis` (0-based).
    pub fn var(nvars: usize, axis: usize) -> Result<Self> {
        if axis >= nvars {
            return Err(Error::AxisOutOfRange {
                axis,
                n: nvars,
                m: 0,
            });
        }
        let mut exps = vec![0u16; nvars];
        exps[axis] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(&exps, 1.0);
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: &[u16], coeff: f64) {
        assert_eq!(exps.len(), self.nvars, "exponent tuple length mismatch");
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        if self.terms.is_empty() {
            return Some(0.0);
        }
        if self.terms.len() == 1 {
            let (exps, &c) = self.terms.iter().next().unwrap();
            if exps.iter().all(|&e| e == 0) {
                return Some(c);
            }
        }
        None
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            out.add_term(e, c * factor);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        let mut exps = vec![0u16; self.nvars];
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                for i in 0..self.nvars {
                    exps[i] = ea[i] + eb[i];
                }
                out.add_term(&exps, ca * cb);
            }
        }
        out
    }

    pub fn partial(&self, axis: usize) -> Result<MultiPoly> {
        if axis >= self.nvars {
            return Err(Error::AxisOutOfRange {
                axis,
                n: self.nvars,
                m: 0,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut de = e.clone();
            de[axis] -= 1;
            out.add_term(&de, c * e[axis] as f64);
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "evaluation point length mismatch");
        let mut acc = 0.0;
        for (e, &c) in &self.terms {
            let mut term = c;
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term *= x[i].powi(exp as i32);
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &exp) in e.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{exp}")?,
                }
            }
        }
        Ok(())
    }
}

/// An opaque evaluable with finite-difference derivative access.
///
/// `diff` records up to two pending derivative axes; evaluation applies the
/// corresponding central stencil to the base function.
#[derive(Clone)]
pub struct OpaqueFn {
    nvars: usize,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    diff: Vec<usize>,
}

impl OpaqueFn {
    pub fn new(nvars: usize, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>) -> Self {
        OpaqueFn {
            nvars,
            f,
            diff: Vec::new(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "evaluation point length mismatch");
        match self.diff.as_slice() {
            [] => (self.f)(x),
            &[i] => {
                let h = FD_STEP_FIRST;
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                ((self.f)(&xp) - (self.f)(&xm)) / (2.0 * h)
            }
            &[i, j] if i == j => {
                let h = FD_STEP_SECOND;
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                ((self.f)(&xp) - 2.0 * (self.f)(x) + (self.f)(&xm)) / (h * h)
            }
            &[i, j] => {
                let h = FD_STEP_SECOND;
                let mut xpp = x.to_vec();
                let mut xpm = x.to_vec();
                let mut xmp = x.to_vec();
                let mut xmm = x.to_vec();
                xpp[i] += h;
                xpp[j] += h;
                xpm[i] += h;
                xpm[j] -= h;
                xmp[i] -= h;
                xmp[j] += h;
                xmm[i] -= h;
                xmm[j] -= h;
                ((self.f)(&xpp) - (self.f)(&xpm) - (self.f)(&xmp) + (self.f)(&xmm))
                    / (4.0 * h * h)
            }
            _ => unreachable!("derivative order is capped at two"),
        }
    }
}

impl fmt::Debug for OpaqueFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OpaqueFn(nvars={}, diff={:?})", self.nvars, self.diff)
    }
}

/// A coefficient function of the even coordinates.
#[derive(Debug, Clone)]
pub enum Coefficient {
    /// Exact rational function `num/den`; `den = 1` for polynomials.
    Rational { num: MultiPoly, den: MultiPoly },
    /// Opaque evaluable with central-finite-difference derivatives.
    Opaque(OpaqueFn),
}

impl Coefficient {
    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(MultiPoly::zero(nvars))
    }

    pub fn constant(nvars: usize, value: f64) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, value))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let n = p.nvars();
        Coefficient::Rational {
            num: p,
            den: MultiPoly::constant(n, 1.0),
        }
    }

    /// Builds `num/den`. Errors if `den` is identically zero.
    pub fn rational(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Format("rational coefficient with zero denominator".into()));
        }
        if num.nvars() != den.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "numerator has {} variables, denominator {}",
                num.nvars(),
                den.nvars()
            )));
        }
        Ok(Self::normalized(num, den))
    }

    /// Wraps a closure as an opaque coefficient.
    pub fn opaque<F>(nvars: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Coefficient::Opaque(OpaqueFn::new(nvars, Arc::new(f)))
    }

    /// Folds constant denominators into the numerator.
    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(MultiPoly::zero(num.nvars()));
        }
        if let Some(c) = den.as_constant() {
            if c != 0.0 {
                return Self::from_poly(num.scale(1.0 / c));
            }
        }
        Coefficient::Rational { num, den }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Coefficient::Rational { num, .. } => num.nvars(),
            Coefficient::Opaque(o) => o.nvars,
        }
    }

    /// `true` only when the coefficient is structurally the zero polynomial;
    /// opaque coefficients conservatively report `false`.
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            Coefficient::Rational { num, .. } => num.is_zero(),
            Coefficient::Opaque(_) => false,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Rational { .. })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Rational { num, den } => num.eval(x) / den.eval(x),
            Coefficient::Opaque(o) => o.eval(x),
        }
    }

    /// Materializes an opaque coefficient whose pending derivative stencils
    /// are baked into the closure, so it can enter sums and products.
    fn materialize(&self) -> OpaqueFn {
        match self {
            Coefficient::Rational { .. } => {
                let me = self.clone();
                OpaqueFn::new(self.nvars(), Arc::new(move |x: &[f64]| me.eval(x)))
            }
            Coefficient::Opaque(o) => {
                if o.diff.is_empty() {
                    o.clone()
                } else {
                    let inner = o.clone();
                    OpaqueFn::new(o.nvars, Arc::new(move |x: &[f64]| inner.eval(x)))
                }
            }
        }
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
        match (self, other) {
            (
                Coefficient::Rational { num: n1, den: d1 },
                Coefficient::Rational { num: n2, den: d2 },
            ) => {
                if d1 == d2 {
                    Self::normalized(n1.add(n2), d1.clone())
                } else {
                    Self::normalized(n1.mul(d2).add(&n2.mul(d1)), d1.mul(d2))
                }
            }
            _ => {
                let a = self.materialize();
                let b = other.materialize();
                Coefficient::Opaque(OpaqueFn::new(
                    self.nvars(),
                    Arc::new(move |x: &[f64]| a.eval(x) + b.eval(x)),
                ))
            }
        }
    }

    pub fn scale(&self, factor: f64) -> Coefficient {
        match self {
            Coefficient::Rational { num, den } => {
                Self::normalized(num.scale(factor), den.clone())
            }
            Coefficient::Opaque(_) => {
                let a = self.materialize();
                Coefficient::Opaque(OpaqueFn::new(
                    a.nvars,
                    Arc::new(move |x: &[f64]| factor * a.eval(x)),
                ))
            }
        }
    }

    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        assert_eq!(self.nvars(), other.nvars(), "variable count mismatch");
        match (self, other) {
            (
                Coefficient::Rational { num: n1, den: d1 },
                Coefficient::Rational { num: n2, den: d2 },
            ) => Self::normalized(n1.mul(n2), d1.mul(d2)),
            _ => {
                let a = self.materialize();
                let b = other.materialize();
                Coefficient::Opaque(OpaqueFn::new(
                    self.nvars(),
                    Arc::new(move |x: &[f64]| a.eval(x) * b.eval(x)),
                ))
            }
        }
    }

    /// Partial derivative along an even axis.
    ///
    /// Rational coefficients differentiate exactly by the quotient rule.
    /// Opaque coefficients record the axis and evaluate through a central
    /// stencil; at most two derivatives are available.
    pub fn partial(&self, axis: usize) -> Result<Coefficient> {
        if axis >= self.nvars() {
            return Err(Error::AxisOutOfRange {
                axis,
                n: self.nvars(),
                m: 0,
            });
        }
        match self {
            Coefficient::Rational { num, den } => {
                if den.as_constant() == Some(1.0) {
                    Ok(Self::from_poly(num.partial(axis)?))
                } else {
                    // (n/d)' = (n'd - nd')/d²
                    let np = num.partial(axis)?;
                    let dp = den.partial(axis)?;
                    Ok(Self::normalized(
                        np.mul(den).add(&num.mul(&dp).scale(-1.0)),
                        den.mul(den),
                    ))
                }
            }
            Coefficient::Opaque(o) => {
                if o.diff.len() >= 2 {
                    return Err(Error::NoDerivativeAccess { max: 2 });
                }
                let mut out = o.clone();
                out.diff.push(axis);
                Ok(Coefficient::Opaque(out))
            }
        }
    }
}
