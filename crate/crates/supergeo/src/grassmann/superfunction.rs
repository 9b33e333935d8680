//! Superfunctions on a coordinate patch ℝ^{n|m}.
//!
//! A superfunction is a finite sum `Σ_I f_I(x) ξ_I` over index sets `I` of
//! the odd generators, with coefficient functions of the even coordinates.
//! Products follow the sign rule of the Grassmann algebra; derivatives along
//! odd coordinates act from the left.

use std::collections::BTreeMap;
use std::fmt;

use super::coefficient::{Coefficient, MultiPoly};
use super::number::{GrassmannNumber, IndexSet, Parity};
use crate::error::{Error, Result};

/// A coordinate axis of ℝ^{n|m}: even axes come first (`0..n`), odd axes
/// follow (`n..n+m`). Odd axis `n + k` is the generator `ξ_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Even(usize),
    /// 1-based generator index.
    Odd(usize),
}

impl Axis {
    /// Splits a flat coordinate index into an even or odd axis.
    pub fn from_flat(a: usize, n: usize, m: usize) -> Result<Axis> {
        if a < n {
            Ok(Axis::Even(a))
        } else if a < n + m {
            Ok(Axis::Odd(a - n + 1))
        } else {
            Err(Error::AxisOutOfRange { axis: a, n, m })
        }
    }

    pub fn parity(self) -> Parity {
        match self {
            Axis::Even(_) => Parity::Even,
            Axis::Odd(_) => Parity::Odd,
        }
    }
}

/// A finite sum of Grassmann monomials with coefficient functions on ℝⁿ.
#[derive(Debug, Clone)]
pub struct Superfunction {
    n: usize,
    m: usize,
    terms: BTreeMap<u64, Coefficient>,
}

impl Superfunction {
    pub fn zero(n: usize, m: usize) -> Self {
        Superfunction {
            n,
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, m: usize, value: f64) -> Self {
        Self::term(n, m, IndexSet::EMPTY, Coefficient::constant(n, value))
    }

    /// A single term `coeff(x) · ξ_I`.
    pub fn term(n: usize, m: usize, set: IndexSet, coeff: Coefficient) -> Self {
        assert_eq!(coeff.nvars(), n, "coefficient variable count mismatch");
        let mut terms = BTreeMap::new();
        if !coeff.is_structurally_zero() {
            terms.insert(set.0, coeff);
        }
        Superfunction { n, m, terms }
    }

    /// The even coordinate function `x_i` (0-based).
    pub fn even_coord(n: usize, m: usize, i: usize) -> Result<Self> {
        Ok(Self::term(
            n,
            m,
            IndexSet::EMPTY,
            Coefficient::from_poly(MultiPoly::var(n, i)?),
        ))
    }

    /// The odd coordinate `ξ_alpha` (1-based).
    pub fn odd_coord(n: usize, m: usize, alpha: usize) -> Result<Self> {
        let set = IndexSet::from_indices(&[alpha], m)?;
        Ok(Self::term(n, m, set, Coefficient::constant(n, 1.0)))
    }

    pub fn even_dim(&self) -> usize {
        self.n
    }

    pub fn odd_dim(&self) -> usize {
        self.m
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexSet, &Coefficient)> + '_ {
        self.terms.iter().map(|(&mask, c)| (IndexSet(mask), c))
    }

    /// Coefficient function of the monomial `ξ_I` (zero if absent).
    pub fn coeff(&self, set: IndexSet) -> Coefficient {
        self.terms
            .get(&set.0)
            .cloned()
            .unwrap_or_else(|| Coefficient::zero(self.n))
    }

    fn insert_add(&mut self, mask: u64, coeff: Coefficient) {
        if coeff.is_structurally_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            None => {
                self.terms.insert(mask, coeff);
            }
            Some(existing) => {
                let sum = existing.add(&coeff);
                if !sum.is_structurally_zero() {
                    self.terms.insert(mask, sum);
                }
            }
        }
    }

    fn check_compatible(&self, other: &Superfunction) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::DimensionMismatch(format!(
                "superfunctions on R^({}|{}) vs R^({}|{})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Superfunction) -> Result<Superfunction> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&mask, c) in &other.terms {
            out.insert_add(mask, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Superfunction {
        let mut out = Self::zero(self.n, self.m);
        for (&mask, c) in &self.terms {
            out.insert_add(mask, c.scale(factor));
        }
        out
    }

    pub fn sub(&self, other: &Superfunction) -> Result<Superfunction> {
        self.add(&other.scale(-1.0))
    }

    /// Product with the Grassmann sign rule. Coefficient functions are even
    /// and commute with everything; the sign comes from merging monomials.
    pub fn mul(&self, other: &Superfunction) -> Result<Superfunction> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n, self.m);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let sign = IndexSet(a).merge_sign(IndexSet(b));
                out.insert_add(a | b, ca.mul(cb).scale(sign));
            }
        }
        Ok(out)
    }

    /// Partial derivative along a coordinate axis.
    ///
    /// Even axes differentiate the coefficient functions. Odd axes act as the
    /// left derivative: `ξ_α` is removed with sign `(-1)^(pos-1)` where `pos`
    /// is its position in the sorted monomial, and terms not containing `ξ_α`
    /// are annihilated.
    pub fn partial(&self, axis: Axis) -> Result<Superfunction> {
        match axis {
            Axis::Even(i) => {
                if i >= self.n {
                    return Err(Error::AxisOutOfRange {
                        axis: i,
                        n: self.n,
                        m: self.m,
                    });
                }
                let mut out = Self::zero(self.n, self.m);
                for (&mask, c) in &self.terms {
                    out.insert_add(mask, c.partial(i)?);
                }
                Ok(out)
            }
            Axis::Odd(alpha) => {
                if alpha == 0 || alpha > self.m {
                    return Err(Error::AxisOutOfRange {
                        axis: alpha,
                        n: self.n,
                        m: self.m,
                    });
                }
                let bit = 1u64 << (alpha - 1);
                let mut out = Self::zero(self.n, self.m);
                for (&mask, c) in &self.terms {
                    if mask & bit == 0 {
                        continue;
                    }
                    let below = (mask & (bit - 1)).count_ones();
                    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                    out.insert_add(mask & !bit, c.scale(sign));
                }
                Ok(out)
            }
        }
    }

    /// Partial derivative by flat coordinate index (`0..n+m`).
    pub fn partial_flat(&self, a: usize) -> Result<Superfunction> {
        self.partial(Axis::from_flat(a, self.n, self.m)?)
    }

    /// Evaluates at a point of the reduced space, producing a Grassmann
    /// number in the odd generators.
    pub fn eval(&self, x: &[f64]) -> GrassmannNumber {
        assert_eq!(x.len(), self.n, "evaluation point length mismatch");
        let mut out = GrassmannNumber::zero(self.m);
        for (&mask, c) in &self.terms {
            let v = c.eval(x);
            if v != 0.0 {
                out = out
                    .add(&GrassmannNumber::monomial(self.m, IndexSet(mask), v))
                    .expect("same generator count");
            }
        }
        out
    }

    /// Value of the underlying reduced function (degree-0 coefficient).
    pub fn reduced(&self, x: &[f64]) -> f64 {
        self.terms
            .get(&0)
            .map(|c| c.eval(x))
            .unwrap_or(0.0)
    }

    /// `true` if every stored monomial has the given parity (zero passes).
    pub fn has_parity(&self, parity: Parity) -> bool {
        self.terms
            .keys()
            .all(|&mask| IndexSet(mask).parity() == parity)
    }

    /// `Some(parity)` when homogeneous (zero counts as even), `None` if mixed.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|&mask| IndexSet(mask).parity());
        match it.next() {
            None => Some(Parity::Even),
            Some(first) => {
                if it.all(|p| p == first) {
                    Some(first)
                } else {
                    None
                }
            }
        }
    }

    /// `true` if all coefficients are exact rational functions.
    pub fn is_exact(&self) -> bool {
        self.terms.values().all(|c| c.is_exact())
    }
}

impl IndexSet {
    /// Sign from merging `self · other` into a single sorted monomial
    /// (masks must be disjoint).
    pub fn merge_sign(self, other: IndexSet) -> f64 {
        let mut swaps = 0u32;
        let mut bits = other.0;
        while bits != 0 {
            let j = bits.trailing_zeros();
            swaps += (self.0 >> (j + 1)).count_ones();
            bits &= bits - 1;
        }
        if swaps % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&mask, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "(")?;
            match c {
                Coefficient::Rational { num, den } => {
                    if den.as_constant() == Some(1.0) {
                        write!(f, "{num}")?;
                    } else {
                        write!(f, "({num})/({den})")?;
                    }
                }
                Coefficient::Opaque(_) => write!(f, "<opaque>")?,
            }
            write!(f, ")")?;
            for i in IndexSet(mask).indices() {
                write!(f, " ξ{i}")?;
            }
        }
        Ok(())
    }
}
