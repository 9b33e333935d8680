//! Exact arithmetic in the Grassmann algebra Λ[ξ1..ξm] over ℝ.
//!
//! Elements are finite sums of monomials `c · ξ_{i1}···ξ_{ik}` with strictly
//! increasing indices. A monomial is stored as a bitmask (bit `i-1` set means
//! the generator `ξi` is present), so products reduce to bit operations plus
//! a sign from sorting the concatenated generators.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Parity (Z/2-degree) of a homogeneous quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of a sum of degrees: `Even + Odd = Odd`, etc.
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn from_degree(k: usize) -> Parity {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `-1` for odd, `+1` for even; the sign that appears whenever two odd
    /// quantities are swapped.
    pub fn sign_swap_with(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn from_u8(b: u8) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A strictly increasing set of odd-generator indices, stored as a bitmask.
///
/// Externally indices are 1-based (`ξ1` is index 1); internally bit `i-1`
/// represents `ξi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSet(pub(crate) u64);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    /// Builds an index set from 1-based indices, which must be strictly
    /// increasing and at most `m`.
    pub fn from_indices(indices: &[usize], m: usize) -> Result<IndexSet> {
        let mut mask = 0u64;
        let mut prev = 0usize;
        for &i in indices {
            if i == 0 || i > m {
                return Err(Error::AxisOutOfRange { axis: i, n: 0, m });
            }
            if i <= prev {
                return Err(Error::Format(format!(
                    "odd indices must be strictly increasing, got {indices:?}"
                )));
            }
            prev = i;
            mask |= 1 << (i - 1);
        }
        Ok(IndexSet(mask))
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut bits = self.0;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            out.push(j + 1);
            bits &= bits - 1;
        }
        out
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn parity(self) -> Parity {
        Parity::from_degree(self.degree())
    }

    pub fn contains(self, index: usize) -> bool {
        index >= 1 && (self.0 >> (index - 1)) & 1 == 1
    }
}

/// Sign accumulated when the monomial `ξ_B` is moved into sorted position
/// after `ξ_A` (both already sorted, disjoint): each generator of `B` hops
/// over the generators of `A` that are larger.
fn merge_sign(a: u64, b: u64) -> f64 {
    let mut swaps = 0u32;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// An element of the Grassmann algebra Λ[ξ1..ξm] with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannNumber {
    m: usize,
    terms: BTreeMap<u64, f64>,
}

impl GrassmannNumber {
    /// The zero element of Λ[ξ1..ξm].
    pub fn zero(m: usize) -> Self {
        GrassmannNumber {
            m,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative unit.
    pub fn one(m: usize) -> Self {
        Self::scalar(m, 1.0)
    }

    /// A real scalar embedded as a degree-0 element.
    pub fn scalar(m: usize, value: f64) -> Self {
        let mut terms = BTreeMap::new();
        if value != 0.0 {
            terms.insert(0u64, value);
        }
        GrassmannNumber { m, terms }
    }

    /// The generator `ξ_index` (1-based).
    pub fn generator(m: usize, index: usize) -> Result<Self> {
        let set = IndexSet::from_indices(&[index], m)?;
        Ok(Self::monomial(m, set, 1.0))
    }

    /// `coeff · ξ_I`.
    pub fn monomial(m: usize, set: IndexSet, coeff: f64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0.0 {
            terms.insert(set.0, coeff);
        }
        GrassmannNumber { m, terms }
    }

    pub fn from_terms(m: usize, entries: &[(IndexSet, f64)]) -> Self {
        let mut out = Self::zero(m);
        for &(set, c) in entries {
            out.add_term(set.0, c);
        }
        out
    }

    pub fn generators(&self) -> usize {
        self.m
    }

    fn add_term(&mut self, mask: u64, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(mask).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&mask);
        }
    }

    /// Coefficient of the monomial `ξ_I`.
    pub fn coeff(&self, set: IndexSet) -> f64 {
        self.terms.get(&set.0).copied().unwrap_or(0.0)
    }

    /// Degree-0 (real) part.
    pub fn body(&self) -> f64 {
        self.terms.get(&0).copied().unwrap_or(0.0)
    }

    /// The nilpotent remainder `self - body`.
    pub fn soul(&self) -> GrassmannNumber {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    /// Iterates over `(index set, coefficient)` pairs of nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (IndexSet, f64)> + '_ {
        self.terms.iter().map(|(&mask, &c)| (IndexSet(mask), c))
    }

    /// Largest absolute coefficient; a convenient norm for residual checks.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `true` if every stored monomial has the given parity (zero passes).
    pub fn has_parity(&self, parity: Parity) -> bool {
        self.terms
            .keys()
            .all(|mask| IndexSet(*mask).parity() == parity)
    }

    /// `Some(parity)` if the element is homogeneous, `None` if mixed.
    /// Zero is reported as even.
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

    pub fn scale(&self, factor: f64) -> GrassmannNumber {
        let mut out = Self::zero(self.m);
        for (&mask, &c) in &self.terms {
            out.add_term(mask, c * factor);
        }
        out
    }

    fn check_same_generators(&self, other: &GrassmannNumber) -> Result<()> {
        if self.m != other.m {
            Err(Error::GeneratorMismatch(self.m, other.m))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        self.check_same_generators(other)?;
        let mut out = self.clone();
        for (&mask, &c) in &other.terms {
            out.add_term(mask, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        self.add(&other.scale(-1.0))
    }

    /// Grassmann product. Monomials with a common generator annihilate;
    /// otherwise the masks merge with the sorting sign.
    pub fn mul(&self, other: &GrassmannNumber) -> Result<GrassmannNumber> {
        self.check_same_generators(other)?;
        let mut out = Self::zero(self.m);
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                out.add_term(a | b, ca * cb * merge_sign(a, b));
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse, when the body is nonzero.
    ///
    /// Writing `a = b + ν` with real `b` and nilpotent `ν`, the Neumann series
    /// `a⁻¹ = b⁻¹ Σ_{k=0..m} (-ν/b)^k` terminates because `ν^{m+1} = 0`.
    pub fn inv(&self) -> Result<GrassmannNumber> {
        let b = self.body();
        if b == 0.0 {
            return Err(Error::ZeroBody);
        }
        let factor = self.soul().scale(-1.0 / b);
        let mut acc = Self::one(self.m);
        let mut power = Self::one(self.m);
        for _ in 0..self.m {
            power = power.mul(&factor)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(1.0 / b))
    }

    /// Left derivative with respect to `ξ_index` (1-based): removes the
    /// generator from each monomial containing it, with sign `(-1)^(pos-1)`
    /// where `pos` is its 1-based position within the sorted monomial.
    pub fn odd_derivative(&self, index: usize) -> Result<GrassmannNumber> {
        if index == 0 || index > self.m {
            return Err(Error::AxisOutOfRange {
                axis: index,
                n: 0,
                m: self.m,
            });
        }
        let bit = 1u64 << (index - 1);
        let mut out = Self::zero(self.m);
        for (&mask, &c) in &self.terms {
            if mask & bit == 0 {
                continue;
            }
            let below = (mask & (bit - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(mask & !bit, sign * c);
        }
        Ok(out)
    }
}

impl fmt::Display for GrassmannNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&mask, &c) in &self.terms {
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let set = IndexSet(mask);
            if mask == 0 {
                write!(f, "{}", c.abs())?;
            } else {
                if (c.abs() - 1.0).abs() > 1e-14 {
                    write!(f, "{} ", c.abs())?;
                }
                for i in set.indices() {
                    write!(f, "ξ{i}")?;
                }
            }
        }
        Ok(())
    }
}
