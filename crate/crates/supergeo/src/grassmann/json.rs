//! JSON serialization of superfunctions.
//!
//! A superfunction is stored as a list of terms. Each term holds the odd
//! index set and a polynomial as a map from exponent tuples (formatted as
//! `"(2,0)"`) to coefficients; an optional `div` entry supplies a polynomial
//! denominator for rational coefficients:
//!
//! ```json
//! [ {"odd": [1,2], "poly": {"(2,0)": 1.5, "(0,1)": -2.0}},
//!   {"odd": [],    "poly": {"(0,0)": 1.0}, "div": {"(0,2)": 1.0}} ]
//! ```
//!
//! Opaque (closure-backed) coefficients have no serialized form and are
//! rejected on write.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coefficient::{Coefficient, MultiPoly};
use super::number::IndexSet;
use super::superfunction::Superfunction;
use crate::error::{Error, Result};

/// One serialized Grassmann term of a superfunction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDoc {
    /// 1-based odd generator indices, strictly increasing.
    pub odd: Vec<usize>,
    /// Numerator polynomial: exponent tuple → coefficient.
    pub poly: BTreeMap<String, f64>,
    /// Optional denominator polynomial (defaults to 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub div: Option<BTreeMap<String, f64>>,
}

/// Serialized superfunction: a list of terms.
pub type SuperfunctionDoc = Vec<TermDoc>;

fn parse_exponents(key: &str, nvars: usize) -> Result<Vec<u16>> {
    let trimmed = key.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Format(format!("bad exponent key `{key}`, expected `(i,j,..)`")))?;
    let mut exps = Vec::new();
    if !inner.trim().is_empty() {
        for part in inner.split(',') {
            let e: u16 = part.trim().parse().map_err(|_| {
                Error::Format(format!("bad exponent `{part}` in key `{key}`"))
            })?;
            exps.push(e);
        }
    }
    if exps.len() != nvars {
        return Err(Error::Format(format!(
            "exponent key `{key}` has {} entries, chart has {} even coordinates",
            exps.len(),
            nvars
        )));
    }
    Ok(exps)
}

fn format_exponents(exps: &[u16]) -> String {
    let inner: Vec<String> = exps.iter().map(|e| e.to_string()).collect();
    format!("({})", inner.join(","))
}

fn poly_from_map(map: &BTreeMap<String, f64>, nvars: usize) -> Result<MultiPoly> {
    let mut p = MultiPoly::zero(nvars);
    for (key, &c) in map {
        p.add_term(&parse_exponents(key, nvars)?, c);
    }
    Ok(p)
}

fn poly_to_map(p: &MultiPoly) -> BTreeMap<String, f64> {
    p.terms()
        .map(|(e, c)| (format_exponents(e), c))
        .collect()
}

/// Decodes a serialized superfunction on ℝ^{n|m}.
pub fn superfunction_from_doc(doc: &SuperfunctionDoc, n: usize, m: usize) -> Result<Superfunction> {
    let mut out = Superfunction::zero(n, m);
    for term in doc {
        let set = IndexSet::from_indices(&term.odd, m)?;
        let num = poly_from_map(&term.poly, n)?;
        let coeff = match &term.div {
            None => Coefficient::from_poly(num),
            Some(div) => Coefficient::rational(num, poly_from_map(div, n)?)?,
        };
        out = out.add(&Superfunction::term(n, m, set, coeff))?;
    }
    Ok(out)
}

/// Encodes a superfunction. Errors on opaque coefficients, which have no
/// serialized form.
pub fn superfunction_to_doc(f: &Superfunction) -> Result<SuperfunctionDoc> {
    let mut doc = Vec::new();
    for (set, coeff) in f.terms() {
        match coeff {
            Coefficient::Rational { num, den } => {
                let div = if den.as_constant() == Some(1.0) {
                    None
                } else {
                    Some(poly_to_map(den))
                };
                doc.push(TermDoc {
                    odd: set.indices(),
                    poly: poly_to_map(num),
                    div,
                });
            }
            Coefficient::Opaque(_) => {
                return Err(Error::Format(
                    "opaque coefficients cannot be serialized".into(),
                ));
            }
        }
    }
    Ok(doc)
}
