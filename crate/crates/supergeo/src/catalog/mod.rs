//! A verified catalog of symmetric superspaces.
//!
//! Each entry is a quotient `G/K` presented infinitesimally: a Lie
//! superalgebra `g`, an involutive automorphism `σ`, the eigensplit
//! `g = k ⊕ p`, and an invariant scalar superproduct on `p`. The
//! [`verify_example`] pipeline re-derives every claimed property numerically
//! — involution validity, bracket inclusions, identification of `k`,
//! non-degeneracy and invariance of the form, and the explicit sign
//! identities that make the even metric definite where claimed.
//!
//! The catalog also carries one deliberate *non-example* (`r12-group`): a
//! nilpotent supergroup whose Lie algebra admits invariant forms under the
//! reduced group but provably none under the full superalgebra, so it cannot
//! carry a bi-invariant metric. Its "verification" confirms the obstruction.

mod spaces;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters selecting a member of a catalog family. Families read the
/// fields they need and reject requests with missing ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
}

impl Params {
    /// Parses a comma-separated `key=value` list, e.g. `"n=3,m=1"`.
    pub fn parse(text: &str) -> Result<Params> {
        let mut params = Params::default();
        for piece in text.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let (key, value) = piece.split_once('=').ok_or_else(|| {
                Error::InvalidParams(format!("expected key=value, got `{piece}`"))
            })?;
            fn bad<E>(piece: &str) -> impl Fn(E) -> Error + '_ {
                move |_| Error::InvalidParams(format!("cannot parse `{piece}`"))
            }
            match key.trim() {
                "n" => params.n = Some(value.trim().parse().map_err(bad(piece))?),
                "m" => params.m = Some(value.trim().parse().map_err(bad(piece))?),
                "n1" => params.n1 = Some(value.trim().parse().map_err(bad(piece))?),
                "n2" => params.n2 = Some(value.trim().parse().map_err(bad(piece))?),
                "m1" => params.m1 = Some(value.trim().parse().map_err(bad(piece))?),
                "m2" => params.m2 = Some(value.trim().parse().map_err(bad(piece))?),
                "s1" => params.s1 = Some(value.trim().parse().map_err(bad(piece))?),
                "s2" => params.s2 = Some(value.trim().parse().map_err(bad(piece))?),
                other => {
                    return Err(Error::InvalidParams(format!("unknown parameter `{other}`")))
                }
            }
        }
        Ok(params)
    }

    /// Renders the set fields back as a `key=value` list.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (key, value) in [
            ("n", self.n),
            ("m", self.m),
            ("n1", self.n1),
            ("n2", self.n2),
            ("m1", self.m1),
            ("m2", self.m2),
        ] {
            if let Some(v) = value {
                parts.push(format!("{key}={v}"));
            }
        }
        for (key, value) in [("s1", self.s1), ("s2", self.s2)] {
            if let Some(v) = value {
                parts.push(format!("{key}={v}"));
            }
        }
        parts.join(",")
    }

    pub(crate) fn need(&self, key: &str) -> Result<usize> {
        let value = match key {
            "n" => self.n,
            "m" => self.m,
            "n1" => self.n1,
            "n2" => self.n2,
            "m1" => self.m1,
            "m2" => self.m2,
            _ => None,
        };
        value.ok_or_else(|| Error::InvalidParams(format!("missing parameter `{key}`")))
    }
}

/// One step of a verification pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub passed: bool,
    /// Largest numerical defect the stage measured, when it measures one.
    pub residual: Option<f64>,
    pub detail: String,
}

/// Full verification record for one `(family, params)` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub params: String,
    /// Name of the constructed algebra, e.g. `sl(3|2)`.
    pub algebra: String,
    pub stages: Vec<StageReport>,
    /// Whether the registry predicts this parameter point to be degenerate
    /// (the form on `p` acquires a radical, so no invariant metric exists).
    pub expected_degenerate: bool,
    /// Whether the predicted radical was found and identified.
    pub degeneracy_confirmed: bool,
    /// All stages passed.
    pub passed: bool,
}

impl FamilyReport {
    /// Whether the run matched the registry's prediction: ordinary members
    /// must pass, predicted-degenerate ones must fail with the radical
    /// identified.
    pub fn as_expected(&self) -> bool {
        if self.expected_degenerate {
            !self.passed && self.degeneracy_confirmed
        } else {
            self.passed
        }
    }

    pub fn stage(&self, name: &str) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.name == name)
    }
}

/// A catalog entry: the family's name, its quotient shape, the parameter
/// schema, and the hooks that verify a member and enumerate the default
/// parameter grid.
#[derive(Clone)]
pub struct SymmetricSpaceSpec {
    pub name: &'static str,
    /// Quotient presentation, e.g. `"SL(n|2m)/SOSp(n|2m)"`.
    pub quotient: &'static str,
    /// Human-readable parameter schema.
    pub schema: &'static str,
    pub notes: &'static str,
    verify: fn(&Params) -> Result<FamilyReport>,
    grid: fn() -> Vec<Params>,
}

impl std::fmt::Debug for SymmetricSpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricSpaceSpec")
            .field("name", &self.name)
            .field("quotient", &self.quotient)
            .field("schema", &self.schema)
            .finish()
    }
}

/// The registered families, non-example last.
pub fn list_examples() -> Vec<SymmetricSpaceSpec> {
    vec![
        SymmetricSpaceSpec {
            name: "sl-sosp",
            quotient: "SL(n|2m)/SOSp(n|2m)",
            schema: "n >= 1, m >= 1; degenerate when n = 2m",
            notes: "supertrace form on p; Killing form is a nonzero multiple when n != 2m",
            verify: spaces::verify_sl_sosp,
            grid: spaces::grid_sl_sosp,
        },
        SymmetricSpaceSpec {
            name: "psl-sosp",
            quotient: "PSL(2m|2m)/SOSp(2m|2m)",
            schema: "m >= 1",
            notes: "quotient by the center repairs the n = 2m degeneracy; Killing form vanishes",
            verify: spaces::verify_psl_sosp,
            grid: spaces::grid_psl_sosp,
        },
        SymmetricSpaceSpec {
            name: "sl-s2gl",
            quotient: "SL(n1+n2|m1+m2)/S(GL(n1|m1)xGL(n2|m2))",
            schema: "n1, n2, m1, m2 >= 1",
            notes: "block-diagonal fixed algebra; supertrace form on the off-diagonal p",
            verify: spaces::verify_sl_s2gl,
            grid: spaces::grid_sl_s2gl,
        },
        SymmetricSpaceSpec {
            name: "sosp-u",
            quotient: "SOSp(2n|2m)/U(n|m)",
            schema: "n >= 1, m >= 1",
            notes: "negative supertrace form on p; even part negative definite before the flip",
            verify: spaces::verify_sosp_u,
            grid: spaces::grid_sosp_u,
        },
        SymmetricSpaceSpec {
            name: "sosp-s2osp",
            quotient: "SOSp(n1+n2|2m1+2m2)/S(OSp(n1|2m1)xOSp(n2|2m2))",
            schema: "n1, n2, m1, m2 >= 1",
            notes: "sign-pattern involution; supertrace form on p",
            verify: spaces::verify_sosp_s2osp,
            grid: spaces::grid_sosp_s2osp,
        },
        SymmetricSpaceSpec {
            name: "d21-so2-sosp22",
            quotient: "D(2,1;a)/SO(2)xSOSp(2|2)",
            schema: "s1, s2 real, s1, s2, s1+s2 != 0",
            notes: "form extended uniquely from the triple symplectic pairing on the odd part",
            verify: spaces::verify_d21,
            grid: spaces::grid_d21,
        },
        SymmetricSpaceSpec {
            name: "r12-group",
            quotient: "R^(1|2) (non-example)",
            schema: "no parameters",
            notes: "admits reduced-group-invariant forms but no fully invariant scalar superproduct",
            verify: spaces::verify_r12_group,
            grid: spaces::grid_r12_group,
        },
    ]
}

fn find_example(name: &str) -> Result<SymmetricSpaceSpec> {
    list_examples()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            let known: Vec<&str> = list_examples().iter().map(|e| e.name).collect();
            Error::UnknownExample(format!("{name} (known: {})", known.join(", ")))
        })
}

/// The desk-scale parameter grid a family is verified on by default.
pub fn default_grid(name: &str) -> Result<Vec<Params>> {
    Ok((find_example(name)?.grid)())
}

/// Runs the verification pipeline for one member of a family.
pub fn verify_example(name: &str, params: &Params) -> Result<FamilyReport> {
    (find_example(name)?.verify)(params)
}

/// Verifies every grid member of one family.
pub fn verify_grid(name: &str) -> Result<Vec<FamilyReport>> {
    let spec = find_example(name)?;
    (spec.grid)()
        .iter()
        .map(|params| (spec.verify)(params))
        .collect()
}

/// Verifies the full catalog (all families, all default grid points),
/// running members concurrently. Reports come back in registry order.
pub fn verify_all() -> Result<Vec<FamilyReport>> {
    let cases: Vec<(SymmetricSpaceSpec, Params)> = list_examples()
        .into_iter()
        .flat_map(|spec| {
            (spec.grid)()
                .into_iter()
                .map(move |p| (spec.clone(), p))
                .collect::<Vec<_>>()
        })
        .collect();
    let results: Vec<Result<FamilyReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .iter()
            .map(|(spec, params)| scope.spawn(move || (spec.verify)(params)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}
