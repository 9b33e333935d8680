//! JSON serialization of Lie superalgebras: structure constants, parities,
//! labels, and the optional matrix realization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::Parity;

use super::{LieSuperalgebra, Realization, ReducedGroupInfo, SparseMat};

/// On-disk form of an algebra. Parities are `0`/`1`, structure constants are
/// `[i, j, k, value]` rows, and realization matrices are sparse
/// `[row, col, value]` entry lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub name: String,
    pub labels: Vec<String>,
    pub parities: Vec<u8>,
    pub constants: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_group: Option<GroupDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationDoc {
    pub even_block: usize,
    pub odd_block: usize,
    pub faithful: bool,
    pub matrices: Vec<Vec<(usize, usize, f64)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDoc {
    pub name: String,
    pub dim: usize,
}

pub fn algebra_to_json(g: &LieSuperalgebra) -> AlgebraDoc {
    AlgebraDoc {
        name: g.name().to_string(),
        labels: g.labels().to_vec(),
        parities: g.parities().iter().map(|p| p.as_u8()).collect(),
        constants: g.structure_triples(),
        realization: g.realization().map(|r| RealizationDoc {
            even_block: r.even_block,
            odd_block: r.odd_block,
            faithful: r.faithful,
            matrices: r.matrices.iter().map(|m| m.entries.clone()).collect(),
        }),
        reduced_group: g.reduced_group().map(|info| GroupDoc {
            name: info.name.clone(),
            dim: info.dim,
        }),
    }
}

pub fn algebra_from_json(doc: &AlgebraDoc) -> Result<LieSuperalgebra> {
    if let Some(&bad) = doc.parities.iter().find(|&&p| p > 1) {
        return Err(Error::Format(format!(
            "parity must be 0 or 1, found {bad}"
        )));
    }
    let parities: Vec<Parity> = doc.parities.iter().map(|&p| Parity::from_u8(p)).collect();
    let mut g = LieSuperalgebra::from_structure_constants(
        doc.name.clone(),
        doc.labels.clone(),
        parities,
        &doc.constants,
    )?;
    if let Some(r) = &doc.realization {
        let size = r.even_block + r.odd_block;
        if r.matrices.len() != g.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} realization matrices for dimension {}",
                r.matrices.len(),
                g.dim()
            )));
        }
        let mats = r
            .matrices
            .iter()
            .map(|entries| SparseMat::from_entries(size, entries))
            .collect();
        g.set_realization(Realization::new(r.even_block, r.odd_block, mats, r.faithful)?);
    }
    if let Some(info) = &doc.reduced_group {
        g.set_reduced_group(ReducedGroupInfo {
            name: info.name.clone(),
            dim: info.dim,
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::super::families;
    use super::*;

    #[test]
    fn algebra_roundtrips_through_json() {
        let g = families::osp(2, 1).unwrap();
        let doc = algebra_to_json(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: AlgebraDoc = serde_json::from_str(&text).unwrap();
        let h = algebra_from_json(&back).unwrap();
        assert_eq!(g.name(), h.name());
        assert_eq!(g.labels(), h.labels());
        assert_eq!(g.parities(), h.parities());
        assert_eq!(g.structure_triples(), h.structure_triples());
        let hr = h.realization().unwrap();
        assert_eq!(hr.even_block, 2);
        assert_eq!(hr.odd_block, 2);
        assert_eq!(h.reduced_group().unwrap().name, "SO(2)xSp(2)");
    }

    #[test]
    fn bad_parity_byte_is_rejected() {
        let doc = AlgebraDoc {
            name: "bad".into(),
            labels: vec!["x".into()],
            parities: vec![7],
            constants: vec![],
            realization: None,
            reduced_group: None,
        };
        assert!(algebra_from_json(&doc).is_err());
    }
}
