//! JSON schemas for complexes and displacement maps, plus canonical
//! serialization and digests.
//!
//! Canonical form means sorted object keys and no floating-point values, so
//! identical inputs always serialize to identical bytes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::complex::{build_complex, ComplexError, GComplex, Simplex, Subcomplex};
use crate::displacement::DisplacementMap;
use crate::group::{build_group, GroupError};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("json parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// The on-disk form of a complex with its action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub vertices: Vec<String>,
    pub maximal_simplices: Vec<Vec<usize>>,
    pub group: GroupSpec,
    /// Element index (as a string key) to vertex permutation.
    pub action: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_set: Option<Vec<Vec<usize>>>,
}

/// The on-disk form of a displacement map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisplacementSpec {
    /// Digest of the complex the map was built on.
    pub complex_digest: String,
    /// Pairs (simplex vertex set, image vertex set), sorted.
    pub assignment: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Builds the complex (and the optional fixed set) described by a spec.
pub fn complex_from_spec(
    spec: &ComplexSpec,
) -> Result<(Arc<GComplex>, Option<Subcomplex>), JsonError> {
    if spec.group.table.len() != spec.group.order {
        return Err(JsonError::Schema(format!(
            "group.order is {} but the table has {} rows",
            spec.group.order,
            spec.group.table.len()
        )));
    }
    let group = build_group(spec.group.table.clone(), spec.group.names.clone())?;
    let mut action = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let row = spec
            .action
            .get(&g.to_string())
            .ok_or_else(|| JsonError::Schema(format!("action missing element {g}")))?;
        action.push(row.clone());
    }
    let k = build_complex(spec.vertices.clone(), &spec.maximal_simplices, group, action)?;
    let fixed = match &spec.fixed_set {
        None => None,
        Some(sets) => {
            let mut ids = Vec::new();
            for raw in sets {
                let s = Simplex::new(raw.clone())?;
                let id = k.id_of(&s).ok_or_else(|| {
                    JsonError::Schema(format!("fixed_set simplex {raw:?} is not in the complex"))
                })?;
                ids.push(id);
            }
            Some(Subcomplex::closure_of(Arc::clone(&k), &ids))
        }
    };
    Ok((k, fixed))
}

/// Serializes a complex back to the input schema; maximal simplices and the
/// full action table are reconstructed from the validated value.
pub fn complex_to_spec(k: &GComplex, fixed: Option<&Subcomplex>) -> ComplexSpec {
    let maximal_simplices = k
        .maximal_simplices()
        .into_iter()
        .map(|id| k.simplex(id).vertices().to_vec())
        .collect();
    let action: BTreeMap<String, Vec<usize>> = k
        .group()
        .elements()
        .map(|g| (g.to_string(), k.vertex_action(g).to_vec()))
        .collect();
    ComplexSpec {
        vertices: k.vertex_names().to_vec(),
        maximal_simplices,
        group: GroupSpec {
            order: k.group().order(),
            table: k.group().table().to_vec(),
            names: Some(k.group().names().to_vec()),
        },
        action,
        fixed_set: fixed.map(|f| {
            f.ids().iter().map(|&id| k.simplex(id).vertices().to_vec()).collect()
        }),
    }
}

pub fn displacement_to_spec(f: &DisplacementMap) -> DisplacementSpec {
    let k = f.complex();
    let assignment = (0..k.simplex_count())
        .map(|id| {
            (k.simplex(id).vertices().to_vec(), k.simplex(f.image(id)).vertices().to_vec())
        })
        .collect();
    DisplacementSpec { complex_digest: complex_digest(k), assignment }
}

/// Rebuilds a displacement map over `k`, requiring a total assignment.
pub fn displacement_from_spec(
    k: &Arc<GComplex>,
    spec: &DisplacementSpec,
) -> Result<DisplacementMap, JsonError> {
    if spec.complex_digest != complex_digest(k) {
        return Err(JsonError::Schema(
            "map file digest does not match the input complex".to_string(),
        ));
    }
    let mut assignment: Vec<Option<usize>> = vec![None; k.simplex_count()];
    for (from, to) in &spec.assignment {
        let fid = k
            .id_of(&Simplex::new(from.clone())?)
            .ok_or_else(|| JsonError::Schema(format!("simplex {from:?} not in the complex")))?;
        let tid = k
            .id_of(&Simplex::new(to.clone())?)
            .ok_or_else(|| JsonError::Schema(format!("simplex {to:?} not in the complex")))?;
        if assignment[fid].replace(tid).is_some() {
            return Err(JsonError::Schema(format!("simplex {from:?} assigned twice")));
        }
    }
    let total: Option<Vec<usize>> = assignment.into_iter().collect();
    let total = total.ok_or_else(|| {
        JsonError::Schema("assignment does not cover every simplex".to_string())
    })?;
    Ok(DisplacementMap::from_assignment(Arc::clone(k), total))
}

/// Canonical pretty JSON: object keys sorted (serde_json's default map is
/// ordered), integers only.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&v).expect("serializable")
}

/// Hex SHA-256 of the canonical serialization of the complex (without any
/// fixed set), identifying the complex plus its action.
pub fn complex_digest(k: &GComplex) -> String {
    let spec = complex_to_spec(k, None);
    let bytes = canonical_json(&spec);
    let mut hasher = Sha256::new();
    hasher.update(bytes.as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
