//! Orbit-type stratification: fixed subcomplexes, open strata (simplices with
//! a prescribed exact isotropy), their connected components, and the
//! filtration that orders strata with larger isotropy first.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{GComplex, Subcomplex};
use crate::group::Subgroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StratifyError {
    #[error("the action is not regular; subdivide first")]
    IrregularAction,
    #[error("subgroup {elements:?} is not a realized isotropy subgroup")]
    UnknownIsotropy { elements: Vec<usize> },
    #[error("subcomplex is not invariant under the action")]
    NotInvariant,
    #[error("arguments belong to different parent complexes")]
    ParentMismatch,
}

/// A connected component of one open stratum.
#[derive(Debug, Clone)]
pub struct Component {
    pub id: usize,
    /// The exact isotropy subgroup of every open simplex in the component.
    pub isotropy: Subgroup,
    /// Simplices whose pointwise stabilizer is exactly `isotropy`, connected
    /// under the face/coface relation inside the stratum.
    pub open_simplices: Vec<usize>,
    /// Face closure of the open simplices (a subcomplex of the fixed set).
    pub closure: Subcomplex,
    /// Alternating count of the open simplices.
    pub chi_c: i64,
    pub dim: usize,
}

/// One realized isotropy subgroup together with its stratum.
#[derive(Debug, Clone)]
pub struct StratumData {
    pub subgroup: Subgroup,
    pub class_id: usize,
    /// Simplices with pointwise stabilizer exactly `subgroup`, sorted.
    pub simplices: Vec<usize>,
    pub components: Vec<Component>,
}

/// A conjugacy class of realized isotropy subgroups.
#[derive(Debug, Clone)]
pub struct StratumClass {
    pub id: usize,
    /// Lexicographically least subgroup of the class.
    pub representative: Subgroup,
    pub conjugates: Vec<Subgroup>,
}

/// The full orbit-type stratification of a regular complex.
///
/// Classes are ordered with larger isotropy first, so the filtration pieces
/// (all simplices of class at most i) are face-closed: stabilizers only grow
/// when passing to a face.
#[derive(Debug, Clone)]
pub struct Stratification {
    complex: Arc<GComplex>,
    classes: Vec<StratumClass>,
    strata: Vec<StratumData>,
    by_subgroup: BTreeMap<Vec<usize>, usize>,
    /// For each simplex id, the index into `strata` of its exact stabilizer.
    stratum_of: Vec<usize>,
}

impl Stratification {
    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }

    /// Realized orbit types in processing order.
    pub fn classes(&self) -> &[StratumClass] {
        &self.classes
    }

    pub fn strata(&self) -> &[StratumData] {
        &self.strata
    }

    pub fn stratum(&self, h: &Subgroup) -> Result<&StratumData, StratifyError> {
        self.by_subgroup
            .get(h.elements())
            .map(|&i| &self.strata[i])
            .ok_or_else(|| StratifyError::UnknownIsotropy { elements: h.elements().to_vec() })
    }

    /// Index into `strata()` of the simplex's exact stabilizer.
    pub fn stratum_index_of(&self, simplex_id: usize) -> usize {
        self.stratum_of[simplex_id]
    }

    pub fn isotropy_of(&self, simplex_id: usize) -> &Subgroup {
        &self.strata[self.stratum_of[simplex_id]].subgroup
    }

    /// The filtration piece for each class index: all simplices whose class
    /// is at most i. Each piece is face-closed.
    pub fn filtration(&self) -> Vec<Subcomplex> {
        let mut pieces = Vec::with_capacity(self.classes.len());
        let mut ids: Vec<usize> = Vec::new();
        for class in &self.classes {
            for s in &self.strata {
                if s.class_id == class.id {
                    ids.extend_from_slice(&s.simplices);
                }
            }
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            pieces.push(
                Subcomplex::from_ids(Arc::clone(&self.complex), sorted)
                    .expect("filtration pieces are face-closed"),
            );
        }
        pieces
    }
}

/// The subcomplex of simplices fixed pointwise by every element of `h`.
pub fn fixed_subcomplex(k: &Arc<GComplex>, h: &Subgroup) -> Result<Subcomplex, StratifyError> {
    if !k.is_regular() {
        return Err(StratifyError::IrregularAction);
    }
    let ids: Vec<usize> = (0..k.simplex_count())
        .filter(|&id| {
            let s = k.simplex(id);
            h.elements().iter().all(|&g| s.vertices().iter().all(|&v| k.act_vertex(g, v) == v))
        })
        .collect();
    // Pointwise-fixed sets are face-closed: a face of a fixed simplex is fixed.
    Ok(Subcomplex::from_ids(Arc::clone(k), ids).expect("fixed sets are face-closed"))
}

/// Computes the stratification of a regular complex.
pub fn strata(k: &Arc<GComplex>) -> Result<Stratification, StratifyError> {
    if !k.is_regular() {
        return Err(StratifyError::IrregularAction);
    }
    let n = k.simplex_count();

    // Partition simplices by exact pointwise stabilizer.
    let mut by_subgroup: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut subgroup_of: Vec<Subgroup> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut stratum_of = Vec::with_capacity(n);
    for id in 0..n {
        let stab = k.pointwise_stabilizer_id(id);
        let idx = match by_subgroup.get(stab.elements()) {
            Some(&i) => i,
            None => {
                let i = subgroup_of.len();
                by_subgroup.insert(stab.elements().to_vec(), i);
                subgroup_of.push(stab.clone());
                members.push(Vec::new());
                i
            }
        };
        members[idx].push(id);
        stratum_of.push(idx);
    }

    // Group the realized subgroups into conjugacy classes; the realized set
    // is closed under conjugation because stab(g·σ) = g·stab(σ)·g⁻¹.
    let group = k.group();
    let mut class_of: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut classes: Vec<StratumClass> = Vec::new();
    for h in &subgroup_of {
        if class_of.contains_key(h.elements()) {
            continue;
        }
        let mut conj: Vec<Subgroup> =
            group.elements().map(|g| h.conjugated_by(group, g)).collect();
        conj.sort();
        conj.dedup();
        let id = classes.len();
        for c in &conj {
            class_of.insert(c.elements().to_vec(), id);
        }
        classes.push(StratumClass { id, representative: conj[0].clone(), conjugates: conj });
    }
    classes.sort_by(|a, b| {
        (b.representative.order(), a.representative.elements())
            .cmp(&(a.representative.order(), b.representative.elements()))
    });
    let remap: BTreeMap<usize, usize> =
        classes.iter().enumerate().map(|(new, c)| (c.id, new)).collect();
    for (new, c) in classes.iter_mut().enumerate() {
        c.id = new;
    }

    let strata: Vec<StratumData> = subgroup_of
        .iter()
        .zip(&members)
        .map(|(subgroup, simplices)| {
            let class_id = remap[&class_of[subgroup.elements()]];
            let components = find_components(k, subgroup, simplices);
            StratumData {
                subgroup: subgroup.clone(),
                class_id,
                simplices: simplices.clone(),
                components,
            }
        })
        .collect();

    Ok(Stratification { complex: Arc::clone(k), classes, strata, by_subgroup, stratum_of })
}

/// Components of one stratum under face/coface adjacency within the stratum.
///
/// Only codimension-one steps are needed: if a simplex and a deeper face both
/// have stabilizer exactly H, every intermediate face is sandwiched to H too.
fn find_components(k: &Arc<GComplex>, isotropy: &Subgroup, stratum: &[usize]) -> Vec<Component> {
    let pos: BTreeMap<usize, usize> = stratum.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut dsu: Vec<usize> = (0..stratum.len()).collect();
    fn find(dsu: &mut Vec<usize>, i: usize) -> usize {
        if dsu[i] != i {
            dsu[i] = find(dsu, dsu[i]);
        }
        dsu[i]
    }
    for (i, &id) in stratum.iter().enumerate() {
        for &f in k.facets_of(id) {
            if let Some(&j) = pos.get(&f) {
                let (a, b) = (find(&mut dsu, i), find(&mut dsu, j));
                dsu[a] = b;
            }
        }
    }
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &id) in stratum.iter().enumerate() {
        grouped.entry(find(&mut dsu, i)).or_default().push(id);
    }
    let mut comps: Vec<Vec<usize>> = grouped.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
        .into_iter()
        .enumerate()
        .map(|(id, open_simplices)| {
            let chi_c = open_simplices
                .iter()
                .map(|&s| if k.simplex(s).dim() % 2 == 0 { 1i64 } else { -1i64 })
                .sum();
            let dim = open_simplices.iter().map(|&s| k.simplex(s).dim()).max().unwrap();
            let closure = Subcomplex::closure_of(Arc::clone(k), &open_simplices);
            Component { id, isotropy: isotropy.clone(), open_simplices, closure, chi_c, dim }
        })
        .collect()
}

/// Connected components of the stratum of exact isotropy `h`.
pub fn components<'a>(
    strat: &'a Stratification,
    h: &Subgroup,
) -> Result<&'a [Component], StratifyError> {
    Ok(&strat.stratum(h)?.components)
}

/// Whether the component's closure shares a simplex with the invariant
/// subcomplex `a`.
pub fn closure_meets(c: &Component, a: &Subcomplex) -> Result<bool, StratifyError> {
    if !c.closure.same_parent(a) {
        return Err(StratifyError::ParentMismatch);
    }
    if !a.is_invariant() {
        return Err(StratifyError::NotInvariant);
    }
    Ok(c.closure.intersects(a))
}
