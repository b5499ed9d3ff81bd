//! Simplicial complexes carrying a validated simplicial action of a finite
//! group, with equivariant barycentric subdivision and stabilizer queries.
//!
//! The standing hypothesis everywhere downstream is *regularity*: whenever a
//! group element maps a simplex to itself setwise it fixes the simplex
//! pointwise. Regularity makes every fixed set a subcomplex and lets the
//! pointwise stabilizer of a simplex stand in for the isotropy of its
//! interior points. One barycentric subdivision always regularizes a
//! simplicial action, since a setwise-fixed chain of simplices is fixed
//! element by element (the dimensions in a chain are strictly increasing).

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::group::{FiniteGroup, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex {simplex:?} contains a duplicate vertex")]
    DuplicateVertexInSimplex { simplex: Vec<usize> },
    #[error("simplex {simplex:?} references vertex {vertex} outside 0..{vertices}")]
    VertexOutOfRange { simplex: Vec<usize>, vertex: usize, vertices: usize },
    #[error("complex has no simplices")]
    EmptyComplex,
    #[error("action of element {element} is not a vertex permutation: {reason}")]
    MalformedAction { element: usize, reason: String },
    #[error("element {element} maps simplex {simplex:?} outside the complex")]
    NotSimplicial { element: usize, simplex: Vec<usize> },
    #[error("action is not a homomorphism: fails on elements ({a}, {b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("simplex {simplex:?} is not in the complex")]
    SimplexNotInComplex { simplex: Vec<usize> },
    #[error("action is still irregular after two barycentric subdivisions")]
    RegularizationFailed,
}

/// A simplex as a sorted set of vertex indices.
///
/// Ordered by dimension first, then lexicographically — the order in which
/// simplices are stored and numbered inside a [`GComplex`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Simplex, ComplexError> {
        let raw = vertices.clone();
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(ComplexError::DuplicateVertexInSimplex { simplex: raw });
            }
        }
        if vertices.is_empty() {
            return Err(ComplexError::EmptyComplex);
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }

    /// Codimension-one faces; empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }

    /// All nonempty subsets, including the simplex itself.
    pub fn subsimplices(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1..(1usize << n))
            .map(|mask| {
                Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect())
            })
            .collect()
    }

    fn apply(&self, perm: &[usize]) -> Simplex {
        let mut v: Vec<usize> = self.0.iter().map(|&x| perm[x]).collect();
        v.sort_unstable();
        Simplex(v)
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.len(), &self.0).cmp(&(other.0.len(), &other.0))
    }
}

/// A simplicial complex with a validated simplicial action of a finite group.
///
/// Simplices are face-closed, stored sorted by (dimension, vertex set) and
/// addressed by their index in that order. The action is stored both as
/// vertex permutations and as the induced simplex permutations.
#[derive(Debug, Clone)]
pub struct GComplex {
    vertex_names: Vec<String>,
    simplices: Vec<Simplex>,
    dim_start: Vec<usize>,
    index: HashMap<Simplex, usize>,
    facets: Vec<Vec<usize>>,
    cofacets: Vec<Vec<usize>>,
    group: FiniteGroup,
    vertex_action: Vec<Vec<usize>>,
    simplex_action: Vec<Vec<usize>>,
    regular: bool,
}

impl GComplex {
    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, id: usize) -> &Simplex {
        &self.simplices[id]
    }

    pub fn id_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn dim(&self) -> usize {
        self.dim_start.len() - 2
    }

    /// Number of d-simplices for each d.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        self.dim_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Alternating cell count Σ (−1)^d · f_d.
    pub fn chi(&self) -> i64 {
        self.counts_by_dim()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Codimension-one faces of simplex `id`.
    pub fn facets_of(&self, id: usize) -> &[usize] {
        &self.facets[id]
    }

    /// Codimension-one cofaces of simplex `id`.
    pub fn cofacets_of(&self, id: usize) -> &[usize] {
        &self.cofacets[id]
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn act_vertex(&self, g: usize, v: usize) -> usize {
        self.vertex_action[g][v]
    }

    pub fn vertex_action(&self, g: usize) -> &[usize] {
        &self.vertex_action[g]
    }

    pub fn act_simplex(&self, g: usize, id: usize) -> usize {
        self.simplex_action[g][id]
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// Ids of simplices that are not a face of any larger simplex.
    pub fn maximal_simplices(&self) -> Vec<usize> {
        (0..self.simplex_count()).filter(|&id| self.cofacets[id].is_empty()).collect()
    }

    /// Elements fixing every vertex of the simplex.
    pub fn pointwise_stabilizer(&self, s: &Simplex) -> Result<Subgroup, ComplexError> {
        let id = self
            .id_of(s)
            .ok_or_else(|| ComplexError::SimplexNotInComplex { simplex: s.vertices().to_vec() })?;
        Ok(self.pointwise_stabilizer_id(id))
    }

    /// Elements mapping the simplex to itself as a set.
    pub fn setwise_stabilizer(&self, s: &Simplex) -> Result<Subgroup, ComplexError> {
        let id = self
            .id_of(s)
            .ok_or_else(|| ComplexError::SimplexNotInComplex { simplex: s.vertices().to_vec() })?;
        Ok(self.setwise_stabilizer_id(id))
    }

    pub fn pointwise_stabilizer_id(&self, id: usize) -> Subgroup {
        let s = &self.simplices[id];
        let elements: Vec<usize> = self
            .group
            .elements()
            .filter(|&g| s.vertices().iter().all(|&v| self.vertex_action[g][v] == v))
            .collect();
        Subgroup::new(&self.group, elements).expect("stabilizers are subgroups")
    }

    pub fn setwise_stabilizer_id(&self, id: usize) -> Subgroup {
        let elements: Vec<usize> = self
            .group
            .elements()
            .filter(|&g| self.simplex_action[g][id] == id)
            .collect();
        Subgroup::new(&self.group, elements).expect("stabilizers are subgroups")
    }

    /// All chains σ₀ ⊂ σ₁ ⊂ … ⊂ σ_k of simplices, as ascending id lists.
    /// These are exactly the simplices of the barycentric subdivision.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let n = self.simplex_count();
        // chains_at[s] = all chains whose top element is s; faces come first
        // in id order, so everything a chain needs is already computed.
        let mut chains_at: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
        for id in 0..n {
            let mut cs = vec![vec![id]];
            for sub in self.simplices[id].subsimplices() {
                if let Some(fid) = self.id_of(&sub) {
                    if fid == id {
                        continue;
                    }
                    for c in &chains_at[fid] {
                        let mut ext = c.clone();
                        ext.push(id);
                        cs.push(ext);
                    }
                }
            }
            chains_at.push(cs);
        }
        let mut all: Vec<Vec<usize>> = chains_at.into_iter().flatten().collect();
        all.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        all
    }

    /// Structural equality ignoring caches: same simplices, group, action.
    pub fn same_structure(&self, other: &GComplex) -> bool {
        self.simplices == other.simplices
            && self.group == other.group
            && self.vertex_action == other.vertex_action
    }

    /// Heuristic sanity checks for "is this a closed manifold": warnings
    /// only, since manifold recognition is not attempted.
    pub fn manifold_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let d = self.dim();
        let maximal = self.maximal_simplices();
        if maximal.iter().any(|&id| self.simplices[id].dim() != d) {
            warnings.push(format!("not pure: some maximal simplex has dimension below {d}"));
        }
        if d >= 1 {
            let ridge_range = self.dim_start[d - 1]..self.dim_start[d];
            if ridge_range.clone().any(|id| self.cofacets[id].len() != 2) {
                warnings.push(format!(
                    "not a closed pseudomanifold: some {}-simplex is not in exactly two {}-simplices",
                    d - 1,
                    d
                ));
            }
        }
        // Links of vertices in a closed manifold of dimension >= 2 are
        // connected; in dimension 1 they are two points, so skip.
        if d >= 2 {
            for v in 0..self.vertex_count() {
                if let Some(msg) = self.disconnected_link(v) {
                    warnings.push(msg);
                    break;
                }
            }
        }
        warnings
    }

    // Returns a warning if the link of vertex v is nonempty and disconnected.
    fn disconnected_link(&self, v: usize) -> Option<String> {
        let link: Vec<usize> = (0..self.simplex_count())
            .filter(|&id| {
                let s = &self.simplices[id];
                !s.vertices().contains(&v) && {
                    let mut joined = s.vertices().to_vec();
                    joined.push(v);
                    joined.sort_unstable();
                    self.index.contains_key(&Simplex(joined))
                }
            })
            .collect();
        if link.len() <= 1 {
            return None;
        }
        let pos: HashMap<usize, usize> = link.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut dsu: Vec<usize> = (0..link.len()).collect();
        fn find(dsu: &mut Vec<usize>, i: usize) -> usize {
            if dsu[i] != i {
                dsu[i] = find(dsu, dsu[i]);
            }
            dsu[i]
        }
        for (i, &id) in link.iter().enumerate() {
            for &f in &self.facets[id] {
                if let Some(&j) = pos.get(&f) {
                    let (a, b) = (find(&mut dsu, i), find(&mut dsu, j));
                    dsu[a] = b;
                }
            }
        }
        let roots: BTreeSet<usize> = (0..link.len()).map(|i| find(&mut dsu, i)).collect();
        (roots.len() > 1).then(|| format!("link of vertex {v} is disconnected"))
    }
}

/// Builds and fully validates a `GComplex` from maximal simplices and a
/// per-element vertex action.
///
/// The action must be supplied for every group element; supplying it
/// redundantly (rather than on generators) lets the homomorphism check catch
/// input mistakes.
pub fn build_complex(
    vertex_names: Vec<String>,
    maximal_simplices: &[Vec<usize>],
    group: FiniteGroup,
    vertex_action: Vec<Vec<usize>>,
) -> Result<Arc<GComplex>, ComplexError> {
    let v = vertex_names.len();
    if v == 0 || maximal_simplices.is_empty() {
        return Err(ComplexError::EmptyComplex);
    }

    let mut set: BTreeSet<Simplex> = BTreeSet::new();
    for raw in maximal_simplices {
        let top = Simplex::new(raw.clone())?;
        if let Some(&bad) = top.vertices().iter().find(|&&x| x >= v) {
            return Err(ComplexError::VertexOutOfRange {
                simplex: raw.clone(),
                vertex: bad,
                vertices: v,
            });
        }
        for sub in top.subsimplices() {
            set.insert(sub);
        }
    }
    let simplices: Vec<Simplex> = set.into_iter().collect();
    let index: HashMap<Simplex, usize> =
        simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    let top_dim = simplices.last().map(|s| s.dim()).unwrap_or(0);
    let mut dim_start = vec![0usize; top_dim + 2];
    for s in &simplices {
        dim_start[s.dim() + 1] += 1;
    }
    for d in 0..=top_dim {
        dim_start[d + 1] += dim_start[d];
    }

    let mut facets = vec![Vec::new(); simplices.len()];
    let mut cofacets = vec![Vec::new(); simplices.len()];
    for (id, s) in simplices.iter().enumerate() {
        for f in s.facets() {
            let fid = index[&f];
            facets[id].push(fid);
            cofacets[fid].push(id);
        }
        facets[id].sort_unstable();
    }
    for c in &mut cofacets {
        c.sort_unstable();
    }

    // Action rows must be vertex permutations.
    if vertex_action.len() != group.order() {
        return Err(ComplexError::MalformedAction {
            element: vertex_action.len().min(group.order()),
            reason: format!("expected {} permutations, got {}", group.order(), vertex_action.len()),
        });
    }
    for (g, perm) in vertex_action.iter().enumerate() {
        if perm.len() != v {
            return Err(ComplexError::MalformedAction {
                element: g,
                reason: format!("permutation length {} but {} vertices", perm.len(), v),
            });
        }
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..v).collect::<Vec<_>>() {
            return Err(ComplexError::MalformedAction {
                element: g,
                reason: "not a bijection on vertices".to_string(),
            });
        }
    }

    // Homomorphism: identity acts as identity, composition matches the table.
    let e = group.identity();
    if vertex_action[e] != (0..v).collect::<Vec<_>>() {
        return Err(ComplexError::NotHomomorphism { a: e, b: e });
    }
    for a in group.elements() {
        for b in group.elements() {
            let ab = group.mul(a, b);
            if (0..v).any(|x| vertex_action[a][vertex_action[b][x]] != vertex_action[ab][x]) {
                return Err(ComplexError::NotHomomorphism { a, b });
            }
        }
    }

    // Simpliciality: each element permutes the simplex list.
    let mut simplex_action = Vec::with_capacity(group.order());
    for g in group.elements() {
        let mut row = Vec::with_capacity(simplices.len());
        for s in &simplices {
            let image = s.apply(&vertex_action[g]);
            match index.get(&image) {
                Some(&id) => row.push(id),
                None => {
                    return Err(ComplexError::NotSimplicial {
                        element: g,
                        simplex: s.vertices().to_vec(),
                    })
                }
            }
        }
        simplex_action.push(row);
    }

    // Regularity: setwise-fixed implies pointwise-fixed.
    let mut regular = true;
    'outer: for g in group.elements() {
        for (id, s) in simplices.iter().enumerate() {
            if simplex_action[g][id] == id
                && s.vertices().iter().any(|&x| vertex_action[g][x] != x)
            {
                regular = false;
                break 'outer;
            }
        }
    }

    Ok(Arc::new(GComplex {
        vertex_names,
        simplices,
        dim_start,
        index,
        facets,
        cofacets,
        group,
        vertex_action,
        simplex_action,
        regular,
    }))
}

/// The barycentric subdivision with its induced action.
///
/// Vertices of the result are the simplices of the input; simplices of the
/// result are the chains σ₀ ⊂ … ⊂ σ_k. The induced action permutes chains
/// via the simplex action, so subdivision commutes with the action by
/// construction, and the alternating cell count is unchanged.
pub fn barycentric_subdivision(k: &GComplex) -> Arc<GComplex> {
    let names: Vec<String> = k
        .simplices()
        .iter()
        .map(|s| {
            let parts: Vec<&str> =
                s.vertices().iter().map(|&x| k.vertex_names[x].as_str()).collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    let chains = k.chains();
    let action: Vec<Vec<usize>> = k.simplex_action.clone();
    build_complex(names, &chains, k.group.clone(), action)
        .expect("subdivision of a valid complex is valid")
}

/// Returns the complex unchanged if its action is already regular, otherwise
/// barycentrically subdivides (at most twice) until it is.
pub fn ensure_regular(k: &Arc<GComplex>) -> Result<Arc<GComplex>, ComplexError> {
    let mut current = Arc::clone(k);
    for _ in 0..2 {
        if current.regular {
            return Ok(current);
        }
        current = barycentric_subdivision(&current);
    }
    if current.regular {
        Ok(current)
    } else {
        Err(ComplexError::RegularizationFailed)
    }
}

/// A face-closed set of simplices of a parent complex.
#[derive(Debug, Clone)]
pub struct Subcomplex {
    complex: Arc<GComplex>,
    ids: Vec<usize>,
}

impl Subcomplex {
    /// Face closure of the given simplices.
    pub fn closure_of(complex: Arc<GComplex>, seed: &[usize]) -> Subcomplex {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        for &id in seed {
            for sub in complex.simplices[id].subsimplices() {
                set.insert(complex.index[&sub]);
            }
        }
        Subcomplex { complex, ids: set.into_iter().collect() }
    }

    /// Wraps an id set that must already be face-closed.
    pub fn from_ids(complex: Arc<GComplex>, mut ids: Vec<usize>) -> Result<Subcomplex, ComplexError> {
        ids.sort_unstable();
        ids.dedup();
        for &id in &ids {
            for &f in complex.facets_of(id) {
                if ids.binary_search(&f).is_err() {
                    return Err(ComplexError::SimplexNotInComplex {
                        simplex: complex.simplices[f].vertices().to_vec(),
                    });
                }
            }
        }
        Ok(Subcomplex { complex, ids })
    }

    pub fn empty(complex: Arc<GComplex>) -> Subcomplex {
        Subcomplex { complex, ids: Vec::new() }
    }

    pub fn full(complex: Arc<GComplex>) -> Subcomplex {
        let ids = (0..complex.simplex_count()).collect();
        Subcomplex { complex, ids }
    }

    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// Maximum simplex dimension, or None when empty.
    pub fn dim(&self) -> Option<usize> {
        self.ids.last().map(|&id| self.complex.simplices[id].dim())
    }

    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.dim().map_or(0, |d| d + 1)];
        for &id in &self.ids {
            counts[self.complex.simplices[id].dim()] += 1;
        }
        counts
    }

    /// True when every group element maps the subcomplex onto itself.
    pub fn is_invariant(&self) -> bool {
        self.complex.group.elements().all(|g| {
            self.ids.iter().all(|&id| self.contains(self.complex.act_simplex(g, id)))
        })
    }

    pub fn intersects(&self, other: &Subcomplex) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.ids.iter().any(|&id| large.contains(id))
    }

    pub fn same_parent(&self, other: &Subcomplex) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex)
            || self.complex.same_structure(&other.complex)
    }
}
