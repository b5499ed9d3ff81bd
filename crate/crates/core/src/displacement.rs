//! Barycentric displacement maps: an assignment of a simplex to each simplex,
//! read as a vertex map of the barycentric subdivision. A simplex the map
//! holds fixed is a singularity; the verifier certifies where the induced
//! self-map can have no fixed point at all.
//!
//! The constructor is best-effort outside the prescribed fixed set, with
//! strategies applied per orbit of connected components (a chain never
//! crosses components, so validity composes):
//!   s1 — a central group element moving every cell of the component orbit;
//!   s2 — a rotation of circle components commuting with the action;
//!   s3 — a bounded search for a commuting automorphism moving every cell;
//!   s4 — give up and leave the remaining cells singular.
//! Each strategy yields an automorphism of its component orbit with no
//! setwise-fixed simplex, so chains map to chains and — because dimensions in
//! a chain are strictly increasing — no chain can even intersect its image.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{GComplex, Subcomplex};
use crate::stratify::strata;

const AUTOMORPHISM_SEARCH_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DisplacementError {
    #[error("the action is not regular; subdivide first")]
    IrregularAction,
    #[error("the prescribed fixed set is not invariant under the action")]
    NotInvariant,
    #[error("arguments belong to different parent complexes")]
    ParentMismatch,
}

/// How each simplex's image was chosen; kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// In the prescribed fixed set.
    Prescribed,
    /// Moved by a central group element.
    CentralElement(usize),
    /// Moved by a rotation of a circle component.
    CircleRotation,
    /// Moved by a searched commuting automorphism.
    Automorphism,
    /// Left fixed: a singularity.
    Singular,
}

/// A total simplex-to-simplex assignment on a complex.
#[derive(Debug, Clone)]
pub struct DisplacementMap {
    complex: Arc<GComplex>,
    assignment: Vec<usize>,
    strategies: Vec<Strategy>,
}

impl DisplacementMap {
    /// Wraps a raw assignment (used when loading from a file); the verifier
    /// is the judge of its properties, but totality is required up front.
    pub fn from_assignment(complex: Arc<GComplex>, assignment: Vec<usize>) -> DisplacementMap {
        assert_eq!(assignment.len(), complex.simplex_count(), "assignment must be total");
        let strategies = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| if i == j { Strategy::Singular } else { Strategy::Automorphism })
            .collect();
        DisplacementMap { complex, assignment, strategies }
    }

    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }

    pub fn image(&self, id: usize) -> usize {
        self.assignment[id]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn strategy(&self, id: usize) -> Strategy {
        self.strategies[id]
    }

    /// Simplices held fixed, sorted.
    pub fn singular(&self) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i == j)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Connected components of the complex as sorted cell-id lists.
fn connected_components(k: &GComplex) -> Vec<Vec<usize>> {
    let n = k.simplex_count();
    let mut dsu: Vec<usize> = (0..n).collect();
    fn find(dsu: &mut Vec<usize>, i: usize) -> usize {
        if dsu[i] != i {
            dsu[i] = find(dsu, dsu[i]);
        }
        dsu[i]
    }
    for id in 0..n {
        for &f in k.facets_of(id) {
            let (a, b) = (find(&mut dsu, id), find(&mut dsu, f));
            dsu[a] = b;
        }
    }
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for id in 0..n {
        grouped.entry(find(&mut dsu, id)).or_default().push(id);
    }
    let mut comps: Vec<Vec<usize>> = grouped.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Builds a displacement map with `a` (when given) as prescribed fixed set.
pub fn build_displacement(
    k: &Arc<GComplex>,
    a: Option<&Subcomplex>,
) -> Result<DisplacementMap, DisplacementError> {
    if !k.is_regular() {
        return Err(DisplacementError::IrregularAction);
    }
    if let Some(a) = a {
        if !a.same_parent(&Subcomplex::empty(Arc::clone(k))) {
            return Err(DisplacementError::ParentMismatch);
        }
        if !a.is_invariant() {
            return Err(DisplacementError::NotInvariant);
        }
    }
    let n = k.simplex_count();
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut strategies = vec![Strategy::Singular; n];
    if let Some(a) = a {
        for &id in a.ids() {
            strategies[id] = Strategy::Prescribed;
        }
    }

    let comps = connected_components(k);
    let comp_of: Vec<usize> = {
        let mut v = vec![0usize; n];
        for (ci, c) in comps.iter().enumerate() {
            for &id in c {
                v[id] = ci;
            }
        }
        v
    };
    let group = k.group();

    // Group components into orbits under the action.
    let mut seen = vec![false; comps.len()];
    for start in 0..comps.len() {
        if seen[start] {
            continue;
        }
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for g in group.elements() {
            orbit.insert(comp_of[k.act_simplex(g, comps[start][0])]);
        }
        for &c in &orbit {
            seen[c] = true;
        }
        let cells: Vec<usize> = orbit.iter().flat_map(|&c| comps[c].iter().copied()).collect();

        // Orbits that meet the prescribed set stay put entirely.
        if a.is_some_and(|a| cells.iter().any(|&id| a.contains(id))) {
            continue;
        }

        if try_central_element(k, &cells, &mut assignment, &mut strategies) {
            continue;
        }
        if try_circle_rotation(k, &comps, &orbit, &mut assignment, &mut strategies) {
            continue;
        }
        try_automorphism_search(k, &cells, &mut assignment, &mut strategies);
        // Otherwise the cells stay singular (s4).
    }

    Ok(DisplacementMap { complex: Arc::clone(k), assignment, strategies })
}

/// s1: a central element with no setwise-fixed simplex in the cell set.
fn try_central_element(
    k: &GComplex,
    cells: &[usize],
    assignment: &mut [usize],
    strategies: &mut [Strategy],
) -> bool {
    let group = k.group();
    for g in group.center() {
        if g == group.identity() {
            continue;
        }
        if cells.iter().all(|&id| k.act_simplex(g, id) != id) {
            for &id in cells {
                assignment[id] = k.act_simplex(g, id);
                strategies[id] = Strategy::CentralElement(g);
            }
            return true;
        }
    }
    false
}

/// The vertices of a circle component in cyclic order, if it is one.
fn cycle_order(k: &GComplex, cells: &[usize]) -> Option<Vec<usize>> {
    let mut vertices = Vec::new();
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &id in cells {
        let s = k.simplex(id);
        match s.dim() {
            0 => vertices.push(s.vertices()[0]),
            1 => {
                let (u, v) = (s.vertices()[0], s.vertices()[1]);
                adjacency.entry(u).or_default().push(v);
                adjacency.entry(v).or_default().push(u);
            }
            _ => return None,
        }
    }
    if vertices.len() < 3 || !vertices.iter().all(|v| adjacency.get(v).map(Vec::len) == Some(2)) {
        return None;
    }
    let start = *vertices.iter().min().unwrap();
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = *adjacency[&start].iter().min().unwrap();
    while cur != start {
        order.push(cur);
        let next = adjacency[&cur].iter().copied().find(|&x| x != prev).unwrap();
        prev = cur;
        cur = next;
    }
    (order.len() == vertices.len()).then_some(order)
}

/// s2: rotate each circle component of the orbit by a step count that
/// commutes with the component's setwise stabilizer, translating the
/// representative's rotation to the other components.
fn try_circle_rotation(
    k: &GComplex,
    comps: &[Vec<usize>],
    orbit: &BTreeSet<usize>,
    assignment: &mut [usize],
    strategies: &mut [Strategy],
) -> bool {
    let group = k.group();
    let rep = &comps[*orbit.iter().next().unwrap()];
    let Some(order) = cycle_order(k, rep) else {
        return false;
    };
    let len = order.len();
    let cell_map = |rot: &HashMap<usize, usize>, id: usize| -> usize {
        let image: Vec<usize> = k.simplex(id).vertices().iter().map(|v| rot[v]).collect();
        let mut image = image;
        image.sort_unstable();
        k.id_of(&crate::complex::Simplex::new(image).expect("rotation image is a simplex"))
            .expect("rotation preserves the cycle")
    };
    let stabilizer: Vec<usize> = group
        .elements()
        .filter(|&g| rep.binary_search(&k.act_simplex(g, rep[0])).is_ok())
        .collect();
    for step in 1..len {
        let rot: HashMap<usize, usize> =
            (0..len).map(|i| (order[i], order[(i + step) % len])).collect();
        let commutes = stabilizer.iter().all(|&g| {
            rep.iter().all(|&id| cell_map(&rot, k.act_simplex(g, id)) == k.act_simplex(g, cell_map(&rot, id)))
        });
        if !commutes {
            continue;
        }
        for &ci in orbit {
            let g0 = group
                .elements()
                .find(|&g| comps[ci].binary_search(&k.act_simplex(g, rep[0])).is_ok())
                .expect("component is in the orbit");
            for &id in rep {
                let target = k.act_simplex(g0, id);
                assignment[target] = k.act_simplex(g0, cell_map(&rot, id));
                strategies[target] = Strategy::CircleRotation;
            }
        }
        return true;
    }
    false
}

/// s3: backtracking search for a vertex permutation of the cell set that is
/// a complex automorphism, commutes with the whole action, and moves every
/// simplex. Deterministic; gives up past a node budget.
fn try_automorphism_search(
    k: &GComplex,
    cells: &[usize],
    assignment: &mut [usize],
    strategies: &mut [Strategy],
) -> bool {
    let group = k.group();
    let vs: Vec<usize> = cells
        .iter()
        .filter(|&&id| k.simplex(id).dim() == 0)
        .map(|&id| k.simplex(id).vertices()[0])
        .collect();
    let vpos: HashMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let cell_set: HashSet<usize> = cells.iter().copied().collect();

    // Signature: how many simplices of each dimension contain the vertex.
    let sig: Vec<Vec<usize>> = vs
        .iter()
        .map(|&v| {
            let mut counts = vec![0usize; k.dim() + 1];
            for &id in cells {
                if k.simplex(id).vertices().contains(&v) {
                    counts[k.simplex(id).dim()] += 1;
                }
            }
            counts
        })
        .collect();
    // Cells containing each vertex, for incremental simpliciality checks.
    let containing: Vec<Vec<usize>> = vs
        .iter()
        .map(|&v| {
            cells
                .iter()
                .copied()
                .filter(|&id| k.simplex(id).vertices().contains(&v))
                .collect()
        })
        .collect();

    struct Search<'a> {
        k: &'a GComplex,
        vs: &'a [usize],
        vpos: &'a HashMap<usize, usize>,
        cell_set: &'a HashSet<usize>,
        sig: &'a [Vec<usize>],
        containing: &'a [Vec<usize>],
        group_elems: Vec<usize>,
        nodes: usize,
    }

    impl Search<'_> {
        // Assigns phi(v) = w plus everything the commuting constraint
        // forces; returns None on conflict.
        fn propagate(
            &mut self,
            phi: &mut [Option<usize>],
            used: &mut [bool],
            v: usize,
            w: usize,
        ) -> Option<Vec<usize>> {
            let mut trail = Vec::new();
            let mut queue = vec![(v, w)];
            while let Some((v, w)) = queue.pop() {
                let (vi, wi) = (self.vpos[&v], self.vpos[&w]);
                match phi[vi] {
                    Some(existing) => {
                        if existing != w {
                            self.undo(phi, used, &trail);
                            return None;
                        }
                        continue;
                    }
                    None => {
                        if used[wi] || v == w || self.sig[vi] != self.sig[wi] {
                            self.undo(phi, used, &trail);
                            return None;
                        }
                        phi[vi] = Some(w);
                        used[wi] = true;
                        trail.push(vi);
                        for &g in &self.group_elems {
                            queue.push((self.k.act_vertex(g, v), self.k.act_vertex(g, w)));
                        }
                        // Fully assigned cells must land in the cell set and move.
                        for &id in &self.containing[vi] {
                            let verts = self.k.simplex(id).vertices();
                            let mut image = Vec::with_capacity(verts.len());
                            let mut complete = true;
                            for x in verts {
                                match phi[self.vpos[x]] {
                                    Some(y) => image.push(y),
                                    None => {
                                        complete = false;
                                        break;
                                    }
                                }
                            }
                            if !complete {
                                continue;
                            }
                            image.sort_unstable();
                            let ok = crate::complex::Simplex::new(image)
                                .ok()
                                .and_then(|s| self.k.id_of(&s))
                                .is_some_and(|iid| iid != id && self.cell_set.contains(&iid));
                            if !ok {
                                self.undo(phi, used, &trail);
                                return None;
                            }
                        }
                    }
                }
            }
            Some(trail)
        }

        fn undo(&self, phi: &mut [Option<usize>], used: &mut [bool], trail: &[usize]) {
            for &vi in trail {
                if let Some(w) = phi[vi].take() {
                    used[self.vpos[&w]] = false;
                }
            }
        }

        fn solve(&mut self, phi: &mut [Option<usize>], used: &mut [bool]) -> bool {
            if self.nodes >= AUTOMORPHISM_SEARCH_BUDGET {
                return false;
            }
            self.nodes += 1;
            let Some(vi) = (0..self.vs.len()).find(|&i| phi[i].is_none()) else {
                return true;
            };
            for wi in 0..self.vs.len() {
                if used[wi] {
                    continue;
                }
                if let Some(trail) = self.propagate(phi, used, self.vs[vi], self.vs[wi]) {
                    if self.solve(phi, used) {
                        return true;
                    }
                    self.undo(phi, used, &trail);
                }
            }
            false
        }
    }

    let mut search = Search {
        k,
        vs: &vs,
        vpos: &vpos,
        cell_set: &cell_set,
        sig: &sig,
        containing: &containing,
        group_elems: group.elements().collect(),
        nodes: 0,
    };
    let mut phi: Vec<Option<usize>> = vec![None; vs.len()];
    let mut used = vec![false; vs.len()];
    if !search.solve(&mut phi, &mut used) {
        return false;
    }
    for &id in cells {
        let mut image: Vec<usize> =
            k.simplex(id).vertices().iter().map(|v| phi[vpos[v]].unwrap()).collect();
        image.sort_unstable();
        let iid = k
            .id_of(&crate::complex::Simplex::new(image).expect("automorphism image is a simplex"))
            .expect("automorphism preserves the complex");
        assignment[id] = iid;
        strategies[id] = Strategy::Automorphism;
    }
    true
}

/// One row of the singular-orbit table: how many distinct singular orbits
/// meet the closure of each stratum component. The constructions aim for at
/// most one per closure.
#[derive(Debug, Clone)]
pub struct SingularOrbitRow {
    pub subgroup: Vec<usize>,
    pub component_id: usize,
    pub singular_orbits: usize,
    pub within_bound: bool,
}

/// Everything the verifier established about a displacement map.
#[derive(Debug, Clone)]
pub struct DisplacementCertificate {
    pub pass: bool,
    /// Pairs (σ, τ), σ ⊂ τ, whose images are not nested either way.
    pub monotonicity_violations: Vec<(Vec<usize>, Vec<usize>)>,
    /// (group element, simplex) with F(g·σ) ≠ g·F(σ).
    pub equivariance_violations: Vec<(usize, Vec<usize>)>,
    /// Vertex sets of the fixed simplices.
    pub singular: Vec<Vec<usize>>,
    /// Chains whose simplex set intersects its image's simplex set; empty
    /// together with `singular` certifies a fixed-point-free induced map.
    pub flagged_chains: Vec<Vec<Vec<usize>>>,
    pub singular_orbit_rows: Vec<SingularOrbitRow>,
    pub notes: Vec<String>,
}

/// Checks chain-monotonicity and equivariance, lists singular simplices and
/// flagged chains, and groups singular orbits by stratum component.
pub fn verify_displacement(k: &Arc<GComplex>, f: &DisplacementMap) -> DisplacementCertificate {
    let mut cert = DisplacementCertificate {
        pass: false,
        monotonicity_violations: Vec::new(),
        equivariance_violations: Vec::new(),
        singular: Vec::new(),
        flagged_chains: Vec::new(),
        singular_orbit_rows: Vec::new(),
        notes: Vec::new(),
    };
    if !k.same_structure(f.complex()) {
        cert.notes.push("map was built on a different complex".to_string());
        return cert;
    }
    let verts = |id: usize| k.simplex(id).vertices().to_vec();

    for id in 0..k.simplex_count() {
        for sub in k.simplex(id).subsimplices() {
            let sid = k.id_of(&sub).expect("faces are stored");
            if sid == id {
                continue;
            }
            let (im_lo, im_hi) = (k.simplex(f.image(sid)), k.simplex(f.image(id)));
            if !im_lo.is_face_of(im_hi) && !im_hi.is_face_of(im_lo) {
                cert.monotonicity_violations.push((verts(sid), verts(id)));
            }
        }
    }

    for g in k.group().elements() {
        for id in 0..k.simplex_count() {
            if f.image(k.act_simplex(g, id)) != k.act_simplex(g, f.image(id)) {
                cert.equivariance_violations.push((g, verts(id)));
            }
        }
    }

    let singular_ids: Vec<usize> = f.singular();
    cert.singular = singular_ids.iter().map(|&id| verts(id)).collect();

    for chain in k.chains() {
        let image: BTreeSet<usize> = chain.iter().map(|&x| f.image(x)).collect();
        if chain.iter().any(|x| image.contains(x)) {
            cert.flagged_chains.push(chain.iter().map(|&x| verts(x)).collect());
        }
    }

    if k.is_regular() {
        let strat = strata(k).expect("regular complex stratifies");
        let singular_set: BTreeSet<usize> = singular_ids.iter().copied().collect();
        let orbit_key = |id: usize| -> usize {
            k.group().elements().map(|g| k.act_simplex(g, id)).min().unwrap()
        };
        for stratum in strat.strata() {
            for c in &stratum.components {
                let orbits: BTreeSet<usize> = c
                    .closure
                    .ids()
                    .iter()
                    .filter(|id| singular_set.contains(id))
                    .map(|&id| orbit_key(id))
                    .collect();
                cert.singular_orbit_rows.push(SingularOrbitRow {
                    subgroup: stratum.subgroup.elements().to_vec(),
                    component_id: c.id,
                    singular_orbits: orbits.len(),
                    within_bound: orbits.len() <= 1,
                });
            }
        }
    } else {
        cert.notes.push("irregular action: singular-orbit table omitted".to_string());
    }

    cert.pass = cert.monotonicity_violations.is_empty()
        && cert.equivariance_violations.is_empty()
        && cert.notes.is_empty();
    cert
}
