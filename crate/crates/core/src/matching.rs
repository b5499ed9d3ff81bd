//! Equivariant acyclic matchings on the face poset, with per-component
//! singularity accounting and a cancellation pass.
//!
//! Matched pairs always join two simplices with the *same exact* stabilizer,
//! so every closed V-path stays inside one stratum (stabilizers only grow
//! along faces, and a cycle would have to return). Acyclicity is therefore
//! maintained stratum by stratum: pairs are chosen on Weyl-orbit
//! representatives of the class representative's stratum, translated over
//! the normalizer, and then over coset representatives to the conjugate
//! strata. The unmatched (critical) cells play the role of singular orbits:
//! per component, their alternating count equals chi_c exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::complex::GComplex;
use crate::group::normalizer;
use crate::invariants::betti;
use crate::stratify::Stratification;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("matching belongs to a different complex")]
    ParentMismatch,
    #[error("pair ({lower}, {upper}): upper is not a cofacet of lower")]
    NotCofacet { lower: usize, upper: usize },
    #[error("pair ({lower}, {upper}) joins different strata")]
    StratumMismatch { lower: usize, upper: usize },
    #[error("simplex {simplex} is matched twice")]
    DoubleMatched { simplex: usize },
    #[error("pair set is not closed under element {element} applied to pair ({lower}, {upper})")]
    NotEquivariant { element: usize, lower: usize, upper: usize },
    #[error("the reversed face digraph has a directed cycle")]
    Cyclic,
    #[error("critical-cell Euler identity fails on component {component} of stratum {subgroup:?}: expected {expected}, got {got}")]
    EulerIdentityViolated { subgroup: Vec<usize>, component: usize, expected: i64, got: i64 },
}

/// A partial matching of simplices with cofacets one dimension higher.
#[derive(Debug, Clone)]
pub struct Matching {
    complex: Arc<GComplex>,
    partner: Vec<Option<usize>>,
    pairs: Vec<(usize, usize)>,
    critical: Vec<usize>,
}

impl Matching {
    fn from_partner(complex: Arc<GComplex>, partner: Vec<Option<usize>>) -> Matching {
        let mut pairs = Vec::new();
        let mut critical = Vec::new();
        for (id, p) in partner.iter().enumerate() {
            match *p {
                Some(q) if complex.simplex(q).dim() == complex.simplex(id).dim() + 1 => {
                    pairs.push((id, q));
                }
                Some(_) => {}
                None => critical.push(id),
            }
        }
        Matching { complex, partner, pairs, critical }
    }

    /// Builds a matching from explicit (lower, upper) pairs and validates all
    /// invariants against the stratification.
    pub fn from_pairs(
        strat: &Stratification,
        pairs: &[(usize, usize)],
    ) -> Result<Matching, MatchingError> {
        let complex = Arc::clone(strat.complex());
        let mut partner: Vec<Option<usize>> = vec![None; complex.simplex_count()];
        for &(a, b) in pairs {
            let (lower, upper) =
                if complex.simplex(a).dim() < complex.simplex(b).dim() { (a, b) } else { (b, a) };
            if complex.simplex(upper).dim() != complex.simplex(lower).dim() + 1
                || !complex.facets_of(upper).contains(&lower)
            {
                return Err(MatchingError::NotCofacet { lower, upper });
            }
            for x in [lower, upper] {
                if partner[x].is_some() {
                    return Err(MatchingError::DoubleMatched { simplex: x });
                }
            }
            partner[lower] = Some(upper);
            partner[upper] = Some(lower);
        }
        let m = Matching::from_partner(complex, partner);
        m.validate(strat)?;
        Ok(m)
    }

    pub fn complex(&self) -> &Arc<GComplex> {
        &self.complex
    }

    /// Matched pairs (lower, upper), sorted by the lower simplex id.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Unmatched simplex ids, sorted.
    pub fn critical(&self) -> &[usize] {
        &self.critical
    }

    pub fn partner_of(&self, id: usize) -> Option<usize> {
        self.partner[id]
    }

    /// Checks every matching invariant: pair shape, stratum preservation,
    /// equivariance, acyclicity, and the per-component Euler identity.
    pub fn validate(&self, strat: &Stratification) -> Result<(), MatchingError> {
        let k = &self.complex;
        if !strat.complex().same_structure(k) {
            return Err(MatchingError::ParentMismatch);
        }
        for &(lower, upper) in &self.pairs {
            if !k.facets_of(upper).contains(&lower) {
                return Err(MatchingError::NotCofacet { lower, upper });
            }
            if strat.stratum_index_of(lower) != strat.stratum_index_of(upper) {
                return Err(MatchingError::StratumMismatch { lower, upper });
            }
        }
        let pair_set: HashSet<(usize, usize)> = self.pairs.iter().copied().collect();
        for g in k.group().elements() {
            for &(lower, upper) in &self.pairs {
                let image = (k.act_simplex(g, lower), k.act_simplex(g, upper));
                if !pair_set.contains(&image) {
                    return Err(MatchingError::NotEquivariant { element: g, lower, upper });
                }
            }
        }
        if !acyclic(k, &self.partner, None) {
            return Err(MatchingError::Cyclic);
        }
        for stratum in strat.strata() {
            for c in &stratum.components {
                let got: i64 = c
                    .open_simplices
                    .iter()
                    .filter(|&&id| self.partner[id].is_none())
                    .map(|&id| if k.simplex(id).dim() % 2 == 0 { 1i64 } else { -1i64 })
                    .sum();
                if got != c.chi_c {
                    return Err(MatchingError::EulerIdentityViolated {
                        subgroup: stratum.subgroup.elements().to_vec(),
                        component: c.id,
                        expected: c.chi_c,
                        got,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Cycle check on the face digraph with matched arrows reversed.
///
/// With `restrict` set, only the given cells and incidences among them are
/// considered — sufficient during construction because matched pairs never
/// cross strata.
fn acyclic(k: &GComplex, partner: &[Option<usize>], restrict: Option<&[usize]>) -> bool {
    let nodes: Vec<usize> = match restrict {
        Some(s) => s.to_vec(),
        None => (0..k.simplex_count()).collect(),
    };
    let in_scope: HashSet<usize> = nodes.iter().copied().collect();
    let successors = |x: usize| -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(p) = partner[x] {
            if k.simplex(p).dim() == k.simplex(x).dim() + 1 && in_scope.contains(&p) {
                out.push(p);
            }
        }
        for &f in k.facets_of(x) {
            if in_scope.contains(&f) && partner[f] != Some(x) {
                out.push(f);
            }
        }
        out
    };
    // Iterative three-color DFS.
    let mut color: HashMap<usize, u8> = HashMap::new();
    for &start in &nodes {
        if color.get(&start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack = vec![(start, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                color.insert(x, 2);
                continue;
            }
            match color.get(&x).copied().unwrap_or(0) {
                1 => return false,
                2 => continue,
                _ => {}
            }
            color.insert(x, 1);
            stack.push((x, true));
            for y in successors(x) {
                match color.get(&y).copied().unwrap_or(0) {
                    1 => return false,
                    2 => {}
                    _ => stack.push((y, false)),
                }
            }
        }
    }
    true
}

/// Greedy equivariant matching: strata in orbit-type order, Weyl-orbit
/// representatives in id order, each matched to its least available cofacet
/// that keeps the stratum digraph acyclic.
pub fn build_matching(strat: &Stratification) -> Matching {
    let k = strat.complex();
    let group = k.group();
    let mut partner: Vec<Option<usize>> = vec![None; k.simplex_count()];
    for class in strat.classes() {
        let h_star = &class.representative;
        let stratum = strat.stratum(h_star).expect("representative realized");
        let cells = &stratum.simplices;
        let sidx = strat.stratum_index_of(cells[0]);
        let weyl = normalizer(group, h_star);

        let mut seen: HashSet<usize> = HashSet::new();
        let mut reps: Vec<usize> = Vec::new();
        for &id in cells {
            if seen.contains(&id) {
                continue;
            }
            reps.push(id);
            for &n in weyl.elements() {
                seen.insert(k.act_simplex(n, id));
            }
        }

        for &sigma in &reps {
            if partner[sigma].is_some() {
                continue;
            }
            let candidates: Vec<usize> = k
                .cofacets_of(sigma)
                .iter()
                .copied()
                .filter(|&t| strat.stratum_index_of(t) == sidx && partner[t].is_none())
                .collect();
            for tau in candidates {
                if partner[tau].is_some() {
                    continue;
                }
                let orbit: BTreeSet<(usize, usize)> = weyl
                    .elements()
                    .iter()
                    .map(|&n| (k.act_simplex(n, sigma), k.act_simplex(n, tau)))
                    .collect();
                if orbit.iter().any(|&(a, b)| partner[a].is_some() || partner[b].is_some()) {
                    continue;
                }
                for &(a, b) in &orbit {
                    partner[a] = Some(b);
                    partner[b] = Some(a);
                }
                if acyclic(k, &partner, Some(cells)) {
                    break;
                }
                for &(a, b) in &orbit {
                    partner[a] = None;
                    partner[b] = None;
                }
            }
        }

        // Translate the representative stratum's pairs to the conjugates.
        for h in &class.conjugates {
            if h == h_star {
                continue;
            }
            let g0 = group
                .elements()
                .find(|&g| h_star.conjugated_by(group, g) == *h)
                .expect("conjugate is reachable");
            for &sigma in cells {
                if let Some(tau) = partner[sigma] {
                    if k.simplex(tau).dim() == k.simplex(sigma).dim() + 1 {
                        let (a, b) = (k.act_simplex(g0, sigma), k.act_simplex(g0, tau));
                        partner[a] = Some(b);
                        partner[b] = Some(a);
                    }
                }
            }
        }
    }
    Matching::from_partner(Arc::clone(k), partner)
}

/// Per-cell map from reachable critical endpoint to V-path count.
type PathCounts = HashMap<usize, BTreeMap<usize, u64>>;

/// Number of V-paths from each facet of `tau` down to every reachable
/// critical cell, staying inside the stratum cell set.
fn vpath_counts(
    k: &GComplex,
    cells: &HashSet<usize>,
    partner: &[Option<usize>],
    tau: usize,
) -> PathCounts {
    // memo[sigma] = endpoint -> number of V-paths starting at sigma
    let mut memo: PathCounts = HashMap::new();
    fn go(
        k: &GComplex,
        cells: &HashSet<usize>,
        partner: &[Option<usize>],
        sigma: usize,
        memo: &mut PathCounts,
    ) {
        if memo.contains_key(&sigma) {
            return;
        }
        // Mark before recursion; the matching is acyclic so no reentry.
        memo.insert(sigma, BTreeMap::new());
        let result = match partner[sigma] {
            None => BTreeMap::from([(sigma, 1u64)]),
            Some(up) if k.simplex(up).dim() == k.simplex(sigma).dim() + 1 => {
                let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
                for &next in k.facets_of(up) {
                    if next == sigma || !cells.contains(&next) {
                        continue;
                    }
                    go(k, cells, partner, next, memo);
                    for (&end, &c) in &memo[&next] {
                        let slot = acc.entry(end).or_insert(0);
                        *slot = slot.saturating_add(c);
                    }
                }
                acc
            }
            // Matched downward: the V-path dead-ends.
            Some(_) => BTreeMap::new(),
        };
        memo.insert(sigma, result);
    }
    for &f in k.facets_of(tau) {
        if cells.contains(&f) {
            go(k, cells, partner, f, &mut memo);
        }
    }
    memo
}

fn extract_unique_path(
    k: &GComplex,
    cells: &HashSet<usize>,
    partner: &[Option<usize>],
    memo: &PathCounts,
    tau: usize,
    target: usize,
) -> Vec<usize> {
    let mut path = vec![tau];
    let mut above = tau;
    loop {
        let next = k
            .facets_of(above)
            .iter()
            .copied()
            .find(|f| {
                cells.contains(f)
                    && !path.contains(f)
                    && memo.get(f).is_some_and(|m| m.get(&target).copied().unwrap_or(0) > 0)
            })
            .expect("unique path exists");
        path.push(next);
        if next == target {
            return path;
        }
        let up = partner[next].expect("interior path cells are matched");
        path.push(up);
        above = up;
    }
}

fn reverse_path(partner: &mut [Option<usize>], path: &[usize]) {
    debug_assert!(path.len() % 2 == 0);
    for i in 0..path.len() / 2 {
        let up = path[2 * i];
        let lo = path[2 * i + 1];
        partner[lo] = Some(up);
        partner[up] = Some(lo);
    }
}

/// Cancellation pass: repeatedly reverse the unique gradient path between a
/// critical (d, d+1) pair within the representative stratum, simultaneously
/// across the whole orbit of the path, skipping when the orbit's paths
/// overlap or the reversal would break acyclicity.
pub fn cancel(strat: &Stratification, m: &Matching) -> Matching {
    let k = strat.complex();
    let mut partner = m.partner.clone();
    while cancel_once(strat, &mut partner) {}
    Matching::from_partner(Arc::clone(k), partner)
}

fn cancel_once(strat: &Stratification, partner: &mut Vec<Option<usize>>) -> bool {
    let k = strat.complex();
    let group = k.group();
    for class in strat.classes() {
        let stratum = strat.stratum(&class.representative).expect("representative realized");
        let cells: HashSet<usize> = stratum.simplices.iter().copied().collect();
        for &tau in &stratum.simplices {
            if partner[tau].is_some() || k.simplex(tau).dim() == 0 {
                continue;
            }
            let memo = vpath_counts(k, &cells, partner, tau);
            let mut totals: BTreeMap<usize, u64> = BTreeMap::new();
            for &f in k.facets_of(tau) {
                if let Some(m) = memo.get(&f) {
                    for (&end, &c) in m {
                        let slot = totals.entry(end).or_insert(0);
                        *slot = slot.saturating_add(c);
                    }
                }
            }
            for &sigma in &stratum.simplices {
                if partner[sigma].is_some()
                    || k.simplex(sigma).dim() + 1 != k.simplex(tau).dim()
                    || totals.get(&sigma).copied().unwrap_or(0) != 1
                {
                    continue;
                }
                let path = extract_unique_path(k, &cells, partner, &memo, tau, sigma);
                let mut translates: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for g in group.elements() {
                    let t: Vec<usize> = path.iter().map(|&x| k.act_simplex(g, x)).collect();
                    translates.insert(t[0], t);
                }
                let mut all: Vec<usize> = translates.values().flatten().copied().collect();
                let total = all.len();
                all.sort_unstable();
                all.dedup();
                if all.len() != total {
                    continue; // orbit paths overlap
                }
                let saved = partner.clone();
                for t in translates.values() {
                    reverse_path(partner, t);
                }
                if acyclic(k, partner, None) {
                    return true;
                }
                *partner = saved;
            }
        }
    }
    false
}

/// Per-component critical-cell accounting against the Betti lower bound and
/// the one-orbit-per-closure target.
#[derive(Debug, Clone)]
pub struct MorseRow {
    pub subgroup: Vec<usize>,
    pub component_id: usize,
    pub critical_cells: usize,
    pub chi_c: i64,
    /// Whether the component already equals its closure.
    pub closed: bool,
    /// Σ betti of the component closure: a lower bound for the critical
    /// count when the component is closed.
    pub betti_sum: usize,
    pub gap: i64,
    /// Distinct orbits of critical cells meeting the component closure.
    /// The constructions aim for at most one; this is reported, never
    /// asserted (acyclic matchings cannot reach zero even on a circle).
    pub critical_orbits_in_closure: usize,
}

pub fn morse_report(strat: &Stratification, m: &Matching) -> Vec<MorseRow> {
    let k = strat.complex();
    let orbit_key =
        |id: usize| -> usize { k.group().elements().map(|g| k.act_simplex(g, id)).min().unwrap() };
    let mut rows = Vec::new();
    for stratum in strat.strata() {
        for c in &stratum.components {
            let critical_cells =
                c.open_simplices.iter().filter(|&&id| m.partner_of(id).is_none()).count();
            let betti_sum: usize = betti(&c.closure).iter().sum();
            let critical_orbits_in_closure = c
                .closure
                .ids()
                .iter()
                .filter(|&&id| m.partner_of(id).is_none())
                .map(|&id| orbit_key(id))
                .collect::<BTreeSet<usize>>()
                .len();
            rows.push(MorseRow {
                subgroup: stratum.subgroup.elements().to_vec(),
                component_id: c.id,
                critical_cells,
                chi_c: c.chi_c,
                closed: c.closure.len() == c.open_simplices.len(),
                betti_sum,
                gap: critical_cells as i64 - betti_sum as i64,
                critical_orbits_in_closure,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog;
    use crate::complex::{build_complex, Simplex};
    use crate::group::FiniteGroup;
    use crate::stratify::strata;

    fn ids(k: &GComplex, sets: &[&[usize]]) -> Vec<usize> {
        sets.iter()
            .map(|s| k.id_of(&Simplex::new(s.to_vec()).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn single_vertex() {
        let k = build_complex(
            vec!["0".into()],
            &[vec![0]],
            FiniteGroup::trivial(),
            vec![vec![0]],
        )
        .unwrap();
        let s = strata(&k).unwrap();
        let m = build_matching(&s);
        assert!(m.pairs().is_empty());
        assert_eq!(m.critical(), &[0]);
        m.validate(&s).unwrap();
    }

    #[test]
    fn circle3_greedy() {
        let k = catalog("circle3").unwrap();
        let s = strata(&k).unwrap();
        let m = build_matching(&s);
        m.validate(&s).unwrap();
        // A circle admits no acyclic matching with fewer than 2 critical cells.
        assert_eq!(m.critical().len(), 2);
        let dims: Vec<usize> =
            m.critical().iter().map(|&id| k.simplex(id).dim()).collect();
        assert_eq!(dims, vec![0, 1]);
    }

    #[test]
    fn circle4_anti_pairs_are_orbit_closed() {
        let k = catalog("circle4-anti").unwrap();
        let s = strata(&k).unwrap();
        let m = build_matching(&s);
        m.validate(&s).unwrap();
        // Critical cells come in whole orbits: counts are even per dimension.
        let mut by_dim = BTreeMap::new();
        for &id in m.critical() {
            *by_dim.entry(k.simplex(id).dim()).or_insert(0usize) += 1;
        }
        assert!(by_dim.values().all(|&c| c % 2 == 0));
        // Alternating orbit sum is chi_c = 0.
        let alt: i64 = m
            .critical()
            .iter()
            .map(|&id| if k.simplex(id).dim() % 2 == 0 { 1i64 } else { -1 })
            .sum();
        assert_eq!(alt, 0);
    }

    #[test]
    fn cancel_leaves_minimal_matching_unchanged() {
        let k = catalog("circle3").unwrap();
        let s = strata(&k).unwrap();
        let m = build_matching(&s);
        let reduced = cancel(&s, &m);
        reduced.validate(&s).unwrap();
        assert_eq!(reduced.pairs(), m.pairs());
    }

    #[test]
    fn cancel_reduces_wasteful_circle3_matching() {
        let k = catalog("circle3").unwrap();
        let s = strata(&k).unwrap();
        // Only pair vertex 1 with edge {1,2}: four critical cells remain.
        let pair = (
            ids(&k, &[&[1]])[0],
            ids(&k, &[&[1, 2]])[0],
        );
        let wasteful = Matching::from_pairs(&s, &[pair]).unwrap();
        assert_eq!(wasteful.critical().len(), 4);
        let reduced = cancel(&s, &wasteful);
        reduced.validate(&s).unwrap();
        assert_eq!(reduced.critical().len(), 2);
    }

    #[test]
    fn cancel_torus7_reaches_betti_bound() {
        let k = catalog("torus7").unwrap();
        let s = strata(&k).unwrap();
        let m = build_matching(&s);
        m.validate(&s).unwrap();
        let reduced = cancel(&s, &m);
        reduced.validate(&s).unwrap();
        // Betti sum of the torus is 1+2+1 = 4; the reduction either reaches
        // it or the report shows the gap. Here the bound is attained.
        let rows = morse_report(&s, &reduced);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].betti_sum, 4);
        assert_eq!(rows[0].critical_cells, 4);
        assert_eq!(rows[0].gap, 0);
        assert!(reduced.critical().len() <= m.critical().len());
    }

    #[test]
    fn from_pairs_rejects_invalid_input() {
        let k = catalog("circle6-refl").unwrap();
        let s = strata(&k).unwrap();
        // Vertex 0 is fixed by the reflection, edge {0,1} is not: the pair
        // crosses strata.
        let v0 = ids(&k, &[&[0]])[0];
        let e01 = ids(&k, &[&[0, 1]])[0];
        assert!(matches!(
            Matching::from_pairs(&s, &[(v0, e01)]),
            Err(MatchingError::StratumMismatch { .. })
        ));

        // A single pair on a free action misses its translate.
        let anti = catalog("circle4-anti").unwrap();
        let s2 = strata(&anti).unwrap();
        let v0 = ids(&anti, &[&[0]])[0];
        let e01 = ids(&anti, &[&[0, 1]])[0];
        assert!(matches!(
            Matching::from_pairs(&s2, &[(v0, e01)]),
            Err(MatchingError::NotEquivariant { .. })
        ));

        // Vertex 1 is not a facet of edge {0,2}.
        let c3 = catalog("circle3").unwrap();
        let s3 = strata(&c3).unwrap();
        let v1 = ids(&c3, &[&[1]])[0];
        let e02 = ids(&c3, &[&[0, 2]])[0];
        assert!(matches!(
            Matching::from_pairs(&s3, &[(v1, e02)]),
            Err(MatchingError::NotCofacet { .. })
        ));
    }

    #[test]
    fn validate_detects_cycles() {
        // Pair every vertex of the square with its clockwise edge: the
        // reversed digraph is one big cycle.
        let k = build_complex(
            (0..4).map(|i| i.to_string()).collect(),
            &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
            FiniteGroup::trivial(),
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        let s = strata(&k).unwrap();
        let p = |a: &[usize]| k.id_of(&Simplex::new(a.to_vec()).unwrap()).unwrap();
        let pairs = [
            (p(&[0]), p(&[0, 1])),
            (p(&[1]), p(&[1, 2])),
            (p(&[2]), p(&[2, 3])),
            (p(&[3]), p(&[0, 3])),
        ];
        assert!(matches!(Matching::from_pairs(&s, &pairs), Err(MatchingError::Cyclic)));
    }

    #[test]
    fn euler_identity_on_catalog() {
        for name in crate::catalog::catalog_names() {
            let k = catalog(name).unwrap();
            let s = strata(&k).unwrap();
            let m = build_matching(&s);
            m.validate(&s).expect(name);
            let c = cancel(&s, &m);
            c.validate(&s).expect(name);
        }
    }
}
