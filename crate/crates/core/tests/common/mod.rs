//! Shared helpers for the integration suites: small group builders, an
//! independent brute-force oracle, and seeded random generators.
//!
//! The oracle deliberately reuses nothing from the pipeline: stabilizers come
//! from the raw vertex action, components from a flood fill over arbitrary
//! face containment, and chi values from naive cell counting.

// Compiled once per test target; not every target uses every helper.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use equiflow_core::{build_complex, FiniteGroup, GComplex, Subcomplex};

// ---------------------------------------------------------------------------
// Groups
// ---------------------------------------------------------------------------

/// Closes permutation generators under composition and builds a group table.
pub fn perm_group(n: usize, gens: &[Vec<usize>]) -> FiniteGroup {
    let id: Vec<usize> = (0..n).collect();
    let mut elems: Vec<Vec<usize>> = vec![id];
    let mut queue: VecDeque<Vec<usize>> = gens.to_vec().into();
    while let Some(p) = queue.pop_front() {
        if !elems.contains(&p) {
            for q in elems.clone() {
                queue.push_back((0..n).map(|i| p[q[i]]).collect());
                queue.push_back((0..n).map(|i| q[p[i]]).collect());
            }
            elems.push(p);
        }
    }
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    let comp: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                    elems.iter().position(|e| *e == comp).unwrap()
                })
                .collect()
        })
        .collect();
    equiflow_core::build_group(table, None).unwrap()
}

pub fn dihedral(n: usize) -> FiniteGroup {
    let rotation: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let reflection: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    perm_group(n, &[rotation, reflection])
}

pub fn klein_four() -> FiniteGroup {
    perm_group(4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]])
}

/// Groups of order at most 8 used by the random generator.
pub fn small_groups() -> Vec<FiniteGroup> {
    vec![
        FiniteGroup::trivial(),
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::cyclic(4),
        FiniteGroup::cyclic(5),
        FiniteGroup::cyclic(6),
        FiniteGroup::cyclic(7),
        FiniteGroup::cyclic(8),
        klein_four(),
        dihedral(3),
        dihedral(4),
    ]
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

pub struct OracleOutcome {
    pub verdict_yes: bool,
    /// Class representative element set -> Σ |chi_c| over the representative
    /// subgroup's stratum components.
    pub per_class_abs: BTreeMap<Vec<usize>, i64>,
    /// Realized stabilizer element set -> sorted chi_c multiset.
    pub per_subgroup_chis: BTreeMap<Vec<usize>, Vec<i64>>,
}

/// Brute-force reference decision, written against the raw complex data.
pub fn oracle_decide(k: &GComplex) -> OracleOutcome {
    let g = k.group();
    let n = k.simplex_count();

    // Point stabilizers directly from the vertex action.
    let mut strata: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for id in 0..n {
        let stab: Vec<usize> = (0..g.order())
            .filter(|&e| {
                k.simplex(id).vertices().iter().all(|&v| k.act_vertex(e, v) == v)
            })
            .collect();
        strata.entry(stab).or_default().push(id);
    }

    // Flood fill with arbitrary-codimension face containment.
    let contains = |big: usize, small: usize| -> bool {
        let b = k.simplex(big).vertices();
        k.simplex(small).vertices().iter().all(|v| b.contains(v))
    };
    let mut per_subgroup_chis: BTreeMap<Vec<usize>, Vec<i64>> = BTreeMap::new();
    for (stab, cells) in &strata {
        let mut unvisited: BTreeSet<usize> = cells.iter().copied().collect();
        let mut chis = Vec::new();
        while let Some(&start) = unvisited.iter().next() {
            let mut comp = vec![start];
            unvisited.remove(&start);
            let mut frontier = vec![start];
            while let Some(x) = frontier.pop() {
                let adjacent: Vec<usize> = unvisited
                    .iter()
                    .copied()
                    .filter(|&y| contains(x, y) || contains(y, x))
                    .collect();
                for y in adjacent {
                    unvisited.remove(&y);
                    comp.push(y);
                    frontier.push(y);
                }
            }
            let chi: i64 = comp
                .iter()
                .map(|&id| if k.simplex(id).vertices().len() % 2 == 1 { 1 } else { -1 })
                .sum();
            chis.push(chi);
        }
        chis.sort_unstable();
        per_subgroup_chis.insert(stab.clone(), chis);
    }

    // Conjugacy classes of the realized stabilizers, by brute force.
    let conj_set = |e: usize, set: &[usize]| -> Vec<usize> {
        let mut out: Vec<usize> =
            set.iter().map(|&a| g.mul(g.mul(e, a), g.inv(e))).collect();
        out.sort_unstable();
        out
    };
    let mut per_class_abs: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    let mut assigned: BTreeSet<Vec<usize>> = BTreeSet::new();
    for stab in strata.keys() {
        if assigned.contains(stab) {
            continue;
        }
        let mut class: BTreeSet<Vec<usize>> =
            (0..g.order()).map(|e| conj_set(e, stab)).collect();
        class.insert(stab.clone());
        let rep = class.iter().next().unwrap().clone();
        let abs: i64 = per_subgroup_chis[&rep].iter().map(|c| c.abs()).sum();
        per_class_abs.insert(rep, abs);
        for c in class {
            assigned.insert(c);
        }
    }

    let verdict_yes = per_class_abs.values().all(|&a| a == 0);
    OracleOutcome { verdict_yes, per_class_abs, per_subgroup_chis }
}

// ---------------------------------------------------------------------------
// Random complexes
// ---------------------------------------------------------------------------

struct Piece {
    vertices: usize,
    maximal: Vec<Vec<usize>>,
    action: Vec<Vec<usize>>,
}

/// A small random base complex on at most four vertices.
fn random_base(rng: &mut ChaCha8Rng) -> (usize, Vec<Vec<usize>>) {
    let v = rng.gen_range(2..=4);
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    let count = rng.gen_range(1..=3);
    for _ in 0..count {
        let dim = rng.gen_range(0..=2.min(v - 1));
        let mut verts: Vec<usize> = (0..v).collect();
        for i in (1..verts.len()).rev() {
            verts.swap(i, rng.gen_range(0..=i));
        }
        let mut s: Vec<usize> = verts.into_iter().take(dim + 1).collect();
        s.sort_unstable();
        maximal.push(s);
    }
    // Make sure every vertex appears somewhere.
    for x in 0..v {
        if !maximal.iter().any(|s| s.contains(&x)) {
            maximal.push(vec![x]);
        }
    }
    (v, maximal)
}

/// The coset complex G ×_H B: one copy of the base per left coset of H,
/// permuted by left translation. Cells of copy kH have stabilizer kHk⁻¹,
/// and the action is automatically regular.
fn coset_piece(group: &FiniteGroup, subgroup: &[usize], rng: &mut ChaCha8Rng) -> Piece {
    let (vb, maximal_base) = random_base(rng);
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut coset_of = Vec::with_capacity(group.order());
    for e in 0..group.order() {
        let mut coset: Vec<usize> = subgroup.iter().map(|&h| group.mul(e, h)).collect();
        coset.sort_unstable();
        match cosets.iter().position(|c| *c == coset) {
            Some(i) => coset_of.push(i),
            None => {
                coset_of.push(cosets.len());
                cosets.push(coset);
            }
        }
    }
    let nc = cosets.len();
    let vertices = nc * vb;
    let maximal = (0..nc)
        .flat_map(|c| {
            maximal_base
                .iter()
                .map(move |s| s.iter().map(|&x| c * vb + x).collect::<Vec<_>>())
        })
        .collect();
    let action = (0..group.order())
        .map(|e| {
            (0..vertices)
                .map(|id| {
                    let (c, x) = (id / vb, id % vb);
                    let target = coset_of[group.mul(e, cosets[c][0])];
                    target * vb + x
                })
                .collect()
        })
        .collect();
    Piece { vertices, maximal, action }
}

fn disjoint_union(group: &FiniteGroup, pieces: Vec<Piece>) -> Piece {
    let mut vertices = 0;
    let mut maximal = Vec::new();
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); group.order()];
    for p in pieces {
        for s in &p.maximal {
            maximal.push(s.iter().map(|&x| x + vertices).collect());
        }
        for (e, row) in p.action.iter().enumerate() {
            action[e].extend(row.iter().map(|&x| x + vertices));
        }
        vertices += p.vertices;
    }
    Piece { vertices, maximal, action }
}

/// Cone: a new apex fixed by every element, joined to every maximal simplex.
fn cone(piece: Piece) -> Piece {
    let apex = piece.vertices;
    let maximal = piece
        .maximal
        .iter()
        .map(|s| {
            let mut t = s.clone();
            t.push(apex);
            t
        })
        .collect();
    let action = piece
        .action
        .into_iter()
        .map(|mut row| {
            row.push(apex);
            row
        })
        .collect();
    Piece { vertices: apex + 1, maximal, action }
}

/// A random valid regular G-complex with at most 200 simplices and a group
/// of order at most 8.
pub fn random_gcomplex(rng: &mut ChaCha8Rng) -> Arc<GComplex> {
    let groups = small_groups();
    loop {
        let group = groups[rng.gen_range(0..groups.len())].clone();
        let subgroup_choices = equiflow_core::subgroups(&group).unwrap();
        let n_pieces = rng.gen_range(1..=2);
        let pieces: Vec<Piece> = (0..n_pieces)
            .map(|_| {
                let h = &subgroup_choices[rng.gen_range(0..subgroup_choices.len())];
                coset_piece(&group, h.elements(), rng)
            })
            .collect();
        let mut assembled = disjoint_union(&group, pieces);
        if rng.gen_bool(0.5) {
            assembled = cone(assembled);
        }
        let names = (0..assembled.vertices).map(|i| i.to_string()).collect();
        let k = build_complex(names, &assembled.maximal, group, assembled.action)
            .expect("generated complex is valid");
        let k = if rng.gen_bool(0.3) && k.simplex_count() <= 30 {
            equiflow_core::barycentric_subdivision(&k)
        } else {
            k
        };
        if k.simplex_count() <= 200 {
            assert!(k.is_regular(), "generated actions are regular by construction");
            return k;
        }
    }
}

/// A random face-closed subcomplex (possibly empty).
pub fn random_subcomplex(k: &Arc<GComplex>, rng: &mut ChaCha8Rng) -> Subcomplex {
    let seeds: Vec<usize> =
        (0..k.simplex_count()).filter(|_| rng.gen_bool(0.3)).collect();
    Subcomplex::closure_of(Arc::clone(k), &seeds)
}

/// A random nonempty invariant face-closed subcomplex.
pub fn random_invariant_subcomplex(k: &Arc<GComplex>, rng: &mut ChaCha8Rng) -> Subcomplex {
    let mut seeds: Vec<usize> =
        (0..k.simplex_count()).filter(|_| rng.gen_bool(0.2)).collect();
    if seeds.is_empty() {
        seeds.push(rng.gen_range(0..k.simplex_count()));
    }
    let saturated: Vec<usize> = seeds
        .iter()
        .flat_map(|&id| k.group().elements().map(move |g| (g, id)))
        .map(|(g, id)| k.act_simplex(g, id))
        .collect();
    let a = Subcomplex::closure_of(Arc::clone(k), &saturated);
    assert!(a.is_invariant() && !a.is_empty());
    a
}
