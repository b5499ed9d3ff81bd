//! Finite groups as multiplication tables, with subgroup enumeration,
//! conjugacy classes of subgroups, and normalizers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

/// Default cap on the group order for exhaustive subgroup enumeration.
pub const DEFAULT_MAX_GROUP_ORDER: usize = 48;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table malformed at row {row}, column {col}")]
    MalformedTable { row: usize, col: usize },
    #[error("multiplication table has no two-sided identity")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("associativity fails on the triple ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("group order {order} exceeds the enumeration bound {bound}")]
    GroupTooLarge { order: usize, bound: usize },
    #[error("invalid subgroup {elements:?}: {reason}")]
    InvalidSubgroup { elements: Vec<usize>, reason: String },
}

/// A finite group given by its full multiplication table.
///
/// Elements are the indices `0..order`; `table[a][b]` is the product `a·b`.
/// Construction via [`build_group`] validates the group axioms exhaustively,
/// which is cheap at the intended scale (order at most a few dozen).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order
    }

    /// The conjugate g·a·g⁻¹.
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn is_central(&self, g: usize) -> bool {
        self.elements().all(|a| self.mul(g, a) == self.mul(a, g))
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements().filter(|&g| self.is_central(g)).collect()
    }

    /// The group of order 1.
    pub fn trivial() -> FiniteGroup {
        build_group(vec![vec![0]], None).expect("trivial group table is valid")
    }

    /// The cyclic group of order `n` with `table[a][b] = (a+b) mod n`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1, "cyclic group order must be positive");
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let names = (0..n)
            .map(|i| if i == 0 { "e".to_string() } else { format!("r{i}") })
            .collect();
        build_group(table, Some(names)).expect("cyclic group table is valid")
    }
}

/// Validates a multiplication table and returns the group.
///
/// Errors name the first violating tuple found, scanning rows in order.
pub fn build_group(table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<FiniteGroup, GroupError> {
    let order = table.len();
    if order == 0 {
        return Err(GroupError::MalformedTable { row: 0, col: 0 });
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != order {
            return Err(GroupError::MalformedTable { row, col: r.len().min(order) });
        }
        for (col, &v) in r.iter().enumerate() {
            if v >= order {
                return Err(GroupError::MalformedTable { row, col });
            }
        }
    }
    let identity = (0..order)
        .find(|&e| (0..order).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or(GroupError::NoIdentity)?;
    let mut inverses = Vec::with_capacity(order);
    for (a, row) in table.iter().enumerate() {
        let inv = (0..order)
            .find(|&b| row[b] == identity && table[b][a] == identity)
            .ok_or(GroupError::NoInverse { element: a })?;
        inverses.push(inv);
    }
    for a in 0..order {
        for b in 0..order {
            for c in 0..order {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(GroupError::NotAssociative { a, b, c });
                }
            }
        }
    }
    let names = match names {
        Some(n) if n.len() == order => n,
        _ => (0..order)
            .map(|i| if i == identity { "e".to_string() } else { format!("g{i}") })
            .collect(),
    };
    Ok(FiniteGroup { order, names, table, identity, inverses })
}

/// A subgroup, stored as the sorted set of its element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    /// Validates closure, identity, inverses and the Lagrange divisibility.
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Result<Subgroup, GroupError> {
        elements.sort_unstable();
        elements.dedup();
        let invalid = |reason: &str| GroupError::InvalidSubgroup {
            elements: elements.clone(),
            reason: reason.to_string(),
        };
        if elements.iter().any(|&a| a >= group.order()) {
            return Err(invalid("element index out of range"));
        }
        if !elements.contains(&group.identity()) {
            return Err(invalid("missing identity"));
        }
        for &a in &elements {
            if elements.binary_search(&group.inv(a)).is_err() {
                return Err(invalid("not closed under inverses"));
            }
            for &b in &elements {
                if elements.binary_search(&group.mul(a, b)).is_err() {
                    return Err(invalid("not closed under multiplication"));
                }
            }
        }
        if group.order() % elements.len() != 0 {
            return Err(invalid("order does not divide the group order"));
        }
        Ok(Subgroup { elements })
    }

    /// The subgroup generated by `generators` (closure under products).
    pub fn generated(group: &FiniteGroup, generators: &[usize]) -> Subgroup {
        let mut elements: BTreeSet<usize> = BTreeSet::new();
        elements.insert(group.identity());
        let mut queue: VecDeque<usize> = generators.iter().copied().collect();
        while let Some(g) = queue.pop_front() {
            if elements.insert(g) {
                for &h in elements.clone().iter() {
                    queue.push_back(group.mul(g, h));
                    queue.push_back(group.mul(h, g));
                }
                queue.push_back(group.inv(g));
            }
        }
        Subgroup { elements: elements.into_iter().collect() }
    }

    pub fn trivial(group: &FiniteGroup) -> Subgroup {
        Subgroup { elements: vec![group.identity()] }
    }

    pub fn full(group: &FiniteGroup) -> Subgroup {
        Subgroup { elements: (0..group.order()).collect() }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, a: usize) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&a| other.contains(a))
    }

    /// The conjugate subgroup g·H·g⁻¹.
    pub fn conjugated_by(&self, group: &FiniteGroup, g: usize) -> Subgroup {
        let mut elements: Vec<usize> =
            self.elements.iter().map(|&a| group.conjugate(g, a)).collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    /// Human-readable label like `{e,r2}` using the group's element names.
    pub fn label(&self, group: &FiniteGroup) -> String {
        let names: Vec<&str> = self.elements.iter().map(|&a| group.name(a)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Enumerates every subgroup, using the default order bound.
pub fn subgroups(group: &FiniteGroup) -> Result<Vec<Subgroup>, GroupError> {
    subgroups_with_bound(group, DEFAULT_MAX_GROUP_ORDER)
}

/// Enumerates every subgroup of `group`, sorted by order then element set.
///
/// Seeds with all subgroups generated by at most two elements, then closes
/// the collection by repeatedly adjoining single generators; every subgroup
/// is reached because any generating set can be added one element at a time.
pub fn subgroups_with_bound(group: &FiniteGroup, bound: usize) -> Result<Vec<Subgroup>, GroupError> {
    let n = group.order();
    if n > bound {
        return Err(GroupError::GroupTooLarge { order: n, bound });
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<Subgroup> = VecDeque::new();
    for a in 0..n {
        for b in a..n {
            let h = Subgroup::generated(group, &[a, b]);
            if seen.insert(h.elements.clone()) {
                queue.push_back(h);
            }
        }
    }
    while let Some(h) = queue.pop_front() {
        for x in 0..n {
            if h.contains(x) {
                continue;
            }
            let mut gens = h.elements.clone();
            gens.push(x);
            let bigger = Subgroup::generated(group, &gens);
            if seen.insert(bigger.elements.clone()) {
                queue.push_back(bigger);
            }
        }
    }
    let mut subs: Vec<Subgroup> = seen.into_iter().map(|elements| Subgroup { elements }).collect();
    subs.sort_by(|a, b| (a.order(), a.elements()).cmp(&(b.order(), b.elements())));
    Ok(subs)
}

/// The normalizer NH = { g : g·H·g⁻¹ = H }.
pub fn normalizer(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    let elements: Vec<usize> = group
        .elements()
        .filter(|&g| h.conjugated_by(group, g) == *h)
        .collect();
    Subgroup { elements }
}

/// A conjugacy class of subgroups: one orbit type of an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitType {
    pub id: usize,
    /// Lexicographically least member of the class.
    pub representative: Subgroup,
    pub conjugates: Vec<Subgroup>,
}

/// Conjugacy classes of subgroups with the subconjugacy relation.
///
/// Classes are ordered with larger subgroups first, so that whenever class
/// `i` is subconjugate to class `j` we have `j <= i`. This is the order in
/// which strata are extended during the inductive constructions.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    pub classes: Vec<OrbitType>,
    /// `subconjugate[i][j]`: some conjugate of class i's representative is
    /// contained in class j's representative.
    pub subconjugate: Vec<Vec<bool>>,
}

impl ConjugacyClasses {
    pub fn class_index_of(&self, h: &Subgroup) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.conjugates.iter().any(|k| k == h))
    }
}

/// Partitions `subs` into conjugacy classes.
pub fn conjugacy_classes(group: &FiniteGroup, subs: &[Subgroup]) -> ConjugacyClasses {
    let mut class_of: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut classes: Vec<OrbitType> = Vec::new();
    for h in subs {
        if class_of.contains_key(h.elements()) {
            continue;
        }
        let mut conj: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in group.elements() {
            conj.insert(h.conjugated_by(group, g).elements.clone());
        }
        let id = classes.len();
        for c in &conj {
            class_of.insert(c.clone(), id);
        }
        let conjugates: Vec<Subgroup> =
            conj.into_iter().map(|elements| Subgroup { elements }).collect();
        classes.push(OrbitType { id, representative: conjugates[0].clone(), conjugates });
    }
    // Larger isotropy first; ties broken by the representative's element set.
    classes.sort_by(|a, b| {
        (b.representative.order(), a.representative.elements())
            .cmp(&(a.representative.order(), b.representative.elements()))
    });
    for (id, c) in classes.iter_mut().enumerate() {
        c.id = id;
    }
    let k = classes.len();
    let mut subconjugate = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            subconjugate[i][j] = classes[i]
                .conjugates
                .iter()
                .any(|h| h.is_subset_of(&classes[j].representative));
        }
    }
    ConjugacyClasses { classes, subconjugate }
}
