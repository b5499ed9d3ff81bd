//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Everything here is exact integer arithmetic; there are no tolerances.

mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{oracle_decide, random_gcomplex, random_invariant_subcomplex, random_subcomplex};
use equiflow_core::*;

const YES_ENTRIES: [&str; 5] = ["circle3", "circle3-rot", "circle4-anti", "torus7", "torus7-rot"];
const NO_ENTRIES: [&str; 5] =
    ["circle6-refl", "sphere-oct", "sphere-oct-anti", "sphere-oct-refl", "two-spheres"];

fn alternating_sum(betti: &[usize]) -> i64 {
    betti
        .iter()
        .enumerate()
        .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

type AbsByClass = BTreeMap<Vec<usize>, i64>;
type ChisBySubgroup = BTreeMap<Vec<usize>, Vec<i64>>;

/// Pipeline answers in the oracle's vocabulary, for criterion 9.
fn pipeline_summary(strat: &Stratification) -> (bool, AbsByClass, ChisBySubgroup) {
    let decision = decide_path_field(strat);
    let per_class: BTreeMap<Vec<usize>, i64> = strat
        .classes()
        .iter()
        .map(|c| {
            (
                c.representative.elements().to_vec(),
                abs_chi(strat, &c.representative).unwrap(),
            )
        })
        .collect();
    let per_subgroup: BTreeMap<Vec<usize>, Vec<i64>> = strat
        .strata()
        .iter()
        .map(|st| {
            let mut chis: Vec<i64> = st.components.iter().map(|c| c.chi_c).collect();
            chis.sort_unstable();
            (st.subgroup.elements().to_vec(), chis)
        })
        .collect();
    (decision.verdict.is_yes(), per_class, per_subgroup)
}

#[test]
fn acceptance_1_catalog_decisions() {
    for name in YES_ENTRIES {
        let k = catalog(name).unwrap();
        let d = decide_path_field(&strata(&k).unwrap());
        assert!(d.verdict.is_yes(), "{name} must decide YES");
        assert!(d.witnesses.is_empty(), "{name} must have no witnesses");
    }
    let expected_witness_chis: [Vec<i64>; 5] =
        [vec![-1, -1, 1, 1], vec![2], vec![2], vec![1, 1], vec![2, 2]];
    for (name, expected) in NO_ENTRIES.iter().zip(&expected_witness_chis) {
        let k = catalog(name).unwrap();
        let d = decide_path_field(&strata(&k).unwrap());
        assert!(!d.verdict.is_yes(), "{name} must decide NO");
        let mut chis: Vec<i64> = d.witnesses.iter().map(|w| w.chi_c).collect();
        chis.sort_unstable();
        assert_eq!(&chis, expected, "{name}: witness chi_c values");
    }
    println!("acceptance 1 (catalog decisions and witnesses): PASS");
}

#[test]
fn acceptance_2_abs_chi_additivity() {
    for name in catalog_names() {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        for st in s.strata() {
            let h = &st.subgroup;
            let fixed = fixed_subcomplex(&k, h).unwrap();
            let total: i64 = s
                .strata()
                .iter()
                .filter(|other| h.is_subset_of(&other.subgroup))
                .flat_map(|other| other.components.iter().map(|c| c.chi_c))
                .sum();
            assert_eq!(
                total,
                chi_subcomplex(&fixed),
                "{name}: additivity over strata inside the fixed set of {:?}",
                h.elements()
            );
        }
    }
    println!("acceptance 2 (chi additivity over strata): PASS");
}

#[test]
fn acceptance_3_euler_poincare() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in catalog_names() {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        let mut subcomplexes = vec![Subcomplex::full(Arc::clone(&k))];
        for st in s.strata() {
            subcomplexes.push(fixed_subcomplex(&k, &st.subgroup).unwrap());
            for c in &st.components {
                subcomplexes.push(c.closure.clone());
            }
        }
        for _ in 0..10 {
            subcomplexes.push(random_subcomplex(&k, &mut rng));
        }
        for l in &subcomplexes {
            assert_eq!(
                alternating_sum(&betti(l)),
                chi_subcomplex(l),
                "{name}: Euler-Poincare on a subcomplex with {} cells",
                l.len()
            );
        }
    }
    println!("acceptance 3 (Euler-Poincare, catalog + 100 random subcomplexes): PASS");
}

#[test]
fn acceptance_4_matching_euler_identity() {
    for name in catalog_names() {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        for m in [build_matching(&s), cancel(&s, &build_matching(&s))] {
            m.validate(&s).unwrap_or_else(|e| panic!("{name}: {e}"));
            for st in s.strata() {
                for c in &st.components {
                    let critical_sum: i64 = c
                        .open_simplices
                        .iter()
                        .filter(|&&id| m.partner_of(id).is_none())
                        .map(|&id| if k.simplex(id).dim() % 2 == 0 { 1i64 } else { -1 })
                        .sum();
                    assert_eq!(critical_sum, c.chi_c, "{name}: Euler identity per component");
                }
            }
        }
    }
    println!("acceptance 4 (matching Euler identity, with and without cancel): PASS");
}

#[test]
fn acceptance_5_equivariance_suite() {
    let nontrivial = ["circle3-rot", "circle6-refl", "circle4-anti", "sphere-oct-anti",
        "sphere-oct-refl", "torus7-rot"];
    for name in nontrivial {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        let sd = barycentric_subdivision(&k);

        // Subdivision commutes with the action: the induced vertex action on
        // the subdivision equals the action recomputed from the parent's
        // vertex permutations, and chains map to chains of images.
        for g in k.group().elements() {
            for id in 0..k.simplex_count() {
                let mut image: Vec<usize> =
                    k.simplex(id).vertices().iter().map(|&v| k.act_vertex(g, v)).collect();
                image.sort_unstable();
                let expected = k.id_of(&Simplex::new(image).unwrap()).unwrap();
                assert_eq!(sd.act_vertex(g, id), expected, "{name}: subdivision commutes");
            }
            for chain_id in 0..sd.simplex_count() {
                let chain = sd.simplex(chain_id).vertices();
                let mut image: Vec<usize> =
                    chain.iter().map(|&sid| sd.act_vertex(g, sid)).collect();
                image.sort_unstable();
                let expected = sd.id_of(&Simplex::new(image).unwrap()).unwrap();
                assert_eq!(sd.act_simplex(g, chain_id), expected, "{name}: chains map to chains");
            }
        }

        // Strata map to conjugate strata, components bijectively.
        for g in k.group().elements() {
            for st in s.strata() {
                let target = s.stratum(&st.subgroup.conjugated_by(k.group(), g)).unwrap();
                let mut mapped: Vec<usize> =
                    st.simplices.iter().map(|&id| k.act_simplex(g, id)).collect();
                mapped.sort_unstable();
                assert_eq!(mapped, target.simplices, "{name}: stratum translation");
                let mut mapped_comps: Vec<(i64, Vec<usize>)> = st
                    .components
                    .iter()
                    .map(|c| {
                        let mut cells: Vec<usize> =
                            c.open_simplices.iter().map(|&id| k.act_simplex(g, id)).collect();
                        cells.sort_unstable();
                        (c.chi_c, cells)
                    })
                    .collect();
                mapped_comps.sort();
                let mut target_comps: Vec<(i64, Vec<usize>)> = target
                    .components
                    .iter()
                    .map(|c| (c.chi_c, c.open_simplices.clone()))
                    .collect();
                target_comps.sort();
                assert_eq!(mapped_comps, target_comps, "{name}: component translation");
            }
        }

        // Matchings and displacement maps are orbit-closed.
        let m = build_matching(&s);
        let pairs: std::collections::HashSet<(usize, usize)> =
            m.pairs().iter().copied().collect();
        for g in k.group().elements() {
            for &(a, b) in m.pairs() {
                assert!(
                    pairs.contains(&(k.act_simplex(g, a), k.act_simplex(g, b))),
                    "{name}: matching is orbit-closed"
                );
            }
        }
        let f = build_displacement(&k, None).unwrap();
        for g in k.group().elements() {
            for id in 0..k.simplex_count() {
                assert_eq!(
                    f.image(k.act_simplex(g, id)),
                    k.act_simplex(g, f.image(id)),
                    "{name}: displacement is orbit-closed"
                );
            }
        }
    }
    println!("acceptance 5 (equivariance suite, zero violations): PASS");
}

#[test]
fn acceptance_6_displacement_witnesses() {
    for name in ["circle3", "circle3-rot", "circle4-anti", "torus7"] {
        let k = catalog(name).unwrap();
        let f = build_displacement(&k, None).unwrap();
        let cert = verify_displacement(&k, &f);
        assert!(cert.pass, "{name}: certificate must pass");
        assert!(cert.singular.is_empty(), "{name}: zero singular simplices");
        assert!(cert.flagged_chains.is_empty(), "{name}: zero flagged chains");
    }
    println!("acceptance 6 (certified fixed-point-free displacements): PASS");
}

#[test]
fn acceptance_7_cipd_cross_implication() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in YES_ENTRIES {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        assert!(decide_path_field(&s).verdict.is_yes());
        for i in 0..50 {
            let a = random_invariant_subcomplex(&k, &mut rng);
            let d = decide_cipd(&s, &a).unwrap();
            assert!(d.verdict.is_yes(), "{name}: cipd must be YES (sample {i})");
        }
    }
    let k = catalog("two-spheres").unwrap();
    let s = strata(&k).unwrap();
    let v0 = k.id_of(&Simplex::new(vec![0]).unwrap()).unwrap();
    let a = Subcomplex::closure_of(Arc::clone(&k), &[v0]);
    let d = decide_cipd(&s, &a).unwrap();
    assert!(!d.verdict.is_yes());
    assert_eq!(d.violations.len(), 1, "exactly one violating component");
    println!("acceptance 7 (cipd cross-implication, 250 random fixed sets): PASS");
}

#[test]
fn acceptance_8_subdivision_invariance() {
    for name in catalog_names() {
        let k = catalog(name).unwrap();
        let s0 = strata(&k).unwrap();
        let (v0, abs0, _) = pipeline_summary(&s0);
        let mut current = Arc::clone(&k);
        for round in 1..=2 {
            current = barycentric_subdivision(&current);
            let s = strata(&current).unwrap();
            let (v, abs, _) = pipeline_summary(&s);
            assert_eq!(v, v0, "{name}: verdict after {round} subdivisions");
            assert_eq!(abs, abs0, "{name}: abs chi per orbit type after {round} subdivisions");
        }
    }
    println!("acceptance 8 (verdicts and abs chi invariant under subdivision): PASS");
}

#[test]
fn acceptance_9_oracle_equivalence() {
    for name in catalog_names() {
        let k = catalog(name).unwrap();
        let s = strata(&k).unwrap();
        let (verdict, per_class, per_subgroup) = pipeline_summary(&s);
        let oracle = oracle_decide(&k);
        assert_eq!(verdict, oracle.verdict_yes, "{name}: verdict");
        assert_eq!(per_class, oracle.per_class_abs, "{name}: per-class abs chi");
        assert_eq!(per_subgroup, oracle.per_subgroup_chis, "{name}: per-stratum chi multisets");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..25 {
        let k = random_gcomplex(&mut rng);
        assert!(k.simplex_count() <= 200);
        assert!(k.group().order() <= 8);
        let s = strata(&k).unwrap();
        let (verdict, per_class, per_subgroup) = pipeline_summary(&s);
        let oracle = oracle_decide(&k);
        assert_eq!(verdict, oracle.verdict_yes, "random {i}: verdict");
        assert_eq!(per_class, oracle.per_class_abs, "random {i}: per-class abs chi");
        assert_eq!(per_subgroup, oracle.per_subgroup_chis, "random {i}: chi multisets");
    }
    println!("acceptance 9 (oracle equivalence, catalog + 25 random complexes): PASS");
}
