//! Decide whether a finite group acting simplicially on a triangulated
//! manifold admits a fixed-point-free equivariant deformation, and whether a
//! prescribed invariant subcomplex can be the exact fixed set of one.
//!
//! The pipeline: validate a [`GComplex`] (a simplicial complex with a group
//! action), stratify it by isotropy subgroup, compute Euler characteristics of
//! the open strata components, and evaluate the vanishing criteria. Witness
//! structures — equivariant acyclic matchings and barycentric displacement
//! maps — make the singularity accounting concrete and machine-checkable.
//!
//! All arithmetic is exact (integers and big-integer ranks); every algorithm
//! is deterministic, so reports are byte-stable across runs.

pub mod catalog;
pub mod complex;
pub mod decide;
pub mod displacement;
pub mod group;
pub mod invariants;
pub mod json;
pub mod matching;
pub mod stratify;

pub use catalog::{catalog, catalog_names, CatalogError};
pub use complex::{
    barycentric_subdivision, build_complex, ensure_regular, ComplexError, GComplex, Simplex,
    Subcomplex,
};
pub use decide::{decide_cipd, decide_path_field, CipdDecision, DecideError, PathFieldDecision, Verdict};
pub use displacement::{
    build_displacement, verify_displacement, DisplacementCertificate, DisplacementError,
    DisplacementMap,
};
pub use group::{
    build_group, conjugacy_classes, normalizer, subgroups, subgroups_with_bound, ConjugacyClasses,
    FiniteGroup, GroupError, OrbitType, Subgroup, DEFAULT_MAX_GROUP_ORDER,
};
pub use invariants::{abs_chi, betti, chi_c, chi_subcomplex, euler_report, EulerReport, EulerRow};
pub use matching::{build_matching, cancel, morse_report, Matching, MatchingError, MorseRow};
pub use stratify::{
    closure_meets, components, fixed_subcomplex, strata, Component, Stratification, StratifyError,
    StratumClass, StratumData,
};

#[cfg(test)]
mod thread_safety {
    use super::*;

    // Everything is immutable after construction and shareable across
    // threads; keep that a compile-time fact.
    #[test]
    fn core_types_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<FiniteGroup>();
        check::<Subgroup>();
        check::<GComplex>();
        check::<Subcomplex>();
        check::<Stratification>();
        check::<Component>();
        check::<Matching>();
        check::<DisplacementMap>();
        check::<PathFieldDecision>();
        check::<CipdDecision>();
    }
}
