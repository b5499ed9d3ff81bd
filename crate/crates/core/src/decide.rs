//! The decision procedures: existence of a non-singular equivariant path
//! field (equivalently, a fixed-point-free equivariant deformation), and
//! realizability of a prescribed invariant subcomplex as an exact fixed set.

use thiserror::Error;

use crate::complex::Subcomplex;
use crate::group::Subgroup;
use crate::invariants::abs_chi;
use crate::stratify::{closure_meets, Stratification, StratifyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("the prescribed fixed set must be nonempty")]
    EmptyFixedSet,
    #[error("the prescribed fixed set is not invariant under the action")]
    NotInvariant,
    #[error("arguments belong to different parent complexes")]
    ParentMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

/// A stratum component cited as an obstruction.
#[derive(Debug, Clone)]
pub struct Witness {
    pub class_id: usize,
    pub isotropy: Subgroup,
    pub component_id: usize,
    pub chi_c: i64,
    pub dim: usize,
    pub open_cells: usize,
    /// Vertex set of the component's least simplex, for reporting.
    pub least_simplex: Vec<usize>,
}

/// Outcome of the path-field decision: yes iff Σ|chi_c| vanishes for every
/// realized orbit type.
#[derive(Debug, Clone)]
pub struct PathFieldDecision {
    pub verdict: Verdict,
    /// (class id, representative, abs chi) per realized orbit type, in order.
    pub per_type: Vec<(usize, Subgroup, i64)>,
    /// Components with chi_c ≠ 0, over the representatives' strata.
    pub witnesses: Vec<Witness>,
}

fn witnesses_of_type(strat: &Stratification, h: &Subgroup, class_id: usize) -> Vec<Witness> {
    let k = strat.complex();
    strat
        .stratum(h)
        .expect("representative realized")
        .components
        .iter()
        .filter(|c| c.chi_c != 0)
        .map(|c| Witness {
            class_id,
            isotropy: h.clone(),
            component_id: c.id,
            chi_c: c.chi_c,
            dim: c.dim,
            open_cells: c.open_simplices.len(),
            least_simplex: k.simplex(c.open_simplices[0]).vertices().to_vec(),
        })
        .collect()
}

/// Decides existence of a non-singular equivariant path field.
pub fn decide_path_field(strat: &Stratification) -> PathFieldDecision {
    let mut per_type = Vec::new();
    let mut witnesses = Vec::new();
    for class in strat.classes() {
        let a = abs_chi(strat, &class.representative).expect("representative realized");
        per_type.push((class.id, class.representative.clone(), a));
        if a != 0 {
            witnesses.extend(witnesses_of_type(strat, &class.representative, class.id));
        }
    }
    let verdict = if witnesses.is_empty() { Verdict::Yes } else { Verdict::No };
    PathFieldDecision { verdict, per_type, witnesses }
}

/// An orbit type whose fixed subcomplex has dimension below two. The
/// fixed-set realization criterion assumes dimension at least two there, so
/// the verdict stands but is advisory for that type.
#[derive(Debug, Clone)]
pub struct DimensionWarning {
    pub class_id: usize,
    pub representative: Subgroup,
    pub fixed_dim: Option<usize>,
}

/// Outcome of the fixed-set realization decision.
#[derive(Debug, Clone)]
pub struct CipdDecision {
    pub verdict: Verdict,
    /// Components with chi_c ≠ 0 whose closure misses the prescribed set.
    pub violations: Vec<Witness>,
    pub warnings: Vec<DimensionWarning>,
    /// The prescribed fixed set the decision was made against.
    pub fixed_set: Subcomplex,
}

/// Decides whether the invariant subcomplex `a` can be the exact fixed set
/// of an equivariant deformation: every component with chi_c ≠ 0 must have
/// its closure meet `a`.
pub fn decide_cipd(strat: &Stratification, a: &Subcomplex) -> Result<CipdDecision, DecideError> {
    if !a.same_parent(&Subcomplex::empty(std::sync::Arc::clone(strat.complex()))) {
        return Err(DecideError::ParentMismatch);
    }
    if a.is_empty() {
        return Err(DecideError::EmptyFixedSet);
    }
    if !a.is_invariant() {
        return Err(DecideError::NotInvariant);
    }
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    for class in strat.classes() {
        let h = &class.representative;
        let fixed = crate::stratify::fixed_subcomplex(strat.complex(), h)
            .expect("stratification exists, so the complex is regular");
        let fixed_dim = fixed.dim();
        if fixed_dim.is_none_or(|d| d < 2) {
            warnings.push(DimensionWarning {
                class_id: class.id,
                representative: h.clone(),
                fixed_dim,
            });
        }
        // Checking the representative suffices: conjugate components are
        // translates and `a` is invariant.
        let stratum = strat.stratum(h).expect("representative realized");
        for c in &stratum.components {
            if c.chi_c == 0 {
                continue;
            }
            match closure_meets(c, a) {
                Ok(true) => {}
                Ok(false) => violations.extend(
                    witnesses_of_type(strat, h, class.id)
                        .into_iter()
                        .filter(|w| w.component_id == c.id),
                ),
                Err(StratifyError::NotInvariant) => return Err(DecideError::NotInvariant),
                Err(_) => return Err(DecideError::ParentMismatch),
            }
        }
    }
    let verdict = if violations.is_empty() { Verdict::Yes } else { Verdict::No };
    Ok(CipdDecision { verdict, violations, warnings, fixed_set: a.clone() })
}
