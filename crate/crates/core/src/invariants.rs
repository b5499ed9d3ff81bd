//! Euler characteristics and Betti numbers.
//!
//! `chi_subcomplex` is the alternating cell count of a closed subcomplex.
//! `chi_c` is the alternating count of the *open* simplices of a stratum
//! component — the compactly-supported Euler characteristic of the open
//! stratum piece. For the open manifold components these criteria consume,
//! the homotopy Euler characteristic agrees with `chi_c` up to sign, and
//! every criterion depends only on absolute values and vanishing, which is
//! why the exact cell count suffices. Betti numbers are ranks of rational
//! homology, computed by fraction-free integer elimination so there are no
//! tolerances anywhere.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::complex::Subcomplex;
use crate::group::Subgroup;
use crate::stratify::{Component, Stratification, StratifyError};

/// Alternating cell count Σ_d (−1)^d · f_d of a face-closed subcomplex.
pub fn chi_subcomplex(l: &Subcomplex) -> i64 {
    l.ids()
        .iter()
        .map(|&id| if l.complex().simplex(id).dim() % 2 == 0 { 1i64 } else { -1i64 })
        .sum()
}

/// Alternating count of a component's open simplices.
pub fn chi_c(c: &Component) -> i64 {
    c.open_simplices
        .iter()
        .map(|&id| if c.closure.complex().simplex(id).dim() % 2 == 0 { 1i64 } else { -1i64 })
        .sum()
}

/// Σ over components of |chi_c|, for the stratum of exact isotropy `h`.
pub fn abs_chi(strat: &Stratification, h: &Subgroup) -> Result<i64, StratifyError> {
    Ok(strat.stratum(h)?.components.iter().map(|c| c.chi_c.abs()).sum())
}

/// Rational Betti numbers of a subcomplex via boundary-matrix ranks.
///
/// Returns `b_0..b_dim`; empty for the empty subcomplex.
pub fn betti(l: &Subcomplex) -> Vec<usize> {
    let Some(dim) = l.dim() else {
        return Vec::new();
    };
    // Simplices of each dimension, in id order, with positions for lookup.
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); dim + 1];
    for &id in l.ids() {
        by_dim[l.complex().simplex(id).dim()].push(id);
    }
    let ranks: Vec<usize> =
        (1..=dim).map(|d| rank(boundary_matrix(l, &by_dim[d - 1], &by_dim[d]))).collect();
    (0..=dim)
        .map(|d| {
            let n = by_dim[d].len();
            let r_down = if d == 0 { 0 } else { ranks[d - 1] };
            let r_up = if d == dim { 0 } else { ranks[d] };
            n - r_down - r_up
        })
        .collect()
}

/// Signed boundary matrix: rows indexed by (d−1)-simplices, columns by
/// d-simplices; entry ±1 when the row simplex is a facet of the column one.
fn boundary_matrix(l: &Subcomplex, rows: &[usize], cols: &[usize]) -> Vec<Vec<BigInt>> {
    let row_pos: std::collections::HashMap<usize, usize> =
        rows.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut m = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (j, &cid) in cols.iter().enumerate() {
        let s = l.complex().simplex(cid);
        for (drop, f) in s.facets().into_iter().enumerate() {
            let fid = l.complex().id_of(&f).expect("face of a stored simplex is stored");
            let i = row_pos[&fid];
            m[i][j] = if drop % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        }
    }
    m
}

/// Rank over the rationals by Bareiss fraction-free elimination.
fn rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 || m[0].is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Per-component chi data for one orbit type.
#[derive(Debug, Clone)]
pub struct EulerRow {
    pub class_id: usize,
    pub representative: Subgroup,
    /// chi of the fixed subcomplex of the representative.
    pub chi_fixed: i64,
    /// (component id, chi_c, dim, open cell count) for the representative's stratum.
    pub components: Vec<(usize, i64, usize, usize)>,
    /// Σ |chi_c| over those components.
    pub abs_chi: i64,
    /// Betti numbers of each component closure, when requested.
    pub betti_closures: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone)]
pub struct EulerReport {
    pub rows: Vec<EulerRow>,
}

/// Computes per-orbit-type Euler data over the representatives.
pub fn euler_report(strat: &Stratification, with_betti: bool) -> EulerReport {
    let k = strat.complex();
    let rows = strat
        .classes()
        .iter()
        .map(|class| {
            let stratum = strat.stratum(&class.representative).expect("representative realized");
            let fixed = crate::stratify::fixed_subcomplex(k, &class.representative)
                .expect("stratification exists, so the complex is regular");
            let components: Vec<(usize, i64, usize, usize)> = stratum
                .components
                .iter()
                .map(|c| (c.id, c.chi_c, c.dim, c.open_simplices.len()))
                .collect();
            let abs_chi = stratum.components.iter().map(|c| c.chi_c.abs()).sum();
            let betti_closures = with_betti
                .then(|| stratum.components.iter().map(|c| betti(&c.closure)).collect());
            EulerRow {
                class_id: class.id,
                representative: class.representative.clone(),
                chi_fixed: chi_subcomplex(&fixed),
                components,
                abs_chi,
                betti_closures,
            }
        })
        .collect();
    EulerReport { rows }
}
