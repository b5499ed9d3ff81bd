//! Named, hand-verified example complexes used by the test suites and the
//! `catalog:` CLI scheme.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::{build_complex, ensure_regular, GComplex};
use crate::group::FiniteGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog name {name:?} (known: {known})")]
    UnknownCatalogName { name: String, known: String },
}

/// Names of all built-in examples.
pub fn catalog_names() -> &'static [&'static str] {
    &[
        "circle3",
        "circle3-rot",
        "circle6-refl",
        "circle4-anti",
        "sphere-oct",
        "sphere-oct-anti",
        "sphere-oct-refl",
        "torus7",
        "torus7-rot",
        "two-spheres",
    ]
}

fn vertex_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Vertex actions for a cyclic group generated by one permutation:
/// element k acts as the k-th power of the generator.
fn cyclic_action(order: usize, generator: Vec<usize>) -> Vec<Vec<usize>> {
    let n = generator.len();
    let mut rows = vec![identity_perm(n)];
    for _ in 1..order {
        let prev = rows.last().unwrap();
        rows.push((0..n).map(|v| generator[prev[v]]).collect());
    }
    rows
}

fn cycle_edges(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| vec![i, (i + 1) % n]).collect()
}

fn octahedron_triangles(offset: usize) -> Vec<Vec<usize>> {
    // Antipodal vertex pairs (0,1), (2,3), (4,5).
    let mut tris = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                tris.push(vec![a + offset, b + offset, c + offset]);
            }
        }
    }
    tris
}

fn torus7_triangles() -> Vec<Vec<usize>> {
    // The 7-vertex torus: orbits of {0,1,3} and {0,2,3} under i -> i+1.
    let mut tris = Vec::new();
    for i in 0..7 {
        tris.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        tris.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    tris
}

/// Returns the named example complex.
pub fn catalog(name: &str) -> Result<Arc<GComplex>, CatalogError> {
    let k = match name {
        "circle3" => build_complex(
            vertex_names(3),
            &cycle_edges(3),
            FiniteGroup::trivial(),
            vec![identity_perm(3)],
        ),
        "circle3-rot" => build_complex(
            vertex_names(3),
            &cycle_edges(3),
            FiniteGroup::cyclic(3),
            cyclic_action(3, vec![1, 2, 0]),
        ),
        "circle6-refl" => build_complex(
            vertex_names(6),
            &cycle_edges(6),
            FiniteGroup::cyclic(2),
            cyclic_action(2, vec![0, 5, 4, 3, 2, 1]),
        ),
        "circle4-anti" => build_complex(
            vertex_names(4),
            &cycle_edges(4),
            FiniteGroup::cyclic(2),
            cyclic_action(2, vec![2, 3, 0, 1]),
        ),
        "sphere-oct" => build_complex(
            vertex_names(6),
            &octahedron_triangles(0),
            FiniteGroup::trivial(),
            vec![identity_perm(6)],
        ),
        "sphere-oct-anti" => build_complex(
            vertex_names(6),
            &octahedron_triangles(0),
            FiniteGroup::cyclic(2),
            cyclic_action(2, vec![1, 0, 3, 2, 5, 4]),
        ),
        "sphere-oct-refl" => {
            // Reflection through the equatorial square 2,3,4,5: swaps the
            // poles 0 and 1. Regularized on construction.
            let k = build_complex(
                vertex_names(6),
                &octahedron_triangles(0),
                FiniteGroup::cyclic(2),
                cyclic_action(2, vec![1, 0, 2, 3, 4, 5]),
            )
            .expect("catalog entry is valid");
            return Ok(ensure_regular(&k).expect("catalog entry regularizes"));
        }
        "torus7" => build_complex(
            vertex_names(7),
            &torus7_triangles(),
            FiniteGroup::trivial(),
            vec![identity_perm(7)],
        ),
        "torus7-rot" => build_complex(
            vertex_names(7),
            &torus7_triangles(),
            FiniteGroup::cyclic(7),
            cyclic_action(7, vec![1, 2, 3, 4, 5, 6, 0]),
        ),
        "two-spheres" => {
            let mut tris = octahedron_triangles(0);
            tris.extend(octahedron_triangles(6));
            build_complex(vertex_names(12), &tris, FiniteGroup::trivial(), vec![identity_perm(12)])
        }
        _ => {
            return Err(CatalogError::UnknownCatalogName {
                name: name.to_string(),
                known: catalog_names().join(", "),
            })
        }
    };
    Ok(k.expect("catalog entry is valid"))
}
