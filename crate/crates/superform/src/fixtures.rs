//! Small reference complexes used throughout the tests, the identity suites
//! and the guide.

use std::sync::Arc;

use crate::polyalg::Rat;
use crate::polyhedra::{PolyhedralComplex, Polyhedron};

fn pt(coords: &[i64]) -> Vec<Rat> {
    coords.iter().map(|&c| Rat::from(c)).collect()
}

fn cell(id: &str, ambient: usize, vertices: &[&[i64]], rays: &[&[i64]]) -> Polyhedron {
    Polyhedron::new(
        id,
        ambient,
        vertices.iter().map(|v| pt(v)).collect(),
        rays.iter().map(|v| pt(v)).collect(),
    )
    .expect("fixture cell")
}

fn complex(
    ambient: usize,
    cells: Vec<Polyhedron>,
    pairs: &[(&str, &str)],
) -> Arc<PolyhedralComplex> {
    let pairs: Vec<(String, String)> = pairs
        .iter()
        .map(|(c, p)| (c.to_string(), p.to_string()))
        .collect();
    Arc::new(PolyhedralComplex::new(ambient, cells, &pairs).expect("fixture complex"))
}

/// The unit segment on the x-axis of the plane, with both endpoints.
pub fn segment() -> Arc<PolyhedralComplex> {
    complex(
        2,
        vec![
            cell("a", 2, &[&[0, 0]], &[]),
            cell("b", 2, &[&[1, 0]], &[]),
            cell("ab", 2, &[&[0, 0], &[1, 0]], &[]),
        ],
        &[("a", "ab"), ("b", "ab")],
    )
}

/// The filled triangle with vertices (0,0), (1,0), (0,1).
pub fn solid_triangle() -> Arc<PolyhedralComplex> {
    complex(
        2,
        vec![
            cell("a", 2, &[&[0, 0]], &[]),
            cell("b", 2, &[&[1, 0]], &[]),
            cell("c", 2, &[&[0, 1]], &[]),
            cell("ab", 2, &[&[0, 0], &[1, 0]], &[]),
            cell("bc", 2, &[&[1, 0], &[0, 1]], &[]),
            cell("ca", 2, &[&[0, 1], &[0, 0]], &[]),
            cell("abc", 2, &[&[0, 0], &[1, 0], &[0, 1]], &[]),
        ],
        &[
            ("a", "ab"),
            ("b", "ab"),
            ("b", "bc"),
            ("c", "bc"),
            ("c", "ca"),
            ("a", "ca"),
            ("ab", "abc"),
            ("bc", "abc"),
            ("ca", "abc"),
        ],
    )
}

/// The boundary of [`solid_triangle`]: three vertices and three edges.
pub fn triangle_boundary() -> Arc<PolyhedralComplex> {
    complex(
        2,
        vec![
            cell("a", 2, &[&[0, 0]], &[]),
            cell("b", 2, &[&[1, 0]], &[]),
            cell("c", 2, &[&[0, 1]], &[]),
            cell("ab", 2, &[&[0, 0], &[1, 0]], &[]),
            cell("bc", 2, &[&[1, 0], &[0, 1]], &[]),
            cell("ca", 2, &[&[0, 1], &[0, 0]], &[]),
        ],
        &[
            ("a", "ab"),
            ("b", "ab"),
            ("b", "bc"),
            ("c", "bc"),
            ("c", "ca"),
            ("a", "ca"),
        ],
    )
}

/// The standard tropical line: the origin with rays in the directions
/// e1, e2 and -e1-e2.
pub fn tropical_line() -> Arc<PolyhedralComplex> {
    complex(
        2,
        vec![
            cell("o", 2, &[&[0, 0]], &[]),
            cell("e1", 2, &[&[0, 0]], &[&[1, 0]]),
            cell("e2", 2, &[&[0, 0]], &[&[0, 1]]),
            cell("e3", 2, &[&[0, 0]], &[&[-1, -1]]),
        ],
        &[("o", "e1"), ("o", "e2"), ("o", "e3")],
    )
}

/// The boundary of the standard tetrahedron in 3-space: 4 vertices, 6 edges,
/// 4 triangles, no solid cell.
pub fn tetrahedron_boundary() -> Arc<PolyhedralComplex> {
    let v: [(&str, &[i64]); 4] = [
        ("a", &[0, 0, 0]),
        ("b", &[1, 0, 0]),
        ("c", &[0, 1, 0]),
        ("d", &[0, 0, 1]),
    ];
    let mut cells = Vec::new();
    for (id, coords) in &v {
        cells.push(cell(id, 3, &[coords], &[]));
    }
    let mut pairs: Vec<(String, String)> = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let id = format!("{}{}", v[i].0, v[j].0);
            cells.push(cell(&id, 3, &[v[i].1, v[j].1], &[]));
            pairs.push((v[i].0.to_string(), id.clone()));
            pairs.push((v[j].0.to_string(), id.clone()));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                let id = format!("{}{}{}", v[i].0, v[j].0, v[k].0);
                cells.push(cell(&id, 3, &[v[i].1, v[j].1, v[k].1], &[]));
                for (x, y) in [(i, j), (i, k), (j, k)] {
                    pairs.push((format!("{}{}", v[x].0, v[y].0), id.clone()));
                }
            }
        }
    }
    let pairs: Vec<(&str, &str)> = pairs
        .iter()
        .map(|(c, p)| (c.as_str(), p.as_str()))
        .collect();
    complex(3, cells, &pairs)
}

/// Two segments crossing at an interior point that is not a cell; fails
/// validation by construction.
pub fn crossing_segments() -> Arc<PolyhedralComplex> {
    complex(
        2,
        vec![
            cell("p", 2, &[&[0, 0]], &[]),
            cell("q", 2, &[&[1, 1]], &[]),
            cell("r", 2, &[&[1, 0]], &[]),
            cell("s", 2, &[&[0, 1]], &[]),
            cell("pq", 2, &[&[0, 0], &[1, 1]], &[]),
            cell("rs", 2, &[&[1, 0], &[0, 1]], &[]),
        ],
        &[("p", "pq"), ("q", "pq"), ("r", "rs"), ("s", "rs")],
    )
}
