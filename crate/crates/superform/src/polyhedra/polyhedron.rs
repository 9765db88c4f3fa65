use std::collections::BTreeSet;

use thiserror::Error;

use super::fourier_motzkin::{self as fm, LinRow, Projection, RowKind};
use crate::polyalg::{Mat, Rat};

/// One affine constraint `normal . x (<= or =) offset`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineRow {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl AffineRow {
    pub fn eval(&self, point: &[Rat]) -> Rat {
        self.normal.iter().zip(point).map(|(a, x)| a * x).sum()
    }

    fn to_lin(&self, kind: RowKind) -> LinRow {
        LinRow::new(self.normal.clone(), self.offset.clone(), kind)
    }
}

/// Exact H-representation: the affine-span equalities together with one
/// inequality per facet.
#[derive(Clone, Debug)]
pub struct HRep {
    pub equalities: Vec<AffineRow>,
    pub inequalities: Vec<AffineRow>,
}

#[derive(Debug, Error)]
pub enum PolyhedraError {
    #[error("polyhedron {0:?} has no vertices")]
    EmptyVertexList(String),
    #[error("point/vector of length {got}, ambient dimension is {expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("polyhedron {0:?} lists a zero ray")]
    ZeroRay(String),
    #[error("duplicate cell id {0:?}")]
    DuplicateId(String),
    #[error("unknown cell id {0:?}")]
    UnknownId(String),
    #[error("cell {0:?} is not part of the complex")]
    CellNotInComplex(String),
    #[error("operation requires a bounded complex; cell {0:?} has rays")]
    UnboundedInput(String),
}

/// A convex polyhedron in V-representation, with the derived exact data the
/// rest of the crate needs: dimension, a basis of its linear space, and an
/// H-representation computed by Fourier-Motzkin elimination.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    id: String,
    ambient_dim: usize,
    vertices: Vec<Vec<Rat>>,
    rays: Vec<Vec<Rat>>,
    dim: usize,
    span_basis: Vec<Vec<Rat>>,
    equalities: Vec<AffineRow>,
    inequalities: Vec<AffineRow>,
}

impl Polyhedron {
    pub fn new(
        id: impl Into<String>,
        ambient_dim: usize,
        vertices: Vec<Vec<Rat>>,
        rays: Vec<Vec<Rat>>,
    ) -> Result<Self, PolyhedraError> {
        let id = id.into();
        if vertices.is_empty() {
            return Err(PolyhedraError::EmptyVertexList(id));
        }
        for p in vertices.iter().chain(rays.iter()) {
            if p.len() != ambient_dim {
                return Err(PolyhedraError::AmbientMismatch {
                    expected: ambient_dim,
                    got: p.len(),
                });
            }
        }
        if rays.iter().any(|r| r.iter().all(Rat::is_zero)) {
            return Err(PolyhedraError::ZeroRay(id));
        }

        let (span_basis, equalities) = span_and_equalities(&vertices, &rays, ambient_dim);
        let dim = span_basis.len();
        let hrep = compute_h_representation_with_span(
            &vertices,
            &rays,
            ambient_dim,
            &equalities,
            dim,
        );

        Ok(Polyhedron {
            id,
            ambient_dim,
            vertices,
            rays,
            dim,
            span_basis,
            equalities,
            inequalities: hrep,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vec<Rat>] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// Ordered basis of the linear space parallel to the affine span.
    pub fn span_basis(&self) -> &[Vec<Rat>] {
        &self.span_basis
    }

    pub fn equalities(&self) -> &[AffineRow] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[AffineRow] {
        &self.inequalities
    }

    pub fn h_rep(&self) -> HRep {
        HRep {
            equalities: self.equalities.clone(),
            inequalities: self.inequalities.clone(),
        }
    }

    /// First listed vertex; the origin of the cell's local coordinates.
    pub fn base_vertex(&self) -> &[Rat] {
        &self.vertices[0]
    }

    /// Exact membership test against the H-representation.
    pub fn contains(&self, point: &[Rat]) -> bool {
        point.len() == self.ambient_dim
            && self.equalities.iter().all(|r| r.eval(point) == r.offset)
            && self.inequalities.iter().all(|r| r.eval(point) <= r.offset)
    }

    /// Does the recession cone contain the direction?
    pub fn recession_contains(&self, direction: &[Rat]) -> bool {
        direction.len() == self.ambient_dim
            && self
                .equalities
                .iter()
                .all(|r| r.eval(direction).is_zero())
            && self
                .inequalities
                .iter()
                .all(|r| !r.eval(direction).is_positive())
    }

    pub fn in_relative_interior(&self, point: &[Rat]) -> bool {
        point.len() == self.ambient_dim
            && self.equalities.iter().all(|r| r.eval(point) == r.offset)
            && self.inequalities.iter().all(|r| r.eval(point) < r.offset)
    }

    /// The vertex barycenter, shifted by the averaged ray direction when the
    /// cell is unbounded. Always a relative interior point.
    pub fn relative_interior_point(&self) -> Vec<Rat> {
        let n = Rat::from(self.vertices.len() as i64);
        let mut point: Vec<Rat> = (0..self.ambient_dim)
            .map(|j| {
                let sum: Rat = self.vertices.iter().map(|v| v[j].clone()).sum();
                sum / &n
            })
            .collect();
        if !self.rays.is_empty() {
            let m = Rat::from(self.rays.len() as i64);
            for (j, x) in point.iter_mut().enumerate() {
                let sum: Rat = self.rays.iter().map(|r| r[j].clone()).sum();
                *x = &*x + &(sum / &m);
            }
        }
        debug_assert!(self.in_relative_interior(&point));
        point
    }

    /// The full constraint system as Fourier-Motzkin rows.
    pub(crate) fn lin_rows(&self) -> Vec<LinRow> {
        self.equalities
            .iter()
            .map(|r| r.to_lin(RowKind::Eq))
            .chain(self.inequalities.iter().map(|r| r.to_lin(RowKind::Le)))
            .collect()
    }

    /// Coordinate bounding box (`None` once rays make a direction unbounded).
    pub(crate) fn bounding_box(&self) -> Option<Vec<(Rat, Rat)>> {
        if !self.rays.is_empty() {
            return None;
        }
        Some(
            (0..self.ambient_dim)
                .map(|j| {
                    let mut lo = self.vertices[0][j].clone();
                    let mut hi = lo.clone();
                    for v in &self.vertices[1..] {
                        if v[j] < lo {
                            lo = v[j].clone();
                        }
                        if v[j] > hi {
                            hi = v[j].clone();
                        }
                    }
                    (lo, hi)
                })
                .collect(),
        )
    }
}

/// Echelon basis of the linear space spanned by `{v_i - v_0}` and the rays,
/// plus the canonical (RREF) affine equalities of the affine span.
fn span_and_equalities(
    vertices: &[Vec<Rat>],
    rays: &[Vec<Rat>],
    ambient_dim: usize,
) -> (Vec<Vec<Rat>>, Vec<AffineRow>) {
    let base = &vertices[0];
    let mut span_rows: Vec<Vec<Rat>> = Vec::new();
    for v in &vertices[1..] {
        span_rows.push(v.iter().zip(base).map(|(a, b)| a - b).collect());
    }
    for r in rays {
        span_rows.push(r.clone());
    }

    let span_basis: Vec<Vec<Rat>> = if span_rows.is_empty() {
        Vec::new()
    } else {
        let (rref, pivots) = Mat::from_rows(span_rows).rref();
        (0..pivots.len()).map(|i| rref.row(i).to_vec()).collect()
    };

    // Normals orthogonal to the span; the affine offsets come from the base
    // vertex. Canonicalized by a final RREF over [normal | offset].
    let normals: Vec<Vec<Rat>> = if span_basis.is_empty() {
        (0..ambient_dim)
            .map(|i| {
                let mut v = vec![Rat::zero(); ambient_dim];
                v[i] = Rat::one();
                v
            })
            .collect()
    } else {
        Mat::from_rows(span_basis.clone()).null_space()
    };
    if normals.is_empty() {
        return (span_basis, Vec::new());
    }
    let aug_rows: Vec<Vec<Rat>> = normals
        .into_iter()
        .map(|normal| {
            let offset: Rat = normal.iter().zip(base).map(|(a, x)| a * x).sum();
            let mut row = normal;
            row.push(offset);
            row
        })
        .collect();
    let (rref, pivots) = Mat::from_rows(aug_rows).rref();
    let equalities = (0..pivots.len())
        .map(|i| {
            let mut row = rref.row(i).to_vec();
            let offset = row.pop().unwrap();
            AffineRow {
                normal: row,
                offset,
            }
        })
        .collect();
    (span_basis, equalities)
}

/// Facet inequalities of `conv(vertices) + cone(rays)`.
///
/// The polyhedron is written as the shadow of a system in the variables
/// `(x, lambda, mu)`; eliminating the multipliers by Fourier-Motzkin yields a
/// complete inequality description, which is then reduced modulo the span
/// equalities and filtered down to the facet-defining rows.
fn compute_h_representation_with_span(
    vertices: &[Vec<Rat>],
    rays: &[Vec<Rat>],
    ambient_dim: usize,
    equalities: &[AffineRow],
    dim: usize,
) -> Vec<AffineRow> {
    if dim == 0 {
        return Vec::new();
    }
    let s = vertices.len();
    let u = rays.len();
    let total = ambient_dim + s + u;
    let mut rows: Vec<LinRow> = Vec::new();

    for j in 0..ambient_dim {
        let mut coeffs = vec![Rat::zero(); total];
        coeffs[j] = Rat::one();
        for (i, v) in vertices.iter().enumerate() {
            coeffs[ambient_dim + i] = -&v[j];
        }
        for (k, r) in rays.iter().enumerate() {
            coeffs[ambient_dim + s + k] = -&r[j];
        }
        rows.push(LinRow::new(coeffs, Rat::zero(), RowKind::Eq));
    }
    {
        let mut coeffs = vec![Rat::zero(); total];
        for i in 0..s {
            coeffs[ambient_dim + i] = Rat::one();
        }
        rows.push(LinRow::new(coeffs, Rat::one(), RowKind::Eq));
    }
    for aux in 0..s + u {
        let mut coeffs = vec![Rat::zero(); total];
        coeffs[ambient_dim + aux] = -Rat::one();
        rows.push(LinRow::new(coeffs, Rat::zero(), RowKind::Le));
    }

    let projected = match fm::project(rows, total, ambient_dim) {
        Projection::Feasible(rows) => rows,
        Projection::Infeasible => unreachable!("a V-representation is never empty"),
    };

    let mut seen = BTreeSet::new();
    let mut facets = Vec::new();
    for row in projected {
        if row.kind == RowKind::Eq {
            // Equalities of the shadow are exactly the affine-span system,
            // which is kept separately.
            continue;
        }
        let reduced = reduce_modulo_equalities(row, equalities);
        if reduced.coeffs.iter().all(Rat::is_zero) {
            continue;
        }
        if !is_facet_row(&reduced, vertices, rays, dim) {
            continue;
        }
        if seen.insert((reduced.coeffs.clone(), reduced.rhs.clone())) {
            facets.push(AffineRow {
                normal: reduced.coeffs,
                offset: reduced.rhs,
            });
        }
    }
    facets.sort_by(|a, b| a.normal.cmp(&b.normal).then_with(|| a.offset.cmp(&b.offset)));
    facets
}

/// Standalone form of the H-representation computation.
pub fn compute_h_representation(
    vertices: &[Vec<Rat>],
    rays: &[Vec<Rat>],
    ambient_dim: usize,
) -> Result<HRep, PolyhedraError> {
    let cell = Polyhedron::new("tmp", ambient_dim, vertices.to_vec(), rays.to_vec())?;
    Ok(cell.h_rep())
}

fn reduce_modulo_equalities(row: LinRow, equalities: &[AffineRow]) -> LinRow {
    let mut coeffs = row.coeffs;
    let mut rhs = row.rhs;
    for eq in equalities {
        let pivot = eq
            .normal
            .iter()
            .position(|c| !c.is_zero())
            .expect("equality with zero normal");
        let factor = coeffs[pivot].clone();
        if factor.is_zero() {
            continue;
        }
        // The equality system is in RREF, so the pivot coefficient is one.
        for (c, e) in coeffs.iter_mut().zip(&eq.normal) {
            *c = &*c - &(&factor * e);
        }
        rhs = rhs - &factor * &eq.offset;
    }
    let normalized = LinRow::new(coeffs, rhs, row.kind);
    // Rescale to primitive integers for canonical dedup.
    let full: Vec<Rat> = normalized
        .coeffs
        .iter()
        .cloned()
        .chain([normalized.rhs.clone()])
        .collect();
    let ints = crate::polyalg::linalg_internal::primitive_integer_row(&full);
    let mut coeffs: Vec<Rat> = ints.into_iter().map(Rat::from).collect();
    let rhs = coeffs.pop().unwrap();
    LinRow::new(coeffs, rhs, normalized.kind)
}

/// Keep a valid inequality only when the generators saturating it span a
/// face of dimension `dim - 1`.
fn is_facet_row(row: &LinRow, vertices: &[Vec<Rat>], rays: &[Vec<Rat>], dim: usize) -> bool {
    let tight_vertices: Vec<&Vec<Rat>> = vertices
        .iter()
        .filter(|v| {
            let lhs: Rat = row.coeffs.iter().zip(v.iter()).map(|(a, x)| a * x).sum();
            lhs == row.rhs
        })
        .collect();
    if tight_vertices.is_empty() {
        return false;
    }
    let tight_rays: Vec<&Vec<Rat>> = rays
        .iter()
        .filter(|r| {
            let lhs: Rat = row.coeffs.iter().zip(r.iter()).map(|(a, x)| a * x).sum();
            lhs.is_zero()
        })
        .collect();
    let base = tight_vertices[0];
    let mut span_rows: Vec<Vec<Rat>> = tight_vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    span_rows.extend(tight_rays.iter().map(|r| (*r).clone()));
    let face_dim = if span_rows.is_empty() {
        0
    } else {
        Mat::from_rows(span_rows).rank()
    };
    face_dim + 1 == dim
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[i64]) -> Vec<Rat> {
        coords.iter().map(|&c| Rat::from(c)).collect()
    }

    fn classify(p: &Polyhedron, samples: &[(&[i64], bool)]) {
        for (coords, inside) in samples {
            assert_eq!(
                p.contains(&pt(coords)),
                *inside,
                "membership of {coords:?} in {}",
                p.id()
            );
        }
    }

    #[test]
    fn segment_h_rep() {
        // Segment (0,0)-(1,0) in the plane: y = 0 and 0 <= x <= 1.
        let p = Polyhedron::new("e", 2, vec![pt(&[0, 0]), pt(&[1, 0])], vec![]).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.equalities().len(), 1);
        assert_eq!(p.inequalities().len(), 2);
        classify(
            &p,
            &[
                (&[0, 0], true),
                (&[1, 0], true),
                (&[2, 0], false),
                (&[-1, 0], false),
                (&[0, 1], false),
            ],
        );
        assert!(p.contains(&[Rat::frac(1, 2), Rat::zero()]));
    }

    #[test]
    fn single_point_h_rep() {
        let p = Polyhedron::new("v", 2, vec![pt(&[2, 3])], vec![]).unwrap();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.equalities().len(), 2);
        assert!(p.inequalities().is_empty());
        classify(&p, &[(&[2, 3], true), (&[2, 4], false), (&[0, 0], false)]);
    }

    #[test]
    fn ray_h_rep() {
        // Ray from the origin along e1: y = 0 and x >= 0.
        let p = Polyhedron::new("r", 2, vec![pt(&[0, 0])], vec![pt(&[1, 0])]).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.equalities().len(), 1);
        assert_eq!(p.inequalities().len(), 1);
        classify(
            &p,
            &[
                (&[0, 0], true),
                (&[5, 0], true),
                (&[-1, 0], false),
                (&[1, 1], false),
            ],
        );
        assert!(p.recession_contains(&pt(&[1, 0])));
        assert!(!p.recession_contains(&pt(&[-1, 0])));
    }

    #[test]
    fn solid_triangle_h_rep() {
        let p = Polyhedron::new(
            "f",
            2,
            vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])],
            vec![],
        )
        .unwrap();
        assert_eq!(p.dim(), 2);
        assert!(p.equalities().is_empty());
        assert_eq!(p.inequalities().len(), 3);
        classify(
            &p,
            &[(&[0, 0], true), (&[1, 1], false), (&[1, 0], true)],
        );
        assert!(p.contains(&[Rat::frac(1, 4), Rat::frac(1, 4)]));
        assert!(p.in_relative_interior(&[Rat::frac(1, 4), Rat::frac(1, 4)]));
        assert!(!p.in_relative_interior(&pt(&[0, 0])));
    }

    #[test]
    fn relative_interior_points() {
        let seg = Polyhedron::new("e", 2, vec![pt(&[0, 0]), pt(&[1, 0])], vec![]).unwrap();
        assert_eq!(
            seg.relative_interior_point(),
            vec![Rat::frac(1, 2), Rat::zero()]
        );
        let vertex = Polyhedron::new("v", 2, vec![pt(&[0, 0])], vec![]).unwrap();
        assert_eq!(vertex.relative_interior_point(), pt(&[0, 0]));
        // Ray from the origin: barycenter plus averaged ray = (1, 0),
        // strictly inside (x > 0) and on the span (y = 0).
        let ray = Polyhedron::new("r", 2, vec![pt(&[0, 0])], vec![pt(&[1, 0])]).unwrap();
        let z = ray.relative_interior_point();
        assert_eq!(z, pt(&[1, 0]));
        assert!(ray.in_relative_interior(&z));
    }

    #[test]
    fn line_without_proper_faces() {
        // A full line: vertex plus opposite rays. Only the span equality.
        let p = Polyhedron::new(
            "l",
            2,
            vec![pt(&[0, 0])],
            vec![pt(&[1, 0]), pt(&[-1, 0])],
        )
        .unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.equalities().len(), 1);
        assert!(p.inequalities().is_empty());
        classify(&p, &[(&[7, 0], true), (&[-7, 0], true), (&[0, 1], false)]);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Polyhedron::new("x", 2, vec![], vec![]).is_err());
        assert!(Polyhedron::new("x", 2, vec![pt(&[0, 0])], vec![pt(&[0, 0])]).is_err());
        assert!(Polyhedron::new("x", 2, vec![pt(&[0])], vec![]).is_err());
    }
}
