use std::fmt;
use std::sync::Arc;

use super::complex::PolyhedralComplex;
use super::polyhedron::{AffineRow, Polyhedron, PolyhedraError};
use crate::polyalg::Rat;

/// Local affine coordinates of a cell: `x = base_point + sum_k u_k basis[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellFrame {
    pub cell_id: String,
    pub base_point: Vec<Rat>,
    pub basis: Vec<Vec<Rat>>,
}

impl CellFrame {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base_point.len()
    }
}

/// One maximal cell of a domain's family, materialized with both its
/// generators and its constraint system (cylinder factors included).
#[derive(Clone, Debug)]
pub struct DomainCell {
    pub id: String,
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub frame: CellFrame,
    pub equalities: Vec<AffineRow>,
    pub inequalities: Vec<AffineRow>,
}

impl DomainCell {
    fn from_polyhedron(cell: &Polyhedron) -> Self {
        DomainCell {
            id: cell.id().to_string(),
            vertices: cell.vertices().to_vec(),
            rays: cell.rays().to_vec(),
            frame: CellFrame {
                cell_id: cell.id().to_string(),
                base_point: cell.base_vertex().to_vec(),
                basis: cell.span_basis().to_vec(),
            },
            equalities: cell.equalities().to_vec(),
            inequalities: cell.inequalities().to_vec(),
        }
    }

    /// The product with the unit interval in a fresh last coordinate.
    fn lift_to_cylinder(&self) -> Self {
        let r = self.frame.ambient_dim();
        let pad = |v: &Vec<Rat>, last: Rat| -> Vec<Rat> {
            let mut out = v.clone();
            out.push(last);
            out
        };
        let mut vertices: Vec<Vec<Rat>> =
            self.vertices.iter().map(|v| pad(v, Rat::zero())).collect();
        vertices.extend(self.vertices.iter().map(|v| pad(v, Rat::one())));
        let rays: Vec<Vec<Rat>> = self.rays.iter().map(|v| pad(v, Rat::zero())).collect();

        let mut basis: Vec<Vec<Rat>> = self
            .frame
            .basis
            .iter()
            .map(|b| pad(b, Rat::zero()))
            .collect();
        let mut t_axis = vec![Rat::zero(); r + 1];
        t_axis[r] = Rat::one();
        basis.push(t_axis);

        let equalities: Vec<AffineRow> = self
            .equalities
            .iter()
            .map(|row| AffineRow {
                normal: pad(&row.normal, Rat::zero()),
                offset: row.offset.clone(),
            })
            .collect();
        let mut inequalities: Vec<AffineRow> = self
            .inequalities
            .iter()
            .map(|row| AffineRow {
                normal: pad(&row.normal, Rat::zero()),
                offset: row.offset.clone(),
            })
            .collect();
        let mut t_lo = vec![Rat::zero(); r + 1];
        t_lo[r] = -Rat::one();
        inequalities.push(AffineRow {
            normal: t_lo,
            offset: Rat::zero(),
        });
        let mut t_hi = vec![Rat::zero(); r + 1];
        t_hi[r] = Rat::one();
        inequalities.push(AffineRow {
            normal: t_hi,
            offset: Rat::one(),
        });

        DomainCell {
            id: format!("{} x [0,1]", self.id),
            vertices,
            rays,
            frame: CellFrame {
                cell_id: format!("{} x [0,1]", self.frame.cell_id),
                base_point: pad(&self.frame.base_point, Rat::zero()),
                basis,
            },
            equalities,
            inequalities,
        }
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        self.equalities.iter().all(|r| r.eval(point) == r.offset)
            && self.inequalities.iter().all(|r| r.eval(point) <= r.offset)
    }

    pub fn recession_contains(&self, direction: &[Rat]) -> bool {
        self.equalities.iter().all(|r| r.eval(direction).is_zero())
            && self
                .inequalities
                .iter()
                .all(|r| !r.eval(direction).is_positive())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum BaseDomain {
    FullSupport,
    Star { cell: usize, center: Vec<Rat> },
}

/// A symbolic open subset of the support of a complex: the full support, the
/// polyhedral star of a cell, or a cylinder over either.
///
/// A domain is entirely described by its family of maximal cells; equality
/// of forms, closedness and pullback admissibility are all decided cell by
/// cell against this family.
#[derive(Clone, Debug)]
pub struct Domain {
    complex: Arc<PolyhedralComplex>,
    base: BaseDomain,
    cylinder_levels: usize,
    family: Vec<DomainCell>,
}

impl Domain {
    /// The whole support of the complex.
    pub fn full_support(complex: &Arc<PolyhedralComplex>) -> Domain {
        let family = complex
            .maximal_cells()
            .into_iter()
            .map(|i| DomainCell::from_polyhedron(complex.cell(i)))
            .collect();
        Domain {
            complex: Arc::clone(complex),
            base: BaseDomain::FullSupport,
            cylinder_levels: 0,
            family,
        }
    }

    /// The polyhedral star of `cell_id`, centered at the cell's relative
    /// interior point. The family consists of the maximal cofaces, every one
    /// of which contains the center.
    pub fn star(complex: &Arc<PolyhedralComplex>, cell_id: &str) -> Result<Domain, PolyhedraError> {
        let cell = complex
            .cell_index(cell_id)
            .ok_or_else(|| PolyhedraError::CellNotInComplex(cell_id.to_string()))?;
        let center = complex.cell(cell).relative_interior_point();
        let family: Vec<DomainCell> = complex
            .star_family(cell)
            .into_iter()
            .map(|i| DomainCell::from_polyhedron(complex.cell(i)))
            .collect();
        debug_assert!(family.iter().all(|c| c.contains(&center)));
        Ok(Domain {
            complex: Arc::clone(complex),
            base: BaseDomain::Star { cell, center },
            cylinder_levels: 0,
            family,
        })
    }

    /// The product of this domain with the unit interval; the new coordinate
    /// is appended last.
    pub fn cylinder(&self) -> Domain {
        Domain {
            complex: Arc::clone(&self.complex),
            base: self.base.clone(),
            cylinder_levels: self.cylinder_levels + 1,
            family: self.family.iter().map(DomainCell::lift_to_cylinder).collect(),
        }
    }

    pub fn complex(&self) -> &Arc<PolyhedralComplex> {
        &self.complex
    }

    pub fn ambient_dim(&self) -> usize {
        self.complex.ambient_dim() + self.cylinder_levels
    }

    pub fn cylinder_levels(&self) -> usize {
        self.cylinder_levels
    }

    /// Maximal cells of the region, with cylinder factors applied.
    pub fn family(&self) -> &[DomainCell] {
        &self.family
    }

    pub fn is_full_support(&self) -> bool {
        matches!(self.base, BaseDomain::FullSupport)
    }

    pub fn is_star(&self) -> bool {
        matches!(self.base, BaseDomain::Star { .. })
    }

    /// Star center, for star-based domains.
    pub fn star_center(&self) -> Option<&[Rat]> {
        match &self.base {
            BaseDomain::Star { center, .. } => Some(center),
            BaseDomain::FullSupport => None,
        }
    }

    pub fn star_cell(&self) -> Option<usize> {
        match &self.base {
            BaseDomain::Star { cell, .. } => Some(*cell),
            BaseDomain::FullSupport => None,
        }
    }

    /// Same complex, same base region, same number of cylinder factors?
    pub fn same_region(&self, other: &Domain) -> bool {
        Arc::ptr_eq(&self.complex, &other.complex)
            && self.base == other.base
            && self.cylinder_levels == other.cylinder_levels
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            BaseDomain::FullSupport => write!(f, "full")?,
            BaseDomain::Star { cell, .. } => {
                write!(f, "star:{}", self.complex.cell(*cell).id())?
            }
        }
        for _ in 0..self.cylinder_levels {
            write!(f, " x [0,1]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn star_of_tropical_line_origin() {
        let complex = fixtures::tropical_line();
        let star = Domain::star(&complex, "o").unwrap();
        assert_eq!(star.family().len(), 3);
        assert_eq!(star.star_center().unwrap(), &[Rat::zero(), Rat::zero()]);
        for cell in star.family() {
            assert!(cell.contains(star.star_center().unwrap()));
        }
    }

    #[test]
    fn star_of_maximal_cell_is_itself() {
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "abc").unwrap();
        assert_eq!(star.family().len(), 1);
        assert_eq!(star.family()[0].id, "abc");
    }

    #[test]
    fn stars_are_star_shaped_at_sampled_points() {
        // Every family member contains z and the whole segment from z to any
        // of its sampled points.
        let steps = [
            Rat::zero(),
            Rat::frac(1, 4),
            Rat::frac(1, 2),
            Rat::frac(3, 4),
            Rat::one(),
        ];
        for complex in [
            fixtures::segment(),
            fixtures::solid_triangle(),
            fixtures::triangle_boundary(),
            fixtures::tropical_line(),
            fixtures::tetrahedron_boundary(),
        ] {
            for cell in complex.cells() {
                let star = Domain::star(&complex, cell.id()).unwrap();
                let z = star.star_center().unwrap().to_vec();
                for member in star.family() {
                    assert!(member.contains(&z));
                    let mut samples: Vec<Vec<Rat>> = member.vertices.clone();
                    // A deep point of the member, relevant for unbounded cells.
                    if let Some(idx) = complex.cell_index(&member.id) {
                        samples.push(complex.cell(idx).relative_interior_point());
                    }
                    for x in samples {
                        for t in &steps {
                            let point: Vec<Rat> = z
                                .iter()
                                .zip(&x)
                                .map(|(zj, xj)| zj + &(t * &(xj - zj)))
                                .collect();
                            assert!(
                                member.contains(&point),
                                "segment to {x:?} leaves {} at t={t}",
                                member.id
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn star_cover_reaches_every_maximal_cell() {
        for complex in [
            fixtures::solid_triangle(),
            fixtures::triangle_boundary(),
            fixtures::tropical_line(),
            fixtures::tetrahedron_boundary(),
        ] {
            let minimal = complex.minimal_cells();
            let mut covered: Vec<usize> = Vec::new();
            for &m in &minimal {
                covered.extend(complex.star_family(m));
            }
            covered.sort_unstable();
            covered.dedup();
            assert_eq!(covered, complex.maximal_cells());

            // Every cell's relative interior point lies in some star family
            // member.
            for cell in complex.cells() {
                let p = cell.relative_interior_point();
                let hit = minimal.iter().any(|&m| {
                    let star = Domain::star(&complex, complex.cell(m).id()).unwrap();
                    star.family().iter().any(|c| c.contains(&p))
                });
                assert!(hit, "point of {} not covered", cell.id());
            }
        }
    }

    #[test]
    fn cylinder_lifts_family() {
        let complex = fixtures::segment();
        let base = Domain::full_support(&complex);
        let cyl = base.cylinder();
        assert_eq!(cyl.ambient_dim(), 3);
        let cell = &cyl.family()[0];
        assert_eq!(cell.vertices.len(), 4);
        assert_eq!(cell.frame.dim(), 2);
        assert!(cell.contains(&[Rat::frac(1, 2), Rat::zero(), Rat::frac(1, 3)]));
        assert!(!cell.contains(&[Rat::frac(1, 2), Rat::zero(), Rat::from(2)]));
    }
}
