use std::collections::BTreeMap;
use std::fmt;

use super::fourier_motzkin::{self as fm, LinRow, RowKind};
use super::polyhedron::{AffineRow, Polyhedron, PolyhedraError};
use crate::polyalg::Rat;

/// A finite set of polyhedra with an explicitly supplied face relation.
///
/// Construction only resolves ids; whether the data actually is a polyhedral
/// complex (face-closed, intersections are common faces) is decided by
/// [`PolyhedralComplex::validate`], which reports every violated invariant
/// instead of failing on the first.
#[derive(Clone, Debug)]
pub struct PolyhedralComplex {
    ambient_dim: usize,
    cells: Vec<Polyhedron>,
    id_index: BTreeMap<String, usize>,
    listed_pairs: Vec<(usize, usize)>,
    /// Reflexive-transitive closure of the listed pairs: `below[i][j]` iff
    /// cell `i` is a face of cell `j`.
    below: Vec<Vec<bool>>,
}

/// One violated complex invariant, with the offending cell ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    /// A listed pair whose child is not geometrically a face of its parent.
    ListedPairNotAFace { child: String, parent: String },
    /// A facet of `cell` is not present as a cell: the set is not face-closed.
    NotFaceClosed { cell: String, facet_hint: String },
    /// The facet exists as cell `child` but the pair is not in the relation.
    MissingFacePair { child: String, parent: String },
    /// Two cells meet in a set that is not a listed common face.
    IntersectionNotAFace { a: String, b: String },
    /// Two distinct ids describe the same point set.
    DuplicateCells { a: String, b: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ListedPairNotAFace { child, parent } => {
                write!(f, "listed pair ({child}, {parent}): {child} is not a face of {parent}")
            }
            Violation::NotFaceClosed { cell, facet_hint } => {
                write!(f, "not face-closed: facet of {cell} ({facet_hint}) is missing")
            }
            Violation::MissingFacePair { child, parent } => {
                write!(f, "face pair ({child}, {parent}) is missing from the relation")
            }
            Violation::IntersectionNotAFace { a, b } => {
                write!(f, "intersection not a face: {a} and {b}")
            }
            Violation::DuplicateCells { a, b } => {
                write!(f, "cells {a} and {b} describe the same point set")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "- {v}")?;
        }
        Ok(())
    }
}

impl PolyhedralComplex {
    pub fn new(
        ambient_dim: usize,
        cells: Vec<Polyhedron>,
        face_pairs: &[(String, String)],
    ) -> Result<Self, PolyhedraError> {
        let mut id_index = BTreeMap::new();
        for (i, cell) in cells.iter().enumerate() {
            if cell.ambient_dim() != ambient_dim {
                return Err(PolyhedraError::AmbientMismatch {
                    expected: ambient_dim,
                    got: cell.ambient_dim(),
                });
            }
            if id_index.insert(cell.id().to_string(), i).is_some() {
                return Err(PolyhedraError::DuplicateId(cell.id().to_string()));
            }
        }
        let mut listed_pairs = Vec::with_capacity(face_pairs.len());
        for (child, parent) in face_pairs {
            let c = *id_index
                .get(child)
                .ok_or_else(|| PolyhedraError::UnknownId(child.clone()))?;
            let p = *id_index
                .get(parent)
                .ok_or_else(|| PolyhedraError::UnknownId(parent.clone()))?;
            listed_pairs.push((c, p));
        }

        let n = cells.len();
        let mut below = vec![vec![false; n]; n];
        for (i, row) in below.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(c, p) in &listed_pairs {
            below[c][p] = true;
        }
        // Transitive closure.
        for k in 0..n {
            for i in 0..n {
                if below[i][k] {
                    for j in 0..n {
                        if below[k][j] {
                            below[i][j] = true;
                        }
                    }
                }
            }
        }

        Ok(PolyhedralComplex {
            ambient_dim,
            cells,
            id_index,
            listed_pairs,
            below,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn cells(&self) -> &[Polyhedron] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &Polyhedron {
        &self.cells[index]
    }

    pub fn cell_index(&self, id: &str) -> Option<usize> {
        self.id_index.get(id).copied()
    }

    pub fn listed_pairs(&self) -> &[(usize, usize)] {
        &self.listed_pairs
    }

    /// Is `face` a face of `cell` in the (closed) input relation?
    pub fn precedes(&self, face: usize, cell: usize) -> bool {
        self.below[face][cell]
    }

    /// Maximal dimension over all cells.
    pub fn dimension(&self) -> usize {
        self.cells.iter().map(Polyhedron::dim).max().unwrap_or(0)
    }

    pub fn is_bounded(&self) -> bool {
        self.cells.iter().all(Polyhedron::is_bounded)
    }

    pub fn maximal_cells(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| (0..self.cells.len()).all(|j| j == i || !self.below[i][j]))
            .collect()
    }

    pub fn minimal_cells(&self) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| (0..self.cells.len()).all(|j| j == i || !self.below[j][i]))
            .collect()
    }

    /// The cell family of the polyhedral star of `cell`: all maximal cells
    /// having `cell` as a face.
    pub fn star_family(&self, cell: usize) -> Vec<usize> {
        self.maximal_cells()
            .into_iter()
            .filter(|&m| self.below[cell][m])
            .collect()
    }

    /// The unique smallest cell containing every `cell` in the list, if any.
    ///
    /// On a valid complex the minimal common coface is unique whenever one
    /// exists; this panics if the supplied face relation breaks that.
    pub fn smallest_common_coface(&self, cells: &[usize]) -> Option<usize> {
        let common: Vec<usize> = (0..self.cells.len())
            .filter(|&j| cells.iter().all(|&i| self.below[i][j]))
            .collect();
        if common.is_empty() {
            return None;
        }
        let minimal: Vec<usize> = common
            .iter()
            .copied()
            .filter(|&m| common.iter().all(|&o| o == m || !self.below[o][m]))
            .collect();
        match minimal.as_slice() {
            [unique] => Some(*unique),
            _ => panic!(
                "face poset is not intersection-closed: {:?} have minimal common cofaces {:?}",
                cells.iter().map(|&i| self.cell(i).id()).collect::<Vec<_>>(),
                minimal
                    .iter()
                    .map(|&i| self.cell(i).id())
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Check every complex invariant and report all failures.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.cells.len();

        // Distinct ids must not describe the same point set.
        for i in 0..n {
            for j in i + 1..n {
                if self.same_point_set(i, j) {
                    violations.push(Violation::DuplicateCells {
                        a: self.cells[i].id().to_string(),
                        b: self.cells[j].id().to_string(),
                    });
                }
            }
        }

        // Every listed pair must be a geometric face relation.
        for &(c, p) in &self.listed_pairs {
            if c != p && !self.is_face_of(c, p) {
                violations.push(Violation::ListedPairNotAFace {
                    child: self.cells[c].id().to_string(),
                    parent: self.cells[p].id().to_string(),
                });
            }
        }

        // Face closure: each facet of each cell must be a cell, and the
        // covering pair must be listed (the full face relation then follows
        // by transitivity).
        for (p, cell) in self.cells.iter().enumerate() {
            if cell.dim() == 0 {
                continue;
            }
            for row in cell.inequalities() {
                match self.find_facet_cell(p, row) {
                    Some(c) => {
                        if !self.below[c][p] {
                            violations.push(Violation::MissingFacePair {
                                child: self.cells[c].id().to_string(),
                                parent: cell.id().to_string(),
                            });
                        }
                    }
                    None => violations.push(Violation::NotFaceClosed {
                        cell: cell.id().to_string(),
                        facet_hint: format!(
                            "where {} = {}",
                            row.normal
                                .iter()
                                .enumerate()
                                .filter(|(_, a)| !a.is_zero())
                                .map(|(i, a)| format!("{a}*x{}", i + 1))
                                .collect::<Vec<_>>()
                                .join(" + "),
                            row.offset
                        ),
                    }),
                }
            }
        }

        // Pairwise intersections must be listed common faces.
        for i in 0..n {
            for j in i + 1..n {
                if self.boxes_disjoint(i, j) {
                    continue;
                }
                let mut rows = self.cells[i].lin_rows();
                rows.extend(self.cells[j].lin_rows());
                if !fm::feasible(rows, self.ambient_dim) {
                    continue; // empty intersection is the improper face
                }
                let found = (0..n).any(|k| {
                    self.equals_intersection(k, i, j)
                        && self.is_face_of(k, i)
                        && self.is_face_of(k, j)
                });
                if !found {
                    violations.push(Violation::IntersectionNotAFace {
                        a: self.cells[i].id().to_string(),
                        b: self.cells[j].id().to_string(),
                    });
                }
            }
        }

        ValidationReport { violations }
    }

    fn boxes_disjoint(&self, i: usize, j: usize) -> bool {
        match (self.cells[i].bounding_box(), self.cells[j].bounding_box()) {
            (Some(a), Some(b)) => a
                .iter()
                .zip(&b)
                .any(|((alo, ahi), (blo, bhi))| ahi < blo || bhi < alo),
            _ => false,
        }
    }

    fn same_point_set(&self, i: usize, j: usize) -> bool {
        self.generators_inside(i, j) && self.generators_inside(j, i)
    }

    /// All vertices of `inner` lie in `outer` and all rays of `inner` lie in
    /// the recession cone of `outer`.
    fn generators_inside(&self, inner: usize, outer: usize) -> bool {
        let inner = &self.cells[inner];
        let outer = &self.cells[outer];
        inner.vertices().iter().all(|v| outer.contains(v))
            && inner.rays().iter().all(|r| outer.recession_contains(r))
    }

    /// Geometric test: is `tau` a face of `sigma`?
    ///
    /// `tau` must be contained in `sigma`; then `tau` is a face exactly when
    /// it equals the smallest face of `sigma` containing `tau`'s relative
    /// interior point, namely `sigma` intersected with its constraints that
    /// are tight there.
    pub fn is_face_of(&self, tau: usize, sigma: usize) -> bool {
        if tau == sigma {
            return true;
        }
        if !self.generators_inside(tau, sigma) {
            return false;
        }
        let tau = &self.cells[tau];
        let sigma = &self.cells[sigma];
        let p = tau.relative_interior_point();
        let mut face_rows: Vec<LinRow> = Vec::new();
        for eq in sigma.equalities() {
            face_rows.push(LinRow::new(eq.normal.clone(), eq.offset.clone(), RowKind::Eq));
        }
        for ineq in sigma.inequalities() {
            let kind = if ineq.eval(&p) == ineq.offset {
                RowKind::Eq
            } else {
                RowKind::Le
            };
            face_rows.push(LinRow::new(ineq.normal.clone(), ineq.offset.clone(), kind));
        }
        // The smallest face contains tau by convexity; equality needs the
        // reverse inclusion, i.e. the face system must entail tau's system.
        tau.lin_rows()
            .iter()
            .all(|row| fm::implies(&face_rows, row, self.ambient_dim))
    }

    /// Find the cell equal to `sigma ∩ {row tight}`, comparing point sets.
    fn find_facet_cell(&self, sigma: usize, row: &AffineRow) -> Option<usize> {
        let cell = &self.cells[sigma];
        let tight_vertices: Vec<&Vec<Rat>> = cell
            .vertices()
            .iter()
            .filter(|v| row.eval(v) == row.offset)
            .collect();
        let tight_rays: Vec<&Vec<Rat>> = cell
            .rays()
            .iter()
            .filter(|r| row.eval(r).is_zero())
            .collect();
        (0..self.cells.len()).find(|&k| {
            let candidate = &self.cells[k];
            // Facet generators inside the candidate...
            tight_vertices.iter().all(|v| candidate.contains(v))
                && tight_rays
                    .iter()
                    .all(|r| candidate.recession_contains(r))
                // ...and the candidate inside the facet.
                && candidate.vertices().iter().all(|v| {
                    cell.contains(v) && row.eval(v) == row.offset
                })
                && candidate.rays().iter().all(|r| {
                    cell.recession_contains(r) && row.eval(r).is_zero()
                })
        })
    }

    /// Is cell `k` equal, as a point set, to the intersection of `i` and `j`?
    fn equals_intersection(&self, k: usize, i: usize, j: usize) -> bool {
        if !(self.generators_inside(k, i) && self.generators_inside(k, j)) {
            return false;
        }
        let mut rows = self.cells[i].lin_rows();
        rows.extend(self.cells[j].lin_rows());
        self.cells[k]
            .lin_rows()
            .iter()
            .all(|row| fm::implies(&rows, row, self.ambient_dim))
    }

    /// All nonempty chains of the strict face relation, each sorted from the
    /// smallest to the largest cell. These index the simplices of the
    /// barycentric subdivision.
    pub fn flag_chains(&self) -> Vec<Vec<usize>> {
        let n = self.cells.len();
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            for j in 0..n {
                if j != last && self.below[last][j] {
                    let mut ext = chain.clone();
                    ext.push(j);
                    stack.push(ext);
                }
            }
            chains.push(chain);
        }
        chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        chains
    }

    /// Barycentric subdivision: one simplex per chain of faces, with each
    /// chain member replaced by its relative interior point. Bounded
    /// complexes only.
    pub fn barycentric_subdivision(&self) -> Result<PolyhedralComplex, PolyhedraError> {
        if let Some(cell) = self.cells.iter().find(|c| !c.is_bounded()) {
            return Err(PolyhedraError::UnboundedInput(cell.id().to_string()));
        }
        let chains = self.flag_chains();
        let chain_id = |chain: &[usize]| -> String {
            chain
                .iter()
                .map(|&i| self.cells[i].id())
                .collect::<Vec<_>>()
                .join("|")
        };
        let mut cells = Vec::with_capacity(chains.len());
        for chain in &chains {
            let vertices: Vec<Vec<Rat>> = chain
                .iter()
                .map(|&i| self.cells[i].relative_interior_point())
                .collect();
            cells.push(Polyhedron::new(
                chain_id(chain),
                self.ambient_dim,
                vertices,
                vec![],
            )?);
        }
        let mut pairs = Vec::new();
        for chain in &chains {
            if chain.len() < 2 {
                continue;
            }
            for drop in 0..chain.len() {
                let sub: Vec<usize> = chain
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != drop)
                    .map(|(_, &c)| c)
                    .collect();
                pairs.push((chain_id(&sub), chain_id(chain)));
            }
        }
        PolyhedralComplex::new(self.ambient_dim, cells, &pairs)
    }
}
