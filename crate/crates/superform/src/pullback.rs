//! Pullbacks of superforms along pairs `(s, L)` of a polynomial map and a
//! linear map.
//!
//! The generalized pullback composes coefficients with `s`, expands each
//! `d'x_i` through the Jacobian of `s`, and each `d''x_j` through `L` alone.
//! Splitting the two degrees this way is what makes the pullback commute
//! with `d'`; the naive pullback, which sends both degrees through the
//! Jacobian, does not (see [`naive_pullback`] and the tests).

use std::fmt;

use thiserror::Error;

use crate::polyalg::{Mat, Polynomial, Rat};
use crate::polyhedra::{Domain, DomainCell};
use crate::superforms::Superform;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PullbackError {
    #[error("form lives in dimension {form}, map targets dimension {target}")]
    FormDimensionMismatch { form: usize, target: usize },
    #[error("cannot compose: inner map targets {inner_target}, outer map consumes {outer_source}")]
    CompositionMismatch {
        inner_target: usize,
        outer_source: usize,
    },
    #[error("map pair shape: {components} components, linear part is {rows}x{cols} from source {source_dim}")]
    ShapeMismatch {
        components: usize,
        rows: usize,
        cols: usize,
        source_dim: usize,
    },
}

/// A pair of a polynomial map `s: Q^source -> Q^target` and a linear map
/// `L: Q^source -> Q^target`, pulled back against the two degrees of a
/// superform independently.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MapPair {
    source_dim: usize,
    target_dim: usize,
    components: Vec<Polynomial>,
    linear: Mat,
}

impl MapPair {
    pub fn new(
        source_dim: usize,
        components: Vec<Polynomial>,
        linear: Mat,
    ) -> Result<Self, PullbackError> {
        let target_dim = components.len();
        if linear.rows() != target_dim
            || linear.cols() != source_dim
            || components.iter().any(|c| c.num_vars() != source_dim)
        {
            return Err(PullbackError::ShapeMismatch {
                components: target_dim,
                rows: linear.rows(),
                cols: linear.cols(),
                source_dim,
            });
        }
        Ok(MapPair {
            source_dim,
            target_dim,
            components,
            linear,
        })
    }

    pub fn identity(dim: usize) -> Self {
        MapPair {
            source_dim: dim,
            target_dim: dim,
            components: (0..dim).map(|i| Polynomial::var(dim, i)).collect(),
            linear: Mat::identity(dim),
        }
    }

    /// An affine map `y ↦ linear·y + offset` paired with its linear part.
    pub fn affine(linear: Mat, offset: Vec<Rat>) -> Self {
        let source_dim = linear.cols();
        let target_dim = linear.rows();
        assert_eq!(offset.len(), target_dim);
        let components = (0..target_dim)
            .map(|i| {
                let mut poly = Polynomial::constant(source_dim, offset[i].clone());
                for k in 0..source_dim {
                    let mut exps = vec![0; source_dim];
                    exps[k] = 1;
                    poly.add_term(exps, linear.at(i, k).clone());
                }
                poly
            })
            .collect();
        MapPair {
            source_dim,
            target_dim,
            components,
            linear,
        }
    }

    /// The constant map to `z` paired with the identity.
    pub fn constant_to_point(z: &[Rat]) -> Self {
        let dim = z.len();
        MapPair {
            source_dim: dim,
            target_dim: dim,
            components: z
                .iter()
                .map(|zi| Polynomial::constant(dim, zi.clone()))
                .collect(),
            linear: Mat::identity(dim),
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn linear(&self) -> &Mat {
        &self.linear
    }

    pub fn is_affine(&self) -> bool {
        self.components.iter().all(|c| c.total_degree() <= 1)
    }

    /// For an affine `s`: the matrix and offset with `s(y) = A·y + c`.
    fn affine_parts(&self) -> Option<(Mat, Vec<Rat>)> {
        if !self.is_affine() {
            return None;
        }
        let mut a = Mat::zeros(self.target_dim, self.source_dim);
        let mut c = vec![Rat::zero(); self.target_dim];
        for (i, comp) in self.components.iter().enumerate() {
            for (exps, coeff) in comp.terms() {
                match exps.iter().position(|&e| e > 0) {
                    Some(k) => a.set(i, k, coeff.clone()),
                    None => c[i] = coeff.clone(),
                }
            }
        }
        Some((a, c))
    }

    /// `compose(F, G) = (s_F ∘ s_G, L_F ∘ L_G)`, so that the pullback of the
    /// composition is the composition of the pullbacks in the other order.
    pub fn compose(&self, inner: &MapPair) -> Result<MapPair, PullbackError> {
        if inner.target_dim != self.source_dim {
            return Err(PullbackError::CompositionMismatch {
                inner_target: inner.target_dim,
                outer_source: self.source_dim,
            });
        }
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(&inner.components).expect("checked arity"))
            .collect();
        Ok(MapPair {
            source_dim: inner.source_dim,
            target_dim: self.target_dim,
            components,
            linear: self.linear.matmul(&inner.linear),
        })
    }

    /// `Σ_k ∂s_i/∂y_k d'y_k`, the `d'`-image of `d'x_i`.
    fn jacobian_one_form(&self, i: usize) -> Superform {
        let mut form = Superform::zero(self.source_dim, 1, 0);
        for k in 0..self.source_dim {
            let partial = self.components[i]
                .partial_derivative(k)
                .expect("index in range");
            form.add_term(vec![k], vec![], partial);
        }
        form
    }

    /// `Σ_k L_{ik} d''y_k`, the `d''`-image of `d''x_i`.
    fn linear_one_form(&self, i: usize) -> Superform {
        let mut form = Superform::zero(self.source_dim, 0, 1);
        for k in 0..self.source_dim {
            form.add_term(
                vec![],
                vec![k],
                Polynomial::constant(self.source_dim, self.linear.at(i, k).clone()),
            );
        }
        form
    }

    /// The generalized pullback: coefficients through `s`, `d'`-factors
    /// through the Jacobian of `s`, `d''`-factors through `L`.
    pub fn pullback(&self, form: &Superform) -> Result<Superform, PullbackError> {
        if form.ambient_dim() != self.target_dim {
            return Err(PullbackError::FormDimensionMismatch {
                form: form.ambient_dim(),
                target: self.target_dim,
            });
        }
        let (p, q) = form.bidegree();
        let mut out = Superform::zero(self.source_dim, p, q);
        for ((i_set, j_set), coeff) in form.terms() {
            let composed = coeff.substitute(&self.components).expect("checked arity");
            if composed.is_zero() {
                continue;
            }
            let mut acc = Superform::function(composed);
            for &i in i_set {
                acc = acc.wedge(&self.jacobian_one_form(i)).expect("same ambient");
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                continue;
            }
            for &j in j_set {
                acc = acc.wedge(&self.linear_one_form(j)).expect("same ambient");
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Certify or refute the cell conditions under which the pullback
    /// descends from ambient forms to forms on the domains: every maximal
    /// source cell needs a maximal target cell with (a) `s` mapping the cell
    /// into it and (b) `L` mapping span into span.
    ///
    /// Condition (b) is decided exactly. Condition (a) is decided exactly
    /// for affine `s` (vertex and ray images) and for the canonical
    /// contraction of a star towards its center (star-shapedness); any other
    /// map yields [`PullbackVerdict::Unverified`].
    pub fn allows_pullback(&self, source: &Domain, target: &Domain) -> PullbackVerdict {
        assert_eq!(source.ambient_dim(), self.source_dim, "source dimension");
        assert_eq!(target.ambient_dim(), self.target_dim, "target dimension");

        if let Some(assignment) = self.match_contraction(source, target) {
            return PullbackVerdict::Verified { assignment };
        }

        let affine = self.affine_parts();
        let mut assignment = Vec::new();
        for source_cell in source.family() {
            let mut first_witness: Option<RefutationWitness> = None;
            let mut undecided = false;
            let mut matched = None;
            for target_cell in target.family() {
                match self.check_candidate(source_cell, target_cell, affine.as_ref()) {
                    CandidateOutcome::Satisfied => {
                        matched = Some(target_cell.id.clone());
                        break;
                    }
                    CandidateOutcome::Failed(witness) => {
                        first_witness.get_or_insert(witness);
                    }
                    CandidateOutcome::Undecidable => {
                        undecided = true;
                    }
                }
            }
            match matched {
                Some(target_id) => assignment.push((source_cell.id.clone(), target_id)),
                None if undecided => return PullbackVerdict::Unverified,
                None => {
                    return PullbackVerdict::Refuted {
                        source_cell: source_cell.id.clone(),
                        witness: first_witness.expect("failed candidates leave a witness"),
                    }
                }
            }
        }
        PullbackVerdict::Verified { assignment }
    }

    fn check_candidate(
        &self,
        source_cell: &DomainCell,
        target_cell: &DomainCell,
        affine: Option<&(Mat, Vec<Rat>)>,
    ) -> CandidateOutcome {
        // (b): L maps the source span into the target span, decided by rank.
        let target_basis = &target_cell.frame.basis;
        for w in &source_cell.frame.basis {
            let image = self.linear.apply(w);
            if !in_span(&image, target_basis) {
                return CandidateOutcome::Failed(RefutationWitness::SpanVector {
                    vector: w.clone(),
                    image,
                });
            }
        }
        // (a): s maps the source cell into the target cell. The source cell
        // is the closure of its intersection with the domain, so for
        // continuous s testing the whole cell is exact; for affine s the
        // generators decide it.
        let Some((a, _)) = affine else {
            return CandidateOutcome::Undecidable;
        };
        for v in &source_cell.vertices {
            let image: Vec<Rat> = self
                .components
                .iter()
                .map(|c| c.evaluate(v).expect("vertex arity"))
                .collect();
            if !target_cell.contains(&image) {
                return CandidateOutcome::Failed(RefutationWitness::PointImage {
                    point: v.clone(),
                    image,
                });
            }
        }
        for ray in &source_cell.rays {
            let image = a.apply(ray);
            if !target_cell.recession_contains(&image) {
                return CandidateOutcome::Failed(RefutationWitness::RayImage {
                    ray: ray.clone(),
                    image,
                });
            }
        }
        CandidateOutcome::Satisfied
    }

    /// Recognize the contraction `(x, t) ↦ z + t(x - z)` with `L = pr_1`
    /// from the cylinder over a star to the star itself. Star-shapedness of
    /// stars about their center certifies condition (a) for it.
    fn match_contraction(&self, source: &Domain, target: &Domain) -> Option<Vec<(String, String)>> {
        let z = target.star_center()?;
        if !(source.cylinder_levels() == target.cylinder_levels() + 1
            && source.star_cell() == target.star_cell()
            && std::sync::Arc::ptr_eq(source.complex(), target.complex()))
        {
            return None;
        }
        let r = self.target_dim;
        if self.source_dim != r + 1 {
            return None;
        }
        let expected = contraction_components(z, r);
        if self.components != expected {
            return None;
        }
        let mut projection = Mat::zeros(r, r + 1);
        for i in 0..r {
            projection.set(i, i, Rat::one());
        }
        if self.linear != projection {
            return None;
        }
        // The center membership criterion: z in every target family cell.
        if !target.family().iter().all(|cell| cell.contains(z)) {
            return None;
        }
        Some(
            source
                .family()
                .iter()
                .zip(target.family())
                .map(|(s, t)| (s.id.clone(), t.id.clone()))
                .collect(),
        )
    }
}

/// The components of the contraction `(x, t) ↦ z + t(x - z)` in `r + 1`
/// variables with `t` last.
pub(crate) fn contraction_components(z: &[Rat], r: usize) -> Vec<Polynomial> {
    (0..r)
        .map(|i| {
            let mut poly = Polynomial::constant(r + 1, z[i].clone());
            let mut tx = vec![0u32; r + 1];
            tx[i] = 1;
            tx[r] = 1;
            poly.add_term(tx, Rat::one());
            let mut t = vec![0u32; r + 1];
            t[r] = 1;
            poly.add_term(t, -&z[i]);
            poly
        })
        .collect()
}

fn in_span(vector: &[Rat], basis: &[Vec<Rat>]) -> bool {
    if vector.iter().all(Rat::is_zero) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let base_rank = Mat::from_rows(basis.to_vec()).rank();
    let mut rows = basis.to_vec();
    rows.push(vector.to_vec());
    Mat::from_rows(rows).rank() == base_rank
}

enum CandidateOutcome {
    Satisfied,
    Failed(RefutationWitness),
    Undecidable,
}

/// Outcome of the pullback admissibility check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PullbackVerdict {
    /// Conditions certified, with the source-to-target cell assignment.
    Verified { assignment: Vec<(String, String)> },
    /// The conditions could not be decided for this map.
    Unverified,
    /// The conditions fail for some source cell against every candidate.
    Refuted {
        source_cell: String,
        witness: RefutationWitness,
    },
}

impl PullbackVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, PullbackVerdict::Verified { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RefutationWitness {
    /// A cell point whose image leaves the candidate cell.
    PointImage { point: Vec<Rat>, image: Vec<Rat> },
    /// A recession direction whose image leaves the candidate's recession.
    RayImage { ray: Vec<Rat>, image: Vec<Rat> },
    /// A span vector whose linear image leaves the candidate's span.
    SpanVector { vector: Vec<Rat>, image: Vec<Rat> },
}

impl fmt::Display for RefutationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_vec = |v: &[Rat]| {
            v.iter()
                .map(Rat::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            RefutationWitness::PointImage { point, image } => {
                write!(f, "point ({}) maps to ({})", fmt_vec(point), fmt_vec(image))
            }
            RefutationWitness::RayImage { ray, image } => {
                write!(f, "ray ({}) maps to ({})", fmt_vec(ray), fmt_vec(image))
            }
            RefutationWitness::SpanVector { vector, image } => {
                write!(
                    f,
                    "span vector ({}) maps to ({}) outside the target span",
                    fmt_vec(vector),
                    fmt_vec(image)
                )
            }
        }
    }
}

/// The naive pullback along a polynomial map: both `d'` and `d''` factors
/// are expanded through the Jacobian. It agrees with the generalized
/// pullback for affine maps and fails to commute with `d'` in general.
pub fn naive_pullback(
    map: &[Polynomial],
    source_dim: usize,
    form: &Superform,
) -> Result<Superform, PullbackError> {
    if form.ambient_dim() != map.len() {
        return Err(PullbackError::FormDimensionMismatch {
            form: form.ambient_dim(),
            target: map.len(),
        });
    }
    for c in map {
        if c.num_vars() != source_dim {
            return Err(PullbackError::ShapeMismatch {
                components: map.len(),
                rows: map.len(),
                cols: c.num_vars(),
                source_dim,
            });
        }
    }
    let jacobian_form = |i: usize, double: bool| -> Superform {
        let (p, q) = if double { (0, 1) } else { (1, 0) };
        let mut out = Superform::zero(source_dim, p, q);
        for k in 0..source_dim {
            let partial = map[i].partial_derivative(k).expect("index in range");
            if double {
                out.add_term(vec![], vec![k], partial);
            } else {
                out.add_term(vec![k], vec![], partial);
            }
        }
        out
    };
    let (p, q) = form.bidegree();
    let mut out = Superform::zero(source_dim, p, q);
    for ((i_set, j_set), coeff) in form.terms() {
        let composed = coeff.substitute(map).expect("checked arity");
        if composed.is_zero() {
            continue;
        }
        let mut acc = Superform::function(composed);
        for &i in i_set {
            acc = acc.wedge(&jacobian_form(i, false)).expect("same ambient");
        }
        for &j in j_set {
            acc = acc.wedge(&jacobian_form(j, true)).expect("same ambient");
        }
        out = out.add(&acc);
    }
    Ok(out)
}
