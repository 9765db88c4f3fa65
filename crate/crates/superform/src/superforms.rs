//! The bigraded algebra of superforms: sparse `(p, q)`-forms with polynomial
//! coefficients, the differentials `d'` and `d''`, the wedge product, the
//! factor swap `J`, restriction to cells and equality over symbolic domains.
//!
//! A `(p, q)`-form in ambient dimension `r` is stored as a sparse map from
//! pairs of strictly increasing index sets `(I, J)` with `|I| = p`, `|J| = q`
//! to polynomial coefficients; the basis element for `(I, J)` is
//! `d'x_I ∧ d''x_J`. All arithmetic keeps the map canonical: no zero
//! polynomial is ever stored.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::polyalg::{Mat, Polynomial, Rat};
use crate::polyhedra::{CellFrame, Domain, Polyhedron};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("bidegree mismatch: ({0}, {1}) vs ({2}, {3})")]
    BidegreeMismatch(usize, usize, usize, usize),
}

/// A homogeneous superform of bidegree `(p, q)`.
#[derive(Clone)]
pub struct Superform {
    ambient_dim: usize,
    p: usize,
    q: usize,
    terms: BTreeMap<(Vec<usize>, Vec<usize>), Polynomial>,
}

/// The restriction of a superform to one cell, written in the cell's local
/// coordinates along its span basis.
#[derive(Clone, Debug)]
pub struct CellForm {
    pub cell_id: String,
    pub form: Superform,
}

impl Superform {
    pub fn zero(ambient_dim: usize, p: usize, q: usize) -> Self {
        Superform {
            ambient_dim,
            p,
            q,
            terms: BTreeMap::new(),
        }
    }

    /// A `(0, 0)`-form, i.e. a polynomial function.
    pub fn function(poly: Polynomial) -> Self {
        let mut form = Superform::zero(poly.num_vars(), 0, 0);
        form.add_term(vec![], vec![], poly);
        form
    }

    /// The basis form `poly · d'x_I ∧ d''x_J` (0-based, strictly increasing
    /// indices).
    pub fn basis_term(
        ambient_dim: usize,
        d_prime_indices: Vec<usize>,
        d_double_indices: Vec<usize>,
        poly: Polynomial,
    ) -> Self {
        let mut form = Superform::zero(
            ambient_dim,
            d_prime_indices.len(),
            d_double_indices.len(),
        );
        form.add_term(d_prime_indices, d_double_indices, poly);
        form
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &Polynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: &[usize], j: &[usize]) -> Option<&Polynomial> {
        self.terms.get(&(i.to_vec(), j.to_vec()))
    }

    /// Accumulate `poly · d'x_I ∧ d''x_J`; indices must be strictly
    /// increasing and within the ambient dimension.
    pub fn add_term(&mut self, i: Vec<usize>, j: Vec<usize>, poly: Polynomial) {
        assert_eq!(i.len(), self.p, "index set size disagrees with bidegree");
        assert_eq!(j.len(), self.q, "index set size disagrees with bidegree");
        assert!(
            strictly_increasing(&i) && strictly_increasing(&j),
            "index sets must be strictly increasing"
        );
        assert!(
            i.iter().chain(&j).all(|&k| k < self.ambient_dim),
            "index out of range"
        );
        assert_eq!(poly.num_vars(), self.ambient_dim);
        if poly.is_zero() {
            return;
        }
        let key = (i, j);
        match self.terms.remove(&key) {
            Some(existing) => {
                let sum = &existing + &poly;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, poly);
            }
        }
    }

    pub fn scale(&self, factor: &Rat) -> Superform {
        if factor.is_zero() {
            return Superform::zero(self.ambient_dim, self.p, self.q);
        }
        Superform {
            ambient_dim: self.ambient_dim,
            p: self.p,
            q: self.q,
            terms: self
                .terms
                .iter()
                .map(|(k, f)| (k.clone(), f.scale(factor)))
                .collect(),
        }
    }

    pub fn neg(&self) -> Superform {
        self.scale(&-Rat::one())
    }

    /// Sum of two forms. Empty forms are compatible with any bidegree.
    pub fn add(&self, other: &Superform) -> Superform {
        assert_eq!(self.ambient_dim, other.ambient_dim, "ambient mismatch");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            (self.p, self.q),
            (other.p, other.q),
            "bidegree mismatch in sum"
        );
        let mut out = self.clone();
        for ((i, j), f) in &other.terms {
            out.add_term(i.clone(), j.clone(), f.clone());
        }
        out
    }

    pub fn sub(&self, other: &Superform) -> Superform {
        self.add(&other.neg())
    }

    /// The differential in the first degree:
    /// `d'(f d'x_I ∧ d''x_J) = Σ_i ∂f/∂x_i d'x_i ∧ d'x_I ∧ d''x_J`.
    pub fn d_prime(&self) -> Superform {
        let mut out = Superform::zero(self.ambient_dim, self.p + 1, self.q);
        for ((i_set, j_set), f) in &self.terms {
            for i in 0..self.ambient_dim {
                let df = f.partial_derivative(i).expect("index in range");
                if df.is_zero() {
                    continue;
                }
                let Some((merged, negative)) = insert_index(i_set, i) else {
                    continue;
                };
                let signed = if negative { -&df } else { df };
                out.add_term(merged, j_set.clone(), signed);
            }
        }
        out
    }

    /// The differential in the second degree, with the global sign `(-1)^p`
    /// that makes `d'` and `d''` anticommute:
    /// `d''(f d'x_I ∧ d''x_J) = (-1)^p Σ_i ∂f/∂x_i d'x_I ∧ d''x_i ∧ d''x_J`.
    pub fn d_double_prime(&self) -> Superform {
        let mut out = Superform::zero(self.ambient_dim, self.p, self.q + 1);
        let global_negative = self.p % 2 == 1;
        for ((i_set, j_set), f) in &self.terms {
            for i in 0..self.ambient_dim {
                let df = f.partial_derivative(i).expect("index in range");
                if df.is_zero() {
                    continue;
                }
                let Some((merged, shuffle_negative)) = insert_index(j_set, i) else {
                    continue;
                };
                let negative = global_negative ^ shuffle_negative;
                let signed = if negative { -&df } else { df };
                out.add_term(i_set.clone(), merged, signed);
            }
        }
        out
    }

    /// The total differential `d = d' + d''`, as a graded bundle.
    pub fn d_total(&self) -> MixedForm {
        let mut out = MixedForm::zero(self.ambient_dim);
        out.accumulate(self.d_prime());
        out.accumulate(self.d_double_prime());
        out
    }

    /// Wedge product. The cross sign `(-1)^{q1·p2}` moves the incoming
    /// `d'`-block past the resident `d''`-block, which is exactly what makes
    /// `d'` and `d''` graded derivations for this product.
    pub fn wedge(&self, other: &Superform) -> Result<Superform, FormError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(FormError::AmbientMismatch(
                self.ambient_dim,
                other.ambient_dim,
            ));
        }
        let mut out = Superform::zero(self.ambient_dim, self.p + other.p, self.q + other.q);
        let cross_negative = (self.q * other.p) % 2 == 1;
        for ((i1, j1), f) in &self.terms {
            for ((i2, j2), g) in &other.terms {
                let Some((i_merged, i_neg)) = merge_indices(i1, i2) else {
                    continue;
                };
                let Some((j_merged, j_neg)) = merge_indices(j1, j2) else {
                    continue;
                };
                let negative = cross_negative ^ i_neg ^ j_neg;
                let mut coeff = f * g;
                if negative {
                    coeff = -&coeff;
                }
                out.add_term(i_merged, j_merged, coeff);
            }
        }
        Ok(out)
    }

    /// The operator that switches the two factors: `(I, J) ↦ (J, I)`,
    /// coefficients untouched. An involution.
    pub fn j_swap(&self) -> Superform {
        let mut out = Superform::zero(self.ambient_dim, self.q, self.p);
        for ((i, j), f) in &self.terms {
            out.add_term(j.clone(), i.clone(), f.clone());
        }
        out
    }

    /// Restriction to a cell frame: substitute `x = base + B·u` in the
    /// coefficients and expand each `d'x_I ∧ d''x_J` through the exterior
    /// minors of the basis matrix.
    pub fn restrict_to_frame(&self, frame: &CellFrame) -> Superform {
        assert_eq!(frame.ambient_dim(), self.ambient_dim, "ambient mismatch");
        let m = frame.dim();
        let mut out = Superform::zero(m, self.p, self.q);
        if self.p > m || self.q > m {
            return out;
        }
        // x_i = base[i] + Σ_k basis[k][i] u_k, one polynomial in m variables
        // per ambient coordinate.
        let images: Vec<Polynomial> = (0..self.ambient_dim)
            .map(|i| {
                let mut poly = Polynomial::constant(m, frame.base_point[i].clone());
                for (k, b) in frame.basis.iter().enumerate() {
                    poly.add_term(unit_exps(m, k), b[i].clone());
                }
                poly
            })
            .collect();
        // Rows of `basis_mat` are ambient coordinates, columns local ones.
        let basis_mat = Mat::from_rows(
            (0..self.ambient_dim)
                .map(|i| frame.basis.iter().map(|b| b[i].clone()).collect())
                .collect(),
        );
        let k_subsets: Vec<Vec<usize>> = (0..m).combinations(self.p).collect();
        let l_subsets: Vec<Vec<usize>> = (0..m).combinations(self.q).collect();
        for ((i_set, j_set), f) in &self.terms {
            let local_coeff = f.substitute(&images).expect("frame arity");
            if local_coeff.is_zero() {
                continue;
            }
            for k in &k_subsets {
                let det_i = basis_mat.minor_det(i_set, k);
                if det_i.is_zero() {
                    continue;
                }
                for l in &l_subsets {
                    let det_j = basis_mat.minor_det(j_set, l);
                    if det_j.is_zero() {
                        continue;
                    }
                    out.add_term(k.clone(), l.clone(), local_coeff.scale(&(&det_i * &det_j)));
                }
            }
        }
        out
    }

    /// Restriction to a polyhedron, in the coordinates of its span basis
    /// with origin at its base vertex.
    pub fn restrict_to_cell(&self, cell: &Polyhedron) -> CellForm {
        let frame = CellFrame {
            cell_id: cell.id().to_string(),
            base_point: cell.base_vertex().to_vec(),
            basis: cell.span_basis().to_vec(),
        };
        CellForm {
            cell_id: cell.id().to_string(),
            form: self.restrict_to_frame(&frame),
        }
    }

    /// Do the two forms agree as forms on the domain, i.e. do their
    /// restrictions to every maximal cell of the domain's family coincide?
    pub fn equal_on_domain(&self, other: &Superform, domain: &Domain) -> bool {
        MixedForm::from(self.clone()).equal_on_domain(&MixedForm::from(other.clone()), domain)
    }

    /// Does the form restrict to zero on the domain?
    pub fn vanishes_on(&self, domain: &Domain) -> bool {
        domain
            .family()
            .iter()
            .all(|cell| self.restrict_to_frame(&cell.frame).is_zero())
    }
}

impl PartialEq for Superform {
    /// Structural equality; zero forms compare equal across bidegrees.
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.terms == other.terms
            && (self.terms.is_empty() || (self.p, self.q) == (other.p, other.q))
    }
}

impl Eq for Superform {}

impl fmt::Display for Superform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i_set, j_set), poly) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({poly})")?;
            for i in i_set {
                write!(f, " d'x{}", i + 1)?;
            }
            for j in j_set {
                write!(f, " d''x{}", j + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Superform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}] {}", self.p, self.q, self)
    }
}

/// A formal sum of superforms of different bidegrees, held as a graded
/// bundle of homogeneous components.
#[derive(Clone, PartialEq, Eq)]
pub struct MixedForm {
    ambient_dim: usize,
    components: BTreeMap<(usize, usize), Superform>,
}

impl MixedForm {
    pub fn zero(ambient_dim: usize) -> Self {
        MixedForm {
            ambient_dim,
            components: BTreeMap::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&(usize, usize), &Superform)> {
        self.components.iter()
    }

    pub fn component(&self, p: usize, q: usize) -> Option<&Superform> {
        self.components.get(&(p, q))
    }

    /// Add a homogeneous piece into the bundle.
    pub fn accumulate(&mut self, form: Superform) {
        assert_eq!(form.ambient_dim(), self.ambient_dim, "ambient mismatch");
        if form.is_zero() {
            return;
        }
        let key = form.bidegree();
        let merged = match self.components.remove(&key) {
            Some(existing) => existing.add(&form),
            None => form,
        };
        if !merged.is_zero() {
            self.components.insert(key, merged);
        }
    }

    pub fn add(&self, other: &MixedForm) -> MixedForm {
        let mut out = self.clone();
        for (_, c) in other.components() {
            out.accumulate(c.clone());
        }
        out
    }

    pub fn neg(&self) -> MixedForm {
        MixedForm {
            ambient_dim: self.ambient_dim,
            components: self
                .components
                .iter()
                .map(|(k, c)| (*k, c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &MixedForm) -> MixedForm {
        self.add(&other.neg())
    }

    /// `d = d' + d''` applied componentwise.
    pub fn d(&self) -> MixedForm {
        let mut out = MixedForm::zero(self.ambient_dim);
        for c in self.components.values() {
            out.accumulate(c.d_prime());
            out.accumulate(c.d_double_prime());
        }
        out
    }

    /// Total degrees present (each component contributes `p + q`).
    pub fn total_degrees(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = self.components.keys().map(|(p, q)| p + q).collect();
        degrees.sort_unstable();
        degrees.dedup();
        degrees
    }

    pub fn equal_on_domain(&self, other: &MixedForm, domain: &Domain) -> bool {
        self.sub(other).vanishes_on(domain)
    }

    pub fn vanishes_on(&self, domain: &Domain) -> bool {
        domain.family().iter().all(|cell| {
            self.components
                .values()
                .all(|c| c.restrict_to_frame(&cell.frame).is_zero())
        })
    }
}

impl From<Superform> for MixedForm {
    fn from(form: Superform) -> Self {
        let mut out = MixedForm::zero(form.ambient_dim());
        out.accumulate(form);
        out
    }
}

impl fmt::Debug for MixedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .values()
            .map(|c| format!("{c:?}"))
            .collect();
        write!(f, "{}", parts.join("  +  "))
    }
}

fn strictly_increasing(indices: &[usize]) -> bool {
    indices.windows(2).all(|w| w[0] < w[1])
}

fn unit_exps(len: usize, index: usize) -> Vec<u32> {
    let mut exps = vec![0; len];
    exps[index] = 1;
    exps
}

/// Insert `idx` at the front of `d'x_idx ∧ d'x_sorted` and normalize: the
/// sign is negative iff an odd number of transpositions is needed. `None`
/// when the index already occurs.
fn insert_index(sorted: &[usize], idx: usize) -> Option<(Vec<usize>, bool)> {
    if sorted.contains(&idx) {
        return None;
    }
    let position = sorted.iter().filter(|&&k| k < idx).count();
    let mut merged = Vec::with_capacity(sorted.len() + 1);
    merged.extend_from_slice(&sorted[..position]);
    merged.push(idx);
    merged.extend_from_slice(&sorted[position..]);
    Some((merged, position % 2 == 1))
}

/// Merge two increasing index sets, counting the transpositions of the
/// shuffle. `None` when they intersect.
fn merge_indices(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let mut ai = 0;
    let mut bi = 0;
    while ai < a.len() && bi < b.len() {
        if a[ai] == b[bi] {
            return None;
        }
        if a[ai] < b[bi] {
            merged.push(a[ai]);
            ai += 1;
        } else {
            // b[bi] hops over the remaining elements of a.
            inversions += a.len() - ai;
            merged.push(b[bi]);
            bi += 1;
        }
    }
    merged.extend_from_slice(&a[ai..]);
    merged.extend_from_slice(&b[bi..]);
    Some((merged, inversions % 2 == 1))
}
