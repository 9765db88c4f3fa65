//! The chain homotopy operator on cylinder forms and everything built from
//! it: the homotopy formula on polyhedral stars, constructive primitives for
//! `d'` and `d''`, and the reduction of `d`-closed forms to pure second
//! degree.
//!
//! A cylinder form lives in ambient dimension `r + 1` with the last
//! coordinate playing the role of the interval variable `t`. The operator
//! integrates the `d't`-component over `[0, 1]` and satisfies
//! `d'K' + K'd' = i_1^* - i_0^*` with `i_0`, `i_1` the two end inclusions.

use thiserror::Error;

use crate::polyalg::{Mat, Polynomial, Rat};
use crate::polyhedra::Domain;
use crate::pullback::{contraction_components, MapPair, PullbackVerdict};
use crate::superforms::{MixedForm, Superform};

#[derive(Debug, Error)]
pub enum HomotopyError {
    #[error("cylinder forms need at least one variable")]
    NoVariables,
    #[error("form lives in dimension {form}, domain in dimension {domain}")]
    DimensionMismatch { form: usize, domain: usize },
    #[error("domain is not a polyhedral star")]
    NotAStar,
    #[error("{operator}-closedness fails on the domain: witness cell {witness_cell}")]
    NotClosed {
        operator: &'static str,
        witness_cell: String,
    },
    #[error("a primitive in the first degree needs p > 0")]
    ZeroFirstDegree,
    #[error("a primitive in the second degree needs q > 0")]
    ZeroSecondDegree,
    #[error("the {which} map pair was not certified: {verdict:?}")]
    PullbackNotVerified {
        which: &'static str,
        verdict: PullbackVerdict,
    },
    #[error("expected a form of one total degree, found degrees {0:?}")]
    MixedTotalDegree(Vec<usize>),
}

/// A superform on a cylinder: ambient dimension `r + 1`, last variable `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderForm(Superform);

/// The four-bucket decomposition of a cylinder form by whether `d't` and
/// `d''t` occur: `β = a + d't ∧ b + d''t-part e + d't ∧ d''t-part g`.
pub struct CylinderBuckets {
    /// Terms without `t`-differentials.
    pub plain: Superform,
    /// Terms with `d't` only.
    pub d_prime_t: Superform,
    /// Terms with `d''t` only.
    pub d_double_t: Superform,
    /// Terms with both.
    pub both: Superform,
}

impl CylinderForm {
    pub fn new(form: Superform) -> Result<Self, HomotopyError> {
        if form.ambient_dim() == 0 {
            return Err(HomotopyError::NoVariables);
        }
        Ok(CylinderForm(form))
    }

    pub fn form(&self) -> &Superform {
        &self.0
    }

    /// Base dimension `r`; the form itself lives in `r + 1` variables.
    pub fn base_dim(&self) -> usize {
        self.0.ambient_dim() - 1
    }

    fn t_index(&self) -> usize {
        self.0.ambient_dim() - 1
    }

    /// Split the stored terms into the four buckets. Reassembling them
    /// returns the original form.
    pub fn buckets(&self) -> CylinderBuckets {
        let (p, q) = self.0.bidegree();
        let r1 = self.0.ambient_dim();
        let t = self.t_index();
        let mut plain = Superform::zero(r1, p, q);
        let mut d_prime_t = Superform::zero(r1, p, q);
        let mut d_double_t = Superform::zero(r1, p, q);
        let mut both = Superform::zero(r1, p, q);
        for ((i, j), f) in self.0.terms() {
            let bucket = match (i.contains(&t), j.contains(&t)) {
                (false, false) => &mut plain,
                (true, false) => &mut d_prime_t,
                (false, true) => &mut d_double_t,
                (true, true) => &mut both,
            };
            bucket.add_term(i.clone(), j.clone(), f.clone());
        }
        CylinderBuckets {
            plain,
            d_prime_t,
            d_double_t,
            both,
        }
    }

    /// The chain homotopy operator: only the `d't`-bucket contributes, with
    /// its coefficient integrated over `t` from 0 to 1.
    ///
    /// A stored term `c · d'x_I ∧ d't ∧ d''x_J` equals
    /// `(-1)^{|I|} c · d't ∧ d'x_I ∧ d''x_J`, so the emitted coefficient is
    /// `(-1)^{|I|} ∫ c dt`.
    pub fn k_prime(&self) -> Superform {
        let (p, q) = self.0.bidegree();
        let r = self.base_dim();
        let t = self.t_index();
        let mut out = Superform::zero(r, p.saturating_sub(1), q);
        if p == 0 {
            return out;
        }
        for ((i_set, j_set), f) in self.0.terms() {
            if j_set.contains(&t) || !i_set.contains(&t) {
                continue;
            }
            // t is the largest index, hence last in the sorted set.
            debug_assert_eq!(*i_set.last().unwrap(), t);
            let base_i = i_set[..i_set.len() - 1].to_vec();
            let integrated = f
                .integrate_unit_interval(t)
                .expect("t in range")
                .drop_last_var();
            if integrated.is_zero() {
                continue;
            }
            let signed = if base_i.len() % 2 == 1 {
                -&integrated
            } else {
                integrated
            };
            out.add_term(base_i, j_set.clone(), signed);
        }
        out
    }

    /// Pullback along the end inclusion `x ↦ (x, endpoint)`: substitute `t`,
    /// drop every term carrying a `t`-differential.
    pub fn end_restriction(&self, endpoint: u8) -> Superform {
        assert!(endpoint <= 1);
        let (p, q) = self.0.bidegree();
        let r = self.base_dim();
        let t = self.t_index();
        let value = Rat::from(i64::from(endpoint));
        let mut images: Vec<Polynomial> = (0..r).map(|i| Polynomial::var(r, i)).collect();
        images.push(Polynomial::constant(r, value));
        let mut out = Superform::zero(r, p, q);
        for ((i_set, j_set), f) in self.0.terms() {
            if i_set.contains(&t) || j_set.contains(&t) {
                continue;
            }
            out.add_term(
                i_set.clone(),
                j_set.clone(),
                f.substitute(&images).expect("arity"),
            );
        }
        out
    }

    /// The end inclusion as an affine map pair, for cross-checking
    /// [`CylinderForm::end_restriction`] against the generic pullback.
    pub fn end_inclusion(r: usize, endpoint: u8) -> MapPair {
        let mut linear = Mat::zeros(r + 1, r);
        for i in 0..r {
            linear.set(i, i, Rat::one());
        }
        let mut offset = vec![Rat::zero(); r + 1];
        offset[r] = Rat::from(i64::from(endpoint));
        MapPair::affine(linear, offset)
    }
}

/// Does `d'K'β + K'd'β = i_1^*β - i_0^*β` hold on the domain?
///
/// The identity actually holds at the level of ambient forms; the domain
/// only says where equality is tested.
pub fn chain_homotopy_check(beta: &CylinderForm, base: &Domain) -> bool {
    let lhs = beta.k_prime().d_prime().add(
        &CylinderForm::new(beta.form().d_prime())
            .expect("same ambient")
            .k_prime(),
    );
    let rhs = beta.end_restriction(1).sub(&beta.end_restriction(0));
    lhs.equal_on_domain(&rhs, base)
}

/// The pair of map pairs driving the homotopy formula on a star with center
/// `z`: `F = (const z, id)` and the contraction
/// `G = ((x, t) ↦ z + t(x - z), pr_1)`.
pub fn contraction_pair(z: &[Rat]) -> (MapPair, MapPair) {
    let r = z.len();
    let f = MapPair::constant_to_point(z);
    let mut projection = Mat::zeros(r, r + 1);
    for i in 0..r {
        projection.set(i, i, Rat::one());
    }
    let g = MapPair::new(r + 1, contraction_components(z, r), projection)
        .expect("contraction shape");
    (f, g)
}

fn require_star(domain: &Domain) -> Result<Vec<Rat>, HomotopyError> {
    domain
        .star_center()
        .map(<[Rat]>::to_vec)
        .ok_or(HomotopyError::NotAStar)
}

fn certified_contraction(domain: &Domain) -> Result<(MapPair, MapPair), HomotopyError> {
    let z = require_star(domain)?;
    let (f, g) = contraction_pair(&z);
    let f_verdict = f.allows_pullback(domain, domain);
    if !f_verdict.is_verified() {
        return Err(HomotopyError::PullbackNotVerified {
            which: "center",
            verdict: f_verdict,
        });
    }
    let g_verdict = g.allows_pullback(&domain.cylinder(), domain);
    if !g_verdict.is_verified() {
        return Err(HomotopyError::PullbackNotVerified {
            which: "contraction",
            verdict: g_verdict,
        });
    }
    Ok((f, g))
}

/// Check `α - F^*α = d'K'G^*α + K'G^*d'α` exactly on a star domain.
pub fn homotopy_formula_verify(
    alpha: &Superform,
    domain: &Domain,
) -> Result<bool, HomotopyError> {
    if alpha.ambient_dim() != domain.ambient_dim() {
        return Err(HomotopyError::DimensionMismatch {
            form: alpha.ambient_dim(),
            domain: domain.ambient_dim(),
        });
    }
    let (f, g) = certified_contraction(domain)?;
    let lhs = alpha.sub(&f.pullback(alpha).expect("dimensions checked"));
    let g_alpha = CylinderForm::new(g.pullback(alpha).expect("dimensions checked"))?;
    let g_d_alpha =
        CylinderForm::new(g.pullback(&alpha.d_prime()).expect("dimensions checked"))?;
    let rhs = g_alpha.k_prime().d_prime().add(&g_d_alpha.k_prime());
    Ok(lhs.equal_on_domain(&rhs, domain))
}

fn closedness_witness(form: &Superform, domain: &Domain) -> Option<String> {
    domain
        .family()
        .iter()
        .find(|cell| !form.restrict_to_frame(&cell.frame).is_zero())
        .map(|cell| cell.id.clone())
}

/// Constructive primitive: for `d'`-closed `α` of first degree `p > 0` on a
/// star, returns `β = K'G^*α` with `d'β = α` on the star.
///
/// The returned primitive is verified before it is handed out; a failure of
/// that verification would be a bug, not an input condition, and panics.
pub fn d_prime_primitive(
    alpha: &Superform,
    domain: &Domain,
) -> Result<Superform, HomotopyError> {
    if alpha.ambient_dim() != domain.ambient_dim() {
        return Err(HomotopyError::DimensionMismatch {
            form: alpha.ambient_dim(),
            domain: domain.ambient_dim(),
        });
    }
    let (p, _) = alpha.bidegree();
    if p == 0 && !alpha.is_zero() {
        return Err(HomotopyError::ZeroFirstDegree);
    }
    if let Some(witness_cell) = closedness_witness(&alpha.d_prime(), domain) {
        return Err(HomotopyError::NotClosed {
            operator: "d'",
            witness_cell,
        });
    }
    let (_, g) = certified_contraction(domain)?;
    let beta = CylinderForm::new(g.pullback(alpha).expect("dimensions checked"))?.k_prime();
    assert!(
        beta.d_prime().equal_on_domain(alpha, domain),
        "primitive postcondition failed for {alpha:?} on {domain}"
    );
    Ok(beta)
}

/// Constructive primitive for `d''`, obtained by conjugating the `d'`-side
/// with the factor swap: `J d' J = (-1)^p d''` fixes the sign.
pub fn d_double_prime_primitive(
    alpha: &Superform,
    domain: &Domain,
) -> Result<Superform, HomotopyError> {
    if alpha.ambient_dim() != domain.ambient_dim() {
        return Err(HomotopyError::DimensionMismatch {
            form: alpha.ambient_dim(),
            domain: domain.ambient_dim(),
        });
    }
    let (p, q) = alpha.bidegree();
    if q == 0 && !alpha.is_zero() {
        return Err(HomotopyError::ZeroSecondDegree);
    }
    if let Some(witness_cell) = closedness_witness(&alpha.d_double_prime(), domain) {
        return Err(HomotopyError::NotClosed {
            operator: "d''",
            witness_cell,
        });
    }
    if alpha.is_zero() {
        return Ok(Superform::zero(alpha.ambient_dim(), p, 0));
    }
    let swapped_primitive = d_prime_primitive(&alpha.j_swap(), domain)?;
    let sign = if p % 2 == 1 { -Rat::one() } else { Rat::one() };
    let beta = swapped_primitive.j_swap().scale(&sign);
    assert!(
        beta.d_double_prime().equal_on_domain(alpha, domain),
        "d'' primitive postcondition failed for {alpha:?} on {domain}"
    );
    Ok(beta)
}

/// Reduce a `d`-closed form of total degree `k` on a star: returns
/// `(β, γ)` with `γ = α - dβ` of pure bidegree `(0, k)` on the domain and
/// `d'γ = d''γ = dγ = 0` there. For `k` above the complex dimension `γ`
/// vanishes on the domain and `α` is exact.
///
/// Writing `α = Σ α_i` with `α_i` of bidegree `(k-i, i)`, the pieces
/// `β_i` solve `d'β_i = α_i - d''β_{i-1}` one bidegree at a time.
pub fn d_primitive_reduction(
    alpha: &MixedForm,
    domain: &Domain,
) -> Result<(MixedForm, Superform), HomotopyError> {
    if alpha.ambient_dim() != domain.ambient_dim() {
        return Err(HomotopyError::DimensionMismatch {
            form: alpha.ambient_dim(),
            domain: domain.ambient_dim(),
        });
    }
    let r = alpha.ambient_dim();
    let degrees = alpha.total_degrees();
    let k = match degrees.as_slice() {
        [] => return Ok((MixedForm::zero(r), Superform::zero(r, 0, 0))),
        [k] => *k,
        _ => return Err(HomotopyError::MixedTotalDegree(degrees)),
    };

    // d-closedness on the domain, reported with a witness cell.
    let d_alpha = alpha.d();
    for cell in domain.family() {
        let dies = d_alpha
            .components()
            .all(|(_, c)| c.restrict_to_frame(&cell.frame).is_zero());
        if !dies {
            return Err(HomotopyError::NotClosed {
                operator: "d",
                witness_cell: cell.id.clone(),
            });
        }
    }

    let component = |i: usize| -> Superform {
        alpha
            .component(k - i, i)
            .cloned()
            .unwrap_or_else(|| Superform::zero(r, k - i, i))
    };

    if k == 0 {
        return Ok((MixedForm::zero(r), component(0)));
    }

    let mut beta = MixedForm::zero(r);
    let mut previous = Superform::zero(r, k, 0); // β_{-1} = 0 placeholder
    for i in 0..k {
        let target = if i == 0 {
            component(0)
        } else {
            component(i).sub(&previous.d_double_prime())
        };
        let beta_i = d_prime_primitive(&target, domain)?;
        beta.accumulate(beta_i.clone());
        previous = beta_i;
    }
    let gamma = component(k).sub(&previous.d_double_prime());

    // Postconditions of the reduction, all on the domain.
    let reassembled = alpha.sub(&beta.d());
    assert!(
        reassembled.equal_on_domain(&MixedForm::from(gamma.clone()), domain),
        "reduction postcondition: α - dβ must agree with γ on {domain}"
    );
    assert!(gamma.d_prime().vanishes_on(domain));
    assert!(gamma.d_double_prime().vanishes_on(domain));
    assert!(gamma.d_total().d().is_zero() || gamma.d_total().vanishes_on(domain));
    if k > domain.complex().dimension() {
        assert!(gamma.vanishes_on(domain), "γ must vanish above the dimension");
    }
    Ok((beta, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn var(r: usize, i: usize) -> Polynomial {
        Polynomial::var(r, i)
    }

    #[test]
    fn k_prime_elementary_integrals() {
        // Ambient (x, t): β = t d't integrates to the constant 1/2.
        let beta = CylinderForm::new(Superform::basis_term(2, vec![1], vec![], var(2, 1)))
            .unwrap();
        let expected = Superform::function(Polynomial::constant(1, Rat::frac(1, 2)));
        assert_eq!(beta.k_prime(), expected);

        // β = x t d't ∧ d''x ↦ (x/2) d''x.
        let beta = CylinderForm::new(Superform::basis_term(
            2,
            vec![1],
            vec![0],
            &var(2, 0) * &var(2, 1),
        ))
        .unwrap();
        let expected =
            Superform::basis_term(1, vec![], vec![0], var(1, 0).scale(&Rat::frac(1, 2)));
        assert_eq!(beta.k_prime(), expected);

        // No d't factor: the operator kills all other buckets.
        let no_dt = [
            Superform::basis_term(2, vec![0], vec![], var(2, 1)), // plain
            Superform::basis_term(2, vec![], vec![1], var(2, 1)), // d''t
            Superform::basis_term(2, vec![1], vec![1], var(2, 0)), // both
        ];
        for form in no_dt {
            let beta = CylinderForm::new(form).unwrap();
            assert!(beta.k_prime().is_zero());
        }
    }

    #[test]
    fn bucket_decomposition_partitions() {
        let mut form = Superform::zero(3, 1, 1);
        form.add_term(vec![0], vec![1], var(3, 2)); // plain
        form.add_term(vec![2], vec![1], var(3, 0)); // d't
        form.add_term(vec![0], vec![2], var(3, 1)); // d''t
        form.add_term(vec![2], vec![2], Polynomial::one(3)); // both
        let beta = CylinderForm::new(form.clone()).unwrap();
        let buckets = beta.buckets();
        let reassembled = buckets
            .plain
            .add(&buckets.d_prime_t)
            .add(&buckets.d_double_t)
            .add(&buckets.both);
        assert_eq!(reassembled, form);
        assert_eq!(buckets.d_prime_t.terms().count(), 1);
        assert_eq!(buckets.both.terms().count(), 1);
    }

    #[test]
    fn end_restrictions() {
        // a(x, t) with no t-differentials evaluates at the endpoint.
        let beta = CylinderForm::new(Superform::function(&var(2, 0) * &var(2, 1))).unwrap();
        assert_eq!(beta.end_restriction(1), Superform::function(var(1, 0)));
        assert!(beta.end_restriction(0).is_zero());

        // Terms with d't die under the end inclusions.
        let beta =
            CylinderForm::new(Superform::basis_term(2, vec![1], vec![], var(2, 0))).unwrap();
        assert!(beta.end_restriction(0).is_zero());
        assert!(beta.end_restriction(1).is_zero());

        // t · d''x ↦ endpoint · d''x.
        let beta =
            CylinderForm::new(Superform::basis_term(2, vec![], vec![0], var(2, 1))).unwrap();
        assert_eq!(
            beta.end_restriction(1),
            Superform::basis_term(1, vec![], vec![0], Polynomial::one(1))
        );
        assert!(beta.end_restriction(0).is_zero());
    }

    #[test]
    fn end_restriction_matches_affine_pullback() {
        let mut form = Superform::zero(3, 1, 1);
        form.add_term(vec![0], vec![1], &var(3, 2) * &var(3, 0));
        form.add_term(vec![2], vec![1], var(3, 0));
        form.add_term(vec![0], vec![2], var(3, 1));
        let beta = CylinderForm::new(form.clone()).unwrap();
        for endpoint in [0u8, 1u8] {
            let inclusion = CylinderForm::end_inclusion(2, endpoint);
            assert_eq!(
                beta.end_restriction(endpoint),
                inclusion.pullback(&form).unwrap()
            );
        }
    }

    #[test]
    fn chain_homotopy_on_the_four_buckets() {
        let complex = fixtures::segment();
        let base = Domain::full_support(&complex);
        let r1 = 3; // (x1, x2, t)

        // Case of a plain term: reduces to the fundamental theorem.
        let a = CylinderForm::new(Superform::basis_term(
            r1,
            vec![0],
            vec![],
            &var(r1, 2) * &var(r1, 0),
        ))
        .unwrap();
        assert!(chain_homotopy_check(&a, &base));
        // Here both pullbacks differ: i_1^* - i_0^* = x1 d'x1.
        let delta = a.end_restriction(1).sub(&a.end_restriction(0));
        assert_eq!(delta, Superform::basis_term(2, vec![0], vec![], var(2, 0)));

        // d't bucket and the two d''t buckets.
        for form in [
            Superform::basis_term(r1, vec![2], vec![], &var(r1, 0) * &var(r1, 2)),
            Superform::basis_term(r1, vec![0], vec![2], var(r1, 2)),
            Superform::basis_term(r1, vec![2], vec![2], var(r1, 0)),
        ] {
            let beta = CylinderForm::new(form).unwrap();
            assert!(chain_homotopy_check(&beta, &base));
        }
    }

    #[test]
    fn contraction_pair_shape() {
        let z = [Rat::zero(), Rat::zero()];
        let (f, g) = contraction_pair(&z);
        // s_F is constant z with identity linear part.
        assert!(f.is_affine());
        assert_eq!(f.source_dim(), 2);
        // s_G(., 1) = id and s_G(., 0) = z, checked by substitution of t.
        let at = |t: i64, x: &[i64]| -> Vec<Rat> {
            let point: Vec<Rat> = x
                .iter()
                .map(|&c| Rat::from(c))
                .chain([Rat::from(t)])
                .collect();
            g.components()
                .iter()
                .map(|c| c.evaluate(&point).unwrap())
                .collect()
        };
        assert_eq!(at(1, &[3, -2]), vec![Rat::from(3), Rat::from(-2)]);
        assert_eq!(at(0, &[3, -2]), vec![Rat::zero(), Rat::zero()]);
        // With z = 0 the contraction is plain scaling s_G = t·x.
        let expected = contraction_components(&z, 2);
        assert_eq!(g.components(), expected.as_slice());
    }

    #[test]
    fn homotopy_formula_hand_expansion() {
        // α = d'x1 on the star of a segment endpoint: G^*α = t d'x1 + (x1 -
        // z1) d't, so K'G^*α = x1 - z1 and the formula closes with F^*α = 0.
        let complex = fixtures::segment();
        let star = Domain::star(&complex, "a").unwrap();
        let alpha = Superform::basis_term(2, vec![0], vec![], Polynomial::one(2));
        assert!(homotopy_formula_verify(&alpha, &star).unwrap());

        let z = star.star_center().unwrap().to_vec();
        let (_, g) = contraction_pair(&z);
        let g_alpha = CylinderForm::new(g.pullback(&alpha).unwrap()).unwrap();
        let mut x_minus_z = var(2, 0);
        x_minus_z.add_term(vec![0, 0], -&z[0]);
        assert_eq!(g_alpha.k_prime(), Superform::function(x_minus_z));
    }

    #[test]
    fn homotopy_formula_constant_function() {
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "a").unwrap();
        let alpha = Superform::function(Polynomial::constant(2, Rat::from(7)));
        // Both sides vanish: c - F^*c = 0 and the right side integrates
        // nothing.
        assert!(homotopy_formula_verify(&alpha, &star).unwrap());
    }

    #[test]
    fn homotopy_formula_requires_star() {
        let complex = fixtures::segment();
        let full = Domain::full_support(&complex);
        let alpha = Superform::basis_term(2, vec![0], vec![], Polynomial::one(2));
        assert!(matches!(
            homotopy_formula_verify(&alpha, &full),
            Err(HomotopyError::NotAStar)
        ));
    }

    #[test]
    fn poincare_primitive_radial_form() {
        // α = x d'x + y d'y on the star of the origin vertex of the solid
        // triangle; the primitive is (x^2 + y^2)/2.
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "a").unwrap();
        let mut alpha = Superform::zero(2, 1, 0);
        alpha.add_term(vec![0], vec![], var(2, 0));
        alpha.add_term(vec![1], vec![], var(2, 1));
        let beta = d_prime_primitive(&alpha, &star).unwrap();
        let mut expected = Polynomial::zero(2);
        expected.add_term(vec![2, 0], Rat::frac(1, 2));
        expected.add_term(vec![0, 2], Rat::frac(1, 2));
        assert_eq!(beta, Superform::function(expected));
        assert!(beta.d_prime().equal_on_domain(&alpha, &star));
    }

    #[test]
    fn poincare_primitive_of_constant_one_form() {
        // α = d'x1 has primitive x1 - z1.
        let complex = fixtures::segment();
        let star = Domain::star(&complex, "b").unwrap();
        let z = star.star_center().unwrap().to_vec();
        let alpha = Superform::basis_term(2, vec![0], vec![], Polynomial::one(2));
        let beta = d_prime_primitive(&alpha, &star).unwrap();
        let mut expected = var(2, 0);
        expected.add_term(vec![0, 0], -&z[0]);
        assert_eq!(beta, Superform::function(expected));
    }

    #[test]
    fn poincare_primitive_accepts_zero_and_rejects_non_closed() {
        let complex = fixtures::segment();
        let star = Domain::star(&complex, "a").unwrap();
        // A form that restricts to zero on the star is accepted with a zero
        // primitive: x2 d'x1 dies on the x-axis.
        let alpha = Superform::basis_term(2, vec![0], vec![], var(2, 1));
        let beta = d_prime_primitive(&alpha, &star).unwrap();
        assert!(beta.d_prime().equal_on_domain(&alpha, &star));

        // On a 2-cell the same form is not closed: witness reported.
        let tri = fixtures::solid_triangle();
        let tri_star = Domain::star(&tri, "a").unwrap();
        match d_prime_primitive(&alpha, &tri_star) {
            Err(HomotopyError::NotClosed { witness_cell, .. }) => {
                assert_eq!(witness_cell, "abc");
            }
            other => panic!("expected closedness failure, got {other:?}"),
        }
    }

    #[test]
    fn d_double_primitive_by_conjugation() {
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "a").unwrap();
        // α = x d''x + y d''y, the mirror of the radial example.
        let mut alpha = Superform::zero(2, 0, 1);
        alpha.add_term(vec![], vec![0], var(2, 0));
        alpha.add_term(vec![], vec![1], var(2, 1));
        let beta = d_double_prime_primitive(&alpha, &star).unwrap();
        let mut expected = Polynomial::zero(2);
        expected.add_term(vec![2, 0], Rat::frac(1, 2));
        expected.add_term(vec![0, 2], Rat::frac(1, 2));
        assert_eq!(beta, Superform::function(expected));

        // α = d''x1 on a segment-endpoint star: primitive x1 - z1.
        let seg = fixtures::segment();
        let seg_star = Domain::star(&seg, "b").unwrap();
        let z = seg_star.star_center().unwrap().to_vec();
        let alpha = Superform::basis_term(2, vec![], vec![0], Polynomial::one(2));
        let beta = d_double_prime_primitive(&alpha, &seg_star).unwrap();
        let mut expected = var(2, 0);
        expected.add_term(vec![0, 0], -&z[0]);
        assert_eq!(beta, Superform::function(expected));

        // Zero maps to zero.
        let zero = Superform::zero(2, 0, 1);
        assert!(d_double_prime_primitive(&zero, &seg_star)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn reduction_of_pure_second_degree_form() {
        // α already of bidegree (0, k) and d'-closed on the star: β = 0 and
        // γ = α.
        let complex = fixtures::segment();
        let star = Domain::star(&complex, "a").unwrap();
        let alpha = Superform::basis_term(2, vec![], vec![0], Polynomial::one(2));
        let (beta, gamma) = d_primitive_reduction(&alpha.clone().into(), &star).unwrap();
        assert!(beta.is_zero());
        assert_eq!(gamma, alpha);
    }

    #[test]
    fn reduction_of_exact_degree_one_form() {
        // α = d(f) for f = x^2 y: reduce and check γ is pure (0,1) and
        // closed on the star.
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "a").unwrap();
        let f = &(&var(2, 0) * &var(2, 0)) * &var(2, 1);
        let alpha = Superform::function(f).d_total();
        let (beta, gamma) = d_primitive_reduction(&alpha, &star).unwrap();
        let gamma_mixed = MixedForm::from(gamma.clone());
        assert!(alpha.sub(&beta.d()).equal_on_domain(&gamma_mixed, &star));
        assert_eq!(gamma.bidegree(), (0, 1));
        assert!(gamma.d_prime().vanishes_on(&star));
        assert!(gamma.d_double_prime().vanishes_on(&star));
    }

    #[test]
    fn reduction_above_dimension_is_exact() {
        // k = 3 on the 2-dimensional solid triangle: any d-closed α (here
        // α = dμ) must be exact, with γ vanishing on the star.
        let complex = fixtures::solid_triangle();
        let star = Domain::star(&complex, "a").unwrap();
        let mut mu = MixedForm::zero(2);
        mu.accumulate(Superform::basis_term(
            2,
            vec![0, 1],
            vec![],
            &var(2, 0) * &var(2, 1),
        ));
        mu.accumulate(Superform::basis_term(2, vec![0], vec![1], var(2, 0)));
        mu.accumulate(Superform::basis_term(2, vec![], vec![0, 1], var(2, 1)));
        let alpha = mu.d();
        assert_eq!(alpha.total_degrees(), vec![3]);
        let (beta, gamma) = d_primitive_reduction(&alpha, &star).unwrap();
        assert!(gamma.vanishes_on(&star));
        assert!(alpha.equal_on_domain(&beta.d(), &star));
    }

    #[test]
    fn k_prime_is_basis_independent() {
        // Conjugating by an invertible change of ambient coordinates that
        // fixes t commutes with the operator.
        let changes = [
            Mat::from_rows(vec![
                vec![Rat::from(2), Rat::from(1)],
                vec![Rat::from(1), Rat::from(1)],
            ]),
            Mat::from_rows(vec![
                vec![Rat::from(0), Rat::from(-1)],
                vec![Rat::from(1), Rat::from(3)],
            ]),
        ];
        let mut form = Superform::zero(3, 1, 1);
        form.add_term(vec![2], vec![1], &var(3, 0) * &var(3, 2));
        form.add_term(vec![0], vec![1], var(3, 1));
        form.add_term(vec![2], vec![0], &var(3, 1) * &var(3, 1));
        let beta = CylinderForm::new(form.clone()).unwrap();
        for m in changes {
            // Extend M to (x, t) ↦ (Mx, t).
            let mut lifted = Mat::zeros(3, 3);
            for i in 0..2 {
                for j in 0..2 {
                    lifted.set(i, j, m.at(i, j).clone());
                }
            }
            lifted.set(2, 2, Rat::one());
            let change_cyl = MapPair::affine(lifted, vec![Rat::zero(); 3]);
            let change_base = MapPair::affine(m, vec![Rat::zero(); 2]);
            let lhs = CylinderForm::new(change_cyl.pullback(&form).unwrap())
                .unwrap()
                .k_prime();
            let rhs = change_base.pullback(&beta.k_prime()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
