//! Seeded randomized identity suites.
//!
//! Every suite is deterministic in its seed, bounded in degree and ambient
//! dimension, and checks its identities by exact equality. On failure a
//! report carries a term-minimized counterexample; the suites are the
//! engine behind `check` on the command line and behind several acceptance
//! criteria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::homotopy::{chain_homotopy_check, homotopy_formula_verify, CylinderForm};
use crate::polyalg::{Mat, Polynomial, Rat};
use crate::polyhedra::{Domain, PolyhedralComplex};
use crate::pullback::{naive_pullback, MapPair};
use crate::superforms::Superform;
use crate::{d_prime_primitive, fixtures};

/// Outcome of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub identity: String,
    pub detail: String,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=3);
    Rat::frac(num, den)
}

pub fn rand_poly(rng: &mut ChaCha8Rng, num_vars: usize, max_degree: u32) -> Polynomial {
    let mut poly = Polynomial::zero(num_vars);
    let terms = rng.gen_range(1..=3);
    for _ in 0..terms {
        let mut exps = vec![0u32; num_vars];
        let mut budget = max_degree;
        for e in exps.iter_mut() {
            let step = rng.gen_range(0..=budget);
            *e = step;
            budget -= step;
        }
        poly.add_term(exps, rand_rat(rng));
    }
    poly
}

fn rand_index_set(rng: &mut ChaCha8Rng, ambient: usize, len: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..ambient).collect();
    for i in (1..all.len()).rev() {
        let j = rng.gen_range(0..=i);
        all.swap(i, j);
    }
    let mut set: Vec<usize> = all.into_iter().take(len).collect();
    set.sort_unstable();
    set
}

pub fn rand_form(
    rng: &mut ChaCha8Rng,
    ambient: usize,
    p: usize,
    q: usize,
    max_degree: u32,
) -> Superform {
    let mut form = Superform::zero(ambient, p, q);
    if p > ambient || q > ambient {
        return form;
    }
    let terms = rng.gen_range(1..=2);
    for _ in 0..terms {
        form.add_term(
            rand_index_set(rng, ambient, p),
            rand_index_set(rng, ambient, q),
            rand_poly(rng, ambient, max_degree),
        );
    }
    form
}

/// A random bidegree with `p + q <= total_cap`, valid in the ambient
/// dimension.
fn rand_bidegree(rng: &mut ChaCha8Rng, ambient: usize, total_cap: usize) -> (usize, usize) {
    loop {
        let p = rng.gen_range(0..=ambient.min(total_cap));
        let q = rng.gen_range(0..=ambient.min(total_cap - p));
        if p + q <= total_cap {
            return (p, q);
        }
    }
}

/// A random invertible rational matrix, built as a product of unit
/// triangular matrices so invertibility holds by construction.
pub fn rand_invertible(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let mut lower = Mat::identity(n);
    let mut upper = Mat::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, Rat::from(rng.gen_range(-2i64..=2)));
            upper.set(j, i, Rat::from(rng.gen_range(-2i64..=2)));
        }
    }
    lower.matmul(&upper)
}

fn rand_map_pair(
    rng: &mut ChaCha8Rng,
    source: usize,
    target: usize,
    max_degree: u32,
) -> MapPair {
    let components = (0..target).map(|_| rand_poly(rng, source, max_degree)).collect();
    let mut linear = Mat::zeros(target, source);
    for i in 0..target {
        for j in 0..source {
            linear.set(i, j, Rat::from(rng.gen_range(-2i64..=2)));
        }
    }
    MapPair::new(source, components, linear).expect("consistent shape")
}

fn rand_affine_pair(rng: &mut ChaCha8Rng, source: usize, target: usize) -> MapPair {
    let mut linear = Mat::zeros(target, source);
    for i in 0..target {
        for j in 0..source {
            linear.set(i, j, Rat::from(rng.gen_range(-2i64..=2)));
        }
    }
    let offset = (0..target).map(|_| rand_rat(rng)).collect();
    MapPair::affine(linear, offset)
}

/// Greedy term minimization: drop terms while the predicate keeps failing.
pub fn minimize_failing_form<F>(form: &Superform, still_fails: F) -> Superform
where
    F: Fn(&Superform) -> bool,
{
    let mut current = form.clone();
    loop {
        let keys: Vec<(Vec<usize>, Vec<usize>)> =
            current.terms().map(|(k, _)| k.clone()).collect();
        if keys.len() <= 1 {
            return current;
        }
        let mut shrunk = false;
        for key in keys {
            let (p, q) = current.bidegree();
            let mut candidate = Superform::zero(current.ambient_dim(), p, q);
            for (k, poly) in current.terms() {
                if *k != key {
                    candidate.add_term(k.0.clone(), k.1.clone(), poly.clone());
                }
            }
            if still_fails(&candidate) {
                current = candidate;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            return current;
        }
    }
}

/// The chain homotopy identity, the homotopy formula on stars, the
/// constructive primitive and the basis independence of the homotopy
/// operator, all over the given complex.
pub fn homotopy_suite(
    complex: &std::sync::Arc<PolyhedralComplex>,
    seed: u64,
    count: usize,
) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let r = complex.ambient_dim();
    let base = Domain::full_support(complex);
    let minimal = complex.minimal_cells();

    for case in 0..count {
        // Chain homotopy identity on a random cylinder form: ambient-exact
        // and as forms on the support.
        let (p, q) = rand_bidegree(&mut rng, r + 1, 3);
        let beta = CylinderForm::new(rand_form(&mut rng, r + 1, p, q, 3)).expect("r+1 >= 1");
        let lhs = beta
            .k_prime()
            .d_prime()
            .add(&CylinderForm::new(beta.form().d_prime()).unwrap().k_prime());
        let rhs = beta.end_restriction(1).sub(&beta.end_restriction(0));
        if lhs != rhs {
            let identity = format!("chain homotopy (case {case})");
            let fails = |form: &Superform| {
                let b = CylinderForm::new(form.clone()).unwrap();
                let lhs = b
                    .k_prime()
                    .d_prime()
                    .add(&CylinderForm::new(b.form().d_prime()).unwrap().k_prime());
                lhs != b.end_restriction(1).sub(&b.end_restriction(0))
            };
            let minimized = minimize_failing_form(beta.form(), fails);
            failures.push(Failure {
                identity,
                detail: format!("cylinder form {minimized:?}"),
            });
            continue;
        }
        if !chain_homotopy_check(&beta, &base) {
            failures.push(Failure {
                identity: format!("chain homotopy on support (case {case})"),
                detail: format!("cylinder form {:?}", beta.form()),
            });
        }

        // Homotopy formula on a random star.
        let star_cell = minimal[rng.gen_range(0..minimal.len())];
        let star = Domain::star(complex, complex.cell(star_cell).id()).expect("minimal cell");
        let (p, q) = rand_bidegree(&mut rng, r, 3);
        let alpha = rand_form(&mut rng, r, p, q, 3);
        match homotopy_formula_verify(&alpha, &star) {
            Ok(true) => {}
            Ok(false) => {
                let fails = |form: &Superform| {
                    !homotopy_formula_verify(form, &star).unwrap_or(true)
                };
                let minimized = minimize_failing_form(&alpha, fails);
                failures.push(Failure {
                    identity: format!("homotopy formula (case {case})"),
                    detail: format!("form {minimized:?} on {star}"),
                });
            }
            Err(err) => failures.push(Failure {
                identity: format!("homotopy formula (case {case})"),
                detail: format!("setup error: {err}"),
            }),
        }

        // Constructive primitive on a d'-exact input.
        let (p, q) = rand_bidegree(&mut rng, r, 2);
        let gamma = rand_form(&mut rng, r, p, q, 3);
        let alpha = gamma.d_prime();
        if !alpha.is_zero() {
            match d_prime_primitive(&alpha, &star) {
                Ok(beta) => {
                    if !beta.d_prime().equal_on_domain(&alpha, &star) {
                        failures.push(Failure {
                            identity: format!("d' primitive (case {case})"),
                            detail: format!("input {alpha:?} on {star}"),
                        });
                    }
                }
                Err(err) => failures.push(Failure {
                    identity: format!("d' primitive (case {case})"),
                    detail: format!("rejected closed input {alpha:?}: {err}"),
                }),
            }
        }

        // Basis independence of the homotopy operator under a random
        // invertible ambient change fixing t.
        let change = rand_invertible(&mut rng, r);
        let mut lifted = Mat::zeros(r + 1, r + 1);
        for i in 0..r {
            for j in 0..r {
                lifted.set(i, j, change.at(i, j).clone());
            }
        }
        lifted.set(r, r, Rat::one());
        let cyl_change = MapPair::affine(lifted, vec![Rat::zero(); r + 1]);
        let base_change = MapPair::affine(change.clone(), vec![Rat::zero(); r]);
        let (p, q) = rand_bidegree(&mut rng, r + 1, 3);
        let beta = rand_form(&mut rng, r + 1, p, q, 2);
        let conjugated = CylinderForm::new(cyl_change.pullback(&beta).expect("dims"))
            .unwrap()
            .k_prime();
        let direct = base_change
            .pullback(&CylinderForm::new(beta.clone()).unwrap().k_prime())
            .expect("dims");
        if conjugated != direct {
            failures.push(Failure {
                identity: format!("homotopy operator base change (case {case})"),
                detail: format!("form {beta:?} under {change:?}"),
            });
        }
    }

    SuiteReport {
        suite: "homotopy".to_string(),
        cases: count,
        failures,
    }
}

/// Pullback identities: the fixed product-map counterexample for the naive
/// pullback, commutation of the generalized pullback with `d'`,
/// functoriality of composition, and naive/generalized agreement on affine
/// maps.
pub fn pullback_suite(seed: u64, count: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();

    // The product-map counterexample is part of every run: the naive
    // pullback must fail to commute on it, the generalized one must not.
    counterexample_reproduction(&mut failures);

    for case in 0..count {
        let source = rng.gen_range(1..=3);
        let target = rng.gen_range(1..=3);
        let f = rand_map_pair(&mut rng, source, target, 2);
        let (p, q) = rand_bidegree(&mut rng, target, 2);
        let alpha = rand_form(&mut rng, target, p, q, 2);

        // d' commutation.
        let lhs = f.pullback(&alpha).expect("dims").d_prime();
        let rhs = f.pullback(&alpha.d_prime()).expect("dims");
        if lhs != rhs {
            let fails = |form: &Superform| {
                f.pullback(form).expect("dims").d_prime() != f.pullback(&form.d_prime()).expect("dims")
            };
            let minimized = minimize_failing_form(&alpha, fails);
            failures.push(Failure {
                identity: format!("pullback commutes with d' (case {case})"),
                detail: format!("map {:?}, form {minimized:?}", f.components()),
            });
        }

        // Functoriality (F ∘ G)^* = G^* ∘ F^*.
        let inner_source = rng.gen_range(1..=3);
        let g = rand_map_pair(&mut rng, inner_source, source, 2);
        let composed = f.compose(&g).expect("dims");
        let via_composed = composed.pullback(&alpha).expect("dims");
        let via_stages = g.pullback(&f.pullback(&alpha).expect("dims")).expect("dims");
        if via_composed != via_stages {
            failures.push(Failure {
                identity: format!("functoriality (case {case})"),
                detail: format!("outer {:?}, inner {:?}", f.components(), g.components()),
            });
        }

        // Naive equals generalized on affine maps.
        let affine = rand_affine_pair(&mut rng, source, target);
        let naive = naive_pullback(affine.components(), source, &alpha).expect("dims");
        let generalized = affine.pullback(&alpha).expect("dims");
        if naive != generalized {
            failures.push(Failure {
                identity: format!("affine naive agreement (case {case})"),
                detail: format!("map {:?}, form {alpha:?}", affine.components()),
            });
        }
    }

    SuiteReport {
        suite: "pullback".to_string(),
        cases: count,
        failures,
    }
}

fn counterexample_reproduction(failures: &mut Vec<Failure>) {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let product_map = vec![&x * &y];
    let ddt = Superform::basis_term(1, vec![], vec![0], Polynomial::one(1));

    let pulled = naive_pullback(&product_map, 2, &ddt).expect("dims");
    let mut expected_d = Superform::zero(2, 1, 1);
    expected_d.add_term(vec![0], vec![1], Polynomial::one(2));
    expected_d.add_term(vec![1], vec![0], Polynomial::one(2));
    let naive_breaks = pulled.d_prime() == expected_d
        && !pulled.d_prime().is_zero()
        && naive_pullback(&product_map, 2, &ddt.d_prime())
            .expect("dims")
            .is_zero();
    if !naive_breaks {
        failures.push(Failure {
            identity: "naive pullback counterexample".to_string(),
            detail: "d' of the naive pullback of d''t along s(x,y) = xy must be \
                     d'x∧d''y + d'y∧d''x while the pullback of d'd''t is zero"
                .to_string(),
        });
    }

    let f = MapPair::new(2, product_map, Mat::zeros(1, 2)).expect("shape");
    let commutes = f.pullback(&ddt).expect("dims").d_prime()
        == f.pullback(&ddt.d_prime()).expect("dims");
    if !commutes {
        failures.push(Failure {
            identity: "generalized pullback on the counterexample".to_string(),
            detail: "the map-pair pullback must commute with d' on d''t".to_string(),
        });
    }
}

/// Convenience handle for the five reference complexes.
pub fn fixture_complexes() -> Vec<(&'static str, std::sync::Arc<PolyhedralComplex>)> {
    vec![
        ("segment", fixtures::segment()),
        ("solid_triangle", fixtures::solid_triangle()),
        ("triangle_boundary", fixtures::triangle_boundary()),
        ("tropical_line", fixtures::tropical_line()),
        ("tetrahedron_boundary", fixtures::tetrahedron_boundary()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_fixtures() {
        let report = pullback_suite(11, 10);
        assert!(report.passed(), "failures: {:?}", report.failures);
        for (_, complex) in fixture_complexes() {
            let report = homotopy_suite(&complex, 7, 5);
            assert!(report.passed(), "failures: {:?}", report.failures);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let a = pullback_suite(42, 5);
        let b = pullback_suite(42, 5);
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.failures.len(), b.failures.len());
        // Same seed, same generated stream: spot-check the generator.
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(rand_poly(&mut r1, 2, 3), rand_poly(&mut r2, 2, 3));
    }

    #[test]
    fn empty_runs_pass() {
        assert!(pullback_suite(0, 0).passed());
        let complex = fixtures::segment();
        assert!(homotopy_suite(&complex, 0, 0).passed());
    }

    #[test]
    fn minimizer_keeps_failures_failing() {
        // Minimize against an artificial predicate: "has a term with
        // nonzero coefficient on d'x1".
        let mut form = Superform::zero(2, 1, 0);
        form.add_term(vec![0], vec![], Polynomial::one(2));
        form.add_term(vec![1], vec![], Polynomial::var(2, 0));
        let fails =
            |f: &Superform| f.terms().any(|((i, _), _)| i.as_slice() == [0usize]);
        let minimized = minimize_failing_form(&form, fails);
        assert_eq!(minimized.terms().count(), 1);
        assert!(fails(&minimized));
    }
}
