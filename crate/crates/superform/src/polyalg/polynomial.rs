use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::Rat;

/// A sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by exponent tuples of length `num_vars`; no zero
/// coefficient is ever stored, so structural equality is equality of
/// polynomial functions.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("expected {expected} images/coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, value: Rat) -> Self {
        let mut p = Polynomial::zero(num_vars);
        p.add_term(vec![0; num_vars], value);
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Polynomial::constant(num_vars, Rat::one())
    }

    /// The coordinate polynomial `x_index`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        let mut p = Polynomial::zero(num_vars);
        p.add_term(exps, Rat::one());
        p
    }

    pub fn monomial(num_vars: usize, exps: Vec<u32>, coeff: Rat) -> Self {
        assert_eq!(exps.len(), num_vars, "exponent tuple length mismatch");
        let mut p = Polynomial::zero(num_vars);
        p.add_term(exps, coeff);
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|e| e[index]).max().unwrap_or(0)
    }

    /// Accumulate one term, keeping the map canonical.
    pub fn add_term(&mut self, exps: Vec<u32>, coeff: Rat) {
        assert_eq!(exps.len(), self.num_vars, "exponent tuple length mismatch");
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.num_vars != other.num_vars {
            return Err(PolyError::VarCountMismatch(self.num_vars, other.num_vars));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.num_vars != other.num_vars {
            return Err(PolyError::VarCountMismatch(self.num_vars, other.num_vars));
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rat) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn partial_derivative(&self, index: usize) -> Result<Polynomial, PolyError> {
        if index >= self.num_vars {
            return Err(PolyError::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (e, c) in &self.terms {
            let k = e[index];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[index] = k - 1;
            out.add_term(exps, c * &Rat::from(i64::from(k)));
        }
        Ok(out)
    }

    /// Definite integral over variable `index` from 0 to 1. The variable is
    /// eliminated: in the result every term has exponent 0 at `index`.
    pub fn integrate_unit_interval(&self, index: usize) -> Result<Polynomial, PolyError> {
        if index >= self.num_vars {
            return Err(PolyError::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        let mut out = Polynomial::zero(self.num_vars);
        for (e, c) in &self.terms {
            let k = e[index];
            let mut exps = e.clone();
            exps[index] = 0;
            out.add_term(exps, c / &Rat::from(i64::from(k) + 1));
        }
        Ok(out)
    }

    /// Composition `self(images[0], ..., images[n-1])`, expanded to canonical
    /// form. All images must share a common variable count.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if images.len() != self.num_vars {
            return Err(PolyError::LengthMismatch {
                expected: self.num_vars,
                got: images.len(),
            });
        }
        let target_vars = match images.first() {
            Some(first) => {
                for img in images {
                    if img.num_vars != first.num_vars {
                        return Err(PolyError::VarCountMismatch(first.num_vars, img.num_vars));
                    }
                }
                first.num_vars
            }
            // A polynomial in zero variables is a constant.
            None => 0,
        };

        // Cache powers of each image up to the largest exponent that occurs.
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|img| vec![Polynomial::one(target_vars), img.clone()])
            .collect();
        for (i, img) in images.iter().enumerate() {
            let max_exp = self.degree_in(i) as usize;
            while powers[i].len() <= max_exp {
                let next = powers[i].last().unwrap().try_mul(img)?;
                powers[i].push(next);
            }
        }

        let mut out = Polynomial::zero(target_vars);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(target_vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.try_mul(&powers[i][k as usize])?;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.num_vars {
            return Err(PolyError::LengthMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut value = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    value *= &x.pow(k);
                }
            }
            acc += value;
        }
        Ok(acc)
    }

    /// Reinterpret in a larger variable set; the new variables do not occur.
    pub fn extend_vars(&self, num_vars: usize) -> Polynomial {
        assert!(num_vars >= self.num_vars);
        Polynomial {
            num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut exps = e.clone();
                    exps.resize(num_vars, 0);
                    (exps, c.clone())
                })
                .collect(),
        }
    }

    /// Drop the last variable. Panics if it occurs in any term.
    pub fn drop_last_var(&self) -> Polynomial {
        assert!(self.num_vars > 0);
        Polynomial {
            num_vars: self.num_vars - 1,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    assert_eq!(*e.last().unwrap(), 0, "last variable still occurs");
                    (e[..e.len() - 1].to_vec(), c.clone())
                })
                .collect(),
        }
    }

    /// Terms in graded-lexicographic order (total degree first, then
    /// exponent tuple), as used in all emitted documents.
    pub fn graded_lex_terms(&self) -> Vec<(Vec<u32>, Rat)> {
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        terms.sort_by(|(ea, _), (eb, _)| {
            let da: u32 = ea.iter().sum();
            let db: u32 = eb.iter().sum();
            da.cmp(&db).then_with(|| ea.cmp(eb))
        });
        terms
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(&-rhs).expect("variable count mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in self.graded_lex_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, k)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(2, 0)
    }

    fn y() -> Polynomial {
        Polynomial::var(2, 1)
    }

    #[test]
    fn add_cancellation() {
        // (x + 1) + (-x) = 1
        let p = &x() + &Polynomial::one(2);
        let q = -&x();
        assert_eq!(&p + &q, Polynomial::one(2));
    }

    #[test]
    fn add_identity_and_doubling() {
        let p = &(&x() * &x()) * &y();
        assert_eq!(&p + &Polynomial::zero(2), p);
        assert_eq!(&p + &p, p.scale(&Rat::from(2)));
    }

    #[test]
    fn mul_difference_of_squares() {
        let sum = &x() + &y();
        let diff = &x() - &y();
        let expected = &(&x() * &x()) - &(&y() * &y());
        assert_eq!(&sum * &diff, expected);
    }

    #[test]
    fn mul_identity_and_annihilator() {
        let p = &(&x() * &y()) + &Polynomial::constant(2, Rat::frac(1, 2));
        assert_eq!(&p * &Polynomial::one(2), p);
        assert!((&p * &Polynomial::zero(2)).is_zero());
    }

    #[test]
    fn mul_var_count_mismatch() {
        let p = Polynomial::var(2, 0);
        let q = Polynomial::var(3, 0);
        assert_eq!(p.try_mul(&q), Err(PolyError::VarCountMismatch(2, 3)));
    }

    #[test]
    fn derivative_power_rule_and_absent_variable() {
        let p = &(&x() * &x()) * &y(); // x^2 y
        let dp = p.partial_derivative(0).unwrap();
        assert_eq!(dp, (&x() * &y()).scale(&Rat::from(2)));
        let q = &x() * &x();
        assert!(q.partial_derivative(1).unwrap().is_zero());
        assert!(q.partial_derivative(5).is_err());
    }

    // Independent oracle: a symmetric difference quotient evaluated at
    // rational points. It is exact whenever the degree in the varied
    // variable is at most two.
    fn central_difference(p: &Polynomial, index: usize, at: &[Rat], h: Rat) -> Rat {
        let mut hi = at.to_vec();
        hi[index] = &hi[index] + &h;
        let mut lo = at.to_vec();
        lo[index] = &lo[index] - &h;
        let num = p.evaluate(&hi).unwrap() - p.evaluate(&lo).unwrap();
        num / (&h + &h)
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // d/dt (t * x1^2) = x1^2, spot-checked at 3 rational points.
        // Variables: x1 = var 0, t = var 1.
        let p = &Polynomial::var(2, 1) * &(&x() * &x());
        let dp = p.partial_derivative(1).unwrap();
        assert_eq!(dp, &x() * &x());
        for (a, b) in [(1, 1), (-2, 3), (5, 7)] {
            let at = [Rat::frac(a, b), Rat::frac(b, 5)];
            let fd = central_difference(&p, 1, &at, Rat::frac(1, 3));
            assert_eq!(fd, dp.evaluate(&at).unwrap());
        }
    }

    #[test]
    fn substitute_direct_expansion() {
        // x^2 composed with [t*x] gives t^2 x^2 (single variable each side).
        let p = {
            let v = Polynomial::var(1, 0);
            &v * &v
        };
        let image = &Polynomial::var(2, 0) * &Polynomial::var(2, 1);
        let got = p.substitute(std::slice::from_ref(&image)).unwrap();
        assert_eq!(got, &image * &image);
    }

    #[test]
    fn substitute_identity() {
        let p = &(&x() * &y()) + &x();
        let idents = [Polynomial::var(2, 0), Polynomial::var(2, 1)];
        assert_eq!(p.substitute(&idents).unwrap(), p);
    }

    #[test]
    fn substitute_agrees_with_evaluation() {
        // substitute(xy, [u+v, u-v]) = u^2 - v^2, checked against evaluation
        // at sample rational points before freezing the expansion.
        let p = &x() * &y();
        let u = Polynomial::var(2, 0);
        let v = Polynomial::var(2, 1);
        let images = [&u + &v, &u - &v];
        let composed = p.substitute(&images).unwrap();
        let points = [
            [Rat::from(0), Rat::from(1)],
            [Rat::frac(1, 2), Rat::frac(-1, 3)],
            [Rat::from(2), Rat::from(2)],
            [Rat::frac(-3, 4), Rat::from(5)],
            [Rat::frac(7, 2), Rat::frac(2, 7)],
        ];
        for pt in &points {
            let mapped = [
                images[0].evaluate(pt).unwrap(),
                images[1].evaluate(pt).unwrap(),
            ];
            assert_eq!(
                composed.evaluate(pt).unwrap(),
                p.evaluate(&mapped).unwrap()
            );
        }
        assert_eq!(composed, &(&u * &u) - &(&v * &v));
    }

    #[test]
    fn integrate_unit_interval_examples() {
        // ∫ t dt = 1/2 over [0,1].
        let t = Polynomial::var(1, 0);
        assert_eq!(
            t.integrate_unit_interval(0).unwrap(),
            Polynomial::constant(1, Rat::frac(1, 2))
        );
        // A factor constant in the integration variable passes through.
        let p = &x() * &x(); // x1^2, integrate over var 1 (absent)
        assert_eq!(p.integrate_unit_interval(1).unwrap(), p);
        // ∫ t*x dt = x/2 with t = var 1.
        let tx = &x() * &Polynomial::var(2, 1);
        assert_eq!(
            tx.integrate_unit_interval(1).unwrap(),
            x().scale(&Rat::frac(1, 2))
        );
    }

    #[test]
    fn evaluate_examples() {
        let p = &(&x() * &x()) + &y();
        assert_eq!(
            p.evaluate(&[Rat::from(2), Rat::from(3)]).unwrap(),
            Rat::from(7)
        );
        assert_eq!(
            Polynomial::zero(2)
                .evaluate(&[Rat::from(9), Rat::from(9)])
                .unwrap(),
            Rat::zero()
        );
        let half_x = Polynomial::var(1, 0).scale(&Rat::frac(1, 2));
        assert_eq!(
            half_x.evaluate(&[Rat::frac(1, 3)]).unwrap(),
            Rat::frac(1, 6)
        );
        assert!(half_x.evaluate(&[]).is_err());
    }

    #[test]
    fn graded_lex_ordering() {
        let p = {
            let mut p = Polynomial::zero(2);
            p.add_term(vec![2, 0], Rat::one()); // x^2
            p.add_term(vec![0, 1], Rat::one()); // y
            p.add_term(vec![1, 0], Rat::one()); // x
            p
        };
        let order: Vec<Vec<u32>> = p.graded_lex_terms().into_iter().map(|(e, _)| e).collect();
        assert_eq!(order, vec![vec![0, 1], vec![1, 0], vec![2, 0]]);
    }
}
