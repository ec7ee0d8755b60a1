//! Dense univariate polynomials over a [`Field`].

use crate::gf::{Field, FieldElement};

/// Coefficients in ascending order of exponent, never with a trailing zero.
/// The zero polynomial has no coefficients and degree `None` (minus infinity).
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// c·X^e
    pub fn monomial(c: FieldElement, e: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; e + 1];
        coeffs[e] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Π (X − θ) over the given roots.
    pub fn from_roots(field: &Field, roots: &[FieldElement]) -> Self {
        roots.iter().fold(Poly::one(), |acc, &r| {
            acc.mul(field, &Poly::from_coeffs(vec![field.neg(r), FieldElement::ONE]))
        })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of X^e (zero beyond the degree).
    pub fn coeff(&self, e: usize) -> FieldElement {
        self.coeffs.get(e).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponents carrying a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, _)| e)
            .collect()
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..len)
                .map(|e| field.add(self.coeff(e), other.coeff(e)))
                .collect(),
        )
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..len)
                .map(|e| field.sub(self.coeff(e), other.coeff(e)))
                .collect(),
        )
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &Field, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, field: &Field, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = field.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = field.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dd;
            quot[shift] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = field.sub(rem[shift + j], field.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, field: &Field, divisor: &Poly) -> Poly {
        self.div_rem(field, divisor).1
    }

    /// Remainder modulo X^n − c, folding X^{e} to c·X^{e−n}.
    pub fn rem_binomial(&self, field: &Field, n: usize, c: FieldElement) -> Poly {
        assert!(n > 0, "binomial modulus needs positive degree");
        let mut out = vec![FieldElement::ZERO; n.min(self.coeffs.len())];
        for (e, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let folded = field.mul(a, field.pow(c, (e / n) as u64));
            out[e % n] = field.add(out[e % n], folded);
        }
        Poly::from_coeffs(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{make_field, FieldConfig};

    fn e(v: u32) -> FieldElement {
        FieldElement::new(v)
    }

    #[test]
    fn zero_polynomial_conventions() {
        let z = Poly::from_coeffs(vec![e(0), e(0)]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert!(z.coeffs().is_empty());
        assert_eq!(Poly::one().degree(), Some(0));
    }

    #[test]
    fn roots_product_matches_binomial_over_subgroup() {
        let f = make_field(13, 1, &FieldConfig::default()).unwrap();
        // {4, 12, 10} = 4·⟨3⟩; the product of (X − θ) is X^3 − 4^3.
        let p = Poly::from_roots(&f, &[e(4), e(12), e(10)]);
        assert_eq!(p.coeffs(), &[f.neg(e(12)), e(0), e(0), e(1)]);
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = make_field(5, 2, &FieldConfig::default()).unwrap();
        let a = Poly::from_coeffs((0..9).map(|i| e((i * 7 + 3) % 25)).collect());
        let b = Poly::from_coeffs(vec![e(3), e(11), e(1), e(4)]);
        let (q, r) = a.div_rem(&f, &b);
        assert!(r.degree().is_none_or(|d| d < 3));
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
    }

    #[test]
    fn rem_binomial_agrees_with_long_division() {
        let f = make_field(13, 1, &FieldConfig::default()).unwrap();
        let a = Poly::from_coeffs((0..20).map(|i| e((i * i + 1) % 13)).collect());
        let c = e(5);
        let mut modulus = vec![e(0); 7];
        modulus[0] = f.neg(c);
        modulus[6] = e(1);
        assert_eq!(a.rem_binomial(&f, 6, c), a.rem(&f, &Poly::from_coeffs(modulus)));
    }

    #[test]
    fn eval_and_support() {
        let f = make_field(13, 1, &FieldConfig::default()).unwrap();
        let p = Poly::from_coeffs(vec![e(1), e(0), e(0), e(0), e(0), e(0), e(1)]);
        assert_eq!(p.support(), vec![0, 6]);
        assert_eq!(p.eval(&f, e(2)), e((1 + 64) % 13));
        assert_eq!(Poly::monomial(e(3), 2).eval(&f, e(2)), e(12));
    }
}
