//! Exact symbolic arithmetic for the answers: Laurent rational functions in
//! u = q^(1/4), t1 = q^(z1), t2 = q^(z2) over the rationals.
//!
//! Every exponent the closed forms need is an integer on this grid: the
//! |det|^(s2) prefactors contribute quarter powers of q and everything else
//! contributes halves or wholes, so u keeps the monomial lattice integral.
//! Equality is decided by cross-multiplication, never by GCD reduction;
//! canonicalization only sorts, merges and normalizes the leading
//! denominator term.

use crate::error::MathError;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// coeff * u^u_exp * t1^t1_exp * t2^t2_exp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigRational,
    pub u_exp: i64,
    pub t1_exp: i64,
    pub t2_exp: i64,
}

/// A Laurent polynomial: a canonically sorted, merged monomial list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: Vec<Monomial>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(BigRational::one(), 0, 0, 0)
    }

    pub fn monomial(coeff: BigRational, u_exp: i64, t1_exp: i64, t2_exp: i64) -> Self {
        let mut p = LaurentPoly {
            terms: vec![Monomial {
                coeff,
                u_exp,
                t1_exp,
                t2_exp,
            }],
        };
        p.normalize();
        p
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(&mut self) {
        self.terms
            .sort_by_key(|m| (m.u_exp, m.t1_exp, m.t2_exp));
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for m in self.terms.drain(..) {
            if let Some(last) = merged.last_mut() {
                if (last.u_exp, last.t1_exp, last.t2_exp) == (m.u_exp, m.t1_exp, m.t2_exp) {
                    last.coeff += m.coeff;
                    continue;
                }
            }
            merged.push(m);
        }
        merged.retain(|m| !m.coeff.is_zero());
        self.terms = merged;
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly {
            terms: self
                .terms
                .iter()
                .chain(other.terms.iter())
                .cloned()
                .collect(),
        };
        p.normalize();
        p
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: -m.coeff.clone(),
                    ..m.clone()
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(Monomial {
                    coeff: &x.coeff * &y.coeff,
                    u_exp: x.u_exp + y.u_exp,
                    t1_exp: x.t1_exp + y.t1_exp,
                    t2_exp: x.t2_exp + y.t2_exp,
                });
            }
        }
        let mut p = LaurentPoly { terms };
        p.normalize();
        p
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPoly {
        let mut p = LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: &m.coeff * c,
                    ..m.clone()
                })
                .collect(),
        };
        p.normalize();
        p
    }

    /// Exchanges t1 and t2 exponents in every monomial.
    pub fn sigma_swap(&self) -> LaurentPoly {
        let mut p = LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff.clone(),
                    u_exp: m.u_exp,
                    t1_exp: m.t2_exp,
                    t2_exp: m.t1_exp,
                })
                .collect(),
        };
        p.normalize();
        p
    }

    pub fn eval(&self, q: u64, z1: Complex64, z2: Complex64) -> Complex64 {
        let lnq = (q as f64).ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in &self.terms {
            let exponent = Complex64::new(m.u_exp as f64 / 4.0, 0.0)
                + z1 * m.t1_exp as f64
                + z2 * m.t2_exp as f64;
            let coeff = m.coeff.to_f64().expect("rational coefficient fits f64");
            acc += Complex64::new(coeff, 0.0) * (exponent * lnq).exp();
        }
        acc
    }
}

/// Ratio of Laurent polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRational {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentRational {
    pub fn zero() -> Self {
        LaurentRational {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        LaurentRational {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        let mut r = LaurentRational {
            num,
            den: LaurentPoly::one(),
        };
        r.canonicalize();
        r
    }

    pub fn from_rational(c: BigRational) -> Self {
        LaurentRational::from_poly(LaurentPoly::monomial(c, 0, 0, 0))
    }

    /// coeff * u^a * t1^b * t2^c as a rational function.
    pub fn monomial(coeff: BigRational, u_exp: i64, t1_exp: i64, t2_exp: i64) -> Self {
        LaurentRational::from_poly(LaurentPoly::monomial(coeff, u_exp, t1_exp, t2_exp))
    }

    /// q^k on the u-grid.
    pub fn q_power(k: i64) -> Self {
        LaurentRational::monomial(BigRational::one(), 4 * k, 0, 0)
    }

    pub fn ratio(num: LaurentPoly, den: LaurentPoly) -> Result<Self, MathError> {
        if den.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        let mut r = LaurentRational { num, den };
        r.canonicalize();
        Ok(r)
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Shift exponents and rescale so the denominator has minimal exponents
    /// zero and a unit leading coefficient. Cosmetic: equality testing does
    /// not rely on it.
    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        let min_over = |p: &LaurentPoly, f: fn(&Monomial) -> i64| {
            p.terms.iter().map(f).min().expect("nonempty poly")
        };
        let shift_u = min_over(&self.den, |m| m.u_exp).min(min_over(&self.num, |m| m.u_exp));
        let shift_t1 = min_over(&self.den, |m| m.t1_exp).min(min_over(&self.num, |m| m.t1_exp));
        let shift_t2 = min_over(&self.den, |m| m.t2_exp).min(min_over(&self.num, |m| m.t2_exp));
        let apply = |p: &LaurentPoly| LaurentPoly {
            terms: p
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff.clone(),
                    u_exp: m.u_exp - shift_u,
                    t1_exp: m.t1_exp - shift_t1,
                    t2_exp: m.t2_exp - shift_t2,
                })
                .collect(),
        };
        self.num = apply(&self.num);
        self.den = apply(&self.den);
        let lead = self.den.terms.last().expect("nonzero denominator");
        let scale = lead.coeff.recip();
        self.num = self.num.scale(&scale);
        self.den = self.den.scale(&scale);
    }

    pub fn add(&self, other: &LaurentRational) -> LaurentRational {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        let mut r = LaurentRational { num, den };
        r.canonicalize();
        r
    }

    pub fn sub(&self, other: &LaurentRational) -> LaurentRational {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentRational {
        LaurentRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &LaurentRational) -> LaurentRational {
        let mut r = LaurentRational {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        };
        r.canonicalize();
        r
    }

    pub fn div(&self, other: &LaurentRational) -> Result<LaurentRational, MathError> {
        if other.num.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        let mut r = LaurentRational {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
        };
        r.canonicalize();
        Ok(r)
    }

    pub fn scale(&self, c: &BigRational) -> LaurentRational {
        let mut r = LaurentRational {
            num: self.num.scale(c),
            den: self.den.clone(),
        };
        r.canonicalize();
        r
    }

    /// The z1 <-> z2 substitution.
    pub fn sigma_swap(&self) -> LaurentRational {
        let mut r = LaurentRational {
            num: self.num.sigma_swap(),
            den: self.den.sigma_swap(),
        };
        r.canonicalize();
        r
    }

    /// f + sigma(f).
    pub fn symmetrize(&self) -> LaurentRational {
        self.add(&self.sigma_swap())
    }

    /// Exact equality as rational functions: f*den(g) - g*den(f) = 0.
    pub fn equals(&self, other: &LaurentRational) -> bool {
        self.num
            .mul(&other.den)
            .sub(&other.num.mul(&self.den))
            .is_zero()
    }

    /// Numeric value via u = q^(1/4), ti = q^(zi).
    pub fn eval_at(&self, q: u64, z1: Complex64, z2: Complex64) -> Result<Complex64, MathError> {
        let den = self.den.eval(q, z1, z2);
        if den.norm() <= 1e-12 {
            return Err(MathError::PoleAtPoint);
        }
        Ok(self.num.eval(q, z1, z2) / den)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &LaurentPoly) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (i, m) in p.terms().iter().enumerate() {
        if i > 0 {
            write!(f, " + ")?;
        }
        if m.coeff.is_negative() {
            write!(f, "({})", m.coeff)?;
        } else {
            write!(f, "{}", m.coeff)?;
        }
        if m.u_exp != 0 {
            write!(f, " * u^{}", m.u_exp)?;
        }
        if m.t1_exp != 0 {
            write!(f, " * t1^{}", m.t1_exp)?;
        }
        if m.t2_exp != 0 {
            write!(f, " * t2^{}", m.t2_exp)?;
        }
    }
    Ok(())
}

impl fmt::Display for LaurentRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.num)?;
        if self.den != LaurentPoly::one() {
            write!(f, " / [")?;
            write_poly(f, &self.den)?;
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Machine form: one record per monomial with the integer exponent triple
/// and the rational coefficient pair.
pub fn machine_records(f: &LaurentRational) -> String {
    let mut out = String::new();
    let emit = |out: &mut String, side: &str, p: &LaurentPoly| {
        for m in p.terms() {
            out.push_str(&format!(
                "{side} coeff={}/{} u={} t1={} t2={}\n",
                m.coeff.numer(),
                m.coeff.denom(),
                m.u_exp,
                m.t1_exp,
                m.t2_exp
            ));
        }
    };
    emit(&mut out, "num", &f.num);
    emit(&mut out, "den", &f.den);
    out
}

/// Sum over the two-element symmetric group of sigma applied to f.
pub fn sigma_sum(f: &LaurentRational) -> LaurentRational {
    f.symmetrize()
}

/// Helper: integer rational.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> LaurentRational {
        LaurentRational::monomial(BigRational::one(), 0, 1, 0)
    }

    fn t2() -> LaurentRational {
        LaurentRational::monomial(BigRational::one(), 0, 0, 1)
    }

    #[test]
    fn self_quotient_is_one() {
        let diff = t1().sub(&t2());
        let q = diff.div(&diff).unwrap();
        assert!(q.equals(&LaurentRational::one()));
    }

    #[test]
    fn commutative_product_merges() {
        let a = t1().mul(&t2());
        let b = t2().mul(&t1());
        let sum = a.add(&b);
        assert!(sum.equals(&LaurentRational::monomial(rat(2, 1), 0, 1, 1)));
    }

    #[test]
    fn sign_normalized_denominators_compare_equal() {
        let one = LaurentRational::one();
        let d1 = t2().mul(&t2()).sub(&t1().mul(&t1()));
        let d2 = t1().mul(&t1()).sub(&t2().mul(&t2()));
        let f = one.div(&d1).unwrap();
        let g = one.neg().div(&d2).unwrap();
        assert!(f.equals(&g));
        assert!(!t1().equals(&t2()));
    }

    #[test]
    fn sigma_swap_is_an_involution_fixing_symmetrizations() {
        let f = LaurentRational::monomial(rat(3, 2), 1, 2, 0);
        let swapped = f.sigma_swap();
        assert!(swapped.equals(&LaurentRational::monomial(rat(3, 2), 1, 0, 2)));
        assert!(swapped.sigma_swap().equals(&f));
        let sym = f.symmetrize();
        assert!(sym.sigma_swap().equals(&sym));
    }

    #[test]
    fn eval_matches_monomial_semantics() {
        let f = t1();
        let v = f
            .eval_at(2, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            .unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);

        let pole = t2().mul(&t2()).sub(&t1().mul(&t1()));
        let z = Complex64::new(0.3, 0.1);
        let res = LaurentRational::one().div(&pole).unwrap().eval_at(2, z, z);
        assert!(matches!(res, Err(MathError::PoleAtPoint)));
    }
}
