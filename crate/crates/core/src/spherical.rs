//! Closed forms of the spherical functions L(x, chi1, chi2, z) on every
//! K-orbit representative of the wild dyadic cases, and the functional
//! equations they satisfy.
//!
//! Exponent dictionary: q^(z1) = t1, q^(z2) = t2, q^(1/4) = u; the
//! substitution s1 = -z1 + z2 - 1/2, s2 = -z2 + 1/4 makes every closed form
//! a Laurent rational function on this grid.

use crate::error::MathError;
use crate::ext::{ExtCase, QuadExt};
use crate::field::BaseElem;
use crate::hermitian::{EpsUnit, RepKind, Representative};
use crate::laurent::{rat, LaurentRational};
use num_rational::BigRational;
use num_traits::One;

/// A character of E*/N(F*).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Character {
    Trivial,
    Star,
}

impl Character {
    /// Value on a nonzero element; 0 on the flagged zero.
    pub fn eval(self, ext: &QuadExt, x: BaseElem) -> Result<i64, MathError> {
        if x.is_zero_at_precision() {
            return Ok(0);
        }
        match self {
            Character::Trivial => Ok(1),
            Character::Star => ext.chi_star(x),
        }
    }

    /// Product with chi*.
    pub fn twist(self) -> Character {
        match self {
            Character::Trivial => Character::Star,
            Character::Star => Character::Trivial,
        }
    }
}

impl std::fmt::Display for Character {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Character::Trivial => write!(f, "1"),
            Character::Star => write!(f, "star"),
        }
    }
}

/// The pair (chi1, chi2) twisting the two K-averaged factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterPair {
    pub chi1: Character,
    pub chi2: Character,
}

impl CharacterPair {
    pub fn new(chi1: Character, chi2: Character) -> Self {
        CharacterPair { chi1, chi2 }
    }
}

fn mono(u: i64, e1: i64, e2: i64) -> LaurentRational {
    LaurentRational::monomial(BigRational::one(), u, e1, e2)
}

/// q^k.
fn qp(k: i64) -> LaurentRational {
    mono(4 * k, 0, 0)
}

/// q^(a z1 + b z2) on the doubled bracket convention <(x,y), 2z>.
fn bracket2(x: i64, y: i64) -> LaurentRational {
    mono(0, 2 * x, 2 * y)
}

/// 1/(1 + q^-1) = q/(q+1).
fn inv_one_plus_qinv() -> LaurentRational {
    qp(1).div(&qp(1).add(&LaurentRational::one())).unwrap()
}

/// 1 - q^-1.
fn one_minus_qinv() -> LaurentRational {
    LaurentRational::one().sub(&qp(-1))
}

/// q^(2 z2) - q^(2 z1).
fn denom_sym() -> LaurentRational {
    mono(0, 0, 2).sub(&mono(0, 2, 0))
}

fn sign_rational(sign: i64) -> LaurentRational {
    LaurentRational::from_rational(rat(sign, 1))
}

/// The antisymmetrized sum over the two-element group:
/// sigma-sum of A / (q^(2 z2) - q^(2 z1)).
fn sigma_over_denominator(a: LaurentRational) -> LaurentRational {
    a.sub(&a.sigma_swap()).div(&denom_sym()).unwrap()
}

/// Closed form of L(x, chi1, chi2, z) for a table representative (scaled
/// copies included through the scaling relation).
pub fn closed_form(
    ext: &QuadExt,
    rep: &Representative,
    chars: CharacterPair,
) -> Result<LaurentRational, MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    if !rep.in_table(ext) {
        return Err(MathError::RepNotInTable);
    }
    let unscaled = Representative {
        kind: rep.kind,
        scale: 0,
    };
    let body = closed_form_unscaled(ext, &unscaled, chars)?;
    if rep.scale == 0 {
        return Ok(body);
    }
    // chi1(pi^k) = 1 since pi = N(w); |pi^k|^(s1 + 2 s2) = (t1 t2)^(2k).
    let prefactor = mono(0, 2 * rep.scale, 2 * rep.scale);
    Ok(prefactor.mul(&body))
}

fn chi2_sign(ext: &QuadExt, chars: CharacterPair, x: BaseElem) -> Result<i64, MathError> {
    chars.chi2.eval(ext, x)
}

fn closed_form_unscaled(
    ext: &QuadExt,
    rep: &Representative,
    chars: CharacterPair,
) -> Result<LaurentRational, MathError> {
    let f = ext.base();
    let s = ext.s().unwrap();
    let l = ext.l().unwrap();
    let rp = ext.case() == ExtCase::RamifiedPrime;
    let delta = ext.delta().unwrap();
    let minus_one = f.from_int(-1);
    let minus_delta = f.neg(delta);

    if chars.chi1 == Character::Star {
        // Vanishes except on diagonals separated past the stability depth.
        return match rep.kind {
            RepKind::Diagonal { l1, l2, e1, e2 } if l1 - l2 > s => {
                let d2 = chi2_sign(ext, chars, f.mul(e1.value(ext), e2.value(ext)))?;
                let star_e2 = e2.chi_star();
                let scale = qp(0)
                    .scale(&rat(d2 * star_e2, 1))
                    .mul(&mono(2 * (l2 - l1), 0, 0))
                    .mul(&inv_one_plus_qinv());
                let head = mono(0, 0, 2 * s); // q^(2 s z2)
                let factor = mono(0, 0, 2).sub(&mono(-4, 2, 0)); // q^(2z2) - q^(2z1-1)
                let swap_num = bracket2(l1 - s, l2);
                let sym = swap_num
                    .sub(&swap_num.sigma_swap())
                    .div(&mono(0, 2, 0).sub(&mono(0, 0, 2)))
                    .unwrap();
                Ok(scale.mul(&head).mul(&factor).mul(&sym))
            }
            _ => Ok(LaurentRational::zero()),
        };
    }

    let value = match rep.kind {
        RepKind::Diagonal { l1, l2, e1, e2 } => {
            let eps = f.mul(e1.value(ext), e2.value(ext));
            let d2 = chi2_sign(ext, chars, eps)?;
            let star = ext.chi_star(f.neg(eps))?;
            let scale = mono(2 * (l2 - l1), 0, -2 * s)
                .scale(&rat(d2, 1))
                .mul(&inv_one_plus_qinv());
            let term_a = bracket2(l1 + s, l2)
                .mul(&mono(0, 2, 0).sub(&mono(-4, 0, 2)))
                .scale(&rat(star, 1));
            let term_b = bracket2(l2, l1 + s).mul(&mono(0, 0, 2).sub(&mono(-4, 2, 0)));
            scale.mul(&term_a.add(&term_b)).div(&denom_sym()).unwrap()
        }
        RepKind::Hyperbolic0 => {
            let d2 = chi2_sign(ext, chars, minus_one)?;
            if rp {
                sign_rational(d2)
                    .mul(&one_minus_qinv())
                    .mul(&qp(l))
                    .mul(&mono(0, 0, -2 * s))
                    .mul(&inv_one_plus_qinv())
                    .mul(
                        &mono(0, s, s)
                            .mul(&mono(0, 2, 0).add(&mono(0, 0, 2)))
                            .div(&denom_sym())
                            .unwrap(),
                    )
            } else {
                sign_rational(d2)
                    .mul(&qp(1))
                    .mul(&one_minus_qinv())
                    .mul(&mono(0, 0, -2 * s))
                    .mul(&mono(0, s + 1, s + 1).div(&denom_sym()).unwrap())
            }
        }
        RepKind::Hyperbolic1 => {
            let d2 = chi2_sign(ext, chars, minus_one)?;
            if rp {
                sign_rational(d2)
                    .mul(&one_minus_qinv())
                    .mul(&mono(4 * l + 2, 0, -2 * s))
                    .mul(&mono(0, s, s))
                    .mul(&mono(0, 2, 2).div(&denom_sym()).unwrap())
            } else {
                sign_rational(d2)
                    .mul(&one_minus_qinv())
                    .mul(&mono(4 * l + 2, 0, -2 * s))
                    .mul(&inv_one_plus_qinv())
                    .mul(&mono(0, s + 1, s + 1))
                    .mul(
                        &mono(0, 2, 0)
                            .add(&mono(0, 0, 2))
                            .div(&denom_sym())
                            .unwrap(),
                    )
            }
        }
        RepKind::DeltaPlane => {
            let d2 = chi2_sign(ext, chars, minus_delta)?;
            if rp {
                sign_rational(d2)
                    .mul(&mono(4 * l, 0, -2 * s))
                    .mul(&mono(0, s, s))
            } else {
                sign_rational(d2)
                    .mul(&mono(2 * s, 0, -2 * s))
                    .mul(&mono(0, s + 1, s + 1))
            }
        }
        RepKind::Plane4 { m } => {
            let d2 = chi2_sign(ext, chars, minus_one)?;
            sign_rational(d2)
                .mul(&inv_one_plus_qinv())
                .mul(&one_minus_qinv())
                .mul(&mono(4 * m, 0, -2 * s))
                .mul(
                    &bracket2(m, s - m + 1)
                        .symmetrize()
                        .div(&denom_sym())
                        .unwrap(),
                )
        }
        RepKind::Plane6 { m } => {
            let d2 = chi2_sign(ext, chars, minus_one)?;
            let inner = bracket2(m, 2 + s - m)
                .symmetrize()
                .sub(&bracket2(m + 1, s + 1 - m).symmetrize().mul(&qp(-1)));
            sign_rational(d2)
                .mul(&inv_one_plus_qinv())
                .mul(&mono(4 * m - 2, 0, -2 * s))
                .mul(&inner.div(&denom_sym()).unwrap())
        }
        RepKind::Plane5 { m } => {
            let d2 = chi2_sign(ext, chars, minus_delta)?;
            sign_rational(d2)
                .mul(&inv_one_plus_qinv())
                .mul(&mono(4 * m, 0, -2 * s))
                .mul(&sigma_over_denominator(bracket2(m, 1 - m + s)))
        }
        RepKind::Plane7 { m } => {
            let d2 = chi2_sign(ext, chars, minus_delta)?;
            sign_rational(d2)
                .mul(&inv_one_plus_qinv())
                .mul(&mono(4 * m - 2, 0, -2 * s))
                .mul(&sigma_over_denominator(bracket2(m, 2 + s - m)))
        }
    };
    Ok(value)
}

/// The alternative printed form of the hyperbolic RP closed form, carrying
/// q^(-4 l z2) in place of q^(-2 s z2); they agree because s = 2l.
pub fn hyperbolic0_rp_alternative(ext: &QuadExt, chars: CharacterPair) -> Result<LaurentRational, MathError> {
    if ext.case() != ExtCase::RamifiedPrime {
        return Err(MathError::WrongCase);
    }
    let f = ext.base();
    let s = ext.s().unwrap();
    let l = ext.l().unwrap();
    let d2 = chars.chi2.eval(ext, f.from_int(-1))?;
    Ok(sign_rational(d2)
        .mul(&one_minus_qinv())
        .mul(&qp(l))
        .mul(&mono(0, 0, -4 * l))
        .mul(&inv_one_plus_qinv())
        .mul(
            &mono(0, s, s)
                .mul(&mono(0, 2, 0).add(&mono(0, 0, 2)))
                .div(&denom_sym())
                .unwrap(),
        ))
}

/// L-tilde = q^(2 s z2) L, the normalization entering the functional
/// equations.
pub fn l_tilde(
    ext: &QuadExt,
    rep: &Representative,
    chars: CharacterPair,
) -> Result<LaurentRational, MathError> {
    let s = ext.s().ok_or(MathError::WrongCase)?;
    Ok(mono(0, 0, 2 * s).mul(&closed_form(ext, rep, chars)?))
}

/// Checks both displayed functional equations exactly for one
/// representative, over both choices of chi2.
pub fn functional_equation_check(
    ext: &QuadExt,
    rep: &Representative,
) -> Result<bool, MathError> {
    functional_equation_check_mutated(ext, rep, false)
}

/// Same check with an optional mutation hook that corrupts one coefficient,
/// as a control that the test can fail.
pub fn functional_equation_check_mutated(
    ext: &QuadExt,
    rep: &Representative,
    mutate: bool,
) -> Result<bool, MathError> {
    let f = ext.base();
    let s = ext.s().ok_or(MathError::WrongCase)?;
    let star_minus_one = ext.chi_star(f.from_int(-1))?;
    let corrupt = |g: LaurentRational| {
        if mutate {
            g.add(&LaurentRational::one())
        } else {
            g
        }
    };
    let mut ok = true;
    for chi2 in [Character::Trivial, Character::Star] {
        // trivial chi1: sigma(Lt(1, chi2)) = -chi*(-1) Lt(1, chi* chi2)
        let lhs = corrupt(l_tilde(ext, rep, CharacterPair::new(Character::Trivial, chi2))?)
            .sigma_swap();
        let rhs = l_tilde(
            ext,
            rep,
            CharacterPair::new(Character::Trivial, chi2.twist()),
        )?
        .scale(&rat(-star_minus_one, 1));
        ok &= lhs.equals(&rhs);

        // chi1 = chi*: sigma(Lt) = q^(4s(z1 - z2)) (q^(2z1) - q^(2z2-1))
        //                          / (q^(2z2) - q^(2z1-1)) * Lt
        let lt = l_tilde(ext, rep, CharacterPair::new(Character::Star, chi2))?;
        let lhs = lt.sigma_swap();
        let factor = mono(0, 4 * s, -4 * s)
            .mul(&mono(0, 2, 0).sub(&mono(-4, 0, 2)))
            .div(&mono(0, 0, 2).sub(&mono(-4, 2, 0)))
            .unwrap();
        ok &= lhs.equals(&factor.mul(&lt));
    }
    Ok(ok)
}

/// Whether the trivial-character closed form of this representative is
/// antisymmetric after the L-tilde normalization.
pub fn is_antisymmetric_tilde(
    ext: &QuadExt,
    rep: &Representative,
) -> Result<bool, MathError> {
    let lt = l_tilde(
        ext,
        rep,
        CharacterPair::new(Character::Trivial, Character::Trivial),
    )?;
    Ok(lt.sigma_swap().equals(&lt.neg()))
}

/// Representatives whose oracle integrand valuation is unbounded, so exact
/// resolution terminates with a tail: hyperbolic kernels and any plane or
/// diagonal whose blocking unit is a norm.
pub fn default_oracle_depth(ext: &QuadExt, rep: &Representative) -> i64 {
    let s = ext.s().unwrap_or(0);
    match rep.kind {
        RepKind::Diagonal { l1, l2, .. } => 2 * (l1 - l2) + 2 * s + 6,
        _ => 2 * s + 6,
    }
}

/// Small helper used by tests: the epsilon pair of a diagonal.
pub fn diagonal_eps(rep: &Representative) -> Option<(EpsUnit, EpsUnit)> {
    match rep.kind {
        RepKind::Diagonal { e1, e2, .. } => Some((e1, e2)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use crate::hermitian::Representative;

    fn rp() -> QuadExt {
        build_extension(2, 2, None).unwrap()
    }

    fn ru() -> QuadExt {
        build_extension(2, -5, None).unwrap()
    }

    #[test]
    fn star_character_annihilates_planes() {
        let ext = rp();
        for kind in [
            RepKind::Hyperbolic0,
            RepKind::Hyperbolic1,
            RepKind::DeltaPlane,
            RepKind::Plane6 { m: 1 },
        ] {
            let rep = Representative::unscaled(kind);
            let v = closed_form(
                &ext,
                &rep,
                CharacterPair::new(Character::Star, Character::Trivial),
            )
            .unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn delta_plane_rp_is_a_pure_monomial() {
        let ext = rp();
        let rep = Representative::unscaled(RepKind::DeltaPlane);
        let v = closed_form(
            &ext,
            &rep,
            CharacterPair::new(Character::Trivial, Character::Trivial),
        )
        .unwrap();
        // chi2 trivial: q^(l - 2 s z2 + s(z1 + z2)) with s = 2, l = 1.
        let expected = mono(4, 2, -2);
        assert!(v.equals(&expected));
    }

    #[test]
    fn ru_hyperbolic0_matches_the_display() {
        let ext = ru();
        let rep = Representative::unscaled(RepKind::Hyperbolic0);
        let v = closed_form(
            &ext,
            &rep,
            CharacterPair::new(Character::Trivial, Character::Star),
        )
        .unwrap();
        let f = ext.base();
        let chi2_minus_one = ext.chi_star(f.from_int(-1)).unwrap();
        let s = ext.s().unwrap();
        let expected = sign_rational(chi2_minus_one)
            .mul(&qp(1))
            .mul(&one_minus_qinv())
            .mul(&mono(0, s + 1, s + 1 - 2 * s))
            .div(&denom_sym())
            .unwrap();
        assert!(v.equals(&expected));
    }

    #[test]
    fn rp_internal_consistency_of_hyperbolic_displays() {
        let ext = rp();
        let chars = CharacterPair::new(Character::Trivial, Character::Star);
        let main = closed_form(
            &ext,
            &Representative::unscaled(RepKind::Hyperbolic0),
            chars,
        )
        .unwrap();
        let alt = hyperbolic0_rp_alternative(&ext, chars).unwrap();
        assert!(main.equals(&alt));
    }

    #[test]
    fn functional_equations_hold_and_mutations_fail() {
        for ext in [rp(), ru()] {
            for kind in [RepKind::Hyperbolic0, RepKind::DeltaPlane] {
                let rep = Representative::unscaled(kind);
                assert!(functional_equation_check(&ext, &rep).unwrap());
                assert!(!functional_equation_check_mutated(&ext, &rep, true).unwrap());
            }
            let big = Representative::unscaled(RepKind::Diagonal {
                l1: ext.s().unwrap() + 2,
                l2: 0,
                e1: EpsUnit::Delta,
                e2: EpsUnit::One,
            });
            assert!(functional_equation_check(&ext, &big).unwrap());
        }
    }

    #[test]
    fn plane6_tilde_is_antisymmetric() {
        let ext = rp();
        let rep = Representative::unscaled(RepKind::Plane6 { m: 1 });
        assert!(is_antisymmetric_tilde(&ext, &rep).unwrap());
    }
}
