//! The integral toolkit: character-integral vanishing, the shell histogram
//! of v(eta + N(x)) over O_F, and the closed rational-function forms of the
//! norm integrals, each checkable against the enumeration side exactly.

use crate::cells::{enumerate_cells, q_pow, Domain, ShellHistogram, Tail};
use crate::error::MathError;
use crate::ext::{ExtCase, QuadExt};
use crate::field::BaseElem;
use crate::laurent::{rat, LaurentPoly, LaurentRational};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The monomial q^(-2 s1) = q^(2 z1 - 2 z2 + 1): the per-shell weight of
/// |y|^(s1) in the totally ramified cases, where |y| = q^(-2 v_E(y)).
pub fn shell_weight_ramified() -> LaurentRational {
    LaurentRational::monomial(BigRational::one(), 4, 2, -2)
}

/// The monomial q^(-s1) = q^(z1 - z2 + 1/2): the per-shell weight in the
/// unramified bookkeeping, where shells are counted in v_E with q = #E-bar.
pub fn shell_weight_unramified() -> LaurentRational {
    LaurentRational::monomial(BigRational::one(), 2, 1, -1)
}

/// Exact integral of chi*(1 + theta pi^m N(x)) over the domain.
///
/// Inside the lemma hypotheses the integrand is constant on cosets of
/// w^(s+1-m) O_F, so a finite cell sum is exact; the returned flag records
/// whether the vanishing conclusion is guaranteed. Out-of-hypothesis calls
/// (m > s for units, m > s+1 overall) still compute honestly: beyond s+1 the
/// argument lands in 1 + pi^(s+1) O_E, which consists of norms.
pub fn character_integral(
    ext: &QuadExt,
    theta: BaseElem,
    m: i64,
    domain: Domain,
) -> Result<(BigRational, bool), MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    if theta.val() != Some(0) {
        return Err(MathError::ZeroInput);
    }
    if m < 1 {
        return Err(MathError::UnknownCase);
    }
    let s = ext.s().unwrap();
    let in_hypothesis = match domain {
        Domain::Integers => m < s + 1,
        Domain::Units => m < s,
        Domain::MaximalIdeal => return Err(MathError::UnknownCase),
    };
    let f = ext.base();
    let depth = (s + 1 - m).max(if domain == Domain::Units { 1 } else { 0 }) as u32;
    let scale = f.mul(theta, ext.pi_pow(m));
    let mut acc = BigRational::zero();
    for cell in enumerate_cells(ext, domain, depth)? {
        let value = f.add(f.one(), f.mul(scale, ext.norm(cell.center)));
        let sign = ext.chi_star(value)?;
        acc += cell.measure * BigRational::from_integer(sign.into());
    }
    Ok((acc, in_hypothesis))
}

/// Shell histogram of v_E(eta + N(x)) over x in O_F.
///
/// Wild case: the entries up to v = s are enumerated exactly; beyond s the
/// measure rows of the norm-fiber lemma give a geometric tail when -eta is a
/// norm and no mass at all otherwise. Unramified case: entries up to a fixed
/// depth plus the case-1 geometric tail.
pub fn norm_shell_histogram(ext: &QuadExt, eta: BaseElem) -> Result<ShellHistogram, MathError> {
    if eta.val() != Some(0) {
        return Err(MathError::ZeroInput);
    }
    let f = ext.base();
    let q = ext.q() as i64;
    let mut hist = ShellHistogram::new();
    match ext.case() {
        ExtCase::TamelyRamified => Err(MathError::WrongCase),
        ExtCase::RamifiedPrime | ExtCase::RamifiedUnit => {
            let s = ext.s().unwrap();
            let depth = (2 * (s + 2)) as u32;
            let mut tail_mass = BigRational::zero();
            for cell in enumerate_cells(ext, Domain::Integers, depth)? {
                let value = f.add(eta, ext.norm(cell.center));
                match value.val() {
                    Some(v) if v <= s => hist.add(v, cell.measure),
                    _ => tail_mass += cell.measure,
                }
            }
            let minus_eta_norm = ext.is_norm(f.neg(eta))?;
            if minus_eta_norm {
                let first = rat(2 * (q - 1), 1) * q_pow(ext.q(), -(s + 2));
                let expected: BigRational =
                    first.clone() / (BigRational::one() - q_pow(ext.q(), -1));
                assert_eq!(
                    tail_mass, expected,
                    "enumerated tail disagrees with the measure rows"
                );
                hist.tail = Tail::Geometric {
                    start: s + 1,
                    first,
                    ratio: q_pow(ext.q(), -1),
                };
            } else {
                assert!(
                    tail_mass.is_zero(),
                    "a non-norm -eta admits no shells beyond s"
                );
                hist.tail = Tail::None;
            }
            Ok(hist)
        }
        ExtCase::Unramified => {
            let resolved: i64 = 6;
            let depth = (resolved + 2) as u32;
            let mut tail_mass = BigRational::zero();
            for cell in enumerate_cells(ext, Domain::Integers, depth)? {
                let value = f.add(eta, ext.norm(cell.center));
                match value.val() {
                    Some(v) if v <= resolved => hist.add(v, cell.measure),
                    _ => tail_mass += cell.measure,
                }
            }
            let first = rat(q * q - 1, 1) * q_pow(ext.q(), -(resolved + 3));
            let expected: BigRational = first.clone() / (BigRational::one() - q_pow(ext.q(), -1));
            assert_eq!(
                tail_mass, expected,
                "enumerated case-1 tail disagrees with the measure row"
            );
            hist.tail = Tail::Geometric {
                start: resolved + 1,
                first,
                ratio: q_pow(ext.q(), -1),
            };
            Ok(hist)
        }
    }
}

/// Closes a shell histogram into the exact rational function
/// sum_v measure(v) * X^v, with X the case-appropriate shell weight.
/// A geometric tail closes to first * X^start / (1 - ratio X); an
/// unresolved tail is returned as a residual bound instead.
pub fn assemble_histogram(
    ext: &QuadExt,
    hist: &ShellHistogram,
) -> Result<(LaurentRational, BigRational), MathError> {
    let x = match ext.case() {
        ExtCase::Unramified => shell_weight_unramified(),
        ExtCase::TamelyRamified => return Err(MathError::WrongCase),
        _ => shell_weight_ramified(),
    };
    let mut acc = LaurentRational::zero();
    for (v, m) in &hist.entries {
        let mut term = LaurentRational::from_rational(m.clone());
        let mut pow = LaurentRational::one();
        for _ in 0..*v {
            pow = pow.mul(&x);
        }
        term = term.mul(&pow);
        acc = acc.add(&term);
    }
    let mut residual = BigRational::zero();
    match &hist.tail {
        Tail::None => {}
        Tail::Geometric {
            start,
            first,
            ratio,
        } => {
            let mut pow = LaurentRational::one();
            for _ in 0..*start {
                pow = pow.mul(&x);
            }
            let ratio_x = LaurentRational::from_rational(ratio.clone()).mul(&x);
            let tail = LaurentRational::from_rational(first.clone())
                .mul(&pow)
                .div(&LaurentRational::one().sub(&ratio_x))?;
            acc = acc.add(&tail);
        }
        Tail::Unresolved { residual: r, .. } => residual = r.clone(),
    }
    Ok((acc, residual))
}

/// The closed form of the norm integral over O_F in the wild case,
/// with the sign chi*(-eta) substituted:
///
/// (q^(2z2) - q^(2z2-1) + sign (q^(s(2z1-2z2)+2z1) - q^(s(2z1-2z2)+2z2-1)))
///   / (q^(2z2) - q^(2z1)).
pub fn integral_lemma_closed(
    ext: &QuadExt,
    chi_star_of_minus_eta: i64,
) -> Result<LaurentRational, MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    let s = ext.s().unwrap();
    let sign = match chi_star_of_minus_eta {
        1 => BigRational::one(),
        -1 => -BigRational::one(),
        _ => return Err(MathError::ZeroInput),
    };
    let term = |coeff: BigRational, u: i64, e1: i64, e2: i64| LaurentPoly::monomial(coeff, u, e1, e2);
    let num = term(BigRational::one(), 0, 0, 2)
        .add(&term(-BigRational::one(), -4, 0, 2))
        .add(&term(sign.clone(), 0, 2 * s + 2, -2 * s))
        .add(&term(-sign, -4, 2 * s, 2 - 2 * s));
    let den = term(BigRational::one(), 0, 0, 2).add(&term(-BigRational::one(), 0, 2, 0));
    LaurentRational::ratio(num, den)
}

/// The closed form of the unramified integral of |1 + N(x)|^(s1):
/// (q^2 - q - 1)/q^2 + ((q^2 - 1)/q^2) * Y/(1 - Y) with Y = q^(-s1 - 1).
pub fn case1_integral_closed(q: u64) -> LaurentRational {
    let qi = q as i64;
    let head = LaurentRational::from_rational(rat(qi * qi - qi - 1, qi * qi));
    let y = LaurentRational::monomial(BigRational::one(), -2, 1, -1);
    let tail = LaurentRational::from_rational(rat(qi * qi - 1, qi * qi))
        .mul(&y)
        .div(&LaurentRational::one().sub(&y))
        .expect("1 - Y is nonzero");
    head.add(&tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use num_complex::Complex64;

    #[test]
    fn character_integral_vanishes_in_range() {
        let ext = build_extension(2, 2, None).unwrap();
        let theta = ext.base().one();
        let (v, guaranteed) = character_integral(&ext, theta, 1, Domain::Integers).unwrap();
        assert!(guaranteed);
        assert!(v.is_zero());

        let ru = build_extension(2, -5, None).unwrap();
        let (v, guaranteed) =
            character_integral(&ru, ru.base().one(), 1, Domain::Integers).unwrap();
        assert!(guaranteed);
        assert!(v.is_zero());
    }

    #[test]
    fn character_integral_beyond_range_is_total_measure() {
        let ext = build_extension(2, 2, None).unwrap();
        let s = ext.s().unwrap();
        let (v, guaranteed) =
            character_integral(&ext, ext.base().one(), s + 1, Domain::Integers).unwrap();
        assert!(!guaranteed);
        assert!(v.is_one());
    }

    #[test]
    fn shell_histogram_blocks_at_s_for_non_norms() {
        let ext = build_extension(2, 2, None).unwrap();
        let f = ext.base();
        // eta = -Delta: -eta = Delta is not a norm.
        let eta = f.neg(ext.delta().unwrap());
        let hist = norm_shell_histogram(&ext, eta).unwrap();
        assert_eq!(hist.tail, Tail::None);
        let s = ext.s().unwrap();
        assert_eq!(hist.entries[&s], q_pow(2, -s));
        assert!(hist.total().unwrap().is_one());
    }

    #[test]
    fn shell_histogram_grows_a_tail_for_norms() {
        let ext = build_extension(2, 2, None).unwrap();
        let f = ext.base();
        let eta = f.from_int(-1);
        let hist = norm_shell_histogram(&ext, eta).unwrap();
        assert!(matches!(hist.tail, Tail::Geometric { start, .. } if start == 3));
        assert!(hist.total().unwrap().is_one());
        // v = 0 shell: mass of {x : eta + N(x) is a unit} = 1/2 for q = 2.
        assert_eq!(hist.entries[&0], rat(1, 2));
    }

    #[test]
    fn integral_lemma_matches_its_histogram_assembly() {
        let ext = build_extension(2, 2, None).unwrap();
        let f = ext.base();
        for (eta, sign) in [(f.from_int(-1), 1), (f.neg(ext.delta().unwrap()), -1)] {
            assert_eq!(ext.chi_star(f.neg(eta)).unwrap(), sign);
            let hist = norm_shell_histogram(&ext, eta).unwrap();
            let (assembled, residual) = assemble_histogram(&ext, &hist).unwrap();
            assert!(residual.is_zero());
            let closed = integral_lemma_closed(&ext, sign).unwrap();
            assert!(
                closed.equals(&assembled),
                "sign {sign}: {closed} != {assembled}"
            );
        }
    }

    #[test]
    fn case1_integral_matches_histogram_and_limits() {
        let ext = build_extension(2, 5, None).unwrap();
        let hist = norm_shell_histogram(&ext, ext.base().one()).unwrap();
        let (assembled, residual) = assemble_histogram(&ext, &hist).unwrap();
        assert!(residual.is_zero());
        let closed = case1_integral_closed(2);
        assert!(closed.equals(&assembled));

        // s1 = 0 evaluates to the total measure 1: pick z with z2 - z1 = 1/2.
        let z1 = Complex64::new(0.0, 0.0);
        let z2 = Complex64::new(0.5, 0.0);
        let v = closed.eval_at(2, z1, z2).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}
