//! Norm-fiber measures: the closed measure rows for
//! mu_F[N^(-1)(1 + pi^n O_E^*)] in all three extension cases, and the
//! enumeration oracle that reproduces them cell by cell.

use crate::cells::{lattice_digits, q_pow};
use crate::error::MathError;
use crate::ext::{ExtCase, QuadExt};
use num_rational::BigRational;
use num_traits::Zero;

/// Closed form of the measure lemma. `s` is only consulted in the wild case.
pub fn measure_lemma_closed(
    case: ExtCase,
    q: u64,
    s: Option<i64>,
    n: i64,
) -> Result<BigRational, MathError> {
    if n < 1 {
        return Err(MathError::UnknownCase);
    }
    let qr = |k: i64| q_pow(q, k);
    let one = |v: i64| BigRational::from_integer(v.into());
    match case {
        ExtCase::Unramified => Ok((one(q as i64 * q as i64 - 1)) * qr(-(n + 2))),
        ExtCase::TamelyRamified => Ok(one(2 * (q as i64 - 1)) * qr(-(n + 1))),
        ExtCase::RamifiedPrime | ExtCase::RamifiedUnit => {
            let s = s.ok_or(MathError::UnknownCase)?;
            if n < s {
                Ok(one(q as i64 - 1) * qr(-(n + 1)))
            } else if n == s {
                Ok(one(q as i64 - 2) * qr(-(s + 1)))
            } else {
                Ok(one(2 * (q as i64 - 1)) * qr(-(n + 1)))
            }
        }
    }
}

/// Enumeration depth (in w-digits) at which the fiber of
/// 1 + pi^n O_E^* under the norm is exactly resolved.
fn fiber_probe_depth(ext: &QuadExt, n: i64) -> u32 {
    match ext.case() {
        ExtCase::Unramified => (n + 2) as u32,
        ExtCase::TamelyRamified => (2 * (n + 2)) as u32,
        _ => (2 * (n + ext.s().unwrap_or(0) + 2)) as u32,
    }
}

/// Smallest guaranteed valuation gain of N(x + delta) - N(x) over a cell of
/// w-depth `d`, per case.
fn norm_perturbation_bound(ext: &QuadExt, d: u32) -> i64 {
    let d = d as i64;
    match ext.case() {
        ExtCase::Unramified => d,
        ExtCase::TamelyRamified => -(-d).div_euclid(2),
        _ => {
            let s = ext.s().unwrap();
            (s + 1 + (d - 1 - s).div_euclid(2)).min(d)
        }
    }
}

/// mu_F of the norm fiber over 1 + pi^n O_E^*, by exact cell enumeration.
pub fn norm_fiber_measure(ext: &QuadExt, n: i64) -> Result<BigRational, MathError> {
    if n < 1 {
        return Err(MathError::UnknownCase);
    }
    let f = ext.base();
    let depth = fiber_probe_depth(ext, n);
    let (a_digits, b_digits) = lattice_digits(ext, depth);
    if a_digits.max(b_digits) + 3 > f.precision() {
        return Err(MathError::DepthExceedsPrecision {
            depth,
            budget: f.precision(),
        });
    }
    assert!(
        norm_perturbation_bound(ext, depth) > n,
        "probe depth does not certify the fiber"
    );
    let p = f.p();
    let one = f.one();
    let w = match ext.case() {
        ExtCase::Unramified => crate::ext::ExtElem {
            a: f.zero(),
            b: f.one(),
        },
        _ => ext.uniformizer(),
    };
    let mut count: u64 = 0;
    let a_span = f.pk(a_digits);
    let b_span = f.pk(b_digits);
    let mut alpha = 0u128;
    while alpha < a_span {
        let xa = f.from_int(alpha as i64);
        let mut beta = 0u128;
        while beta < b_span {
            let xb = f.from_int(beta as i64);
            let x = ext.add_ext(ext.from_base(xa), ext.scale_ext(xb, w));
            let shifted = f.sub(ext.norm(x), one);
            if shifted.val() == Some(n) {
                count += 1;
            }
            beta += 1;
        }
        alpha += 1;
    }
    let cell_measure = q_pow(p, -((a_digits + b_digits) as i64));
    Ok(BigRational::from_integer(count.into()) * cell_measure)
}

/// Fiber cardinalities of the finite quotient map O_F/w^k -> O_E/pi^k
/// induced by the norm, listed over the classes that are hit. The
/// push-forward principle predicts they are all equal.
pub fn norm_quotient_fiber_counts(ext: &QuadExt, k: u32) -> Result<Vec<u64>, MathError> {
    let f = ext.base();
    let (a_digits, b_digits) = lattice_digits(ext, 2 * k);
    if a_digits.max(b_digits).max(k) + 3 > f.precision() {
        return Err(MathError::DepthExceedsPrecision {
            depth: 2 * k,
            budget: f.precision(),
        });
    }
    assert!(norm_perturbation_bound(ext, 2 * k) >= k as i64);
    let modulus = f.pk(k);
    let mut counts = vec![0u64; modulus as usize];
    let a_span = f.pk(a_digits);
    let b_span = f.pk(b_digits);
    let mut alpha = 0u128;
    while alpha < a_span {
        let xa = f.from_int(alpha as i64);
        let mut beta = 0u128;
        while beta < b_span {
            let xb = f.from_int(beta as i64);
            let x = ext.add_ext(ext.from_base(xa), ext.scale_ext(xb, ext.uniformizer()));
            let nx = ext.norm(x);
            let class = match nx.val() {
                Some(v) if v >= 0 => {
                    let u = f.unit_mod(nx, k).expect("probe precision suffices");
                    (u * f.pk(v.min(k as i64) as u32) % modulus) as usize
                }
                Some(_) => unreachable!("norms of integral elements are integral"),
                None => 0,
            };
            counts[class] += 1;
            beta += 1;
        }
        alpha += 1;
    }
    Ok(counts.into_iter().filter(|&c| c > 0).collect())
}

/// Residual mass helper used by tail assertions.
pub fn is_zero_rational(r: &BigRational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use crate::laurent::rat;

    #[test]
    fn closed_rows_match_their_displays() {
        // case 1, q = 2, n = 1 -> 3/8
        assert_eq!(
            measure_lemma_closed(ExtCase::Unramified, 2, None, 1).unwrap(),
            rat(3, 8)
        );
        // case 2, q = 3, n = 1 -> 4/9
        assert_eq!(
            measure_lemma_closed(ExtCase::TamelyRamified, 3, None, 1).unwrap(),
            rat(4, 9)
        );
        // case 3, q = 2, s = 1, n = s -> 0
        assert_eq!(
            measure_lemma_closed(ExtCase::RamifiedUnit, 2, Some(1), 1).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn enumeration_matches_the_rp_rows() {
        let ext = build_extension(2, 2, None).unwrap();
        // s = 2: n = 1 -> 1/4, n = 2 -> 0, n = 3 -> 1/8
        assert_eq!(norm_fiber_measure(&ext, 1).unwrap(), rat(1, 4));
        assert_eq!(norm_fiber_measure(&ext, 2).unwrap(), rat(0, 1));
        assert_eq!(norm_fiber_measure(&ext, 3).unwrap(), rat(1, 8));
    }

    #[test]
    fn pushforward_fibers_are_constant() {
        for d in [2i64, -5] {
            let ext = build_extension(2, d, None).unwrap();
            let s = ext.s().unwrap() as u32;
            for k in 1..=s {
                let counts = norm_quotient_fiber_counts(&ext, k).unwrap();
                assert!(!counts.is_empty());
                assert!(
                    counts.windows(2).all(|w| w[0] == w[1]),
                    "uneven fibers at k = {k} for d = {d}: {counts:?}"
                );
            }
        }
    }
}
