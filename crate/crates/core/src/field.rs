//! Truncated arithmetic in the base field E = Q_p.
//!
//! A nonzero element is stored in floating form `p^val * unit` where `unit`
//! carries `rel` significant base-p digits, i.e. the stored data determines
//! the true value up to `O(p^(val + rel))`. Multiplication keeps the smaller
//! of the two digit counts; additive cancellation eats digits. When no
//! significant digit survives an operation the result degrades to a flagged
//! zero-at-precision recording the guaranteed lower bound on the valuation,
//! so downstream character evaluations can refuse to guess.

use crate::error::MathError;
use std::fmt::Write as _;

/// The base field Q_p at a fixed working precision (digit budget).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseField {
    p: u64,
    precision: u32,
}

/// An element of E at working precision.
#[derive(Clone, Copy, Debug)]
pub enum BaseElem {
    /// Valuation >= `min_val`; `min_val == i64::MAX` encodes the exact zero.
    Zero { min_val: i64 },
    /// The value `p^val * unit`, with `unit` known modulo `p^rel` and
    /// coprime to `p`.
    NonZero { val: i64, unit: u128, rel: u32 },
}

impl BaseElem {
    pub fn is_zero_at_precision(&self) -> bool {
        matches!(self, BaseElem::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, BaseElem::Zero { min_val: i64::MAX })
    }

    /// Valuation when the element did not degrade to zero-at-precision.
    pub fn val(&self) -> Option<i64> {
        match self {
            BaseElem::Zero { .. } => None,
            BaseElem::NonZero { val, .. } => Some(*val),
        }
    }

    /// Guaranteed lower bound on the valuation.
    pub fn val_lower_bound(&self) -> i64 {
        match self {
            BaseElem::Zero { min_val } => *min_val,
            BaseElem::NonZero { val, .. } => *val,
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match self {
            BaseElem::Zero { .. } => 0,
            BaseElem::NonZero { rel, .. } => *rel,
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl BaseField {
    /// A base field Q_p working modulo p^precision.
    ///
    /// The digit budget must keep p^precision within 63 bits so products of
    /// unit residues stay exact in u128 arithmetic.
    pub fn new(p: u64, precision: u32) -> Result<Self, MathError> {
        if !is_prime(p) {
            return Err(MathError::Parse(format!("{p} is not prime")));
        }
        if precision < 2 {
            return Err(MathError::PrecisionTooLow {
                have: precision,
                need: 2,
            });
        }
        let bits = (p as f64).log2() * precision as f64;
        if bits > 63.0 {
            return Err(MathError::PrecisionTooLow {
                have: precision,
                need: precision,
            });
        }
        Ok(BaseField { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue field size of E.
    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self, MathError> {
        BaseField::new(self.p, precision)
    }

    pub fn pk(&self, k: u32) -> u128 {
        (self.p as u128).pow(k)
    }

    pub fn zero(&self) -> BaseElem {
        BaseElem::Zero { min_val: i64::MAX }
    }

    pub fn one(&self) -> BaseElem {
        BaseElem::NonZero {
            val: 0,
            unit: 1,
            rel: self.precision,
        }
    }

    /// Exact embedding of an integer (all digits beyond the budget are
    /// truncated, which is the honest `rel = precision` statement).
    pub fn from_int(&self, n: i64) -> BaseElem {
        if n == 0 {
            return self.zero();
        }
        let neg = n < 0;
        let mut m = n.unsigned_abs() as u128;
        let mut v = 0i64;
        while m % self.p as u128 == 0 {
            m /= self.p as u128;
            v += 1;
        }
        let modulus = self.pk(self.precision);
        let mut unit = m % modulus;
        if neg {
            unit = (modulus - unit) % modulus;
        }
        BaseElem::NonZero {
            val: v,
            unit,
            rel: self.precision,
        }
    }

    /// `n * p^shift` for integer `n`.
    pub fn from_int_shifted(&self, n: i64, shift: i64) -> BaseElem {
        match self.from_int(n) {
            BaseElem::Zero { .. } => self.zero(),
            BaseElem::NonZero { val, unit, rel } => BaseElem::NonZero {
                val: val + shift,
                unit,
                rel,
            },
        }
    }

    /// `p^k` as an element.
    pub fn pi_pow(&self, k: i64) -> BaseElem {
        BaseElem::NonZero {
            val: k,
            unit: 1,
            rel: self.precision,
        }
    }

    fn vp(&self, mut m: u128) -> u32 {
        debug_assert!(m != 0);
        if self.p == 2 {
            return m.trailing_zeros();
        }
        let mut v = 0;
        while m % self.p as u128 == 0 {
            m /= self.p as u128;
            v += 1;
        }
        v
    }

    pub fn add(&self, x: BaseElem, y: BaseElem) -> BaseElem {
        match (x, y) {
            (BaseElem::Zero { min_val: a }, BaseElem::Zero { min_val: b }) => {
                BaseElem::Zero { min_val: a.min(b) }
            }
            (BaseElem::Zero { min_val }, nz @ BaseElem::NonZero { .. })
            | (nz @ BaseElem::NonZero { .. }, BaseElem::Zero { min_val }) => {
                let (val, unit, rel) = match nz {
                    BaseElem::NonZero { val, unit, rel } => (val, unit, rel),
                    _ => unreachable!(),
                };
                // known modulo p^min(val+rel, min_val)
                let known_to = min_val.min(val + rel as i64);
                if val >= known_to {
                    return BaseElem::Zero { min_val: known_to };
                }
                let new_rel = (known_to - val).min(rel as i64) as u32;
                BaseElem::NonZero {
                    val,
                    unit: unit % self.pk(new_rel),
                    rel: new_rel,
                }
            }
            (
                BaseElem::NonZero {
                    val: v1,
                    unit: u1,
                    rel: r1,
                },
                BaseElem::NonZero {
                    val: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let vmin = v1.min(v2);
                let known_to = (v1 + r1 as i64).min(v2 + r2 as i64);
                let digits = (known_to - vmin) as u32;
                if digits == 0 {
                    return BaseElem::Zero { min_val: known_to };
                }
                let modulus = self.pk(digits);
                let t1 = if (v1 - vmin) as u32 >= digits {
                    0
                } else {
                    (u1 % modulus) * self.pk((v1 - vmin) as u32) % modulus
                };
                let t2 = if (v2 - vmin) as u32 >= digits {
                    0
                } else {
                    (u2 % modulus) * self.pk((v2 - vmin) as u32) % modulus
                };
                let sum = (t1 + t2) % modulus;
                if sum == 0 {
                    return BaseElem::Zero { min_val: known_to };
                }
                let j = self.vp(sum);
                if j >= digits {
                    return BaseElem::Zero { min_val: known_to };
                }
                BaseElem::NonZero {
                    val: vmin + j as i64,
                    unit: sum / self.pk(j),
                    rel: digits - j,
                }
            }
        }
    }

    pub fn neg(&self, x: BaseElem) -> BaseElem {
        match x {
            BaseElem::Zero { .. } => x,
            BaseElem::NonZero { val, unit, rel } => {
                let modulus = self.pk(rel);
                BaseElem::NonZero {
                    val,
                    unit: (modulus - unit % modulus) % modulus,
                    rel,
                }
            }
        }
    }

    pub fn sub(&self, x: BaseElem, y: BaseElem) -> BaseElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: BaseElem, y: BaseElem) -> BaseElem {
        match (x, y) {
            (BaseElem::Zero { min_val: a }, BaseElem::Zero { min_val: b }) => BaseElem::Zero {
                min_val: a.saturating_add(b),
            },
            (BaseElem::Zero { min_val }, BaseElem::NonZero { val, .. })
            | (BaseElem::NonZero { val, .. }, BaseElem::Zero { min_val }) => BaseElem::Zero {
                min_val: min_val.saturating_add(val),
            },
            (
                BaseElem::NonZero {
                    val: v1,
                    unit: u1,
                    rel: r1,
                },
                BaseElem::NonZero {
                    val: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let rel = r1.min(r2);
                let modulus = self.pk(rel);
                BaseElem::NonZero {
                    val: v1 + v2,
                    unit: (u1 % modulus) * (u2 % modulus) % modulus,
                    rel,
                }
            }
        }
    }

    pub fn inv(&self, x: BaseElem) -> Result<BaseElem, MathError> {
        match x {
            BaseElem::Zero { .. } => Err(MathError::NotInvertible),
            BaseElem::NonZero { val, unit, rel } => {
                let modulus = self.pk(rel);
                Ok(BaseElem::NonZero {
                    val: -val,
                    unit: inv_mod(unit, modulus),
                    rel,
                })
            }
        }
    }

    pub fn div(&self, x: BaseElem, y: BaseElem) -> Result<BaseElem, MathError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: BaseElem, k: u32) -> BaseElem {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Unit part reduced modulo p^digits; requires that many significant digits.
    pub fn unit_mod(&self, x: BaseElem, digits: u32) -> Option<u128> {
        match x {
            BaseElem::Zero { .. } => None,
            BaseElem::NonZero { unit, rel, .. } => {
                if rel < digits {
                    None
                } else {
                    Some(unit % self.pk(digits))
                }
            }
        }
    }

    /// Whether x - y is zero at the joint precision.
    pub fn eq_at_precision(&self, x: BaseElem, y: BaseElem) -> bool {
        self.sub(x, y).is_zero_at_precision()
    }

    /// Residue of an integral element in the residue field.
    pub fn residue(&self, x: BaseElem) -> Option<u64> {
        match x {
            BaseElem::Zero { min_val } => {
                if min_val >= 1 {
                    Some(0)
                } else {
                    None
                }
            }
            BaseElem::NonZero { val, unit, .. } => {
                if val > 0 {
                    Some(0)
                } else if val == 0 {
                    Some((unit % self.p as u128) as u64)
                } else {
                    None
                }
            }
        }
    }

    /// Serialized form `pi^v * u` with a decimal integer lift.
    pub fn format(&self, x: BaseElem) -> String {
        match x {
            BaseElem::Zero { min_val: i64::MAX } => "0".to_string(),
            BaseElem::Zero { min_val } => format!("O(pi^{min_val})"),
            BaseElem::NonZero { val, unit, .. } => {
                let mut s = String::new();
                if val == 0 {
                    let _ = write!(s, "{unit}");
                } else {
                    let _ = write!(s, "pi^{val} * {unit}");
                }
                s
            }
        }
    }

    /// Parses `pi^v * u`, `pi^v`, a plain integer, or `0`.
    pub fn parse(&self, text: &str) -> Result<BaseElem, MathError> {
        let t = text.trim().replace(' ', "");
        if t.is_empty() {
            return Err(MathError::Parse("empty element literal".into()));
        }
        let (neg, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, t),
        };
        let elem = if let Some(rest) = t.strip_prefix("pi^") {
            let (vstr, ustr) = match rest.split_once('*') {
                Some((v, u)) => (v, u),
                None => (rest, "1"),
            };
            let v: i64 = vstr
                .parse()
                .map_err(|_| MathError::Parse(format!("bad exponent in `{text}`")))?;
            let u: i64 = ustr
                .parse()
                .map_err(|_| MathError::Parse(format!("bad unit lift in `{text}`")))?;
            self.from_int_shifted(u, v)
        } else {
            let n: i64 = t
                .parse()
                .map_err(|_| MathError::Parse(format!("bad integer literal `{text}`")))?;
            self.from_int(n)
        };
        Ok(if neg { self.neg(elem) } else { elem })
    }
}

/// Inverse of a unit modulo a prime power, by extended Euclid.
fn inv_mod(a: u128, modulus: u128) -> u128 {
    let (mut old_r, mut r) = (a as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        let tmp_r = old_r - quot * r;
        old_r = r;
        r = tmp_r;
        let tmp_s = old_s - quot * s;
        old_s = s;
        s = tmp_s;
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(modulus as i128) as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> BaseField {
        BaseField::new(2, 20).unwrap()
    }

    #[test]
    fn from_int_splits_valuation_and_unit() {
        let f = q2();
        let x = f.from_int(12);
        assert_eq!(x.val(), Some(2));
        assert_eq!(f.unit_mod(x, 4), Some(3));
        let y = f.from_int(-8);
        assert_eq!(y.val(), Some(3));
        assert_eq!(f.unit_mod(y, 3), Some(7));
    }

    #[test]
    fn addition_tracks_cancellation() {
        let f = q2();
        let a = f.from_int(5);
        let b = f.from_int(-5);
        let s = f.add(a, b);
        assert!(s.is_zero_at_precision());
        assert_eq!(s.val_lower_bound(), 20);

        let c = f.add(f.from_int(3), f.from_int(5));
        assert_eq!(c.val(), Some(3));
        assert_eq!(f.unit_mod(c, 2), Some(1));
        assert_eq!(c.rel_precision(), 17);
    }

    #[test]
    fn multiplicative_inverse_round_trips() {
        let f = q2();
        let x = f.from_int_shifted(7, -3);
        let xi = f.inv(x).unwrap();
        let prod = f.mul(x, xi);
        assert!(f.eq_at_precision(prod, f.one()));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let f = q2();
        for text in ["pi^3 * 5", "7", "0", "-3", "pi^-2 * 9"] {
            let x = f.parse(text).unwrap();
            let y = f.parse(&f.format(x)).unwrap();
            assert!(f.eq_at_precision(x, y), "round trip failed for {text}");
        }
    }

    #[test]
    fn precision_guard_rejects_thin_budget() {
        assert!(matches!(
            BaseField::new(2, 1),
            Err(MathError::PrecisionTooLow { .. })
        ));
        assert!(BaseField::new(3, 39).is_ok());
        assert!(BaseField::new(3, 45).is_err());
    }
}
