//! Quadratic extensions F = E(sqrt(d)) of the dyadic base field, their
//! ramification data, and the norm-membership machinery behind the quadratic
//! character of E*/N(F*).
//!
//! Case taxonomy: unramified, tamely ramified (odd residue characteristic),
//! and the wildly ramified dyadic cases RP (ramification invariant s even,
//! F = E(sqrt(uniformizer))) and RU (s odd, F = E(sqrt(unit))).

use crate::error::MathError;
use crate::field::{BaseElem, BaseField};

/// Extension case tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtCase {
    Unramified,
    TamelyRamified,
    RamifiedPrime,
    RamifiedUnit,
}

impl ExtCase {
    pub fn is_wild(self) -> bool {
        matches!(self, ExtCase::RamifiedPrime | ExtCase::RamifiedUnit)
    }

    pub fn is_ramified(self) -> bool {
        !matches!(self, ExtCase::Unramified)
    }
}

impl std::fmt::Display for ExtCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ExtCase::Unramified => "Unramified",
            ExtCase::TamelyRamified => "TamelyRamified",
            ExtCase::RamifiedPrime => "RP",
            ExtCase::RamifiedUnit => "RU",
        };
        write!(f, "{name}")
    }
}

/// Element a + b*sqrt(d) of F in coordinates over E.
#[derive(Clone, Copy, Debug)]
pub struct ExtElem {
    pub a: BaseElem,
    pub b: BaseElem,
}

/// The extension descriptor: all per-extension constants and the
/// precomputed norm residue table.
#[derive(Clone, Debug)]
pub struct QuadExt {
    base: BaseField,
    /// Normalized defining element (valuation 0 or 1).
    d: BaseElem,
    case: ExtCase,
    /// Ramification invariant s = v_F(conj(w)/w - 1); None when unramified.
    s: Option<i64>,
    /// Chosen uniformizer of F.
    uniformizer: ExtElem,
    /// Canonical uniformizer of E used by all tables and formulas:
    /// N(uniformizer) when ramified, p when unramified.
    pi: BaseElem,
    /// Delta = 1 + rho*pi^s, the canonical non-norm unit (wild case only).
    delta: Option<BaseElem>,
    rho: Option<BaseElem>,
    /// Residue of eta where conj(w)/w = 1 + eta*w^s (wild case only).
    kappa: Option<u64>,
    tr_w: BaseElem,
    nm_w: BaseElem,
    /// Unit residues modulo p^(s*+1) that are norms of units of O_F.
    norm_units: Vec<bool>,
    /// Digits that decide norm membership of a unit: s*+1.
    stable_digits: u32,
    /// (pi / p)^(-1) as a unit residue, for unit-part changes of uniformizer.
    pi_over_p_inv: u128,
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

/// Raw coordinate arithmetic over (1, sqrt(d)), used during construction
/// before the descriptor exists.
fn raw_mul(f: &BaseField, d: BaseElem, x: ExtElem, y: ExtElem) -> ExtElem {
    ExtElem {
        a: f.add(f.mul(x.a, y.a), f.mul(d, f.mul(x.b, y.b))),
        b: f.add(f.mul(x.a, y.b), f.mul(x.b, y.a)),
    }
}

fn raw_norm(f: &BaseField, d: BaseElem, x: ExtElem) -> BaseElem {
    f.sub(f.mul(x.a, x.a), f.mul(d, f.mul(x.b, x.b)))
}

fn legendre(f: &BaseField, u: u64) -> i64 {
    let p = f.p();
    let mut acc = 1u64;
    let mut base = u % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Outcome of the dyadic square-class reduction of a unit u: either u is a
/// square, or the class stabilizes as 1 + delta*p^j with the largest
/// reachable j recorded together with the multiplier c.
enum DyadicClass {
    Square,
    /// j = 2*v(2): the unramified class.
    Unramified,
    /// j odd < 2*v(2): ramified unit class, with c such that
    /// v(d0*c^2 - 1) = j.
    RamifiedUnit { j: i64, c: BaseElem },
}

fn dyadic_unit_class(f: &BaseField, d0: BaseElem) -> DyadicClass {
    let e2 = 1i64; // v_E(2) for E = Q_2
    let mut c = f.one();
    loop {
        let delta = f.sub(f.mul(d0, f.mul(c, c)), f.one());
        let j = match delta.val() {
            None => return DyadicClass::Square,
            Some(j) => j,
        };
        if j >= 2 * e2 + 1 {
            return DyadicClass::Square;
        }
        if j == 2 * e2 {
            return DyadicClass::Unramified;
        }
        if j % 2 == 1 {
            return DyadicClass::RamifiedUnit { j, c };
        }
        // Even j below 2*v(2): absorb the obstruction into the square part.
        // Multiplying c by 1 + x*p^(j/2) with x^2 = -u in the residue field
        // strictly increases j; in residue characteristic 2, x = 1 works.
        let bump = f.add(f.one(), f.pi_pow(j / 2));
        c = f.mul(c, bump);
    }
}

/// Builds the extension descriptor from a non-square d.
///
/// d is normalized by even powers of p so its valuation lands in {0, 1};
/// this does not change the field. For RP the uniformizer is sqrt(d) after
/// normalization, for RU it is (1 + c*sqrt(d))/p^k with d*c^2 = 1 + delta*p^(2k+1).
pub fn make_quadratic_extension(base: BaseField, d: BaseElem) -> Result<QuadExt, MathError> {
    let v = match d.val() {
        Some(v) => v,
        None => return Err(MathError::ZeroInput),
    };
    // Normalize the defining element by a square power of p.
    let shift = 2 * floor_div(v, 2);
    let d_norm = match d {
        BaseElem::NonZero { val, unit, rel } => BaseElem::NonZero {
            val: val - shift,
            unit,
            rel,
        },
        BaseElem::Zero { .. } => unreachable!(),
    };
    let vd = v - shift; // 0 or 1
    let p = base.p();

    let (case, uniformizer) = if vd == 1 {
        let w = ExtElem {
            a: base.zero(),
            b: base.one(),
        };
        if p == 2 {
            (ExtCase::RamifiedPrime, w)
        } else {
            (ExtCase::TamelyRamified, w)
        }
    } else if p != 2 {
        let u = base
            .unit_mod(d_norm, 1)
            .map(|u| u as u64)
            .ok_or(MathError::ZeroInput)?;
        if legendre(&base, u) == 1 {
            return Err(MathError::SquareDefect);
        }
        (
            ExtCase::Unramified,
            ExtElem {
                a: base.pi_pow(1),
                b: base.zero(),
            },
        )
    } else {
        match dyadic_unit_class(&base, d_norm) {
            DyadicClass::Square => return Err(MathError::SquareDefect),
            DyadicClass::Unramified => (
                ExtCase::Unramified,
                ExtElem {
                    a: base.pi_pow(1),
                    b: base.zero(),
                },
            ),
            DyadicClass::RamifiedUnit { j, c } => {
                let k = (j - 1) / 2;
                let pk_inv = base.pi_pow(-k);
                (
                    ExtCase::RamifiedUnit,
                    ExtElem {
                        a: pk_inv,
                        b: base.mul(c, pk_inv),
                    },
                )
            }
        }
    };

    let nm_w = raw_norm(&base, d_norm, uniformizer);
    let conj_w = ExtElem {
        a: uniformizer.a,
        b: base.neg(uniformizer.b),
    };
    // s = v_F(conj(w)*w^-1 - 1), computed from the norm valuation.
    let s = if case.is_ramified() {
        let w_inv = {
            let n_inv = base.inv(nm_w)?;
            ExtElem {
                a: base.mul(conj_w.a, n_inv),
                b: base.mul(conj_w.b, n_inv),
            }
        };
        let ratio = raw_mul(&base, d_norm, conj_w, w_inv);
        let shifted = ExtElem {
            a: base.sub(ratio.a, base.one()),
            b: ratio.b,
        };
        let n = raw_norm(&base, d_norm, shifted);
        let sval = n.val().ok_or(MathError::PrecisionTooLow {
            have: base.precision(),
            need: base.precision() + 4,
        })?;
        Some(sval)
    } else {
        None
    };

    if let Some(s) = s {
        let need = 2 * (s + 3) as u32;
        if base.precision() < need {
            return Err(MathError::PrecisionTooLow {
                have: base.precision(),
                need,
            });
        }
        if case.is_wild() {
            let e2 = 1;
            debug_assert!(0 < s && s <= 2 * e2, "Hasse bound violated: s = {s}");
            debug_assert_eq!(
                s % 2 == 0,
                case == ExtCase::RamifiedPrime,
                "parity of s must match the RP/RU tag"
            );
        }
    }

    let pi = if case.is_ramified() {
        nm_w
    } else {
        base.pi_pow(1)
    };

    let tr_w = base.add(uniformizer.a, uniformizer.a);

    let mut ext = QuadExt {
        base,
        d: d_norm,
        case,
        s,
        uniformizer,
        pi,
        delta: None,
        rho: None,
        kappa: None,
        tr_w,
        nm_w,
        norm_units: Vec::new(),
        stable_digits: 0,
        pi_over_p_inv: 1,
    };

    ext.build_norm_table()?;

    if case.is_wild() {
        ext.find_delta()?;
        ext.find_kappa()?;
    }

    Ok(ext)
}

/// Convenience constructor from integer data. When `precision` is absent the
/// working precision defaults to 4(s+3) base digits, twice the minimum the
/// norm-stability bound requires.
pub fn build_extension(p: u64, d: i64, precision: Option<u32>) -> Result<QuadExt, MathError> {
    let probe_prec = if p == 2 { 24 } else { 20 };
    let probe = BaseField::new(p, probe_prec)?;
    let probe_ext = make_quadratic_extension(probe, probe.from_int(d))?;
    let default_prec = match probe_ext.s() {
        Some(s) => 4 * (s + 3) as u32,
        None => 16,
    };
    let prec = precision.unwrap_or(default_prec);
    let base = BaseField::new(p, prec)?;
    make_quadratic_extension(base, base.from_int(d))
}

impl QuadExt {
    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn case(&self) -> ExtCase {
        self.case
    }

    pub fn d(&self) -> BaseElem {
        self.d
    }

    /// Ramification invariant; s = 0 for the tame case, None when unramified.
    pub fn s(&self) -> Option<i64> {
        self.s
    }

    /// l = floor(s/2).
    pub fn l(&self) -> Option<i64> {
        self.s.map(|s| floor_div(s, 2))
    }

    /// The q of the per-case bookkeeping: the residue field size of E, which
    /// equals the residue field size of F in the ramified cases.
    pub fn q(&self) -> u64 {
        self.base.p()
    }

    /// Residue field size of F: q^2 when unramified, q otherwise.
    pub fn residue_f_size(&self) -> u64 {
        match self.case {
            ExtCase::Unramified => self.base.p() * self.base.p(),
            _ => self.base.p(),
        }
    }

    pub fn uniformizer(&self) -> ExtElem {
        self.uniformizer
    }

    /// Canonical uniformizer of E: N(uniformizer) in the ramified cases.
    pub fn pi(&self) -> BaseElem {
        self.pi
    }

    pub fn pi_pow(&self, k: i64) -> BaseElem {
        let f = &self.base;
        let mut acc = f.one();
        let step = if k >= 0 {
            self.pi
        } else {
            f.inv(self.pi).expect("uniformizer is invertible")
        };
        for _ in 0..k.unsigned_abs() {
            acc = f.mul(acc, step);
        }
        acc
    }

    pub fn delta(&self) -> Option<BaseElem> {
        self.delta
    }

    pub fn rho(&self) -> Option<BaseElem> {
        self.rho
    }

    pub fn kappa(&self) -> Option<u64> {
        self.kappa
    }

    pub fn tr_uniformizer(&self) -> BaseElem {
        self.tr_w
    }

    pub fn norm_uniformizer(&self) -> BaseElem {
        self.nm_w
    }

    pub fn from_base(&self, a: BaseElem) -> ExtElem {
        ExtElem {
            a,
            b: self.base.zero(),
        }
    }

    pub fn from_ints(&self, a: i64, b: i64) -> ExtElem {
        ExtElem {
            a: self.base.from_int(a),
            b: self.base.from_int(b),
        }
    }

    pub fn zero_ext(&self) -> ExtElem {
        ExtElem {
            a: self.base.zero(),
            b: self.base.zero(),
        }
    }

    pub fn one_ext(&self) -> ExtElem {
        self.from_base(self.base.one())
    }

    pub fn conjugate(&self, x: ExtElem) -> ExtElem {
        ExtElem {
            a: x.a,
            b: self.base.neg(x.b),
        }
    }

    pub fn norm(&self, x: ExtElem) -> BaseElem {
        raw_norm(&self.base, self.d, x)
    }

    pub fn trace(&self, x: ExtElem) -> BaseElem {
        self.base.add(x.a, x.a)
    }

    pub fn add_ext(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        ExtElem {
            a: self.base.add(x.a, y.a),
            b: self.base.add(x.b, y.b),
        }
    }

    pub fn sub_ext(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        ExtElem {
            a: self.base.sub(x.a, y.a),
            b: self.base.sub(x.b, y.b),
        }
    }

    pub fn neg_ext(&self, x: ExtElem) -> ExtElem {
        ExtElem {
            a: self.base.neg(x.a),
            b: self.base.neg(x.b),
        }
    }

    pub fn mul_ext(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        raw_mul(&self.base, self.d, x, y)
    }

    pub fn scale_ext(&self, c: BaseElem, x: ExtElem) -> ExtElem {
        ExtElem {
            a: self.base.mul(c, x.a),
            b: self.base.mul(c, x.b),
        }
    }

    pub fn inv_ext(&self, x: ExtElem) -> Result<ExtElem, MathError> {
        let n = self.norm(x);
        let n_inv = self.base.inv(n)?;
        Ok(self.scale_ext(n_inv, self.conjugate(x)))
    }

    pub fn uniformizer_pow(&self, k: i64) -> ExtElem {
        let mut acc = self.one_ext();
        if k >= 0 {
            for _ in 0..k {
                acc = self.mul_ext(acc, self.uniformizer);
            }
        } else {
            let w_inv = self
                .inv_ext(self.uniformizer)
                .expect("uniformizer is invertible");
            for _ in 0..(-k) {
                acc = self.mul_ext(acc, w_inv);
            }
        }
        acc
    }

    /// Valuation in F: v_E of the norm in ramified cases, coordinate minimum
    /// in the unramified case.
    pub fn val_f(&self, x: ExtElem) -> Option<i64> {
        match self.case {
            ExtCase::Unramified => match (x.a.val(), x.b.val()) {
                (Some(va), Some(vb)) => Some(va.min(vb)),
                (Some(va), None) => {
                    if x.b.val_lower_bound() > va {
                        Some(va)
                    } else {
                        None
                    }
                }
                (None, Some(vb)) => {
                    if x.a.val_lower_bound() > vb {
                        Some(vb)
                    } else {
                        None
                    }
                }
                (None, None) => None,
            },
            _ => self.norm(x).val(),
        }
    }

    pub fn is_zero_at_precision(&self, x: ExtElem) -> bool {
        x.a.is_zero_at_precision() && x.b.is_zero_at_precision()
    }

    /// Residue of an integral element of O_F in the residue field of F.
    /// Only used in the totally ramified cases, where the residue fields of
    /// E and F coincide.
    pub fn residue_of(&self, x: ExtElem) -> Option<u64> {
        debug_assert!(self.case.is_ramified());
        for r in 0..self.base.p() {
            let shifted = self.sub_ext(x, self.from_ints(r as i64, 0));
            match self.val_f(shifted) {
                Some(v) if v >= 1 => return Some(r),
                None => return Some(r),
                _ => {}
            }
        }
        None
    }

    /// Trace image exponent: Tr(w^i O_F) = pi^j(i) O_E.
    pub fn trace_image_exponent(&self, i: i64) -> Result<i64, MathError> {
        match self.case {
            ExtCase::Unramified => Err(MathError::UnramifiedCase),
            ExtCase::TamelyRamified => Ok(-floor_div(-i, 2)),
            _ => {
                let s = self.s.expect("wild case carries s");
                Ok(s + 1 + floor_div(i - 1 - s, 2))
            }
        }
    }

    /// Number of base digits that decide norm membership of a unit class.
    pub fn stable_digits(&self) -> u32 {
        self.stable_digits
    }

    fn build_norm_table(&mut self) -> Result<(), MathError> {
        let f = self.base;
        let p = f.p();
        let digits = match self.case {
            ExtCase::Unramified => {
                // Unit norms are all of O_E^*; only the valuation rule matters.
                self.stable_digits = 1;
                self.norm_units = vec![true; p as usize];
                self.pi_over_p_inv = 1;
                return Ok(());
            }
            ExtCase::TamelyRamified => 1u32,
            _ => (self.s.unwrap() + 1) as u32,
        };
        self.stable_digits = digits;
        // Norm membership of a unit is decided by its class modulo p^digits
        // once the probe runs over a full residue system of depth 2*digits.
        let probe_depth = 2 * digits;
        if f.precision() < probe_depth + 2 {
            return Err(MathError::PrecisionTooLow {
                have: f.precision(),
                need: probe_depth + 2,
            });
        }
        let modulus = f.pk(digits);
        let mut set = vec![false; modulus as usize];
        let a_digits = probe_depth.div_ceil(2);
        let b_digits = probe_depth / 2;
        let a_span = f.pk(a_digits);
        let b_span = f.pk(b_digits);
        let mut alpha = 0u128;
        while alpha < a_span {
            let mut beta = 0u128;
            while beta < b_span {
                let x = self.add_ext(
                    self.from_base(f.from_int(alpha as i64)),
                    self.scale_ext(f.from_int(beta as i64), self.uniformizer),
                );
                let n = self.norm(x);
                if let Some(u) = f.unit_mod(n, digits) {
                    if n.val() == Some(0) {
                        set[u as usize] = true;
                    }
                }
                beta += 1;
            }
            alpha += 1;
        }
        self.norm_units = set;
        // Unit-part conversion between the p-representation and powers of
        // the canonical uniformizer pi = N(w).
        let w_unit = f
            .unit_mod(self.pi, digits)
            .expect("pi is nonzero by construction");
        self.pi_over_p_inv = mod_inverse(w_unit, modulus);
        Ok(())
    }

    fn find_delta(&mut self) -> Result<(), MathError> {
        let f = self.base;
        let s = self.s.unwrap() as u32;
        let pis = self.pi_pow(s as i64);
        let bound = f.pk(s + 1);
        let mut rho_lift = 1u128;
        while rho_lift <= bound {
            let rho = f.from_int(rho_lift as i64);
            let candidate = f.add(f.one(), f.mul(rho, pis));
            if !self.is_norm(candidate)? {
                self.rho = Some(rho);
                self.delta = Some(candidate);
                return Ok(());
            }
            rho_lift += 1;
        }
        Err(MathError::UnknownCase)
    }

    fn find_kappa(&mut self) -> Result<(), MathError> {
        let s = self.s.unwrap();
        let w_inv = self.inv_ext(self.uniformizer)?;
        let ratio = self.mul_ext(self.conjugate(self.uniformizer), w_inv);
        let shifted = self.sub_ext(ratio, self.one_ext());
        let eta = self.mul_ext(shifted, self.uniformizer_pow(-s));
        self.kappa = self.residue_of(eta);
        Ok(())
    }

    /// Membership in N(F*).
    ///
    /// The precomputed unit residue set decides the unit part; the valuation
    /// rule is case 1's doubling diagram (even valuations only) or, in the
    /// ramified cases, no constraint since pi = N(w).
    pub fn is_norm(&self, e: BaseElem) -> Result<bool, MathError> {
        let v = match e.val() {
            Some(v) => v,
            None => return Err(MathError::ZeroInput),
        };
        match self.case {
            ExtCase::Unramified => Ok(v % 2 == 0),
            _ => {
                let digits = self.stable_digits;
                let u = e
                    .val()
                    .and_then(|_| self.base.unit_mod(e, digits))
                    .ok_or(MathError::PrecisionTooLow {
                        have: e.rel_precision(),
                        need: digits,
                    })?;
                // Convert the p-power unit part into a pi-power unit part.
                let modulus = self.base.pk(digits);
                let mut adj = u;
                let vmod = v.rem_euclid(ord_mod(self.pi_over_p_inv, modulus)) as u32;
                for _ in 0..vmod {
                    adj = adj * self.pi_over_p_inv % modulus;
                }
                Ok(self.norm_units[adj as usize])
            }
        }
    }

    /// The quadratic character chi* of E*/N(F*), with chi*(0) = 0.
    pub fn chi_star(&self, e: BaseElem) -> Result<i64, MathError> {
        if e.is_zero_at_precision() {
            return Ok(0);
        }
        Ok(if self.is_norm(e)? { 1 } else { -1 })
    }

    /// chi* of a nonzero residue r modulo p^digits, when the residue pins
    /// the unit class to the stable depth; None otherwise. Only valid in the
    /// totally ramified cases where the valuation carries no sign.
    pub(crate) fn chi_star_residue(&self, r: u128, digits: u32) -> Option<i64> {
        debug_assert!(self.case.is_ramified());
        if r == 0 {
            return None;
        }
        let p = self.base.p() as u128;
        let mut v = 0u32;
        let mut m = r;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        if v + self.stable_digits > digits {
            return None;
        }
        let modulus = self.base.pk(self.stable_digits);
        let mut adj = m % modulus;
        let vmod = (v as i64).rem_euclid(ord_mod(self.pi_over_p_inv, modulus)) as u32;
        for _ in 0..vmod {
            adj = adj * self.pi_over_p_inv % modulus;
        }
        Some(if self.norm_units[adj as usize] { 1 } else { -1 })
    }
}

fn mod_inverse(a: u128, modulus: u128) -> u128 {
    let (mut old_r, mut r) = (a as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        let t = old_r - q * r;
        old_r = r;
        r = t;
        let t = old_s - q * s;
        old_s = s;
        s = t;
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(modulus as i128) as u128
}

/// Multiplicative order of a unit modulo a prime power (small moduli only).
fn ord_mod(a: u128, modulus: u128) -> i64 {
    let mut acc = a % modulus;
    let mut k = 1i64;
    while acc != 1 {
        acc = acc * (a % modulus) % modulus;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp() -> QuadExt {
        build_extension(2, 2, None).unwrap()
    }

    fn ru() -> QuadExt {
        build_extension(2, -5, None).unwrap()
    }

    #[test]
    fn example_extensions_detect_their_cases() {
        let e = rp();
        assert_eq!(e.case(), ExtCase::RamifiedPrime);
        assert_eq!(e.s(), Some(2));
        assert_eq!(e.l(), Some(1));
        assert_eq!(e.q(), 2);

        let e = ru();
        assert_eq!(e.case(), ExtCase::RamifiedUnit);
        assert_eq!(e.s(), Some(1));
        assert_eq!(e.l(), Some(0));
        assert_eq!(e.q(), 2);

        let e = build_extension(2, 5, None).unwrap();
        assert_eq!(e.case(), ExtCase::Unramified);
        assert_eq!(e.s(), None);
        assert_eq!(e.residue_f_size(), 4);

        let e = build_extension(3, 3, None).unwrap();
        assert_eq!(e.case(), ExtCase::TamelyRamified);
        assert_eq!(e.s(), Some(0));
    }

    #[test]
    fn squares_are_rejected() {
        assert!(matches!(
            build_extension(2, 4, None),
            Err(MathError::SquareDefect)
        ));
        assert!(matches!(
            build_extension(2, 9, None),
            Err(MathError::SquareDefect)
        ));
        assert!(matches!(
            build_extension(3, 7, None),
            Err(MathError::SquareDefect)
        ));
        assert!(matches!(
            build_extension(2, 17, None),
            Err(MathError::SquareDefect)
        ));
    }

    #[test]
    fn norm_and_trace_examples() {
        let e = rp();
        let f = e.base();
        let x = e.from_ints(1, 1); // 1 + sqrt(2)
        assert!(f.eq_at_precision(e.norm(x), f.from_int(-1)));
        let w = e.from_ints(0, 1);
        assert!(e.trace(w).is_zero_at_precision());

        let e = ru();
        let f = e.base();
        let x = e.from_ints(1, 1); // 1 + sqrt(-5)
        assert!(f.eq_at_precision(e.norm(x), f.from_int(6)));
        assert_eq!(e.val_f(x), Some(1));
    }

    #[test]
    fn trace_image_exponents_match_the_parity_tables() {
        let e = rp(); // s = 2, l = 1
        assert_eq!(e.trace_image_exponent(0).unwrap(), 1);
        assert_eq!(e.trace_image_exponent(1).unwrap(), 2);
        assert_eq!(e.trace_image_exponent(2).unwrap(), 2);

        let e = ru(); // s = 1, l = 0
        assert_eq!(e.trace_image_exponent(0).unwrap(), 1);
        assert_eq!(e.trace_image_exponent(1).unwrap(), 1);
        assert_eq!(e.trace_image_exponent(2).unwrap(), 2);

        // formula shift j(i+2) = j(i) + 1
        for i in -3..6 {
            assert_eq!(
                e.trace_image_exponent(i + 2).unwrap(),
                e.trace_image_exponent(i).unwrap() + 1
            );
        }

        let e = build_extension(2, 5, None).unwrap();
        assert!(matches!(
            e.trace_image_exponent(0),
            Err(MathError::UnramifiedCase)
        ));
    }

    #[test]
    fn norm_membership_on_known_classes() {
        let e = rp();
        let f = e.base();
        // -1 = N(1 + sqrt(2))
        assert!(e.is_norm(f.from_int(-1)).unwrap());
        // Delta = 1 + rho*pi^s is the canonical non-norm.
        let delta = e.delta().unwrap();
        assert!(!e.is_norm(delta).unwrap());
        assert_eq!(e.chi_star(delta).unwrap(), -1);
        // 1 + 8 Z_2 consists of norms.
        for k in [1i64, 3, 5, -7] {
            assert!(e.is_norm(f.from_int(1 + 8 * k)).unwrap());
        }
        assert_eq!(e.chi_star(f.zero()).unwrap(), 0);
        assert_eq!(e.chi_star(f.one()).unwrap(), 1);
    }

    #[test]
    fn delta_and_kappa_for_the_dyadic_examples() {
        let e = rp();
        let f = e.base();
        // pi = N(sqrt(2)) = -2, pi^2 = 4, so the smallest lift gives Delta = 5.
        assert!(f.eq_at_precision(e.delta().unwrap(), f.from_int(5)));
        assert_eq!(e.kappa(), Some(1));

        let e = ru();
        let f = e.base();
        // pi = N(1 + sqrt(-5)) = 6, so Delta = 7.
        assert!(f.eq_at_precision(e.delta().unwrap(), f.from_int(7)));
        assert_eq!(e.kappa(), Some(1));
    }

    #[test]
    fn conjugation_fixes_norm_and_trace() {
        let e = ru();
        let f = e.base();
        let x = e.from_ints(3, 4);
        let xc = e.conjugate(x);
        assert!(f.eq_at_precision(e.norm(x), e.norm(xc)));
        assert!(f.eq_at_precision(e.trace(x), e.trace(xc)));
        assert!(f.eq_at_precision(e.norm(x), e.mul_ext(x, xc).a));
        assert!(e.mul_ext(x, xc).b.is_zero_at_precision());
    }
}
