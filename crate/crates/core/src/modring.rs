//! Fixed prime-power modular arithmetic for the enumeration hot paths.
//!
//! Lattice centers are exact integer lifts, so every integrand value is an
//! exact residue modulo p^digits; valuations read off as trailing p-digits
//! and a residue of zero means "valuation at least digits", never a rounding
//! artifact.

use crate::ext::{ExtElem, QuadExt};
use crate::field::{BaseElem, BaseField};

#[derive(Clone, Copy, Debug)]
pub(crate) struct ModRing {
    pub p: u64,
    pub digits: u32,
    pub modulus: u128,
    pow2: bool,
}

impl ModRing {
    pub fn new(p: u64, digits: u32) -> ModRing {
        let modulus = (p as u128).pow(digits);
        debug_assert!(modulus.leading_zeros() >= 64, "modulus must stay in 64 bits");
        ModRing {
            p,
            digits,
            modulus,
            pow2: p == 2,
        }
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u128 {
        if self.pow2 {
            x & (self.modulus - 1)
        } else {
            x % self.modulus
        }
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        self.reduce(a + b)
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        self.reduce(a.wrapping_mul(b))
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// p-adic valuation of a residue; `digits` when the residue is zero.
    #[inline]
    pub fn vp(&self, r: u128) -> u32 {
        if r == 0 {
            return self.digits;
        }
        if self.pow2 {
            r.trailing_zeros()
        } else {
            let mut v = 0;
            let mut m = r;
            while m % self.p as u128 == 0 {
                m /= self.p as u128;
                v += 1;
            }
            v
        }
    }

    /// Embeds an integral base element; None when the element carries fewer
    /// significant digits than the ring needs or is not integral.
    pub fn from_base(&self, f: &BaseField, x: BaseElem) -> Option<u128> {
        match x {
            BaseElem::Zero { min_val } => {
                if min_val >= self.digits as i64 {
                    Some(0)
                } else {
                    None
                }
            }
            BaseElem::NonZero { val, unit, rel } => {
                if val < 0 {
                    return None;
                }
                if val >= self.digits as i64 {
                    return Some(0);
                }
                let need = self.digits - val as u32;
                if rel < need {
                    return None;
                }
                let u = f.pk(need);
                Some(self.reduce((unit % u) * self.pk(val as u32)))
            }
        }
    }

    #[inline]
    pub fn pk(&self, k: u32) -> u128 {
        (self.p as u128).pow(k)
    }
}

/// Quadratic integrand C0 + C1 alpha + C2 beta + CB (alpha^2 + T alpha beta
/// + NW beta^2) over the (1, w) coordinate lattice of O_F: the shape of both
/// integrals of the spherical kernel and of the pairing <v, v>.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadForm {
    pub c0: u128,
    pub c1: u128,
    pub c2: u128,
    pub cb: u128,
    pub t: u128,
    pub nw: u128,
}

impl QuadForm {
    #[inline]
    pub fn eval(&self, ring: &ModRing, alpha: u128, beta: u128) -> u128 {
        let quad = ring.add(
            ring.mul(alpha, alpha),
            ring.add(
                ring.mul(self.t, ring.mul(alpha, beta)),
                ring.mul(self.nw, ring.mul(beta, beta)),
            ),
        );
        ring.add(
            self.c0,
            ring.add(
                ring.add(ring.mul(self.c1, alpha), ring.mul(self.c2, beta)),
                ring.mul(self.cb, quad),
            ),
        )
    }
}

/// Coordinates of an integral element in the (1, w) basis of O_F.
pub(crate) fn w_basis_coords(
    ext: &QuadExt,
    x: ExtElem,
) -> Option<(BaseElem, BaseElem)> {
    let f = ext.base();
    match ext.case() {
        crate::ext::ExtCase::Unramified => Some((x.a, x.b)),
        _ => {
            let w = ext.uniformizer();
            let x1 = f.div(x.b, w.b).ok()?;
            let x0 = f.sub(x.a, f.mul(x1, w.a));
            Some((x0, x1))
        }
    }
}

/// The structure constants of the basis: T = Tr(w), NW = N(w) for the
/// ramified cases; for the unramified basis (1, sqrt(d)) they are 0 and -d.
pub(crate) fn basis_constants(ext: &QuadExt) -> (BaseElem, BaseElem) {
    let f = ext.base();
    match ext.case() {
        crate::ext::ExtCase::Unramified => (f.zero(), f.neg(ext.d())),
        _ => (ext.tr_uniformizer(), ext.norm_uniformizer()),
    }
}
