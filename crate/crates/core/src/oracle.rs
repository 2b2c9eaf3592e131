//! Brute-force evaluation of the spherical kernel by certified cell
//! enumeration.
//!
//! The kernel splits into two integrals over O_F and w O_F whose integrands
//! are quadratic forms in the lattice coordinates. A cell resolves once its
//! perturbation bound proves the integrand valuation (and, for the quadratic
//! character, the unit class through the norm-stability depth) is constant
//! on it; unresolved cells at the refinement target are accounted into the
//! tail bound, never guessed or dropped.

use crate::cells::q_pow;
use crate::error::MathError;
use crate::ext::QuadExt;
use crate::hermitian::HermitianMatrix2;
use crate::laurent::LaurentRational;
use crate::modring::{basis_constants, w_basis_coords, ModRing, QuadForm};
use crate::spherical::{Character, CharacterPair};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Oracle output: the resolved mass assembled into an exact rational
/// function, the unresolved measure, and the signed shell masses before the
/// kernel prefactor.
#[derive(Clone, Debug)]
pub struct OracleValue {
    pub assembled: LaurentRational,
    pub tail_bound: BigRational,
    pub shells: BTreeMap<i64, BigRational>,
}

impl OracleValue {
    pub fn is_exact(&self) -> bool {
        self.tail_bound.is_zero()
    }
}

const MAX_SHELL: usize = 128;
const MAX_DIGITS: usize = 132;

struct PassAccumulator {
    plus: Vec<[u64; MAX_DIGITS]>,
    minus: Vec<[u64; MAX_DIGITS]>,
    tail: [u64; MAX_DIGITS],
}

impl PassAccumulator {
    fn new() -> Self {
        PassAccumulator {
            plus: vec![[0; MAX_DIGITS]; MAX_SHELL],
            minus: vec![[0; MAX_DIGITS]; MAX_SHELL],
            tail: [0; MAX_DIGITS],
        }
    }
}

struct Pass<'a> {
    ring: ModRing,
    form: QuadForm,
    ext: &'a QuadExt,
    star: bool,
    s: i64,
    /// Resolution target: refine until the perturbation bound reaches this.
    target_pert: i64,
    /// v_E floor of the trace coefficient terms: v_F(c).
    c_val_f: Option<i64>,
    /// v_E of the quadratic coefficient.
    cb_val: Option<i64>,
}

impl<'a> Pass<'a> {
    fn perturbation(&self, dw: i64) -> i64 {
        let mut pert = i64::MAX / 4;
        if let Some(vc) = self.c_val_f {
            pert = pert.min(self.ext.trace_image_exponent(vc + dw).expect("wild case"));
        }
        if let Some(vb) = self.cb_val {
            let tr = self.ext.trace_image_exponent(dw).expect("wild case");
            pert = pert.min(vb + tr.min(dw));
        }
        pert
    }

    fn run(&self, root: (u128, u128, u32, u32), acc: &mut PassAccumulator) {
        let p = self.ring.p as u128;
        let mut stack = vec![root];
        while let Some((alpha, beta, ca, cb)) = stack.pop() {
            let dw = (2 * ca as i64).min(2 * cb as i64 + 1);
            let pert = self.perturbation(dw);
            let r = self.form.eval(&self.ring, alpha, beta);
            let v = self.ring.vp(r) as i64;
            let digits = (ca + cb) as usize;
            let resolved = if self.star {
                if v + self.s + 1 <= pert {
                    self.ext
                        .chi_star_residue(r, self.ring.digits)
                        .map(|sign| (v, sign))
                } else {
                    None
                }
            } else if v < pert {
                Some((v, 1))
            } else {
                None
            };
            match resolved {
                Some((v, sign)) => {
                    let slot = if sign > 0 {
                        &mut acc.plus[v as usize][digits]
                    } else {
                        &mut acc.minus[v as usize][digits]
                    };
                    *slot += 1;
                }
                None if pert >= self.target_pert => {
                    acc.tail[digits] += 1;
                }
                None => {
                    // Split one base digit, keeping ca in {cb, cb+1}.
                    if ca == cb {
                        let step = self.ring.pk(ca);
                        let mut j = 0u128;
                        while j < p {
                            stack.push((alpha + j * step, beta, ca + 1, cb));
                            j += 1;
                        }
                    } else {
                        let step = self.ring.pk(cb);
                        let mut j = 0u128;
                        while j < p {
                            stack.push((alpha, beta + j * step, ca, cb + 1));
                            j += 1;
                        }
                    }
                }
            }
        }
    }
}

/// Evaluates L(x, chi1, chi2, z) by enumeration: every value shell v that
/// the depth budget certifies contributes its exact signed measure times
/// the monomial q^(-2 v s1); the kernel prefactor
/// q/(q+1) chi2(det) |det|^(s2) multiplies the sum.
pub fn oracle_eval(
    ext: &QuadExt,
    mat: &HermitianMatrix2,
    chars: CharacterPair,
    depth: i64,
) -> Result<OracleValue, MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    let f = ext.base();
    let s = ext.s().unwrap();
    let det = mat.det(ext);
    let det_val = det.val().ok_or(MathError::SingularMatrix)?;
    if depth < s + 2 {
        return Err(MathError::DepthExceedsPrecision {
            depth: depth.max(0) as u32,
            budget: f.precision(),
        });
    }

    // Strip pi^k so the entries are integral with scalar ideal in {1, w}.
    let entry_vals = [
        ext.val_f(ext.from_base(mat.a)),
        ext.val_f(ext.from_base(mat.b)),
        ext.val_f(mat.c),
    ];
    let scalar = entry_vals
        .iter()
        .flatten()
        .min()
        .copied()
        .ok_or(MathError::SingularMatrix)?;
    let k = scalar.div_euclid(2);
    let m = mat.scale(ext, ext.pi_pow(-k));

    let digits = (depth + s + 8) as u32;
    if f.precision() < digits {
        return Err(MathError::DepthExceedsPrecision {
            depth: digits,
            budget: f.precision(),
        });
    }
    let ring = ModRing::new(f.p(), digits);
    let embed = |x| {
        ring.from_base(f, x).ok_or(MathError::PrecisionTooLow {
            have: f.precision(),
            need: digits,
        })
    };
    let (t_c, nw_c) = basis_constants(ext);
    let t = embed(t_c)?;
    let nw = embed(nw_c)?;
    let c_bar = ext.conjugate(m.c);
    let c1 = embed(ext.trace(c_bar))?;
    let c2 = embed(ext.trace(ext.mul_ext(c_bar, ext.uniformizer())))?;
    let a_r = embed(m.a)?;
    let b_r = embed(m.b)?;
    let c_val_f = ext.val_f(m.c);
    let star = chars.chi1 == Character::Star;
    let target_pert = depth + 2;

    let mut acc = PassAccumulator::new();
    // f-part over O_F: a + Tr(conj(c) t) + b N(t).
    Pass {
        ring,
        form: QuadForm {
            c0: a_r,
            c1,
            c2,
            cb: b_r,
            t,
            nw,
        },
        ext,
        star,
        s,
        target_pert,
        c_val_f,
        cb_val: m.b.val(),
    }
    .run((0, 0, 0, 0), &mut acc);
    // g-part over w O_F: a N(y) + Tr(conj(c) y) + b.
    Pass {
        ring,
        form: QuadForm {
            c0: b_r,
            c1,
            c2,
            cb: a_r,
            t,
            nw,
        },
        ext,
        star,
        s,
        target_pert,
        c_val_f,
        cb_val: m.a.val(),
    }
    .run((0, 0, 1, 0), &mut acc);

    // Exact measures from the per-depth counts.
    let p = f.p();
    let mut shells: BTreeMap<i64, BigRational> = BTreeMap::new();
    let mut audit = BigRational::zero();
    for v in 0..MAX_SHELL {
        let mut net = BigRational::zero();
        let mut any = false;
        for d in 0..MAX_DIGITS {
            let (pl, mi) = (acc.plus[v][d], acc.minus[v][d]);
            if pl == 0 && mi == 0 {
                continue;
            }
            any = true;
            let cell = q_pow(p, -(d as i64));
            audit += BigRational::from_integer((pl + mi).into()) * cell.clone();
            net += BigRational::from_integer((pl as i64 - mi as i64).into()) * cell;
        }
        if any {
            shells.insert(v as i64, net);
        }
    }
    let mut tail_bound = BigRational::zero();
    for d in 0..MAX_DIGITS {
        if acc.tail[d] > 0 {
            tail_bound += BigRational::from_integer(acc.tail[d].into()) * q_pow(p, -(d as i64));
        }
    }
    let domain_total = BigRational::one() + q_pow(p, -1);
    assert_eq!(
        audit.clone() + tail_bound.clone(),
        domain_total,
        "cells do not partition the kernel domain"
    );

    // Assembly: sum of net(v) X^v with X = q^(-2 s1) = u^4 t1^2 t2^-2.
    let x = crate::integrals::shell_weight_ramified();
    let mut body = LaurentRational::zero();
    let mut xpow = LaurentRational::one();
    let max_v = shells.keys().next_back().copied().unwrap_or(0);
    let mut v = 0i64;
    while v <= max_v {
        if let Some(net) = shells.get(&v) {
            if !net.is_zero() {
                body = body.add(&xpow.scale(net));
            }
        }
        xpow = xpow.mul(&x);
        v += 1;
    }

    // Prefactor q/(q+1) chi2(det) |det|^(s2), with |det|^(s2) on the
    // stripped matrix and the scaling relation restoring pi^k.
    let det_stripped_val = det_val - 2 * k;
    let chi2_det = chars.chi2.eval(ext, det)?;
    let q_over = LaurentRational::q_power(1)
        .div(&LaurentRational::q_power(1).add(&LaurentRational::one()))
        .unwrap();
    let det_pow = LaurentRational::monomial(
        BigRational::one(),
        -2 * det_stripped_val,
        0,
        2 * det_stripped_val,
    );
    let scale_pref = LaurentRational::monomial(BigRational::one(), 0, 2 * k, 2 * k);
    let mut assembled = q_over
        .mul(&det_pow)
        .mul(&scale_pref)
        .mul(&body);
    if chi2_det < 0 {
        assembled = assembled.neg();
    }
    Ok(OracleValue {
        assembled,
        tail_bound,
        shells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use crate::hermitian::{RepKind, Representative};
    use crate::spherical::{closed_form, default_oracle_depth};

    fn chars(chi1: Character, chi2: Character) -> CharacterPair {
        CharacterPair::new(chi1, chi2)
    }

    #[test]
    fn identity_matrix_integrates_to_one() {
        let ext = build_extension(2, 2, None).unwrap();
        let m = HermitianMatrix2 {
            a: ext.base().one(),
            b: ext.base().one(),
            c: ext.zero_ext(),
        };
        let v = oracle_eval(&ext, &m, chars(Character::Trivial, Character::Trivial), 10).unwrap();
        assert!(v.is_exact());
        assert!(v.assembled.equals(&LaurentRational::one()));
    }

    #[test]
    fn delta_plane_oracle_matches_closed_form_exactly() {
        let ext = build_extension(2, 2, None).unwrap();
        let rep = Representative::unscaled(RepKind::DeltaPlane);
        let m = rep.matrix(&ext).unwrap();
        let cp = chars(Character::Trivial, Character::Trivial);
        let depth = default_oracle_depth(&ext, &rep);
        let v = oracle_eval(&ext, &m, cp, depth).unwrap();
        assert!(v.is_exact());
        let cf = closed_form(&ext, &rep, cp).unwrap();
        assert!(v.assembled.equals(&cf), "oracle {} != closed {}", v.assembled, cf);
    }

    #[test]
    fn star_character_resolves_hyperbolic_to_zero() {
        let ext = build_extension(2, 2, None).unwrap();
        let rep = Representative::unscaled(RepKind::Hyperbolic0);
        let m = rep.matrix(&ext).unwrap();
        let v = oracle_eval(&ext, &m, chars(Character::Star, Character::Trivial), 10).unwrap();
        assert!(v.assembled.is_zero());
        assert!(!v.tail_bound.is_zero());
    }
}
