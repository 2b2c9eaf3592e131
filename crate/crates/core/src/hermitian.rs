//! 2x2 Hermitian matrices over F, their lattice invariants, the
//! representative tables for the wild dyadic cases, and classification of a
//! matrix to its K-orbit representative.
//!
//! Classification matches invariants only; it never searches for an explicit
//! base change realizing the equivalence. The invariant tuple is the
//! Jacobowitz set (scalar ideal, norm ideal, determinant class, modularity)
//! extended by the character class of the minimal norm values, which is what
//! separates diag(pi^a Delta, 1) from diag(pi^a, Delta) once a exceeds s.

use crate::error::MathError;
use crate::ext::{ExtElem, QuadExt};
use crate::field::BaseElem;
use crate::laurent::LaurentRational;
use crate::spherical::Character;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use std::fmt;

/// Hermitian matrix ((a, c), (conj c, b)) with a, b in E.
#[derive(Clone, Copy, Debug)]
pub struct HermitianMatrix2 {
    pub a: BaseElem,
    pub b: BaseElem,
    pub c: ExtElem,
}

impl HermitianMatrix2 {
    pub fn det(&self, ext: &QuadExt) -> BaseElem {
        let f = ext.base();
        f.sub(f.mul(self.a, self.b), ext.norm(self.c))
    }

    pub fn scale(&self, ext: &QuadExt, t: BaseElem) -> HermitianMatrix2 {
        let f = ext.base();
        HermitianMatrix2 {
            a: f.mul(t, self.a),
            b: f.mul(t, self.b),
            c: ext.scale_ext(t, self.c),
        }
    }

    /// k * A * k^star for k in GL_2(O_F).
    pub fn conj_transform(&self, ext: &QuadExt, k: &[[ExtElem; 2]; 2]) -> HermitianMatrix2 {
        let c_bar = ext.conjugate(self.c);
        let row = |x: ExtElem, y: ExtElem| {
            [
                ext.add_ext(ext.scale_ext(self.a, x), ext.mul_ext(c_bar, y)),
                ext.add_ext(ext.mul_ext(self.c, x), ext.scale_ext(self.b, y)),
            ]
        };
        // rows of k * A
        let r0 = row(k[0][0], k[0][1]);
        let r1 = row(k[1][0], k[1][1]);
        let entry = |r: &[ExtElem; 2], col: &[ExtElem; 2]| {
            ext.add_ext(
                ext.mul_ext(r[0], ext.conjugate(col[0])),
                ext.mul_ext(r[1], ext.conjugate(col[1])),
            )
        };
        let a = entry(&r0, &k[0]);
        let b = entry(&r1, &k[1]);
        let c = entry(&r0, &k[1]);
        HermitianMatrix2 { a: a.a, b: b.a, c }
    }
}

/// The unit entries of diagonal representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsUnit {
    One,
    Delta,
}

impl EpsUnit {
    pub fn value(self, ext: &QuadExt) -> BaseElem {
        match self {
            EpsUnit::One => ext.base().one(),
            EpsUnit::Delta => ext.delta().expect("wild extension carries Delta"),
        }
    }

    pub fn chi_star(self) -> i64 {
        match self {
            EpsUnit::One => 1,
            EpsUnit::Delta => -1,
        }
    }
}

impl fmt::Display for EpsUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsUnit::One => write!(f, "1"),
            EpsUnit::Delta => write!(f, "Delta"),
        }
    }
}

/// Tags of the K-orbit representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// ((0,1),(1,0)).
    Hyperbolic0,
    /// ((0,w),(conj w,0)).
    Hyperbolic1,
    /// RP: ((pi^(s/2),1),(1,-pi^(s/2) rho)); RU: ((pi^((s+1)/2),w),(conj w,-pi^((s+1)/2) rho)).
    DeltaPlane,
    /// ((pi^m,1),(1,0)).
    Plane4 { m: i64 },
    /// ((pi^m,1),(1,-pi^(s-m) rho)).
    Plane5 { m: i64 },
    /// ((pi^m,w),(conj w,0)).
    Plane6 { m: i64 },
    /// ((pi^m,w),(conj w,-pi^(s+1-m) rho)).
    Plane7 { m: i64 },
    /// diag(pi^l1 e1, pi^l2 e2), l1 >= l2, e1 = 1 unless l1 - l2 > s.
    Diagonal {
        l1: i64,
        l2: i64,
        e1: EpsUnit,
        e2: EpsUnit,
    },
}

/// A tagged representative together with the power of pi multiplying it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Representative {
    pub kind: RepKind,
    pub scale: i64,
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale != 0 {
            write!(f, "pi^{} * ", self.scale)?;
        }
        match self.kind {
            RepKind::Hyperbolic0 => write!(f, "H(0)"),
            RepKind::Hyperbolic1 => write!(f, "H(1)"),
            RepKind::DeltaPlane => write!(f, "DeltaPlane"),
            RepKind::Plane4 { m } => write!(f, "Plane4(m={m})"),
            RepKind::Plane5 { m } => write!(f, "Plane5(m={m})"),
            RepKind::Plane6 { m } => write!(f, "Plane6(m={m})"),
            RepKind::Plane7 { m } => write!(f, "Plane7(m={m})"),
            RepKind::Diagonal { l1, l2, e1, e2 } => {
                write!(f, "Diag({l1},{l2};{e1},{e2})")
            }
        }
    }
}

impl Representative {
    pub fn unscaled(kind: RepKind) -> Representative {
        Representative { kind, scale: 0 }
    }

    /// Validates the parameter ranges of the tag against the extension.
    pub fn in_table(&self, ext: &QuadExt) -> bool {
        let s = match ext.s() {
            Some(s) => s,
            None => return false,
        };
        if !ext.case().is_wild() {
            return false;
        }
        let wild_rp = ext.case() == crate::ext::ExtCase::RamifiedPrime;
        match self.kind {
            RepKind::Hyperbolic0 | RepKind::Hyperbolic1 | RepKind::DeltaPlane => true,
            RepKind::Plane4 { m } | RepKind::Plane5 { m } => {
                let hi = if wild_rp { s } else { s - 1 };
                0 < 2 * m && 2 * m < hi
            }
            RepKind::Plane6 { m } | RepKind::Plane7 { m } => {
                let hi = if wild_rp { s + 2 } else { s + 1 };
                0 < 2 * m && 2 * m < hi
            }
            RepKind::Diagonal { l1, l2, e1, .. } => {
                l1 >= l2 && (l1 - l2 > s || e1 == EpsUnit::One)
            }
        }
    }

    /// The literal matrix of the representative, scale applied.
    pub fn matrix(&self, ext: &QuadExt) -> Result<HermitianMatrix2, MathError> {
        if !ext.case().is_wild() {
            return Err(MathError::WrongCase);
        }
        if !self.in_table(ext) {
            return Err(MathError::RepNotInTable);
        }
        let f = ext.base();
        let s = ext.s().unwrap();
        let rho = ext.rho().unwrap();
        let w = ext.uniformizer();
        let one = ext.one_ext();
        let m = |a: BaseElem, b: BaseElem, c: ExtElem| HermitianMatrix2 { a, b, c };
        let base = match self.kind {
            RepKind::Hyperbolic0 => m(f.zero(), f.zero(), one),
            RepKind::Hyperbolic1 => m(f.zero(), f.zero(), w),
            RepKind::DeltaPlane => {
                if ext.case() == crate::ext::ExtCase::RamifiedPrime {
                    let h = ext.pi_pow(s / 2);
                    m(h, f.neg(f.mul(h, rho)), one)
                } else {
                    let h = ext.pi_pow((s + 1) / 2);
                    m(h, f.neg(f.mul(h, rho)), w)
                }
            }
            RepKind::Plane4 { m: mm } => m(ext.pi_pow(mm), f.zero(), one),
            RepKind::Plane5 { m: mm } => m(
                ext.pi_pow(mm),
                f.neg(f.mul(ext.pi_pow(s - mm), rho)),
                one,
            ),
            RepKind::Plane6 { m: mm } => m(ext.pi_pow(mm), f.zero(), w),
            RepKind::Plane7 { m: mm } => m(
                ext.pi_pow(mm),
                f.neg(f.mul(ext.pi_pow(s + 1 - mm), rho)),
                w,
            ),
            RepKind::Diagonal { l1, l2, e1, e2 } => m(
                f.mul(ext.pi_pow(l1), e1.value(ext)),
                f.mul(ext.pi_pow(l2), e2.value(ext)),
                ext.zero_ext(),
            ),
        };
        Ok(base.scale(ext, ext.pi_pow(self.scale)))
    }

    /// Parses tags like `H0`, `H1`, `delta`, `plane6:1`, `diag:3,0,D,1`,
    /// optionally prefixed `pi^k*`.
    pub fn parse(text: &str) -> Result<Representative, MathError> {
        let t = text.trim().to_ascii_lowercase().replace(' ', "");
        let (scale, rest) = match t.strip_prefix("pi^") {
            Some(r) => {
                let (k, rest) = r
                    .split_once('*')
                    .ok_or_else(|| MathError::Parse(format!("missing `*` in `{text}`")))?;
                (
                    k.parse::<i64>()
                        .map_err(|_| MathError::Parse(format!("bad scale in `{text}`")))?,
                    rest.to_string(),
                )
            }
            None => (0, t),
        };
        let eps = |e: &str| -> Result<EpsUnit, MathError> {
            match e {
                "1" => Ok(EpsUnit::One),
                "d" | "delta" => Ok(EpsUnit::Delta),
                _ => Err(MathError::Parse(format!("bad epsilon `{e}`"))),
            }
        };
        let kind = if rest == "h0" {
            RepKind::Hyperbolic0
        } else if rest == "h1" {
            RepKind::Hyperbolic1
        } else if rest == "delta" || rest == "deltaplane" {
            RepKind::DeltaPlane
        } else if let Some(args) = rest.strip_prefix("diag:") {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 4 {
                return Err(MathError::Parse(format!("diag needs 4 fields in `{text}`")));
            }
            RepKind::Diagonal {
                l1: parts[0]
                    .parse()
                    .map_err(|_| MathError::Parse(format!("bad l1 in `{text}`")))?,
                l2: parts[1]
                    .parse()
                    .map_err(|_| MathError::Parse(format!("bad l2 in `{text}`")))?,
                e1: eps(parts[2])?,
                e2: eps(parts[3])?,
            }
        } else if let Some((name, arg)) = rest.split_once(':') {
            let m: i64 = arg
                .parse()
                .map_err(|_| MathError::Parse(format!("bad m in `{text}`")))?;
            match name {
                "plane4" => RepKind::Plane4 { m },
                "plane5" => RepKind::Plane5 { m },
                "plane6" => RepKind::Plane6 { m },
                "plane7" => RepKind::Plane7 { m },
                _ => return Err(MathError::Parse(format!("unknown representative `{text}`"))),
            }
        } else {
            return Err(MathError::Parse(format!("unknown representative `{text}`")));
        };
        Ok(Representative { kind, scale })
    }
}

/// chi* classes realized among minimal-valuation norm values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormClass {
    Plus,
    Minus,
    Both,
}

impl fmt::Display for NormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormClass::Plus => write!(f, "+1"),
            NormClass::Minus => write!(f, "-1"),
            NormClass::Both => write!(f, "+-1"),
        }
    }
}

/// The K-invariants that drive classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitInvariants {
    /// v_E of the determinant.
    pub det_valuation: i64,
    /// chi* of the determinant.
    pub det_class: i64,
    /// v_F of the scalar ideal.
    pub scalar_exponent: i64,
    /// v_F of the norm ideal (always even).
    pub norm_exponent: i64,
    /// w^i-modularity level, when the matrix is modular.
    pub modularity: Option<i64>,
    /// chi* classes among minimal norm values.
    pub norm_class: NormClass,
}

impl fmt::Display for OrbitInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "det: pi^{} (chi* {}), sL = w^{}, nL = w^{}, modular: {}, min-norm chi*: {}",
            self.det_valuation,
            self.det_class,
            self.scalar_exponent,
            self.norm_exponent,
            match self.modularity {
                Some(i) => i.to_string(),
                None => "no".to_string(),
            },
            self.norm_class
        )
    }
}

fn val_f_of_base(ext: &QuadExt, x: BaseElem) -> Option<i64> {
    ext.val_f(ext.from_base(x))
}

/// Jacobowitz invariants of a Hermitian matrix, by primitive-vector
/// enumeration at a certified depth.
pub fn invariants(ext: &QuadExt, mat: &HermitianMatrix2) -> Result<OrbitInvariants, MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    let f = ext.base();
    let det = mat.det(ext);
    let det_valuation = det.val().ok_or(MathError::SingularMatrix)?;
    let det_class = ext.chi_star(det)?;

    // Scalar ideal from the entries, then strip pi^k so sL lands in {w^0, w^1}.
    let vals = [
        val_f_of_base(ext, mat.a),
        val_f_of_base(ext, mat.b),
        ext.val_f(mat.c),
    ];
    let scalar_exponent = vals
        .iter()
        .flatten()
        .min()
        .copied()
        .ok_or(MathError::SingularMatrix)?;
    let k = scalar_exponent.div_euclid(2);
    let stripped = mat.scale(ext, ext.pi_pow(-k));
    let stripped_scalar = scalar_exponent - 2 * k;

    let s = ext.s().unwrap();
    // Vector probe depth: deep enough that the minimal pairing valuation
    // (at most (s + 2)/2 in v_E for stripped matrices) resolves its chi*
    // class through the trace-image bound.
    let probe = (2 * s + 4) as u32;
    let (a_digits, b_digits) = crate::cells::lattice_digits(ext, probe);
    let digits = (probe / 2 + 2 * (s as u32) + 6).min(f.precision());
    let ring = ModRing::new(f.p(), digits);
    let pert = ext
        .trace_image_exponent(probe as i64)?
        .min(probe as i64);

    let (t_c, nw_c) = basis_constants(ext);
    let embed = |x: BaseElem| -> Result<u128, MathError> {
        ring.from_base(f, x).ok_or(MathError::PrecisionTooLow {
            have: x.rel_precision(),
            need: digits,
        })
    };
    let t = embed(t_c)?;
    let nw = embed(nw_c)?;
    let a_r = embed(stripped.a)?;
    let b_r = embed(stripped.b)?;
    let (c0e, c1e) = w_basis_coords(ext, stripped.c).ok_or(MathError::SingularMatrix)?;
    let c0 = embed(c0e)?;
    let c1 = embed(c1e)?;

    // Pairing of v = (x, y) with itself in w-coordinates:
    // <v,v> = a N(x) + b N(y) + Tr(c conj(x) y).
    let norm_of = |x0: u128, x1: u128| {
        ring.add(
            ring.mul(x0, x0),
            ring.add(ring.mul(t, ring.mul(x0, x1)), ring.mul(nw, ring.mul(x1, x1))),
        )
    };
    // Tr(c conj(x) y) expanded over coordinates: conj(x) = (x0 + T x1, -x1).
    let pairing_cross = |x0: u128, x1: u128, y0: u128, y1: u128| {
        let cx0 = ring.add(x0, ring.mul(t, x1));
        let cx1 = ring.neg(x1);
        // z = conj(x) * y in the w-basis: w^2 = T w - NW.
        let z0 = ring.add(ring.mul(cx0, y0), ring.neg(ring.mul(nw, ring.mul(cx1, y1))));
        let z1 = ring.add(
            ring.add(ring.mul(cx0, y1), ring.mul(cx1, y0)),
            ring.mul(t, ring.mul(cx1, y1)),
        );
        // u = c * z, then Tr(u) = 2 u0 + T u1.
        let u0 = ring.add(ring.mul(c0, z0), ring.neg(ring.mul(nw, ring.mul(c1, z1))));
        let u1 = ring.add(
            ring.add(ring.mul(c0, z1), ring.mul(c1, z0)),
            ring.mul(t, ring.mul(c1, z1)),
        );
        ring.add(ring.add(u0, u0), ring.mul(t, u1))
    };
    let vf_of_coords = |x0: u128, x1: u128| -> u32 {
        // v_F(x) = v_E(N(x)) in the ramified cases.
        ring.vp(norm_of(x0, x1))
    };

    let mut norm_min: Option<i64> = None;
    let mut plus = false;
    let mut minus = false;
    let mut modular = true;

    let a_span = f.pk(a_digits);
    let b_span = f.pk(b_digits);
    let span = a_span * b_span;
    let mut i = 0u128;
    while i < span {
        let (x0, x1) = (i % a_span, i / a_span);
        let x_unit = vf_of_coords(x0, x1) == 0;
        let mut j = 0u128;
        while j < span {
            let (y0, y1) = (j % a_span, j / a_span);
            j += 1;
            if !x_unit && vf_of_coords(y0, y1) != 0 {
                continue;
            }
            let pairing = ring.add(
                ring.add(ring.mul(a_r, norm_of(x0, x1)), ring.mul(b_r, norm_of(y0, y1))),
                pairing_cross(x0, x1, y0, y1),
            );
            let v = ring.vp(pairing) as i64;
            if v < pert {
                let vf = 2 * v;
                let better = norm_min.map_or(true, |cur| vf < cur);
                if better {
                    norm_min = Some(vf);
                    plus = false;
                    minus = false;
                }
                if norm_min == Some(vf) {
                    match ext
                        .chi_star_residue(pairing, digits)
                        .expect("probe depth pins the character class")
                    {
                        1 => plus = true,
                        _ => minus = true,
                    }
                }
            }
            // Modularity: the column A x must generate exactly w^sL.
            let ax0 = ring.add(ring.mul(a_r, x0), {
                // c * y in w-coordinates
                ring.add(ring.mul(c0, y0), ring.neg(ring.mul(nw, ring.mul(c1, y1))))
            });
            let ax1 = ring.add(
                ring.mul(a_r, x1),
                ring.add(
                    ring.add(ring.mul(c0, y1), ring.mul(c1, y0)),
                    ring.mul(t, ring.mul(c1, y1)),
                ),
            );
            // conj(c) * x + b * y
            let cb0 = ring.add(c0, ring.mul(t, c1));
            let cb1 = ring.neg(c1);
            let bx0 = ring.add(
                ring.add(ring.mul(cb0, x0), ring.neg(ring.mul(nw, ring.mul(cb1, x1)))),
                ring.mul(b_r, y0),
            );
            let bx1 = ring.add(
                ring.add(
                    ring.add(ring.mul(cb0, x1), ring.mul(cb1, x0)),
                    ring.mul(t, ring.mul(cb1, x1)),
                ),
                ring.mul(b_r, y1),
            );
            let col_min = vf_of_coords(ax0, ax1).min(vf_of_coords(bx0, bx1)) as i64;
            if col_min != stripped_scalar {
                modular = false;
            }
        }
        i += 1;
    }

    let norm_exponent = norm_min.ok_or(MathError::SingularMatrix)?;
    assert!(
        norm_exponent / 2 + s + 1 <= pert,
        "probe depth does not certify the norm ideal class"
    );
    let norm_class = match (plus, minus) {
        (true, true) => NormClass::Both,
        (true, false) => NormClass::Plus,
        (false, true) => NormClass::Minus,
        (false, false) => unreachable!("norm ideal is nonzero"),
    };
    Ok(OrbitInvariants {
        det_valuation,
        det_class,
        scalar_exponent,
        norm_exponent: norm_exponent + 2 * k,
        modularity: if modular {
            Some(stripped_scalar + 2 * k)
        } else {
            None
        },
        norm_class,
    })
}

/// The unscaled representatives of the extension (scale = 0), diagonals up
/// to det valuation `bound`.
pub fn representative_table_unscaled(
    ext: &QuadExt,
    bound: i64,
) -> Result<Vec<Representative>, MathError> {
    if !ext.case().is_wild() {
        return Err(MathError::WrongCase);
    }
    let s = ext.s().unwrap();
    let mut out = vec![
        Representative::unscaled(RepKind::Hyperbolic0),
        Representative::unscaled(RepKind::Hyperbolic1),
        Representative::unscaled(RepKind::DeltaPlane),
    ];
    let rp = ext.case() == crate::ext::ExtCase::RamifiedPrime;
    let hi45 = if rp { s } else { s - 1 };
    let hi67 = if rp { s + 2 } else { s + 1 };
    let mut m = 1;
    while 2 * m < hi45 {
        out.push(Representative::unscaled(RepKind::Plane4 { m }));
        out.push(Representative::unscaled(RepKind::Plane5 { m }));
        m += 1;
    }
    m = 1;
    while 2 * m < hi67 {
        out.push(Representative::unscaled(RepKind::Plane6 { m }));
        out.push(Representative::unscaled(RepKind::Plane7 { m }));
        m += 1;
    }
    for l1 in 0..=bound.max(0) {
        let e1_options: &[EpsUnit] = if l1 > s {
            &[EpsUnit::One, EpsUnit::Delta]
        } else {
            &[EpsUnit::One]
        };
        for &e1 in e1_options {
            for e2 in [EpsUnit::One, EpsUnit::Delta] {
                out.push(Representative::unscaled(RepKind::Diagonal {
                    l1,
                    l2: 0,
                    e1,
                    e2,
                }));
            }
        }
    }
    Ok(out)
}

/// The full finite list of representatives with |det valuation| within the
/// bound, including the scaled copies pi^k * x.
pub fn representative_table(ext: &QuadExt, bound: i64) -> Result<Vec<Representative>, MathError> {
    let unscaled = representative_table_unscaled(ext, bound)?;
    let mut out = Vec::new();
    for rep in unscaled {
        let d0 = rep.matrix(ext)?.det(ext).val().expect("table reps are regular");
        let mut k = -(bound + d0.abs());
        while 2 * k + d0 <= bound {
            if (2 * k + d0).abs() <= bound {
                out.push(Representative {
                    kind: rep.kind,
                    scale: k,
                });
            }
            k += 1;
        }
    }
    Ok(out)
}

/// Strips the scalar per the scaling relation and matches the invariants
/// against the table. Ambiguity is reported, never guessed away.
pub fn classify(
    ext: &QuadExt,
    mat: &HermitianMatrix2,
) -> Result<(Representative, OrbitInvariants), MathError> {
    let inv = invariants(ext, mat)?;
    let k = inv.scalar_exponent.div_euclid(2);
    let stripped = mat.scale(ext, ext.pi_pow(-k));
    let stripped_inv = invariants(ext, &stripped)?;
    let bound = stripped_inv.det_valuation + 1;
    let mut matches_found = Vec::new();
    for rep in representative_table_unscaled(ext, bound)? {
        let rep_inv = invariants(ext, &rep.matrix(ext)?)?;
        if rep_inv == stripped_inv {
            matches_found.push(rep);
        }
    }
    match matches_found.len() {
        0 => Err(MathError::RepNotInTable),
        1 => Ok((
            Representative {
                kind: matches_found[0].kind,
                scale: k,
            },
            inv,
        )),
        n => Err(MathError::AmbiguousClass(n)),
    }
}

/// The scaling action x -> a x on representatives together with the exact
/// prefactor |a|^(s1 + 2 s2) chi1(a) chi2(a)^2 of the spherical function.
///
/// With the F-normalized absolute value, |pi|^(s1 + 2 s2) = q^(2 z1 + 2 z2),
/// so a = pi^k * eps contributes (t1 t2)^(2k) times the sign chi1(eps).
pub fn scale_action(
    ext: &QuadExt,
    rep: &Representative,
    a: BaseElem,
    chi1: Character,
) -> Result<(Representative, LaurentRational), MathError> {
    if a.is_zero_at_precision() {
        return Err(MathError::ZeroInput);
    }
    let scaled = rep.matrix(ext)?.scale(ext, a);
    let (new_rep, _) = classify(ext, &scaled)?;
    let k = a.val().unwrap();
    let mut pref = LaurentRational::monomial(BigRational::one(), 0, 2 * k, 2 * k);
    let sign = match chi1 {
        Character::Trivial => 1,
        Character::Star => ext.chi_star(a)?,
    };
    if sign < 0 {
        pref = pref.neg();
    }
    Ok((new_rep, pref))
}

/// A pseudorandom element of GL_2(O_F), for orbit-invariance oracles.
pub fn random_gl2<R: Rng>(ext: &QuadExt, rng: &mut R) -> [[ExtElem; 2]; 2] {
    let f = ext.base();
    let span = f.pk(6) as u64;
    loop {
        let mut entry = || {
            let a = f.from_int((rng.gen::<u64>() % span) as i64);
            let b = f.from_int((rng.gen::<u64>() % span) as i64);
            ext.add_ext(ext.from_base(a), ext.scale_ext(b, ext.uniformizer()))
        };
        let k = [[entry(), entry()], [entry(), entry()]];
        let det = ext.sub_ext(
            ext.mul_ext(k[0][0], k[1][1]),
            ext.mul_ext(k[0][1], k[1][0]),
        );
        if ext.val_f(det) == Some(0) {
            return k;
        }
    }
}

/// One * one rational helper for prefactors.
pub fn unit_prefactor() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hyperbolic_invariants_match_the_lattice_values() {
        let ext = build_extension(2, 2, None).unwrap();
        let h0 = Representative::unscaled(RepKind::Hyperbolic0)
            .matrix(&ext)
            .unwrap();
        let inv = invariants(&ext, &h0).unwrap();
        assert_eq!(inv.scalar_exponent, 0);
        assert_eq!(inv.norm_exponent, 2); // w^s with s = 2
        assert_eq!(inv.modularity, Some(0));
        assert_eq!(inv.det_valuation, 0);
        assert_eq!(inv.det_class, 1); // chi*(-1) = 1 over Q2(sqrt 2)

        let ru = build_extension(2, -5, None).unwrap();
        let h1 = Representative::unscaled(RepKind::Hyperbolic1)
            .matrix(&ru)
            .unwrap();
        let inv = invariants(&ru, &h1).unwrap();
        assert_eq!(inv.norm_exponent, 2); // w^(s+1) with s = 1
        assert_eq!(inv.modularity, Some(1));
    }

    #[test]
    fn diagonal_reading_is_direct() {
        let ext = build_extension(2, 2, None).unwrap();
        let m = HermitianMatrix2 {
            a: ext.pi_pow(3),
            b: ext.base().one(),
            c: ext.zero_ext(),
        };
        let inv = invariants(&ext, &m).unwrap();
        assert_eq!(inv.scalar_exponent, 0);
        assert_eq!(inv.det_valuation, 3);
        assert_eq!(inv.modularity, None);
        assert_eq!(inv.norm_exponent, 0);
    }

    #[test]
    fn table_matches_the_expected_shapes() {
        let ext = build_extension(2, 2, None).unwrap();
        let table = representative_table_unscaled(&ext, 1).unwrap();
        // s = 2: Plane4/5 empty, Plane6/7 at m = 1.
        assert!(table
            .iter()
            .all(|r| !matches!(r.kind, RepKind::Plane4 { .. } | RepKind::Plane5 { .. })));
        assert!(table
            .iter()
            .any(|r| matches!(r.kind, RepKind::Plane6 { m: 1 })));
        assert!(table
            .iter()
            .any(|r| matches!(r.kind, RepKind::Plane7 { m: 1 })));

        let ru = build_extension(2, -5, None).unwrap();
        let table = representative_table_unscaled(&ru, 1).unwrap();
        // s = 1: no planes at all.
        assert!(!table.iter().any(|r| matches!(
            r.kind,
            RepKind::Plane4 { .. } | RepKind::Plane5 { .. } | RepKind::Plane6 { .. } | RepKind::Plane7 { .. }
        )));
    }

    #[test]
    fn table_is_separated_by_invariants() {
        for d in [2i64, -5] {
            let ext = build_extension(2, d, None).unwrap();
            let table = representative_table_unscaled(&ext, 4).unwrap();
            let invs: Vec<(Representative, OrbitInvariants)> = table
                .iter()
                .map(|r| (*r, invariants(&ext, &r.matrix(&ext).unwrap()).unwrap()))
                .collect();
            for (i, (ra, ia)) in invs.iter().enumerate() {
                for (rb, ib) in invs.iter().skip(i + 1) {
                    assert_ne!(
                        ia, ib,
                        "indistinguishable representatives {ra} and {rb} (d = {d})"
                    );
                }
            }
        }
    }

    #[test]
    fn classify_recovers_table_entries() {
        for d in [2i64, -5] {
            let ext = build_extension(2, d, None).unwrap();
            for rep in representative_table_unscaled(&ext, 3).unwrap() {
                let (found, _) = classify(&ext, &rep.matrix(&ext).unwrap()).unwrap();
                assert_eq!(found, rep, "classify failed on {rep} (d = {d})");
            }
        }
    }

    #[test]
    fn classify_is_stable_under_k_conjugation() {
        let ext = build_extension(2, 2, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rep = Representative::unscaled(RepKind::Hyperbolic0);
        let m = rep.matrix(&ext).unwrap();
        for _ in 0..50 {
            let k = random_gl2(&ext, &mut rng);
            let conj = m.conj_transform(&ext, &k);
            let (found, _) = classify(&ext, &conj).unwrap();
            assert_eq!(found, rep);
        }
    }

    #[test]
    fn scaled_diagonal_with_large_gap_classifies_with_delta() {
        let ext = build_extension(2, 2, None).unwrap();
        let f = ext.base();
        let m = HermitianMatrix2 {
            a: f.mul(ext.pi_pow(3), ext.delta().unwrap()),
            b: f.one(),
            c: ext.zero_ext(),
        };
        let (rep, _) = classify(&ext, &m).unwrap();
        assert_eq!(
            rep.kind,
            RepKind::Diagonal {
                l1: 3,
                l2: 0,
                e1: EpsUnit::Delta,
                e2: EpsUnit::One
            }
        );
        assert_eq!(rep.scale, 0);
    }

    #[test]
    fn singular_matrices_are_rejected() {
        let ext = build_extension(2, 2, None).unwrap();
        let m = HermitianMatrix2 {
            a: ext.base().one(),
            b: ext.base().one(),
            c: ext.one_ext(),
        };
        assert!(matches!(
            invariants(&ext, &m),
            Err(MathError::SingularMatrix)
        ));
    }
}
