//! Exact Haar-measure bookkeeping on O_F by residue-cell enumeration.
//!
//! A cell is a coset `center + w^depth O_F`; its measure is
//! `(#residue field of F)^(-depth)`. Cells emitted for a domain partition it
//! exactly, in a deterministic order, so exact rational reductions are
//! schedule-independent.

use crate::error::MathError;
use crate::ext::{ExtCase, ExtElem, QuadExt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Integration domains used throughout the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// O_F.
    Integers,
    /// w O_F.
    MaximalIdeal,
    /// O_F^*.
    Units,
}

/// A coset `center + w^depth O_F` with its exact measure.
#[derive(Clone, Debug)]
pub struct Cell {
    pub center: ExtElem,
    pub depth: u32,
    pub measure: BigRational,
}

/// q^k as a big rational for signed k.
pub fn q_pow(q: u64, k: i64) -> BigRational {
    let b = BigInt::from(q);
    if k >= 0 {
        BigRational::from_integer(b.pow(k as u32))
    } else {
        BigRational::new(BigInt::one(), b.pow((-k) as u32))
    }
}

/// Coordinate spans (alpha digits, beta digits) describing a full residue
/// system of O_F / w^depth in the basis (1, w) for ramified extensions and
/// (1, sqrt(d)) for unramified ones.
pub fn lattice_digits(ext: &QuadExt, depth: u32) -> (u32, u32) {
    match ext.case() {
        ExtCase::Unramified => (depth, depth),
        _ => (depth.div_ceil(2), depth / 2),
    }
}

fn lattice_point(ext: &QuadExt, alpha: u128, beta: u128) -> ExtElem {
    let f = ext.base();
    let a = f.from_int(alpha as i64);
    let b = f.from_int(beta as i64);
    match ext.case() {
        ExtCase::Unramified => ExtElem { a, b },
        _ => ext.add_ext(
            ext.from_base(a),
            ext.scale_ext(b, ext.uniformizer()),
        ),
    }
}

/// Enumerates the cells of a domain at the given depth, in lexicographic
/// order of the coordinate lifts.
pub fn enumerate_cells(
    ext: &QuadExt,
    domain: Domain,
    depth: u32,
) -> Result<Vec<Cell>, MathError> {
    let f = ext.base();
    let (a_digits, b_digits) = lattice_digits(ext, depth);
    if a_digits.max(b_digits) + 2 > f.precision() {
        return Err(MathError::DepthExceedsPrecision {
            depth,
            budget: f.precision(),
        });
    }
    if depth == 0 {
        return match domain {
            Domain::Integers => Ok(vec![Cell {
                center: ext.zero_ext(),
                depth: 0,
                measure: BigRational::one(),
            }]),
            _ => Err(MathError::DepthExceedsPrecision {
                depth,
                budget: f.precision(),
            }),
        };
    }
    let measure = q_pow(ext.residue_f_size(), -(depth as i64));
    let a_span = f.pk(a_digits);
    let b_span = f.pk(b_digits);
    let mut cells = Vec::new();
    let mut alpha = 0u128;
    while alpha < a_span {
        let mut beta = 0u128;
        while beta < b_span {
            let center = lattice_point(ext, alpha, beta);
            let vf = ext.val_f(center);
            let keep = match domain {
                Domain::Integers => true,
                Domain::MaximalIdeal => !matches!(vf, Some(0)),
                Domain::Units => matches!(vf, Some(0)),
            };
            if keep {
                cells.push(Cell {
                    center,
                    depth,
                    measure: measure.clone(),
                });
            }
            beta += 1;
        }
        alpha += 1;
    }
    Ok(cells)
}

/// Total measure of a domain.
pub fn domain_measure(ext: &QuadExt, domain: Domain) -> BigRational {
    let qf = ext.residue_f_size();
    match domain {
        Domain::Integers => BigRational::one(),
        Domain::MaximalIdeal => q_pow(qf, -1),
        Domain::Units => BigRational::one() - q_pow(qf, -1),
    }
}

/// Tail descriptor of a shell decomposition.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    /// All shells are resolved; the entries are complete.
    None,
    /// measure(v) = first * ratio^(v - start) for v >= start.
    Geometric {
        start: i64,
        first: BigRational,
        ratio: BigRational,
    },
    /// Enumeration stopped: shells at valuation >= depth hold `residual`.
    Unresolved { depth: i64, residual: BigRational },
}

/// Measure distribution of the valuation of an integrand over a p-adic
/// domain: exact finite entries plus a tail descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellHistogram {
    pub entries: BTreeMap<i64, BigRational>,
    pub tail: Tail,
}

impl ShellHistogram {
    pub fn new() -> Self {
        ShellHistogram {
            entries: BTreeMap::new(),
            tail: Tail::None,
        }
    }

    pub fn add(&mut self, v: i64, measure: BigRational) {
        let slot = self
            .entries
            .entry(v)
            .or_insert_with(BigRational::zero);
        *slot += measure;
    }

    /// Exact total of entries plus tail; the geometric tail closes to
    /// first/(1 - ratio).
    pub fn total(&self) -> Option<BigRational> {
        let finite: BigRational = self.entries.values().cloned().sum();
        match &self.tail {
            Tail::None => Some(finite),
            Tail::Geometric { first, ratio, .. } => {
                Some(finite + first / (BigRational::one() - ratio))
            }
            Tail::Unresolved { residual, .. } => Some(finite + residual),
        }
    }

    /// Entries and tail lines in the `v: measure` display form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (v, m) in &self.entries {
            out.push_str(&format!("{v}: {m}\n"));
        }
        match &self.tail {
            Tail::None => out.push_str("tail: none\n"),
            Tail::Geometric {
                start,
                first,
                ratio,
            } => out.push_str(&format!(
                "tail: geometric from {start}, first {first}, ratio {ratio}\n"
            )),
            Tail::Unresolved { depth, residual } => {
                out.push_str(&format!("tail: unresolved at {depth}, residual {residual}\n"))
            }
        }
        out
    }
}

impl Default for ShellHistogram {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::build_extension;
    use num_traits::One;

    #[test]
    fn cells_partition_the_integers() {
        let ext = build_extension(2, 2, None).unwrap();
        let cells = enumerate_cells(&ext, Domain::Integers, 1).unwrap();
        assert_eq!(cells.len(), 2);
        let total: BigRational = cells.iter().map(|c| c.measure.clone()).sum();
        assert!(total.is_one());
    }

    #[test]
    fn maximal_ideal_cells_carry_half_the_mass() {
        let ext = build_extension(2, 2, None).unwrap();
        let cells = enumerate_cells(&ext, Domain::MaximalIdeal, 2).unwrap();
        assert_eq!(cells.len(), 2);
        let total: BigRational = cells.iter().map(|c| c.measure.clone()).sum();
        assert_eq!(total, q_pow(2, -1));
    }

    #[test]
    fn unramified_cells_split_four_ways() {
        let ext = build_extension(2, 5, None).unwrap();
        let cells = enumerate_cells(&ext, Domain::Integers, 1).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0].measure, q_pow(4, -1));
    }

    #[test]
    fn unit_cells_complement_the_ideal() {
        for d in [2i64, -5] {
            let ext = build_extension(2, d, None).unwrap();
            let units = enumerate_cells(&ext, Domain::Units, 3).unwrap();
            let total: BigRational = units.iter().map(|c| c.measure.clone()).sum();
            assert_eq!(total, domain_measure(&ext, Domain::Units));
        }
    }

    #[test]
    fn histogram_totals_close_geometric_tails() {
        let mut h = ShellHistogram::new();
        h.add(0, BigRational::new(1.into(), 2.into()));
        h.tail = Tail::Geometric {
            start: 1,
            first: BigRational::new(1.into(), 4.into()),
            ratio: BigRational::new(1.into(), 2.into()),
        };
        assert!(h.total().unwrap().is_one());
    }

    #[test]
    fn depth_beyond_precision_is_rejected() {
        let ext = build_extension(2, 2, Some(10)).unwrap();
        assert!(matches!(
            enumerate_cells(&ext, Domain::Integers, 30),
            Err(MathError::DepthExceedsPrecision { .. })
        ));
    }
}
