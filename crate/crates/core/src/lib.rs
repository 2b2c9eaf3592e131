//! Exact-arithmetic engine for spherical functions on the space of 2x2
//! Hermitian matrices over quadratic extensions of dyadic fields.
//!
//! The closed forms live in the symbolic layer as Laurent rational functions
//! in u = q^(1/4), t1 = q^(z1), t2 = q^(z2); every one of them is verified
//! against a brute-force p-adic integration oracle that enumerates residue
//! cells with certified resolution depths and exact rational measures.

pub mod cells;
pub mod error;
pub mod ext;
pub mod field;
pub mod hermitian;
pub mod integrals;
pub mod laurent;
pub mod measure;
pub mod oracle;
pub mod spherical;
pub mod verify;

pub use cells::{domain_measure, enumerate_cells, Cell, Domain, ShellHistogram, Tail};
pub use error::MathError;
pub use ext::{build_extension, make_quadratic_extension, ExtCase, ExtElem, QuadExt};
pub use field::{BaseElem, BaseField};
pub use hermitian::{
    classify, invariants, representative_table, scale_action, EpsUnit, HermitianMatrix2,
    NormClass, OrbitInvariants, RepKind, Representative,
};
pub use integrals::{
    case1_integral_closed, character_integral, integral_lemma_closed, norm_shell_histogram,
};
pub use laurent::{LaurentPoly, LaurentRational, Monomial};
pub use measure::{measure_lemma_closed, norm_fiber_measure};
pub use oracle::{oracle_eval, OracleValue};
pub use spherical::{closed_form, functional_equation_check, Character, CharacterPair};
pub use verify::{verify_all, Report, ReportRow, RowStatus, VerifyOptions};
