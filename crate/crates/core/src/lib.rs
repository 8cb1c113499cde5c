//! Symbol-based analysis and multigrid solvers for block-structured matrices.

pub mod conditions;
pub mod error;
pub mod experiment;
pub mod femgen;
pub mod mgsolve;
pub mod multilevel;
pub mod smallmat;
pub mod sparse;
pub mod structured;
pub mod symbol;

pub use conditions::{full_report, ConditionReport};
pub use error::{Error, Result};
pub use smallmat::{CMat, C64};
pub use sparse::CsrMatrix;
pub use structured::{BlockStructuredMatrix, GridTransfer, Parity, Structure};
pub use symbol::{MatrixTrigPolynomial, SymbolZero};

/// Complex vectors serialize as `[[re, im], ...]`.
pub(crate) fn serialize_cvec<S: serde::Serializer>(
    v: &[C64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&[x.re, x.im])?;
    }
    seq.end()
}
