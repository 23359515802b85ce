use thiserror::Error;

use crate::cellmodel::{CellError, VertexRefError};
use crate::dynamics::DynamicsError;
use crate::green::GreenError;
use crate::oracle::OracleError;
use crate::ratfun::RatFunError;
use crate::transfer::TransferError;

/// Coarse failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numeric,
    Resource,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 1,
            ErrorKind::Numeric => 2,
            ErrorKind::Resource => 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Vertex(#[from] VertexRefError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Green(#[from] GreenError),
}

fn cell_kind(e: &CellError) -> ErrorKind {
    match e {
        CellError::SearchCap { .. } | CellError::SizeCap { .. } => ErrorKind::Resource,
        _ => ErrorKind::Validation,
    }
}

fn vertex_kind(e: &VertexRefError) -> ErrorKind {
    match e {
        VertexRefError::LevelCap { .. } => ErrorKind::Resource,
        _ => ErrorKind::Validation,
    }
}

fn ratfun_kind(e: &RatFunError) -> ErrorKind {
    match e {
        RatFunError::InvalidMatrix(_) => ErrorKind::Validation,
        _ => ErrorKind::Numeric,
    }
}

fn transfer_kind(e: &TransferError) -> ErrorKind {
    match e {
        TransferError::Cell(c) => cell_kind(c),
        TransferError::RatFun(r) => ratfun_kind(r),
        _ => ErrorKind::Validation,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Cell(e) => cell_kind(e),
            Error::Vertex(e) => vertex_kind(e),
            Error::RatFun(e) => ratfun_kind(e),
            Error::Transfer(e) => transfer_kind(e),
            Error::Oracle(e) => match e {
                OracleError::Cell(c) => cell_kind(c),
                OracleError::RatFun(r) => ratfun_kind(r),
                OracleError::Transfer(t) => transfer_kind(t),
                OracleError::Vertex(v) => vertex_kind(v),
                OracleError::InvalidProblem(_) => ErrorKind::Validation,
                OracleError::OrderCap { .. } => ErrorKind::Resource,
            },
            Error::Dynamics(e) => match e {
                DynamicsError::RatFun(r) => ratfun_kind(r),
                DynamicsError::Transfer(t) => transfer_kind(t),
                DynamicsError::Constant => ErrorKind::Validation,
            },
            Error::Green(e) => match e {
                GreenError::Vertex(v) => vertex_kind(v),
                GreenError::RatFun(r) => ratfun_kind(r),
                GreenError::InvalidQuery(_) | GreenError::NotInF(_) => ErrorKind::Validation,
                GreenError::NotInBasin { .. } | GreenError::PoleHit { .. } => ErrorKind::Numeric,
                GreenError::AccuracyUnreachable { .. } => ErrorKind::Resource,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let e: Error = OracleError::OrderCap { order: 30, cap: 24 }.into();
        assert_eq!(e.kind().exit_code(), 3);
        let e: Error = CellError::Syntax("x".into()).into();
        assert_eq!(e.kind().exit_code(), 1);
        let e: Error = RatFunError::NoConvergence { degree: 3 }.into();
        assert_eq!(e.kind().exit_code(), 2);
    }
}
