//! Semantic maps from cross-linguistic data.
//!
//! Translation tables and form × function matrices become dissimilarity
//! matrices, which classical or SMACOF multidimensional scaling turns into
//! low-dimensional maps. The maps can then be clustered, colored per
//! language and read against semantic annotations.

#![allow(clippy::needless_range_loop)]

pub mod cluster;
pub mod corpus;
pub mod dissim;
pub mod interpret;
pub mod linalg;
pub mod mds;
mod tsv;

pub use tsv::ParseError;

use thiserror::Error;

/// Any failure of the library, for callers that do not care which stage.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Dissim(#[from] dissim::DissimError),
    #[error(transparent)]
    Mds(#[from] mds::MdsError),
    #[error(transparent)]
    Cluster(#[from] cluster::ClusterError),
    #[error(transparent)]
    Interpret(#[from] interpret::InterpretError),
}

impl Error {
    /// True for failures of the numerics on valid input, as opposed to
    /// malformed or inconsistent input.
    pub fn is_numeric(&self) -> bool {
        use dissim::DissimError as D;
        use mds::MdsError as M;
        matches!(
            self,
            Error::Linalg(linalg::LinalgError::NoConvergence { .. })
                | Error::Mds(M::Linalg(linalg::LinalgError::NoConvergence { .. }))
                | Error::Mds(M::Degenerate { .. } | M::UndefinedStress { .. })
                | Error::Dissim(D::NoComparablePositions | D::UndefinedPair(..) | D::Disconnected(_))
        )
    }
}
