//! Promptable candidate-mask oracles.
//!
//! An oracle takes a set of foreground point prompts on an image and returns
//! exactly three candidate masks (whole, part, subpart) with confidence
//! scores. [`MockOracle`] is a deterministic geometric stand-in;
//! [`ProcessOracle`] and [`ReplayOracle`] speak the JSON-lines protocol in
//! [`wire`] to an external segmenter.

mod mock;
mod process;
pub mod rle;
pub mod wire;

use thiserror::Error;

use crate::sampling::{Point, PointPrompt};
use crate::selection::{CandidateMaskSet, SelectionError};

pub use mock::{GranularityRule, MockOracle, MockScene, MockShape, SceneError, NESTED_SCORES};
pub use process::{ProcessOracle, ReplayOracle, ORACLE_CMD_ENV};
pub use rle::{rle_decode, rle_encode, RleError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("unknown image `{0}`")]
    UnknownImage(String),
    #[error("oracle backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("malformed oracle response: {0}")]
    MalformedResponse(String),
    #[error("oracle reported an error for request `{request_id}`: {message}")]
    Backend { request_id: String, message: String },
    #[error("request `{0}` carries no prompts")]
    EmptyRequest(String),
    #[error(transparent)]
    Rle(#[from] RleError),
    #[error(transparent)]
    Candidates(#[from] SelectionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRequest {
    pub request_id: String,
    pub image_ref: String,
    pub points: Vec<Point>,
}

impl OracleRequest {
    pub fn from_prompts(request_id: impl Into<String>, image_ref: impl Into<String>, prompts: &[PointPrompt]) -> Self {
        OracleRequest {
            request_id: request_id.into(),
            image_ref: image_ref.into(),
            points: prompts.iter().map(PointPrompt::point).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResponse {
    pub request_id: String,
    pub candidates: CandidateMaskSet,
}

pub trait MaskOracle: Send + Sync {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError>;

    /// Answer several requests; responses come back in request order.
    fn query_batch(&self, requests: &[OracleRequest]) -> Result<Vec<OracleResponse>, OracleError> {
        requests.iter().map(|r| self.query(r)).collect()
    }
}

impl<O: MaskOracle + ?Sized> MaskOracle for &O {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError> {
        (**self).query(request)
    }

    fn query_batch(&self, requests: &[OracleRequest]) -> Result<Vec<OracleResponse>, OracleError> {
        (**self).query_batch(requests)
    }
}

impl<O: MaskOracle + ?Sized> MaskOracle for Box<O> {
    fn query(&self, request: &OracleRequest) -> Result<OracleResponse, OracleError> {
        (**self).query(request)
    }

    fn query_batch(&self, requests: &[OracleRequest]) -> Result<Vec<OracleResponse>, OracleError> {
        (**self).query_batch(requests)
    }
}
