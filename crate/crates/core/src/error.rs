//! Errors of the guarded surface, with stable codes.

use serde::Serialize;
use thiserror::Error;

use crate::codec::ParseError;
use crate::guard::DenyReason;
use crate::model::{TenantId, ValidationReport, Violation};
use crate::registry::StoreError;
use crate::resolver::ResolveError;

/// Coarse error class; the service maps it to an HTTP status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    BadRequest,
    Unauthenticated,
    Forbidden,
    NotFound,
    Conflict,
    Unprocessable,
    Internal,
}

impl ErrorKind {
    pub fn http_status(self) -> u16 {
        match self {
            ErrorKind::BadRequest => 400,
            ErrorKind::Unauthenticated => 401,
            ErrorKind::Forbidden => 403,
            ErrorKind::NotFound => 404,
            ErrorKind::Conflict => 409,
            ErrorKind::Unprocessable => 422,
            ErrorKind::Internal => 500,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing or unknown bearer token")]
    Unauthenticated,
    #[error("access denied ({0})")]
    Denied(DenyReason),
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown tenant {0}")]
    UnknownTenant(TenantId),
    #[error("unknown category {0}")]
    UnknownCategory(String),
    #[error("tenant {0} is already registered")]
    TenantExists(TenantId),
    #[error("document does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error("document failed validation: {0}")]
    Validation(ValidationReport),
    #[error("version conflict: stored version is {current}, request was based on {given}")]
    VersionConflict { current: u64, given: u64 },
    #[error("database {db} on {host} is already assigned to tenant {owner}")]
    DatabaseAlreadyAssigned { db: String, host: String, owner: TenantId },
    #[error(transparent)]
    Resolve(ResolveError),
    #[error(transparent)]
    Storage(StoreError),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Unauthenticated => "unauthenticated",
            Error::Denied(r) => r.as_str(),
            Error::BadRequest(_) => "bad-request",
            Error::UnknownTenant(_) => "unknown-tenant",
            Error::UnknownCategory(_) => "unknown-category",
            Error::TenantExists(_) => "tenant-exists",
            Error::Parse(_) => "parse-error",
            Error::Validation(_) => "validation-failed",
            Error::VersionConflict { .. } => "version-conflict",
            Error::DatabaseAlreadyAssigned { .. } => "database-already-assigned",
            Error::Resolve(e) => match e {
                ResolveError::UnknownCategory(_) => "unknown-category",
                ResolveError::UnknownRole(_) => "unknown-role",
                ResolveError::UnknownLanguage(_) => "unknown-language",
                ResolveError::UnknownBackendObject(_) => "unknown-backend-object",
                ResolveError::DanglingConnection { .. } => "dangling-connection",
                ResolveError::NoDefaultDatabase => "no-default-database",
                ResolveError::AmbiguousDefaultDatabase(_) => "ambiguous-default-database",
                ResolveError::DanglingDatabase { .. } => "dangling-database",
                ResolveError::UnknownWorkflow(_) => "unknown-workflow",
                ResolveError::InvalidWorkflow(_) => "invalid-workflow",
                ResolveError::Storage(_) => "storage-error",
            },
            Error::Storage(_) => "storage-error",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Unauthenticated => ErrorKind::Unauthenticated,
            Error::Denied(_) => ErrorKind::Forbidden,
            Error::BadRequest(_) | Error::Parse(_) => ErrorKind::BadRequest,
            Error::UnknownTenant(_) | Error::UnknownCategory(_) => ErrorKind::NotFound,
            Error::TenantExists(_) | Error::VersionConflict { .. } | Error::DatabaseAlreadyAssigned { .. } => {
                ErrorKind::Conflict
            }
            Error::Validation(_) => ErrorKind::Unprocessable,
            Error::Resolve(e) => match e {
                ResolveError::UnknownCategory(_)
                | ResolveError::UnknownRole(_)
                | ResolveError::UnknownLanguage(_)
                | ResolveError::UnknownBackendObject(_)
                | ResolveError::UnknownWorkflow(_) => ErrorKind::NotFound,
                ResolveError::DanglingConnection { .. }
                | ResolveError::NoDefaultDatabase
                | ResolveError::AmbiguousDefaultDatabase(_)
                | ResolveError::DanglingDatabase { .. }
                | ResolveError::InvalidWorkflow(_) => ErrorKind::Unprocessable,
                ResolveError::Storage(_) => ErrorKind::Internal,
            },
            Error::Storage(_) => ErrorKind::Internal,
        }
    }

    /// Violations carried by validation failures; empty otherwise.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Validation(r) | Error::Resolve(ResolveError::InvalidWorkflow(r)) => r.violations(),
            _ => &[],
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            status: self.kind().http_status(),
            code: self.code(),
            detail: self.to_string(),
            violations: self.violations().to_vec(),
        }
    }
}

impl From<StoreError> for Error {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownTenant(t) => Error::UnknownTenant(t),
            StoreError::TenantExists(t) => Error::TenantExists(t),
            StoreError::UnknownSlot(s) => Error::UnknownCategory(s.to_string()),
            StoreError::VersionConflict { current, given } => Error::VersionConflict { current, given },
            StoreError::DatabaseAlreadyAssigned { db, host, owner } => Error::DatabaseAlreadyAssigned { db, host, owner },
            other => Error::Storage(other),
        }
    }
}

impl From<ResolveError> for Error {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::UnknownCategory(s) => Error::UnknownCategory(s.to_string()),
            other => Error::Resolve(other),
        }
    }
}

/// JSON error document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub status: u16,
    pub code: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}
