//! Provider-owned registry of default and per-tenant configuration files,
//! with copy-on-first-configure and optimistic versioning.
//!
//! Layout under the data root:
//!
//! ```text
//! central.xml
//! defaults/<slot>.xml
//! tenants/<tenant>/<slot>.xml
//! ```

mod central;
mod store;

use std::path::PathBuf;

use thiserror::Error;

use crate::codec::ParseError;
use crate::model::{Slot, TenantId};

pub use central::{
    default_location, tenant_location, CentralRegistry, DatabaseDescriptor, RegistrySection, TenantOverride,
    CENTRAL_FILE,
};
pub use store::{CrashPoint, Store, StoreOptions};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("central registry is corrupt: {0}")]
    RegistryCorrupt(String),
    #[error("section {0} has no default location")]
    MissingDefault(Slot),
    #[error("registry references missing file {0}")]
    DanglingLocation(String),
    #[error("data root is already initialized")]
    AlreadyInitialized,
    #[error("unknown tenant {0}")]
    UnknownTenant(TenantId),
    #[error("tenant {0} is already registered")]
    TenantExists(TenantId),
    #[error("no registry section for {0}")]
    UnknownSlot(Slot),
    #[error("tenant {tenant} has not configured {slot} yet")]
    NotConfigured { tenant: TenantId, slot: Slot },
    #[error("version conflict: stored version is {current}, request was based on {given}")]
    VersionConflict { current: u64, given: u64 },
    #[error("database {db} on {host} is already assigned to tenant {owner}")]
    DatabaseAlreadyAssigned { db: String, host: String, owner: TenantId },
    #[error("stored document {location} does not parse: {source}")]
    BadDocument {
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("write interrupted")]
    Interrupted,
}

impl StoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        StoreError::Io { path: path.into(), source }
    }
}
