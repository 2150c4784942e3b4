//! Typed configuration model.

mod document;
mod entries;
pub mod grid;
mod ids;
mod validate;

pub use document::{ConfigBody, ConfigDocument};
pub use entries::*;
pub use grid::{grid_cells, CoordinateError, GridCell};
pub use ids::{ConfigCategory, IdError, LangTag, Slot, TenantId};
pub use validate::{
    is_client_number, validate_document, workflow_violations, ResolvedCrossRefs, ValidationReport,
    Violation, ViolationCode,
};
