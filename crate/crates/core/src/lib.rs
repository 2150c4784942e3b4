pub mod model;
pub mod codec;
pub mod registry;
pub mod guard;
pub mod cache;
pub mod defaults;
pub mod resolver;
pub mod workflow;
pub mod error;
pub mod diff;
pub mod tenancy;
pub mod json;
