//! Vendor default documents shipped with the application, one per slot.

use crate::codec::parse;
use crate::model::{ConfigDocument, Slot};

const VENDOR: &[(&str, &str)] = &[
    ("css-elements", include_str!("../vendor/css-elements.xml")),
    ("images", include_str!("../vendor/images.xml")),
    ("scripts", include_str!("../vendor/scripts.xml")),
    ("properties.en", include_str!("../vendor/properties.en.xml")),
    ("properties.de", include_str!("../vendor/properties.de.xml")),
    ("blocks", include_str!("../vendor/blocks.xml")),
    ("fields", include_str!("../vendor/fields.xml")),
    ("frontend-bos", include_str!("../vendor/frontend-bos.xml")),
    ("backend-bindings", include_str!("../vendor/backend-bindings.xml")),
    ("connections", include_str!("../vendor/connections.xml")),
    ("business-roles", include_str!("../vendor/business-roles.xml")),
    ("bol-access", include_str!("../vendor/bol-access.xml")),
    ("data-objects", include_str!("../vendor/data-objects.xml")),
    ("databases", include_str!("../vendor/databases.xml")),
    ("key-values", include_str!("../vendor/key-values.xml")),
    ("workflows", include_str!("../vendor/workflows.xml")),
];

/// Canonical XML of every vendor default, keyed by slot.
pub fn vendor_default_files() -> Vec<(Slot, &'static str)> {
    VENDOR.iter().map(|(slot, xml)| (slot.parse().expect("vendor slot names are valid"), *xml)).collect()
}

/// Parsed vendor defaults, in a fixed order.
pub fn vendor_defaults() -> Vec<(Slot, ConfigDocument)> {
    vendor_default_files()
        .into_iter()
        .map(|(slot, xml)| {
            let doc = parse(slot.category(), xml.as_bytes()).unwrap_or_else(|e| panic!("vendor {slot}: {e}"));
            (slot, doc)
        })
        .collect()
}
