//! JSON rendering shared by the service and the CLI, so both emit the same
//! bytes for the same value.

use serde::Serialize;

/// Pretty-printed JSON with a trailing newline.
pub fn render<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("views always serialize");
    out.push('\n');
    out
}
