//! Entry types, one per configuration category.

use serde::Serialize;

use super::grid::GridCell;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CssElement {
    pub name: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageElement {
    pub name: String,
    pub src: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScriptElement {
    pub name: String,
    pub src: String,
}

/// One `Page.Item` → value pair of a property bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyEntry {
    pub name: String,
    pub value: String,
}

/// Language-dependent labels and texts. The language itself is part of the
/// storage slot (`properties.<lang>`), not of the document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropertyBundle {
    pub labels: Vec<PropertyEntry>,
    pub texts: Vec<PropertyEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LoadOption {
    Direct,
    Lazy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub component: String,
    pub view_name: String,
    pub title: String,
    pub display: bool,
    pub load_option: LoadOption,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldPlacement {
    pub field_name: String,
    pub display: bool,
    pub position_from: GridCell,
    pub position_to: GridCell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoToggle {
    pub bo_name: String,
    pub enabled: bool,
}

/// `Full` keeps the backend connection open for the whole session,
/// `Less` opens one per call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConnectionState {
    Full,
    Less,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BackendBinding {
    pub be_name: String,
    pub api: String,
    pub state: ConnectionState,
    pub erp_backend: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Connection {
    pub name: String,
    pub host: String,
    /// Three-digit client number, kept as text (`"100"`).
    pub client: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BusinessRole {
    pub name: String,
    pub description: String,
    pub nav_bar_profile: String,
    pub technical_profile: String,
    pub layout_profile: String,
    pub pfcg_role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BolGrant {
    pub bol_name: String,
    #[serde(rename = "use")]
    pub allowed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BolAccessRule {
    pub role_name: String,
    /// Free text carried over from the role listing; not used for decisions.
    pub description: Option<String>,
    pub grants: Vec<BolGrant>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataObjectBinding {
    pub do_name: String,
    pub database_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DatabaseUse {
    Default,
    Request,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Database {
    pub name: String,
    pub host: String,
    #[serde(rename = "use")]
    pub usage: DatabaseUse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum SettingValue {
    Scalar(String),
    /// Unordered; document order is kept only so serialization is stable.
    Set(Vec<String>),
}

impl SettingValue {
    /// Equality that ignores the order of set members.
    pub fn same_as(&self, other: &SettingValue) -> bool {
        match (self, other) {
            (SettingValue::Scalar(a), SettingValue::Scalar(b)) => a == b,
            (SettingValue::Set(a), SettingValue::Set(b)) => {
                let mut a: Vec<&String> = a.iter().collect();
                let mut b: Vec<&String> = b.iter().collect();
                a.sort();
                a.dedup();
                b.sort();
                b.dedup();
                a == b
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyValueSetting {
    pub key: String,
    pub value: SettingValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorkflowTask {
    pub step_no: u32,
    pub activity_type: String,
    pub bo_name: String,
    pub method: String,
    /// Guard expression, stored verbatim and never evaluated.
    pub rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorkflowDef {
    pub id: String,
    pub name: String,
    pub role_binding: String,
    pub tasks: Vec<WorkflowTask>,
}
