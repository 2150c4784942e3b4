//! Effective configuration: the tenant's own document for a category if it
//! has one, the vendor default otherwise. Resolution is whole-category; a
//! tenant file replaces the default entirely.
//!
//! The functions here are pure over a [`DocSource`], which hands out the
//! effective document per slot. [`crate::tenancy`] provides the guarded,
//! cached source used by the service and the CLI.

use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{
    Block, BusinessRole, ConfigCategory, ConfigDocument, ConnectionState, DatabaseUse, FieldPlacement, LangTag,
    PropertyEntry, SettingValue, Slot, TenantId, ValidationReport,
};

pub const BRANDING_NAME_KEY: &str = "branding.name";
pub const BRANDING_LOGO_KEY: &str = "branding.logo";
pub const PLACEHOLDER_LOGO: &str = "/static/logo-placeholder.svg";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("no configuration category {0}")]
    UnknownCategory(Slot),
    #[error("unknown business role {0}")]
    UnknownRole(String),
    #[error("no property bundle for language {0}")]
    UnknownLanguage(LangTag),
    #[error("unknown backend object {0}")]
    UnknownBackendObject(String),
    #[error("backend object {be_name} references undeclared connection {connection}")]
    DanglingConnection { be_name: String, connection: String },
    #[error("no database is marked Default")]
    NoDefaultDatabase,
    #[error("{0} databases are marked Default")]
    AmbiguousDefaultDatabase(usize),
    #[error("data object {do_name} references undeclared database {database}")]
    DanglingDatabase { do_name: String, database: String },
    #[error("unknown workflow {0}")]
    UnknownWorkflow(String),
    #[error("workflow is invalid: {0}")]
    InvalidWorkflow(ValidationReport),
    #[error("storage: {0}")]
    Storage(String),
}

/// Hands out the effective document for each slot of one tenant.
pub trait DocSource {
    fn tenant(&self) -> &TenantId;
    fn document(&self, slot: &Slot) -> Result<Arc<ConfigDocument>, ResolveError>;
}

fn doc(src: &dyn DocSource, category: ConfigCategory) -> Result<Arc<ConfigDocument>, ResolveError> {
    src.document(&Slot::from(category))
}

macro_rules! entries {
    ($doc:expr, $accessor:ident) => {
        $doc.$accessor().expect("source returned a document of the wrong category")
    };
}

/// Effective document for `slot`.
pub fn resolve_category(src: &dyn DocSource, slot: &Slot) -> Result<Arc<ConfigDocument>, ResolveError> {
    src.document(slot)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CssRef {
    pub name: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrcRef {
    pub name: String,
    pub src: String,
}

/// Ordered name → value pairs, serialized as a JSON object in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderedPairs(pub Vec<PropertyEntry>);

impl OrderedPairs {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.iter().find(|e| e.name == name).map(|e| e.value.as_str())
    }
}

impl Serialize for OrderedPairs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for e in &self.0 {
            map.serialize_entry(&e.name, &e.value)?;
        }
        map.end()
    }
}

/// Everything a page needs to render for one tenant, language and role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedPageView {
    pub tenant: TenantId,
    pub page: String,
    pub language: LangTag,
    pub role: String,
    pub css: Vec<CssRef>,
    pub images: Vec<SrcRef>,
    pub scripts: Vec<SrcRef>,
    pub labels: OrderedPairs,
    pub texts: OrderedPairs,
    pub blocks: Vec<Block>,
    pub fields: Vec<FieldPlacement>,
    /// Label keys (`<page>.<field>`) of visible fields with no label.
    pub missing: Vec<String>,
}

/// Slots a page view is computed from.
pub fn page_view_inputs(language: &LangTag) -> Vec<Slot> {
    vec![
        Slot::from(ConfigCategory::CssElements),
        Slot::from(ConfigCategory::Images),
        Slot::from(ConfigCategory::Scripts),
        Slot::properties(language.clone()),
        Slot::from(ConfigCategory::Blocks),
        Slot::from(ConfigCategory::Fields),
        Slot::from(ConfigCategory::BusinessRoles),
    ]
}

fn find_role(src: &dyn DocSource, role: &str) -> Result<BusinessRole, ResolveError> {
    let roles = doc(src, ConfigCategory::BusinessRoles)?;
    entries!(roles, business_roles)
        .iter()
        .find(|r| r.name == role)
        .cloned()
        .ok_or_else(|| ResolveError::UnknownRole(role.to_string()))
}

pub fn resolve_page_view(
    src: &dyn DocSource,
    page: &str,
    language: &LangTag,
    role: &str,
) -> Result<ResolvedPageView, ResolveError> {
    find_role(src, role)?;
    let props_slot = Slot::properties(language.clone());
    let props = match src.document(&props_slot) {
        Err(ResolveError::UnknownCategory(_)) => return Err(ResolveError::UnknownLanguage(language.clone())),
        other => other?,
    };
    let bundle = entries!(props, properties);
    let prefix = format!("{page}.");
    let on_page = |entries: &[PropertyEntry]| {
        OrderedPairs(entries.iter().filter(|e| e.name.starts_with(&prefix)).cloned().collect())
    };
    let labels = on_page(&bundle.labels);
    let texts = on_page(&bundle.texts);

    let css = doc(src, ConfigCategory::CssElements)?;
    let images = doc(src, ConfigCategory::Images)?;
    let scripts = doc(src, ConfigCategory::Scripts)?;
    let blocks = doc(src, ConfigCategory::Blocks)?;
    let fields = doc(src, ConfigCategory::Fields)?;

    let fields: Vec<FieldPlacement> = entries!(fields, fields).iter().filter(|f| f.display).cloned().collect();
    let mut missing = Vec::new();
    for f in &fields {
        let key = format!("{page}.{}", f.field_name);
        if labels.get(&key).is_none() && !missing.contains(&key) {
            missing.push(key);
        }
    }

    Ok(ResolvedPageView {
        tenant: src.tenant().clone(),
        page: page.to_string(),
        language: language.clone(),
        role: role.to_string(),
        css: entries!(css, css_elements).iter().map(|c| CssRef { name: c.name.clone(), location: c.location.clone() }).collect(),
        images: entries!(images, images).iter().map(|i| SrcRef { name: i.name.clone(), src: i.src.clone() }).collect(),
        scripts: entries!(scripts, scripts).iter().map(|s| SrcRef { name: s.name.clone(), src: s.src.clone() }).collect(),
        labels,
        texts,
        blocks: entries!(blocks, blocks).iter().filter(|b| b.display).cloned().collect(),
        fields,
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum BoStatus {
    Enabled { bo_name: String },
    /// The error handed to the calling action class.
    Disabled { bo_name: String },
}

impl BoStatus {
    pub fn is_enabled(&self) -> bool {
        matches!(self, BoStatus::Enabled { .. })
    }
}

/// A business object is enabled unless a toggle says otherwise.
pub fn check_bo_enabled(src: &dyn DocSource, bo_name: &str) -> Result<BoStatus, ResolveError> {
    let bos = doc(src, ConfigCategory::FrontendBOs)?;
    let bo_name = bo_name.to_string();
    Ok(match entries!(bos, frontend_bos).iter().find(|t| t.bo_name == bo_name) {
        Some(t) if !t.enabled => BoStatus::Disabled { bo_name },
        _ => BoStatus::Enabled { bo_name },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectionTarget {
    pub name: String,
    pub host: String,
    pub client: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BackendCallPlan {
    pub be_name: String,
    pub api: String,
    pub state: ConnectionState,
    pub connection: ConnectionTarget,
    /// `true` for stateful bindings: keep the connection open for the session.
    pub reuse_connection: bool,
}

pub fn resolve_backend_call(src: &dyn DocSource, be_name: &str) -> Result<BackendCallPlan, ResolveError> {
    let bes = doc(src, ConfigCategory::BackendBindings)?;
    let binding = entries!(bes, backend_bindings)
        .iter()
        .find(|b| b.be_name == be_name)
        .ok_or_else(|| ResolveError::UnknownBackendObject(be_name.to_string()))?;
    let conns = doc(src, ConfigCategory::Connections)?;
    let conn = entries!(conns, connections).iter().find(|c| c.name == binding.erp_backend).ok_or_else(|| {
        ResolveError::DanglingConnection { be_name: be_name.to_string(), connection: binding.erp_backend.clone() }
    })?;
    Ok(BackendCallPlan {
        be_name: binding.be_name.clone(),
        api: binding.api.clone(),
        state: binding.state,
        connection: ConnectionTarget { name: conn.name.clone(), host: conn.host.clone(), client: conn.client.clone() },
        reuse_connection: binding.state == ConnectionState::Full,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleProfiles {
    pub role: String,
    pub nav_bar: String,
    pub technical: String,
    pub layout: String,
    pub pfcg: String,
}

pub fn resolve_role_profiles(src: &dyn DocSource, role: &str) -> Result<RoleProfiles, ResolveError> {
    let r = find_role(src, role)?;
    Ok(RoleProfiles {
        role: r.name,
        nav_bar: r.nav_bar_profile,
        technical: r.technical_profile,
        layout: r.layout_profile,
        pfcg: r.pfcg_role,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BolDecision {
    Allowed,
    Forbidden,
}

/// Allowed only by an explicit `USE=True` grant for the role; anything else,
/// including a BOL the role's rule does not mention, is forbidden.
pub fn check_bol_access(src: &dyn DocSource, role: &str, bol: &str) -> Result<BolDecision, ResolveError> {
    find_role(src, role)?;
    let rules = doc(src, ConfigCategory::BolAccess)?;
    let granted = entries!(rules, bol_access)
        .iter()
        .find(|r| r.role_name == role)
        .and_then(|r| r.grants.iter().find(|g| g.bol_name == bol))
        .is_some_and(|g| g.allowed);
    Ok(if granted { BolDecision::Allowed } else { BolDecision::Forbidden })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteSource {
    /// A data object binding names the database.
    Binding,
    /// No binding; the Default database applies.
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatabaseRoute {
    pub do_name: String,
    pub database: String,
    pub host: String,
    #[serde(rename = "use")]
    pub usage: DatabaseUse,
    pub via: RouteSource,
}

pub fn resolve_database(src: &dyn DocSource, do_name: &str) -> Result<DatabaseRoute, ResolveError> {
    let dbs = doc(src, ConfigCategory::Databases)?;
    let dbs = entries!(dbs, databases);
    let defaults: Vec<_> = dbs.iter().filter(|d| d.usage == DatabaseUse::Default).collect();
    let default = match defaults.as_slice() {
        [] => return Err(ResolveError::NoDefaultDatabase),
        [d] => *d,
        more => return Err(ResolveError::AmbiguousDefaultDatabase(more.len())),
    };
    let dos = doc(src, ConfigCategory::DataObjects)?;
    let (db, via) = match entries!(dos, data_objects).iter().find(|b| b.do_name == do_name) {
        Some(b) => {
            let db = dbs.iter().find(|d| d.name == b.database_name).ok_or_else(|| ResolveError::DanglingDatabase {
                do_name: do_name.to_string(),
                database: b.database_name.clone(),
            })?;
            (db, RouteSource::Binding)
        }
        None => (default, RouteSource::Default),
    };
    Ok(DatabaseRoute { do_name: do_name.to_string(), database: db.name.clone(), host: db.host.clone(), usage: db.usage, via })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SettingLookup {
    pub key: String,
    /// `null` when the key is not configured.
    pub value: Option<SettingValue>,
}

pub fn get_setting(src: &dyn DocSource, key: &str) -> Result<SettingLookup, ResolveError> {
    let kvs = doc(src, ConfigCategory::KeyValues)?;
    let value = entries!(kvs, key_values).iter().find(|kv| kv.key == key).map(|kv| kv.value.clone());
    Ok(SettingLookup { key: key.to_string(), value })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branding {
    pub name: String,
    pub logo: String,
}

/// Display name and logo from the `branding.*` settings; a set-valued entry
/// counts as absent.
pub fn tenant_branding(src: &dyn DocSource) -> Result<Branding, ResolveError> {
    let scalar = |key: &str| -> Result<Option<String>, ResolveError> {
        Ok(match get_setting(src, key)?.value {
            Some(SettingValue::Scalar(v)) => Some(v),
            _ => None,
        })
    };
    Ok(Branding {
        name: scalar(BRANDING_NAME_KEY)?.unwrap_or_default(),
        logo: scalar(BRANDING_LOGO_KEY)?.unwrap_or_else(|| PLACEHOLDER_LOGO.to_string()),
    })
}
