use super::entries::*;
use super::ids::ConfigCategory;

/// Typed body of a configuration document. The variant fixes the category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigBody {
    CssElements(Vec<CssElement>),
    Images(Vec<ImageElement>),
    Scripts(Vec<ScriptElement>),
    Properties(PropertyBundle),
    Blocks(Vec<Block>),
    Fields(Vec<FieldPlacement>),
    FrontendBOs(Vec<BoToggle>),
    BackendBindings(Vec<BackendBinding>),
    Connections(Vec<Connection>),
    BusinessRoles(Vec<BusinessRole>),
    BolAccess(Vec<BolAccessRule>),
    DataObjects(Vec<DataObjectBinding>),
    Databases(Vec<Database>),
    KeyValues(Vec<KeyValueSetting>),
    Workflows(Vec<WorkflowDef>),
}

impl ConfigBody {
    pub fn category(&self) -> ConfigCategory {
        match self {
            ConfigBody::CssElements(_) => ConfigCategory::CssElements,
            ConfigBody::Images(_) => ConfigCategory::Images,
            ConfigBody::Scripts(_) => ConfigCategory::Scripts,
            ConfigBody::Properties(_) => ConfigCategory::Properties,
            ConfigBody::Blocks(_) => ConfigCategory::Blocks,
            ConfigBody::Fields(_) => ConfigCategory::Fields,
            ConfigBody::FrontendBOs(_) => ConfigCategory::FrontendBOs,
            ConfigBody::BackendBindings(_) => ConfigCategory::BackendBindings,
            ConfigBody::Connections(_) => ConfigCategory::Connections,
            ConfigBody::BusinessRoles(_) => ConfigCategory::BusinessRoles,
            ConfigBody::BolAccess(_) => ConfigCategory::BolAccess,
            ConfigBody::DataObjects(_) => ConfigCategory::DataObjects,
            ConfigBody::Databases(_) => ConfigCategory::Databases,
            ConfigBody::KeyValues(_) => ConfigCategory::KeyValues,
            ConfigBody::Workflows(_) => ConfigCategory::Workflows,
        }
    }

    pub fn empty(category: ConfigCategory) -> Self {
        match category {
            ConfigCategory::CssElements => ConfigBody::CssElements(vec![]),
            ConfigCategory::Images => ConfigBody::Images(vec![]),
            ConfigCategory::Scripts => ConfigBody::Scripts(vec![]),
            ConfigCategory::Properties => ConfigBody::Properties(PropertyBundle::default()),
            ConfigCategory::Blocks => ConfigBody::Blocks(vec![]),
            ConfigCategory::Fields => ConfigBody::Fields(vec![]),
            ConfigCategory::FrontendBOs => ConfigBody::FrontendBOs(vec![]),
            ConfigCategory::BackendBindings => ConfigBody::BackendBindings(vec![]),
            ConfigCategory::Connections => ConfigBody::Connections(vec![]),
            ConfigCategory::BusinessRoles => ConfigBody::BusinessRoles(vec![]),
            ConfigCategory::BolAccess => ConfigBody::BolAccess(vec![]),
            ConfigCategory::DataObjects => ConfigBody::DataObjects(vec![]),
            ConfigCategory::Databases => ConfigBody::Databases(vec![]),
            ConfigCategory::KeyValues => ConfigBody::KeyValues(vec![]),
            ConfigCategory::Workflows => ConfigBody::Workflows(vec![]),
        }
    }

    /// Number of top-level entries (labels and texts both count for Properties).
    pub fn len(&self) -> usize {
        match self {
            ConfigBody::CssElements(v) => v.len(),
            ConfigBody::Images(v) => v.len(),
            ConfigBody::Scripts(v) => v.len(),
            ConfigBody::Properties(p) => p.labels.len() + p.texts.len(),
            ConfigBody::Blocks(v) => v.len(),
            ConfigBody::Fields(v) => v.len(),
            ConfigBody::FrontendBOs(v) => v.len(),
            ConfigBody::BackendBindings(v) => v.len(),
            ConfigBody::Connections(v) => v.len(),
            ConfigBody::BusinessRoles(v) => v.len(),
            ConfigBody::BolAccess(v) => v.len(),
            ConfigBody::DataObjects(v) => v.len(),
            ConfigBody::Databases(v) => v.len(),
            ConfigBody::KeyValues(v) => v.len(),
            ConfigBody::Workflows(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A configuration document: the unit of storage, copy-on-write and caching.
///
/// `version` is the optimistic-concurrency counter kept by the registry; it is
/// not part of the XML wire form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigDocument {
    pub body: ConfigBody,
    pub version: u64,
}

impl ConfigDocument {
    pub fn new(body: ConfigBody) -> Self {
        ConfigDocument { body, version: 0 }
    }

    pub fn empty(category: ConfigCategory) -> Self {
        ConfigDocument::new(ConfigBody::empty(category))
    }

    pub fn category(&self) -> ConfigCategory {
        self.body.category()
    }

    pub fn with_version(mut self, version: u64) -> Self {
        self.version = version;
        self
    }
}

macro_rules! body_accessors {
    ($($fn_name:ident => $variant:ident : $ty:ty),* $(,)?) => {
        impl ConfigDocument {
            $(
                pub fn $fn_name(&self) -> Option<&$ty> {
                    match &self.body {
                        ConfigBody::$variant(v) => Some(v),
                        _ => None,
                    }
                }
            )*
        }
    };
}

body_accessors! {
    css_elements => CssElements: Vec<CssElement>,
    images => Images: Vec<ImageElement>,
    scripts => Scripts: Vec<ScriptElement>,
    properties => Properties: PropertyBundle,
    blocks => Blocks: Vec<Block>,
    fields => Fields: Vec<FieldPlacement>,
    frontend_bos => FrontendBOs: Vec<BoToggle>,
    backend_bindings => BackendBindings: Vec<BackendBinding>,
    connections => Connections: Vec<Connection>,
    business_roles => BusinessRoles: Vec<BusinessRole>,
    bol_access => BolAccess: Vec<BolAccessRule>,
    data_objects => DataObjects: Vec<DataObjectBinding>,
    databases => Databases: Vec<Database>,
    key_values => KeyValues: Vec<KeyValueSetting>,
    workflows => Workflows: Vec<WorkflowDef>,
}
