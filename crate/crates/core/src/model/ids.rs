//! Identifiers: tenants, categories, language tags and storage slots.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

const TENANT_ID_MAX: usize = 64;
const LANG_TAG_MAX: usize = 35;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("invalid tenant id {0:?}: expected 1-64 chars of [A-Za-z0-9_-]")]
    BadTenant(String),
    #[error("invalid language tag {0:?}")]
    BadLanguage(String),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("category {0} needs a language suffix, e.g. {0}.en")]
    LanguageRequired(&'static str),
    #[error("category {0} does not take a language suffix")]
    UnexpectedLanguage(&'static str),
}

fn is_token_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

/// Tenant identifier. Case-sensitive token of `[A-Za-z0-9_-]{1,64}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TenantId(String);

impl TenantId {
    pub fn new(id: impl Into<String>) -> Result<Self, IdError> {
        let id = id.into();
        if id.is_empty() || id.len() > TENANT_ID_MAX || !id.chars().all(is_token_char) {
            return Err(IdError::BadTenant(id));
        }
        Ok(TenantId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TenantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for TenantId {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TenantId::new(s)
    }
}

impl Serialize for TenantId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// IETF-style language tag (`en`, `de-CH`). Only the charset is checked.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LangTag(String);

impl LangTag {
    pub fn new(tag: impl Into<String>) -> Result<Self, IdError> {
        let tag = tag.into();
        let ok = !tag.is_empty()
            && tag.len() <= LANG_TAG_MAX
            && tag.split('-').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()));
        if !ok {
            return Err(IdError::BadLanguage(tag));
        }
        Ok(LangTag(tag))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LangTag {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LangTag::new(s)
    }
}

impl Serialize for LangTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// The closed set of configuration categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigCategory {
    CssElements,
    Images,
    Scripts,
    Properties,
    Blocks,
    Fields,
    FrontendBOs,
    BackendBindings,
    Connections,
    BusinessRoles,
    BolAccess,
    DataObjects,
    Databases,
    KeyValues,
    Workflows,
}

impl ConfigCategory {
    pub const ALL: [ConfigCategory; 15] = [
        ConfigCategory::CssElements,
        ConfigCategory::Images,
        ConfigCategory::Scripts,
        ConfigCategory::Properties,
        ConfigCategory::Blocks,
        ConfigCategory::Fields,
        ConfigCategory::FrontendBOs,
        ConfigCategory::BackendBindings,
        ConfigCategory::Connections,
        ConfigCategory::BusinessRoles,
        ConfigCategory::BolAccess,
        ConfigCategory::DataObjects,
        ConfigCategory::Databases,
        ConfigCategory::KeyValues,
        ConfigCategory::Workflows,
    ];

    /// Slug used in file names, URLs and CLI flags.
    pub fn slug(self) -> &'static str {
        match self {
            ConfigCategory::CssElements => "css-elements",
            ConfigCategory::Images => "images",
            ConfigCategory::Scripts => "scripts",
            ConfigCategory::Properties => "properties",
            ConfigCategory::Blocks => "blocks",
            ConfigCategory::Fields => "fields",
            ConfigCategory::FrontendBOs => "frontend-bos",
            ConfigCategory::BackendBindings => "backend-bindings",
            ConfigCategory::Connections => "connections",
            ConfigCategory::BusinessRoles => "business-roles",
            ConfigCategory::BolAccess => "bol-access",
            ConfigCategory::DataObjects => "data-objects",
            ConfigCategory::Databases => "databases",
            ConfigCategory::KeyValues => "key-values",
            ConfigCategory::Workflows => "workflows",
        }
    }

    pub fn from_slug(slug: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.slug() == slug)
    }

    /// Properties documents exist once per language.
    pub fn is_per_language(self) -> bool {
        self == ConfigCategory::Properties
    }
}

impl fmt::Display for ConfigCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl Serialize for ConfigCategory {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.slug())
    }
}

/// Addressable unit of storage: a category, plus the language for Properties.
///
/// The textual form is also the file stem: `fields`, `properties.en`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    category: ConfigCategory,
    language: Option<LangTag>,
}

impl Slot {
    pub fn new(category: ConfigCategory) -> Result<Self, IdError> {
        if category.is_per_language() {
            return Err(IdError::LanguageRequired(category.slug()));
        }
        Ok(Slot { category, language: None })
    }

    pub fn properties(language: LangTag) -> Self {
        Slot { category: ConfigCategory::Properties, language: Some(language) }
    }

    pub fn category(&self) -> ConfigCategory {
        self.category
    }

    pub fn language(&self) -> Option<&LangTag> {
        self.language.as_ref()
    }

    pub fn file_name(&self) -> String {
        format!("{self}.xml")
    }
}

impl From<ConfigCategory> for Slot {
    /// Panics for [`ConfigCategory::Properties`], which needs a language.
    fn from(category: ConfigCategory) -> Self {
        Slot::new(category).expect("category needs a language; use Slot::properties")
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.language {
            Some(lang) => write!(f, "{}.{}", self.category.slug(), lang),
            None => f.write_str(self.category.slug()),
        }
    }
}

impl FromStr for Slot {
    type Err = IdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (cat, lang) = match s.split_once('.') {
            Some((c, l)) => (c, Some(l)),
            None => (s, None),
        };
        let category =
            ConfigCategory::from_slug(cat).ok_or_else(|| IdError::UnknownCategory(s.to_string()))?;
        match (category.is_per_language(), lang) {
            (true, Some(l)) => Ok(Slot::properties(LangTag::new(l)?)),
            (true, None) => Err(IdError::LanguageRequired(category.slug())),
            (false, None) => Ok(Slot { category, language: None }),
            (false, Some(_)) => Err(IdError::UnexpectedLanguage(category.slug())),
        }
    }
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
