//! Static bearer tokens, `tokens.xml`:
//!
//! ```xml
//! <TOKENS>
//!   <TOKEN>
//!     <VALUE>s3cret</VALUE>
//!     <KIND>Tenant</KIND>
//!     <TENANT>T1</TENANT>
//!   </TOKEN>
//! </TOKENS>
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::codec::xml::{self, Writer};
use crate::model::TenantId;

use super::{Principal, PrincipalKind};

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("cannot read tokens file: {0}")]
    Io(#[from] std::io::Error),
    #[error("tokens file, line {line}: {detail}")]
    Invalid { line: u32, detail: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenTable {
    tokens: BTreeMap<String, PrincipalKind>,
}

impl TokenTable {
    pub fn load(path: &Path) -> Result<Self, TokenError> {
        Self::from_xml(&std::fs::read(path)?)
    }

    pub fn from_xml(bytes: &[u8]) -> Result<Self, TokenError> {
        let invalid = |line: u32, detail: String| TokenError::Invalid { line, detail };
        let root = xml::parse_tree(bytes).map_err(|e| invalid(e.pos.line, e.detail))?;
        if root.name != "TOKENS" {
            return Err(invalid(root.pos.line, format!("expected <TOKENS>, found <{}>", root.name)));
        }
        let mut table = TokenTable::default();
        for tok in &root.children {
            let line = tok.pos.line;
            if tok.name != "TOKEN" {
                return Err(invalid(line, format!("unexpected <{}>", tok.name)));
            }
            let mut fields = BTreeMap::new();
            for c in &tok.children {
                if !["VALUE", "KIND", "TENANT"].contains(&c.name.as_str()) || !c.children.is_empty() {
                    return Err(invalid(c.pos.line, format!("unexpected <{}>", c.name)));
                }
                if fields.insert(c.name.as_str(), c.text.as_str()).is_some() {
                    return Err(invalid(c.pos.line, format!("<{}> repeated", c.name)));
                }
            }
            let value = fields.get("VALUE").filter(|v| !v.is_empty()).ok_or_else(|| invalid(line, "token without VALUE".into()))?;
            let kind = match (fields.get("KIND").copied(), fields.get("TENANT")) {
                (Some("Provider"), None) => PrincipalKind::Provider,
                (Some("Tenant"), Some(t)) => PrincipalKind::Tenant(TenantId::new(*t).map_err(|e| invalid(line, e.to_string()))?),
                (Some("Tenant"), None) => return Err(invalid(line, "tenant token without TENANT".into())),
                (Some("Provider"), Some(_)) => return Err(invalid(line, "provider token must not name a tenant".into())),
                (other, _) => return Err(invalid(line, format!("KIND must be Provider or Tenant, got {other:?}"))),
            };
            if table.tokens.insert(value.to_string(), kind).is_some() {
                return Err(invalid(line, "token value used twice".into()));
            }
        }
        Ok(table)
    }

    pub fn to_xml(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.open("TOKENS");
        for (value, kind) in &self.tokens {
            w.open("TOKEN");
            w.leaf("VALUE", value);
            match kind {
                PrincipalKind::Provider => w.leaf("KIND", "Provider"),
                PrincipalKind::Tenant(t) => {
                    w.leaf("KIND", "Tenant");
                    w.leaf("TENANT", t.as_str());
                }
            }
            w.close("TOKEN");
        }
        w.close("TOKENS");
        w.finish()
    }

    pub fn insert(&mut self, token: impl Into<String>, kind: PrincipalKind) {
        self.tokens.insert(token.into(), kind);
    }

    pub fn authenticate(&self, token: &str) -> Option<Principal> {
        self.tokens.get(token).map(|kind| Principal { kind: kind.clone(), token: token.to_string() })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}
