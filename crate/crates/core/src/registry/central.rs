//! The central multi-tenant configuration file (`central.xml`).
//!
//! ```xml
//! <CENTRAL>
//!   <REVISION>7</REVISION>
//!   <TENANTS>
//!     <TENANT>
//!       <ID>T1</ID>
//!       <DATABASE>
//!         <NAME>CRMDB_T1</NAME>
//!         <HOST>hostA</HOST>
//!       </DATABASE>
//!     </TENANT>
//!   </TENANTS>
//!   <SECTIONS>
//!     <SECTION>
//!       <CATEGORY>fields</CATEGORY>
//!       <DEFAULT>defaults/fields.xml</DEFAULT>
//!       <OVERRIDES>
//!         <OVERRIDE>
//!           <TENANT>T1</TENANT>
//!           <LOCATION>tenants/T1/fields.xml</LOCATION>
//!           <VERSION>2</VERSION>
//!           <REVISION>7</REVISION>
//!         </OVERRIDE>
//!       </OVERRIDES>
//!     </SECTION>
//!   </SECTIONS>
//! </CENTRAL>
//! ```
//!
//! `VERSION` is the optimistic-concurrency counter a client sees. `REVISION`
//! is a registry-wide counter bumped on every write; it never repeats, even
//! after a tenant resets and reconfigures a category, so it is what caches key on.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::codec::xml::{self, Element, Writer};
use crate::model::{Slot, TenantId};

use super::StoreError;

pub const CENTRAL_FILE: &str = "central.xml";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DatabaseDescriptor {
    pub name: String,
    pub host: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TenantOverride {
    /// Path relative to the data root.
    pub location: String,
    pub version: u64,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegistrySection {
    pub slot: Slot,
    pub default_location: String,
    pub tenant_locations: BTreeMap<TenantId, TenantOverride>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CentralRegistry {
    pub revision: u64,
    pub tenants: BTreeMap<TenantId, Option<DatabaseDescriptor>>,
    pub sections: BTreeMap<Slot, RegistrySection>,
}

pub fn default_location(slot: &Slot) -> String {
    format!("defaults/{}", slot.file_name())
}

pub fn tenant_location(tenant: &TenantId, slot: &Slot) -> String {
    format!("tenants/{tenant}/{}", slot.file_name())
}

impl CentralRegistry {
    pub fn section(&self, slot: &Slot) -> Option<&RegistrySection> {
        self.sections.get(slot)
    }

    /// Location of the tenant's own file for `slot`, if the tenant has one.
    pub fn lookup(&self, tenant: &TenantId, slot: &Slot) -> Option<&TenantOverride> {
        self.sections.get(slot)?.tenant_locations.get(tenant)
    }

    pub fn has_tenant(&self, tenant: &TenantId) -> bool {
        self.tenants.contains_key(tenant)
    }

    pub fn tenant_database(&self, tenant: &TenantId) -> Option<&DatabaseDescriptor> {
        self.tenants.get(tenant)?.as_ref()
    }

    pub fn tenant_databases(&self) -> BTreeMap<&TenantId, &DatabaseDescriptor> {
        self.tenants.iter().filter_map(|(t, db)| db.as_ref().map(|db| (t, db))).collect()
    }

    pub fn to_xml(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.open("CENTRAL");
        w.leaf("REVISION", &self.revision.to_string());
        w.open("TENANTS");
        for (id, db) in &self.tenants {
            w.open("TENANT");
            w.leaf("ID", id.as_str());
            if let Some(db) = db {
                w.open("DATABASE");
                w.leaf("NAME", &db.name);
                w.leaf("HOST", &db.host);
                w.close("DATABASE");
            }
            w.close("TENANT");
        }
        w.close("TENANTS");
        w.open("SECTIONS");
        for section in self.sections.values() {
            w.open("SECTION");
            w.leaf("CATEGORY", &section.slot.to_string());
            w.leaf("DEFAULT", &section.default_location);
            w.open("OVERRIDES");
            for (tenant, ov) in &section.tenant_locations {
                w.open("OVERRIDE");
                w.leaf("TENANT", tenant.as_str());
                w.leaf("LOCATION", &ov.location);
                w.leaf("VERSION", &ov.version.to_string());
                w.leaf("REVISION", &ov.revision.to_string());
                w.close("OVERRIDE");
            }
            w.close("OVERRIDES");
            w.close("SECTION");
        }
        w.close("SECTIONS");
        w.close("CENTRAL");
        w.finish()
    }

    /// Parses and checks the structural invariants. File existence is checked
    /// by the loader.
    pub fn from_xml(bytes: &[u8]) -> Result<Self, StoreError> {
        let root = xml::parse_tree(bytes).map_err(|e| corrupt(format!("line {}: {}", e.pos.line, e.detail)))?;
        expect(&root, "CENTRAL")?;
        let mut reg = CentralRegistry { revision: number(one(&root, "REVISION")?)?, ..Default::default() };

        for t in &one(&root, "TENANTS")?.children {
            expect(t, "TENANT")?;
            only(t, &["ID", "DATABASE"])?;
            let id = tenant_id(one(t, "ID")?)?;
            let db = match opt(t, "DATABASE")? {
                Some(d) => {
                    only(d, &["NAME", "HOST"])?;
                    Some(DatabaseDescriptor { name: text(one(d, "NAME")?)?, host: text(one(d, "HOST")?)? })
                }
                None => None,
            };
            if reg.tenants.insert(id.clone(), db).is_some() {
                return Err(corrupt(format!("tenant {id} listed twice")));
            }
        }

        for s in &one(&root, "SECTIONS")?.children {
            expect(s, "SECTION")?;
            only(s, &["CATEGORY", "DEFAULT", "OVERRIDES"])?;
            let slot: Slot = text(one(s, "CATEGORY")?)?.parse().map_err(|e| corrupt(format!("{e}")))?;
            let default_location = match opt(s, "DEFAULT")? {
                Some(d) => text(d)?,
                None => return Err(StoreError::MissingDefault(slot)),
            };
            if default_location != self::default_location(&slot) {
                return Err(corrupt(format!("default for {slot} must live at {}", self::default_location(&slot))));
            }
            let mut tenant_locations = BTreeMap::new();
            if let Some(ovs) = opt(s, "OVERRIDES")? {
                for o in &ovs.children {
                    expect(o, "OVERRIDE")?;
                    only(o, &["TENANT", "LOCATION", "VERSION", "REVISION"])?;
                    let tenant = tenant_id(one(o, "TENANT")?)?;
                    let ov = TenantOverride {
                        location: text(one(o, "LOCATION")?)?,
                        version: number(one(o, "VERSION")?)?,
                        revision: number(one(o, "REVISION")?)?,
                    };
                    if !reg.tenants.contains_key(&tenant) {
                        return Err(corrupt(format!("override for unregistered tenant {tenant}")));
                    }
                    // Tenant files live exactly at tenants/<tenant>/<slot>.xml.
                    if ov.location != tenant_location(&tenant, &slot) {
                        return Err(corrupt(format!("{} is outside the directory of tenant {tenant}", ov.location)));
                    }
                    if ov.revision > reg.revision {
                        return Err(corrupt(format!("override revision {} is ahead of registry", ov.revision)));
                    }
                    if tenant_locations.insert(tenant.clone(), ov).is_some() {
                        return Err(corrupt(format!("tenant {tenant} overrides {slot} twice")));
                    }
                }
            }
            let section = RegistrySection { slot: slot.clone(), default_location, tenant_locations };
            if reg.sections.insert(slot.clone(), section).is_some() {
                return Err(corrupt(format!("section {slot} listed twice")));
            }
        }

        let mut owners: BTreeMap<&DatabaseDescriptor, &TenantId> = BTreeMap::new();
        for (t, db) in reg.tenant_databases() {
            if let Some(other) = owners.insert(db, t) {
                return Err(corrupt(format!("database {} assigned to both {other} and {t}", db.name)));
            }
        }
        Ok(reg)
    }
}

impl PartialOrd for DatabaseDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DatabaseDescriptor {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.name, &self.host).cmp(&(&other.name, &other.host))
    }
}

fn corrupt(msg: String) -> StoreError {
    StoreError::RegistryCorrupt(msg)
}

fn expect(el: &Element, name: &str) -> Result<(), StoreError> {
    if el.name != name {
        return Err(corrupt(format!("line {}: expected <{name}>, found <{}>", el.pos.line, el.name)));
    }
    Ok(())
}

fn only(el: &Element, allowed: &[&str]) -> Result<(), StoreError> {
    match el.children.iter().find(|c| !allowed.contains(&c.name.as_str())) {
        Some(c) => Err(corrupt(format!("line {}: unexpected <{}> in <{}>", c.pos.line, c.name, el.name))),
        None => Ok(()),
    }
}

fn opt<'a>(el: &'a Element, name: &str) -> Result<Option<&'a Element>, StoreError> {
    let mut it = el.children.iter().filter(|c| c.name == name);
    let first = it.next();
    if it.next().is_some() {
        return Err(corrupt(format!("line {}: <{name}> repeated in <{}>", el.pos.line, el.name)));
    }
    Ok(first)
}

fn one<'a>(el: &'a Element, name: &str) -> Result<&'a Element, StoreError> {
    opt(el, name)?.ok_or_else(|| corrupt(format!("line {}: <{}> lacks <{name}>", el.pos.line, el.name)))
}

fn text(el: &Element) -> Result<String, StoreError> {
    if !el.children.is_empty() {
        return Err(corrupt(format!("line {}: <{}> must hold text", el.pos.line, el.name)));
    }
    Ok(el.text.clone())
}

fn number(el: &Element) -> Result<u64, StoreError> {
    let t = text(el)?;
    t.parse().map_err(|_| corrupt(format!("line {}: <{}> is not a number: {t:?}", el.pos.line, el.name)))
}

fn tenant_id(el: &Element) -> Result<TenantId, StoreError> {
    TenantId::new(text(el)?).map_err(|e| corrupt(e.to_string()))
}
