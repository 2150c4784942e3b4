//! Shared test support: seeded document generators, scratch data roots and a
//! naive resolver that reads the files directly.
#![allow(dead_code)]

pub mod checks;
pub mod oracle;
pub mod world;

use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tenantconf_core::model::*;
use tenantconf_core::registry::{Store, StoreOptions};

pub const ROLES: &[&str] = &["SP_ROLE", "R1", "R2"];
pub const BOLS: &[&str] = &["SALES_BOL", "FINANCE_BOL", "HR_BOL", "UNASSIGNED"];
pub const BOS: &[&str] = &["BO1", "BO2", "BO3", "BOn"];
pub const BES: &[&str] = &["BE1", "BE2", "BEJ"];
pub const CONNECTIONS: &[&str] = &["CRM7", "C2", "C3"];
pub const DATABASES: &[&str] = &["CRMDB", "CRMBI", "DB3"];
pub const DATA_OBJECTS: &[&str] = &["DOMINING", "DO2", "DO3"];
pub const PAGES: &[&str] = &["Page1", "Page2"];
pub const FIELDS: &[&str] = &["Field1", "Field2", "Field3", "Fieldn"];
pub const KEYS: &[&str] = &["branding.name", "branding.logo", "bol.of.BO1", "bol.of.BO2", "bol.of.BO3", "k1"];
pub const WORKFLOWS: &[&str] = &["WF1", "WF2"];
pub const LANGUAGES: &[&str] = &["en", "de"];

pub const FAST: StoreOptions = StoreOptions { fsync: false };

/// Seeded generator of structurally valid documents.
///
/// In `wild` mode strings are arbitrary (quotes, markup characters, edge
/// whitespace, non-ASCII) for codec testing. Otherwise names come from small
/// pools so documents reference each other, for resolver testing.
pub struct Gen {
    pub rng: StdRng,
    pub wild: bool,
    pub max_entries: usize,
}

const WILD_CHARS: &[char] = &[
    'a', 'b', 'Z', '0', '9', ' ', ' ', '"', '\'', '&', '<', '>', '\t', '\n', '\r', '.', '/', ';', '#', 'é', 'ß', '✓', '中',
];

impl Gen {
    pub fn new(seed: u64, wild: bool) -> Self {
        Gen { rng: StdRng::seed_from_u64(seed), wild, max_entries: if wild { 8 } else { 6 } }
    }

    pub fn text(&mut self) -> String {
        if self.wild {
            let n = self.rng.random_range(0..12);
            (0..n).map(|_| WILD_CHARS[self.rng.random_range(0..WILD_CHARS.len())]).collect()
        } else {
            format!("v{}", self.rng.random_range(0..100))
        }
    }

    pub fn pick(&mut self, pool: &[&str]) -> String {
        if self.wild {
            self.text()
        } else {
            pool[self.rng.random_range(0..pool.len())].to_string()
        }
    }

    pub fn flag(&mut self) -> bool {
        self.rng.random_bool(0.6)
    }

    fn count(&mut self) -> usize {
        self.rng.random_range(0..=self.max_entries)
    }

    fn many<T>(&mut self, mut f: impl FnMut(&mut Self) -> T) -> Vec<T> {
        let n = self.count();
        (0..n).map(|_| f(self)).collect()
    }

    fn cell(&mut self, row: u32) -> GridCell {
        GridCell::new(self.rng.random_range(1..=702), row).unwrap()
    }

    fn span(&mut self) -> (GridCell, GridCell) {
        if self.wild {
            let (r1, r2) = (self.rng.random_range(1..5000), self.rng.random_range(1..5000));
            (self.cell(r1), self.cell(r2))
        } else {
            let row = self.rng.random_range(1..6);
            let a = self.rng.random_range(1..12);
            let b = a + self.rng.random_range(0..4);
            (GridCell::new(a, row).unwrap(), GridCell::new(b, row).unwrap())
        }
    }

    fn property(&mut self) -> PropertyEntry {
        let name = if self.wild {
            self.text()
        } else {
            let page = self.pick(PAGES);
            let item = if self.rng.random_bool(0.6) { self.pick(FIELDS) } else { format!("Text{}", self.rng.random_range(0..3)) };
            format!("{page}.{item}")
        };
        PropertyEntry { name, value: self.text() }
    }

    pub fn body(&mut self, category: ConfigCategory) -> ConfigBody {
        match category {
            ConfigCategory::CssElements => {
                ConfigBody::CssElements(self.many(|g| CssElement { name: g.pick(&["B2C", "B2B", "C3"]), location: g.text() }))
            }
            ConfigCategory::Images => ConfigBody::Images(self.many(|g| ImageElement { name: g.pick(&["MyImage", "Logo"]), src: g.text() })),
            ConfigCategory::Scripts => {
                ConfigBody::Scripts(self.many(|g| ScriptElement { name: g.pick(&["MyScript", "Extra"]), src: g.text() }))
            }
            ConfigCategory::Properties => {
                let labels = self.many(|g| g.property());
                let texts = self.many(|g| g.property());
                ConfigBody::Properties(PropertyBundle { labels, texts })
            }
            ConfigCategory::Blocks => ConfigBody::Blocks(self.many(|g| Block {
                component: g.pick(&["Component 1", "Component 2", "Component n"]),
                view_name: g.pick(&["ViewI", "ViewJ"]),
                title: g.text(),
                display: g.flag(),
                load_option: if g.rng.random_bool(0.5) { LoadOption::Direct } else { LoadOption::Lazy },
            })),
            ConfigCategory::Fields => ConfigBody::Fields(self.many(|g| {
                let (from, to) = g.span();
                FieldPlacement { field_name: g.pick(FIELDS), display: g.flag(), position_from: from, position_to: to }
            })),
            ConfigCategory::FrontendBOs => ConfigBody::FrontendBOs(self.many(|g| BoToggle { bo_name: g.pick(BOS), enabled: g.flag() })),
            ConfigCategory::BackendBindings => ConfigBody::BackendBindings(self.many(|g| BackendBinding {
                be_name: g.pick(BES),
                api: g.text(),
                state: if g.rng.random_bool(0.5) { ConnectionState::Full } else { ConnectionState::Less },
                erp_backend: g.pick(CONNECTIONS),
            })),
            ConfigCategory::Connections => ConfigBody::Connections(self.many(|g| Connection {
                name: g.pick(CONNECTIONS),
                host: g.text(),
                client: format!("{:03}", g.rng.random_range(0..1000)),
            })),
            ConfigCategory::BusinessRoles => ConfigBody::BusinessRoles(self.many(|g| BusinessRole {
                name: g.pick(ROLES),
                description: g.text(),
                nav_bar_profile: g.text(),
                technical_profile: g.text(),
                layout_profile: g.text(),
                pfcg_role: g.text(),
            })),
            ConfigCategory::BolAccess => ConfigBody::BolAccess(self.many(|g| BolAccessRule {
                role_name: g.pick(ROLES),
                description: if g.rng.random_bool(0.5) { Some(g.text()) } else { None },
                grants: g.many(|g| BolGrant { bol_name: g.pick(BOLS), allowed: g.flag() }),
            })),
            ConfigCategory::DataObjects => ConfigBody::DataObjects(
                self.many(|g| DataObjectBinding { do_name: g.pick(DATA_OBJECTS), database_name: g.pick(DATABASES) }),
            ),
            ConfigCategory::Databases => ConfigBody::Databases(self.many(|g| Database {
                name: g.pick(DATABASES),
                host: g.text(),
                usage: if g.rng.random_bool(0.4) { DatabaseUse::Default } else { DatabaseUse::Request },
            })),
            ConfigCategory::KeyValues => ConfigBody::KeyValues(self.many(|g| {
                let key = g.pick(KEYS);
                let value = if g.rng.random_bool(0.3) {
                    SettingValue::Set(g.many(|g| g.text()))
                } else if !g.wild && key.starts_with("bol.of.") {
                    SettingValue::Scalar(g.pick(BOLS))
                } else {
                    SettingValue::Scalar(g.text())
                };
                KeyValueSetting { key, value }
            })),
            ConfigCategory::Workflows => ConfigBody::Workflows(self.many(|g| {
                let mut step = 1;
                let tasks = g.many(|g| {
                    let step_no = if g.wild { g.rng.random_range(1..=u32::MAX) } else { step };
                    step += g.rng.random_range(0..3);
                    WorkflowTask {
                        step_no,
                        activity_type: g.text(),
                        bo_name: if g.rng.random_bool(0.1) { String::new() } else { g.pick(BOS) },
                        method: g.pick(&["create", "approve"]),
                        rule: if g.rng.random_bool(0.3) { Some(g.text()) } else { None },
                    }
                });
                WorkflowDef { id: g.pick(WORKFLOWS), name: g.text(), role_binding: g.pick(ROLES), tasks }
            })),
        }
    }

    pub fn doc(&mut self, category: ConfigCategory) -> ConfigDocument {
        ConfigDocument::new(self.body(category))
    }

    /// One random document per slot, properties in every test language.
    pub fn world_defaults(&mut self) -> Vec<(Slot, ConfigDocument)> {
        all_slots().into_iter().map(|s| { let d = self.doc(s.category()); (s, d) }).collect()
    }
}

pub fn all_slots() -> Vec<Slot> {
    ConfigCategory::ALL
        .into_iter()
        .flat_map(|c| {
            if c.is_per_language() {
                LANGUAGES.iter().map(|l| Slot::properties(LangTag::new(*l).unwrap())).collect()
            } else {
                vec![Slot::from(c)]
            }
        })
        .collect()
}

pub fn tenant(id: &str) -> TenantId {
    TenantId::new(id).unwrap()
}

pub fn bootstrap(root: &Path, defaults: &[(Slot, ConfigDocument)]) -> Store {
    Store::bootstrap(root, defaults, FAST).unwrap()
}
