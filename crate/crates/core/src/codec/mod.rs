//! Canonical XML codec for configuration documents.
//!
//! Grammar, one root per category (entry fields in canonical order):
//!
//! | category          | root / entry                | entry fields                                   |
//! |-------------------|-----------------------------|------------------------------------------------|
//! | css-elements      | `CSSELEMENTS/CSSELEMENT`    | NAME, LOCATION                                 |
//! | images            | `IMAGEELEMENTS/IMAGEELEMENT`| NAME, SRC                                      |
//! | scripts           | `SCRIPTELEMENTS/SCRIPTELEMENT` | NAME, SRC                                   |
//! | properties        | `PROPERTIES` with `LABELS/LABELELEMENT` and `TEXTS/TEXTELEMENT` | NAME, VALUE |
//! | blocks            | `BLOCKS/BLOCK`              | COMPONENT, VIEWNAME, TITLE, DISPLAY, LOADOPTION |
//! | fields            | `FIELDS/FIELD`              | FIELDNAME, DISPLAY, POSITIONFROM, POSITIONTO   |
//! | frontend-bos      | `BOS/BO`                    | BONAME, ENABLE                                 |
//! | backend-bindings  | `BES/BE`                    | BENAME, API, STATE, ERPBACKEND                 |
//! | connections       | `CONNECTIONS/CONNECTION`    | NAME, HOST, CLIENT                             |
//! | business-roles    | `BUSINESSROLES/BUSINESSROLE`| NAME, DESCRIPTION, NAVBAR, TECPROFILE, LAYPROFILE, PFCG |
//! | bol-access        | `BUSINESSROLES/BUSINESSROLE`| NAME, DESCRIPTION?, BOLS/BOL{NAME, USE}        |
//! | data-objects      | `DOS/DO`                    | NAME, DATABASENAME                             |
//! | databases         | `DATABASES/DATABASE`        | NAME, HOST, USE                                |
//! | key-values        | `KEYVALUES/KV`              | KEY, then VALUE or SET/ITEM*                   |
//! | workflows         | `WORKFLOWS/WORKFLOW`        | ID, NAME, ROLE, TASKS/TASK{STEP, ACTIVITY, BO, METHOD, RULE?} |
//!
//! Booleans are written `True`/`False` (lowercase is also read). Values are
//! trimmed and one surrounding pair of double quotes is dropped on read; the
//! writer never emits quotes and escapes anything that would not survive.
//! Output is UTF-8 with two-space indentation and a trailing newline.

pub(crate) mod xml;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::*;
use xml::{Element, Pos, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ParseCode {
    MalformedXml,
    UnknownTag,
    MissingTag,
    BadEnum,
    BadNumber,
}

impl ParseCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseCode::MalformedXml => "MALFORMED_XML",
            ParseCode::UnknownTag => "UNKNOWN_TAG",
            ParseCode::MissingTag => "MISSING_TAG",
            ParseCode::BadEnum => "BAD_ENUM",
            ParseCode::BadNumber => "BAD_NUMBER",
        }
    }
}

impl fmt::Display for ParseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{category} document, line {line} column {column}: {code}: {detail}")]
pub struct ParseError {
    pub category: ConfigCategory,
    pub line: u32,
    pub column: u32,
    pub code: ParseCode,
    pub detail: String,
}

struct Ctx {
    category: ConfigCategory,
}

impl Ctx {
    fn err(&self, pos: Pos, code: ParseCode, detail: impl Into<String>) -> ParseError {
        ParseError { category: self.category, line: pos.line, column: pos.column, code, detail: detail.into() }
    }

    fn expect_name(&self, el: &Element, name: &str) -> Result<(), ParseError> {
        if el.name != name {
            return Err(self.err(el.pos, ParseCode::UnknownTag, format!("expected <{name}>, found <{}>", el.name)));
        }
        Ok(())
    }

    /// Children of a list container; every child must be `entry`.
    fn entries<'a>(&self, list: &'a Element, entry: &str) -> Result<&'a [Element], ParseError> {
        if let Some(bad) = list.children.iter().find(|c| c.name != entry) {
            return Err(self.err(bad.pos, ParseCode::UnknownTag, format!("<{}> inside <{}>; expected <{entry}>", bad.name, list.name)));
        }
        if list.children.is_empty() && !list.text.is_empty() {
            return Err(self.err(list.pos, ParseCode::MalformedXml, format!("text inside <{}>", list.name)));
        }
        Ok(&list.children)
    }

    /// Index the children of an entry by tag, rejecting unknown and repeated tags.
    fn record<'a>(&self, entry: &'a Element, allowed: &[&str]) -> Result<Record<'a>, ParseError> {
        if entry.children.is_empty() && !entry.text.is_empty() {
            return Err(self.err(entry.pos, ParseCode::MalformedXml, format!("text inside <{}>", entry.name)));
        }
        let mut fields = BTreeMap::new();
        for c in &entry.children {
            if !allowed.contains(&c.name.as_str()) {
                return Err(self.err(c.pos, ParseCode::UnknownTag, format!("<{}> is not allowed in <{}>", c.name, entry.name)));
            }
            if fields.insert(c.name.as_str(), c).is_some() {
                return Err(self.err(c.pos, ParseCode::MalformedXml, format!("<{}> repeated in <{}>", c.name, entry.name)));
            }
        }
        Ok(Record { entry, fields })
    }
}

struct Record<'a> {
    entry: &'a Element,
    fields: BTreeMap<&'a str, &'a Element>,
}

impl<'a> Record<'a> {
    fn element(&self, cx: &Ctx, tag: &str) -> Result<&'a Element, ParseError> {
        self.fields
            .get(tag)
            .copied()
            .ok_or_else(|| cx.err(self.entry.pos, ParseCode::MissingTag, format!("<{}> lacks <{tag}>", self.entry.name)))
    }

    fn opt_text(&self, cx: &Ctx, tag: &str) -> Result<Option<String>, ParseError> {
        match self.fields.get(tag) {
            Some(el) => leaf(cx, el).map(Some),
            None => Ok(None),
        }
    }

    fn text(&self, cx: &Ctx, tag: &str) -> Result<String, ParseError> {
        leaf(cx, self.element(cx, tag)?)
    }

    fn boolean(&self, cx: &Ctx, tag: &str) -> Result<bool, ParseError> {
        let el = self.element(cx, tag)?;
        match leaf(cx, el)?.as_str() {
            "True" | "true" => Ok(true),
            "False" | "false" => Ok(false),
            other => Err(cx.err(el.pos, ParseCode::BadEnum, format!("<{tag}> must be True or False, got {other:?}"))),
        }
    }

    fn choice<T: Copy>(&self, cx: &Ctx, tag: &str, options: &[(&str, T)]) -> Result<T, ParseError> {
        let el = self.element(cx, tag)?;
        let v = leaf(cx, el)?;
        options.iter().find(|(s, _)| *s == v).map(|(_, t)| *t).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(s, _)| *s).collect();
            cx.err(el.pos, ParseCode::BadEnum, format!("<{tag}> must be one of {names:?}, got {v:?}"))
        })
    }

    fn cell(&self, cx: &Ctx, tag: &str) -> Result<GridCell, ParseError> {
        let el = self.element(cx, tag)?;
        let v = leaf(cx, el)?;
        v.parse().map_err(|e: CoordinateError| cx.err(el.pos, ParseCode::BadNumber, e.to_string()))
    }
}

fn leaf(cx: &Ctx, el: &Element) -> Result<String, ParseError> {
    if let Some(c) = el.children.first() {
        return Err(cx.err(c.pos, ParseCode::UnknownTag, format!("<{}> is not allowed in <{}>", c.name, el.name)));
    }
    Ok(el.text.clone())
}

fn root_tag(category: ConfigCategory) -> &'static str {
    match category {
        ConfigCategory::CssElements => "CSSELEMENTS",
        ConfigCategory::Images => "IMAGEELEMENTS",
        ConfigCategory::Scripts => "SCRIPTELEMENTS",
        ConfigCategory::Properties => "PROPERTIES",
        ConfigCategory::Blocks => "BLOCKS",
        ConfigCategory::Fields => "FIELDS",
        ConfigCategory::FrontendBOs => "BOS",
        ConfigCategory::BackendBindings => "BES",
        ConfigCategory::Connections => "CONNECTIONS",
        ConfigCategory::BusinessRoles | ConfigCategory::BolAccess => "BUSINESSROLES",
        ConfigCategory::DataObjects => "DOS",
        ConfigCategory::Databases => "DATABASES",
        ConfigCategory::KeyValues => "KEYVALUES",
        ConfigCategory::Workflows => "WORKFLOWS",
    }
}

/// Entry tag of each category's list, and the tags an entry must carry.
/// Used by mutation tests and the CLI diff.
pub fn entry_tag(category: ConfigCategory) -> &'static str {
    match category {
        ConfigCategory::CssElements => "CSSELEMENT",
        ConfigCategory::Images => "IMAGEELEMENT",
        ConfigCategory::Scripts => "SCRIPTELEMENT",
        ConfigCategory::Properties => "LABELELEMENT",
        ConfigCategory::Blocks => "BLOCK",
        ConfigCategory::Fields => "FIELD",
        ConfigCategory::FrontendBOs => "BO",
        ConfigCategory::BackendBindings => "BE",
        ConfigCategory::Connections => "CONNECTION",
        ConfigCategory::BusinessRoles | ConfigCategory::BolAccess => "BUSINESSROLE",
        ConfigCategory::DataObjects => "DO",
        ConfigCategory::Databases => "DATABASE",
        ConfigCategory::KeyValues => "KV",
        ConfigCategory::Workflows => "WORKFLOW",
    }
}

/// Element layout of one category, for clients that build forms from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CategorySchema {
    pub root: &'static str,
    /// Entry element paths below the root, e.g. `LABELS/LABELELEMENT`.
    pub entries: &'static [&'static str],
    /// Leaf paths inside an entry; `?` marks optional, `*` repeated.
    pub fields: &'static [&'static str],
}

pub fn schema(category: ConfigCategory) -> CategorySchema {
    let (entries, fields): (&'static [&'static str], &'static [&'static str]) = match category {
        ConfigCategory::CssElements => (&["CSSELEMENT"], &["NAME", "LOCATION"]),
        ConfigCategory::Images => (&["IMAGEELEMENT"], &["NAME", "SRC"]),
        ConfigCategory::Scripts => (&["SCRIPTELEMENT"], &["NAME", "SRC"]),
        ConfigCategory::Properties => (&["LABELS/LABELELEMENT", "TEXTS/TEXTELEMENT"], &["NAME", "VALUE"]),
        ConfigCategory::Blocks => (&["BLOCK"], &["COMPONENT", "VIEWNAME", "TITLE", "DISPLAY", "LOADOPTION"]),
        ConfigCategory::Fields => (&["FIELD"], &["FIELDNAME", "DISPLAY", "POSITIONFROM", "POSITIONTO"]),
        ConfigCategory::FrontendBOs => (&["BO"], &["BONAME", "ENABLE"]),
        ConfigCategory::BackendBindings => (&["BE"], &["BENAME", "API", "STATE", "ERPBACKEND"]),
        ConfigCategory::Connections => (&["CONNECTION"], &["NAME", "HOST", "CLIENT"]),
        ConfigCategory::BusinessRoles => {
            (&["BUSINESSROLE"], &["NAME", "DESCRIPTION", "NAVBAR", "TECPROFILE", "LAYPROFILE", "PFCG"])
        }
        ConfigCategory::BolAccess => (&["BUSINESSROLE"], &["NAME", "DESCRIPTION?", "BOLS/BOL*/NAME", "BOLS/BOL*/USE"]),
        ConfigCategory::DataObjects => (&["DO"], &["NAME", "DATABASENAME"]),
        ConfigCategory::Databases => (&["DATABASE"], &["NAME", "HOST", "USE"]),
        ConfigCategory::KeyValues => (&["KV"], &["KEY", "VALUE?", "SET?/ITEM*"]),
        ConfigCategory::Workflows => (
            &["WORKFLOW"],
            &["ID", "NAME", "ROLE", "TASKS/TASK*/STEP", "TASKS/TASK*/ACTIVITY", "TASKS/TASK*/BO", "TASKS/TASK*/METHOD", "TASKS/TASK*/RULE?"],
        ),
    };
    CategorySchema { root: root_tag(category), entries, fields }
}

fn bool_text(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Parses `bytes` as a document of `category`. Cross-document references are
/// not checked here; see [`validate_document`].
pub fn parse(category: ConfigCategory, bytes: &[u8]) -> Result<ConfigDocument, ParseError> {
    let cx = Ctx { category };
    let root = xml::parse_tree(bytes).map_err(|e| cx.err(e.pos, e.code, e.detail))?;
    cx.expect_name(&root, root_tag(category))?;
    let body = match category {
        ConfigCategory::CssElements => ConfigBody::CssElements(map_entries(&cx, &root, "CSSELEMENT", &["NAME", "LOCATION"], |r| {
            Ok(CssElement { name: r.text(&cx, "NAME")?, location: r.text(&cx, "LOCATION")? })
        })?),
        ConfigCategory::Images => ConfigBody::Images(map_entries(&cx, &root, "IMAGEELEMENT", &["NAME", "SRC"], |r| {
            Ok(ImageElement { name: r.text(&cx, "NAME")?, src: r.text(&cx, "SRC")? })
        })?),
        ConfigCategory::Scripts => ConfigBody::Scripts(map_entries(&cx, &root, "SCRIPTELEMENT", &["NAME", "SRC"], |r| {
            Ok(ScriptElement { name: r.text(&cx, "NAME")?, src: r.text(&cx, "SRC")? })
        })?),
        ConfigCategory::Properties => {
            let r = cx.record(&root, &["LABELS", "TEXTS"])?;
            let entries = |list_tag: &str, entry_tag: &str| {
                map_entries(&cx, r.element(&cx, list_tag)?, entry_tag, &["NAME", "VALUE"], |e| {
                    Ok(PropertyEntry { name: e.text(&cx, "NAME")?, value: e.text(&cx, "VALUE")? })
                })
            };
            ConfigBody::Properties(PropertyBundle {
                labels: entries("LABELS", "LABELELEMENT")?,
                texts: entries("TEXTS", "TEXTELEMENT")?,
            })
        }
        ConfigCategory::Blocks => ConfigBody::Blocks(map_entries(
            &cx,
            &root,
            "BLOCK",
            &["COMPONENT", "VIEWNAME", "TITLE", "DISPLAY", "LOADOPTION"],
            |r| {
                Ok(Block {
                    component: r.text(&cx, "COMPONENT")?,
                    view_name: r.text(&cx, "VIEWNAME")?,
                    title: r.text(&cx, "TITLE")?,
                    display: r.boolean(&cx, "DISPLAY")?,
                    load_option: r.choice(&cx, "LOADOPTION", &[("Direct", LoadOption::Direct), ("Lazy", LoadOption::Lazy)])?,
                })
            },
        )?),
        ConfigCategory::Fields => ConfigBody::Fields(map_entries(
            &cx,
            &root,
            "FIELD",
            &["FIELDNAME", "DISPLAY", "POSITIONFROM", "POSITIONTO"],
            |r| {
                Ok(FieldPlacement {
                    field_name: r.text(&cx, "FIELDNAME")?,
                    display: r.boolean(&cx, "DISPLAY")?,
                    position_from: r.cell(&cx, "POSITIONFROM")?,
                    position_to: r.cell(&cx, "POSITIONTO")?,
                })
            },
        )?),
        ConfigCategory::FrontendBOs => ConfigBody::FrontendBOs(map_entries(&cx, &root, "BO", &["BONAME", "ENABLE"], |r| {
            Ok(BoToggle { bo_name: r.text(&cx, "BONAME")?, enabled: r.boolean(&cx, "ENABLE")? })
        })?),
        ConfigCategory::BackendBindings => ConfigBody::BackendBindings(map_entries(
            &cx,
            &root,
            "BE",
            &["BENAME", "API", "STATE", "ERPBACKEND"],
            |r| {
                Ok(BackendBinding {
                    be_name: r.text(&cx, "BENAME")?,
                    api: r.text(&cx, "API")?,
                    state: r.choice(&cx, "STATE", &[("Full", ConnectionState::Full), ("Less", ConnectionState::Less)])?,
                    erp_backend: r.text(&cx, "ERPBACKEND")?,
                })
            },
        )?),
        ConfigCategory::Connections => ConfigBody::Connections(map_entries(&cx, &root, "CONNECTION", &["NAME", "HOST", "CLIENT"], |r| {
            let client_el = r.element(&cx, "CLIENT")?;
            let client = leaf(&cx, client_el)?;
            if !is_client_number(&client) {
                return Err(cx.err(client_el.pos, ParseCode::BadNumber, format!("<CLIENT> must be three digits, got {client:?}")));
            }
            Ok(Connection { name: r.text(&cx, "NAME")?, host: r.text(&cx, "HOST")?, client })
        })?),
        ConfigCategory::BusinessRoles => ConfigBody::BusinessRoles(map_entries(
            &cx,
            &root,
            "BUSINESSROLE",
            &["NAME", "DESCRIPTION", "NAVBAR", "TECPROFILE", "LAYPROFILE", "PFCG"],
            |r| {
                Ok(BusinessRole {
                    name: r.text(&cx, "NAME")?,
                    description: r.text(&cx, "DESCRIPTION")?,
                    nav_bar_profile: r.text(&cx, "NAVBAR")?,
                    technical_profile: r.text(&cx, "TECPROFILE")?,
                    layout_profile: r.text(&cx, "LAYPROFILE")?,
                    pfcg_role: r.text(&cx, "PFCG")?,
                })
            },
        )?),
        ConfigCategory::BolAccess => ConfigBody::BolAccess(map_entries(&cx, &root, "BUSINESSROLE", &["NAME", "DESCRIPTION", "BOLS"], |r| {
            let grants = map_entries(&cx, r.element(&cx, "BOLS")?, "BOL", &["NAME", "USE"], |g| {
                Ok(BolGrant { bol_name: g.text(&cx, "NAME")?, allowed: g.boolean(&cx, "USE")? })
            })?;
            Ok(BolAccessRule { role_name: r.text(&cx, "NAME")?, description: r.opt_text(&cx, "DESCRIPTION")?, grants })
        })?),
        ConfigCategory::DataObjects => ConfigBody::DataObjects(map_entries(&cx, &root, "DO", &["NAME", "DATABASENAME"], |r| {
            Ok(DataObjectBinding { do_name: r.text(&cx, "NAME")?, database_name: r.text(&cx, "DATABASENAME")? })
        })?),
        ConfigCategory::Databases => ConfigBody::Databases(map_entries(&cx, &root, "DATABASE", &["NAME", "HOST", "USE"], |r| {
            Ok(Database {
                name: r.text(&cx, "NAME")?,
                host: r.text(&cx, "HOST")?,
                usage: r.choice(&cx, "USE", &[("Default", DatabaseUse::Default), ("Request", DatabaseUse::Request)])?,
            })
        })?),
        ConfigCategory::KeyValues => ConfigBody::KeyValues(map_entries(&cx, &root, "KV", &["KEY", "VALUE", "SET"], |r| {
            let value = match (r.fields.get("VALUE"), r.fields.get("SET")) {
                (Some(v), None) => SettingValue::Scalar(leaf(&cx, v)?),
                (None, Some(set)) => SettingValue::Set(
                    cx.entries(set, "ITEM")?.iter().map(|i| leaf(&cx, i)).collect::<Result<_, _>>()?,
                ),
                (Some(_), Some(set)) => {
                    return Err(cx.err(set.pos, ParseCode::MalformedXml, "<KV> carries both <VALUE> and <SET>"));
                }
                (None, None) => return Err(cx.err(r.entry.pos, ParseCode::MissingTag, "<KV> lacks <VALUE> or <SET>")),
            };
            Ok(KeyValueSetting { key: r.text(&cx, "KEY")?, value })
        })?),
        ConfigCategory::Workflows => ConfigBody::Workflows(map_entries(&cx, &root, "WORKFLOW", &["ID", "NAME", "ROLE", "TASKS"], |r| {
            let tasks = map_entries(&cx, r.element(&cx, "TASKS")?, "TASK", &["STEP", "ACTIVITY", "BO", "METHOD", "RULE"], |t| {
                let step_el = t.element(&cx, "STEP")?;
                let step = leaf(&cx, step_el)?;
                let step_no = step
                    .parse::<u32>()
                    .ok()
                    .filter(|n| *n > 0 && step.bytes().all(|b| b.is_ascii_digit()))
                    .ok_or_else(|| cx.err(step_el.pos, ParseCode::BadNumber, format!("<STEP> must be a positive integer, got {step:?}")))?;
                Ok(WorkflowTask {
                    step_no,
                    activity_type: t.text(&cx, "ACTIVITY")?,
                    bo_name: t.text(&cx, "BO")?,
                    method: t.text(&cx, "METHOD")?,
                    rule: t.opt_text(&cx, "RULE")?,
                })
            })?;
            Ok(WorkflowDef { id: r.text(&cx, "ID")?, name: r.text(&cx, "NAME")?, role_binding: r.text(&cx, "ROLE")?, tasks })
        })?),
    };
    Ok(ConfigDocument::new(body))
}

fn map_entries<T>(
    cx: &Ctx,
    list: &Element,
    entry: &str,
    allowed: &[&str],
    mut f: impl FnMut(&Record) -> Result<T, ParseError>,
) -> Result<Vec<T>, ParseError> {
    cx.entries(list, entry)?.iter().map(|e| f(&cx.record(e, allowed)?)).collect()
}

/// Canonical bytes of a document. Equal documents give equal bytes; the
/// version is not written.
pub fn serialize(doc: &ConfigDocument) -> Vec<u8> {
    let mut w = Writer::new();
    let root = root_tag(doc.category());
    w.open(root);
    match &doc.body {
        ConfigBody::CssElements(v) => each(&mut w, "CSSELEMENT", v, |w, e| {
            w.leaf("NAME", &e.name);
            w.leaf("LOCATION", &e.location);
        }),
        ConfigBody::Images(v) => each(&mut w, "IMAGEELEMENT", v, |w, e| {
            w.leaf("NAME", &e.name);
            w.leaf("SRC", &e.src);
        }),
        ConfigBody::Scripts(v) => each(&mut w, "SCRIPTELEMENT", v, |w, e| {
            w.leaf("NAME", &e.name);
            w.leaf("SRC", &e.src);
        }),
        ConfigBody::Properties(p) => {
            for (list, entry, items) in [("LABELS", "LABELELEMENT", &p.labels), ("TEXTS", "TEXTELEMENT", &p.texts)] {
                w.open(list);
                each(&mut w, entry, items, |w, e| {
                    w.leaf("NAME", &e.name);
                    w.leaf("VALUE", &e.value);
                });
                w.close(list);
            }
        }
        ConfigBody::Blocks(v) => each(&mut w, "BLOCK", v, |w, b| {
            w.leaf("COMPONENT", &b.component);
            w.leaf("VIEWNAME", &b.view_name);
            w.leaf("TITLE", &b.title);
            w.leaf("DISPLAY", bool_text(b.display));
            w.leaf("LOADOPTION", match b.load_option {
                LoadOption::Direct => "Direct",
                LoadOption::Lazy => "Lazy",
            });
        }),
        ConfigBody::Fields(v) => each(&mut w, "FIELD", v, |w, f| {
            w.leaf("FIELDNAME", &f.field_name);
            w.leaf("DISPLAY", bool_text(f.display));
            w.leaf("POSITIONFROM", &f.position_from.to_string());
            w.leaf("POSITIONTO", &f.position_to.to_string());
        }),
        ConfigBody::FrontendBOs(v) => each(&mut w, "BO", v, |w, b| {
            w.leaf("BONAME", &b.bo_name);
            w.leaf("ENABLE", bool_text(b.enabled));
        }),
        ConfigBody::BackendBindings(v) => each(&mut w, "BE", v, |w, b| {
            w.leaf("BENAME", &b.be_name);
            w.leaf("API", &b.api);
            w.leaf("STATE", match b.state {
                ConnectionState::Full => "Full",
                ConnectionState::Less => "Less",
            });
            w.leaf("ERPBACKEND", &b.erp_backend);
        }),
        ConfigBody::Connections(v) => each(&mut w, "CONNECTION", v, |w, c| {
            w.leaf("NAME", &c.name);
            w.leaf("HOST", &c.host);
            w.leaf("CLIENT", &c.client);
        }),
        ConfigBody::BusinessRoles(v) => each(&mut w, "BUSINESSROLE", v, |w, r| {
            w.leaf("NAME", &r.name);
            w.leaf("DESCRIPTION", &r.description);
            w.leaf("NAVBAR", &r.nav_bar_profile);
            w.leaf("TECPROFILE", &r.technical_profile);
            w.leaf("LAYPROFILE", &r.layout_profile);
            w.leaf("PFCG", &r.pfcg_role);
        }),
        ConfigBody::BolAccess(v) => each(&mut w, "BUSINESSROLE", v, |w, r| {
            w.leaf("NAME", &r.role_name);
            if let Some(d) = &r.description {
                w.leaf("DESCRIPTION", d);
            }
            w.open("BOLS");
            each(w, "BOL", &r.grants, |w, g| {
                w.leaf("NAME", &g.bol_name);
                w.leaf("USE", bool_text(g.allowed));
            });
            w.close("BOLS");
        }),
        ConfigBody::DataObjects(v) => each(&mut w, "DO", v, |w, d| {
            w.leaf("NAME", &d.do_name);
            w.leaf("DATABASENAME", &d.database_name);
        }),
        ConfigBody::Databases(v) => each(&mut w, "DATABASE", v, |w, d| {
            w.leaf("NAME", &d.name);
            w.leaf("HOST", &d.host);
            w.leaf("USE", match d.usage {
                DatabaseUse::Default => "Default",
                DatabaseUse::Request => "Request",
            });
        }),
        ConfigBody::KeyValues(v) => each(&mut w, "KV", v, |w, kv| {
            w.leaf("KEY", &kv.key);
            match &kv.value {
                SettingValue::Scalar(s) => w.leaf("VALUE", s),
                SettingValue::Set(items) => {
                    w.open("SET");
                    for i in items {
                        w.leaf("ITEM", i);
                    }
                    w.close("SET");
                }
            }
        }),
        ConfigBody::Workflows(v) => each(&mut w, "WORKFLOW", v, |w, wf| {
            w.leaf("ID", &wf.id);
            w.leaf("NAME", &wf.name);
            w.leaf("ROLE", &wf.role_binding);
            w.open("TASKS");
            each(w, "TASK", &wf.tasks, |w, t| {
                w.leaf("STEP", &t.step_no.to_string());
                w.leaf("ACTIVITY", &t.activity_type);
                w.leaf("BO", &t.bo_name);
                w.leaf("METHOD", &t.method);
                if let Some(rule) = &t.rule {
                    w.leaf("RULE", rule);
                }
            });
            w.close("TASKS");
        }),
    }
    w.close(root);
    w.finish()
}

fn each<T>(w: &mut Writer, tag: &str, items: &[T], mut f: impl FnMut(&mut Writer, &T)) {
    for item in items {
        w.open(tag);
        f(w, item);
        w.close(tag);
    }
}
