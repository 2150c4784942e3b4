//! Semantic checks over parsed documents.
//!
//! Violations are data: every check returns a list, and an empty list means
//! the document is valid. Reports are sorted so they do not depend on entry
//! order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::document::{ConfigBody, ConfigDocument};
use super::entries::*;
use super::grid::{check_span, CoordinateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    DupName,
    EmptyName,
    BadLabelName,
    OverlapField,
    MultiRowField,
    ReversedSpan,
    DanglingConnection,
    BadClient,
    EmptyProfile,
    UnknownRole,
    DanglingDatabase,
    MultiDefaultDb,
    NoDefaultDb,
    EmptySet,
    DupSetItem,
    EmptyWf,
    BadOrder,
    BadTask,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DupName => "DUP_NAME",
            ViolationCode::EmptyName => "EMPTY_NAME",
            ViolationCode::BadLabelName => "BAD_LABEL_NAME",
            ViolationCode::OverlapField => "OVERLAP_FIELD",
            ViolationCode::MultiRowField => "MULTI_ROW_FIELD",
            ViolationCode::ReversedSpan => "REVERSED_SPAN",
            ViolationCode::DanglingConnection => "DANGLING_CONNECTION",
            ViolationCode::BadClient => "BAD_CLIENT",
            ViolationCode::EmptyProfile => "EMPTY_PROFILE",
            ViolationCode::UnknownRole => "UNKNOWN_ROLE",
            ViolationCode::DanglingDatabase => "DANGLING_DATABASE",
            ViolationCode::MultiDefaultDb => "MULTI_DEFAULT_DB",
            ViolationCode::NoDefaultDb => "NO_DEFAULT_DB",
            ViolationCode::EmptySet => "EMPTY_SET",
            ViolationCode::DupSetItem => "DUP_SET_ITEM",
            ViolationCode::EmptyWf => "EMPTY_WF",
            ViolationCode::BadOrder => "BAD_ORDER",
            ViolationCode::BadTask => "BAD_TASK",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ViolationCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Entry the violation is about, e.g. `FIELD Field1` or `FIELD Field1|Field2`.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    pub fn contains(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub(crate) fn from_unsorted(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        ValidationReport { violations }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Names declared in other documents of the same tenant. `None` skips the
/// corresponding reference checks (used when validating a file in isolation).
#[derive(Debug, Clone, Default)]
pub struct ResolvedCrossRefs {
    pub connections: Option<BTreeSet<String>>,
    pub roles: Option<BTreeSet<String>>,
    pub databases: Option<BTreeSet<String>>,
}

impl ResolvedCrossRefs {
    pub fn unchecked() -> Self {
        Self::default()
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, code: ViolationCode, subject: impl Into<String>, detail: impl Into<String>) {
        self.out.push(Violation { code, subject: subject.into(), detail: detail.into() });
    }

    /// Reports empty keys and every key that occurs more than once.
    fn keys<'a>(&mut self, tag: &str, keys: impl IntoIterator<Item = &'a str>) {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for key in keys {
            if key.is_empty() {
                self.push(ViolationCode::EmptyName, tag, "empty name");
            }
            *seen.entry(key).or_default() += 1;
        }
        for (key, n) in seen {
            if n > 1 {
                self.push(ViolationCode::DupName, format!("{tag} {key}"), format!("declared {n} times"));
            }
        }
    }

    fn reference(&mut self, code: ViolationCode, known: Option<&BTreeSet<String>>, subject: String, name: &str) {
        if let Some(known) = known {
            if !known.contains(name) {
                self.push(code, subject, format!("{name:?} is not declared"));
            }
        }
    }
}

pub fn validate_document(doc: &ConfigDocument, refs: &ResolvedCrossRefs) -> ValidationReport {
    let mut c = Checker { out: Vec::new() };
    match &doc.body {
        ConfigBody::CssElements(v) => c.keys("CSSELEMENT", v.iter().map(|e| e.name.as_str())),
        ConfigBody::Images(v) => c.keys("IMAGEELEMENT", v.iter().map(|e| e.name.as_str())),
        ConfigBody::Scripts(v) => c.keys("SCRIPTELEMENT", v.iter().map(|e| e.name.as_str())),
        ConfigBody::Properties(p) => {
            for (tag, entries) in [("LABELELEMENT", &p.labels), ("TEXTELEMENT", &p.texts)] {
                c.keys(tag, entries.iter().map(|e| e.name.as_str()));
                for e in entries {
                    let dotted = matches!(e.name.split_once('.'), Some((page, item)) if !page.is_empty() && !item.is_empty());
                    if !e.name.is_empty() && !dotted {
                        c.push(ViolationCode::BadLabelName, format!("{tag} {}", e.name), "expected Page.Item");
                    }
                }
            }
        }
        ConfigBody::Blocks(v) => {
            let keys: Vec<String> = v.iter().map(|b| format!("{}/{}", b.component, b.view_name)).collect();
            c.keys("BLOCK", keys.iter().map(String::as_str));
        }
        ConfigBody::Fields(v) => check_fields(&mut c, v),
        ConfigBody::FrontendBOs(v) => c.keys("BO", v.iter().map(|e| e.bo_name.as_str())),
        ConfigBody::BackendBindings(v) => {
            c.keys("BE", v.iter().map(|e| e.be_name.as_str()));
            for b in v {
                c.reference(
                    ViolationCode::DanglingConnection,
                    refs.connections.as_ref(),
                    format!("BE {}", b.be_name),
                    &b.erp_backend,
                );
            }
        }
        ConfigBody::Connections(v) => {
            c.keys("CONNECTION", v.iter().map(|e| e.name.as_str()));
            for conn in v {
                if !is_client_number(&conn.client) {
                    c.push(ViolationCode::BadClient, format!("CONNECTION {}", conn.name), format!("client {:?} is not three digits", conn.client));
                }
            }
        }
        ConfigBody::BusinessRoles(v) => {
            c.keys("BUSINESSROLE", v.iter().map(|e| e.name.as_str()));
            for r in v {
                for (what, val) in [
                    ("NAVBAR", &r.nav_bar_profile),
                    ("TECPROFILE", &r.technical_profile),
                    ("LAYPROFILE", &r.layout_profile),
                    ("PFCG", &r.pfcg_role),
                ] {
                    if val.is_empty() {
                        c.push(ViolationCode::EmptyProfile, format!("BUSINESSROLE {}", r.name), format!("{what} is empty"));
                    }
                }
            }
        }
        ConfigBody::BolAccess(v) => {
            c.keys("BUSINESSROLE", v.iter().map(|e| e.role_name.as_str()));
            for rule in v {
                c.keys(&format!("BUSINESSROLE {} BOL", rule.role_name), rule.grants.iter().map(|g| g.bol_name.as_str()));
                c.reference(ViolationCode::UnknownRole, refs.roles.as_ref(), format!("BUSINESSROLE {}", rule.role_name), &rule.role_name);
            }
        }
        ConfigBody::DataObjects(v) => {
            c.keys("DO", v.iter().map(|e| e.do_name.as_str()));
            for d in v {
                c.reference(ViolationCode::DanglingDatabase, refs.databases.as_ref(), format!("DO {}", d.do_name), &d.database_name);
            }
        }
        ConfigBody::Databases(v) => {
            c.keys("DATABASE", v.iter().map(|e| e.name.as_str()));
            let defaults = v.iter().filter(|d| d.usage == DatabaseUse::Default).count();
            match defaults {
                0 => c.push(ViolationCode::NoDefaultDb, "DATABASES", "no database has USE=Default"),
                1 => {}
                n => c.push(ViolationCode::MultiDefaultDb, "DATABASES", format!("{n} databases have USE=Default")),
            }
        }
        ConfigBody::KeyValues(v) => {
            c.keys("KV", v.iter().map(|e| e.key.as_str()));
            for kv in v {
                if let SettingValue::Set(items) = &kv.value {
                    if items.is_empty() {
                        c.push(ViolationCode::EmptySet, format!("KV {}", kv.key), "set has no items");
                    }
                    let distinct: BTreeSet<&String> = items.iter().collect();
                    if distinct.len() != items.len() {
                        c.push(ViolationCode::DupSetItem, format!("KV {}", kv.key), "set repeats an item");
                    }
                }
            }
        }
        ConfigBody::Workflows(v) => {
            c.keys("WORKFLOW", v.iter().map(|e| e.id.as_str()));
            for wf in v {
                c.out.extend(workflow_violations(wf, refs.roles.as_ref()));
            }
        }
    }
    ValidationReport::from_unsorted(c.out)
}

/// Checks for one workflow definition. `roles` = `None` skips the role check.
pub fn workflow_violations(wf: &WorkflowDef, roles: Option<&BTreeSet<String>>) -> Vec<Violation> {
    let subject = format!("WORKFLOW {}", wf.id);
    let mut out = Vec::new();
    let mut push = |code, detail: String| out.push(Violation { code, subject: subject.clone(), detail });
    if let Some(roles) = roles {
        if !roles.contains(&wf.role_binding) {
            push(ViolationCode::UnknownRole, format!("role {:?} is not declared", wf.role_binding));
        }
    }
    if wf.tasks.is_empty() {
        push(ViolationCode::EmptyWf, "workflow has no tasks".into());
    }
    if wf.tasks.windows(2).any(|w| w[1].step_no <= w[0].step_no) || wf.tasks.iter().any(|t| t.step_no == 0) {
        push(ViolationCode::BadOrder, "step numbers must be positive and strictly increasing".into());
    }
    for t in &wf.tasks {
        if t.bo_name.is_empty() || t.method.is_empty() {
            push(ViolationCode::BadTask, format!("step {} needs a business object and a method", t.step_no));
        }
    }
    out.sort();
    out
}

pub fn is_client_number(s: &str) -> bool {
    s.len() == 3 && s.bytes().all(|b| b.is_ascii_digit())
}

fn check_fields(c: &mut Checker, fields: &[FieldPlacement]) {
    c.keys("FIELD", fields.iter().map(|f| f.field_name.as_str()));
    let mut spans = Vec::new();
    for f in fields {
        match check_span(f.position_from, f.position_to) {
            Ok(()) if f.display => spans.push(f),
            Ok(()) => {}
            Err(CoordinateError::MultiRow { .. }) => c.push(
                ViolationCode::MultiRowField,
                format!("FIELD {}", f.field_name),
                format!("{} and {} are on different rows", f.position_from, f.position_to),
            ),
            Err(_) => c.push(
                ViolationCode::ReversedSpan,
                format!("FIELD {}", f.field_name),
                format!("{} is right of {}", f.position_from, f.position_to),
            ),
        }
    }
    for (i, a) in spans.iter().enumerate() {
        for b in &spans[i + 1..] {
            let same_row = a.position_from.row == b.position_from.row;
            let intersect = a.position_from.column <= b.position_to.column && b.position_from.column <= a.position_to.column;
            if same_row && intersect {
                let key = |f: &FieldPlacement| (f.field_name.clone(), f.position_from, f.position_to);
                let (x, y) = if key(a) <= key(b) { (a, b) } else { (b, a) };
                c.push(
                    ViolationCode::OverlapField,
                    format!("FIELD {}|{}", x.field_name, y.field_name),
                    format!("{}:{} overlaps {}:{}", x.position_from, x.position_to, y.position_from, y.position_to),
                );
            }
        }
    }
}
