//! Entry-level differences between two documents of one category.
//!
//! Entries are matched by name (the k-th entry named `x` on one side with the
//! k-th entry named `x` on the other). Output lines look like
//! `~ CSSELEMENT B2C`, `- BLOCK Component n/ViewJ`, `+ FIELD Field9`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::model::{ConfigBody, ConfigDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Change {
    Added,
    Removed,
    Changed,
}

impl Change {
    fn sign(self) -> char {
        match self {
            Change::Added => '+',
            Change::Removed => '-',
            Change::Changed => '~',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffLine {
    pub change: Change,
    pub tag: &'static str,
    pub key: String,
}

impl fmt::Display for DiffLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.change.sign(), self.tag, self.key)
    }
}

type Keyed = Vec<(&'static str, String, serde_json::Value)>;

fn keyed<T: Serialize>(out: &mut Keyed, tag: &'static str, items: &[T], key: impl Fn(&T) -> String) {
    for item in items {
        out.push((tag, key(item), serde_json::to_value(item).expect("entries serialize")));
    }
}

fn entries(doc: &ConfigDocument) -> Keyed {
    let mut out = Vec::new();
    match &doc.body {
        ConfigBody::CssElements(v) => keyed(&mut out, "CSSELEMENT", v, |e| e.name.clone()),
        ConfigBody::Images(v) => keyed(&mut out, "IMAGEELEMENT", v, |e| e.name.clone()),
        ConfigBody::Scripts(v) => keyed(&mut out, "SCRIPTELEMENT", v, |e| e.name.clone()),
        ConfigBody::Properties(p) => {
            keyed(&mut out, "LABELELEMENT", &p.labels, |e| e.name.clone());
            keyed(&mut out, "TEXTELEMENT", &p.texts, |e| e.name.clone());
        }
        ConfigBody::Blocks(v) => keyed(&mut out, "BLOCK", v, |b| format!("{}/{}", b.component, b.view_name)),
        ConfigBody::Fields(v) => keyed(&mut out, "FIELD", v, |f| f.field_name.clone()),
        ConfigBody::FrontendBOs(v) => keyed(&mut out, "BO", v, |b| b.bo_name.clone()),
        ConfigBody::BackendBindings(v) => keyed(&mut out, "BE", v, |b| b.be_name.clone()),
        ConfigBody::Connections(v) => keyed(&mut out, "CONNECTION", v, |c| c.name.clone()),
        ConfigBody::BusinessRoles(v) => keyed(&mut out, "BUSINESSROLE", v, |r| r.name.clone()),
        ConfigBody::BolAccess(v) => keyed(&mut out, "BUSINESSROLE", v, |r| r.role_name.clone()),
        ConfigBody::DataObjects(v) => keyed(&mut out, "DO", v, |d| d.do_name.clone()),
        ConfigBody::Databases(v) => keyed(&mut out, "DATABASE", v, |d| d.name.clone()),
        ConfigBody::KeyValues(v) => keyed(&mut out, "KV", v, |kv| kv.key.clone()),
        ConfigBody::Workflows(v) => keyed(&mut out, "WORKFLOW", v, |w| w.id.clone()),
    }
    out
}

/// Gives each entry its occurrence number among entries with the same tag
/// and key.
fn numbered(entries: Keyed) -> Vec<((&'static str, String, usize), serde_json::Value)> {
    let mut seen: BTreeMap<(&'static str, String), usize> = BTreeMap::new();
    entries
        .into_iter()
        .map(|(tag, key, value)| {
            let n = seen.entry((tag, key.clone())).or_default();
            *n += 1;
            ((tag, key, *n), value)
        })
        .collect()
}

/// Changes that turn `base` into `other`: removed and changed entries in
/// `base` order, then added entries in `other` order. Both documents must be
/// of the same category.
pub fn diff_documents(base: &ConfigDocument, other: &ConfigDocument) -> Vec<DiffLine> {
    assert_eq!(base.category(), other.category(), "diff across categories");
    let base = numbered(entries(base));
    let other = numbered(entries(other));
    let other_map: BTreeMap<_, _> = other.iter().map(|(k, v)| (k, v)).collect();
    let base_map: BTreeMap<_, _> = base.iter().map(|(k, v)| (k, v)).collect();
    let mut out = Vec::new();
    for (k, v) in &base {
        match other_map.get(k) {
            None => out.push(DiffLine { change: Change::Removed, tag: k.0, key: k.1.clone() }),
            Some(w) if *w != v => out.push(DiffLine { change: Change::Changed, tag: k.0, key: k.1.clone() }),
            Some(_) => {}
        }
    }
    for (k, _) in &other {
        if !base_map.contains_key(k) {
            out.push(DiffLine { change: Change::Added, tag: k.0, key: k.1.clone() });
        }
    }
    out
}
