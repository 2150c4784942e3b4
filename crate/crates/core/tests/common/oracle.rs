//! Naive resolver: re-reads `central.xml` and the document files with
//! roxmltree on every call and answers with plain JSON values.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

pub struct Naive {
    root: PathBuf,
    tenant: String,
}

/// Element tree with decoded text.
#[derive(Debug, Clone)]
pub struct Node {
    pub tag: String,
    pub text: String,
    pub children: Vec<Node>,
}

impl Node {
    fn build(n: roxmltree::Node) -> Node {
        let children: Vec<Node> = n.children().filter(|c| c.is_element()).map(Node::build).collect();
        let text = if children.is_empty() { n.children().filter_map(|c| c.text()).collect() } else { String::new() };
        Node { tag: n.tag_name().name().to_string(), text, children }
    }

    pub fn get(&self, tag: &str) -> Option<&Node> {
        self.children.iter().find(|c| c.tag == tag)
    }

    pub fn s(&self, tag: &str) -> String {
        self.get(tag).map(|c| c.text.clone()).unwrap_or_default()
    }

    pub fn b(&self, tag: &str) -> bool {
        self.s(tag).eq_ignore_ascii_case("true")
    }

    pub fn all(&self, tag: &str) -> Vec<&Node> {
        self.children.iter().filter(|c| c.tag == tag).collect()
    }
}

pub fn parse_file(path: &Path) -> Node {
    let text = fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    Node::build(doc.root_element())
}

pub type Answer = Result<Value, &'static str>;

impl Naive {
    pub fn new(root: &Path, tenant: &str) -> Naive {
        Naive { root: root.to_path_buf(), tenant: tenant.to_string() }
    }

    /// The document a tenant sees for `slot`, or `None` if the slot is not
    /// registered.
    pub fn doc(&self, slot: &str) -> Option<Node> {
        let central = parse_file(&self.root.join("central.xml"));
        let section = central.get("SECTIONS")?.all("SECTION").into_iter().find(|s| s.s("CATEGORY") == slot)?;
        let location = section
            .get("OVERRIDES")
            .and_then(|o| o.all("OVERRIDE").into_iter().find(|o| o.s("TENANT") == self.tenant))
            .map(|o| o.s("LOCATION"))
            .unwrap_or_else(|| section.s("DEFAULT"));
        Some(parse_file(&self.root.join(location)))
    }

    fn entries(&self, slot: &str) -> Vec<Node> {
        self.doc(slot).map(|d| d.children).unwrap_or_default()
    }

    fn role(&self, role: &str) -> Option<Node> {
        self.entries("business-roles").into_iter().find(|r| r.s("NAME") == role)
    }

    pub fn page_view(&self, page: &str, lang: &str, role: &str) -> Answer {
        self.role(role).ok_or("unknown-role")?;
        let props = self.doc(&format!("properties.{lang}")).ok_or("unknown-language")?;
        let prefix = format!("{page}.");
        let pairs = |group: &str, tag: &str| {
            let mut m = Map::new();
            for e in props.get(group).map(|g| g.all(tag)).unwrap_or_default() {
                if e.s("NAME").starts_with(&prefix) {
                    m.insert(e.s("NAME"), json!(e.s("VALUE")));
                }
            }
            m
        };
        let labels = pairs("LABELS", "LABELELEMENT");
        let texts = pairs("TEXTS", "TEXTELEMENT");
        let named = |slot: &str, second: &str| -> Vec<Value> {
            self.entries(slot).iter().map(|e| json!({"name": e.s("NAME"), second: e.s(&second.to_uppercase())})).collect()
        };
        let blocks: Vec<Value> = self
            .entries("blocks")
            .iter()
            .filter(|b| b.b("DISPLAY"))
            .map(|b| {
                json!({"component": b.s("COMPONENT"), "view_name": b.s("VIEWNAME"), "title": b.s("TITLE"),
                       "display": true, "load_option": b.s("LOADOPTION")})
            })
            .collect();
        let mut missing: Vec<String> = Vec::new();
        let fields: Vec<Value> = self
            .entries("fields")
            .iter()
            .filter(|f| f.b("DISPLAY"))
            .map(|f| {
                let key = format!("{page}.{}", f.s("FIELDNAME"));
                if !labels.contains_key(&key) && !missing.contains(&key) {
                    missing.push(key);
                }
                json!({"field_name": f.s("FIELDNAME"), "display": true,
                       "position_from": f.s("POSITIONFROM"), "position_to": f.s("POSITIONTO")})
            })
            .collect();
        Ok(json!({
            "tenant": self.tenant, "page": page, "language": lang, "role": role,
            "css": named("css-elements", "location"),
            "images": named("images", "src"),
            "scripts": named("scripts", "src"),
            "labels": labels, "texts": texts, "blocks": blocks, "fields": fields, "missing": missing,
        }))
    }

    fn bo_enabled(&self, bo: &str) -> bool {
        self.entries("frontend-bos").iter().find(|b| b.s("BONAME") == bo).is_none_or(|b| b.b("ENABLE"))
    }

    pub fn bo_status(&self, bo: &str) -> Answer {
        let status = if self.bo_enabled(bo) { "Enabled" } else { "Disabled" };
        Ok(json!({"status": status, "bo_name": bo}))
    }

    pub fn backend_call(&self, be: &str) -> Answer {
        let b = self.entries("backend-bindings").into_iter().find(|b| b.s("BENAME") == be).ok_or("unknown-backend-object")?;
        let target = b.s("ERPBACKEND");
        let c = self.entries("connections").into_iter().find(|c| c.s("NAME") == target).ok_or("dangling-connection")?;
        Ok(json!({
            "be_name": be, "api": b.s("API"), "state": b.s("STATE"),
            "connection": {"name": c.s("NAME"), "host": c.s("HOST"), "client": c.s("CLIENT")},
            "reuse_connection": b.s("STATE") == "Full",
        }))
    }

    pub fn role_profiles(&self, role: &str) -> Answer {
        let r = self.role(role).ok_or("unknown-role")?;
        Ok(json!({"role": role, "nav_bar": r.s("NAVBAR"), "technical": r.s("TECPROFILE"),
                  "layout": r.s("LAYPROFILE"), "pfcg": r.s("PFCG")}))
    }

    fn allowed(&self, role: &str, bol: &str) -> bool {
        self.entries("bol-access")
            .iter()
            .find(|r| r.s("NAME") == role)
            .and_then(|r| r.get("BOLS").and_then(|b| b.all("BOL").into_iter().find(|g| g.s("NAME") == bol).cloned()))
            .is_some_and(|g| g.b("USE"))
    }

    pub fn bol_access(&self, role: &str, bol: &str) -> Answer {
        self.role(role).ok_or("unknown-role")?;
        Ok(json!(if self.allowed(role, bol) { "Allowed" } else { "Forbidden" }))
    }

    pub fn database(&self, do_name: &str) -> Answer {
        let dbs = self.entries("databases");
        let defaults: Vec<&Node> = dbs.iter().filter(|d| d.s("USE") == "Default").collect();
        let default = match defaults.len() {
            0 => return Err("no-default-database"),
            1 => defaults[0],
            _ => return Err("ambiguous-default-database"),
        };
        let (db, via) = match self.entries("data-objects").iter().find(|d| d.s("NAME") == do_name) {
            Some(b) => (dbs.iter().find(|d| d.s("NAME") == b.s("DATABASENAME")).ok_or("dangling-database")?, "binding"),
            None => (default, "default"),
        };
        Ok(json!({"do_name": do_name, "database": db.s("NAME"), "host": db.s("HOST"), "use": db.s("USE"), "via": via}))
    }

    fn setting_value(&self, key: &str) -> Value {
        match self.entries("key-values").into_iter().find(|kv| kv.s("KEY") == key) {
            None => Value::Null,
            Some(kv) => match kv.get("SET") {
                Some(set) => json!({"kind": "set", "value": set.all("ITEM").iter().map(|i| i.text.clone()).collect::<Vec<_>>()}),
                None => json!({"kind": "scalar", "value": kv.s("VALUE")}),
            },
        }
    }

    pub fn setting(&self, key: &str) -> Answer {
        Ok(json!({"key": key, "value": self.setting_value(key)}))
    }

    fn scalar(&self, key: &str) -> Option<String> {
        let v = self.setting_value(key);
        (v["kind"] == "scalar").then(|| v["value"].as_str().unwrap().to_string())
    }

    pub fn branding(&self) -> Answer {
        Ok(json!({
            "name": self.scalar("branding.name").unwrap_or_default(),
            "logo": self.scalar("branding.logo").unwrap_or_else(|| "/static/logo-placeholder.svg".into()),
        }))
    }

    pub fn dry_run(&self, id: &str) -> Answer {
        let wf = self.entries("workflows").into_iter().find(|w| w.s("ID") == id).ok_or("unknown-workflow")?;
        let role = wf.s("ROLE");
        let tasks: Vec<Node> = wf.get("TASKS").map(|t| t.children.clone()).unwrap_or_default();
        let steps: Vec<u64> = tasks.iter().map(|t| t.s("STEP").parse().unwrap()).collect();
        let valid = self.role(&role).is_some()
            && !tasks.is_empty()
            && steps.iter().all(|s| *s > 0)
            && steps.windows(2).all(|w| w[0] < w[1])
            && tasks.iter().all(|t| !t.s("BO").is_empty() && !t.s("METHOD").is_empty());
        if !valid {
            return Err("invalid-workflow");
        }
        let trace: Vec<Value> = tasks
            .iter()
            .map(|t| {
                let bo = t.s("BO");
                let bol = self.scalar(&format!("bol.of.{bo}")).unwrap_or_else(|| "UNASSIGNED".into());
                let verdict = if !self.bo_enabled(&bo) {
                    "BoDisabled"
                } else if !self.allowed(&role, &bol) {
                    "BolForbidden"
                } else {
                    "Ok"
                };
                json!({"step_no": t.s("STEP").parse::<u64>().unwrap(), "bo_name": bo, "method": t.s("METHOD"), "bol": bol,
                       "rule": t.get("RULE").map(|r| r.text.clone()), "verdict": verdict})
            })
            .collect();
        Ok(json!({"workflow_id": id, "role": role, "steps": trace}))
    }
}
