//! Random worlds: defaults plus a few tenants with random, possibly
//! inconsistent overrides, and the queries that exercise every resolver op.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::Value;
use tempfile::TempDir;
use tenantconf_core::error::Error;
use tenantconf_core::guard::{AuditLog, Principal};
use tenantconf_core::model::{LangTag, TenantId};
use tenantconf_core::registry::Store;
use tenantconf_core::tenancy::{Tenancy, TenancyOptions};

use super::oracle::{Answer, Naive};
use super::*;

pub struct World {
    pub dir: TempDir,
    pub tenancy: Tenancy,
    pub tenants: Vec<TenantId>,
}

pub fn options() -> TenancyOptions {
    TenancyOptions { store: FAST, ..Default::default() }
}

/// Writes `doc` as the tenant's document without validation.
pub fn force_commit(store: &Store, t: &TenantId, slot: &Slot, mut doc: ConfigDocument) {
    let (current, _) = store.begin_configure(t, slot).unwrap();
    doc.version = current.version;
    store.commit(t, slot, &doc).unwrap();
}

pub fn build(seed: u64) -> World {
    let dir = tempfile::tempdir().unwrap();
    let mut g = Gen::new(seed, false);
    let defaults = g.world_defaults();
    let store = bootstrap(dir.path(), &defaults);
    let tenants: Vec<TenantId> = ["T1", "T2", "T3"].iter().map(|t| tenant(t)).collect();
    for t in &tenants {
        store.register_tenant(t).unwrap();
    }
    for t in &tenants[1..] {
        for slot in all_slots() {
            if g.rng.random_bool(0.35) {
                let doc = g.doc(slot.category());
                force_commit(&store, t, &slot, doc);
            }
        }
    }
    let tenancy = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
    World { dir, tenancy, tenants }
}

#[derive(Debug, Clone)]
pub enum Query {
    PageView { page: String, lang: String, role: String },
    Bo(String),
    Backend(String),
    Roles(String),
    Bol(String, String),
    Database(String),
    Setting(String),
    Branding,
    DryRun(String),
}

fn with_ghost(g: &mut Gen, pool: &[&str]) -> String {
    if g.rng.random_bool(0.15) {
        "GHOST".to_string()
    } else {
        pool.choose(&mut g.rng).unwrap().to_string()
    }
}

pub fn random_query(g: &mut Gen) -> Query {
    match g.rng.random_range(0..9) {
        0 => Query::PageView {
            page: with_ghost(g, PAGES),
            lang: with_ghost(g, LANGUAGES).to_lowercase(),
            role: with_ghost(g, ROLES),
        },
        1 => Query::Bo(with_ghost(g, BOS)),
        2 => Query::Backend(with_ghost(g, BES)),
        3 => Query::Roles(with_ghost(g, ROLES)),
        4 => Query::Bol(with_ghost(g, ROLES), with_ghost(g, BOLS)),
        5 => Query::Database(with_ghost(g, DATA_OBJECTS)),
        6 => Query::Setting(with_ghost(g, KEYS)),
        7 => Query::Branding,
        _ => Query::DryRun(with_ghost(g, WORKFLOWS)),
    }
}

fn answer<T: Serialize>(r: Result<T, Error>) -> Answer {
    r.map(|v| serde_json::to_value(v).unwrap()).map_err(|e| e.code())
}

/// The facade's answer, as the provider sees it.
pub fn system_answer(tenancy: &Tenancy, t: &TenantId, q: &Query) -> Answer {
    let p = Principal::provider();
    match q {
        Query::PageView { page, lang, role } => answer(tenancy.page_view(&p, t, page, &LangTag::new(lang.as_str()).unwrap(), role).map(|v| (*v).clone())),
        Query::Bo(bo) => answer(tenancy.bo_status(&p, t, bo)),
        Query::Backend(be) => answer(tenancy.backend_call(&p, t, be)),
        Query::Roles(role) => answer(tenancy.role_profiles(&p, t, role)),
        Query::Bol(role, bol) => answer(tenancy.bol_access(&p, t, role, bol)),
        Query::Database(d) => answer(tenancy.database(&p, t, d)),
        Query::Setting(k) => answer(tenancy.setting(&p, t, k)),
        Query::Branding => answer(tenancy.branding(&p, t)),
        Query::DryRun(id) => answer(tenancy.dry_run(&p, t, id)),
    }
}

pub fn oracle_answer(n: &Naive, q: &Query) -> Answer {
    match q {
        Query::PageView { page, lang, role } => n.page_view(page, lang, role),
        Query::Bo(bo) => n.bo_status(bo),
        Query::Backend(be) => n.backend_call(be),
        Query::Roles(role) => n.role_profiles(role),
        Query::Bol(role, bol) => n.bol_access(role, bol),
        Query::Database(d) => n.database(d),
        Query::Setting(k) => n.setting(k),
        Query::Branding => n.branding(),
        Query::DryRun(id) => n.dry_run(id),
    }
}

/// Runs `queries` random queries per tenant and returns the mismatches.
pub fn check_world(seed: u64, queries: usize) -> Vec<String> {
    let world = build(seed);
    let mut g = Gen::new(seed ^ 0x5eed, false);
    let mut out = Vec::new();
    for t in &world.tenants {
        let naive = Naive::new(world.dir.path(), t.as_str());
        for _ in 0..queries {
            let q = random_query(&mut g);
            // Twice, so the second answer comes from the warm cache.
            for _ in 0..2 {
                let got = system_answer(&world.tenancy, t, &q);
                let want = oracle_answer(&naive, &q);
                if got != want {
                    out.push(format!("world {seed} tenant {t} {q:?}: got {got:?}, want {want:?}"));
                }
            }
        }
    }
    out
}

/// Every resolver output of `t` as one JSON value, for byte comparison.
pub fn fingerprint(tenancy: &Tenancy, t: &TenantId) -> Value {
    let mut all = Vec::new();
    for page in PAGES {
        for lang in LANGUAGES {
            for role in ROLES {
                let q = Query::PageView { page: page.to_string(), lang: lang.to_string(), role: role.to_string() };
                all.push(format!("{:?}", system_answer(tenancy, t, &q)));
            }
        }
    }
    let mut push = |q: Query| all.push(format!("{:?}", system_answer(tenancy, t, &q)));
    BOS.iter().for_each(|b| push(Query::Bo(b.to_string())));
    BES.iter().for_each(|b| push(Query::Backend(b.to_string())));
    for r in ROLES {
        push(Query::Roles(r.to_string()));
        BOLS.iter().for_each(|b| push(Query::Bol(r.to_string(), b.to_string())));
    }
    DATA_OBJECTS.iter().for_each(|d| push(Query::Database(d.to_string())));
    KEYS.iter().for_each(|k| push(Query::Setting(k.to_string())));
    push(Query::Branding);
    WORKFLOWS.iter().for_each(|w| push(Query::DryRun(w.to_string())));
    let p = Principal::provider();
    for slot in all_slots() {
        let r = tenancy.read_config(&p, t, &slot).map(|c| String::from_utf8(tenantconf_core::codec::serialize(&c.doc)).unwrap());
        all.push(format!("{:?}", r.map_err(|e| e.code())));
    }
    Value::from(all)
}
