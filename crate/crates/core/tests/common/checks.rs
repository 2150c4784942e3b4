//! Whole-system checks shared by the integration tests and the acceptance
//! runner. Each returns a one-line summary, or the first failures.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use sha2::{Digest, Sha256};
use tenantconf_core::codec;
use tenantconf_core::defaults::{vendor_default_files, vendor_defaults};
use tenantconf_core::guard::{decide, Action, AuditLog, Decision, DenyReason, Principal};
use tenantconf_core::registry::{CrashPoint, DatabaseDescriptor, Store, StoreError};
use tenantconf_core::tenancy::{ConfigSource, Tenancy};
use tenantconf_core::workflow::Verdict;

use super::world::{self, options, random_query, system_answer, Query};
use super::*;

pub type Check = Result<String, String>;

fn fail(errors: Vec<String>) -> Check {
    Err(format!("{} failures; first: {}", errors.len(), errors.into_iter().next().unwrap_or_default()))
}

pub fn codec_round_trip(per_category: usize) -> Check {
    let start = Instant::now();
    let mut errors = Vec::new();
    for (c, category) in ConfigCategory::ALL.into_iter().enumerate() {
        for i in 0..per_category {
            let seed = (c * 1_000_003 + i) as u64;
            let doc = Gen::new(seed, true).doc(category);
            let xml = codec::serialize(&doc);
            match codec::parse(category, &xml) {
                Ok(back) if back == doc => {}
                Ok(_) => errors.push(format!("{category} seed {seed}: value changed")),
                Err(e) => errors.push(format!("{category} seed {seed}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    if !errors.is_empty() {
        return fail(errors);
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} documents in {:.2?}", per_category * 15, elapsed))
}

pub fn fixture_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(kind)
}

pub fn snippet_fixtures() -> Check {
    let mut docs = BTreeMap::new();
    let mut parsed = Vec::new();
    let mut errors = Vec::new();
    let mut files: Vec<String> =
        fs::read_dir(fixture_dir("snippets")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    for file in &files {
        let slot: Slot = file.trim_end_matches(".xml").parse().unwrap();
        match codec::parse(slot.category(), &fs::read(fixture_dir("snippets").join(file)).unwrap()) {
            Ok(doc) => {
                docs.insert(slot.category(), doc.clone());
                parsed.push((file, doc));
            }
            Err(e) => errors.push(format!("{file}: {e}")),
        }
    }
    let names = |c: ConfigCategory| -> Option<BTreeSet<String>> {
        let doc = docs.get(&c)?;
        Some(match &doc.body {
            ConfigBody::Connections(v) => v.iter().map(|x| x.name.clone()).collect(),
            ConfigBody::BusinessRoles(v) => v.iter().map(|x| x.name.clone()).collect(),
            ConfigBody::Databases(v) => v.iter().map(|x| x.name.clone()).collect(),
            _ => return None,
        })
    };
    let refs = ResolvedCrossRefs {
        connections: names(ConfigCategory::Connections),
        roles: names(ConfigCategory::BusinessRoles),
        databases: names(ConfigCategory::Databases),
    };
    for (file, doc) in &parsed {
        let report = validate_document(doc, &refs);
        if !report.is_empty() {
            errors.push(format!("{file}: {report}"));
        }
        let out = codec::serialize(doc);
        match fs::read(fixture_dir("golden").join(file)) {
            Ok(golden) if golden == out => {}
            Ok(_) => errors.push(format!("{file}: differs from golden file")),
            Err(e) => errors.push(format!("{file}: {e}")),
        }
        if codec::parse(doc.category(), &out).ok().as_ref() != Some(doc) {
            errors.push(format!("{file}: re-serialized form does not parse back"));
        }
    }
    if errors.is_empty() {
        Ok(format!("{} snippets, golden files byte-exact", files.len()))
    } else {
        fail(errors)
    }
}

#[derive(Debug, Clone)]
enum Op {
    Configure(usize, Slot),
    Commit(usize, Slot, ConfigDocument),
    Reset(usize, Slot),
    Read(usize, Query),
}

impl Op {
    fn tenant(&self) -> usize {
        match self {
            Op::Configure(t, _) | Op::Commit(t, _, _) | Op::Reset(t, _) | Op::Read(t, _) => *t,
        }
    }

    fn is_write(&self) -> bool {
        !matches!(self, Op::Read(..))
    }
}

fn random_ops(g: &mut Gen, tenants: usize, len: usize) -> Vec<Op> {
    let slots = all_slots();
    (0..len)
        .map(|_| {
            let t = g.rng.random_range(0..tenants);
            let slot = slots[g.rng.random_range(0..slots.len())].clone();
            match g.rng.random_range(0..10) {
                0 => Op::Configure(t, slot),
                1..=4 => {
                    let doc = g.doc(slot.category());
                    Op::Commit(t, slot, doc)
                }
                5 => Op::Reset(t, slot),
                _ => Op::Read(t, random_query(g)),
            }
        })
        .collect()
}

/// Runs `ops` on a fresh root; returns, per tenant, the answers to that
/// tenant's operations followed by its final fingerprint.
fn replay(defaults: &[(Slot, ConfigDocument)], tenants: &[TenantId], ops: &[Op]) -> (Vec<Vec<String>>, usize) {
    let dir = tempfile::tempdir().unwrap();
    let store = bootstrap(dir.path(), defaults);
    for t in tenants {
        store.register_tenant(t).unwrap();
    }
    drop(store);
    let tenancy = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
    let mut out = vec![Vec::new(); tenants.len()];
    let mut applied = 0;
    for op in ops {
        let i = op.tenant();
        let t = &tenants[i];
        let p = Principal::tenant(t.clone());
        let answer = match op {
            Op::Configure(_, slot) => format!("{:?}", tenancy.begin_configure(&p, t, slot).map(|(d, c)| (d, c)).map_err(|e| e.code())),
            Op::Commit(_, slot, doc) => {
                let mut doc = doc.clone();
                doc.version = tenancy.read_config(&p, t, slot).map(|r| r.version).unwrap_or(0);
                format!("{:?}", tenancy.commit(&p, t, slot, &doc).map_err(|e| e.code()))
            }
            Op::Reset(_, slot) => format!("{:?}", tenancy.reset(&p, t, slot).map_err(|e| e.code())),
            Op::Read(_, q) => format!("{:?}", system_answer(&tenancy, t, q)),
        };
        if op.is_write() && answer.starts_with("Ok") {
            applied += 1;
        }
        out[i].push(answer);
    }
    for (i, t) in tenants.iter().enumerate() {
        out[i].push(world::fingerprint(&tenancy, t).to_string());
    }
    (out, applied)
}

/// Metamorphic isolation: deleting one tenant's writes from a random
/// operation sequence changes nothing any other tenant observes.
pub fn isolation_metamorphic(sequences: usize, tenants: usize) -> Check {
    let ids: Vec<TenantId> = (1..=tenants).map(|i| tenant(&format!("T{i}"))).collect();
    let mut errors = Vec::new();
    let mut applied = 0;
    for s in 0..sequences {
        let mut g = Gen::new(0x1501 + s as u64, false);
        let defaults = g.world_defaults();
        let ops = random_ops(&mut g, tenants, 40);
        let a = g.rng.random_range(0..tenants);
        let (full, n) = replay(&defaults, &ids, &ops);
        applied += n;
        let without: Vec<Op> = ops.iter().filter(|op| !(op.tenant() == a && op.is_write())).cloned().collect();
        let (reduced, _) = replay(&defaults, &ids, &without);
        for i in (0..tenants).filter(|i| *i != a) {
            if full[i] != reduced[i] {
                let at = full[i].iter().zip(&reduced[i]).position(|(x, y)| x != y).unwrap_or(0);
                errors.push(format!("sequence {s}: {} changed when T{} writes were removed (answer {at})", ids[i], a + 1));
            }
        }
    }
    if errors.is_empty() {
        Ok(format!("{sequences} sequences x {tenants} tenants, {applied} writes applied, 0 violations"))
    } else {
        fail(errors)
    }
}

/// Every action of every tenant principal against every other tenant, at the
/// policy and through the facade.
pub fn cross_tenant_matrix(tenants: usize) -> Check {
    let ids: Vec<TenantId> = (1..=tenants).map(|i| tenant(&format!("T{i}"))).collect();
    let dir = tempfile::tempdir().unwrap();
    let store = Store::bootstrap(dir.path(), &vendor_defaults(), FAST).unwrap();
    for t in &ids {
        store.register_tenant(t).unwrap();
    }
    let tenancy = Tenancy::open(dir.path(), AuditLog::memory(), options()).unwrap();
    let mut errors = Vec::new();
    let mut cells = 0;
    let slot = Slot::from(ConfigCategory::Fields);
    let en = LangTag::new("en").unwrap();
    for own in &ids {
        let p = Principal::tenant(own.clone());
        for action in Action::ALL {
            for target in ids.iter().map(Some).chain([None]) {
                cells += 1;
                let want = if !action.is_tenant_action() {
                    Decision::Deny(DenyReason::ProviderOnly)
                } else if target == Some(own) {
                    Decision::Allow
                } else {
                    Decision::Deny(DenyReason::CrossTenant)
                };
                let got = decide(&p, action, target);
                if got != want {
                    errors.push(format!("{own} {action:?} on {target:?}: {got:?}"));
                }
            }
        }
        for other in ids.iter().filter(|t| *t != own) {
            let before = tenancy.audit().len();
            let doc = ConfigDocument::empty(ConfigCategory::Fields);
            let codes = [
                tenancy.read_config(&p, other, &slot).err().map(|e| e.code()),
                tenancy.config_overview(&p, other).err().map(|e| e.code()),
                tenancy.begin_configure(&p, other, &slot).err().map(|e| e.code()),
                tenancy.commit(&p, other, &slot, &doc).err().map(|e| e.code()),
                tenancy.reset(&p, other, &slot).err().map(|e| e.code()),
                tenancy.page_view(&p, other, "Page1", &en, "SP_ROLE").err().map(|e| e.code()),
                tenancy.bo_status(&p, other, "BO1").err().map(|e| e.code()),
                tenancy.backend_call(&p, other, "BE1").err().map(|e| e.code()),
                tenancy.role_profiles(&p, other, "SP_ROLE").err().map(|e| e.code()),
                tenancy.bol_access(&p, other, "SP_ROLE", "SALES_BOL").err().map(|e| e.code()),
                tenancy.database(&p, other, "DOMINING").err().map(|e| e.code()),
                tenancy.setting(&p, other, "k").err().map(|e| e.code()),
                tenancy.branding(&p, other).err().map(|e| e.code()),
                tenancy.dry_run(&p, other, "WF1").err().map(|e| e.code()),
            ];
            cells += codes.len();
            for (i, code) in codes.iter().enumerate() {
                if *code != Some("cross-tenant") {
                    errors.push(format!("{own} call {i} on {other}: {code:?}"));
                }
            }
            if tenancy.audit().len() - before != codes.len() as u64 {
                errors.push(format!("{own} on {other}: audit count off"));
            }
        }
        let provider_only = [
            tenancy.registry(&p).err().map(|e| e.code()),
            tenancy.metrics(&p).err().map(|e| e.code()),
            tenancy.default_location(&p, &slot).err().map(|e| e.code()),
            tenancy.register_tenant(&p, &tenant("NEW")).err().map(|e| e.code()),
            tenancy
                .assign_database(&p, own, DatabaseDescriptor { name: "X".into(), host: "h".into() })
                .err()
                .map(|e| e.code()),
        ];
        cells += provider_only.len();
        for (i, code) in provider_only.iter().enumerate() {
            if *code != Some("provider-only") {
                errors.push(format!("{own} provider call {i}: {code:?}"));
            }
        }
    }
    if errors.is_empty() {
        Ok(format!("{cells} cells, all denied as expected"))
    } else {
        fail(errors)
    }
}

pub fn digest_dir(dir: &Path) -> BTreeMap<String, String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), hex::encode(Sha256::digest(fs::read(e.path()).unwrap())))
        })
        .collect()
}

/// First configure copies the default value-for-value, and no operation
/// ever changes a default file.
pub fn copy_on_write(tenants: usize, ops: usize) -> Check {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::bootstrap(dir.path(), &vendor_defaults(), FAST).unwrap();
    let vendor: BTreeMap<String, String> = vendor_default_files()
        .into_iter()
        .map(|(slot, xml)| (slot.file_name(), hex::encode(Sha256::digest(xml.as_bytes()))))
        .collect();
    let defaults_dir = dir.path().join("defaults");
    let mut errors = Vec::new();
    if digest_dir(&defaults_dir) != vendor {
        errors.push("bootstrap wrote defaults that differ from the vendor files".into());
    }
    let ids: Vec<TenantId> = (1..=tenants).map(|i| tenant(&format!("T{i}"))).collect();
    for t in &ids {
        store.register_tenant(t).unwrap();
    }
    drop(store);
    let tenancy = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
    let defaults: BTreeMap<Slot, ConfigDocument> = vendor_defaults().into_iter().collect();
    for t in &ids {
        let p = Principal::tenant(t.clone());
        for (slot, default) in &defaults {
            match tenancy.begin_configure(&p, t, slot) {
                Ok((doc, true)) if doc.body == default.body && doc.version == 0 => {}
                other => errors.push(format!("{t} {slot}: {:?}", other.map(|(d, c)| (d.version, c)))),
            }
        }
    }
    let mut g = Gen::new(0xc0, false);
    let slots: Vec<Slot> = defaults.keys().cloned().collect();
    for _ in 0..ops {
        let t = &ids[g.rng.random_range(0..ids.len())];
        let p = Principal::tenant(t.clone());
        let slot = &slots[g.rng.random_range(0..slots.len())];
        if g.rng.random_bool(0.2) {
            let _ = tenancy.reset(&p, t, slot);
        } else {
            let mut doc = g.doc(slot.category());
            doc.version = tenancy.read_config(&p, t, slot).map(|r| r.version).unwrap_or(0);
            let _ = tenancy.commit(&p, t, slot, &doc);
        }
    }
    if digest_dir(&defaults_dir) != vendor {
        errors.push("a default file changed".into());
    }
    if errors.is_empty() {
        Ok(format!("{} first configures value-equal, {} defaults unchanged after {ops} writes", ids.len() * defaults.len(), vendor.len()))
    } else {
        fail(errors)
    }
}

pub fn resolver_oracle(worlds: u64, queries: usize) -> Check {
    let errors: Vec<String> = (0..worlds).flat_map(|seed| world::check_world(seed, queries)).collect();
    if errors.is_empty() {
        Ok(format!("{worlds} worlds, 0 mismatches"))
    } else {
        fail(errors)
    }
}

fn css_doc(entries: usize, tag: &str) -> ConfigDocument {
    ConfigDocument::new(ConfigBody::CssElements(
        (0..entries).map(|i| CssElement { name: format!("CSS{i}"), location: format!("/{tag}/{i}") }).collect(),
    ))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

/// Randomized commit/read interleaving; counts stale reads and loader calls
/// on warm reads, then compares warm and cold latency.
pub fn cache_freshness(ops: usize) -> Check {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::bootstrap(dir.path(), &vendor_defaults(), FAST).unwrap();
    let ids: Vec<TenantId> = (1..=3).map(|i| tenant(&format!("T{i}"))).collect();
    for t in &ids {
        store.register_tenant(t).unwrap();
    }
    drop(store);
    let tenancy = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
    let slot = Slot::from(ConfigCategory::CssElements);
    let en = LangTag::new("en").unwrap();
    let mut expected: BTreeMap<usize, (u64, String)> = BTreeMap::new();
    let mut warm_docs: BTreeSet<usize> = BTreeSet::new();
    let mut warm_views: BTreeSet<usize> = BTreeSet::new();
    let (mut stale, mut warm_reads, mut warm_loads) = (0, 0, 0);
    let mut g = Gen::new(0xcace, false);
    for n in 0..ops {
        let i = g.rng.random_range(0..ids.len());
        let t = &ids[i];
        let p = Principal::tenant(t.clone());
        let want = expected.get(&i).cloned().unwrap_or((0, "/path1/cssb2c".into()));
        match g.rng.random_range(0..4) {
            0 => {
                let mut doc = (*tenancy.read_config(&p, t, &slot).unwrap().doc).clone();
                let loc = format!("/{t}/{n}");
                if let ConfigBody::CssElements(v) = &mut doc.body {
                    v[0].location = loc.clone();
                }
                let version = tenancy.commit(&p, t, &slot, &doc).unwrap();
                expected.insert(i, (version, loc));
                warm_docs.remove(&i);
                warm_views.remove(&i);
            }
            1 => {
                let before = tenancy.metrics_unguarded().storage_loads;
                let view = tenancy.page_view(&p, t, "Page1", &en, "SP_ROLE").unwrap();
                let loads = tenancy.metrics_unguarded().storage_loads - before;
                if view.css[0].location != want.1 {
                    stale += 1;
                }
                if !warm_views.insert(i) {
                    warm_reads += 1;
                    warm_loads += loads;
                }
            }
            _ => {
                let before = tenancy.metrics_unguarded().storage_loads;
                let read = tenancy.read_config(&p, t, &slot).unwrap();
                let loads = tenancy.metrics_unguarded().storage_loads - before;
                if read.version != want.0 || read.doc.css_elements().unwrap()[0].location != want.1 {
                    stale += 1;
                }
                if !warm_docs.insert(i) {
                    warm_reads += 1;
                    warm_loads += loads;
                }
            }
        }
    }

    let t1 = &ids[0];
    let p = Principal::tenant(t1.clone());
    let version = tenancy.read_config(&p, t1, &slot).unwrap().version;
    tenancy.commit(&p, t1, &slot, &css_doc(100, "big").with_version(version)).unwrap();
    let cold: Vec<Duration> = (0..30)
        .map(|_| {
            let fresh = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
            let start = Instant::now();
            let doc = fresh.read_config(&p, t1, &slot).unwrap();
            let d = start.elapsed();
            assert_eq!(doc.doc.body.len(), 100);
            d
        })
        .collect();
    let warm: Vec<Duration> = (0..300)
        .map(|_| {
            let start = Instant::now();
            let doc = tenancy.read_config(&p, t1, &slot).unwrap();
            let d = start.elapsed();
            assert_eq!(doc.source, ConfigSource::Tenant);
            d
        })
        .collect();
    let (cold, warm) = (median(cold), median(warm));
    let ratio = cold.as_secs_f64() / warm.as_secs_f64().max(1e-9);
    let summary = format!(
        "{ops} ops, {stale} stale reads, {warm_loads} loader calls on {warm_reads} warm reads, cold {cold:.1?} / warm {warm:.1?} = {ratio:.1}x"
    );
    if stale == 0 && warm_loads == 0 && ratio >= 5.0 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

/// The six combinations of business object state and BOL grant.
pub fn workflow_truth_table() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::bootstrap(dir.path(), &vendor_defaults(), FAST).unwrap();
    let cases = [
        (true, Some(true), Verdict::Ok),
        (true, Some(false), Verdict::BolForbidden),
        (true, None, Verdict::BolForbidden),
        (false, Some(true), Verdict::BoDisabled),
        (false, Some(false), Verdict::BoDisabled),
        (false, None, Verdict::BoDisabled),
    ];
    let mut exact = 0;
    let mut errors = Vec::new();
    for (i, (enabled, grant, want)) in cases.iter().enumerate() {
        let t = tenant(&format!("W{i}"));
        store.register_tenant(&t).unwrap();
        world::force_commit(&store, &t, &Slot::from(ConfigCategory::FrontendBOs), ConfigDocument::new(ConfigBody::FrontendBOs(vec![BoToggle { bo_name: "BOX".into(), enabled: *enabled }])));
        world::force_commit(
            &store,
            &t,
            &Slot::from(ConfigCategory::KeyValues),
            ConfigDocument::new(ConfigBody::KeyValues(vec![KeyValueSetting { key: "bol.of.BOX".into(), value: SettingValue::Scalar("XBOL".into()) }])),
        );
        let grants = grant.map(|allowed| vec![BolGrant { bol_name: "XBOL".into(), allowed }]).unwrap_or_default();
        world::force_commit(
            &store,
            &t,
            &Slot::from(ConfigCategory::BolAccess),
            ConfigDocument::new(ConfigBody::BolAccess(vec![BolAccessRule { role_name: "SP_ROLE".into(), description: None, grants }])),
        );
        let tenancy = Tenancy::open(dir.path(), AuditLog::discard(), options()).unwrap();
        let wf = WorkflowDef {
            id: "WFX".into(),
            name: "x".into(),
            role_binding: "SP_ROLE".into(),
            tasks: vec![WorkflowTask { step_no: 1, activity_type: "a".into(), bo_name: "BOX".into(), method: "run".into(), rule: None }],
        };
        match tenancy.dry_run_def(&Principal::tenant(t.clone()), &t, &wf) {
            Ok(trace) if trace.steps.len() == 1 && trace.steps[0].verdict == *want => exact += 1,
            other => errors.push(format!("enabled={enabled} grant={grant:?}: {other:?}")),
        }
    }
    if errors.is_empty() {
        Ok(format!("{exact}/6 combinations exact"))
    } else {
        Err(format!("{exact}/6 combinations exact; {}", errors.join("; ")))
    }
}

/// Interrupted commits at every write stage, then a cold restart.
pub fn crash_atomicity(interruptions: usize) -> Check {
    let points = [
        CrashPoint::TenantTempPartial,
        CrashPoint::TenantTempWritten,
        CrashPoint::TenantRenamed,
        CrashPoint::RegistryTempPartial,
        CrashPoint::RegistryTempWritten,
    ];
    let dir = tempfile::tempdir().unwrap();
    Store::bootstrap(dir.path(), &vendor_defaults(), FAST).unwrap().register_tenant(&tenant("T1")).unwrap();
    let t1 = tenant("T1");
    let slot = Slot::from(ConfigCategory::CssElements);
    let mut errors = Vec::new();
    let mut outcomes = BTreeMap::new();
    for n in 0..interruptions {
        let point = points[n % points.len()];
        let store = Store::open(dir.path(), FAST).unwrap();
        let (old, _) = store.begin_configure(&t1, &slot).unwrap();
        let new = css_doc(1 + n % 7, &format!("n{n}")).with_version(old.version);
        store.inject_crash(point);
        match store.commit(&t1, &slot, &new) {
            Err(StoreError::Interrupted) => {}
            other => errors.push(format!("{n} {point:?}: commit returned {other:?}")),
        }
        drop(store);
        let tenancy = match Tenancy::open(dir.path(), AuditLog::discard(), options()) {
            Ok(t) => t,
            Err(e) => {
                errors.push(format!("{n} {point:?}: reopen failed: {e}"));
                continue;
            }
        };
        match tenancy.read_config(&Principal::tenant(t1.clone()), &t1, &slot) {
            Ok(r) if r.doc.body == old.body => *outcomes.entry("old").or_insert(0) += 1,
            Ok(r) if r.doc.body == new.body => *outcomes.entry("new").or_insert(0) += 1,
            Ok(_) => errors.push(format!("{n} {point:?}: neither old nor new")),
            Err(e) => errors.push(format!("{n} {point:?}: {e}")),
        }
    }
    if errors.is_empty() {
        Ok(format!("{interruptions} interruptions, every load parsed ({outcomes:?})"))
    } else {
        fail(errors)
    }
}
