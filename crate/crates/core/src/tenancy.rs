//! The guarded surface over registry, resolver and caches.
//!
//! Every public operation takes the calling [`Principal`], asks the guard
//! exactly once (which writes one audit record) and only then touches
//! storage. Reads see a consistent snapshot: commits hold the write side of a
//! gate that each resolution holds the read side of.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;
use serde::Serialize;

use crate::cache::{CacheStats, VersionedCache, DEFAULT_CAPACITY};
use crate::codec::{schema, CategorySchema};
use crate::error::Error;
use crate::guard::{Action, AuditLog, Decision, Guard, Principal};
use crate::model::{
    validate_document, ConfigCategory, ConfigDocument, LangTag, ResolvedCrossRefs, Slot, TenantId, ValidationReport,
    WorkflowDef,
};
use crate::registry::{CentralRegistry, DatabaseDescriptor, Store, StoreOptions};
use crate::resolver::{self, DocSource, ResolveError, ResolvedPageView};
use crate::workflow::{self, DryRunTrace};

#[derive(Debug, Clone, Copy)]
pub struct TenancyOptions {
    pub store: StoreOptions,
    /// Entry bound for each of the document and page-view caches.
    pub cache_capacity: usize,
}

impl Default for TenancyOptions {
    fn default() -> Self {
        TenancyOptions { store: StoreOptions::default(), cache_capacity: DEFAULT_CAPACITY }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DocKey {
    Default(Slot),
    Tenant(TenantId, Slot),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ViewKey {
    pub tenant: TenantId,
    pub page: String,
    pub language: LangTag,
    pub role: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigSource {
    Default,
    Tenant,
}

impl ConfigSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigSource::Default => "default",
            ConfigSource::Tenant => "tenant",
        }
    }
}

/// A tenant's effective document for one slot.
#[derive(Debug, Clone)]
pub struct ConfigRead {
    pub doc: Arc<ConfigDocument>,
    pub source: ConfigSource,
    /// The version a write must name to replace this document.
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlotStatus {
    pub slot: Slot,
    pub source: ConfigSource,
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryInfo {
    pub category: ConfigCategory,
    pub per_language: bool,
    pub schema: CategorySchema,
}

/// The fifteen configuration categories with their element layout.
pub fn category_listing() -> Vec<CategoryInfo> {
    ConfigCategory::ALL
        .into_iter()
        .map(|c| CategoryInfo { category: c, per_language: c.is_per_language(), schema: schema(c) })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub documents: CacheStats,
    pub page_views: CacheStats,
    pub storage_loads: u64,
    pub audit_records: u64,
}

impl Metrics {
    /// `name value` lines.
    pub fn exposition(&self) -> String {
        let mut out = self.documents.exposition("tenantconf_document_cache");
        out.push_str(&self.page_views.exposition("tenantconf_page_view_cache"));
        out.push_str(&format!("tenantconf_storage_loads {}\n", self.storage_loads));
        out.push_str(&format!("tenantconf_audit_records {}\n", self.audit_records));
        out
    }
}

pub struct Tenancy {
    store: Store,
    guard: Guard,
    docs: VersionedCache<DocKey, u64, ConfigDocument>,
    views: VersionedCache<ViewKey, Vec<u64>, ResolvedPageView>,
    gate: RwLock<()>,
    storage_loads: AtomicU64,
}

/// Resolution view of one tenant at one registry state.
struct Snapshot<'a> {
    tenancy: &'a Tenancy,
    registry: Arc<CentralRegistry>,
    tenant: TenantId,
}

impl Snapshot<'_> {
    /// Cache stamp of the effective document: the override's revision, or 0
    /// for the default. `None` if the registry has no such slot.
    fn stamp(&self, slot: &Slot) -> Option<u64> {
        let section = self.registry.section(slot)?;
        Some(section.tenant_locations.get(&self.tenant).map_or(0, |ov| ov.revision))
    }

    fn read(&self, slot: &Slot) -> Result<(Arc<ConfigDocument>, ConfigSource), ResolveError> {
        let section = self.registry.section(slot).ok_or_else(|| ResolveError::UnknownCategory(slot.clone()))?;
        let (key, stamp, location, version, source) = match section.tenant_locations.get(&self.tenant) {
            Some(ov) => (
                DocKey::Tenant(self.tenant.clone(), slot.clone()),
                ov.revision,
                ov.location.as_str(),
                ov.version,
                ConfigSource::Tenant,
            ),
            None => (DocKey::Default(slot.clone()), 0, section.default_location.as_str(), 0, ConfigSource::Default),
        };
        let t = self.tenancy;
        let doc = t.docs.get_or_load(&key, &stamp, || {
            t.storage_loads.fetch_add(1, Ordering::Relaxed);
            t.store
                .read_document(location, slot)
                .map(|d| d.with_version(version))
                .map_err(|e| ResolveError::Storage(e.to_string()))
        })?;
        Ok((doc, source))
    }

    fn cross_refs(&self, category: ConfigCategory) -> Result<ResolvedCrossRefs, ResolveError> {
        let names = |c: ConfigCategory| -> Result<_, ResolveError> {
            let doc = self.document(&Slot::from(c))?;
            Ok(Some(match c {
                ConfigCategory::Connections => doc.connections().unwrap().iter().map(|x| x.name.clone()).collect(),
                ConfigCategory::BusinessRoles => doc.business_roles().unwrap().iter().map(|x| x.name.clone()).collect(),
                _ => doc.databases().unwrap().iter().map(|x| x.name.clone()).collect(),
            }))
        };
        let mut refs = ResolvedCrossRefs::default();
        match category {
            ConfigCategory::BackendBindings => refs.connections = names(ConfigCategory::Connections)?,
            ConfigCategory::BolAccess | ConfigCategory::Workflows => refs.roles = names(ConfigCategory::BusinessRoles)?,
            ConfigCategory::DataObjects => refs.databases = names(ConfigCategory::Databases)?,
            _ => {}
        }
        Ok(refs)
    }
}

impl DocSource for Snapshot<'_> {
    fn tenant(&self) -> &TenantId {
        &self.tenant
    }

    fn document(&self, slot: &Slot) -> Result<Arc<ConfigDocument>, ResolveError> {
        self.read(slot).map(|(doc, _)| doc)
    }
}

impl Tenancy {
    pub fn open(root: &Path, audit: AuditLog, options: TenancyOptions) -> Result<Tenancy, Error> {
        Ok(Tenancy {
            store: Store::open(root, options.store)?,
            guard: Guard::new(audit),
            docs: VersionedCache::new(options.cache_capacity),
            views: VersionedCache::new(options.cache_capacity),
            gate: RwLock::new(()),
            storage_loads: AtomicU64::new(0),
        })
    }

    pub fn root(&self) -> &Path {
        self.store.root()
    }

    pub fn audit(&self) -> &AuditLog {
        self.guard.audit()
    }

    fn authorize(&self, p: &Principal, action: Action, tenant: Option<&TenantId>, slot: Option<&Slot>) -> Result<(), Error> {
        match self.guard.authorize(p, action, tenant, slot) {
            Decision::Allow => Ok(()),
            Decision::Deny(reason) => Err(Error::Denied(reason)),
        }
    }

    fn snapshot(&self, tenant: &TenantId) -> Result<Snapshot<'_>, Error> {
        let registry = self.store.registry()?;
        if !registry.has_tenant(tenant) {
            return Err(Error::UnknownTenant(tenant.clone()));
        }
        Ok(Snapshot { tenancy: self, registry, tenant: tenant.clone() })
    }

    /// Runs `f` on a consistent snapshot after a `Read` authorization.
    fn read<T>(
        &self,
        p: &Principal,
        tenant: &TenantId,
        slot: Option<&Slot>,
        f: impl FnOnce(&Snapshot) -> Result<T, ResolveError>,
    ) -> Result<T, Error> {
        self.authorize(p, Action::Read, Some(tenant), slot)?;
        let _gate = self.gate.read();
        let snap = self.snapshot(tenant)?;
        Ok(f(&snap)?)
    }

    fn invalidate(&self, tenant: &TenantId, slot: &Slot) {
        self.docs.invalidate(&DocKey::Tenant(tenant.clone(), slot.clone()));
        self.views.invalidate_where(|k| &k.tenant == tenant);
    }

    /// The tenant's effective document for `slot`.
    pub fn read_config(&self, p: &Principal, tenant: &TenantId, slot: &Slot) -> Result<ConfigRead, Error> {
        self.read(p, tenant, Some(slot), |snap| {
            let (doc, source) = snap.read(slot)?;
            Ok(ConfigRead { version: doc.version, doc, source })
        })
    }

    /// Source and version of every slot for the tenant.
    pub fn config_overview(&self, p: &Principal, tenant: &TenantId) -> Result<Vec<SlotStatus>, Error> {
        self.read(p, tenant, None, |snap| {
            Ok(snap
                .registry
                .sections
                .values()
                .map(|s| match s.tenant_locations.get(tenant) {
                    Some(ov) => SlotStatus { slot: s.slot.clone(), source: ConfigSource::Tenant, version: ov.version },
                    None => SlotStatus { slot: s.slot.clone(), source: ConfigSource::Default, version: 0 },
                })
                .collect())
        })
    }

    /// Returns the tenant's own copy of `slot`, copying the default first if
    /// needed. The flag is `true` when a copy was made.
    pub fn begin_configure(&self, p: &Principal, tenant: &TenantId, slot: &Slot) -> Result<(ConfigDocument, bool), Error> {
        self.authorize(p, Action::BeginConfigure, Some(tenant), Some(slot))?;
        let _gate = self.gate.write();
        self.snapshot(tenant)?;
        let (doc, created) = self.store.begin_configure(tenant, slot)?;
        if created {
            self.invalidate(tenant, slot);
        }
        Ok((doc, created))
    }

    /// Replaces the tenant's document for `slot` with `doc`, whose `version`
    /// must be the current one (0 while the default applies). The document is
    /// validated against the tenant's other resolved documents first.
    pub fn commit(&self, p: &Principal, tenant: &TenantId, slot: &Slot, doc: &ConfigDocument) -> Result<u64, Error> {
        self.authorize(p, Action::Write, Some(tenant), Some(slot))?;
        if doc.category() != slot.category() {
            return Err(Error::BadRequest(format!("document is {}, slot is {slot}", doc.category())));
        }
        let _gate = self.gate.write();
        let snap = self.snapshot(tenant)?;
        if snap.registry.section(slot).is_none() {
            return Err(Error::UnknownCategory(slot.to_string()));
        }
        let current = snap.registry.lookup(tenant, slot).map_or(0, |ov| ov.version);
        if doc.version != current {
            return Err(Error::VersionConflict { current, given: doc.version });
        }
        let report = validate_document(doc, &snap.cross_refs(slot.category())?);
        if !report.is_empty() {
            return Err(Error::Validation(report));
        }
        if snap.registry.lookup(tenant, slot).is_none() {
            self.store.begin_configure(tenant, slot)?;
        }
        let result = self.store.commit(tenant, slot, doc);
        self.invalidate(tenant, slot);
        Ok(result?)
    }

    /// Drops the tenant's document so the default applies again. Returns
    /// whether there was one.
    pub fn reset(&self, p: &Principal, tenant: &TenantId, slot: &Slot) -> Result<bool, Error> {
        self.authorize(p, Action::Write, Some(tenant), Some(slot))?;
        let _gate = self.gate.write();
        let snap = self.snapshot(tenant)?;
        if snap.registry.section(slot).is_none() {
            return Err(Error::UnknownCategory(slot.to_string()));
        }
        let removed = self.store.reset(tenant, slot)?;
        self.invalidate(tenant, slot);
        Ok(removed)
    }

    pub fn register_tenant(&self, p: &Principal, tenant: &TenantId) -> Result<(), Error> {
        self.authorize(p, Action::RegisterTenant, Some(tenant), None)?;
        let _gate = self.gate.write();
        Ok(self.store.register_tenant(tenant)?)
    }

    pub fn assign_database(&self, p: &Principal, tenant: &TenantId, db: DatabaseDescriptor) -> Result<(), Error> {
        self.authorize(p, Action::DbAssign, Some(tenant), None)?;
        let _gate = self.gate.write();
        Ok(self.store.assign_database(tenant, db)?)
    }

    /// The central registry, for the provider.
    pub fn registry(&self, p: &Principal) -> Result<Arc<CentralRegistry>, Error> {
        self.authorize(p, Action::RegistryRead, None, None)?;
        Ok(self.store.registry()?)
    }

    /// Vendor default location of `slot`, for the provider.
    pub fn default_location(&self, p: &Principal, slot: &Slot) -> Result<String, Error> {
        self.authorize(p, Action::RegistryRead, None, Some(slot))?;
        let reg = self.store.registry()?;
        reg.section(slot).map(|s| s.default_location.clone()).ok_or_else(|| Error::UnknownCategory(slot.to_string()))
    }

    /// Cache and audit counters, for the provider.
    pub fn metrics(&self, p: &Principal) -> Result<Metrics, Error> {
        self.authorize(p, Action::RegistryRead, None, None)?;
        Ok(self.metrics_unguarded())
    }

    /// Counters only; carries no tenant data.
    pub fn metrics_unguarded(&self) -> Metrics {
        Metrics {
            documents: self.docs.stats(),
            page_views: self.views.stats(),
            storage_loads: self.storage_loads.load(Ordering::Relaxed),
            audit_records: self.guard.audit().len(),
        }
    }

    pub fn page_view(
        &self,
        p: &Principal,
        tenant: &TenantId,
        page: &str,
        language: &LangTag,
        role: &str,
    ) -> Result<Arc<ResolvedPageView>, Error> {
        self.read(p, tenant, None, |snap| {
            let stamp: Option<Vec<u64>> = resolver::page_view_inputs(language).iter().map(|s| snap.stamp(s)).collect();
            match stamp {
                Some(stamp) => {
                    let key = ViewKey {
                        tenant: tenant.clone(),
                        page: page.to_string(),
                        language: language.clone(),
                        role: role.to_string(),
                    };
                    self.views.get_or_load(&key, &stamp, || resolver::resolve_page_view(snap, page, language, role))
                }
                None => resolver::resolve_page_view(snap, page, language, role).map(Arc::new),
            }
        })
    }

    pub fn bo_status(&self, p: &Principal, tenant: &TenantId, bo: &str) -> Result<resolver::BoStatus, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::FrontendBOs)), |s| resolver::check_bo_enabled(s, bo))
    }

    pub fn backend_call(&self, p: &Principal, tenant: &TenantId, be: &str) -> Result<resolver::BackendCallPlan, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::BackendBindings)), |s| resolver::resolve_backend_call(s, be))
    }

    pub fn role_profiles(&self, p: &Principal, tenant: &TenantId, role: &str) -> Result<resolver::RoleProfiles, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::BusinessRoles)), |s| resolver::resolve_role_profiles(s, role))
    }

    pub fn bol_access(&self, p: &Principal, tenant: &TenantId, role: &str, bol: &str) -> Result<resolver::BolDecision, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::BolAccess)), |s| resolver::check_bol_access(s, role, bol))
    }

    pub fn database(&self, p: &Principal, tenant: &TenantId, do_name: &str) -> Result<resolver::DatabaseRoute, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::Databases)), |s| resolver::resolve_database(s, do_name))
    }

    pub fn setting(&self, p: &Principal, tenant: &TenantId, key: &str) -> Result<resolver::SettingLookup, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::KeyValues)), |s| resolver::get_setting(s, key))
    }

    pub fn branding(&self, p: &Principal, tenant: &TenantId) -> Result<resolver::Branding, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::KeyValues)), |s| resolver::tenant_branding(s))
    }

    pub fn validate_workflow(&self, p: &Principal, tenant: &TenantId, wf: &WorkflowDef) -> Result<ValidationReport, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::Workflows)), |s| workflow::validate_workflow(s, wf))
    }

    /// Dry run of the tenant's stored workflow `id`.
    pub fn dry_run(&self, p: &Principal, tenant: &TenantId, id: &str) -> Result<DryRunTrace, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::Workflows)), |s| {
            workflow::dry_run(s, &workflow::find_workflow(s, id)?)
        })
    }

    /// Dry run of a workflow supplied by the caller.
    pub fn dry_run_def(&self, p: &Principal, tenant: &TenantId, wf: &WorkflowDef) -> Result<DryRunTrace, Error> {
        self.read(p, tenant, Some(&Slot::from(ConfigCategory::Workflows)), |s| workflow::dry_run(s, wf))
    }
}
