use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};

use crate::codec::{parse, serialize};
use crate::model::{ConfigDocument, Slot, TenantId};

use super::central::{default_location, tenant_location, CentralRegistry, DatabaseDescriptor, RegistrySection, TenantOverride, CENTRAL_FILE};
use super::StoreError;

const LOCK_FILE: &str = ".lock";
const TMP_MARKER: &str = ".tmp.";

#[derive(Debug, Clone, Copy)]
pub struct StoreOptions {
    /// fsync files and directories after each write.
    pub fsync: bool,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions { fsync: true }
    }
}

/// Points where a test can make a write stop dead, as if the process had
/// been killed there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrashPoint {
    /// Half of the tenant file's temp copy is on disk.
    TenantTempPartial,
    /// Tenant temp file complete, not yet renamed.
    TenantTempWritten,
    /// Tenant file renamed into place, registry not yet updated.
    TenantRenamed,
    RegistryTempPartial,
    RegistryTempWritten,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Tenant,
    Registry,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct FileStamp {
    len: u64,
    modified: Option<std::time::SystemTime>,
    #[cfg(unix)]
    ino: u64,
}

impl FileStamp {
    fn of(path: &Path) -> Result<Self, StoreError> {
        let meta = fs::metadata(path).map_err(|e| StoreError::io(path, e))?;
        Ok(FileStamp {
            len: meta.len(),
            modified: meta.modified().ok(),
            #[cfg(unix)]
            ino: std::os::unix::fs::MetadataExt::ino(&meta),
        })
    }
}

struct Loaded {
    registry: Arc<CentralRegistry>,
    stamp: FileStamp,
}

/// Disk-backed registry. Readers are unrestricted; every mutation runs under
/// an in-process mutex plus an exclusive lock on `<root>/.lock`, and re-reads
/// `central.xml` first, so several processes can share one data root.
pub struct Store {
    root: PathBuf,
    options: StoreOptions,
    state: RwLock<Loaded>,
    writer: Mutex<()>,
    crash: Mutex<Option<CrashPoint>>,
    tmp_counter: AtomicU64,
}

fn read(path: &Path) -> Result<Vec<u8>, StoreError> {
    fs::read(path).map_err(|e| StoreError::io(path, e))
}

/// Reads `central.xml` and checks that every default parses and every
/// referenced tenant file exists.
pub(crate) fn load_registry(root: &Path) -> Result<CentralRegistry, StoreError> {
    let reg = CentralRegistry::from_xml(&read(&root.join(CENTRAL_FILE))?)?;
    for section in reg.sections.values() {
        let path = root.join(&section.default_location);
        if !path.is_file() {
            return Err(StoreError::DanglingLocation(section.default_location.clone()));
        }
        parse(section.slot.category(), &read(&path)?).map_err(|e| {
            StoreError::RegistryCorrupt(format!("default {} does not parse: {e}", section.default_location))
        })?;
        for ov in section.tenant_locations.values() {
            if !root.join(&ov.location).is_file() {
                return Err(StoreError::DanglingLocation(ov.location.clone()));
            }
        }
    }
    Ok(reg)
}

impl Store {
    /// Creates a fresh data root holding only vendor defaults.
    pub fn bootstrap(root: &Path, defaults: &[(Slot, ConfigDocument)], options: StoreOptions) -> Result<Store, StoreError> {
        fs::create_dir_all(root.join("defaults")).map_err(|e| StoreError::io(root, e))?;
        fs::create_dir_all(root.join("tenants")).map_err(|e| StoreError::io(root, e))?;
        {
            let _lock = lock_root(root)?;
            if root.join(CENTRAL_FILE).exists() {
                return Err(StoreError::AlreadyInitialized);
            }
            let mut reg = CentralRegistry::default();
            for (slot, doc) in defaults {
                assert_eq!(slot.category(), doc.category(), "default for {slot} has the wrong category");
                let location = default_location(slot);
                write_atomic(&root.join(&location), &serialize(doc), options.fsync)?;
                reg.sections.insert(
                    slot.clone(),
                    RegistrySection { slot: slot.clone(), default_location: location, tenant_locations: Default::default() },
                );
            }
            write_atomic(&root.join(CENTRAL_FILE), &reg.to_xml(), options.fsync)?;
        }
        Store::open(root, options)
    }

    pub fn open(root: &Path, options: StoreOptions) -> Result<Store, StoreError> {
        let registry = {
            let _lock = lock_root(root)?;
            remove_stale_temps(root)?;
            load_registry(root)?
        };
        let stamp = FileStamp::of(&root.join(CENTRAL_FILE))?;
        Ok(Store {
            root: root.to_path_buf(),
            options,
            state: RwLock::new(Loaded { registry: Arc::new(registry), stamp }),
            writer: Mutex::new(()),
            crash: Mutex::new(None),
            tmp_counter: AtomicU64::new(0),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Current registry, re-read if another process replaced `central.xml`.
    pub fn registry(&self) -> Result<Arc<CentralRegistry>, StoreError> {
        let path = self.root.join(CENTRAL_FILE);
        let stamp = FileStamp::of(&path)?;
        {
            let state = self.state.read();
            if state.stamp == stamp {
                return Ok(state.registry.clone());
            }
        }
        let mut state = self.state.write();
        let stamp = FileStamp::of(&path)?;
        if state.stamp != stamp {
            state.registry = Arc::new(CentralRegistry::from_xml(&read(&path)?)?);
            state.stamp = stamp;
        }
        Ok(state.registry.clone())
    }

    /// Full re-validation from disk, as at startup.
    pub fn reload(&self) -> Result<Arc<CentralRegistry>, StoreError> {
        let reg = Arc::new(load_registry(&self.root)?);
        let stamp = FileStamp::of(&self.root.join(CENTRAL_FILE))?;
        *self.state.write() = Loaded { registry: reg.clone(), stamp };
        Ok(reg)
    }

    pub fn read_document(&self, location: &str, slot: &Slot) -> Result<ConfigDocument, StoreError> {
        let bytes = read(&self.root.join(location))?;
        parse(slot.category(), &bytes).map_err(|source| StoreError::BadDocument { location: location.to_string(), source })
    }

    /// Makes the next file write stop at `point`.
    #[doc(hidden)]
    pub fn inject_crash(&self, point: CrashPoint) {
        *self.crash.lock() = Some(point);
    }

    /// Returns the tenant's document for `slot`, copying the vendor default
    /// into the tenant directory first if the tenant never configured it.
    /// The flag is `true` when a copy was made.
    pub fn begin_configure(&self, tenant: &TenantId, slot: &Slot) -> Result<(ConfigDocument, bool), StoreError> {
        let reg = self.registry()?;
        if let Some(ov) = reg.lookup(tenant, slot) {
            return Ok((self.read_document(&ov.location, slot)?.with_version(ov.version), false));
        }
        self.mutate(|reg| {
            if !reg.has_tenant(tenant) {
                return Err(StoreError::UnknownTenant(tenant.clone()));
            }
            let revision = reg.revision + 1;
            let section = reg.sections.get_mut(slot).ok_or_else(|| StoreError::UnknownSlot(slot.clone()))?;
            if let Some(ov) = section.tenant_locations.get(tenant) {
                let doc = self.read_document(&ov.location, slot)?.with_version(ov.version);
                return Ok((doc, false));
            }
            let bytes = read(&self.root.join(&section.default_location))?;
            let doc = parse(slot.category(), &bytes).map_err(|source| StoreError::BadDocument {
                location: section.default_location.clone(),
                source,
            })?;
            let location = tenant_location(tenant, slot);
            self.write_file(&location, &bytes, FileKind::Tenant)?;
            section.tenant_locations.insert(tenant.clone(), TenantOverride { location, version: 0, revision });
            reg.revision = revision;
            Ok((doc, true))
        })
    }

    /// Stores `doc` as the tenant's new document. `doc.version` must equal
    /// the stored version; returns the new one.
    pub fn commit(&self, tenant: &TenantId, slot: &Slot, doc: &ConfigDocument) -> Result<u64, StoreError> {
        self.mutate(|reg| {
            let revision = reg.revision + 1;
            let ov = reg
                .sections
                .get_mut(slot)
                .and_then(|s| s.tenant_locations.get_mut(tenant))
                .ok_or_else(|| StoreError::NotConfigured { tenant: tenant.clone(), slot: slot.clone() })?;
            if doc.version != ov.version {
                return Err(StoreError::VersionConflict { current: ov.version, given: doc.version });
            }
            self.write_file(&ov.location, &serialize(doc), FileKind::Tenant)?;
            ov.version += 1;
            ov.revision = revision;
            let version = ov.version;
            reg.revision = revision;
            Ok(version)
        })
    }

    /// Drops the tenant's override so the default applies again. Returns
    /// whether there was one.
    pub fn reset(&self, tenant: &TenantId, slot: &Slot) -> Result<bool, StoreError> {
        let removed = self.mutate(|reg| {
            let section = reg.sections.get_mut(slot).ok_or_else(|| StoreError::UnknownSlot(slot.clone()))?;
            let removed = section.tenant_locations.remove(tenant);
            if removed.is_some() {
                reg.revision += 1;
            }
            Ok(removed)
        })?;
        if let Some(ov) = &removed {
            // The registry no longer points here, so a leftover file is inert.
            let _ = fs::remove_file(self.root.join(&ov.location));
        }
        Ok(removed.is_some())
    }

    pub fn register_tenant(&self, tenant: &TenantId) -> Result<(), StoreError> {
        self.mutate(|reg| {
            if reg.has_tenant(tenant) {
                return Err(StoreError::TenantExists(tenant.clone()));
            }
            let dir = self.root.join("tenants").join(tenant.as_str());
            fs::create_dir_all(&dir).map_err(|e| StoreError::io(dir, e))?;
            reg.tenants.insert(tenant.clone(), None);
            reg.revision += 1;
            Ok(())
        })
    }

    /// Assigns `db` to `tenant`, replacing any previous assignment of that
    /// tenant. A database owned by another tenant is refused.
    pub fn assign_database(&self, tenant: &TenantId, db: DatabaseDescriptor) -> Result<(), StoreError> {
        self.mutate(|reg| {
            if !reg.has_tenant(tenant) {
                return Err(StoreError::UnknownTenant(tenant.clone()));
            }
            if let Some((owner, _)) = reg.tenants.iter().find(|(t, d)| *t != tenant && d.as_ref() == Some(&db)) {
                return Err(StoreError::DatabaseAlreadyAssigned { db: db.name, host: db.host, owner: owner.clone() });
            }
            reg.tenants.insert(tenant.clone(), Some(db));
            reg.revision += 1;
            Ok(())
        })
    }

    fn mutate<T>(&self, f: impl FnOnce(&mut CentralRegistry) -> Result<T, StoreError>) -> Result<T, StoreError> {
        let _guard = self.writer.lock();
        let _lock = lock_root(&self.root)?;
        let path = self.root.join(CENTRAL_FILE);
        let current = CentralRegistry::from_xml(&read(&path)?)?;
        let mut next = current.clone();
        let out = f(&mut next)?;
        if next != current {
            self.write_file(CENTRAL_FILE, &next.to_xml(), FileKind::Registry)?;
        }
        let stamp = FileStamp::of(&path)?;
        *self.state.write() = Loaded { registry: Arc::new(next), stamp };
        Ok(out)
    }

    fn write_file(&self, rel: &str, bytes: &[u8], kind: FileKind) -> Result<(), StoreError> {
        let path = self.root.join(rel);
        let crash = {
            let mut slot = self.crash.lock();
            let hit = match (*slot, kind) {
                (Some(CrashPoint::TenantTempPartial | CrashPoint::TenantTempWritten | CrashPoint::TenantRenamed), FileKind::Tenant)
                | (Some(CrashPoint::RegistryTempPartial | CrashPoint::RegistryTempWritten), FileKind::Registry) => slot.take(),
                _ => None,
            };
            hit
        };
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
        let tmp = path.with_file_name(format!(
            "{name}{TMP_MARKER}{}.{}",
            std::process::id(),
            self.tmp_counter.fetch_add(1, Ordering::Relaxed)
        ));
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| StoreError::io(parent, e))?;
        }
        let mut file = File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
        if matches!(crash, Some(CrashPoint::TenantTempPartial | CrashPoint::RegistryTempPartial)) {
            file.write_all(&bytes[..bytes.len() / 2]).map_err(|e| StoreError::io(&tmp, e))?;
            return Err(StoreError::Interrupted);
        }
        file.write_all(bytes).map_err(|e| StoreError::io(&tmp, e))?;
        if self.options.fsync {
            file.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
        }
        drop(file);
        if matches!(crash, Some(CrashPoint::TenantTempWritten | CrashPoint::RegistryTempWritten)) {
            return Err(StoreError::Interrupted);
        }
        fs::rename(&tmp, &path).map_err(|e| StoreError::io(&path, e))?;
        if self.options.fsync {
            sync_dir(&path)?;
        }
        if crash == Some(CrashPoint::TenantRenamed) {
            return Err(StoreError::Interrupted);
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8], fsync: bool) -> Result<(), StoreError> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = path.with_file_name(format!("{name}{TMP_MARKER}{}.boot", std::process::id()));
    let mut file = File::create(&tmp).map_err(|e| StoreError::io(&tmp, e))?;
    file.write_all(bytes).map_err(|e| StoreError::io(&tmp, e))?;
    if fsync {
        file.sync_all().map_err(|e| StoreError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| StoreError::io(path, e))?;
    if fsync {
        sync_dir(path)?;
    }
    Ok(())
}

fn sync_dir(path: &Path) -> Result<(), StoreError> {
    #[cfg(unix)]
    if let Some(parent) = path.parent() {
        File::open(parent).and_then(|d| d.sync_all()).map_err(|e| StoreError::io(parent, e))?;
    }
    Ok(())
}

/// Exclusive advisory lock on `<root>/.lock`, released on drop.
fn lock_root(root: &Path) -> Result<File, StoreError> {
    let path = root.join(LOCK_FILE);
    let file = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&path)
        .map_err(|e| StoreError::io(&path, e))?;
    file.lock().map_err(|e| StoreError::io(&path, e))?;
    Ok(file)
}

fn remove_stale_temps(root: &Path) -> Result<(), StoreError> {
    let mut dirs = vec![root.to_path_buf(), root.join("defaults")];
    if let Ok(entries) = fs::read_dir(root.join("tenants")) {
        dirs.extend(entries.flatten().map(|e| e.path()).filter(|p| p.is_dir()));
    }
    for dir in dirs {
        let Ok(entries) = fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            if entry.file_name().to_string_lossy().contains(TMP_MARKER) {
                fs::remove_file(entry.path()).map_err(|e| StoreError::io(entry.path(), e))?;
            }
        }
    }
    Ok(())
}
