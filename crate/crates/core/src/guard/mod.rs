//! Secure configuration reader: every access is decided here and recorded in
//! an append-only audit log.

mod tokens;

use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use parking_lot::Mutex;
use serde::{Serialize, Serializer};

use crate::model::{Slot, TenantId};

pub use tokens::{TokenError, TokenTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrincipalKind {
    Tenant(TenantId),
    Provider,
}

/// Authenticated caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Principal {
    pub kind: PrincipalKind,
    /// Credential the caller presented; opaque to the policy.
    pub token: String,
}

impl Principal {
    pub fn tenant(id: TenantId) -> Self {
        Principal { kind: PrincipalKind::Tenant(id), token: String::new() }
    }

    pub fn provider() -> Self {
        Principal { kind: PrincipalKind::Provider, token: String::new() }
    }

    pub fn tenant_id(&self) -> Option<&TenantId> {
        match &self.kind {
            PrincipalKind::Tenant(t) => Some(t),
            PrincipalKind::Provider => None,
        }
    }

    pub fn is_provider(&self) -> bool {
        self.kind == PrincipalKind::Provider
    }
}

impl fmt::Display for Principal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PrincipalKind::Tenant(t) => write!(f, "tenant:{t}"),
            PrincipalKind::Provider => f.write_str("provider"),
        }
    }
}

impl Serialize for Principal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Action {
    Read,
    Write,
    BeginConfigure,
    RegistryRead,
    DbAssign,
    RegisterTenant,
}

impl Action {
    pub const ALL: [Action; 6] =
        [Action::Read, Action::Write, Action::BeginConfigure, Action::RegistryRead, Action::DbAssign, Action::RegisterTenant];

    /// Actions a tenant may perform on its own configuration.
    pub fn is_tenant_action(self) -> bool {
        matches!(self, Action::Read | Action::Write | Action::BeginConfigure)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DenyReason {
    #[serde(rename = "cross-tenant")]
    CrossTenant,
    #[serde(rename = "provider-only")]
    ProviderOnly,
}

impl DenyReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DenyReason::CrossTenant => "cross-tenant",
            DenyReason::ProviderOnly => "provider-only",
        }
    }
}

impl fmt::Display for DenyReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Allow,
    Deny(DenyReason),
}

impl Decision {
    pub fn is_allowed(self) -> bool {
        self == Decision::Allow
    }
}

/// The access policy, without side effects.
///
/// A tenant may read, write and configure its own documents and nothing
/// else; the provider may do everything.
pub fn decide(p: &Principal, action: Action, tenant: Option<&TenantId>) -> Decision {
    match &p.kind {
        PrincipalKind::Provider => Decision::Allow,
        PrincipalKind::Tenant(_) if !action.is_tenant_action() => Decision::Deny(DenyReason::ProviderOnly),
        PrincipalKind::Tenant(own) if Some(own) == tenant => Decision::Allow,
        PrincipalKind::Tenant(_) => Decision::Deny(DenyReason::CrossTenant),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Allowed,
    Denied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    #[serde(serialize_with = "millis")]
    pub ts: DateTime<Utc>,
    pub principal: Principal,
    pub action: Action,
    pub tenant: Option<TenantId>,
    pub category: Option<Slot>,
    pub outcome: Outcome,
}

fn millis<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::Millis, true))
}

enum Sink {
    Memory(Vec<AuditRecord>),
    File(File),
    Discard,
}

struct AuditInner {
    sink: Sink,
    last: Option<DateTime<Utc>>,
    count: u64,
}

/// Append-only audit trail. Appends are serialized; timestamps never go
/// backwards within one log.
pub struct AuditLog {
    inner: Mutex<AuditInner>,
}

impl AuditLog {
    fn with(sink: Sink) -> Self {
        AuditLog { inner: Mutex::new(AuditInner { sink, last: None, count: 0 }) }
    }

    /// Keeps records in memory; see [`AuditLog::records`].
    pub fn memory() -> Self {
        Self::with(Sink::Memory(Vec::new()))
    }

    /// Appends newline-delimited JSON records to `path`.
    pub fn file(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self::with(Sink::File(file)))
    }

    /// Counts records without keeping them.
    pub fn discard() -> Self {
        Self::with(Sink::Discard)
    }

    pub fn append(&self, principal: &Principal, action: Action, tenant: Option<&TenantId>, category: Option<&Slot>, outcome: Outcome) {
        let mut inner = self.inner.lock();
        let now = Utc::now();
        let ts = match inner.last {
            Some(last) if last > now => last,
            _ => now,
        };
        inner.last = Some(ts);
        inner.count += 1;
        let record = AuditRecord {
            ts,
            principal: principal.clone(),
            action,
            tenant: tenant.cloned(),
            category: category.cloned(),
            outcome,
        };
        match &mut inner.sink {
            Sink::Memory(v) => v.push(record),
            Sink::File(f) => {
                let mut line = serde_json::to_vec(&record).expect("audit records always serialize");
                line.push(b'\n');
                // An audit write failure must not turn into a silent allow.
                if let Err(e) = f.write_all(&line) {
                    panic!("audit log write failed: {e}");
                }
            }
            Sink::Discard => {}
        }
    }

    pub fn len(&self) -> u64 {
        self.inner.lock().count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records kept by a memory log; empty for other sinks.
    pub fn records(&self) -> Vec<AuditRecord> {
        match &self.inner.lock().sink {
            Sink::Memory(v) => v.clone(),
            _ => Vec::new(),
        }
    }
}

/// Policy plus audit trail.
pub struct Guard {
    audit: AuditLog,
}

impl Guard {
    pub fn new(audit: AuditLog) -> Self {
        Guard { audit }
    }

    /// Decides and records exactly one audit entry.
    pub fn authorize(&self, p: &Principal, action: Action, tenant: Option<&TenantId>, category: Option<&Slot>) -> Decision {
        let decision = decide(p, action, tenant);
        let outcome = if decision.is_allowed() { Outcome::Allowed } else { Outcome::Denied };
        self.audit.append(p, action, tenant, category, outcome);
        decision
    }

    pub fn audit(&self) -> &AuditLog {
        &self.audit
    }
}
