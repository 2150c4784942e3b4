//! REST surface over the guarded tenancy facade.
//!
//! Every request is authenticated with a bearer token from `tokens.xml` and
//! then authorized by the facade. Configuration documents travel as canonical
//! XML; everything else, errors included, as JSON.

mod api;

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use tenantconf_core::error::Error;
use tenantconf_core::guard::{AuditLog, Principal, TokenError, TokenTable};
use tenantconf_core::tenancy::{Tenancy, TenancyOptions};
use thiserror::Error;
use tokio::net::TcpListener;

pub use api::router;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const TOKENS_FILE: &str = "tokens.xml";
pub const AUDIT_DIR: &str = "audit";

#[derive(Debug, Error)]
pub enum StartupError {
    #[error("cannot open data root: {0}")]
    Registry(#[from] Error),
    #[error("cannot load tokens: {0}")]
    Tokens(#[from] TokenError),
    #[error("cannot open audit log {path}: {source}")]
    Audit { path: PathBuf, source: io::Error },
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub bind: String,
    pub data_root: PathBuf,
    /// Defaults to `tokens.xml` under the data root.
    pub tokens: Option<PathBuf>,
}

impl ServeConfig {
    pub fn tokens_path(&self) -> PathBuf {
        self.tokens.clone().unwrap_or_else(|| self.data_root.join(TOKENS_FILE))
    }
}

/// Opens this process's own audit file, `audit/<label>-<pid>.jsonl`.
pub fn process_audit_log(data_root: &Path, label: &str) -> Result<AuditLog, StartupError> {
    let dir = data_root.join(AUDIT_DIR);
    let path = dir.join(format!("{label}-{}.jsonl", std::process::id()));
    std::fs::create_dir_all(&dir)
        .and_then(|_| AuditLog::file(&path))
        .map_err(|source| StartupError::Audit { path, source })
}

/// Shared request state.
#[derive(Clone)]
pub struct App {
    tenancy: Arc<Tenancy>,
    tokens: Arc<TokenTable>,
}

impl App {
    pub fn new(tenancy: Tenancy, tokens: TokenTable) -> App {
        App { tenancy: Arc::new(tenancy), tokens: Arc::new(tokens) }
    }

    pub fn open(config: &ServeConfig) -> Result<App, StartupError> {
        let tokens = TokenTable::load(&config.tokens_path())?;
        let audit = process_audit_log(&config.data_root, "service")?;
        let tenancy = Tenancy::open(&config.data_root, audit, TenancyOptions::default())?;
        Ok(App::new(tenancy, tokens))
    }

    pub fn tenancy(&self) -> &Tenancy {
        &self.tenancy
    }

    fn authenticate(&self, header: Option<&str>) -> Result<Principal, Error> {
        header
            .and_then(|h| h.strip_prefix("Bearer "))
            .and_then(|token| self.tokens.authenticate(token.trim()))
            .ok_or(Error::Unauthenticated)
    }
}

/// A bound, not yet running server.
pub struct Server {
    listener: TcpListener,
    app: App,
}

impl Server {
    pub async fn bind(config: &ServeConfig) -> Result<Server, StartupError> {
        let app = App::open(config)?;
        Server::bind_app(&config.bind, app).await
    }

    pub async fn bind_app(addr: &str, app: App) -> Result<Server, StartupError> {
        let listener =
            TcpListener::bind(addr).await.map_err(|source| StartupError::Bind { addr: addr.to_string(), source })?;
        Ok(Server { listener, app })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run_until(self, shutdown: impl Future<Output = ()> + Send + 'static) -> io::Result<()> {
        axum::serve(self.listener, router(self.app)).with_graceful_shutdown(shutdown).await
    }
}

/// Serves until Ctrl-C.
pub fn serve(config: &ServeConfig) -> Result<(), StartupError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|source| StartupError::Bind { addr: config.bind.clone(), source })?;
    runtime.block_on(async {
        let server = Server::bind(config).await?;
        let addr = server.local_addr().map_err(|source| StartupError::Bind { addr: config.bind.clone(), source })?;
        eprintln!("tenantconf: listening on http://{addr}/api/v1");
        server
            .run_until(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|source| StartupError::Bind { addr: config.bind.clone(), source })
    })
}
