//! `tenantconf`: validate, diff, init-tenant, resolve, serve.
//!
//! Exit codes: 0 success, 1 domain failure (invalid document, unknown role,
//! duplicate tenant), 2 environment failure (I/O, malformed XML, unknown
//! tenant or category, unreadable registry).

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tenantconf_core::codec::{self, ParseCode};
use tenantconf_core::defaults::vendor_defaults;
use tenantconf_core::diff::diff_documents;
use tenantconf_core::error::Error;
use tenantconf_core::guard::{Principal, PrincipalKind, TokenTable};
use tenantconf_core::json;
use tenantconf_core::model::{validate_document, LangTag, ResolvedCrossRefs, Slot, TenantId};
use tenantconf_core::registry::{Store, StoreError, StoreOptions};
use tenantconf_core::resolver::ResolveError;
use tenantconf_core::tenancy::{ConfigSource, Tenancy, TenancyOptions};
use tenantconf_service::{process_audit_log, ServeConfig, DEFAULT_BIND, TOKENS_FILE};

#[derive(Parser)]
#[command(name = "tenantconf", version, about = "Multi-tenant configuration store tooling")]
struct Cli {
    /// Data root holding central.xml, defaults/ and tenants/.
    #[arg(long, global = true, env = "TENANTCONF_DATA_ROOT")]
    data_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a data root with the vendor default documents.
    Init {
        /// Also write tokens.xml with this provider token.
        #[arg(long)]
        provider_token: Option<String>,
    },
    /// Parse and validate one configuration file.
    Validate {
        path: PathBuf,
        /// Category slug such as `fields` or `properties.en`; defaults to the file stem.
        #[arg(long)]
        category: Option<String>,
    },
    /// Entry-level differences between a tenant's document and the default.
    Diff { tenant: String, category: String },
    /// Register a tenant with no overrides.
    InitTenant {
        tenant: String,
        /// Also add this bearer token for the tenant to tokens.xml.
        #[arg(long)]
        token: Option<String>,
    },
    /// Print a resolved view as the service would return it.
    Resolve {
        tenant: String,
        #[command(subcommand)]
        view: View,
    },
    /// Run the REST service.
    Serve {
        #[arg(long, env = "TENANTCONF_BIND", default_value = DEFAULT_BIND)]
        bind: String,
        /// Defaults to tokens.xml under the data root.
        #[arg(long, env = "TENANTCONF_TOKENS")]
        tokens: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum View {
    PageView {
        #[arg(long)]
        page: String,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        role: String,
    },
    BackendCall { backend_object: String },
    Database { data_object: String },
    Setting { key: String },
    Branding,
    DryRun { workflow: String },
    /// The effective document in canonical XML.
    Config { category: String },
}

enum Failure {
    Domain(String),
    Environment(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Environment(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(m) | Failure::Environment(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut msg = format!("{}: {e}", e.code());
        for v in e.violations() {
            msg.push_str(&format!("\n{v}"));
        }
        match e {
            Error::UnknownTenant(_)
            | Error::UnknownCategory(_)
            | Error::Storage(_)
            | Error::Resolve(ResolveError::Storage(_)) => Failure::Environment(msg),
            _ => Failure::Domain(msg),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::AlreadyInitialized | StoreError::TenantExists(_) => Failure::Domain(e.to_string()),
            other => Failure::Environment(other.to_string()),
        }
    }
}

fn env_err(context: &str, e: impl fmt::Display) -> Failure {
    Failure::Environment(format!("{context}: {e}"))
}

fn data_root(cli: &Cli) -> Result<&Path, Failure> {
    cli.data_root
        .as_deref()
        .ok_or_else(|| Failure::Environment("--data-root or TENANTCONF_DATA_ROOT is required".into()))
}

fn open(root: &Path) -> Result<Tenancy, Failure> {
    let audit = process_audit_log(root, "cli").map_err(|e| env_err("audit", e))?;
    Tenancy::open(root, audit, TenancyOptions::default()).map_err(Failure::from)
}

fn tenant(raw: &str) -> Result<TenantId, Failure> {
    TenantId::new(raw).map_err(|e| env_err(&format!("tenant id {raw:?}"), e))
}

fn slot(raw: &str) -> Result<Slot, Failure> {
    raw.parse().map_err(|e| env_err(&format!("category {raw:?}"), e))
}

fn out(bytes: &[u8]) -> Result<(), Failure> {
    io::stdout().write_all(bytes).map_err(|e| env_err("stdout", e))
}

fn init(root: &Path, provider_token: Option<&str>) -> Result<(), Failure> {
    let tokens_path = root.join(TOKENS_FILE);
    if provider_token.is_some() && tokens_path.exists() {
        return Err(Failure::Domain(format!("{} already exists", tokens_path.display())));
    }
    Store::bootstrap(root, &vendor_defaults(), StoreOptions::default())?;
    if let Some(token) = provider_token {
        let mut table = TokenTable::default();
        table.insert(token, PrincipalKind::Provider);
        fs::write(&tokens_path, table.to_xml()).map_err(|e| env_err("tokens", e))?;
    }
    println!("initialized {}", root.display());
    Ok(())
}

fn validate(path: &Path, category: Option<&str>) -> Result<(), Failure> {
    let slot = match category {
        Some(c) => slot(c)?,
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            stem.parse::<Slot>()
                .map_err(|_| env_err(&format!("cannot tell the category of {}", path.display()), "pass --category"))?
        }
    };
    let bytes = fs::read(path).map_err(|e| env_err(&path.display().to_string(), e))?;
    let doc = match codec::parse(slot.category(), &bytes) {
        Ok(doc) => doc,
        Err(e) if e.code == ParseCode::MalformedXml => return Err(env_err(&path.display().to_string(), e)),
        Err(e) => return Err(Failure::Domain(format!("{}: {e}", path.display()))),
    };
    let report = validate_document(&doc, &ResolvedCrossRefs::unchecked());
    if report.is_empty() {
        println!("{}: ok ({slot}, {} entries)", path.display(), doc.body.len());
        Ok(())
    } else {
        print!("{report}");
        Err(Failure::Domain(format!("{}: {} violation(s)", path.display(), report.violations().len())))
    }
}

fn diff(root: &Path, t: &str, s: &str) -> Result<(), Failure> {
    let (t, s) = (tenant(t)?, slot(s)?);
    let tenancy = open(root)?;
    let p = Principal::provider();
    let read = tenancy.read_config(&p, &t, &s)?;
    if read.source == ConfigSource::Default {
        return Ok(());
    }
    let location = tenancy.default_location(&p, &s)?;
    let store = Store::open(root, StoreOptions::default())?;
    let default = store.read_document(&location, &s)?;
    let mut text = String::new();
    for line in diff_documents(&default, &read.doc) {
        text.push_str(&format!("{line}\n"));
    }
    out(text.as_bytes())
}

fn init_tenant(root: &Path, t: &str, token: Option<&str>) -> Result<(), Failure> {
    let t = tenant(t)?;
    let tokens_path = root.join(TOKENS_FILE);
    let mut table = match token {
        Some(_) if tokens_path.exists() => TokenTable::load(&tokens_path).map_err(|e| env_err("tokens", e))?,
        _ => TokenTable::default(),
    };
    if let Some(token) = token {
        if table.authenticate(token).is_some() {
            return Err(Failure::Domain("token is already in use".into()));
        }
    }
    open(root)?.register_tenant(&Principal::provider(), &t)?;
    if let Some(token) = token {
        table.insert(token, PrincipalKind::Tenant(t.clone()));
        fs::write(&tokens_path, table.to_xml()).map_err(|e| env_err("tokens", e))?;
    }
    println!("registered tenant {t}");
    Ok(())
}

fn resolve(root: &Path, t: &str, view: &View) -> Result<(), Failure> {
    let t = tenant(t)?;
    let tenancy = open(root)?;
    let p = Principal::provider();
    let body = match view {
        View::PageView { page, lang, role } => {
            let lang = LangTag::new(lang.as_str()).map_err(|e| Failure::Domain(format!("lang {lang:?}: {e}")))?;
            json::render(&*tenancy.page_view(&p, &t, page, &lang, role)?)
        }
        View::BackendCall { backend_object } => json::render(&tenancy.backend_call(&p, &t, backend_object)?),
        View::Database { data_object } => json::render(&tenancy.database(&p, &t, data_object)?),
        View::Setting { key } => json::render(&tenancy.setting(&p, &t, key)?),
        View::Branding => json::render(&tenancy.branding(&p, &t)?),
        View::DryRun { workflow } => json::render(&tenancy.dry_run(&p, &t, workflow)?),
        View::Config { category } => {
            let read = tenancy.read_config(&p, &t, &slot(category)?)?;
            return out(&codec::serialize(&read.doc));
        }
    };
    out(body.as_bytes())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Init { provider_token } => init(data_root(cli)?, provider_token.as_deref()),
        Command::Validate { path, category } => validate(path, category.as_deref()),
        Command::Diff { tenant, category } => diff(data_root(cli)?, tenant, category),
        Command::InitTenant { tenant, token } => init_tenant(data_root(cli)?, tenant, token.as_deref()),
        Command::Resolve { tenant, view } => resolve(data_root(cli)?, tenant, view),
        Command::Serve { bind, tokens } => {
            let config = ServeConfig { bind: bind.clone(), data_root: data_root(cli)?.to_path_buf(), tokens: tokens.clone() };
            tenantconf_service::serve(&config).map_err(|e| Failure::Environment(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tenantconf: {f}");
            ExitCode::from(f.code())
        }
    }
}
