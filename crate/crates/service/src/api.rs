//! Endpoints, all under `/api/v1`.

use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE, ETAG, IF_MATCH};
use axum::http::{HeaderMap, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::{Deserialize, Serialize};
use tenantconf_core::codec;
use tenantconf_core::error::{Error, ErrorBody};
use tenantconf_core::guard::Principal;
use tenantconf_core::json;
use tenantconf_core::model::{LangTag, Slot, TenantId};
use tenantconf_core::registry::DatabaseDescriptor;
use tenantconf_core::tenancy::{category_listing, ConfigSource};

use crate::App;

const X_CONFIG_SOURCE: HeaderName = HeaderName::from_static("x-config-source");

pub fn router(app: App) -> Router {
    let api = Router::new()
        .route("/categories", get(categories))
        .route("/registry", get(registry))
        .route("/metrics", get(metrics))
        .route("/tenants/{t}/config", get(overview))
        .route("/tenants/{t}/config/{slot}", get(read_config).put(write_config).post(config_action))
        .route("/tenants/{t}/resolved/page-view", get(page_view))
        .route("/tenants/{t}/resolved/backend-call/{be}", get(backend_call))
        .route("/tenants/{t}/resolved/database/{data_object}", get(database))
        .route("/tenants/{t}/resolved/setting/{key}", get(setting))
        .route("/tenants/{t}/workflows/{id}", post(workflow_action))
        .route("/tenants/{t}/branding", get(branding))
        .route("/tenants/{t}/database", put(assign_database));
    Router::new().nest("/api/v1", api).fallback(not_found).with_state(app)
}

/// Error response carrying an [`ErrorBody`].
pub struct ApiError(ErrorBody);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e.body())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, [(CONTENT_TYPE, "application/json")], json::render(&self.0)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn json_response<T: Serialize + ?Sized>(value: &T) -> Response {
    ([(CONTENT_TYPE, "application/json")], json::render(value)).into_response()
}

fn xml_response(status: StatusCode, body: Vec<u8>, version: u64, source: ConfigSource) -> Response {
    let mut headers = HeaderMap::new();
    headers.insert(CONTENT_TYPE, HeaderValue::from_static("application/xml"));
    headers.insert(ETAG, HeaderValue::from_str(&format!("\"{version}\"")).expect("digits"));
    headers.insert(X_CONFIG_SOURCE, HeaderValue::from_static(source.as_str()));
    (status, headers, body).into_response()
}

async fn not_found() -> ApiError {
    not_found_error()
}

/// Runs a blocking facade call off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, Error> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => std::panic::resume_unwind(e.into_panic()),
    }
}

fn principal(app: &App, headers: &HeaderMap) -> Result<Principal, ApiError> {
    let header = headers.get(AUTHORIZATION).and_then(|h| h.to_str().ok());
    Ok(app.authenticate(header)?)
}

fn tenant_id(raw: &str) -> Result<TenantId, ApiError> {
    TenantId::new(raw).map_err(|e| Error::BadRequest(format!("tenant id {raw:?}: {e}")).into())
}

fn slot(raw: &str) -> Result<Slot, ApiError> {
    raw.parse().map_err(|_| Error::UnknownCategory(raw.to_string()).into())
}

/// Splits `name:verb`; the verb must be `expected`.
fn action<'a>(raw: &'a str, expected: &str) -> Result<&'a str, ApiError> {
    match raw.rsplit_once(':') {
        Some((name, verb)) if verb == expected => Ok(name),
        _ => Err(not_found_error()),
    }
}

fn not_found_error() -> ApiError {
    ApiError(ErrorBody { status: 404, code: "not-found", detail: "no such endpoint".into(), violations: Vec::new() })
}

fn if_match(headers: &HeaderMap) -> Result<u64, ApiError> {
    let raw = headers
        .get(IF_MATCH)
        .ok_or_else(|| Error::BadRequest("If-Match header with the document version is required".into()))?;
    raw.to_str()
        .ok()
        .map(|v| v.trim().trim_matches('"'))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::BadRequest("If-Match must be a quoted version number".into()).into())
}

async fn categories(State(app): State<App>, headers: HeaderMap) -> ApiResult {
    principal(&app, &headers)?;
    Ok(json_response(&category_listing()))
}

async fn registry(State(app): State<App>, headers: HeaderMap) -> ApiResult {
    let p = principal(&app, &headers)?;
    let reg = blocking(move || app.tenancy().registry(&p)).await?;
    Ok(json_response(&*reg))
}

async fn metrics(State(app): State<App>, headers: HeaderMap) -> ApiResult {
    let p = principal(&app, &headers)?;
    let m = blocking(move || app.tenancy().metrics(&p)).await?;
    Ok(([(CONTENT_TYPE, "text/plain; version=0.0.4")], m.exposition()).into_response())
}

async fn overview(State(app): State<App>, headers: HeaderMap, Path(t): Path<String>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let status = blocking(move || app.tenancy().config_overview(&p, &t)).await?;
    Ok(json_response(&status))
}

async fn read_config(State(app): State<App>, headers: HeaderMap, Path((t, s)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let (t, s) = (tenant_id(&t)?, slot(&s)?);
    let read = blocking(move || app.tenancy().read_config(&p, &t, &s)).await?;
    Ok(xml_response(StatusCode::OK, codec::serialize(&read.doc), read.version, read.source))
}

async fn write_config(
    State(app): State<App>,
    headers: HeaderMap,
    Path((t, s)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult {
    let p = principal(&app, &headers)?;
    let (t, s) = (tenant_id(&t)?, slot(&s)?);
    let version = if_match(&headers)?;
    let doc = codec::parse(s.category(), &body).map_err(Error::from)?.with_version(version);
    let out = codec::serialize(&doc);
    let new_version = blocking(move || app.tenancy().commit(&p, &t, &s, &doc)).await?;
    Ok(xml_response(StatusCode::OK, out, new_version, ConfigSource::Tenant))
}

#[derive(Serialize)]
struct ResetOutcome {
    slot: Slot,
    removed: bool,
}

async fn config_action(State(app): State<App>, headers: HeaderMap, Path((t, s)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let s = slot(action(&s, "reset")?)?;
    let slot = s.clone();
    let removed = blocking(move || app.tenancy().reset(&p, &t, &s)).await?;
    Ok(json_response(&ResetOutcome { slot, removed }))
}

fn required<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    q.get(name).map(String::as_str).ok_or_else(|| Error::BadRequest(format!("query parameter {name} is required")).into())
}

async fn page_view(
    State(app): State<App>,
    headers: HeaderMap,
    Path(t): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let page = required(&q, "page")?.to_string();
    let lang = required(&q, "lang")?;
    let lang = LangTag::new(lang).map_err(|e| Error::BadRequest(format!("lang {lang:?}: {e}")))?;
    let role = required(&q, "role")?.to_string();
    let view = blocking(move || app.tenancy().page_view(&p, &t, &page, &lang, &role)).await?;
    Ok(json_response(&*view))
}

async fn backend_call(State(app): State<App>, headers: HeaderMap, Path((t, be)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let plan = blocking(move || app.tenancy().backend_call(&p, &t, &be)).await?;
    Ok(json_response(&plan))
}

async fn database(State(app): State<App>, headers: HeaderMap, Path((t, d)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let route = blocking(move || app.tenancy().database(&p, &t, &d)).await?;
    Ok(json_response(&route))
}

async fn setting(State(app): State<App>, headers: HeaderMap, Path((t, key)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let lookup = blocking(move || app.tenancy().setting(&p, &t, &key)).await?;
    Ok(json_response(&lookup))
}

async fn workflow_action(State(app): State<App>, headers: HeaderMap, Path((t, id)): Path<(String, String)>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let id = action(&id, "dry-run")?.to_string();
    let trace = blocking(move || app.tenancy().dry_run(&p, &t, &id)).await?;
    Ok(json_response(&trace))
}

async fn branding(State(app): State<App>, headers: HeaderMap, Path(t): Path<String>) -> ApiResult {
    let p = principal(&app, &headers)?;
    let t = tenant_id(&t)?;
    let b = blocking(move || app.tenancy().branding(&p, &t)).await?;
    Ok(json_response(&b))
}

#[derive(Deserialize)]
struct DatabaseRequest {
    name: String,
    host: String,
}

#[derive(Serialize)]
struct DatabaseAssignment {
    tenant: TenantId,
    database: DatabaseDescriptor,
}

async fn assign_database(State(app): State<App>, headers: HeaderMap, Path(t): Path<String>, body: Bytes) -> ApiResult {
    let p = principal(&app, &headers)?;
    let tenant = tenant_id(&t)?;
    let req: DatabaseRequest =
        serde_json::from_slice(&body).map_err(|e| Error::BadRequest(format!("expected {{\"name\", \"host\"}}: {e}")))?;
    let database = DatabaseDescriptor { name: req.name, host: req.host };
    let (t, db) = (tenant.clone(), database.clone());
    blocking(move || app.tenancy().assign_database(&p, &t, db)).await?;
    Ok(json_response(&DatabaseAssignment { tenant, database }))
}
