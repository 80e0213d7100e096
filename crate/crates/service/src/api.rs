use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method as HttpMethod, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};
use wardgen_core::distributions::placeholders::builtin_ids;
use wardgen_core::distributions::{DistributionChoice, EmpiricalTable, PatientSampler};
use wardgen_core::feasibility::{classify, CapacityFamily, Method, WardConfig};
use wardgen_core::generator::{Generator, GeneratorConfig};
use wardgen_core::model::SCHEMA_VERSION;

use crate::error::{check_schema_version, parse_body, ApiError};
use crate::jobs::Lookup;
use crate::session::{SessionError, WizardSession};
use crate::suggest::{nearest_guaranteed, Suggestion};
use crate::{AppState, MAX_HORIZON, MAX_INSTANCES, MAX_PREVIEW_DRAWS};

type Shared = State<Arc<AppState>>;

/// Number of alternative wards offered for a blocked ward.
const SUGGESTION_LIMIT: usize = 5;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/templates", post(post_template))
        .route("/templates/{id}", get(get_template))
        .route("/ward/classify", post(post_classify))
        .route("/distributions/preview", post(post_preview))
        .route("/tables", get(get_tables).post(post_table))
        .route("/generate", post(post_generate))
        .route("/generate/{id}", get(get_job))
        .route("/generate/{id}/archive", get(get_archive))
        .route("/sessions", post(post_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/steps/{step}", put(put_step))
        .route("/sessions/{id}/generate", post(post_session_generate))
        .with_state(state)
}

/// CORS for the UI origin; `*` allows any origin.
pub fn cors(origin: &str) -> Result<CorsLayer, header::InvalidHeaderValue> {
    let allow = if origin == "*" {
        AllowOrigin::any()
    } else {
        AllowOrigin::exact(HeaderValue::from_str(origin)?)
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([HttpMethod::GET, HttpMethod::POST, HttpMethod::PUT])
        .allow_headers([header::CONTENT_TYPE]))
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn check_limits(config: &GeneratorConfig) -> Result<(), ApiError> {
    if config.start.horizon > MAX_HORIZON {
        return Err(ApiError::bad_request(format!(
            "horizon is limited to {MAX_HORIZON} days"
        )));
    }
    if config.generate.instance_count > MAX_INSTANCES {
        return Err(ApiError::bad_request(format!(
            "a job may generate at most {MAX_INSTANCES} instances"
        )));
    }
    Ok(())
}

fn parse_config(body: &[u8]) -> Result<GeneratorConfig, ApiError> {
    let text = std::str::from_utf8(body).map_err(ApiError::bad_request)?;
    let config = GeneratorConfig::from_json(text).map_err(ApiError::bad_request)?;
    check_limits(&config)?;
    Ok(config)
}

async fn post_template(State(state): Shared, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let config = parse_config(&body)?;
    let id = new_id();
    let _guard = state.template_lock.lock().await;
    tokio::fs::create_dir_all(&state.templates_dir)
        .await
        .map_err(ApiError::internal)?;
    tokio::fs::write(state.templates_dir.join(format!("{id}.json")), &body)
        .await
        .map_err(ApiError::internal)?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "id": id, "config_digest": config.digest() })),
    ))
}

fn is_plain_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

async fn get_template(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    if !is_plain_id(&id) {
        return Err(ApiError::not_found(format!("template {id}")));
    }
    let _guard = state.template_lock.lock().await;
    match tokio::fs::read(state.templates_dir.join(format!("{id}.json"))).await {
        Ok(bytes) => Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(ApiError::not_found(format!("template {id}")))
        }
        Err(e) => Err(ApiError::internal(e)),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyRequest {
    #[serde(default = "schema_version")]
    schema_version: u32,
    capacities: Vec<u32>,
    #[serde(default)]
    ensure_feasibility: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyResponse {
    pub family: CapacityFamily,
    pub method: Method,
    /// Whether a closed-form rule decides every census of this ward.
    pub guaranteed: bool,
    pub allowed: bool,
    pub note: String,
    pub suggestions: Vec<Suggestion>,
}

pub fn classify_ward(
    capacities: &[u32],
    ensure_feasibility: bool,
) -> Result<ClassifyResponse, ApiError> {
    let ward = WardConfig::from_capacities(capacities).map_err(ApiError::bad_request)?;
    let family = classify(&ward);
    let guaranteed = family.is_polynomial();
    let allowed = guaranteed || !ensure_feasibility;
    let note = match (guaranteed, ensure_feasibility) {
        (true, true) => format!("{}: gender separation is guaranteed on every day", family.name()),
        (true, false) => format!("{}: closed-form rule available; feasibility is not enforced", family.name()),
        (false, true) => "no closed-form rule for this ward; pick one of the suggestions or turn off ensure_feasibility".into(),
        (false, false) => "no closed-form rule for this ward; feasibility is not enforced".into(),
    };
    let suggestions = if allowed {
        Vec::new()
    } else {
        nearest_guaranteed(capacities, SUGGESTION_LIMIT)
    };
    Ok(ClassifyResponse {
        family,
        method: family.method(),
        guaranteed,
        allowed,
        note,
        suggestions,
    })
}

async fn post_classify(body: Bytes) -> Result<Json<ClassifyResponse>, ApiError> {
    let request: ClassifyRequest = parse_body(&body)?;
    check_schema_version(request.schema_version)?;
    Ok(Json(classify_ward(
        &request.capacities,
        request.ensure_feasibility,
    )?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PreviewRequest {
    #[serde(default = "schema_version")]
    schema_version: u32,
    #[serde(default)]
    choice: DistributionChoice,
    n: u32,
    #[serde(default)]
    seed: u64,
}

/// Histograms as `(bucket start, count)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreviewResponse {
    pub n: u32,
    pub seed: u64,
    pub mean_los: f64,
    pub age_bucket_width: u32,
    pub age: Vec<(u32, u64)>,
    pub los: Vec<(u32, u64)>,
    /// LOR of non-emergency patients.
    pub lor: Vec<(u32, u64)>,
}

pub fn preview(sampler: &PatientSampler, n: u32, seed: u64) -> PreviewResponse {
    const AGE_WIDTH: u32 = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut age, mut los, mut lor) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for _ in 0..n {
        let a = sampler.sample_age(&mut rng);
        *age.entry(a / AGE_WIDTH * AGE_WIDTH).or_insert(0) += 1;
        *los.entry(sampler.sample_los(a, &mut rng)).or_insert(0) += 1;
        *lor.entry(sampler.sample_lor(false, &mut rng)).or_insert(0) += 1;
    }
    PreviewResponse {
        n,
        seed,
        mean_los: sampler.mean_los(),
        age_bucket_width: AGE_WIDTH,
        age: age.into_iter().collect(),
        los: los.into_iter().collect(),
        lor: lor.into_iter().collect(),
    }
}

async fn post_preview(
    State(state): Shared,
    body: Bytes,
) -> Result<Json<PreviewResponse>, ApiError> {
    let request: PreviewRequest = parse_body(&body)?;
    check_schema_version(request.schema_version)?;
    if !(1..=MAX_PREVIEW_DRAWS).contains(&request.n) {
        return Err(ApiError::bad_request(format!(
            "n must be in 1..={MAX_PREVIEW_DRAWS}"
        )));
    }
    let sampler = {
        let tables = state.tables.read().expect("table lock");
        PatientSampler::new(&request.choice, &tables).map_err(ApiError::bad_request)?
    };
    let response = tokio::task::spawn_blocking(move || preview(&sampler, request.n, request.seed))
        .await
        .map_err(ApiError::internal)?;
    Ok(Json(response))
}

async fn get_tables(State(state): Shared) -> Json<Value> {
    let tables = state.tables.read().expect("table lock");
    Json(json!({
        "builtin": builtin_ids().collect::<Vec<_>>(),
        "uploaded": tables.registered_ids().collect::<Vec<_>>(),
    }))
}

async fn post_table(State(state): Shared, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let text = std::str::from_utf8(&body).map_err(ApiError::bad_request)?;
    let table = EmpiricalTable::parse(text).map_err(ApiError::bad_request)?;
    let id = format!("upload-{}", new_id());
    let response = json!({ "id": id, "kind": table.kind().name(), "label": table.label() });
    state
        .tables
        .write()
        .expect("table lock")
        .register(id, table);
    Ok((StatusCode::CREATED, Json(response)))
}

fn start_job(
    state: &AppState,
    config: GeneratorConfig,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    check_limits(&config)?;
    let generator = {
        let tables = state.tables.read().expect("table lock");
        Generator::new(config, &tables).map_err(ApiError::bad_request)?
    };
    let warnings = generator.warnings().to_vec();
    let id = state.jobs.start(generator);
    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "id": id, "status": "running", "warnings": warnings })),
    ))
}

async fn post_generate(State(state): Shared, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let config = parse_config(&body)?;
    start_job(&state, config)
}

fn expired(id: &str) -> ApiError {
    ApiError::new(StatusCode::GONE, format!("job {id} has expired"))
}

async fn get_job(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    match state.jobs.status(&id) {
        Lookup::Found(status) => Ok(Json(status).into_response()),
        Lookup::Expired => Err(expired(&id)),
        Lookup::Unknown | Lookup::Running => Err(ApiError::not_found(format!("job {id}"))),
    }
}

async fn get_archive(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    match state.jobs.archive(&id) {
        Lookup::Found(bytes) => Ok((
            [
                (header::CONTENT_TYPE, "application/zip".to_string()),
                (
                    header::CONTENT_DISPOSITION,
                    format!("attachment; filename=\"instances-{id}.zip\""),
                ),
            ],
            bytes.as_ref().clone(),
        )
            .into_response()),
        Lookup::Running => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("job {id} is still running"),
        )),
        Lookup::Expired => Err(expired(&id)),
        Lookup::Unknown => Err(ApiError::not_found(format!("archive of job {id}"))),
    }
}

async fn post_session(State(state): Shared) -> impl IntoResponse {
    let session = WizardSession::new(new_id());
    let view = session.view();
    state
        .sessions
        .lock()
        .expect("session lock")
        .insert(session.id.clone(), session);
    (StatusCode::CREATED, Json(view))
}

async fn get_session(
    State(state): Shared,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let sessions = state.sessions.lock().expect("session lock");
    sessions
        .get(&id)
        .map(|s| Json(s.view()))
        .ok_or_else(|| ApiError::not_found(format!("session {id}")))
}

fn session_error(error: SessionError) -> ApiError {
    let status = match error {
        SessionError::NoSuchStep(_) => StatusCode::NOT_FOUND,
        SessionError::Locked { .. } | SessionError::Incomplete(_) => StatusCode::CONFLICT,
        SessionError::Malformed { .. } => StatusCode::BAD_REQUEST,
    };
    ApiError::new(status, error.to_string())
}

async fn put_step(
    State(state): Shared,
    Path((id, step)): Path<(String, usize)>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let value: Value = parse_body(&body)?;
    let mut sessions = state.sessions.lock().expect("session lock");
    let session = sessions
        .get_mut(&id)
        .ok_or_else(|| ApiError::not_found(format!("session {id}")))?;
    let tables = state.tables.read().expect("table lock");
    session
        .submit(step, value, &tables)
        .map_err(session_error)?;
    Ok(Json(session.view()))
}

async fn post_session_generate(
    State(state): Shared,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let config = {
        let sessions = state.sessions.lock().expect("session lock");
        let session = sessions
            .get(&id)
            .ok_or_else(|| ApiError::not_found(format!("session {id}")))?;
        session.config().map_err(session_error)?
    };
    start_job(&state, config)
}
