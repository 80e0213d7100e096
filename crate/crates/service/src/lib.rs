//! HTTP API behind the generator wizard.
//!
//! | method | path | purpose |
//! |--------|------|---------|
//! | POST | `/templates` | store a template, returns its id |
//! | GET | `/templates/{id}` | the stored template, byte for byte |
//! | POST | `/ward/classify` | capacity family and the feasibility gate |
//! | POST | `/distributions/preview` | histogram of seeded draws |
//! | GET, POST | `/tables` | list or upload empirical tables |
//! | POST | `/generate` | start a generation job |
//! | GET | `/generate/{id}` | job status with per-instance load |
//! | GET | `/generate/{id}/archive` | zip of the instance files |
//! | POST | `/sessions` | open a wizard session |
//! | GET | `/sessions/{id}` | session state |
//! | PUT | `/sessions/{id}/steps/{step}` | submit one wizard step |
//! | POST | `/sessions/{id}/generate` | generate from a completed session |
//!
//! Malformed bodies, unknown fields and failed validation answer 400.

mod api;
mod error;
pub mod jobs;
pub mod session;
pub mod suggest;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use wardgen_core::distributions::TableStore;

pub use api::{
    classify_ward, cors as api_cors, preview, router, ClassifyResponse, PreviewResponse,
};
pub use error::ApiError;
pub use jobs::JobRegistry;
pub use session::WizardSession;

/// Most instances a single job may generate.
pub const MAX_INSTANCES: u32 = 100;
/// Longest accepted horizon in days.
pub const MAX_HORIZON: u32 = 3650;
/// Most draws a preview may request.
pub const MAX_PREVIEW_DRAWS: u32 = 1_000_000;

#[derive(Debug)]
pub struct AppState {
    templates_dir: PathBuf,
    template_lock: tokio::sync::Mutex<()>,
    tables: RwLock<TableStore>,
    jobs: Arc<JobRegistry>,
    sessions: Mutex<HashMap<String, WizardSession>>,
}

impl AppState {
    pub fn new(templates_dir: impl Into<PathBuf>, job_ttl: Duration) -> Arc<Self> {
        Arc::new(Self {
            templates_dir: templates_dir.into(),
            template_lock: tokio::sync::Mutex::new(()),
            tables: RwLock::new(TableStore::in_memory()),
            jobs: Arc::new(JobRegistry::new(job_ttl)),
            sessions: Mutex::new(HashMap::new()),
        })
    }
}
