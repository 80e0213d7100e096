//! Background generation jobs and their instance archives.

use std::collections::HashMap;
use std::io::{Cursor, Write};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;
use wardgen_core::generator::{GeneratedInstance, GenerationReport, Generator};
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipWriter};

#[derive(Debug, Clone)]
enum JobState {
    Running,
    Done {
        reports: Vec<GenerationReport>,
        archive: Arc<Vec<u8>>,
        finished: Instant,
    },
    Failed(String),
    Expired,
}

#[derive(Debug, Clone)]
struct Job {
    digest: String,
    instance_count: u32,
    state: JobState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobStatus {
    pub id: String,
    /// `running`, `done` or `failed`.
    pub status: &'static str,
    pub config_digest: String,
    pub instance_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reports: Option<Vec<GenerationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup<T> {
    Found(T),
    Unknown,
    Running,
    Expired,
}

/// Zip of `instance_{k}.json` files with fixed timestamps.
pub fn archive(instances: &[GeneratedInstance]) -> std::io::Result<Vec<u8>> {
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
    let options = SimpleFileOptions::default()
        .compression_method(CompressionMethod::Deflated)
        .last_modified_time(DateTime::default());
    for generated in instances {
        zip.start_file(format!("instance_{}.json", generated.report.index), options)?;
        zip.write_all(generated.instance.to_json().as_bytes())?;
    }
    Ok(zip.finish()?.into_inner())
}

/// Finished jobs keep their archive for `ttl`.
#[derive(Debug)]
pub struct JobRegistry {
    ttl: Duration,
    jobs: Mutex<HashMap<String, Job>>,
}

impl JobRegistry {
    pub fn new(ttl: Duration) -> Self {
        Self {
            ttl,
            jobs: Mutex::new(HashMap::new()),
        }
    }

    fn expire(&self, jobs: &mut HashMap<String, Job>) {
        for job in jobs.values_mut() {
            if let JobState::Done { finished, .. } = &job.state {
                if finished.elapsed() >= self.ttl {
                    job.state = JobState::Expired;
                }
            }
        }
    }

    /// Registers a job and runs it on the blocking pool.
    pub fn start(self: &Arc<Self>, generator: Generator) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        {
            let mut jobs = self.jobs.lock().expect("job lock");
            self.expire(&mut jobs);
            jobs.insert(
                id.clone(),
                Job {
                    digest: generator.digest().to_string(),
                    instance_count: generator.config().generate.instance_count,
                    state: JobState::Running,
                },
            );
        }
        let registry = Arc::clone(self);
        let job_id = id.clone();
        tokio::task::spawn(async move {
            let outcome = tokio::task::spawn_blocking(move || {
                let instances = generator.generate_all();
                let bytes = archive(&instances).map_err(|e| e.to_string())?;
                let reports = instances.into_iter().map(|g| g.report).collect();
                Ok::<_, String>((reports, bytes))
            })
            .await
            .unwrap_or_else(|e| Err(format!("generation aborted: {e}")));
            let state = match outcome {
                Ok((reports, bytes)) => JobState::Done {
                    reports,
                    archive: Arc::new(bytes),
                    finished: Instant::now(),
                },
                Err(reason) => {
                    log::error!("job {job_id} failed: {reason}");
                    JobState::Failed(reason)
                }
            };
            if let Some(job) = registry.jobs.lock().expect("job lock").get_mut(&job_id) {
                job.state = state;
            }
        });
        id
    }

    pub fn status(&self, id: &str) -> Lookup<JobStatus> {
        let mut jobs = self.jobs.lock().expect("job lock");
        self.expire(&mut jobs);
        let Some(job) = jobs.get(id) else {
            return Lookup::Unknown;
        };
        let mut status = JobStatus {
            id: id.to_string(),
            status: "running",
            config_digest: job.digest.clone(),
            instance_count: job.instance_count,
            reports: None,
            error: None,
        };
        match &job.state {
            JobState::Running => {}
            JobState::Done { reports, .. } => {
                status.status = "done";
                status.reports = Some(reports.clone());
            }
            JobState::Failed(reason) => {
                status.status = "failed";
                status.error = Some(reason.clone());
            }
            JobState::Expired => return Lookup::Expired,
        }
        Lookup::Found(status)
    }

    /// The archive of a finished job; a failed job counts as unknown.
    pub fn archive(&self, id: &str) -> Lookup<Arc<Vec<u8>>> {
        let mut jobs = self.jobs.lock().expect("job lock");
        self.expire(&mut jobs);
        match jobs.get(id).map(|j| &j.state) {
            None | Some(JobState::Failed(_)) => Lookup::Unknown,
            Some(JobState::Running) => Lookup::Running,
            Some(JobState::Expired) => Lookup::Expired,
            Some(JobState::Done { archive, .. }) => Lookup::Found(Arc::clone(archive)),
        }
    }
}
