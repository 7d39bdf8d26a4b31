use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use super::IngestError;
use crate::model::ItemId;

/// Where raw item documents come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// HTTP base URL; item `id` lives at `<base>/<id>.json`.
    Endpoint(String),
    /// Directory holding `item_<id>.json` files.
    Fixtures(PathBuf),
}

impl Source {
    pub fn parse(s: &str) -> Source {
        if s.starts_with("http://") || s.starts_with("https://") {
            Source::Endpoint(s.trim_end_matches('/').to_string())
        } else {
            Source::Fixtures(PathBuf::from(s))
        }
    }

    fn name(&self) -> String {
        match self {
            Source::Endpoint(u) => u.clone(),
            Source::Fixtures(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FetchPolicy {
    pub min_request_interval_ms: u64,
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff_base_ms: u64,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        FetchPolicy {
            min_request_interval_ms: 200,
            max_retries: 3,
            backoff_base_ms: 500,
        }
    }
}

impl FetchPolicy {
    /// Delay before retry number `retry` (0-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64.checked_shl(retry).unwrap_or(u64::MAX);
        Duration::from_millis(self.backoff_base_ms.saturating_mul(factor))
    }
}

/// Spaces request dispatches at least `interval` apart.
struct RateLimiter {
    interval: Duration,
    last: Option<Instant>,
}

impl RateLimiter {
    fn wait(&mut self) {
        if let Some(last) = self.last {
            let elapsed = last.elapsed();
            if elapsed < self.interval {
                thread::sleep(self.interval - elapsed);
            }
        }
        self.last = Some(Instant::now());
    }
}

enum Attempt {
    Done(String),
    Transient(String),
    Fatal(String),
}

/// Fetches one raw document per id. Endpoint requests are serialized
/// through the rate limiter and retried on transport failures, 429 and 5xx.
pub fn fetch_documents(
    item_ids: &[ItemId],
    policy: &FetchPolicy,
    source: &Source,
) -> Result<BTreeMap<ItemId, String>, IngestError> {
    match source {
        Source::Fixtures(dir) => fetch_fixtures(item_ids, dir),
        Source::Endpoint(base) => fetch_http(item_ids, policy, base, source),
    }
}

fn fetch_fixtures(
    item_ids: &[ItemId],
    dir: &Path,
) -> Result<BTreeMap<ItemId, String>, IngestError> {
    if !dir.is_dir() {
        return Err(IngestError::SourceUnavailable {
            source_name: dir.display().to_string(),
            reason: "not a directory".into(),
        });
    }
    let mut out = BTreeMap::new();
    for &id in item_ids {
        let path = dir.join(format!("item_{id}.json"));
        if !path.is_file() {
            return Err(IngestError::MissingFixture(path));
        }
        let text = std::fs::read_to_string(&path).map_err(IngestError::io(&path))?;
        out.insert(id, text);
    }
    Ok(out)
}

fn fetch_http(
    item_ids: &[ItemId],
    policy: &FetchPolicy,
    base: &str,
    source: &Source,
) -> Result<BTreeMap<ItemId, String>, IngestError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(30)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut limiter = RateLimiter {
        interval: Duration::from_millis(policy.min_request_interval_ms),
        last: None,
    };
    let mut out = BTreeMap::new();
    for &id in item_ids {
        let url = format!("{base}/{id}.json");
        let mut retry = 0;
        let text = loop {
            limiter.wait();
            let reason = match request(&agent, &url) {
                Attempt::Done(text) => break text,
                Attempt::Fatal(reason) => {
                    return Err(IngestError::SourceUnavailable {
                        source_name: source.name(),
                        reason: format!("{url}: {reason}"),
                    })
                }
                Attempt::Transient(reason) => reason,
            };
            if retry >= policy.max_retries {
                return Err(IngestError::SourceUnavailable {
                    source_name: source.name(),
                    reason: format!("{url}: {reason} (after {retry} retries)"),
                });
            }
            thread::sleep(policy.backoff(retry));
            retry += 1;
        };
        out.insert(id, text);
    }
    Ok(out)
}

fn request(agent: &ureq::Agent, url: &str) -> Attempt {
    let mut response = match agent.get(url).call() {
        Ok(r) => r,
        Err(e) => return Attempt::Transient(e.to_string()),
    };
    let status = response.status().as_u16();
    if status == 429 || (500..600).contains(&status) {
        return Attempt::Transient(format!("HTTP {status}"));
    }
    if !(200..300).contains(&status) {
        return Attempt::Fatal(format!("HTTP {status}"));
    }
    match response.body_mut().read_to_string() {
        Ok(text) => Attempt::Done(text),
        Err(e) => Attempt::Transient(e.to_string()),
    }
}

/// Item ids of every `item_<id>.json` in `dir`, ascending.
pub fn fixture_item_ids(dir: &Path) -> Result<Vec<ItemId>, IngestError> {
    let entries = std::fs::read_dir(dir).map_err(|e| IngestError::SourceUnavailable {
        source_name: dir.display().to_string(),
        reason: e.to_string(),
    })?;
    let mut ids = Vec::new();
    for entry in entries {
        let entry = entry.map_err(IngestError::io(dir))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let id = name
            .strip_prefix("item_")
            .and_then(|r| r.strip_suffix(".json"))
            .and_then(|n| n.parse::<u32>().ok())
            .and_then(|n| ItemId::new(n).ok());
        if let Some(id) = id {
            ids.push(id);
        }
    }
    ids.sort_unstable();
    Ok(ids)
}
