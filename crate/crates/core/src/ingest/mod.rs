//! Loading raw price/volume documents, aligning them to a window, dropping
//! series that never move, and canonical snapshot persistence.

mod align;
mod document;
mod fetch;
mod snapshot;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{AnalysisWindow, BondQuote, ItemId, ModelError, PriceSeries, Snapshot};

pub use align::{align_series, align_window, filter_static, ExclusionReport, DEFAULT_MIN_COVERAGE};
pub use document::{parse_item_document, parse_volume_table, MS_PER_DAY};
pub use fetch::{fetch_documents, fixture_item_ids, FetchPolicy, Source};
pub use snapshot::{load_snapshot, save_snapshot, SNAPSHOT_SCHEMA};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("item {0}: document has no daily entries")]
    EmptySeries(ItemId),
    #[error("item {item}: non-positive price {price} at epoch day {day}")]
    NonPositivePrice { item: ItemId, day: i64, price: i64 },
    #[error("item {item}: two entries map to epoch day {day}")]
    DuplicateDay { item: ItemId, day: i64 },
    #[error("item {0}: volume must be positive")]
    NonPositiveVolume(ItemId),
    #[error("item {0} appears more than once")]
    DuplicateItem(ItemId),
    #[error("source unavailable: {source_name}: {reason}")]
    SourceUnavailable { source_name: String, reason: String },
    #[error("missing fixture file {}", .0.display())]
    MissingFixture(PathBuf),
    #[error("item {item}: coverage {coverage:.3} below minimum {min_coverage:.3}")]
    InsufficientCoverage {
        item: ItemId,
        coverage: f64,
        min_coverage: f64,
    },
    #[error("item {0} has no observations inside the window")]
    NoOverlap(ItemId),
    #[error("malformed snapshot file {}: {reason}", path.display())]
    MalformedSnapshotFile { path: PathBuf, reason: String },
    #[error("snapshot schema {found:?} does not match expected {expected:?}")]
    SchemaVersionMismatch { found: String, expected: String },
    #[error("cannot determine a window: no observations")]
    NoObservations,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl IngestError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
        move |source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Options for turning raw documents into a snapshot.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Explicit window; when `None` the window ends on the latest observed
    /// day and spans `window_days`.
    pub window: Option<AnalysisWindow>,
    pub window_days: u32,
    pub min_coverage: f64,
    pub bond: Option<BondQuote>,
    /// Volume CSV; defaults to `volumes.csv` inside a fixture directory.
    pub volume_table: Option<PathBuf>,
    pub policy: FetchPolicy,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            window: None,
            window_days: crate::model::DEFAULT_WINDOW_DAYS,
            min_coverage: DEFAULT_MIN_COVERAGE,
            bond: None,
            volume_table: None,
            policy: FetchPolicy::default(),
        }
    }
}

#[derive(Debug)]
pub struct IngestOutcome {
    pub snapshot: Snapshot,
    /// Series dropped during alignment, with the reason.
    pub rejected: Vec<(ItemId, IngestError)>,
}

/// Fetch, parse and align every requested item. `item_ids = None` means
/// every `item_<id>.json` in a fixture directory.
pub fn ingest(
    source: &Source,
    item_ids: Option<&[ItemId]>,
    opts: &IngestOptions,
) -> Result<IngestOutcome, IngestError> {
    let ids: Vec<ItemId> = match (item_ids, source) {
        (Some(ids), _) => ids.to_vec(),
        (None, Source::Fixtures(dir)) => fixture_item_ids(dir)?,
        (None, Source::Endpoint(url)) => {
            return Err(IngestError::SourceUnavailable {
                source_name: url.clone(),
                reason: "an explicit item list is required for endpoint sources".into(),
            })
        }
    };
    let docs = fetch_documents(&ids, &opts.policy, source)?;
    let mut raw = Vec::with_capacity(docs.len());
    for (id, text) in &docs {
        raw.push(parse_item_document(*id, text)?);
    }

    let window = match opts.window {
        Some(w) => w,
        None => {
            let last = raw
                .iter()
                .filter_map(|s| s.days().last().copied())
                .max()
                .ok_or(IngestError::NoObservations)?;
            let date = chrono::NaiveDate::from_ymd_opt(1970, 1, 1)
                .expect("epoch")
                .checked_add_signed(chrono::Duration::days(last))
                .ok_or(IngestError::NoObservations)?;
            AnalysisWindow::ending_on(date, opts.window_days)?
        }
    };

    let mut aligned: Vec<PriceSeries> = Vec::with_capacity(raw.len());
    let mut rejected = Vec::new();
    for s in &raw {
        match align_series(s, &window, opts.min_coverage) {
            Ok(a) => aligned.push(a),
            Err(e) => rejected.push((s.item_id(), e)),
        }
    }

    let volume_path = match (&opts.volume_table, source) {
        (Some(p), _) => Some(p.clone()),
        (None, Source::Fixtures(dir)) => Some(dir.join("volumes.csv")).filter(|p| p.is_file()),
        _ => None,
    };
    let volumes = match volume_path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(IngestError::io(&p))?;
            Some(parse_volume_table(&text)?)
        }
        None => None,
    };

    let snapshot = Snapshot::new(window, aligned, volumes, opts.bond)?;
    Ok(IngestOutcome { snapshot, rejected })
}
