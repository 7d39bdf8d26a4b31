use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{parse_volume_table, IngestError};
use crate::io::write_atomic;
use crate::model::{AnalysisWindow, BondQuote, ItemId, PriceSeries, Snapshot};

pub const SNAPSHOT_SCHEMA: &str = "vecon-snapshot-v1";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    schema: String,
    window_start: NaiveDate,
    length_days: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bond: Option<BondQuote>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    names: BTreeMap<u32, String>,
}

#[derive(Deserialize)]
struct PriceRow {
    item_id: u32,
    day_index: i64,
    price: i64,
}

/// Writes `meta.json`, `prices.csv` and (when present) `volumes.csv` into
/// `dir`, each atomically.
pub fn save_snapshot(snapshot: &Snapshot, dir: &Path) -> Result<(), IngestError> {
    std::fs::create_dir_all(dir).map_err(IngestError::io(dir))?;

    let mut prices = String::from("item_id,day_index,price\n");
    for (id, s) in snapshot.series() {
        for (day, price) in s.days().iter().zip(s.prices()) {
            prices.push_str(&format!("{id},{day},{price}\n"));
        }
    }
    let path = dir.join("prices.csv");
    write_atomic(&path, prices.as_bytes()).map_err(IngestError::io(&path))?;

    let vol_path = dir.join("volumes.csv");
    match snapshot.volumes() {
        Some(vols) => {
            let mut text = String::from("item_id,volume\n");
            for v in vols {
                text.push_str(&format!("{},{}\n", v.item_id(), v.volume()));
            }
            write_atomic(&vol_path, text.as_bytes()).map_err(IngestError::io(&vol_path))?;
        }
        None if vol_path.exists() => {
            std::fs::remove_file(&vol_path).map_err(IngestError::io(&vol_path))?;
        }
        None => {}
    }

    let meta = Meta {
        schema: SNAPSHOT_SCHEMA.to_string(),
        window_start: snapshot.window().start_day(),
        length_days: snapshot.window().length_days(),
        bond: snapshot.bond().copied(),
        names: snapshot
            .series()
            .iter()
            .filter_map(|(id, s)| s.name().map(|n| (id.get(), n.to_string())))
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    json.push('\n');
    let path = dir.join("meta.json");
    write_atomic(&path, json.as_bytes()).map_err(IngestError::io(&path))?;
    Ok(())
}

fn malformed(path: &Path, reason: impl ToString) -> IngestError {
    IngestError::MalformedSnapshotFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

pub fn load_snapshot(dir: &Path) -> Result<Snapshot, IngestError> {
    if !dir.is_dir() {
        return Err(IngestError::SourceUnavailable {
            source_name: dir.display().to_string(),
            reason: "snapshot directory does not exist".into(),
        });
    }
    let meta_path = dir.join("meta.json");
    let meta_text = std::fs::read_to_string(&meta_path).map_err(|e| malformed(&meta_path, e))?;
    let raw: serde_json::Value =
        serde_json::from_str(&meta_text).map_err(|e| malformed(&meta_path, e))?;
    let schema = raw
        .get("schema")
        .and_then(|s| s.as_str())
        .ok_or_else(|| malformed(&meta_path, "missing schema tag"))?;
    if schema != SNAPSHOT_SCHEMA {
        return Err(IngestError::SchemaVersionMismatch {
            found: schema.to_string(),
            expected: SNAPSHOT_SCHEMA.to_string(),
        });
    }
    let meta: Meta = serde_json::from_value(raw).map_err(|e| malformed(&meta_path, e))?;
    let window = AnalysisWindow::new(meta.window_start, meta.length_days)
        .map_err(|e| malformed(&meta_path, e))?;

    let prices_path = dir.join("prices.csv");
    let series = read_prices(&prices_path, &meta.names)?;

    let vol_path = dir.join("volumes.csv");
    let volumes = if vol_path.is_file() {
        let text = std::fs::read_to_string(&vol_path).map_err(IngestError::io(&vol_path))?;
        Some(parse_volume_table(&text).map_err(|e| malformed(&vol_path, e))?)
    } else {
        None
    };

    Snapshot::new(window, series, volumes, meta.bond).map_err(|e| malformed(&prices_path, e))
}

fn read_prices(
    path: &PathBuf,
    names: &BTreeMap<u32, String>,
) -> Result<Vec<PriceSeries>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| malformed(path, e))?;
    let headers = reader.headers().map_err(|e| malformed(path, e))?;
    if headers.iter().collect::<Vec<_>>() != ["item_id", "day_index", "price"] {
        return Err(malformed(path, "header must be item_id,day_index,price"));
    }
    let mut rows: BTreeMap<u32, Vec<(i64, i64)>> = BTreeMap::new();
    for row in reader.deserialize::<PriceRow>() {
        let row = row.map_err(|e| malformed(path, e))?;
        rows.entry(row.item_id)
            .or_default()
            .push((row.day_index, row.price));
    }
    let mut out = Vec::with_capacity(rows.len());
    for (id, mut points) in rows {
        points.sort_unstable();
        let id = ItemId::new(id).map_err(|e| malformed(path, e))?;
        let (days, prices) = points.into_iter().unzip();
        let name = names.get(&id.get()).cloned();
        out.push(PriceSeries::new(id, name, days, prices).map_err(|e| malformed(path, e))?);
    }
    Ok(out)
}
