use std::collections::BTreeSet;

use serde_json::Value;

use super::IngestError;
use crate::model::{sort_volumes, ItemId, PriceSeries, VolumeRecord};

pub const MS_PER_DAY: i64 = 86_400_000;

/// Parses an item price document: a JSON object whose `"daily"` member maps
/// epoch-millisecond strings to integer prices. Other members are ignored.
/// Day indexes of the result are days since the Unix epoch.
pub fn parse_item_document(item_id: ItemId, text: &str) -> Result<PriceSeries, IngestError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| IngestError::MalformedDocument(format!("item {item_id}: {e}")))?;
    let daily = root
        .get("daily")
        .and_then(Value::as_object)
        .ok_or_else(|| {
            IngestError::MalformedDocument(format!("item {item_id}: missing \"daily\" object"))
        })?;
    if daily.is_empty() {
        return Err(IngestError::EmptySeries(item_id));
    }

    let mut entries = Vec::with_capacity(daily.len());
    for (key, value) in daily {
        let ms: i64 = key.trim().parse().map_err(|_| {
            IngestError::MalformedDocument(format!("item {item_id}: bad timestamp {key:?}"))
        })?;
        let price = value.as_i64().ok_or_else(|| {
            IngestError::MalformedDocument(format!(
                "item {item_id}: price {value} at {key} is not an integer"
            ))
        })?;
        let day = ms.div_euclid(MS_PER_DAY);
        if price <= 0 {
            return Err(IngestError::NonPositivePrice {
                item: item_id,
                day,
                price,
            });
        }
        entries.push((day, price));
    }
    entries.sort_unstable();
    if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(IngestError::DuplicateDay {
            item: item_id,
            day: w[0].0,
        });
    }
    let (days, prices) = entries.into_iter().unzip();
    Ok(PriceSeries::new(item_id, None, days, prices)?)
}

/// Parses the `item_id,volume` CSV. Output is sorted by volume descending,
/// then item id ascending.
pub fn parse_volume_table(text: &str) -> Result<Vec<VolumeRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| IngestError::MalformedDocument(format!("volume table: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["item_id", "volume"] {
        return Err(IngestError::MalformedDocument(format!(
            "volume table header must be item_id,volume (got {})",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| IngestError::MalformedDocument(format!("volume table: {e}")))?;
        let bad = |what: &str| {
            IngestError::MalformedDocument(format!("volume table row {}: bad {what}", line + 1))
        };
        let id = record
            .get(0)
            .and_then(|v| v.parse::<u32>().ok())
            .and_then(|v| ItemId::new(v).ok())
            .ok_or_else(|| bad("item_id"))?;
        let volume: i64 = record
            .get(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("volume"))?;
        let rec = VolumeRecord::new(id, volume).map_err(|_| IngestError::NonPositiveVolume(id))?;
        if !seen.insert(id) {
            return Err(IngestError::DuplicateItem(id));
        }
        out.push(rec);
    }
    sort_volumes(&mut out);
    Ok(out)
}
