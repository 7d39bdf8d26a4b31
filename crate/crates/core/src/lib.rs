//! Monitoring toolkit for virtual economies: ingestion of daily item price
//! histories, descriptive statistics, quartile and volume-weighted price
//! indexes, window inflation, augmented Dickey-Fuller tests on index
//! returns, and smoothed density heatmaps.

pub mod cli;
pub mod descriptive;
pub mod fmt;
pub mod heatmap;
pub mod indexes;
pub mod ingest;
pub mod io;
pub mod model;
pub mod money;
pub mod report;
pub mod stationarity;
pub mod synthetic;
pub mod transforms;

pub use model::{AnalysisWindow, BondQuote, ItemId, PriceSeries, Snapshot, VolumeRecord};
pub use money::Fixed4;
