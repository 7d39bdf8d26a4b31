//! Writes a seeded synthetic snapshot: `synthetic_snapshot <dir> [items] [seed]`.

use std::path::PathBuf;

use vecon::ingest::save_snapshot;
use vecon::synthetic::{generate_economy, EconomySpec};
use vecon::{BondQuote, Fixed4};

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(
        args.next()
            .expect("usage: synthetic_snapshot <dir> [items] [seed]"),
    );
    let items = args.next().map_or(400, |s| s.parse().expect("items"));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));
    let spec = EconomySpec {
        items,
        seed,
        bond: Some(BondQuote::new(Fixed4::from_raw(59_900), 4_000_000).expect("valid quote")),
        ..EconomySpec::default()
    };
    save_snapshot(&generate_economy(&spec), &dir).expect("snapshot written");
    eprintln!("wrote {items} items to {}", dir.display());
}
