//! Markdown projection of a [`HealthReport`]. Numbers are rendered with the
//! same serializer as the JSON so every one of them appears there verbatim.

use std::fmt::Write;

use serde::Serialize;

use super::{HealthReport, IndexReport};

fn num<T: Serialize>(v: T) -> String {
    let s = serde_json::to_string(&v).expect("number serializes");
    s.trim_matches('"').to_string()
}

fn index_row(out: &mut String, ix: &IndexReport) {
    let (t, p, lags, decision) = match &ix.adf {
        Some(a) => (
            num(a.t_stat),
            num(a.p_value),
            num(a.lags_used),
            if ix.rejects_unit_root == Some(true) {
                "reject unit root"
            } else {
                "cannot reject"
            },
        ),
        None => ("n/a".into(), "n/a".into(), "n/a".into(), "not tested"),
    };
    let _ = writeln!(
        out,
        "| {} | {} | {} | {} | {} | {} | {} | {} |",
        ix.label,
        num(ix.members),
        t,
        p,
        lags,
        decision,
        ix.inflation_pct_display,
        ix.alert.as_str()
    );
}

pub(super) fn render(r: &HealthReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Economy health report\n");
    let _ = writeln!(
        out,
        "Window: {} for {} days.\n",
        r.window.start_day,
        num(r.window.length_days)
    );
    let _ = writeln!(
        out,
        "Items: {} in, {} retained, {} excluded as static.",
        num(r.exclusion.input_count),
        num(r.exclusion.retained_count),
        num(r.exclusion.excluded_ids.len())
    );
    if !r.rejected.is_empty() {
        let _ = writeln!(
            out,
            "{} items were dropped while aligning to the window (see report.json).",
            num(r.rejected.len())
        );
    }

    let _ = writeln!(out, "\n## Indexes\n");
    let _ = writeln!(
        out,
        "Thresholds: warn at {}%, critical at {}%, ADF alpha {}.\n",
        num(r.thresholds.inflation_warn_pct),
        num(r.thresholds.inflation_critical_pct),
        num(r.thresholds.adf_alpha)
    );
    let _ = writeln!(
        out,
        "| index | members | ADF t | ADF p | lags | decision | inflation % | alert |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
    for ix in r.indexes() {
        index_row(&mut out, ix);
    }
    let _ = writeln!(
        out,
        "\nMean quartile inflation: {}%.",
        num(r.mean_quartile_inflation_pct)
    );
    for ix in r.indexes() {
        if let Some(e) = &ix.adf_error {
            let _ = writeln!(out, "\nADF on `{}` failed: {e}", ix.label);
        }
    }

    if let Some(top) = &r.top {
        let _ = writeln!(out, "\n## Trading volume\n");
        let _ = writeln!(out, "| top k | share of volume |");
        let _ = writeln!(out, "|---|---|");
        for row in &top.volume_shares {
            let _ = writeln!(out, "| {} | {} |", num(row.k), num(row.share));
        }
        if let Some(tv) = &top.traded_value {
            let _ = writeln!(
                out,
                "\nReal value traded: {} for the top {} items, {} for all {}.",
                num(tv.head_value),
                num(tv.head_items),
                num(tv.all_value),
                num(tv.all_items)
            );
        }
        if !top.dropped_ids.is_empty() {
            let _ = writeln!(
                out,
                "\n{} volume-table items were not in the retained set.",
                num(top.dropped_ids.len())
            );
        }
    }

    let _ = writeln!(out, "\n## Heatmaps\n");
    for h in &r.heatmaps {
        let _ = writeln!(
            out,
            "- `{}`: {} vs {}, {} points, {} bins, sigma {} (`{}`)",
            h.name,
            h.y_label,
            h.x_label,
            num(h.points),
            num(h.bins),
            num(h.sigma),
            h.files.csv
        );
    }

    let _ = writeln!(out, "\n## Conventions\n");
    let c = &r.conventions;
    for (k, v) in [
        ("inflation denominator", c.inflation_denominator),
        ("sigma divisor", c.sigma_divisor),
        ("quartile criterion", c.quartile_criterion),
        ("ADF flavor", c.adf_flavor),
        ("ADF lag selection", c.adf_lag_selection),
        ("ADF p-values", c.adf_p_values),
        ("ADF decision", c.adf_decision),
        ("gap policy", c.gap_policy),
        ("static exclusion", c.static_exclusion),
        ("real-value rounding", c.real_value_rounding),
    ] {
        let _ = writeln!(out, "- {k}: {v}");
    }
    let _ = writeln!(out, "\n## Notes\n");
    for n in &r.notes {
        let _ = writeln!(out, "- {n}");
    }
    out
}
