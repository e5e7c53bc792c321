//! Short-window statistics: discrepancy scans, L² variances, exceptional
//! fractions and the threshold scan across window exponents.

use serde_json::{json, Value};
use shortint_core::accumulate::SegmentRunner;
use shortint_core::shortwin::{
    discrepancy_profile, exceptional_measure, h_for_exponent, inverse_threshold_experiment, BandTable, Centering,
    ComplexValueColumn, IntValueColumn, OmegaBandColumns, ValueTable, WindowScan,
};
use shortint_core::PrimeTable;

use super::Ctx;
use crate::config::{CenteringMode, NormalizerMode, T0Mode};
use crate::error::{usage, LabResult};
use crate::report::{num, CheckRow, Outcome, Table};

const QUANTILES: [f64; 3] = [0.5, 0.9, 0.99];

fn centering(ctx: &Ctx, default: CenteringMode, x: u64) -> LabResult<Centering> {
    Ok(match ctx.cfg.centering.unwrap_or(default) {
        CenteringMode::Plain => Centering::Plain,
        CenteringMode::Twisted => Centering::Twisted {
            t0: ctx.t0(x as f64, T0Mode::Auto)?,
        },
    })
}

fn t0_of(c: Centering) -> f64 {
    match c {
        Centering::Plain => 0.0,
        Centering::Twisted { t0 } => t0,
    }
}

/// Table end needed for windows up to `max_h` under `c`.
fn reach(x: u64, max_h: u64, c: Centering) -> u64 {
    match c {
        Centering::Plain => (2 * x + max_h).max(4 * x),
        Centering::Twisted { .. } => 2 * x + max_h,
    }
}

fn normalizer(ctx: &Ctx, x: u64) -> LabResult<f64> {
    Ok(match ctx.cfg.normalizer.unwrap_or(NormalizerMode::Log) {
        NormalizerMode::Log => (x as f64).ln().powi(ctx.k as i32 - 1),
        NormalizerMode::Pf => ctx.pf(&PrimeTable::up_to(x)?, x as f64)?,
    })
}

fn h_grid(ctx: &Ctx, default: &[u64]) -> LabResult<Vec<u64>> {
    let g = ctx.cfg.h_grid.clone().unwrap_or_else(|| default.to_vec());
    if g.is_empty() {
        return Err(usage("h_grid is empty"));
    }
    if g.contains(&0) {
        return Err(usage("h_grid entries must be at least 1"));
    }
    Ok(g)
}

fn centering_json(c: Centering) -> Value {
    match c {
        Centering::Plain => json!("plain"),
        Centering::Twisted { t0 } => json!({ "twisted": t0 }),
    }
}

fn scan_summary(scan: &WindowScan, t0: f64, etas: &[f64]) -> Value {
    let q = scan.quantiles(&QUANTILES);
    json!({
        "X": scan.x,
        "h": scan.h,
        "t0": t0,
        "normalizer": scan.normalizer,
        "mean_abs": scan.mean_abs,
        "l2": scan.l2,
        "quantiles": q,
        "exceptional": etas.iter().map(|&eta| json!({ "eta": eta, "fraction": exceptional_measure(scan, eta) })).collect::<Vec<_>>(),
    })
}

pub fn scan(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(1_000_000);
    let hs = h_grid(ctx, &[])?;
    let c = centering(ctx, CenteringMode::Twisted, x)?;
    let t0 = t0_of(c);
    let norm = normalizer(ctx, x)?;
    let etas = ctx.cfg.eta_grid.clone().unwrap_or_else(|| vec![0.1, 0.25, 0.5, 1.0]);
    let keep = ctx.cfg.keep_delta.unwrap_or(x <= 1_000_000);
    let table = ValueTable::build(&ctx.f, x, reach(x, *hs.iter().max().unwrap(), c), t0, ctx.runner)?;

    let mut out = Outcome::default();
    let mut summaries = Vec::new();
    let mut plot = Table::new("plot", &["X", "h", "statistic", "value"]);
    for &h in &hs {
        let scan = discrepancy_profile(&table, x, h, c, norm, keep)?;
        let summary = scan_summary(&scan, t0, &etas);
        let q = scan.quantiles(&QUANTILES);
        for (name, v) in [
            ("mean_abs", scan.mean_abs),
            ("l2", scan.l2),
            ("p50", q[0]),
            ("p90", q[1]),
            ("p99", q[2]),
        ] {
            plot.push(vec![x.to_string(), h.to_string(), name.to_string(), num(v)]);
        }
        for &eta in &etas {
            plot.push(vec![
                x.to_string(),
                h.to_string(),
                format!("exceptional_eta_{eta}"),
                num(exceptional_measure(&scan, eta)),
            ]);
        }
        out.checks.push(CheckRow::recorded(
            "1.4",
            json!({ "X": x, "h": h, "t0": t0, "centering": centering_json(c) }),
            scan.mean_abs,
            norm,
            scan.mean_abs / norm,
            ctx.envelope("1.4"),
        ));
        if let Some(delta) = &scan.delta {
            let mut t = Table::new(format!("delta_h{h}"), &["x", "re", "im", "abs"]);
            for (i, d) in delta.iter().enumerate() {
                t.push(vec![(x + i as u64).to_string(), num(d.re), num(d.im), num(d.norm())]);
            }
            out.tables.push(t);
        }
        summaries.push(summary);
    }
    out.set("X", x);
    out.set("centering", centering_json(c));
    out.set("scans", summaries);
    out.set(
        "caveat",
        "finite-X statistics; the o(·) claims are not decidable at any finite X",
    );
    out.plot = plot;
    Ok(out)
}

pub fn variance(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(10_000_000);
    let hs = h_grid(ctx, &[1, 2, 4, 8])?;
    let c = centering(ctx, CenteringMode::Plain, x)?;
    let t0 = t0_of(c);
    let table = ValueTable::build(&ctx.f, x, reach(x, *hs.iter().max().unwrap(), c), t0, ctx.runner)?;

    let mut out = Outcome::default();
    let mut plot = Table::new("plot", &["X", "h", "l2", "h_times_l2"]);
    let mut rows = Vec::new();
    for &h in &hs {
        let l2 = discrepancy_profile(&table, x, h, c, 1.0, false)?.l2;
        plot.push(vec![x.to_string(), h.to_string(), num(l2), num(h as f64 * l2)]);
        rows.push((h, l2));
    }
    let mut scaled: Vec<f64> = rows.iter().map(|&(h, l2)| h as f64 * l2).collect();
    scaled.sort_by(f64::total_cmp);
    let median = scaled[scaled.len() / 2];
    let spread = scaled.iter().map(|v| (v / median).max(median / v)).fold(0.0, f64::max);
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.0);
    let decreasing = sorted.windows(2).all(|w| w[1].1 < w[0].1);
    let log_x = (x as f64).ln();
    let k = ctx.k as i32;

    out.set("X", x);
    out.set("centering", centering_json(c));
    out.set(
        "rows",
        rows.iter()
            .map(|&(h, l2)| json!({ "h": h, "l2": l2, "h_times_l2": h as f64 * l2 }))
            .collect::<Vec<_>>(),
    );
    out.set("median_h_times_l2", median);
    out.set("max_factor_from_median", spread);
    out.set("strictly_decreasing", decreasing);
    out.set("diagonal_prediction", log_x.powi(k * k - 1));
    out.checks.push(CheckRow::recorded(
        "1.4-variance",
        json!({ "X": x, "h_grid": hs, "statistic": "max factor of h·l2 from its median" }),
        spread,
        2.0,
        spread / 2.0,
        2.0,
    ));
    out.plot = plot;
    Ok(out)
}

pub fn exceptional(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(1_000_000);
    let hs = h_grid(ctx, &[2, 8, 32, 128])?;
    let etas = ctx.cfg.eta_grid.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0]);
    let c = centering(ctx, CenteringMode::Twisted, x)?;
    let t0 = t0_of(c);
    let norm = normalizer(ctx, x)?;
    let table = ValueTable::build(&ctx.f, x, reach(x, *hs.iter().max().unwrap(), c), t0, ctx.runner)?;

    let mut out = Outcome::default();
    let mut t = Table::new("exceptional", &["X", "h", "eta", "fraction"]);
    let mut grid = Vec::new();
    for &h in &hs {
        let scan = discrepancy_profile(&table, x, h, c, norm, false)?;
        let fr: Vec<f64> = etas.iter().map(|&e| exceptional_measure(&scan, e)).collect();
        for (&e, &v) in etas.iter().zip(&fr) {
            t.push(vec![x.to_string(), h.to_string(), num(e), num(v)]);
        }
        grid.push((h, fr));
    }
    for (j, &eta) in etas.iter().enumerate() {
        let series: Vec<f64> = grid.iter().map(|g| g.1[j]).collect();
        let increases = series.windows(2).filter(|w| w[1] > w[0]).count();
        out.checks.push(CheckRow::recorded(
            "1.1",
            json!({ "X": x, "eta": eta, "h_grid": hs, "fractions": series, "statistic": "increases along h" }),
            increases as f64,
            0.0,
            increases as f64,
            0.0,
        ));
    }
    out.set("X", x);
    out.set("normalizer", norm);
    out.set("centering", centering_json(c));
    out.set(
        "rows",
        grid.iter()
            .map(|(h, fr)| json!({ "h": h, "fractions": fr }))
            .collect::<Vec<_>>(),
    );
    out.plot = t.clone();
    out.plot.name = "plot".into();
    out.tables.push(t);
    Ok(out)
}

/// `ε′ = ε/(k log k)`, or `ε` when `k = 1`.
pub fn default_eps_prime(eps: f64, k: u32) -> f64 {
    if k >= 2 {
        eps / (k as f64 * (k as f64).ln())
    } else {
        eps
    }
}

/// Window length of the threshold scan's reference row.
const BASELINE_H: u64 = 2;

pub fn threshold(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(10_000_000);
    let xf = x as f64;
    let k = ctx.k;
    let exps = ctx
        .cfg
        .exponents
        .clone()
        .unwrap_or_else(|| vec![0.1, 0.25, 0.3863, 0.6, 1.0, 1.5]);
    if exps.is_empty() {
        return Err(usage("exponents grid is empty"));
    }
    let eta = ctx.cfg.eta.unwrap_or(0.5);
    let eps_prime = ctx.cfg.eps_prime.unwrap_or_else(|| default_eps_prime(ctx.eps(), k));
    let t0 = ctx.t0(xf, T0Mode::Zero)?;
    let c = Centering::Twisted { t0 };
    let norm = normalizer(ctx, x)?;

    // rows with h ≥ X are flagged and skipped
    let rows: Vec<(f64, u64, bool)> = exps
        .iter()
        .map(|&e| {
            let h = h_for_exponent(xf, e);
            (e, h, h >= x)
        })
        .collect();
    let max_h = rows
        .iter()
        .filter(|r| !r.2)
        .map(|r| r.1)
        .max()
        .unwrap_or(1)
        .max(BASELINE_H);
    let end = 2 * x + max_h;
    OmegaBandColumns::new(xf, k, eps_prime)?;
    let (table, band) = if ctx.f.is_integer_valued() {
        let (vals, cols) = ctx.runner.run(x + 1, end + 1, || {
            (
                IntValueColumn::new(&ctx.f),
                OmegaBandColumns::new(xf, k, eps_prime).expect("validated above"),
            )
        })?;
        (
            ValueTable::from_int_values(x, vals.values, t0)?,
            BandTable::from_columns(x, xf, cols)?,
        )
    } else {
        let (vals, cols) = ctx.runner.run(x + 1, end + 1, || {
            (
                ComplexValueColumn::new(&ctx.f),
                OmegaBandColumns::new(xf, k, eps_prime).expect("validated above"),
            )
        })?;
        (
            ValueTable::from_complex_values(x, vals.values, t0)?,
            BandTable::from_columns(x, xf, cols)?,
        )
    };

    let mut out = Outcome::default();
    let mut plot = Table::new(
        "plot",
        &[
            "exponent",
            "h",
            "exceptional_fraction",
            "vanish_fraction",
            "concentrated_dk_mass",
        ],
    );
    let mut json_rows = Vec::new();
    let mut series = Vec::new();
    for &(e, h, skipped) in &rows {
        if skipped {
            json_rows.push(json!({ "exponent": e, "h": h, "skipped": "h >= X" }));
            continue;
        }
        let scan = discrepancy_profile(&table, x, h, c, norm, false)?;
        let exc = exceptional_measure(&scan, eta);
        drop(scan);
        let inv = inverse_threshold_experiment(&band, x, &[h])?[0];
        plot.push(vec![
            num(e),
            h.to_string(),
            num(exc),
            num(inv.vanish_fraction),
            num(inv.concentrated_dk_mass),
        ]);
        json_rows.push(json!({
            "exponent": e,
            "h": h,
            "exceptional_fraction": exc,
            "vanish_fraction": inv.vanish_fraction,
            "concentrated_dk_mass": inv.concentrated_dk_mass,
        }));
        series.push((e, h, exc, inv.vanish_fraction));
    }
    // the shortest non-trivial window as the reference level
    let base_scan = discrepancy_profile(&table, x, BASELINE_H, c, norm, false)?;
    let baseline = exceptional_measure(&base_scan, eta);
    drop(base_scan);
    out.set("baseline", json!({ "h": BASELINE_H, "exceptional_fraction": baseline }));
    let kf = k as f64;
    let critical = kf * kf.ln() - kf + 1.0;
    out.set("X", x);
    out.set("eta", eta);
    out.set("eps_prime", eps_prime);
    out.set("t0", t0);
    out.set("normalizer", norm);
    out.set("critical_exponent", critical);
    out.set("l2_exponent", (kf - 1.0) * (kf - 1.0));
    out.set("rows", json_rows);
    out.set(
        "caveat",
        "finite-X crossing profile; the threshold statements are asymptotic",
    );

    let mut by_e = series.clone();
    by_e.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vanish_drops = by_e.windows(2).filter(|w| w[1].3 > w[0].3 * 1.05 + 1e-12).count();
    out.checks.push(CheckRow::recorded(
        "1.2",
        json!({ "X": x, "eps_prime": eps_prime, "statistic": "rises of vanish_fraction as the exponent grows" }),
        vanish_drops as f64,
        0.0,
        vanish_drops as f64,
        0.0,
    ));
    out.plot = plot;
    Ok(out)
}
