//! Mertens products, the distance minimizer `t₀` and the Euler-product
//! diagnostics around it.

use serde_json::json;
use shortint_core::multfun::{
    distance_lowerbound_profile, euler_product_diagnostics, find_t0, h_threshold, halasz_distance_sq,
    nonvanishing_audit, T0Options,
};
use shortint_core::restrict::rho_sigma;
use shortint_core::PrimeTable;

use super::Ctx;
use crate::error::LabResult;
use crate::report::{num, CheckRow, Outcome, Table};

/// Points of the lower-bound profile.
const PROFILE_POINTS: usize = 201;

pub fn run(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(1_000_000);
    let xf = x as f64;
    let eps = ctx.eps();
    let alpha = ctx.alpha();
    // primes above X feed the Euler-product tail
    let table = PrimeTable::up_to(x.max(1_000_000))?;
    let primes = table.up_to_slice(xf)?;
    let pf = ctx.pf(&table, xf)?;
    let mut out = Outcome::default();
    out.set("X", x);
    out.set("pf_x", pf);
    out.set("h_threshold", h_threshold(ctx.k, pf, xf, eps)?);

    let prof = find_t0(&ctx.f, &table, xf, &T0Options::default(), ctx.runner)?;
    let d0 = halasz_distance_sq(&ctx.f, 0.0, primes);
    out.set(
        "t0",
        json!({
            "t0": prof.t0,
            "d2_at_t0": prof.d2_at_t0,
            "d2_at_zero": d0,
            "final_step": prof.final_step,
            "window": prof.window,
            "boundary": prof.boundary,
            "ties": prof.ties.len(),
            "reason": prof.reason,
            "coarse_points": prof.t_grid.len(),
        }),
    );
    out.checks.push(CheckRow::recorded(
        "t0",
        json!({ "X": x, "t0": prof.t0, "final_step": prof.final_step }),
        prof.d2_at_t0,
        d0,
        if d0 == 0.0 { 0.0 } else { prof.d2_at_t0 / d0 },
        1.0,
    ));
    let mut dist = Table::new("distance", &["t", "d2"]);
    for (t, d) in prof.t_grid.iter().zip(&prof.d2_values) {
        dist.push(vec![num(*t), num(*d)]);
    }
    out.tables.push(dist);

    // D²(t) - ρ min{log log X, 3 log(|t-t₀| log X + 1)} on the window
    let rho = rho_sigma(ctx.k, alpha)?.rho;
    let (lo, hi) = prof.window;
    let grid: Vec<f64> = (0..PROFILE_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (PROFILE_POINTS - 1) as f64)
        .collect();
    let margins = distance_lowerbound_profile(&ctx.f, &table, xf, prof.t0, rho, &grid)?;
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    out.checks.push(CheckRow::recorded(
        "3.1",
        json!({ "X": x, "rho": rho, "points": PROFILE_POINTS }),
        worst,
        0.0,
        worst,
        0.0,
    ));
    let mut mt = Table::new("lowerbound_margins", &["t", "margin"]);
    for (t, m) in grid.iter().zip(&margins) {
        mt.push(vec![num(*t), num(*m)]);
    }
    out.tables.push(mt);

    // powers of ten up to X as the (w, z) grid
    let mut pts = vec![2.0];
    let mut p = 10.0;
    while p <= xf {
        pts.push(p);
        p *= 10.0;
    }
    let pairs: Vec<(f64, f64)> = pts
        .iter()
        .flat_map(|&w| pts.iter().filter(move |&&z| z > w).map(move |&z| (w, z)))
        .collect();
    if !pairs.is_empty() {
        let nv = nonvanishing_audit(&ctx.f, &table, alpha, xf, &pairs)?;
        out.set("nonvanishing", &nv);
    }

    let gamma = 2.0 / xf.ln();
    let euler = euler_product_diagnostics(&ctx.f, &table, prof.t0, gamma, alpha, xf)?;
    out.set("euler", &euler);
    out.checks.push(CheckRow::recorded(
        "euler-truncation",
        json!({ "X": x, "t": prof.t0 }),
        euler.truncated_abs,
        euler.full_abs,
        euler.ratio_34,
        ctx.envelope("euler-truncation"),
    ));
    out.checks.push(CheckRow::recorded(
        "euler-shift",
        json!({ "X": x, "t": prof.t0, "gamma": gamma, "gamma_admissible": euler.gamma_admissible }),
        euler.shifted_abs,
        pf * xf.ln(),
        euler.ratio_35,
        ctx.envelope("euler-shift"),
    ));

    let mut plot = Table::new("plot", &["X", "t", "d2"]);
    for (t, d) in prof
        .t_grid
        .iter()
        .zip(&prof.d2_values)
        .step_by((prof.t_grid.len() / 2000).max(1))
    {
        plot.push(vec![x.to_string(), num(*t), num(*d)]);
    }
    out.plot = plot;
    Ok(out)
}
