//! Dirichlet polynomial checks: mean values, large values, amplification,
//! rough-restricted sums, the Perron window and the Ramaré identity.

use serde_json::json;
use shortint_core::accumulate::{Collect, SegmentRunner};
use shortint_core::dirichlet::{
    amplified_meanvalue, amplifier_length, discrete_meanvalue_check, frak_s, henriot_correlation, large_value_set,
    meanvalue_check, perron_window_check, ramare_decompose, rough_restricted_sum, AmplifiedInputs, BoundCheck,
    HenriotInputs, RamareParams, RoughParams, UniformGrid, WellSpacedSet,
};
use shortint_core::multfun::MultiplicativeFunction;
use shortint_core::restrict::{default_eps0, default_params, rho_sigma, RestrictionSet};
use shortint_core::sieve::{big_omega, FactorView};
use shortint_core::{Complex64, PrimeTable, SieveSegment};

use super::Ctx;
use crate::config::T0Mode;
use crate::error::{usage, LabResult};
use crate::report::{num, CheckRow, Outcome, Table};

/// Points of the rough-restricted grid.
const ROUGH_POINTS: usize = 1001;

/// `(n, f(n))` for `lo < n ≤ hi`, optionally primes only.
fn coefficients<R: SegmentRunner>(
    f: &MultiplicativeFunction,
    lo: u64,
    hi: u64,
    primes_only: bool,
    runner: &R,
) -> LabResult<Vec<(u64, Complex64)>> {
    let v = runner
        .run(lo + 1, hi + 1, || {
            Collect::new(|n, seg: &SieveSegment, i| {
                let fv = seg.view_at(i);
                let keep = !primes_only || (n > 1 && big_omega(fv) == 1);
                Ok((n, if keep { f.eval(fv)? } else { Complex64::new(0.0, 0.0) }))
            })
        })?
        .values;
    Ok(v.into_iter()
        .filter(|c| !primes_only || c.1 != Complex64::new(0.0, 0.0))
        .collect())
}

/// Largest admissible step `1/(4 log n)`, shrunk by 10% so rounding never
/// pushes it over.
fn safe_step(n_max: f64) -> f64 {
    0.9 * 0.25 / n_max.ln().max(1.0)
}

fn bound_row(tag: &str, params: serde_json::Value, c: &BoundCheck, env: f64) -> CheckRow {
    CheckRow::bound(tag, params, c.lhs, c.rhs, c.ratio, env)
}

pub fn run(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(1_000_000);
    let xf = x as f64;
    let k = ctx.k;
    let eps = ctx.eps();
    let f = &ctx.f;
    let runner = ctx.runner;
    let mut out = Outcome::default();
    out.set("X", x);

    // continuous mean value on f(n), n ≤ 1000
    let n41 = 1000;
    let c41 = coefficients(f, 0, n41, false, runner)?;
    let step41 = ctx.cfg.quad_step.unwrap_or_else(|| safe_step(n41 as f64));
    let mut mv = Vec::new();
    for t in [10.0, 100.0, 1000.0] {
        let c = meanvalue_check(&c41, t, step41, runner)?;
        mv.push(json!({ "T": t, "lhs": c.lhs, "rhs": c.rhs, "ratio": c.ratio }));
        out.checks.push(bound_row(
            "4.1",
            json!({ "N": n41, "T": t, "quad_step": step41 }),
            &c,
            ctx.envelope("4.1"),
        ));
    }
    out.set("meanvalue", mv);

    let hi = HenriotInputs {
        x,
        y: ctx.cfg.henriot_y.unwrap_or(10_000),
        k_max: ctx.cfg.henriot_k.unwrap_or(10),
        r1: ctx.cfg.r1.unwrap_or(2),
        r2: ctx.cfg.r2.unwrap_or(3),
        theta: ctx.cfg.theta.unwrap_or(0.5),
    };
    let c = henriot_correlation(f, &hi, runner)?;
    out.set(
        "henriot",
        json!({ "inputs": hi, "lhs": c.lhs, "rhs": c.rhs, "ratio": c.ratio }),
    );
    out.checks
        .push(bound_row("4.2", serde_json::to_value(hi)?, &c, ctx.envelope("4.2")));

    let table = PrimeTable::up_to(x)?;
    let pf = ctx.pf(&table, xf)?;
    out.set("pf_x", pf);
    let t_max = ctx.cfg.t_max.unwrap_or(1000.0);
    let s = frak_s(t_max, xf, k, pf, eps)?;
    out.set("frak_s", json!({ "T": t_max, "X": x, "eps": eps, "value": s }));
    out.checks.push(CheckRow::recorded(
        "4.3",
        json!({ "T": t_max, "X": x, "eps": eps, "normalization": "(T H / X + 1) P_f(X)^2" }),
        s,
        pf * pf,
        s / (pf * pf),
        ctx.envelope("4.3"),
    ));

    // discrete mean value on (10⁴, 2·10⁴] over the even integers of [-100, 100]
    let x44 = 10_000;
    let c44 = coefficients(f, x44, 2 * x44, false, runner)?;
    let set = WellSpacedSet::new((-50..=50).map(|j| 2.0 * j as f64).collect(), 100.0)?;
    let c = discrete_meanvalue_check(&c44, &set, x44)?;
    out.checks.push(bound_row(
        "4.4",
        json!({ "X": x44, "T": 100.0, "points": set.len() }),
        &c,
        ctx.envelope("4.4"),
    ));

    let p45 = ctx.cfg.large_p.unwrap_or(1000.0);
    let t45 = ctx.cfg.large_t.unwrap_or(10_000.0);
    let v45 = ctx.cfg.large_v.unwrap_or(10.0);
    let primes45 = coefficients(f, p45.floor() as u64, (2.0 * p45).floor() as u64, true, runner)?;
    let lv = large_value_set(&primes45, p45, t45, v45, k, runner)?;
    out.set(
        "large_values",
        json!({ "P": p45, "T": t45, "V": v45, "count": lv.set.len(), "candidates": lv.candidates, "bound": lv.bound }),
    );
    out.checks.push(CheckRow::bound(
        "4.5",
        json!({ "P": p45, "T": t45, "V": v45, "candidates": lv.candidates }),
        lv.set.len() as f64,
        lv.bound,
        lv.ratio(),
        ctx.envelope("4.5"),
    ));
    let mut lt = Table::new("large_values", &["t"]);
    for t in lv.set.points() {
        lt.push(vec![num(*t)]);
    }
    out.tables.push(lt);

    let y1 = ctx.cfg.y1.unwrap_or(100);
    let y2 = ctx.cfg.y2.unwrap_or(10_000);
    let amp_x = ctx.cfg.amp_x.unwrap_or(x);
    let l = amplifier_length(y1 as f64, y2 as f64)?;
    let n_amp = (2.0 * amp_x as f64 / y2 as f64) * (2.0 * y1 as f64).powi(l as i32);
    let ai = AmplifiedInputs {
        y1,
        y2,
        x: amp_x,
        l,
        t_max: ctx.cfg.amp_t.unwrap_or(100.0),
        eps,
        quad_step: safe_step(n_amp),
    };
    let c = amplified_meanvalue(f, &ai, runner, runner)?;
    out.checks
        .push(bound_row("4.7", serde_json::to_value(ai)?, &c, ctx.envelope("4.7")));

    // rough-restricted sums on [log^{σ₀} X, 1000]
    let rs = rho_sigma(k, ctx.alpha())?;
    let t0 = ctx.t0(xf, T0Mode::Auto)?;
    let rp = RoughParams {
        x,
        p: ctx.cfg.p.unwrap_or(10.0),
        q: ctx.cfg.q.unwrap_or(1000.0),
        t0,
        rho: rs.rho,
        sigma0: rs.sigma,
    };
    let lo = xf.ln().powf(rs.sigma);
    let span = 1000.0 - lo;
    if !(span > 0.0) {
        return Err(usage("log^σ₀ X exceeds the grid end 1000"));
    }
    let grid = UniformGrid {
        t_min: lo,
        dt: span / (ROUGH_POINTS - 1) as f64,
        len: ROUGH_POINTS,
    };
    let rr = rough_restricted_sum(f, &rp, &grid, runner, runner)?;
    let prm = serde_json::to_value(rp)?;
    out.checks.push(CheckRow::recorded(
        "3.2",
        prm.clone(),
        rr.sup_sum,
        rr.bound_rough,
        rr.rough_ratio(),
        ctx.envelope("3.2"),
    ));
    out.checks.push(CheckRow::recorded(
        "3.3",
        prm,
        rr.sup_r,
        rr.bound_r,
        rr.r_ratio(),
        ctx.envelope("3.3"),
    ));
    // grid points where |R| / P_f reaches δ = (log X)^{-σ/3}
    let delta = xf.ln().powf(-rs.sigma / 3.0);
    let large = rr.r_values.iter().filter(|v| v.norm() / rr.pf_x >= delta).count();
    out.set(
        "rough",
        json!({ "params": rp, "sup_sum": rr.sup_sum, "sup_r": rr.sup_r, "bound_rough": rr.bound_rough,
                "bound_r": rr.bound_r, "delta": delta, "points": ROUGH_POINTS, "r_at_least_delta": large }),
    );
    let pts = grid.points();
    for (name, vals) in [("rough_sums", &rr.sums), ("r_values", &rr.r_values)] {
        let mut t = Table::new(name, &["t", "re", "im", "abs"]);
        for (tt, v) in pts.iter().zip(vals.iter()) {
            t.push(vec![num(*tt), num(v.re), num(v.im), num(v.norm())]);
        }
        out.tables.push(t);
    }

    let px = ctx.cfg.perron_x.unwrap_or(1000.5);
    let ph = ctx.cfg.perron_h.unwrap_or(50.0);
    let tms = ctx
        .cfg
        .perron_t_max
        .clone()
        .unwrap_or_else(|| vec![100.0, 1000.0, 10_000.0]);
    let step = safe_step(2.0 * px);
    let mut pt = Table::new(
        "perron",
        &["t_max", "approx_re", "approx_im", "exact_re", "exact_im", "error"],
    );
    let mut plot = Table::new("plot", &["X", "t_max", "perron_error"]);
    for &tm in &tms {
        let pc = perron_window_check(f, px, ph, tm, step, runner, runner)?;
        pt.push(vec![
            num(tm),
            num(pc.approx.re),
            num(pc.approx.im),
            num(pc.exact.re),
            num(pc.exact.im),
            num(pc.error),
        ]);
        plot.push(vec![num(px), num(tm), num(pc.error)]);
        out.checks.push(CheckRow::recorded(
            "perron",
            json!({ "x": px, "h": ph, "t_max": tm, "quad_step": step }),
            pc.error,
            pc.exact.norm(),
            if pc.exact.norm() > 0.0 {
                pc.error / pc.exact.norm()
            } else {
                pc.error
            },
            ctx.envelope("perron"),
        ));
    }
    out.tables.push(pt);
    out.plot = plot;
    Ok(out)
}

pub fn ramare(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(10_000);
    let xf = x as f64;
    let eps = ctx.eps();
    let params = RamareParams {
        x,
        p: ctx.cfg.p.unwrap_or(10.0),
        q: ctx.cfg.q.unwrap_or(100.0),
        h: ctx.cfg.ramare_h.unwrap_or(5.0),
    };
    let t_points = ctx.cfg.t_points.clone().unwrap_or_else(|| vec![0.0, 1.0, 10.0]);
    let mut out = Outcome::default();
    let restriction = ctx.cfg.restriction.as_deref().unwrap_or("ab");
    let d = if restriction == "all" {
        ramare_decompose(&ctx.f, &params, &|_: FactorView<'_>| true, &t_points, ctx.runner)?
    } else {
        let table = PrimeTable::up_to(x)?;
        let pf = ctx.pf(&table, xf)?;
        let eps0 = ctx.cfg.eps0.unwrap_or_else(|| default_eps0(ctx.k, ctx.alpha(), eps));
        let set = RestrictionSet::new(default_params(xf, eps0)?, eps / 2.0, pf);
        out.set("restriction_params", &set.params);
        out.set("omega_cap", set.omega_cap);
        ramare_decompose(
            &ctx.f,
            &params,
            &|fv: FactorView<'_>| set.contains(fv),
            &t_points,
            ctx.runner,
        )?
    };
    out.set("restriction", restriction);
    out.set("params", params);
    out.set("abs_mass", d.abs_mass);
    out.set("tolerance", d.tolerance);
    out.set("bins", &d.bins);
    out.set("b4_defects", d.defects);

    let mut rows = Table::new(
        "ramare",
        &[
            "t", "lhs_re", "lhs_im", "b1_re", "b1_im", "b2_re", "b2_im", "b3_re", "b3_im", "b4_re", "b4_im", "b5_re",
            "b5_im", "residual",
        ],
    );
    let mut plot = Table::new("plot", &["X", "t", "residual"]);
    let mut worst = 0.0f64;
    for r in &d.rows {
        let mut row = vec![num(r.t), num(r.lhs.re), num(r.lhs.im)];
        for p in &r.pieces {
            row.push(num(p.re));
            row.push(num(p.im));
        }
        row.push(num(r.residual));
        rows.push(row);
        plot.push(vec![x.to_string(), num(r.t), num(r.residual)]);
        worst = worst.max(r.residual);
    }
    out.tables.push(rows);
    out.plot = plot;
    out.checks.push(CheckRow::bound(
        "4.6",
        json!({ "X": x, "P": params.p, "Q": params.q, "H": params.h, "restriction": restriction }),
        worst,
        d.tolerance,
        worst / d.tolerance,
        ctx.envelopes_or("4.6", 1.0),
    ));
    Ok(out)
}
