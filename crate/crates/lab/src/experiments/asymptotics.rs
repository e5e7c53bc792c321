//! Prime-factor statistics and the restriction tail sums.

use serde_json::json;
use shortint_core::multfun::h_threshold;
use shortint_core::restrict::{
    concentrated_dk_tail, default_eps0, default_params, kpow_omega_sum, omega_concentration_counts, rho_sigma,
    shiu_ratio, tail_sum_a, tail_sum_b, CK_TOLERANCE,
};
use shortint_core::PrimeTable;

use super::Ctx;
use crate::error::{usage, LabResult};
use crate::report::{num, CheckRow, Outcome, Table};

pub fn run(ctx: &Ctx) -> LabResult<Outcome> {
    let x = ctx.x_or(1_000_000);
    let xf = x as f64;
    let k = ctx.k;
    let eps = ctx.eps();
    let alpha = ctx.alpha();
    let delta = ctx.cfg.delta.unwrap_or(0.5);
    let table = PrimeTable::up_to(x)?;
    let pf = ctx.pf(&table, xf)?;
    let mut out = Outcome::default();
    out.set("X", x);
    out.set("pf_x", pf);
    out.set("h_threshold", h_threshold(k, pf, xf, eps)?);

    // Σ k^ω(n) against c_k x log^{k-1} x
    let kp = kpow_omega_sum(x, k, ctx.runner)?;
    out.set("kpow_omega", &kp);
    out.set("kpow_omega_sum", kp.sum.to_string());
    if k == 2 {
        let six_over_pi2 = 6.0 / std::f64::consts::PI.powi(2);
        out.set("six_over_pi_squared", six_over_pi2);
        let err = (kp.c_k - six_over_pi2).abs();
        out.checks.push(CheckRow::bound(
            "2.4-constant",
            json!({ "k": 2, "tolerance": 1e-6 }),
            kp.c_k,
            six_over_pi2,
            err / 1e-6,
            1.0,
        ));
    }
    out.checks.push(CheckRow::recorded(
        "2.4",
        json!({ "x": x, "k": k, "c_k_error": kp.c_k_error, "tolerance": CK_TOLERANCE }),
        kp.normalized,
        kp.c_k,
        kp.normalized / kp.c_k,
        ctx.envelope("2.4"),
    ));

    // concentration tail along x/100, x/10, x
    let tail_eps = ctx.cfg.eps_prime.unwrap_or(0.3);
    let mut trend = Vec::new();
    for xi in [x / 100, x / 10, x] {
        if xi < 16 {
            continue;
        }
        let t = concentrated_dk_tail(xi, k, tail_eps, ctx.runner)?;
        trend.push(json!({
            "x": xi,
            "lhs": t.lhs.to_string(),
            "normalized": t.normalized,
            "rankin_rhs": t.rankin_rhs,
            "rankin_violations": t.rankin_violations,
        }));
        out.checks.push(CheckRow::recorded(
            "2.5",
            json!({ "x": xi, "k": k, "eps": tail_eps, "rankin_violations": t.rankin_violations }),
            t.lhs as f64,
            xi as f64 * (xi as f64).ln().powi(k as i32 - 1),
            t.normalized,
            ctx.envelope("2.5"),
        ));
    }
    out.set("concentrated_tail", trend);

    let band_eps = ctx.cfg.eps_prime.unwrap_or(0.1);
    let conc = omega_concentration_counts(x, k, band_eps, ctx.runner)?;
    let env = ctx.envelope("2.6");
    for (side, ratio, bound) in [
        ("lower", conc.lower_ratio(), conc.lower_bound),
        ("upper", conc.upper_ratio(), conc.upper_bound),
    ] {
        out.checks.push(CheckRow::recorded(
            "2.6",
            json!({ "x": x, "k": k, "eps_prime": band_eps, "side": side, "bracket": [1.0 / env, env] }),
            conc.typical as f64,
            bound,
            ratio,
            env,
        ));
    }
    let mut hist = Table::new("omega_histogram", &["omega", "count", "weighted_count"]);
    for r in &conc.histogram {
        hist.push(vec![
            r.omega.to_string(),
            r.count.to_string(),
            r.weighted_count.to_string(),
        ]);
    }
    out.tables.push(hist);
    out.set(
        "concentration",
        json!({
            "typical": conc.typical,
            "deviant": conc.deviant,
            "lower_bound": conc.lower_bound,
            "upper_bound": conc.upper_bound,
            "lower_ratio": conc.lower_ratio(),
            "upper_ratio": conc.upper_ratio(),
        }),
    );

    let b = tail_sum_b(&ctx.f, x, eps, delta, ctx.runner)?;
    out.checks.push(CheckRow::bound(
        "2.3",
        json!({ "X": x, "eps": eps, "delta": delta, "threshold": b.threshold, "rankin_violations": b.rankin_violations }),
        b.lhs,
        b.rhs,
        b.ratio,
        ctx.envelope("2.3"),
    ));

    let eps0 = ctx.cfg.eps0.unwrap_or_else(|| default_eps0(k, alpha, eps));
    let params = default_params(xf, eps0)?;
    let a = tail_sum_a(&ctx.f, x, &params, ctx.runner)?;
    out.set("restriction_params", &params);
    out.checks.push(CheckRow::recorded(
        "2.2",
        json!({ "X": x, "eps0": eps0, "density_a": a.density_a, "clamped": params.clamped.any() }),
        a.lhs,
        a.rhs_factor,
        a.ratio,
        ctx.envelope("2.2"),
    ));

    let shiu_delta = 0.25;
    let ys = ctx.cfg.shiu_y.clone().unwrap_or_else(|| vec![x / 100, x / 10]);
    let mut shiu = Vec::new();
    for &y in &ys {
        if y == 0 || y > x {
            return Err(usage(format!("shiu_y entry {y} must lie in [1, X]")));
        }
        let r = shiu_ratio(&ctx.f, x, x, y, shiu_delta, ctx.runner)?;
        shiu.push(json!({ "y": y, "ratio": r }));
        out.checks.push(CheckRow::bound(
            "2.1",
            json!({ "X": x, "Y": x, "y": y, "delta": shiu_delta }),
            r * y as f64 * pf,
            y as f64 * pf,
            r,
            ctx.envelope("2.1"),
        ));
    }
    out.set("shiu", shiu);

    let rs = rho_sigma(k, alpha)?;
    out.set(
        "rho_sigma",
        json!({ "k": k, "alpha": alpha, "rho": rs.rho, "sigma": rs.sigma }),
    );

    let mut plot = Table::new("plot", &["X", "statistic", "value"]);
    plot.push(vec![x.to_string(), "kpow_normalized".into(), num(kp.normalized)]);
    plot.push(vec![x.to_string(), "c_k".into(), num(kp.c_k)]);
    plot.push(vec![
        x.to_string(),
        "typical_fraction".into(),
        num(conc.typical as f64 / xf),
    ]);
    out.plot = plot;
    out.set(
        "caveat",
        "normalized sums approach their constants only as x grows; values are recorded, not asserted",
    );
    Ok(out)
}
