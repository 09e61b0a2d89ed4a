use hahn_paths::bulk::{
    convergence_probe, ellipse_classify, limit_kernel, limit_params, or_duality_residual, EllipseClass,
};
use serde_json::{json, Value};

use crate::config::{check_format, default_offsets, parse_pairs, parse_regime, parse_rhos, Format, LimitArgs};
use crate::error::CliResult;
use crate::output::{emit, json_text, SCHEMA_VERSION};

pub fn run(args: &LimitArgs) -> CliResult<()> {
    check_format(args.output.format, &[Format::Json], "limit")?;
    let regime = parse_regime(&args.regime)?;
    let offsets = match &args.offsets {
        Some(s) => parse_pairs(s, "--offsets")?,
        None => default_offsets(),
    };
    let rhos = args.rhos.as_deref().map(parse_rhos).transpose()?;

    let class = ellipse_classify(&regime)?;
    let params = limit_params(&regime)?;
    let density = match class {
        EllipseClass::Inside => params.density(),
        EllipseClass::FrozenEmpty => 0.0,
        EllipseClass::FrozenFull => 1.0,
    };

    let mut sine = Vec::with_capacity(offsets.len());
    for &(dx, dt) in &offsets {
        sine.push(json!({ "dx": dx, "dt": dt, "value": limit_kernel(&params, dx, dt)? }));
    }

    let mut duality = Vec::new();
    for &(dx, dt) in offsets.iter().filter(|o| o.1 % 2 == 0) {
        duality.push(json!({ "dx": dx, "dt": dt, "residual": or_duality_residual(&params, dx, dt)? }));
    }

    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "limit",
        "regime": {
            "paths": regime.n, "rise": regime.s, "horizon": regime.horizon, "t": regime.t, "x": regime.x,
        },
        "class": class,
        "c": params.c,
        "phi": params.phi,
        "density": density,
        "sine_kernel": sine,
        "duality_residuals": duality,
    });
    if let Some(rhos) = rhos {
        let table = convergence_probe(&regime, &offsets, &rhos)?;
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| {
                json!({
                    "rho": r.point.rho,
                    "model": { "paths": r.point.model.paths, "rise": r.point.model.rise, "horizon": r.point.model.horizon },
                    "t": r.point.t,
                    "x": r.point.x,
                    "x_repair": r.point.x_repair,
                    "gauge": r.gauge,
                    "max_error": r.max_error,
                    "cells": r.cells,
                })
            })
            .collect();
        report["convergence"] = json!({
            "rows": rows,
            "non_increasing": table.is_non_increasing(),
        });
    }
    emit(args.output.out.as_deref(), &json_text(&report))
}
