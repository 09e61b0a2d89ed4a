use hahn_paths::kernel::{CorrelationQuery, Ensemble, Point};
use hahn_paths::linalg::det_with_report;
use hahn_paths::Rational;
use serde_json::{json, Value};

use crate::config::{check_format, parse_query, Format, KernelArgs, Mode};
use crate::error::CliResult;
use crate::output::{emit, json_text, number, SCHEMA_VERSION};

fn label(p: &Point) -> String {
    format!("{}:{}", p.0, p.1)
}

pub fn run(args: &KernelArgs) -> CliResult<()> {
    let format = check_format(args.output.format, &[Format::Json, Format::Csv], "kernel")?;
    let model = args.model.require()?;
    let ens = Ensemble::new(model.params);
    let (grid, points) = match (&args.query, args.time) {
        (Some(q), _) => {
            let q = CorrelationQuery::new(&model.params, parse_query(q)?)?;
            ("query", q.points)
        }
        (None, Some(t)) => {
            model.params.check_time(t)?;
            ("static", model.params.support(t).map(|x| (x, t)).collect())
        }
        (None, None) => ("space_time", model.params.sites()),
    };
    let km = ens.kernel_matrix(&points, args.mode.backend())?;
    let n = points.len();

    if format == Format::Csv {
        let mut out = String::from("point");
        for p in &points {
            out.push(',');
            out.push_str(&label(p));
        }
        out.push('\n');
        for (i, p) in points.iter().enumerate() {
            out.push_str(&label(p));
            for j in 0..n {
                out.push_str(&format!(",{}", km.values[(i, j)]));
            }
            out.push('\n');
        }
        return emit(args.output.out.as_deref(), &out);
    }

    let rows: Vec<Value> = (0..n)
        .map(|i| (0..n).map(|j| json!(km.values[(i, j)])).collect())
        .collect();
    let trace_f64: f64 = (0..n).map(|i| km.values[(i, i)]).sum();
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "kernel",
        "model": model.to_json(),
        "mode": match args.mode { Mode::Exact => "exact", Mode::Float => "float" },
        "grid": grid,
        "points": points.iter().map(|&(x, t)| json!([x, t])).collect::<Vec<_>>(),
        "symmetric_kernel": rows,
    });
    if let Some(exact) = &km.exact {
        let rows: Vec<Value> = (0..n)
            .map(|i| (0..n).map(|j| number(&exact[(i, j)], Mode::Exact)).collect())
            .collect();
        report["rational_gauge_kernel"] = json!(rows);
        let trace: Rational = (0..n).map(|i| exact[(i, i)].clone()).sum();
        report["trace"] = number(&trace, Mode::Exact);
    } else {
        report["trace"] = json!({ "decimal": trace_f64 });
    }
    if grid == "query" {
        report["correlation"] = match &km.exact {
            Some(exact) => number(&exact.det(), Mode::Exact),
            None => {
                let d = det_with_report(&km.values);
                json!({
                    "decimal": d.value,
                    "min_pivot_ratio": d.min_pivot_ratio,
                    "relative_error_bound": d.relative_error_bound,
                })
            }
        };
    }
    emit(args.output.out.as_deref(), &json_text(&report))
}
