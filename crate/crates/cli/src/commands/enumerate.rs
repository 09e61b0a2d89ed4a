use hahn_paths::combinatorics::OracleTable;
use hahn_paths::kernel::CorrelationQuery;
use serde_json::{json, Value};

use crate::config::{check_format, enumeration_cap, parse_query, EnumerateArgs, Format};
use crate::error::CliResult;
use crate::output::{emit, json_text, number, SCHEMA_VERSION};

pub fn run(args: &EnumerateArgs) -> CliResult<()> {
    check_format(args.output.format, &[Format::Json], "enumerate")?;
    let model = args.model.require()?;
    let query = args.query.as_deref().map(parse_query).transpose()?;
    if let Some(q) = &query {
        CorrelationQuery::new(&model.params, q.clone())?;
    }
    let table = OracleTable::build(model.params, enumeration_cap()?)?;
    let slices: Vec<Value> = (0..=model.params.horizon as i64)
        .map(|t| {
            let sites: Vec<Value> = model
                .params
                .support(t)
                .map(|x| json!({ "x": x, "density": number(&table.density((x, t)), args.mode) }))
                .collect();
            json!({ "t": t, "sites": sites })
        })
        .collect();
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "enumerate",
        "model": model.to_json(),
        "count": table.families.len().to_string(),
        "determinant_count": model.params.family_count().to_string(),
        "marginals": slices,
    });
    if let Some(q) = query {
        let p = table.correlation(&q);
        report["query"] = json!({
            "points": q.iter().map(|&(x, t)| json!([x, t])).collect::<Vec<_>>(),
            "probability": number(&p, args.mode),
        });
    }
    emit(args.output.out.as_deref(), &json_text(&report))
}
