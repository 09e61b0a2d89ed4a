use hahn_paths::kernel::Ensemble;
use hahn_paths::process::Sampler;
use hahn_paths::Scalar;
use serde_json::{json, Value};

use crate::config::{check_format, Format, Mode, SampleArgs};
use crate::error::CliResult;
use crate::output::{emit, json_text, number, write_atomic, SCHEMA_VERSION};
use crate::trajfile::{encode_moves, TrajectoryFile};

pub fn run(args: &SampleArgs) -> CliResult<()> {
    check_format(args.format, &[Format::Json], "sample")?;
    let model = args.model.require()?;
    let m = model.params;
    let mut sampler = Sampler::new(m, args.seed)?;
    let mut file = TrajectoryFile::new(&m, args.seed);
    let mut counts: Vec<Vec<u64>> = (0..=m.horizon as i64).map(|t| vec![0; m.support_size(t)]).collect();
    for _ in 0..args.samples {
        let traj = sampler.sample();
        for c in &traj.configurations {
            let lo = *m.support(c.t).start();
            for &x in &c.positions {
                counts[c.t as usize][(x - lo) as usize] += 1;
            }
        }
        file.trajectories.push(traj.moves().iter().map(|p| encode_moves(p)).collect());
    }
    let text = serde_json::to_string(&file).expect("trajectory file serializes") + "\n";
    write_atomic(&args.out, text.as_bytes())?;

    // exact one-point densities alongside the counts, in exact mode only
    let ens = (args.mode == Mode::Exact).then(|| Ensemble::new(m));
    let n = args.samples as f64;
    let mut slices = Vec::with_capacity(counts.len());
    for (t, row) in counts.iter().enumerate() {
        let t = t as i64;
        let lo = *m.support(t).start();
        let mut sites = Vec::with_capacity(row.len());
        for (k, &count) in row.iter().enumerate() {
            let x = lo + k as i64;
            let mut site = json!({
                "x": x,
                "count": count,
                "empirical": if args.samples > 0 { count as f64 / n } else { 0.0 },
            });
            if let Some(ens) = &ens {
                // the gauge cancels on the diagonal
                let p = ens.kernel_rational((x, t), (x, t))?;
                site["kernel"] = number(&p, Mode::Exact);
                let pf = Scalar::to_f64(&p);
                if args.samples > 0 && pf > 0.0 && pf < 1.0 {
                    site["z_score"] = json!((count as f64 / n - pf) / (pf * (1.0 - pf) / n).sqrt());
                }
            }
            sites.push(site);
        }
        slices.push(json!({ "t": t, "sites": sites }));
    }
    let report: Value = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "sample",
        "model": model.to_json(),
        "seed": args.seed,
        "samples": args.samples,
        "trajectory_file": args.out.display().to_string(),
        "densities": slices,
    });
    emit(args.summary.as_deref(), &json_text(&report))
}
