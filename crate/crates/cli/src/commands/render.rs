use crate::config::{check_format, Format, RenderArgs};
use crate::error::{CliError, CliResult};
use crate::output::emit;
use crate::svg;
use crate::trajfile;

pub fn run(args: &RenderArgs) -> CliResult<()> {
    check_format(args.output.format, &[Format::Svg], "render")?;
    let text = std::fs::read_to_string(&args.trajectory).map_err(|e| {
        CliError::input(format!("cannot read {}: {e}", args.trajectory.display()))
    })?;
    let file = trajfile::parse(&text)?;
    let model = file.model()?;
    if let Some(given) = args.model.resolve()? {
        if given.params != model {
            return Err(CliError::input(format!(
                "the trajectory file holds model {:?}, not {:?}",
                model.nst(),
                given.params.nst()
            )));
        }
    }
    let traj = file.trajectory(args.index)?;
    emit(args.output.out.as_deref(), &svg::render(&model, &traj, args.style))
}
