use std::process::ExitCode;

use clap::Parser;

use semicohen::cli::{run, Args, RunConfig};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = RunConfig::resolve(args).and_then(|cfg| run(&cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("semicohen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
