use std::process::ExitCode;

use twoway_relay::cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let opts = match cli::parse_args(std::env::args_os()) {
        Ok(o) => o,
        Err(e) => e.exit(),
    };
    match cli::run(&opts) {
        Ok(records) => {
            log::info!("wrote {} rows to {}", records.len(), opts.out.display());
            if let Some(p) = &opts.plot {
                log::info!("plot script: {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
