use clap::Parser;
use superpoint_cli::{emit, run, RunArgs, RunConfig, EXIT_INPUT};

fn main() {
    let args = RunArgs::parse();
    let code = match RunConfig::from_args(&args) {
        Ok(config) => emit(&run(&config), args.out.as_deref()),
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}
