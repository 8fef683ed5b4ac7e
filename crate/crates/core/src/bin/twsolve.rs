use std::io;

fn main() {
    let trace = std::env::args().any(|a| a == "--trace");
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if trace { "info" } else { "warn" }))
        .target(env_logger::Target::Stderr)
        .init();
    let code = treewidth::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
