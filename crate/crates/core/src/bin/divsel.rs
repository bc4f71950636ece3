use std::io::Write;

fn main() {
    let quiet = std::env::args().any(|a| a == "--quiet");
    env_logger::Builder::new()
        .filter_level(if quiet { log::LevelFilter::Error } else { log::LevelFilter::Info })
        .format(|buf, record| writeln!(buf, "[{}] {}", record.level(), record.args()))
        .target(env_logger::Target::Stderr)
        .init();
    let code = divsel::cli::run(std::env::args_os(), std::env::var(divsel::cli::SEED_ENV).ok());
    std::process::exit(code);
}
