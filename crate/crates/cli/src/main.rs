use std::io;
use std::process::ExitCode;

use ncc_sim::THREADS_ENV;

fn log_level(args: &[String]) -> log::LevelFilter {
    // Peeked before parsing so argument errors are still reported normally.
    if args.iter().any(|a| a == "-q" || a == "--quiet") {
        return log::LevelFilter::Error;
    }
    let verbose: usize = args
        .iter()
        .map(|a| match a.as_str() {
            "--verbose" => 1,
            s if s.starts_with('-') && !s.starts_with("--") && s[1..].chars().all(|c| c == 'v') => s.len() - 1,
            _ => 0,
        })
        .sum();
    match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    env_logger::Builder::new().filter_level(log_level(&args)).parse_default_env().init();
    let threads = std::env::var(THREADS_ENV).ok();
    let code = ncc_sim::main_with(&args, threads.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
