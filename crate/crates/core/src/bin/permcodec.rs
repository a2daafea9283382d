use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PERMCODEC_LOG")).init();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = permcodec::cli::run_cli(std::env::args_os(), &mut out);
    let _ = out.flush();
    std::process::exit(code);
}
