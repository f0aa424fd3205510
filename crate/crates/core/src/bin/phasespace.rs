use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("PHASESPACE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    let code = phasespace::cli::main_with_args(std::env::args_os());
    ExitCode::from(code as u8)
}
