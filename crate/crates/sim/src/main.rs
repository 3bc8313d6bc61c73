use std::process::ExitCode;

use doppler_skg::cli;

fn main() -> ExitCode {
    let inv = match cli::parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli::run(&inv) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("doppler-skg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
