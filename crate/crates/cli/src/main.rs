use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use runwait_cli::app::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!(
                "{}",
                serde_json::json!({ "error": "validation", "message": e.to_string() })
            );
            return ExitCode::from(1);
        }
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let status = match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("{}", e.to_json_line());
            e.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(status as u8)
}
