use clap::Parser;
use cyclohecke_cli::{run, Cli, EXIT_OK, EXIT_VERIFY};

fn main() {
    let cli = Cli::parse();
    // Internal arithmetic failures surface as panics (they signal bugs, not
    // user mistakes); report them as verification failures, exit 3.
    let outcome = std::panic::catch_unwind(|| run(&cli));
    let code = match outcome {
        Ok(Ok(output)) => {
            println!("{}", output.body);
            if output.pass {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Ok(Err(code)) => code,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal arithmetic failure".to_string());
            eprintln!("internal error: {msg}");
            EXIT_VERIFY
        }
    };
    std::process::exit(code);
}
