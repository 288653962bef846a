use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use smcf_cli::{execute, resolve_out_dir, RunConfig, EXIT_CONFIG, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "smcf", version, about = "Run a scaled mean curvature flow scenario from a JSON config")]
struct Args {
    /// Scenario config (JSON). Repeat together with --sweep to run several.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    /// Only print errors.
    #[arg(long)]
    quiet: bool,
    /// Accepted for interface stability; runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config (one subdirectory per config with --sweep).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run all configs in parallel worker threads.
    #[arg(long)]
    sweep: bool,
}

fn run_one(path: &Path, out: Option<&Path>, quiet: bool) -> i32 {
    let result = RunConfig::load(path).and_then(|cfg| {
        let dir = resolve_out_dir(&cfg, path, out);
        execute(&cfg, &dir, None)
    });
    match result {
        Ok(outcome) => {
            if !quiet {
                let s = &outcome.summary;
                println!(
                    "{}: t = {}, {} rows, events [{}], exit {}",
                    s.scenario,
                    s.final_state.time,
                    s.rows,
                    s.events.join(", "),
                    s.exit_code
                );
                for v in s.invariants.iter().filter(|v| !v.passed) {
                    println!("  invariant {} failed (worst {})", v.name, v.worst);
                }
                println!("  output in {}", outcome.out_dir.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {}: {e:#}", path.display());
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which is reserved for
    // invariant failures here
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    if args.config.len() > 1 && !args.sweep {
        eprintln!("error: several --config values need --sweep");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let code = if args.sweep {
        std::thread::scope(|scope| {
            let handles: Vec<_> = args
                .config
                .iter()
                .map(|path| {
                    let out = args.out.as_ref().map(|o| o.join(path.file_stem().unwrap_or_default()));
                    let quiet = args.quiet;
                    scope.spawn(move || run_one(path, out.as_deref(), quiet))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or(EXIT_CONFIG))
                .fold(EXIT_OK, i32::max)
        })
    } else {
        run_one(&args.config[0], args.out.as_deref(), args.quiet)
    };
    ExitCode::from(code as u8)
}
