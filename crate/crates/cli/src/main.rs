use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use relcx::{gen_scenario, load_scenario, run_checks, select, Sizes};

#[derive(Parser)]
#[command(name = "relcx", version, about = "Check relative correspondence complexes on finite models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the check suite on a scenario file.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        /// `all` or comma-separated check ids.
        #[arg(long, default_value = "all")]
        props: String,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
        /// Print `-` instead of elapsed times.
        #[arg(long)]
        no_timings: bool,
    },
    /// Write a random point scenario.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = Sizes::default().points)]
        points: usize,
        #[arg(long, default_value_t = Sizes::default().base)]
        base: usize,
        #[arg(long, default_value_t = Sizes::default().boundary)]
        boundary: usize,
    },
    /// Run the full suite on the bundled scenarios.
    Demo,
}

const BUNDLED: [(&str, &str); 3] = [
    ("point_n3.json", include_str!("../fixtures/point_n3.json")),
    ("point_n4.json", include_str!("../fixtures/point_n4.json")),
    ("table_sample.json", include_str!("../fixtures/table_sample.json")),
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check { scenario, props, report, no_timings } => {
            let s = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let sel = match select(&props) {
                Ok(sel) => sel,
                Err(e) => {
                    eprintln!("--props: {e}");
                    return ExitCode::from(2);
                }
            };
            let r = run_checks(&s, &sel);
            match report {
                Format::Text => print!("{}", r.text(!no_timings)),
                Format::Json => print!("{}", r.json(!no_timings)),
            }
            if r.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Gen { n, seed, out, points, base, boundary } => {
            let s = match gen_scenario(n, Sizes { points, base, boundary }, seed) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = std::fs::write(&out, s.to_json()) {
                eprintln!("{}: {e}", out.display());
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Cmd::Demo => {
            let mut ok = true;
            for (name, text) in BUNDLED {
                let s = match relcx::parse_scenario(text, name) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                };
                println!("# {name}");
                let r = run_checks(&s, &relcx::CHECKS.iter().collect::<Vec<_>>());
                print!("{}", r.text(true));
                ok &= r.all_pass();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
