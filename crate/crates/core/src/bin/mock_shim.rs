//! Scriptable bridge child for protocol tests.
//!
//! Usage: biaseval-mock-shim --metric const|exact [--value V] [--silent]
//!        [--crash-after N] [--reverse-window N] [--range LO,HI]

use std::fs::File;
use std::io;
use std::os::fd::AsFd;
use std::process::ExitCode;

use biaseval::bridge::mock::{MockScore, MockShim};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut shim = MockShim::constant(0.5);
    let mut i = 0;
    while i < args.len() {
        let value = args.get(i + 1).cloned().unwrap_or_default();
        match args[i].as_str() {
            "--metric" => {
                // pass --metric first; it resets the other settings
                shim = match value.as_str() {
                    "exact" => MockShim::exact(),
                    _ => MockShim::constant(0.5),
                };
                i += 2;
            }
            "--value" => {
                shim.score = MockScore::Constant(value.parse().unwrap_or(0.5));
                i += 2;
            }
            "--silent" => {
                shim.silent = true;
                i += 1;
            }
            "--crash-after" => {
                shim.crash_after = value.parse().ok();
                i += 2;
            }
            "--reverse-window" => {
                shim.reverse_window = value.parse().unwrap_or(1);
                i += 2;
            }
            "--range" => {
                let parts: Vec<f64> = value.split(',').filter_map(|p| p.parse().ok()).collect();
                if let [lo, hi] = parts[..] {
                    shim.info.score_range = Some([lo, hi]);
                }
                i += 2;
            }
            other => {
                eprintln!("unknown flag {other}");
                return ExitCode::from(2);
            }
        }
    }
    // raw fd so the shim sees exactly what is buffered
    let stdin = match io::stdin().as_fd().try_clone_to_owned() {
        Ok(fd) => File::from(fd),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match shim.serve(stdin, io::stdout().lock()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
