//! Drives the CLI layer from code: parse a config, run every command, print CSV heads.

use locpovm::cli::{run_command, Command, ExperimentConfig};

const CONFIG: &str = r#"
[model]
N = 32
L = 6.283185307179586
m = 1.0

[state.packet]
center = 3.0
width = 0.5
mean_momentum = 1.0

[chart]
kind = "dilation"
rate = 0.1

[eval]
times = [0.0, 1.0]
intervals = [[0.0, 3.141592653589793], [3.141592653589793, 6.283185307179586]]

[scan]
family = "dilation"
parameters = [0.0, 0.1, 0.2]
"#;

fn main() {
    let config = match ExperimentConfig::parse(CONFIG) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            std::process::exit(2);
        }
    };
    let prepared = config.prepare().expect("validated by parse");
    for command in [
        Command::Localize,
        Command::Current,
        Command::Discrepancy,
        Command::Covariance,
        Command::Scan,
    ] {
        match run_command(command, &config, &prepared) {
            Ok(table) => {
                println!("== {} ({} rows)", command.name(), table.rows.len());
                for line in table.to_csv().lines().take(3) {
                    println!("{line}");
                }
            }
            Err(e) => println!("== {}: {e}", command.name()),
        }
    }
}
