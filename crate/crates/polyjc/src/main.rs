use std::io::Write;

use clap::Parser;

fn main() {
    let cli = polyjc::Cli::parse();
    let verdict = polyjc::run(&cli);
    if let Some(serde_json::Value::String(msg)) = verdict.get("error") {
        eprintln!("polyjc: {msg}");
    }
    // a closed pipe is not worth a panic
    let _ = writeln!(std::io::stdout(), "{}", verdict.render(cli.global.emit));
    std::process::exit(verdict.status.exit_code());
}
