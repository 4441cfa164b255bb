//! Command-line front end for `polyjc-core`: reads maps, derivations, graphs
//! and surfaces from JSON or flags, runs one operation and writes a single
//! JSON verdict to standard output.

pub mod cli;
pub mod config;
pub mod formats;
pub mod reproduce;
pub mod verdict;

mod case;
mod graph;
mod keller;
mod lnd;

use std::fmt::Display;

use polyjc_core::Rational;

pub use cli::Cli;
use cli::Command;
use config::{Caps, Config};
pub use verdict::{Emit, Status, Verdict};

/// Input or usage problem; reported with status `error` and exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub fn usage(msg: impl Display) -> CliError {
    CliError(msg.to_string())
}

pub(crate) fn qstr(q: &Rational) -> String {
    q.to_string()
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse::<Rational>().map_err(|_| usage(format!("not a rational number: {s:?}")))
}

/// `a:b` pairs.
pub(crate) fn parse_pairs<T: std::str::FromStr>(items: &[String]) -> Result<Vec<(T, T)>, CliError> {
    items
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("expected a:b, got {s:?}")))?;
            let p = |t: &str| t.trim().parse::<T>().map_err(|_| usage(format!("bad number in {s:?}")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

pub fn command_name(cmd: &Command) -> String {
    use cli::{CaseCmd, GraphCmd, KellerCmd, LndCmd};
    let (group, sub) = match cmd {
        Command::Keller { cmd } => (
            "keller",
            match cmd {
                KellerCmd::Check(_) => "check",
                KellerCmd::Invert(_) => "invert",
                KellerCmd::Chain { .. } => "chain",
                KellerCmd::Druzkowski { .. } => "druzkowski",
                KellerCmd::Newton { .. } => "newton",
                KellerCmd::Topparts { .. } => "topparts",
            },
        ),
        Command::Lnd { cmd } => (
            "lnd",
            match cmd {
                LndCmd::Length { .. } => "length",
                LndCmd::Nilpotent { .. } => "nilpotent",
                LndCmd::Exp { .. } => "exp",
                LndCmd::Slice { .. } => "slice",
                LndCmd::Rentschler { .. } => "rentschler",
            },
        ),
        Command::Graph { cmd } => (
            "graph",
            match cmd {
                GraphCmd::Pi1 { .. } => "pi1",
                GraphCmd::Abelian { .. } => "abelian",
                GraphCmd::Form { .. } => "form",
                GraphCmd::Pic { .. } => "pic",
                GraphCmd::Genus { .. } => "genus",
                GraphCmd::Enumerate { .. } => "enumerate",
                GraphCmd::Section { .. } => "section",
                GraphCmd::Canon { .. } => "canon",
                GraphCmd::Lines { .. } => "lines",
            },
        ),
        Command::Case { cmd } => (
            "case",
            match cmd {
                CaseCmd::Hom { .. } => "hom",
                CaseCmd::Family { .. } => "family",
                CaseCmd::Dickson { .. } => "dickson",
                CaseCmd::Pq { .. } => "pq",
                CaseCmd::Sigma { .. } => "sigma",
                CaseCmd::Iso { .. } => "iso",
            },
        ),
        Command::Reproduce { .. } => ("reproduce", ""),
    };
    if sub.is_empty() {
        group.into()
    } else {
        format!("{group} {sub}")
    }
}

/// Runs one parsed command with the given configuration.
pub fn run_with(cli: &Cli, config: &Config) -> Verdict {
    let name = command_name(&cli.command);
    let caps = Caps::resolve(config, cli.global.max_degree, cli.global.cap);
    let result = match &cli.command {
        Command::Keller { cmd } => keller::run(&name, cmd, &caps),
        Command::Lnd { cmd } => lnd::run(&name, cmd, &caps),
        Command::Graph { cmd } => graph::run(&name, cmd),
        Command::Case { cmd } => case::run(&name, cmd, &caps),
        Command::Reproduce { table } => Ok(reproduce::run(*table)),
    };
    result.unwrap_or_else(|e| Verdict::error(&name, &e.0))
}

/// Runs with the configuration named by `POLYJC_CONFIG`, if any.
pub fn run(cli: &Cli) -> Verdict {
    match Config::from_env() {
        Ok(config) => run_with(cli, &config),
        Err(e) => Verdict::error(&command_name(&cli.command), &e.0),
    }
}
