use clap::{value_parser, Arg, ArgAction, Command};
use parlike::cli::{self, COMMANDS};
use parlike::config::{JobConfig, KEYS};
use std::path::PathBuf;
use std::process::ExitCode;

fn command() -> Command {
    let mut cmd = Command::new("parlike")
        .about("Numerical toolkit for parabolic-like maps")
        .arg(Arg::new("command").required(true).value_parser(COMMANDS.to_vec()))
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .value_parser(value_parser!(PathBuf))
                .help("`key = value` job file"),
        )
        .arg(
            Arg::new("threads")
                .long("threads")
                .value_name("N")
                .value_parser(value_parser!(usize))
                .help("render worker threads"),
        );
    for &key in KEYS {
        cmd = cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .action(ArgAction::Set),
        );
    }
    cmd
}

fn main() -> ExitCode {
    let m = command().get_matches();
    let name = m.get_one::<String>("command").expect("required");
    let mut file = JobConfig::default();
    if let Some(p) = m.get_one::<PathBuf>("config") {
        match JobConfig::from_file(p) {
            Ok(c) => file = c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let mut flags = JobConfig::default();
    for &key in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            flags.set(key, v).expect("flag keys are known");
        }
    }
    let cfg = file.merged(&flags);
    let threads = m.get_one::<usize>("threads").copied();
    let mut out = std::io::stdout().lock();
    match cli::run(name, &cfg, threads, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
