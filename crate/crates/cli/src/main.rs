use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spherical::cli_io::{parse_command, parse_input, run_command, run_toric_check, Command, Format, COMMANDS};
use spherical::Error;

#[derive(Parser, Debug)]
#[command(name = "spherical", version, about = "Exact combinatorics of spherical embeddings")]
#[command(after_help = commands_help())]
struct Args {
    /// Input document (JSON); read from stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format: text, json or dot.
    #[arg(long, default_value = "text")]
    format: String,
    /// Command and its arguments.
    #[arg(required = true, num_args = 1.., trailing_var_arg = true, allow_hyphen_values = true)]
    command: Vec<String>,
}

fn commands_help() -> String {
    let mut s = String::from("Commands:\n");
    for c in COMMANDS {
        s.push_str("  ");
        s.push_str(c);
        s.push('\n');
    }
    s
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        e if e.is_precondition() => 4,
        _ => 3,
    }
}

fn run(args: &Args) -> Result<String, Error> {
    let format: Format = args.format.parse()?;
    let cmd = parse_command(&args.command)?;
    let report = match &cmd {
        Command::ToricCheck { rank, count } => run_toric_check(*rank, *count, args.seed)?,
        _ => {
            let text = match &args.input {
                Some(p) => std::fs::read_to_string(p)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())))?,
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
                    s
                }
            };
            let doc = parse_input(&text)?;
            run_command(&doc, &cmd)?
        }
    };
    report.render(format)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
