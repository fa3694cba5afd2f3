use std::process::ExitCode;

use clap::{Parser, Subcommand};
use treesets_cli::commands::{self, Outcome};

#[derive(Parser)]
#[command(name = "sepsys", version, about = "Check finite separation systems and tree sets")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report smallness, triviality, nestedness and tree-set status.
    Validate { input: String },
    /// List all consistent orientations.
    Orientations { input: String },
    /// List splitting stars and branching points.
    Stars { input: String },
    /// Quotient a tree set by a selection of its elements.
    Quotient {
        input: String,
        /// Comma-separated element names, e.g. `(1,2),(3,2)`.
        #[arg(long)]
        selection: String,
    },
    /// Inverse limit of an inverse-system document, or the canonical
    /// system of quotients of a tree set.
    Limit { input: String },
    /// Represent a regular tree set by bipartitions of orientations.
    Represent {
        input: String,
        /// directed, greatest, splitting or splitting_le2.
        #[arg(long, default_value = "splitting")]
        ground: String,
    },
    /// Check chain-completeness, splittability, star-finiteness and
    /// branch-boundedness.
    Check { input: String },
    /// Print a fixture as a sepsys document.
    Gen {
        fixture: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

fn run(command: &Command) -> Outcome {
    let with_input = |input: &str, f: &dyn Fn(&commands::Input) -> Outcome| match commands::load(input) {
        Ok(i) => f(&i),
        Err(o) => o,
    };
    match command {
        Command::Validate { input } => with_input(input, &commands::validate),
        Command::Orientations { input } => with_input(input, &commands::orientations),
        Command::Stars { input } => with_input(input, &commands::stars),
        Command::Quotient { input, selection } => with_input(input, &|i| commands::quotient_report(i, selection)),
        Command::Limit { input } => with_input(input, &commands::limit),
        Command::Represent { input, ground } => with_input(input, &|i| commands::represent_report(i, ground)),
        Command::Check { input } => with_input(input, &commands::check),
        Command::Gen { fixture, n } => commands::gen(fixture, *n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { commands::EXIT_INPUT } else { commands::EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let out = run(&cli.command);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("reports serialize"));
    } else if out.code == commands::EXIT_INPUT {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    ExitCode::from(out.code as u8)
}
