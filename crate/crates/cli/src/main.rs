use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cicr::frontend::{Diagnostic, Options, Session};
use clap::{Args, Parser, Subcommand};

/// Checker and parametricity translator for the refined calculus of
/// inductive constructions.
#[derive(Parser)]
#[command(name = "cicr", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Reduction budget per conversion or normalization query.
    #[arg(long, global = true)]
    fuel: Option<u64>,
    /// Run every command even after a failure.
    #[arg(long, global = true)]
    continue_on_error: bool,
    /// Admit Prop <= Type when checking embeddings into CIC.
    #[arg(long, global = true)]
    cic_prop_cumul: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Typecheck files and run their commands.
    Check { files: Vec<PathBuf> },
    /// Translate one global and print its relation.
    Param {
        file: PathBuf,
        #[arg(long)]
        def: String,
    },
    /// Print the CIC embedding of one global.
    Embed {
        file: PathBuf,
        #[arg(long)]
        def: String,
    },
    /// Normalize a closed term in the file's environment.
    Eval {
        file: PathBuf,
        #[arg(long)]
        term: String,
    },
}

fn print_diagnostic(d: &Diagnostic) {
    eprintln!("{d}");
    if let Some(j) = &d.judgment {
        eprintln!("  while checking: {j}");
    }
}

/// Runs `file`, printing reports and diagnostics. `None` on IO failure.
fn run(options: Options, file: &Path, quiet: bool) -> Option<(Session, bool)> {
    let mut session = Session::with_options(options);
    let ok = session.run_file(file).is_ok();
    if !quiet {
        for r in session.reports() {
            println!("{r}");
        }
    }
    for d in session.diagnostics() {
        print_diagnostic(d);
    }
    if session.diagnostics().iter().any(|d| d.code == "IoError" && d.file == file.display().to_string()) {
        return None;
    }
    Some((session, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut options = Options {
        continue_on_error: cli.flags.continue_on_error,
        cic_prop_cumulative: cli.flags.cic_prop_cumul,
        ..Options::default()
    };
    if let Some(f) = cli.flags.fuel {
        options.fuel = f;
    }
    match cli.command {
        Cmd::Check { files } => {
            if files.is_empty() {
                eprintln!("cicr check: no input files");
                return ExitCode::from(2);
            }
            let mut status = 0;
            for f in &files {
                match run(options, f, false) {
                    None => status = 2,
                    Some((_, false)) => status = status.max(1),
                    Some((_, true)) => {}
                }
            }
            ExitCode::from(status)
        }
        Cmd::Param { file, def } => with_session(options, &file, |s| s.show_parametricity(&def).map_err(|e| e.to_string())),
        Cmd::Embed { file, def } => with_session(options, &file, |s| s.show_embedding(&def).map_err(|e| e.to_string())),
        Cmd::Eval { file, term } => with_session(options, &file, |s| s.eval_str(&term).map_err(|d| d.to_string())),
    }
}

fn with_session(options: Options, file: &Path, f: impl FnOnce(&mut Session) -> Result<String, String>) -> ExitCode {
    let Some((mut session, ok)) = run(options, file, true) else {
        return ExitCode::from(2);
    };
    if !ok {
        return ExitCode::from(1);
    }
    match f(&mut session) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
