//! The `qcsp` command line.
//!
//! Exit codes: 0 yes / success, 1 no, 2 usage or input error, 3 budget
//! exceeded.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use qcsp_core::collapse::{
    apply_collapsing, build_collapse_structure_labelled, chen_reduction, qcsp_via_collapsibility,
};
use qcsp_core::format::{parse_sentence, parse_structure, print_sentence, print_structure, print_structure_labelled};
use qcsp_core::logic::normalize_alternation;
use qcsp_core::microcosm::{backward_reduce, forward_reduce, microcosm_structure, DEFAULT_F_SYMBOL};
use qcsp_core::polymorphism::{find_nu_bounded, DEFAULT_TABLE_BOUND};
use qcsp_core::solvers::{csp_eval, qcsp_eval_with, GameOptions, DEFAULT_NODE_BUDGET};
use qcsp_core::structures::{core_of, is_isomorphic, tuple_at};
use qcsp_core::verify::{self, Suite};
use qcsp_core::{Error, PHSentence, Structure};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcsp", about = "Finite-model constraint logic workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Game,
    Csp,
    Collapse,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Emit {
    Collapsed,
    Chen,
    Structure,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the structure satisfies the sentence.
    Solve {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        sentence: PathBuf,
        #[arg(long, value_enum, default_value = "game")]
        mode: Mode,
        /// Number of surviving universals for `--mode collapse`.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Collapse element for `--mode collapse`.
        #[arg(long, default_value_t = 0)]
        elem: usize,
        /// Pad the prefix to strict ∀∃ alternation first.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Print the core of a structure.
    Core {
        #[arg(long)]
        structure: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two structures are isomorphic.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Search for a near-unanimity polymorphism of the given arity.
    Nu {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = DEFAULT_TABLE_BOUND)]
        bound: usize,
    },
    /// Emit a collapsing, its expansion, or the structure D(λ).
    Collapse {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        sentence: PathBuf,
        /// Comma-separated surviving universals.
        #[arg(long, value_delimiter = ',')]
        survivors: Vec<String>,
        #[arg(long, default_value_t = 0)]
        elem: usize,
        #[arg(long, value_enum)]
        emit: Emit,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The c-valid structure and the reductions to and from it.
    Microcosm {
        #[command(subcommand)]
        action: MicrocosmAction,
    },
    /// Cross-check constructions against the reference evaluators.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum MicrocosmAction {
    Build {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value = DEFAULT_F_SYMBOL)]
        f_symbol: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Forward {
        #[arg(long)]
        sentence: PathBuf,
        #[arg(long, default_value = DEFAULT_F_SYMBOL)]
        f_symbol: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Backward {
        #[arg(long)]
        sentence: PathBuf,
        #[arg(long, default_value = DEFAULT_F_SYMBOL)]
        f_symbol: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failure with its exit code and message.
struct Failure(i32, String);

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure(EXIT_INPUT, message.into())
    }

    fn in_file(path: &Path, e: Error) -> Self {
        Failure::input(format!("{}:{e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure(EXIT_BUDGET, e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

struct Io<'a> {
    stdin: Option<&'a str>,
    stdout: String,
}

impl Io<'_> {
    fn read(&self, path: &Path) -> Result<String, Failure> {
        if path == Path::new("-") {
            return match self.stdin {
                Some(s) => Ok(s.to_string()),
                None => {
                    let mut s = String::new();
                    std::io::stdin()
                        .read_to_string(&mut s)
                        .map_err(|e| Failure::input(format!("stdin: {e}")))?;
                    Ok(s)
                }
            };
        }
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }

    fn structure(&self, path: &Path) -> Result<Structure, Failure> {
        parse_structure(&self.read(path)?).map_err(|e| Failure::in_file(path, e))
    }

    fn sentence(&self, path: &Path) -> Result<PHSentence, Failure> {
        parse_sentence(&self.read(path)?).map_err(|e| Failure::in_file(path, e))
    }

    fn emit(&mut self, output: Option<&Path>, text: &str) -> Result<(), Failure> {
        match output {
            Some(p) if p != Path::new("-") => {
                std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
            }
            _ => {
                self.stdout.push_str(text);
                Ok(())
            }
        }
    }

    fn answer(&mut self, yes: bool) -> i32 {
        self.stdout.push_str(if yes { "yes\n" } else { "no\n" });
        if yes {
            EXIT_YES
        } else {
            EXIT_NO
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code together with everything written to standard output or, on
/// failure, the diagnostic.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> (i32, String) {
    run_with_stdin(argv, None)
}

/// As [`run_command`], reading `-` paths from `stdin` instead of the
/// process's standard input.
pub fn run_with_stdin<S: AsRef<str>>(argv: &[S], stdin: Option<&str>) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_YES };
            return (code, e.to_string());
        }
    };
    let mut io = Io { stdin, stdout: String::new() };
    match execute(cli.command, &mut io) {
        Ok(code) => (code, io.stdout),
        Err(Failure(code, message)) => (code, format!("error: {message}\n")),
    }
}

fn execute(command: Command, io: &mut Io) -> Result<i32, Failure> {
    match command {
        Command::Solve {
            structure,
            sentence,
            mode,
            k,
            elem,
            normalize,
            budget,
        } => {
            let b = io.structure(&structure)?;
            let mut phi = io.sentence(&sentence)?;
            if normalize && !phi.is_bottom() {
                phi = normalize_alternation(&phi)?;
            }
            let yes = match mode {
                Mode::Game => qcsp_eval_with(&b, &phi, GameOptions { node_budget: budget })?,
                Mode::Csp => csp_eval(&b, &phi)?,
                Mode::Collapse => qcsp_via_collapsibility(&b, &phi, k, elem)?,
            };
            Ok(io.answer(yes))
        }
        Command::Core { structure, output } => {
            let b = io.structure(&structure)?;
            io.emit(output.as_deref(), &print_structure(&core_of(&b)))?;
            Ok(EXIT_YES)
        }
        Command::Iso { left, right } => {
            let (l, r) = (io.structure(&left)?, io.structure(&right)?);
            let yes = is_isomorphic(&l, &r)?;
            Ok(io.answer(yes))
        }
        Command::Nu { structure, arity, bound } => {
            let b = io.structure(&structure)?;
            match find_nu_bounded(&b, arity, bound)? {
                None => {
                    io.stdout.push_str("none\n");
                    Ok(EXIT_NO)
                }
                Some(table) => {
                    let _ = writeln!(io.stdout, "nu arity {arity} domain {}", b.size());
                    for (i, v) in table.table().iter().enumerate() {
                        let args = tuple_at(i, b.size(), arity).iter().map(ToString::to_string).collect::<Vec<_>>();
                        let _ = writeln!(io.stdout, "{} -> {v}", args.join(" "));
                    }
                    Ok(EXIT_YES)
                }
            }
        }
        Command::Collapse {
            structure,
            sentence,
            survivors,
            elem,
            emit,
            output,
        } => {
            let b = io.structure(&structure)?;
            let phi = io.sentence(&sentence)?;
            phi.check_against(&b)?;
            if elem >= b.size() {
                return Err(Error::ElementOutOfRange { element: elem, size: b.size() }.into());
            }
            let text = match emit {
                Emit::Collapsed => print_sentence(&apply_collapsing(&phi, &survivors, elem)?),
                Emit::Chen => {
                    let collapsed = apply_collapsing(&phi, &survivors, elem)?;
                    print_sentence(&chen_reduction(&collapsed, b.size(), survivors.len())?)
                }
                Emit::Structure => {
                    let (d, labels) = build_collapse_structure_labelled(&b, &phi, &survivors, elem)?;
                    print_structure_labelled(&d, Some(&labels))
                }
            };
            io.emit(output.as_deref(), &text)?;
            Ok(EXIT_YES)
        }
        Command::Microcosm { action } => {
            let (text, output) = match action {
                MicrocosmAction::Build { structure, f_symbol, output } => {
                    let b = io.structure(&structure)?;
                    (print_structure(&microcosm_structure(&b, &f_symbol)?), output)
                }
                MicrocosmAction::Forward { sentence, f_symbol, output } => {
                    let phi = io.sentence(&sentence)?;
                    (print_sentence(&forward_reduce(&phi, &f_symbol)?), output)
                }
                MicrocosmAction::Backward { sentence, f_symbol, output } => {
                    let phi = io.sentence(&sentence)?;
                    (print_sentence(&backward_reduce(&phi, &f_symbol)?), output)
                }
            };
            io.emit(output.as_deref(), &text)?;
            Ok(EXIT_YES)
        }
        Command::Verify { suite, samples, seed } => {
            let report = verify::run(suite, samples, seed)?;
            for (i, d) in report.discrepancies.iter().enumerate() {
                let _ = writeln!(
                    io.stdout,
                    "discrepancy {i} [{}]: expected {}, got {}\n# structure\n{}# sentence\n{}",
                    d.check,
                    d.expected,
                    d.actual,
                    print_structure(&d.structure),
                    print_sentence(&d.sentence)
                );
            }
            let _ = writeln!(io.stdout, "{report}");
            Ok(if report.is_clean() { EXIT_YES } else { EXIT_NO })
        }
    }
}
