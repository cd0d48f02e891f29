use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, output) = qcsp_cli::run_command(&argv);
    if code == qcsp_cli::EXIT_INPUT || code == qcsp_cli::EXIT_BUDGET {
        eprint!("{output}");
    } else {
        print!("{output}");
        let _ = std::io::stdout().flush();
    }
    std::process::exit(code);
}
