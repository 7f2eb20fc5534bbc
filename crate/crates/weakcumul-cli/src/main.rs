//! `weakcumul` binary; see the library documentation for subcommands and exit codes.

fn main() {
    let code = weakcumul_cli::run_from_args(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
