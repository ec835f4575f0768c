use std::process::ExitCode;

fn main() -> ExitCode {
    photon_filter::cli::main_entry()
}
