use std::io;

fn main() {
    let env_tol = rigidity_cli::env_tolerance();
    let code = rigidity_cli::run(
        std::env::args_os(),
        env_tol.as_deref(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
