fn main() {
    let code = match varpi_cli::parse_args(std::env::args_os()) {
        Ok(cli) => varpi_cli::dispatch(&cli),
        Err(code) => code,
    };
    std::process::exit(code);
}
