fn main() { std::process::exit(thintails::cli::run(std::env::args_os())); }
