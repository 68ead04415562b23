use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = lchpm_cli::run(&args);
    std::io::stdout().write_all(out.stdout.as_bytes()).expect("stdout");
    std::io::stderr().write_all(out.stderr.as_bytes()).expect("stderr");
    std::process::exit(out.code);
}
