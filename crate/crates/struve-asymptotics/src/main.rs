fn main() {
    std::process::exit(struve_asymptotics::cli::run(std::env::args().skip(1)));
}
