fn main() {
    std::process::exit(affine_dim::cli::main());
}
