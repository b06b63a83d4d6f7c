//! Regenerates the shipped 64×64 test image:
//! `cargo run -p zenn-cli --example make_fixture -- fixtures/pattern64.ppm`.

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/pattern64.ppm".into());
    let img = zenn_cli::fixtures::pattern(64, 64).expect("valid size");
    zenn::data::save_ppm(&img, &path).expect("writable path");
    println!("wrote {path}");
}
