//! Parse a `.ifm` file, report diagnostics, print the canonical form.
//! `cargo run --example layout_dsl -- crates/core/examples/mzi_bomb.ifm`

use ifm::dsl::{parse_layout, serialize_layout};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mzi_bomb.ifm").into());
    let text = std::fs::read_to_string(&path).expect("readable layout file");
    let doc = parse_layout(&text);
    for d in &doc.diagnostics {
        eprintln!("{path}:{d}");
    }
    match doc.layout {
        Some(layout) => print!("{}", serialize_layout(&layout)),
        None => std::process::exit(1),
    }
}
