//! Render every figure that applies to a CSV table.
//!
//! `cargo run --example plot_table -- squeezing_surface.csv`

use std::path::Path;

use sit_squeeze::plot::{plot_file, PlotKind};

fn main() {
    let csv = std::env::args().nth(1).unwrap_or_else(|| "squeezing_surface.csv".into());
    for kind in PlotKind::ALL {
        let out = format!("{}.svg", kind.name());
        match plot_file(Path::new(&csv), kind, Path::new(&out)) {
            Ok(()) => println!("wrote {out}"),
            Err(e) => println!("{}: {e}", kind.name()),
        }
    }
}
