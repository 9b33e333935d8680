//! Writes every built-in chart to a JSON file, one per chart.
//!
//! Usage: `cargo run -p supergeo --example dump_charts [OUT_DIR]`
//! `OUT_DIR` defaults to `fixtures/charts`. The generated files are
//! committed so CLI invocations like `--chart hyperbolic.json` have a
//! file to point at.

use std::fs;
use std::path::PathBuf;

use supergeo::chartgeom::{builtin_chart, chart_to_json, BUILTIN_CHARTS};

fn main() {
    let out_dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures/charts".into())
        .into();
    fs::create_dir_all(&out_dir).expect("create output directory");
    for name in BUILTIN_CHARTS {
        let metric = builtin_chart(name).expect("builtin chart");
        let text = chart_to_json(&metric).expect("serialize chart");
        let path = out_dir.join(format!("{name}.json"));
        fs::write(&path, text).expect("write chart file");
        println!("wrote {}", path.display());
    }
}
