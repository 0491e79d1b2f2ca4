//! Write every built-in fixture as JSON, for use with the `templike` binary.
//!
//! `cargo run --example export_fixtures -- DIR` (default `fixtures`).

use templike::cli::{load, Input, BUILTINS};
use templike::exactcore::Ring;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "fixtures".into());
    std::fs::create_dir_all(&dir)?;
    for name in BUILTINS {
        let value = match load(&format!("@{name}"), Ring::Q, 3)? {
            Input::Simplicial(y) => serde_json::to_value(y.to_fixture())?,
            Input::Templicial(x) => serde_json::to_value(x.to_fixture())?,
            Input::NaF(z) => serde_json::to_value(z.to_fixture())?,
            Input::Linear(c) => serde_json::to_value(c.to_fixture())?,
            Input::Chain(c) => serde_json::to_value(c.to_fixture())?,
            Input::DG(c) => serde_json::to_value(c.to_fixture())?,
        };
        let path = format!("{dir}/{name}.json");
        std::fs::write(&path, serde_json::to_string_pretty(&value)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
