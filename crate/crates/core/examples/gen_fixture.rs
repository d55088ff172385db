//! Writes a synthetic input set.
//!
//! ```text
//! cargo run --example gen_fixture -- <dir> [seed]
//! ```

use std::path::PathBuf;

use pagegraph::synth::{generate, write_dir, SynthConfig};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "tests/fixtures/synthetic".into()));
    let mut cfg = SynthConfig::default();
    if let Some(seed) = args.next() {
        cfg.seed = seed.parse().expect("seed must be an integer");
    }
    let data = generate(&cfg);
    write_dir(&data, &dir)?;
    println!(
        "{} pages, {} posts, {} likes, {} comments -> {}",
        data.pages.len(),
        data.posts.len(),
        data.likes.len(),
        data.comments.len(),
        dir.display()
    );
    Ok(())
}
