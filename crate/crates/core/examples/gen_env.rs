//! Generates the default dense arena, audits its density and saves it.
//!
//! ```text
//! cargo run --release --example gen_env -- [volume_fraction] [seed] [out.json]
//! ```

use tuberrt::bench::{generate_env, EnvSpec};
use tuberrt::env::estimate_density;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut spec = EnvSpec::default();
    if let Some(f) = args.next() {
        spec.volume_fraction = f.parse()?;
    }
    if let Some(s) = args.next() {
        spec.seed = s.parse()?;
    }
    let out = args.next().unwrap_or_else(|| "arena.json".into());

    let map = generate_env(&spec)?;
    let mut rng = rand::rng();
    let density = estimate_density(&map, |_| true, 100_000, &mut rng)?;
    println!(
        "{} boxes, requested fraction {:.3}, measured {:.3}",
        map.obstacles().len(),
        spec.volume_fraction,
        density
    );
    for p in &spec.keep_clear {
        println!("clearance at {:?}: {:.2} m", p.as_slice(), map.clearance(p)?);
    }
    map.save_json(&out)?;
    println!("wrote {out}");
    Ok(())
}
