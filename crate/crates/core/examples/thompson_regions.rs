//! Bayesian region selection on its own: builds the Voronoi partition of the
//! default arena, prints the density-shaped priors, then feeds synthetic
//! outcomes and shows how the selection share moves.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tuberrt::bench::{generate_env, EnvSpec};
use tuberrt::sampler::{build_partition, posterior_update, thompson_select, SamplerConfig};

fn shares(regions: &[tuberrt::sampler::SubRegion], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut counts = vec![0usize; regions.len()];
    for _ in 0..5000 {
        counts[thompson_select(regions, rng)] += 1;
    }
    counts.iter().map(|&c| c as f64 / 5000.0).collect()
}

fn main() -> anyhow::Result<()> {
    let map = generate_env(&EnvSpec::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut partition = build_partition(&map, &SamplerConfig::default(), &mut rng)?;
    let before = shares(&partition.regions, &mut rng);

    let dense = (1..partition.len())
        .max_by(|&a, &b| partition.regions[a].rho_obs.total_cmp(&partition.regions[b].rho_obs))
        .unwrap_or(0);
    println!("region 0 always fails, region {dense} (densest of the rest) always succeeds");
    for _ in 0..200 {
        posterior_update(&mut partition.regions[0], false);
        posterior_update(&mut partition.regions[dense], true);
    }
    let after = shares(&partition.regions, &mut rng);

    println!("{:>3} {:>7} {:>7} {:>7} {:>8} {:>8}", "k", "rho", "alpha", "beta", "share0", "share1");
    for (k, r) in partition.regions.iter().enumerate() {
        println!(
            "{k:>3} {:>7.3} {:>7.1} {:>7.1} {:>8.3} {:>8.3}",
            r.rho_obs, r.alpha, r.beta, before[k], after[k]
        );
    }
    Ok(())
}
