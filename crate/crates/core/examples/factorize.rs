//! PAL-Tiling on a noisy planted instance with both cost models.
//!
//! `cargo run --release --example factorize [iterations]`

use paltiling::eval::micro_f;
use paltiling::objectives::ModelKind;
use paltiling::paltiling::{pal_tiling, PalConfig};
use paltiling::synth::{generate_data, GenSpec};

fn main() -> paltiling::Result<()> {
    let iterations = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2000);
    let spec = GenSpec {
        n: 100,
        m: 120,
        r_star: 5,
        q: 0.1,
        p_plus: 0.1,
        p_minus: 0.1,
        seed: 1,
    };
    let inst = generate_data(&spec)?;
    for model in [ModelKind::Primp, ModelKind::Panpal] {
        let cfg = PalConfig {
            model,
            delta_r: 2,
            iterations,
            seed: 1,
            ..PalConfig::default()
        };
        let tiling = pal_tiling(&inst.d, &cfg)?;
        let score = micro_f(&inst.x_star, &inst.y_star, &tiling.x, &tiling.y)?;
        println!(
            "{model}: rank {} (offered {}), thresholds {:?}, stop {}, F = {:.3}",
            tiling.rank(),
            tiling.offered_rank(),
            tiling.thresholds,
            tiling.stop,
            score.f_measure
        );
        print!("{}", tiling.rank_trace_csv());
    }
    Ok(())
}
