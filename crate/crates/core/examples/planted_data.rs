//! Generating planted tilings and reporting their statistics.

use paltiling::synth::{
    data_density, generate_data, planted_density, planted_overlap, GenSpec, InstanceMeta,
};

fn main() -> paltiling::Result<()> {
    for p in [0.0, 0.1, 0.25] {
        let spec = GenSpec {
            n: 800,
            m: 1000,
            r_star: 25,
            q: 0.1,
            p_plus: p,
            p_minus: p,
            seed: 1,
        };
        let inst = generate_data(&spec)?;
        println!(
            "p = {p:.2}: planted density {:.2}%, data density {:.2}%, overlap {:.2}%",
            planted_density(&inst),
            data_density(&inst),
            planted_overlap(&inst)
        );
    }
    let small = generate_data(&GenSpec {
        n: 100,
        m: 120,
        r_star: 5,
        q: 0.1,
        p_plus: 0.1,
        p_minus: 0.1,
        seed: 7,
    })?;
    print!("{}", InstanceMeta::of(&small).to_json_line());
    Ok(())
}
