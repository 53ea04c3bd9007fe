//! Planted tilings with independent positive and negative noise.
//!
//! Tile `s` owns a block of `k = ⌈n/100⌉` items and `l = ⌈m/100⌉`
//! transactions no other tile touches. On top of that it gets a random
//! subset of the `ñ = n − k·r*` free items and `m̃ = m − l·r*` free
//! transactions. Subset sizes come from one `u_s ~ U[0, 1)` per tile:
//! `|x_s| = ⌊u_s(⌊qñ⌋ + 1)⌋` and `|y_s| = ⌊u_s(⌊qm̃⌋ + 1)⌋`, so each size is
//! uniform on its range but wide tiles are also tall. Noise is one draw per
//! cell in row-major order: a covered cell drops with probability `p−`, an
//! uncovered one appears with probability `p+`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{bool_product, BinaryMatrix, SignedMatrix};

/// Name of the weight law, written into instance metadata.
pub const WEIGHT_LAW: &str = "coupled-uniform-weight,uniform-subset";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub r_star: usize,
    pub q: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub seed: u64,
}

impl GenSpec {
    /// Identity block widths `(k, l)`.
    pub fn block_sizes(&self) -> (usize, usize) {
        (self.n.div_ceil(100), self.m.div_ceil(100))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.r_star == 0 {
            return bad("planted rank must be at least 1".into());
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad(format!("q must lie in (0, 1), got {}", self.q));
        }
        for (name, p) in [("p_plus", self.p_plus), ("p_minus", self.p_minus)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let (k, l) = self.block_sizes();
        if k * self.r_star > self.n || l * self.r_star > self.m {
            return bad(format!(
                "identity blocks do not fit: {} tiles need {}x{} cells of a {}x{} matrix",
                self.r_star,
                l * self.r_star,
                k * self.r_star,
                self.m,
                self.n
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub spec: GenSpec,
    pub d: BinaryMatrix,
    pub x_star: BinaryMatrix,
    pub y_star: BinaryMatrix,
    pub n: SignedMatrix,
}

pub fn generate_data(spec: &GenSpec) -> Result<PlantedInstance> {
    spec.validate()?;
    let GenSpec {
        n, m, r_star, q, ..
    } = *spec;
    let (k, l) = spec.block_sizes();
    let (n_free, m_free) = (n - k * r_star, m - l * r_star);
    let (cap_x, cap_y) = (
        (q * n_free as f64).floor() as usize,
        (q * m_free as f64).floor() as usize,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x = BinaryMatrix::zeros(n, r_star);
    let mut y = BinaryMatrix::zeros(m, r_star);
    for s in 0..r_star {
        for i in s * k..(s + 1) * k {
            x.set(i, s, true);
        }
        for j in s * l..(s + 1) * l {
            y.set(j, s, true);
        }
        let u: f64 = rng.gen();
        let wx = ((u * (cap_x + 1) as f64) as usize).min(cap_x);
        let wy = ((u * (cap_y + 1) as f64) as usize).min(cap_y);
        for i in sample(&mut rng, n_free, wx) {
            x.set(k * r_star + i, s, true);
        }
        for j in sample(&mut rng, m_free, wy) {
            y.set(l * r_star + j, s, true);
        }
    }

    let clean = bool_product(&y, &x)?;
    let mut d = clean.clone();
    let mut noise = SignedMatrix::zeros(m, n);
    for j in 0..m {
        for i in 0..n {
            let u: f64 = rng.gen();
            if clean.get(j, i) {
                if u < spec.p_minus {
                    d.set(j, i, false);
                    noise.set(j, i, -1);
                }
            } else if u < spec.p_plus {
                d.set(j, i, true);
                noise.set(j, i, 1);
            }
        }
    }
    Ok(PlantedInstance {
        spec: *spec,
        d,
        x_star: x,
        y_star: y,
        n: noise,
    })
}

/// `|θ(Y*X*ᵀ)| / (nm) · 100`.
pub fn planted_density(inst: &PlantedInstance) -> f64 {
    let covered = covered_cells(&inst.x_star, &inst.y_star);
    percent(covered, inst.d.rows() * inst.d.cols())
}

/// `|D| / (nm) · 100`.
pub fn data_density(inst: &PlantedInstance) -> f64 {
    percent(inst.d.count_ones(), inst.d.rows() * inst.d.cols())
}

/// `(Σ_s |Y*_s||X*_s| − |θ(Y*X*ᵀ)|) / |θ(Y*X*ᵀ)| · 100`; zero for an empty cover.
pub fn planted_overlap(inst: &PlantedInstance) -> f64 {
    tiling_overlap(&inst.x_star, &inst.y_star)
}

pub fn tiling_overlap(x: &BinaryMatrix, y: &BinaryMatrix) -> f64 {
    let covered = covered_cells(x, y);
    if covered == 0 {
        return 0.0;
    }
    let areas: usize = (0..x.cols()).map(|s| x.col_sum(s) * y.col_sum(s)).sum();
    percent(areas - covered, covered)
}

fn covered_cells(x: &BinaryMatrix, y: &BinaryMatrix) -> usize {
    bool_product(y, x).map(|p| p.count_ones()).unwrap_or(0)
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64 * 100.0
    }
}

/// One JSON-lines record describing a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(flatten)]
    pub spec: GenSpec,
    pub k: usize,
    pub l: usize,
    pub weight_law: String,
    pub data_density: f64,
    pub planted_density: f64,
    pub overlap: f64,
    pub noise_plus: usize,
    pub noise_minus: usize,
}

impl InstanceMeta {
    pub fn of(inst: &PlantedInstance) -> Self {
        let (k, l) = inst.spec.block_sizes();
        let (noise_plus, noise_minus) = crate::matrix::noise_split(&inst.n);
        InstanceMeta {
            spec: inst.spec,
            k,
            l,
            weight_law: WEIGHT_LAW.to_string(),
            data_density: data_density(inst),
            planted_density: planted_density(inst),
            overlap: planted_overlap(inst),
            noise_plus,
            noise_minus,
        }
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n: usize, m: usize, r: usize, p: f64, seed: u64) -> GenSpec {
        GenSpec {
            n,
            m,
            r_star: r,
            q: 0.1,
            p_plus: p,
            p_minus: p,
            seed,
        }
    }

    #[test]
    fn noiseless_instance_is_exact() {
        let inst = generate_data(&spec(200, 150, 6, 0.0, 3)).unwrap();
        assert_eq!(inst.d, bool_product(&inst.y_star, &inst.x_star).unwrap());
        assert!(inst.n.as_slice().iter().all(|&v| v == 0));
    }

    #[test]
    fn identity_blocks_present() {
        let s = spec(250, 120, 4, 0.1, 1);
        let inst = generate_data(&s).unwrap();
        let (k, l) = s.block_sizes();
        assert_eq!((k, l), (3, 2));
        for t in 0..4 {
            for i in 0..k * 4 {
                assert_eq!(inst.x_star.get(i, t), i / k == t);
            }
            for j in 0..l * 4 {
                assert_eq!(inst.y_star.get(j, t), j / l == t);
            }
        }
    }

    #[test]
    fn blocks_that_do_not_fit_are_rejected() {
        assert!(generate_data(&spec(100, 120, 101, 0.0, 0)).is_err());
        assert!(generate_data(&spec(150, 120, 80, 0.0, 0)).is_err());
        assert!(generate_data(&GenSpec {
            q: 0.0,
            ..spec(100, 100, 2, 0.0, 0)
        })
        .is_err());
        assert!(generate_data(&GenSpec {
            p_plus: 1.5,
            ..spec(100, 100, 2, 0.0, 0)
        })
        .is_err());
    }

    #[test]
    fn seed_determinism() {
        let s = spec(120, 90, 5, 0.2, 77);
        assert_eq!(generate_data(&s).unwrap(), generate_data(&s).unwrap());
        let other = generate_data(&GenSpec { seed: 78, ..s }).unwrap();
        assert_ne!(generate_data(&s).unwrap().d, other.d);
    }

    #[test]
    fn overlap_of_disjoint_and_duplicated_tiles() {
        let x = BinaryMatrix::from_rows(&[&[1, 0], &[1, 0], &[0, 1], &[0, 1]]);
        let y = BinaryMatrix::from_rows(&[&[1, 0], &[1, 0], &[0, 1], &[0, 1]]);
        assert_eq!(tiling_overlap(&x, &y), 0.0);
        // the 2x2 tile twice plus a 2x4 tile over rows 2..4: areas 4+4+8, union 12
        let x = BinaryMatrix::from_rows(&[&[1, 1, 1], &[1, 1, 1], &[0, 0, 1], &[0, 0, 1]]);
        let y = BinaryMatrix::from_rows(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1], &[0, 0, 1]]);
        assert!((tiling_overlap(&x, &y) - 4.0 / 12.0 * 100.0).abs() < 1e-12);
        assert_eq!(
            tiling_overlap(&BinaryMatrix::zeros(3, 0), &BinaryMatrix::zeros(2, 0)),
            0.0
        );
    }

    #[test]
    fn flip_rates_are_close_to_requested() {
        let s = GenSpec {
            p_plus: 0.1,
            p_minus: 0.3,
            ..spec(300, 300, 5, 0.0, 12)
        };
        let inst = generate_data(&s).unwrap();
        let clean = bool_product(&inst.y_star, &inst.x_star).unwrap();
        let covered = clean.count_ones() as f64;
        let uncovered = (300 * 300) as f64 - covered;
        let (plus, minus) = crate::matrix::noise_split(&inst.n);
        let check = |count: usize, trials: f64, p: f64| {
            let se = (p * (1.0 - p) / trials).sqrt();
            assert!(
                (count as f64 / trials - p).abs() <= 3.0 * se,
                "{count}/{trials} vs {p}"
            );
        };
        check(plus, uncovered, 0.1);
        check(minus, covered, 0.3);
    }

    #[test]
    fn metadata_line() {
        let inst = generate_data(&spec(100, 120, 5, 0.1, 7)).unwrap();
        let meta = InstanceMeta::of(&inst);
        let line = meta.to_json_line();
        assert!(line.ends_with('\n') && !line[..line.len() - 1].contains('\n'));
        let back: InstanceMeta = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back, meta);
        assert_eq!(back.weight_law, WEIGHT_LAW);
        assert_eq!(
            back.noise_plus + back.noise_minus,
            inst.n.as_slice().iter().filter(|v| **v != 0).count()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn generator_invariants(seed in any::<u64>(), r in 1usize..6, p in 0.0f64..0.5) {
            let s = GenSpec { p_plus: p, p_minus: p / 2.0, ..spec(130, 110, r, 0.0, seed) };
            let inst = generate_data(&s).unwrap();
            let (k, l) = s.block_sizes();
            let cap_x = (0.1 * (130 - k * r) as f64).floor() as usize;
            let cap_y = (0.1 * (110 - l * r) as f64).floor() as usize;
            for t in 0..r {
                let free_x = (k * r..130).filter(|&i| inst.x_star.get(i, t)).count();
                let free_y = (l * r..110).filter(|&j| inst.y_star.get(j, t)).count();
                prop_assert!(free_x <= cap_x && free_y <= cap_y);
            }
            let clean = bool_product(&inst.y_star, &inst.x_star).unwrap();
            for j in 0..110 {
                for i in 0..130 {
                    let v = inst.n.get(j, i);
                    prop_assert!(!(v == -1 && !clean.get(j, i)));
                    prop_assert!(!(v == 1 && clean.get(j, i)));
                    prop_assert_eq!(inst.d.get(j, i) as i8, clean.get(j, i) as i8 + v);
                }
            }
        }
    }
}
