//! Seeded random channels, input policies and set families for property
//! sweeps.
//!
//! The generator is ChaCha8 seeded from a `u64` via
//! `ChaCha8Rng::seed_from_u64`. Every pmf slice is an independent draw from
//! the flat Dirichlet distribution, obtained by normalizing i.i.d.
//! standard exponential variates. Alphabet sizes are uniform on
//! `1..=max` for `Q` and `2..=max` for every other alphabet.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

pub use rand::SeedableRng;

use crate::error::Result;
use crate::infotheory::{ChannelSpec, InputPolicy};
use crate::subsets::{SetFamily, SubsetMask};

pub type SweepRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One flat-Dirichlet sample of dimension `n`.
pub fn flat_dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

fn size<R: Rng + ?Sized>(rng: &mut R, min: usize, max: usize) -> usize {
    if max <= min {
        min
    } else {
        rng.gen_range(min..=max)
    }
}

/// Random channel with the given input alphabets.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    x_sizes: &[usize],
    y_size: usize,
    z_size: usize,
) -> Result<ChannelSpec> {
    let inputs: usize = x_sizes.iter().product();
    let mut w = Vec::with_capacity(inputs * y_size * z_size);
    for _ in 0..inputs {
        w.extend(flat_dirichlet(rng, y_size * z_size));
    }
    ChannelSpec::with_tolerance(x_sizes.to_vec(), y_size, z_size, w, 1e-9)
}

/// Random factored input policy.
pub fn random_policy<R: Rng + ?Sized>(
    rng: &mut R,
    q_size: usize,
    v_sizes: &[usize],
    x_sizes: &[usize],
) -> Result<InputPolicy> {
    let p_q = flat_dirichlet(rng, q_size);
    let p_v_given_q = v_sizes
        .iter()
        .map(|&v| (0..q_size).map(|_| flat_dirichlet(rng, v)).collect())
        .collect();
    let p_x_given_v = v_sizes
        .iter()
        .zip(x_sizes)
        .map(|(&v, &x)| (0..v).map(|_| flat_dirichlet(rng, x)).collect())
        .collect();
    InputPolicy::with_tolerance(p_q, p_v_given_q, p_x_given_v, 1e-9)
}

/// Random channel and policy for `k` transmitters with every alphabet at
/// most `max_alphabet`.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    max_alphabet: usize,
) -> Result<(ChannelSpec, InputPolicy)> {
    let q_size = size(rng, 1, max_alphabet);
    let v_sizes: Vec<usize> = (0..k).map(|_| size(rng, 2, max_alphabet)).collect();
    let x_sizes: Vec<usize> = (0..k).map(|_| size(rng, 2, max_alphabet)).collect();
    let y_size = size(rng, 2, max_alphabet);
    let z_size = size(rng, 2, max_alphabet);
    let channel = random_channel(rng, &x_sizes, y_size, z_size)?;
    let policy = random_policy(rng, q_size, &v_sizes, &x_sizes)?;
    Ok((channel, policy))
}

/// Random family of length `1..=max_len` over `{1..k}`; members may be empty.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, k: usize, max_len: usize) -> Result<SetFamily> {
    let t = size(rng, 1, max_len);
    let members = (0..t)
        .map(|_| SubsetMask::new(rng.gen_range(0..1u32 << k), k))
        .collect::<Result<Vec<_>>>()?;
    SetFamily::new(k, members)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_is_a_pmf() {
        let mut rng = seeded(3);
        for n in 1..6 {
            let p = flat_dirichlet(&mut rng, n);
            assert_eq!(p.len(), n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_pair(&mut seeded(11), 3, 3).unwrap();
        let b = random_pair(&mut seeded(11), 3, 3).unwrap();
        assert_eq!(a, b);
        let c = random_pair(&mut seeded(12), 3, 3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn alphabets_respect_bound() {
        let mut rng = seeded(5);
        for _ in 0..50 {
            let (ch, pol) = random_pair(&mut rng, 3, 3).unwrap();
            assert!(ch.x_sizes().iter().all(|&s| (2..=3).contains(&s)));
            assert!((1..=3).contains(&pol.q_size()));
            assert!(pol.v_sizes().iter().all(|&s| (2..=3).contains(&s)));
        }
    }
}
