//! Shared generators for the integration suites: seeded random discrete laws
//! and coupled pairs living on one finite probability space.

#![allow(dead_code)]

use haezendonck::DiscreteRV;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    probs
}

pub fn law_of(probs: &[f64], values: &[f64]) -> DiscreteRV {
    DiscreteRV::new(
        &probs
            .iter()
            .zip(values)
            .map(|(&p, &v)| (v, p))
            .collect::<Vec<_>>(),
    )
    .expect("generated laws are valid")
}

pub fn random_discrete(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteRV {
    let n = rng.gen_range(1..=max_atoms);
    let probs = random_probs(rng, n);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    law_of(&probs, &values)
}

/// Two outcome vectors coupled on one finite space, so sums, differences, and
/// pointwise comparisons are meaningful.
pub struct SharedSpace {
    pub probs: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SharedSpace {
    pub fn x_law(&self) -> DiscreteRV {
        law_of(&self.probs, &self.x)
    }

    pub fn y_law(&self) -> DiscreteRV {
        law_of(&self.probs, &self.y)
    }

    pub fn sum_law(&self) -> DiscreteRV {
        let sums: Vec<f64> = self.x.iter().zip(&self.y).map(|(a, b)| a + b).collect();
        law_of(&self.probs, &sums)
    }

    pub fn diff_law(&self) -> DiscreteRV {
        let diffs: Vec<f64> = self.x.iter().zip(&self.y).map(|(a, b)| a - b).collect();
        law_of(&self.probs, &diffs)
    }
}

pub fn random_pair(rng: &mut ChaCha8Rng, max_atoms: usize) -> SharedSpace {
    let n = rng.gen_range(2..=max_atoms);
    let probs = random_probs(rng, n);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    SharedSpace { probs, x, y }
}
