use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::check_register;
use crate::{Error, Result};

/// Histogram of terminal measurement outcomes.
///
/// Outcomes are basis indices; their string form is the binary numeral of the
/// index, most significant qubit first, so `Q0` is the rightmost character.
/// Bits of unmeasured qubits are always `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    measured: Vec<usize>,
    counts: BTreeMap<usize, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize, measured: Vec<usize>) -> Self {
        Self {
            n_qubits,
            measured,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, outcome: usize, count: u64) {
        if count > 0 {
            *self.counts.entry(outcome).or_default() += count;
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn is_measured(&self, q: usize) -> bool {
        self.measured.contains(&q)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `(outcome index, count)` pairs in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn get(&self, outcome: &str) -> u64 {
        usize::from_str_radix(outcome, 2)
            .ok()
            .and_then(|k| self.counts.get(&k).copied())
            .unwrap_or(0)
    }

    pub fn outcome_string(&self, outcome: usize) -> String {
        format!("{:0width$b}", outcome, width = self.n_qubits)
    }

    /// Fraction of shots with qubit `q` read as `1`.
    pub fn frequency_of_one(&self, q: usize) -> f64 {
        let ones: u64 = self
            .iter()
            .filter(|(k, _)| (k >> q) & 1 == 1)
            .map(|(_, v)| v)
            .sum();
        ones as f64 / self.total() as f64
    }
}

impl Serialize for Counts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (k, v) in self.iter() {
            map.serialize_entry(&self.outcome_string(k), &v)?;
        }
        map.end()
    }
}

/// Draws `shots` independent outcomes from `probabilities` (indexed by basis
/// state) with a ChaCha8 stream seeded from `seed`.
///
/// Identical inputs always produce identical counts.
pub fn sample_distribution(
    probabilities: &[f64],
    n_qubits: usize,
    measured: &[usize],
    shots: usize,
    seed: u64,
) -> Result<Counts> {
    check_register(n_qubits)?;
    if probabilities.len() != 1 << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            got: probabilities.len(),
        });
    }
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p.max(0.0);
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("non-empty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(probabilities.len() - 1);
        tally[idx] += 1;
    }
    let mut counts = Counts::new(n_qubits, measured.to_vec());
    for (k, &v) in tally.iter().enumerate() {
        counts.record(k, v);
    }
    Ok(counts)
}
