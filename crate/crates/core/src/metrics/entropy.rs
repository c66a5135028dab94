//! Shannon entropy in nats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative weights per category.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub weights: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn add(&mut self, category: impl Into<String>, weight: f64) {
        *self.weights.entry(category.into()).or_default() += weight;
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn entropy(&self) -> Result<f64> {
        shannon_entropy(self.weights.values().copied())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const EXACT_INT: f64 = 9_007_199_254_740_992.0; // 2^53

/// `H = -Σ p_i ln p_i` with `p_i = w_i / Σw`; zero weights contribute
/// nothing.
///
/// Terms are summed in ascending weight order, so the result does not
/// depend on category order. Integer-valued weights are first divided by
/// their gcd, which makes the result bit-identical under integer rescaling;
/// for those, `H = ln W - Σ w ln w / W`, which returns `ln n` exactly for a
/// uniform distribution.
pub fn shannon_entropy(weights: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut w: Vec<f64> = Vec::new();
    for x in weights {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!("weight {x} is not a finite nonnegative number")));
        }
        if x > 0.0 {
            w.push(x);
        }
    }
    if w.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    w.sort_by(f64::total_cmp);

    let integral = w.iter().all(|x| x.fract() == 0.0 && *x < EXACT_INT);
    if integral {
        let g = w.iter().fold(0u64, |g, &x| gcd(g, x as u64));
        let reduced: Vec<f64> = w.iter().map(|&x| ((x as u64) / g) as f64).collect();
        let total: f64 = reduced.iter().sum();
        if total < EXACT_INT {
            let s: f64 = reduced.iter().map(|&x| x * x.ln()).sum();
            return Ok((total.ln() - s / total).max(0.0));
        }
    }
    let total: f64 = w.iter().sum();
    let h: f64 = w
        .iter()
        .map(|&x| {
            let p = x / total;
            -p * p.ln()
        })
        .sum();
    Ok(h.max(0.0))
}
