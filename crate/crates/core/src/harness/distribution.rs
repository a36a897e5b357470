use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Prob = Ratio<u128>;

/// Decoder output: a packed message, or `None` for the rejection symbol.
pub type Outcome = Option<u64>;

pub fn prob_to_f64(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// A finite distribution with exact rational probabilities.
#[derive(Clone, PartialEq, Eq)]
pub struct Distribution<K: Ord = Outcome> {
    probs: BTreeMap<K, Prob>,
}

impl<K: Ord + fmt::Debug> fmt::Debug for Distribution<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.probs.iter().map(|(k, p)| (k, format!("{p}")))).finish()
    }
}

impl<K: Ord + Clone> Distribution<K> {
    /// Validates non-negativity (implied by the type) and normalization.
    pub fn from_probs(probs: BTreeMap<K, Prob>) -> Result<Self> {
        let total: Prob = probs.values().cloned().sum();
        if total != Prob::one() {
            return Err(Error::InvalidParameters(format!("distribution sums to {total}, not 1")));
        }
        Ok(Self { probs: probs.into_iter().filter(|(_, p)| !p.is_zero()).collect() })
    }

    /// Empirical law of integer counts.
    pub fn from_counts<I: IntoIterator<Item = (K, u64)>>(counts: I) -> Result<Self> {
        let counts: Vec<(K, u64)> = counts.into_iter().collect();
        let total: u128 = counts.iter().map(|(_, c)| u128::from(*c)).sum();
        if total == 0 {
            return Err(Error::InvalidParameters("empty count table".into()));
        }
        let mut probs = BTreeMap::new();
        for (k, c) in counts {
            if c > 0 {
                *probs.entry(k).or_insert_with(Prob::zero) += Prob::new(u128::from(c), total);
            }
        }
        Ok(Self { probs })
    }

    pub fn point(k: K) -> Self {
        Self { probs: BTreeMap::from([(k, Prob::one())]) }
    }

    pub fn uniform<I: IntoIterator<Item = K>>(support: I) -> Result<Self> {
        Self::from_counts(support.into_iter().map(|k| (k, 1)))
    }

    /// Weighted mixture; weights must sum to one.
    pub fn mixture(parts: &[(Prob, Distribution<K>)]) -> Result<Self> {
        let mut probs: BTreeMap<K, Prob> = BTreeMap::new();
        for (w, d) in parts {
            for (k, p) in &d.probs {
                *probs.entry(k.clone()).or_insert_with(Prob::zero) += w * p;
            }
        }
        Self::from_probs(probs)
    }

    pub fn prob(&self, k: &K) -> Prob {
        self.probs.get(k).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.probs.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Prob)> {
        self.probs.iter()
    }

    pub fn max_prob(&self) -> Prob {
        self.probs.values().max().cloned().unwrap_or_else(Prob::zero)
    }

    /// Exact total-variation distance.
    pub fn tv(&self, other: &Self) -> Prob {
        let mut acc = Prob::zero();
        for (k, p) in &self.probs {
            let q = other.prob(k);
            if *p > q {
                acc += p - q;
            }
        }
        acc
    }

    pub fn map<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> Distribution<J> {
        let mut probs: BTreeMap<J, Prob> = BTreeMap::new();
        for (k, p) in &self.probs {
            *probs.entry(f(k)).or_insert_with(Prob::zero) += p;
        }
        Distribution { probs }
    }
}

/// `-log2` of the largest probability.
pub fn min_entropy<K: Ord + Clone>(d: &Distribution<K>) -> f64 {
    -prob_to_f64(&d.max_prob()).log2()
}

/// Half the L1 distance.
pub fn statistical_distance<K: Ord + Clone>(d1: &Distribution<K>, d2: &Distribution<K>) -> f64 {
    prob_to_f64(&d1.tv(d2))
}
