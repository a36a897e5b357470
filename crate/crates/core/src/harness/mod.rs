//! Exhaustive tampering experiments, simulator fitting and privacy measurement.

mod distribution;
mod fit;
pub mod report;
mod tamper;

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

pub use distribution::{min_entropy, prob_to_f64, statistical_distance, Distribution, Outcome, Prob};
pub use fit::{fit_simulator, naive_fit_error, FitForm, SimulatorFit};
pub use tamper::{split_names, ClassicalTamper, SplitFn};

use crate::codecs::{Nmre, SplitCodec};
use crate::error::{Error, Result};
use crate::nmext::NmExtractor;

/// Largest randomness space enumerated by the harness.
pub const MAX_RANDOMNESS_BITS: usize = 22;

fn check_space(bits: usize) -> Result<()> {
    if bits > MAX_RANDOMNESS_BITS {
        return Err(Error::SpaceTooLarge { bits, limit: MAX_RANDOMNESS_BITS });
    }
    Ok(())
}

/// Integer counts of `key(i)` over `i in 0..2^bits`; independent of thread scheduling.
fn count_over<K, F>(bits: usize, key: F) -> HashMap<K, u64>
where
    K: std::hash::Hash + Eq + Send,
    F: Fn(u64) -> K + Sync,
{
    (0..1u64 << bits)
        .into_par_iter()
        .fold(HashMap::new, |mut acc, i| {
            *acc.entry(key(i)).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

fn weighted<K: Ord + Clone>(parts: Vec<(Prob, HashMap<K, u64>)>, total: u64) -> Result<Distribution<K>> {
    let mut probs: BTreeMap<K, Prob> = BTreeMap::new();
    for (w, counts) in parts {
        for (k, c) in counts {
            *probs.entry(k).or_insert_with(Prob::zero) += w * Prob::new(u128::from(c), u128::from(total));
        }
    }
    Distribution::from_probs(probs)
}

fn apply_tamper(fns: &[SplitFn], lens: &[usize], parts: &[u64]) -> Vec<u64> {
    fns.iter().zip(lens).zip(parts).map(|((f, &l), &v)| f.apply(v, l)).collect()
}

/// Exact law of `Dec(tamper(Enc(message, r)))` over uniform `r` and the tamper seed.
pub fn tamper_distribution(codec: &dyn SplitCodec, tamper: &ClassicalTamper, message: u64) -> Result<Distribution<Outcome>> {
    let lens = codec.split_lens();
    tamper.validate(&lens)?;
    let bits = codec.randomness_len();
    check_space(bits)?;
    if message >> codec.message_len() != 0 {
        return Err(Error::LengthMismatch { expected: codec.message_len(), actual: 64 - message.leading_zeros() as usize });
    }
    let parts = tamper
        .branches()
        .iter()
        .map(|(w, fns)| {
            let counts = count_over(bits, |r| {
                let c = codec.encode_split(message, r);
                codec.decode_split(&apply_tamper(fns, &lens, &c))
            });
            (*w, counts)
        })
        .collect();
    weighted(parts, 1u64 << bits)
}

/// [`tamper_distribution`] for every message of the codec.
pub fn tamper_distributions(codec: &dyn SplitCodec, tamper: &ClassicalTamper) -> Result<Vec<(u64, Distribution<Outcome>)>> {
    if codec.message_len() > 12 {
        return Err(Error::SpaceTooLarge { bits: codec.message_len(), limit: 12 });
    }
    (0..1u64 << codec.message_len()).map(|m| Ok((m, tamper_distribution(codec, tamper, m)?))).collect()
}

/// Both simulator fits for a split-state code: worst case over messages and
/// average over uniform messages.
#[derive(Clone, Debug)]
pub struct CodeTamperReport {
    pub worst: SimulatorFit,
    pub average: SimulatorFit,
    pub per_message: Vec<(u64, Distribution<Outcome>)>,
}

pub fn code_tamper_report(codec: &dyn SplitCodec, tamper: &ClassicalTamper) -> Result<CodeTamperReport> {
    let per_message = tamper_distributions(codec, tamper)?;
    let uniform = vec![1.0 / per_message.len() as f64; per_message.len()];
    Ok(CodeTamperReport {
        worst: fit_simulator(&per_message, FitForm::Worst)?,
        average: fit_simulator(&per_message, FitForm::Average(uniform))?,
        per_message,
    })
}

/// Randomness-encoder tampering: joint law of the message and the message
/// decoded from the tampered pair, with both simulator fits.
#[derive(Clone, Debug)]
pub struct NmreReport {
    pub joint: Distribution<(u64, u64)>,
    /// Fit of the conditional laws `M' | M = m`, worst over `m`.
    pub worst: SimulatorFit,
    /// Fit weighted by the law of `M` (copy-correlation form).
    pub average: SimulatorFit,
    /// `Pr[(X', Y') = (X, Y)]`.
    pub p_same: Prob,
    /// Distance of `M` from uniform on the untampered branch.
    pub same_branch_distance: f64,
    /// Distance of `(M, M')` from `U x M'` on the tampered branch.
    pub distinct_branch_distance: f64,
}

impl NmreReport {
    /// `p * d1 + (1 - p) * d2` in trace norm (twice the statistical distance).
    pub fn branch_bound_lhs(&self) -> f64 {
        let p = prob_to_f64(&self.p_same);
        2.0 * (p * self.same_branch_distance + (1.0 - p) * self.distinct_branch_distance)
    }
}

// key: (m, m', same)
type PairCounts = HashMap<(u64, u64, bool), u64>;

pub fn nmre_tamper_report(nmre: &Nmre, tamper: &ClassicalTamper) -> Result<NmreReport> {
    let p = nmre.profile();
    let (n, yl, out) = (p.n(), p.y_len(), p.out_len());
    let lens = [n, yl];
    tamper.validate(&lens)?;
    let bits = p.randomness_len();
    check_space(bits)?;
    let total = 1u64 << bits;
    let parts: Vec<(Prob, PairCounts)> = tamper
        .branches()
        .iter()
        .map(|(w, fns)| {
            let counts = count_over(bits, |r| {
                let (x, y) = (r >> yl, r & ((1 << yl) - 1));
                let t = apply_tamper(fns, &lens, &[x, y]);
                let m = nmre.decode_int(x, y);
                let m2 = nmre.decode_int(t[0], t[1]);
                (m, m2, t[0] == x && t[1] == y)
            });
            (*w, counts)
        })
        .collect();
    let full = weighted(parts, total)?;
    let joint = full.map(|&(m, m2, _)| (m, m2));
    let p_same: Prob = full.iter().filter(|((_, _, s), _)| *s).map(|(_, p)| *p).sum();

    // per-message conditionals
    let marginal = joint.map(|&(m, _)| m);
    let mut per_message = Vec::new();
    let mut weights = Vec::new();
    for m in marginal.support() {
        let pm = marginal.prob(m);
        let mut cond: BTreeMap<Outcome, Prob> = BTreeMap::new();
        for (&(a, b), pr) in joint.iter() {
            if a == *m {
                *cond.entry(Some(b)).or_insert_with(Prob::zero) += pr / pm;
            }
        }
        per_message.push((*m, Distribution::from_probs(cond)?));
        weights.push(prob_to_f64(&pm));
    }
    let worst = fit_simulator(&per_message, FitForm::Worst)?;
    let average = fit_simulator(&per_message, FitForm::Average(weights))?;

    let branch = |same: bool| -> Option<Distribution<(u64, u64)>> {
        let mass: Prob = full.iter().filter(|((_, _, s), _)| *s == same).map(|(_, p)| *p).sum();
        if mass.is_zero() {
            return None;
        }
        let probs: BTreeMap<(u64, u64), Prob> = full
            .iter()
            .filter(|((_, _, s), _)| *s == same)
            .map(|(&(a, b, _), p)| ((a, b), p / mass))
            .collect();
        Distribution::from_probs(probs).ok()
    };
    let uniform_m = Prob::new(1, 1u128 << out);
    let same_branch_distance = branch(true)
        .map(|d| {
            let mm = d.map(|&(a, _)| a);
            let mut acc = Prob::zero();
            for (_, p) in mm.iter() {
                if *p > uniform_m {
                    acc += p - uniform_m;
                }
            }
            prob_to_f64(&acc)
        })
        .unwrap_or(0.0);
    let distinct_branch_distance = branch(false)
        .map(|d| {
            // positive part of P(m, m') - P(m') / 2^out
            let m2 = d.map(|&(_, b)| b);
            let mut acc = Prob::zero();
            for (b, pb) in m2.iter() {
                let u = pb * uniform_m;
                for ((_, bb), p) in d.iter() {
                    if bb == b && *p > u {
                        acc += p - u;
                    }
                }
            }
            prob_to_f64(&acc)
        })
        .unwrap_or(0.0);

    Ok(NmreReport { joint, worst, average, p_same, same_branch_distance, distinct_branch_distance })
}

/// Exact distances of the extractor output from uniform: alone, jointly with
/// `X`, and jointly with `Y`, over uniform sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionReport {
    pub marginal: Prob,
    pub given_x: Prob,
    pub given_y: Prob,
}

impl ExtractionReport {
    /// Largest of the three distances.
    pub fn max(&self) -> Prob {
        self.marginal.max(self.given_x).max(self.given_y)
    }
}

pub fn extraction_report(ext: &NmExtractor) -> Result<ExtractionReport> {
    let p = ext.profile();
    let (n, yl, out) = (p.n(), p.y_len(), p.out_len());
    let table = ext.table()?;
    let u = Prob::new(1, 1u128 << out);
    let tv_uniform = |counts: &HashMap<u32, u64>, total: u64| -> Prob {
        let mut acc = Prob::zero();
        for &c in counts.values() {
            let pr = Prob::new(u128::from(c), u128::from(total));
            if pr > u {
                acc += pr - u;
            }
        }
        acc
    };
    let mut all: HashMap<u32, u64> = HashMap::new();
    for &v in table {
        *all.entry(v).or_insert(0) += 1;
    }
    let marginal = tv_uniform(&all, table.len() as u64);
    let given_x: Prob = (0..1usize << n)
        .into_par_iter()
        .map(|x| {
            let mut c: HashMap<u32, u64> = HashMap::new();
            for y in 0..1usize << yl {
                *c.entry(table[(x << yl) | y]).or_insert(0) += 1;
            }
            tv_uniform(&c, 1 << yl)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum::<Prob>()
        / Prob::from_integer(1u128 << n);
    let given_y: Prob = (0..1usize << yl)
        .map(|y| {
            let mut c: HashMap<u32, u64> = HashMap::new();
            for x in 0..1usize << n {
                *c.entry(table[(x << yl) | y]).or_insert(0) += 1;
            }
            tv_uniform(&c, 1 << n)
        })
        .sum::<Prob>()
        / Prob::from_integer(1u128 << yl);
    Ok(ExtractionReport { marginal, given_x, given_y })
}

/// Maximum over message pairs of the distance between the joint laws of the
/// selected parts (indices into the codec's split order).
pub fn privacy_distance(codec: &dyn SplitCodec, subset: &[usize]) -> Result<Prob> {
    let lens = codec.split_lens();
    if subset.iter().any(|&i| i >= lens.len()) {
        return Err(Error::InvalidParameters(format!("share subset {subset:?} out of range")));
    }
    let key_bits: usize = subset.iter().map(|&i| lens[i]).sum();
    if key_bits > 64 {
        return Err(Error::SpaceTooLarge { bits: key_bits, limit: 64 });
    }
    let bits = codec.randomness_len();
    check_space(bits)?;
    if codec.message_len() > 8 {
        return Err(Error::SpaceTooLarge { bits: codec.message_len(), limit: 8 });
    }
    let laws: Vec<Distribution<u64>> = (0..1u64 << codec.message_len())
        .map(|m| {
            let counts = count_over(bits, |r| {
                let c = codec.encode_split(m, r);
                subset.iter().fold(0u64, |acc, &i| (acc << lens[i]) | c[i])
            });
            Distribution::from_counts(counts)
        })
        .collect::<Result<_>>()?;
    let mut worst = Prob::zero();
    for i in 0..laws.len() {
        for j in i + 1..laws.len() {
            worst = worst.max(laws[i].tv(&laws[j]));
        }
    }
    Ok(worst)
}
