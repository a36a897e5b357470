use std::collections::BTreeSet;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::distribution::{prob_to_f64, Distribution, Outcome};
use crate::error::{Error, Result};

/// Which aggregate of per-message distances is minimized.
#[derive(Clone, Debug, PartialEq)]
pub enum FitForm {
    /// Maximum over messages (the non-malleable code definition).
    Worst,
    /// Average weighted by the message law (the randomness-encoder definition).
    Average(Vec<f64>),
}

/// Best decomposition `D_m ~ p * delta_m + (1 - p) * gamma`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatorFit {
    pub epsilon_star: f64,
    pub p_star: f64,
    pub gamma_star: Vec<(Outcome, f64)>,
    pub form: FitForm,
}

struct Table {
    messages: Vec<u64>,
    universe: Vec<Outcome>,
    /// `d[m][o]`
    d: Vec<Vec<f64>>,
    /// Index of `Some(m)` in the universe for each message.
    own: Vec<usize>,
    weights: Option<Vec<f64>>,
}

impl Table {
    fn new(per_message: &[(u64, Distribution<Outcome>)], form: &FitForm) -> Result<Self> {
        if per_message.is_empty() {
            return Err(Error::InvalidParameters("simulator fit needs at least one message".into()));
        }
        let mut universe: BTreeSet<Outcome> = per_message.iter().map(|(m, _)| Some(*m)).collect();
        for (_, d) in per_message {
            universe.extend(d.support().cloned());
        }
        let universe: Vec<Outcome> = universe.into_iter().collect();
        let d = per_message
            .iter()
            .map(|(_, dist)| universe.iter().map(|o| prob_to_f64(&dist.prob(o))).collect())
            .collect();
        let own = per_message
            .iter()
            .map(|(m, _)| universe.iter().position(|o| *o == Some(*m)).unwrap())
            .collect();
        let weights = match form {
            FitForm::Worst => None,
            FitForm::Average(w) => {
                if w.len() != per_message.len() || w.iter().any(|&x| x < 0.0) {
                    return Err(Error::InvalidParameters("average fit needs one non-negative weight per message".into()));
                }
                Some(w.clone())
            }
        };
        Ok(Self { messages: per_message.iter().map(|(m, _)| *m).collect(), universe, d, own, weights })
    }

    /// Aggregate error of the decomposition with same-weight `p` and
    /// unnormalized remainder `w = (1 - p) gamma`.
    fn error(&self, p: f64, w: &[f64]) -> f64 {
        let per: Vec<f64> = (0..self.messages.len())
            .map(|i| {
                0.5 * self
                    .universe
                    .iter()
                    .enumerate()
                    .map(|(j, _)| {
                        let same = if j == self.own[i] { p } else { 0.0 };
                        (self.d[i][j] - same - w[j]).abs()
                    })
                    .sum::<f64>()
            })
            .collect();
        match &self.weights {
            None => per.iter().cloned().fold(0.0, f64::max),
            Some(wt) => per.iter().zip(wt).map(|(e, w)| e * w).sum(),
        }
    }

    fn average(&self) -> Vec<f64> {
        let n = self.messages.len() as f64;
        (0..self.universe.len())
            .map(|j| match &self.weights {
                None => self.d.iter().map(|row| row[j]).sum::<f64>() / n,
                Some(wt) => {
                    let total: f64 = wt.iter().sum();
                    self.d.iter().zip(wt).map(|(row, w)| row[j] * w).sum::<f64>() / total
                }
            })
            .collect()
    }

    fn solve_lp(&self) -> Option<(f64, Vec<f64>)> {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let worst = self.weights.is_none();
        let eps = lp.add_var(if worst { 1.0 } else { 0.0 }, (0.0, f64::INFINITY));
        let p = lp.add_var(0.0, (0.0, 1.0));
        let w: Vec<_> = self.universe.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
        let mut norm = vec![(p, 1.0)];
        norm.extend(w.iter().map(|&v| (v, 1.0)));
        lp.add_constraint(&norm, ComparisonOp::Eq, 1.0);
        for i in 0..self.messages.len() {
            let coef = match &self.weights {
                None => 0.0,
                Some(wt) => 0.5 * wt[i],
            };
            let e: Vec<_> = self.universe.iter().map(|_| lp.add_var(coef, (0.0, f64::INFINITY))).collect();
            for j in 0..self.universe.len() {
                let mut lhs = vec![(w[j], 1.0), (e[j], -1.0)];
                if j == self.own[i] {
                    lhs.push((p, 1.0));
                }
                // d - p[o=m] - w <= e  and  p[o=m] + w - d <= e
                lp.add_constraint(&lhs, ComparisonOp::Le, self.d[i][j]);
                let neg: Vec<_> = lhs.iter().map(|&(v, c)| if v == e[j] { (v, c) } else { (v, -c) }).collect();
                lp.add_constraint(&neg, ComparisonOp::Le, -self.d[i][j]);
            }
            if worst {
                let mut row: Vec<_> = e.iter().map(|&v| (v, 0.5)).collect();
                row.push((eps, -1.0));
                lp.add_constraint(&row, ComparisonOp::Le, 0.0);
            }
        }
        let sol = lp.solve().ok()?;
        let p_val = sol[p].clamp(0.0, 1.0);
        Some((p_val, w.iter().map(|&v| sol[v].max(0.0)).collect()))
    }
}

/// Minimizes the aggregate distance over `p` in `[0, 1]` and distributions
/// `gamma`, as one linear program in `(p, (1 - p) gamma)`. The closed-form
/// candidates `p = 1` and `p = 0, gamma = average` are also evaluated and the
/// best of all is returned.
pub fn fit_simulator(per_message: &[(u64, Distribution<Outcome>)], form: FitForm) -> Result<SimulatorFit> {
    let table = Table::new(per_message, &form)?;
    let avg = table.average();
    let mut candidates: Vec<(f64, Vec<f64>)> = vec![(0.0, avg.clone()), (1.0, vec![0.0; avg.len()])];
    if let Some(sol) = table.solve_lp() {
        candidates.push(sol);
    }
    let (p, w, err) = candidates
        .into_iter()
        .map(|(p, w)| {
            let e = table.error(p, &w);
            (p, w, e)
        })
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .unwrap();
    let rest: f64 = w.iter().sum();
    let gamma_star = if rest > 1e-15 {
        table.universe.iter().cloned().zip(w.iter().map(|x| x / rest)).filter(|(_, x)| *x > 0.0).collect()
    } else {
        table.universe.iter().cloned().zip(avg).filter(|(_, x)| *x > 0.0).collect()
    };
    Ok(SimulatorFit { epsilon_star: err.max(0.0), p_star: p, gamma_star, form })
}

/// Error of the naive fit `p = 0`, `gamma = average of the D_m`.
pub fn naive_fit_error(per_message: &[(u64, Distribution<Outcome>)], form: &FitForm) -> Result<f64> {
    let table = Table::new(per_message, form)?;
    let avg = table.average();
    Ok(table.error(0.0, &avg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::distribution::Prob;

    fn point(o: Outcome) -> Distribution<Outcome> {
        Distribution::point(o)
    }

    #[test]
    fn identity_fits_with_p_one() {
        let dm: Vec<_> = (0..4).map(|m| (m, point(Some(m)))).collect();
        let f = fit_simulator(&dm, FitForm::Worst).unwrap();
        assert_eq!(f.epsilon_star, 0.0);
        assert_eq!(f.p_star, 1.0);
    }

    #[test]
    fn constant_fits_with_p_zero() {
        let g0 = Distribution::from_counts([(Some(2u64), 1), (None, 3)]).unwrap();
        let dm: Vec<_> = (0..4).map(|m| (m, g0.clone())).collect();
        let f = fit_simulator(&dm, FitForm::Worst).unwrap();
        assert_eq!(f.epsilon_star, 0.0);
        assert_eq!(f.p_star, 0.0);
        assert!(f.gamma_star.contains(&(None, 0.75)));
    }

    #[test]
    fn half_mixture_recovered() {
        let g0 = Distribution::from_counts([(Some(0u64), 1), (Some(3), 1), (None, 2)]).unwrap();
        let dm: Vec<_> = (0..4u64)
            .map(|m| {
                let d = Distribution::mixture(&[(Prob::new(1, 2), point(Some(m))), (Prob::new(1, 2), g0.clone())]).unwrap();
                (m, d)
            })
            .collect();
        for form in [FitForm::Worst, FitForm::Average(vec![0.25; 4])] {
            let f = fit_simulator(&dm, form).unwrap();
            assert!(f.epsilon_star <= 1e-9, "{f:?}");
            assert!((f.p_star - 0.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn never_worse_than_naive() {
        let dm = vec![
            (0u64, Distribution::from_counts([(Some(1u64), 3), (Some(0), 1)]).unwrap()),
            (1u64, Distribution::from_counts([(None, 1), (Some(1), 1)]).unwrap()),
        ];
        let naive = naive_fit_error(&dm, &FitForm::Worst).unwrap();
        let f = fit_simulator(&dm, FitForm::Worst).unwrap();
        assert!(f.epsilon_star <= naive + 1e-12);
        assert!(fit_simulator(&[], FitForm::Worst).is_err());
    }
}
