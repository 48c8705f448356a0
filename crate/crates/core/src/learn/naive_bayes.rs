use std::f64::consts::PI;

use super::TrainingSet;

/// Gaussian naive Bayes with maximum-likelihood variances floored at a
/// fixed minimum.
#[derive(Debug, Clone)]
pub struct GaussianNb {
    log_priors: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub(crate) fn fit(set: &TrainingSet, variance_floor: f64) -> Self {
        let n_classes = set.classes.len();
        let d = set.n_features();
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; d]; n_classes];
        for (row, &t) in set.rows.iter().zip(&set.targets) {
            counts[t] += 1;
            for (m, x) in means[t].iter_mut().zip(row) {
                *m += x;
            }
        }
        for (m, &c) in means.iter_mut().zip(&counts) {
            m.iter_mut().for_each(|v| *v /= c as f64);
        }
        let mut variances = vec![vec![0.0; d]; n_classes];
        for (row, &t) in set.rows.iter().zip(&set.targets) {
            for ((v, x), m) in variances[t].iter_mut().zip(row).zip(&means[t]) {
                *v += (x - m) * (x - m);
            }
        }
        for (v, &c) in variances.iter_mut().zip(&counts) {
            v.iter_mut()
                .for_each(|s| *s = (*s / c as f64).max(variance_floor));
        }
        let n = set.rows.len() as f64;
        GaussianNb {
            log_priors: counts.iter().map(|&c| (c as f64 / n).ln()).collect(),
            means,
            variances,
        }
    }

    /// Unnormalized log posterior of each class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        self.log_priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(lp, (mu, var))| {
                lp + x
                    .iter()
                    .zip(mu.iter().zip(var))
                    .map(|(xi, (m, v))| {
                        -0.5 * (2.0 * PI * v).ln() - (xi - m) * (xi - m) / (2.0 * v)
                    })
                    .sum::<f64>()
            })
            .collect()
    }

    /// Class posteriors, in sorted class order.
    pub fn posteriors(&self, x: &[f64]) -> Vec<f64> {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = jll.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exp.iter().sum();
        exp.iter().map(|e| e / total).collect()
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        super::argmax(&self.joint_log_likelihood(x))
    }
}
