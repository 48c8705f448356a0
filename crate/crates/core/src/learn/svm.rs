use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TrainingSet;

/// One binary hinge-loss machine separating `positive` from `negative`.
#[derive(Debug, Clone)]
struct BinaryMachine {
    positive: usize,
    negative: usize,
    weights: Vec<f64>,
    bias: f64,
}

/// One-vs-one linear SVM over standardized features.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    n_classes: usize,
    means: Vec<f64>,
    scales: Vec<f64>,
    machines: Vec<BinaryMachine>,
}

fn standardizer(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = rows.first().map_or(0, Vec::len);
    let n = rows.len() as f64;
    let mut means = vec![0.0; d];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    let mut scales = vec![0.0; d];
    for r in rows {
        for ((s, x), m) in scales.iter_mut().zip(r).zip(&means) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut scales {
        let sd = (*s / n).sqrt();
        *s = if sd > 0.0 { sd } else { 1.0 };
    }
    (means, scales)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dual coordinate descent for the L1-loss SVM; the bias is learned as the
/// weight of a constant unit feature.
fn train_binary(
    xs: &[&[f64]],
    ys: &[f64],
    c: f64,
    tolerance: f64,
    max_epochs: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64) {
    let d = xs.first().map_or(0, |x| x.len());
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut alpha = vec![0.0; xs.len()];
    let qd: Vec<f64> = xs.iter().map(|x| dot(x, x) + 1.0).collect();
    let mut order: Vec<usize> = (0..xs.len()).collect();

    for _ in 0..max_epochs {
        order.shuffle(rng);
        let mut max_pg = f64::NEG_INFINITY;
        let mut min_pg = f64::INFINITY;
        for &i in &order {
            let g = ys[i] * (dot(&w, xs[i]) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            max_pg = max_pg.max(pg);
            min_pg = min_pg.min(pg);
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd[i]).clamp(0.0, c);
                let delta = (alpha[i] - old) * ys[i];
                for (wj, xj) in w.iter_mut().zip(xs[i]) {
                    *wj += delta * xj;
                }
                b += delta;
            }
        }
        if max_pg - min_pg < tolerance {
            break;
        }
    }
    (w, b)
}

impl LinearSvm {
    pub(crate) fn fit(
        set: &TrainingSet,
        c: f64,
        tolerance: f64,
        max_epochs: usize,
        seed: u64,
    ) -> Self {
        let (means, scales) = standardizer(&set.rows);
        let z: Vec<Vec<f64>> = set
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(means.iter().zip(&scales))
                    .map(|(x, (m, s))| (x - m) / s)
                    .collect()
            })
            .collect();
        let n_classes = set.classes.len();
        let mut machines = Vec::new();
        for positive in 0..n_classes {
            for negative in positive + 1..n_classes {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for (row, &t) in z.iter().zip(&set.targets) {
                    if t == positive || t == negative {
                        xs.push(row.as_slice());
                        ys.push(if t == positive { 1.0 } else { -1.0 });
                    }
                }
                let pair_seed = seed ^ ((positive as u64) << 32 | negative as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(pair_seed);
                let (weights, bias) = train_binary(&xs, &ys, c, tolerance, max_epochs, &mut rng);
                machines.push(BinaryMachine {
                    positive,
                    negative,
                    weights,
                    bias,
                });
            }
        }
        LinearSvm {
            n_classes,
            means,
            scales,
            machines,
        }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let z: Vec<f64> = x
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(x, (m, s))| (x - m) / s)
            .collect();
        let mut votes = vec![0usize; self.n_classes];
        for m in &self.machines {
            let score = dot(&m.weights, &z) + m.bias;
            if score >= 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
        }
        super::argmax(&votes)
    }
}
