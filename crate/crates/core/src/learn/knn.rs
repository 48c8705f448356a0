use super::TrainingSet;

/// Lazy k-nearest-neighbour learner under Euclidean distance.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    n_classes: usize,
    rows: Vec<Vec<f64>>,
    targets: Vec<usize>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnModel {
    pub(crate) fn fit(set: &TrainingSet, k: usize) -> Self {
        KnnModel {
            k: k.min(set.rows.len()),
            n_classes: set.classes.len(),
            rows: set.rows.clone(),
            targets: set.targets.clone(),
        }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut scored: Vec<(f64, usize)> = self
            .rows
            .iter()
            .zip(&self.targets)
            .map(|(r, &t)| (squared_distance(r, x), t))
            .collect();
        // Equal distances order by class, so the smallest label wins.
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; self.n_classes];
        for &(_, t) in &scored[..self.k] {
            votes[t] += 1;
        }
        super::argmax(&votes)
    }
}
