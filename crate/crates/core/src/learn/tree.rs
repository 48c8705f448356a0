use super::TrainingSet;

#[derive(Debug, Clone)]
enum Node {
    Leaf(usize),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Binary decision tree grown by gain ratio over midpoint thresholds.
///
/// At each node the best threshold of every feature is chosen by
/// information gain; among features whose gain is at least the average
/// positive gain, the highest gain ratio wins. Growth stops at pure nodes,
/// nodes too small to give both children `min_leaf` rows, and nodes with no
/// informative split.
#[derive(Debug, Clone)]
pub struct DecisionTree {
    root: Node,
}

const EPS: f64 = 1e-12;

fn entropy(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
    ratio: f64,
}

struct Builder<'a> {
    set: &'a TrainingSet,
    n_classes: usize,
    min_leaf: usize,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.set.targets[i]] += 1;
        }
        c
    }

    fn best_threshold(&self, idx: &[usize], feature: usize, base: f64) -> Option<Candidate> {
        let rows = &self.set.rows;
        let mut sorted = idx.to_vec();
        sorted.sort_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
        let n = sorted.len();
        let mut left = vec![0usize; self.n_classes];
        let mut right = self.counts(idx);
        let mut best: Option<Candidate> = None;
        for pos in 0..n - 1 {
            let t = self.set.targets[sorted[pos]];
            left[t] += 1;
            right[t] -= 1;
            let nl = pos + 1;
            let nr = n - nl;
            let (lo, hi) = (rows[sorted[pos]][feature], rows[sorted[pos + 1]][feature]);
            if lo == hi || nl < self.min_leaf || nr < self.min_leaf {
                continue;
            }
            let (fl, fr) = (nl as f64 / n as f64, nr as f64 / n as f64);
            let gain = base - fl * entropy(&left, nl) - fr * entropy(&right, nr);
            if best.as_ref().is_none_or(|b| gain > b.gain + EPS) {
                let mid = lo + (hi - lo) / 2.0;
                let split_info = -(fl * fl.log2() + fr * fr.log2());
                best = Some(Candidate {
                    feature,
                    threshold: if mid < hi { mid } else { lo },
                    gain,
                    ratio: gain / split_info,
                });
            }
        }
        best.filter(|b| b.gain > EPS)
    }

    fn majority(&self, counts: &[usize]) -> usize {
        super::argmax(counts)
    }

    fn grow(&self, idx: Vec<usize>) -> Node {
        let counts = self.counts(&idx);
        let majority = self.majority(&counts);
        if counts.iter().filter(|&&c| c > 0).count() <= 1 || idx.len() < 2 * self.min_leaf {
            return Node::Leaf(majority);
        }
        let base = entropy(&counts, idx.len());
        let candidates: Vec<Candidate> = (0..self.set.n_features())
            .filter_map(|f| self.best_threshold(&idx, f, base))
            .collect();
        if candidates.is_empty() {
            return Node::Leaf(majority);
        }
        let average = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
        let mut chosen: Option<&Candidate> = None;
        for c in candidates.iter().filter(|c| c.gain >= average - EPS) {
            if chosen.is_none_or(|b| c.ratio > b.ratio + EPS) {
                chosen = Some(c);
            }
        }
        let chosen = chosen.expect("the best-gain candidate is above average");
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .into_iter()
            .partition(|&i| self.set.rows[i][chosen.feature] <= chosen.threshold);
        Node::Split {
            feature: chosen.feature,
            threshold: chosen.threshold,
            left: Box::new(self.grow(left)),
            right: Box::new(self.grow(right)),
        }
    }
}

impl DecisionTree {
    pub(crate) fn fit(set: &TrainingSet, min_leaf: usize) -> Self {
        let builder = Builder {
            set,
            n_classes: set.classes.len(),
            min_leaf,
        };
        DecisionTree {
            root: builder.grow((0..set.rows.len()).collect()),
        }
    }

    pub(crate) fn predict(&self, x: &[f64]) -> usize {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(c) => return *c,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }
}
