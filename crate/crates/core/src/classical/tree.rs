//! Binary decision trees: Gini classification trees for the forest and
//! squared-error regression trees for boosting.

use rand::Rng;
use rayon::prelude::*;

use crate::features::FeatureMatrix;

#[derive(Clone, Debug, PartialEq)]
pub enum Node<L> {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(L),
}

/// Nodes in creation order; the root is node 0. Samples with
/// `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree<L> {
    pub(crate) nodes: Vec<Node<L>>,
}

impl<L> Tree<L> {
    pub fn leaf_for(&self, row: &[f64]) -> &L {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf(l) => return l,
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node<L>] {
        &self.nodes
    }

    pub fn leaves(&self) -> impl Iterator<Item = &L> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(l) => Some(l),
            Node::Split { .. } => None,
        })
    }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

/// Class counts `[AI, HUMAN]` of the training samples that reached a leaf.
pub type ClassCounts = [u32; 2];

pub type ClassTree = Tree<ClassCounts>;
pub type RegressionTree = Tree<f64>;

fn gini_weighted(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (counts[0] as f64 / n, counts[1] as f64 / n);
    n * (1.0 - p0 * p0 - p1 * p1)
}

/// Grows a classification tree on `samples` (indices into `x`, repeats
/// allowed) until nodes are pure or hold fewer than two samples.
/// `max_features` non-constant features are tried per split, drawn without
/// replacement by `rng`.
pub(crate) fn grow_class_tree(
    x: &FeatureMatrix,
    y: &[usize],
    samples: Vec<usize>,
    max_features: usize,
    rng: &mut impl Rng,
) -> ClassTree {
    let d = x.cols();
    let mut nodes: Vec<Node<ClassCounts>> = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
    nodes.push(Node::Leaf([0, 0]));
    stack.push((0, samples));
    let mut features: Vec<usize> = (0..d).collect();
    let mut pairs: Vec<(f64, usize)> = Vec::new();

    while let Some((node, idx)) = stack.pop() {
        let mut counts = [0usize; 2];
        for &s in &idx {
            counts[y[s]] += 1;
        }
        let leaf = [counts[0] as u32, counts[1] as u32];
        if idx.len() < 2 || counts[0] == 0 || counts[1] == 0 {
            nodes[node] = Node::Leaf(leaf);
            continue;
        }

        // (impurity, feature, threshold)
        let mut best: Option<(f64, usize, f64)> = None;
        let mut tried = 0;
        let mut remaining = d;
        while tried < max_features && remaining > 0 {
            let k = rng.gen_range(0..remaining);
            remaining -= 1;
            features.swap(k, remaining);
            let f = features[remaining];

            pairs.clear();
            pairs.extend(idx.iter().map(|&s| (x.get(s, f), y[s])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[pairs.len() - 1].0 {
                continue;
            }
            tried += 1;
            let mut left = [0usize; 2];
            for w in 0..pairs.len() - 1 {
                left[pairs[w].1] += 1;
                if pairs[w].0 == pairs[w + 1].0 {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let impurity = gini_weighted(left) + gini_weighted(right);
                if best.is_none_or(|b| impurity < b.0) {
                    best = Some((impurity, f, midpoint(pairs[w].0, pairs[w + 1].0)));
                }
            }
        }

        match best {
            None => nodes[node] = Node::Leaf(leaf),
            Some((_, feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&s| x.get(s, feature) <= threshold);
                let left = nodes.len();
                nodes.push(Node::Leaf([0, 0]));
                let right = nodes.len();
                nodes.push(Node::Leaf([0, 0]));
                nodes[node] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                // right first so the left subtree is expanded first
                stack.push((right, r));
                stack.push((left, l));
            }
        }
    }
    ClassTree { nodes }
}

/// Per-feature sample orderings, shared by every boosting round.
pub(crate) struct SortedColumns {
    order: Vec<Vec<u32>>,
}

impl SortedColumns {
    pub(crate) fn new(x: &FeatureMatrix) -> Self {
        let n = x.rows();
        let order = (0..x.cols())
            .into_par_iter()
            .map(|f| {
                let mut o: Vec<u32> = (0..n as u32).collect();
                o.sort_by(|&a, &b| x.get(a as usize, f).total_cmp(&x.get(b as usize, f)));
                o
            })
            .collect();
        SortedColumns { order }
    }
}

#[derive(Clone, Copy)]
struct SplitChoice {
    score: f64,
    feature: usize,
    threshold: f64,
}

/// Grows a depth-limited least-squares regression tree on `residuals`,
/// level by level over presorted columns. Leaf values come from `leaf_value`
/// applied to each leaf's sample indices.
pub(crate) fn grow_regression_tree(
    x: &FeatureMatrix,
    sorted: &SortedColumns,
    residuals: &[f64],
    max_depth: usize,
    leaf_value: impl Fn(&[usize]) -> f64,
) -> RegressionTree {
    const NONE: usize = usize::MAX;
    let n = x.rows();
    let mut nodes: Vec<Node<f64>> = vec![Node::Leaf(0.0)];
    let mut node_of: Vec<usize> = vec![0; n];
    let mut frontier: Vec<usize> = vec![0];

    for _depth in 0..max_depth {
        // slot per frontier node: (sum, count)
        let mut slot_of = vec![NONE; nodes.len()];
        let mut totals: Vec<(f64, usize)> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut stats = vec![(0.0f64, 0usize); nodes.len()];
        for s in 0..n {
            if node_of[s] != NONE {
                let st = &mut stats[node_of[s]];
                st.0 += residuals[s];
                st.1 += 1;
            }
        }
        for &nd in &frontier {
            if stats[nd].1 >= 2 {
                slot_of[nd] = active.len();
                active.push(nd);
                totals.push(stats[nd]);
            }
        }
        if active.is_empty() {
            break;
        }

        let per_feature: Vec<Vec<Option<SplitChoice>>> = sorted
            .order
            .par_iter()
            .enumerate()
            .map(|(f, order)| {
                let k = active.len();
                let mut left_sum = vec![0.0; k];
                let mut left_cnt = vec![0usize; k];
                let mut last = vec![f64::NAN; k];
                let mut best: Vec<Option<SplitChoice>> = vec![None; k];
                for &s in order {
                    let s = s as usize;
                    let nd = node_of[s];
                    if nd == NONE || slot_of[nd] == NONE {
                        continue;
                    }
                    let a = slot_of[nd];
                    let v = x.get(s, f);
                    if left_cnt[a] > 0 && v > last[a] {
                        let (tot, cnt) = totals[a];
                        let (ls, lc) = (left_sum[a], left_cnt[a]);
                        let (rs, rc) = (tot - ls, cnt - lc);
                        let score = ls * ls / lc as f64 + rs * rs / rc as f64;
                        if best[a].is_none_or(|b| score > b.score) {
                            best[a] = Some(SplitChoice {
                                score,
                                feature: f,
                                threshold: midpoint(last[a], v),
                            });
                        }
                    }
                    left_sum[a] += residuals[s];
                    left_cnt[a] += 1;
                    last[a] = v;
                }
                best
            })
            .collect();

        let mut next = Vec::new();
        let mut split_of = vec![None; active.len()];
        for (a, &nd) in active.iter().enumerate() {
            let (tot, cnt) = totals[a];
            let parent = tot * tot / cnt as f64;
            let mut best: Option<SplitChoice> = None;
            for choices in &per_feature {
                if let Some(c) = choices[a] {
                    if best.is_none_or(|b| c.score > b.score) {
                        best = Some(c);
                    }
                }
            }
            if let Some(b) = best.filter(|b| b.score > parent) {
                let left = nodes.len();
                nodes.push(Node::Leaf(0.0));
                let right = nodes.len();
                nodes.push(Node::Leaf(0.0));
                nodes[nd] = Node::Split {
                    feature: b.feature,
                    threshold: b.threshold,
                    left,
                    right,
                };
                split_of[a] = Some((b.feature, b.threshold, left, right));
                next.push(left);
                next.push(right);
            }
        }
        if next.is_empty() {
            break;
        }
        for s in 0..n {
            let nd = node_of[s];
            if nd == NONE {
                continue;
            }
            if let Some(a) = slot_of.get(nd).copied().filter(|&a| a != NONE) {
                if let Some((f, thr, l, r)) = split_of[a] {
                    node_of[s] = if x.get(s, f) <= thr { l } else { r };
                }
            }
        }
        frontier = next;
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (s, &nd) in node_of.iter().enumerate() {
        members[nd].push(s);
    }
    for (nd, m) in members.iter().enumerate() {
        if let Node::Leaf(v) = &mut nodes[nd] {
            *v = leaf_value(m);
        }
    }
    RegressionTree { nodes }
}
