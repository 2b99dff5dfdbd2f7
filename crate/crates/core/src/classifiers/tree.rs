//! Histogram-based CART trees shared by the forest and the booster.
//!
//! Features are binned once per fit. A column with at most [`MAX_BINS`]
//! distinct values gets one bin per value, so split search is exact; wider
//! columns fall back to quantile bins. Split gains that tie exactly across
//! features are broken uniformly at random with the caller's generator.

use std::ops::{AddAssign, Sub};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::rng::SeededRng;

pub const MAX_BINS: usize = 256;

const TIE_TOLERANCE: f64 = 1e-12;

/// Column-major bin codes plus the cut points between adjacent bins.
pub(crate) struct BinnedMatrix {
    n_rows: usize,
    codes: Vec<u16>,
    cuts: Vec<Vec<f64>>,
}

impl BinnedMatrix {
    pub(crate) fn new(d: &Dataset) -> Self {
        let n = d.n_rows();
        let p = d.n_features();
        let mut codes = vec![0u16; n * p];
        let mut cuts = Vec::with_capacity(p);
        for j in 0..p {
            let mut distinct: Vec<f64> = d.column(j).collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            // upper edge of each bin, as an index into `distinct`
            let uppers: Vec<usize> = if distinct.len() <= MAX_BINS {
                (0..distinct.len()).collect()
            } else {
                let m = distinct.len();
                let mut u: Vec<usize> = (1..=MAX_BINS).map(|b| b * m / MAX_BINS - 1).collect();
                u.dedup();
                u
            };
            let col_cuts: Vec<f64> = uppers
                .windows(2)
                .map(|w| 0.5 * (distinct[w[0]] + distinct[w[0] + 1]))
                .collect();
            for (i, v) in d.column(j).enumerate() {
                codes[j * n + i] = col_cuts.partition_point(|&c| c < v) as u16;
            }
            cuts.push(col_cuts);
        }
        Self { n_rows: n, codes, cuts }
    }

    fn n_features(&self) -> usize {
        self.cuts.len()
    }

    fn n_bins(&self, j: usize) -> usize {
        self.cuts[j].len() + 1
    }

    fn code(&self, i: usize, j: usize) -> usize {
        self.codes[j * self.n_rows + i] as usize
    }
}

/// Sufficient statistic of a node; `gain = score(left) + score(right) - score(parent)`.
pub(crate) trait NodeStat: Copy + Default + AddAssign + Sub<Output = Self> {
    fn count(&self) -> f64;
    fn score(&self) -> f64;
    fn leaf_value(&self) -> f64;
    fn is_pure(&self) -> bool {
        false
    }
}

/// Class counts; score is the negated weighted Gini impurity.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct GiniStat {
    n: f64,
    pos: f64,
}

impl GiniStat {
    pub(crate) fn of(label: u8) -> Self {
        Self {
            n: 1.0,
            pos: label as f64,
        }
    }
}

impl AddAssign for GiniStat {
    fn add_assign(&mut self, o: Self) {
        self.n += o.n;
        self.pos += o.pos;
    }
}

impl Sub for GiniStat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            n: self.n - o.n,
            pos: self.pos - o.pos,
        }
    }
}

impl NodeStat for GiniStat {
    fn count(&self) -> f64 {
        self.n
    }

    // -n * gini = (pos^2 + neg^2) / n - n
    fn score(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        let neg = self.n - self.pos;
        (self.pos * self.pos + neg * neg) / self.n - self.n
    }

    fn leaf_value(&self) -> f64 {
        self.pos / self.n
    }

    fn is_pure(&self) -> bool {
        self.pos == 0.0 || self.pos == self.n
    }
}

/// Gradient/hessian sums for a log-loss boosting round. Score is the
/// squared-error criterion on the gradients; leaves take a Newton step.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct GradStat {
    n: f64,
    g: f64,
    h: f64,
}

impl GradStat {
    pub(crate) fn new(g: f64, h: f64) -> Self {
        Self { n: 1.0, g, h }
    }
}

impl AddAssign for GradStat {
    fn add_assign(&mut self, o: Self) {
        self.n += o.n;
        self.g += o.g;
        self.h += o.h;
    }
}

impl Sub for GradStat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            n: self.n - o.n,
            g: self.g - o.g,
            h: self.h - o.h,
        }
    }
}

impl NodeStat for GradStat {
    fn count(&self) -> f64 {
        self.n
    }

    fn score(&self) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            self.g * self.g / self.n
        }
    }

    fn leaf_value(&self) -> f64 {
        if self.h.abs() < 1e-150 {
            0.0
        } else {
            self.g / self.h
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

pub(crate) struct TreeParams {
    pub max_depth: usize,
    /// Candidate features per split; `None` means all.
    pub max_features: Option<usize>,
}

/// Grows one tree over `rows` (duplicates allowed) and adds each split's gain
/// to `gains[feature]`.
pub(crate) fn grow<S: NodeStat>(
    binned: &BinnedMatrix,
    stats: &[S],
    rows: &mut [usize],
    params: &TreeParams,
    rng: &mut SeededRng,
    gains: &mut [f64],
) -> Tree {
    let mut builder = Builder {
        binned,
        stats,
        params,
        nodes: Vec::new(),
        hist: Vec::with_capacity(MAX_BINS),
    };
    builder.node(rows, 0, rng, gains);
    Tree { nodes: builder.nodes }
}

struct Builder<'a, S> {
    binned: &'a BinnedMatrix,
    stats: &'a [S],
    params: &'a TreeParams,
    nodes: Vec<Node>,
    hist: Vec<S>,
}

struct Candidate {
    feature: usize,
    bin: usize,
    gain: f64,
}

impl<S: NodeStat> Builder<'_, S> {
    fn node(&mut self, rows: &mut [usize], depth: usize, rng: &mut SeededRng, gains: &mut [f64]) -> usize {
        let mut total = S::default();
        for &i in rows.iter() {
            total += self.stats[i];
        }
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: total.leaf_value(),
        });
        if depth >= self.params.max_depth || rows.len() < 2 || total.is_pure() {
            return at;
        }
        let Some(best) = self.best_split(rows, total, rng) else {
            return at;
        };
        gains[best.feature] += best.gain;

        let f = best.feature;
        let mut mid = 0;
        for k in 0..rows.len() {
            if self.binned.code(rows[k], f) <= best.bin {
                rows.swap(mid, k);
                mid += 1;
            }
        }
        let (l_rows, r_rows) = rows.split_at_mut(mid);
        let left = self.node(l_rows, depth + 1, rng, gains);
        let right = self.node(r_rows, depth + 1, rng, gains);
        self.nodes[at] = Node::Split {
            feature: f,
            threshold: self.binned.cuts[f][best.bin],
            left,
            right,
        };
        at
    }

    fn best_split(&mut self, rows: &[usize], total: S, rng: &mut SeededRng) -> Option<Candidate> {
        let p = self.binned.n_features();
        let candidates: Vec<usize> = match self.params.max_features {
            Some(m) if m < p => {
                let mut c = index::sample(rng, p, m).into_vec();
                c.sort_unstable();
                c
            }
            _ => (0..p).collect(),
        };
        let parent = total.score();
        let mut best: Option<Candidate> = None;
        let mut ties = 0u32;
        for f in candidates {
            let bins = self.binned.n_bins(f);
            if bins < 2 {
                continue;
            }
            self.hist.clear();
            self.hist.resize(bins, S::default());
            for &i in rows {
                self.hist[self.binned.code(i, f)] += self.stats[i];
            }
            let mut left = S::default();
            let mut feature_best: Option<(usize, f64)> = None;
            for b in 0..bins - 1 {
                left += self.hist[b];
                if left.count() == 0.0 || self.hist[b].count() == 0.0 {
                    continue;
                }
                let right = total - left;
                if right.count() == 0.0 {
                    break;
                }
                let gain = left.score() + right.score() - parent;
                if feature_best.is_none_or(|(_, g)| gain > g) {
                    feature_best = Some((b, gain));
                }
            }
            let Some((bin, gain)) = feature_best else {
                continue;
            };
            let scale = gain.abs().max(1.0);
            match &best {
                Some(cur) if gain < cur.gain - TIE_TOLERANCE * scale => {}
                Some(cur) if gain <= cur.gain + TIE_TOLERANCE * scale => {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = Some(Candidate { feature: f, bin, gain });
                    }
                }
                _ => {
                    ties = 1;
                    best = Some(Candidate { feature: f, bin, gain });
                }
            }
        }
        best.filter(|c| c.gain > TIE_TOLERANCE * parent.abs().max(1.0))
    }
}
