//! Classical ordered tree edit distance (insert, delete, relabel) using the
//! Zhang–Shasha keyroot dynamic program, plus an exhaustive mapping search
//! used as a test oracle on small trees.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::opt::{NodeId, OperatorTree, OptNode};

/// Per-operation costs. Relabeling a node to its own label is always free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub insert: f64,
    pub delete: f64,
    pub relabel: f64,
}

pub type UnitCostModel = CostModel;

impl Default for CostModel {
    fn default() -> Self {
        CostModel::unit()
    }
}

impl CostModel {
    pub const fn unit() -> Self {
        CostModel {
            insert: 1.0,
            delete: 1.0,
            relabel: 1.0,
        }
    }

    pub fn relabel_cost(&self, from: &str, to: &str) -> f64 {
        if from == to {
            0.0
        } else {
            self.relabel
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.insert, self.delete, self.relabel]
            .iter()
            .all(|c| c.is_finite() && *c >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EditKind {
    /// Insert a node carrying `label`; `position` is its id in the target tree.
    Insert {
        label: String,
        position: NodeId,
    },
    Delete {
        node: NodeId,
    },
    Relabel {
        node: NodeId,
        new_label: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditOp {
    pub kind: EditKind,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TedError {
    #[error("tree with {size} nodes exceeds the brute-force limit of {limit}")]
    SizeLimit { size: usize, limit: usize },
}

/// Postorder view of a tree.
pub(crate) struct Flat<'a> {
    pub labels: Vec<&'a str>,
    /// Leftmost leaf descendant of each node, as a postorder index.
    pub lld: Vec<usize>,
    pub keyroots: Vec<usize>,
    pub ids: Vec<NodeId>,
}

impl<'a> Flat<'a> {
    pub fn new(tree: &'a OperatorTree) -> Self {
        fn go<'a>(n: &'a OptNode, flat: &mut Flat<'a>) -> usize {
            let mut leftmost = None;
            for c in &n.children {
                let first = go(c, flat);
                leftmost.get_or_insert(first);
            }
            let idx = flat.labels.len();
            flat.labels.push(&n.label);
            flat.ids.push(n.id);
            let lld = leftmost.map_or(idx, |c| flat.lld[c]);
            flat.lld.push(lld);
            idx
        }
        let mut flat = Flat {
            labels: Vec::with_capacity(tree.size()),
            lld: Vec::with_capacity(tree.size()),
            keyroots: Vec::new(),
            ids: Vec::with_capacity(tree.size()),
        };
        go(tree.root(), &mut flat);

        // A keyroot is the highest node for its leftmost leaf.
        let n = flat.labels.len();
        let mut seen = vec![false; n];
        for i in (0..n).rev() {
            if !seen[flat.lld[i]] {
                seen[flat.lld[i]] = true;
                flat.keyroots.push(i);
            }
        }
        flat.keyroots.reverse();
        flat
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

struct ZhangShasha<'a, 'c> {
    a: &'a Flat<'a>,
    b: &'a Flat<'a>,
    cost: &'c CostModel,
    tree_dist: Vec<Vec<f64>>,
}

impl<'a, 'c> ZhangShasha<'a, 'c> {
    fn new(a: &'a Flat<'a>, b: &'a Flat<'a>, cost: &'c CostModel) -> Self {
        let mut zs = ZhangShasha {
            a,
            b,
            cost,
            tree_dist: vec![vec![0.0; b.len()]; a.len()],
        };
        for &i in &a.keyroots {
            for &j in &b.keyroots {
                zs.forest_dist(i, j);
            }
        }
        zs
    }

    fn distance(&self) -> f64 {
        self.tree_dist[self.a.len() - 1][self.b.len() - 1]
    }

    /// Forest distances between the postorder ranges ending at `i` and `j`.
    /// Row/column 0 stand for the empty forest.
    fn forest_dist(&mut self, i: usize, j: usize) -> Vec<Vec<f64>> {
        let (a, b, cost) = (self.a, self.b, self.cost);
        let (li, lj) = (a.lld[i], b.lld[j]);
        let rows = i - li + 2;
        let cols = j - lj + 2;
        let mut fd = vec![vec![0.0; cols]; rows];
        for x in 1..rows {
            fd[x][0] = fd[x - 1][0] + cost.delete;
        }
        for y in 1..cols {
            fd[0][y] = fd[0][y - 1] + cost.insert;
        }
        for x in 1..rows {
            let di = li + x - 1;
            for y in 1..cols {
                let dj = lj + y - 1;
                let del = fd[x - 1][y] + cost.delete;
                let ins = fd[x][y - 1] + cost.insert;
                if a.lld[di] == li && b.lld[dj] == lj {
                    let sub = fd[x - 1][y - 1] + cost.relabel_cost(a.labels[di], b.labels[dj]);
                    fd[x][y] = del.min(ins).min(sub);
                    self.tree_dist[di][dj] = fd[x][y];
                } else {
                    let sub = fd[a.lld[di] - li][b.lld[dj] - lj] + self.tree_dist[di][dj];
                    fd[x][y] = del.min(ins).min(sub);
                }
            }
        }
        fd
    }

    /// Recovers one optimal edit script.
    fn script(&mut self) -> Vec<EditOp> {
        const EPS: f64 = 1e-9;
        let (a, b) = (self.a, self.b);
        let cost = *self.cost;
        let mut ops = Vec::new();
        let mut pending = vec![(a.len() - 1, b.len() - 1)];
        while let Some((i, j)) = pending.pop() {
            let fd = self.forest_dist(i, j);
            let (li, lj) = (a.lld[i], b.lld[j]);
            let (mut x, mut y) = (i - li + 1, j - lj + 1);
            while x > 0 || y > 0 {
                if x > 0 && (fd[x][y] - (fd[x - 1][y] + cost.delete)).abs() < EPS {
                    let di = li + x - 1;
                    ops.push(EditOp {
                        kind: EditKind::Delete { node: a.ids[di] },
                        cost: cost.delete,
                    });
                    x -= 1;
                } else if y > 0 && (fd[x][y] - (fd[x][y - 1] + cost.insert)).abs() < EPS {
                    let dj = lj + y - 1;
                    ops.push(EditOp {
                        kind: EditKind::Insert {
                            label: b.labels[dj].to_string(),
                            position: b.ids[dj],
                        },
                        cost: cost.insert,
                    });
                    y -= 1;
                } else {
                    let (di, dj) = (li + x - 1, lj + y - 1);
                    if a.lld[di] == li && b.lld[dj] == lj {
                        if a.labels[di] != b.labels[dj] {
                            ops.push(EditOp {
                                kind: EditKind::Relabel {
                                    node: a.ids[di],
                                    new_label: b.labels[dj].to_string(),
                                },
                                cost: cost.relabel,
                            });
                        }
                        x -= 1;
                        y -= 1;
                    } else {
                        pending.push((di, dj));
                        x = a.lld[di] - li;
                        y = b.lld[dj] - lj;
                    }
                }
            }
        }
        ops
    }
}

/// Minimal total cost of insertions, deletions and relabelings turning
/// `t1` into `t2`.
pub fn ted_distance(t1: &OperatorTree, t2: &OperatorTree, cost: &CostModel) -> f64 {
    let (a, b) = (Flat::new(t1), Flat::new(t2));
    ZhangShasha::new(&a, &b, cost).distance()
}

/// An optimal edit script; its op costs sum to [`ted_distance`].
pub fn ted_edit_script(t1: &OperatorTree, t2: &OperatorTree, cost: &CostModel) -> Vec<EditOp> {
    let (a, b) = (Flat::new(t1), Flat::new(t2));
    ZhangShasha::new(&a, &b, cost).script()
}

pub const BRUTEFORCE_LIMIT: usize = 6;

/// Exact distance by enumerating every ancestor- and order-preserving
/// partial mapping. Only for trees of at most [`BRUTEFORCE_LIMIT`] nodes.
pub fn ted_bruteforce(
    t1: &OperatorTree,
    t2: &OperatorTree,
    cost: &CostModel,
) -> Result<f64, TedError> {
    for t in [t1, t2] {
        if t.size() > BRUTEFORCE_LIMIT {
            return Err(TedError::SizeLimit {
                size: t.size(),
                limit: BRUTEFORCE_LIMIT,
            });
        }
    }
    let a = MappingView::new(t1);
    let b = MappingView::new(t2);
    let mut best = f64::INFINITY;
    let mut pairs = Vec::new();
    let mut used = vec![false; b.labels.len()];
    search(&a, &b, cost, 0, &mut pairs, &mut used, &mut best);
    Ok(best)
}

struct MappingView<'a> {
    labels: Vec<&'a str>,
    post: Vec<usize>,
    /// `anc[u][v]`: u is a proper ancestor of v (preorder indices).
    anc: Vec<Vec<bool>>,
}

impl<'a> MappingView<'a> {
    fn new(tree: &'a OperatorTree) -> Self {
        let n = tree.size();
        let mut view = MappingView {
            labels: vec![""; n],
            post: vec![0; n],
            anc: vec![vec![false; n]; n],
        };
        fn go<'a>(
            node: &'a OptNode,
            path: &mut Vec<usize>,
            counter: &mut usize,
            v: &mut MappingView<'a>,
        ) {
            let id = node.id.0;
            v.labels[id] = &node.label;
            for &p in path.iter() {
                v.anc[p][id] = true;
            }
            path.push(id);
            for c in &node.children {
                go(c, path, counter, v);
            }
            path.pop();
            v.post[id] = *counter;
            *counter += 1;
        }
        go(tree.root(), &mut Vec::new(), &mut 0, &mut view);
        view
    }
}

fn search(
    a: &MappingView<'_>,
    b: &MappingView<'_>,
    cost: &CostModel,
    i: usize,
    pairs: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    best: &mut f64,
) {
    if i == a.labels.len() {
        let mapped: f64 = pairs
            .iter()
            .map(|&(x, y)| cost.relabel_cost(a.labels[x], b.labels[y]))
            .sum();
        let deleted = (a.labels.len() - pairs.len()) as f64 * cost.delete;
        let inserted = (b.labels.len() - pairs.len()) as f64 * cost.insert;
        *best = best.min(mapped + deleted + inserted);
        return;
    }
    search(a, b, cost, i + 1, pairs, used, best);
    for j in 0..b.labels.len() {
        if used[j] {
            continue;
        }
        let consistent = pairs.iter().all(|&(pi, pj)| {
            a.anc[pi][i] == b.anc[pj][j]
                && a.anc[i][pi] == b.anc[j][pj]
                && (a.post[pi] < a.post[i]) == (b.post[pj] < b.post[j])
        });
        if consistent {
            used[j] = true;
            pairs.push((i, j));
            search(a, b, cost, i + 1, pairs, used, best);
            pairs.pop();
            used[j] = false;
        }
    }
}
