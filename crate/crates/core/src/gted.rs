//! Generalized tree edit distance.
//!
//! A [`TransformationSet`] lists the generalized transformations that may be
//! used to turn one operator tree into another, each with a cost, and
//! optionally enables the classical insert/delete/relabel operations as a
//! fallback. [`gted_distance`] returns the cheapest conversion it can find
//! under that set, or `+∞` when none exists.
//!
//! The distance is computed as the minimum over three routes:
//!
//! 1. a single member transformation that relates the two trees directly;
//! 2. edit distance on the trees as given (when the fallback is enabled);
//! 3. for each α-conversion member, edit distance between the α-canonical
//!    forms of the two trees (zero when the forms coincide).
//!
//! Because every route available to a smaller set is also available to a
//! larger one, adding a transformation never increases the distance.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::opt::{NodeId, NodeKind, OperatorTree, OptNode, PLACEHOLDER};
use crate::ted::{ted_distance, CostModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GtedError {
    #[error("transformations `{first}` and `{second}` both match {witness}")]
    NotDisjoint {
        first: String,
        second: String,
        witness: String,
    },
    #[error("transformation `{0}` has a negative or non-finite cost")]
    InvalidCost(String),
    #[error("threshold {0} is outside [0, 1]")]
    InvalidTheta(f64),
    #[error("tree with {size} nodes exceeds the search limit of {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("node {0} is not a variable binding site")]
    NotABindingSite(NodeId),
    #[error("renaming to `{0}` would capture an existing name")]
    Capture(String),
}

// ---------------------------------------------------------------------------
// Scope analysis and α-canonical forms

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Uniform renaming of declared names, ignoring scope and shadowing.
    RenameOnly,
    /// Scope-aware: bound variables compared by binding position.
    Scoped,
}

impl FromStr for AlphaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rename-only" => Ok(AlphaMode::RenameOnly),
            "scoped" => Ok(AlphaMode::Scoped),
            other => Err(format!("unknown alpha mode `{other}`")),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaMode::RenameOnly => "rename-only",
            AlphaMode::Scoped => "scoped",
        })
    }
}

/// Result of resolving variable occurrences against their binders.
#[derive(Debug, Default)]
pub struct Scopes {
    /// Leaves that declare a variable, in preorder.
    pub sites: Vec<NodeId>,
    /// Every other leaf, with the site it refers to and the number of
    /// binders opened between that site and the occurrence.
    pub occurrences: Vec<(NodeId, Option<(NodeId, usize)>)>,
}

pub fn resolve_scopes(tree: &OperatorTree) -> Scopes {
    let mut scopes = Scopes::default();
    let mut env: Vec<(&str, NodeId)> = Vec::new();
    visit(tree.root(), &mut env, &mut scopes);
    scopes
}

fn visit<'a>(node: &'a OptNode, env: &mut Vec<(&'a str, NodeId)>, out: &mut Scopes) {
    // Each group: declare its names after its own type has been visited.
    let bind_group = |names: &'a [OptNode],
                      ty: Option<&'a OptNode>,
                      env: &mut Vec<(&'a str, NodeId)>,
                      out: &mut Scopes| {
        for n in names {
            out.sites.push(n.id);
        }
        if let Some(ty) = ty {
            visit(ty, env, out);
        }
        env.extend(names.iter().map(|n| (n.label.as_str(), n.id)));
    };

    match &node.kind {
        // Kinds survive edits that change arity; such nodes are walked as
        // plain operators.
        NodeKind::Statement => {
            let depth = env.len();
            let Some((goal, binders)) = node.children.split_last() else {
                return;
            };
            for b in binders {
                match &b.kind {
                    NodeKind::Binder(shape) if shape.arity() == b.children.len() => {
                        let ty = shape.typed.then(|| &b.children[shape.names]);
                        bind_group(&b.children[..shape.names], ty, env, out);
                    }
                    _ => visit(b, env, out),
                }
            }
            visit(goal, env, out);
            env.truncate(depth);
        }
        NodeKind::Binding { groups, .. }
            if groups.iter().map(|g| g.arity()).sum::<usize>() + 1 == node.children.len() =>
        {
            let depth = env.len();
            let mut at = 0;
            for g in groups {
                let ty = g.typed.then(|| &node.children[at + g.names]);
                bind_group(&node.children[at..at + g.names], ty, env, out);
                at += g.arity();
            }
            visit(&node.children[at], env, out);
            env.truncate(depth);
        }
        _ if node.is_leaf() => {
            let target = env
                .iter()
                .rposition(|(name, _)| *name == node.label)
                .map(|pos| (env[pos].1, env.len() - 1 - pos));
            out.occurrences.push((node.id, target));
        }
        _ => {
            for c in &node.children {
                visit(c, env, out);
            }
        }
    }
}

fn relabel(tree: &OperatorTree, labels: &HashMap<NodeId, String>) -> OperatorTree {
    fn go(node: &OptNode, labels: &HashMap<NodeId, String>) -> OptNode {
        OptNode {
            id: node.id,
            label: labels
                .get(&node.id)
                .cloned()
                .unwrap_or_else(|| node.label.clone()),
            kind: node.kind.clone(),
            children: node.children.iter().map(|c| go(c, labels)).collect(),
        }
    }
    OperatorTree::new(go(tree.root(), labels))
}

/// α-canonical form: two trees are related by α-conversion in the given
/// mode iff their canonical forms are structurally equal.
///
/// Scoped mode labels each binding site `#` and each bound occurrence
/// `#k`, with k its de Bruijn index; free names are untouched. Rename-only
/// mode numbers declared names by first declaration and substitutes them
/// everywhere they appear.
pub fn canonicalize(tree: &OperatorTree, mode: AlphaMode) -> OperatorTree {
    let scopes = resolve_scopes(tree);
    let mut labels = HashMap::new();
    match mode {
        AlphaMode::Scoped => {
            for &site in &scopes.sites {
                labels.insert(site, "#".to_string());
            }
            for (id, target) in &scopes.occurrences {
                if let Some((_, index)) = target {
                    labels.insert(*id, format!("#{index}"));
                }
            }
        }
        AlphaMode::RenameOnly => {
            let mut numbering: HashMap<&str, String> = HashMap::new();
            for &site in &scopes.sites {
                let name = tree.node(site).expect("site in tree").label.as_str();
                let next = numbering.len();
                numbering.entry(name).or_insert_with(|| format!("@{next}"));
            }
            for node in tree.preorder() {
                if node.is_leaf() {
                    if let Some(canon) = numbering.get(node.label.as_str()) {
                        labels.insert(node.id, canon.clone());
                    }
                }
            }
        }
    }
    relabel(tree, &labels)
}

pub fn alpha_equivalent(t1: &OperatorTree, t2: &OperatorTree, mode: AlphaMode) -> bool {
    canonicalize(t1, mode) == canonicalize(t2, mode)
}

/// Scope-respecting rename of the variable declared at `site`: the site and
/// exactly the occurrences bound to it get `new_name`. `new_name` must not
/// already label any leaf, which rules out capture.
pub fn rename_bound_variable(
    tree: &OperatorTree,
    site: NodeId,
    new_name: &str,
) -> Result<OperatorTree, GtedError> {
    let scopes = resolve_scopes(tree);
    if !scopes.sites.contains(&site) {
        return Err(GtedError::NotABindingSite(site));
    }
    if tree
        .preorder()
        .iter()
        .any(|n| n.is_leaf() && n.label == new_name)
    {
        return Err(GtedError::Capture(new_name.to_string()));
    }
    let mut labels = HashMap::new();
    labels.insert(site, new_name.to_string());
    for (id, target) in scopes.occurrences {
        if matches!(target, Some((s, _)) if s == site) {
            labels.insert(id, new_name.to_string());
        }
    }
    Ok(relabel(tree, &labels))
}

// ---------------------------------------------------------------------------
// Transformations

/// A pair of trees: the special transformation taking `before` to `after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialTransformation {
    pub before: OperatorTree,
    pub after: OperatorTree,
}

impl SpecialTransformation {
    pub fn new(before: impl Into<OperatorTree>, after: impl Into<OperatorTree>) -> Self {
        SpecialTransformation {
            before: before.into(),
            after: after.into(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.before == self.after
    }
}

pub type MatchFn = Arc<dyn Fn(&SpecialTransformation) -> bool + Send + Sync>;

/// Decides membership of a special transformation in a generalized one.
#[derive(Clone)]
pub enum Matcher {
    Alpha(AlphaMode),
    /// Exactly one node label differs, shapes equal.
    Relabel,
    /// `after` is `before` plus one node.
    Insert,
    /// `after` is `before` minus one node.
    Delete,
    Custom(MatchFn),
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matcher::Alpha(mode) => write!(f, "Alpha({mode})"),
            Matcher::Relabel => f.write_str("Relabel"),
            Matcher::Insert => f.write_str("Insert"),
            Matcher::Delete => f.write_str("Delete"),
            Matcher::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn differs_by_one_label(a: &OptNode, b: &OptNode) -> bool {
    fn count(a: &OptNode, b: &OptNode, diffs: &mut usize) -> bool {
        if a.children.len() != b.children.len() {
            return false;
        }
        if a.label != b.label {
            *diffs += 1;
        }
        *diffs <= 1
            && a.children
                .iter()
                .zip(&b.children)
                .all(|(x, y)| count(x, y, diffs))
    }
    let mut diffs = 0;
    count(a, b, &mut diffs) && diffs == 1
}

fn one_node_removed(bigger: &OperatorTree, smaller: &OperatorTree) -> bool {
    bigger.size() == smaller.size() + 1
        && (0..bigger.size()).any(|i| bigger.delete_node(NodeId(i)).is_ok_and(|t| &t == smaller))
}

impl Matcher {
    pub fn matches(&self, st: &SpecialTransformation) -> bool {
        match self {
            Matcher::Alpha(mode) => alpha_equivalent(&st.before, &st.after, *mode),
            Matcher::Relabel => differs_by_one_label(st.before.root(), st.after.root()),
            Matcher::Insert => one_node_removed(&st.after, &st.before),
            Matcher::Delete => one_node_removed(&st.before, &st.after),
            Matcher::Custom(f) => f(st),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneralizedTransformation {
    pub name: String,
    pub matcher: Matcher,
    pub cost: f64,
}

impl GeneralizedTransformation {
    pub fn new(name: impl Into<String>, matcher: Matcher, cost: f64) -> Self {
        GeneralizedTransformation {
            name: name.into(),
            matcher,
            cost,
        }
    }

    pub fn matches(&self, st: &SpecialTransformation) -> bool {
        self.matcher.matches(st)
    }
}

/// Zero-cost α-conversion.
pub fn alpha_transformation(mode: AlphaMode) -> GeneralizedTransformation {
    GeneralizedTransformation::new("alpha-conversion", Matcher::Alpha(mode), 0.0)
}

#[derive(Debug, Clone)]
pub struct TransformationSet {
    pub transformations: Vec<GeneralizedTransformation>,
    /// Enables unit insert/delete/relabel (priced by `costs`) as fallback.
    pub include_dumb_ops: bool,
    pub costs: CostModel,
}

impl Default for TransformationSet {
    fn default() -> Self {
        TransformationSet::dumb_only(CostModel::unit())
    }
}

impl TransformationSet {
    pub fn dumb_only(costs: CostModel) -> Self {
        TransformationSet {
            transformations: Vec::new(),
            include_dumb_ops: true,
            costs,
        }
    }

    pub fn with_alpha(mode: AlphaMode, include_dumb_ops: bool, costs: CostModel) -> Self {
        TransformationSet {
            transformations: vec![alpha_transformation(mode)],
            include_dumb_ops,
            costs,
        }
    }

    pub fn push(mut self, t: GeneralizedTransformation) -> Self {
        self.transformations.push(t);
        self
    }

    /// Rejects negative costs and any two members that both match a probe
    /// transformation built from `corpus`.
    pub fn validate(&self, corpus: &[OperatorTree]) -> Result<(), GtedError> {
        if !self.costs.is_valid() {
            return Err(GtedError::InvalidCost("dumb-ops".into()));
        }
        for t in &self.transformations {
            if !(t.cost.is_finite() && t.cost >= 0.0) {
                return Err(GtedError::InvalidCost(t.name.clone()));
            }
        }
        if self.transformations.len() < 2 {
            return Ok(());
        }
        for probe in probe_transformations(corpus) {
            let hits: Vec<&GeneralizedTransformation> = self
                .transformations
                .iter()
                .filter(|t| t.matches(&probe))
                .collect();
            if let [first, second, ..] = hits.as_slice() {
                return Err(GtedError::NotDisjoint {
                    first: first.name.clone(),
                    second: second.name.clone(),
                    witness: format!("{} ⟶ {}", probe.before, probe.after),
                });
            }
        }
        Ok(())
    }
}

/// Non-identity probes: every ordered corpus pair, plus for each tree its
/// one-step neighbours (bound-variable renamings, single-leaf relabels and
/// single-node deletions).
pub fn probe_transformations(corpus: &[OperatorTree]) -> Vec<SpecialTransformation> {
    const FRESH: &str = "⋆fresh";
    let mut probes = Vec::new();
    for (i, a) in corpus.iter().enumerate() {
        for (j, b) in corpus.iter().enumerate() {
            if i != j && a != b {
                probes.push(SpecialTransformation::new(a.clone(), b.clone()));
            }
        }
        for site in resolve_scopes(a).sites {
            if let Ok(renamed) = rename_bound_variable(a, site, FRESH) {
                probes.push(SpecialTransformation::new(a.clone(), renamed));
            }
        }
        for node in a.preorder() {
            if node.is_leaf() {
                let relabeled = a
                    .replace_subtree(node.id, OptNode::leaf(FRESH))
                    .expect("node from this tree");
                probes.push(SpecialTransformation::new(a.clone(), relabeled));
            }
            if let Ok(smaller) = a.delete_node(node.id) {
                probes.push(SpecialTransformation::new(a.clone(), smaller));
            }
        }
    }
    probes
}

// ---------------------------------------------------------------------------
// Distance, similarity, decision

pub fn gted_distance(t1: &OperatorTree, t2: &OperatorTree, set: &TransformationSet) -> f64 {
    if t1 == t2 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    if set.include_dumb_ops {
        best = ted_distance(t1, t2, &set.costs);
    }
    let direct = SpecialTransformation::new(t1.clone(), t2.clone());
    for t in &set.transformations {
        match t.matcher {
            Matcher::Alpha(mode) => {
                let (c1, c2) = (canonicalize(t1, mode), canonicalize(t2, mode));
                if c1 == c2 {
                    best = best.min(t.cost);
                } else if set.include_dumb_ops {
                    best = best.min(t.cost + ted_distance(&c1, &c2, &set.costs));
                }
            }
            _ => {
                if t.matches(&direct) {
                    best = best.min(t.cost);
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionConfig {
    pub theta: f64,
    pub clamp_negative: bool,
}

pub const DEFAULT_THETA: f64 = 0.6;

impl Default for DecisionConfig {
    fn default() -> Self {
        DecisionConfig {
            theta: DEFAULT_THETA,
            clamp_negative: true,
        }
    }
}

impl DecisionConfig {
    pub fn new(theta: f64) -> Result<Self, GtedError> {
        let cfg = DecisionConfig {
            theta,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GtedError> {
        if (0.0..=1.0).contains(&self.theta) {
            Ok(())
        } else {
            Err(GtedError::InvalidTheta(self.theta))
        }
    }
}

/// `1 - d / max(|T1|, |T2|)`; `None` when the distance is infinite.
pub fn similarity_from_distance(
    distance: f64,
    size1: usize,
    size2: usize,
    clamp_negative: bool,
) -> Option<f64> {
    if !distance.is_finite() {
        return None;
    }
    let s = 1.0 - distance / size1.max(size2) as f64;
    Some(if clamp_negative { s.max(0.0) } else { s })
}

pub fn similarity(
    t1: &OperatorTree,
    t2: &OperatorTree,
    set: &TransformationSet,
    clamp_negative: bool,
) -> Option<f64> {
    score(t1, t2, set, clamp_negative).similarity
}

/// Strict threshold test; an undefined similarity is always negative.
pub fn passes_threshold(similarity: Option<f64>, theta: f64) -> bool {
    similarity.is_some_and(|s| s > theta)
}

pub fn decide(
    t1: &OperatorTree,
    t2: &OperatorTree,
    set: &TransformationSet,
    config: &DecisionConfig,
) -> bool {
    passes_threshold(similarity(t1, t2, set, config.clamp_negative), config.theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub distance: f64,
    pub size1: usize,
    pub size2: usize,
    pub similarity: Option<f64>,
}

pub fn score(
    t1: &OperatorTree,
    t2: &OperatorTree,
    set: &TransformationSet,
    clamp_negative: bool,
) -> Score {
    let distance = gted_distance(t1, t2, set);
    Score {
        distance,
        size1: t1.size(),
        size2: t2.size(),
        similarity: similarity_from_distance(distance, t1.size(), t2.size(), clamp_negative),
    }
}

// ---------------------------------------------------------------------------
// Depiction relations

/// `f ≼ g`: `f.before`/`f.after` occur as subtrees of `g.before`/`g.after`
/// and the two quotient trees coincide.
pub fn is_local_depiction(f: &SpecialTransformation, g: &SpecialTransformation) -> bool {
    let lefts = g.before.occurrences(f.before.root());
    if lefts.is_empty() {
        return false;
    }
    let rights = g.after.occurrences(f.after.root());
    let right_quotients: Vec<OperatorTree> = rights
        .iter()
        .map(|&q| g.after.quotient(q).expect("occurrence in tree"))
        .collect();
    lefts.iter().any(|&p| {
        let left = g.before.quotient(p).expect("occurrence in tree");
        right_quotients.contains(&left)
    })
}

pub const COLOCAL_LIMIT: usize = 256;

/// Co-local depiction: quotienting `g`'s two trees by one shared list of
/// disjoint common subtrees yields `f`'s two trees.
///
/// Each `_` leaf of `f.before` pins the subtree of `g.before` it aligns with,
/// so the quotient list of each side is determined by a single simultaneous
/// walk; the relation holds when the two lists agree as multisets. A `_`
/// leaf already present in `g` may be quotiented or not, which never
/// changes the outcome.
pub fn is_colocal_depiction(
    f: &SpecialTransformation,
    g: &SpecialTransformation,
    limit: usize,
) -> Result<bool, GtedError> {
    for t in [&g.before, &g.after] {
        if t.size() > limit {
            return Err(GtedError::SizeLimit {
                size: t.size(),
                limit,
            });
        }
    }
    fn align<'a>(g: &'a OptNode, f: &OptNode, removed: &mut Vec<&'a OptNode>) -> bool {
        if f.is_leaf() && f.label == PLACEHOLDER {
            if !(g.is_leaf() && g.label == PLACEHOLDER) {
                removed.push(g);
            }
            return true;
        }
        g.label == f.label
            && g.children.len() == f.children.len()
            && g.children
                .iter()
                .zip(&f.children)
                .all(|(x, y)| align(x, y, removed))
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    if !align(g.before.root(), f.before.root(), &mut left)
        || !align(g.after.root(), f.after.root(), &mut right)
        || left.len() != right.len()
    {
        return Ok(false);
    }
    let mut unmatched: Vec<&OptNode> = right;
    for t in left {
        match unmatched.iter().position(|u| *u == t) {
            Some(pos) => {
                unmatched.swap_remove(pos);
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}
