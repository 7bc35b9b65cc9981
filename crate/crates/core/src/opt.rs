//! Operator trees.
//!
//! Internal nodes carry an operator template whose parameter slots are
//! written `_` (`_ + _`, `∀ _ : _, _`, `_ _` for application); leaves carry
//! variable, constant and numeral names. Grouping parentheses never become
//! nodes. Type ascription keeps its mandatory brackets in the template,
//! `(_ : _)`, since they are part of that operator's syntax.
//!
//! The root of a statement tree is labeled with the statement name and has
//! one child per binder followed by the goal. It is the only internal node
//! whose label has no slots.

use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::parser::grammar::{infix, Assoc, BP_APP, BP_ARROW, BP_NEG, BP_NOT, BP_POW, BP_REL};
use crate::parser::{Binder, Bracket, Expr, ExprKind, QuantifierKind};
use crate::standardize::StandardizedStmt;

/// Label of the leaf left behind by [`OperatorTree::quotient`].
pub const PLACEHOLDER: &str = "_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BinderShape {
    pub names: usize,
    pub typed: bool,
    pub bracket: Bracket,
}

impl BinderShape {
    fn of(binder: &Binder) -> Self {
        BinderShape {
            names: binder.names.len(),
            typed: binder.ty.is_some(),
            bracket: binder.bracket,
        }
    }

    fn slots(self) -> String {
        let mut s = vec!["_"; self.names].join(" ");
        if self.typed {
            s.push_str(" : _");
        }
        s
    }

    /// Number of children this group contributes: its names plus the type.
    pub fn arity(self) -> usize {
        self.names + usize::from(self.typed)
    }
}

/// Syntactic role of a node. Used for rendering and scope analysis; it is
/// not part of structural equality, which looks only at labels and shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum NodeKind {
    Statement,
    /// Statement-level binder: name leaves, then the type.
    Binder(BinderShape),
    /// Quantifier or lambda: for each group its name leaves then its type,
    /// and finally the body.
    Binding {
        quantifier: QuantifierKind,
        groups: Vec<BinderShape>,
    },
    Infix {
        op: String,
    },
    Prefix {
        op: String,
    },
    Apply,
    Index,
    Ascription,
    Leaf,
    Placeholder,
    /// Hand-built node with no syntactic role.
    Generic,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    pub children: Vec<OptNode>,
}

impl PartialEq for OptNode {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.children == other.children
    }
}

impl Eq for OptNode {}

impl OptNode {
    /// A generic node; leaf when `children` is empty.
    pub fn new(label: impl Into<String>, children: Vec<OptNode>) -> Self {
        let kind = if children.is_empty() {
            NodeKind::Leaf
        } else {
            NodeKind::Generic
        };
        OptNode::with_kind(label, kind, children)
    }

    pub fn leaf(label: impl Into<String>) -> Self {
        OptNode::new(label, Vec::new())
    }

    pub fn with_kind(label: impl Into<String>, kind: NodeKind, children: Vec<OptNode>) -> Self {
        OptNode {
            id: NodeId(0),
            label: label.into(),
            kind,
            children,
        }
    }

    pub fn placeholder() -> Self {
        OptNode::with_kind(PLACEHOLDER, NodeKind::Placeholder, Vec::new())
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(OptNode::size).sum::<usize>()
    }

    pub fn preorder(&self) -> Vec<&OptNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    fn renumber(&mut self, next: &mut usize) {
        self.id = NodeId(*next);
        *next += 1;
        for c in &mut self.children {
            c.renumber(next);
        }
    }

    fn find(&self, id: NodeId) -> Option<&OptNode> {
        if self.id == id {
            return Some(self);
        }
        // Preorder ids: the target lives in the last child whose id is <= id.
        let child = self.children.iter().rev().find(|c| c.id <= id)?;
        child.find(id)
    }

    fn replace(&mut self, id: NodeId, with: &mut Option<OptNode>) -> bool {
        for child in &mut self.children {
            if child.id == id {
                *child = with.take().expect("replacement used once");
                return true;
            }
        }
        let Some(child) = self.children.iter_mut().rev().find(|c| c.id <= id) else {
            return false;
        };
        child.replace(id, with)
    }
}

/// Number of `_` parameter slots in a label. An underscore glued to
/// identifier characters (`thm_P`, `u_1`) is part of a name, not a slot.
pub fn slot_count(label: &str) -> usize {
    slot_positions(label).len()
}

fn slot_positions(label: &str) -> Vec<usize> {
    let is_word = |c: char| c.is_alphanumeric() || c == '_' || c == '\'';
    let chars: Vec<(usize, char)> = label.char_indices().collect();
    chars
        .iter()
        .enumerate()
        .filter(|&(i, &(_, c))| {
            c == '_'
                && !(i > 0 && is_word(chars[i - 1].1))
                && !chars.get(i + 1).is_some_and(|&(_, n)| is_word(n))
        })
        .map(|(_, &(pos, _))| pos)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptError {
    #[error("node {0} does not exist in this tree")]
    InvalidRef(NodeId),
    #[error("deleting root {0} would leave a forest")]
    RootDeletion(NodeId),
}

/// A finite rooted ordered labeled tree with preorder node ids.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorTree {
    root: OptNode,
    size: usize,
}

impl PartialEq for OperatorTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Eq for OperatorTree {}

impl From<OptNode> for OperatorTree {
    fn from(root: OptNode) -> Self {
        OperatorTree::new(root)
    }
}

/// Reference to the subtree rooted at `node` inside `tree`.
#[derive(Debug, Clone, Copy)]
pub struct SubtreeRef<'a> {
    pub tree: &'a OperatorTree,
    pub node: NodeId,
}

impl<'a> SubtreeRef<'a> {
    pub fn root(&self) -> &'a OptNode {
        self.tree
            .node(self.node)
            .expect("SubtreeRef points into its tree")
    }

    pub fn size(&self) -> usize {
        self.root().size()
    }

    pub fn to_tree(&self) -> OperatorTree {
        OperatorTree::new(self.root().clone())
    }

    pub fn quotient(&self) -> OperatorTree {
        self.tree
            .quotient(self.node)
            .expect("SubtreeRef points into its tree")
    }
}

impl OperatorTree {
    pub fn new(mut root: OptNode) -> Self {
        let mut next = 0;
        root.renumber(&mut next);
        OperatorTree { root, size: next }
    }

    pub fn root(&self) -> &OptNode {
        &self.root
    }

    pub fn into_root(self) -> OptNode {
        self.root
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node(&self, id: NodeId) -> Option<&OptNode> {
        if id.0 >= self.size {
            return None;
        }
        self.root.find(id)
    }

    pub fn preorder(&self) -> Vec<&OptNode> {
        self.root.preorder()
    }

    /// One reference per node, in preorder.
    pub fn enumerate_subtrees(&self) -> Vec<SubtreeRef<'_>> {
        (0..self.size)
            .map(|i| SubtreeRef {
                tree: self,
                node: NodeId(i),
            })
            .collect()
    }

    pub fn subtree(&self, id: NodeId) -> Result<SubtreeRef<'_>, OptError> {
        self.node(id).ok_or(OptError::InvalidRef(id))?;
        Ok(SubtreeRef {
            tree: self,
            node: id,
        })
    }

    /// `T/t`: the subtree at `id` collapsed into a single placeholder leaf.
    pub fn quotient(&self, id: NodeId) -> Result<OperatorTree, OptError> {
        self.replace_subtree(id, OptNode::placeholder())
    }

    /// Replaces the subtree at `id` with `with`.
    pub fn replace_subtree(&self, id: NodeId, with: OptNode) -> Result<OperatorTree, OptError> {
        self.node(id).ok_or(OptError::InvalidRef(id))?;
        if id == self.root.id {
            return Ok(OperatorTree::new(with));
        }
        let mut root = self.root.clone();
        let mut slot = Some(with);
        let replaced = root.replace(id, &mut slot);
        debug_assert!(replaced);
        Ok(OperatorTree::new(root))
    }

    /// Removes one node, splicing its children into its parent in place.
    pub fn delete_node(&self, id: NodeId) -> Result<OperatorTree, OptError> {
        self.node(id).ok_or(OptError::InvalidRef(id))?;
        if id == self.root.id {
            return match self.root.children.as_slice() {
                [only] => Ok(OperatorTree::new(only.clone())),
                _ => Err(OptError::RootDeletion(id)),
            };
        }
        fn go(node: &mut OptNode, id: NodeId) -> bool {
            if let Some(pos) = node.children.iter().position(|c| c.id == id) {
                let removed = node.children.remove(pos);
                for (k, c) in removed.children.into_iter().enumerate() {
                    node.children.insert(pos + k, c);
                }
                return true;
            }
            node.children.iter_mut().any(|c| go(c, id))
        }
        let mut root = self.root.clone();
        go(&mut root, id);
        Ok(OperatorTree::new(root))
    }

    /// Preorder ids of every subtree structurally equal to `pattern`.
    pub fn occurrences(&self, pattern: &OptNode) -> Vec<NodeId> {
        let size = pattern.size();
        self.preorder()
            .into_iter()
            .filter(|n| n.label == pattern.label && n.size() == size && *n == pattern)
            .map(|n| n.id)
            .collect()
    }

    /// True if any node stands for a grouping bracket.
    pub fn has_paren_node(&self) -> bool {
        self.preorder()
            .iter()
            .any(|n| matches!(n.label.as_str(), "(_)" | "( _ )" | "()"))
    }

    /// Checks slot/arity consistency on every node.
    pub fn check_slots(&self) -> Result<(), NodeId> {
        for n in self.preorder() {
            let ok = match n.kind {
                NodeKind::Statement => true,
                NodeKind::Placeholder => n.is_leaf() && n.label == PLACEHOLDER,
                _ if n.is_leaf() => slot_count(&n.label) == 0 || n.label == PLACEHOLDER,
                _ => slot_count(&n.label) == n.children.len(),
            };
            if !ok {
                return Err(n.id);
            }
        }
        Ok(())
    }

    /// One node per line: depth, tab, indented label.
    pub fn to_indented(&self) -> String {
        fn go(n: &OptNode, depth: usize, out: &mut String) {
            let _ = writeln!(out, "{depth}\t{}{}", "  ".repeat(depth), n.label);
            for c in &n.children {
                go(c, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(&self.root, 0, &mut out);
        out
    }

    /// Bracketed one-line term: `label(child,child)`.
    pub fn to_oneline(&self) -> String {
        fn go(n: &OptNode, out: &mut String) {
            out.push_str(&n.label);
            if !n.is_leaf() {
                out.push('(');
                for (i, c) in n.children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    go(c, out);
                }
                out.push(')');
            }
        }
        let mut out = String::new();
        go(&self.root, &mut out);
        out
    }

    pub fn render(&self) -> Rendering {
        render(self)
    }
}

impl fmt::Display for OperatorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_oneline())
    }
}

// ---------------------------------------------------------------------------
// Construction

/// Builds the operator tree of a standardized statement.
pub fn build_opt(stmt: &StandardizedStmt) -> OperatorTree {
    let mut children: Vec<OptNode> = stmt.binders.iter().map(binder_node).collect();
    children.push(expr_node(&stmt.goal));
    OperatorTree::new(OptNode::with_kind(
        stmt.name.clone(),
        NodeKind::Statement,
        children,
    ))
}

/// Operator tree of a bare expression.
pub fn expr_tree(expr: &Expr) -> OperatorTree {
    OperatorTree::new(expr_node(expr))
}

fn binder_label(shape: BinderShape) -> String {
    let inner = shape.slots();
    match shape.bracket {
        Bracket::Explicit | Bracket::Bare if shape.typed => inner,
        Bracket::Explicit | Bracket::Bare => format!("({inner})"),
        Bracket::Implicit => format!("{{{inner}}}"),
        Bracket::Instance => format!("[{inner}]"),
    }
}

fn binder_node(binder: &Binder) -> OptNode {
    let shape = BinderShape::of(binder);
    let mut children: Vec<OptNode> = binder.names.iter().map(OptNode::leaf).collect();
    if let Some(ty) = &binder.ty {
        children.push(expr_node(ty));
    }
    OptNode::with_kind(binder_label(shape), NodeKind::Binder(shape), children)
}

fn binding_label(quantifier: QuantifierKind, groups: &[BinderShape]) -> String {
    let mut label = quantifier.symbol().to_string();
    let single = groups.len() == 1;
    for g in groups {
        let inner = g.slots();
        label.push(' ');
        match g.bracket {
            Bracket::Bare => label.push_str(&inner),
            Bracket::Explicit if single => label.push_str(&inner),
            Bracket::Explicit => {
                let _ = write!(label, "({inner})");
            }
            Bracket::Implicit => {
                let _ = write!(label, "{{{inner}}}");
            }
            Bracket::Instance => {
                let _ = write!(label, "[{inner}]");
            }
        }
    }
    label.push_str(", _");
    label
}

fn expr_node(expr: &Expr) -> OptNode {
    match &expr.kind {
        ExprKind::Atom(name) | ExprKind::Numeral(name) => OptNode::leaf(name.clone()),
        ExprKind::Paren(inner) => expr_node(inner),
        ExprKind::App(h, a) => {
            OptNode::with_kind("_ _", NodeKind::Apply, vec![expr_node(h), expr_node(a)])
        }
        ExprKind::BinOp { op, lhs, rhs } => OptNode::with_kind(
            format!("_ {op} _"),
            NodeKind::Infix { op: op.clone() },
            vec![expr_node(lhs), expr_node(rhs)],
        ),
        ExprKind::Arrow(a, b) => OptNode::with_kind(
            "_ → _",
            NodeKind::Infix { op: "→".into() },
            vec![expr_node(a), expr_node(b)],
        ),
        ExprKind::UnOp { op, operand } => OptNode::with_kind(
            format!("{op}_"),
            NodeKind::Prefix { op: op.clone() },
            vec![expr_node(operand)],
        ),
        ExprKind::Ascription(e, t) => OptNode::with_kind(
            "(_ : _)",
            NodeKind::Ascription,
            vec![expr_node(e), expr_node(t)],
        ),
        ExprKind::Index(b, i) => {
            OptNode::with_kind("_[_]", NodeKind::Index, vec![expr_node(b), expr_node(i)])
        }
        ExprKind::Quantifier {
            kind,
            binders,
            body,
        } => {
            let groups: Vec<BinderShape> = binders.iter().map(BinderShape::of).collect();
            let mut children = Vec::new();
            for b in binders {
                children.extend(b.names.iter().map(OptNode::leaf));
                if let Some(ty) = &b.ty {
                    children.push(expr_node(ty));
                }
            }
            children.push(expr_node(body));
            OptNode::with_kind(
                binding_label(*kind, &groups),
                NodeKind::Binding {
                    quantifier: *kind,
                    groups,
                },
                children,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering

/// Text produced by [`render`]. `template` is set when the tree contained
/// quotient placeholders, so the text is a statement template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendering {
    pub text: String,
    pub template: bool,
}

const ATOMIC: u8 = 100;
const BINDING: u8 = 5;

fn precedence(node: &OptNode) -> u8 {
    match &node.kind {
        NodeKind::Binding { .. } => BINDING,
        NodeKind::Infix { op } => infix(op).map_or(ATOMIC, |(_, bp, _)| bp),
        NodeKind::Prefix { op } if op == "¬" => BP_NOT,
        NodeKind::Prefix { .. } => BP_NEG,
        NodeKind::Apply => BP_APP,
        _ => ATOMIC,
    }
}

/// Renders a tree back to formal text, adding round brackets only where
/// the operator table needs them to re-parse to the same tree.
pub fn render(tree: &OperatorTree) -> Rendering {
    let mut text = String::new();
    let root = tree.root();
    if root.kind == NodeKind::Statement {
        render_statement(root, &mut text);
    } else {
        render_node(root, 0, &mut text);
    }
    let template = tree
        .preorder()
        .iter()
        .any(|n| n.kind == NodeKind::Placeholder);
    Rendering { text, template }
}

fn render_statement(root: &OptNode, out: &mut String) {
    let _ = write!(out, "theorem {}", root.label);
    let Some((goal, binders)) = root.children.split_last() else {
        return;
    };
    for b in binders {
        out.push(' ');
        match &b.kind {
            NodeKind::Binder(shape) => {
                render_group(*shape, &b.children, true, out);
            }
            _ => render_node(b, BP_APP + 1, out),
        }
    }
    out.push_str(" : ");
    render_node(goal, 0, out);
}

/// Writes one binder group from its children (names, then type).
fn render_group(shape: BinderShape, children: &[OptNode], bracketed: bool, out: &mut String) {
    let (open, close) = match shape.bracket {
        Bracket::Bare => ("", ""),
        b if bracketed => b.delimiters(),
        Bracket::Explicit => ("", ""),
        b => b.delimiters(),
    };
    out.push_str(open);
    for (i, name) in children[..shape.names].iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        render_node(name, ATOMIC, out);
    }
    if shape.typed {
        out.push_str(" : ");
        render_node(&children[shape.names], BP_ARROW, out);
    }
    out.push_str(close);
}

fn render_node(node: &OptNode, min_prec: u8, out: &mut String) {
    let wrap = precedence(node) < min_prec;
    if wrap {
        out.push('(');
    }
    let c = &node.children;
    match &node.kind {
        NodeKind::Leaf | NodeKind::Placeholder => out.push_str(&node.label),
        NodeKind::Apply => {
            render_node(&c[0], BP_APP, out);
            out.push(' ');
            render_node(&c[1], BP_APP + 1, out);
        }
        NodeKind::Infix { op } => {
            let (_, bp, assoc) = infix(op).expect("infix nodes carry table operators");
            let (l, r) = match assoc {
                Assoc::Left => (bp, bp + 1),
                Assoc::Right => (bp + 1, bp),
            };
            render_node(&c[0], l, out);
            let _ = write!(out, " {op} ");
            render_node(&c[1], r, out);
        }
        NodeKind::Prefix { op } => {
            out.push_str(op);
            let operand = if op == "¬" { BP_REL } else { BP_POW };
            render_node(&c[0], operand, out);
        }
        NodeKind::Index => {
            render_node(&c[0], ATOMIC, out);
            out.push('[');
            render_node(&c[1], 0, out);
            out.push(']');
        }
        NodeKind::Ascription => {
            out.push('(');
            render_node(&c[0], 0, out);
            out.push_str(" : ");
            render_node(&c[1], 0, out);
            out.push(')');
        }
        NodeKind::Binding { quantifier, groups } => {
            out.push_str(quantifier.symbol());
            let single = groups.len() == 1;
            let mut at = 0;
            for g in groups {
                out.push(' ');
                render_group(*g, &c[at..at + g.arity()], !single, out);
                at += g.arity();
            }
            out.push_str(", ");
            render_node(&c[at], 0, out);
        }
        NodeKind::Statement => render_statement(node, out),
        NodeKind::Binder(shape) => render_group(*shape, c, true, out),
        NodeKind::Generic => render_generic(node, out),
    }
    if wrap {
        out.push(')');
    }
}

fn render_generic(node: &OptNode, out: &mut String) {
    let slots = slot_positions(&node.label);
    if slots.len() == node.children.len() {
        let mut last = 0;
        for (pos, child) in slots.iter().zip(&node.children) {
            out.push_str(&node.label[last..*pos]);
            render_node(child, ATOMIC, out);
            last = pos + 1;
        }
        out.push_str(&node.label[last..]);
    } else {
        out.push_str(&node.label);
        out.push('(');
        for (i, child) in node.children.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            render_node(child, 0, out);
        }
        out.push(')');
    }
}
