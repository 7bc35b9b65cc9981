use std::fmt;

use serde::Serialize;

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn slice(self, source: &str) -> &str {
        &source[self.start..self.end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bracket {
    /// `(x : T)`
    Explicit,
    /// `{x : T}`
    Implicit,
    /// `[x : T]`
    Instance,
    /// Unbracketed quantifier binder, `∀ x : T, ...`.
    Bare,
}

impl Bracket {
    pub fn delimiters(self) -> (&'static str, &'static str) {
        match self {
            Bracket::Explicit => ("(", ")"),
            Bracket::Implicit => ("{", "}"),
            Bracket::Instance => ("[", "]"),
            Bracket::Bare => ("", ""),
        }
    }
}

/// One binder group. `ty` is absent only for quantifier binders such as
/// `∀ x, p`.
#[derive(Debug, Clone, Serialize)]
pub struct Binder {
    pub names: Vec<String>,
    pub ty: Option<Expr>,
    pub bracket: Bracket,
    pub span: Span,
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.ty == other.ty && self.bracket == other.bracket
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantifierKind {
    Forall,
    Exists,
    Lambda,
}

impl QuantifierKind {
    pub fn symbol(self) -> &'static str {
        match self {
            QuantifierKind::Forall => "∀",
            QuantifierKind::Exists => "∃",
            QuantifierKind::Lambda => "λ",
        }
    }
}

/// Expression node. Equality is structural: spans are ignored.
#[derive(Debug, Clone, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExprKind {
    Atom(String),
    /// Decimal literal, kept verbatim.
    Numeral(String),
    App(Box<Expr>, Box<Expr>),
    BinOp {
        op: String,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    UnOp {
        op: String,
        operand: Box<Expr>,
    },
    Quantifier {
        kind: QuantifierKind,
        binders: Vec<Binder>,
        body: Box<Expr>,
    },
    Arrow(Box<Expr>, Box<Expr>),
    Ascription(Box<Expr>, Box<Expr>),
    /// Postfix bracket directly after an expression, e.g. `ℤ[X]` or `l[i]`.
    Index(Box<Expr>, Box<Expr>),
    Paren(Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn atom(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Atom(name.into()), Span::default())
    }

    pub fn numeral(value: impl Into<String>) -> Self {
        Expr::new(ExprKind::Numeral(value.into()), Span::default())
    }

    pub fn app(head: Expr, arg: Expr) -> Self {
        let span = head.span.to(arg.span);
        Expr::new(ExprKind::App(Box::new(head), Box::new(arg)), span)
    }

    pub fn binop(op: impl Into<String>, lhs: Expr, rhs: Expr) -> Self {
        let span = lhs.span.to(rhs.span);
        Expr::new(
            ExprKind::BinOp {
                op: op.into(),
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        )
    }

    pub fn paren(inner: Expr) -> Self {
        let span = inner.span;
        Expr::new(ExprKind::Paren(Box::new(inner)), span)
    }

    /// True if any `Paren` node remains in this expression.
    pub fn contains_paren(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e.kind, ExprKind::Paren(_)));
        found
    }

    /// Preorder visit of every sub-expression, including binder types.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Atom(_) | ExprKind::Numeral(_) => {}
            ExprKind::App(a, b)
            | ExprKind::Arrow(a, b)
            | ExprKind::Ascription(a, b)
            | ExprKind::Index(a, b)
            | ExprKind::BinOp { lhs: a, rhs: b, .. } => {
                a.walk(f);
                b.walk(f);
            }
            ExprKind::UnOp { operand, .. } => operand.walk(f),
            ExprKind::Paren(inner) => inner.walk(f),
            ExprKind::Quantifier { binders, body, .. } => {
                for b in binders {
                    if let Some(ty) = &b.ty {
                        ty.walk(f);
                    }
                }
                body.walk(f);
            }
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized S-expression form, for debugging and error output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Atom(s) | ExprKind::Numeral(s) => write!(f, "{s}"),
            ExprKind::App(h, a) => write!(f, "(app {h} {a})"),
            ExprKind::BinOp { op, lhs, rhs } => write!(f, "({op} {lhs} {rhs})"),
            ExprKind::UnOp { op, operand } => write!(f, "({op} {operand})"),
            ExprKind::Arrow(a, b) => write!(f, "(→ {a} {b})"),
            ExprKind::Ascription(e, t) => write!(f, "(: {e} {t})"),
            ExprKind::Index(b, i) => write!(f, "(index {b} {i})"),
            ExprKind::Paren(inner) => write!(f, "(paren {inner})"),
            ExprKind::Quantifier {
                kind,
                binders,
                body,
            } => {
                write!(f, "({}", kind.symbol())?;
                for b in binders {
                    write!(f, " [{}", b.names.join(" "))?;
                    if let Some(ty) = &b.ty {
                        write!(f, " : {ty}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, " {body})")
            }
        }
    }
}

/// A parsed `theorem`/`lemma`/`example` header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremStmt {
    pub name: String,
    pub binders: Vec<Binder>,
    pub goal: Expr,
    /// Everything from `:=` onward, verbatim. Not part of any tree.
    pub trailer: Option<String>,
}
