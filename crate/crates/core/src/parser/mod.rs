//! Tokenizer and parser for the subset of Lean 4 theorem-statement syntax
//! that the scoring pipeline understands.
//!
//! Supported: `theorem`/`lemma`/`example` headers, binder groups in `()`,
//! `{}` and `[]`, the quantifiers `∀ ∃ λ fun`, function arrows, type
//! ascription, application by juxtaposition and the operators below.
//! Anything from the first top-level `:=` onward is kept verbatim as the
//! trailer and never interpreted.
//!
//! Operators, tightest first (all left-associative except `→` and `↔`):
//!
//! | level | operators |
//! |-------|-----------|
//! | application | `f x`, `ℤ[X]` |
//! | power | `^` |
//! | prefix | `-x` |
//! | multiplicative | `*` `/` `%` |
//! | additive | `+` `-` |
//! | relations | `=` `≠` `<` `≤` `>` `≥` `∈` `∣` |
//! | negation | `¬` |
//! | conjunction | `∧` |
//! | disjunction | `∨` |
//! | iff | `↔` |
//! | implication | `→` |
//!
//! Symbols outside this table are parsed as atoms, so `↑x` is an
//! application of `↑` to `x`.

mod ast;
pub(crate) mod grammar;
mod lexer;

use thiserror::Error;

pub use ast::{Binder, Bracket, Expr, ExprKind, QuantifierKind, Span, TheoremStmt};
pub use grammar::ANONYMOUS_INSTANCE;
pub use lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {}..{}: expected {expected}, found {found}", span.start, span.end)]
    Syntax {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("unbalanced delimiter `{found}` at {}..{}{}", span.start, span.end,
        expected.as_ref().map(|e| format!(" (expected `{e}`)")).unwrap_or_default())]
    UnbalancedDelimiter {
        span: Span,
        found: String,
        expected: Option<String>,
    },
    #[error("duplicate binder name `{name}` at {}..{}", span.start, span.end)]
    DuplicateBinder { name: String, span: Span },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnbalancedDelimiter { span, .. }
            | ParseError::DuplicateBinder { span, .. } => *span,
        }
    }
}

/// Parses a full statement such as `theorem t1 (x : Nat) : P x := by sorry`.
pub fn parse_theorem(source: &str) -> Result<TheoremStmt, ParseError> {
    let tokens = tokenize(source);
    grammar::check_balance(&tokens)?;
    grammar::Parser::new(&tokens).theorem(source)
}

/// Parses a token list as a single expression. A top-level `e : T` is
/// accepted as an ascription.
pub fn parse_expr(tokens: &[Token]) -> Result<Expr, ParseError> {
    grammar::check_balance(tokens)?;
    let mut parser = grammar::Parser::new(tokens);
    let expr = parser.expr_with_ascription()?;
    if !parser.at_end() {
        let tok = &tokens[tokens.len() - 1];
        let next = tokens
            .iter()
            .find(|t| t.span.start >= expr.span.end)
            .unwrap_or(tok);
        return Err(ParseError::Syntax {
            span: next.span,
            expected: "end of expression".into(),
            found: format!("`{}`", next.text),
        });
    }
    Ok(expr)
}

/// Convenience wrapper: tokenize then [`parse_expr`].
pub fn parse_expr_str(source: &str) -> Result<Expr, ParseError> {
    parse_expr(&tokenize(source))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: &str) -> Expr {
        parse_expr_str(src).unwrap_or_else(|err| panic!("{src}: {err}"))
    }

    fn a(name: &str) -> Expr {
        Expr::atom(name)
    }

    fn n(v: &str) -> Expr {
        Expr::numeral(v)
    }

    #[test]
    fn alpha_example_header() {
        let stmt = parse_theorem("theorem t1 (x : Nat) : P x := by sorry").unwrap();
        assert_eq!(stmt.name, "t1");
        assert_eq!(stmt.binders.len(), 1);
        assert_eq!(stmt.binders[0].names, vec!["x"]);
        assert_eq!(stmt.binders[0].ty, Some(a("Nat")));
        assert_eq!(stmt.binders[0].bracket, Bracket::Explicit);
        assert_eq!(stmt.goal, Expr::app(a("P"), a("x")));
        assert_eq!(stmt.trailer.as_deref(), Some(":= by sorry"));
    }

    #[test]
    fn statement_without_binders_or_trailer() {
        let stmt = parse_theorem("theorem thm : 1 = 1").unwrap();
        assert_eq!(stmt.name, "thm");
        assert!(stmt.binders.is_empty());
        assert_eq!(stmt.goal, Expr::binop("=", n("1"), n("1")));
        assert_eq!(stmt.trailer, None);
    }

    #[test]
    fn parenthesized_sum_times() {
        let stmt = parse_theorem("theorem a : (x + y) * z = 0").unwrap();
        let sum = Expr::paren(Expr::binop("+", a("x"), a("y")));
        let expected = Expr::binop("=", Expr::binop("*", sum, a("z")), n("0"));
        assert_eq!(stmt.goal, expected);
    }

    #[test]
    fn standard_precedence() {
        assert_eq!(
            e("x + y * z"),
            Expr::binop("+", a("x"), Expr::binop("*", a("y"), a("z")))
        );
        assert_eq!(
            e("f x + 1"),
            Expr::binop("+", Expr::app(a("f"), a("x")), n("1"))
        );
        assert_eq!(e("f a b"), Expr::app(Expr::app(a("f"), a("a")), a("b")));
    }

    #[test]
    fn quantifier_body_extends_right() {
        let q = e("∀ x : ℕ, x = x");
        match &q.kind {
            ExprKind::Quantifier {
                kind,
                binders,
                body,
            } => {
                assert_eq!(*kind, QuantifierKind::Forall);
                assert_eq!(binders.len(), 1);
                assert_eq!(binders[0].names, vec!["x"]);
                assert_eq!(binders[0].ty, Some(a("ℕ")));
                assert_eq!(**body, Expr::binop("=", a("x"), a("x")));
            }
            other => panic!("unexpected {other:?}"),
        }
        // The quantifier swallows the trailing disjunction.
        let q = e("p ∧ ∃ y, q ∨ r");
        let ExprKind::BinOp { op, rhs, .. } = &q.kind else {
            panic!()
        };
        assert_eq!(op, "∧");
        assert!(matches!(rhs.kind, ExprKind::Quantifier { .. }));
    }

    #[test]
    fn arrows_and_iff_are_right_associative() {
        let ExprKind::Arrow(lhs, rhs) = e("a → b → c").kind else {
            panic!()
        };
        assert_eq!(*lhs, a("a"));
        assert!(matches!(rhs.kind, ExprKind::Arrow(..)));
        let ExprKind::BinOp { lhs, .. } = e("p ↔ q ↔ r").kind else {
            panic!()
        };
        assert_eq!(*lhs, a("p"));
        let ExprKind::BinOp { lhs, .. } = e("a - b - c").kind else {
            panic!()
        };
        assert_eq!(*lhs, Expr::binop("-", a("a"), a("b")));
    }

    #[test]
    fn negation_and_unary_minus() {
        let ExprKind::BinOp { op, lhs, .. } = e("¬ a = b ∧ c").kind else {
            panic!()
        };
        assert_eq!(op, "∧");
        assert!(matches!(&lhs.kind, ExprKind::UnOp { op, .. } if op == "¬"));
        let ExprKind::UnOp { op, operand } = e("-x ^ 2").kind else {
            panic!()
        };
        assert_eq!(op, "-");
        assert_eq!(*operand, Expr::binop("^", a("x"), n("2")));
    }

    #[test]
    fn ascii_operators_are_canonicalized() {
        assert_eq!(e("a <= b"), Expr::binop("≤", a("a"), a("b")));
        assert!(matches!(e("a -> b").kind, ExprKind::Arrow(..)));
    }

    #[test]
    fn label_and_prediction_statements_parse() {
        let s = parse_theorem(
            "theorem thm_Q : {Ω : Type u_1} [Infinite Ω] : Infinite (Equiv.Perm Ω) := by sorry",
        )
        .unwrap();
        assert_eq!(s.binders.len(), 2);
        assert_eq!(s.binders[1].names, vec![ANONYMOUS_INSTANCE]);
        assert_eq!(s.binders[1].bracket, Bracket::Instance);

        let s =
            parse_theorem("theorem thm_Q : Irreducible (wilsons_poly : ℤ[X]) := by sorry").unwrap();
        let ExprKind::App(_, arg) = &s.goal.kind else {
            panic!()
        };
        let ExprKind::Paren(inner) = &arg.kind else {
            panic!()
        };
        let ExprKind::Ascription(_, ty) = &inner.kind else {
            panic!()
        };
        assert!(matches!(ty.kind, ExprKind::Index(..)));

        let s = parse_theorem(
            "theorem thm_P : (239 + 174 + 83) % 10 = 6 := by\n  exact thm_Q 239 174 83\n",
        )
        .unwrap();
        assert_eq!(
            s.trailer.as_deref(),
            Some(":= by\n  exact thm_Q 239 174 83")
        );
        let s = parse_theorem("example : thm_P = thm_Q := by rfl").unwrap();
        assert_eq!(s.name, "example");
    }

    #[test]
    fn lambda_forms() {
        let a1 = e("λ x, x");
        let a2 = e("fun x => x");
        let a3 = e("fun x ↦ x");
        assert_eq!(a1, a2);
        assert_eq!(a2, a3);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            parse_theorem("theorem t (x : ℕ : x = x"),
            Err(ParseError::UnbalancedDelimiter { .. })
        ));
        assert!(matches!(
            parse_theorem("theorem t (x : ℕ] : x = x"),
            Err(ParseError::UnbalancedDelimiter {
                expected: Some(_),
                ..
            })
        ));
        assert!(matches!(
            parse_theorem("theorem t (x x : ℕ) : x = x"),
            Err(ParseError::DuplicateBinder { .. })
        ));
        assert!(matches!(
            parse_theorem("def f : ℕ := 1"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_theorem("theorem t : "),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(parse_theorem(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_theorem("theorem t (x) : x"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr_str("a + "),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr_str("a b ,"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn unknown_symbols_are_atoms() {
        assert_eq!(e("↑x"), Expr::app(a("↑"), a("x")));
    }
}
