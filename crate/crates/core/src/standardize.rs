//! Statement standardization: name normalization, a small rule-based
//! rewriting pass and binder expansion, applied in that order.
//!
//! No type inference happens here. Statements are compared as written, so a
//! binder whose type annotation was omitted stays unannotated.

use serde::{Deserialize, Serialize};

use crate::parser::{Binder, Expr, ExprKind, TheoremStmt};

pub const CANONICAL_NAME: &str = "thm";

pub const PASS_NAME: &str = "name-normalization";
pub const PASS_REWRITE: &str = "rewrite";
pub const PASS_EXPAND: &str = "binder-expansion";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StandardizeConfig {
    pub rewrite: bool,
    pub expand: bool,
}

impl Default for StandardizeConfig {
    fn default() -> Self {
        StandardizeConfig {
            rewrite: true,
            expand: true,
        }
    }
}

/// A statement after standardization. With the default configuration every
/// binder holds exactly one name and `provenance` ends with
/// [`PASS_EXPAND`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardizedStmt {
    pub name: String,
    pub binders: Vec<Binder>,
    pub goal: Expr,
    pub provenance: Vec<&'static str>,
}

impl StandardizedStmt {
    /// Re-wraps as a `TheoremStmt` (without trailer), e.g. to run the
    /// passes a second time.
    pub fn to_theorem(&self) -> TheoremStmt {
        TheoremStmt {
            name: self.name.clone(),
            binders: self.binders.clone(),
            goal: self.goal.clone(),
            trailer: None,
        }
    }
}

/// Splits every binder group with k names into k single-name groups.
pub fn expand_binders(stmt: TheoremStmt) -> TheoremStmt {
    TheoremStmt {
        binders: split_groups(stmt.binders),
        ..stmt
    }
}

fn split_groups(binders: Vec<Binder>) -> Vec<Binder> {
    binders
        .into_iter()
        .flat_map(|b| {
            let Binder {
                names,
                ty,
                bracket,
                span,
            } = b;
            names.into_iter().map(move |name| Binder {
                names: vec![name],
                ty: ty.clone(),
                bracket,
                span,
            })
        })
        .collect()
}

pub fn normalize_name(stmt: TheoremStmt) -> TheoremStmt {
    TheoremStmt {
        name: CANONICAL_NAME.to_string(),
        ..stmt
    }
}

/// Rule-based rewriting of the goal and binder types:
///
/// * `∀ x y : T, p` (and `∃`, `λ`) becomes nested single-variable binders;
/// * `-(n)` with an atomic operand drops the redundant grouping.
pub fn rewrite(stmt: TheoremStmt) -> TheoremStmt {
    TheoremStmt {
        binders: stmt
            .binders
            .into_iter()
            .map(|b| Binder {
                ty: b.ty.map(rewrite_expr),
                ..b
            })
            .collect(),
        goal: rewrite_expr(stmt.goal),
        ..stmt
    }
}

fn rewrite_expr(expr: Expr) -> Expr {
    let span = expr.span;
    let kind = match expr.kind {
        k @ (ExprKind::Atom(_) | ExprKind::Numeral(_)) => k,
        ExprKind::App(h, a) => ExprKind::App(bx(rewrite_expr(*h)), bx(rewrite_expr(*a))),
        ExprKind::BinOp { op, lhs, rhs } => ExprKind::BinOp {
            op,
            lhs: bx(rewrite_expr(*lhs)),
            rhs: bx(rewrite_expr(*rhs)),
        },
        ExprKind::UnOp { op, operand } => {
            let mut operand = rewrite_expr(*operand);
            if op == "-" {
                if let ExprKind::Paren(inner) = &operand.kind {
                    if matches!(inner.kind, ExprKind::Numeral(_) | ExprKind::Atom(_)) {
                        operand = (**inner).clone();
                    }
                }
            }
            ExprKind::UnOp {
                op,
                operand: bx(operand),
            }
        }
        ExprKind::Arrow(a, b) => ExprKind::Arrow(bx(rewrite_expr(*a)), bx(rewrite_expr(*b))),
        ExprKind::Ascription(e, t) => {
            ExprKind::Ascription(bx(rewrite_expr(*e)), bx(rewrite_expr(*t)))
        }
        ExprKind::Index(b, i) => ExprKind::Index(bx(rewrite_expr(*b)), bx(rewrite_expr(*i))),
        ExprKind::Paren(inner) => ExprKind::Paren(bx(rewrite_expr(*inner))),
        ExprKind::Quantifier {
            kind,
            binders,
            body,
        } => {
            let body = rewrite_expr(*body);
            let singles: Vec<Binder> = split_groups(binders)
                .into_iter()
                .map(|b| Binder {
                    ty: b.ty.map(rewrite_expr),
                    ..b
                })
                .collect();
            // Innermost binder wraps the body first.
            return singles.into_iter().rev().fold(body, |acc, binder| {
                let span = binder.span.to(acc.span);
                Expr::new(
                    ExprKind::Quantifier {
                        kind,
                        binders: vec![binder],
                        body: bx(acc),
                    },
                    span,
                )
            });
        }
    };
    Expr::new(kind, span)
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Runs the configured passes: name normalization, rewriting, expansion.
pub fn standardize(stmt: TheoremStmt, config: &StandardizeConfig) -> StandardizedStmt {
    let mut provenance = vec![PASS_NAME];
    let mut stmt = normalize_name(stmt);
    if config.rewrite {
        stmt = rewrite(stmt);
        provenance.push(PASS_REWRITE);
    }
    if config.expand {
        stmt = expand_binders(stmt);
        provenance.push(PASS_EXPAND);
    }
    StandardizedStmt {
        name: stmt.name,
        binders: stmt.binders,
        goal: stmt.goal,
        provenance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_theorem, Bracket, QuantifierKind};

    fn parse(src: &str) -> TheoremStmt {
        parse_theorem(src).unwrap()
    }

    fn pairs(binders: &[Binder]) -> Vec<(String, Option<Expr>)> {
        binders
            .iter()
            .flat_map(|b| b.names.iter().map(|n| (n.clone(), b.ty.clone())))
            .collect()
    }

    #[test]
    fn compact_function_binders_expand() {
        let stmt = expand_binders(parse("theorem t (f g : ℝ → ℝ) : f = g"));
        assert_eq!(stmt.binders.len(), 2);
        assert_eq!(stmt.binders[0].names, vec!["f"]);
        assert_eq!(stmt.binders[1].names, vec!["g"]);
        assert_eq!(stmt.binders[0].ty, stmt.binders[1].ty);
        assert!(matches!(
            stmt.binders[0].ty.as_ref().unwrap().kind,
            ExprKind::Arrow(..)
        ));
        assert!(stmt.binders.iter().all(|b| b.bracket == Bracket::Explicit));
    }

    #[test]
    fn singleton_binder_unchanged() {
        let before = parse("theorem t (x : ℕ) : x = x");
        let after = expand_binders(before.clone());
        assert_eq!(before, after);
    }

    #[test]
    fn implicit_group_keeps_order_and_bracket() {
        let before = parse("theorem t {a b c : ℤ} : a + b = c");
        let after = expand_binders(before.clone());
        assert_eq!(after.binders.len(), 3);
        assert!(after.binders.iter().all(|b| b.bracket == Bracket::Implicit));
        assert_eq!(pairs(&before.binders), pairs(&after.binders));
    }

    #[test]
    fn name_normalization() {
        for name in ["mathd_numbertheory_254", "thm", "t1"] {
            let stmt = normalize_name(parse(&format!("theorem {name} : True")));
            assert_eq!(stmt.name, "thm");
        }
        let before = parse("theorem t1 (x : ℕ) : P x");
        let after = normalize_name(before.clone());
        assert_eq!(after.binders, before.binders);
        assert_eq!(after.goal, before.goal);
    }

    #[test]
    fn full_pipeline_examples() {
        let s = standardize(parse("theorem t (x y : ℕ) : x = y"), &Default::default());
        assert_eq!(s.name, "thm");
        assert_eq!(
            pairs(&s.binders),
            vec![
                ("x".to_string(), Some(Expr::atom("ℕ"))),
                ("y".to_string(), Some(Expr::atom("ℕ")))
            ]
        );
        assert_eq!(s.provenance, vec![PASS_NAME, PASS_REWRITE, PASS_EXPAND]);

        let s = standardize(parse("theorem thm : True"), &Default::default());
        assert!(s.binders.is_empty());
        assert_eq!(s.goal, Expr::atom("True"));

        let s = standardize(parse("theorem t1 (x : Nat) : P x"), &Default::default());
        assert_eq!(s.name, "thm");
        assert_eq!(
            pairs(&s.binders),
            vec![("x".to_string(), Some(Expr::atom("Nat")))]
        );
        assert_eq!(s.goal, Expr::app(Expr::atom("P"), Expr::atom("x")));
    }

    #[test]
    fn quantifier_splitting() {
        let s = standardize(parse("theorem t : ∀ x y : ℕ, x = y"), &Default::default());
        let ExprKind::Quantifier {
            kind,
            binders,
            body,
        } = &s.goal.kind
        else {
            panic!()
        };
        assert_eq!(*kind, QuantifierKind::Forall);
        assert_eq!(binders[0].names, vec!["x"]);
        let ExprKind::Quantifier { binders, .. } = &body.kind else {
            panic!()
        };
        assert_eq!(binders[0].names, vec!["y"]);
        assert_eq!(binders[0].ty, Some(Expr::atom("ℕ")));
    }

    #[test]
    fn unary_minus_drops_atomic_grouping() {
        let a = standardize(parse("theorem t : x = -(5)"), &Default::default());
        let b = standardize(parse("theorem t : x = -5"), &Default::default());
        assert_eq!(a.goal, b.goal);
        // Compound operands keep their grouping.
        let c = standardize(parse("theorem t : x = -(5 + y)"), &Default::default());
        assert!(c.goal.contains_paren());
    }

    #[test]
    fn passes_can_be_disabled() {
        let cfg = StandardizeConfig {
            rewrite: false,
            expand: false,
        };
        let s = standardize(parse("theorem t (a b : ℕ) : ∀ x y, x = y"), &cfg);
        assert_eq!(s.binders.len(), 1);
        assert_eq!(s.provenance, vec![PASS_NAME]);
    }

    #[test]
    fn idempotent_on_samples() {
        for src in [
            "theorem t (f g : ℝ → ℝ) {a b : ℕ} : ∀ x y : ℝ, f x = g (-(y))",
            "theorem t : ∃ x y, x < y ∧ ¬ (x = 0)",
        ] {
            let once = standardize(parse(src), &Default::default());
            let twice = standardize(once.to_theorem(), &Default::default());
            assert_eq!(once, twice);
        }
    }
}
