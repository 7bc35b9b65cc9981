use super::ast::{Binder, Bracket, Expr, ExprKind, QuantifierKind, Span, TheoremStmt};
use super::lexer::{Token, TokenKind};
use super::ParseError;

type Result<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
}

// Binding powers, loosest first. Application sits above every infix operator.
pub const BP_ARROW: u8 = 10;
pub const BP_IFF: u8 = 20;
pub const BP_OR: u8 = 30;
pub const BP_AND: u8 = 40;
pub const BP_NOT: u8 = 45;
pub const BP_REL: u8 = 50;
pub const BP_ADD: u8 = 60;
pub const BP_MUL: u8 = 70;
pub const BP_NEG: u8 = 75;
pub const BP_POW: u8 = 80;
pub const BP_APP: u8 = 90;

/// Name given to an anonymous instance binder such as `[Infinite Ω]`.
pub const ANONYMOUS_INSTANCE: &str = "inst";

/// Infix operator lookup: canonical spelling, binding power, associativity.
pub fn infix(text: &str) -> Option<(&'static str, u8, Assoc)> {
    use Assoc::*;
    Some(match text {
        "→" | "->" => ("→", BP_ARROW, Right),
        "↔" | "<->" => ("↔", BP_IFF, Right),
        "∨" => ("∨", BP_OR, Left),
        "∧" => ("∧", BP_AND, Left),
        "=" => ("=", BP_REL, Left),
        "≠" | "!=" => ("≠", BP_REL, Left),
        "<" => ("<", BP_REL, Left),
        "≤" | "<=" => ("≤", BP_REL, Left),
        ">" => (">", BP_REL, Left),
        "≥" | ">=" => ("≥", BP_REL, Left),
        "∈" => ("∈", BP_REL, Left),
        "∣" => ("∣", BP_REL, Left),
        "+" => ("+", BP_ADD, Left),
        "-" => ("-", BP_ADD, Left),
        "*" => ("*", BP_MUL, Left),
        "/" => ("/", BP_MUL, Left),
        "%" => ("%", BP_MUL, Left),
        "^" => ("^", BP_POW, Left),
        _ => return None,
    })
}

/// Prefix operators and the binding power of their operand.
pub fn prefix(text: &str) -> Option<(&'static str, u8)> {
    match text {
        "¬" => Some(("¬", BP_REL)),
        "-" => Some(("-", BP_POW)),
        _ => None,
    }
}

/// Symbols that have a syntactic role and therefore can never be atoms.
fn is_reserved_symbol(text: &str) -> bool {
    matches!(text, "," | ":" | ":=" | "=>" | "↦" | "¬") || infix(text).is_some()
}

fn closing_for(open: &str) -> &'static str {
    match open {
        "(" => ")",
        "{" => "}",
        "[" => "]",
        "⟨" => "⟩",
        _ => unreachable!("not an opening delimiter: {open}"),
    }
}

/// Checks delimiter nesting up to the first top-level `:=`.
pub fn check_balance(tokens: &[Token]) -> Result<()> {
    let mut stack: Vec<&Token> = Vec::new();
    for tok in tokens {
        match tok.kind {
            TokenKind::Symbol if tok.text == ":=" && stack.is_empty() => break,
            TokenKind::OpenDelim => stack.push(tok),
            TokenKind::CloseDelim => match stack.pop() {
                Some(open) if closing_for(&open.text) == tok.text => {}
                Some(open) => {
                    return Err(ParseError::UnbalancedDelimiter {
                        span: tok.span,
                        found: tok.text.clone(),
                        expected: Some(closing_for(&open.text).to_string()),
                    })
                }
                None => {
                    return Err(ParseError::UnbalancedDelimiter {
                        span: tok.span,
                        found: tok.text.clone(),
                        expected: None,
                    })
                }
            },
            _ => {}
        }
    }
    match stack.pop() {
        Some(open) => Err(ParseError::UnbalancedDelimiter {
            span: open.span,
            found: open.text.clone(),
            expected: Some(closing_for(&open.text).to_string()),
        }),
        None => Ok(()),
    }
}

pub struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    pub fn new(tokens: &'t [Token]) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + offset)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn end_span(&self) -> Span {
        let end = self.tokens.last().map_or(0, |t| t.span.end);
        Span::new(end, end)
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(tok) => ParseError::Syntax {
                span: tok.span,
                expected: expected.into(),
                found: format!("`{}`", tok.text),
            },
            None => ParseError::Syntax {
                span: self.end_span(),
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn next_is_symbol(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is_symbol(text))
    }

    fn next_is_open(&self, texts: &[&str]) -> bool {
        self.peek()
            .is_some_and(|t| t.kind == TokenKind::OpenDelim && texts.contains(&t.text.as_str()))
    }

    fn expect_symbol(&mut self, text: &str) -> Result<&'t Token> {
        if self.next_is_symbol(text) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.error(format!("`{text}`")))
        }
    }

    fn expect_close(&mut self, text: &str) -> Result<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::CloseDelim && t.text == text => {
                Ok(self.bump().unwrap())
            }
            _ => Err(self.error(format!("`{text}`"))),
        }
    }

    fn expect_identifier(&mut self) -> Result<&'t Token> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => Ok(self.bump().unwrap()),
            _ => Err(self.error("identifier")),
        }
    }

    pub fn theorem(&mut self, source: &str) -> Result<TheoremStmt> {
        let name = match self.peek() {
            Some(t) if t.is(TokenKind::Keyword, "theorem") || t.is(TokenKind::Keyword, "lemma") => {
                self.bump();
                self.expect_identifier()?.text.clone()
            }
            Some(t) if t.is(TokenKind::Keyword, "example") => {
                self.bump();
                "example".to_string()
            }
            _ => return Err(self.error("`theorem` or `example`")),
        };

        let mut binders = Vec::new();
        while self.next_is_open(&["(", "{", "["]) {
            binders.push(self.binder_group(true)?);
        }
        self.expect_symbol(":")?;
        // Some generated statements place binder groups after the colon,
        // e.g. `theorem t : {α : Type} [Foo α] : P α`.
        if self.next_is_open(&["{", "["]) {
            while self.next_is_open(&["(", "{", "["]) {
                binders.push(self.binder_group(true)?);
            }
            self.expect_symbol(":")?;
        }

        let goal = self.expr_with_ascription()?;

        let trailer = match self.peek() {
            None => None,
            Some(t) if t.is_symbol(":=") => Some(source[t.span.start..].trim_end().to_string()),
            Some(_) => return Err(self.error("`:=` or end of input")),
        };

        Ok(TheoremStmt {
            name,
            binders,
            goal,
            trailer,
        })
    }

    /// Expression optionally followed by a top-level `: T`.
    pub fn expr_with_ascription(&mut self) -> Result<Expr> {
        let expr = self.expr(0)?;
        if self.next_is_symbol(":") {
            self.bump();
            let ty = self.expr(0)?;
            let span = expr.span.to(ty.span);
            return Ok(Expr::new(
                ExprKind::Ascription(Box::new(expr), Box::new(ty)),
                span,
            ));
        }
        Ok(expr)
    }

    /// A bracketed binder group. Statement-level groups must carry a type;
    /// quantifier groups may omit it.
    fn binder_group(&mut self, require_type: bool) -> Result<Binder> {
        let open = self
            .bump()
            .expect("caller checked for an opening delimiter");
        let bracket = match open.text.as_str() {
            "(" => Bracket::Explicit,
            "{" => Bracket::Implicit,
            "[" => Bracket::Instance,
            _ => return Err(self.error("binder")),
        };
        let close = closing_for(&open.text);

        let named = {
            let mut i = 0;
            while self
                .peek_at(i)
                .is_some_and(|t| t.kind == TokenKind::Identifier)
            {
                i += 1;
            }
            i > 0
                && self
                    .peek_at(i)
                    .is_some_and(|t| t.is_symbol(":") || (!require_type && t.text == close))
        };

        let (names, ty) = if bracket == Bracket::Instance && !named {
            let ty = self.expr(0)?;
            (vec![ANONYMOUS_INSTANCE.to_string()], Some(ty))
        } else {
            let names = self.binder_names()?;
            let ty = if self.next_is_symbol(":") {
                self.bump();
                Some(self.expr(0)?)
            } else if require_type {
                return Err(self.error("`:`"));
            } else {
                None
            };
            (names, ty)
        };
        let close_tok = self.expect_close(close)?;
        Ok(Binder {
            names,
            ty,
            bracket,
            span: open.span.to(close_tok.span),
        })
    }

    fn binder_names(&mut self) -> Result<Vec<String>> {
        let mut names: Vec<String> = Vec::new();
        while let Some(t) = self.peek().filter(|t| t.kind == TokenKind::Identifier) {
            if names.contains(&t.text) {
                return Err(ParseError::DuplicateBinder {
                    name: t.text.clone(),
                    span: t.span,
                });
            }
            names.push(t.text.clone());
            self.bump();
        }
        if names.is_empty() {
            return Err(self.error("identifier"));
        }
        Ok(names)
    }

    /// Precedence-climbing expression parser.
    pub fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix_expr()?;
        while let Some(tok) = self.peek() {
            if tok.kind != TokenKind::Symbol {
                break;
            }
            let Some((op, bp, assoc)) = infix(&tok.text) else {
                break;
            };
            if bp < min_bp {
                break;
            }
            self.bump();
            let rhs_bp = match assoc {
                Assoc::Left => bp + 1,
                Assoc::Right => bp,
            };
            let rhs = self.expr(rhs_bp)?;
            let span = lhs.span.to(rhs.span);
            let kind = if op == "→" {
                ExprKind::Arrow(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::BinOp {
                    op: op.to_string(),
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                }
            };
            lhs = Expr::new(kind, span);
        }
        Ok(lhs)
    }

    fn prefix_expr(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.error("expression"));
        };
        if tok.kind == TokenKind::Keyword {
            let kind = match tok.text.as_str() {
                "∀" => Some(QuantifierKind::Forall),
                "∃" => Some(QuantifierKind::Exists),
                "λ" | "fun" => Some(QuantifierKind::Lambda),
                _ => None,
            };
            if let Some(kind) = kind {
                return self.quantifier(kind);
            }
        }
        if tok.kind == TokenKind::Symbol {
            if let Some((op, operand_bp)) = prefix(&tok.text) {
                self.bump();
                let operand = self.expr(operand_bp)?;
                let span = tok.span.to(operand.span);
                return Ok(Expr::new(
                    ExprKind::UnOp {
                        op: op.to_string(),
                        operand: Box::new(operand),
                    },
                    span,
                ));
            }
        }
        self.application()
    }

    fn quantifier(&mut self, kind: QuantifierKind) -> Result<Expr> {
        let kw = self.bump().unwrap();
        let mut binders = Vec::new();
        loop {
            if self.next_is_open(&["(", "{", "["]) {
                binders.push(self.binder_group(false)?);
                continue;
            }
            if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                let start = self.peek().unwrap().span;
                let names = self.binder_names()?;
                let ty = if self.next_is_symbol(":") {
                    self.bump();
                    Some(self.expr(0)?)
                } else {
                    None
                };
                let end = ty
                    .as_ref()
                    .map_or(self.tokens[self.pos - 1].span, |t| t.span);
                let typed = ty.is_some();
                binders.push(Binder {
                    names,
                    ty,
                    bracket: Bracket::Bare,
                    span: start.to(end),
                });
                if typed {
                    break;
                }
                continue;
            }
            break;
        }
        if binders.is_empty() {
            return Err(self.error("binder"));
        }

        let separator_ok = match self.peek() {
            Some(t) if t.is_symbol(",") => true,
            Some(t) if kind == QuantifierKind::Lambda => t.is_symbol("=>") || t.is_symbol("↦"),
            _ => false,
        };
        if !separator_ok {
            return Err(self.error(if kind == QuantifierKind::Lambda {
                "`,` or `=>`"
            } else {
                "`,`"
            }));
        }
        self.bump();

        let body = self.expr(0)?;
        let span = kw.span.to(body.span);
        Ok(Expr::new(
            ExprKind::Quantifier {
                kind,
                binders,
                body: Box::new(body),
            },
            span,
        ))
    }

    fn starts_argument(&self) -> bool {
        match self.peek() {
            Some(t) => match t.kind {
                TokenKind::Identifier | TokenKind::Numeral => true,
                TokenKind::OpenDelim => t.text == "(",
                TokenKind::Symbol => !is_reserved_symbol(&t.text),
                _ => false,
            },
            None => false,
        }
    }

    fn application(&mut self) -> Result<Expr> {
        let mut head = self.postfix_primary()?;
        while self.starts_argument() {
            let arg = self.postfix_primary()?;
            head = Expr::app(head, arg);
        }
        Ok(head)
    }

    fn postfix_primary(&mut self) -> Result<Expr> {
        let mut expr = self.primary()?;
        // `ℤ[X]`: a bracket glued to the previous token indexes it.
        while self.peek().is_some_and(|t| {
            t.kind == TokenKind::OpenDelim && t.text == "[" && t.span.start == expr.span.end
        }) {
            self.bump();
            let index = self.expr(0)?;
            let close = self.expect_close("]")?;
            let span = expr.span.to(close.span);
            expr = Expr::new(ExprKind::Index(Box::new(expr), Box::new(index)), span);
        }
        Ok(expr)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.error("expression"));
        };
        match tok.kind {
            TokenKind::Identifier => {
                self.bump();
                Ok(Expr::new(ExprKind::Atom(tok.text.clone()), tok.span))
            }
            TokenKind::Numeral => {
                self.bump();
                Ok(Expr::new(ExprKind::Numeral(tok.text.clone()), tok.span))
            }
            TokenKind::Symbol if !is_reserved_symbol(&tok.text) => {
                self.bump();
                Ok(Expr::new(ExprKind::Atom(tok.text.clone()), tok.span))
            }
            TokenKind::OpenDelim if tok.text == "(" => {
                self.bump();
                let inner = self.expr_with_ascription()?;
                let close = self.expect_close(")")?;
                Ok(Expr::new(
                    ExprKind::Paren(Box::new(inner)),
                    tok.span.to(close.span),
                ))
            }
            _ => Err(self.error("expression")),
        }
    }
}
