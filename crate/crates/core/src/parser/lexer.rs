use serde::Serialize;

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Numeral,
    Symbol,
    OpenDelim,
    CloseDelim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_symbol(&self, text: &str) -> bool {
        self.is(TokenKind::Symbol, text)
    }
}

const KEYWORDS: &[&str] = &["theorem", "lemma", "example", "fun", "λ", "∀", "∃"];

/// Multi-character symbols, longest first.
const COMPOUND_SYMBOLS: &[&str] = &["<->", ":=", "=>", "->", "<=", ">=", "!="];

fn is_open_delim(c: char) -> bool {
    matches!(c, '(' | '{' | '[' | '⟨')
}

fn is_close_delim(c: char) -> bool {
    matches!(c, ')' | '}' | ']' | '⟩')
}

fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && c != 'λ'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '!' | '?')
}

/// Splits `source` into tokens. Never fails: any character that is not
/// whitespace and does not start a known token becomes a one-character
/// symbol.
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();

    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }

        let rest = &source[start..];
        let (kind, len) = if c.is_ascii_digit() {
            (TokenKind::Numeral, numeral_len(rest))
        } else if is_ident_start(c) {
            let len = ident_len(rest);
            let kind = if KEYWORDS.contains(&&rest[..len]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            (kind, len)
        } else if KEYWORDS
            .iter()
            .any(|k| rest.starts_with(k) && k.chars().count() == 1)
        {
            (TokenKind::Keyword, c.len_utf8())
        } else if is_open_delim(c) {
            (TokenKind::OpenDelim, c.len_utf8())
        } else if is_close_delim(c) {
            (TokenKind::CloseDelim, c.len_utf8())
        } else if let Some(sym) = COMPOUND_SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            (TokenKind::Symbol, sym.len())
        } else {
            (TokenKind::Symbol, c.len_utf8())
        };

        let end = start + len;
        tokens.push(Token {
            kind,
            text: source[start..end].to_string(),
            span: Span::new(start, end),
        });
        while chars.peek().is_some_and(|&(i, _)| i < end) {
            chars.next();
        }
    }
    tokens
}

fn numeral_len(s: &str) -> usize {
    let int = s.bytes().take_while(u8::is_ascii_digit).count();
    let rest = &s.as_bytes()[int..];
    if rest.len() >= 2 && rest[0] == b'.' && rest[1].is_ascii_digit() {
        int + 1 + rest[1..].iter().take_while(|b| b.is_ascii_digit()).count()
    } else {
        int
    }
}

fn ident_len(s: &str) -> usize {
    let mut len = 0;
    let mut iter = s.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        let ok = if i == 0 {
            true
        } else if c == '.' {
            // Dotted names such as `Equiv.Perm` or `x.1`.
            matches!(iter.peek(), Some(&(_, n)) if is_ident_start(n) || n.is_ascii_digit())
        } else {
            is_ident_continue(c) && c != 'λ'
        };
        if !ok {
            break;
        }
        len = i + c.len_utf8();
    }
    len
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds_and_texts(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn bare_identifiers() {
        assert_eq!(
            kinds_and_texts("P x"),
            vec![
                (TokenKind::Identifier, "P".into()),
                (TokenKind::Identifier, "x".into())
            ]
        );
    }

    #[test]
    fn compact_binder_group() {
        use TokenKind::*;
        let expected = [
            (OpenDelim, "("),
            (Identifier, "f"),
            (Identifier, "g"),
            (Symbol, ":"),
            (Identifier, "ℝ"),
            (Symbol, "→"),
            (Identifier, "ℝ"),
            (CloseDelim, ")"),
        ];
        let got = kinds_and_texts("(f g : ℝ → ℝ)");
        assert_eq!(got.len(), expected.len());
        for ((k, t), (ek, et)) in got.iter().zip(expected) {
            assert_eq!((*k, t.as_str()), (ek, et));
        }
    }

    #[test]
    fn numerals_and_operators_split() {
        use TokenKind::*;
        assert_eq!(
            kinds_and_texts("1 = 1"),
            vec![
                (Numeral, "1".into()),
                (Symbol, "=".into()),
                (Numeral, "1".into())
            ]
        );
        assert_eq!(kinds_and_texts("2*X^3")[1], (Symbol, "*".into()));
        assert_eq!(kinds_and_texts("3.25")[0], (Numeral, "3.25".into()));
    }

    #[test]
    fn dotted_names_subscripts_and_keywords() {
        use TokenKind::*;
        assert_eq!(
            kinds_and_texts("Equiv.Perm")[0],
            (Identifier, "Equiv.Perm".into())
        );
        assert_eq!(kinds_and_texts("h₀")[0], (Identifier, "h₀".into()));
        assert_eq!(kinds_and_texts("λx")[0], (Keyword, "λ".into()));
        assert_eq!(kinds_and_texts("∀x")[0], (Keyword, "∀".into()));
        assert_eq!(kinds_and_texts("a := b")[1], (Symbol, ":=".into()));
        assert_eq!(kinds_and_texts("p <-> q")[1], (Symbol, "<->".into()));
    }

    #[test]
    fn unknown_codepoints_become_symbols() {
        let toks = tokenize("x ⊕ ☃");
        assert_eq!(toks[1].kind, TokenKind::Symbol);
        assert_eq!(toks[2].text, "☃");
    }

    #[test]
    fn spans_are_nonempty_and_cover_input() {
        let src = "theorem t (x : ℕ) : x ∣ 10 % 3 := by sorry";
        let toks = tokenize(src);
        let mut rebuilt = String::new();
        let mut pos = 0;
        for t in &toks {
            assert!(t.span.start < t.span.end);
            rebuilt.push_str(&src[pos..t.span.start]);
            rebuilt.push_str(&t.text);
            pos = t.span.end;
        }
        rebuilt.push_str(&src[pos..]);
        assert_eq!(rebuilt, src);
    }
}
