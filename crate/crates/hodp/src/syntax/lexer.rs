use super::{SourceSpan, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident { name: String, marked: bool },
    Number(usize),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    RuleArrow,
    Colon,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

/// Tokenizes one line; `line` is 1-based. Comments start with `#` at the
/// beginning of the line or after whitespace.
pub fn lex_line(text: &str, line: usize) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let span = |start: usize, len: usize| SourceSpan {
        line,
        column: start + 1,
        length: len.max(1),
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' && (i == 0 || chars[i - 1].is_whitespace()) {
            break;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let marked = i < chars.len() && chars[i] == '#';
            if marked {
                i += 1;
            }
            Tok::Ident { name, marked }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| SyntaxError::Parse {
                span: span(start, i - start),
                message: "number too large".into(),
            })?;
            Tok::Number(n)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('/', Some('\\')) => (Tok::Lambda, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('=', Some('>')) => (Tok::RuleArrow, 2),
                ('.', _) => (Tok::Dot, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                _ => {
                    return Err(SyntaxError::Parse {
                        span: span(start, 1),
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            i += len;
            tok
        };
        out.push(Token {
            tok,
            span: span(start, i - start),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_marks() {
        let toks = lex_line("rule f# x # trailing", 3).unwrap();
        assert_eq!(toks.len(), 3);
        assert_eq!(
            toks[1].tok,
            Tok::Ident {
                name: "f".into(),
                marked: true
            }
        );
        assert_eq!(toks[2].span.column, 9);
        assert!(lex_line("# whole line", 1).unwrap().is_empty());
    }

    #[test]
    fn bad_character_is_located() {
        match lex_line("fun f : a $ b", 2) {
            Err(SyntaxError::Parse { span, .. }) => {
                assert_eq!((span.line, span.column), (2, 11));
            }
            other => panic!("{other:?}"),
        }
    }
}
