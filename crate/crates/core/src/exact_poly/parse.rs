//! Recursive-descent parser for the polynomial expression grammar:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' nat)?
//! base   := rational | var | '(' expr ')'
//! ```
//!
//! Rational literals are `n` or `n/d`; `/` is not a general operator.
//! Columns in errors are 1-based character positions.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiPoly, PolyError, Rational, Ring};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, PolyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<BigInt>().expect("ascii digits parse");
            toks.push((Tok::Int(n), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(PolyError::Syntax {
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        toks.push((tok, col));
        i += 1;
    }
    Ok(Lexer {
        toks,
        end: chars.len() + 1,
    })
}

struct Parser<'a> {
    lexer: Lexer,
    pos: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.lexer.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.lexer
            .toks
            .get(self.pos)
            .map_or(self.lexer.end, |(_, c)| *c)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lexer.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let column = self.column();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e = u32::try_from(n).map_err(|_| PolyError::ExponentTooLarge { column })?;
                    return Ok(base.pow(e));
                }
                Some(Tok::Minus) => return Err(PolyError::NegativeExponent { column }),
                _ => {
                    self.pos -= 1;
                    return self.syntax("exponent must be a non-negative integer literal");
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly, PolyError> {
        let column = self.column();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dcol = self.column();
                    match self.bump() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            Ok(MultiPoly::constant(self.ring, Rational::new(n, d)))
                        }
                        Some(Tok::Int(_)) => Err(PolyError::Syntax {
                            column: dcol,
                            message: "zero denominator in rational literal".into(),
                        }),
                        _ => Err(PolyError::Syntax {
                            column: dcol,
                            message: "expected an integer denominator after `/`".into(),
                        }),
                    }
                } else {
                    Ok(MultiPoly::constant(self.ring, Rational::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => match self.ring.index_of(&name) {
                Some(i) => Ok(MultiPoly::var_at(self.ring, i)),
                None => Err(PolyError::UnknownVariable { name, column }),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        self.syntax("expected `)`")
                    }
                }
            }
            Some(_) => {
                self.pos -= 1;
                self.syntax("expected a number, a variable or `(`")
            }
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses an expression over `ring` into its expanded canonical polynomial.
pub fn parse_poly(text: &str, ring: &Ring) -> Result<MultiPoly, PolyError> {
    let lexer = lex(text)?;
    let mut parser = Parser { lexer, pos: 0, ring };
    let p = parser.expr()?;
    if parser.pos < parser.lexer.toks.len() {
        let msg = match parser.peek() {
            Some(Tok::Slash) => "`/` is only allowed inside rational literals",
            _ => "unexpected token after complete expression",
        };
        return parser.syntax(msg);
    }
    Ok(p)
}
