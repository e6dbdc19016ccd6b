//! Textual parser for polynomial expressions over a presentation.
//!
//! Grammar: `+`, `-`, `*`, `/`, `^`, parentheses, integer literals, and
//! identifiers naming presentation variables or base-field parameters.
//! Multiplication may be implicit by adjacency (`2 l1`, `(1+l)(1-l)`).
//! Division requires an invertible divisor. The printers in this crate emit
//! expressions this parser accepts, so parse after print is the identity.

use std::sync::Arc;

use crate::error::{Error, Result};

use super::presentation::TriangularPresentation;
use super::ring::RingElem;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            '0'..='9' => {
                let mut value: u64 = 0;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(d as u64))
                        .ok_or_else(|| Error::Parse("integer literal overflow".into()))?;
                    chars.next();
                }
                out.push(Token::Int(value));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(name));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    pres: &'a Arc<TriangularPresentation>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RingElem> {
        let mut negate = false;
        if self.peek() == Some(&Token::Minus) {
            self.bump();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(tok) = self.peek() {
            match tok {
                Token::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs)?;
                }
                Token::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs)?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    let inv = rhs.inverse().map_err(|e| {
                        Error::Parse(format!("division by non-invertible element: {e}"))
                    })?;
                    acc = acc.mul(&inv)?;
                }
                // implicit multiplication by adjacency
                Some(Token::Ident(_)) | Some(Token::Int(_)) | Some(Token::LParen) => {
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            match self.bump() {
                Some(Token::Int(e)) => Ok(base.pow(*e)),
                _ => Err(Error::Parse("expected integer exponent after `^`".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RingElem> {
        match self.bump().cloned() {
            Some(Token::Ident(name)) => {
                if self.pres.var_index(&name).is_some() {
                    RingElem::var(self.pres, &name)
                } else if self.pres.base().param_index(&name).is_some() {
                    let c = super::field::FieldElem::param(&name, self.pres.base())?;
                    Ok(RingElem::constant(self.pres, c))
                } else {
                    Err(Error::UnknownVariable(name))
                }
            }
            Some(Token::Int(v)) => Ok(RingElem::from_int(self.pres, v as i64)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            Some(Token::Minus) => Ok(self.atom()?.neg()),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a polynomial expression and reduces it to normal form. This is a
/// ring homomorphism from the free polynomial ring onto the quotient.
pub fn normal_form(src: &str, pres: &Arc<TriangularPresentation>) -> Result<RingElem> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        pres,
    };
    let elem = parser.expr()?;
    if parser.pos != tokens.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            parser.pos
        )));
    }
    Ok(elem)
}

/// Parses a comma-separated presentation description: each item is `name`
/// (free variable), `name^d` (relation name^d = 0), or `name^d=expr` with
/// the tail expression over earlier variables and parameters.
pub fn parse_presentation(
    p: u64,
    params: &[&str],
    src: &str,
) -> Result<Arc<TriangularPresentation>> {
    let base = super::field::BaseField::with_params(p, params)?;
    let mut builder = TriangularPresentation::builder(base);
    let trimmed = src.trim();
    if trimmed.is_empty() {
        return builder.build();
    }
    for item in trimmed.split(',') {
        let item = item.trim();
        let (head, tail) = match item.split_once('=') {
            Some((h, t)) => (h.trim(), Some(t.trim())),
            None => (item, None),
        };
        let (name, exponent) = match head.split_once('^') {
            Some((n, e)) => {
                let exp: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{item}`")))?;
                (n.trim(), Some(exp))
            }
            None => (head, None),
        };
        if name.is_empty() {
            return Err(Error::Parse(format!("missing variable name in `{item}`")));
        }
        builder = match (exponent, tail) {
            (None, None) => builder.free(name),
            (Some(d), None) => builder.nilpotent(name, d),
            (Some(d), Some(t)) => builder.algebraic(name, d, t),
            (None, Some(_)) => {
                return Err(Error::Parse(format!(
                    "relation `{item}` needs an exponent, e.g. `y^2=a`"
                )))
            }
        };
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::field::BaseField;

    fn pres() -> Arc<TriangularPresentation> {
        TriangularPresentation::builder(BaseField::with_params(3, &["a"]).unwrap())
            .nilpotent("l1", 9)
            .nilpotent("l2", 3)
            .free("x")
            .build()
            .unwrap()
    }

    #[test]
    fn parses_arithmetic() {
        let pres = pres();
        let e = normal_form("(1 + 2*l1)^2 - 4*l1^2 + a x", &pres).unwrap();
        let expect = normal_form("1 + 4*l1 + a*x", &pres).unwrap();
        assert_eq!(e, expect);
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let pres = pres();
        assert!(matches!(
            normal_form("1 + zz", &pres),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn division_by_unit_only() {
        let pres = pres();
        assert!(normal_form("x / (1 + l1)", &pres).is_ok());
        assert!(normal_form("1 / l1", &pres).is_err());
        assert!(normal_form("(a + a^2) / a", &pres).is_ok());
    }

    #[test]
    fn print_parse_round_trip() {
        let pres = pres();
        for src in [
            "1 + l1*l2 + 2*l1^3",
            "a*x^2 + (a + 1)*l1",
            "(1 + a^2)*l2 + x",
            "2",
            "0",
        ] {
            let e = normal_form(src, &pres).unwrap();
            let printed = e.to_string();
            let reparsed = normal_form(&printed, &pres).unwrap();
            assert_eq!(e, reparsed, "round trip through `{printed}`");
        }
    }

    #[test]
    fn presentation_description_round_trips() {
        let pres = parse_presentation(2, &["a", "b"], "y^4=a, z^2=b + a*y^2, x").unwrap();
        assert_eq!(pres.num_vars(), 3);
        assert_eq!(pres.rank(), None);
        let again = parse_presentation(2, &["a", "b"], &pres.describe()).unwrap();
        assert!(pres.compatible(&again));
    }
}
