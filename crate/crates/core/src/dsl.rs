//! Expression language for writing operators and kernel polynomials.
//!
//! Grammar (whitespace insignificant, identifiers case-sensitive):
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := factor (('*' factor) | ('/' number) | paren-factor)* ;
//! factor := atom ('^' uint)? | '-' factor ;
//! atom   := number | 'i' | gen | '(' expr ')' ;
//! gen    := 'x' | 'y' | 'Dx' | 'Dy'     (operator mode)
//!         | 'xi' | 'eta'                (polynomial mode)
//! ```
//!
//! Multiplication is `*` or juxtaposition of a parenthesized factor;
//! division is only by nonzero numeric literals; the imaginary unit is
//! spelled `i` (`2*i`, never `2i`); exponents are nonnegative integers and
//! `^` folds right. Parsing accepts both generator modes, lowering enforces
//! the mode.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{Poly2, WeylOp};

/// Generator leaf of an expression tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DslGen {
    X,
    Y,
    Dx,
    Dy,
    Xi,
    Eta,
}

impl DslGen {
    fn name(self) -> &'static str {
        match self {
            DslGen::X => "x",
            DslGen::Y => "y",
            DslGen::Dx => "Dx",
            DslGen::Dy => "Dy",
            DslGen::Xi => "xi",
            DslGen::Eta => "eta",
        }
    }
}

/// Abstract syntax tree of a parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Const(Complex64),
    Gen(DslGen),
    Sum(Vec<OpExpr>),
    Prod(Vec<OpExpr>),
    Pow(Box<OpExpr>, u32),
    Neg(Box<OpExpr>),
}

#[derive(Debug, Error, PartialEq)]
pub enum DslError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} must be a nonnegative integer")]
    BadExponent { offset: usize },
    #[error("division at byte {offset} requires a nonzero numeric literal")]
    BadDivisor { offset: usize },
    #[error("operator-mode generator '{name}' not allowed in a polynomial")]
    OperatorGenInPoly { name: &'static str },
    #[error("polynomial-mode generator '{name}' not allowed in an operator")]
    PolyGenInOp { name: &'static str },
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'+' => push(&mut toks, Tok::Plus, &mut pos),
            b'-' => push(&mut toks, Tok::Minus, &mut pos),
            b'*' => push(&mut toks, Tok::Star, &mut pos),
            b'/' => push(&mut toks, Tok::Slash, &mut pos),
            b'^' => push(&mut toks, Tok::Caret, &mut pos),
            b'(' => push(&mut toks, Tok::LParen, &mut pos),
            b')' => push(&mut toks, Tok::RParen, &mut pos),
            b'0'..=b'9' | b'.' => {
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'.' {
                    pos += 1;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
                let lit = &text[start..pos];
                let value = lit.parse::<f64>().map_err(|_| DslError::Syntax {
                    offset: start,
                    message: format!("bad numeric literal '{lit}'"),
                })?;
                toks.push((Tok::Num(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = pos;
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric()) {
                    pos += 1;
                }
                toks.push((Tok::Ident(text[start..pos].to_owned()), start));
            }
            _ => {
                return Err(DslError::Syntax {
                    offset: pos,
                    message: format!("unexpected character '{}'", text[pos..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(toks)
}

fn push(toks: &mut Vec<(Tok, usize)>, t: Tok, pos: &mut usize) {
    toks.push((t, *pos));
    *pos += 1;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.at).map(|&(_, o)| o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<OpExpr, DslError> {
        let mut parts = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    parts.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    parts.push(OpExpr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            OpExpr::Sum(parts)
        })
    }

    fn term(&mut self) -> Result<OpExpr, DslError> {
        let mut parts = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    parts.push(self.factor()?);
                }
                Some(Tok::Slash) => {
                    let off = self.offset();
                    self.bump();
                    let d = match self.bump() {
                        Some(Tok::Num(v)) => v,
                        _ => return Err(DslError::BadDivisor { offset: off }),
                    };
                    if d == 0.0 {
                        return Err(DslError::BadDivisor { offset: off });
                    }
                    parts.push(OpExpr::Const(Complex64::new(1.0 / d, 0.0)));
                }
                // Juxtaposed parenthesized factor: "(x+1)(y+2)".
                Some(Tok::LParen) => parts.push(self.factor()?),
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            OpExpr::Prod(parts)
        })
    }

    fn factor(&mut self) -> Result<OpExpr, DslError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(OpExpr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let e = self.exponent()?;
            return Ok(OpExpr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    /// A chain `uint ('^' uint)*` folded right, so `x^2^3 = x^8`.
    fn exponent(&mut self) -> Result<u32, DslError> {
        let off = self.offset();
        let mut stack = vec![self.uint()?];
        while let Some(Tok::Caret) = self.peek() {
            self.bump();
            stack.push(self.uint()?);
        }
        let mut e = stack.pop().unwrap();
        while let Some(b) = stack.pop() {
            let folded = (b as u64).checked_pow(e).unwrap_or(u64::MAX);
            if folded > 65_535 {
                return Err(DslError::BadExponent { offset: off });
            }
            e = folded as u32;
        }
        Ok(e)
    }

    fn uint(&mut self) -> Result<u32, DslError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && (0.0..=65_535.0).contains(&v) => Ok(v as u32),
            _ => Err(DslError::BadExponent { offset: off }),
        }
    }

    fn atom(&mut self) -> Result<OpExpr, DslError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(OpExpr::Const(Complex64::new(v, 0.0))),
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(OpExpr::Const(Complex64::new(0.0, 1.0))),
                "x" => Ok(OpExpr::Gen(DslGen::X)),
                "y" => Ok(OpExpr::Gen(DslGen::Y)),
                "Dx" => Ok(OpExpr::Gen(DslGen::Dx)),
                "Dy" => Ok(OpExpr::Gen(DslGen::Dy)),
                "xi" => Ok(OpExpr::Gen(DslGen::Xi)),
                "eta" => Ok(OpExpr::Gen(DslGen::Eta)),
                _ => Err(DslError::UnknownIdentifier { offset: off, name }),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(DslError::Syntax {
                        offset: self.toks.get(self.at - 1).map(|&(_, o)| o).unwrap_or(self.end),
                        message: "expected ')'".to_owned(),
                    }),
                }
            }
            _ => Err(DslError::Syntax {
                offset: off,
                message: "expected a number, identifier or '('".to_owned(),
            }),
        }
    }
}

/// Parses an expression into an AST; both generator modes are accepted here.
pub fn parse_op(text: &str) -> Result<OpExpr, DslError> {
    if text.trim().is_empty() {
        return Err(DslError::Syntax {
            offset: 0,
            message: "empty input".to_owned(),
        });
    }
    let toks = lex(text)?;
    let mut parser = Parser {
        toks: &toks,
        at: 0,
        end: text.len(),
    };
    let e = parser.expr()?;
    if parser.at != toks.len() {
        return Err(DslError::Syntax {
            offset: parser.offset(),
            message: "unexpected trailing input".to_owned(),
        });
    }
    Ok(e)
}

/// Lowers an operator-mode AST to a normal-ordered `WeylOp`, respecting the
/// source multiplication order before normalization.
pub fn lower(expr: &OpExpr) -> Result<WeylOp, DslError> {
    use crate::algebra::Gen;
    Ok(match expr {
        OpExpr::Const(c) => WeylOp::constant(*c),
        OpExpr::Gen(g) => match g {
            DslGen::X => WeylOp::generator(Gen::M1),
            DslGen::Y => WeylOp::generator(Gen::M2),
            DslGen::Dx => WeylOp::generator(Gen::D1),
            DslGen::Dy => WeylOp::generator(Gen::D2),
            DslGen::Xi | DslGen::Eta => {
                return Err(DslError::PolyGenInOp { name: g.name() })
            }
        },
        OpExpr::Sum(parts) => {
            let mut acc = WeylOp::zero();
            for p in parts {
                acc = acc.add(&lower(p)?);
            }
            acc
        }
        OpExpr::Prod(parts) => {
            let mut acc = WeylOp::identity();
            for p in parts {
                acc = acc.normal_mul(&lower(p)?);
            }
            acc
        }
        OpExpr::Pow(base, e) => lower(base)?.pow(*e),
        OpExpr::Neg(inner) => lower(inner)?.scale(Complex64::new(-1.0, 0.0)),
    })
}

/// Parses an operator-mode expression straight to a `WeylOp`.
pub fn parse_weyl(text: &str) -> Result<WeylOp, DslError> {
    lower(&parse_op(text)?)
}

/// Parses a polynomial-mode expression (variables ξ = `xi`, η = `eta`).
pub fn parse_poly2(text: &str) -> Result<Poly2, DslError> {
    fn lower_poly(expr: &OpExpr) -> Result<Poly2, DslError> {
        Ok(match expr {
            OpExpr::Const(c) => Poly2::constant(*c),
            OpExpr::Gen(g) => match g {
                DslGen::Xi => Poly2::xi(),
                DslGen::Eta => Poly2::eta(),
                other => {
                    return Err(DslError::OperatorGenInPoly { name: other.name() })
                }
            },
            OpExpr::Sum(parts) => {
                let mut acc = Poly2::zero();
                for p in parts {
                    acc = acc.add(&lower_poly(p)?);
                }
                acc
            }
            OpExpr::Prod(parts) => {
                let mut acc = Poly2::one();
                for p in parts {
                    acc = acc.mul(&lower_poly(p)?);
                }
                acc
            }
            OpExpr::Pow(base, e) => lower_poly(base)?.pow(*e),
            OpExpr::Neg(inner) => lower_poly(inner)?.scale(Complex64::new(-1.0, 0.0)),
        })
    }
    lower_poly(&parse_op(text)?)
}
