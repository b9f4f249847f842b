//! Text syntax for guarding scripts.
//!
//! ```text
//! expr    := 'let' IDENT '=' expr 'in' expr
//!          | 'if' expr 'then' expr ('elif' expr 'then' expr)* 'else' expr
//!          | or
//! or      := xor ('|' xor)*
//! xor     := and ('^' and)*
//! and     := cmp ('&' cmp)*
//! cmp     := concat (('=' | '<') concat)?
//! concat  := add ('++' add)*
//! add     := mul (('+' | '-') mul)*
//! mul     := unary ('mod' unary | 'pow' unary 'mod' unary)*
//! unary   := '!' unary | '-' unary | postfix
//! postfix := primary ('.' IDENT | '[' expr ']')*
//! primary := INT | 'true' | 'false' | bits"0101" | script"<hex>"
//!          | 'self' | 'in' | 'out' | IDENT | '(' expr ')'
//!          | 'map' '(' expr ',' IDENT '->' expr ')'
//!          | 'copyEq' '(' expr ',' expr (',' IDENT '<-' expr)* ')'
//!          | 'synth' '(' expr (',' IDENT '<-' expr)* ')'
//!          | 'let' ... | 'if' ...
//! ```
//!
//! `.size` and `.script` are accessors, not payload fields. `pow` must be
//! followed by `mod`. `-` applied to an integer literal yields a negative
//! literal; applied to anything else it means `0 - e`. `//` starts a comment.

use std::collections::HashSet;

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
use super::value::{BitString, Script, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown field `{name}` at {line}:{col}")]
    UnknownField { name: String, line: usize, col: usize },
    #[error("`{construct}` at {line}:{col} expects {expected}, got {found} argument(s)")]
    Arity {
        construct: &'static str,
        expected: &'static str,
        found: usize,
        line: usize,
        col: usize,
    },
}

/// Names that cannot be payload fields because `.name` means something else.
pub const RESERVED_FIELDS: [&str; 2] = ["size", "script"];

const KEYWORDS: [&str; 15] = [
    "self", "in", "out", "true", "false", "let", "if", "then", "elif", "else", "map", "copyEq", "synth", "mod", "pow",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn parse(source: &str) -> Result<ScriptExpr, ParseError> {
    Parser::new(source, None)?.parse_all()
}

/// Like [`parse`], but field accesses must name one of `fields`.
pub fn parse_with_fields(source: &str, fields: &[&str]) -> Result<ScriptExpr, ParseError> {
    let known = fields.iter().map(|s| s.to_string()).collect();
    Parser::new(source, Some(known))?.parse_all()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Bits(BitString),
    ScriptLit(Vec<u8>),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Arrow,
    Amp,
    Pipe,
    Caret,
    Bang,
    Eq,
    Lt,
    Plus,
    PlusPlus,
    Minus,
    LeftArrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    start: usize,
    end: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let offset = |i: usize| chars.get(i).map(|c| c.0).unwrap_or(src.len());
    let err = |line, col, msg: &str| ParseError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };

    while i < chars.len() {
        let c = chars[i].1;
        let (tline, tcol, tstart) = (line, col, offset(i));
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        let next = chars.get(i + 1).map(|c| c.1);
        if c == '/' && next == Some('/') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().map(|c| c.1).collect();
            advance(j - i, &mut i, &mut col);
            if (word == "bits" || word == "script") && chars.get(i).map(|c| c.1) == Some('"') {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != '"' && chars[j].1 != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j].1 != '"' {
                    return Err(err(tline, tcol, "unterminated literal"));
                }
                let text: String = chars[i + 1..j].iter().map(|c| c.1).collect();
                advance(j + 1 - i, &mut i, &mut col);
                if word == "bits" {
                    match BitString::parse(&text) {
                        Some(b) if !text.contains(char::is_whitespace) => Tok::Bits(b),
                        _ => return Err(err(tline, tcol, "bits literal must contain only 0 and 1")),
                    }
                } else {
                    match hex::decode(&text) {
                        Ok(bytes) => Tok::ScriptLit(bytes),
                        Err(_) => return Err(err(tline, tcol, "script literal must be hex")),
                    }
                }
            } else {
                Tok::Ident(word)
            }
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().map(|c| c.1).collect();
            advance(j - i, &mut i, &mut col);
            Tok::Int(digits.parse().expect("ascii digits"))
        } else {
            let (tok, n) = match (c, next) {
                ('+', Some('+')) => (Tok::PlusPlus, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Pipe, 1),
                ('^', _) => (Tok::Caret, 1),
                ('!', _) => (Tok::Bang, 1),
                ('=', _) => (Tok::Eq, 1),
                ('<', _) => (Tok::Lt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('←', _) => (Tok::LeftArrow, 1),
                ('∧', _) => (Tok::Amp, 1),
                ('∨', _) => (Tok::Pipe, 1),
                ('⊕', _) => (Tok::Caret, 1),
                ('¬', _) => (Tok::Bang, 1),
                _ => return Err(err(tline, tcol, &format!("unexpected character `{c}`"))),
            };
            advance(n, &mut i, &mut col);
            tok
        };
        tokens.push(Token {
            tok,
            line: tline,
            col: tcol,
            start: tstart,
            end: offset(i),
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        col,
        start: src.len(),
        end: src.len(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    fields: Option<HashSet<String>>,
}

type PResult = Result<ScriptExpr, ParseError>;

impl Parser {
    fn new(source: &str, fields: Option<HashSet<String>>) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(source)?,
            pos: 0,
            fields,
        })
    }

    fn parse_all(mut self) -> PResult {
        let e = self.expr()?;
        if self.peek() != &Tok::Eof {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn token(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn error(&self, msg: &str) -> ParseError {
        let t = self.token();
        let found = match &t.tok {
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        };
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("{msg} (found {found})"),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{kw}`")))
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) if !is_keyword(&w) => {
                let t = self.bump();
                Ok((w, t.line, t.col))
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> PResult {
        if self.is_kw("let") {
            self.bump();
            let (name, _, _) = self.name("variable name")?;
            self.expect(Tok::Eq, "`=`")?;
            let value = self.expr()?;
            self.expect_kw("in")?;
            let body = self.expr()?;
            return Ok(ScriptExpr::Let {
                name,
                value: Box::new(value),
                body: Box::new(body),
            });
        }
        if self.is_kw("if") {
            self.bump();
            return self.if_rest();
        }
        self.or()
    }

    fn if_rest(&mut self) -> PResult {
        let cond = self.expr()?;
        self.expect_kw("then")?;
        let then = self.expr()?;
        let otherwise = if self.is_kw("elif") {
            self.bump();
            self.if_rest()?
        } else {
            self.expect_kw("else")?;
            self.expr()?
        };
        Ok(ScriptExpr::If(Box::new(cond), Box::new(then), Box::new(otherwise)))
    }

    fn left_assoc(&mut self, next: fn(&mut Self) -> PResult, op_of: fn(&Tok) -> Option<BoolOp>) -> PResult {
        let mut lhs = next(self)?;
        while let Some(op) = op_of(self.peek()) {
            self.bump();
            let rhs = next(self)?;
            lhs = ScriptExpr::boolean(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult {
        self.left_assoc(Self::xor, |t| (t == &Tok::Pipe).then_some(BoolOp::Or))
    }

    fn xor(&mut self) -> PResult {
        self.left_assoc(Self::and, |t| (t == &Tok::Caret).then_some(BoolOp::Xor))
    }

    fn and(&mut self) -> PResult {
        self.left_assoc(Self::cmp, |t| (t == &Tok::Amp).then_some(BoolOp::And))
    }

    fn cmp(&mut self) -> PResult {
        let lhs = self.concat()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Lt => CmpOp::Lt,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.concat()?;
        if matches!(self.peek(), Tok::Eq | Tok::Lt) {
            return Err(self.error("comparisons do not chain; use `&`"));
        }
        Ok(ScriptExpr::cmp(op, lhs, rhs))
    }

    fn concat(&mut self) -> PResult {
        let mut lhs = self.add()?;
        while self.peek() == &Tok::PlusPlus {
            self.bump();
            let rhs = self.add()?;
            lhs = ScriptExpr::Concat(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn add(&mut self) -> PResult {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.mul()?;
            lhs = ScriptExpr::arith(op, lhs, rhs);
        }
    }

    fn mul(&mut self) -> PResult {
        let mut lhs = self.unary()?;
        loop {
            if self.is_kw("mod") {
                self.bump();
                let rhs = self.unary()?;
                lhs = ScriptExpr::arith(ArithOp::Mod, lhs, rhs);
            } else if self.is_kw("pow") {
                self.bump();
                let exp = self.unary()?;
                if !self.is_kw("mod") {
                    return Err(self.error("`pow` must be followed by `mod <modulus>`"));
                }
                self.bump();
                let modulus = self.unary()?;
                lhs = ScriptExpr::PowMod(Box::new(lhs), Box::new(exp), Box::new(modulus));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(ScriptExpr::not(self.unary()?))
            }
            Tok::Minus => {
                self.bump();
                match self.unary()? {
                    ScriptExpr::Lit(Value::Int(i)) => Ok(ScriptExpr::Lit(Value::Int(-i))),
                    e => Ok(ScriptExpr::arith(ArithOp::Sub, ScriptExpr::lit(0), e)),
                }
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.bump();
                    let (name, line, col) = match self.peek().clone() {
                        Tok::Ident(w) => {
                            let t = self.bump();
                            (w, t.line, t.col)
                        }
                        _ => return Err(self.error("expected field name after `.`")),
                    };
                    e = match name.as_str() {
                        "size" => ScriptExpr::Size(Box::new(e)),
                        "script" => ScriptExpr::ScriptOf(Box::new(e)),
                        _ => {
                            self.check_field(&name, line, col)?;
                            ScriptExpr::Field(Box::new(e), name)
                        }
                    };
                }
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    e = ScriptExpr::Index(Box::new(e), Box::new(idx));
                }
                _ => return Ok(e),
            }
        }
    }

    fn check_field(&self, name: &str, line: usize, col: usize) -> Result<(), ParseError> {
        let unknown = RESERVED_FIELDS.contains(&name)
            || is_keyword(name)
            || self.fields.as_ref().is_some_and(|f| !f.contains(name));
        if unknown {
            return Err(ParseError::UnknownField {
                name: name.to_string(),
                line,
                col,
            });
        }
        Ok(())
    }

    fn primary(&mut self) -> PResult {
        let t = self.token().clone();
        match t.tok {
            Tok::Int(i) => {
                self.bump();
                Ok(ScriptExpr::Lit(Value::Int(i)))
            }
            Tok::Bits(b) => {
                self.bump();
                Ok(ScriptExpr::Lit(Value::Bits(b)))
            }
            Tok::ScriptLit(bytes) => {
                self.bump();
                let script = Script::from_bytes(&bytes).map_err(|e| ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: format!("invalid script literal: {e}"),
                })?;
                Ok(ScriptExpr::Lit(Value::Script(script)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(ref w) => match w.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(ScriptExpr::lit(w == "true"))
                }
                "self" => {
                    self.bump();
                    Ok(ScriptExpr::CtxRef(Ctx::SelfInput))
                }
                "in" => {
                    self.bump();
                    Ok(ScriptExpr::CtxRef(Ctx::Inputs))
                }
                "out" => {
                    self.bump();
                    Ok(ScriptExpr::CtxRef(Ctx::Outputs))
                }
                "let" | "if" => self.expr(),
                "map" => self.map(),
                "copyEq" => self.copy_eq(),
                "synth" => self.synth(),
                w if is_keyword(w) => Err(self.error("expected an expression")),
                _ => {
                    self.bump();
                    Ok(ScriptExpr::Var(w.clone()))
                }
            },
            _ => Err(self.error("expected an expression")),
        }
    }

    /// Arguments of a call-like form: positional expressions, then
    /// `name <- expr` assignments. Returns both lists.
    #[allow(clippy::type_complexity)]
    fn call_args(&mut self) -> Result<(Vec<ScriptExpr>, Vec<(String, ScriptExpr)>, usize, usize), ParseError> {
        let open = self.token().clone();
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let mut positional = Vec::new();
        let mut assigns: Vec<(String, ScriptExpr)> = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                if let Some((name, line, col)) = self.assignment_head()? {
                    if RESERVED_FIELDS.contains(&name.as_str()) {
                        return Err(ParseError::UnknownField { name, line, col });
                    }
                    self.check_field(&name, line, col)?;
                    if assigns.iter().any(|(n, _)| *n == name) {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            msg: format!("field `{name}` assigned twice"),
                        });
                    }
                    let e = self.expr()?;
                    assigns.push((name, e));
                } else if !assigns.is_empty() {
                    return Err(self.error("positional argument after field assignment"));
                } else {
                    positional.push(self.expr()?);
                }
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok((positional, assigns, open.line, open.col))
    }

    /// Consumes `IDENT <-` (or `IDENT ←`) if present.
    fn assignment_head(&mut self) -> Result<Option<(String, usize, usize)>, ParseError> {
        let (Tok::Ident(name), Some(next)) = (self.peek().clone(), self.tokens.get(self.pos + 1)) else {
            return Ok(None);
        };
        let arrow_len = match next.tok {
            Tok::LeftArrow => 1,
            Tok::Lt => match self.tokens.get(self.pos + 2) {
                Some(m) if m.tok == Tok::Minus && m.start == next.end => 2,
                _ => return Ok(None),
            },
            _ => return Ok(None),
        };
        if is_keyword(&name) {
            return Ok(None);
        }
        let t = self.bump();
        for _ in 0..arrow_len {
            self.bump();
        }
        Ok(Some((name, t.line, t.col)))
    }

    fn map(&mut self) -> PResult {
        let open = self.token().clone();
        self.bump();
        self.expect(Tok::LParen, "`(`")?;
        let len = self.expr()?;
        if self.peek() != &Tok::Comma {
            return Err(ParseError::Arity {
                construct: "map",
                expected: "a length and a lambda",
                found: 1,
                line: open.line,
                col: open.col,
            });
        }
        self.bump();
        let (var, _, _) = self.name("lambda parameter")?;
        self.expect(Tok::Arrow, "`->`")?;
        let body = self.expr()?;
        if self.peek() == &Tok::Comma {
            return Err(ParseError::Arity {
                construct: "map",
                expected: "a length and a lambda",
                found: 3,
                line: open.line,
                col: open.col,
            });
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(ScriptExpr::Map {
            len: Box::new(len),
            var,
            body: Box::new(body),
        })
    }

    fn copy_eq(&mut self) -> PResult {
        let (mut pos, overrides, line, col) = self.call_args()?;
        if pos.len() != 2 {
            return Err(ParseError::Arity {
                construct: "copyEq",
                expected: "two outputs",
                found: pos.len(),
                line,
                col,
            });
        }
        let rhs = pos.pop().unwrap();
        let lhs = pos.pop().unwrap();
        Ok(ScriptExpr::CopyEq {
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            overrides,
        })
    }

    fn synth(&mut self) -> PResult {
        let (mut pos, fields, line, col) = self.call_args()?;
        if pos.len() != 1 {
            return Err(ParseError::Arity {
                construct: "synth",
                expected: "one script",
                found: pos.len(),
                line,
                col,
            });
        }
        Ok(ScriptExpr::Synth {
            script: Box::new(pos.pop().unwrap()),
            fields,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ScriptExpr as E;

    #[test]
    fn self_script_equals_first_output_script() {
        let e = parse("self.script = out[0].script").unwrap();
        assert_eq!(e, E::eq(E::self_().script_of(), E::outputs().at_lit(0).script_of()));
    }

    #[test]
    fn rule110_formula_shape() {
        let e = parse("(l & c & r) ^ (c & r) ^ c ^ r").unwrap();
        let (l, c, r) = (E::var("l"), E::var("c"), E::var("r"));
        let lcr = E::and(E::and(l, c.clone()), r.clone());
        let cr = E::and(c.clone(), r.clone());
        let xor = |a, b| E::boolean(BoolOp::Xor, a, b);
        assert_eq!(e, xor(xor(xor(lcr, cr), c), r));
    }

    #[test]
    fn truncated_access_is_syntax_error() {
        match parse("out[0].") {
            Err(ParseError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_positions_count_lines() {
        match parse("true &\n  (out[0].x = ") {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pow_mod_binds_tighter_than_eq() {
        let e = parse("5 pow out[0].x mod 23 = 13").unwrap();
        assert_eq!(
            e,
            E::eq(
                E::PowMod(
                    Box::new(E::lit(5)),
                    Box::new(E::outputs().at_lit(0).field("x")),
                    Box::new(E::lit(23))
                ),
                E::lit(13)
            )
        );
        assert!(parse("5 pow 3").is_err());
    }

    #[test]
    fn mod_binds_tighter_than_minus() {
        let e = parse("(i - 1) mod n").unwrap();
        let f = parse("i - 1 mod n").unwrap();
        assert_ne!(e, f);
        assert!(matches!(e, E::Arith(ArithOp::Mod, _, _)));
        assert!(matches!(f, E::Arith(ArithOp::Sub, _, _)));
    }

    #[test]
    fn override_arrow_vs_less_than_negative() {
        let e = parse("copyEq(out[1], out[0], mid <- true)").unwrap();
        assert!(matches!(e, E::CopyEq { ref overrides, .. } if overrides.len() == 1));
        let e = parse("copyEq(out[1], out[0], mid ← true)").unwrap();
        assert!(matches!(e, E::CopyEq { ref overrides, .. } if overrides.len() == 1));
        // spaced `< -` is a comparison against a negative literal
        let e = parse("a < -3").unwrap();
        assert_eq!(e, E::cmp(CmpOp::Lt, E::var("a"), E::lit(-3)));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse("copyEq(out[1])"),
            Err(ParseError::Arity {
                construct: "copyEq",
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            parse("synth(self.script, in[0].script, x <- 1)"),
            Err(ParseError::Arity {
                construct: "synth",
                found: 2,
                ..
            })
        ));
        assert!(matches!(
            parse("map(3)"),
            Err(ParseError::Arity { construct: "map", .. })
        ));
    }

    #[test]
    fn reserved_and_schema_fields() {
        assert!(matches!(
            parse("synth(self.script, size <- 1)"),
            Err(ParseError::UnknownField { .. })
        ));
        assert!(matches!(
            parse_with_fields("out[0].layr = self.layer", &["layer"]),
            Err(ParseError::UnknownField { ref name, .. }) if name == "layr"
        ));
        assert!(parse_with_fields("out[0].layer = self.layer", &["layer"]).is_ok());
    }

    #[test]
    fn layout_is_insignificant() {
        let a = parse("let x = in[0].x in\n   x + 1 = out[0].x // trailing comment").unwrap();
        let b = parse("let x=in[0].x in x+1=out[0].x").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chained_comparison_is_rejected() {
        assert!(parse("in.size = out.size = 3").is_err());
    }

    #[test]
    fn elif_desugars_to_nested_if() {
        let e = parse("if a then 1 elif b then 2 else 3").unwrap();
        let f = parse("if a then 1 else if b then 2 else 3").unwrap();
        assert_eq!(e, f);
    }
}
