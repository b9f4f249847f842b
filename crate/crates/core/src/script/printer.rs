//! Renders scripts back into the text syntax. `parse(e.to_string()) == e`.

use std::fmt::{self, Display, Write};

use super::ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
use super::value::Value;

// Binding strength, loosest first.
const OPEN: u8 = 0;
const OR: u8 = 1;
const XOR: u8 = 2;
const AND: u8 = 3;
const CMP: u8 = 4;
const CONCAT: u8 = 5;
const ADD: u8 = 6;
const MUL: u8 = 7;
const UNARY: u8 = 8;
const ATOM: u8 = 9;

fn level(e: &ScriptExpr) -> u8 {
    match e {
        ScriptExpr::Let { .. } | ScriptExpr::If(..) => OPEN,
        ScriptExpr::Bool(BoolOp::Or, ..) => OR,
        ScriptExpr::Bool(BoolOp::Xor, ..) => XOR,
        ScriptExpr::Bool(BoolOp::And, ..) => AND,
        ScriptExpr::Cmp(..) => CMP,
        ScriptExpr::Concat(..) => CONCAT,
        ScriptExpr::Arith(ArithOp::Add | ArithOp::Sub, ..) => ADD,
        ScriptExpr::Arith(ArithOp::Mod, ..) | ScriptExpr::PowMod(..) => MUL,
        ScriptExpr::Not(_) => UNARY,
        ScriptExpr::Lit(Value::Int(i)) if i.sign() == num_bigint::Sign::Minus => UNARY,
        _ => ATOM,
    }
}

impl Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bits(b) => write!(f, "bits\"{}\"", b.to_text()),
            Value::Script(s) => write!(f, "script\"{}\"", hex::encode(s.bytes())),
        }
    }
}

impl Display for ScriptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, OPEN)
    }
}

fn write_expr<W: Write>(w: &mut W, e: &ScriptExpr, min: u8) -> fmt::Result {
    if level(e) < min {
        w.write_char('(')?;
        write_expr(w, e, OPEN)?;
        return w.write_char(')');
    }
    match e {
        ScriptExpr::Lit(v) => write!(w, "{v}"),
        ScriptExpr::CtxRef(c) => w.write_str(match c {
            Ctx::SelfInput => "self",
            Ctx::Inputs => "in",
            Ctx::Outputs => "out",
        }),
        ScriptExpr::Var(name) => w.write_str(name),
        ScriptExpr::Field(base, name) => {
            write_expr(w, base, ATOM)?;
            write!(w, ".{name}")
        }
        ScriptExpr::ScriptOf(base) => {
            write_expr(w, base, ATOM)?;
            w.write_str(".script")
        }
        ScriptExpr::Size(base) => {
            write_expr(w, base, ATOM)?;
            w.write_str(".size")
        }
        ScriptExpr::Index(base, idx) => {
            write_expr(w, base, ATOM)?;
            w.write_char('[')?;
            write_expr(w, idx, OPEN)?;
            w.write_char(']')
        }
        ScriptExpr::Not(inner) => {
            w.write_char('!')?;
            write_expr(w, inner, UNARY)
        }
        ScriptExpr::Bool(op, a, b) => {
            let (sym, lvl) = match op {
                BoolOp::Or => ("|", OR),
                BoolOp::Xor => ("^", XOR),
                BoolOp::And => ("&", AND),
            };
            infix(w, a, sym, b, lvl)
        }
        ScriptExpr::Cmp(op, a, b) => {
            write_expr(w, a, CMP + 1)?;
            w.write_str(match op {
                CmpOp::Eq => " = ",
                CmpOp::Lt => " < ",
            })?;
            write_expr(w, b, CMP + 1)
        }
        ScriptExpr::Concat(a, b) => infix(w, a, "++", b, CONCAT),
        ScriptExpr::Arith(op, a, b) => match op {
            ArithOp::Add => infix(w, a, "+", b, ADD),
            ArithOp::Sub => infix(w, a, "-", b, ADD),
            ArithOp::Mod => infix(w, a, "mod", b, MUL),
        },
        ScriptExpr::PowMod(base, exp, modulus) => {
            write_expr(w, base, UNARY)?;
            w.write_str(" pow ")?;
            write_expr(w, exp, UNARY)?;
            w.write_str(" mod ")?;
            write_expr(w, modulus, UNARY)
        }
        ScriptExpr::Map { len, var, body } => {
            w.write_str("map(")?;
            write_expr(w, len, OPEN)?;
            write!(w, ", {var} -> ")?;
            write_expr(w, body, OPEN)?;
            w.write_char(')')
        }
        ScriptExpr::Let { name, value, body } => {
            write!(w, "let {name} = ")?;
            write_expr(w, value, OPEN)?;
            w.write_str(" in ")?;
            write_expr(w, body, OPEN)
        }
        ScriptExpr::If(c, a, b) => {
            w.write_str("if ")?;
            write_expr(w, c, OPEN)?;
            w.write_str(" then ")?;
            write_expr(w, a, OPEN)?;
            let mut rest = b.as_ref();
            while let ScriptExpr::If(c2, a2, b2) = rest {
                w.write_str(" elif ")?;
                write_expr(w, c2, OPEN)?;
                w.write_str(" then ")?;
                write_expr(w, a2, OPEN)?;
                rest = b2;
            }
            w.write_str(" else ")?;
            write_expr(w, rest, OPEN)
        }
        ScriptExpr::CopyEq { lhs, rhs, overrides } => {
            w.write_str("copyEq(")?;
            write_expr(w, lhs, OPEN)?;
            w.write_str(", ")?;
            write_expr(w, rhs, OPEN)?;
            assignments(w, overrides)?;
            w.write_char(')')
        }
        ScriptExpr::Synth { script, fields } => {
            w.write_str("synth(")?;
            write_expr(w, script, OPEN)?;
            assignments(w, fields)?;
            w.write_char(')')
        }
    }
}

fn infix<W: Write>(w: &mut W, a: &ScriptExpr, sym: &str, b: &ScriptExpr, lvl: u8) -> fmt::Result {
    write_expr(w, a, lvl)?;
    write!(w, " {sym} ")?;
    write_expr(w, b, lvl + 1)
}

fn assignments<W: Write>(w: &mut W, items: &[(String, ScriptExpr)]) -> fmt::Result {
    for (name, e) in items {
        write!(w, ", {name} <- ")?;
        write_expr(w, e, OPEN)?;
    }
    Ok(())
}
