//! Cost-metered evaluation of guarding scripts.
//!
//! Every visited node costs one unit. `pow ... mod` additionally costs the
//! bit length of its exponent, and `map` pays for its body once per index.
//! Evaluation is strict in `&`, `|` and `^` (both sides are always
//! evaluated) so the cost of a script depends only on which `if` branches
//! are taken and on `map` lengths, never on short-circuiting.

use std::borrow::Cow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
use super::value::{BitString, Output, Value, DEFAULT_MAX_WIDTH};

/// Per-input cost limit used when none is configured.
pub const DEFAULT_COST_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("cost limit of {limit} units exceeded")]
    CostLimitExceeded { limit: u64 },
    #[error("bit string of length {len} exceeds the width cap {max}")]
    WidthExceeded { len: BigInt, max: usize },
    #[error("type error: expected {expected}, found {found}")]
    Type {
        expected: &'static str,
        found: &'static str,
    },
    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: BigInt, len: usize },
    #[error("missing payload field `{0}`")]
    MissingField(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arithmetic error: {0}")]
    Arithmetic(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReceipt {
    pub total: u64,
    pub limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalLimits {
    pub cost_limit: u64,
    pub max_width: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            cost_limit: DEFAULT_COST_LIMIT,
            max_width: DEFAULT_MAX_WIDTH,
        }
    }
}

/// The read-only view a script gets of the spending transaction.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    inputs: &'a [Output],
    outputs: &'a [Output],
    self_index: usize,
}

impl<'a> EvalContext<'a> {
    /// `None` unless `self_index` points into `inputs`.
    pub fn new(inputs: &'a [Output], outputs: &'a [Output], self_index: usize) -> Option<Self> {
        (self_index < inputs.len()).then_some(EvalContext {
            inputs,
            outputs,
            self_index,
        })
    }

    pub fn inputs(&self) -> &'a [Output] {
        self.inputs
    }

    pub fn outputs(&self) -> &'a [Output] {
        self.outputs
    }

    pub fn self_input(&self) -> &'a Output {
        &self.inputs[self.self_index]
    }
}

/// Evaluates `script` with the default width cap and the given cost limit.
pub fn evaluate(script: &ScriptExpr, ctx: &EvalContext<'_>, limit: u64) -> Result<(Value, CostReceipt), EvalError> {
    evaluate_with(
        script,
        ctx,
        &EvalLimits {
            cost_limit: limit,
            ..EvalLimits::default()
        },
    )
}

pub fn evaluate_with(
    script: &ScriptExpr,
    ctx: &EvalContext<'_>,
    limits: &EvalLimits,
) -> Result<(Value, CostReceipt), EvalError> {
    let mut ev = Evaluator {
        ctx: *ctx,
        limits: *limits,
        used: 0,
        env: Vec::new(),
    };
    match ev.eval(script)? {
        Datum::Val(v) => Ok((
            v,
            CostReceipt {
                total: ev.used,
                limit: limits.cost_limit,
            },
        )),
        other => Err(EvalError::Type {
            expected: "value",
            found: other.type_name(),
        }),
    }
}

#[derive(Debug, Clone)]
enum Datum<'a> {
    Val(Value),
    Out(Cow<'a, Output>),
    List(Vec<Cow<'a, Output>>),
}

impl Datum<'_> {
    fn type_name(&self) -> &'static str {
        match self {
            Datum::Val(v) => v.type_name(),
            Datum::Out(_) => "output",
            Datum::List(_) => "output list",
        }
    }
}

struct Evaluator<'a, 'e> {
    ctx: EvalContext<'a>,
    limits: EvalLimits,
    used: u64,
    env: Vec<(&'e str, Datum<'a>)>,
}

fn type_err<T>(expected: &'static str, found: &Datum<'_>) -> Result<T, EvalError> {
    Err(EvalError::Type {
        expected,
        found: found.type_name(),
    })
}

impl<'a, 'e> Evaluator<'a, 'e> {
    fn charge(&mut self, units: u64) -> Result<(), EvalError> {
        self.used = self.used.saturating_add(units);
        if self.used > self.limits.cost_limit {
            return Err(EvalError::CostLimitExceeded {
                limit: self.limits.cost_limit,
            });
        }
        Ok(())
    }

    fn value(&mut self, e: &'e ScriptExpr) -> Result<Value, EvalError> {
        match self.eval(e)? {
            Datum::Val(v) => Ok(v),
            other => type_err("value", &other),
        }
    }

    fn int(&mut self, e: &'e ScriptExpr) -> Result<BigInt, EvalError> {
        match self.eval(e)? {
            Datum::Val(Value::Int(i)) => Ok(i),
            other => type_err("int", &other),
        }
    }

    fn boolean(&mut self, e: &'e ScriptExpr) -> Result<bool, EvalError> {
        match self.eval(e)? {
            Datum::Val(Value::Bool(b)) => Ok(b),
            other => type_err("bool", &other),
        }
    }

    fn output(&mut self, e: &'e ScriptExpr) -> Result<Cow<'a, Output>, EvalError> {
        match self.eval(e)? {
            Datum::Out(o) => Ok(o),
            other => type_err("output", &other),
        }
    }

    fn eval(&mut self, e: &'e ScriptExpr) -> Result<Datum<'a>, EvalError> {
        self.charge(1)?;
        Ok(match e {
            ScriptExpr::Lit(v) => Datum::Val(v.clone()),
            ScriptExpr::CtxRef(Ctx::SelfInput) => Datum::Out(Cow::Borrowed(self.ctx.self_input())),
            ScriptExpr::CtxRef(Ctx::Inputs) => Datum::List(self.ctx.inputs.iter().map(Cow::Borrowed).collect()),
            ScriptExpr::CtxRef(Ctx::Outputs) => Datum::List(self.ctx.outputs.iter().map(Cow::Borrowed).collect()),
            ScriptExpr::Var(name) => self
                .env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, d)| d.clone())
                .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
            ScriptExpr::Field(base, name) => {
                let out = self.output(base)?;
                let v = out
                    .payload
                    .get(name)
                    .ok_or_else(|| EvalError::MissingField(name.clone()))?;
                Datum::Val(v.clone())
            }
            ScriptExpr::ScriptOf(base) => {
                let out = self.output(base)?;
                Datum::Val(Value::Script(out.script.clone()))
            }
            ScriptExpr::Index(base, idx) => {
                let base = self.eval(base)?;
                let i = self.int(idx)?;
                let len = match &base {
                    Datum::List(items) => items.len(),
                    Datum::Val(Value::Bits(b)) => b.len(),
                    other => return type_err("output list or bits", other),
                };
                let pos = i
                    .to_usize()
                    .filter(|&p| p < len)
                    .ok_or(EvalError::IndexOutOfBounds { index: i, len })?;
                match base {
                    Datum::List(mut items) => Datum::Out(items.swap_remove(pos)),
                    Datum::Val(Value::Bits(b)) => Datum::Val(Value::Bool(b.bits()[pos])),
                    _ => unreachable!(),
                }
            }
            ScriptExpr::Size(base) => {
                let len = match self.eval(base)? {
                    Datum::List(items) => items.len(),
                    Datum::Val(Value::Bits(b)) => b.len(),
                    other => return type_err("output list or bits", &other),
                };
                Datum::Val(Value::Int(BigInt::from(len)))
            }
            ScriptExpr::Arith(op, a, b) => {
                let (a, b) = (self.int(a)?, self.int(b)?);
                let r = match op {
                    ArithOp::Add => a + b,
                    ArithOp::Sub => a - b,
                    ArithOp::Mod => {
                        if !b.is_positive() {
                            return Err(EvalError::Arithmetic("modulus must be positive"));
                        }
                        a.mod_floor(&b)
                    }
                };
                Datum::Val(Value::Int(r))
            }
            ScriptExpr::PowMod(base, exp, modulus) => {
                let base = self.int(base)?;
                let exp = self.int(exp)?;
                let modulus = self.int(modulus)?;
                if exp.is_negative() {
                    return Err(EvalError::Arithmetic("negative exponent"));
                }
                if !modulus.is_positive() {
                    return Err(EvalError::Arithmetic("modulus must be positive"));
                }
                self.charge(exp.bits())?;
                let r = base.mod_floor(&modulus).modpow(&exp, &modulus);
                Datum::Val(Value::Int(r))
            }
            ScriptExpr::Cmp(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                let r = match (op, &a, &b) {
                    (CmpOp::Lt, Datum::Val(Value::Int(x)), Datum::Val(Value::Int(y))) => x < y,
                    (CmpOp::Lt, Datum::Val(Value::Int(_)), other) | (CmpOp::Lt, other, _) => {
                        return type_err("int", other)
                    }
                    (CmpOp::Eq, Datum::Val(x), Datum::Val(y)) => x == y,
                    (CmpOp::Eq, Datum::Out(x), Datum::Out(y)) => x == y,
                    (CmpOp::Eq, Datum::List(x), Datum::List(y)) => x == y,
                    (CmpOp::Eq, x, y) => {
                        return Err(EvalError::Type {
                            expected: x.type_name(),
                            found: y.type_name(),
                        })
                    }
                };
                Datum::Val(Value::Bool(r))
            }
            ScriptExpr::Bool(op, a, b) => {
                let (a, b) = (self.boolean(a)?, self.boolean(b)?);
                Datum::Val(Value::Bool(match op {
                    BoolOp::And => a & b,
                    BoolOp::Or => a | b,
                    BoolOp::Xor => a ^ b,
                }))
            }
            ScriptExpr::Not(a) => Datum::Val(Value::Bool(!self.boolean(a)?)),
            ScriptExpr::Map { len, var, body } => {
                let len = self.int(len)?;
                if len.is_negative() {
                    return Err(EvalError::Arithmetic("negative map length"));
                }
                let n = len
                    .to_usize()
                    .filter(|&n| n <= self.limits.max_width)
                    .ok_or(EvalError::WidthExceeded {
                        len: len.clone(),
                        max: self.limits.max_width,
                    })?;
                let mut bits = Vec::with_capacity(n);
                for i in 0..n {
                    self.env.push((var.as_str(), Datum::Val(Value::Int(BigInt::from(i)))));
                    let bit = self.boolean(body);
                    self.env.pop();
                    bits.push(bit?);
                }
                Datum::Val(Value::Bits(BitString::new(bits)))
            }
            ScriptExpr::Let { name, value, body } => {
                let v = self.eval(value)?;
                self.env.push((name.as_str(), v));
                let r = self.eval(body);
                self.env.pop();
                r?
            }
            ScriptExpr::If(c, a, b) => {
                if self.boolean(c)? {
                    self.eval(a)?
                } else {
                    self.eval(b)?
                }
            }
            ScriptExpr::CopyEq { lhs, rhs, overrides } => {
                let lhs = self.output(lhs)?;
                let mut copy = self.output(rhs)?.into_owned();
                for (name, e) in overrides {
                    let v = self.value(e)?;
                    if !copy.payload.contains(name) {
                        return Err(EvalError::MissingField(name.clone()));
                    }
                    copy.payload.set(name.as_str(), v);
                }
                Datum::Val(Value::Bool(*lhs == copy))
            }
            ScriptExpr::Concat(a, b) => {
                let mut items = self.as_list(a)?;
                items.extend(self.as_list(b)?);
                Datum::List(items)
            }
            ScriptExpr::Synth { script, fields } => {
                let script = match self.value(script)? {
                    Value::Script(s) => s,
                    other => return type_err("script", &Datum::Val(other)),
                };
                let mut out = Output::new(script, Default::default());
                for (name, e) in fields {
                    let v = self.value(e)?;
                    out.payload.set(name.as_str(), v);
                }
                Datum::Out(Cow::Owned(out))
            }
        })
    }

    fn as_list(&mut self, e: &'e ScriptExpr) -> Result<Vec<Cow<'a, Output>>, EvalError> {
        match self.eval(e)? {
            Datum::Out(o) => Ok(vec![o]),
            Datum::List(items) => Ok(items),
            other => type_err("output or output list", &other),
        }
    }
}
