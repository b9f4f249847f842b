//! Abstract syntax of the guarding-script language.

use super::value::Value;

/// Which part of the spending context a `CtxRef` names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ctx {
    /// The input whose script is being evaluated.
    SelfInput,
    /// All inputs of the spending transaction, resolved.
    Inputs,
    /// All outputs of the spending transaction.
    Outputs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

/// A node of a guarding script.
///
/// There is no recursion and no general loop: `Map` is the only repetition
/// construct and its length is capped at evaluation time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScriptExpr {
    Lit(Value),
    CtxRef(Ctx),
    Var(String),
    Field(Box<ScriptExpr>, String),
    ScriptOf(Box<ScriptExpr>),
    Index(Box<ScriptExpr>, Box<ScriptExpr>),
    Size(Box<ScriptExpr>),
    Arith(ArithOp, Box<ScriptExpr>, Box<ScriptExpr>),
    /// `base pow exp mod modulus`
    PowMod(Box<ScriptExpr>, Box<ScriptExpr>, Box<ScriptExpr>),
    Cmp(CmpOp, Box<ScriptExpr>, Box<ScriptExpr>),
    Bool(BoolOp, Box<ScriptExpr>, Box<ScriptExpr>),
    Not(Box<ScriptExpr>),
    /// `map(len, var -> body)`: bit string of `len` bits, bit `i` is `body` with `var = i`.
    Map {
        len: Box<ScriptExpr>,
        var: String,
        body: Box<ScriptExpr>,
    },
    Let {
        name: String,
        value: Box<ScriptExpr>,
        body: Box<ScriptExpr>,
    },
    If(Box<ScriptExpr>, Box<ScriptExpr>, Box<ScriptExpr>),
    /// True iff `lhs` equals `rhs` with the given payload fields replaced.
    CopyEq {
        lhs: Box<ScriptExpr>,
        rhs: Box<ScriptExpr>,
        overrides: Vec<(String, ScriptExpr)>,
    },
    Concat(Box<ScriptExpr>, Box<ScriptExpr>),
    /// An output built in place, never a real UTXO.
    Synth {
        script: Box<ScriptExpr>,
        fields: Vec<(String, ScriptExpr)>,
    },
}

use ScriptExpr as E;

// Small constructors, mostly for tests and the script builders.
#[allow(clippy::should_implement_trait)]
impl ScriptExpr {
    pub fn lit(v: impl Into<Value>) -> Self {
        E::Lit(v.into())
    }
    pub fn self_() -> Self {
        E::CtxRef(Ctx::SelfInput)
    }
    pub fn inputs() -> Self {
        E::CtxRef(Ctx::Inputs)
    }
    pub fn outputs() -> Self {
        E::CtxRef(Ctx::Outputs)
    }
    pub fn var(name: &str) -> Self {
        E::Var(name.to_string())
    }
    pub fn field(self, name: &str) -> Self {
        E::Field(Box::new(self), name.to_string())
    }
    pub fn script_of(self) -> Self {
        E::ScriptOf(Box::new(self))
    }
    pub fn at(self, index: ScriptExpr) -> Self {
        E::Index(Box::new(self), Box::new(index))
    }
    pub fn at_lit(self, index: i64) -> Self {
        self.at(E::lit(index))
    }
    pub fn size(self) -> Self {
        E::Size(Box::new(self))
    }
    pub fn arith(op: ArithOp, a: Self, b: Self) -> Self {
        E::Arith(op, Box::new(a), Box::new(b))
    }
    pub fn cmp(op: CmpOp, a: Self, b: Self) -> Self {
        E::Cmp(op, Box::new(a), Box::new(b))
    }
    pub fn eq(a: Self, b: Self) -> Self {
        E::cmp(CmpOp::Eq, a, b)
    }
    pub fn boolean(op: BoolOp, a: Self, b: Self) -> Self {
        E::Bool(op, Box::new(a), Box::new(b))
    }
    pub fn and(a: Self, b: Self) -> Self {
        E::boolean(BoolOp::And, a, b)
    }
    pub fn not(a: Self) -> Self {
        E::Not(Box::new(a))
    }

    /// Immediate children, in evaluation order.
    pub fn children(&self) -> Vec<&ScriptExpr> {
        match self {
            E::Lit(_) | E::CtxRef(_) | E::Var(_) => vec![],
            E::Field(e, _) | E::ScriptOf(e) | E::Size(e) | E::Not(e) => vec![e],
            E::Index(a, b) | E::Arith(_, a, b) | E::Cmp(_, a, b) | E::Bool(_, a, b) | E::Concat(a, b) => vec![a, b],
            E::PowMod(a, b, c) | E::If(a, b, c) => vec![a, b, c],
            E::Map { len, body, .. } => vec![len, body],
            E::Let { value, body, .. } => vec![value, body],
            E::CopyEq { lhs, rhs, overrides } => {
                let mut v: Vec<&ScriptExpr> = vec![lhs, rhs];
                v.extend(overrides.iter().map(|(_, e)| e));
                v
            }
            E::Synth { script, fields } => {
                let mut v: Vec<&ScriptExpr> = vec![script];
                v.extend(fields.iter().map(|(_, e)| e));
                v
            }
        }
    }

    /// Static weight: one per node. Strictly greater for any strict superterm.
    pub fn static_weight(&self) -> u64 {
        1 + self.children().into_iter().map(ScriptExpr::static_weight).sum::<u64>()
    }

    /// A-priori bound on evaluation cost when every `map` runs `max_width`
    /// times and every `pow` exponent has `max_exp_bits` bits.
    pub fn cost_bound(&self, max_width: u64, max_exp_bits: u64) -> u64 {
        let sub = |e: &ScriptExpr| e.cost_bound(max_width, max_exp_bits);
        match self {
            E::Map { len, body, .. } => 1 + sub(len) + max_width * sub(body),
            E::PowMod(a, b, c) => 1 + max_exp_bits + sub(a) + sub(b) + sub(c),
            E::If(c, a, b) => 1 + sub(c) + sub(a).max(sub(b)),
            _ => 1 + self.children().into_iter().map(sub).sum::<u64>(),
        }
    }

    /// Whether the context reference `ctx` occurs anywhere in this expression.
    pub fn mentions(&self, ctx: Ctx) -> bool {
        matches!(self, E::CtxRef(c) if *c == ctx) || self.children().iter().any(|c| c.mentions(ctx))
    }
}
