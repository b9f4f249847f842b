//! The guarding-script language: values, syntax tree, text and byte forms,
//! the cost-metered evaluator and the canonical-form analyzer.

pub mod ast;
pub mod canonical;
pub mod codec;
pub mod eval;
pub mod parser;
pub mod printer;
pub mod value;

pub use ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
pub use canonical::{analyze_canonical, CanonicalBranch, CanonicalForm, NotCanonical};
pub use codec::{decode_script, encode_script, DecodeError};
pub use eval::{evaluate, evaluate_with, CostReceipt, EvalContext, EvalError, EvalLimits, DEFAULT_COST_LIMIT};
pub use parser::{parse, ParseError};
pub use value::{BitString, Output, Payload, Script, Value, DEFAULT_MAX_WIDTH};
