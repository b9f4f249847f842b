//! Canonical byte form of scripts, values and payloads.
//!
//! Every script starts with a one-byte format version followed by a single
//! node. A node is `tag:u8 | len:u32be | body`. Strings inside bodies are
//! `len:u32be | utf8`. The decoder is strict: any byte string it accepts
//! re-encodes to itself, so byte equality and AST equality coincide.
//!
//! | tag  | node     | body                                         |
//! |------|----------|----------------------------------------------|
//! | 0x01 | Lit      | value                                        |
//! | 0x02 | CtxRef   | 1 byte: 0 self, 1 in, 2 out                  |
//! | 0x03 | Var      | raw utf8 name                                |
//! | 0x04 | Field    | str name, node                               |
//! | 0x05 | ScriptOf | node                                         |
//! | 0x06 | Index    | node, node                                   |
//! | 0x07 | Size     | node                                         |
//! | 0x08 | Add      | node, node                                   |
//! | 0x09 | Sub      | node, node                                   |
//! | 0x0A | Mod      | node, node                                   |
//! | 0x0B | PowMod   | node, node, node                             |
//! | 0x0C | Eq       | node, node                                   |
//! | 0x0D | Lt       | node, node                                   |
//! | 0x0E | And      | node, node                                   |
//! | 0x0F | Or       | node, node                                   |
//! | 0x10 | Xor      | node, node                                   |
//! | 0x11 | Not      | node                                         |
//! | 0x12 | Map      | str var, node len, node body                 |
//! | 0x13 | Let      | str name, node value, node body              |
//! | 0x14 | If       | node, node, node                             |
//! | 0x15 | CopyEq   | node, node, count:u32be, (str, node)*        |
//! | 0x16 | Concat   | node, node                                   |
//! | 0x17 | Synth    | node script, count:u32be, (str, node)*       |
//!
//! Values are `tag:u8 | len:u32be | data`: 0x01 bool (one byte, 0 or 1),
//! 0x02 int (minimal big-endian two's complement, empty for zero),
//! 0x03 bits (`bitlen:u32be` then bits packed MSB first, zero padded),
//! 0x04 script (the referenced script's full canonical bytes).

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
use super::value::{BitString, Payload, Script, Value};

pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected end of input at offset {0}")]
    Truncated(usize),
    #[error("unsupported format version {0}")]
    Version(u8),
    #[error("unknown tag 0x{tag:02x} at offset {offset}")]
    UnknownTag { tag: u8, offset: usize },
    #[error("non-canonical encoding at offset {offset}: {what}")]
    NonCanonical { offset: usize, what: &'static str },
    #[error("{0} trailing bytes")]
    Trailing(usize),
}

mod tag {
    pub const LIT: u8 = 0x01;
    pub const CTX: u8 = 0x02;
    pub const VAR: u8 = 0x03;
    pub const FIELD: u8 = 0x04;
    pub const SCRIPT_OF: u8 = 0x05;
    pub const INDEX: u8 = 0x06;
    pub const SIZE: u8 = 0x07;
    pub const ADD: u8 = 0x08;
    pub const SUB: u8 = 0x09;
    pub const MOD: u8 = 0x0A;
    pub const POW_MOD: u8 = 0x0B;
    pub const EQ: u8 = 0x0C;
    pub const LT: u8 = 0x0D;
    pub const AND: u8 = 0x0E;
    pub const OR: u8 = 0x0F;
    pub const XOR: u8 = 0x10;
    pub const NOT: u8 = 0x11;
    pub const MAP: u8 = 0x12;
    pub const LET: u8 = 0x13;
    pub const IF: u8 = 0x14;
    pub const COPY_EQ: u8 = 0x15;
    pub const CONCAT: u8 = 0x16;
    pub const SYNTH: u8 = 0x17;

    pub const V_BOOL: u8 = 0x01;
    pub const V_INT: u8 = 0x02;
    pub const V_BITS: u8 = 0x03;
    pub const V_SCRIPT: u8 = 0x04;
}

pub fn encode_script(expr: &ScriptExpr) -> Vec<u8> {
    let mut out = vec![FORMAT_VERSION];
    write_node(&mut out, expr);
    out
}

pub fn decode_script(bytes: &[u8]) -> Result<ScriptExpr, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(DecodeError::Version(version));
    }
    let expr = r.node()?;
    r.finish()?;
    Ok(expr)
}

pub fn encode_value(out: &mut Vec<u8>, value: &Value) {
    let (t, data) = match value {
        Value::Bool(b) => (tag::V_BOOL, vec![*b as u8]),
        Value::Int(i) => (tag::V_INT, int_bytes(i)),
        Value::Bits(bits) => {
            let mut data = (bits.len() as u32).to_be_bytes().to_vec();
            data.extend(pack_bits(bits.bits()));
            (tag::V_BITS, data)
        }
        Value::Script(s) => (tag::V_SCRIPT, s.bytes().to_vec()),
    };
    out.push(t);
    put_len_prefixed(out, &data);
}

pub fn decode_value(bytes: &[u8]) -> Result<Value, DecodeError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let v = r.value()?;
    r.finish()?;
    Ok(v)
}

/// `count:u32be` then `(str name, value)` per field, in payload order.
pub fn encode_payload(out: &mut Vec<u8>, payload: &Payload) {
    out.extend((payload.len() as u32).to_be_bytes());
    for (name, value) in payload.iter() {
        put_len_prefixed(out, name.as_bytes());
        encode_value(out, value);
    }
}

pub fn payload_bytes(payload: &Payload) -> Vec<u8> {
    let mut out = Vec::new();
    encode_payload(&mut out, payload);
    out
}

fn int_bytes(i: &BigInt) -> Vec<u8> {
    if i.sign() == num_bigint::Sign::NoSign {
        Vec::new()
    } else {
        i.to_signed_bytes_be()
    }
}

fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
        })
        .collect()
}

fn put_len_prefixed(out: &mut Vec<u8>, data: &[u8]) {
    out.extend((data.len() as u32).to_be_bytes());
    out.extend_from_slice(data);
}

fn write_node(out: &mut Vec<u8>, expr: &ScriptExpr) {
    let mut body = Vec::new();
    let t = match expr {
        ScriptExpr::Lit(v) => {
            encode_value(&mut body, v);
            tag::LIT
        }
        ScriptExpr::CtxRef(c) => {
            body.push(match c {
                Ctx::SelfInput => 0,
                Ctx::Inputs => 1,
                Ctx::Outputs => 2,
            });
            tag::CTX
        }
        ScriptExpr::Var(name) => {
            body.extend_from_slice(name.as_bytes());
            tag::VAR
        }
        ScriptExpr::Field(e, name) => {
            put_len_prefixed(&mut body, name.as_bytes());
            write_node(&mut body, e);
            tag::FIELD
        }
        ScriptExpr::ScriptOf(e) => {
            write_node(&mut body, e);
            tag::SCRIPT_OF
        }
        ScriptExpr::Size(e) => {
            write_node(&mut body, e);
            tag::SIZE
        }
        ScriptExpr::Not(e) => {
            write_node(&mut body, e);
            tag::NOT
        }
        ScriptExpr::Index(a, b) => pair(&mut body, tag::INDEX, a, b),
        ScriptExpr::Concat(a, b) => pair(&mut body, tag::CONCAT, a, b),
        ScriptExpr::Arith(op, a, b) => {
            let t = match op {
                ArithOp::Add => tag::ADD,
                ArithOp::Sub => tag::SUB,
                ArithOp::Mod => tag::MOD,
            };
            pair(&mut body, t, a, b)
        }
        ScriptExpr::Cmp(op, a, b) => {
            let t = match op {
                CmpOp::Eq => tag::EQ,
                CmpOp::Lt => tag::LT,
            };
            pair(&mut body, t, a, b)
        }
        ScriptExpr::Bool(op, a, b) => {
            let t = match op {
                BoolOp::And => tag::AND,
                BoolOp::Or => tag::OR,
                BoolOp::Xor => tag::XOR,
            };
            pair(&mut body, t, a, b)
        }
        ScriptExpr::PowMod(a, b, c) => {
            write_node(&mut body, a);
            write_node(&mut body, b);
            write_node(&mut body, c);
            tag::POW_MOD
        }
        ScriptExpr::If(a, b, c) => {
            write_node(&mut body, a);
            write_node(&mut body, b);
            write_node(&mut body, c);
            tag::IF
        }
        ScriptExpr::Map { len, var, body: e } => {
            put_len_prefixed(&mut body, var.as_bytes());
            write_node(&mut body, len);
            write_node(&mut body, e);
            tag::MAP
        }
        ScriptExpr::Let { name, value, body: e } => {
            put_len_prefixed(&mut body, name.as_bytes());
            write_node(&mut body, value);
            write_node(&mut body, e);
            tag::LET
        }
        ScriptExpr::CopyEq { lhs, rhs, overrides } => {
            write_node(&mut body, lhs);
            write_node(&mut body, rhs);
            write_assignments(&mut body, overrides);
            tag::COPY_EQ
        }
        ScriptExpr::Synth { script, fields } => {
            write_node(&mut body, script);
            write_assignments(&mut body, fields);
            tag::SYNTH
        }
    };
    out.push(t);
    put_len_prefixed(out, &body);
}

fn pair(body: &mut Vec<u8>, t: u8, a: &ScriptExpr, b: &ScriptExpr) -> u8 {
    write_node(body, a);
    write_node(body, b);
    t
}

fn write_assignments(body: &mut Vec<u8>, items: &[(String, ScriptExpr)]) {
    body.extend((items.len() as u32).to_be_bytes());
    for (name, e) in items {
        put_len_prefixed(body, name.as_bytes());
        write_node(body, e);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn u8(&mut self) -> Result<u8, DecodeError> {
        let b = *self.buf.get(self.pos).ok_or(DecodeError::Truncated(self.pos))?;
        self.pos += 1;
        Ok(b)
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        let bytes = self.take(4)?;
        Ok(u32::from_be_bytes(bytes.try_into().unwrap()))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(DecodeError::Truncated(self.buf.len()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn finish(&self) -> Result<(), DecodeError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }

    fn str(&mut self) -> Result<String, DecodeError> {
        let n = self.u32()? as usize;
        let offset = self.pos;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| DecodeError::NonCanonical {
            offset,
            what: "invalid utf-8",
        })
    }

    /// Reads `tag | len | body` and hands back a sub-reader over exactly
    /// `body`. Offsets in the sub-reader stay absolute.
    fn framed(&mut self) -> Result<(u8, usize, Reader<'a>), DecodeError> {
        let offset = self.pos;
        let t = self.u8()?;
        let n = self.u32()? as usize;
        let start = self.pos;
        self.take(n)?;
        Ok((
            t,
            offset,
            Reader {
                buf: &self.buf[..start + n],
                pos: start,
            },
        ))
    }

    fn value(&mut self) -> Result<Value, DecodeError> {
        let (t, offset, mut r) = self.framed()?;
        let data = &r.buf[r.pos..];
        let v = match t {
            tag::V_BOOL => match data {
                [0] => Value::Bool(false),
                [1] => Value::Bool(true),
                _ => {
                    return Err(DecodeError::NonCanonical {
                        offset,
                        what: "bool must be one byte 0 or 1",
                    })
                }
            },
            tag::V_INT => {
                let i = if data.is_empty() {
                    BigInt::from(0)
                } else {
                    BigInt::from_signed_bytes_be(data)
                };
                if int_bytes(&i) != data {
                    return Err(DecodeError::NonCanonical {
                        offset,
                        what: "int not minimally encoded",
                    });
                }
                Value::Int(i)
            }
            tag::V_BITS => {
                let n = r.u32()? as usize;
                let packed = &r.buf[r.pos..];
                if packed.len() != n.div_ceil(8) {
                    return Err(DecodeError::NonCanonical {
                        offset,
                        what: "bit string length mismatch",
                    });
                }
                let bits: Vec<bool> = (0..n).map(|i| packed[i / 8] & (1 << (7 - i % 8)) != 0).collect();
                if pack_bits(&bits) != packed {
                    return Err(DecodeError::NonCanonical {
                        offset,
                        what: "nonzero padding bits",
                    });
                }
                Value::Bits(BitString::new(bits))
            }
            tag::V_SCRIPT => Value::Script(Script::from_bytes(data)?),
            _ => return Err(DecodeError::UnknownTag { tag: t, offset }),
        };
        Ok(v)
    }

    fn node(&mut self) -> Result<ScriptExpr, DecodeError> {
        let (t, offset, mut r) = self.framed()?;
        let bx = |e: ScriptExpr| Box::new(e);
        let e = match t {
            tag::LIT => ScriptExpr::Lit(r.value()?),
            tag::CTX => ScriptExpr::CtxRef(match r.u8()? {
                0 => Ctx::SelfInput,
                1 => Ctx::Inputs,
                2 => Ctx::Outputs,
                _ => {
                    return Err(DecodeError::NonCanonical {
                        offset,
                        what: "bad context selector",
                    })
                }
            }),
            tag::VAR => {
                let rest = r.buf[r.pos..].to_vec();
                r.pos = r.buf.len();
                ScriptExpr::Var(String::from_utf8(rest).map_err(|_| DecodeError::NonCanonical {
                    offset,
                    what: "invalid utf-8",
                })?)
            }
            tag::FIELD => {
                let name = r.str()?;
                ScriptExpr::Field(bx(r.node()?), name)
            }
            tag::SCRIPT_OF => ScriptExpr::ScriptOf(bx(r.node()?)),
            tag::SIZE => ScriptExpr::Size(bx(r.node()?)),
            tag::NOT => ScriptExpr::Not(bx(r.node()?)),
            tag::INDEX => ScriptExpr::Index(bx(r.node()?), bx(r.node()?)),
            tag::CONCAT => ScriptExpr::Concat(bx(r.node()?), bx(r.node()?)),
            tag::ADD | tag::SUB | tag::MOD => {
                let op = match t {
                    tag::ADD => ArithOp::Add,
                    tag::SUB => ArithOp::Sub,
                    _ => ArithOp::Mod,
                };
                ScriptExpr::Arith(op, bx(r.node()?), bx(r.node()?))
            }
            tag::EQ | tag::LT => {
                let op = if t == tag::EQ { CmpOp::Eq } else { CmpOp::Lt };
                ScriptExpr::Cmp(op, bx(r.node()?), bx(r.node()?))
            }
            tag::AND | tag::OR | tag::XOR => {
                let op = match t {
                    tag::AND => BoolOp::And,
                    tag::OR => BoolOp::Or,
                    _ => BoolOp::Xor,
                };
                ScriptExpr::Bool(op, bx(r.node()?), bx(r.node()?))
            }
            tag::POW_MOD => ScriptExpr::PowMod(bx(r.node()?), bx(r.node()?), bx(r.node()?)),
            tag::IF => ScriptExpr::If(bx(r.node()?), bx(r.node()?), bx(r.node()?)),
            tag::MAP => {
                let var = r.str()?;
                let len = bx(r.node()?);
                ScriptExpr::Map {
                    len,
                    var,
                    body: bx(r.node()?),
                }
            }
            tag::LET => {
                let name = r.str()?;
                let value = bx(r.node()?);
                ScriptExpr::Let {
                    name,
                    value,
                    body: bx(r.node()?),
                }
            }
            tag::COPY_EQ => {
                let lhs = bx(r.node()?);
                let rhs = bx(r.node()?);
                ScriptExpr::CopyEq {
                    lhs,
                    rhs,
                    overrides: r.assignments()?,
                }
            }
            tag::SYNTH => {
                let script = bx(r.node()?);
                ScriptExpr::Synth {
                    script,
                    fields: r.assignments()?,
                }
            }
            _ => return Err(DecodeError::UnknownTag { tag: t, offset }),
        };
        r.finish().map_err(|_| DecodeError::NonCanonical {
            offset,
            what: "node body longer than its contents",
        })?;
        Ok(e)
    }

    fn assignments(&mut self) -> Result<Vec<(String, ScriptExpr)>, DecodeError> {
        let n = self.u32()?;
        let mut items = Vec::new();
        for _ in 0..n {
            let name = self.str()?;
            items.push((name, self.node()?));
        }
        Ok(items)
    }
}
