//! Instruction set, canonical Gödel numbering and the assembler.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::nat::Nat;
use crate::error::{Error, Result};

pub type Reg = u32;

/// Highest register number accepted by the decoder and assembler.
pub const MAX_REG: Reg = 255;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Set(Reg, Nat),
    Copy(Reg, Reg),
    Add(Reg, Reg, Reg),
    /// Truncated subtraction.
    Sub(Reg, Reg, Reg),
    Mul(Reg, Reg, Reg),
    Div(Reg, Reg, Reg),
    Mod(Reg, Reg, Reg),
    /// `d := ⟨a, b⟩`
    Pair(Reg, Reg, Reg),
    Left(Reg, Reg),
    Right(Reg, Reg),
    /// `d := σ(r[p])`
    Read(Reg, Reg),
    Jz(Reg, usize),
    Jeq(Reg, Reg, usize),
    Jlt(Reg, Reg, usize),
    Jmp(usize),
    /// `d := Φ_{r[e]}(σ; r[x])`, sharing the caller's oracle and budget.
    Eval(Reg, Reg, Reg),
    /// `d := v+1` if `Φ_{r[e]}(σ↾r[o]; r[x])` halts with `v` within `r[t]` steps, else `0`.
    Bound(Reg, Reg, Reg, Reg, Reg),
    /// `d := smn(r[e], ⟨r[a]⟩)`
    Spec(Reg, Reg, Reg),
    /// `d := z(r[v], r[u])`
    Diag(Reg, Reg, Reg),
    /// Continue as program `c` with the current registers.
    Tail(Nat),
    Halt(Reg),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    R,
    C,
    T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Operand {
    R(Reg),
    C(Nat),
    T(usize),
}

const TABLE: &[(&str, &[Kind])] = {
    use Kind::*;
    &[
        ("set", &[R, C]),
        ("copy", &[R, R]),
        ("add", &[R, R, R]),
        ("sub", &[R, R, R]),
        ("mul", &[R, R, R]),
        ("div", &[R, R, R]),
        ("mod", &[R, R, R]),
        ("pair", &[R, R, R]),
        ("left", &[R, R]),
        ("right", &[R, R]),
        ("read", &[R, R]),
        ("jz", &[R, T]),
        ("jeq", &[R, R, T]),
        ("jlt", &[R, R, T]),
        ("jmp", &[T]),
        ("eval", &[R, R, R]),
        ("bound", &[R, R, R, R, R]),
        ("spec", &[R, R, R]),
        ("diag", &[R, R, R]),
        ("tail", &[C]),
        ("halt", &[R]),
    ]
};

impl Instr {
    fn parts(&self) -> (u8, Vec<Operand>) {
        use Operand::{C, R, T};
        match self {
            Instr::Set(d, c) => (0, vec![R(*d), C(c.clone())]),
            Instr::Copy(d, s) => (1, vec![R(*d), R(*s)]),
            Instr::Add(d, a, b) => (2, vec![R(*d), R(*a), R(*b)]),
            Instr::Sub(d, a, b) => (3, vec![R(*d), R(*a), R(*b)]),
            Instr::Mul(d, a, b) => (4, vec![R(*d), R(*a), R(*b)]),
            Instr::Div(d, a, b) => (5, vec![R(*d), R(*a), R(*b)]),
            Instr::Mod(d, a, b) => (6, vec![R(*d), R(*a), R(*b)]),
            Instr::Pair(d, a, b) => (7, vec![R(*d), R(*a), R(*b)]),
            Instr::Left(d, s) => (8, vec![R(*d), R(*s)]),
            Instr::Right(d, s) => (9, vec![R(*d), R(*s)]),
            Instr::Read(d, p) => (10, vec![R(*d), R(*p)]),
            Instr::Jz(r, t) => (11, vec![R(*r), T(*t)]),
            Instr::Jeq(a, b, t) => (12, vec![R(*a), R(*b), T(*t)]),
            Instr::Jlt(a, b, t) => (13, vec![R(*a), R(*b), T(*t)]),
            Instr::Jmp(t) => (14, vec![T(*t)]),
            Instr::Eval(d, e, x) => (15, vec![R(*d), R(*e), R(*x)]),
            Instr::Bound(d, e, x, t, o) => (16, vec![R(*d), R(*e), R(*x), R(*t), R(*o)]),
            Instr::Spec(d, e, a) => (17, vec![R(*d), R(*e), R(*a)]),
            Instr::Diag(d, v, u) => (18, vec![R(*d), R(*v), R(*u)]),
            Instr::Tail(c) => (19, vec![C(c.clone())]),
            Instr::Halt(r) => (20, vec![R(*r)]),
        }
    }

    fn from_parts(op: u8, ops: Vec<Operand>) -> Instr {
        let r = |i: usize| match ops[i] {
            Operand::R(r) => r,
            _ => unreachable!(),
        };
        let t = |i: usize| match ops[i] {
            Operand::T(t) => t,
            _ => unreachable!(),
        };
        let c = |i: usize| match &ops[i] {
            Operand::C(c) => c.clone(),
            _ => unreachable!(),
        };
        match op {
            0 => Instr::Set(r(0), c(1)),
            1 => Instr::Copy(r(0), r(1)),
            2 => Instr::Add(r(0), r(1), r(2)),
            3 => Instr::Sub(r(0), r(1), r(2)),
            4 => Instr::Mul(r(0), r(1), r(2)),
            5 => Instr::Div(r(0), r(1), r(2)),
            6 => Instr::Mod(r(0), r(1), r(2)),
            7 => Instr::Pair(r(0), r(1), r(2)),
            8 => Instr::Left(r(0), r(1)),
            9 => Instr::Right(r(0), r(1)),
            10 => Instr::Read(r(0), r(1)),
            11 => Instr::Jz(r(0), t(1)),
            12 => Instr::Jeq(r(0), r(1), t(2)),
            13 => Instr::Jlt(r(0), r(1), t(2)),
            14 => Instr::Jmp(t(0)),
            15 => Instr::Eval(r(0), r(1), r(2)),
            16 => Instr::Bound(r(0), r(1), r(2), r(3), r(4)),
            17 => Instr::Spec(r(0), r(1), r(2)),
            18 => Instr::Diag(r(0), r(1), r(2)),
            19 => Instr::Tail(c(0)),
            20 => Instr::Halt(r(0)),
            _ => unreachable!(),
        }
    }
}

/// A program: straight-line code with jumps. Inputs arrive in `r0..r{arity-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub arity: u32,
    pub code: Vec<Instr>,
}

/// Leading byte of every Gödel number; keeps codes above the registry slot range.
const MARKER: u8 = 0x01;

impl Program {
    pub fn new(arity: u32, code: Vec<Instr>) -> Program {
        Program { arity, code }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arity == 0 {
            return Err(Error::Decode("arity must be at least 1".into()));
        }
        for (i, ins) in self.code.iter().enumerate() {
            for op in ins.parts().1 {
                match op {
                    Operand::R(r) if r > MAX_REG => {
                        return Err(Error::Decode(format!("register r{r} out of range at {i}")))
                    }
                    Operand::T(t) if t > self.code.len() => {
                        return Err(Error::Decode(format!("jump target {t} out of range at {i}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Canonical Gödel number.
    pub fn encode(&self) -> Nat {
        let mut out = vec![MARKER];
        put_varint(&mut out, self.arity as u64);
        put_varint(&mut out, self.code.len() as u64);
        for ins in &self.code {
            let (op, operands) = ins.parts();
            out.push(op);
            for o in operands {
                match o {
                    Operand::R(r) => put_varint(&mut out, r as u64),
                    Operand::T(t) => put_varint(&mut out, t as u64),
                    Operand::C(c) => {
                        let bytes = c.to_bytes_be();
                        put_varint(&mut out, bytes.len() as u64);
                        out.extend_from_slice(&bytes);
                    }
                }
            }
        }
        Nat::from_bytes_be(&out)
    }

    pub fn decode(index: &Nat) -> Result<Program> {
        let bytes = index.to_bytes_be();
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.byte()? != MARKER {
            return Err(Error::Decode(format!("index {index} lacks the program marker")));
        }
        let arity = cur.varint()?;
        let len = cur.varint()?;
        if arity == 0 || arity > u32::MAX as u64 {
            return Err(Error::Decode(format!("bad arity {arity}")));
        }
        if len > bytes.len() as u64 {
            return Err(Error::Decode("instruction count exceeds code size".into()));
        }
        let mut code = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let op = cur.byte()?;
            let (_, kinds) = TABLE
                .get(op as usize)
                .ok_or_else(|| Error::Decode(format!("unknown opcode {op}")))?;
            let mut ops = Vec::with_capacity(kinds.len());
            for k in kinds.iter() {
                ops.push(match k {
                    Kind::R => {
                        let r = cur.varint()?;
                        if r > MAX_REG as u64 {
                            return Err(Error::Decode(format!("register {r} out of range")));
                        }
                        Operand::R(r as Reg)
                    }
                    Kind::T => Operand::T(cur.varint()? as usize),
                    Kind::C => {
                        let n = cur.varint()? as usize;
                        let b = cur.take(n)?;
                        if b.first() == Some(&0) {
                            return Err(Error::Decode("constant with leading zero byte".into()));
                        }
                        Operand::C(Nat::from_bytes_be(b))
                    }
                });
            }
            code.push(Instr::from_parts(op, ops));
        }
        if cur.pos != bytes.len() {
            return Err(Error::Decode("trailing bytes after program".into()));
        }
        let p = Program { arity: arity as u32, code };
        p.validate()?;
        Ok(p)
    }

    /// Canonical assembly text; `assemble(p.disassemble()) == p`.
    pub fn disassemble(&self) -> String {
        let mut targets = std::collections::BTreeSet::new();
        for ins in &self.code {
            for o in ins.parts().1 {
                if let Operand::T(t) = o {
                    targets.insert(t);
                }
            }
        }
        let mut s = format!(".arity {}\n", self.arity);
        for (i, ins) in self.code.iter().enumerate() {
            if targets.contains(&i) {
                let _ = writeln!(s, "L{i}:");
            }
            let (op, operands) = ins.parts();
            let mut line = format!("  {}", TABLE[op as usize].0);
            for o in operands {
                match o {
                    Operand::R(r) => {
                        let _ = write!(line, " r{r}");
                    }
                    Operand::C(c) => {
                        let _ = write!(line, " {c}");
                    }
                    Operand::T(t) => {
                        let _ = write!(line, " L{t}");
                    }
                }
            }
            s.push_str(&line);
            s.push('\n');
        }
        if targets.contains(&self.code.len()) {
            let _ = writeln!(s, "L{}:", self.code.len());
        }
        s
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn byte(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| Error::Decode("truncated program code".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Decode("truncated constant".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v: u64 = 0;
        let mut shift = 0;
        loop {
            let b = self.byte()?;
            if shift >= 63 && b > 1 {
                return Err(Error::Decode("varint overflow".into()));
            }
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                if b == 0 && shift > 0 {
                    return Err(Error::Decode("non-minimal varint".into()));
                }
                return Ok(v);
            }
            shift += 7;
        }
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

/// Assembles program text. Comments start with `#` or `;`; labels end in `:`;
/// `.arity n` sets the input count (default 1). Jump targets are labels or instruction numbers.
pub fn assemble(text: &str) -> Result<Program> {
    struct Pending {
        line: usize,
        op: u8,
        args: Vec<String>,
    }
    let mut arity = 1u32;
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    let mut pending: Vec<Pending> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let mut body = raw.split(['#', ';']).next().unwrap_or("").trim();
        while let Some(idx) = body.find(':') {
            let label = body[..idx].trim();
            if label.is_empty() || !label.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Assemble { line, msg: format!("bad label {label:?}") });
            }
            if labels.insert(label.to_string(), pending.len()).is_some() {
                return Err(Error::Assemble { line, msg: format!("duplicate label {label}") });
            }
            body = body[idx + 1..].trim();
        }
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let head = words.next().unwrap().to_ascii_lowercase();
        let args: Vec<String> = words.map(str::to_string).collect();
        if head == ".arity" {
            arity = args
                .first()
                .and_then(|a| a.parse().ok())
                .filter(|&a| a >= 1)
                .ok_or_else(|| Error::Assemble { line, msg: "bad .arity".into() })?;
            continue;
        }
        let op = TABLE
            .iter()
            .position(|(m, _)| *m == head)
            .ok_or_else(|| Error::Assemble { line, msg: format!("unknown mnemonic {head}") })?;
        if args.len() != TABLE[op].1.len() {
            return Err(Error::Assemble {
                line,
                msg: format!("{head} takes {} operands", TABLE[op].1.len()),
            });
        }
        pending.push(Pending { line, op: op as u8, args });
    }
    let mut code = Vec::with_capacity(pending.len());
    for p in &pending {
        let mut ops = Vec::new();
        for (a, k) in p.args.iter().zip(TABLE[p.op as usize].1.iter()) {
            let err = |msg: String| Error::Assemble { line: p.line, msg };
            ops.push(match k {
                Kind::R => {
                    let r = a
                        .strip_prefix('r')
                        .and_then(|n| n.parse::<Reg>().ok())
                        .filter(|&r| r <= MAX_REG)
                        .ok_or_else(|| err(format!("bad register {a}")))?;
                    Operand::R(r)
                }
                Kind::C => Operand::C(a.parse::<Nat>().map_err(err)?),
                Kind::T => {
                    let t = match labels.get(a.as_str()) {
                        Some(&t) => t,
                        None => a.parse().map_err(|_| err(format!("unknown label {a}")))?,
                    };
                    Operand::T(t)
                }
            });
        }
        code.push(Instr::from_parts(p.op, ops));
    }
    let prog = Program { arity, code };
    prog.validate().map_err(|e| Error::Assemble { line: 0, msg: e.to_string() })?;
    Ok(prog)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let p = assemble(
            ".arity 2\nstart: set r2 123456789012345678901234567890\n  jz r0 end\n  add r2 r2 r1\n  jmp start\nend: halt r2\n",
        )
        .unwrap();
        let idx = p.encode();
        assert_eq!(Program::decode(&idx).unwrap(), p);
        assert_eq!(assemble(&p.disassemble()).unwrap(), p);
    }

    #[test]
    fn malformed_indices_are_rejected() {
        for i in 0..300u64 {
            assert!(Program::decode(&Nat::from(i)).is_err());
        }
    }
}
