//! Stock programs used by fixtures, witnesses and tests.

use super::machine::DiagCoding;
use super::nat::Nat;
use super::program::{assemble, Instr, Program};

fn asm(text: &str) -> Program {
    assemble(text).expect("library program assembles")
}

/// `x ↦ c`.
pub fn constant(c: u64) -> Program {
    asm(&format!("set r0 {c}\nhalt r0"))
}

/// `x ↦ c` for an arbitrary natural constant.
pub fn constant_nat(c: &Nat) -> Program {
    Program::new(1, vec![Instr::Set(0, c.clone()), Instr::Halt(0)])
}

/// Unconditional self-jump.
pub fn looping() -> Program {
    asm("top: jmp top")
}

/// `x ↦ σ(x)`.
pub fn echo() -> Program {
    asm("read r1 r0\nhalt r1")
}

/// `x ↦ x`.
pub fn identity() -> Program {
    asm("halt r0")
}

/// `(a, b) ↦ a + b`.
pub fn add() -> Program {
    asm(".arity 2\nadd r2 r0 r1\nhalt r2")
}

/// Outputs `0` after exactly `h ≥ 1` steps, independent of input and oracle.
pub fn slow(h: usize) -> Program {
    let h = h.max(1);
    let mut code = vec![Instr::Copy(1, 1); h - 1];
    code.push(Instr::Halt(1));
    Program::new(1, code)
}

/// Outputs `v` after exactly `h ≥ 2` steps.
pub fn slow_constant(h: usize, v: u64) -> Program {
    let h = h.max(2);
    let mut code = vec![Instr::Copy(2, 2); h - 2];
    code.push(Instr::Set(1, Nat::from(v)));
    code.push(Instr::Halt(1));
    Program::new(1, code)
}

/// `(a, x) ↦ a`: freezing `a` yields a constant program.
pub fn first_argument() -> Program {
    asm(".arity 2\nhalt r0")
}

/// `(i, x) ↦ (i⌢σ)(x)`: prepends the tag `i` to the oracle.
pub fn prepend() -> Program {
    asm(".arity 2\njz r1 tag\nset r2 1\nsub r3 r1 r2\nread r4 r3\nhalt r4\ntag: halt r0")
}

/// `x ↦ σ(2x)·σ(2x+1)`, the pointwise meet of the two interleaved halves of a 0/1 oracle.
pub fn interleaved_and() -> Program {
    asm("add r1 r0 r0\nset r2 1\nadd r3 r1 r2\nread r4 r1\nread r5 r3\nmul r6 r4 r5\nhalt r6")
}

/// `x ↦ σ(2x+1)`: copies the odd half of an interleaved oracle.
pub fn odd_half() -> Program {
    asm("add r1 r0 r0\nset r2 1\nadd r1 r1 r2\nread r3 r1\nhalt r3")
}

/// `(v, u, n) ↦ code(Φ_v(v), Φ_u(u))`.
pub fn diag_base(coding: DiagCoding) -> Program {
    match coding {
        DiagCoding::Cantor => asm(".arity 3\neval r3 r0 r0\neval r4 r1 r1\npair r5 r3 r4\nhalt r5"),
        DiagCoding::Base(k) => asm(&format!(
            ".arity 3
  eval r3 r0 r0
  eval r4 r1 r1
  set r6 {k}
  jlt r3 r6 first_ok
  jmp outside
first_ok:
  jlt r4 r6 inside
outside:
  mul r5 r6 r6
  halt r5
inside:
  mul r5 r3 r6
  add r5 r5 r4
  halt r5"
        )),
    }
}

/// `(x, n) ↦ Φ_{Φ_x(x)}(n)`, the diagonal half of the recursion theorem.
pub fn recursion_diagonal() -> Program {
    asm(".arity 2\neval r2 r0 r0\neval r3 r2 r1\nhalt r3")
}

/// `x ↦ Φ_b(d(x))` where `d(x) = smn(diag, ⟨x⟩)`.
pub fn recursion_builder_call(diagonal: &Nat, builder: &Nat) -> Program {
    Program::new(
        1,
        vec![
            Instr::Set(1, diagonal.clone()),
            Instr::Spec(2, 1, 0),
            Instr::Set(3, builder.clone()),
            Instr::Eval(4, 3, 2),
            Instr::Halt(4),
        ],
    )
}

/// Builder `x ↦ smn(first_argument, ⟨x⟩)`: every index goes to "output that index".
pub fn quine_builder() -> Program {
    let k = first_argument().encode();
    Program::new(1, vec![Instr::Set(1, k), Instr::Spec(2, 1, 0), Instr::Halt(2)])
}

/// Builder sending every index to the constant program `c`.
pub fn constant_builder(c: u64) -> Program {
    constant_nat(&constant(c).encode())
}

/// Builder `x ↦ x`.
pub fn identity_builder() -> Program {
    identity()
}

/// Named programs forming the fixture corpus.
pub fn corpus() -> Vec<(&'static str, Program)> {
    vec![
        ("const0", constant(0)),
        ("const3", constant(3)),
        ("const7", constant(7)),
        ("const42", constant(42)),
        ("loop", looping()),
        ("echo", echo()),
        ("identity", identity()),
        ("add", add()),
        ("slow10", slow(10)),
        ("first_argument", first_argument()),
        ("prepend", prepend()),
        ("interleaved_and", interleaved_and()),
        ("odd_half", odd_half()),
        ("diag_cantor", diag_base(DiagCoding::Cantor)),
        ("diag_base2", diag_base(DiagCoding::Base(2))),
        ("recursion_diagonal", recursion_diagonal()),
        ("quine_builder", quine_builder()),
        ("constant_builder42", constant_builder(42)),
        ("identity_builder", identity_builder()),
    ]
}
