//! Canned counter machines used as fixtures by tests and the CLI examples.
//!
//! The predicates that take a Cantor-paired triple do genuine unpairing in
//! machine code; `emit_unpair` is the shared subroutine. Registers 0..=5 are
//! working registers, register 15 is never incremented and serves as the
//! always-zero register behind unconditional jumps.

use crate::computability::{Instr, Program};
use std::collections::HashMap;

const ZERO: u32 = 15;

#[derive(Clone, Copy)]
struct Label(usize);

enum Pending {
    Inc(u32),
    DecJz(u32, usize),
    Halt,
}

struct Asm {
    code: Vec<Pending>,
    placed: HashMap<usize, usize>,
    next: usize,
}

impl Asm {
    fn new() -> Self {
        Asm {
            code: Vec::new(),
            placed: HashMap::new(),
            next: 0,
        }
    }

    fn fresh(&mut self) -> Label {
        self.next += 1;
        Label(self.next - 1)
    }

    fn place(&mut self, l: Label) {
        let prev = self.placed.insert(l.0, self.code.len());
        assert!(prev.is_none(), "label placed twice");
    }

    fn inc(&mut self, r: u32) {
        self.code.push(Pending::Inc(r));
    }

    fn decjz(&mut self, r: u32, l: Label) {
        self.code.push(Pending::DecJz(r, l.0));
    }

    fn jmp(&mut self, l: Label) {
        self.decjz(ZERO, l);
    }

    /// Decrement a register known to be nonzero (jump target is the next
    /// line, so a zero register would just fall through undecremented).
    fn dec(&mut self, r: u32) {
        let l = self.fresh();
        self.decjz(r, l);
        self.place(l);
    }

    /// Empty a register.
    fn drain(&mut self, r: u32) {
        let top = self.fresh();
        let out = self.fresh();
        self.place(top);
        self.decjz(r, out);
        self.jmp(top);
        self.place(out);
    }

    /// dst += src, then src = 0.
    fn move_into(&mut self, src: u32, dst: u32) {
        let top = self.fresh();
        let out = self.fresh();
        self.place(top);
        self.decjz(src, out);
        self.inc(dst);
        self.jmp(top);
        self.place(out);
    }

    fn halt(&mut self) {
        self.code.push(Pending::Halt);
    }

    fn finish(self) -> Program {
        let instrs = self
            .code
            .iter()
            .map(|p| match p {
                Pending::Inc(r) => Instr::Inc(*r),
                Pending::DecJz(r, l) => {
                    Instr::DecJz(*r, *self.placed.get(l).expect("unplaced label"))
                }
                Pending::Halt => Instr::Halt,
            })
            .collect();
        Program::new(instrs).expect("assembler produced bad jump")
    }
}

/// Unpair the value in `src`: on exit `rx` holds x, `ry` holds y, and
/// `src`, `tc`, `tr`, `tk` are zero. The three scratch registers and the two
/// outputs must be zero on entry.
///
/// Inverts `<x,y> = (x+y)(x+y+1)/2 + y` by subtracting 1, 2, 3, ... from the
/// input until the remainder is at most the count of subtractions.
fn emit_unpair(a: &mut Asm, src: u32, rx: u32, ry: u32, tc: u32, tr: u32, tk: u32) {
    let round = a.fresh();
    let head = a.fresh();
    let le = a.fresh();
    let gt = a.fresh();
    let done = a.fresh();

    // Invariant at `round`: src = remainder y', rx = diagonal counter s'.
    a.place(round);
    // tc := rx (copy through tr).
    {
        let top = a.fresh();
        let out = a.fresh();
        a.place(top);
        a.decjz(rx, out);
        a.inc(tc);
        a.inc(tr);
        a.jmp(top);
        a.place(out);
        a.move_into(tr, rx);
    }
    // Decrement src and tc together, counting src's decrements in tk.
    // src exhausts first  -> y' <= s'  (le); src is restored from tk.
    // tc exhausts first   -> y' > s'   (gt); src has absorbed exactly the
    //                         s'+1 decrements of the triangle step already.
    a.place(head);
    a.decjz(src, le);
    a.inc(tk);
    a.decjz(tc, gt);
    a.jmp(head);

    a.place(gt);
    a.drain(tk);
    a.inc(rx);
    a.jmp(round);

    a.place(le);
    a.move_into(tk, src);
    a.drain(tc);
    a.jmp(done);

    a.place(done);
    // y = src, x = rx - src.
    {
        let top = a.fresh();
        let out = a.fresh();
        a.place(top);
        a.decjz(src, out);
        a.inc(ry);
        a.dec(rx);
        a.jmp(top);
        a.place(out);
    }
}

/// Output = input.
pub fn identity() -> Program {
    Program::new(vec![Instr::Halt]).unwrap()
}

/// Halts immediately on every input (the empty program), so its domain is
/// all of N with halting time zero.
pub fn always_halt() -> Program {
    Program::new(Vec::new()).unwrap()
}

/// Never halts.
pub fn diverge() -> Program {
    Program::new(vec![Instr::DecJz(ZERO, 0)]).unwrap()
}

/// Output = 2 * input.
pub fn double() -> Program {
    let mut a = Asm::new();
    let l0 = a.fresh();
    let lb = a.fresh();
    let lend = a.fresh();
    a.place(l0);
    a.decjz(0, lb);
    a.inc(1);
    a.inc(1);
    a.jmp(l0);
    a.place(lb);
    a.decjz(1, lend);
    a.inc(0);
    a.jmp(lb);
    a.place(lend);
    a.halt();
    a.finish()
}

/// Halts exactly on even inputs.
pub fn halts_on_evens() -> Program {
    let mut a = Asm::new();
    let top = a.fresh();
    let div = a.fresh();
    let out = a.fresh();
    a.place(top);
    a.decjz(0, out);
    a.decjz(0, div);
    a.jmp(top);
    a.place(div);
    a.jmp(div);
    a.place(out);
    a.halt();
    a.finish()
}

/// Halts exactly on inputs < k.
pub fn halt_iff_lt(k: u64) -> Program {
    let mut a = Asm::new();
    let halt = a.fresh();
    let div = a.fresh();
    for _ in 0..k {
        a.decjz(0, halt);
    }
    a.place(div);
    a.jmp(div);
    a.place(halt);
    a.halt();
    a.finish()
}

/// Same domain as [`halt_iff_lt`] but with a linear-in-input delay, for
/// checking that crush only depends on the domain's size.
pub fn halt_iff_lt_slow(k: u64) -> Program {
    let mut a = Asm::new();
    let halt = a.fresh();
    let div = a.fresh();
    // Shuffle r0 back and forth once to burn time.
    {
        let t1 = a.fresh();
        let o1 = a.fresh();
        a.place(t1);
        a.decjz(0, o1);
        a.inc(1);
        a.jmp(t1);
        a.place(o1);
        let t2 = a.fresh();
        let o2 = a.fresh();
        a.place(t2);
        a.decjz(1, o2);
        a.inc(0);
        a.jmp(t2);
        a.place(o2);
    }
    for _ in 0..k {
        a.decjz(0, halt);
    }
    a.place(div);
    a.jmp(div);
    a.place(halt);
    a.halt();
    a.finish()
}

/// Halts exactly on the given inputs.
pub fn halt_iff_in(members: &[u64]) -> Program {
    let mut sorted: Vec<u64> = members.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut a = Asm::new();
    let halt = a.fresh();
    let div = a.fresh();
    let max = sorted.last().copied().unwrap_or(0);
    if sorted.is_empty() {
        a.place(div);
        a.jmp(div);
        a.place(halt);
        a.halt();
        return a.finish();
    }
    for v in 0..=max {
        if sorted.binary_search(&v).is_ok() {
            a.decjz(0, halt);
        } else {
            a.decjz(0, div);
        }
    }
    a.place(div);
    a.jmp(div);
    a.place(halt);
    a.halt();
    a.finish()
}

/// W = {5, 9}.
pub fn halt_iff_in_5_9() -> Program {
    halt_iff_in(&[5, 9])
}

/// Constant 0, ignoring the input.
pub fn zero_fn() -> Program {
    let mut a = Asm::new();
    a.drain(0);
    a.halt();
    a.finish()
}

/// Constant 1, ignoring the input.
pub fn one_fn() -> Program {
    let mut a = Asm::new();
    a.drain(0);
    a.inc(0);
    a.halt();
    a.finish()
}

/// On input `<a, <m, n>>`, outputs 1 iff a is in {2, 3, 4, 6}.
pub fn membership_2346() -> Program {
    let mut a = Asm::new();
    emit_unpair(&mut a, 0, 1, 2, 3, 4, 5);
    // a is in r1, r0 is zero.
    let yes = a.fresh();
    let no = a.fresh();
    a.decjz(1, no); // 0
    a.decjz(1, no); // 1
    a.decjz(1, yes); // 2
    a.decjz(1, yes); // 3
    a.decjz(1, yes); // 4
    a.decjz(1, no); // 5
    a.decjz(1, yes); // 6
    a.jmp(no);
    a.place(yes);
    a.inc(0);
    a.halt();
    a.place(no);
    a.halt();
    a.finish()
}

/// On input `<a, <m, n>>`, outputs 1 iff a is even and m >= 1.
pub fn even_and_m_positive() -> Program {
    let mut a = Asm::new();
    emit_unpair(&mut a, 0, 1, 2, 3, 4, 5);
    // r1 = a, r2 = <m, n>, r0 = 0. Record a's parity in r6.
    let even = a.fresh();
    let odd = a.fresh();
    let moved = a.fresh();
    let par = a.fresh();
    a.place(par);
    a.decjz(1, even);
    a.decjz(1, odd);
    a.jmp(par);
    a.place(even);
    a.inc(6);
    a.jmp(moved);
    a.place(odd);
    a.jmp(moved);
    a.place(moved);
    a.move_into(2, 0);
    emit_unpair(&mut a, 0, 1, 2, 3, 4, 5);
    // r1 = m, r0 = 0.
    let yes = a.fresh();
    let no = a.fresh();
    a.decjz(6, no);
    a.decjz(1, no);
    a.jmp(yes);
    a.place(yes);
    a.inc(0);
    a.halt();
    a.place(no);
    a.halt();
    a.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computability::{cantor_pair, run, RunOutcome};

    #[test]
    fn unpair_machine_matches_native() {
        let mut a = Asm::new();
        emit_unpair(&mut a, 0, 1, 2, 3, 4, 5);
        // Report x + 1000 * y so one output checks both halves.
        let mut tail = a;
        {
            let top = tail.fresh();
            let out = tail.fresh();
            tail.move_into(1, 0);
            tail.place(top);
            tail.decjz(2, out);
            for _ in 0..1000 {
                tail.inc(0);
            }
            tail.jmp(top);
            tail.place(out);
            tail.halt();
        }
        let p = tail.finish();
        for x in 0..25u64 {
            for y in 0..25u64 {
                let z = cantor_pair(x, y);
                match run(&p, z, 10_000_000) {
                    RunOutcome::Halted(v) => {
                        assert_eq!(v, x + 1000 * y, "unpair({z}) expected ({x},{y})")
                    }
                    RunOutcome::NotYet => panic!("unpair machine did not halt on {z}"),
                }
            }
        }
    }

    #[test]
    fn halt_iff_in_domains() {
        let p = halt_iff_in(&[1, 4, 6]);
        for i in 0..10 {
            let halted = matches!(run(&p, i, 1_000), RunOutcome::Halted(_));
            assert_eq!(halted, [1, 4, 6].contains(&i), "input {i}");
        }
    }

    #[test]
    fn constant_programs() {
        for z in [0, 3, 17] {
            assert_eq!(run(&zero_fn(), z, 1_000), RunOutcome::Halted(0));
            assert_eq!(run(&one_fn(), z, 1_000), RunOutcome::Halted(1));
        }
    }
}
