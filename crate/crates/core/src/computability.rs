//! Register machines, r.e. sets, Cantor pairing, and bounded-budget predicate
//! evaluation.
//!
//! The machine model is a two-instruction counter machine (`INC`, `DECJZ`,
//! plus an explicit `HALT`). Input and output both live in register 0. A
//! program stands in for the index of a partial recursive function; the set it
//! semi-decides is the domain of that function. Everything here is
//! deterministic and budgeted: no call runs unboundedly.

use std::fmt;

/// One counter-machine instruction. Jump targets are 0-based line numbers;
/// a target equal to the program length acts as a halt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    /// Increment a register.
    Inc(u32),
    /// If the register is zero jump to the target, else decrement and fall
    /// through.
    DecJz(u32, usize),
    /// Stop; the value of register 0 is the output.
    Halt,
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc(r) => write!(f, "INC r{r}"),
            Instr::DecJz(r, t) => write!(f, "DECJZ r{r} {t}"),
            Instr::Halt => write!(f, "HALT"),
        }
    }
}

/// A counter-machine program. Register 0 carries the input and the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    instrs: Vec<Instr>,
}

/// Error raised when a program fails validation or parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramError {
    /// A jump target points past the end of the program (targets equal to the
    /// length are allowed and halt).
    JumpOutOfBounds { line: usize, target: usize },
    /// Text form could not be parsed.
    Parse { line: usize, msg: String },
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramError::JumpOutOfBounds { line, target } => {
                write!(f, "line {line}: jump target {target} out of bounds")
            }
            ProgramError::Parse { line, msg } => write!(f, "line {line}: {msg}"),
        }
    }
}

impl std::error::Error for ProgramError {}

impl Program {
    /// Builds a program, checking that every jump target is at most the
    /// program length.
    pub fn new(instrs: Vec<Instr>) -> Result<Self, ProgramError> {
        for (line, ins) in instrs.iter().enumerate() {
            if let Instr::DecJz(_, target) = ins {
                if *target > instrs.len() {
                    return Err(ProgramError::JumpOutOfBounds {
                        line,
                        target: *target,
                    });
                }
            }
        }
        Ok(Program { instrs })
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    /// Parses the one-instruction-per-line text form: `INC r3`, `DECJZ r1 7`,
    /// `HALT`. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, ProgramError> {
        let mut instrs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let op = parts.next().unwrap();
            let parse_reg = |tok: Option<&str>| -> Result<u32, ProgramError> {
                let tok = tok.ok_or_else(|| ProgramError::Parse {
                    line: idx,
                    msg: "missing register".into(),
                })?;
                let digits = tok.strip_prefix('r').ok_or_else(|| ProgramError::Parse {
                    line: idx,
                    msg: format!("bad register `{tok}`"),
                })?;
                digits.parse().map_err(|_| ProgramError::Parse {
                    line: idx,
                    msg: format!("bad register `{tok}`"),
                })
            };
            let ins = match op {
                "INC" => Instr::Inc(parse_reg(parts.next())?),
                "DECJZ" => {
                    let r = parse_reg(parts.next())?;
                    let t = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| ProgramError::Parse {
                            line: idx,
                            msg: "missing or bad jump target".into(),
                        })?;
                    Instr::DecJz(r, t)
                }
                "HALT" => Instr::Halt,
                other => {
                    return Err(ProgramError::Parse {
                        line: idx,
                        msg: format!("unknown instruction `{other}`"),
                    })
                }
            };
            if parts.next().is_some() {
                return Err(ProgramError::Parse {
                    line: idx,
                    msg: "trailing tokens".into(),
                });
            }
            instrs.push(ins);
        }
        Program::new(instrs)
    }

    /// Canonical single-line form with `;` separators, used when a program is
    /// an argument inside a presentation file's `stream:` line.
    pub fn to_inline(&self) -> String {
        self.instrs
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses the `;`-joined inline form.
    pub fn parse_inline(text: &str) -> Result<Self, ProgramError> {
        if text.trim().is_empty() {
            return Program::new(Vec::new());
        }
        Program::parse(&text.split(';').collect::<Vec<_>>().join("\n"))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ins in &self.instrs {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

/// Result of running a program under a step budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    /// The machine halted with this output (register 0).
    Halted(u64),
    /// Not halted within the budget.
    NotYet,
}

/// Runs `program` on `input` for at most `steps` instruction executions.
/// Falling off the end of the program halts, as does `HALT`; reaching `HALT`
/// costs no step.
pub fn run(program: &Program, input: u64, steps: u64) -> RunOutcome {
    let mut regs: Vec<u64> = vec![input];
    let mut pc = 0usize;
    let code = &program.instrs;
    let mut executed = 0u64;
    loop {
        if pc >= code.len() {
            return RunOutcome::Halted(regs[0]);
        }
        if let Instr::Halt = code[pc] {
            return RunOutcome::Halted(regs[0]);
        }
        if executed == steps {
            return RunOutcome::NotYet;
        }
        match code[pc] {
            Instr::Inc(r) => {
                let r = r as usize;
                if regs.len() <= r {
                    regs.resize(r + 1, 0);
                }
                regs[r] += 1;
                pc += 1;
            }
            Instr::DecJz(r, target) => {
                let r = r as usize;
                if regs.len() <= r {
                    regs.resize(r + 1, 0);
                }
                if regs[r] == 0 {
                    pc = target;
                } else {
                    regs[r] -= 1;
                    pc += 1;
                }
            }
            Instr::Halt => unreachable!(),
        }
        executed += 1;
    }
}

/// Cantor's pairing function, `(x + y)(x + y + 1)/2 + y`.
///
/// Panics on u64 overflow; desk-scale indices stay far below that.
pub fn cantor_pair(x: u64, y: u64) -> u64 {
    let s = x.checked_add(y).expect("cantor_pair overflow");
    let tri = s
        .checked_mul(s + 1)
        .map(|v| v / 2)
        .expect("cantor_pair overflow");
    tri.checked_add(y).expect("cantor_pair overflow")
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: u64) -> (u64, u64) {
    // s = floor((sqrt(8z + 1) - 1) / 2), computed in u128 to dodge overflow.
    let w = 8u128 * z as u128 + 1;
    let mut root = (w as f64).sqrt() as u128;
    while root * root > w {
        root -= 1;
    }
    while (root + 1) * (root + 1) <= w {
        root += 1;
    }
    let s = ((root - 1) / 2) as u64;
    let tri = s * (s + 1) / 2;
    let y = z - tri;
    (s - y, y)
}

/// A recursively enumerable set, presented either as the domain of a program
/// or as the crushed image of another r.e. set (see [`crush`]).
#[derive(Debug, Clone)]
pub struct ReSet {
    kind: ReSetKind,
}

#[derive(Debug, Clone)]
enum ReSetKind {
    /// W = domain of the program.
    Machine(Program),
    /// Enumerates 0, 1, 2, ... in step with the inner set's enumeration, so
    /// the result is {0, ..., |W|-1} when W is finite and all of N otherwise.
    Crushed(Box<ReSet>),
}

impl ReSet {
    pub fn domain_of(program: Program) -> Self {
        ReSet {
            kind: ReSetKind::Machine(program),
        }
    }

    pub fn is_crushed(&self) -> bool {
        matches!(self.kind, ReSetKind::Crushed(_))
    }

    pub fn cursor(&self) -> ReSetCursor {
        ReSetCursor::new(self)
    }

    /// Dovetailed enumeration through `volume` anti-diagonals; duplicates
    /// suppressed.
    pub fn enumerate_with_volume(&self, volume: u64) -> Vec<u64> {
        let mut cursor = self.cursor();
        let mut out = Vec::new();
        for _ in 0..volume {
            out.extend(cursor.advance());
        }
        out
    }
}

/// Incremental cursor over the canonical dovetail: anti-diagonal
/// `d = input + budget`, input ascending within a diagonal. Cell `(i, b)`
/// fires when the program halts on input i within b steps; each element is
/// reported once, at its first firing cell.
#[derive(Debug, Clone)]
pub struct ReSetCursor {
    kind: CursorKind,
}

#[derive(Debug, Clone)]
enum CursorKind {
    Machine {
        program: Program,
        diagonal: u64,
        seen: std::collections::HashSet<u64>,
    },
    Crushed {
        inner: Box<ReSetCursor>,
        count: u64,
    },
}

impl ReSetCursor {
    pub fn new(s: &ReSet) -> ReSetCursor {
        let kind = match &s.kind {
            ReSetKind::Machine(p) => CursorKind::Machine {
                program: p.clone(),
                diagonal: 0,
                seen: std::collections::HashSet::new(),
            },
            ReSetKind::Crushed(inner) => CursorKind::Crushed {
                inner: Box::new(ReSetCursor::new(inner)),
                count: 0,
            },
        };
        ReSetCursor { kind }
    }

    /// Runs one more diagonal and returns the elements it fires, in order.
    pub fn advance(&mut self) -> Vec<u64> {
        match &mut self.kind {
            CursorKind::Machine {
                program,
                diagonal,
                seen,
            } => {
                let d = *diagonal;
                *diagonal += 1;
                let mut out = Vec::new();
                for i in 0..=d {
                    let budget = d - i;
                    if seen.contains(&i) {
                        continue;
                    }
                    if let RunOutcome::Halted(_) = run(program, i, budget) {
                        seen.insert(i);
                        out.push(i);
                    }
                }
                out
            }
            CursorKind::Crushed { inner, count } => {
                let found = inner.advance();
                let start = *count;
                *count += found.len() as u64;
                (start..*count).collect()
            }
        }
    }
}

/// First `items` elements of W in the canonical dovetail order.
///
/// Enumeration is total: the dovetail is cut off after `8 * items + 64`
/// diagonals, so a sparse or empty set returns fewer than `items` elements.
/// Prefixes are monotone in `items` and the limit over all budgets is W.
pub fn we_enumerate(s: &ReSet, items: usize) -> Vec<u64> {
    let volume = 8 * items as u64 + 64;
    let mut found = s.enumerate_with_volume(volume);
    found.truncate(items);
    found
}

/// The crush of an r.e. set: empty stays empty, a finite set of size k
/// becomes {0, ..., k-1}, an infinite set becomes all of N. Realized as a
/// derived enumeration that emits the next unused natural each time the
/// input's dovetailed enumeration finds a new element.
pub fn crush(s: &ReSet) -> ReSet {
    ReSet {
        kind: ReSetKind::Crushed(Box::new(s.clone())),
    }
}

/// A claimed-total three-argument predicate, evaluated on the Cantor-coded
/// triple `<a, <m, n>>` under a hard per-call step budget.
#[derive(Debug, Clone)]
pub struct Sigma2Predicate {
    program: Program,
    step_budget: u64,
}

/// Budget exhaustion during [`sigma2_eval`]. Never coerced to 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub a: u64,
    pub m: u64,
    pub n: u64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "predicate budget exhausted at ({}, {}, {})",
            self.a, self.m, self.n
        )
    }
}

impl std::error::Error for BudgetExhausted {}

impl Sigma2Predicate {
    /// Totality of the program within the budget is the caller's obligation;
    /// it is not checkable here.
    pub fn new(program: Program, step_budget: u64) -> Self {
        Sigma2Predicate {
            program,
            step_budget,
        }
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn step_budget(&self) -> u64 {
        self.step_budget
    }
}

/// Evaluates the predicate on `(a, m, n)` via the paired input.
pub fn sigma2_eval(
    pred: &Sigma2Predicate,
    a: u64,
    m: u64,
    n: u64,
) -> Result<u64, BudgetExhausted> {
    let input = cantor_pair(a, cantor_pair(m, n));
    match run(&pred.program, input, pred.step_budget) {
        RunOutcome::Halted(v) => Ok(v),
        RunOutcome::NotYet => Err(BudgetExhausted { a, m, n }),
    }
}

/// The i-th prime with 1-based indexing: `nth_prime(1) = 2`.
pub fn nth_prime(i: u64) -> Result<u64, PrimeIndexError> {
    if i == 0 {
        return Err(PrimeIndexError);
    }
    let mut count = 0u64;
    let mut n = 1u64;
    loop {
        n += 1;
        if is_prime(n) {
            count += 1;
            if count == i {
                return Ok(n);
            }
        }
    }
}

/// Index of a prime in the 1-based ordering, if it is prime.
pub fn prime_index(p: u64) -> Option<u64> {
    if !is_prime(p) {
        return None;
    }
    let mut count = 0;
    for n in 2..=p {
        if is_prime(n) {
            count += 1;
        }
    }
    Some(count)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `nth_prime(0)` is rejected: the ordering of primes is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeIndexError;

impl fmt::Display for PrimeIndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prime index must be >= 1")
    }
}

impl std::error::Error for PrimeIndexError {}
