//! Straight-line programs over a fixed number of input slots.
//!
//! Values are numbered consecutively: `0..slots` are the inputs and line `j`
//! of the program defines value `slots + j`. Each instruction may only refer
//! to values defined before it, so a program is a DAG and shared subwords are
//! stored once.

use std::fmt;

use crate::blackbox::MultCounter;
use crate::element::GroupElement;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Mul(usize, usize),
    Inv(usize),
    Pow(usize, i64),
}

impl Instr {
    fn operands(&self) -> (usize, Option<usize>) {
        match *self {
            Instr::Mul(i, j) => (i, Some(j)),
            Instr::Inv(i) | Instr::Pow(i, _) => (i, None),
        }
    }

    fn shifted(&self, map: impl Fn(usize) -> usize) -> Instr {
        match *self {
            Instr::Mul(i, j) => Instr::Mul(map(i), map(j)),
            Instr::Inv(i) => Instr::Inv(map(i)),
            Instr::Pow(i, n) => Instr::Pow(map(i), n),
        }
    }
}

/// A straight-line program. `result == None` denotes the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slp {
    slots: usize,
    lines: Vec<Instr>,
    result: Option<usize>,
}

/// How [`Slp::compose`] combines its operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compose {
    /// `a * b`
    Product,
    /// `a^-1 * b`
    InverseOfFirst,
}

impl Slp {
    pub fn new(slots: usize, lines: Vec<Instr>, result: Option<usize>) -> Result<Self> {
        for (j, ins) in lines.iter().enumerate() {
            let (x, y) = ins.operands();
            if x >= slots + j || y.is_some_and(|y| y >= slots + j) {
                return Err(Error::Invalid(format!("line {j} refers to a later value")));
            }
        }
        if result.is_some_and(|r| r >= slots + lines.len()) {
            return Err(Error::Invalid("result index out of range".into()));
        }
        Ok(Slp { slots, lines, result })
    }

    pub fn identity(slots: usize) -> Self {
        Slp { slots, lines: Vec::new(), result: None }
    }

    /// The program returning input `i` unchanged.
    pub fn generator(slots: usize, i: usize) -> Self {
        assert!(i < slots, "generator index out of range");
        Slp { slots, lines: Vec::new(), result: Some(i) }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn lines(&self) -> &[Instr] {
        &self.lines
    }

    pub fn result(&self) -> Option<usize> {
        self.result
    }

    /// Number of instructions.
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.result.is_none()
    }

    /// Evaluates on `inputs` without counting multiplications.
    pub fn evaluate(&self, inputs: &[GroupElement]) -> Result<GroupElement> {
        self.run(inputs, None)
    }

    /// Evaluates on `inputs`, charging every product, inversion and power.
    pub fn evaluate_counted(&self, inputs: &[GroupElement], counter: &MultCounter) -> Result<GroupElement> {
        self.run(inputs, Some(counter))
    }

    fn run(&self, inputs: &[GroupElement], counter: Option<&MultCounter>) -> Result<GroupElement> {
        if inputs.len() != self.slots {
            return Err(Error::SlotMismatch { expected: self.slots, given: inputs.len() });
        }
        let kind = inputs[0].kind();
        if let Some(g) = inputs.iter().find(|g| g.kind() != kind) {
            return Err(Error::KindMismatch { left: kind, right: g.kind() });
        }
        let Some(result) = self.result else {
            return Ok(GroupElement::identity(kind));
        };
        let mut values: Vec<GroupElement> = inputs.to_vec();
        for ins in &self.lines {
            let v = match *ins {
                Instr::Mul(i, j) => {
                    if let Some(c) = counter {
                        c.charge(1);
                    }
                    &values[i] * &values[j]
                }
                Instr::Inv(i) => {
                    if let Some(c) = counter {
                        c.charge(1);
                    }
                    values[i].inverse()
                }
                Instr::Pow(i, n) => match counter {
                    Some(c) => {
                        let base = if n < 0 { c.inverse(&values[i]) } else { values[i].clone() };
                        c.power(&base, n.unsigned_abs())
                    }
                    None => values[i].pow(n),
                },
            };
            values.push(v);
        }
        Ok(values.swap_remove(result))
    }

    /// Combines two programs over the same inputs. A product of two
    /// non-identity programs has `a.len() + b.len() + 1` lines.
    pub fn compose(a: &Slp, b: &Slp, mode: Compose) -> Result<Slp> {
        if a.slots != b.slots {
            return Err(Error::SlotMismatch { expected: a.slots, given: b.slots });
        }
        let mut builder = SlpBuilder::new(a.slots);
        let x = builder.append(a);
        let x = match mode {
            Compose::Product => x,
            Compose::InverseOfFirst => x.map(|x| builder.inv(x)),
        };
        let y = builder.append(b);
        let r = builder.mul_opt(x, y);
        Ok(Slp { slots: a.slots, lines: builder.lines, result: r })
    }

    /// The program computing `self` evaluated on the values of `inputs`,
    /// which all run over the same slots.
    pub fn substitute(&self, inputs: &[Slp]) -> Result<Slp> {
        if inputs.len() != self.slots {
            return Err(Error::SlotMismatch { expected: self.slots, given: inputs.len() });
        }
        let Some(first) = inputs.first() else {
            return Ok(self.clone());
        };
        let slots = first.slots;
        let mut builder = SlpBuilder::new(slots);
        let mut values: Vec<Option<usize>> = Vec::with_capacity(self.slots + self.lines.len());
        for x in inputs {
            if x.slots != slots {
                return Err(Error::SlotMismatch { expected: slots, given: x.slots });
            }
            values.push(builder.append(x));
        }
        for ins in &self.lines {
            let v = match *ins {
                Instr::Mul(i, j) => builder.mul_opt(values[i], values[j]),
                Instr::Inv(i) => values[i].map(|x| builder.inv(x)),
                Instr::Pow(i, n) => values[i].map(|x| builder.pow(x, n)),
            };
            values.push(v);
        }
        Ok(builder.extract(self.result.and_then(|r| values[r])))
    }

    /// Drops lines the result does not depend on.
    pub fn pruned(&self) -> Slp {
        let builder = SlpBuilder { slots: self.slots, lines: self.lines.clone() };
        builder.extract(self.result)
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(text: &str) -> Result<Slp> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty program"))?;
        let (slots, result) = parse_header(hl, header)?;
        let mut instrs = Vec::new();
        for (lno, line) in lines {
            instrs.push(parse_instr(lno, line)?);
        }
        Slp::new(slots, instrs, result).map_err(|e| Error::parse(hl, e.to_string()))
    }
}

pub(crate) fn parse_header(lno: usize, header: &str) -> Result<(usize, Option<usize>)> {
    let mut slots = None;
    let mut result = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("slots", v)) => {
                slots = Some(v.parse::<usize>().map_err(|_| Error::parse(lno, format!("bad slot count `{v}`")))?)
            }
            Some(("result", "identity")) => result = Some(None),
            Some(("result", v)) => {
                result = Some(Some(v.parse::<usize>().map_err(|_| Error::parse(lno, format!("bad result `{v}`")))?))
            }
            _ => return Err(Error::parse(lno, format!("unexpected header field `{field}`"))),
        }
    }
    match (slots, result) {
        (Some(s), Some(r)) if s > 0 => Ok((s, r)),
        _ => Err(Error::parse(lno, "header must be `slots=<k> result=<r>`")),
    }
}

pub(crate) fn parse_instr(lno: usize, line: &str) -> Result<Instr> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let idx = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(lno, format!("bad index `{s}`")));
    match parts.as_slice() {
        ["MUL", i, j] => Ok(Instr::Mul(idx(i)?, idx(j)?)),
        ["INV", i] => Ok(Instr::Inv(idx(i)?)),
        ["POW", i, n] => {
            let n = n.parse::<i64>().map_err(|_| Error::parse(lno, format!("bad exponent `{n}`")))?;
            Ok(Instr::Pow(idx(i)?, n))
        }
        _ => Err(Error::parse(lno, format!("unknown instruction `{line}`"))),
    }
}

impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.result {
            Some(r) => writeln!(f, "slots={} result={r}", self.slots)?,
            None => writeln!(f, "slots={} result=identity", self.slots)?,
        }
        for ins in &self.lines {
            match *ins {
                Instr::Mul(i, j) => writeln!(f, "MUL {i} {j}")?,
                Instr::Inv(i) => writeln!(f, "INV {i}")?,
                Instr::Pow(i, n) => writeln!(f, "POW {i} {n}")?,
            }
        }
        Ok(())
    }
}

/// A growing shared program; values are referred to by index and complete
/// programs for any value can be extracted.
#[derive(Clone, Debug)]
pub struct SlpBuilder {
    slots: usize,
    lines: Vec<Instr>,
}

impl SlpBuilder {
    pub fn new(slots: usize) -> Self {
        SlpBuilder { slots, lines: Vec::new() }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    fn push(&mut self, ins: Instr) -> usize {
        self.lines.push(ins);
        self.slots + self.lines.len() - 1
    }

    pub fn mul(&mut self, i: usize, j: usize) -> usize {
        self.push(Instr::Mul(i, j))
    }

    pub fn inv(&mut self, i: usize) -> usize {
        self.push(Instr::Inv(i))
    }

    pub fn pow(&mut self, i: usize, n: i64) -> usize {
        self.push(Instr::Pow(i, n))
    }

    /// Product where `None` stands for the identity.
    pub fn mul_opt(&mut self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(a), Some(b)) => Some(self.mul(a, b)),
            (a, None) => a,
            (None, b) => b,
        }
    }

    /// Copies `slp` in and returns the index of its result.
    pub fn append(&mut self, slp: &Slp) -> Option<usize> {
        assert_eq!(slp.slots, self.slots, "slot count mismatch");
        let offset = self.lines.len();
        let slots = self.slots;
        let map = move |i: usize| if i < slots { i } else { i + offset };
        for ins in &slp.lines {
            self.lines.push(ins.shifted(map));
        }
        slp.result.map(map)
    }

    /// The smallest program computing value `result`, renumbered.
    pub fn extract(&self, result: Option<usize>) -> Slp {
        let Some(result) = result else {
            return Slp::identity(self.slots);
        };
        let mut needed = vec![false; self.lines.len()];
        let mut stack = vec![result];
        while let Some(v) = stack.pop() {
            if v < self.slots || needed[v - self.slots] {
                continue;
            }
            needed[v - self.slots] = true;
            let (x, y) = self.lines[v - self.slots].operands();
            stack.push(x);
            stack.extend(y);
        }
        let mut renumber = vec![usize::MAX; self.lines.len()];
        let mut lines = Vec::new();
        let slots = self.slots;
        for (j, ins) in self.lines.iter().enumerate() {
            if needed[j] {
                renumber[j] = slots + lines.len();
                lines.push(ins.shifted(|i| if i < slots { i } else { renumber[i - slots] }));
            }
        }
        let result = if result < slots { result } else { renumber[result - slots] };
        Slp { slots, lines, result: Some(result) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Perm;

    fn s3() -> Vec<GroupElement> {
        vec![
            GroupElement::Perm(Perm::from_cycles(3, &[&[1, 2]]).unwrap()),
            GroupElement::Perm(Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap()),
        ]
    }

    #[test]
    fn evaluates_left_to_right_products() {
        let gens = s3();
        let p = Slp::parse("slots=2 result=2\nMUL 0 1\n").unwrap();
        assert_eq!(p.evaluate(&gens).unwrap(), &gens[0] * &gens[1]);
        let expected = GroupElement::Perm(Perm::from_cycles(3, &[&[1, 3]]).unwrap());
        assert_eq!(p.evaluate(&gens).unwrap(), expected);
    }

    #[test]
    fn trivial_programs() {
        let gens = s3();
        assert_eq!(Slp::generator(2, 0).evaluate(&gens).unwrap(), gens[0]);
        assert!(Slp::identity(2).evaluate(&gens).unwrap().is_identity());
        assert_eq!(Slp::identity(2).len(), 0);
        assert!(Slp::identity(2).evaluate(&gens[..1]).is_err());
    }

    #[test]
    fn compose_lengths_and_values() {
        let gens = s3();
        let a = Slp::parse("slots=2 result=3\nMUL 0 1\nPOW 2 2\n").unwrap();
        let b = Slp::parse("slots=2 result=2\nINV 1\n").unwrap();
        let ab = Slp::compose(&a, &b, Compose::Product).unwrap();
        assert_eq!(ab.len(), a.len() + b.len() + 1);
        let (va, vb) = (a.evaluate(&gens).unwrap(), b.evaluate(&gens).unwrap());
        assert_eq!(ab.evaluate(&gens).unwrap(), &va * &vb);
        let inv = Slp::compose(&Slp::generator(2, 0), &Slp::identity(2), Compose::InverseOfFirst).unwrap();
        assert_eq!(inv.evaluate(&gens).unwrap(), gens[0].inverse());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let p = Slp::parse("slots=2 result=4\nMUL 0 1\nINV 2\nPOW 3 -3\n").unwrap();
        assert_eq!(Slp::parse(&p.to_string()).unwrap(), p);
        assert_eq!(Slp::parse(&Slp::identity(3).to_string()).unwrap(), Slp::identity(3));
        assert!(Slp::parse("slots=2 result=2\nMUL 0 2\n").is_err());
        assert!(Slp::parse("slots=2 result=9\nMUL 0 1\n").is_err());
        assert!(Slp::parse("slots=2 result=2\nADD 0 1\n").is_err());
        assert!(Slp::parse("result=2\nMUL 0 1\n").is_err());
    }

    #[test]
    fn extraction_prunes_unused_lines() {
        let gens = s3();
        let mut b = SlpBuilder::new(2);
        let x = b.mul(0, 1);
        let _unused = b.pow(x, 5);
        let y = b.inv(x);
        let z = b.mul(y, 0);
        let p = b.extract(Some(z));
        assert_eq!(p.len(), 3);
        let expected = &(&gens[0] * &gens[1]).inverse() * &gens[0];
        assert_eq!(p.evaluate(&gens).unwrap(), expected);
    }

    #[test]
    fn substitution_evaluates_on_program_values() {
        let gens = s3();
        let outer = Slp::parse("slots=2 result=3\nMUL 0 1\nPOW 2 -2\n").unwrap();
        let inner = [Slp::parse("slots=2 result=2\nMUL 1 0\n").unwrap(), Slp::identity(2)];
        let sub = outer.substitute(&inner).unwrap();
        let values: Vec<GroupElement> = inner.iter().map(|p| p.evaluate(&gens).unwrap()).collect();
        assert_eq!(sub.evaluate(&gens).unwrap(), outer.evaluate(&values).unwrap());
        assert!(outer.substitute(&inner[..1]).is_err());
    }
}
