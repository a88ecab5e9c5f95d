//! The chain-spec text format: data model, parser and serializer.
//! The grammar is described in `docs/formats.md`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::blackbox::OrderSet;
use crate::error::{Error, Result};
use crate::oracle::Rational;
use crate::slp::{parse_header, parse_instr, Slp};

/// Name that always denotes the identity element.
pub const IDENTITY: &str = "1";
/// Set name that always denotes the standard generators.
pub const GENERATORS: &str = "G";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random,
    CosetReps,
    ExhaustiveFinal,
}

impl Strategy {
    fn keyword(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::CosetReps => "coset-reps",
            Strategy::ExhaustiveFinal => "exhaustive-final",
        }
    }
}

/// The subset a step sifts into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// `C_G(a) 𝒯 L` for the stage's `a`; `l == None` means `L = 1`.
    Conj { tset: String, l: Option<String> },
    /// A subgroup given by a generator set.
    Subgroup(String),
    /// The trivial subgroup.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestSpec {
    Centralizer(Vec<String>),
    CyclicNormalizer { b: String, order: u64 },
    StoredSet(String),
    Normalizer { gens: String, elements: String },
    CommutesAny(String),
    Orders { k: String, orders: OrderSet, p0: Rational },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    /// The step's own test reported this hint.
    Hint(usize),
    /// Before searching, `a^h` equals the named element.
    ConjEquals(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shortcut {
    pub guard: Guard,
    pub apply: String,
    pub goto: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSpec {
    pub index: usize,
    pub strategy: Strategy,
    pub p: Rational,
    pub n: Option<u64>,
    pub target: Target,
    /// Test applied to `a^z` (true) or to `z` itself.
    pub conj_test: bool,
    pub test: TestSpec,
    pub sampler: Option<String>,
    pub companions: Option<String>,
    pub reps: Option<String>,
    pub shortcuts: Vec<Shortcut>,
    pub orders: Vec<(String, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSpec {
    pub name: String,
    pub top: String,
    pub conj: Option<String>,
    pub tset0: Option<String>,
    pub steps: Vec<StepSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub name: String,
    pub group: String,
    pub generators: Option<String>,
    pub slots: usize,
    pub elements: Vec<(String, Slp)>,
    pub sets: Vec<(String, Vec<String>)>,
    pub stages: Vec<StageSpec>,
}

impl ChainSpec {
    pub fn element(&self, name: &str) -> Option<&Slp> {
        self.elements.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn set(&self, name: &str) -> Option<&[String]> {
        self.sets.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
    }

    pub fn steps(&self) -> impl Iterator<Item = (&StageSpec, &StepSpec)> {
        self.stages.iter().flat_map(|st| st.steps.iter().map(move |s| (st, s)))
    }

    pub fn step_count(&self) -> usize {
        self.stages.iter().map(|s| s.steps.len()).sum()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        ChainSpec::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let spec = Parser::new(text).parse()?;
        spec.check()?;
        Ok(spec)
    }

    /// Structural invariants: names resolve, steps are numbered 1, 2, ...,
    /// every `p` lies in `(0, 1]`, each stage's `𝒯_0` is `{1}`, and each
    /// strategy has the fields it needs.
    pub fn check(&self) -> Result<()> {
        let fail = |step: usize, msg: String| Error::Compile { chain: self.name.clone(), step, message: msg };
        let mut names = BTreeSet::new();
        for (n, slp) in &self.elements {
            if n == IDENTITY || !names.insert(n.as_str()) {
                return Err(fail(0, format!("element `{n}` is reserved or defined twice")));
            }
            if slp.slots() != self.slots {
                return Err(fail(0, format!("element `{n}` uses {} slots, chain has {}", slp.slots(), self.slots)));
            }
        }
        let elem_ok = |n: &str| n == IDENTITY || names.contains(n);
        let mut set_names = BTreeSet::new();
        for (n, members) in &self.sets {
            if n == GENERATORS || !set_names.insert(n.as_str()) {
                return Err(fail(0, format!("set `{n}` is reserved or defined twice")));
            }
            if let Some(m) = members.iter().find(|m| !elem_ok(m)) {
                return Err(fail(0, format!("set `{n}` refers to unknown element `{m}`")));
            }
        }
        let set_ok = |n: &str| n == GENERATORS || set_names.contains(n);
        if self.stages.is_empty() {
            return Err(fail(0, "chain has no stages".into()));
        }
        let total = self.step_count();
        let mut expected = 1;
        for stage in &self.stages {
            if !set_ok(&stage.top) {
                return Err(fail(expected, format!("unknown top set `{}`", stage.top)));
            }
            if let Some(a) = &stage.conj {
                if !elem_ok(a) {
                    return Err(fail(expected, format!("unknown element `{a}`")));
                }
                let t0 = stage.tset0.as_deref().and_then(|t| self.set(t));
                let trivial = t0.is_some_and(|t| {
                    t.len() == 1 && (t[0] == IDENTITY || self.element(&t[0]).is_some_and(|s| s.is_identity()))
                });
                if !trivial {
                    return Err(fail(expected, "stage 𝒯_0 must be {1}".into()));
                }
            }
            if stage.steps.is_empty() {
                return Err(fail(expected, format!("stage `{}` has no steps", stage.name)));
            }
            for step in &stage.steps {
                let f = |m: String| fail(step.index, m);
                if step.index != expected {
                    return Err(f(format!("expected step {expected}")));
                }
                expected += 1;
                if *step.p.numer() == 0 || step.p > Rational::from_integer(1) {
                    return Err(f(format!("p = {} is not in (0, 1]", step.p)));
                }
                let mut sets_used: Vec<&str> = Vec::new();
                let mut elems_used: Vec<&str> = Vec::new();
                match &step.target {
                    Target::Conj { tset, l } => {
                        if stage.conj.is_none() {
                            return Err(f("conjugate target in a stage without `conj`".into()));
                        }
                        sets_used.push(tset);
                        sets_used.extend(l.as_deref());
                    }
                    Target::Subgroup(l) => sets_used.push(l),
                    Target::Identity => {}
                }
                if step.conj_test && stage.conj.is_none() {
                    return Err(f("conjugate test in a stage without `conj`".into()));
                }
                match &step.test {
                    TestSpec::Centralizer(ws) => elems_used.extend(ws.iter().map(String::as_str)),
                    TestSpec::CyclicNormalizer { b, .. } => elems_used.push(b),
                    TestSpec::StoredSet(s) | TestSpec::CommutesAny(s) => sets_used.push(s),
                    TestSpec::Normalizer { gens, elements } => sets_used.extend([gens.as_str(), elements.as_str()]),
                    TestSpec::Orders { k, orders, p0 } => {
                        sets_used.push(k);
                        if orders.is_empty() || *p0.numer() == 0 || *p0 > Rational::from_integer(1) {
                            return Err(f("order test needs a nonempty I and p0 in (0, 1]".into()));
                        }
                    }
                    TestSpec::None => {}
                }
                match step.strategy {
                    Strategy::Random => {
                        if step.sampler.is_none() {
                            return Err(f("random search needs a `sampler`".into()));
                        }
                    }
                    Strategy::CosetReps => {
                        if step.reps.is_none() {
                            return Err(f("coset search needs `reps`".into()));
                        }
                    }
                    Strategy::ExhaustiveFinal => {
                        if step.reps.is_none() || step.index != total {
                            return Err(f("exhaustive search must be the last step and needs `reps`".into()));
                        }
                    }
                }
                if step.strategy != Strategy::ExhaustiveFinal && step.test == TestSpec::None {
                    return Err(f("step needs a membership test".into()));
                }
                sets_used.extend(step.sampler.as_deref());
                sets_used.extend(step.companions.as_deref());
                sets_used.extend(step.reps.as_deref());
                for sc in &step.shortcuts {
                    elems_used.push(&sc.apply);
                    if let Guard::ConjEquals(e) = &sc.guard {
                        elems_used.push(e);
                    }
                    if sc.goto <= step.index || sc.goto > total {
                        return Err(f(format!("shortcut target {} is not a later step", sc.goto)));
                    }
                }
                elems_used.extend(step.orders.iter().map(|(e, _)| e.as_str()));
                if let Some(s) = sets_used.iter().find(|s| !set_ok(s)) {
                    return Err(f(format!("unknown set `{s}`")));
                }
                if let Some(e) = elems_used.iter().find(|e| !elem_ok(e)) {
                    return Err(f(format!("unknown element `{e}`")));
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "chain {}", self.name);
        let _ = writeln!(o, "group {}", self.group);
        if let Some(g) = &self.generators {
            let _ = writeln!(o, "generators {g}");
        }
        let _ = writeln!(o, "slots {}", self.slots);
        for (name, slp) in &self.elements {
            let _ = write!(o, "\nelem {name}\n{slp}end\n");
        }
        if !self.sets.is_empty() {
            o.push('\n');
        }
        for (name, members) in &self.sets {
            let _ = writeln!(o, "set {name} {}", members.join(" "));
        }
        for stage in &self.stages {
            let _ = writeln!(o, "\nstage {}", stage.name);
            let _ = writeln!(o, "top {}", stage.top);
            if let Some(a) = &stage.conj {
                let _ = writeln!(o, "conj {a}");
            }
            if let Some(t) = &stage.tset0 {
                let _ = writeln!(o, "tset0 {t}");
            }
            for s in &stage.steps {
                write_step(&mut o, s);
            }
        }
        o
    }
}

fn write_step(o: &mut String, s: &StepSpec) {
    let _ = writeln!(o, "\nstep {}", s.index);
    let _ = writeln!(o, "strategy {}", s.strategy.keyword());
    let _ = writeln!(o, "p {}", s.p);
    if let Some(n) = s.n {
        let _ = writeln!(o, "n {n}");
    }
    match &s.target {
        Target::Conj { tset, l } => {
            let _ = writeln!(o, "target conj {tset} {}", l.as_deref().unwrap_or(IDENTITY));
        }
        Target::Subgroup(l) => {
            let _ = writeln!(o, "target subgroup {l}");
        }
        Target::Identity => {
            let _ = writeln!(o, "target identity");
        }
    }
    let conj = if s.conj_test { "conj " } else { "" };
    let test = match &s.test {
        TestSpec::Centralizer(ws) => format!("centralizer {}", ws.join(" ")),
        TestSpec::CyclicNormalizer { b, order } => format!("cyclic-normalizer {b} {order}"),
        TestSpec::StoredSet(set) => format!("stored-set {set}"),
        TestSpec::Normalizer { gens, elements } => format!("normalizer {gens} {elements}"),
        TestSpec::CommutesAny(set) => format!("commutes-any {set}"),
        TestSpec::Orders { k, orders, p0 } => {
            let i: Vec<String> = orders.iter().map(|n| n.to_string()).collect();
            format!("orders {k} {} {p0}", i.join(","))
        }
        TestSpec::None => "none".into(),
    };
    let _ = writeln!(o, "test {conj}{test}");
    for (key, v) in [("sampler", &s.sampler), ("companions", &s.companions), ("reps", &s.reps)] {
        if let Some(v) = v {
            let _ = writeln!(o, "{key} {v}");
        }
    }
    for sc in &s.shortcuts {
        let guard = match &sc.guard {
            Guard::Hint(j) => format!("hint {j}"),
            Guard::ConjEquals(e) => format!("when-conj {e}"),
        };
        let _ = writeln!(o, "shortcut {guard} apply {} goto {}", sc.apply, sc.goto);
    }
    for (e, n) in &s.orders {
        let _ = writeln!(o, "order {e} {n}");
    }
    let _ = writeln!(o, "end");
}

fn parse_rational(lno: usize, s: &str) -> Result<Rational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: u64 = n.parse().map_err(|_| Error::parse(lno, format!("bad rational `{s}`")))?;
    let d: u64 = d.parse().map_err(|_| Error::parse(lno, format!("bad rational `{s}`")))?;
    if d == 0 {
        return Err(Error::parse(lno, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Parser { lines, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.pos).copied();
        self.pos += 1;
        l
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.lines.get(self.pos).and_then(|(_, l)| l.split_whitespace().next())
    }

    fn parse(mut self) -> Result<ChainSpec> {
        let mut header: HashMap<&str, (usize, &str)> = HashMap::new();
        let mut elements = Vec::new();
        let mut sets = Vec::new();
        let mut stages = Vec::new();
        while let Some((lno, line)) = self.next() {
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "chain" | "group" | "generators" | "slots" => {
                    if header.insert(kw, (lno, rest)).is_some() {
                        return Err(Error::parse(lno, format!("duplicate `{kw}`")));
                    }
                }
                "elem" => {
                    let name = single(lno, rest, "element name")?;
                    elements.push((name.to_string(), self.parse_slp(lno)?));
                }
                "set" => {
                    let mut it = rest.split_whitespace();
                    let name = it.next().ok_or_else(|| Error::parse(lno, "set needs a name"))?;
                    sets.push((name.to_string(), it.map(str::to_string).collect()));
                }
                "stage" => stages.push(self.parse_stage(lno, rest)?),
                _ => return Err(Error::parse(lno, format!("unexpected `{kw}`"))),
            }
        }
        let get = |k: &str| header.get(k).map(|(_, v)| v.to_string());
        let name = get("chain").ok_or_else(|| Error::parse(1, "missing `chain`"))?;
        let group = get("group").ok_or_else(|| Error::parse(1, "missing `group`"))?;
        let (slno, slots) = header.get("slots").copied().ok_or_else(|| Error::parse(1, "missing `slots`"))?;
        let slots = slots.parse().map_err(|_| Error::parse(slno, "bad slot count"))?;
        Ok(ChainSpec { name, group, generators: get("generators"), slots, elements, sets, stages })
    }

    fn parse_slp(&mut self, start: usize) -> Result<Slp> {
        let (hl, header) = self.next().ok_or_else(|| Error::parse(start, "missing program header"))?;
        let (slots, result) = parse_header(hl, header)?;
        let mut instrs = Vec::new();
        loop {
            let (lno, line) = self.next().ok_or_else(|| Error::parse(start, "unterminated `elem`"))?;
            if line == "end" {
                break;
            }
            instrs.push(parse_instr(lno, line)?);
        }
        Slp::new(slots, instrs, result).map_err(|e| Error::parse(hl, e.to_string()))
    }

    fn parse_stage(&mut self, lno: usize, name: &str) -> Result<StageSpec> {
        let mut stage = StageSpec {
            name: single(lno, name, "stage name")?.to_string(),
            top: String::new(),
            conj: None,
            tset0: None,
            steps: Vec::new(),
        };
        while let Some(kw) = self.peek_keyword() {
            if kw == "stage" {
                break;
            }
            let (lno, line) = self.next().expect("peeked");
            let rest = line[kw.len()..].trim();
            match kw {
                "top" => stage.top = single(lno, rest, "set name")?.to_string(),
                "conj" => stage.conj = Some(single(lno, rest, "element name")?.to_string()),
                "tset0" => stage.tset0 = Some(single(lno, rest, "set name")?.to_string()),
                "step" => {
                    let index = rest.parse().map_err(|_| Error::parse(lno, "bad step index"))?;
                    stage.steps.push(self.parse_step(lno, index)?);
                }
                _ => return Err(Error::parse(lno, format!("unexpected `{kw}` in stage"))),
            }
        }
        if stage.top.is_empty() {
            return Err(Error::parse(lno, "stage needs a `top`"));
        }
        Ok(stage)
    }

    fn parse_step(&mut self, start: usize, index: usize) -> Result<StepSpec> {
        let mut strategy = None;
        let mut p = None;
        let mut target = None;
        let mut test = None;
        let mut step = StepSpec {
            index,
            strategy: Strategy::Random,
            p: Rational::from_integer(1),
            n: None,
            target: Target::Identity,
            conj_test: false,
            test: TestSpec::None,
            sampler: None,
            companions: None,
            reps: None,
            shortcuts: Vec::new(),
            orders: Vec::new(),
        };
        loop {
            let (lno, line) = self.next().ok_or_else(|| Error::parse(start, "unterminated `step`"))?;
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<u64>().map_err(|_| Error::parse(lno, format!("bad number `{s}`")));
            match words.as_slice() {
                ["end"] => break,
                ["strategy", s] => {
                    strategy = Some(match *s {
                        "random" => Strategy::Random,
                        "coset-reps" => Strategy::CosetReps,
                        "exhaustive-final" => Strategy::ExhaustiveFinal,
                        _ => return Err(Error::parse(lno, format!("unknown strategy `{s}`"))),
                    })
                }
                ["p", r] => p = Some(parse_rational(lno, r)?),
                ["n", n] => step.n = Some(num(n)?),
                ["target", "conj", t, l] => {
                    let l = (*l != IDENTITY).then(|| l.to_string());
                    target = Some(Target::Conj { tset: t.to_string(), l });
                }
                ["target", "subgroup", l] => target = Some(Target::Subgroup(l.to_string())),
                ["target", "identity"] => target = Some(Target::Identity),
                ["test", rest @ ..] => {
                    let (conj, rest) = match rest {
                        ["conj", r @ ..] => (true, r),
                        r => (false, r),
                    };
                    step.conj_test = conj;
                    test = Some(match rest {
                        ["centralizer", ws @ ..] if !ws.is_empty() => {
                            TestSpec::Centralizer(ws.iter().map(|w| w.to_string()).collect())
                        }
                        ["cyclic-normalizer", b, n] => TestSpec::CyclicNormalizer { b: b.to_string(), order: num(n)? },
                        ["stored-set", s] => TestSpec::StoredSet(s.to_string()),
                        ["normalizer", g, e] => TestSpec::Normalizer { gens: g.to_string(), elements: e.to_string() },
                        ["commutes-any", s] => TestSpec::CommutesAny(s.to_string()),
                        ["orders", k, i, p0] => {
                            let orders = i.split(',').map(num).collect::<Result<Vec<u64>>>()?;
                            let orders = OrderSet::new(orders).map_err(|e| Error::parse(lno, e.to_string()))?;
                            TestSpec::Orders { k: k.to_string(), orders, p0: parse_rational(lno, p0)? }
                        }
                        ["none"] => TestSpec::None,
                        _ => return Err(Error::parse(lno, format!("unknown test `{line}`"))),
                    });
                }
                ["sampler", s] => step.sampler = Some(s.to_string()),
                ["companions", s] => step.companions = Some(s.to_string()),
                ["reps", s] => step.reps = Some(s.to_string()),
                ["shortcut", kind, g, "apply", e, "goto", t] => {
                    let guard = match *kind {
                        "hint" => Guard::Hint(num(g)? as usize),
                        "when-conj" => Guard::ConjEquals(g.to_string()),
                        _ => return Err(Error::parse(lno, format!("unknown guard `{kind}`"))),
                    };
                    step.shortcuts.push(Shortcut { guard, apply: e.to_string(), goto: num(t)? as usize });
                }
                ["order", e, n] => step.orders.push((e.to_string(), num(n)?)),
                _ => return Err(Error::parse(lno, format!("unexpected `{line}` in step"))),
            }
        }
        step.strategy = strategy.ok_or_else(|| Error::parse(start, "step needs a `strategy`"))?;
        step.p = p.ok_or_else(|| Error::parse(start, "step needs `p`"))?;
        step.target = target.ok_or_else(|| Error::parse(start, "step needs a `target`"))?;
        step.test = test.ok_or_else(|| Error::parse(start, "step needs a `test`"))?;
        Ok(step)
    }
}

fn single<'a>(lno: usize, rest: &'a str, what: &str) -> Result<&'a str> {
    let mut it = rest.split_whitespace();
    match (it.next(), it.next()) {
        (Some(w), None) => Ok(w),
        _ => Err(Error::parse(lno, format!("expected a single {what}"))),
    }
}
