//! Checking the claims a chain spec makes.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::BlackBoxGroup;
use crate::chain::compile::{compile_chain, SiftChain};
use crate::chain::spec::{ChainSpec, Guard, StageSpec, StepSpec, Strategy, Target, TestSpec, GENERATORS, IDENTITY};
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::membership::MembershipTest;
use crate::oracle::{
    self, conjugation_orbit, element_order_profile, sifting_parameter, ElementSet, EnumeratedGroup,
    Rational, SearchSet, Subgroup, DEFAULT_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Static,
    Oracle { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Uncertified,
}

#[derive(Clone, Debug)]
pub struct Claim {
    pub name: String,
    pub expected: String,
    pub computed: Option<String>,
    pub status: Status,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
}

impl Report {
    fn check(&mut self, name: impl Into<String>, expected: impl fmt::Display, computed: impl fmt::Display) {
        let (e, c) = (expected.to_string(), computed.to_string());
        let status = if e == c { Status::Pass } else { Status::Fail };
        self.claims.push(Claim { name: name.into(), expected: e, computed: Some(c), status });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, 1, u8::from(ok));
    }

    fn at_least(&mut self, name: impl Into<String>, bound: Rational, computed: Rational) {
        let status = if computed >= bound { Status::Pass } else { Status::Fail };
        self.claims.push(Claim {
            name: name.into(),
            expected: format!(">={bound}"),
            computed: Some(computed.to_string()),
            status,
        });
    }

    fn uncertified(&mut self, name: impl Into<String>, expected: impl fmt::Display) {
        self.claims.push(Claim { name: name.into(), expected: expected.to_string(), computed: None, status: Status::Uncertified });
    }

    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.notes {
            writeln!(f, "NOTE {n}")?;
        }
        for c in &self.claims {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Uncertified => "UNCERTIFIED",
            };
            writeln!(f, "CLAIM {} EXPECTED {} COMPUTED {} {status}", c.name, c.expected, c.computed.as_deref().unwrap_or("-"))?;
        }
        Ok(())
    }
}

/// Memory the oracle may use for an enumeration, in bytes.
pub const ORACLE_MEMORY: usize = 256 << 20;

/// The enumeration cap for `group`: [`DEFAULT_CAP`] elements or as many as
/// fit in [`ORACLE_MEMORY`], whichever is smaller.
pub fn default_oracle_cap(group: &BlackBoxGroup) -> usize {
    let bytes = 2 * group.identity().raw().len() + 16;
    DEFAULT_CAP.min(ORACLE_MEMORY / bytes)
}

/// Validates `spec` against `group`. Static mode checks witness orders and
/// that each 𝒯-set element passes its step's test. Oracle mode also
/// enumerates the group and certifies every `p`, `n`, `p0`, 𝒯-set, test and
/// shortcut; if enumeration exceeds the cap those claims are reported as
/// uncertified.
pub fn validate_chain(spec: &ChainSpec, group: &BlackBoxGroup, mode: Mode) -> Result<Report> {
    let chain = compile_chain(spec, group)?;
    let mut report = Report::default();
    let values = Values { spec, group };
    static_checks(spec, &chain, &values, &mut report)?;
    let Mode::Oracle { cap } = mode else {
        uncertified_params(spec, &mut report);
        return Ok(report);
    };
    let g = match EnumeratedGroup::new(group.generators(), cap) {
        Ok(g) => g,
        Err(Error::EnumerationCap { cap }) => {
            report.notes.push(format!("group has more than {cap} elements; enumeration skipped"));
            uncertified_params(spec, &mut report);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.notes.push(format!("enumerated {} elements", g.order()));
    oracle_checks(spec, &chain, &values, &g, &mut report)?;
    Ok(report)
}

struct Values<'a> {
    spec: &'a ChainSpec,
    group: &'a BlackBoxGroup,
}

impl Values<'_> {
    fn elem(&self, name: &str) -> GroupElement {
        if name == IDENTITY {
            return self.group.identity();
        }
        self.spec.element(name).expect("checked").evaluate(self.group.generators()).expect("compiled")
    }

    fn set(&self, name: &str) -> Vec<GroupElement> {
        if name == GENERATORS {
            return self.group.generators().to_vec();
        }
        self.spec.set(name).expect("checked").iter().map(|n| self.elem(n)).collect()
    }
}

fn uncertified_params(spec: &ChainSpec, report: &mut Report) {
    for (_, s) in spec.steps() {
        report.uncertified(format!("step{}.p", s.index), s.p);
        if let TestSpec::Orders { p0, .. } = &s.test {
            report.uncertified(format!("step{}.p0", s.index), p0);
        }
    }
}

fn static_checks(spec: &ChainSpec, chain: &SiftChain, v: &Values<'_>, report: &mut Report) -> Result<()> {
    for (stage, s) in spec.steps() {
        for (e, n) in &s.orders {
            report.check(format!("step{}.order.{e}", s.index), n, v.elem(e).order());
        }
        if let TestSpec::CyclicNormalizer { b, order } = &s.test {
            report.check(format!("step{}.order.{b}", s.index), order, v.elem(b).order());
        }
        let (Target::Conj { tset, l: Some(_) }, Some(a), true) = (&s.target, &stage.conj, s.conj_test) else {
            continue;
        };
        let test = chain.steps[s.index - 1].test.as_ref().expect("conjugate steps have tests");
        if !test.is_deterministic() {
            continue;
        }
        let a = v.elem(a);
        let ok = v.set(tset).iter().all(|t| accepts(test, &a.conj(t)));
        report.flag(format!("step{}.tset-accepted", s.index), ok);
    }
    Ok(())
}

fn accepts(test: &MembershipTest, x: &GroupElement) -> bool {
    let counter = crate::blackbox::MultCounter::new();
    test.check(x, 0.0, 0, &counter).map(|v| v.member).unwrap_or(false)
}

fn subgroup(g: &EnumeratedGroup, gens: Vec<GroupElement>) -> Result<Subgroup> {
    Subgroup::generated(g, &gens)
}

/// The subgroup of the L-chain sitting above the step: the previous step's
/// `L` or the stage top.
fn previous_l<'s>(stage: &'s StageSpec, s: &StepSpec) -> Option<&'s str> {
    let pos = stage.steps.iter().position(|x| x.index == s.index).expect("step in stage");
    if pos == 0 {
        return Some(&stage.top);
    }
    match &stage.steps[pos - 1].target {
        Target::Conj { l, .. } => l.as_deref(),
        Target::Subgroup(l) => Some(l),
        Target::Identity => None,
    }
}

fn oracle_checks(
    spec: &ChainSpec,
    chain: &SiftChain,
    v: &Values<'_>,
    g: &EnumeratedGroup,
    report: &mut Report,
) -> Result<()> {
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut targets: Vec<ElementSet> = Vec::new();
    let mut current: Option<ElementSet> = None;
    for (si, stage) in spec.stages.iter().enumerate() {
        let top = subgroup(g, v.set(&stage.top))?;
        if let Some(prev) = &current {
            report.flag(format!("stage{}.top", si + 1), *prev == top.set);
        }
        let mut h = top.set.clone();
        let a = stage.conj.as_deref().map(|x| v.elem(x));
        let a_class = a.as_ref().map(|a| conjugation_orbit(g, a, &top.gens));
        for s in &stage.steps {
            let step = &chain.steps[s.index - 1];
            let k = match &s.target {
                Target::Conj { tset, l } => {
                    let a = a.as_ref().expect("checked");
                    let lset = match l {
                        Some(l) => Some(subgroup(g, v.set(l))?),
                        None => None,
                    };
                    let t = v.set(tset);
                    if let (Some(l), Some(class)) = (&lset, &a_class) {
                        check_tset(g, a, &t, l, class, s.index, report);
                    }
                    let c = oracle::centralizer(g, &top.set, a);
                    let mut ct = Vec::new();
                    for ci in c.iter() {
                        for y in &t {
                            ct.push(&g.element(ci) * y);
                        }
                    }
                    let trivial = ElementSet::from_indices(n, [0]);
                    let k = oracle::product_set(g, &ct, lset.as_ref().map(|l| &l.set).unwrap_or(&trivial));
                    k
                }
                Target::Subgroup(l) => subgroup(g, v.set(l))?.set,
                Target::Identity => ElementSet::from_indices(n, [0]),
            };
            report.flag(format!("step{}.nested", s.index), k.is_subset(&h));

            let (search, is_subgroup, companions): (ElementSet, bool, Vec<GroupElement>) = match s.strategy {
                Strategy::Random => {
                    let l = subgroup(g, v.set(s.sampler.as_deref().expect("checked")))?;
                    let comp = s.companions.as_deref().map(|c| v.set(c)).unwrap_or_default();
                    (l.set, true, comp)
                }
                Strategy::CosetReps => {
                    let reps = v.set(s.reps.as_deref().expect("checked"));
                    let idx = reps.iter().map(|r| g.index_of(r).expect("in group"));
                    (ElementSet::from_indices(n, idx), false, Vec::new())
                }
                Strategy::ExhaustiveFinal => {
                    let stored = v.set(s.reps.as_deref().expect("checked"));
                    let has_one = stored.iter().any(|x| x.is_identity());
                    let idx = stored.iter().map(|x| {
                        let y = if has_one { x.clone() } else { x.inverse() };
                        g.index_of(&y).expect("in group")
                    });
                    (ElementSet::from_indices(n, idx), false, Vec::new())
                }
            };
            let search_set = SearchSet { elements: &search, is_subgroup, companions: &companions };
            match sifting_parameter(g, &h, &k, &search_set) {
                Ok(p) => report.check(format!("step{}.p", s.index), s.p, p),
                Err(e) => {
                    report.notes.push(format!("step {}: {e}", s.index));
                    report.check(format!("step{}.p", s.index), s.p, 0);
                }
            }
            if s.strategy == Strategy::CosetReps {
                let hits = oracle::min_hits(g, &h, &k, &search);
                report.check(format!("step{}.n", s.index), step.n, hits);
            }
            if let Some(test) = &step.test {
                check_test(g, test, a.as_ref().filter(|_| s.conj_test), &h, &k, s.index, &mut rng, report);
            }
            if let TestSpec::Orders { k: kname, orders, p0 } = &s.test {
                let upper = previous_l(stage, s).map(|name| v.set(name));
                match upper {
                    Some(gens) => {
                        let m = subgroup(g, gens)?;
                        let kk = subgroup(g, v.set(kname))?;
                        report.check(format!("step{}.k-avoids-orders", s.index), Rational::from_integer(0), element_order_profile(g, &kk.set, orders));
                        // the tested element is a^{hy} for conjugation tests
                        let mut outside: Vec<usize> = match (&a_class, s.conj_test) {
                            (Some(class), true) => class.iter().map(|(i, _)| *i).filter(|&i| m.set.contains(i)).collect(),
                            _ => m.set.iter().collect(),
                        };
                        outside.retain(|&i| !kk.set.contains(i));
                        outside.shuffle(&mut rng);
                        let mut worst = Rational::from_integer(1);
                        let mut seen: Vec<ElementSet> = Vec::new();
                        for &i in outside.iter().take(32) {
                            let mut gens = kk.gens.clone();
                            gens.push(g.element(i));
                            let mid = subgroup(g, gens)?;
                            if !seen.contains(&mid.set) {
                                worst = worst.min(element_order_profile(g, &mid.set, orders));
                                seen.push(mid.set);
                            }
                        }
                        report.at_least(format!("step{}.p0", s.index), *p0, worst);
                    }
                    None => report.uncertified(format!("step{}.p0", s.index), p0),
                }
            }
            for (j, sc) in s.shortcuts.iter().enumerate() {
                if let Guard::Hint(hint) = sc.guard {
                    let ok = check_hint_shortcut(g, chain, s, hint, &v.elem(&sc.apply), sc.goto, &k, &targets, a.as_ref());
                    report.flag(format!("step{}.shortcut{}", s.index, j + 1), ok);
                }
            }
            targets.push(k.clone());
            h = k;
        }
        current = Some(h);
    }
    Ok(())
}

/// `a^{𝒯 L}` is `a^{G_0} ∩ L` and the `a^t` lie in distinct `L`-classes.
fn check_tset(
    g: &EnumeratedGroup,
    a: &GroupElement,
    t: &[GroupElement],
    l: &Subgroup,
    class: &[(usize, GroupElement)],
    index: usize,
    report: &mut Report,
) {
    let n = g.order();
    let want = ElementSet::from_indices(n, class.iter().map(|(i, _)| *i).filter(|&i| l.set.contains(i)));
    let mut got = ElementSet::empty(n);
    let mut classes = 0;
    for y in t {
        let orbit = conjugation_orbit(g, &a.conj(y), &l.gens);
        if !got.contains(orbit[0].0) {
            classes += 1;
        }
        got = ElementSet::from_indices(n, got.iter().chain(orbit.iter().map(|(i, _)| *i)));
    }
    report.flag(format!("step{index}.tset-cover"), got == want);
    report.check(format!("step{index}.tset-classes"), t.len(), classes);
}

#[allow(clippy::too_many_arguments)]
fn check_test(
    g: &EnumeratedGroup,
    test: &MembershipTest,
    a: Option<&GroupElement>,
    h: &ElementSet,
    k: &ElementSet,
    index: usize,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) {
    let candidate = |i: usize| match a {
        Some(a) => a.conj(&g.element(i)),
        None => g.element(i),
    };
    if test.is_deterministic() {
        let ok = h.iter().all(|i| accepts(test, &candidate(i)) == k.contains(i));
        report.flag(format!("step{index}.test-exact"), ok);
    } else {
        let members: Vec<usize> = k.iter().collect();
        let counter = crate::blackbox::MultCounter::new();
        let ok = (0..50).all(|_| {
            let i = members[rng.random_range(0..members.len())];
            let seed = rng.random::<u64>();
            test.check(&candidate(i), 0.01, seed, &counter).map(|v| v.member).unwrap_or(false)
        });
        report.flag(format!("step{index}.test-accepts-members"), ok);
    }
}

/// Every element of the step's target whose test reports `hint` is moved by
/// the correction into the subset reached just before step `goto`.
#[allow(clippy::too_many_arguments)]
fn check_hint_shortcut(
    g: &EnumeratedGroup,
    chain: &SiftChain,
    s: &StepSpec,
    hint: usize,
    apply: &GroupElement,
    goto: usize,
    k: &ElementSet,
    targets: &[ElementSet],
    a: Option<&GroupElement>,
) -> bool {
    let test = chain.steps[s.index - 1].test.as_ref().expect("hint steps have tests");
    let counter = crate::blackbox::MultCounter::new();
    // targets of steps before `goto`: the current step's own target is `k`
    let dest_index = goto - 2;
    let dest = if dest_index + 1 == s.index { Some(k) } else { targets.get(dest_index) };
    let Some(dest) = dest else {
        // the destination lies further along and is not built yet
        return check_forward(g, chain, s, hint, apply, goto, k, a);
    };
    k.iter().all(|i| {
        let x = g.element(i);
        let w = a.map(|a| a.conj(&x)).unwrap_or_else(|| x.clone());
        let v = test.check(&w, 0.0, 0, &counter).expect("same kind");
        v.hint != Some(hint) || dest.contains(g.index_of(&(&x * apply)).expect("in group"))
    })
}

#[allow(clippy::too_many_arguments)]
fn check_forward(
    g: &EnumeratedGroup,
    chain: &SiftChain,
    s: &StepSpec,
    hint: usize,
    apply: &GroupElement,
    goto: usize,
    k: &ElementSet,
    a: Option<&GroupElement>,
) -> bool {
    // accept when the step before `goto` admits the corrected element
    let before = &chain.steps[goto - 2];
    let test = chain.steps[s.index - 1].test.as_ref().expect("hint steps have tests");
    let Some(next_test) = before.test.as_ref() else { return false };
    let counter = crate::blackbox::MultCounter::new();
    k.iter().all(|i| {
        let x = g.element(i);
        let w = a.map(|a| a.conj(&x)).unwrap_or_else(|| x.clone());
        let v = test.check(&w, 0.0, 0, &counter).expect("same kind");
        if v.hint != Some(hint) {
            return true;
        }
        let y = &x * apply;
        let wy = match &before.conj {
            Some(c) => c.elem.conj(&y),
            None => y,
        };
        next_test.check(&wy, 0.0, 0, &counter).map(|v| v.member).unwrap_or(false)
    })
}
