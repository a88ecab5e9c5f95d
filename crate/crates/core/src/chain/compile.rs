//! Compiling a chain spec against concrete generators.

use std::collections::{HashMap, HashSet};

use crate::blackbox::BlackBoxGroup;
use crate::chain::spec::{ChainSpec, Guard, Strategy, Target, TestSpec, GENERATORS, IDENTITY};
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::membership::{MembershipTest, TestKind, Witness};
use crate::oracle::Rational;
use crate::slp::Slp;

#[derive(Clone, Debug)]
pub enum CompiledGuard {
    Hint(usize),
    ConjEquals(GroupElement),
}

#[derive(Clone, Debug)]
pub struct CompiledShortcut {
    pub guard: CompiledGuard,
    pub apply: GroupElement,
    pub apply_word: Slp,
    /// 1-based step to continue with.
    pub goto: usize,
}

/// A stored element with its word in the standard generators.
#[derive(Clone, Debug)]
pub struct StoredElement {
    pub witness: Witness,
    pub word: Slp,
}

#[derive(Clone, Debug)]
pub struct CompiledStep {
    pub index: usize,
    pub stage: usize,
    pub strategy: Strategy,
    pub p: Rational,
    /// Size of the stored search set (coset and exhaustive steps).
    pub k: usize,
    /// Guaranteed number of successful representatives (coset steps).
    pub n: u64,
    /// Conjugating element when the test is applied to `a^z`.
    pub conj: Option<Witness>,
    pub test: Option<MembershipTest>,
    pub sampler: Vec<(GroupElement, Slp)>,
    pub companions: Vec<StoredElement>,
    pub reps: Vec<StoredElement>,
    pub shortcuts: Vec<CompiledShortcut>,
}

impl CompiledStep {
    /// True when the step consumes part of the error budget.
    pub fn is_randomized(&self) -> bool {
        self.strategy == Strategy::Random || self.test.as_ref().is_some_and(|t| !t.is_deterministic())
    }
}

/// An executable chain: all words evaluated, tests materialized.
#[derive(Clone, Debug)]
pub struct SiftChain {
    pub name: String,
    pub group: String,
    pub generators: Vec<GroupElement>,
    pub steps: Vec<CompiledStep>,
}

impl SiftChain {
    pub fn slots(&self) -> usize {
        self.generators.len()
    }
}

struct Env<'s> {
    spec: &'s ChainSpec,
    group: &'s BlackBoxGroup,
    values: HashMap<&'s str, (GroupElement, Slp)>,
}

impl<'s> Env<'s> {
    fn err(&self, step: usize, message: impl Into<String>) -> Error {
        Error::Compile { chain: self.spec.name.clone(), step, message: message.into() }
    }

    fn elem(&self, name: &str) -> (GroupElement, Slp) {
        if name == IDENTITY {
            return (self.group.identity(), Slp::identity(self.spec.slots));
        }
        self.values[name].clone()
    }

    fn set(&self, name: &str) -> Vec<(GroupElement, Slp)> {
        if name == GENERATORS {
            return (0..self.spec.slots)
                .map(|i| (self.group.generators()[i].clone(), Slp::generator(self.spec.slots, i)))
                .collect();
        }
        self.spec.set(name).expect("checked").iter().map(|n| self.elem(n)).collect()
    }

    fn stored(&self, name: &str) -> Vec<StoredElement> {
        self.set(name).into_iter().map(|(e, word)| StoredElement { witness: Witness::new(e), word }).collect()
    }

    fn elements(&self, name: &str) -> Vec<GroupElement> {
        self.set(name).into_iter().map(|(e, _)| e).collect()
    }
}

/// Evaluates every word of `spec` over `group`'s generators and assembles
/// the executable steps.
pub fn compile_chain(spec: &ChainSpec, group: &BlackBoxGroup) -> Result<SiftChain> {
    spec.check()?;
    if group.generators().len() != spec.slots {
        return Err(Error::Compile {
            chain: spec.name.clone(),
            step: 0,
            message: format!("chain uses {} generators, group has {}", spec.slots, group.generators().len()),
        });
    }
    let mut env = Env { spec, group, values: HashMap::new() };
    for (name, slp) in &spec.elements {
        let value = slp.evaluate(group.generators()).map_err(|e| env.err(0, format!("element `{name}`: {e}")))?;
        env.values.insert(name.as_str(), (value, slp.clone()));
    }
    let mut steps = Vec::new();
    for (si, stage) in spec.stages.iter().enumerate() {
        let a = stage.conj.as_deref().map(|n| env.elem(n).0);
        for s in &stage.steps {
            for (e, n) in &s.orders {
                let actual = env.elem(e).0.order();
                if actual != *n {
                    return Err(env.err(s.index, format!("element `{e}` has order {actual}, claimed {n}")));
                }
            }
            let test = match &s.test {
                TestSpec::None => None,
                t => Some(MembershipTest::new(compile_test(&env, s.index, t)?)),
            };
            let reps = s.reps.as_deref().map(|r| env.stored(r)).unwrap_or_default();
            let k = reps.len();
            let n = match (s.strategy, s.n) {
                (Strategy::CosetReps, Some(n)) => n,
                (Strategy::CosetReps, None) => {
                    let kn = s.p * Rational::from_integer(k as u64);
                    if !kn.is_integer() {
                        return Err(env.err(s.index, format!("p * k = {kn} is not an integer; give `n`")));
                    }
                    kn.to_integer()
                }
                _ => 0,
            };
            if s.strategy == Strategy::CosetReps && (n == 0 || n as usize > k) {
                return Err(env.err(s.index, format!("n = {n} out of range for k = {k}")));
            }
            let shortcuts = s
                .shortcuts
                .iter()
                .map(|sc| {
                    let (apply, apply_word) = env.elem(&sc.apply);
                    let guard = match &sc.guard {
                        Guard::Hint(j) => CompiledGuard::Hint(*j),
                        Guard::ConjEquals(e) => CompiledGuard::ConjEquals(env.elem(e).0),
                    };
                    CompiledShortcut { guard, apply, apply_word, goto: sc.goto }
                })
                .collect();
            if let Target::Conj { .. } = s.target {
                if a.is_none() {
                    return Err(env.err(s.index, "conjugate target without `conj`"));
                }
            }
            steps.push(CompiledStep {
                index: s.index,
                stage: si,
                strategy: s.strategy,
                p: s.p,
                k,
                n,
                conj: if s.conj_test { a.clone().map(Witness::new) } else { None },
                test,
                sampler: s.sampler.as_deref().map(|r| env.set(r)).unwrap_or_default(),
                companions: s.companions.as_deref().map(|r| env.stored(r)).unwrap_or_default(),
                reps,
                shortcuts,
            });
        }
    }
    Ok(SiftChain { name: spec.name.clone(), group: spec.group.clone(), generators: group.generators().to_vec(), steps })
}

fn compile_test(env: &Env<'_>, step: usize, t: &TestSpec) -> Result<TestKind> {
    Ok(match t {
        TestSpec::Centralizer(ws) => TestKind::Centralizer(ws.iter().map(|w| Witness::new(env.elem(w).0)).collect()),
        TestSpec::CyclicNormalizer { b, order } => {
            let b = env.elem(b).0;
            if b.order() != *order {
                return Err(env.err(step, format!("normalizer witness has order {}, claimed {order}", b.order())));
            }
            let powers: HashSet<GroupElement> = (0..*order as i64).map(|i| b.pow(i)).collect();
            TestKind::CyclicNormalizer { b, powers }
        }
        TestSpec::StoredSet(s) => TestKind::StoredSet(env.elements(s).into_iter().collect()),
        TestSpec::Normalizer { gens, elements } => TestKind::Normalizer {
            gens: env.elements(gens),
            elements: env.elements(elements).into_iter().collect(),
        },
        TestSpec::CommutesAny(s) => TestKind::CommutesAny(env.elements(s).into_iter().map(Witness::new).collect()),
        TestSpec::Orders { k, orders, p0 } => {
            TestKind::Orders { k_gens: env.elements(k), orders: orders.clone(), p0: *p0 }
        }
        TestSpec::None => unreachable!("handled by the caller"),
    })
}
