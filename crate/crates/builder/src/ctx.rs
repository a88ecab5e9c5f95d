//! Helpers for assembling chain specs from an enumerated group.

use std::collections::HashMap;

use anyhow::{bail, Result};
use gensift::chain::spec::{ChainSpec, Guard, Shortcut, StageSpec, StepSpec, Strategy, Target, TestSpec, IDENTITY};
use gensift::chain::{validate_chain, Mode, Status};
use gensift::oracle::{
    centralizer, conjugation_orbit, normalizer, product_set, sifting_parameter, ElementSet, EnumeratedGroup, Rational, SearchSet, Subgroup,
};
use gensift::{BlackBoxGroup, GroupElement, Slp};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Ctx<'g> {
    pub g: &'g EnumeratedGroup,
    pub rng: ChaCha8Rng,
}

impl<'g> Ctx<'g> {
    pub fn new(g: &'g EnumeratedGroup, seed: u64) -> Self {
        Ctx { g, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn idx(&self, x: &GroupElement) -> usize {
        self.g.index_of(x).expect("element of the group")
    }

    pub fn el(&self, i: usize) -> GroupElement {
        self.g.element(i)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::whole(self.g)
    }

    pub fn sub(&self, gens: &[GroupElement]) -> Subgroup {
        Subgroup::generated(self.g, gens).expect("generators lie in the group")
    }

    /// First member of `set` in enumeration order satisfying `pred`; early
    /// members have short words.
    pub fn first(&self, set: &ElementSet, mut pred: impl FnMut(&GroupElement) -> bool) -> Option<GroupElement> {
        set.iter().map(|i| self.el(i)).find(|x| pred(x))
    }

    pub fn all(&self, set: &ElementSet, mut pred: impl FnMut(&GroupElement) -> bool) -> Vec<GroupElement> {
        set.iter().map(|i| self.el(i)).filter(|x| pred(x)).collect()
    }

    pub fn centralizer(&mut self, within: &Subgroup, a: &GroupElement) -> Subgroup {
        let set = centralizer(self.g, &within.set, a);
        self.with_gens(set)
    }

    pub fn normalizer(&mut self, within: &Subgroup, sub: &Subgroup) -> Subgroup {
        let set = normalizer(self.g, &within.set, sub);
        self.with_gens(set)
    }

    /// Finds a short generating list for a subgroup given as a set: random
    /// pairs first, then greedy extension.
    pub fn with_gens(&mut self, set: ElementSet) -> Subgroup {
        let members: Vec<usize> = set.iter().collect();
        if members.len() == 1 {
            return Subgroup { set, gens: Vec::new() };
        }
        for _ in 0..200 {
            let (i, j) = (self.rng.random_range(0..members.len()), self.rng.random_range(0..members.len()));
            let (x, y) = (self.el(members[i]), self.el(members[j]));
            let s = self.sub(&[x.clone(), y.clone()]);
            if s.set.len() == set.len() {
                return s;
            }
        }
        let mut gens: Vec<GroupElement> = Vec::new();
        let mut cur = self.sub(&[]);
        while cur.set.len() < set.len() {
            let x = members.iter().find(|&&i| !cur.set.contains(i)).map(|&i| self.el(i)).expect("proper");
            gens.push(x);
            cur = self.sub(&gens);
        }
        cur
    }

    /// Elements `y` of `h` with the cosets `yK` pairwise distinct and
    /// covering `h`.
    pub fn left_transversal(&self, h: &ElementSet, k: &ElementSet) -> Vec<GroupElement> {
        let mut covered = ElementSet::empty(self.g.order());
        let ks: Vec<usize> = k.iter().collect();
        let mut reps = Vec::new();
        for y in h.iter() {
            if covered.contains(y) {
                continue;
            }
            reps.push(self.el(y));
            let members: Vec<usize> = covered.iter().chain(ks.iter().map(|&j| self.g.mul(y, j))).collect();
            covered = ElementSet::from_indices(self.g.order(), members);
        }
        reps
    }
}

/// Accumulates named elements and sets for a chain spec.
pub struct SpecBuilder<'g> {
    dict: Vec<(&'g EnumeratedGroup, Vec<Slp>)>,
    pub spec: ChainSpec,
    names: HashMap<Vec<u16>, String>,
}

impl<'g> SpecBuilder<'g> {
    pub fn new(g: &'g EnumeratedGroup, name: &str, group: &str, generators: &str) -> Self {
        let slots = g.generators().len();
        let words = (0..slots).map(|i| Slp::generator(slots, i)).collect();
        Self::with_dictionary(vec![(g, words)], slots, name, group, generators)
    }

    /// Elements are looked up in each enumerated subgroup in turn; its
    /// breadth-first words are rewritten through the words of its generators.
    pub fn with_dictionary(
        dict: Vec<(&'g EnumeratedGroup, Vec<Slp>)>,
        slots: usize,
        name: &str,
        group: &str,
        generators: &str,
    ) -> Self {
        let spec = ChainSpec {
            name: name.into(),
            group: group.into(),
            generators: Some(generators.into()),
            slots,
            elements: Vec::new(),
            sets: Vec::new(),
            stages: Vec::new(),
        };
        SpecBuilder { dict, spec, names: HashMap::new() }
    }

    /// Registers `x` under `name` unless it already has a name.
    pub fn elem(&mut self, name: &str, x: &GroupElement) -> String {
        if x.is_identity() {
            return IDENTITY.into();
        }
        if let Some(n) = self.names.get(x.raw()) {
            return n.clone();
        }
        let word = self
            .dict
            .iter()
            .find_map(|(g, words)| g.index_of(x).map(|i| g.word(i).substitute(words).expect("slot counts agree")))
            .expect("element of a known subgroup");
        self.spec.elements.push((name.into(), word));
        self.names.insert(x.raw().to_vec(), name.into());
        name.into()
    }

    pub fn set(&mut self, name: &str, xs: &[GroupElement]) -> String {
        let members = xs.iter().enumerate().map(|(j, x)| self.elem(&format!("{name}_{}", j + 1), x)).collect();
        self.spec.sets.push((name.into(), members));
        name.into()
    }

    pub fn stage(&mut self, name: &str, top: &str, conj: Option<&str>) {
        let tset0 = conj.map(|_| {
            if self.spec.set("T0").is_none() {
                self.spec.sets.push(("T0".into(), vec![IDENTITY.into()]));
            }
            "T0".to_string()
        });
        self.spec.stages.push(StageSpec {
            name: name.into(),
            top: top.into(),
            conj: conj.map(String::from),
            tset0,
            steps: Vec::new(),
        });
    }

    pub fn step(&mut self, strategy: Strategy, p: Rational, target: Target, conj_test: bool, test: TestSpec) -> &mut StepSpec {
        let index = self.spec.step_count() + 1;
        let stage = self.spec.stages.last_mut().expect("stage opened");
        stage.steps.push(StepSpec {
            index,
            strategy,
            p,
            n: None,
            target,
            conj_test,
            test,
            sampler: None,
            companions: None,
            reps: None,
            shortcuts: Vec::new(),
            orders: Vec::new(),
        });
        stage.steps.last_mut().expect("just pushed")
    }

    pub fn shortcut(step: &mut StepSpec, guard: Guard, apply: String, goto: usize) {
        step.shortcuts.push(Shortcut { guard, apply, goto });
    }

    /// Validates in oracle mode; listed `p` and `n` values that
    /// disagree with the enumeration are replaced and reported.
    pub fn finish(mut self, group: &BlackBoxGroup, strict: bool) -> Result<ChainSpec> {
        let report = validate_chain(&self.spec, group, Mode::Oracle { cap: 1 << 24 })?;
        let mut fixed = Vec::new();
        for c in report.claims.iter().filter(|c| c.status == Status::Fail) {
            let Some(rest) = c.name.strip_prefix("step") else { bail!("{}: failed claim\n{report}", self.spec.name) };
            let (num, field) = rest.split_once('.').expect("claim name");
            let index: usize = num.parse()?;
            let computed = c.computed.clone().unwrap_or_default();
            let step = self.spec.stages.iter_mut().flat_map(|s| s.steps.iter_mut()).find(|s| s.index == index).expect("step");
            match field {
                "p" => {
                    let (a, b) = computed.split_once('/').unwrap_or((&computed, "1"));
                    step.p = Rational::new(a.parse()?, b.parse()?);
                }
                "n" => step.n = Some(computed.parse()?),
                _ => bail!("{}: claim {} failed\n{report}", self.spec.name, c.name),
            }
            fixed.push(format!("step {index} {field}: listed {} computed {computed}", c.expected));
        }
        if !fixed.is_empty() {
            if strict {
                bail!("{}: values differ from the listed ones: {fixed:?}\n{report}", self.spec.name);
            }
            for f in fixed {
                eprintln!("{}: {f}", self.spec.name);
            }
            let again = validate_chain(&self.spec, group, Mode::Oracle { cap: 1 << 24 })?;
            if !again.passed() {
                bail!("{}: still failing\n{again}", self.spec.name);
            }
        }
        eprint!("{report}");
        Ok(self.spec)
    }
}

impl SpecBuilder<'_> {
    /// Validates in static mode, for groups too large to enumerate.
    pub fn finish_static(self, group: &BlackBoxGroup) -> Result<ChainSpec> {
        let report = validate_chain(&self.spec, group, Mode::Static)?;
        if !report.passed() {
            bail!("{}: static validation failed\n{report}", self.spec.name);
        }
        eprint!("{report}");
        Ok(self.spec)
    }
}

pub fn rat(a: u64, b: u64) -> Rational {
    Rational::new(a, b)
}

impl Ctx<'_> {
    /// `C_{top}(a) 𝒯 L`, or `C_{top}(a) 𝒯` when `l` is `None`.
    pub fn conj_target(&self, top: &Subgroup, a: &GroupElement, t: &[GroupElement], l: Option<&Subgroup>) -> ElementSet {
        let c = centralizer(self.g, &top.set, a);
        let mut ct = Vec::new();
        for ci in c.iter() {
            for y in t {
                ct.push(&self.el(ci) * y);
            }
        }
        let trivial = ElementSet::from_indices(self.g.order(), [0]);
        product_set(self.g, &ct, l.map(|l| &l.set).unwrap_or(&trivial))
    }

    /// Sifting parameter of a stored list of candidates.
    pub fn p_of(&self, h: &ElementSet, k: &ElementSet, reps: &[GroupElement]) -> Option<Rational> {
        let s = ElementSet::from_indices(self.g.order(), reps.iter().map(|r| self.idx(r)));
        sifting_parameter(self.g, h, k, &SearchSet { elements: &s, is_subgroup: false, companions: &[] }).ok()
    }

    /// A transversal of `N_l(next)` in `l` when it still reaches every
    /// element, else one of `next`.
    pub fn reps_for(&mut self, h: &ElementSet, k: &ElementSet, l: &Subgroup, next: &Subgroup) -> Vec<GroupElement> {
        let n = self.normalizer(l, next);
        let reps = self.left_transversal(&l.set, &n.set);
        if self.p_of(h, k, &reps).is_some() {
            return reps;
        }
        self.left_transversal(&l.set, &next.set)
    }
}

impl Ctx<'_> {
    /// Elements of `within` fixing the 0-based point `pt`.
    pub fn point_stabilizer(&mut self, within: &Subgroup, pt: usize) -> Subgroup {
        let set = ElementSet::from_indices(
            self.g.order(),
            within.set.iter().filter(|&i| match self.el(i) {
                GroupElement::Perm(p) => p.image(pt) == pt,
                GroupElement::Matrix(_) => false,
            }),
        );
        self.with_gens(set)
    }

    /// The normal closure of `x` in `within`.
    pub fn normal_closure(&mut self, within: &Subgroup, x: &GroupElement) -> Subgroup {
        let class: Vec<GroupElement> =
            conjugation_orbit(self.g, x, &within.gens).into_iter().map(|(i, _)| self.el(i)).collect();
        let set = self.sub(&class).set;
        self.with_gens(set)
    }
}

impl Ctx<'_> {
    pub fn centralizer_order(&self, within: &Subgroup, x: &GroupElement) -> usize {
        centralizer(self.g, &within.set, x).len()
    }
}
