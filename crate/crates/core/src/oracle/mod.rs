//! Brute-force ground truth on groups small enough to enumerate.

mod enumerate;
pub mod identities;

use std::collections::VecDeque;

use num_rational::Ratio;

use crate::blackbox::OrderSet;
use crate::element::GroupElement;
use crate::error::{Error, Result};

pub use enumerate::{EnumeratedGroup, DEFAULT_CAP};

pub type Rational = Ratio<u64>;

/// A subset of an enumerated group, as a bitmap plus a sorted index list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    bits: Vec<u64>,
    members: Vec<u32>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> Self {
        ElementSet { bits: vec![0; universe.div_ceil(64)], members: Vec::new() }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = ElementSet::empty(universe);
        for i in indices {
            s.insert(i);
        }
        s.members.sort_unstable();
        s
    }

    /// The whole group.
    pub fn full(universe: usize) -> Self {
        ElementSet::from_indices(universe, 0..universe)
    }

    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.members.push(i as u32);
        true
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.get(i / 64).is_some_and(|w| w & (1 << (i % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&i| i as usize)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let universe = self.bits.len() * 64;
        ElementSet::from_indices(universe, self.iter().filter(|&i| other.contains(i)))
    }
}

/// A subgroup of an enumerated group together with generators.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub set: ElementSet,
    pub gens: Vec<GroupElement>,
}

impl Subgroup {
    /// Closure of `gens` inside `g` (the trivial subgroup for no generators).
    pub fn generated(g: &EnumeratedGroup, gens: &[GroupElement]) -> Result<Self> {
        let mut set = ElementSet::empty(g.len());
        set.insert(0);
        let mut i = 0;
        while i < set.members.len() {
            let x = set.members[i] as usize;
            for s in gens {
                let y = g
                    .index_of(&(&g.element(x) * s))
                    .ok_or_else(|| Error::Invalid("subgroup generator outside the group".into()))?;
                set.insert(y);
            }
            i += 1;
        }
        set.members.sort_unstable();
        Ok(Subgroup { set, gens: gens.to_vec() })
    }

    pub fn whole(g: &EnumeratedGroup) -> Self {
        Subgroup { set: ElementSet::full(g.len()), gens: g.generators().to_vec() }
    }

    pub fn order(&self) -> usize {
        self.set.len()
    }

    pub fn contains(&self, g: &EnumeratedGroup, x: &GroupElement) -> bool {
        g.index_of(x).is_some_and(|i| self.set.contains(i))
    }
}

/// `{x in within : x a = a x}`.
pub fn centralizer(g: &EnumeratedGroup, within: &ElementSet, a: &GroupElement) -> ElementSet {
    let universe = g.len();
    ElementSet::from_indices(
        universe,
        within.iter().filter(|&i| {
            let x = g.element(i);
            &x * a == a * &x
        }),
    )
}

/// `{x in within : sub^x = sub}`.
pub fn normalizer(g: &EnumeratedGroup, within: &ElementSet, sub: &Subgroup) -> ElementSet {
    ElementSet::from_indices(
        g.len(),
        within.iter().filter(|&i| {
            let x = g.element(i);
            sub.gens.iter().all(|s| sub.contains(g, &s.conj(&x)))
        }),
    )
}

/// `{a b : a in left, b in right}`.
pub fn product_set(g: &EnumeratedGroup, left: &[GroupElement], right: &ElementSet) -> ElementSet {
    let mut out = ElementSet::empty(g.len());
    for a in left {
        for b in right.iter() {
            let p = &(a * &g.element(b));
            out.insert(g.index_of(p).expect("products stay in the group"));
        }
    }
    out.members.sort_unstable();
    out
}

/// Orbit of `a` under conjugation by the group generated by `gens`.
/// Each orbit element comes with a conjugating element reaching it.
pub fn conjugation_orbit(
    g: &EnumeratedGroup,
    a: &GroupElement,
    gens: &[GroupElement],
) -> Vec<(usize, GroupElement)> {
    let start = g.index_of(a).expect("element lies in the group");
    let mut seen = ElementSet::empty(g.len());
    seen.insert(start);
    let mut orbit = vec![(start, GroupElement::identity(g.kind()))];
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let (x, l) = orbit[k].clone();
        let b = g.element(x);
        for s in gens {
            let y = g.index_of(&b.conj(s)).expect("conjugates stay in the group");
            if seen.insert(y) {
                orbit.push((y, &l * s));
                queue.push_back(orbit.len() - 1);
            }
        }
    }
    orbit
}

/// The set a subset search draws from: its elements, whether they form a
/// subgroup, and optional companions tried after each element.
pub struct SearchSet<'a> {
    pub elements: &'a ElementSet,
    pub is_subgroup: bool,
    pub companions: &'a [GroupElement],
}

fn hits(g: &EnumeratedGroup, h: usize, k: &ElementSet, search: &SearchSet<'_>) -> u64 {
    let he = g.element(h);
    search
        .elements
        .iter()
        .filter(|&s| {
            let hs = &he * &g.element(s);
            if search.companions.is_empty() {
                return k.contains(g.index_of(&hs).expect("in group"));
            }
            search.companions.iter().any(|c| k.contains(g.index_of(&(&hs * c)).expect("in group")))
        })
        .count() as u64
}

/// `min_{h in H} |{s in S : h s c in K for some companion c}| / |S|`.
///
/// When `S` is a subgroup the count is constant on the cosets `hS`, so one
/// representative per coset is enough; then `HS` must lie in `H`. Fails if
/// some `h` has no hit, naming that `h`.
pub fn sifting_parameter(
    g: &EnumeratedGroup,
    h: &ElementSet,
    k: &ElementSet,
    search: &SearchSet<'_>,
) -> Result<Rational> {
    let size = search.elements.len() as u64;
    if size == 0 || h.is_empty() {
        return Err(Error::Invalid("empty search set or empty H".into()));
    }
    let mut best: Option<u64> = None;
    let mut covered = ElementSet::empty(g.len());
    for x in h.iter() {
        if search.is_subgroup && covered.contains(x) {
            continue;
        }
        if search.is_subgroup {
            let xe = g.element(x);
            for s in search.elements.iter() {
                let y = g.index_of(&(&xe * &g.element(s))).expect("in group");
                if !h.contains(y) {
                    return Err(Error::Invalid(format!(
                        "HL is not contained in H: {:?} * {:?} leaves H",
                        xe,
                        g.element(s)
                    )));
                }
                covered.insert(y);
            }
        }
        let n = hits(g, x, k, search);
        if n == 0 {
            return Err(Error::Invalid(format!("hL meets K trivially for h = {:?}", g.element(x))));
        }
        best = Some(best.map_or(n, |b| b.min(n)));
    }
    Ok(Rational::new(best.expect("H nonempty"), size))
}

/// [`sifting_parameter`] over all of `H` without the coset shortcut; used to
/// cross-check the representative form.
pub fn sifting_parameter_all(g: &EnumeratedGroup, h: &ElementSet, k: &ElementSet, search: &SearchSet<'_>) -> Result<Rational> {
    let flat = SearchSet { is_subgroup: false, ..*search };
    sifting_parameter(g, h, k, &flat)
}

/// `min_{h in H} |hS ∩ K|` for a finite list `S`.
pub fn min_hits(g: &EnumeratedGroup, h: &ElementSet, k: &ElementSet, s: &ElementSet) -> u64 {
    let search = SearchSet { elements: s, is_subgroup: false, companions: &[] };
    h.iter().map(|x| hits(g, x, k, &search)).min().unwrap_or(0)
}

/// Exact proportion of elements of `m` whose order lies in `orders`.
pub fn element_order_profile(g: &EnumeratedGroup, m: &ElementSet, orders: &OrderSet) -> Rational {
    let hit = m.iter().filter(|&i| orders.contains(g.element(i).order())).count();
    Rational::new(hit as u64, m.len() as u64)
}

/// Both sides of the orbit and centralizer formulas for one element of a
/// 𝒯-set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRatio {
    pub orbit_form: Rational,
    pub centralizer_form: Rational,
}

/// `|a^{xL} ∩ L'| / |a^{xL}|`, together with
/// `|C_L(a^x)| * sum_u 1/|C_{L'}(a^{xu})| / |L:L'|` where the `a^{xu}`
/// represent the `L'`-classes inside `a^{xL} ∩ L'`.
pub fn conjugate_orbit_ratio(
    g: &EnumeratedGroup,
    a: &GroupElement,
    x: &GroupElement,
    l: &Subgroup,
    l_next: &Subgroup,
) -> Result<OrbitRatio> {
    let ax = a.conj(x);
    if !l.contains(g, &ax) {
        return Err(Error::Invalid("a^x is not in L_i".into()));
    }
    let orbit = conjugation_orbit(g, &ax, &l.gens);
    let inside: Vec<usize> = orbit.iter().map(|(i, _)| *i).filter(|&i| l_next.set.contains(i)).collect();
    let orbit_form = Rational::new(inside.len() as u64, orbit.len() as u64);

    let reps = class_representatives(g, &inside, &l_next.gens);
    let mut sum = Rational::from_integer(0);
    for r in &reps {
        let c = centralizer(g, &l_next.set, &g.element(*r)).len() as u64;
        sum += Rational::new(1, c);
    }
    let c_l = centralizer(g, &l.set, &ax).len() as u64;
    let index = (l.order() / l_next.order()) as u64;
    let centralizer_form = sum * Rational::from_integer(c_l) / Rational::from_integer(index);
    Ok(OrbitRatio { orbit_form, centralizer_form })
}

/// Splits `elements` (closed under conjugation by `<gens>`) into classes and
/// returns the least member of each, in increasing order.
fn class_representatives(g: &EnumeratedGroup, elements: &[usize], gens: &[GroupElement]) -> Vec<usize> {
    let mut done = ElementSet::empty(g.len());
    let mut reps = Vec::new();
    for &e in elements {
        if done.contains(e) {
            continue;
        }
        let class = conjugation_orbit(g, &g.element(e), gens);
        let least = class.iter().map(|(i, _)| *i).min_by_key(|&i| g.element(i)).expect("nonempty");
        for (i, _) in class {
            done.insert(i);
        }
        reps.push(least);
    }
    reps.sort_by_key(|&i| g.element(i));
    reps
}

/// Builds `𝒯_0 = {1}, 𝒯_1, ...` for `a` along `chain = [L_0, L_1, ...]`:
/// `𝒯_{i+1}` is the union over `y` in `𝒯_i` of `y 𝒰(y)`, where the `a^{yu}`
/// for `u` in `𝒰(y)` are the least members of the `L_{i+1}`-classes in
/// `a^{yL_i} ∩ L_{i+1}`, except that the class of `a^y` is represented
/// by `a^y` itself.
pub fn build_t_sets(g: &EnumeratedGroup, a: &GroupElement, chain: &[Subgroup]) -> Result<Vec<Vec<GroupElement>>> {
    let mut sets = vec![vec![GroupElement::identity(g.kind())]];
    for (i, pair) in chain.windows(2).enumerate() {
        let (l, l_next) = (&pair[0], &pair[1]);
        let mut next = Vec::new();
        for y in sets.last().expect("nonempty") {
            let ay = a.conj(y);
            let orbit = conjugation_orbit(g, &ay, &l.gens);
            let inside: Vec<usize> = orbit.iter().map(|(i, _)| *i).filter(|&i| l_next.set.contains(i)).collect();
            if inside.is_empty() {
                return Err(Error::Invalid(format!(
                    "the L_{i}-class of {:?} does not meet L_{}",
                    ay,
                    i + 1
                )));
            }
            // the class of a^y itself is represented by a^y, so 1 stays in 𝒯
            let own: Vec<usize> = match g.index_of(&ay).filter(|&i| l_next.set.contains(i)) {
                Some(_) => conjugation_orbit(g, &ay, &l_next.gens).iter().map(|(i, _)| *i).collect(),
                None => Vec::new(),
            };
            for r in class_representatives(g, &inside, &l_next.gens) {
                if own.contains(&r) {
                    next.push(y.clone());
                    continue;
                }
                let (_, u) = orbit.iter().find(|(j, _)| *j == r).expect("representative lies in the orbit");
                next.push(y * u);
            }
        }
        sets.push(next);
    }
    Ok(sets)
}

/// `C_G(a) 𝒯 L` as a set, with `L` given as a set (`None` for the trivial group).
pub fn conjugate_subset(
    g: &EnumeratedGroup,
    a: &GroupElement,
    t: &[GroupElement],
    l: Option<&ElementSet>,
) -> ElementSet {
    let c = centralizer(g, &ElementSet::full(g.len()), a);
    let trivial = ElementSet::from_indices(g.len(), [0]);
    let l = l.unwrap_or(&trivial);
    let mut ct = Vec::new();
    for ci in c.iter() {
        let ce = g.element(ci);
        for y in t {
            ct.push(&ce * y);
        }
    }
    product_set(g, &ct, l)
}

/// `{x in G : a^x in L}`, the set a conjugate-based test accepts.
pub fn conjugates_into(g: &EnumeratedGroup, a: &GroupElement, l: &ElementSet) -> ElementSet {
    ElementSet::from_indices(
        g.len(),
        (0..g.len()).filter(|&i| g.index_of(&a.conj(&g.element(i))).is_some_and(|j| l.contains(j))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Perm;

    fn perm(n: usize, cycles: &[&[u16]]) -> GroupElement {
        GroupElement::Perm(Perm::from_cycles(n, cycles).unwrap())
    }

    fn s4() -> EnumeratedGroup {
        EnumeratedGroup::with_default_cap(&[perm(4, &[&[1, 2]]), perm(4, &[&[1, 2, 3, 4]])]).unwrap()
    }

    #[test]
    fn enumerates_s4_and_respects_cap() {
        let g = s4();
        assert_eq!(g.order(), 24);
        assert!(g.element(0).is_identity());
        let gens = [perm(4, &[&[1, 2]]), perm(4, &[&[1, 2, 3, 4]])];
        assert!(matches!(EnumeratedGroup::new(&gens, 10), Err(Error::EnumerationCap { .. })));
        for i in 0..g.order() {
            assert_eq!(g.word(i).evaluate(&gens).unwrap(), g.element(i));
        }
    }

    #[test]
    fn trivial_sifting_parameter() {
        let g = s4();
        let all = ElementSet::full(24);
        let search = SearchSet { elements: &all, is_subgroup: true, companions: &[] };
        assert_eq!(sifting_parameter(&g, &all, &all, &search).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn sifting_parameter_rejects_empty_intersection() {
        let g = s4();
        let all = ElementSet::full(24);
        let id = ElementSet::from_indices(24, [0]);
        let search = SearchSet { elements: &id, is_subgroup: true, companions: &[] };
        assert!(sifting_parameter(&g, &all, &id, &search).is_err());
    }

    #[test]
    fn order_profile_of_cyclic_group() {
        let g = s4();
        let c = Subgroup::generated(&g, &[perm(4, &[&[1, 2, 3]])]).unwrap();
        let p = element_order_profile(&g, &c.set, &OrderSet::new([3]).unwrap());
        assert_eq!(p, Rational::new(2, 3));
    }

    #[test]
    fn klein_four_refinement_violates_condition() {
        let g = s4();
        let a = perm(4, &[&[1, 2], &[3, 4]]);
        let v4 = Subgroup::generated(&g, &[a.clone(), perm(4, &[&[1, 3], &[2, 4]])]).unwrap();
        let cyc = Subgroup::generated(&g, std::slice::from_ref(&a)).unwrap();
        let chain = [Subgroup::whole(&g), v4.clone()];
        let t = build_t_sets(&g, &a, &chain).unwrap();
        assert_eq!(t[1].len(), 3);
        let refined = [Subgroup::whole(&g), v4, cyc];
        assert!(build_t_sets(&g, &a, &refined).is_err());
    }
}
