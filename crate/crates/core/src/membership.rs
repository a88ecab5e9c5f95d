//! Membership tests for the steps of a chain.
//!
//! A test decides whether an element lies in the next subset. Tests are
//! one-sided: members are always accepted, and non-members are accepted with
//! probability at most `e` (exactly zero for deterministic tests).

use std::collections::HashSet;

use crate::blackbox::{MultCounter, OrderSet};
use crate::element::GroupElement;
use crate::error::Result;
use crate::oracle::Rational;
use crate::random::ProductReplacement;

/// A stored element together with its inverse, so conjugating by it costs
/// two multiplications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub elem: GroupElement,
    pub inv: GroupElement,
}

impl Witness {
    pub fn new(elem: GroupElement) -> Self {
        let inv = elem.inverse();
        Witness { elem, inv }
    }

    /// `x^w`, two multiplications.
    pub fn conjugate(&self, x: &GroupElement, counter: &MultCounter) -> Result<GroupElement> {
        counter.conjugate_with_inverse(x, &self.elem, &self.inv)
    }
}

#[derive(Clone, Debug)]
pub enum TestKind {
    /// Commutes with every witness.
    Centralizer(Vec<Witness>),
    /// Conjugates `b` into `<b>`, listed as a set.
    CyclicNormalizer { b: GroupElement, powers: HashSet<GroupElement> },
    /// Is one of the stored elements.
    StoredSet(HashSet<GroupElement>),
    /// Conjugates each generator of a stored subgroup back into it.
    Normalizer { gens: Vec<GroupElement>, elements: HashSet<GroupElement> },
    /// Commutes with at least one witness; the index found is reported.
    CommutesAny(Vec<Witness>),
    /// No element of order in `orders` among random elements of `<K, y>`.
    Orders { k_gens: Vec<GroupElement>, orders: OrderSet, p0: Rational },
}

/// Result of one test call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub member: bool,
    /// Extra information found while testing, used by branch shortcuts.
    pub hint: Option<usize>,
}

impl Verdict {
    fn plain(member: bool) -> Self {
        Verdict { member, hint: None }
    }
}

#[derive(Clone, Debug)]
pub struct MembershipTest {
    pub kind: TestKind,
}

impl MembershipTest {
    pub fn new(kind: TestKind) -> Self {
        MembershipTest { kind }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self.kind, TestKind::Orders { .. })
    }

    /// Applies the test to `y`; `e` and `seed` only matter for the order test.
    pub fn check(&self, y: &GroupElement, e: f64, seed: u64, counter: &MultCounter) -> Result<Verdict> {
        Ok(match &self.kind {
            TestKind::Centralizer(ws) => {
                for w in ws {
                    if w.conjugate(y, counter)? != *y {
                        return Ok(Verdict::plain(false));
                    }
                }
                Verdict::plain(true)
            }
            TestKind::CyclicNormalizer { b, powers } => {
                Verdict::plain(powers.contains(&counter.conjugate(b, y)?))
            }
            TestKind::StoredSet(set) => Verdict::plain(set.contains(y)),
            TestKind::Normalizer { gens, elements } => {
                let yi = counter.inverse(y);
                for s in gens {
                    if !elements.contains(&counter.conjugate_with_inverse(s, y, &yi)?) {
                        return Ok(Verdict::plain(false));
                    }
                }
                Verdict::plain(true)
            }
            TestKind::CommutesAny(ws) => {
                for (i, w) in ws.iter().enumerate() {
                    if w.conjugate(y, counter)? == *y {
                        return Ok(Verdict { member: true, hint: Some(i) });
                    }
                }
                Verdict::plain(false)
            }
            TestKind::Orders { k_gens, orders, p0 } => {
                Verdict::plain(is_member_orders(y, e, k_gens, orders, *p0, seed, counter))
            }
        })
    }
}

/// Tests `x` through the conjugate `a^x` (three multiplications plus the
/// inner test).
pub fn is_member_conjugates(
    x: &GroupElement,
    e: f64,
    a: &GroupElement,
    inner: &MembershipTest,
    seed: u64,
    counter: &MultCounter,
) -> Result<Verdict> {
    let ax = counter.conjugate(a, x)?;
    inner.check(&ax, e, seed, counter)
}

/// Number of random elements the order test draws: `⌈ln(1/e) / ln(1/(1-p0))⌉`.
pub fn orders_draws(e: f64, p0: f64) -> u64 {
    if p0 >= 1.0 {
        return 1;
    }
    let n = ((1.0 / e).ln() / (1.0 / (1.0 - p0)).ln()).ceil();
    n.max(1.0) as u64
}

/// Order-based test: draws from `<K, y>` with a fresh sampler and rejects as
/// soon as an element with order in `orders` turns up.
pub fn is_member_orders(
    y: &GroupElement,
    e: f64,
    k_gens: &[GroupElement],
    orders: &OrderSet,
    p0: Rational,
    seed: u64,
    counter: &MultCounter,
) -> bool {
    let p0 = *p0.numer() as f64 / *p0.denom() as f64;
    let n = orders_draws(e, p0);
    let mut gens = k_gens.to_vec();
    gens.push(y.clone());
    let mut pr = ProductReplacement::untracked(&gens, seed, counter);
    for _ in 0..n {
        let z = pr.next_element(counter);
        if counter.has_order_in(&z, orders) {
            return false;
        }
    }
    true
}

/// Final step against a stored list: finds `s` with `g s = 1`.
///
/// When the list contains the identity, `g` is compared with the stored
/// inverses and `s` is the matching stored element. Otherwise `g` is compared
/// with the stored elements and `s` is the inverse of the match. Returns the
/// index and whether `s` is the inverse of the stored element.
pub fn exhaustive_final_step(g: &GroupElement, stored: &[Witness]) -> Option<(usize, bool)> {
    if stored.iter().any(|w| w.elem.is_identity()) {
        stored.iter().position(|w| w.inv == *g).map(|i| (i, false))
    } else {
        stored.iter().position(|w| w.elem == *g).map(|i| (i, true))
    }
}

/// Splits a total error budget: deterministic steps get 0, the rest share
/// it equally.
pub fn split_epsilon(total: f64, randomized: &[bool]) -> Vec<f64> {
    let count = randomized.iter().filter(|&&r| r).count();
    randomized
        .iter()
        .map(|&r| if r { total / count as f64 } else { 0.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Perm;

    #[test]
    fn draws_formula() {
        assert_eq!(orders_draws(0.01, 2.0 / 7.0), 14);
        assert_eq!(orders_draws(0.5, 1.0), 1);
    }

    #[test]
    fn epsilon_split() {
        assert_eq!(split_epsilon(0.01, &[true, true, false, false, false]), vec![0.005, 0.005, 0.0, 0.0, 0.0]);
        assert_eq!(split_epsilon(0.01, &[false, false]), vec![0.0, 0.0]);
    }

    #[test]
    fn exhaustive_matches_by_inverse_or_element() {
        let c = GroupElement::Perm(Perm::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap());
        let group: Vec<Witness> = (0..4).map(|i| Witness::new(c.pow(i))).collect();
        let g = c.pow(3);
        assert_eq!(exhaustive_final_step(&g, &group), Some((1, false)));
        assert!((&g * &group[1].elem).is_identity());
        let coset: Vec<Witness> = (1..4).map(|i| Witness::new(c.pow(i))).collect();
        let (j, inverted) = exhaustive_final_step(&g, &coset).unwrap();
        assert!(inverted);
        assert!((&g * &coset[j].inv).is_identity());
    }

    #[test]
    fn centralizer_test_costs_two_per_witness() {
        let counter = MultCounter::new();
        let a = GroupElement::Perm(Perm::from_cycles(4, &[&[1, 2]]).unwrap());
        let t = MembershipTest::new(TestKind::Centralizer(vec![Witness::new(a.clone())]));
        let y = GroupElement::Perm(Perm::from_cycles(4, &[&[3, 4]]).unwrap());
        assert!(t.check(&y, 0.0, 0, &counter).unwrap().member);
        assert_eq!(counter.count(), 2);
        let z = GroupElement::Perm(Perm::from_cycles(4, &[&[2, 3]]).unwrap());
        assert!(!t.check(&z, 0.0, 0, &counter).unwrap().member);
    }
}
