//! Exact checks of the counting identities the error analysis relies on.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ElementSet, EnumeratedGroup, Rational, Subgroup};
use crate::element::{GroupElement, Perm};
use crate::error::Result;

/// `C(n, k)`, exact.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// `Σ_{i=1}^{k-n} C(k-i, n) = C(k, n+1)`; returns both sides.
pub fn binomial_sides(k: u64, n: u64) -> (u128, u128) {
    let lhs = (1..=k - n).map(|i| binomial(k - i, n)).sum();
    (lhs, binomial(k, n + 1))
}

/// `ln(1/(1-x)) >= x` for `0 <= x < 1`.
pub fn log_inverse_bound_holds(x: f64) -> bool {
    -(-x).ln_1p() >= x
}

/// `AB` as a set of indices.
pub fn set_product(g: &EnumeratedGroup, a: &ElementSet, b: &ElementSet) -> ElementSet {
    let bs: Vec<usize> = b.iter().collect();
    let mut members = Vec::new();
    for i in a.iter() {
        for &j in &bs {
            members.push(g.mul(i, j));
        }
    }
    ElementSet::from_indices(g.order(), members)
}

/// Both sides of `(V ∩ U) Z = V ∩ (U Z)`.
pub fn dedekind_sides(g: &EnumeratedGroup, u: &ElementSet, v: &ElementSet, z: &ElementSet) -> (ElementSet, ElementSet) {
    (set_product(g, &v.intersection(u), z), v.intersection(&set_product(g, u, z)))
}

/// For nested events `C ⊆ B ⊆ A` with `B` nonempty, returns
/// `(P(C | A), P(C | B) · P(B | A))` under the uniform distribution on `A`.
pub fn chain_rule_sides(a: &ElementSet, b: &ElementSet, c: &ElementSet) -> (Rational, Rational) {
    let (na, nb, nc) = (a.len() as u64, b.len() as u64, c.len() as u64);
    (Rational::new(nc, na), Rational::new(nc, nb) * Rational::new(nb, na))
}

#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub dedekind: (usize, usize),
    pub binomial: (usize, usize),
    pub log_bound: (usize, usize),
    pub chain_rule: (usize, usize),
    pub counterexamples: Vec<String>,
}

impl IdentityReport {
    pub fn failures(&self) -> usize {
        self.dedekind.1 + self.binomial.1 + self.log_bound.1 + self.chain_rule.1
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, (checked, failed)) in [
            ("dedekind", self.dedekind),
            ("binomial", self.binomial),
            ("log-bound", self.log_bound),
            ("chain-rule", self.chain_rule),
        ] {
            writeln!(f, "{name}: {checked} checked, {failed} failed")?;
        }
        for c in &self.counterexamples {
            writeln!(f, "counterexample: {c}")?;
        }
        Ok(())
    }
}

fn random_subset<R: Rng>(universe: &[usize], n: usize, prob: f64, rng: &mut R) -> ElementSet {
    ElementSet::from_indices(n, universe.iter().copied().filter(|_| rng.random_bool(prob)))
}

fn random_subgroup<R: Rng>(g: &EnumeratedGroup, rng: &mut R) -> Result<Subgroup> {
    let count = rng.random_range(0..=2);
    let gens: Vec<GroupElement> = (0..count).map(|_| g.element(rng.random_range(0..g.order()))).collect();
    Subgroup::generated(g, &gens)
}

/// Runs the Dedekind law on `dedekind_trials` random instances in `S_5`, the
/// binomial identity for `1 <= n < k <= 30`, the logarithm bound on a grid and
/// the chain rule on random nested subsets of enumerated groups.
pub fn verify_identities(seed: u64, dedekind_trials: usize) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport::default();

    let s5 = EnumeratedGroup::new(
        &[
            GroupElement::Perm(Perm::from_cycles(5, &[&[1, 2]])?),
            GroupElement::Perm(Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]])?),
        ],
        200,
    )?;
    let n = s5.order();
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..dedekind_trials {
        let z = random_subgroup(&s5, &mut rng)?;
        // V is a union of cosets vZ, so VZ = V
        let reps = random_subset(&all, n, rng.random_range(0.05..0.5), &mut rng);
        let v = set_product(&s5, &reps, &z.set);
        let u = random_subset(&all, n, rng.random_range(0.05..0.9), &mut rng);
        let (lhs, rhs) = dedekind_sides(&s5, &u, &v, &z.set);
        report.dedekind.0 += 1;
        if lhs != rhs {
            report.dedekind.1 += 1;
            report.counterexamples.push(format!("dedekind: |Z|={} |V|={} |U|={}", z.order(), v.len(), u.len()));
        }
    }

    for k in 2..=30u64 {
        for m in 1..k {
            let (lhs, rhs) = binomial_sides(k, m);
            report.binomial.0 += 1;
            if lhs != rhs {
                report.binomial.1 += 1;
                report.counterexamples.push(format!("binomial: k={k} n={m}: {lhs} != {rhs}"));
            }
        }
    }

    for i in 0..1000 {
        let x = i as f64 / 1000.0;
        report.log_bound.0 += 1;
        if !log_inverse_bound_holds(x) {
            report.log_bound.1 += 1;
            report.counterexamples.push(format!("log bound: x={x}"));
        }
    }

    for _ in 0..200 {
        let a = random_subgroup(&s5, &mut rng)?;
        let members: Vec<usize> = a.set.iter().collect();
        let b = random_subset(&members, n, 0.6, &mut rng);
        let bm: Vec<usize> = b.iter().collect();
        if bm.is_empty() {
            continue;
        }
        let keep: Vec<usize> = bm.sample(&mut rng, bm.len().div_ceil(2)).copied().collect();
        let c = ElementSet::from_indices(n, keep);
        let (lhs, rhs) = chain_rule_sides(&a.set, &b, &c);
        report.chain_rule.0 += 1;
        if lhs != rhs {
            report.chain_rule.1 += 1;
            report.counterexamples.push(format!("chain rule: {lhs} != {rhs}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_case() {
        assert_eq!(binomial_sides(5, 2), (10, 10));
        assert_eq!(binomial(30, 15), 155117520);
    }

    #[test]
    fn log_bound_at_half() {
        assert!(log_inverse_bound_holds(0.5));
        assert!((2f64.ln() - 0.693).abs() < 1e-3);
    }

    #[test]
    fn identities_hold() {
        let r = verify_identities(7, 200).unwrap();
        assert_eq!(r.failures(), 0, "{r}");
        assert_eq!(r.binomial.0, 435);
    }
}
