//! Basic sift steps and the sifting procedure along a compiled chain.

use rand::seq::SliceRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::MultCounter;
use crate::chain::compile::{CompiledGuard, CompiledStep, SiftChain, StoredElement};
use crate::chain::spec::Strategy;
use crate::element::GroupElement;
use crate::error::{Error, Result};
use crate::membership::{exhaustive_final_step, split_epsilon, Verdict};
use crate::random::ProductReplacement;
use crate::slp::{Slp, SlpBuilder};

/// Membership error `e` and number of draws `N` for random search with
/// success probability `p` and step budget `eps`.
pub fn random_search_params(eps: f64, p: f64, deterministic: bool) -> (f64, u64) {
    if p >= 1.0 {
        return (if deterministic { 0.0 } else { eps / 2.0 }, 1);
    }
    let (e, target) = if deterministic { (0.0, eps) } else { (eps * p / (2.0 * (1.0 - p)), eps / 2.0) };
    let n = (target.ln() / (1.0 - p).ln()).ceil().max(1.0);
    (e, n as u64)
}

/// Membership error for coset search over `k` representatives of which at
/// least `n` succeed.
pub fn coset_reps_error(eps: f64, k: u64, n: u64, deterministic: bool) -> f64 {
    if deterministic {
        return 0.0;
    }
    if n >= k {
        return 1.0 / 3.0;
    }
    (eps * (n as f64 + 1.0) / (k - n) as f64).min(1.0 / 3.0)
}

/// Random search: draws up to `N` elements and returns the first `y` (with
/// its 1-based trial number) for which `test(g y, e)` accepts.
pub fn basic_sift_random<D, T>(
    g: &GroupElement,
    eps: f64,
    p: f64,
    deterministic: bool,
    mut draw: D,
    mut test: T,
) -> Option<(GroupElement, u64)>
where
    D: FnMut() -> GroupElement,
    T: FnMut(&GroupElement, f64) -> bool,
{
    let (e, n) = random_search_params(eps, p, deterministic);
    (1..=n).find_map(|t| {
        let y = draw();
        test(&(g * &y), e).then_some((y, t))
    })
}

/// Coset search: tries the representatives in uniformly random order without
/// replacement and returns the first index (and trial count) accepted.
pub fn basic_sift_coset_reps<T, R>(
    g: &GroupElement,
    eps: f64,
    reps: &[GroupElement],
    n: u64,
    deterministic: bool,
    rng: &mut R,
    mut test: T,
) -> Option<(usize, u64)>
where
    T: FnMut(&GroupElement, f64) -> bool,
    R: Rng + ?Sized,
{
    let e = coset_reps_error(eps, reps.len() as u64, n, deterministic);
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.shuffle(rng);
    order.into_iter().enumerate().find_map(|(t, i)| test(&(g * &reps[i]), e).then_some((i, t as u64 + 1)))
}

/// Why a sift did not produce a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiftFailure {
    /// The basic sift of this (1-based) step gave up.
    Step(usize),
    /// All steps succeeded but `g x` is not the identity.
    FinalCheck,
}

#[derive(Clone, Debug)]
pub struct SiftOutcome {
    /// On success, a word for `x` with `g x = 1`.
    pub result: std::result::Result<Slp, SiftFailure>,
    /// Multiplications spent in this call (including sampler set-up, if any
    /// happened during the call).
    pub mults: u64,
    /// Trials used per step; zero for skipped steps.
    pub trials: Vec<u64>,
}

impl SiftOutcome {
    pub fn is_success(&self) -> bool {
        self.result.is_ok()
    }
}

/// Sifts elements down one chain. Owns its random state, samplers and
/// multiplication counter; the chain itself is shared read-only.
pub struct Sifter<'c> {
    chain: &'c SiftChain,
    eps: Vec<f64>,
    samplers: Vec<Option<ProductReplacement>>,
    rng: ChaCha8Rng,
    counter: MultCounter,
}

struct Found {
    factors: Vec<(GroupElement, Slp)>,
    /// `h` times the factors, when it was computed while testing.
    next_h: Option<GroupElement>,
    hint: Option<usize>,
    trials: u64,
}

impl<'c> Sifter<'c> {
    /// `epsilon` is the total failure budget, split over randomized steps.
    pub fn new(chain: &'c SiftChain, epsilon: f64, seed: u64) -> Result<Self> {
        let randomized: Vec<bool> = chain.steps.iter().map(CompiledStep::is_randomized).collect();
        if randomized.iter().any(|&r| r) && !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        Ok(Sifter {
            chain,
            eps: split_epsilon(epsilon, &randomized),
            samplers: vec![None; chain.steps.len()],
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: MultCounter::new(),
        })
    }

    pub fn counter(&self) -> &MultCounter {
        &self.counter
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.eps
    }

    /// Runs the chain on `g`.
    pub fn sift(&mut self, g: &GroupElement) -> Result<SiftOutcome> {
        let start = self.counter.count();
        let steps = &self.chain.steps;
        let mut trials = vec![0u64; steps.len()];
        let mut out = SlpBuilder::new(self.chain.slots());
        let mut acc: Option<usize> = None;
        let mut h = g.clone();
        let mut i = 0;
        while i < steps.len() {
            let step = &steps[i];
            let conj_h = match &step.conj {
                Some(a) => Some(self.counter.conjugate(&a.elem, &h)?),
                None => None,
            };
            if let Some(u) = &conj_h {
                let jump = step.shortcuts.iter().find(|sc| matches!(&sc.guard, CompiledGuard::ConjEquals(e) if e == u));
                if let Some(sc) = jump {
                    h = self.counter.multiply(&h, &sc.apply)?;
                    let w = out_append(&mut out, &sc.apply_word);
                    acc = out.mul_opt(acc, w);
                    i = sc.goto - 1;
                    continue;
                }
            }
            let found = match step.strategy {
                Strategy::Random => self.random_step(i, &h, conj_h.as_ref())?,
                Strategy::CosetReps => self.coset_step(i, &h, conj_h.as_ref())?,
                Strategy::ExhaustiveFinal => exhaustive_step(step, &h),
            };
            let Some(found) = found else {
                trials[i] = step_trials_on_failure(step, &self.eps[i]);
                return Ok(self.finish(start, Err(SiftFailure::Step(step.index)), trials));
            };
            trials[i] = found.trials;
            h = match found.next_h {
                Some(x) => x,
                None => {
                    let mut x = h;
                    for (f, _) in &found.factors {
                        x = self.counter.multiply(&x, f)?;
                    }
                    x
                }
            };
            for (_, w) in &found.factors {
                let r = out_append(&mut out, w);
                acc = out.mul_opt(acc, r);
            }
            let jump = found.hint.and_then(|hint| {
                step.shortcuts.iter().find(|sc| matches!(sc.guard, CompiledGuard::Hint(j) if j == hint))
            });
            match jump {
                Some(sc) => {
                    h = self.counter.multiply(&h, &sc.apply)?;
                    let r = out_append(&mut out, &sc.apply_word);
                    acc = out.mul_opt(acc, r);
                    i = sc.goto - 1;
                }
                None => i += 1,
            }
        }
        let result = if h.is_identity() { Ok(out.extract(acc)) } else { Err(SiftFailure::FinalCheck) };
        Ok(self.finish(start, result, trials))
    }

    fn finish(&self, start: u64, result: std::result::Result<Slp, SiftFailure>, trials: Vec<u64>) -> SiftOutcome {
        SiftOutcome { result, mults: self.counter.count() - start, trials }
    }

    fn sampler(&mut self, i: usize) -> &mut ProductReplacement {
        if self.samplers[i].is_none() {
            let seed = self.rng.random::<u64>();
            let pr = ProductReplacement::new(&self.chain.steps[i].sampler, self.chain.slots(), seed, &self.counter);
            self.samplers[i] = Some(pr);
        }
        self.samplers[i].as_mut().expect("just created")
    }

    /// Tests the candidate `h y c` (or `a^{h y c}` via `u = a^h`).
    fn try_candidate(
        &mut self,
        i: usize,
        h: &GroupElement,
        y: &GroupElement,
        y_inv: Option<&GroupElement>,
        u: Option<&GroupElement>,
        e: f64,
    ) -> Result<(Verdict, Option<GroupElement>)> {
        let step = &self.chain.steps[i];
        let test = step.test.as_ref().expect("searching steps have a test");
        let seed = if test.is_deterministic() { 0 } else { self.rng.random::<u64>() };
        match u {
            Some(u) => {
                let w = match y_inv {
                    Some(yi) => self.counter.conjugate_with_inverse(u, y, yi)?,
                    None => self.counter.conjugate(u, y)?,
                };
                Ok((test.check(&w, e, seed, &self.counter)?, None))
            }
            None => {
                let z = self.counter.multiply(h, y)?;
                Ok((test.check(&z, e, seed, &self.counter)?, Some(z)))
            }
        }
    }

    fn random_step(&mut self, i: usize, h: &GroupElement, u: Option<&GroupElement>) -> Result<Option<Found>> {
        let step = &self.chain.steps[i];
        let p = *step.p.numer() as f64 / *step.p.denom() as f64;
        let deterministic = step.test.as_ref().is_some_and(|t| t.is_deterministic());
        let (e, n) = random_search_params(self.eps[i], p, deterministic);
        let companions: Vec<StoredElement> = step.companions.clone();
        for t in 1..=n {
            self.sampler(i);
            let (y, wref) = self.samplers[i].as_mut().expect("exists").next(&self.counter);
            if companions.is_empty() {
                let (v, z) = self.try_candidate(i, h, &y, None, u, e)?;
                if v.member {
                    let word = self.samplers[i].as_ref().expect("exists").word(wref);
                    return Ok(Some(Found { factors: vec![(y, word)], next_h: z, hint: v.hint, trials: t }));
                }
                continue;
            }
            // a^{h y c} = (a^{h y})^c, so conjugate by y once per draw
            let base = match u {
                Some(u) => Some(self.counter.conjugate(u, &y)?),
                None => None,
            };
            let hy = if u.is_none() { Some(self.counter.multiply(h, &y)?) } else { None };
            for c in &companions {
                let (v, z) = match (&base, &hy) {
                    (Some(w), _) => self.try_candidate(i, h, &c.witness.elem, Some(&c.witness.inv), Some(w), e)?,
                    (None, Some(hy)) => self.try_candidate(i, hy, &c.witness.elem, None, None, e)?,
                    _ => unreachable!(),
                };
                if v.member {
                    let word = self.samplers[i].as_ref().expect("exists").word(wref);
                    let factors = vec![(y, word), (c.witness.elem.clone(), c.word.clone())];
                    return Ok(Some(Found { factors, next_h: z, hint: v.hint, trials: t }));
                }
            }
        }
        Ok(None)
    }

    fn coset_step(&mut self, i: usize, h: &GroupElement, u: Option<&GroupElement>) -> Result<Option<Found>> {
        let step = &self.chain.steps[i];
        let deterministic = step.test.as_ref().is_some_and(|t| t.is_deterministic());
        let e = coset_reps_error(self.eps[i], step.k as u64, step.n, deterministic);
        let mut order: Vec<usize> = (0..step.k).collect();
        order.shuffle(&mut self.rng);
        for (t, r) in order.into_iter().enumerate() {
            let rep = &self.chain.steps[i].reps[r];
            let (v, z) = self.try_candidate(i, h, &rep.witness.elem, Some(&rep.witness.inv), u, e)?;
            if v.member {
                let factors = vec![(rep.witness.elem.clone(), rep.word.clone())];
                return Ok(Some(Found { factors, next_h: z, hint: v.hint, trials: t as u64 + 1 }));
            }
        }
        Ok(None)
    }
}

fn out_append(out: &mut SlpBuilder, w: &Slp) -> Option<usize> {
    out.append(w)
}

fn exhaustive_step(step: &CompiledStep, h: &GroupElement) -> Option<Found> {
    let stored: Vec<_> = step.reps.iter().map(|r| r.witness.clone()).collect();
    let (idx, inverted) = exhaustive_final_step(h, &stored)?;
    let rep = &step.reps[idx];
    let (y, word) = if inverted {
        let w = Slp::compose(&rep.word, &Slp::identity(rep.word.slots()), crate::slp::Compose::InverseOfFirst)
            .expect("same slots");
        (rep.witness.inv.clone(), w)
    } else {
        (rep.witness.elem.clone(), rep.word.clone())
    };
    let next = GroupElement::identity(h.kind());
    Some(Found { factors: vec![(y, word)], next_h: Some(next), hint: None, trials: 1 })
}

fn step_trials_on_failure(step: &CompiledStep, eps: &f64) -> u64 {
    match step.strategy {
        Strategy::Random => {
            let p = *step.p.numer() as f64 / *step.p.denom() as f64;
            let det = step.test.as_ref().is_some_and(|t| t.is_deterministic());
            random_search_params(*eps, p, det).1
        }
        Strategy::CosetReps => step.k as u64,
        Strategy::ExhaustiveFinal => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_search_formulas() {
        assert_eq!(random_search_params(0.01, 1.0 / 6.0, true), (0.0, 26));
        let (e, n) = random_search_params(0.01, 1.0 / 6.0, false);
        assert!((e - 0.001).abs() < 1e-12);
        assert_eq!(n, 30);
        assert_eq!(random_search_params(0.01, 1.0, true), (0.0, 1));
    }

    #[test]
    fn coset_error_formula() {
        assert!((coset_reps_error(0.01, 6, 1, false) - 0.004).abs() < 1e-12);
        assert_eq!(coset_reps_error(0.01, 6, 1, true), 0.0);
        assert_eq!(coset_reps_error(0.01, 3, 3, false), 1.0 / 3.0);
        assert_eq!(coset_reps_error(0.9, 2, 1, false), 1.0 / 3.0);
    }
}
