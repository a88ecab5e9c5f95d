//! Product replacement random elements with straight-line program tracking.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::MultCounter;
use crate::element::GroupElement;
use crate::slp::{Slp, SlpBuilder};

pub const PR_SLOTS: usize = 10;
pub const PR_BURN_IN: u64 = 100;

/// Product replacement with ten slots and an accumulator ("rattle").
///
/// Every element handed out carries a word in the inputs of the program
/// the generators were given over. Words are kept in one shared
/// [`SlpBuilder`] so the history is stored once.
#[derive(Clone, Debug)]
pub struct ProductReplacement {
    slots: Vec<(GroupElement, Option<usize>)>,
    rattle: (GroupElement, Option<usize>),
    words: Option<SlpBuilder>,
    rng: ChaCha8Rng,
}

/// Handle to the word of an element produced by [`ProductReplacement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordRef(Option<usize>);

impl ProductReplacement {
    /// Seeds the state with `generators`, each with its program over
    /// `input_slots` inputs, then performs the burn-in (charged to `counter`).
    pub fn new(generators: &[(GroupElement, Slp)], input_slots: usize, seed: u64, counter: &MultCounter) -> Self {
        let mut builder = SlpBuilder::new(input_slots);
        let tracked: Vec<(GroupElement, Option<usize>)> =
            generators.iter().map(|(g, w)| (g.clone(), builder.append(w))).collect();
        Self::start(tracked, Some(builder), seed, counter)
    }

    /// As [`ProductReplacement::new`] but without word tracking.
    pub fn untracked(generators: &[GroupElement], seed: u64, counter: &MultCounter) -> Self {
        let gens = generators.iter().map(|g| (g.clone(), None)).collect();
        Self::start(gens, None, seed, counter)
    }

    fn start(gens: Vec<(GroupElement, Option<usize>)>, words: Option<SlpBuilder>, seed: u64, counter: &MultCounter) -> Self {
        assert!(!gens.is_empty(), "product replacement needs generators");
        let slots = (0..PR_SLOTS).map(|i| gens[i % gens.len()].clone()).collect();
        let identity = GroupElement::identity(gens[0].0.kind());
        let mut pr = ProductReplacement {
            slots,
            rattle: (identity, None),
            words,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..PR_BURN_IN {
            pr.replace_slot(counter);
        }
        pr
    }

    fn product(&mut self, a: &(GroupElement, Option<usize>), b: &(GroupElement, Option<usize>), counter: &MultCounter) -> (GroupElement, Option<usize>) {
        counter.charge(1);
        let w = self.words.as_mut().and_then(|w| w.mul_opt(a.1, b.1));
        (&a.0 * &b.0, w)
    }

    fn replace_slot(&mut self, counter: &MultCounter) -> usize {
        let i = self.rng.random_range(0..PR_SLOTS);
        let mut j = self.rng.random_range(0..PR_SLOTS - 1);
        if j >= i {
            j += 1;
        }
        let (si, sj) = (self.slots[i].clone(), self.slots[j].clone());
        self.slots[i] = if self.rng.random_bool(0.5) {
            self.product(&si, &sj, counter)
        } else {
            self.product(&sj, &si, counter)
        };
        i
    }

    /// Next random element: two multiplications.
    pub fn next(&mut self, counter: &MultCounter) -> (GroupElement, WordRef) {
        let i = self.replace_slot(counter);
        let (r, s) = (self.rattle.clone(), self.slots[i].clone());
        self.rattle = self.product(&r, &s, counter);
        (self.rattle.0.clone(), WordRef(self.rattle.1))
    }

    pub fn next_element(&mut self, counter: &MultCounter) -> GroupElement {
        self.next(counter).0
    }

    /// Next random element with its straight-line program.
    pub fn next_with_slp(&mut self, counter: &MultCounter) -> (GroupElement, Slp) {
        let (g, w) = self.next(counter);
        (g, self.word(w))
    }

    /// The program for an element previously returned by this sampler.
    pub fn word(&self, w: WordRef) -> Slp {
        let builder = self.words.as_ref().expect("word tracking is disabled for this sampler");
        builder.extract(w.0)
    }

    /// Random index in `0..n` from the sampler's own stream.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Perm;

    fn s5_gens() -> Vec<(GroupElement, Slp)> {
        vec![
            (GroupElement::Perm(Perm::from_cycles(5, &[&[1, 2]]).unwrap()), Slp::generator(2, 0)),
            (GroupElement::Perm(Perm::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap()), Slp::generator(2, 1)),
        ]
    }

    #[test]
    fn burn_in_and_step_costs() {
        let counter = MultCounter::new();
        let mut pr = ProductReplacement::new(&s5_gens(), 2, 7, &counter);
        assert_eq!(counter.count(), PR_BURN_IN);
        pr.next(&counter);
        assert_eq!(counter.count(), PR_BURN_IN + 2);
    }

    #[test]
    fn words_evaluate_to_elements() {
        let counter = MultCounter::new();
        let gens = s5_gens();
        let inputs: Vec<GroupElement> = gens.iter().map(|g| g.0.clone()).collect();
        let mut pr = ProductReplacement::new(&gens, 2, 11, &counter);
        for _ in 0..50 {
            let (g, w) = pr.next_with_slp(&counter);
            assert_eq!(w.evaluate(&inputs).unwrap(), g);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let counter = MultCounter::new();
        let mut a = ProductReplacement::new(&s5_gens(), 2, 3, &counter);
        let mut b = ProductReplacement::new(&s5_gens(), 2, 3, &counter);
        let mut c = ProductReplacement::new(&s5_gens(), 2, 4, &counter);
        let xs: Vec<_> = (0..20).map(|_| a.next_element(&counter)).collect();
        let ys: Vec<_> = (0..20).map(|_| b.next_element(&counter)).collect();
        let zs: Vec<_> = (0..20).map(|_| c.next_element(&counter)).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }
}
