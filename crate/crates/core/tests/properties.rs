use std::path::PathBuf;

use gensift::chain::{compile_chain, ChainSpec};
use gensift::membership::{orders_draws, split_epsilon};
use gensift::oracle::EnumeratedGroup;
use gensift::random::ProductReplacement;
use gensift::sift::{coset_reps_error, random_search_params, Sifter};
use gensift::slp::Instr;
use gensift::{BlackBoxGroup, GroupElement, Matrix, MultCounter, Perm, Slp};
use proptest::prelude::*;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn perm(n: usize) -> impl Strategy<Value = GroupElement> {
    Just((0..n as u16).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|im| GroupElement::Perm(Perm::from_images(im).unwrap()))
}

fn perms(count: usize) -> impl Strategy<Value = Vec<GroupElement>> {
    (1usize..14).prop_flat_map(move |n| prop::collection::vec(perm(n), count))
}

fn matrices(count: usize) -> impl Strategy<Value = Vec<GroupElement>> {
    (prop::sample::select(vec![2u16, 3, 5]), 1usize..5).prop_flat_map(move |(p, d)| {
        let one = prop::collection::vec(0..p, d * d)
            .prop_filter_map("singular", move |e| Matrix::new(d, p, e).ok().map(GroupElement::Matrix));
        prop::collection::vec(one, count)
    })
}

/// A program on `slots` inputs built from raw operand choices.
fn slp(slots: usize) -> impl Strategy<Value = Slp> {
    prop::collection::vec((0u8..3, any::<usize>(), any::<usize>(), -5i64..6), 0..12).prop_flat_map(move |raw| {
        let lines: Vec<Instr> = raw
            .iter()
            .enumerate()
            .map(|(j, &(kind, x, y, n))| {
                let avail = slots + j;
                match kind {
                    0 => Instr::Mul(x % avail, y % avail),
                    1 => Instr::Inv(x % avail),
                    _ => Instr::Pow(x % avail, n),
                }
            })
            .collect();
        let values = slots + lines.len();
        prop::option::of(0..values).prop_map(move |r| Slp::new(slots, lines.clone(), r).unwrap())
    })
}

fn group_laws(xs: &[GroupElement]) -> Result<(), TestCaseError> {
    let (a, b, c) = (&xs[0], &xs[1], &xs[2]);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert!((a * &a.inverse()).is_identity());
    prop_assert_eq!((a * b).inverse(), &b.inverse() * &a.inverse());
    prop_assert_eq!(a.conj(b), &(&b.inverse() * a) * b);
    let n = a.order();
    prop_assert!(a.pow(n as i64).is_identity());
    for q in (2..=n).filter(|q| n % q == 0 && (2..*q).all(|d| q % d != 0)) {
        prop_assert!(!a.pow((n / q) as i64).is_identity());
    }
    prop_assert_eq!(a.pow(-3), a.inverse().pow(3));
    Ok(())
}

proptest! {
    #[test]
    fn permutations_form_a_group(xs in perms(3)) {
        group_laws(&xs)?;
    }

    #[test]
    fn matrices_form_a_group(xs in matrices(3)) {
        group_laws(&xs)?;
    }

    #[test]
    fn programs_survive_text(w in (1usize..4).prop_flat_map(slp)) {
        prop_assert_eq!(Slp::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn substitution_matches_evaluation(
        (outer, inner, gens) in (1usize..4, 1usize..4).prop_flat_map(|(k, m)| {
            (slp(k), prop::collection::vec(slp(m), k), prop::collection::vec(perm(7), m))
        })
    ) {
        let values: Vec<GroupElement> = inner.iter().map(|w| w.evaluate(&gens).unwrap()).collect();
        let direct = outer.evaluate(&values).unwrap();
        prop_assert_eq!(outer.substitute(&inner).unwrap().evaluate(&gens).unwrap(), direct);
    }

    #[test]
    fn random_search_budget_is_tight(eps in 1e-4f64..0.5, p in 0.01f64..0.99) {
        let (e, n) = random_search_params(eps, p, true);
        prop_assert_eq!(e, 0.0);
        prop_assert!((1.0 - p).powi(n as i32) <= eps * (1.0 + 1e-9));
        if n > 1 {
            prop_assert!((1.0 - p).powi(n as i32 - 1) > eps * (1.0 - 1e-9));
        }
        let (e, n) = random_search_params(eps, p, false);
        prop_assert!((e - eps * p / (2.0 * (1.0 - p))).abs() <= 1e-15);
        prop_assert!((1.0 - p).powi(n as i32) <= eps / 2.0 * (1.0 + 1e-9));
    }

    #[test]
    fn order_test_draws_enough(e in 1e-4f64..0.5, p0 in 0.01f64..0.99) {
        let n = orders_draws(e, p0);
        prop_assert!((1.0 - p0).powi(n as i32) <= e * (1.0 + 1e-9));
    }

    #[test]
    fn coset_error_is_capped(eps in 1e-4f64..0.5, k in 1u64..200, n in 0u64..200) {
        let e = coset_reps_error(eps, k, n, false);
        prop_assert!(e > 0.0 && e <= 1.0 / 3.0);
        if n < k {
            prop_assert!(e <= eps * (n as f64 + 1.0) / (k - n) as f64 + 1e-15);
        }
        prop_assert_eq!(coset_reps_error(eps, k, n, true), 0.0);
    }

    #[test]
    fn epsilon_split_sums_to_total(total in 1e-4f64..0.5, flags in prop::collection::vec(any::<bool>(), 1..12)) {
        let parts = split_epsilon(total, &flags);
        prop_assert_eq!(parts.len(), flags.len());
        for (part, &r) in parts.iter().zip(&flags) {
            prop_assert_eq!(*part == 0.0, !r);
        }
        if flags.iter().any(|&r| r) {
            prop_assert!((parts.iter().sum::<f64>() - total).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sifting_never_returns_a_wrong_word(seed in any::<u64>(), outside in perm(11)) {
        let group = BlackBoxGroup::load(data("groups/m11.gens")).unwrap();
        let m11 = EnumeratedGroup::with_default_cap(group.generators()).unwrap();
        for name in ["m11-1", "m11-2"] {
            let spec = ChainSpec::load(data(&format!("chains/{name}.chain"))).unwrap();
            let chain = compile_chain(&spec, &group).unwrap();
            let counter = MultCounter::new();
            let mut pr = ProductReplacement::untracked(group.generators(), seed, &counter);
            let mut sifter = Sifter::new(&chain, 0.01, seed).unwrap();
            for _ in 0..5 {
                let g = pr.next_element(&counter);
                if let Ok(w) = sifter.sift(&g).unwrap().result {
                    prop_assert!((&g * &w.evaluate(group.generators()).unwrap()).is_identity());
                }
            }
            if !m11.contains(&outside) {
                prop_assert!(sifter.sift(&outside).unwrap().result.is_err());
            }
        }
    }
}

#[test]
fn shipped_chains_survive_text() {
    for entry in std::fs::read_dir(data("chains")).unwrap() {
        let path = entry.unwrap().path();
        let spec = ChainSpec::load(&path).unwrap();
        assert_eq!(ChainSpec::parse(&spec.to_text()).unwrap(), spec, "{}", path.display());
    }
}

#[test]
fn shipped_groups_survive_text() {
    for entry in std::fs::read_dir(data("groups")).unwrap() {
        let path = entry.unwrap().path();
        let g = BlackBoxGroup::load(&path).unwrap();
        let again = BlackBoxGroup::parse(g.label(), &g.to_text()).unwrap();
        assert_eq!(again.generators(), g.generators(), "{}", path.display());
    }
}

#[test]
fn matrix_and_permutation_m11_agree() {
    let perms = BlackBoxGroup::load(data("groups/m11.gens")).unwrap();
    let mats = BlackBoxGroup::load(data("groups/m11-gf2.gens")).unwrap();
    assert_eq!(EnumeratedGroup::with_default_cap(mats.generators()).unwrap().order(), 7920);
    let counter = MultCounter::new();
    let n = perms.generators().len();
    let tracked: Vec<(GroupElement, Slp)> =
        perms.generators().iter().enumerate().map(|(i, x)| (x.clone(), Slp::generator(n, i))).collect();
    let mut pr = ProductReplacement::new(&tracked, n, 5, &counter);
    for _ in 0..50 {
        let (x, w) = pr.next_with_slp(&counter);
        assert_eq!(w.evaluate(mats.generators()).unwrap().order(), x.order());
    }
}
