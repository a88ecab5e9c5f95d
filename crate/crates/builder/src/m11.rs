//! The two chains for M11.

use anyhow::{ensure, Result};
use gensift::chain::spec::{ChainSpec, Guard, Strategy, Target, TestSpec, GENERATORS};
use gensift::oracle::{build_t_sets, EnumeratedGroup};
use gensift::BlackBoxGroup;

use crate::ctx::{rat, Ctx, SpecBuilder};

/// Through the centralizer `2.S4` of an involution.
pub fn chain_1(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 11);
    let whole = cx.whole();
    let a = group.generators()[0].clone();
    ensure!(a.order() == 2);
    let l1 = cx.centralizer(&whole, &a);
    ensure!(l1.order() == 48);
    let b = cx
        .first(&l1.set, |x| x.order() == 2 && *x != a)
        .expect("non-central involution");
    let l2 = cx.centralizer(&l1, &b);
    ensure!(l2.order() == 4);
    let t = build_t_sets(g, &a, &[whole.clone(), l1.clone(), l2.clone()])?;
    ensure!(t[1].len() == 2 && t[2].len() == 3);
    let n2 = cx.normalizer(&l1, &l2);
    let reps2 = cx.left_transversal(&l1.set, &n2.set);
    ensure!(reps2.len() == 6);
    let t2_inv: Vec<_> = t[2].iter().map(|x| x.inverse()).collect();

    // second stage inside 2.S4
    let c = cx.first(&l1.set, |x| x.order() == 8).expect("element of order 8");
    let cyc = cx.sub(std::slice::from_ref(&c));
    let reps4 = cx.left_transversal(&l1.set, &cyc.set);
    ensure!(reps4.len() == 6);
    let powers: Vec<_> = (0..8).map(|i| c.pow(i)).collect();

    let mut sb = SpecBuilder::new(g, "m11-1", "m11", "m11.gens");
    let a_name = sb.elem("a", &a);
    let b_name = sb.elem("b", &b);
    let c_name = sb.elem("c", &c);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let t1 = sb.set("T1", &t[1]);
    let t2 = sb.set("T2", &t[2]);
    let r2 = sb.set("R2", &reps2);
    let r3 = sb.set("R3", &t2_inv);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let cyc_name = sb.set("C8", std::slice::from_ref(&c));
    let r4 = sb.set("R4", &reps4);
    let r5 = sb.set("R5", &powers);

    sb.stage("involution", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::Random,
        rat(13, 165),
        Target::Conj { tset: t1, l: Some(l1_name.clone()) },
        true,
        TestSpec::Centralizer(vec![a_name.clone()]),
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 2));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 6),
        Target::Conj { tset: t2, l: Some(l2_name) },
        true,
        TestSpec::Centralizer(vec![b_name.clone()]),
    );
    s.reps = Some(r2);
    s.orders.push((b_name, 2));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 3),
        Target::Conj { tset: "T0".into(), l: None },
        true,
        TestSpec::StoredSet(a_set),
    );
    s.reps = Some(r3);

    sb.stage("centralizer", &l1_name, None);
    let s = sb.step(Strategy::CosetReps, rat(1, 6), Target::Subgroup(cyc_name), false, TestSpec::Centralizer(vec![c_name.clone()]));
    s.reps = Some(r4);
    s.orders.push((c_name, 8));
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 8), Target::Identity, false, TestSpec::None);
    s.reps = Some(r5);
    sb.finish(group, true)
}

/// Through `L2(11)` and the normalizer of a Sylow 11-subgroup.
pub fn chain_2(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 12);
    let whole = cx.whole();
    let x = &group.generators()[0];
    let y = &group.generators()[1];
    let a = x * y;
    ensure!(a.order() == 11);
    let cyc = cx.sub(std::slice::from_ref(&a));
    let n = cx.normalizer(&whole, &cyc);
    ensure!(n.order() == 55);
    // L2(11) contains N(<a>) as a maximal subgroup; find an order-660 overgroup
    let mut l1 = None;
    for i in whole.set.iter() {
        let z = cx.el(i);
        if n.contains(g, &z) {
            continue;
        }
        let mut gens = n.gens.clone();
        gens.push(z);
        let s = cx.sub(&gens);
        if s.order() == 660 {
            l1 = Some(cx.with_gens(s.set));
            break;
        }
    }
    let l1 = l1.expect("L2(11) above N(<a>)");
    let a1 = cx
        .first(&l1.set, |w| w.order() == 11 && (w * &a) != (&a * w) && t_class(g, &a, w, &l1))
        .expect("second Sylow 11");
    let witnesses: Vec<_> = std::iter::once(a.clone()).chain((0..11).map(|i| a1.conj(&a.pow(i)))).collect();
    let z = cx.first(&l1.set, |z| a1.conj(z) == a).expect("conjugator in L1");
    let reps1 = cx.left_transversal(&whole.set, &l1.set);
    let reps2 = cx.left_transversal(&l1.set, &n.set);
    ensure!(reps1.len() == 12 && reps2.len() == 12);
    let f = cx.first(&n.set, |w| w.order() == 5).expect("order 5 in N");
    let fs: Vec<_> = (0..5).map(|i| f.pow(i)).collect();
    let powers: Vec<_> = (0..11).map(|i| a.pow(i)).collect();

    let mut sb = SpecBuilder::new(g, "m11-2", "m11", "m11.gens");
    let a_name = sb.elem("a", &a);
    let l1_name = sb.set("L1", &l1.gens);
    let n_name = sb.set("N", &n.gens);
    let w = sb.set("W", &witnesses);
    let r1 = sb.set("R1", &reps1);
    let r2 = sb.set("R2", &reps2);
    let r3 = sb.set("F", &fs);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let cyc_name = sb.set("C11", std::slice::from_ref(&a));
    let r4 = sb.set("R4", &powers);
    let fixes: Vec<String> =
        (0..11).map(|i| sb.elem(&format!("y{}", i + 1), &(&a.pow(-(i as i64)) * &z))).collect();

    sb.stage("sylow", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 12),
        Target::Conj { tset: "T0".into(), l: Some(l1_name) },
        true,
        TestSpec::CommutesAny(w),
    );
    s.reps = Some(r1);
    s.orders.push((a_name.clone(), 11));
    SpecBuilder::shortcut(s, Guard::Hint(0), "1".into(), 3);
    for (i, y2) in fixes.into_iter().enumerate() {
        SpecBuilder::shortcut(s, Guard::Hint(i + 1), y2, 3);
    }
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 12),
        Target::Conj { tset: "T0".into(), l: Some(n_name) },
        true,
        TestSpec::CyclicNormalizer { b: a_name.clone(), order: 11 },
    );
    s.reps = Some(r2);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 5),
        Target::Conj { tset: "T0".into(), l: None },
        true,
        TestSpec::StoredSet(a_set),
    );
    s.reps = Some(r3);

    sb.stage("cyclic", &cyc_name, None);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 11), Target::Identity, false, TestSpec::None);
    s.reps = Some(r4);
    sb.finish(group, true)
}

/// `w` is conjugate to `a` inside `l`.
fn t_class(g: &EnumeratedGroup, a: &gensift::GroupElement, w: &gensift::GroupElement, l: &gensift::oracle::Subgroup) -> bool {
    gensift::oracle::conjugation_orbit(g, a, &l.gens).iter().any(|(i, _)| g.element(*i) == *w)
}
