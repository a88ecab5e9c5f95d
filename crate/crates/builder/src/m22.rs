//! The chain for M22 through L3(4) and 2^4:A5 with order tests.

use anyhow::{anyhow, ensure, Result};
use gensift::chain::spec::{ChainSpec, Strategy, Target, TestSpec, GENERATORS};
use gensift::oracle::{build_t_sets, EnumeratedGroup};
use gensift::{BlackBoxGroup, GroupElement, OrderSet};

use crate::ctx::{rat, Ctx, SpecBuilder};

pub fn chain(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 22);
    let whole = cx.whole();
    let a = group.generators()[0].clone();
    let GroupElement::Perm(ap) = &a else { unreachable!() };
    let fixed: Vec<usize> = (0..22).filter(|&i| ap.image(i) == i).collect();
    ensure!(fixed.len() == 6);
    let c_a = cx.centralizer(&whole, &a);
    ensure!(c_a.order() == 384);

    let l1 = cx.point_stabilizer(&whole, fixed[0]);
    ensure!(l1.order() == 20160);
    let l2 = cx.point_stabilizer(&l1, fixed[1]);
    ensure!(l2.order() == 960);
    let t = build_t_sets(g, &a, &[whole.clone(), l1.clone(), l2.clone()])?;
    ensure!(t[1].len() == 1 && t[2].len() == 2, "T sizes {} {}", t[1].len(), t[2].len());
    let t2_inv: Vec<_> = t[2].iter().map(|x| x.inverse()).collect();

    // stage 2: the normal 2^4 of C(a)
    let mut e = None;
    for z in cx.all(&c_a.set, |z| z.order() == 2) {
        let n = cx.normal_closure(&c_a, &z);
        if n.order() == 16 {
            e = Some(n);
            break;
        }
    }
    let e = e.ok_or_else(|| anyhow!("no normal 2^4 in C(a)"))?;
    let witness = cx.first(&c_a.set, |x| cx.centralizer_order(&c_a, x) == 16 && e.contains(g, x));
    let witnesses: Vec<GroupElement> = match witness {
        Some(x) => vec![x],
        None => e.gens.clone(),
    };
    let ce = c_a.set.iter().map(|i| cx.el(i)).filter(|y| witnesses.iter().all(|w| w * y == y * w)).count();
    ensure!(ce == 16, "witnesses centralize {ce} elements");
    let reps4 = cx.left_transversal(&c_a.set, &e.set);
    ensure!(reps4.len() == 24);
    let e_elems = cx.all(&e.set, |_| true);

    let mut sb = SpecBuilder::new(g, "m22", "m22", "m22.gens");
    let a_name = sb.elem("a", &a);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let t1n = sb.set("T1", &t[1]);
    let t2n = sb.set("T2", &t[2]);
    let comp = sb.set("T2inv", &t2_inv);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let ca_name = sb.set("CA", &c_a.gens);
    let e_name = sb.set("E", &e.gens);
    let w_names: Vec<String> =
        witnesses.iter().enumerate().map(|(i, w)| sb.elem(&format!("w{}", i + 1), w)).collect();
    let r4 = sb.set("R4", &reps4);
    let r5 = sb.set("R5", &e_elems);

    sb.stage("involution", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::Random,
        rat(3, 11),
        Target::Conj { tset: t1n, l: Some(l1_name.clone()) },
        true,
        TestSpec::Orders { k: l1_name.clone(), orders: OrderSet::new([6, 8, 11])?, p0: rat(103, 264) },
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 2));
    let s = sb.step(
        Strategy::Random,
        rat(5, 21),
        Target::Conj { tset: t2n, l: Some(l2_name.clone()) },
        true,
        TestSpec::Orders { k: l2_name.clone(), orders: OrderSet::new([7])?, p0: rat(2, 7) },
    );
    s.sampler = Some(l1_name);
    let s = sb.step(Strategy::Random, rat(1, 60), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.sampler = Some(l2_name);
    s.companions = Some(comp);

    sb.stage("centralizer", &ca_name, None);
    let s = sb.step(Strategy::CosetReps, rat(1, 24), Target::Subgroup(e_name), false, TestSpec::Centralizer(w_names));
    s.reps = Some(r4);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 16), Target::Identity, false, TestSpec::None);
    s.reps = Some(r5);
    sb.finish(group, true)
}
