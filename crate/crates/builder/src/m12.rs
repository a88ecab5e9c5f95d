//! The chain for M12 through the centralizer of a 2B involution.

use anyhow::{anyhow, ensure, Result};
use gensift::chain::spec::{ChainSpec, Strategy, Target, TestSpec, GENERATORS};
use gensift::oracle::{build_t_sets, EnumeratedGroup, Subgroup};
use gensift::{BlackBoxGroup, GroupElement};

use crate::ctx::{rat, Ctx, SpecBuilder};

pub fn chain(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 12);
    let whole = cx.whole();
    let mut a2 = None;
    for x in cx.all(&whole.set, |x| x.order() == 2) {
        let c = cx.centralizer(&whole, &x);
        if c.order() == 240 {
            a2 = Some((x, c));
            break;
        }
    }
    let (a, c_a) = a2.ok_or_else(|| anyhow!("no 2A involution"))?;

    let mut z2 = None;
    for z in cx.all(&c_a.set, |z| z.order() == 2) {
        let c = cx.centralizer(&whole, &z);
        if c.order() == 192 {
            z2 = Some((z, c));
            break;
        }
    }
    let (z2, l1) = z2.ok_or_else(|| anyhow!("no 2B involution commuting with a"))?;
    let t1 = build_t_sets(g, &a, &[whole.clone(), l1.clone()])?.pop().expect("T1");
    ensure!(t1.len() == 1);
    let k1 = cx.conj_target(&whole, &a, &t1, Some(&l1));

    let (x, l2, t2, k2, reps2) = find_refinement(&mut cx, &whole, &a, &[&l1], &t1, &k1, 4, 32, 1, rat(1, 3))?;
    let (y, l3, t3, k3, reps3) = find_refinement(&mut cx, &whole, &a, &[&l1, &l2], &t2, &k2, 4, 8, 2, rat(1, 2))?;
    let _ = k3;
    let t3_inv: Vec<_> = t3.iter().map(|t| t.inverse()).collect();

    let z5 = cx.first(&c_a.set, |w| w.order() == 5).expect("order 5");
    let cyc = cx.sub(std::slice::from_ref(&z5));
    let n5 = cx.normalizer(&c_a, &cyc);
    ensure!(n5.order() == 40);
    let c5 = cx.centralizer(&n5, &z5);
    ensure!(c5.order() == 10);
    let reps5 = cx.left_transversal(&c_a.set, &n5.set);
    let reps6 = cx.left_transversal(&n5.set, &c5.set);
    let final_set = cx.all(&c5.set, |_| true);

    let mut sb = SpecBuilder::new(g, "m12", "m12", "m12.gens");
    let a_name = sb.elem("a", &a);
    let z2_name = sb.elem("z", &z2);
    let x_name = sb.elem("x", &x);
    let y_name = sb.elem("y", &y);
    let z5_name = sb.elem("f", &z5);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let l3_name = sb.set("L3", &l3.gens);
    let ca_name = sb.set("CA", &c_a.gens);
    let n5_name = sb.set("N5", &n5.gens);
    let c5_name = sb.set("C5", &c5.gens);
    let t1n = sb.set("T1", &t1);
    let t2n = sb.set("T2", &t2);
    let t3n = sb.set("T3", &t3);
    let r2 = sb.set("R2", &reps2);
    let r3 = sb.set("R3", &reps3);
    let r4 = sb.set("R4", &t3_inv);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let r5 = sb.set("R5", &reps5);
    let r6 = sb.set("R6", &reps6);
    let r7 = sb.set("R7", &final_set);

    sb.stage("involution", GENERATORS, Some(&a_name));
    let s = sb.step(Strategy::Random, rat(1, 33), Target::Conj { tset: t1n, l: Some(l1_name) }, true, TestSpec::Centralizer(vec![z2_name.clone()]));
    s.sampler = Some(GENERATORS.into());
    s.orders.extend([(a_name.clone(), 2), (z2_name, 2)]);
    let s = sb.step(Strategy::CosetReps, rat(1, 3), Target::Conj { tset: t2n, l: Some(l2_name) }, true, TestSpec::Centralizer(vec![x_name.clone()]));
    s.reps = Some(r2);
    s.orders.push((x_name, 4));
    let s = sb.step(Strategy::CosetReps, rat(1, 2), Target::Conj { tset: t3n, l: Some(l3_name) }, true, TestSpec::Centralizer(vec![y_name.clone()]));
    s.reps = Some(r3);
    s.orders.push((y_name, 4));
    let s = sb.step(Strategy::CosetReps, rat(1, 2), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.reps = Some(r4);

    sb.stage("centralizer", &ca_name, None);
    let s = sb.step(Strategy::CosetReps, rat(1, 6), Target::Subgroup(n5_name), false, TestSpec::CyclicNormalizer { b: z5_name.clone(), order: 5 });
    s.reps = Some(r5);
    let s = sb.step(Strategy::CosetReps, rat(1, 4), Target::Subgroup(c5_name), false, TestSpec::Centralizer(vec![z5_name]));
    s.reps = Some(r6);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 10), Target::Identity, false, TestSpec::None);
    s.reps = Some(r7);
    sb.finish(group, true)
}

type Refinement = (GroupElement, Subgroup, Vec<GroupElement>, gensift::oracle::ElementSet, Vec<GroupElement>);

/// Looks for `w` of order `order` in the last subgroup of `ls` whose
/// centralizer there has order `size`, giving a 𝒯-set of `tsize` elements
/// and sifting parameter `p` from the previous target `k`.
#[allow(clippy::too_many_arguments)]
pub fn find_refinement(
    cx: &mut Ctx<'_>,
    top: &Subgroup,
    a: &GroupElement,
    ls: &[&Subgroup],
    _t: &[GroupElement],
    k: &gensift::oracle::ElementSet,
    order: u64,
    size: usize,
    tsize: usize,
    p: gensift::oracle::Rational,
) -> Result<Refinement> {
    let l = *ls.last().expect("nonempty");
    for w in cx.all(&l.set, |w| w.order() == order) {
        let next = cx.centralizer(l, &w);
        // keeping a in every L_i keeps the chain nested down to C(a)
        if next.order() != size || !next.contains(cx.g, a) {
            continue;
        }
        let mut chain: Vec<Subgroup> = vec![top.clone()];
        chain.extend(ls.iter().map(|s| (*s).clone()));
        chain.push(next.clone());
        let Ok(mut ts) = build_t_sets(cx.g, a, &chain) else { continue };
        let t_next = ts.pop().expect("nonempty");
        if t_next.len() != tsize {
            continue;
        }
        let k_next = cx.conj_target(top, a, &t_next, Some(&next));
        let reps = cx.reps_for(k, &k_next, l, &next);
        if cx.p_of(k, &k_next, &reps) == Some(p) {
            return Ok((w, next, t_next, k_next, reps));
        }
    }
    Err(anyhow!("no refinement of order {order} with centralizer {size}, |T| = {tsize}, p = {p}"))
}
