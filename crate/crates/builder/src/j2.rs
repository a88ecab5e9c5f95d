//! The two chains for J2.

use anyhow::{anyhow, ensure, Result};
use gensift::chain::spec::{ChainSpec, Strategy, Target, TestSpec, GENERATORS};
use gensift::oracle::{build_t_sets, EnumeratedGroup, Subgroup};
use gensift::{BlackBoxGroup, GroupElement, OrderSet};
use rand::{Rng, RngExt};

use crate::ctx::{rat, Ctx, SpecBuilder};

/// Standard generators: `a` in 2B, `b` in 3B, `ab` of order 7 and `abab^2`
/// of order 12.
pub fn standard_generators<R: Rng>(g: &EnumeratedGroup, rng: &mut R) -> Result<Vec<GroupElement>> {
    let cx = Ctx::new(g, 0);
    let whole = cx.whole();
    let random = |rng: &mut R| g.element(rng.random_range(0..g.order()));
    let find = |rng: &mut R, order: u64, cent: usize| loop {
        let x = random(rng);
        let n = x.order();
        if n % order == 0 {
            let y = x.pow((n / order) as i64);
            if cx.centralizer_order(&whole, &y) == cent {
                return y;
            }
        }
    };
    let a = find(rng, 2, 240);
    let b0 = find(rng, 3, 36);
    for _ in 0..100_000 {
        let b = b0.conj(&random(rng));
        if (&a * &b).order() == 7 && (&(&(&a * &b) * &a) * &(&b * &b)).order() == 12 {
            return Ok(vec![a, b]);
        }
    }
    Err(anyhow!("no standard generators found"))
}

/// Deterministic membership tests only: through `3.A6.2` and `3^{1+2}:8`.
pub fn chain_1(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 21);
    let whole = cx.whole();
    let a = cx.first(&whole.set, |x| x.order() == 8).expect("order 8");
    let c_a = cx.centralizer(&whole, &a);
    ensure!(c_a.order() == 8);
    let z = cx
        .first(&whole.set, |z| {
            z.order() == 3 && {
                let za = z.conj(&a);
                (za == *z || za == z.inverse()) && cx.centralizer_order(&whole, z) == 1080
            }
        })
        .ok_or_else(|| anyhow!("no 3A element normalized by a"))?;
    let zc = cx.sub(std::slice::from_ref(&z));
    let l1 = cx.normalizer(&whole, &zc);
    ensure!(l1.order() == 2160);
    let p = sylow3_invariant(&mut cx, &l1, &a)?;
    let p_elems = cx.all(&p.set, |_| true);
    let l2 = cx.normalizer(&l1, &p);
    ensure!(l2.order() == 216, "N(P) has order {}", l2.order());
    let l3 = cx.sub(std::slice::from_ref(&a));
    let t = build_t_sets(g, &a, &[whole.clone(), l1.clone(), l2.clone(), l3.clone()])?;
    eprintln!("j2-1: |T| = {} {} {}", t[1].len(), t[2].len(), t[3].len());
    let k1 = cx.conj_target(&whole, &a, &t[1], Some(&l1));
    let k2 = cx.conj_target(&whole, &a, &t[2], Some(&l2));
    let k3 = cx.conj_target(&whole, &a, &t[3], Some(&l3));
    let reps2 = cx.reps_for(&k1, &k2, &l1, &l2);
    let reps3 = cx.reps_for(&k2, &k3, &l2, &l3);
    let t3_inv: Vec<_> = t[3].iter().map(|x| x.inverse()).collect();
    let powers: Vec<_> = (0..8).map(|i| a.pow(i)).collect();

    let mut sb = SpecBuilder::new(g, "j2-1", "j2", "j2.gens");
    let a_name = sb.elem("a", &a);
    let z_name = sb.elem("z", &z);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let l3_name = sb.set("L3", std::slice::from_ref(&a));
    let p_gens = sb.set("P", &p.gens);
    let p_all = sb.set("Pall", &p_elems);
    let t1 = sb.set("T1", &t[1]);
    let t2 = sb.set("T2", &t[2]);
    let t3 = sb.set("T3", &t[3]);
    let r2 = sb.set("R2", &reps2);
    let r3 = sb.set("R3", &reps3);
    let r4 = sb.set("R4", &t3_inv);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let r5 = sb.set("R5", &powers);

    sb.stage("order-8", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::Random,
        rat(1, 140),
        Target::Conj { tset: t1, l: Some(l1_name) },
        true,
        TestSpec::CyclicNormalizer { b: z_name, order: 3 },
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 8));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 5),
        Target::Conj { tset: t2, l: Some(l2_name) },
        true,
        TestSpec::Normalizer { gens: p_gens, elements: p_all },
    );
    s.reps = Some(r2);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 27),
        Target::Conj { tset: t3, l: Some(l3_name.clone()) },
        true,
        TestSpec::Centralizer(vec![a_name.clone()]),
    );
    s.reps = Some(r3);
    let s = sb.step(Strategy::CosetReps, rat(1, 4), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.reps = Some(r4);

    sb.stage("cyclic", &l3_name, None);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 8), Target::Identity, false, TestSpec::None);
    s.reps = Some(r5);
    sb.finish(group, false)
}

/// A Sylow 3-subgroup of `l` normalized by `a`, generated by an
/// `<a>`-orbit.
fn sylow3_invariant(cx: &mut Ctx<'_>, l: &Subgroup, a: &GroupElement) -> Result<Subgroup> {
    for u in cx.all(&l.set, |u| u.order() == 3) {
        let orbit: Vec<GroupElement> = (0..8).map(|i| u.conj(&a.pow(i))).collect();
        let s = cx.sub(&orbit);
        if s.order() == 27 {
            return Ok(cx.with_gens(s.set));
        }
    }
    Err(anyhow!("no a-invariant Sylow 3-subgroup"))
}

/// Order tests: through `3.A6.2`, `3 x A5` and `A4` to `C(a)` for `a` in 2A.
pub fn chain_2(group: &BlackBoxGroup, g: &EnumeratedGroup) -> Result<ChainSpec> {
    let mut cx = Ctx::new(g, 22);
    let whole = cx.whole();
    let a = cx
        .first(&whole.set, |x| x.order() == 2 && cx.centralizer_order(&whole, x) == 1920)
        .expect("2A involution");
    let c_a = cx.centralizer(&whole, &a);
    let z = cx
        .first(&c_a.set, |z| z.order() == 3 && cx.centralizer_order(&whole, z) == 1080)
        .ok_or_else(|| anyhow!("no 3A element centralizing a"))?;
    let zc = cx.sub(std::slice::from_ref(&z));
    let l1 = cx.normalizer(&whole, &zc);
    ensure!(l1.order() == 2160);
    let c_z = cx.centralizer(&whole, &z);

    let (l2, l3, l4) = {
        let mut found = None;
        for b in cx.all(&c_z.set, |b| b.order() == 3 && (&a * b).order() == 5) {
            let a5 = cx.sub(&[a.clone(), b.clone()]);
            if a5.order() != 60 {
                continue;
            }
            let l2 = cx.sub(&[z.clone(), a.clone(), b.clone()]);
            ensure!(l2.order() == 180);
            let v4 = cx.centralizer(&a5, &a);
            let l3 = cx.normalizer(&a5, &v4);
            ensure!(v4.order() == 4 && l3.order() == 12);
            let t = build_t_sets(g, &a, &[whole.clone(), l1.clone(), l2.clone(), l3.clone()]);
            if t.is_ok_and(|t| t[2].len() == 1 && t[3].len() == 1) {
                found = Some((cx.with_gens(l2.set), l3, v4));
                break;
            }
        }
        found.ok_or_else(|| anyhow!("no A5 in C(z) through a with single-class T-sets"))?
    };
    let t = build_t_sets(g, &a, &[whole.clone(), l1.clone(), l2.clone(), l3.clone()])?;
    let k1 = cx.conj_target(&whole, &a, &t[1], Some(&l1));
    let k2 = cx.conj_target(&whole, &a, &t[2], Some(&l2));
    let k3 = cx.conj_target(&whole, &a, &t[3], Some(&l3));
    let reps2 = cx.reps_for(&k1, &k2, &l1, &l2);
    let reps3 = cx.reps_for(&k2, &k3, &l2, &l3);
    let reps4 = cx.left_transversal(&l3.set, &l4.set);

    // second stage inside C(a) = 2^{1+4}:A5
    let mut inner = None;
    for x in cx.all(&c_a.set, |x| x.order() == 2) {
        let l5 = cx.centralizer(&c_a, &x);
        if l5.order() != 192 {
            continue;
        }
        for y in cx.all(&l5.set, |y| y.order() == 4) {
            let yc = cx.sub(std::slice::from_ref(&y));
            let l6 = cx.normalizer(&l5, &yc);
            if l6.order() != 32 {
                continue;
            }
            let l7 = cx.centralizer(&l6, &y);
            if l7.order() == 16 {
                inner = Some((x.clone(), l5.clone(), y, l6, l7));
                break;
            }
        }
        if inner.is_some() {
            break;
        }
    }
    let (x, l5, y, l6, l7) = inner.ok_or_else(|| anyhow!("no 192 > 32 > 16 chain in C(a)"))?;
    let reps5 = cx.left_transversal(&c_a.set, &l5.set);
    let reps6 = cx.left_transversal(&l5.set, &l6.set);
    let reps7 = cx.left_transversal(&l6.set, &l7.set);
    let l7_elems = cx.all(&l7.set, |_| true);

    let mut sb = SpecBuilder::new(g, "j2-2", "j2", "j2.gens");
    let a_name = sb.elem("a", &a);
    let z_name = sb.elem("z", &z);
    let x_name = sb.elem("x", &x);
    let y_name = sb.elem("y", &y);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let l3_name = sb.set("L3", &l3.gens);
    let ca_name = sb.set("CA", &c_a.gens);
    let l5_name = sb.set("L5", &l5.gens);
    let l6_name = sb.set("L6", &l6.gens);
    let l7_name = sb.set("L7", &l7.gens);
    let t1 = sb.set("T1", &t[1]);
    let t2 = sb.set("T2", &t[2]);
    let t3 = sb.set("T3", &t[3]);
    let r2 = sb.set("R2", &reps2);
    let r3 = sb.set("R3", &reps3);
    let r4 = sb.set("R4", &reps4);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let r5 = sb.set("R5", &reps5);
    let r6 = sb.set("R6", &reps6);
    let r7 = sb.set("R7", &reps7);
    let r8 = sb.set("R8", &l7_elems);

    sb.stage("involution", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::Random,
        rat(1, 6),
        Target::Conj { tset: t1, l: Some(l1_name) },
        true,
        TestSpec::CyclicNormalizer { b: z_name, order: 3 },
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 2));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 3),
        Target::Conj { tset: t2, l: Some(l2_name.clone()) },
        true,
        TestSpec::Orders { k: l2_name, orders: OrderSet::new([4, 12])?, p0: rat(1, 4) },
    );
    s.reps = Some(r2);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 5),
        Target::Conj { tset: t3, l: Some(l3_name.clone()) },
        true,
        TestSpec::Orders { k: l3_name, orders: OrderSet::new([5])?, p0: rat(2, 5) },
    );
    s.reps = Some(r3);
    let s = sb.step(Strategy::CosetReps, rat(1, 3), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.reps = Some(r4);

    sb.stage("centralizer", &ca_name, None);
    let s = sb.step(Strategy::CosetReps, rat(1, 10), Target::Subgroup(l5_name), false, TestSpec::Centralizer(vec![x_name]));
    s.reps = Some(r5);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 6),
        Target::Subgroup(l6_name),
        false,
        TestSpec::CyclicNormalizer { b: y_name.clone(), order: 4 },
    );
    s.reps = Some(r6);
    let s = sb.step(Strategy::CosetReps, rat(1, 2), Target::Subgroup(l7_name), false, TestSpec::Centralizer(vec![y_name]));
    s.reps = Some(r7);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 16), Target::Identity, false, TestSpec::None);
    s.reps = Some(r8);
    sb.finish(group, false)
}
