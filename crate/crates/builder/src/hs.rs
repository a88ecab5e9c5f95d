//! HS on the 100 vertices of its rank-3 graph and its two chains. The group
//! is too large to enumerate, so every subgroup used is enumerated on its own
//! from generators that carry words.

use std::collections::HashMap;

use anyhow::{anyhow, bail, ensure, Result};
use gensift::chain::spec::{ChainSpec, Strategy, Target, TestSpec, GENERATORS};
use gensift::oracle::{build_t_sets, centralizer, conjugation_orbit, sifting_parameter, EnumeratedGroup, Rational, SearchSet, Subgroup};
use gensift::{BlackBoxGroup, GroupElement, OrderSet, Perm, Slp, SlpBuilder};
use rand::{Rng, RngExt};

use crate::ctx::{rat, Ctx, SpecBuilder};
use crate::graphs::Graph;
use crate::groups;

const HS_ORDER: u64 = 44_352_000;

/// The graph on `∞`, the 22 points and the 77 hexads of the M22 design.
pub struct Model {
    pub graph: Graph,
    pub hexads: Vec<Vec<usize>>,
}

fn perm_of(x: &GroupElement) -> &Perm {
    match x {
        GroupElement::Perm(p) => p,
        GroupElement::Matrix(_) => unreachable!("permutation group"),
    }
}

pub fn model() -> Result<(Model, Vec<Perm>)> {
    let m22 = groups::m22()?;
    let gens: Vec<Perm> = m22.generators().iter().map(|x| perm_of(x).clone()).collect();
    let mut start: Vec<usize> = (0..22).filter(|&i| gens[0].image(i) == i).collect();
    start.sort_unstable();
    let mut hexads = vec![start.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start, 0)]);
    let mut next = 0;
    while next < hexads.len() {
        for g in &gens {
            let mut h: Vec<usize> = hexads[next].iter().map(|&i| g.image(i)).collect();
            h.sort_unstable();
            if !index.contains_key(&h) {
                index.insert(h.clone(), hexads.len());
                hexads.push(h);
            }
        }
        next += 1;
    }
    ensure!(hexads.len() == 77, "{} hexads", hexads.len());
    let mut graph = Graph::new(100);
    for i in 0..22 {
        graph.edge(0, 1 + i);
    }
    for (j, h) in hexads.iter().enumerate() {
        for &i in h {
            graph.edge(1 + i, 23 + j);
        }
        for (k, h2) in hexads.iter().enumerate().skip(j + 1) {
            if h.iter().all(|x| !h2.contains(x)) {
                graph.edge(23 + j, 23 + k);
            }
        }
    }
    ensure!(graph.srg_parameters() == Some((22, 0, 6)));
    let lift = |g: &Perm| -> Result<Perm> {
        let mut images = vec![0u16; 100];
        for i in 0..22 {
            images[1 + i] = (1 + g.image(i)) as u16;
        }
        for (j, h) in hexads.iter().enumerate() {
            let mut im: Vec<usize> = h.iter().map(|&i| g.image(i)).collect();
            im.sort_unstable();
            images[23 + j] = (23 + index[&im]) as u16;
        }
        Ok(Perm::from_images(images)?)
    };
    let lifted = gens.iter().map(lift).collect::<Result<Vec<_>>>()?;
    Ok((Model { graph, hexads }, lifted))
}

/// `M22` lifted to the graph together with its conjugates under an
/// automorphism moving `∞`. Both copies lie in the simple group and `M22` is
/// maximal there, so the four generators give HS.
pub fn group<R: Rng>(rng: &mut R) -> Result<BlackBoxGroup> {
    let (model, lifted) = model()?;
    let sigma = loop {
        let s = model.graph.random_automorphism(rng).ok_or_else(|| anyhow!("no automorphism"))?;
        if s.image(0) != 0 {
            break GroupElement::Perm(s);
        }
    };
    let mut gens: Vec<GroupElement> = lifted.into_iter().map(GroupElement::Perm).collect();
    gens.extend([gens[0].conj(&sigma), gens[1].conj(&sigma)]);
    let mut orbit = vec![0usize];
    let mut seen = [false; 100];
    seen[0] = true;
    let mut next = 0;
    while next < orbit.len() {
        for g in &gens {
            let y = perm_of(g).image(orbit[next]);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
        next += 1;
    }
    ensure!(orbit.len() == 100, "orbit of ∞ has length {}", orbit.len());
    Ok(BlackBoxGroup::new("hs", gens)?)
}

/// An element with its word over the group generators.
#[derive(Clone)]
struct Tracked {
    x: GroupElement,
    w: Slp,
}

impl Tracked {
    fn mul(&self, o: &Tracked) -> Tracked {
        Tracked { x: &self.x * &o.x, w: Slp::compose(&self.w, &o.w, gensift::Compose::Product).expect("same slots") }
    }

    fn pow(&self, n: i64) -> Tracked {
        let mut b = SlpBuilder::new(self.w.slots());
        let r = b.append(&self.w).map(|r| b.pow(r, n));
        Tracked { x: self.x.pow(n), w: b.extract(r) }
    }
}

/// A product of `len` random generators and inverses.
fn random_word<R: Rng>(gens: &[GroupElement], len: usize, rng: &mut R) -> Tracked {
    let mut b = SlpBuilder::new(gens.len());
    let mut acc = None;
    let mut x = GroupElement::identity(gens[0].kind());
    for _ in 0..len {
        let i = rng.random_range(0..gens.len());
        let (v, g) = if rng.random_bool(0.5) { (b.inv(i), gens[i].inverse()) } else { (i, gens[i].clone()) };
        acc = b.mul_opt(acc, Some(v));
        x = &x * &g;
    }
    Tracked { x, w: b.extract(acc) }
}

/// An enumerated subgroup with words for its generators.
pub struct Part {
    pub g: EnumeratedGroup,
    pub words: Vec<Slp>,
}

impl Part {
    fn new(gens: Vec<Tracked>, cap: usize) -> Result<Part> {
        let elems: Vec<GroupElement> = gens.iter().map(|t| t.x.clone()).collect();
        Ok(Part { g: EnumeratedGroup::new(&elems, cap)?, words: gens.into_iter().map(|t| t.w).collect() })
    }
}

/// `C_G(t)` for an involution `t`: for random `g` with `c = [t, g]` of order
/// `n`, `c^{n/2}` or `g c^{(n-1)/2}` centralizes `t`. Stops once ten new
/// elements in a row leave the enumerated subgroup unchanged.
fn involution_centralizer<R: Rng>(gens: &[GroupElement], t: &Tracked, cap: usize, rng: &mut R) -> Result<Part> {
    let mut found: Vec<Tracked> = Vec::new();
    let mut order = 0;
    let mut stable = 0;
    while stable < 10 {
        let g = random_word(gens, 40, rng);
        let c = t.pow(-1).mul(&g.pow(-1)).mul(t).mul(&g);
        let n = c.x.order() as i64;
        let y = if n % 2 == 0 { c.pow(n / 2) } else { g.mul(&c.pow((n - 1) / 2)) };
        ensure!(&y.x * &t.x == &t.x * &y.x, "centralizer element does not commute");
        if y.x.is_identity() {
            continue;
        }
        found.push(y);
        let part = Part::new(found.clone(), cap)?;
        if part.g.order() == order {
            stable += 1;
            found.pop();
        } else {
            order = part.g.order();
            stable = 0;
        }
    }
    Part::new(found, cap)
}

/// Orbit ratio `p` of a random step with sampler `l` from `h` into `k`.
fn p_random(cx: &Ctx<'_>, h: &gensift::oracle::ElementSet, k: &gensift::oracle::ElementSet, l: &Subgroup) -> Result<Rational> {
    Ok(sifting_parameter(cx.g, h, k, &SearchSet { elements: &l.set, is_subgroup: true, companions: &[] })?)
}

/// Chain with element-order tests, through `M22`, `L3(4)`, `A6`, `A5` and
/// `A4` to `C(a)` for `a` in 2A, then down `C(a) = 4.2^4:S5`.
pub fn chain_2<R: Rng>(group: &BlackBoxGroup, rng: &mut R) -> Result<ChainSpec> {
    let gens = group.generators();
    let slots = gens.len();
    let m22 = Part {
        g: EnumeratedGroup::new(&gens[..2], 500_000)?,
        words: vec![Slp::generator(slots, 0), Slp::generator(slots, 1)],
    };
    ensure!(m22.g.order() == 443520);
    let mut cx = Ctx::new(&m22.g, 2);
    let l1 = cx.whole();
    let a = gens[0].clone();
    let ta = Tracked { x: a.clone(), w: Slp::generator(slots, 0) };
    let ca = involution_centralizer(gens, &ta, 10_000, rng)?;
    ensure!(ca.g.order() == 7680, "|C(a)| = {}", ca.g.order());
    let c_m22 = centralizer(&m22.g, &l1.set, &a).len();
    let p1 = Rational::new(7680 * (443520 / c_m22 as u64), HS_ORDER);
    ensure!(p1 == rat(1, 5), "step 1 p = {p1}");

    let fixed: Vec<usize> = (1..23).filter(|&v| perm_of(&a).image(v) == v).collect();
    let l2 = cx.point_stabilizer(&l1, fixed[0]);
    ensure!(l2.order() == 20160);
    let find = |cx: &mut Ctx<'_>, within: &Subgroup, o: u64, ab: u64, size: usize| -> Vec<Subgroup> {
        let mut out = Vec::new();
        for y in cx.all(&within.set, |y| y.order() == o && (&a * y).order() == ab) {
            let s = cx.sub(&[a.clone(), y]);
            if s.order() == size && !out.iter().any(|t: &Subgroup| t.set == s.set) {
                out.push(s);
                if out.len() == 6 {
                    break;
                }
            }
        }
        out
    };
    let mut l3 = None;
    for s in find(&mut cx, &l2, 4, 5, 360) {
        let t = build_t_sets(cx.g, &a, &[l1.clone(), l2.clone(), s.clone()])?;
        if t[2].len() == 1 {
            l3 = Some(cx.with_gens(s.set));
            break;
        }
    }
    let l3 = l3.ok_or_else(|| anyhow!("no A6 with a single class of a-conjugates"))?;
    let mut l4 = None;
    for s in find(&mut cx, &l3, 3, 5, 60) {
        let t = build_t_sets(cx.g, &a, &[l1.clone(), l2.clone(), l3.clone(), s.clone()])?;
        if t[3].len() == 1 {
            l4 = Some(cx.with_gens(s.set));
            break;
        }
    }
    let l4 = l4.ok_or_else(|| anyhow!("no A5 with a single class of a-conjugates"))?;
    let l6 = cx.centralizer(&l4, &a);
    let l5 = cx.normalizer(&l4, &l6);
    ensure!(l5.order() == 12 && l6.order() == 4);
    let chain = [l1.clone(), l2.clone(), l3.clone(), l4.clone(), l5.clone()];
    let t = build_t_sets(cx.g, &a, &chain)?;
    ensure!(t.iter().all(|t| t.len() == 1), "T sizes {:?}", t.iter().map(Vec::len).collect::<Vec<_>>());
    let one = vec![GroupElement::identity(a.kind())];
    let k: Vec<_> = chain.iter().map(|l| cx.conj_target(&l1, &a, &one, Some(l))).collect();
    let k6 = cx.conj_target(&l1, &a, &one, None);
    ensure!(p_random(&cx, &k[0], &k[1], &l1)? == rat(3, 11));
    ensure!(p_random(&cx, &k[1], &k[2], &l2)? == rat(1, 7));
    let reps4 = cx.reps_for(&k[2], &k[3], &l3, &l4);
    let reps5 = cx.reps_for(&k[3], &k[4], &l4, &l5);
    let reps6 = cx.left_transversal(&l5.set, &l6.set);
    ensure!(cx.p_of(&k[2], &k[3], &reps4) == Some(rat(1, 3)));
    ensure!(cx.p_of(&k[3], &k[4], &reps5) == Some(rat(1, 5)));
    ensure!(cx.p_of(&k[4], &k6, &reps6) == Some(rat(1, 3)));
    let profile = |m: &Subgroup, orders: &[u64]| -> Result<Rational> {
        Ok(gensift::oracle::element_order_profile(cx.g, &m.set, &OrderSet::new(orders.iter().copied())?))
    };
    ensure!(profile(&l2, &[6, 8, 11])? == rat(0, 1) && profile(&l3, &[7])? == rat(0, 1) && profile(&l4, &[4])? == rat(0, 1));
    ensure!(profile(&l2, &[7])? == rat(2, 7) && profile(&l3, &[4])? == rat(1, 4));

    // second stage inside C(a)
    let mut cc = Ctx::new(&ca.g, 3);
    let c = cc.whole();
    let y = cc
        .first(&c.set, |y| y.order() == 4 && cc.centralizer_order(&c, y) == 3840)
        .ok_or_else(|| anyhow!("no 4B element with centralizer of index 2"))?;
    let l7 = cc.centralizer(&c, &y);
    let mut inner = None;
    for x in cc.all(&l7.set, |x| x.order() == 8) {
        let x2 = x.pow(2);
        let cyc = cc.sub(std::slice::from_ref(&x2));
        let l8 = cc.normalizer(&l7, &cyc);
        if l8.order() != 256 {
            continue;
        }
        let l9 = cc.centralizer(&l8, &x2);
        if l9.order() != 128 {
            continue;
        }
        let l10 = cc.centralizer(&l9, &x);
        if l10.order() == 16 {
            inner = Some((x, x2, l8, l9, l10));
            break;
        }
    }
    let (x, x2, l8, l9, l10) = inner.ok_or_else(|| anyhow!("no element of order 8 giving 256 > 128 > 16"))?;
    let reps7 = cc.left_transversal(&c.set, &l7.set);
    let reps8 = cc.left_transversal(&l7.set, &l8.set);
    let reps9 = cc.left_transversal(&l8.set, &l9.set);
    let reps10 = cc.left_transversal(&l9.set, &l10.set);
    let l10_elems = cc.all(&l10.set, |_| true);
    let ca_gens = ca.g.generators().to_vec();

    let mut sb = SpecBuilder::with_dictionary(vec![(&m22.g, m22.words.clone()), (&ca.g, ca.words.clone())], slots, "hs-2", "hs", "hs.gens");
    let a_name = sb.elem("a", &a);
    let y_name = sb.elem("y", &y);
    let x_name = sb.elem("x", &x);
    let x2_name = sb.elem("x2", &x2);
    let l1_name = sb.set("L1", &l1.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let l3_name = sb.set("L3", &l3.gens);
    let l4_name = sb.set("L4", &l4.gens);
    let ca_name = sb.set("CA", &ca_gens);
    let l7_name = sb.set("L7", &l7.gens);
    let l8_name = sb.set("L8", &l8.gens);
    let l9_name = sb.set("L9", &l9.gens);
    let l10_name = sb.set("L10", &l10.gens);
    let l5_name = sb.set("L5", &l5.gens);
    let r4 = sb.set("R4", &reps4);
    let r5 = sb.set("R5", &reps5);
    let r6 = sb.set("R6", &reps6);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let r7 = sb.set("R7", &reps7);
    let r8 = sb.set("R8", &reps8);
    let r9 = sb.set("R9", &reps9);
    let r10 = sb.set("R10", &reps10);
    let r11 = sb.set("R11", &l10_elems);

    sb.stage("involution", GENERATORS, Some(&a_name));
    let orders = |xs: &[u64]| OrderSet::new(xs.iter().copied());
    let s = sb.step(
        Strategy::Random,
        rat(1, 5),
        Target::Conj { tset: "T0".into(), l: Some(l1_name.clone()) },
        true,
        TestSpec::Orders { k: l1_name.clone(), orders: orders(&[10, 12, 15, 20])?, p0: rat(7, 20) },
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 2));
    let s = sb.step(
        Strategy::Random,
        rat(3, 11),
        Target::Conj { tset: "T0".into(), l: Some(l2_name.clone()) },
        true,
        TestSpec::Orders { k: l2_name.clone(), orders: orders(&[6, 8, 11])?, p0: rat(103, 264) },
    );
    s.sampler = Some(l1_name);
    let s = sb.step(
        Strategy::Random,
        rat(1, 7),
        Target::Conj { tset: "T0".into(), l: Some(l3_name.clone()) },
        true,
        TestSpec::Orders { k: l3_name.clone(), orders: orders(&[7])?, p0: rat(2, 7) },
    );
    s.sampler = Some(l2_name);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 3),
        Target::Conj { tset: "T0".into(), l: Some(l4_name.clone()) },
        true,
        TestSpec::Orders { k: l4_name, orders: orders(&[4])?, p0: rat(1, 4) },
    );
    s.reps = Some(r4);
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 5),
        Target::Conj { tset: "T0".into(), l: Some(l5_name) },
        true,
        TestSpec::Centralizer(vec![a_name.clone()]),
    );
    s.reps = Some(r5);
    let s = sb.step(Strategy::CosetReps, rat(1, 3), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.reps = Some(r6);

    sb.stage("centralizer", &ca_name, None);
    let s = sb.step(Strategy::CosetReps, rat(1, 2), Target::Subgroup(l7_name), false, TestSpec::Centralizer(vec![y_name.clone()]));
    s.reps = Some(r7);
    s.orders.push((y_name, 4));
    let s = sb.step(
        Strategy::CosetReps,
        rat(1, 15),
        Target::Subgroup(l8_name),
        false,
        TestSpec::CyclicNormalizer { b: x2_name.clone(), order: 4 },
    );
    s.reps = Some(r8);
    let s = sb.step(Strategy::CosetReps, rat(1, 2), Target::Subgroup(l9_name), false, TestSpec::Centralizer(vec![x2_name]));
    s.reps = Some(r9);
    let s = sb.step(Strategy::CosetReps, rat(1, 8), Target::Subgroup(l10_name), false, TestSpec::Centralizer(vec![x_name.clone()]));
    s.reps = Some(r10);
    s.orders.push((x_name, 8));
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 16), Target::Identity, false, TestSpec::None);
    s.reps = Some(r11);
    sb.finish_static(group)
}

/// `∞`, a 7-set of points and the 42 hexads meeting it in one point, when
/// they span a Hoffman-Singleton subgraph.
fn hoffman_singleton(model: &Model) -> Option<Vec<usize>> {
    let mut set = Vec::new();
    subsets(22, 7, &mut set, &mut |h: &[usize]| {
        let meets: Vec<usize> = (0..77).filter(|&j| model.hexads[j].iter().filter(|x| h.contains(x)).count() == 1).collect();
        if meets.len() != 42 {
            return None;
        }
        let verts: Vec<usize> = std::iter::once(0).chain(h.iter().map(|&i| 1 + i)).chain(meets.iter().map(|&j| 23 + j)).collect();
        let mut sub = Graph::new(50);
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if model.graph.adjacent(u, v) {
                    sub.edge(i, j);
                }
            }
        }
        (sub.srg_parameters() == Some((7, 0, 1))).then_some(verts)
    })
}

fn subsets<T>(n: usize, k: usize, prefix: &mut Vec<usize>, visit: &mut impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
    if prefix.len() == k {
        return visit(prefix);
    }
    let from = prefix.last().map_or(0, |&x| x + 1);
    for x in from..n {
        prefix.push(x);
        let r = subsets(n, k, prefix, visit);
        prefix.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Chain through `U3(5).2`, `5^{1+2}:(8:2)` and
/// `<a>` for `a` of order 8 with `|C(a)| = 16`.
pub fn chain_1<R: Rng>(group: &BlackBoxGroup, rng: &mut R) -> Result<ChainSpec> {
    let gens = group.generators();
    let slots = gens.len();
    let (model, _) = model()?;
    let verts = hoffman_singleton(&model).ok_or_else(|| anyhow!("no Hoffman-Singleton subgraph"))?;
    let mut inside = [false; 100];
    for &v in &verts {
        inside[v] = true;
    }
    let mut hits: Vec<Tracked> = Vec::new();
    let l1 = loop {
        let h = random_word(gens, 40, rng);
        // U3(5).2 preserves the partition and swaps its halves
        let side = inside[perm_of(&h.x).image(verts[0])];
        if !verts.iter().all(|&v| inside[perm_of(&h.x).image(v)] == side) {
            continue;
        }
        hits.push(h);
        if hits.len() < 2 {
            continue;
        }
        let part = Part::new(hits.clone(), 252_000)?;
        if part.g.order() == 252_000 {
            break part;
        }
        if hits.len() > 12 {
            bail!("stabilizer hits generate only {} elements", part.g.order());
        }
    };
    let mut cx = Ctx::new(&l1.g, 1);
    let whole = cx.whole();

    let mut chosen = None;
    for i in whole.set.iter() {
        let a = cx.el(i);
        if a.order() != 8 || cx.centralizer_order(&whole, &a) != 8 {
            continue;
        }
        let ta = Tracked { x: a.clone(), w: l1.g.word(i).substitute(&l1.words)? };
        let part = involution_centralizer(gens, &ta.pow(4), 10_000, rng)?;
        let c = centralizer(&part.g, &gensift::oracle::ElementSet::full(part.g.order()), &a);
        if c.len() == 16 {
            let elems: Vec<GroupElement> = c.iter().map(|j| part.g.element(j)).collect();
            chosen = Some((a, part, elems));
            break;
        }
    }
    let (a, c4, ca) = chosen.ok_or_else(|| anyhow!("no element of order 8 with centralizer 16"))?;

    let mut p = None;
    for u in cx.all(&whole.set, |u| u.order() == 5) {
        let orbit: Vec<GroupElement> = (0..8).map(|i| u.conj(&a.pow(i))).collect();
        let s = cx.sub(&orbit);
        if s.order() == 125 {
            p = Some(s);
            break;
        }
    }
    let p = p.ok_or_else(|| anyhow!("no a-invariant Sylow 5-subgroup"))?;
    let b = cx
        .first(&p.set, |z| !z.is_identity() && p.gens.iter().all(|g| g * z == z * g))
        .ok_or_else(|| anyhow!("trivial centre"))?;
    let zb = cx.sub(std::slice::from_ref(&b));
    let l2 = cx.normalizer(&whole, &zb);
    ensure!(l2.order() == 2000 && l2.contains(cx.g, &a), "|N(Z)| = {}", l2.order());
    let l3 = cx.sub(std::slice::from_ref(&a));
    ensure!(cx.centralizer(&l2, &a).set == l3.set);
    let t = build_t_sets(cx.g, &a, &[whole.clone(), l2.clone(), l3.clone()])?;
    ensure!(t[1].len() == 2 && t[2].len() == 4, "T sizes {} {}", t[1].len(), t[2].len());
    let one = vec![GroupElement::identity(a.kind())];
    let k1 = cx.conj_target(&whole, &a, &one, Some(&whole));
    let k2 = cx.conj_target(&whole, &a, &t[1], Some(&l2));
    let k3 = cx.conj_target(&whole, &a, &t[2], Some(&l3));
    let k4 = cx.conj_target(&whole, &a, &one, None);
    let t3_inv: Vec<GroupElement> = t[2].iter().map(|x| x.inverse()).collect();
    let class = conjugation_orbit(cx.g, &a, &whole.gens).len() as u64;
    ensure!(Rational::new(16 * class, HS_ORDER) == rat(1, 88));
    ensure!(p_random(&cx, &k1, &k2, &whole)? == rat(1, 63));
    ensure!(p_random(&cx, &k2, &k3, &l2)? == rat(1, 125));
    ensure!(cx.p_of(&k3, &k4, &t3_inv) == Some(rat(1, 4)));

    let parts = vec![(&l1.g, l1.words.clone()), (&c4.g, c4.words.clone())];
    let mut sb = SpecBuilder::with_dictionary(parts, slots, "hs-1", "hs", "hs.gens");
    let a_name = sb.elem("a", &a);
    let b_name = sb.elem("b", &b);
    let l1_name = sb.set("L1", &whole.gens);
    let l2_name = sb.set("L2", &l2.gens);
    let t2 = sb.set("T2", &t[1]);
    let t3 = sb.set("T3", &t[2]);
    let l3_name = sb.set("L3", std::slice::from_ref(&a));
    let r4 = sb.set("R4", &t3_inv);
    let a_set = sb.set("A", std::slice::from_ref(&a));
    let ca_name = sb.set("CA", &ca);

    sb.stage("order-8", GENERATORS, Some(&a_name));
    let s = sb.step(
        Strategy::Random,
        rat(1, 88),
        Target::Conj { tset: "T0".into(), l: Some(l1_name.clone()) },
        true,
        TestSpec::Orders { k: l1_name.clone(), orders: OrderSet::new([11, 15])?, p0: rat(41, 165) },
    );
    s.sampler = Some(GENERATORS.into());
    s.orders.push((a_name.clone(), 8));
    let s = sb.step(
        Strategy::Random,
        rat(1, 63),
        Target::Conj { tset: t2, l: Some(l2_name.clone()) },
        true,
        TestSpec::CyclicNormalizer { b: b_name, order: 5 },
    );
    s.sampler = Some(l1_name);
    let s = sb.step(
        Strategy::Random,
        rat(1, 125),
        Target::Conj { tset: t3, l: Some(l3_name) },
        true,
        TestSpec::Centralizer(vec![a_name.clone()]),
    );
    s.sampler = Some(l2_name);
    let s = sb.step(Strategy::CosetReps, rat(1, 4), Target::Conj { tset: "T0".into(), l: None }, true, TestSpec::StoredSet(a_set));
    s.reps = Some(r4);

    sb.stage("centralizer", &ca_name, None);
    let s = sb.step(Strategy::ExhaustiveFinal, rat(1, 16), Target::Identity, false, TestSpec::None);
    s.reps = Some(ca_name.clone());
    sb.finish_static(group)
}
