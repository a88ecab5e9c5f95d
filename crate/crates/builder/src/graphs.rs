//! Graph constructions for J2 and HS and a small automorphism search.

use anyhow::{anyhow, ensure, Result};
use gensift::oracle::EnumeratedGroup;
use gensift::random::ProductReplacement;
use gensift::{GroupElement, MultCounter, Perm};
use rand::seq::SliceRandom;
use rand::{Rng, RngExt};

pub struct Graph {
    adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![vec![false; n]; n] }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn edge(&mut self, x: usize, y: usize) {
        self.adj[x][y] = true;
        self.adj[y][x] = true;
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.adj[x][y]
    }

    /// `(k, λ, μ)` if the graph is strongly regular.
    pub fn srg_parameters(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let k = self.adj[0].iter().filter(|&&b| b).count();
        let (mut lam, mut mu) = (None, None);
        for x in 0..n {
            if self.adj[x].iter().filter(|&&b| b).count() != k {
                return None;
            }
            for y in x + 1..n {
                let c = (0..n).filter(|&z| self.adj[x][z] && self.adj[y][z]).count();
                let slot = if self.adj[x][y] { &mut lam } else { &mut mu };
                if *slot.get_or_insert(c) != c {
                    return None;
                }
            }
        }
        Some((k, lam?, mu?))
    }

    /// A random automorphism sending vertex 0 to a random vertex, found by
    /// backtracking with randomized candidate order.
    pub fn random_automorphism<R: Rng>(&self, rng: &mut R) -> Option<Perm> {
        let n = self.len();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let start = rng.random_range(0..n);
        map[0] = start;
        used[start] = true;
        let mut order = vec![0usize];
        if !self.extend(&mut map, &mut used, &mut order, rng) {
            return None;
        }
        Perm::from_images(map.iter().map(|&x| x as u16).collect()).ok()
    }

    fn candidates(&self, v: usize, map: &[usize], used: &[bool], mapped: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| !used[w] && mapped.iter().all(|&x| self.adj[v][x] == self.adj[w][map[x]]))
            .collect()
    }

    fn extend<R: Rng>(&self, map: &mut [usize], used: &mut [bool], mapped: &mut Vec<usize>, rng: &mut R) -> bool {
        if mapped.len() == self.len() {
            return true;
        }
        let mut best: Option<(usize, Vec<usize>)> = None;
        for v in 0..self.len() {
            if map[v] != usize::MAX {
                continue;
            }
            let c = self.candidates(v, map, used, mapped);
            let small = c.len() <= 1;
            if best.as_ref().is_none_or(|(_, b)| c.len() < b.len()) {
                best = Some((v, c));
            }
            if small {
                break;
            }
        }
        let (v, mut cands) = best.expect("unmapped vertex");
        cands.shuffle(rng);
        for w in cands {
            map[v] = w;
            used[w] = true;
            mapped.push(v);
            if self.extend(map, used, mapped, rng) {
                return true;
            }
            mapped.pop();
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
}

/// Adds a point `∞` joined to every old vertex, and one vertex per
/// involution `t` of `group`: `t` is joined to the old vertices it fixes and
/// to the involutions `u` with `tu` of order 4.
pub fn extend_by_involutions(old: &Graph, group: &EnumeratedGroup) -> (Graph, Vec<GroupElement>) {
    let invs: Vec<GroupElement> = (0..group.order()).map(|i| group.element(i)).filter(|x| x.order() == 2).collect();
    let n_old = old.len();
    let mut g = Graph::new(1 + n_old + invs.len());
    for v in 0..n_old {
        g.edge(0, 1 + v);
        for w in v + 1..n_old {
            if old.adjacent(v, w) {
                g.edge(1 + v, 1 + w);
            }
        }
    }
    for (i, t) in invs.iter().enumerate() {
        let GroupElement::Perm(tp) = t else { unreachable!("permutation group") };
        for v in 0..n_old {
            if tp.image(v) == v {
                g.edge(1 + v, 1 + n_old + i);
            }
        }
        for (j, u) in invs.iter().enumerate().skip(i + 1) {
            if (t * u).order() == 4 {
                g.edge(1 + n_old + i, 1 + n_old + j);
            }
        }
    }
    (g, invs)
}

/// The subgroup generated by squares of random elements of `<gens>`, grown
/// until it reaches `order`.
pub fn squares_subgroup<R: Rng>(gens: &[GroupElement], order: usize, rng: &mut R) -> Result<EnumeratedGroup> {
    let counter = MultCounter::new();
    let mut pr = ProductReplacement::untracked(gens, rng.random(), &counter);
    let mut sq: Vec<GroupElement> = Vec::new();
    for _ in 0..12 {
        let x = pr.next_element(&counter);
        sq.push(&x * &x);
        if sq.len() < 2 {
            continue;
        }
        match EnumeratedGroup::new(&sq, order) {
            Ok(g) if g.order() == order => return Ok(g),
            _ => continue,
        }
    }
    Err(anyhow!("squares did not generate a group of order {order}"))
}

/// Automorphisms of `graph` generating a group that moves vertex 0.
pub fn automorphisms<R: Rng>(graph: &Graph, count: usize, rng: &mut R) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    while out.len() < count {
        let p = graph.random_automorphism(rng).ok_or_else(|| anyhow!("automorphism search failed"))?;
        out.push(GroupElement::Perm(p));
    }
    Ok(out)
}

/// Non-incidence graph of the points and lines of the Fano plane.
fn fano_antiflags() -> (Graph, Vec<[usize; 3]>) {
    let lines: Vec<[usize; 3]> = (0..7).map(|i| [i, (i + 1) % 7, (i + 3) % 7]).collect();
    let mut g = Graph::new(14);
    for (l, pts) in lines.iter().enumerate() {
        for p in (0..7).filter(|p| !pts.contains(p)) {
            g.edge(p, 7 + l);
        }
    }
    (g, lines)
}

/// Collineations of the Fano plane acting on its 14 points and lines.
fn fano_collineations(lines: &[[usize; 3]]) -> Result<Vec<GroupElement>> {
    let key = |l: [usize; 3]| {
        let mut s = l;
        s.sort_unstable();
        s
    };
    let sorted: Vec<[usize; 3]> = lines.iter().map(|l| key(*l)).collect();
    let mut out = Vec::new();
    let mut perm = Vec::new();
    permutations(7, &mut perm, &mut |perm| {
        let images: Option<Vec<u16>> = sorted
            .iter()
            .map(|l| sorted.iter().position(|m| *m == key([perm[l[0]], perm[l[1]], perm[l[2]]])).map(|j| 7 + j as u16))
            .collect();
        if let Some(lines) = images {
            let mut all: Vec<u16> = perm.iter().map(|&x| x as u16).collect();
            all.extend(lines);
            out.push(all);
        }
    });
    out.into_iter().map(|im| Ok(GroupElement::Perm(Perm::from_images(im)?))).collect()
}

fn permutations(n: usize, prefix: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if prefix.len() == n {
        visit(prefix);
        return;
    }
    for x in 0..n {
        if !prefix.contains(&x) {
            prefix.push(x);
            permutations(n, prefix, visit);
            prefix.pop();
        }
    }
}

/// J2 on the 100 vertices of the Hall-Janko graph.
pub fn j2_generators<R: Rng>(rng: &mut R) -> Result<Vec<GroupElement>> {
    let (base, lines) = fano_antiflags();
    let l32 = EnumeratedGroup::new(&fano_collineations(&lines)?, 200)?;
    ensure!(l32.order() == 168, "Fano collineations give order {}", l32.order());
    let (g36, _) = extend_by_involutions(&base, &l32);
    ensure!(g36.srg_parameters() == Some((14, 4, 6)));
    let aut36 = automorphisms(&g36, 3, rng)?;
    let u33 = squares_subgroup(&aut36, 6048, rng)?;
    let (g100, _) = extend_by_involutions(&g36, &u33);
    ensure!(g100.srg_parameters() == Some((36, 14, 12)));
    let aut100 = automorphisms(&g100, 3, rng)?;
    let j2 = squares_subgroup(&aut100, 604800, rng)?;
    Ok(j2.generators().to_vec())
}
