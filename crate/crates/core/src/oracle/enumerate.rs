//! Explicit enumeration of a group by breadth-first closure.

use crate::element::{ElementKind, GroupElement};
use crate::error::{Error, Result};
use crate::slp::{Slp, SlpBuilder};

pub const DEFAULT_CAP: usize = 10_000_000;

/// All elements of a group, stored contiguously and indexed by a hash table.
/// Index 0 is the identity. Each element also records how breadth-first
/// search reached it, which gives short words in the generators.
pub struct EnumeratedGroup {
    kind: ElementKind,
    width: usize,
    data: Vec<u16>,
    table: Vec<u32>,
    parent: Vec<u32>,
    step: Vec<u8>,
    generators: Vec<GroupElement>,
    steps: Vec<(usize, bool)>,
}

const EMPTY: u32 = u32::MAX;

fn hash(raw: &[u16]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in raw {
        h = (h ^ x as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ (h >> 29)
}

impl EnumeratedGroup {
    /// Enumerates `<generators>`, failing once more than `cap` elements appear.
    pub fn new(generators: &[GroupElement], cap: usize) -> Result<Self> {
        let kind = generators
            .first()
            .ok_or_else(|| Error::Invalid("cannot enumerate a group without generators".into()))?
            .kind();
        let identity = GroupElement::identity(kind);
        // BFS steps: each generator, then the inverses that differ from it
        let mut steps: Vec<(GroupElement, usize, bool)> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.kind() != kind {
                return Err(Error::KindMismatch { left: kind, right: g.kind() });
            }
            steps.push((g.clone(), i, false));
        }
        for (i, g) in generators.iter().enumerate() {
            let gi = g.inverse();
            if gi != *g {
                steps.push((gi, i, true));
            }
        }
        let mut group = EnumeratedGroup {
            kind,
            width: identity.raw().len(),
            data: Vec::new(),
            table: vec![EMPTY; 1024],
            parent: Vec::new(),
            step: Vec::new(),
            generators: generators.to_vec(),
            steps: Vec::new(),
        };
        group.insert(identity.raw(), EMPTY, u8::MAX);
        let mut next = 0;
        while next < group.len() {
            let x = group.element(next);
            for (s, (g, _, _)) in steps.iter().enumerate() {
                let y = &x * g;
                if group.find(y.raw()).is_none() {
                    if group.len() >= cap {
                        return Err(Error::EnumerationCap { cap });
                    }
                    group.insert(y.raw(), next as u32, s as u8);
                }
            }
            next += 1;
        }
        group.steps = steps.into_iter().map(|(_, i, inv)| (i, inv)).collect();
        Ok(group)
    }

    pub fn with_default_cap(generators: &[GroupElement]) -> Result<Self> {
        Self::new(generators, DEFAULT_CAP)
    }

    fn slot(&self, raw: &[u16]) -> (usize, bool) {
        let mask = self.table.len() - 1;
        let mut pos = hash(raw) as usize & mask;
        loop {
            let e = self.table[pos];
            if e == EMPTY {
                return (pos, false);
            }
            if self.raw(e as usize) == raw {
                return (pos, true);
            }
            pos = (pos + 1) & mask;
        }
    }

    fn find(&self, raw: &[u16]) -> Option<usize> {
        match self.slot(raw) {
            (pos, true) => Some(self.table[pos] as usize),
            _ => None,
        }
    }

    fn insert(&mut self, raw: &[u16], parent: u32, step: u8) {
        if (self.len() + 1) * 2 > self.table.len() {
            let size = self.table.len() * 2;
            self.table = vec![EMPTY; size];
            for i in 0..self.len() {
                let (pos, _) = self.slot(self.raw(i));
                self.table[pos] = i as u32;
            }
        }
        let (pos, _) = self.slot(raw);
        self.table[pos] = self.len() as u32;
        self.data.extend_from_slice(raw);
        self.parent.push(parent);
        self.step.push(step);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Group order.
    pub fn order(&self) -> usize {
        self.len()
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn raw(&self, i: usize) -> &[u16] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn element(&self, i: usize) -> GroupElement {
        GroupElement::from_raw(self.kind, self.raw(i))
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        if g.kind() != self.kind {
            return None;
        }
        self.find(g.raw())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index_of(g).is_some()
    }

    /// Index of the product of elements `i` and `j`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        let p = &self.element(i) * &self.element(j);
        self.index_of(&p).expect("group is closed under multiplication")
    }

    /// Index of `element(i) * g` for `g` in the group.
    pub fn mul_by(&self, i: usize, g: &GroupElement) -> usize {
        let p = &self.element(i) * g;
        self.index_of(&p).expect("element lies in the group")
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.index_of(&self.element(i).inverse()).expect("group is closed under inversion")
    }

    /// Breadth-first word for element `i` as a program over the generators.
    pub fn word(&self, i: usize) -> Slp {
        let mut path = Vec::new();
        let mut v = i;
        while v != 0 {
            path.push(self.step[v] as usize);
            v = self.parent[v] as usize;
        }
        path.reverse();
        let mut b = SlpBuilder::new(self.generators.len());
        let mut inverses: Vec<Option<usize>> = vec![None; self.generators.len()];
        let mut acc: Option<usize> = None;
        for s in path {
            let (g, inv) = self.steps[s];
            let letter = if inv {
                *inverses[g].get_or_insert_with(|| b.inv(g))
            } else {
                g
            };
            acc = b.mul_opt(acc, Some(letter));
        }
        b.extract(acc)
    }
}
