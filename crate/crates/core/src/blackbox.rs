//! Black-box groups given by generators, the multiplication counter and
//! the order-membership test shared by the membership tests.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::element::{ElementKind, GroupElement, Matrix, Perm};
use crate::error::{Error, Result};

/// A finite group given only by generators of one concrete kind.
#[derive(Clone, Debug)]
pub struct BlackBoxGroup {
    label: String,
    kind: ElementKind,
    generators: Vec<GroupElement>,
}

impl BlackBoxGroup {
    pub fn new(label: impl Into<String>, generators: Vec<GroupElement>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Invalid("a group needs at least one generator".into()))?;
        let kind = first.kind();
        if let Some(g) = generators.iter().find(|g| g.kind() != kind) {
            return Err(Error::KindMismatch { left: kind, right: g.kind() });
        }
        Ok(BlackBoxGroup { label: label.into(), kind, generators })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.kind)
    }

    /// Parses the generator file format (see `docs/formats.md`).
    pub fn parse(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty generator file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(hline, format!("expected a number, found `{s}`")))
        };
        let kind = match fields.as_slice() {
            ["perm", n] => ElementKind::Perm { degree: num(n)? },
            ["mat", d, p] => {
                let p = u16::try_from(num(p)?).map_err(|_| Error::parse(hline, "field too large"))?;
                ElementKind::Matrix { dim: num(d)?, p }
            }
            _ => return Err(Error::parse(hline, "header must be `perm <degree>` or `mat <dim> <p>`")),
        };
        let mut generators = Vec::new();
        for (lno, line) in lines {
            let values = line
                .split_whitespace()
                .map(|t| t.parse::<u16>().map_err(|_| Error::parse(lno, format!("bad entry `{t}`"))))
                .collect::<Result<Vec<u16>>>()?;
            let g = match kind {
                ElementKind::Perm { degree } => {
                    if values.len() != degree {
                        return Err(Error::parse(lno, format!("expected {degree} images, found {}", values.len())));
                    }
                    if values.contains(&0) {
                        return Err(Error::parse(lno, "permutation images are 1-based"));
                    }
                    let images = values.into_iter().map(|v| v - 1).collect();
                    GroupElement::Perm(Perm::from_images(images).map_err(|e| Error::parse(lno, e.to_string()))?)
                }
                ElementKind::Matrix { dim, p } => GroupElement::Matrix(
                    Matrix::new(dim, p, values).map_err(|e| Error::parse(lno, e.to_string()))?,
                ),
            };
            generators.push(g);
        }
        if generators.is_empty() {
            return Err(Error::parse(hline, "no generators given"));
        }
        BlackBoxGroup::new(label, generators)
    }

    /// Loads a generator file; the label is the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("group");
        BlackBoxGroup::parse(label, &text)
    }

    /// Serializes in the generator file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.kind);
        for g in &self.generators {
            let line: Vec<String> = match g {
                GroupElement::Perm(p) => p.images().iter().map(|i| (i + 1).to_string()).collect(),
                GroupElement::Matrix(m) => m.entries().iter().map(|e| e.to_string()).collect(),
            };
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Counts group multiplications; inversion and equality are costed as in the
/// black-box model (inversion 1, equality 0).
#[derive(Debug, Default)]
pub struct MultCounter {
    count: Cell<u64>,
}

impl MultCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    pub fn reset(&self) {
        self.count.set(0);
    }

    pub(crate) fn charge(&self, n: u64) {
        self.count.set(self.count.get() + n);
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let r = a.try_mul(b)?;
        self.charge(1);
        Ok(r)
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        self.charge(1);
        a.inverse()
    }

    pub fn equals(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        if a.kind() != b.kind() {
            return Err(Error::KindMismatch { left: a.kind(), right: b.kind() });
        }
        Ok(a == b)
    }

    /// `x^-1 a x`, three multiplications.
    pub fn conjugate(&self, a: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        let xi = self.inverse(x);
        let t = self.multiply(&xi, a)?;
        self.multiply(&t, x)
    }

    /// `x^-1 a x` when `x^-1` is already known, two multiplications.
    pub fn conjugate_with_inverse(
        &self,
        a: &GroupElement,
        x: &GroupElement,
        x_inv: &GroupElement,
    ) -> Result<GroupElement> {
        let t = self.multiply(x_inv, a)?;
        self.multiply(&t, x)
    }

    /// Binary powering: at most `2 floor(log2 n)` multiplications.
    pub fn power(&self, g: &GroupElement, n: u64) -> GroupElement {
        if n == 0 {
            return GroupElement::identity(g.kind());
        }
        let mut acc: Option<GroupElement> = None;
        let mut sq = g.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => self.mul_same(&a, &sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = self.mul_same(&sq, &sq);
        }
        acc.expect("n > 0")
    }

    fn mul_same(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.charge(1);
        a * b
    }

    /// Decides whether the order of `g` lies in `orders`, checking `g^n = 1`
    /// and `g^d != 1` for the maximal proper divisors `d` of each `n`.
    /// Repeated squarings of `g` are shared between exponents.
    pub fn has_order_in(&self, g: &GroupElement, orders: &OrderSet) -> bool {
        let mut powers = PowerCache::new(g);
        orders.iter().any(|n| {
            powers.get(self, n).is_identity()
                && maximal_proper_divisors(n).into_iter().all(|d| !powers.get(self, d).is_identity())
        })
    }
}

struct PowerCache {
    squares: Vec<GroupElement>,
    done: BTreeMap<u64, GroupElement>,
}

impl PowerCache {
    fn new(g: &GroupElement) -> Self {
        PowerCache { squares: vec![g.clone()], done: BTreeMap::new() }
    }

    fn get(&mut self, counter: &MultCounter, n: u64) -> GroupElement {
        if n == 0 {
            return GroupElement::identity(self.squares[0].kind());
        }
        if let Some(x) = self.done.get(&n) {
            return x.clone();
        }
        let bits = 64 - n.leading_zeros() as usize;
        while self.squares.len() < bits {
            let last = self.squares.last().expect("nonempty");
            let next = counter.mul_same(last, last);
            self.squares.push(next);
        }
        let mut acc: Option<GroupElement> = None;
        for (j, sq) in self.squares.iter().enumerate().take(bits) {
            if n >> j & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => counter.mul_same(&a, sq),
                });
            }
        }
        let x = acc.expect("n > 0");
        self.done.insert(n, x.clone());
        x
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `n / q` for each prime `q` dividing `n`.
pub fn maximal_proper_divisors(n: u64) -> Vec<u64> {
    prime_factors(n).into_iter().map(|q| n / q).collect()
}

/// A finite set of positive element orders.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OrderSet(BTreeSet<u64>);

impl OrderSet {
    pub fn new(orders: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = orders.into_iter().collect();
        if set.contains(&0) {
            return Err(Error::Invalid("element orders are positive".into()));
        }
        Ok(OrderSet(set))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.contains(&n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The orders together with all their maximal proper divisors.
    pub fn closure(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for n in self.iter() {
            out.insert(n);
            out.extend(maximal_proper_divisors(n));
        }
        out
    }

    /// Number of distinct exponents the order test may evaluate.
    pub fn closure_size(&self) -> usize {
        self.closure().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, c: &[u16]) -> GroupElement {
        GroupElement::Perm(Perm::from_cycles(n, &[c]).unwrap())
    }

    #[test]
    fn closure_counts_divisors_once() {
        let i = OrderSet::new([11, 15]).unwrap();
        assert_eq!(i.closure().into_iter().collect::<Vec<_>>(), vec![1, 3, 5, 11, 15]);
        assert_eq!(i.closure_size(), 5);
    }

    #[test]
    fn order_test_is_exact() {
        let counter = MultCounter::new();
        let g = cycle(12, &[1, 2, 3, 4, 5, 6]);
        assert!(counter.has_order_in(&g, &OrderSet::new([6]).unwrap()));
        assert!(!counter.has_order_in(&g, &OrderSet::new([3, 12]).unwrap()));
        let id = GroupElement::identity(g.kind());
        assert!(counter.has_order_in(&id, &OrderSet::new([1]).unwrap()));
        assert!(!counter.has_order_in(&id, &OrderSet::new([2]).unwrap()));
    }

    #[test]
    fn counted_operations() {
        let counter = MultCounter::new();
        let a = cycle(3, &[1, 2]);
        let x = cycle(3, &[1, 3]);
        assert_eq!(counter.conjugate(&a, &x).unwrap(), cycle(3, &[2, 3]));
        assert_eq!(counter.count(), 3);
        counter.reset();
        let g = cycle(5, &[1, 2, 3, 4, 5]);
        assert_eq!(counter.power(&g, 7), g.pow(7));
        assert!(counter.count() <= 2 * 2);
        let before = counter.count();
        assert!(counter.equals(&g, &g).unwrap());
        assert_eq!(counter.count(), before);
    }

    #[test]
    fn generator_file_round_trip() {
        let text = "# two generators\nperm 4\n2 1 3 4\n2 3 4 1\n";
        let g = BlackBoxGroup::parse("s4", text).unwrap();
        assert_eq!(g.generators().len(), 2);
        let again = BlackBoxGroup::parse("s4", &g.to_text()).unwrap();
        assert_eq!(again.generators(), g.generators());
        assert!(BlackBoxGroup::parse("x", "perm 3\n1 1 2\n").is_err());
        assert!(BlackBoxGroup::parse("x", "mat 2 2\n1 1 1 1\n").is_err());
        assert!(BlackBoxGroup::parse("x", "perm 3\n").is_err());
    }
}
