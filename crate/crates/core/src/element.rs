//! Concrete group elements: permutations and invertible matrices over GF(p).
//!
//! Products are written left to right, so `a * b` means "apply `a`, then `b`".
//! Permutations act on points from the right and matrices act on row vectors.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u16]>,
}

/// An invertible `dim x dim` matrix over the prime field GF(p), row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    p: u16,
    dim: usize,
    entries: Box<[u16]>,
}

/// A group element in one of the supported concrete representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(Perm),
    Matrix(Matrix),
}

/// Shape shared by all elements of one group: used to check compatibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Perm { degree: usize },
    Matrix { dim: usize, p: u16 },
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementKind::Perm { degree } => write!(f, "perm {degree}"),
            ElementKind::Matrix { dim, p } => write!(f, "mat {dim} {p}"),
        }
    }
}

impl Perm {
    /// Builds a permutation from 0-based images, checking it is a bijection.
    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let n = images.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::Invalid(format!("unsupported permutation degree {n}")));
        }
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::Invalid("image list is not a permutation".into()));
            }
            seen[i] = true;
        }
        Ok(Perm { images: images.into_boxed_slice() })
    }

    /// Builds a permutation of degree `n` from 1-based disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u16]]) -> Result<Self> {
        let mut images: Vec<u16> = (0..n as u16).collect();
        let mut moved = vec![false; n];
        for cycle in cycles {
            for (k, &pt) in cycle.iter().enumerate() {
                let next = cycle[(k + 1) % cycle.len()];
                if pt == 0 || pt as usize > n || next == 0 || next as usize > n {
                    return Err(Error::Invalid(format!("cycle point out of range 1..={n}")));
                }
                if moved[pt as usize - 1] {
                    return Err(Error::Invalid("cycles are not disjoint".into()));
                }
                moved[pt as usize - 1] = true;
                images[pt as usize - 1] = next - 1;
            }
        }
        Perm::from_images(images)
    }

    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n as u16).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    /// Image of the 0-based point `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u16;
        }
        Perm { images: inv.into_boxed_slice() }
    }

    fn compose(&self, other: &Perm) -> Perm {
        let images = self.images.iter().map(|&i| other.images[i as usize]).collect();
        Perm { images }
    }
}

fn inv_mod(a: u16, p: u16) -> u16 {
    let (mut base, mut exp, mut acc) = (a as u32 % p as u32, p as u32 - 2, 1u32);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        exp >>= 1;
    }
    acc as u16
}

fn is_prime(p: u16) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Matrix {
    /// Builds a matrix from row-major entries, checking the field and invertibility.
    pub fn new(dim: usize, p: u16, entries: Vec<u16>) -> Result<Self> {
        if dim == 0 || !is_prime(p) {
            return Err(Error::Invalid(format!("unsupported matrix shape dim={dim} p={p}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e >= p) {
            return Err(Error::Invalid(format!("matrix entry out of range for GF({p})")));
        }
        let m = Matrix { p, dim, entries: entries.into_boxed_slice() };
        if m.try_inverse().is_none() {
            return Err(Error::Invalid("matrix is singular".into()));
        }
        Ok(m)
    }

    pub fn identity(dim: usize, p: u16) -> Self {
        let mut entries = vec![0u16; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix { p, dim, entries: entries.into_boxed_slice() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field_order(&self) -> u16 {
        self.p
    }

    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim;
        self.entries.iter().enumerate().all(|(k, &e)| e == u16::from(k / d == k % d))
    }

    fn compose(&self, other: &Matrix) -> Matrix {
        let (d, p) = (self.dim, self.p as u32);
        let mut out = vec![0u16; d * d];
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            let mut acc = vec![0u32; d];
            for (k, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let other_row = &other.entries[k * d..(k + 1) * d];
                for (slot, &b) in acc.iter_mut().zip(other_row) {
                    *slot += a as u32 * b as u32;
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                out[i * d + j] = (v % p) as u16;
            }
        }
        Matrix { p: self.p, dim: d, entries: out.into_boxed_slice() }
    }

    fn try_inverse(&self) -> Option<Matrix> {
        let (d, p) = (self.dim, self.p as u32);
        let mut a: Vec<u32> = self.entries.iter().map(|&e| e as u32).collect();
        let mut inv: Vec<u32> = Matrix::identity(d, self.p).entries.iter().map(|&e| e as u32).collect();
        for col in 0..d {
            let pivot = (col..d).find(|&r| a[r * d + col] != 0)?;
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                    inv.swap(pivot * d + j, col * d + j);
                }
            }
            let s = inv_mod(a[col * d + col] as u16, self.p) as u32;
            for j in 0..d {
                a[col * d + j] = a[col * d + j] * s % p;
                inv[col * d + j] = inv[col * d + j] * s % p;
            }
            for r in 0..d {
                let f = a[r * d + col];
                if r == col || f == 0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] = (a[r * d + j] + (p - f) * a[col * d + j]) % p;
                    inv[r * d + j] = (inv[r * d + j] + (p - f) * inv[col * d + j]) % p;
                }
            }
        }
        let entries = inv.into_iter().map(|v| v as u16).collect();
        Some(Matrix { p: self.p, dim: d, entries })
    }

    pub fn inverse(&self) -> Matrix {
        self.try_inverse().expect("matrices are checked to be invertible on construction")
    }
}

impl GroupElement {
    pub fn kind(&self) -> ElementKind {
        match self {
            GroupElement::Perm(p) => ElementKind::Perm { degree: p.degree() },
            GroupElement::Matrix(m) => ElementKind::Matrix { dim: m.dim, p: m.p },
        }
    }

    pub fn identity(kind: ElementKind) -> Self {
        match kind {
            ElementKind::Perm { degree } => GroupElement::Perm(Perm::identity(degree)),
            ElementKind::Matrix { dim, p } => GroupElement::Matrix(Matrix::identity(dim, p)),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Perm(p) => p.is_identity(),
            GroupElement::Matrix(m) => m.is_identity(),
        }
    }

    /// Product `self * other`, failing if the two elements have different kinds.
    pub fn try_mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) if a.degree() == b.degree() => {
                Ok(GroupElement::Perm(a.compose(b)))
            }
            (GroupElement::Matrix(a), GroupElement::Matrix(b)) if a.dim == b.dim && a.p == b.p => {
                Ok(GroupElement::Matrix(a.compose(b)))
            }
            _ => Err(Error::KindMismatch { left: self.kind(), right: other.kind() }),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Perm(p) => GroupElement::Perm(p.inverse()),
            GroupElement::Matrix(m) => GroupElement::Matrix(m.inverse()),
        }
    }

    /// `x^-1 * self * x`.
    pub fn conj(&self, x: &GroupElement) -> GroupElement {
        &(&x.inverse() * self) * x
    }

    /// Uncounted power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, n: i64) -> GroupElement {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = GroupElement::identity(self.kind());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Order of the element, by repeated multiplication (uncounted).
    pub fn order(&self) -> u64 {
        let mut n = 1;
        let mut x = self.clone();
        while !x.is_identity() {
            x = &x * self;
            n += 1;
        }
        n
    }

    /// Flat data (images or matrix entries), used for compact storage.
    pub fn raw(&self) -> &[u16] {
        match self {
            GroupElement::Perm(p) => &p.images,
            GroupElement::Matrix(m) => &m.entries,
        }
    }

    /// Rebuilds an element of `kind` from data produced by [`GroupElement::raw`].
    pub fn from_raw(kind: ElementKind, raw: &[u16]) -> GroupElement {
        match kind {
            ElementKind::Perm { .. } => GroupElement::Perm(Perm { images: raw.into() }),
            ElementKind::Matrix { dim, p } => GroupElement::Matrix(Matrix { p, dim, entries: raw.into() }),
        }
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;

    /// Panics if the operands have different kinds; use [`GroupElement::try_mul`]
    /// when that is not already guaranteed.
    fn mul(self, rhs: &GroupElement) -> GroupElement {
        self.try_mul(rhs).expect("multiplying elements of different kinds")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Perm {
    /// Disjoint cycle notation with 1-based points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for start in 0..self.degree() {
            if seen[start] || self.image(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{}", i + 1)?;
                first = false;
                i = self.image(i);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix(GF({}), [", self.p)?;
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "{}", parts.join(" "))?;
        }
        write!(f, "])")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Perm(p) => write!(f, "{p}"),
            GroupElement::Matrix(m) => write!(f, "{m:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[u16]) -> GroupElement {
        GroupElement::Perm(Perm::from_images(images.iter().map(|i| i - 1).collect()).unwrap())
    }

    #[test]
    fn product_applies_left_factor_first() {
        let p = &perm(&[2, 1, 3]) * &perm(&[1, 3, 2]);
        assert_eq!(p, perm(&[3, 1, 2]));
    }

    #[test]
    fn conjugation_relabels_cycles() {
        let a = perm(&[2, 1, 3]);
        let x = perm(&[3, 2, 1]);
        assert_eq!(a.conj(&x), perm(&[1, 3, 2]));
    }

    #[test]
    fn cycles_round_trip_through_display() {
        let p = Perm::from_cycles(11, &[&[2, 10], &[4, 11], &[5, 7], &[8, 9]]).unwrap();
        assert_eq!(p.to_string(), "(2,10)(4,11)(5,7)(8,9)");
        assert_eq!(Perm::identity(4).to_string(), "()");
    }

    #[test]
    fn rejects_non_bijections_and_singular_matrices() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Matrix::new(2, 2, vec![1, 1, 1, 1]).is_err());
        assert!(Matrix::new(2, 4, vec![1, 0, 0, 1]).is_err());
    }

    #[test]
    fn matrix_inverse_and_power() {
        let m = GroupElement::Matrix(Matrix::new(2, 3, vec![1, 1, 0, 1]).unwrap());
        assert!((&m * &m.inverse()).is_identity());
        assert_eq!(m.order(), 3);
        assert_eq!(m.pow(4), m);
        assert_eq!(m.pow(-1), m.inverse());
    }

    #[test]
    fn mixing_kinds_is_an_error() {
        let m = GroupElement::Matrix(Matrix::identity(3, 2));
        assert!(perm(&[1, 2, 3]).try_mul(&m).is_err());
        assert!(perm(&[1, 2, 3]).try_mul(&perm(&[1, 2])).is_err());
    }
}
