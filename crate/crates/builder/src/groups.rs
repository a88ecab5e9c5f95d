//! Standard generators of the groups the shipped chains use.

use anyhow::Result;
use gensift::{BlackBoxGroup, GroupElement, Matrix, Perm};

fn perm(n: usize, cycles: &[&[u16]]) -> Result<GroupElement> {
    Ok(GroupElement::Perm(Perm::from_cycles(n, cycles)?))
}

pub fn m11() -> Result<BlackBoxGroup> {
    let a = perm(11, &[&[2, 10], &[4, 11], &[5, 7], &[8, 9]])?;
    let b = perm(11, &[&[1, 4, 3, 8], &[2, 5, 6, 9]])?;
    Ok(BlackBoxGroup::new("m11", vec![a, b])?)
}

/// The action on the even-weight vectors of `GF(2)^n` for odd `n`, in the
/// basis `e_i + e_n`.
pub fn even_weight_module(g: &Perm) -> Result<GroupElement> {
    let n = g.degree();
    let d = n - 1;
    let mut entries = vec![0u16; d * d];
    for i in 0..d {
        let mut v = vec![0u16; n];
        v[g.image(i)] ^= 1;
        v[g.image(n - 1)] ^= 1;
        entries[i * d..(i + 1) * d].copy_from_slice(&v[..d]);
    }
    Ok(GroupElement::Matrix(Matrix::new(d, 2, entries)?))
}

pub fn m11_gf2() -> Result<BlackBoxGroup> {
    let gens = m11()?
        .generators()
        .iter()
        .map(|g| match g {
            GroupElement::Perm(p) => even_weight_module(p),
            GroupElement::Matrix(_) => unreachable!(),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlackBoxGroup::new("m11-gf2", gens)?)
}

pub fn m12() -> Result<BlackBoxGroup> {
    let a = perm(12, &[&[1, 4], &[3, 10], &[5, 11], &[6, 12]])?;
    let b = perm(12, &[&[1, 8, 9], &[2, 3, 4], &[5, 12, 11], &[6, 10, 7]])?;
    Ok(BlackBoxGroup::new("m12", vec![a, b])?)
}

pub fn m22() -> Result<BlackBoxGroup> {
    let a = perm(22, &[&[1, 13], &[2, 8], &[3, 16], &[4, 12], &[6, 22], &[7, 17], &[9, 10], &[11, 14]])?;
    let b = perm(
        22,
        &[&[1, 22, 3, 21], &[2, 18, 4, 13], &[5, 12], &[6, 11, 7, 15], &[8, 14, 20, 10], &[17, 19]],
    )?;
    Ok(BlackBoxGroup::new("m22", vec![a, b])?)
}
