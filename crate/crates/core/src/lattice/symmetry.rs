use super::{check_dim, Point, MAX_DIM};
use crate::error::{contract_err, Result};

/// A signed coordinate permutation: `g(x)_i = sign_i · x_{perm_i}`.
///
/// These are exactly the graph automorphisms of Z^d fixing the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    dim: u8,
    perm: [u8; MAX_DIM],
    sign: [i8; MAX_DIM],
}

impl Symmetry {
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut perm = [0u8; MAX_DIM];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        Ok(Symmetry {
            dim: dim as u8,
            perm,
            sign: [1; MAX_DIM],
        })
    }

    pub fn new(perm: &[usize], sign: &[i8]) -> Result<Self> {
        let dim = perm.len();
        let mut g = Symmetry::identity(dim)?;
        if sign.len() != dim {
            return Err(contract_err!("sign vector length {} != {dim}", sign.len()));
        }
        let mut seen = [false; MAX_DIM];
        for (i, (&p, &s)) in perm.iter().zip(sign).enumerate() {
            if p >= dim || seen[p] || !(s == 1 || s == -1) {
                return Err(contract_err!("not a signed permutation: {perm:?} / {sign:?}"));
            }
            seen[p] = true;
            g.perm[i] = p as u8;
            g.sign[i] = s;
        }
        Ok(g)
    }

    /// Reflection `x_axis -> -x_axis`.
    pub fn reflect(dim: usize, axis: usize) -> Result<Self> {
        let mut g = Symmetry::identity(dim)?;
        if axis >= dim {
            return Err(contract_err!("axis {axis} out of range"));
        }
        g.sign[axis] = -1;
        Ok(g)
    }

    /// Transposition of two axes.
    pub fn swap(dim: usize, a: usize, b: usize) -> Result<Self> {
        let mut g = Symmetry::identity(dim)?;
        if a >= dim || b >= dim {
            return Err(contract_err!("axes ({a}, {b}) out of range"));
        }
        g.perm.swap(a, b);
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn apply(&self, p: &Point) -> Point {
        debug_assert_eq!(p.dim(), self.dim());
        let mut c = [0; MAX_DIM];
        for i in 0..self.dim() {
            c[i] = self.sign[i] as i32 * p.coords[self.perm[i] as usize];
        }
        Point::from_array(self.dim(), c)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Symmetry) -> Symmetry {
        let mut g = *self;
        for i in 0..self.dim() {
            let j = self.perm[i] as usize;
            g.perm[i] = other.perm[j];
            g.sign[i] = self.sign[i] * other.sign[j];
        }
        g
    }

    pub fn inverse(&self) -> Symmetry {
        let mut g = *self;
        for i in 0..self.dim() {
            let j = self.perm[i] as usize;
            g.perm[j] = i as u8;
            g.sign[j] = self.sign[i];
        }
        g
    }

    /// All `2^d · d!` signed permutations (the 8 dihedral maps when d = 2).
    pub fn all(dim: usize) -> Result<Vec<Symmetry>> {
        check_dim(dim)?;
        let mut perms = Vec::new();
        permutations(&mut (0..dim).collect::<Vec<_>>(), 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << dim);
        for perm in &perms {
            for mask in 0..(1u32 << dim) {
                let sign: Vec<i8> = (0..dim).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                out.push(Symmetry::new(perm, &sign)?);
            }
        }
        Ok(out)
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[i32]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn basic_maps() {
        let p = pt(&[3, 1]);
        assert_eq!(Symmetry::reflect(2, 0).unwrap().apply(&p), pt(&[-3, 1]));
        assert_eq!(Symmetry::swap(2, 0, 1).unwrap().apply(&p), pt(&[1, 3]));
        assert_eq!(Symmetry::identity(2).unwrap().apply(&p), p);
    }

    #[test]
    fn group_sizes() {
        assert_eq!(Symmetry::all(2).unwrap().len(), 8);
        assert_eq!(Symmetry::all(3).unwrap().len(), 48);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Symmetry::new(&[0, 0], &[1, 1]).is_err());
        assert!(Symmetry::new(&[0, 1], &[1, 2]).is_err());
    }

    proptest! {
        #[test]
        fn composition_and_inverse(
            gi in 0usize..48, hi in 0usize..48,
            x in -50i32..50, y in -50i32..50, z in -50i32..50,
        ) {
            let all = Symmetry::all(3).unwrap();
            let (g, h) = (all[gi], all[hi]);
            let p = pt(&[x, y, z]);
            prop_assert_eq!(g.compose(&h).apply(&p), g.apply(&h.apply(&p)));
            prop_assert_eq!(g.inverse().apply(&g.apply(&p)), p);
            prop_assert_eq!(g.apply(&p).linf_norm(), p.linf_norm());
        }
    }
}
