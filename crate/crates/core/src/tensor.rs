//! Dense Künneth model of `H^{2*}(S^n, Q)`.
//!
//! A tensor of level `n` stores one coefficient per `n`-tuple of basis
//! indices, basis `(1, e_1, .., e_b2, pt)`; slot 0 is the most significant
//! digit of the flat index.

use num_traits::Zero;

use crate::arith::{q, Q};
use crate::surface::{MixedClass, SurfaceData};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorClass {
    level: usize,
    dim: usize,
    data: Vec<Q>,
}

/// Sparse square matrix acting on one slot.
type SlotMatrix = Vec<Vec<(usize, Q)>>;

fn sparse(m: &[Vec<Q>]) -> SlotMatrix {
    m.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect()
        })
        .collect()
}

impl TensorClass {
    pub fn zero(dim: usize, level: usize) -> Self {
        Self {
            level,
            dim,
            data: vec![Q::zero(); dim.pow(level as u32)],
        }
    }

    /// `1 ⊗ .. ⊗ 1`.
    pub fn unit(dim: usize, level: usize) -> Self {
        let mut t = Self::zero(dim, level);
        t.data[0] = q(1);
        t
    }

    pub fn from_class(a: &MixedClass) -> Self {
        let c = a.coords();
        Self {
            level: 1,
            dim: c.len(),
            data: c,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, idx: &[usize]) -> &Q {
        &self.data[self.flat(idx)]
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    /// Nonzero coefficients with their index tuples.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, Q)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(f, v)| (self.unflat(f), v.clone()))
            .collect()
    }

    fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0; self.level];
        for slot in (0..self.level).rev() {
            idx[slot] = f % self.dim;
            f /= self.dim;
        }
        idx
    }

    /// External product, `self` in the leading slots.
    pub fn tensor(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(if a.is_zero() || b.is_zero() {
                    Q::zero()
                } else {
                    a * b
                });
            }
        }
        Self {
            level: self.level + other.level,
            dim: self.dim,
            data,
        }
    }

    /// Apply a matrix to one slot: `Y[.., x, ..] = sum_y M[x][y] X[.., y, ..]`.
    fn mode_product(&self, m: &SlotMatrix, slot: usize) -> Self {
        let inner = self.dim.pow((self.level - slot - 1) as u32);
        let outer = self.dim.pow(slot as u32);
        let mut out = Self::zero(self.dim, self.level);
        for o in 0..outer {
            for (x, row) in m.iter().enumerate() {
                for (y, coef) in row {
                    let src = (o * self.dim + y) * inner;
                    let dst = (o * self.dim + x) * inner;
                    for i in 0..inner {
                        let v = &self.data[src + i];
                        if !v.is_zero() {
                            out.data[dst + i] += coef * v;
                        }
                    }
                }
            }
        }
        out
    }

    fn apply_all(&self, m: &SlotMatrix) -> Self {
        (0..self.level).fold(self.clone(), |t, k| t.mode_product(m, k))
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Multiply by `sum_k p_k^* a`.
    pub fn mul_pullback_sum(&self, surface: &SurfaceData, a: &MixedClass) -> Self {
        let m = multiplication_matrix(surface, a);
        let mut out = Self::zero(self.dim, self.level);
        for k in 0..self.level {
            out.add_assign(&self.mode_product(&m, k));
        }
        out
    }

    /// Multiply by `p_k^* a` on a single slot.
    pub fn mul_slot(&self, surface: &SurfaceData, slot: usize, a: &MixedClass) -> Self {
        self.mode_product(&multiplication_matrix(surface, a), slot)
    }

    /// Permute slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.dim, self.level);
        for (f, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let idx = self.unflat(f);
            let new: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            let g = out.flat(&new);
            out.data[g] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            level: self.level,
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// The Poincaré-dual covector `P^{⊗n} W`, so that `∫ X·W = <X, dual(W)>`.
    pub fn dual(&self, surface: &SurfaceData) -> Self {
        self.apply_all(&sparse(&pairing_matrix(surface)))
    }

    /// Plain coordinate dot product.
    pub fn dot(&self, other: &Self) -> Q {
        let mut acc = Q::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    /// `∫_{S^n} self · other`.
    pub fn integrate_product(&self, surface: &SurfaceData, other: &Self) -> Q {
        self.dot(&other.dual(surface))
    }
}

/// Poincaré pairing matrix on `(1, e_1, .., e_b2, pt)`.
pub fn pairing_matrix(surface: &SurfaceData) -> Vec<Vec<Q>> {
    let b2 = surface.b2();
    let n = b2 + 2;
    let mut p = vec![vec![Q::zero(); n]; n];
    p[0][n - 1] = q(1);
    p[n - 1][0] = q(1);
    for i in 0..b2 {
        for j in 0..b2 {
            p[i + 1][j + 1] = q(surface.gram()[i][j]);
        }
    }
    p
}

fn inverse_pairing_matrix(surface: &SurfaceData) -> Vec<Vec<Q>> {
    let b2 = surface.b2();
    let n = b2 + 2;
    let mut p = vec![vec![Q::zero(); n]; n];
    p[0][n - 1] = q(1);
    p[n - 1][0] = q(1);
    for i in 0..b2 {
        for j in 0..b2 {
            p[i + 1][j + 1] = surface.gram_inverse()[i][j].clone();
        }
    }
    p
}

/// Row `x` holds the coordinates of `basis_x · a`.
fn multiplication_matrix(surface: &SurfaceData, a: &MixedClass) -> SlotMatrix {
    let b2 = surface.b2();
    let n = b2 + 2;
    let mut m = vec![vec![Q::zero(); n]; n];
    for (x, row) in m.iter_mut().enumerate() {
        let prod = surface.cup_unchecked(&MixedClass::basis(b2, x), a);
        *row = prod.coords();
    }
    // stored transposed: result coordinate x gathers from source coordinate y
    let mut t = vec![vec![Q::zero(); n]; n];
    for (y, row) in m.iter().enumerate() {
        for (x, v) in row.iter().enumerate() {
            t[x][y] = v.clone();
        }
    }
    sparse(&t)
}

/// `∫_S a · y_1 ⋯ y_j` for basis indices `y`.
fn integral_against_basis(surface: &SurfaceData, a: &MixedClass, ys: &[usize]) -> Q {
    let pt = surface.b2() + 1;
    let nontrivial: Vec<usize> = ys.iter().copied().filter(|&y| y != 0).collect();
    match nontrivial.as_slice() {
        [] => a.r4.clone(),
        [y] if *y == pt => a.r0.clone(),
        [y] => {
            let i = y - 1;
            (0..surface.b2())
                .map(|k| q(surface.gram()[i][k]) * &a.r2[k])
                .sum()
        }
        [y, z] if *y != pt && *z != pt => &a.r0 * q(surface.gram()[y - 1][z - 1]),
        _ => Q::zero(),
    }
}

/// Push-forward of `a` along the small diagonal `S -> S^j`.
pub fn diagonal_pushforward(surface: &SurfaceData, a: &MixedClass, j: usize) -> TensorClass {
    assert!(j >= 1, "diagonal of size 0");
    let dim = surface.b2() + 2;
    let mut v = TensorClass::zero(dim, j);
    for f in 0..v.data.len() {
        let ys = v.unflat(f);
        v.data[f] = integral_against_basis(surface, a, &ys);
    }
    v.apply_all(&sparse(&inverse_pairing_matrix(surface)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_of_one_on_rank_one() {
        let s = SurfaceData::simple(vec![vec![1]], vec![-3]).unwrap();
        let t = diagonal_pushforward(&s, &MixedClass::one(1), 2);
        let mut nz = t.nonzero();
        nz.sort();
        assert_eq!(
            nz,
            vec![(vec![0, 2], q(1)), (vec![1, 1], q(1)), (vec![2, 0], q(1))]
        );
        let e1 = TensorClass::from_class(&MixedClass::basis(1, 1));
        assert_eq!(t.integrate_product(&s, &e1.tensor(&e1)), q(1));
    }

    #[test]
    fn diagonal_level_one_is_identity() {
        let s = SurfaceData::p1xp1();
        let a = MixedClass::new(q(2), vec![q(3), q(-1)], q(7));
        assert_eq!(diagonal_pushforward(&s, &a, 1), TensorClass::from_class(&a));
    }

    #[test]
    fn permutation_round_trip() {
        let s = SurfaceData::p1xp1();
        let t = diagonal_pushforward(&s, &MixedClass::basis(2, 1), 3);
        let p = t.permute(&[2, 0, 1]);
        assert_eq!(p.permute(&[1, 2, 0]), t);
    }
}
