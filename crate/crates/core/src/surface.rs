//! Lattice model of the even cohomology of a surface with `p_g = q = 0`.
//!
//! `H^2(S, Z)` is modelled as a free lattice with an integral intersection
//! form; 2-torsion only survives as the count `n2`. `H^0` and `H^4` are rank
//! one, spanned by `1` and the point class `pt`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::error::{Error, Result};

/// An integral degree-2 class in the chosen lattice basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct H2Class(pub Vec<i64>);

impl H2Class {
    pub fn new(v: Vec<i64>) -> Self {
        Self(v)
    }

    pub fn zero(b2: usize) -> Self {
        Self(vec![0; b2])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|x| k * x).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// True when every coordinate is even.
    pub fn is_divisible_by_two(&self) -> bool {
        self.0.iter().all(|x| x % 2 == 0)
    }

    pub fn to_rational(&self) -> Vec<Q> {
        self.0.iter().map(|&x| q(x)).collect()
    }
}

impl fmt::Display for H2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFlags {
    #[serde(default, rename = "minus_K_effective")]
    pub minus_k_effective: bool,
    #[serde(default, rename = "K_torsion")]
    pub k_torsion: bool,
}

/// Intersection lattice, canonical class and 2-torsion count of a surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceData {
    gram: Vec<Vec<i64>>,
    canonical: H2Class,
    n2: u64,
    flags: SurfaceFlags,
    gram_inv: Vec<Vec<Q>>,
}

impl SurfaceData {
    pub fn new(
        gram: Vec<Vec<i64>>,
        canonical: H2Class,
        n2: u64,
        flags: SurfaceFlags,
    ) -> Result<Self> {
        let b2 = gram.len();
        if b2 == 0 {
            return Err(Error::InvalidSurface("b2 must be positive".into()));
        }
        for row in &gram {
            if row.len() != b2 {
                return Err(Error::DimensionMismatch {
                    expected: b2,
                    found: row.len(),
                });
            }
        }
        for i in 0..b2 {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if canonical.len() != b2 {
            return Err(Error::DimensionMismatch {
                expected: b2,
                found: canonical.len(),
            });
        }
        if n2 == 0 {
            return Err(Error::InvalidSurface(
                "n2 counts zero, so it must be >= 1".into(),
            ));
        }
        let rational: Vec<Vec<Q>> = gram
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        let (positive, negative) = inertia(&rational)?;
        if positive != 1 {
            return Err(Error::Signature { positive, negative });
        }
        let gram_inv = invert(&rational).ok_or(Error::Degenerate)?;
        for i in 0..b2 {
            let gk: i64 = (0..b2).map(|j| gram[i][j] * canonical.0[j]).sum();
            if (gram[i][i] - gk).rem_euclid(2) != 0 {
                return Err(Error::InvalidSurface(format!(
                    "K is not characteristic: e_{0}^2 and <e_{0}.K> differ in parity",
                    i + 1
                )));
            }
        }
        Ok(Self {
            gram,
            canonical,
            n2,
            flags,
            gram_inv,
        })
    }

    /// Convenience constructor without flags and with `n2 = 1`.
    pub fn simple(gram: Vec<Vec<i64>>, canonical: Vec<i64>) -> Result<Self> {
        Self::new(gram, H2Class(canonical), 1, SurfaceFlags::default())
    }

    /// `P^1 x P^1` with the hyperbolic form and `K = (-2, -2)`.
    pub fn p1xp1() -> Self {
        Self::simple(vec![vec![0, 1], vec![1, 0]], vec![-2, -2]).expect("valid lattice")
    }

    pub fn b2(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &[Vec<Q>] {
        &self.gram_inv
    }

    pub fn canonical(&self) -> &H2Class {
        &self.canonical
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn flags(&self) -> SurfaceFlags {
        self.flags
    }

    fn check(&self, x: &H2Class) -> Result<()> {
        if x.len() != self.b2() {
            return Err(Error::DimensionMismatch {
                expected: self.b2(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Intersection pairing `<x . y>`.
    pub fn pair(&self, x: &H2Class, y: &H2Class) -> Result<i64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pair_unchecked(x, y))
    }

    pub(crate) fn pair_unchecked(&self, x: &H2Class, y: &H2Class) -> i64 {
        let mut acc = 0;
        for (i, xi) in x.0.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.0.iter().enumerate() {
                acc += xi * self.gram[i][j] * yj;
            }
        }
        acc
    }

    /// Pairing of rational coordinate vectors.
    pub fn pair_q(&self, x: &[Q], y: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if self.gram[i][j] != 0 && !yj.is_zero() {
                    acc += xi * yj * q(self.gram[i][j]);
                }
            }
        }
        acc
    }

    pub fn square(&self, x: &H2Class) -> Result<i64> {
        self.pair(x, x)
    }

    pub fn k_squared(&self) -> i64 {
        self.pair_unchecked(&self.canonical, &self.canonical)
    }

    /// `s_2(S) = 2 K^2 - 12`, using `chi(O_S) = 1` and Noether's formula.
    pub fn s2(&self) -> i64 {
        2 * self.k_squared() - 12
    }

    /// Cup product in `H^{2*}(S, Q)`; everything above degree 4 vanishes.
    pub fn cup(&self, a: &MixedClass, b: &MixedClass) -> Result<MixedClass> {
        if a.r2.len() != self.b2() || b.r2.len() != self.b2() {
            return Err(Error::DimensionMismatch {
                expected: self.b2(),
                found: if a.r2.len() != self.b2() {
                    a.r2.len()
                } else {
                    b.r2.len()
                },
            });
        }
        Ok(self.cup_unchecked(a, b))
    }

    pub(crate) fn cup_unchecked(&self, a: &MixedClass, b: &MixedClass) -> MixedClass {
        let r0 = &a.r0 * &b.r0;
        let r2 =
            a.r2.iter()
                .zip(&b.r2)
                .map(|(x, y)| &a.r0 * y + &b.r0 * x)
                .collect();
        let r4 = &a.r0 * &b.r4 + &b.r0 * &a.r4 + self.pair_q(&a.r2, &b.r2);
        MixedClass { r0, r2, r4 }
    }

    /// `int_S a`, the coefficient of the point class.
    pub fn integrate(&self, a: &MixedClass) -> Q {
        a.r4.clone()
    }
}

/// Inertia `(n_+, n_-)` of a symmetric rational matrix, by symmetric
/// Gaussian elimination (Sylvester's law of inertia). Errors on degeneracy.
pub fn inertia(m: &[Vec<Q>]) -> Result<(usize, usize)> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        let pivot = (k..n).find(|&p| !a[p][p].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; fold an off-diagonal
                // entry onto the diagonal with a congruence `e_i <- e_i + e_j`
                let pair = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                let (i, j) = pair.ok_or(Error::Degenerate)?;
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] += v;
                }
                i
            }
        };
        a.swap(k, p);
        for row in a.iter_mut() {
            row.swap(k, p);
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
        for j in k + 1..n {
            a[k][j] = Q::zero();
        }
        for i in k + 1..n {
            a[i][k] = Q::zero();
        }
    }
    Ok((pos, neg))
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1) } else { Q::zero() }));
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&p| !a[p][k].is_zero())?;
        a.swap(k, p);
        let d = a[k][k].clone();
        for v in a[k].iter_mut() {
            *v /= &d;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..2 * n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// An element `r0 * 1 + r2 + r4 * pt` of `H^{2*}(S, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MixedClass {
    pub r0: Q,
    pub r2: Vec<Q>,
    pub r4: Q,
}

impl MixedClass {
    pub fn new(r0: Q, r2: Vec<Q>, r4: Q) -> Self {
        Self { r0, r2, r4 }
    }

    pub fn zero(b2: usize) -> Self {
        Self {
            r0: Q::zero(),
            r2: vec![Q::zero(); b2],
            r4: Q::zero(),
        }
    }

    pub fn one(b2: usize) -> Self {
        Self {
            r0: q(1),
            ..Self::zero(b2)
        }
    }

    pub fn point(b2: usize) -> Self {
        Self {
            r4: q(1),
            ..Self::zero(b2)
        }
    }

    pub fn from_h2(x: &H2Class) -> Self {
        Self {
            r0: Q::zero(),
            r2: x.to_rational(),
            r4: Q::zero(),
        }
    }

    /// `c0 * 1 + c2 * x + c4 * pt`.
    pub fn combo(b2: usize, c0: Q, c2: Q, x: &[Q], c4: Q) -> Self {
        debug_assert_eq!(x.len(), b2);
        Self {
            r0: c0,
            r2: x.iter().map(|v| v * &c2).collect(),
            r4: c4,
        }
    }

    pub fn b2(&self) -> usize {
        self.r2.len()
    }

    /// Coordinates in the basis `(1, e_1, .., e_b2, pt)`.
    pub fn coords(&self) -> Vec<Q> {
        let mut v = Vec::with_capacity(self.b2() + 2);
        v.push(self.r0.clone());
        v.extend(self.r2.iter().cloned());
        v.push(self.r4.clone());
        v
    }

    pub fn from_coords(c: &[Q]) -> Self {
        let n = c.len();
        Self {
            r0: c[0].clone(),
            r2: c[1..n - 1].to_vec(),
            r4: c[n - 1].clone(),
        }
    }

    pub fn basis(b2: usize, idx: usize) -> Self {
        let mut c = vec![Q::zero(); b2 + 2];
        c[idx] = q(1);
        Self::from_coords(&c)
    }

    pub fn is_zero(&self) -> bool {
        self.r0.is_zero() && self.r4.is_zero() && self.r2.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.r0 == q(1) && self.r4.is_zero() && self.r2.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            r0: &self.r0 + &o.r0,
            r2: self.r2.iter().zip(&o.r2).map(|(a, b)| a + b).collect(),
            r4: &self.r4 + &o.r4,
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            r0: &self.r0 * c,
            r2: self.r2.iter().map(|x| x * c).collect(),
            r4: &self.r4 * c,
        }
    }

    /// Homogeneous pieces as `(complex degree, scalar, class)`; the degree 0
    /// and 4 pieces are returned as multiples of `1` and `pt`.
    pub fn graded_parts(&self) -> Vec<(u32, Q, MixedClass)> {
        let b2 = self.b2();
        let mut out = Vec::new();
        if !self.r0.is_zero() {
            out.push((0, self.r0.clone(), Self::one(b2)));
        }
        if self.r2.iter().any(|x| !x.is_zero()) {
            out.push((
                1,
                q(1),
                Self {
                    r0: Q::zero(),
                    r2: self.r2.clone(),
                    r4: Q::zero(),
                },
            ));
        }
        if !self.r4.is_zero() {
            out.push((2, self.r4.clone(), Self::point(b2)));
        }
        out
    }

    /// Complex degree if homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        match self.graded_parts().as_slice() {
            [(d, _, _)] => Some(*d),
            _ => None,
        }
    }

    /// Lowest complex degree carried by a nonzero piece.
    pub fn min_degree(&self) -> Option<u32> {
        self.graded_parts().first().map(|p| p.0)
    }
}

impl fmt::Display for MixedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; ", self.r0)?;
        for (i, x) in self.r2.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "; {}]", self.r4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic() -> SurfaceData {
        SurfaceData::p1xp1()
    }

    #[test]
    fn pairing_examples() {
        let s = hyperbolic();
        assert_eq!(
            s.pair(&H2Class(vec![1, 0]), &H2Class(vec![0, 1])).unwrap(),
            1
        );
        assert_eq!(
            s.pair(&H2Class(vec![1, -1]), &H2Class(vec![1, -1]))
                .unwrap(),
            -2
        );
        assert_eq!(s.k_squared(), 8);
        assert_eq!(s.s2(), 4);
        assert_eq!(
            s.pair(&H2Class(vec![1]), &H2Class(vec![1, 0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn cup_examples() {
        let s = hyperbolic();
        let x = MixedClass::new(q(3), vec![q(1), q(-2)], q(5));
        assert_eq!(s.cup(&MixedClass::one(2), &x).unwrap(), x);
        let e1 = MixedClass::basis(2, 1);
        let e2 = MixedClass::basis(2, 2);
        assert_eq!(s.cup(&e1, &e2).unwrap(), MixedClass::point(2));
        assert_eq!(s.cup(&e1, &e1).unwrap(), MixedClass::zero(2));
        let pt = MixedClass::point(2);
        assert!(s.cup(&pt, &pt).unwrap().is_zero());
        assert!(s.cup(&x, &MixedClass::one(3)).is_err());
    }

    #[test]
    fn rejects_bad_grams() {
        assert_eq!(
            SurfaceData::simple(vec![vec![0, 1], vec![2, 0]], vec![0, 0]),
            Err(Error::NotSymmetric)
        );
        assert!(matches!(
            SurfaceData::simple(vec![vec![1, 0], vec![0, 1]], vec![1, 1]),
            Err(Error::Signature {
                positive: 2,
                negative: 0
            })
        ));
        assert!(matches!(
            SurfaceData::simple(vec![vec![-1]], vec![1]),
            Err(Error::Signature {
                positive: 0,
                negative: 1
            })
        ));
        assert_eq!(
            SurfaceData::simple(vec![vec![1, 1], vec![1, 1]], vec![1, 0]),
            Err(Error::Degenerate)
        );
        assert!(SurfaceData::simple(vec![vec![1]], vec![-3]).is_ok());
        assert!(matches!(
            SurfaceData::simple(vec![vec![1]], vec![-2]),
            Err(Error::InvalidSurface(_))
        ));
    }

    #[test]
    fn inertia_handles_zero_diagonal() {
        let m = vec![
            vec![q(0), q(1), q(0)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(0), q(-2)],
        ];
        assert_eq!(inertia(&m).unwrap(), (1, 2));
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(invert(&m).unwrap(), m);
        let m = vec![vec![q(2), q(1)], vec![q(1), q(-3)]];
        let inv = invert(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let v: Q = (0..2).map(|k| &m[i][k] * &inv[k][j]).sum();
                assert_eq!(v, if i == j { q(1) } else { q(0) });
            }
        }
    }
}
