//! Sparse multivariate polynomials over the rationals.
//!
//! Used for the symbolic side of the calculator: integrals and coefficient
//! identities that must hold for *all* values of `N`, `d`, `K^2`, `xi^2`, ...

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{q, Q};

/// Formal scalar variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// expected dimension `N`
    N,
    /// Hilbert-scheme length `d`
    D,
    /// number of `alpha` insertions `l`
    L,
    /// number of point insertions `r`
    R,
    /// `K_S^2`
    KSq,
    /// `xi^2`
    XiSq,
    /// `<xi . K_S>`
    XiK,
    /// `s_2(S)`
    S2,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::N => "N",
            Var::D => "d",
            Var::L => "l",
            Var::R => "r",
            Var::KSq => "K^2",
            Var::XiSq => "xi^2",
            Var::XiK => "xiK",
            Var::S2 => "s2",
        }
    }
}

/// Exponent vector, sorted by variable, no zero exponents.
pub type Monomial = Vec<(Var, u32)>;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<Var, u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *out.entry(v).or_insert(0) += e;
    }
    out.into_iter().collect()
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(q(c))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(v, 1)], Q::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::int(1), |acc, _| &acc * self)
    }

    /// Substitute `v := value` everywhere.
    pub fn substitute(&self, v: Var, value: &Poly) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut rest = Vec::new();
            let mut e = 0;
            for &(w, k) in m {
                if w == v {
                    e = k;
                } else {
                    rest.push((w, k));
                }
            }
            let mut term = Self::zero();
            term.add_term(rest, c.clone());
            out = &out + &(&term * &value.pow(e));
        }
        out
    }

    /// Evaluate with every variable assigned. Missing variables are an error.
    pub fn eval(&self, assign: &dyn Fn(Var) -> Option<Q>) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                t *= crate::arith::qpow(&assign(v)?, e);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Partial evaluation: substitute constants for the listed variables.
    pub fn eval_partial(&self, values: &[(Var, Q)]) -> Self {
        values.iter().fold(self.clone(), |p, (v, x)| {
            p.substitute(*v, &Poly::constant(x.clone()))
        })
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flatten().map(|&(v, _)| v).collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl From<Q> for Poly {
    fn from(c: Q) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::int(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_empty() || !c.is_one() {
                write!(f, "{c}")?;
            }
            for (j, &(v, e)) in m.iter().enumerate() {
                if j > 0 || !c.is_one() {
                    write!(f, "*")?;
                }
                if e == 1 {
                    write!(f, "{}", v.name())?;
                } else {
                    write!(f, "({})^{e}", v.name())?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Poly {
        Poly::var(x)
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let a = &v(Var::N) + &Poly::int(3);
        let b = &a * &a;
        let expanded = &(&(&v(Var::N) * &v(Var::N)) + &v(Var::N).scale(&q(6))) + &Poly::int(9);
        assert_eq!(b, expanded);
        assert!((&b - &expanded).is_zero());
    }

    #[test]
    fn substitution_and_evaluation() {
        let p = &v(Var::XiSq).scale(&q(6)) + &v(Var::N);
        let s = p.substitute(Var::XiSq, &(&v(Var::D).scale(&q(4)) - &v(Var::N)));
        assert_eq!(s, &v(Var::D).scale(&q(24)) - &v(Var::N).scale(&q(5)));
        let val = s.eval(&|x| match x {
            Var::D => Some(q(1)),
            Var::N => Some(q(2)),
            _ => None,
        });
        assert_eq!(val, Some(q(14)));
        assert_eq!(s.eval(&|_| None), None);
    }

    #[test]
    fn constants() {
        assert_eq!(Poly::int(0), Poly::zero());
        assert_eq!(Poly::int(5).as_constant(), Some(q(5)));
        assert_eq!(v(Var::D).as_constant(), None);
    }
}
