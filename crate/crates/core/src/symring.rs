//! The star-product ring `⊕_n H^{2*}(S^n, Q)^{S_n}`.
//!
//! A monomial `(a_1)_{i_1} * .. * (a_k)_{i_k} * 1^{*m}` is stored as the sorted
//! list of `(size, class)` factors together with the level; padding by `1` is
//! implicit. Factor classes may be mixed-degree; [`SymClass::expand`] applies
//! multilinearity to reach a normal form over homogeneous basis pieces.
//!
//! The same machinery runs over concrete classes ([`MixedClass`], rational
//! coefficients) and over symbolic classes ([`LinClass`], polynomial
//! coefficients in `xi^2`, `K^2`, ...).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, q, qpow, two_pow, Q};
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::surface::{H2Class, MixedClass, SurfaceData};
use crate::tensor::{diagonal_pushforward, TensorClass};

pub trait Coeff: Clone + PartialEq + Zero + fmt::Debug + fmt::Display + Send + Sync {
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn from_q(x: Q) -> Self;
}

impl Coeff for Q {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_q(x: Q) -> Self {
        x
    }
}

impl Coeff for Poly {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn from_q(x: Q) -> Self {
        Poly::constant(x)
    }
}

/// A class that can decorate a small diagonal.
pub trait Factor: Clone + Ord + fmt::Debug + fmt::Display + Send + Sync {
    type C: Coeff;
    fn is_one(&self) -> bool;
    fn is_zero(&self) -> bool;
    /// Decomposition `self = sum coef * piece` into homogeneous basis pieces,
    /// with the complex degree of each piece.
    fn pieces(&self) -> Vec<(Self::C, u32, Self)>;
    /// The point class in the same ambient space.
    fn point(&self) -> Self;
}

impl Factor for MixedClass {
    type C = Q;

    fn is_one(&self) -> bool {
        MixedClass::is_one(self)
    }

    fn is_zero(&self) -> bool {
        MixedClass::is_zero(self)
    }

    fn pieces(&self) -> Vec<(Q, u32, Self)> {
        let b2 = self.b2();
        let mut out = Vec::new();
        if !self.r0.is_zero() {
            out.push((self.r0.clone(), 0, MixedClass::one(b2)));
        }
        for (i, x) in self.r2.iter().enumerate() {
            if !x.is_zero() {
                out.push((x.clone(), 1, MixedClass::basis(b2, i + 1)));
            }
        }
        if !self.r4.is_zero() {
            out.push((self.r4.clone(), 2, MixedClass::point(b2)));
        }
        out
    }

    fn point(&self) -> Self {
        MixedClass::point(self.b2())
    }
}

/// A symbolic class `a*1 + b*xi + c*K + e*pt` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LinClass {
    pub one: Poly,
    pub xi: Poly,
    pub k: Poly,
    pub pt: Poly,
}

impl LinClass {
    pub fn new(one: Poly, xi: Poly, k: Poly, pt: Poly) -> Self {
        Self { one, xi, k, pt }
    }

    pub fn one() -> Self {
        Self {
            one: Poly::int(1),
            ..Self::default()
        }
    }

    pub fn xi() -> Self {
        Self {
            xi: Poly::int(1),
            ..Self::default()
        }
    }

    pub fn canonical() -> Self {
        Self {
            k: Poly::int(1),
            ..Self::default()
        }
    }

    pub fn pt() -> Self {
        Self {
            pt: Poly::int(1),
            ..Self::default()
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            one: &self.one + &o.one,
            xi: &self.xi + &o.xi,
            k: &self.k + &o.k,
            pt: &self.pt + &o.pt,
        }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self {
            one: f(&self.one),
            xi: f(&self.xi),
            k: f(&self.k),
            pt: f(&self.pt),
        }
    }

    /// `K -> -K`: flips the sign of the `K` part and of odd powers of `xiK`.
    pub fn flip_canonical(&self) -> Self {
        let flip = |p: &Poly| p.substitute(Var::XiK, &-Poly::var(Var::XiK));
        Self {
            one: flip(&self.one),
            xi: flip(&self.xi),
            k: -flip(&self.k),
            pt: flip(&self.pt),
        }
    }

    /// Concrete class for a given surface and `xi`.
    pub fn specialize(&self, surface: &SurfaceData, xi: &H2Class) -> MixedClass {
        let vals = scalar_values(surface, xi);
        let ev = |p: &Poly| {
            p.eval(&|v| vals.get(&v).cloned())
                .expect("only surface scalars appear in classes")
        };
        let (c_xi, c_k) = (ev(&self.xi), ev(&self.k));
        let r2 =
            xi.0.iter()
                .zip(&surface.canonical().0)
                .map(|(&x, &k)| &c_xi * q(x) + &c_k * q(k))
                .collect();
        MixedClass::new(ev(&self.one), r2, ev(&self.pt))
    }
}

/// Values of the scalar variables `xi^2`, `<xi.K>`, `K^2`, `s2` on a surface.
pub fn scalar_values(surface: &SurfaceData, xi: &H2Class) -> BTreeMap<Var, Q> {
    let k = surface.canonical();
    BTreeMap::from([
        (Var::XiSq, q(surface.pair_unchecked(xi, xi))),
        (Var::XiK, q(surface.pair_unchecked(xi, k))),
        (Var::KSq, q(surface.k_squared())),
        (Var::S2, q(surface.s2())),
    ])
}

impl fmt::Display for LinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (p, name) in [
            (&self.one, ""),
            (&self.xi, "xi"),
            (&self.k, "K"),
            (&self.pt, "pt"),
        ] {
            if p.is_zero() {
                continue;
            }
            if name.is_empty() {
                parts.push(format!("{p}"));
            } else if p.as_constant() == Some(q(1)) {
                parts.push(name.to_string());
            } else {
                parts.push(format!("({p}){name}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Factor for LinClass {
    type C = Poly;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn is_zero(&self) -> bool {
        self.one.is_zero() && self.xi.is_zero() && self.k.is_zero() && self.pt.is_zero()
    }

    fn pieces(&self) -> Vec<(Poly, u32, Self)> {
        [
            (&self.one, 0, Self::one()),
            (&self.xi, 1, Self::xi()),
            (&self.k, 1, Self::canonical()),
            (&self.pt, 2, Self::pt()),
        ]
        .into_iter()
        .filter(|(c, _, _)| !c.is_zero())
        .map(|(c, d, b)| (c.clone(), d, b))
        .collect()
    }

    fn point(&self) -> Self {
        Self::pt()
    }
}

/// A star monomial at a fixed level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymMonomial<F> {
    level: usize,
    factors: Vec<(usize, F)>,
}

impl<F: Factor> SymMonomial<F> {
    /// Canonicalizes: drops `(1)_1` factors, sorts by `(size, class)`.
    pub fn new(level: usize, factors: Vec<(usize, F)>) -> Result<Self> {
        if factors.iter().any(|(s, _)| *s == 0) {
            return Err(Error::Range("diagonal of size 0".into()));
        }
        let used: usize = factors.iter().map(|(s, _)| s).sum();
        if used > level {
            return Err(Error::Range(format!(
                "factors occupy {used} slots at level {level}"
            )));
        }
        Ok(Self {
            level,
            factors: canonical(factors),
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn factors(&self) -> &[(usize, F)] {
        &self.factors
    }

    pub fn padding(&self) -> usize {
        self.level - self.factors.iter().map(|(s, _)| s).sum::<usize>()
    }

    /// Complex codimension, defined when every factor is homogeneous:
    /// `(g)_j` contributes `2(j-1) + deg g`.
    pub fn codim(&self) -> Option<u32> {
        self.factors
            .iter()
            .map(|(j, g)| match g.pieces().as_slice() {
                [(_, deg, _)] => Some(2 * (*j as u32 - 1) + deg),
                _ => None,
            })
            .sum()
    }
}

fn canonical<F: Factor>(mut factors: Vec<(usize, F)>) -> Vec<(usize, F)> {
    factors.retain(|(s, f)| !(*s == 1 && f.is_one()));
    factors.sort();
    factors
}

impl<F: Factor> fmt::Display for SymMonomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|(s, c)| format!("({c})_{s}"))
            .collect();
        match self.padding() {
            0 => {}
            1 => parts.push("1".into()),
            p => parts.push(format!("1^{{*{p}}}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A finite linear combination of star monomials of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymClass<F: Factor> {
    level: usize,
    terms: BTreeMap<Vec<(usize, F)>, F::C>,
}

pub type ConcreteClass = SymClass<MixedClass>;
pub type SymbolicClass = SymClass<LinClass>;

impl<F: Factor> SymClass<F> {
    pub fn zero(level: usize) -> Self {
        Self {
            level,
            terms: BTreeMap::new(),
        }
    }

    /// `1^{*level}`, the neutral element at that level.
    pub fn one(level: usize) -> Self {
        let mut s = Self::zero(level);
        s.terms.insert(Vec::new(), F::C::from_q(q(1)));
        s
    }

    pub fn from_monomial(m: SymMonomial<F>, coef: F::C) -> Self {
        let mut s = Self::zero(m.level);
        s.add_term(m.factors, coef);
        s
    }

    /// `(a)_size` at level `size`.
    pub fn diag(a: F, size: usize) -> Self {
        assert!(size >= 1, "diagonal of size 0");
        let mut s = Self::zero(size);
        s.add_term(vec![(size, a)], F::C::from_q(q(1)));
        s
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, factors: Vec<(usize, F)>, coef: F::C) {
        if coef.is_zero() || factors.iter().any(|(_, f)| f.is_zero()) {
            return;
        }
        let key = canonical(factors);
        let next = match self.terms.get(&key) {
            Some(old) => old.plus(&coef),
            None => coef,
        };
        if next.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, next);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (SymMonomial<F>, &F::C)> + '_ {
        self.terms.iter().map(|(k, c)| {
            (
                SymMonomial {
                    level: self.level,
                    factors: k.clone(),
                },
                c,
            )
        })
    }

    pub fn coefficient(&self, m: &SymMonomial<F>) -> Option<&F::C> {
        if m.level != self.level {
            return None;
        }
        self.terms.get(&m.factors)
    }

    /// Sum; panics if the levels differ.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            self.level, other.level,
            "adding classes of different levels"
        );
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&F::C::from_q(q(-1))))
    }

    pub fn scale(&self, c: &F::C) -> Self {
        let mut out = Self::zero(self.level);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.times(c));
        }
        out
    }

    pub fn scale_q(&self, c: Q) -> Self {
        self.scale(&F::C::from_q(c))
    }

    pub fn star_mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.level + other.level);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut f = ka.clone();
                f.extend(kb.iter().cloned());
                out.add_term(f, ca.times(cb));
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(0), |acc, _| acc.star_mul(self))
    }

    /// Multilinear expansion of every factor into homogeneous basis pieces.
    pub fn expand(&self) -> Self {
        let mut out = Self::zero(self.level);
        for (k, c) in &self.terms {
            let mut partial: Vec<(Vec<(usize, F)>, F::C)> = vec![(Vec::new(), c.clone())];
            for (size, f) in k {
                let pieces = f.pieces();
                partial = partial
                    .into_iter()
                    .flat_map(|(fs, pc)| {
                        pieces.iter().map(move |(co, _, piece)| {
                            let mut fs = fs.clone();
                            fs.push((*size, piece.clone()));
                            (fs, pc.times(co))
                        })
                    })
                    .collect();
            }
            for (fs, pc) in partial {
                out.add_term(fs, pc);
            }
        }
        out
    }

    /// Expanded form restricted to monomials of complex codimension `<= max`.
    pub fn truncate(&self, max: u32) -> Self {
        let e = self.expand();
        let mut out = Self::zero(self.level);
        for (m, c) in e.terms() {
            if m.codim().is_some_and(|k| k <= max) {
                out.add_term(m.factors, c.clone());
            }
        }
        out
    }

    /// Replaces each `(beta)_j` with `beta` of complex degree `i` by
    /// `j^{2-i} beta * pt^{*(j-1)}`. Preserves integrals against pure
    /// `alpha-bar^l` weights only.
    pub fn reduce_diagonal(&self) -> Self {
        let e = self.expand();
        let mut out = Self::zero(self.level);
        for (k, c) in &e.terms {
            let mut coef = c.clone();
            let mut fs = Vec::new();
            for (j, f) in k {
                let (_, deg, _) = f.pieces().pop().expect("expanded factors are nonzero");
                let j = *j as i64;
                coef = coef.times(&F::C::from_q(qpow(&q(j), 2 - deg)));
                fs.push((1, f.clone()));
                for _ in 1..j {
                    fs.push((1, f.point()));
                }
            }
            out.add_term(fs, coef);
        }
        out
    }

    pub fn map_coefficients<G: Factor>(
        &self,
        level: usize,
        mut f: impl FnMut(&[(usize, F)], &F::C) -> Vec<(Vec<(usize, G)>, G::C)>,
    ) -> SymClass<G> {
        let mut out = SymClass::zero(level);
        for (k, c) in &self.terms {
            for (fs, v) in f(k, c) {
                out.add_term(fs, v);
            }
        }
        out
    }
}

impl<F: Factor> fmt::Display for SymClass<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, "\n  + ")?;
            }
            write!(f, "[{c}] {m}")?;
        }
        Ok(())
    }
}

impl SymbolicClass {
    /// Evaluate all scalars on a surface and map `xi`, `K` to actual classes.
    pub fn specialize(&self, surface: &SurfaceData, xi: &H2Class) -> ConcreteClass {
        let vals = scalar_values(surface, xi);
        self.map_coefficients(self.level, |k, c| {
            let coef = c
                .eval(&|v| vals.get(&v).cloned())
                .expect("only surface scalars appear in coefficients");
            let fs = k
                .iter()
                .map(|(s, g)| (*s, g.specialize(surface, xi)))
                .collect();
            vec![(fs, coef)]
        })
    }
}

/// The weight `alpha-bar^b * pt-bar^c` pulled back to `S^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: H2Class,
    pub b: usize,
    pub c: usize,
}

impl WeightSpec {
    pub fn new(alpha: H2Class, b: usize, c: usize) -> Self {
        Self { alpha, b, c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCaps {
    pub max_level: usize,
    pub max_b2: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self {
            max_level: 5,
            max_b2: 4,
        }
    }
}

/// Brute-force integration over `S^d` in the dense Künneth model.
pub struct Oracle<'a> {
    surface: &'a SurfaceData,
    caps: OracleCaps,
}

impl<'a> Oracle<'a> {
    pub fn new(surface: &'a SurfaceData) -> Self {
        Self {
            surface,
            caps: OracleCaps::default(),
        }
    }

    pub fn with_caps(surface: &'a SurfaceData, caps: OracleCaps) -> Self {
        Self { surface, caps }
    }

    fn check(&self, level: usize) -> Result<()> {
        if level > self.caps.max_level {
            return Err(Error::LevelTooLarge {
                level,
                cap: self.caps.max_level,
            });
        }
        if self.surface.b2() > self.caps.max_b2 {
            return Err(Error::RankTooLarge {
                b2: self.surface.b2(),
                cap: self.caps.max_b2,
            });
        }
        Ok(())
    }

    /// `P^{⊗d}(alpha-bar^b pt-bar^c)`, ready to be dotted with monomial tensors.
    pub fn weight_covector(&self, w: &WeightSpec, d: usize) -> Result<TensorClass> {
        self.check(d)?;
        let b2 = self.surface.b2();
        if w.alpha.len() != b2 {
            return Err(Error::DimensionMismatch {
                expected: b2,
                found: w.alpha.len(),
            });
        }
        let alpha = MixedClass::from_h2(&w.alpha);
        let pt = MixedClass::point(b2);
        let mut t = TensorClass::unit(b2 + 2, d);
        for _ in 0..w.b {
            t = t.mul_pullback_sum(self.surface, &alpha);
        }
        for _ in 0..w.c {
            t = t.mul_pullback_sum(self.surface, &pt);
        }
        Ok(t.dual(self.surface))
    }

    /// Monomial placed in consecutive slot blocks, padding slots last.
    pub fn monomial_tensor(&self, m: &SymMonomial<MixedClass>) -> Result<TensorClass> {
        self.check(m.level())?;
        let dim = self.surface.b2() + 2;
        let mut t = TensorClass::unit(dim, 0);
        for (size, a) in m.factors() {
            if a.b2() != self.surface.b2() {
                return Err(Error::DimensionMismatch {
                    expected: self.surface.b2(),
                    found: a.b2(),
                });
            }
            t = t.tensor(&diagonal_pushforward(self.surface, a, *size));
        }
        Ok(t.tensor(&TensorClass::unit(dim, m.padding())))
    }

    pub fn integrate_monomial(&self, m: &SymMonomial<MixedClass>, w: &WeightSpec) -> Result<Q> {
        let cov = self.weight_covector(w, m.level())?;
        Ok(self.monomial_tensor(m)?.dot(&cov))
    }

    /// Integral of a whole class; monomials run in parallel and are summed in
    /// canonical order.
    pub fn integrate(&self, class: &ConcreteClass, w: &WeightSpec) -> Result<Q> {
        let cov = self.weight_covector(w, class.level())?;
        let monos: Vec<(SymMonomial<MixedClass>, Q)> =
            class.terms().map(|(m, c)| (m, c.clone())).collect();
        let parts: Vec<Q> = monos
            .par_iter()
            .map(|(m, c)| self.monomial_tensor(m).map(|t| t.dot(&cov) * c))
            .collect::<Result<_>>()?;
        Ok(parts.into_iter().fold(Q::zero(), |a, b| a + b))
    }

    /// Slow meta-check: averages the monomial over every slot placement.
    pub fn integrate_symmetrized(&self, m: &SymMonomial<MixedClass>, w: &WeightSpec) -> Result<Q> {
        const CAP: usize = 3;
        if m.level() > CAP {
            return Err(Error::LevelTooLarge {
                level: m.level(),
                cap: CAP,
            });
        }
        let t = self.monomial_tensor(m)?;
        let cov = self.weight_covector(w, m.level())?;
        let perms = permutations(m.level());
        let mut sym = TensorClass::zero(t.dim(), t.level());
        for p in &perms {
            sym = sym.add(&t.permute(p));
        }
        let n = perms.len() as i64;
        Ok(sym.scale(&Q::new(1.into(), n.into())).dot(&cov))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut p = p.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Oracle integral with default caps.
pub fn integrate_oracle(
    surface: &SurfaceData,
    m: &SymMonomial<MixedClass>,
    w: &WeightSpec,
) -> Result<Q> {
    Oracle::new(surface).integrate_monomial(m, w)
}

/// `xi^{*x} * pt^{*y} * 1^{*(d-x-y)}`.
pub fn xi_pt_monomial(
    surface: &SurfaceData,
    xi: &H2Class,
    d: usize,
    x: usize,
    y: usize,
) -> Result<SymMonomial<MixedClass>> {
    let b2 = surface.b2();
    let mut fs = vec![(1, MixedClass::from_h2(xi)); x];
    fs.extend(std::iter::repeat_n((1, MixedClass::point(b2)), y));
    SymMonomial::new(d, fs)
}

/// Closed form of `∫ xi^{*x} pt^{*y} 1^{*(d-x-y)} · alpha-bar^b pt-bar^c`.
pub fn integrate_closed(
    surface: &SurfaceData,
    xi: &H2Class,
    d: usize,
    x: usize,
    y: usize,
    w: &WeightSpec,
) -> Result<Q> {
    if x + y > d {
        return Err(Error::DegreeMismatch(format!(
            "x + y = {} exceeds d = {d}",
            x + y
        )));
    }
    let free = d - x - y;
    if w.c > free {
        return Err(Error::DegreeMismatch(format!(
            "c = {} exceeds d - x - y = {free}",
            w.c
        )));
    }
    let expected = 2 * d as i64 - 2 * w.c as i64 - x as i64 - 2 * y as i64;
    if w.b as i64 != expected {
        return Err(Error::DegreeMismatch(format!(
            "b = {} but the degrees require {expected}",
            w.b
        )));
    }
    let qa = q(surface.pair(&w.alpha, &w.alpha)?);
    let la = q(surface.pair(xi, &w.alpha)?);
    let e = free - w.c;
    let falling = Q::from_integer(factorial(free as u64) / factorial(e as u64));
    Ok(falling
        * Q::from_integer(factorial(w.b as u64))
        * two_pow(-(e as i64))
        * qpow(&qa, e as u32)
        * qpow(&la, x as u32))
}

/// Checks `∫(1)_2 1^{*(d-2)} · pt-bar alpha-bar^{2d-4} = (4d-6)/(d-1) ∫ pt*1^{*(d-1)} · (same)`,
/// oracle on the left and closed form on the right, returning the common value.
pub fn special_pt_reduction(surface: &SurfaceData, alpha: &H2Class, d: usize) -> Result<Q> {
    if d < 2 {
        return Err(Error::Range(format!("d = {d} must be at least 2")));
    }
    let w = WeightSpec::new(alpha.clone(), 2 * d - 4, 1);
    let b2 = surface.b2();
    let left = integrate_oracle(
        surface,
        &SymMonomial::new(d, vec![(2, MixedClass::one(b2))])?,
        &w,
    )?;
    let xi = H2Class::zero(b2);
    let right = Q::new((4 * d as i64 - 6).into(), (d as i64 - 1).into())
        * integrate_closed(surface, &xi, d, 0, 1, &w)?;
    if left != right {
        return Err(Error::IdentityViolation(format!(
            "point reduction at d = {d}: {left} != {right}"
        )));
    }
    Ok(left)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> SurfaceData {
        SurfaceData::p1xp1()
    }

    fn mc(r0: i64, r2: &[i64], r4: i64) -> MixedClass {
        MixedClass::new(q(r0), r2.iter().map(|&x| q(x)).collect(), q(r4))
    }

    #[test]
    fn unit_padding() {
        let x = SymClass::diag(mc(1, &[1, 0], 0), 2);
        let padded = SymClass::one(3).star_mul(&x);
        assert_eq!(padded.level(), 5);
        let (m, c) = padded.terms().next().unwrap();
        assert_eq!(m.padding(), 3);
        assert_eq!(*c, q(1));
        assert_eq!(
            SymClass::<MixedClass>::one(2),
            SymClass::diag(MixedClass::one(2), 1).pow(2)
        );
    }

    #[test]
    fn commutative_factors() {
        let a = SymClass::diag(mc(1, &[1, 0], 0), 2);
        let b = SymClass::diag(mc(0, &[0, 1], 3), 2);
        assert_eq!(a.star_mul(&b), b.star_mul(&a));
    }

    #[test]
    fn oracle_small_examples() {
        let s = s();
        let xi = H2Class(vec![-1, 1]);
        let alpha = H2Class(vec![2, 3]);
        let w = WeightSpec::new(alpha.clone(), 1, 0);
        let m = xi_pt_monomial(&s, &xi, 1, 1, 0).unwrap();
        assert_eq!(
            integrate_oracle(&s, &m, &w).unwrap(),
            q(s.pair(&xi, &alpha).unwrap())
        );
        let qa = q(s.pair(&alpha, &alpha).unwrap());
        let w4 = WeightSpec::new(alpha.clone(), 4, 0);
        let one2 = SymMonomial::new(2, vec![]).unwrap();
        assert_eq!(integrate_oracle(&s, &one2, &w4).unwrap(), q(6) * &qa * &qa);
        // restricting alpha-bar to the diagonal gives 2 alpha
        let diag = SymMonomial::new(2, vec![(2, MixedClass::one(2))]).unwrap();
        let w2 = WeightSpec::new(alpha, 2, 0);
        assert_eq!(integrate_oracle(&s, &diag, &w2).unwrap(), q(4) * qa);
    }

    #[test]
    fn closed_form_examples() {
        let s = s();
        let xi = H2Class(vec![-1, 1]);
        let alpha = H2Class(vec![2, 3]);
        let l = q(s.pair(&xi, &alpha).unwrap());
        assert_eq!(
            integrate_closed(&s, &xi, 1, 1, 0, &WeightSpec::new(alpha.clone(), 1, 0)).unwrap(),
            l
        );
        assert_eq!(
            integrate_closed(&s, &xi, 2, 1, 1, &WeightSpec::new(alpha.clone(), 1, 0)).unwrap(),
            l
        );
        assert!(matches!(
            integrate_closed(&s, &xi, 2, 1, 1, &WeightSpec::new(alpha, 2, 0)),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn reduce_diagonal_examples() {
        let b = mc(0, &[1, 2], 0);
        assert_eq!(
            SymClass::diag(b.clone(), 1).reduce_diagonal(),
            SymClass::diag(b.clone(), 1).expand()
        );
        let expected = SymClass::diag(b, 1)
            .star_mul(&SymClass::diag(MixedClass::point(2), 1))
            .scale_q(q(2))
            .expand();
        assert_eq!(
            SymClass::diag(mc(0, &[1, 2], 0), 2).reduce_diagonal(),
            expected
        );
        let one = SymClass::diag(MixedClass::one(2), 2).reduce_diagonal();
        assert_eq!(
            one,
            SymClass::one(1)
                .star_mul(&SymClass::diag(MixedClass::point(2), 1))
                .scale_q(q(4))
        );
    }

    #[test]
    fn point_reduction_at_two() {
        assert_eq!(
            special_pt_reduction(&s(), &H2Class(vec![1, 0]), 2).unwrap(),
            q(2)
        );
    }

    #[test]
    fn symmetrized_oracle_agrees() {
        let s = s();
        let m = SymMonomial::new(3, vec![(2, mc(1, &[1, -1], 2)), (1, mc(0, &[2, 1], 0))]).unwrap();
        let w = WeightSpec::new(H2Class(vec![1, 2]), 3, 1);
        let o = Oracle::new(&s);
        assert_eq!(
            o.integrate_symmetrized(&m, &w).unwrap(),
            o.integrate_monomial(&m, &w).unwrap()
        );
    }

    #[test]
    fn oracle_caps() {
        let s = s();
        let m = SymMonomial::<MixedClass>::new(6, vec![]).unwrap();
        let w = WeightSpec::new(H2Class(vec![1, 0]), 12, 0);
        assert_eq!(
            integrate_oracle(&s, &m, &w),
            Err(Error::LevelTooLarge { level: 6, cap: 5 })
        );
    }
}
