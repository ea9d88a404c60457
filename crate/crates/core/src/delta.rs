//! The change `delta_{xi,l,r}` of the Donaldson invariants across a wall.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, factorial, inv_factorial, q, qpow, sign_pow, two_pow, Q};
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::segre::R_class;
use crate::surface::{H2Class, SurfaceData};
use crate::symring::{Oracle, WeightSpec};
use crate::walls::{enumerate_separating_classes, ChernData, Goodness, WallClass};

fn v(x: Var) -> Poly {
    Poly::var(x)
}

fn lin(terms: &[(i64, Poly)]) -> Poly {
    terms
        .iter()
        .fold(Poly::zero(), |acc, (c, m)| &acc + &m.scale(&q(*c)))
}

fn one() -> Poly {
    Poly::int(1)
}

/// `P_k(N, d, K^2, xi^2)` for `k = 0, 1, 2`.
pub fn p_poly(k: usize) -> Poly {
    let (n, d, ks, xs) = (v(Var::N), v(Var::D), v(Var::KSq), v(Var::XiSq));
    match k {
        0 => one(),
        1 => lin(&[(8, n), (-26, d), (6, xs), (2, ks), (26, one())]),
        2 => lin(&[
            (18, &xs * &xs),
            (12, &xs * &ks),
            (2, &ks * &ks),
            (48, &n * &xs),
            (-156, &d * &xs),
            (-52, &d * &ks),
            (338, &d * &d),
            (16, &ks * &n),
            (32, &n * &n),
            (-208, &d * &n),
            (207, xs),
            (54, ks),
            (264, n),
            (-882, d),
            (508, one()),
        ]),
        _ => panic!("P_{k} is not defined"),
    }
}

/// `Q_k(N, d, K^2)` for `k = 0, 1, 2`.
pub fn q_poly(k: usize) -> Poly {
    let (n, d, ks) = (v(Var::N), v(Var::D), v(Var::KSq));
    match k {
        0 => one(),
        1 => lin(&[(2, n), (2, ks), (-2, d), (8, one())]),
        2 => lin(&[
            (2, &n * &n),
            (-4, &d * &n),
            (4, &n * &ks),
            (21, n),
            (2, &d * &d),
            (-4, &d * &ks),
            (-18, d),
            (2, &ks * &ks),
            (18, ks),
            (49, one()),
        ]),
        _ => panic!("Q_{k} is not defined"),
    }
}

/// `Q_{m,c}(l, d, K^2, xi^2) = P_m(l, d, K^2, xi^2) + 21mc` with `l` in place of `N`.
pub fn q_mc_poly(m: usize, c: usize) -> Result<Poly> {
    if m + c > 2 {
        return Err(Error::Range(format!("Q_{{{m},{c}}} needs m + c <= 2")));
    }
    Ok(&p_poly(m).substitute(Var::N, &v(Var::L)) + &Poly::int(21 * (m * c) as i64))
}

/// Expansions of `Q_{m,c}` after `xi^2 = 4d - 2r - l - 3`, as printed.
pub fn printed_q_mc(m: usize, c: usize) -> Option<Poly> {
    let (l, d, r, ks) = (v(Var::L), v(Var::D), v(Var::R), v(Var::KSq));
    Some(match (m, c) {
        (0, 0..=2) => one(),
        (1, 0) => lin(&[(2, l), (-2, d), (-12, r), (2, ks), (8, one())]),
        (1, 1) => lin(&[(2, l), (-2, d), (-12, r), (2, ks), (29, one())]),
        (2, 0) => lin(&[
            (72, &r * &r),
            (-24, &r * &l),
            (24, &d * &r),
            (-24, &ks * &r),
            (2, &l * &l),
            (-4, &d * &l),
            (4, &ks * &l),
            (2, &d * &d),
            (-4, &d * &ks),
            (2, &ks * &ks),
            (-198, r),
            (21, l),
            (-18, d),
            (18, ks),
            (49, one()),
        ]),
        _ => return None,
    })
}

fn eval4(p: &Poly, n: &Q, d: &Q, ksq: &Q, xisq: &Q) -> Q {
    p.eval(&|x| match x {
        Var::N | Var::L => Some(n.clone()),
        Var::D => Some(d.clone()),
        Var::KSq => Some(ksq.clone()),
        Var::XiSq => Some(xisq.clone()),
        _ => None,
    })
    .expect("P and Q only involve N, d, K^2, xi^2")
}

pub fn p_polys(n: &Q, d: &Q, ksq: &Q, xisq: &Q) -> [Q; 3] {
    [0, 1, 2].map(|k| eval4(&p_poly(k), n, d, ksq, xisq))
}

pub fn q_polys(n: &Q, d: &Q, ksq: &Q) -> [Q; 3] {
    [0, 1, 2].map(|k| eval4(&q_poly(k), n, d, ksq, &Q::zero()))
}

pub fn q_mc(m: usize, c: usize, l: &Q, d: &Q, ksq: &Q, xisq: &Q) -> Result<Q> {
    Ok(eval4(&q_mc_poly(m, c)?, l, d, ksq, xisq))
}

/// `P_k(N, d, K^2, 4d - N - 3) = Q_k(N, d, K^2)` for a given table of `Q_k`.
pub fn check_p_to_q_with(q_table: &[Poly; 3]) -> Result<()> {
    let sub = lin(&[(4, v(Var::D)), (-1, v(Var::N)), (-3, one())]);
    for (k, qk) in q_table.iter().enumerate() {
        let lhs = p_poly(k).substitute(Var::XiSq, &sub);
        if &lhs != qk {
            return Err(Error::IdentityViolation(format!(
                "P_{k}(xi^2 = 4d-N-3) - Q_{k} = {}",
                &lhs - qk
            )));
        }
    }
    Ok(())
}

pub fn check_p_to_q() -> Result<()> {
    check_p_to_q_with(&[q_poly(0), q_poly(1), q_poly(2)])
}

/// Every printed expansion of `Q_{m,c}` under `xi^2 = 4d - 2r - l - 3`.
pub fn check_q_mc_expansions() -> Result<()> {
    let sub = lin(&[
        (4, v(Var::D)),
        (-2, v(Var::R)),
        (-1, v(Var::L)),
        (-3, one()),
    ]);
    for (m, c) in [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)] {
        let lhs = q_mc_poly(m, c)?.substitute(Var::XiSq, &sub);
        let printed = printed_q_mc(m, c).expect("tabulated");
        if lhs != printed {
            return Err(Error::IdentityViolation(format!(
                "Q_{{{m},{c}}} expansion is off by {}",
                &lhs - &printed
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::arith::serde_q")]
    pub coef: Q,
    #[serde(rename = "powL")]
    pub pow_l: u32,
    #[serde(rename = "powQ")]
    pub pow_q: u32,
}

/// `sum coef * L_{xi/2}^{powL} * q_S^{powQ}`, known modulo `L^{modulus}`.
/// Terms are ordered by decreasing `powL`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCrossingPolynomial {
    pub terms: Vec<Term>,
    /// Exponent `N - 2d + 6` of the truncation modulus.
    pub modulus: i64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Q,
    pub exact: bool,
}

impl Evaluation {
    pub fn label(&self) -> &'static str {
        if self.exact {
            "exact"
        } else {
            "leading-order"
        }
    }
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.label())
    }
}

impl WallCrossingPolynomial {
    fn from_map(map: BTreeMap<(u32, u32), Q>, modulus: i64, exact: bool) -> Self {
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|((pow_l, pow_q), coef)| Term { coef, pow_l, pow_q })
            .collect();
        Self {
            terms,
            modulus,
            exact,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `L = <xi,alpha>/2`, `q = alpha^2`.
    pub fn evaluate_at(&self, l_half: &Q, q_alpha: &Q) -> Q {
        self.terms
            .iter()
            .map(|t| &t.coef * qpow(l_half, t.pow_l) * qpow(q_alpha, t.pow_q))
            .sum()
    }

    pub fn evaluate(
        &self,
        surface: &SurfaceData,
        xi: &H2Class,
        alpha: &H2Class,
    ) -> Result<Evaluation> {
        let l_half = Q::new(surface.pair(xi, alpha)?.into(), 2.into());
        let qa = q(surface.pair(alpha, alpha)?);
        Ok(Evaluation {
            value: self.evaluate_at(&l_half, &qa),
            exact: self.exact,
        })
    }
}

impl fmt::Display for WallCrossingPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coef)?;
            if t.pow_l > 0 {
                write!(f, "*L^{}", t.pow_l)?;
            }
            if t.pow_q > 0 {
                write!(f, "*q^{}", t.pow_q)?;
            }
        }
        if !self.exact {
            write!(f, "  mod L^{}", self.modulus)?;
        }
        Ok(())
    }
}

fn check_weight(n: i64, l: i64, r: i64) -> Result<()> {
    if l < 0 || r < 0 || l + 2 * r != n {
        return Err(Error::WeightMismatch { l, r, n });
    }
    Ok(())
}

/// The leading-order formula from raw invariants: `l`, `r`, `d`, `e`, `K^2`, `xi^2`.
pub fn delta_leading_raw(
    l: i64,
    r: i64,
    d: i64,
    e: i64,
    ksq: &Q,
    xisq: &Q,
) -> Result<WallCrossingPolynomial> {
    if l < 0 || r < 0 || d < 0 {
        return Err(Error::Range(format!(
            "l = {l}, r = {r}, d = {d} must be nonnegative"
        )));
    }
    let n = l + 2 * r;
    let lq = q(l);
    let dq = q(d);
    let lfact = Q::from_integer(factorial(l as u64));
    let mut map: BTreeMap<(u32, u32), Q> = BTreeMap::new();
    for c in 0..=r.min(2) {
        let pre = q(sign_pow(r - c + e)) * two_pow(3 * c - 2 * r) * Q::from_integer(binomial(r, c));
        for k in c..=2 {
            let (pl, pq) = (l - 2 * d + 2 * k, d - k);
            if pl < 0 || pq < 0 {
                continue;
            }
            let coef = &pre
                * &lfact
                * inv_factorial(pl)
                * inv_factorial(pq)
                * q_mc((k - c) as usize, c as usize, &lq, &dq, ksq, xisq)?;
            *map.entry((pl as u32, pq as u32)).or_insert_with(Q::zero) += coef;
        }
    }
    Ok(WallCrossingPolynomial::from_map(map, n - 2 * d + 6, d <= 2))
}

/// `(-1)^e sum_k N!/((N-2d+2k)!(d-k)!) Q_k(N,d,K^2) L^{N-2d+2k} q^{d-k}`.
pub fn delta_r0(n: i64, d: i64, e: i64, ksq: &Q) -> WallCrossingPolynomial {
    let nq = q(n);
    let dq = q(d);
    let qs = q_polys(&nq, &dq, ksq);
    let nfact = Q::from_integer(factorial(n.max(0) as u64));
    let mut map = BTreeMap::new();
    for k in 0..=2 {
        let (pl, pq) = (n - 2 * d + 2 * k, d - k);
        if pl < 0 || pq < 0 {
            continue;
        }
        let coef =
            q(sign_pow(e)) * &nfact * inv_factorial(pl) * inv_factorial(pq) * &qs[k as usize];
        map.insert((pl as u32, pq as u32), coef);
    }
    WallCrossingPolynomial::from_map(map, n - 2 * d + 6, d <= 2)
}

pub fn delta_leading(
    surface: &SurfaceData,
    chern: &ChernData,
    wall: &WallClass,
    l: i64,
    r: i64,
) -> Result<WallCrossingPolynomial> {
    check_weight(chern.expected_dim(surface), l, r)?;
    delta_leading_raw(
        l,
        r,
        wall.d,
        wall.e,
        &q(surface.k_squared()),
        &q(wall.xi_sq),
    )
}

/// The defining double sum with every Segre integral computed as
/// `(1/d!) ∫_{S^d} R_d · alpha-bar^b pt-bar^c` by the tensor oracle.
pub fn delta_exact_small_d(
    surface: &SurfaceData,
    chern: &ChernData,
    wall: &WallClass,
    l: i64,
    r: i64,
    alpha: &H2Class,
) -> Result<Q> {
    let n = chern.expected_dim(surface);
    check_weight(n, l, r)?;
    if wall.d > 2 {
        return Err(Error::DTooLarge(wall.d));
    }
    let d = wall.d as usize;
    let rd = R_class(surface, &wall.xi, d);
    let oracle = Oracle::new(surface);
    let la = q(surface.pair(&wall.xi, alpha)?);
    let inv_dfact = Q::new(1.into(), factorial(d as u64));
    let mut total = Q::zero();
    for c in 0..=r.min(d as i64) {
        for b in 0..=l.min(2 * d as i64 - 2 * c) {
            let integral =
                oracle.integrate(&rd, &WeightSpec::new(alpha.clone(), b as usize, c as usize))?;
            if integral.is_zero() {
                continue;
            }
            total += q(sign_pow(r - c + wall.e))
                * two_pow(b + 2 * c - n)
                * Q::from_integer(binomial(l, b) * binomial(r, c))
                * qpow(&la, (l - b) as u32)
                * &inv_dfact
                * integral;
        }
    }
    Ok(total)
}

/// `(-1)^{c1^2 + <c1.K>}`.
pub fn donaldson_sign(surface: &SurfaceData, chern: &ChernData) -> i64 {
    let c1 = &chern.c1;
    sign_pow(surface.pair_unchecked(c1, c1) + surface.pair_unchecked(c1, surface.canonical()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallContribution {
    pub wall: WallClass,
    pub delta: WallCrossingPolynomial,
}

impl WallContribution {
    pub fn certified(&self) -> bool {
        self.wall.goodness == Goodness::CertifiedGood
    }
}

/// `Phi_{H+,l,r} - Phi_{H-,l,r} = n2 * sum_{xi in A+} delta_{xi,l,r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalChange {
    pub contributions: Vec<WallContribution>,
    pub n2: u64,
    pub sign: i64,
    pub l: i64,
    pub r: i64,
}

impl TotalChange {
    pub fn evaluate(&self, surface: &SurfaceData, alpha: &H2Class) -> Result<Evaluation> {
        let mut value = Q::zero();
        let mut exact = true;
        for c in &self.contributions {
            let ev = c.delta.evaluate(surface, &c.wall.xi, alpha)?;
            value += ev.value;
            exact &= ev.exact;
        }
        Ok(Evaluation {
            value: value * q(self.n2 as i64),
            exact,
        })
    }
}

pub fn total_change(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
    l: i64,
    r: i64,
) -> Result<TotalChange> {
    check_weight(chern.expected_dim(surface), l, r)?;
    let walls = enumerate_separating_classes(surface, chern, h_minus, h_plus)?;
    let contributions = walls
        .into_par_iter()
        .map(|wall| {
            delta_leading(surface, chern, &wall, l, r).map(|delta| WallContribution { wall, delta })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TotalChange {
        contributions,
        n2: surface.n2(),
        sign: donaldson_sign(surface, chern),
        l,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    fn p1_wall() -> (SurfaceData, ChernData, WallClass) {
        let s = SurfaceData::p1xp1();
        let c = ChernData::new(vec![1, 1], 2);
        let w = enumerate_separating_classes(&s, &c, &H2Class(vec![1, 2]), &H2Class(vec![2, 1]))
            .unwrap()
            .remove(0);
        (s, c, w)
    }

    #[test]
    fn printed_values() {
        let p = p_polys(&q(3), &q(1), &q(8), &q(-2));
        assert_eq!(p[0], q(1));
        assert_eq!(p[1], q(28));
        let qs = q_polys(&q(3), &q(1), &q(8));
        assert_eq!(
            (qs[0].clone(), qs[1].clone(), qs[2].clone()),
            (q(1), q(28), q(438))
        );
        for c in 0..=2 {
            assert_eq!(q_mc(0, c, &q(5), &q(2), &q(8), &q(-3)).unwrap(), q(1));
        }
        assert!(matches!(
            q_mc(2, 1, &q(1), &q(1), &q(1), &q(1)),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn symbolic_identities() {
        check_p_to_q().unwrap();
        check_q_mc_expansions().unwrap();
        let broken = [q_poly(0), q_poly(1), &q_poly(2) + &Poly::int(1)];
        assert!(check_p_to_q_with(&broken).is_err());
    }

    #[test]
    fn p1xp1_leading() {
        let (s, c, w) = p1_wall();
        let p = delta_leading(&s, &c, &w, 3, 0).unwrap();
        assert_eq!(
            p.terms,
            vec![
                Term {
                    coef: q(-28),
                    pow_l: 3,
                    pow_q: 0
                },
                Term {
                    coef: q(-6),
                    pow_l: 1,
                    pow_q: 1
                }
            ]
        );
        assert!(p.exact);
        let ev = p.evaluate(&s, &w.xi, &H2Class(vec![1, 0])).unwrap();
        assert_eq!(ev.value, frac(-7, 2));
        assert_eq!(
            p.evaluate(&s, &w.xi, &H2Class(vec![1, 1])).unwrap().value,
            q(0)
        );
        assert!(matches!(
            delta_leading(&s, &c, &w, 2, 1),
            Err(Error::WeightMismatch { .. })
        ));
    }

    #[test]
    fn p1xp1_exact() {
        let (s, c, w) = p1_wall();
        assert_eq!(
            delta_exact_small_d(&s, &c, &w, 3, 0, &H2Class(vec![1, 0])).unwrap(),
            frac(-7, 2)
        );
        assert_eq!(
            delta_exact_small_d(&s, &c, &w, 3, 0, &H2Class(vec![1, 1])).unwrap(),
            q(0)
        );
        assert_eq!(
            delta_exact_small_d(&s, &c, &w, 1, 1, &H2Class(vec![1, 0])).unwrap(),
            frac(1, 2)
        );
        let p = delta_leading(&s, &c, &w, 1, 1).unwrap();
        assert_eq!(
            p.evaluate(&s, &w.xi, &H2Class(vec![1, 0])).unwrap().value,
            frac(1, 2)
        );
    }

    #[test]
    fn vanishing_by_factorial_convention() {
        let p = delta_leading_raw(0, 0, 3, 1, &q(8), &q(-1)).unwrap();
        assert!(p.is_zero());
        assert!(!p.exact);
    }

    #[test]
    fn signs() {
        let s = SurfaceData::p1xp1();
        assert_eq!(donaldson_sign(&s, &ChernData::new(vec![1, 1], 2)), 1);
        assert_eq!(donaldson_sign(&s, &ChernData::new(vec![0, 0], 2)), 1);
        let r1 = SurfaceData::simple(vec![vec![1]], vec![-3]).unwrap();
        assert_eq!(donaldson_sign(&r1, &ChernData::new(vec![1], 1)), 1);
    }

    #[test]
    fn total_change_on_p1xp1() {
        let s = SurfaceData::p1xp1();
        let c = ChernData::new(vec![1, 1], 2);
        let (hm, hp) = (H2Class(vec![1, 2]), H2Class(vec![2, 1]));
        let t = total_change(&s, &c, &hm, &hp, 3, 0).unwrap();
        assert_eq!(t.contributions.len(), 1);
        let alpha = H2Class(vec![1, 0]);
        assert_eq!(t.evaluate(&s, &alpha).unwrap().value, frac(-7, 2));
        let back = total_change(&s, &c, &hp, &hm, 3, 0).unwrap();
        assert_eq!(back.evaluate(&s, &alpha).unwrap().value, frac(7, 2));
    }
}
