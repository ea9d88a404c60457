//! Walls of type `(c1, c2)` between two polarizations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{floor_sqrt, q, Q};
use crate::error::{Error, Result};
use crate::surface::{H2Class, SurfaceData};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernData {
    pub c1: H2Class,
    pub c2: i64,
}

impl ChernData {
    pub fn new(c1: Vec<i64>, c2: i64) -> Self {
        Self {
            c1: H2Class(c1),
            c2,
        }
    }

    /// `4 c2 - c1^2`.
    pub fn discriminant(&self, surface: &SurfaceData) -> i64 {
        4 * self.c2 - surface.pair_unchecked(&self.c1, &self.c1)
    }

    /// Expected dimension `N = 4 c2 - c1^2 - 3`.
    pub fn expected_dim(&self, surface: &SurfaceData) -> i64 {
        self.discriminant(surface) - 3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Goodness {
    #[serde(rename = "certified")]
    CertifiedGood,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Goodness {
    pub fn label(self) -> &'static str {
        match self {
            Goodness::CertifiedGood => "certified",
            Goodness::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallClass {
    pub xi: H2Class,
    pub xi_sq: i64,
    pub d: i64,
    pub e: i64,
    pub rk_minus: i64,
    pub rk_plus: i64,
    pub t0: Q,
    pub goodness: Goodness,
    pub component_case: bool,
}

impl WallClass {
    /// Derived invariants of `xi`; `t0` and goodness are filled in from the
    /// polarizations.
    pub fn from_class(
        surface: &SurfaceData,
        chern: &ChernData,
        xi: H2Class,
        h_minus: &H2Class,
        h_plus: &H2Class,
    ) -> Result<Self> {
        let xi_sq = surface.pair(&xi, &xi)?;
        let disc = chern.discriminant(surface);
        if (disc + xi_sq) % 4 != 0 {
            return Err(Error::Range(format!(
                "xi = {xi} is not congruent to c1 mod 2"
            )));
        }
        let d = (disc + xi_sq) / 4;
        let xk = surface.pair_unchecked(&xi, surface.canonical());
        // even because K is characteristic
        let half = (xi_sq - xk) / 2;
        let a = surface.pair(&xi, h_minus)?;
        let b = surface.pair(&xi, h_plus)?;
        if a == b {
            return Err(Error::Range(format!(
                "xi = {xi} does not cross the segment"
            )));
        }
        let (rk_minus, rk_plus) = (ext_rank_raw(xi_sq, xk, d), ext_rank_raw(xi_sq, -xk, d));
        let mut w = Self {
            xi,
            xi_sq,
            d,
            e: -half + d + 1,
            rk_minus,
            rk_plus,
            t0: Q::new(a.into(), (a - b).into()),
            goodness: Goodness::Unknown,
            component_case: rk_minus == 0 || rk_plus == 0,
        };
        w.goodness = certify_goodness(surface, &w, h_minus, h_plus);
        Ok(w)
    }

    pub fn label(&self) -> String {
        format!("xi={} d={} e={}", self.xi, self.d, self.e)
    }
}

/// Rank of the extension sheaf on the minus side, `-<xi(xi-K)>/2 + n + m - 1`.
fn ext_rank_raw(xi_sq: i64, xi_k: i64, n_plus_m: i64) -> i64 {
    -(xi_sq - xi_k) / 2 + n_plus_m - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

/// Rank of the `Ext^1` sheaf over `Hilb^n x Hilb^m` on the given side.
pub fn ext_rank(surface: &SurfaceData, xi: &H2Class, n: i64, m: i64, side: Side) -> Result<i64> {
    let xi_sq = surface.pair(xi, xi)?;
    let xk = surface.pair(xi, surface.canonical())?;
    Ok(match side {
        Side::Minus => ext_rank_raw(xi_sq, xk, n + m),
        Side::Plus => ext_rank_raw(xi_sq, -xk, n + m),
    })
}

/// Necessary ampleness conditions on the pair of polarizations.
pub fn check_polarizations(
    surface: &SurfaceData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Result<()> {
    let p = surface
        .pair(h_minus, h_minus)
        .map_err(|e| Error::InvalidPolarization(e.to_string()))?;
    let qq = surface
        .pair(h_plus, h_plus)
        .map_err(|e| Error::InvalidPolarization(e.to_string()))?;
    let m = surface.pair_unchecked(h_minus, h_plus);
    if p <= 0 || qq <= 0 {
        return Err(Error::InvalidPolarization(format!(
            "H_minus^2 = {p} and H_plus^2 = {qq} must be positive"
        )));
    }
    if m <= 0 {
        return Err(Error::InvalidPolarization(format!(
            "<H_minus . H_plus> = {m} must be positive"
        )));
    }
    Ok(())
}

/// Proportional polarizations span a single ray, so no wall separates them.
fn proportional(surface: &SurfaceData, h_minus: &H2Class, h_plus: &H2Class) -> bool {
    let m = surface.pair_unchecked(h_minus, h_plus);
    m * m == surface.pair_unchecked(h_minus, h_minus) * surface.pair_unchecked(h_plus, h_plus)
}

/// Positive definite form `Psi(x) = <x,H->^2/p + <x,H+>^2/q - 2x^2` and the
/// bound `2 (4c2 - c1^2) m^2 / (pq)` it satisfies on every wall class.
fn psi_form(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> (Vec<Vec<Q>>, Q) {
    let n = surface.b2();
    let g = surface.gram();
    let hm: Vec<i64> = (0..n)
        .map(|i| (0..n).map(|j| g[i][j] * h_minus.0[j]).sum())
        .collect();
    let hp: Vec<i64> = (0..n)
        .map(|i| (0..n).map(|j| g[i][j] * h_plus.0[j]).sum())
        .collect();
    let p = surface.pair_unchecked(h_minus, h_minus);
    let qq = surface.pair_unchecked(h_plus, h_plus);
    let m = surface.pair_unchecked(h_minus, h_plus);
    let a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    Q::new((hm[i] * hm[j]).into(), p.into())
                        + Q::new((hp[i] * hp[j]).into(), qq.into())
                        - q(2 * g[i][j])
                })
                .collect()
        })
        .collect();
    let bound = Q::new(
        (2 * chern.discriminant(surface) * m * m).into(),
        (p * qq).into(),
    );
    (a, bound)
}

/// `A = L D L^T` with unit lower `L`; returns `(L, D)`.
fn ldl(a: &[Vec<Q>]) -> Result<(Vec<Vec<Q>>, Vec<Q>)> {
    let n = a.len();
    let mut l = vec![vec![Q::zero(); n]; n];
    let mut d = vec![Q::zero(); n];
    for j in 0..n {
        let mut dj = a[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::Degenerate);
        }
        l[j][j] = q(1);
        for i in j + 1..n {
            let mut v = a[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d[j] = dj;
    }
    Ok((l, d))
}

/// All integer points with `Psi(x) <= bound`, by walking the LDL coordinates
/// from the last one down.
fn ellipsoid_points(a: &[Vec<Q>], bound: &Q) -> Result<Vec<Vec<i64>>> {
    let (l, d) = ldl(a)?;
    let n = a.len();
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    walk(&l, &d, n, bound.clone(), &mut x, &mut out);
    Ok(out)
}

fn walk(l: &[Vec<Q>], d: &[Q], level: usize, budget: Q, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if level == 0 {
        out.push(x.clone());
        return;
    }
    let i = level - 1;
    let n = x.len();
    // Psi = sum_i d_i (x_i + sum_{j>i} L_{ji} x_j)^2
    let center: Q = -(i + 1..n).map(|j| &l[j][i] * q(x[j])).sum::<Q>();
    let radius = floor_sqrt(&(&budget / &d[i])) + 1;
    let lo: BigInt = center.floor().to_integer() - &radius;
    let hi: BigInt = center.ceil().to_integer() + &radius;
    let (lo, hi) = (
        lo.to_i64().expect("bounded search range"),
        hi.to_i64().expect("bounded search range"),
    );
    for v in lo..=hi {
        let off = q(v) - &center;
        let used = &d[i] * &off * &off;
        if used <= budget {
            x[i] = v;
            walk(l, d, level - 1, &budget - used, x, out);
        }
    }
    x[i] = 0;
}

fn is_wall_candidate(surface: &SurfaceData, chern: &ChernData, xi: &H2Class) -> bool {
    let sq = surface.pair_unchecked(xi, xi);
    let lower = -chern.discriminant(surface);
    xi.0.iter()
        .zip(&chern.c1.0)
        .all(|(x, c)| (x - c).rem_euclid(2) == 0)
        && lower <= sq
        && sq < 0
}

fn check_inputs(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Result<()> {
    if chern.c1.len() != surface.b2() {
        return Err(Error::DimensionMismatch {
            expected: surface.b2(),
            found: chern.c1.len(),
        });
    }
    check_polarizations(surface, h_minus, h_plus)
}

/// Classes `xi ≡ c1 (2)` with `c1^2 - 4c2 <= xi^2 < 0` and
/// `sign <xi,H-> , sign <xi,H+>` accepted by `keep`.
fn candidates(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
    keep: impl Fn(i64, i64) -> bool + Sync,
) -> Result<Vec<H2Class>> {
    check_inputs(surface, chern, h_minus, h_plus)?;
    if chern.discriminant(surface) <= 0 || proportional(surface, h_minus, h_plus) {
        return Ok(Vec::new());
    }
    let (a, bound) = psi_form(surface, chern, h_minus, h_plus);
    let points = ellipsoid_points(&a, &bound)?;
    Ok(points
        .into_par_iter()
        .map(H2Class)
        .filter(|xi| {
            is_wall_candidate(surface, chern, xi)
                && keep(
                    surface.pair_unchecked(xi, h_minus),
                    surface.pair_unchecked(xi, h_plus),
                )
        })
        .collect())
}

fn sort_walls(walls: &mut [WallClass]) {
    walls.sort_by(|x, y| x.t0.cmp(&y.t0).then_with(|| x.xi.cmp(&y.xi)));
}

/// Every `xi` in `A^+` for the segment from `H_minus` to `H_plus`, sorted by
/// crossing parameter and then lexicographically.
pub fn enumerate_separating_classes(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Result<Vec<WallClass>> {
    let xs = candidates(surface, chern, h_minus, h_plus, |a, b| a < 0 && 0 < b)?;
    let mut walls = xs
        .into_iter()
        .map(|xi| WallClass::from_class(surface, chern, xi, h_minus, h_plus))
        .collect::<Result<Vec<_>>>()?;
    sort_walls(&mut walls);
    Ok(walls)
}

/// Reference enumeration over the box `|xi_i| <= radius`.
pub fn enumerate_naive(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
    radius: i64,
) -> Result<Vec<WallClass>> {
    check_inputs(surface, chern, h_minus, h_plus)?;
    let n = surface.b2();
    let side = (2 * radius + 1) as usize;
    let total = side.pow(n as u32);
    let mut walls = Vec::new();
    for mut f in 0..total {
        let mut v = vec![0; n];
        for slot in v.iter_mut() {
            *slot = (f % side) as i64 - radius;
            f /= side;
        }
        let xi = H2Class(v);
        if !is_wall_candidate(surface, chern, &xi) {
            continue;
        }
        if surface.pair_unchecked(&xi, h_minus) < 0 && surface.pair_unchecked(&xi, h_plus) > 0 {
            walls.push(WallClass::from_class(surface, chern, xi, h_minus, h_plus)?);
        }
    }
    sort_walls(&mut walls);
    Ok(walls)
}

/// A box radius guaranteed to contain every candidate:
/// `|x_i| <= sqrt(bound * (Psi^{-1})_{ii})`.
pub fn ellipsoid_box_radius(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Result<i64> {
    check_inputs(surface, chern, h_minus, h_plus)?;
    if chern.discriminant(surface) <= 0 || proportional(surface, h_minus, h_plus) {
        return Ok(0);
    }
    let (a, bound) = psi_form(surface, chern, h_minus, h_plus);
    let inv = crate::surface::invert(&a).ok_or(Error::Degenerate)?;
    let r = (0..a.len())
        .map(|i| floor_sqrt(&(&bound * &inv[i][i])) + 1)
        .max()
        .unwrap_or_else(BigInt::zero);
    Ok(r.to_i64().unwrap_or(i64::MAX))
}

/// Certified good when a shortcut flag is set or `<K . H_t0> <= 0`.
pub fn certify_goodness(
    surface: &SurfaceData,
    wall: &WallClass,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Goodness {
    let flags = surface.flags();
    if flags.minus_k_effective || flags.k_torsion {
        return Goodness::CertifiedGood;
    }
    let k = surface.canonical();
    let km = q(surface.pair_unchecked(k, h_minus));
    let kp = q(surface.pair_unchecked(k, h_plus));
    let kh = (q(1) - &wall.t0) * km + &wall.t0 * kp;
    if kh <= Q::zero() {
        Goodness::CertifiedGood
    } else {
        Goodness::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Miniwall {
    #[serde(with = "crate::arith::serde_q")]
    pub a: Q,
    pub n: i64,
    pub m: i64,
}

/// Parameters `a` in `[0, 1]` solving `n + m = d` and
/// `n - m = <xi.(c1-K)>/2 + (2a-1)<xi.C>`.
pub fn enumerate_miniwalls(
    surface: &SurfaceData,
    chern: &ChernData,
    wall: &WallClass,
    c: &H2Class,
) -> Result<Vec<Miniwall>> {
    let xc = surface.pair(&wall.xi, c)?;
    if xc <= 0 {
        return Err(Error::DegenerateC(xc.to_string()));
    }
    let shift = Q::new(
        surface
            .pair(&wall.xi, &chern.c1.sub(surface.canonical()))?
            .into(),
        2.into(),
    );
    let mut out: Vec<Miniwall> = (0..=wall.d)
        .filter_map(|n| {
            let m = wall.d - n;
            let a = ((q(n - m) - &shift) / q(xc) + q(1)) / q(2);
            (a >= Q::zero() && a <= q(1)).then_some(Miniwall { a, n, m })
        })
        .collect();
    out.sort_by(|x, y| x.a.cmp(&y.a).then(x.n.cmp(&y.n)));
    Ok(out)
}

/// The moduli space is fine when `c1` is not divisible by 2 or
/// `4c2 - c1^2` is not divisible by 8.
pub fn check_fine_criterion(surface: &SurfaceData, chern: &ChernData) -> (bool, String) {
    if !chern.c1.is_divisible_by_two() {
        return (true, format!("c1 = {} is not divisible by 2", chern.c1));
    }
    let disc = chern.discriminant(surface);
    if disc.rem_euclid(8) != 0 {
        (true, format!("4c2 - c1^2 = {disc} is not divisible by 8"))
    } else {
        (
            false,
            format!("c1 is divisible by 2 and 4c2 - c1^2 = {disc} is divisible by 8"),
        )
    }
}

/// The lattice-checkable admissibility clauses: neither polarization lies on
/// a wall, and `N > (4c2 - c1^2)/2` when `c1` is even. The dimension clauses
/// cannot be decided from lattice data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub h_minus_off_walls: bool,
    pub h_plus_off_walls: bool,
    pub dimension_clause: bool,
    pub note: String,
}

pub fn admissibility(
    surface: &SurfaceData,
    chern: &ChernData,
    h_minus: &H2Class,
    h_plus: &H2Class,
) -> Result<Admissibility> {
    let boundary = candidates(surface, chern, h_minus, h_plus, |a, b| {
        a <= 0 && 0 <= b && (a == 0 || b == 0)
    })?;
    let on = |h: &H2Class| boundary.iter().any(|xi| surface.pair_unchecked(xi, h) == 0);
    let disc = chern.discriminant(surface);
    let dimension_clause = !chern.c1.is_divisible_by_two() || 2 * (disc - 3) > disc;
    Ok(Admissibility {
        h_minus_off_walls: !on(h_minus),
        h_plus_off_walls: !on(h_plus),
        dimension_clause,
        note: "only the wall and parity clauses are checked; the two moduli-dimension clauses are not decidable from lattice data".into(),
    })
}

/// Walls grouped by primitive direction, for display.
pub fn group_by_direction(walls: &[WallClass]) -> BTreeMap<H2Class, Vec<usize>> {
    let mut groups: BTreeMap<H2Class, Vec<usize>> = BTreeMap::new();
    for (i, w) in walls.iter().enumerate() {
        let g = w.xi.0.iter().fold(0i64, |acc, x| acc.gcd(x));
        let dir = if g == 0 {
            w.xi.clone()
        } else {
            H2Class(w.xi.0.iter().map(|x| x / g).collect())
        };
        groups.entry(dir).or_default().push(i);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceFlags;

    fn p1() -> (SurfaceData, H2Class, H2Class) {
        (
            SurfaceData::p1xp1(),
            H2Class(vec![1, 2]),
            H2Class(vec![2, 1]),
        )
    }

    #[test]
    fn p1xp1_single_wall() {
        let (s, hm, hp) = p1();
        let w = enumerate_separating_classes(&s, &ChernData::new(vec![1, 1], 2), &hm, &hp).unwrap();
        assert_eq!(w.len(), 1);
        let w = &w[0];
        assert_eq!(w.xi, H2Class(vec![-1, 1]));
        assert_eq!((w.xi_sq, w.d, w.e, w.rk_minus, w.rk_plus), (-2, 1, 3, 1, 1));
        assert_eq!(w.t0, Q::new(1.into(), 2.into()));
        assert_eq!(w.goodness, Goodness::CertifiedGood);
        assert!(!w.component_case);

        let w0 =
            enumerate_separating_classes(&s, &ChernData::new(vec![1, 1], 1), &hm, &hp).unwrap();
        assert_eq!(w0.len(), 1);
        assert_eq!((w0[0].xi.clone(), w0[0].d), (H2Class(vec![-1, 1]), 0));
        assert!(w0[0].component_case);
    }

    #[test]
    fn rank_one_has_no_walls() {
        let s = SurfaceData::simple(vec![vec![1]], vec![-3]).unwrap();
        let w = enumerate_separating_classes(
            &s,
            &ChernData::new(vec![1], 5),
            &H2Class(vec![1]),
            &H2Class(vec![2]),
        )
        .unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn invalid_polarizations() {
        let (s, hm, _) = p1();
        let c = ChernData::new(vec![1, 1], 2);
        assert!(matches!(
            enumerate_separating_classes(&s, &c, &hm, &H2Class(vec![1, 0])),
            Err(Error::InvalidPolarization(_))
        ));
        assert!(
            enumerate_separating_classes(&s, &c, &hm, &H2Class(vec![2, 4]))
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn goodness_rules() {
        let (s, hm, hp) = p1();
        let c = ChernData::new(vec![1, 1], 2);
        let w = &enumerate_separating_classes(&s, &c, &hm, &hp).unwrap()[0];
        assert_eq!(certify_goodness(&s, w, &hm, &hp), Goodness::CertifiedGood);

        let g = vec![vec![1, 0], vec![0, -1]];
        let gt =
            SurfaceData::new(g.clone(), H2Class(vec![3, 1]), 1, SurfaceFlags::default()).unwrap();
        let (hm, hp) = (H2Class(vec![2, 1]), H2Class(vec![3, -1]));
        let c = ChernData::new(vec![1, 0], 5);
        let walls = enumerate_separating_classes(&gt, &c, &hm, &hp).unwrap();
        assert!(!walls.is_empty());
        assert!(walls.iter().all(|w| w.goodness == Goodness::Unknown));
        let torsion = SurfaceData::new(
            g,
            H2Class(vec![3, 1]),
            1,
            SurfaceFlags {
                minus_k_effective: false,
                k_torsion: true,
            },
        )
        .unwrap();
        assert!(walls
            .iter()
            .all(|w| certify_goodness(&torsion, w, &hm, &hp) == Goodness::CertifiedGood));
    }

    #[test]
    fn miniwalls_on_p1xp1() {
        let (s, hm, hp) = p1();
        let c = ChernData::new(vec![1, 1], 2);
        let w = &enumerate_separating_classes(&s, &c, &hm, &hp).unwrap()[0];
        let mw = enumerate_miniwalls(&s, &c, w, &H2Class(vec![10, -10])).unwrap();
        let a: Vec<Q> = mw.iter().map(|m| m.a.clone()).collect();
        assert_eq!(
            a,
            vec![Q::new(19.into(), 40.into()), Q::new(21.into(), 40.into())]
        );
        assert_eq!((mw[0].n, mw[0].m), (0, 1));
        assert!(matches!(
            enumerate_miniwalls(&s, &c, w, &H2Class(vec![1, 1])),
            Err(Error::DegenerateC(_))
        ));
    }

    #[test]
    fn fine_criterion() {
        let s = SurfaceData::p1xp1();
        assert!(check_fine_criterion(&s, &ChernData::new(vec![1, 1], 2)).0);
        assert!(check_fine_criterion(&s, &ChernData::new(vec![0, 2], 1)).0);
        assert!(!check_fine_criterion(&s, &ChernData::new(vec![0, 2], 2)).0);
    }

    #[test]
    fn naive_matches_on_p1xp1() {
        let (s, hm, hp) = p1();
        for c2 in 1..6 {
            let c = ChernData::new(vec![1, 1], c2);
            assert_eq!(
                enumerate_separating_classes(&s, &c, &hm, &hp).unwrap(),
                enumerate_naive(&s, &c, &hm, &hp, 20).unwrap()
            );
        }
    }

    #[test]
    fn admissibility_report() {
        let (s, hm, hp) = p1();
        let a = admissibility(&s, &ChernData::new(vec![1, 1], 2), &hm, &hp).unwrap();
        assert!(a.h_minus_off_walls && a.h_plus_off_walls && a.dimension_clause);
        let a = admissibility(
            &s,
            &ChernData::new(vec![1, 1], 2),
            &H2Class(vec![1, 1]),
            &hp,
        )
        .unwrap();
        assert!(!a.h_minus_off_walls);
    }
}
