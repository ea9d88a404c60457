//! Randomized self-checks: every closed formula against its brute-force or
//! symbolic counterpart, driven by a seeded generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{q, Q};
use crate::config::Problem;
use crate::delta::{
    check_p_to_q_with, check_q_mc_expansions, delta_exact_small_d, delta_leading,
    delta_leading_raw, delta_r0, q_poly,
};
use crate::error::Error;
use crate::poly::Poly;
use crate::report::{SuiteResult, VerifyReport};
use crate::segre::{check_r_identity, derive_u_symbolic};
use crate::surface::{inertia, H2Class, MixedClass, SurfaceData, SurfaceFlags};
use crate::symring::{
    integrate_closed, integrate_oracle, special_pt_reduction, xi_pt_monomial, ConcreteClass,
    Oracle, SymClass, SymMonomial, WeightSpec,
};
use crate::walls::{
    ellipsoid_box_radius, enumerate_naive, enumerate_separating_classes, ext_rank, ChernData, Side,
    WallClass,
};

pub const NAIVE_RADIUS: i64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// 1 runs only the oracle checks up to `d = 3`; 2 runs everything.
    pub level: u32,
    pub seed: u64,
    /// Corrupts the constant term of `Q_2` before the substitution check.
    pub mutation: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            level: 2,
            seed: 0,
            mutation: false,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vec_in(rng: &mut impl Rng, n: usize, r: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

fn has_small_positive_class(s: &SurfaceData) -> bool {
    let b2 = s.b2() as u32;
    (0..5i64.pow(b2)).any(|mut f| {
        let v: Vec<i64> = (0..b2)
            .map(|_| {
                let x = f % 5 - 2;
                f /= 5;
                x
            })
            .collect();
        let h = H2Class(v);
        s.pair_unchecked(&h, &h) > 0
    })
}

/// A surface of rank `b2` with hyperbolic signature, a random characteristic
/// `K`, and a class of positive square with coordinates in `[-2, 2]`.
pub fn random_surface(rng: &mut impl Rng, b2: usize) -> SurfaceData {
    loop {
        let mut gram = vec![vec![0i64; b2]; b2];
        for i in 0..b2 {
            for j in i..b2 {
                let x = rng.gen_range(-5..=5);
                gram[i][j] = x;
                gram[j][i] = x;
            }
        }
        let gq: Vec<Vec<Q>> = gram
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        if inertia(&gq).ok() != Some((1, b2 - 1)) {
            continue;
        }
        for _ in 0..50 {
            let k = H2Class(vec_in(rng, b2, 3));
            if let Ok(s) = SurfaceData::new(gram.clone(), k, 1, SurfaceFlags::default()) {
                if has_small_positive_class(&s) {
                    return s;
                }
                break;
            }
        }
    }
}

/// Two classes of positive square in the same component of the positive cone.
pub fn random_polarizations(rng: &mut impl Rng, s: &SurfaceData) -> (H2Class, H2Class) {
    fn positive(rng: &mut impl Rng, s: &SurfaceData) -> H2Class {
        loop {
            let h = H2Class(vec_in(rng, s.b2(), 4));
            if s.pair_unchecked(&h, &h) > 0 {
                return h;
            }
        }
    }
    let hm = positive(rng, s);
    loop {
        let hp = positive(rng, s);
        if s.pair_unchecked(&hm, &hp) > 0 {
            return (hm, hp);
        }
    }
}

/// Chern data making `xi` a class with the given `d`: `c1 = xi + 2y`,
/// `c2 = (4d - xi^2 + c1^2)/4`.
pub fn chern_for(rng: &mut impl Rng, s: &SurfaceData, xi: &H2Class, d: i64) -> ChernData {
    let c1 = xi.add(&H2Class(vec_in(rng, s.b2(), 2)).scale(2));
    let c2 = (4 * d - s.pair_unchecked(xi, xi) + s.pair_unchecked(&c1, &c1)) / 4;
    ChernData { c1, c2 }
}

/// A class `xi` together with Chern data giving it the prescribed `d` and
/// `N = 4d - xi^2 - 3` in `[0, max_n]`, on a fresh surface of rank 2 or 3.
/// The polarizations only orient `xi`.
pub fn random_wall(rng: &mut impl Rng, d: i64, max_n: i64) -> (SurfaceData, ChernData, WallClass) {
    loop {
        let b2 = rng.gen_range(2..=3);
        let s = random_surface(rng, b2);
        for _ in 0..200 {
            let xi = H2Class(vec_in(rng, b2, 3));
            let sq = s.pair_unchecked(&xi, &xi);
            let n = 4 * d - sq - 3;
            if xi.is_zero() || sq >= 0 || n < 0 || n > max_n {
                continue;
            }
            let chern = chern_for(rng, &s, &xi, d);
            let unit = (0..b2).map(|i| H2Class((0..b2).map(|j| i64::from(i == j)).collect()));
            let probe = unit
                .into_iter()
                .find(|h| s.pair_unchecked(&xi, h) != 0)
                .expect("nondegenerate");
            let wall = WallClass::from_class(&s, &chern, xi, &H2Class::zero(b2), &probe)
                .expect("orientable by construction");
            return (s, chern, wall);
        }
    }
}

pub fn random_mixed(rng: &mut impl Rng, b2: usize, r: i64) -> MixedClass {
    MixedClass::new(
        q(rng.gen_range(-r..=r)),
        vec_in(rng, b2, r).into_iter().map(q).collect(),
        q(rng.gen_range(-r..=r)),
    )
}

/// A sum of up to three monomials at the given level, with small factors.
pub fn random_sym_class(rng: &mut impl Rng, b2: usize, level: usize) -> ConcreteClass {
    let mut out = SymClass::zero(level);
    for _ in 0..rng.gen_range(1..=3) {
        let mut left = level;
        let mut fs = Vec::new();
        while left > 0 && rng.gen_bool(0.6) {
            let size = rng.gen_range(1..=left);
            fs.push((size, random_mixed(rng, b2, 2)));
            left -= size;
        }
        let m = SymMonomial::new(level, fs).expect("sizes fit");
        out = out.add(&SymClass::from_monomial(m, q(rng.gen_range(-3..=3))));
    }
    out
}

type Check = std::result::Result<String, String>;

fn err(e: Error) -> String {
    e.to_string()
}

fn oracle_vs_closed(rng: &mut impl Rng, max_d: usize) -> Check {
    let mut count = 0;
    for _ in 0..3 {
        let b2 = rng.gen_range(1..=3);
        let s = random_surface(rng, b2);
        let xi = H2Class(vec_in(rng, b2, 3));
        let alpha = H2Class(vec_in(rng, b2, 3));
        for d in 1..=max_d {
            for x in 0..=d {
                for y in 0..=d - x {
                    for c in 0..=d - x - y {
                        let w = WeightSpec::new(alpha.clone(), 2 * d - 2 * c - x - 2 * y, c);
                        let m = xi_pt_monomial(&s, &xi, d, x, y).map_err(err)?;
                        let lhs = integrate_oracle(&s, &m, &w).map_err(err)?;
                        let rhs = integrate_closed(&s, &xi, d, x, y, &w).map_err(err)?;
                        if lhs != rhs {
                            return Err(format!(
                                "d={d} x={x} y={y} c={c}: oracle {lhs}, closed form {rhs}"
                            ));
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} integrals agree"))
}

fn ring_laws(rng: &mut impl Rng) -> Check {
    for i in 0..100 {
        let b2 = rng.gen_range(1..=2);
        let (la, lb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let lw = rng.gen_range(1..=4);
        let x = random_sym_class(rng, b2, la);
        let y = random_sym_class(rng, b2, lb);
        let z = random_sym_class(rng, b2, lb);
        let w = random_sym_class(rng, b2, lw);
        let checks = [
            (
                "commutativity",
                x.star_mul(&y).expand(),
                y.star_mul(&x).expand(),
            ),
            (
                "associativity",
                x.star_mul(&y).star_mul(&w).expand(),
                x.star_mul(&y.star_mul(&w)).expand(),
            ),
            (
                "distributivity",
                x.star_mul(&y.add(&z)).expand(),
                x.star_mul(&y).add(&x.star_mul(&z)).expand(),
            ),
            (
                "unit",
                SymClass::one(2).star_mul(&x).expand(),
                x.star_mul(&SymClass::one(2)).expand(),
            ),
        ];
        for (name, l, r) in checks {
            if l != r {
                return Err(format!("{name} fails on triple {i}"));
            }
        }
        let a = SymClass::diag(random_mixed(rng, b2, 2), 1);
        let b = SymClass::diag(random_mixed(rng, b2, 2), 1);
        let n = rng.gen_range(1..=4);
        let binom = (0..=n).fold(SymClass::zero(n), |acc, k| {
            let c = crate::arith::binomial(n as i64, k as i64);
            acc.add(&a.pow(k).star_mul(&b.pow(n - k)).scale_q(Q::from_integer(c)))
        });
        if binom.expand() != a.add(&b).pow(n).expand() {
            return Err(format!("binomial formula fails at n = {n}"));
        }
    }
    Ok(
        "100 triples: commutative, associative, distributive, unital; binomial formula holds"
            .into(),
    )
}

fn diagonal_reduction(rng: &mut impl Rng) -> Check {
    let mut count = 0;
    for _ in 0..3 {
        let b2 = rng.gen_range(1..=3);
        let s = random_surface(rng, b2);
        let oracle = Oracle::new(&s);
        let alpha = H2Class(vec_in(rng, b2, 3));
        for j in 1..=3usize {
            for pad in 0..=1usize {
                let mut class =
                    SymClass::diag(random_mixed(rng, b2, 3), j).star_mul(&SymClass::one(pad));
                if rng.gen_bool(0.5) {
                    class = class.star_mul(&SymClass::diag(random_mixed(rng, b2, 3), 1));
                }
                let reduced = class.reduce_diagonal();
                for l in 0..=2 * class.level() {
                    let w = WeightSpec::new(alpha.clone(), l, 0);
                    let (a, b) = (
                        oracle.integrate(&class, &w).map_err(err)?,
                        oracle.integrate(&reduced, &w).map_err(err)?,
                    );
                    if a != b {
                        return Err(format!("j={j}, l={l}: {a} before reduction, {b} after"));
                    }
                    count += 1;
                }
            }
        }
        for d in 2..=4 {
            special_pt_reduction(&s, &alpha, d).map_err(err)?;
        }
    }
    Ok(format!(
        "{count} weighted integrals preserved; point correction holds for d = 2..4"
    ))
}

fn r_identity() -> Check {
    for d in 0..=6 {
        check_r_identity(d).map_err(err)?;
    }
    Ok("first integral + correction = R_d for d <= 6".into())
}

fn u_reproduction() -> Check {
    for d in 0..=6 {
        derive_u_symbolic(d).map_err(err)?;
    }
    Ok("reduced R_d matches all six printed coefficients for d <= 6".into())
}

fn p_to_q(mutation: bool) -> Check {
    let mut q2 = q_poly(2);
    if mutation {
        q2 = &q2 + &Poly::int(1);
    }
    check_p_to_q_with(&[q_poly(0), q_poly(1), q2]).map_err(err)?;
    Ok("P_k(xi^2 = 4d - N - 3) = Q_k for k = 0, 1, 2".into())
}

fn q_mc_suite() -> Check {
    check_q_mc_expansions().map_err(err)?;
    Ok("all tabulated Q_{m,c} expansions reproduced".into())
}

fn r0_consistency(rng: &mut impl Rng) -> Check {
    for _ in 0..10 {
        let d = rng.gen_range(0..=6);
        let n = rng.gen_range(0..=20);
        let ksq = q(rng.gen_range(-12..=10));
        let e = rng.gen_range(-5..=5);
        let xisq = q(4 * d - n - 3);
        let general = delta_leading_raw(n, 0, d, e, &ksq, &xisq).map_err(err)?;
        let special = delta_r0(n, d, e, &ksq);
        if general != special {
            return Err(format!("N={n} d={d} K^2={ksq}: {general} vs {special}"));
        }
    }
    Ok("10 random (N, d, K^2) agree term by term".into())
}

/// `delta_exact_small_d` against the leading formula at 20 random `alpha`.
pub fn exact_matches_leading(
    rng: &mut impl Rng,
    s: &SurfaceData,
    chern: &ChernData,
    wall: &WallClass,
    l: i64,
    r: i64,
) -> Check {
    let poly = delta_leading(s, chern, wall, l, r).map_err(err)?;
    for _ in 0..20 {
        let alpha = H2Class(vec_in(rng, s.b2(), 4));
        let exact = delta_exact_small_d(s, chern, wall, l, r, &alpha).map_err(err)?;
        let lead = poly.evaluate(s, &wall.xi, &alpha).map_err(err)?.value;
        if exact != lead {
            return Err(format!(
                "{} at alpha = {alpha}: exact {exact}, leading {lead}",
                wall.label()
            ));
        }
    }
    Ok(String::new())
}

fn exact_vs_leading(rng: &mut impl Rng) -> Check {
    let s = SurfaceData::p1xp1();
    let chern = ChernData::new(vec![1, 1], 2);
    let wall = WallClass::from_class(
        &s,
        &chern,
        H2Class(vec![-1, 1]),
        &H2Class(vec![1, 2]),
        &H2Class(vec![2, 1]),
    )
    .map_err(err)?;
    exact_matches_leading(rng, &s, &chern, &wall, 3, 0)?;
    for _ in 0..5 {
        let d = rng.gen_range(0..=2);
        let (s, chern, wall) = random_wall(rng, d, 8);
        let n = chern.expected_dim(&s);
        let r = rng.gen_range(0..=n / 2);
        exact_matches_leading(rng, &s, &chern, &wall, n - 2 * r, r)?;
    }
    Ok("6 walls with d <= 2, 20 values of alpha each".into())
}

/// A random enumeration problem whose candidate box fits in the naive radius.
pub fn random_enumeration_problem(
    rng: &mut impl Rng,
) -> (SurfaceData, ChernData, H2Class, H2Class) {
    loop {
        let b2 = rng.gen_range(2..=3);
        let s = random_surface(rng, b2);
        let (hm, hp) = random_polarizations(rng, &s);
        let c1 = H2Class(vec_in(rng, b2, 2));
        let c1sq = s.pair_unchecked(&c1, &c1);
        let c2 = (c1sq + 3).div_euclid(4) + rng.gen_range(0..=10);
        let chern = ChernData { c1, c2 };
        if ellipsoid_box_radius(&s, &chern, &hm, &hp).is_ok_and(|r| r <= NAIVE_RADIUS) {
            return (s, chern, hm, hp);
        }
    }
}

/// The invariants every enumerated wall must satisfy.
pub fn check_wall_invariants(
    s: &SurfaceData,
    chern: &ChernData,
    hm: &H2Class,
    hp: &H2Class,
    w: &WallClass,
) -> std::result::Result<(), String> {
    let xi = &w.xi;
    let c1sq = s.pair_unchecked(&chern.c1, &chern.c1);
    let diff = xi.sub(&chern.c1);
    let n = chern.expected_dim(s);
    let minus = ext_rank(s, xi, w.d, 0, Side::Minus).map_err(err)?;
    let plus = ext_rank(s, xi, w.d, 0, Side::Plus).map_err(err)?;
    let xk = s.pair_unchecked(xi, s.canonical());
    let conditions = [
        ("xi = c1 mod 2", diff.is_divisible_by_two()),
        (
            "c1^2 - 4c2 <= xi^2 < 0",
            c1sq - 4 * chern.c2 <= w.xi_sq && w.xi_sq < 0,
        ),
        ("xi^2 recorded", w.xi_sq == s.pair_unchecked(xi, xi)),
        (
            "separates",
            s.pair_unchecked(xi, hm) < 0 && s.pair_unchecked(xi, hp) > 0,
        ),
        (
            "4d = 4c2 - c1^2 + xi^2",
            4 * w.d == 4 * chern.c2 - c1sq + w.xi_sq,
        ),
        ("e", 2 * w.e == -(w.xi_sq - xk) + 2 * w.d + 2),
        ("ranks", minus == w.rk_minus && plus == w.rk_plus),
        ("N = 2d + e_- + e_+ - 1", n == 2 * w.d + minus + plus - 1),
    ];
    match conditions.iter().find(|(_, ok)| !ok) {
        Some((name, _)) => Err(format!("{}: {name} fails", w.label())),
        None => Ok(()),
    }
}

fn enumeration(rng: &mut impl Rng) -> Check {
    let mut total = 0;
    for i in 0..10 {
        let (s, chern, hm, hp) = random_enumeration_problem(rng);
        let fast = enumerate_separating_classes(&s, &chern, &hm, &hp).map_err(err)?;
        let naive = enumerate_naive(&s, &chern, &hm, &hp, NAIVE_RADIUS).map_err(err)?;
        if fast != naive {
            return Err(format!(
                "lattice {i}: {} walls found, {} by the naive search",
                fast.len(),
                naive.len()
            ));
        }
        for w in &fast {
            check_wall_invariants(&s, &chern, &hm, &hp, w)?;
        }
        total += fast.len();
    }
    Ok(format!("10 lattices, {total} walls, all invariants hold"))
}

/// Checks tied to a user problem: full enumeration against the naive box
/// when it is small enough, and exact vs leading on every wall with `d <= 2`.
fn problem_checks(rng: &mut impl Rng, p: &Problem) -> Check {
    let (s, chern) = (&p.surface, &p.chern);
    let walls = enumerate_separating_classes(s, chern, &p.h_minus, &p.h_plus).map_err(err)?;
    let radius = ellipsoid_box_radius(s, chern, &p.h_minus, &p.h_plus).map_err(err)?;
    let mut notes = vec![format!("{} walls", walls.len())];
    if radius <= NAIVE_RADIUS && s.b2() <= 3 {
        let naive = enumerate_naive(s, chern, &p.h_minus, &p.h_plus, NAIVE_RADIUS).map_err(err)?;
        if naive != walls {
            return Err(format!(
                "{} walls found, {} by the naive search",
                walls.len(),
                naive.len()
            ));
        }
        notes.push("naive search agrees".into());
    }
    let n = chern.expected_dim(s);
    let mut checked = 0;
    for w in &walls {
        check_wall_invariants(s, chern, &p.h_minus, &p.h_plus, w)?;
        if w.d <= 2 && n >= 0 && s.b2() <= p.caps.max_b2 {
            exact_matches_leading(rng, s, chern, w, n, 0)?;
            checked += 1;
        }
    }
    notes.push(format!("exact = leading on {checked} walls with d <= 2"));
    Ok(notes.join(", "))
}

pub fn run(opts: VerifyOptions, problem: Option<&Problem>) -> VerifyReport {
    let mut rng = rng(opts.seed);
    let mut suites = Vec::new();
    let mut push = |name: &str, res: Check| {
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        suites.push(SuiteResult {
            name: name.into(),
            passed,
            detail,
        });
    };
    let max_d = if opts.level <= 1 { 3 } else { 4 };
    push("oracle vs closed form", oracle_vs_closed(&mut rng, max_d));
    if opts.level >= 2 {
        push("star ring laws", ring_laws(&mut rng));
        push("diagonal reduction", diagonal_reduction(&mut rng));
        push("R_d identity", r_identity());
        push("U_d reproduction", u_reproduction());
        push("P→Q substitution", p_to_q(opts.mutation));
        push("Q_{m,c} expansions", q_mc_suite());
        push("r = 0 consistency", r0_consistency(&mut rng));
        push("exact vs leading", exact_vs_leading(&mut rng));
        push("enumeration completeness", enumeration(&mut rng));
    }
    if let Some(p) = problem {
        push("configured problem", problem_checks(&mut rng, p));
    }
    VerifyReport {
        seed: opts.seed,
        level: opts.level,
        suites,
    }
}
