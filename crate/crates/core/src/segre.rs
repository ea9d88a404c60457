//! Segre-integral classes on `Hilb^d(S ⊔ S)` as elements of the star ring.
//!
//! Everything is built symbolically first, with `xi^2`, `<xi.K>`, `K^2` and
//! `s2` as polynomial variables, and then specialized to a surface.

use crate::arith::{binomial, q, two_pow, Q};
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::surface::{H2Class, MixedClass, SurfaceData};
use crate::symring::{ConcreteClass, LinClass, SymClass, SymMonomial, SymbolicClass};

/// Largest complex codimension on which the `R_d` formulas are certified.
pub const VALIDITY_CODIM: u32 = 5;

fn v(x: Var) -> Poly {
    Poly::var(x)
}

fn c(n: i64) -> Poly {
    Poly::int(n)
}

/// `a + b xi + k K + (e0 + e1 xi^2 + e2 xiK + e3 K^2 + e4 s2) pt`.
fn lin(a: i64, b: i64, k: i64, pt: [i64; 5]) -> LinClass {
    let p = [
        Poly::int(1),
        v(Var::XiSq),
        v(Var::XiK),
        v(Var::KSq),
        v(Var::S2),
    ]
    .iter()
    .zip(pt)
    .fold(Poly::zero(), |acc, (m, coef)| &acc + &m.scale(&q(coef)));
    LinClass::new(c(a), c(b), c(k), p)
}

/// The nine t-classes as symbolic classes, in the order
/// `t1-, t2-, t3-, t1+, t2+, t3+, t1, t2, t3`.
pub fn t_classes_symbolic() -> [LinClass; 9] {
    let t1m = lin(1, 2, -1, [0, 3, -3, 1, 0]);
    let t2m = lin(3, 18, -13, [0, 63, -91, 33, 5]);
    let t3m = lin(27, 270, -237, [0; 5]);
    let (t1p, t2p, t3p) = (
        t1m.flip_canonical(),
        t2m.flip_canonical(),
        t3m.flip_canonical(),
    );
    let (t1, t2, t3) = (t1m.add(&t1p), t2m.add(&t2p), t3m.add(&t3p));
    [t1m, t2m, t3m, t1p, t2p, t3p, t1, t2, t3]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TClassSet {
    pub t1m: MixedClass,
    pub t2m: MixedClass,
    pub t3m: MixedClass,
    pub t1p: MixedClass,
    pub t2p: MixedClass,
    pub t3p: MixedClass,
    pub t1: MixedClass,
    pub t2: MixedClass,
    pub t3: MixedClass,
}

pub fn t_classes(surface: &SurfaceData, xi: &H2Class) -> TClassSet {
    let [t1m, t2m, t3m, t1p, t2p, t3p, t1, t2, t3] =
        t_classes_symbolic().map(|t| t.specialize(surface, xi));
    TClassSet {
        t1m,
        t2m,
        t3m,
        t1p,
        t2p,
        t3p,
        t1,
        t2,
        t3,
    }
}

fn diag(a: LinClass, size: usize) -> SymbolicClass {
    SymClass::diag(a, size)
}

/// `coef * head * t1^{*(d - level(head))}`, or zero when the head does not fit.
fn padded(d: usize, coef: Q, head: SymbolicClass) -> SymbolicClass {
    if head.level() > d {
        return SymClass::zero(d);
    }
    let t1 = diag(t_classes_symbolic()[6].clone(), 1);
    head.star_mul(&t1.pow(d - head.level())).scale_q(coef)
}

fn falling(d: usize, k: usize) -> Q {
    q((0..k as i64).map(|i| d as i64 - i).product())
}

fn sum(d: usize, parts: Vec<SymbolicClass>) -> SymbolicClass {
    parts
        .into_iter()
        .fold(SymClass::zero(d), |acc, p| acc.add(&p))
}

fn bin(d: usize, k: i64) -> Q {
    Q::from_integer(binomial(d as i64, k))
}

pub fn first_integral_symbolic(d: usize) -> SymbolicClass {
    let [_, _, _, _, _, _, _, t2, t3] = t_classes_symbolic();
    sum(
        d,
        vec![
            padded(d, q(1), SymClass::one(0)),
            padded(d, -bin(d, 2), diag(t2.clone(), 2)),
            padded(d, q(2) * bin(d, 3), diag(t3, 3)),
            padded(d, q(3) * bin(d, 4), diag(t2, 2).pow(2)),
        ],
    )
}

pub fn correction_symbolic(d: usize) -> SymbolicClass {
    sum(
        d,
        vec![
            padded(d, -falling(d, 2), diag(lin(2, 12, 0, [0, 42, 0, 1, 3]), 2)),
            padded(d, falling(d, 3), diag(lin(30, 260, 0, [0; 5]), 3)),
            padded(
                d,
                q(2) * falling(d, 4),
                diag(lin(2, 12, 0, [0; 5]), 2).pow(2),
            ),
        ],
    )
}

pub fn r_symbolic(d: usize) -> SymbolicClass {
    sum(
        d,
        vec![
            padded(d, q(1), SymClass::one(0)),
            padded(
                d,
                -falling(d, 2),
                diag(lin(5, 30, 0, [0, 105, 0, 34, 8]), 2),
            ),
            padded(d, falling(d, 3), diag(lin(48, 440, 0, [0; 5]), 3)),
            padded(
                d,
                falling(d, 4) / q(2),
                diag(lin(5, 30, 0, [0; 5]), 2).pow(2),
            ),
        ],
    )
}

pub fn first_integral_class(surface: &SurfaceData, xi: &H2Class, d: usize) -> ConcreteClass {
    first_integral_symbolic(d).specialize(surface, xi)
}

pub fn correction_class(surface: &SurfaceData, xi: &H2Class, d: usize) -> ConcreteClass {
    correction_symbolic(d).specialize(surface, xi)
}

#[allow(non_snake_case)]
pub fn R_class(surface: &SurfaceData, xi: &H2Class, d: usize) -> ConcreteClass {
    r_symbolic(d).specialize(surface, xi)
}

/// Checks `first + correction = R_d` on the monomials of codimension at most
/// [`VALIDITY_CODIM`]; beyond that the two sides differ by design.
pub fn check_r_identity(d: usize) -> Result<()> {
    let lhs = first_integral_symbolic(d)
        .add(&correction_symbolic(d))
        .truncate(VALIDITY_CODIM);
    let rhs = r_symbolic(d).truncate(VALIDITY_CODIM);
    if lhs != rhs {
        let diff = lhs.sub(&rhs);
        return Err(Error::IdentityViolation(format!(
            "R_{d} identity fails by\n  {diff}"
        )));
    }
    Ok(())
}

fn xi_pt(d: usize, x: usize, y: usize) -> SymMonomial<LinClass> {
    let mut fs = vec![(1, LinClass::xi()); x];
    fs.extend(std::iter::repeat_n((1, LinClass::pt()), y));
    SymMonomial::new(d, fs).expect("monomial fits its level")
}

fn s2_rule(p: &Poly) -> Poly {
    p.substitute(Var::S2, &(&v(Var::KSq).scale(&q(2)) - &c(12)))
}

/// Monomial type `(x, y)` of `xi^{*x} pt^{*y} 1^{*...}`, if the monomial has
/// that shape.
fn xi_pt_shape(m: &SymMonomial<LinClass>) -> Option<(usize, usize)> {
    let mut x = 0;
    let mut y = 0;
    for (size, f) in m.factors() {
        if *size != 1 {
            return None;
        }
        if *f == LinClass::xi() {
            x += 1;
        } else if *f == LinClass::pt() {
            y += 1;
        } else {
            return None;
        }
    }
    Some((x, y))
}

/// The printed six-term `U_d`, with `xi^2` and `K^2` symbolic.
pub fn printed_u(d: usize) -> SymbolicClass {
    let di = d as i64;
    let (xs, ks) = (v(Var::XiSq), v(Var::KSq));
    let lin_d = |a: i64, b: i64, e: i64, f: i64| {
        &(&(&xs.scale(&q(a)) + &ks.scale(&q(b))) + &c(e * di)) + &c(f)
    };
    let dd1 = q(di * (di - 1));
    let table: Vec<((usize, usize), Poly)> = vec![
        ((0, 0), Poly::constant(two_pow(di))),
        ((1, 0), Poly::constant(two_pow(di + 1) * q(di))),
        ((2, 0), Poly::constant(two_pow(di + 1) * &dd1)),
        ((0, 1), lin_d(3, 1, -5, 5).scale(&(two_pow(di) * q(di)))),
        ((1, 1), lin_d(6, 2, -10, 5).scale(&(two_pow(di) * &dd1))),
        (
            (0, 2),
            [
                (&xs * &xs).scale(&q(18)),
                (&xs * &ks).scale(&q(12)),
                (&ks * &ks).scale(&q(2)),
                xs.scale(&q(-60 * di)),
                ks.scale(&q(-20 * di)),
                c(50 * di * di),
                xs.scale(&q(15)),
                ks.scale(&q(-10)),
                c(-34 * di),
                c(-36),
            ]
            .iter()
            .fold(Poly::zero(), |a, b| &a + b)
            .scale(&(two_pow(di - 2) * &dd1)),
        ),
    ];
    table
        .into_iter()
        .filter(|((x, y), _)| x + y <= d)
        .fold(SymClass::zero(d), |acc, ((x, y), coef)| {
            acc.add(&SymClass::from_monomial(xi_pt(d, x, y), coef))
        })
}

/// Reduce `R_d` along the diagonals, keep the monomials `xi^{*x} pt^{*y}`
/// with `x + y <= 2`, and set `s2 = 2K^2 - 12`.
pub fn derive_u_symbolic(d: usize) -> Result<SymbolicClass> {
    let reduced = r_symbolic(d).reduce_diagonal();
    let mut out = SymClass::zero(d);
    for (m, coef) in reduced.terms() {
        match xi_pt_shape(&m) {
            Some((x, y)) if x + y <= 2 => out = out.add(&SymClass::from_monomial(m, s2_rule(coef))),
            Some(_) => {}
            None => {
                return Err(Error::IdentityViolation(format!(
                    "reduction left a non-point monomial {m}"
                )))
            }
        }
    }
    let printed = printed_u(d);
    if out != printed {
        return Err(Error::IdentityViolation(format!(
            "U_{d} differs from the printed form by\n  {}",
            out.sub(&printed)
        )));
    }
    Ok(out)
}

#[allow(non_snake_case)]
pub fn derive_U(surface: &SurfaceData, xi: &H2Class, d: usize) -> Result<ConcreteClass> {
    Ok(derive_u_symbolic(d)?.specialize(surface, xi))
}
