//! Machine-readable reports and their plain-text tables.
//!
//! Rationals are always written as exact `"p/q"` strings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{approx, serde_q, Q};
use crate::delta::{Term, TotalChange};
use crate::surface::H2Class;
use crate::walls::{Admissibility, Goodness, Miniwall, WallClass};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRow {
    pub xi: H2Class,
    pub xi_sq: i64,
    pub d: i64,
    pub e: i64,
    pub rk_minus: i64,
    pub rk_plus: i64,
    #[serde(with = "serde_q")]
    pub t0: Q,
    pub goodness: Goodness,
    pub component_case: bool,
}

impl From<&WallClass> for WallRow {
    fn from(w: &WallClass) -> Self {
        Self {
            xi: w.xi.clone(),
            xi_sq: w.xi_sq,
            d: w.d,
            e: w.e,
            rk_minus: w.rk_minus,
            rk_plus: w.rk_plus,
            t0: w.t0.clone(),
            goodness: w.goodness,
            component_case: w.component_case,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallsReport {
    pub walls: Vec<WallRow>,
    pub fine: bool,
    pub fine_note: String,
    pub admissibility: Admissibility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiniwallsReport {
    pub xi: H2Class,
    pub d: i64,
    #[serde(rename = "C")]
    pub c: H2Class,
    pub miniwalls: Vec<Miniwall>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaWall {
    pub xi: H2Class,
    pub d: i64,
    pub e: i64,
    pub goodness: Goodness,
    pub exact: bool,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub walls: Vec<DeltaWall>,
    pub n2: u64,
    pub sign: i64,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_q::option"
    )]
    pub alpha_eval: Option<Q>,
    /// `"exact"` or `"leading-order"`, present together with `alpha_eval`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_eval_kind: Option<String>,
}

impl DeltaReport {
    pub fn new(total: &TotalChange, alpha_eval: Option<(Q, bool)>) -> Self {
        let walls = total
            .contributions
            .iter()
            .map(|c| DeltaWall {
                xi: c.wall.xi.clone(),
                d: c.wall.d,
                e: c.wall.e,
                goodness: c.wall.goodness,
                exact: c.delta.exact,
                terms: c.delta.terms.clone(),
            })
            .collect();
        let (alpha_eval, alpha_eval_kind) = match alpha_eval {
            Some((v, exact)) => (
                Some(v),
                Some(if exact { "exact" } else { "leading-order" }.to_string()),
            ),
            None => (None, None),
        };
        Self {
            walls,
            n2: total.n2,
            sign: total.sign,
            alpha_eval,
            alpha_eval_kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub level: u32,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("reports serialize")
}

fn decimal(x: &Q, show: bool) -> String {
    if show {
        format!(" (~{:.6})", approx(x))
    } else {
        String::new()
    }
}

pub fn walls_table(r: &WallsReport, decimals: bool) -> String {
    let mut out = String::new();
    if r.walls.is_empty() {
        out.push_str("no separating classes\n");
    } else {
        writeln!(
            out,
            "{:<16} {:>6} {:>4} {:>4} {:>5} {:>5} {:>16} {:>10} {:>9}",
            "xi", "xi^2", "d", "e", "rk-", "rk+", "t0", "goodness", "component"
        )
        .unwrap();
        for w in &r.walls {
            writeln!(
                out,
                "{:<16} {:>6} {:>4} {:>4} {:>5} {:>5} {:>16} {:>10} {:>9}{}",
                w.xi.to_string(),
                w.xi_sq,
                w.d,
                w.e,
                w.rk_minus,
                w.rk_plus,
                w.t0.to_string(),
                w.goodness.label(),
                if w.component_case { "yes" } else { "no" },
                decimal(&w.t0, decimals)
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        "fine moduli: {} ({})",
        if r.fine { "yes" } else { "not certified" },
        r.fine_note
    )
    .unwrap();
    let a = &r.admissibility;
    writeln!(
        out,
        "admissibility: H_minus off walls: {}, H_plus off walls: {}, parity clause: {}; {}",
        a.h_minus_off_walls, a.h_plus_off_walls, a.dimension_clause, a.note
    )
    .unwrap();
    out
}

pub fn miniwalls_table(r: &MiniwallsReport, decimals: bool) -> String {
    let mut out = format!("xi = {}, d = {}, C = {}\n", r.xi, r.d, r.c);
    if r.miniwalls.is_empty() {
        out.push_str("no miniwalls in [0,1]\n");
    }
    for m in &r.miniwalls {
        writeln!(
            out,
            "a = {}{}  (n, m) = ({}, {})",
            m.a,
            decimal(&m.a, decimals),
            m.n,
            m.m
        )
        .unwrap();
    }
    out
}

pub fn delta_table(r: &DeltaReport, decimals: bool) -> String {
    let mut out = String::new();
    for w in &r.walls {
        let tag = match (w.exact, w.goodness) {
            (true, Goodness::CertifiedGood) => "exact",
            (false, Goodness::CertifiedGood) => "leading six terms",
            (true, Goodness::Unknown) => "exact, UNCERTIFIED wall",
            (false, Goodness::Unknown) => "leading six terms, UNCERTIFIED wall",
        };
        writeln!(out, "xi = {}  d = {}  e = {}  [{tag}]", w.xi, w.d, w.e).unwrap();
        if w.terms.is_empty() {
            out.push_str("  delta = 0\n");
        }
        for t in &w.terms {
            writeln!(
                out,
                "  {:>24} * L^{} * q^{}",
                t.coef.to_string(),
                t.pow_l,
                t.pow_q
            )
            .unwrap();
        }
    }
    if r.walls.is_empty() {
        out.push_str("no separating classes; the invariants do not change\n");
    }
    writeln!(out, "n2 = {}, sign (-1)^(c1^2 + c1.K) = {:+}", r.n2, r.sign).unwrap();
    out.push_str("the sign relates these invariants to the gauge-theoretic ones only for admissible moduli or c2 >> 0\n");
    if let (Some(v), Some(kind)) = (&r.alpha_eval, &r.alpha_eval_kind) {
        writeln!(
            out,
            "total change at alpha: {v}{} ({kind})",
            decimal(v, decimals)
        )
        .unwrap();
    }
    out
}

pub fn verify_table(r: &VerifyReport) -> String {
    let mut out = format!("verification suites (level {}, seed {})\n", r.level, r.seed);
    for s in &r.suites {
        writeln!(
            out,
            "[{}] {}: {}",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.detail
        )
        .unwrap();
    }
    out
}
