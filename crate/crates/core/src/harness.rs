//! Named, exhaustive checks of every identity the crate implements.
//!
//! Each check enumerates objects up to its own ceiling (capped by the caller's
//! `n_max`) and compares exactly against either the triangles, independent
//! brute-force counts, or the golden tables in `golden/`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bijections::{self, algo3, phi_f, tau_flip, BijectionError, BijectionId};
use crate::families::{
    self, enumerate_classes, enumerate_perms, filter_windows, perm_index, psi_cud,
    psi_vs, recurrence_step_cud, recurrence_step_vs, steps_at, FamilyError, FamilyId,
    PairingReport, Step,
};
use crate::perm::{cycle_form, left_to_right_minima, peak_positions, CycleForm, SignedPerm};
use crate::poly::LaurentPoly;
use crate::trees::{classify, gen_trees, rightmost_labels, tree12_of, BinTree, TreeError, TreeKind};
use crate::triangles::{
    arnold_hoffman, arnold_numbers, entringer, hoffman_pq, ArnoldRow, TriangleError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error("size {n} outside 1..={cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("golden data: {0}")]
    Golden(String),
    #[error(transparent)]
    Family(FamilyError),
    #[error(transparent)]
    Bijection(BijectionError),
    #[error(transparent)]
    Tree(TreeError),
}

impl From<FamilyError> for HarnessError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::SizeCapExceeded { n, cap } => Self::SizeCapExceeded { n, cap },
            e => Self::Family(e),
        }
    }
}

impl From<BijectionError> for HarnessError {
    fn from(e: BijectionError) -> Self {
        match e {
            BijectionError::Family(f) => f.into(),
            e => Self::Bijection(e),
        }
    }
}

impl From<TreeError> for HarnessError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Family(f) => f.into(),
            e => Self::Tree(e),
        }
    }
}

impl From<TriangleError> for HarnessError {
    fn from(e: TriangleError) -> Self {
        Self::Overflow(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::ReportOnly => "report-only",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub n_range: (usize, usize),
    pub status: Status,
    pub details: Vec<String>,
    pub elapsed_ms: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

// ---------------------------------------------------------------------------
// golden data

const ARNOLD_NUMBERS: &str = include_str!("../golden/arnold_numbers.txt");
const ARNOLD_POLYS: &str = include_str!("../golden/arnold_polys.txt");
const SMALL_FAMILIES: &str = include_str!("../golden/small_families.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    pub numbers: Vec<ArnoldRow<u64>>,
    /// `(K(𝔇_n), K(𝔅_n))` per row.
    pub springer: Vec<(u64, u64)>,
    pub polys: Vec<ArnoldRow<LaurentPoly>>,
    /// `(tag, n)` to listed members.
    pub listings: BTreeMap<(String, usize), Vec<String>>,
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_row<T, F>(line: &str, parse: F) -> Result<(ArnoldRow<T>, Vec<&str>), HarnessError>
where
    F: Fn(&str) -> Option<T>,
{
    let bad = || HarnessError::Golden(format!("bad row {line:?}"));
    let parts: Vec<&str> = line.split('|').map(str::trim).collect();
    if parts.len() < 3 {
        return Err(bad());
    }
    let n: usize = parts[0].parse().map_err(|_| bad())?;
    let cells = |s: &str| s.split_whitespace().map(&parse).collect::<Option<Vec<T>>>();
    let neg = cells(parts[1]).ok_or_else(bad)?;
    let pos = cells(parts[2]).ok_or_else(bad)?;
    if neg.len() != n || pos.len() != n {
        return Err(bad());
    }
    Ok((ArnoldRow { n, neg, pos }, parts[3..].to_vec()))
}

impl Golden {
    pub fn parse(numbers: &str, polys: &str, families: &str) -> Result<Self, HarnessError> {
        let mut g = Golden {
            numbers: Vec::new(),
            springer: Vec::new(),
            polys: Vec::new(),
            listings: BTreeMap::new(),
        };
        for line in data_lines(numbers) {
            let (row, rest) = parse_row(line, |s| s.parse::<u64>().ok())?;
            let k: Vec<u64> = rest
                .first()
                .map(|s| s.split_whitespace().filter_map(|x| x.parse().ok()).collect())
                .unwrap_or_default();
            if k.len() != 2 {
                return Err(HarnessError::Golden(format!("missing Springer numbers in {line:?}")));
            }
            g.springer.push((k[0], k[1]));
            g.numbers.push(row);
        }
        for line in data_lines(polys) {
            g.polys.push(parse_row(line, |s| s.parse::<LaurentPoly>().ok())?.0);
        }
        for line in data_lines(families) {
            let (head, body) = line
                .split_once('|')
                .ok_or_else(|| HarnessError::Golden(format!("bad listing {line:?}")))?;
            let mut h = head.split_whitespace();
            let (Some(tag), Some(n)) = (h.next(), h.next().and_then(|x| x.parse::<usize>().ok())) else {
                return Err(HarnessError::Golden(format!("bad listing head {head:?}")));
            };
            let items = body.split(';').map(|s| s.trim().to_string()).collect();
            g.listings.insert((tag.to_string(), n), items);
        }
        Ok(g)
    }

    pub fn embedded() -> Self {
        Self::parse(ARNOLD_NUMBERS, ARNOLD_POLYS, SMALL_FAMILIES).expect("embedded golden data parses")
    }

    /// Reads `arnold_numbers.txt`, `arnold_polys.txt` and `small_families.txt`.
    pub fn from_dir(dir: &Path) -> Result<Self, HarnessError> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| HarnessError::Golden(format!("{}: {e}", dir.join(name).display())))
        };
        Self::parse(&read("arnold_numbers.txt")?, &read("arnold_polys.txt")?, &read("small_families.txt")?)
    }

    fn listing(&self, tag: &str, n: usize) -> Option<&Vec<String>> {
        self.listings.get(&(tag.to_string(), n))
    }
}

// ---------------------------------------------------------------------------
// registry

type Runner = fn(&Golden, usize) -> Result<Vec<String>, HarnessError>;

#[derive(Clone, Copy)]
pub struct CheckSpec {
    pub id: &'static str,
    /// Default n ceiling.
    pub ceiling: usize,
    pub report_only: bool,
    /// The claim under test.
    pub claim: &'static str,
    run: Runner,
}

impl fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckSpec")
            .field("id", &self.id)
            .field("ceiling", &self.ceiling)
            .field("report_only", &self.report_only)
            .finish()
    }
}

macro_rules! check {
    ($id:literal, $ceil:expr, $run:expr, $claim:literal) => {
        CheckSpec { id: $id, ceiling: $ceil, report_only: false, claim: $claim, run: $run }
    };
}

pub static REGISTRY: &[CheckSpec] = &[
    check!("table-arnold", 5, table_arnold, "Arnold numbers and Springer row sums match the printed table"),
    check!("table-polys", 5, table_polys, "Arnold-Hoffman polynomials match the printed table"),
    check!("poly-at-1", 10, poly_at_1, "V(n,k)(1) = v(n,k)"),
    check!("row-sums-springer", 7, row_sums_springer, "row sums equal |S0_n| and |S_n| - |S0_n| counted directly"),
    check!("hoffman-q", 10, hoffman_q, "t Q_n is the positive row sum; Q_n(0) is the secant number"),
    check!("hoffman-p", 10, hoffman_p, "P_n - t Q_n is the negative row sum; P_n(0) is the tangent number"),
    check!("entringer-alternating", 8, entringer_alternating, "alternating permutations by first entry give E(n,k)"),
    check!("snakes-arnold", 5, snakes_arnold, "snakes by first entry give v(n,k) and v(n,-k)"),
    check!("thm-cud", 7, thm_cud, "npk over signed cycle-up-down permutations gives V(n,k)"),
    check!("thm-vs", 7, thm_vs, "neg over valley signed permutations gives V(n,k)"),
    check!("thm-fl", 6, thm_fl, "spk over flip classes split by smax sign gives V(n,k)"),
    check!("thm-trees", 7, thm_trees, "emp over complete increasing trees gives V(n,k)"),
    check!("bij-cud-b", 7, bij_cud_b, "cycle-up-down type B to open trees, index preserving bijection"),
    check!("bij-cud-d", 7, bij_cud_d, "cycle-up-down type D to starred trees, index preserving bijection"),
    check!("bij-vs-b", 7, bij_vs_b, "valley signed type B to open trees, index preserving bijection"),
    check!("bij-vs-d", 7, bij_vs_d, "valley signed type D to starred trees, index preserving bijection"),
    check!("bij-fl", 6, bij_fl, "flip classes to all trees, well defined, rightmost label |smax|"),
    check!("cor-rightmost-cycle-min", 6, cor_cycle_min, "rightmost path labels are the cycle minima"),
    check!("cor-rightmost-ltr-min", 6, cor_ltr_min, "rightmost path labels are the left-to-right minima"),
    check!("lemma-emp-spk", 6, lemma_emp_spk, "emp of the class tree is n + 1 - 2 spk"),
    check!("lemma-peak-leaf", 7, lemma_peak_leaf, "min-split nodes with two empty children are exactly the peaks"),
    check!("knuth-flip-euler", 7, knuth_flip_euler, "unsigned flip classes number E_n and are the 1-2 tree fibers"),
    check!("recstep-cud", 6, recstep_cud, "recurrence steps on cycle-up-down permutations are bijections with the stated npk shifts"),
    check!("recstep-vs", 6, recstep_vs, "recurrence steps on valley signed permutations are bijections with the stated neg shifts"),
    check!("smax-well-defined", 6, smax_well_defined, "smax is constant on flip classes"),
    check!("spk-well-defined", 6, spk_well_defined, "spk is constant on flip classes"),
    CheckSpec {
        id: "report-emp-npk-perobject",
        ceiling: 6,
        report_only: true,
        claim: "how often emp of the cycle tree equals n + 1 - 2 npk object by object",
        run: report_emp_npk,
    },
];

pub fn check_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|c| c.id)
}

pub fn find_check(id: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|c| c.id == id)
}

pub fn verify(check_id: &str, n_max: usize) -> Result<CheckResult, HarnessError> {
    verify_with(check_id, n_max, &Golden::embedded())
}

pub fn verify_with(check_id: &str, n_max: usize, golden: &Golden) -> Result<CheckResult, HarnessError> {
    let spec = find_check(check_id).ok_or_else(|| HarnessError::UnknownCheck(check_id.to_string()))?;
    run_spec(spec, n_max, golden)
}

fn run_spec(spec: &CheckSpec, n_max: usize, golden: &Golden) -> Result<CheckResult, HarnessError> {
    if n_max == 0 {
        return Err(HarnessError::SizeCapExceeded { n: 0, cap: families::size_cap() });
    }
    let n = spec.ceiling.min(n_max);
    let start = Instant::now();
    let details = (spec.run)(golden, n)?;
    let status = match (spec.report_only, details.is_empty()) {
        (true, _) => Status::ReportOnly,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    Ok(CheckResult {
        check_id: spec.id.to_string(),
        n_range: (1, n),
        status,
        details,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Thread count from `ARNOLD_THREADS`, if set to a positive integer.
pub fn configured_threads() -> Option<usize> {
    std::env::var("ARNOLD_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0)
}

pub fn verify_all(n_max: usize) -> Result<Vec<CheckResult>, HarnessError> {
    verify_all_with(n_max, &Golden::embedded())
}

/// Runs every registered check in parallel; results come back in registry
/// order.
pub fn verify_all_with(n_max: usize, golden: &Golden) -> Result<Vec<CheckResult>, HarnessError> {
    if n_max == 0 {
        return Err(HarnessError::SizeCapExceeded { n: 0, cap: families::size_cap() });
    }
    let run = || REGISTRY.par_iter().map(|s| run_spec(s, n_max, golden)).collect();
    match configured_threads() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| HarnessError::Overflow(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

// ---------------------------------------------------------------------------
// helpers

const MAX_DETAILS: usize = 25;

fn truncate(mut v: Vec<String>) -> Vec<String> {
    if v.len() > MAX_DETAILS {
        let extra = v.len() - MAX_DETAILS;
        v.truncate(MAX_DETAILS);
        v.push(format!("... and {extra} more"));
    }
    v
}

fn compare_rows<T: PartialEq + fmt::Display>(
    what: &str,
    got: &ArnoldRow<T>,
    want: &ArnoldRow<T>,
    out: &mut Vec<String>,
) {
    for ((k, g), (_, w)) in got.entries().zip(want.entries()) {
        if g != w {
            out.push(format!("{what} n={} k={k}: got {g}, expected {w}", got.n));
        }
    }
}

/// Builds the row `V(n,±k) = Σ t^e` from `(d_side, family index, exponent)`
/// triples, with family index `n-k+1` landing at `k`.
fn row_from<I>(n: usize, items: I) -> Result<ArnoldRow<LaurentPoly>, HarnessError>
where
    I: IntoIterator<Item = (bool, usize, i32)>,
{
    let mut row = ArnoldRow { n, neg: vec![LaurentPoly::zero(); n], pos: vec![LaurentPoly::zero(); n] };
    for (d_side, idx, e) in items {
        if idx == 0 || idx > n {
            return Err(HarnessError::Golden(format!("index {idx} out of range for n={n}")));
        }
        let k = n - idx + 1;
        let slot = if d_side { &mut row.neg[n - k] } else { &mut row.pos[k - 1] };
        slot.add_term(e, 1).map_err(|e| HarnessError::Overflow(e.to_string()))?;
    }
    Ok(row)
}

fn polys_up_to(n: usize) -> Result<Vec<ArnoldRow<LaurentPoly>>, HarnessError> {
    Ok(arnold_hoffman(n)?)
}

fn exp_of(n: usize, stat: u32) -> i32 {
    n as i32 + 1 - 2 * stat as i32
}

fn listing_check(golden: &Golden, f: FamilyId, n: usize, out: &mut Vec<String>) -> Result<(), HarnessError> {
    let Some(listed) = golden.listing(f.tag(), n) else {
        return Ok(());
    };
    let bad = |s: &str| HarnessError::Golden(format!("{} {n}: cannot read {s:?}", f.tag()));
    let window = |s: &str| -> Result<SignedPerm, HarnessError> {
        let w: Vec<i32> = s.split_whitespace().map(|x| x.parse().map_err(|_| bad(s))).collect::<Result<_, _>>()?;
        SignedPerm::from_window(&w).map_err(|_| bad(s))
    };
    let (want, got): (BTreeSet<String>, BTreeSet<String>) = if f.is_cycle_family() {
        let want = listed
            .iter()
            .map(|s| s.parse::<CycleForm>().map(|c| c.to_string()).map_err(|_| bad(s)))
            .collect::<Result<_, _>>()?;
        let got = enumerate_perms(f, n)?.iter().map(|p| cycle_form(p).to_string()).collect();
        (want, got)
    } else if f.is_flip() {
        let classes = families::flip_classes_signed(n)?;
        let canon_of: HashMap<SignedPerm, String> = classes
            .iter()
            .flat_map(|c| c.members.iter().map(move |m| (m.clone(), c.canon.to_string())))
            .collect();
        let mut want = BTreeSet::new();
        for s in listed {
            if !want.insert(canon_of[&window(s)?].clone()) {
                out.push(format!("{} n={n}: listed class of {s} appears twice", f.tag()));
            }
        }
        let got = enumerate_classes(f, n)?.iter().map(|c| c.canon.to_string()).collect();
        (want, got)
    } else {
        let want = listed.iter().map(|s| window(s).map(|p| p.to_string())).collect::<Result<_, _>>()?;
        let got = enumerate_perms(f, n)?.iter().map(|p| p.to_string()).collect();
        (want, got)
    };
    for s in want.difference(&got) {
        out.push(format!("{} n={n}: listed {s} not enumerated", f.tag()));
    }
    for s in got.difference(&want) {
        out.push(format!("{} n={n}: enumerated {s} not listed", f.tag()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// triangle checks

fn table_arnold(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = arnold_numbers(n)?;
    let mut out = Vec::new();
    for (row, (want, &(kd, kb))) in rows.iter().zip(g.numbers.iter().zip(&g.springer)) {
        compare_rows("v", row, want, &mut out);
        let (d, b): (u64, u64) = (row.neg.iter().sum(), row.pos.iter().sum());
        if (d, b) != (kd, kb) {
            out.push(format!("n={}: row sums ({d}, {b}), expected ({kd}, {kb})", row.n));
        }
    }
    if g.numbers.len() < n {
        out.push(format!("golden table stops at n={}", g.numbers.len()));
    }
    Ok(out)
}

fn table_polys(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = polys_up_to(n)?;
    let mut out = Vec::new();
    for (row, want) in rows.iter().zip(&g.polys) {
        compare_rows("V", row, want, &mut out);
    }
    if g.polys.len() < n {
        out.push(format!("golden table stops at n={}", g.polys.len()));
    }
    Ok(out)
}

fn poly_at_1(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let nums = arnold_numbers(n)?;
    let polys = polys_up_to(n)?;
    let mut out = Vec::new();
    for (a, b) in nums.iter().zip(&polys) {
        for ((k, x), (_, v)) in a.entries().zip(b.entries()) {
            let at1 = v.eval_at_one().map_err(|e| HarnessError::Overflow(e.to_string()))?;
            if at1 != *x as i64 {
                out.push(format!("n={} k={k}: V(1) = {at1}, v = {x}", a.n));
            }
        }
    }
    Ok(out)
}

fn row_sums_springer(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = arnold_numbers(n)?;
    let mut out = Vec::new();
    for row in &rows {
        let m = row.n;
        let (d, b): (u64, u64) = (row.neg.iter().sum(), row.pos.iter().sum());
        // S_n: σ_1 > σ_2 < σ_3 > … over all of 𝔅_n; S⁰_n adds σ_1 > 0.
        // Type B counts S⁰_n itself, not S_n (|S_2| = 4 but the row sum is 3).
        let all = filter_windows(m, true, |w| {
            w.windows(2).enumerate().all(|(i, p)| if i % 2 == 0 { p[0] > p[1] } else { p[0] < p[1] })
        });
        let s = all.len() as u64;
        let s0 = all.iter().filter(|p| p.window()[0] > 0).count() as u64;
        if b != s0 || d != s - s0 {
            out.push(format!("n={m}: row sums (D {d}, B {b}), direct counts (D {}, B {s0})", s - s0));
        }
        if let Some(&(kd, kb)) = g.springer.get(m - 1) {
            if (d, b) != (kd, kb) {
                out.push(format!("n={m}: row sums ({d}, {b}), table ({kd}, {kb})"));
            }
        }
    }
    Ok(out)
}

fn euler_numbers(n: usize) -> Result<Vec<u64>, HarnessError> {
    Ok(entringer(n)?.iter().map(|r| r.iter().sum()).collect())
}

fn hoffman_q(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = polys_up_to(n)?;
    let pq = hoffman_pq(n)?;
    let euler = euler_numbers(n)?;
    let mut out = Vec::new();
    for (i, (row, (_, q))) in rows.iter().zip(&pq).enumerate() {
        let m = i + 1;
        let sum = row
            .pos
            .iter()
            .try_fold(LaurentPoly::zero(), |a, v| a.checked_add(v))
            .map_err(|e| HarnessError::Overflow(e.to_string()))?;
        if q.shift(1) != sum {
            out.push(format!("n={m}: t Q_n = {}, positive row sum = {sum}", q.shift(1)));
        }
        let want = if m % 2 == 0 { euler[i] as i64 } else { 0 };
        if q.coeff(0) != want {
            out.push(format!("n={m}: Q_n(0) = {}, expected {want}", q.coeff(0)));
        }
    }
    Ok(out)
}

fn hoffman_p(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = polys_up_to(n)?;
    let pq = hoffman_pq(n)?;
    let euler = euler_numbers(n)?;
    let mut out = Vec::new();
    for (i, (row, (p, q))) in rows.iter().zip(&pq).enumerate() {
        let m = i + 1;
        let ov = |e: crate::poly::PolyError| HarnessError::Overflow(e.to_string());
        let lhs = p.checked_sub(&q.shift(1)).map_err(ov)?;
        let sum = row.neg.iter().try_fold(LaurentPoly::zero(), |a, v| a.checked_add(v)).map_err(ov)?;
        if lhs != sum {
            out.push(format!("n={m}: P_n - t Q_n = {lhs}, negative row sum = {sum}"));
        }
        let want = if m % 2 == 1 { euler[i] as i64 } else { 0 };
        if p.coeff(0) != want {
            out.push(format!("n={m}: P_n(0) = {}, expected {want}", p.coeff(0)));
        }
    }
    Ok(out)
}

fn entringer_alternating(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let e = entringer(n)?;
    let mut out = Vec::new();
    for m in 1..=n {
        let mut counts = vec![0u64; m];
        for p in enumerate_perms(FamilyId::Alternating, m)? {
            counts[p.window()[0] as usize - 1] += 1;
        }
        if counts != e[m - 1] {
            out.push(format!("n={m}: first entries {counts:?}, Entringer row {:?}", e[m - 1]));
        }
    }
    Ok(out)
}

fn snakes_arnold(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let rows = arnold_numbers(n)?;
    let mut out = Vec::new();
    for row in &rows {
        let m = row.n;
        let mut got = ArnoldRow { n: m, neg: vec![0u64; m], pos: vec![0u64; m] };
        for p in enumerate_perms(FamilyId::SnakesB, m)? {
            got.pos[p.window()[0] as usize - 1] += 1;
        }
        for p in enumerate_perms(FamilyId::SnakesD, m)? {
            got.neg[(m as i32 + p.window()[0]) as usize] += 1;
        }
        compare_rows("snakes", &got, row, &mut out);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// refined families

fn family_rows<S>(
    b: FamilyId,
    d: FamilyId,
    n: usize,
    stat: S,
) -> Result<Vec<String>, HarnessError>
where
    S: Fn(&SignedPerm) -> u32,
{
    let want = polys_up_to(n)?;
    let mut out = Vec::new();
    for m in 1..=n {
        let mut items = Vec::new();
        for (f, d_side) in [(b, false), (d, true)] {
            for p in enumerate_perms(f, m)? {
                items.push((d_side, perm_index(f, p.window()), exp_of(m, stat(&p))));
            }
        }
        compare_rows("V", &row_from(m, items)?, &want[m - 1], &mut out);
    }
    Ok(out)
}

fn npk(p: &SignedPerm) -> u32 {
    families::cud_shape(p.window()).map_or(u32::MAX, |s| s.npk)
}

fn thm_cud(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n.min(3) {
        listing_check(g, FamilyId::CudB, m, &mut out)?;
        listing_check(g, FamilyId::CudD, m, &mut out)?;
    }
    out.extend(family_rows(FamilyId::CudB, FamilyId::CudD, n, npk)?);
    Ok(truncate(out))
}

fn thm_vs(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n.min(3) {
        listing_check(g, FamilyId::VsB, m, &mut out)?;
        listing_check(g, FamilyId::VsD, m, &mut out)?;
    }
    out.extend(family_rows(FamilyId::VsB, FamilyId::VsD, n, |p| p.neg())?);
    Ok(truncate(out))
}

fn thm_fl(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let want = polys_up_to(n)?;
    let mut out = Vec::new();
    for m in 1..=n {
        if m <= 3 {
            listing_check(g, FamilyId::FlB, m, &mut out)?;
            listing_check(g, FamilyId::FlD, m, &mut out)?;
        }
        let classes = families::flip_classes_signed(m)?;
        let items = classes
            .iter()
            .map(|c| (c.smax < 0, c.smax.unsigned_abs() as usize, exp_of(m, c.spk)));
        compare_rows("V", &row_from(m, items)?, &want[m - 1], &mut out);
    }
    Ok(truncate(out))
}

fn thm_trees(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let want = polys_up_to(n)?;
    let mut out = Vec::new();
    for m in 1..=n {
        let items: Vec<_> = gen_trees(m)?
            .iter()
            .map(|t| {
                let c = classify(t);
                (c.kind == TreeKind::Star, c.rightmost_label as usize, c.emp as i32)
            })
            .collect();
        compare_rows("V", &row_from(m, items)?, &want[m - 1], &mut out);
    }
    Ok(truncate(out))
}

// ---------------------------------------------------------------------------
// bijections

/// Images must be valid trees of the promised kind with rightmost label equal
/// to the family index, pairwise distinct, and as many as the codomain.
fn bijection_check(b: BijectionId, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        let trees = gen_trees(m)?;
        let codomain: HashSet<&BinTree> =
            trees.iter().filter(|t| b.kind().is_none_or(|k| classify(t).kind == k)).collect();
        let pairs = bijections::map_all(b, m)?;
        let mut seen: HashMap<&BinTree, String> = HashMap::new();
        for pair in &pairs {
            let src = pair.source.window().iter().map(i32::to_string).collect::<Vec<_>>().join(" ");
            if let Err(e) = pair.target.validate(m) {
                out.push(format!("n={m}: {src}: {e}"));
                continue;
            }
            let smax_negative = pair.source.as_class().is_some_and(|c| c.smax < 0);
            if !bijections::lands_in(b, &pair.target, pair.index, smax_negative) {
                let c = classify(&pair.target);
                out.push(format!(
                    "n={m}: {src} (index {}) maps to {} with kind {} and rightmost label {}",
                    pair.index, pair.target, c.kind, c.rightmost_label
                ));
            }
            if let Some(prev) = seen.insert(&pair.target, src.clone()) {
                out.push(format!("n={m}: {prev} and {src} both map to {}", pair.target));
            }
        }
        if pairs.len() != codomain.len() {
            out.push(format!("n={m}: domain has {} objects, codomain {}", pairs.len(), codomain.len()));
        }
    }
    Ok(truncate(out))
}

fn bij_cud_b(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    bijection_check(BijectionId::CudB, n)
}

fn bij_cud_d(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    bijection_check(BijectionId::CudD, n)
}

fn bij_vs_b(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    bijection_check(BijectionId::VsB, n)
}

fn bij_vs_d(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    bijection_check(BijectionId::VsD, n)
}

fn bij_fl(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    bijection_check(BijectionId::Flip, n)
}

fn cor_cycle_min(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        for b in [BijectionId::CudB, BijectionId::CudD] {
            for pair in bijections::map_all(b, m)? {
                let p = pair.source.as_perm().expect("permutation family");
                let mut mins: Vec<u32> = cycle_form(p).cycles.iter().map(|c| c.leader() as u32).collect();
                let mut labels = rightmost_labels(&pair.target);
                mins.sort_unstable();
                labels.sort_unstable();
                if mins != labels {
                    out.push(format!("{p}: rightmost labels {labels:?}, cycle minima {mins:?}"));
                }
            }
        }
    }
    Ok(truncate(out))
}

fn cor_ltr_min(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        for b in [BijectionId::VsB, BijectionId::VsD] {
            for pair in bijections::map_all(b, m)? {
                let p = pair.source.as_perm().expect("permutation family");
                let mut mins: Vec<u32> =
                    left_to_right_minima(&p.abs_values()).into_iter().map(|x| x as u32).collect();
                let mut labels = rightmost_labels(&pair.target);
                mins.sort_unstable();
                labels.sort_unstable();
                if mins != labels {
                    out.push(format!("{p}: rightmost labels {labels:?}, left-to-right minima {mins:?}"));
                }
            }
        }
    }
    Ok(truncate(out))
}

fn lemma_emp_spk(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        for c in families::flip_classes_signed(m)? {
            let t = phi_f(&c)?;
            let want = m as i64 + 1 - 2 * c.spk as i64;
            if t.emp() as i64 != want {
                out.push(format!("[{}]: emp {} but n + 1 - 2 spk = {want}", c.canon, t.emp()));
            }
        }
    }
    Ok(truncate(out))
}

fn lemma_peak_leaf(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        for p in filter_windows(m, false, |_| true) {
            let w = p.window();
            let t = algo3(w);
            let peaks: HashSet<usize> = peak_positions(w).into_iter().collect();
            for (i, &x) in w.iter().enumerate().skip(1) {
                if t.has_two_empty_children(x as u32) != peaks.contains(&i) {
                    out.push(format!("{p}: entry {x} at position {}", i + 1));
                }
            }
        }
    }
    Ok(truncate(out))
}

fn knuth_flip_euler(g: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let euler = euler_numbers(n)?;
    let mut out = Vec::new();
    for m in 1..=n {
        let classes = families::unsigned_flip_partition(m)?;
        if classes.len() as u64 != euler[m - 1] {
            out.push(format!("n={m}: {} flip classes, E_n = {}", classes.len(), euler[m - 1]));
        }
        if m <= 6 {
            // fibers of the 1-2 tree map are exactly the classes
            let mut fibers: HashMap<_, BTreeSet<SignedPerm>> = HashMap::new();
            for c in &classes {
                for p in c {
                    fibers.entry(tree12_of(p.window())).or_default().insert(p.clone());
                }
            }
            let as_sets: HashSet<BTreeSet<SignedPerm>> =
                classes.iter().map(|c| c.iter().cloned().collect()).collect();
            let fiber_sets: HashSet<BTreeSet<SignedPerm>> = fibers.into_values().collect();
            if as_sets != fiber_sets {
                out.push(format!("n={m}: 1-2 tree fibers differ from flip classes"));
            }
        }
        if let Some(listed) = g.listing("knuth", m) {
            let want: HashSet<BTreeSet<String>> = listed
                .iter()
                .map(|group| group.split(',').map(|s| s.split_whitespace().collect::<Vec<_>>().join(" ")).collect())
                .collect();
            let got: HashSet<BTreeSet<String>> =
                classes.iter().map(|c| c.iter().map(|p| p.to_string()).collect()).collect();
            if want != got {
                out.push(format!("n={m}: flip classes differ from the listing"));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// recurrence steps

fn summarize_step(r: &PairingReport, out: &mut Vec<String>) {
    if r.bijective && r.shifts_ok {
        return;
    }
    let mut by_case: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &r.pairs {
        if !p.in_target || p.delta != p.claimed_delta {
            *by_case.entry(p.case).or_default() += 1;
        }
    }
    let collisions = r.source_size - r.pairs.iter().map(|p| &p.image).collect::<HashSet<_>>().len();
    out.push(format!(
        "{} {:?} n={} k={}: {} sources, {} targets, {} images outside the target or with the wrong shift (by case {:?}), {} collisions",
        r.kind, r.step, r.n, r.k, r.source_size, r.target_size,
        by_case.values().sum::<usize>(), by_case, collisions
    ));
    if let Some(first) = r.problems.first() {
        out.push(format!("  e.g. {first}"));
    }
}

const CUD_EXAMPLES: [(Step, &str, &str); 4] = [
    (Step::DSide, "(1,-5,-2)(3,4)(6,9,-8)(7,-7)", "(1,-5,-2)(3,4)(6,8,-7)"),
    (Step::DSide, "(1,-5,-2)(3,-6)(4,9,-8)(7,-7)", "(1,-5,-2)(3,-7)(4,9,-8)(6,-6)"),
    (Step::BSide, "(1,-3,-2)(4)(5,-6)(7,9,-8)", "(1,-3,-2)(4)(5,-6)(7,9)(8)"),
    (Step::BSide, "(1,-3,-2)(4)(5,-8,-6)(7,9)", "(1,-3,-2)(4)(5,-7,-6)(8,9)"),
];

const VS_EXAMPLES: [(Step, &str, &str); 2] = [
    (Step::DSide, "-7 4 2 8 1 -5 3 -9 10 6", "-6 4 2 8 1 -5 3 -9 10 7"),
    (Step::BSide, "7 9 8 5 -6 4 1 -3 2", "8 9 7 5 -6 4 1 -3 2"),
];

fn recstep_cud(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for (step, src, want) in CUD_EXAMPLES {
        let p = src
            .parse::<CycleForm>()
            .and_then(|c| c.to_perm())
            .map_err(|e| HarnessError::Golden(e.to_string()))?;
        let got = cycle_form(&psi_cud(step, &p)?.image).to_string();
        if got != want {
            out.push(format!("{src} maps to {got}, expected {want}"));
        }
    }
    for m in 1..=n {
        for (step, k) in steps_at(m) {
            summarize_step(&recurrence_step_cud(step, m, k)?, &mut out);
        }
    }
    Ok(truncate(out))
}

fn recstep_vs(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    let window = |s: &str| {
        let w: Vec<i32> = s.split_whitespace().map(|x| x.parse().expect("example window")).collect();
        SignedPerm::from_window(&w).map_err(|e| HarnessError::Golden(e.to_string()))
    };
    for (step, src, want) in VS_EXAMPLES {
        let got = psi_vs(step, &window(src)?)?.image.to_string();
        if got != want {
            out.push(format!("{src} maps to {got}, expected {want}"));
        }
    }
    for m in 1..=n {
        for (step, k) in steps_at(m) {
            summarize_step(&recurrence_step_vs(step, m, k)?, &mut out);
        }
    }
    Ok(truncate(out))
}

fn class_constancy<S, T>(n: usize, name: &str, stat: S) -> Result<Vec<String>, HarnessError>
where
    S: Fn(&SignedPerm) -> T,
    T: PartialEq + fmt::Debug,
{
    let mut out = Vec::new();
    for m in 1..=n {
        for class in families::signed_flip_partition(m)? {
            let first = stat(&class[0]);
            if let Some(bad) = class.iter().find(|p| stat(p) != first) {
                out.push(format!("{name}({}) = {first:?} but {name}({bad}) = {:?}", class[0], stat(bad)));
            }
            let t = tau_flip(class[0].window());
            if let Some(bad) = class.iter().find(|p| tau_flip(p.window()) != t) {
                out.push(format!("class tree of {} differs at {bad}", class[0]));
            }
        }
    }
    Ok(truncate(out))
}

fn smax_well_defined(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    class_constancy(n, "smax", SignedPerm::smax)
}

fn spk_well_defined(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    class_constancy(n, "spk", SignedPerm::spk)
}

fn report_emp_npk(_: &Golden, n: usize) -> Result<Vec<String>, HarnessError> {
    let mut out = Vec::new();
    for m in 1..=n {
        for b in [BijectionId::CudB, BijectionId::CudD] {
            let pairs = bijections::map_all(b, m)?;
            let agree = pairs
                .iter()
                .filter(|p| {
                    let perm = p.source.as_perm().expect("permutation family");
                    p.target.emp() as i32 == exp_of(m, npk(perm))
                })
                .count();
            out.push(format!("{b} n={m}: emp = n + 1 - 2 npk for {agree} of {} objects", pairs.len()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        let ids: Vec<&str> = check_ids().collect();
        assert_eq!(ids.len(), 27);
        let unique: HashSet<&&str> = ids.iter().collect();
        assert_eq!(unique.len(), ids.len());
        for id in [
            "table-arnold", "table-polys", "poly-at-1", "row-sums-springer", "hoffman-q", "hoffman-p",
            "entringer-alternating", "snakes-arnold", "thm-cud", "thm-vs", "thm-fl", "thm-trees",
            "bij-cud-b", "bij-cud-d", "bij-vs-b", "bij-vs-d", "bij-fl", "cor-rightmost-cycle-min",
            "cor-rightmost-ltr-min", "lemma-emp-spk", "lemma-peak-leaf", "knuth-flip-euler",
            "recstep-cud", "recstep-vs", "smax-well-defined", "spk-well-defined",
            "report-emp-npk-perobject",
        ] {
            assert!(find_check(id).is_some(), "{id}");
        }
    }

    #[test]
    fn golden_parses() {
        let g = Golden::embedded();
        assert_eq!(g.numbers.len(), 5);
        assert_eq!(g.springer[4], (151, 361));
        assert_eq!(g.polys[4].get(-2), Some(&"5+23t^2+18t^4".parse().unwrap()));
        assert_eq!(g.listing("cud-b", 3).unwrap().len(), 11);
        assert!(Golden::parse("1 | 1", "", "").is_err());
    }

    #[test]
    fn row_from_indexing() {
        // index n-k+1: family index 1 lands at k = n
        let r = row_from(2, [(false, 1, 3), (true, 2, 1)]).unwrap();
        assert_eq!(r.get(2), Some(&LaurentPoly::monomial(1, 3)));
        assert_eq!(r.get(-1), Some(&LaurentPoly::monomial(1, 1)));
    }

    #[test]
    fn errors() {
        assert!(matches!(verify("nope", 3), Err(HarnessError::UnknownCheck(_))));
        assert!(matches!(verify("thm-vs", 0), Err(HarnessError::SizeCapExceeded { .. })));
        assert!(matches!(verify_all(0), Err(HarnessError::SizeCapExceeded { .. })));
    }

    #[test]
    fn small_checks() {
        let r = verify("table-arnold", 5).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.details);
        assert_eq!(r.n_range, (1, 5));
        let r = verify("thm-fl", 5).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.details);
        let r = verify("knuth-flip-euler", 3).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.details);
        let r = verify("report-emp-npk-perobject", 2).unwrap();
        assert_eq!(r.status, Status::ReportOnly);
    }

    #[test]
    fn base_case_passes_everything() {
        for r in verify_all(1).unwrap() {
            assert!(r.passed(), "{}: {:?}", r.check_id, r.details);
        }
    }

    #[test]
    fn corrupted_golden_fails() {
        let numbers = ARNOLD_NUMBERS.replace("57 68 76 80 80", "57 68 76 80 81");
        let g = Golden::parse(&numbers, ARNOLD_POLYS, SMALL_FAMILIES).unwrap();
        let r = verify_with("table-arnold", 5, &g).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.details.iter().any(|d| d.contains("k=5")));
    }
}
