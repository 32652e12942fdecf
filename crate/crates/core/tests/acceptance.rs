//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use arnold_core::families::{self, FamilyId};
use arnold_core::harness::{self, CheckResult, Golden};
use arnold_core::poly::LaurentPoly;
use arnold_core::triangles::{arnold_hoffman, arnold_numbers};

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }

    fn require(&mut self, cond: bool, note: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(note.into());
        }
    }

    fn checks(&mut self, golden: &Golden, ids: &[&str], n_max: usize) {
        for id in ids {
            match harness::verify_with(id, n_max, golden) {
                Ok(r) => self.result(&r),
                Err(e) => self.require(false, format!("{id}: {e}")),
            }
        }
    }

    fn result(&mut self, r: &CheckResult) {
        if !r.passed() {
            self.ok = false;
            self.notes.push(format!("{} (n {}..{}) failed:", r.check_id, r.n_range.0, r.n_range.1));
            self.notes.extend(r.details.iter().take(4).map(|d| format!("  {d}")));
        }
    }

    fn budget(&mut self, what: &str, took: Duration, limit: Duration) {
        self.require(took < limit, format!("{what} took {took:?}, budget {limit:?}"));
    }
}

/// Best of a few runs, so that a cold cache does not decide a sub-millisecond
/// budget.
fn best_of<F: FnMut()>(mut f: F) -> Duration {
    (0..5)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .min()
        .unwrap()
}

fn c1(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    let rows = arnold_numbers(5).unwrap();
    let kb: Vec<u64> = rows.iter().map(|r| r.pos.iter().sum()).collect();
    let kd: Vec<u64> = rows.iter().map(|r| r.neg.iter().sum()).collect();
    o.require(kb == [1, 3, 11, 57, 361], format!("type B row sums {kb:?}"));
    o.require(kd == [1, 1, 5, 23, 151], format!("type D row sums {kd:?}"));
    o.require(rows[4].pos == [57, 68, 76, 80, 80], format!("row 5 positive side {:?}", rows[4].pos));
    o.require(rows[4].neg == [0, 16, 32, 46, 57], format!("row 5 negative side {:?}", rows[4].neg));
    o.checks(g, &["table-arnold"], 5);
    o.budget("arnold_numbers(5)", best_of(|| drop(arnold_numbers(5).unwrap())), Duration::from_millis(1));
    o
}

fn c2(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    let rows = arnold_hoffman(5).unwrap();
    let want: LaurentPoly = "5+23t^2+18t^4".parse().unwrap();
    o.require(rows[4].get(-2) == Some(&want), format!("V(5,-2) = {:?}", rows[4].get(-2)));
    o.checks(g, &["table-polys"], 5);
    o.budget("arnold_hoffman(5)", best_of(|| drop(arnold_hoffman(5).unwrap())), Duration::from_millis(1));
    o
}

fn c3(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    o.checks(g, &["poly-at-1"], 10);
    o
}

fn c4(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    o.checks(g, &["hoffman-q", "hoffman-p"], 10);
    o.budget("Hoffman identities to n=10", t.elapsed(), Duration::from_millis(10));
    o
}

fn timed(g: &Golden, ids: &[&str], n: usize, limit: Duration) -> Outcome {
    let mut o = Outcome::new();
    let t = Instant::now();
    o.checks(g, ids, n);
    o.budget(&ids.join(", "), t.elapsed(), limit);
    o
}

fn c11(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    let counts: Vec<usize> =
        (1..=7).map(|n| families::unsigned_flip_partition(n).map_or(0, |c| c.len())).collect();
    o.require(counts == [1, 1, 2, 5, 16, 61, 272], format!("unsigned flip classes {counts:?}"));
    o.checks(g, &["knuth-flip-euler"], 7);
    o.checks(g, &["entringer-alternating"], 8);
    o
}

fn c13(g: &Golden) -> Outcome {
    let mut o = Outcome::new();
    let rows = arnold_numbers(5).unwrap();
    for row in &rows {
        let n = row.n;
        let b = families::enumerate_perms(FamilyId::SnakesB, n).unwrap();
        let d = families::enumerate_perms(FamilyId::SnakesD, n).unwrap();
        for k in 1..=n as i32 {
            let pos = b.iter().filter(|p| p.window()[0] == k).count() as u64;
            let neg = d.iter().filter(|p| p.window()[0] == -k).count() as u64;
            o.require(Some(&pos) == row.get(k as i64), format!("type B snakes n={n} first entry {k}: {pos}"));
            o.require(Some(&neg) == row.get(-k as i64), format!("type D snakes n={n} first entry -{k}: {neg}"));
        }
    }
    o.checks(g, &["snakes-arnold"], 5);
    o
}

type Criterion = (&'static str, Box<dyn Fn(&Golden) -> Outcome>);

fn main() -> ExitCode {
    let g = Golden::embedded();
    let minute = Duration::from_secs(60);
    let criteria: Vec<Criterion> = vec![
        ("Arnold number table, n <= 5", Box::new(c1)),
        ("Arnold-Hoffman polynomial table, n <= 5", Box::new(c2)),
        ("specialization at t = 1, n <= 10", Box::new(c3)),
        ("Hoffman identities, n <= 10", Box::new(c4)),
        ("cycle-up-down refinement with npk, n <= 7", Box::new(move |g| timed(g, &["thm-cud"], 7, minute))),
        ("valley signed refinement with neg, n <= 7", Box::new(move |g| timed(g, &["thm-vs"], 7, minute))),
        ("flip class refinement with spk, n <= 6", Box::new(move |g| timed(g, &["thm-fl"], 6, minute))),
        ("tree refinement with emp, n <= 7", Box::new(|g| timed(g, &["thm-trees"], 7, Duration::MAX))),
        (
            "bijections to trees and the emp/spk identity, n <= 6",
            Box::new(|g| {
                let ids = [
                    "bij-cud-b", "bij-cud-d", "bij-vs-b", "bij-vs-d", "bij-fl",
                    "smax-well-defined", "spk-well-defined", "lemma-emp-spk",
                ];
                timed(g, &ids, 6, Duration::MAX)
            }),
        ),
        (
            "rightmost path labels, n <= 6",
            Box::new(|g| timed(g, &["cor-rightmost-cycle-min", "cor-rightmost-ltr-min"], 6, Duration::MAX)),
        ),
        ("flip classes of S_n and Entringer refinement", Box::new(c11)),
        (
            "recurrence-step bijections, n <= 6",
            Box::new(|g| timed(g, &["recstep-cud", "recstep-vs"], 6, Duration::MAX)),
        ),
        ("snake counts by first entry, n <= 5", Box::new(c13)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run(&g);
        println!("criterion {:>2} {}: {name}", i + 1, if o.ok { "PASS" } else { "FAIL" });
        for note in &o.notes {
            println!("    {note}");
        }
        if !o.ok {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
