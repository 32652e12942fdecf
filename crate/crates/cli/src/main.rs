use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use arnold_core::bijections::{self, BijectionId};
use arnold_core::families::{self, FamilyId};
use arnold_core::harness::{self, CheckResult, Golden, Status};
use arnold_core::perm::{cycle_form, CycleForm, SignedPerm, StatReport};
use arnold_core::poly::LaurentPoly;
use arnold_core::trees::{classify, gen_trees, BinTree, TreeKind};
use arnold_core::triangles::{arnold_hoffman, arnold_numbers, entringer};

#[derive(Parser)]
#[command(name = "arnold", version, about = "Refined Arnold triangles, families, trees and their bijections")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print rows 1..=n of a triangle.
    Triangle {
        #[arg(long, value_enum)]
        kind: TriangleKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: TableFormat,
    },
    /// List a family (or a tree class) at size n.
    Enumerate {
        /// Family tag, or trees-o / trees-s.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        /// Keep only objects with this family index.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long)]
        with_stats: bool,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: ListFormat,
    },
    /// Apply a bijection to its whole domain.
    Map {
        #[arg(long)]
        bijection: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: JsonOnly,
    },
    /// Run named checks.
    Verify {
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        check: Vec<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = usize::MAX)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: TableFormat,
        /// Directory holding alternative golden files.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
    },
    /// Statistics of one signed permutation, given as a window or in cycle
    /// notation.
    Stats {
        /// e.g. "2 -4 3 1" or "(1,-2)(3)(4)".
        perm: String,
    },
    /// List the registered check ids.
    Checks,
}

#[derive(Clone, Copy, ValueEnum)]
enum TriangleKind {
    Arnold,
    Entringer,
    Poly,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Table,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ListFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum JsonOnly {
    Jsonl,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cli.cmd {
        Cmd::Triangle { kind, n, format } => triangle(&mut out, kind, n, format).map(|_| ExitCode::SUCCESS),
        Cmd::Enumerate { family, n, index, with_stats, format } => {
            enumerate(&mut out, &family, n, index, with_stats, format).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Map { bijection, n, .. } => map(&mut out, &bijection, n).map(|_| ExitCode::SUCCESS),
        Cmd::Verify { check, all, max_n, format, golden_dir } => {
            verify(&mut out, &check, all, max_n, format, golden_dir)
        }
        Cmd::Stats { perm } => stats(&mut out, &perm).map(|_| ExitCode::SUCCESS),
        Cmd::Checks => {
            for spec in harness::REGISTRY {
                writeln!(out, "{:<28} n<={:<3} {}", spec.id, spec.ceiling, spec.claim)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    out.flush()?;
    code
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ValueRow {
    n: usize,
    k: i64,
    value: u64,
}

#[derive(Serialize)]
struct PolyRow<'a> {
    n: usize,
    k: i64,
    poly: &'a LaurentPoly,
}

fn jsonl<W: Write, T: Serialize>(out: &mut W, v: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn triangle<W: Write>(out: &mut W, kind: TriangleKind, n: usize, format: TableFormat) -> Result<()> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    match kind {
        TriangleKind::Arnold => {
            let rows = arnold_numbers(n).with_context(|| format!("Arnold triangle up to n={n}"))?;
            for row in &rows {
                if format == TableFormat::Jsonl {
                    for (k, &value) in row.entries() {
                        jsonl(out, &ValueRow { n: row.n, k, value })?;
                    }
                } else {
                    let cells: Vec<String> = row.entries().map(|(_, v)| v.to_string()).collect();
                    let (neg, pos) = cells.split_at(row.n);
                    writeln!(out, "{:>2} | {} | {}", row.n, neg.join(" "), pos.join(" "))?;
                }
            }
        }
        TriangleKind::Entringer => {
            let rows = entringer(n).with_context(|| format!("Entringer triangle up to n={n}"))?;
            for (i, row) in rows.iter().enumerate() {
                if format == TableFormat::Jsonl {
                    for (j, &value) in row.iter().enumerate() {
                        jsonl(out, &ValueRow { n: i + 1, k: j as i64 + 1, value })?;
                    }
                } else {
                    let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                    writeln!(out, "{:>2} | {}", i + 1, cells.join(" "))?;
                }
            }
        }
        TriangleKind::Poly => {
            let rows = arnold_hoffman(n).with_context(|| format!("Arnold-Hoffman triangle up to n={n}"))?;
            for row in &rows {
                for (k, poly) in row.entries() {
                    if format == TableFormat::Jsonl {
                        jsonl(out, &PolyRow { n: row.n, k, poly })?;
                    } else {
                        writeln!(out, "V({},{k}) = {poly}", row.n)?;
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Stats {
    neg: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    npk: Option<u32>,
    spk: u32,
    smax: i32,
}

impl Stats {
    fn of(p: &SignedPerm) -> Self {
        let r = StatReport::of(p);
        Self { neg: r.neg, npk: r.npk, spk: r.spk, smax: r.smax }
    }
}

#[derive(Serialize)]
struct PermRecord {
    window: Vec<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<Vec<Vec<i32>>>,
    index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<Vec<Vec<i32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<Stats>,
}

#[derive(Serialize)]
struct TreeRecord<'a> {
    tree: &'a BinTree,
    text: String,
    index: u32,
    emp: usize,
}

fn cycle_lists(c: &CycleForm) -> Vec<Vec<i32>> {
    c.cycles.iter().map(|c| c.entries.clone()).collect()
}

fn enumerate<W: Write>(
    out: &mut W,
    family: &str,
    n: usize,
    index: Option<usize>,
    with_stats: bool,
    format: ListFormat,
) -> Result<()> {
    if let Some(kind) = match family {
        "trees-o" => Some(TreeKind::Open),
        "trees-s" => Some(TreeKind::Star),
        _ => None,
    } {
        return enumerate_trees(out, kind, n, index, format);
    }
    let f: FamilyId = family.parse()?;
    let objects = match index {
        Some(k) => families::enumerate_indexed(f, n, k)?,
        None => families::enumerate(f, n)?,
    };
    let records: Vec<PermRecord> = objects
        .iter()
        .map(|o| -> Result<PermRecord> {
            let rep = SignedPerm::from_window(o.window())?;
            Ok(PermRecord {
                window: o.window().to_vec(),
                cycles: o.cycles().as_ref().map(cycle_lists),
                index: families::object_index(f, o),
                members: o.as_class().map(|c| c.members.iter().map(|m| m.window().to_vec()).collect()),
                stats: with_stats.then(|| Stats::of(&rep)),
            })
        })
        .collect::<Result<_>>()?;
    if format == ListFormat::Jsonl {
        for rec in &records {
            jsonl(out, rec)?;
        }
        return Ok(());
    }
    let join = |w: &[i32]| w.iter().map(i32::to_string).collect::<Vec<_>>().join(" ");
    let mut w = csv::Writer::from_writer(&mut *out);
    let mut header = vec!["window", "cycles", "index"];
    if f.is_flip() {
        header.push("members");
    }
    if with_stats {
        header.extend(["neg", "npk", "spk", "smax"]);
    }
    w.write_record(&header)?;
    for (o, rec) in objects.iter().zip(&records) {
        let mut row = vec![join(&rec.window), o.cycles().map(|c| c.to_string()).unwrap_or_default(), rec.index.to_string()];
        if let Some(m) = &rec.members {
            row.push(m.iter().map(|x| join(x)).collect::<Vec<_>>().join(";"));
        }
        if let Some(s) = &rec.stats {
            row.extend([
                s.neg.to_string(),
                s.npk.map(|x| x.to_string()).unwrap_or_default(),
                s.spk.to_string(),
                s.smax.to_string(),
            ]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn enumerate_trees<W: Write>(
    out: &mut W,
    kind: TreeKind,
    n: usize,
    index: Option<usize>,
    format: ListFormat,
) -> Result<()> {
    if let Some(k) = index {
        if k == 0 || k > n {
            bail!("index {k} outside 1..={n}");
        }
    }
    let trees = gen_trees(n)?;
    let keep = trees.iter().filter_map(|t| {
        let c = classify(t);
        (c.kind == kind && index.is_none_or(|k| c.rightmost_label as usize == k)).then_some((t, c))
    });
    if format == ListFormat::Csv {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(["tree", "index", "emp"])?;
        for (t, c) in keep {
            w.write_record([t.to_string(), c.rightmost_label.to_string(), c.emp.to_string()])?;
        }
        w.flush()?;
    } else {
        for (t, c) in keep {
            jsonl(out, &TreeRecord { tree: t, text: t.to_string(), index: c.rightmost_label, emp: c.emp })?;
        }
    }
    Ok(())
}

fn map<W: Write>(out: &mut W, bijection: &str, n: usize) -> Result<()> {
    let b: BijectionId = bijection.parse()?;
    for pair in bijections::map_all(b, n)? {
        jsonl(out, &pair)?;
    }
    Ok(())
}

fn stats<W: Write>(out: &mut W, text: &str) -> Result<()> {
    let p = if text.trim_start().starts_with('(') {
        text.parse::<CycleForm>()?.to_perm()?
    } else {
        let w = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<i32>, _>>()
            .with_context(|| format!("cannot read window {text:?}"))?;
        SignedPerm::from_window(&w)?
    };
    #[derive(Serialize)]
    struct Out {
        window: Vec<i32>,
        cycles: String,
        families: Vec<&'static str>,
        #[serde(flatten)]
        report: StatReport,
    }
    let fams = FamilyId::ALL
        .into_iter()
        .filter(|f| !f.is_flip() && (!f.is_unsigned() || p.is_unsigned()) && families::contains(*f, p.window()))
        .map(FamilyId::tag)
        .collect();
    let rec = Out { window: p.window().to_vec(), cycles: cycle_form(&p).to_string(), families: fams, report: StatReport::of(&p) };
    jsonl(out, &rec)
}

// ---------------------------------------------------------------------------

fn verify<W: Write>(
    out: &mut W,
    checks: &[String],
    all: bool,
    max_n: usize,
    format: TableFormat,
    golden_dir: Option<PathBuf>,
) -> Result<ExitCode> {
    let golden = match golden_dir {
        Some(dir) => Golden::from_dir(&dir)?,
        None => Golden::embedded(),
    };
    let results: Vec<CheckResult> = if all {
        harness::verify_all_with(max_n, &golden)?
    } else {
        checks.iter().map(|id| harness::verify_with(id, max_n, &golden)).collect::<Result<_, _>>()?
    };
    if format == TableFormat::Jsonl {
        for r in &results {
            jsonl(out, r)?;
        }
    } else {
        writeln!(out, "{:<28} {:<6} {:<11} {:>10}", "check", "n", "status", "ms")?;
        for r in &results {
            let range = format!("{}..{}", r.n_range.0, r.n_range.1);
            writeln!(out, "{:<28} {:<6} {:<11} {:>10.1}", r.check_id, range, r.status.to_string(), r.elapsed_ms)?;
            for d in &r.details {
                writeln!(out, "    {d}")?;
            }
        }
        let failed = results.iter().filter(|r| r.status == Status::Fail).count();
        writeln!(out, "{} checks, {failed} failed", results.len())?;
    }
    Ok(if results.iter().all(CheckResult::passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
