use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use arnold_core::bijections::{self, BijectionId};
use arnold_core::families::{self, FamilyId};
use arnold_core::trees::gen_trees;
use arnold_core::triangles::{arnold_hoffman, arnold_numbers};

fn triangles(c: &mut Criterion) {
    c.bench_function("arnold_numbers/15", |b| b.iter(|| arnold_numbers(black_box(15)).unwrap()));
    c.bench_function("arnold_hoffman/10", |b| b.iter(|| arnold_hoffman(black_box(10)).unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    g.sample_size(10);
    for f in [FamilyId::CudB, FamilyId::VsB] {
        for n in [5, 6] {
            g.bench_with_input(BenchmarkId::new(f.tag(), n), &n, |b, &n| {
                b.iter(|| families::enumerate_perms(f, n).unwrap())
            });
        }
    }
    g.bench_function("flip-classes/5", |b| b.iter(|| families::flip_classes_signed(5).unwrap()));
    g.bench_function("trees/6", |b| b.iter(|| gen_trees(6).unwrap()));
    g.finish();
}

fn maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("map_all");
    g.sample_size(10);
    for bij in BijectionId::ALL {
        g.bench_with_input(BenchmarkId::new(bij.tag(), 5), &5, |b, &n| {
            b.iter(|| bijections::map_all(bij, n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, triangles, enumeration, maps);
criterion_main!(benches);
