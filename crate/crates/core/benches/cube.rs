use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use khcube::cube::CubeOptions;
use khcube::diagram::{braid_closure, PlanarDiagram};
use khcube::khovanov::{Coeffs, KhovanovComplex};

// T(3,5), ten crossings
fn torus() -> PlanarDiagram {
    braid_closure(3, &[1, 2].repeat(5)).unwrap()
}

fn homology(d: &PlanarDiagram) -> usize {
    let c = KhovanovComplex::reduced_assemble(d, CubeOptions::default()).unwrap();
    c.homology(Coeffs::Z).unwrap().total_rank()
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let d = torus();
    let mut g = c.benchmark_group("reduced T(3,5)");
    g.sample_size(20);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    g.bench_function("one thread", |b| b.iter(|| one.install(|| homology(black_box(&d)))));
    g.bench_function("global pool", |b| b.iter(|| homology(black_box(&d))));
    g.finish();
}

// built with --no-default-features: only the sequential path exists
#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    let d = torus();
    let mut g = c.benchmark_group("reduced T(3,5)");
    g.sample_size(20);
    g.bench_function("sequential", |b| b.iter(|| homology(black_box(&d))));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
