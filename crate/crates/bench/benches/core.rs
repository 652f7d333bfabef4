use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gradinv::homog::classify::classify_pauli;
use gradinv::orbits::sweep;
use gradinv::realize::{realize_division_algebra, soundness_oracle};
use gradinv::{CycNum, SymplecticShape};

fn cyclotomic(c: &mut Criterion) {
    let a = &CycNum::zeta_pow(32, 3) + &CycNum::from_int(32, 2);
    let b = &CycNum::zeta_pow(32, 7) + &CycNum::zeta_pow(32, 11);
    c.bench_function("cycnum_mul_32", |bch| bch.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("cycnum_inv_32", |bch| bch.iter(|| black_box(&a).inv()));
}

fn classification(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for n in [2u64, 4, 6] {
        g.bench_function(format!("n{n}"), |bch| bch.iter(|| classify_pauli(black_box(n))));
    }
    g.finish();
}

fn orbits(c: &mut Criterion) {
    c.bench_function("orbit_sweep_8", |bch| bch.iter(|| sweep(black_box(8))));
}

fn realization(c: &mut Criterion) {
    c.bench_function("realize_pauli_4", |bch| {
        bch.iter(|| realize_division_algebra(&SymplecticShape::pauli(black_box(4))))
    });
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("n2", |bch| bch.iter(|| soundness_oracle(black_box(2), 1)));
    g.finish();
}

criterion_group!(benches, cyclotomic, classification, orbits, realization);
criterion_main!(benches);
