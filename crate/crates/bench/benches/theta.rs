use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

use theta13::divisor::census_with;
use theta13::report::random_siegel;
use theta13::zeros::{count_zeros_with, ComplexLine, Window};
use theta13::{classical_theta, theta_a, CVec2, RealCharacteristic, ThetaDivisor, TorusPoint};

fn v() -> CVec2 {
    CVec2::new(Complex64::new(0.31, 0.42), Complex64::new(-0.27, 0.95))
}

fn evaluation(c: &mut Criterion) {
    let z = random_siegel(7);
    let ch = RealCharacteristic::new([0.5, 0.0], [0.0, 0.5]);
    c.bench_function("classical_theta", |b| {
        b.iter(|| classical_theta(&z, &ch, black_box(&v()), 1e-12).unwrap())
    });
    c.bench_function("theta_a", |b| b.iter(|| theta_a(&z, black_box(&v()), 1e-12).unwrap()));
}

fn divisor(c: &mut Criterion) {
    let z = random_siegel(7);
    let d = ThetaDivisor::new(z, 1e-12).unwrap();
    c.bench_function("two_torsion_census", |b| b.iter(|| census_with(black_box(&d)).unwrap()));
    let base = TorusPoint::from_real(&z, [0.3, 0.6].into(), [0.1, 0.8].into());
    let window = Window::new(Complex64::new(-0.5, -0.5), 1.0, 1.0).unwrap();
    let line = ComplexLine::new(base, CVec2::new(Complex64::new(0.4, -0.2), Complex64::new(0.7, 0.1)), window).unwrap();
    c.bench_function("count_zeros_on_line", |b| b.iter(|| count_zeros_with(&d, black_box(&line)).unwrap()));
}

criterion_group!(benches, evaluation, divisor);
criterion_main!(benches);
