use anisoreg::anisotropic::{phi_circ, LevelLadder, MeasureOptions};
use anisoreg::grid::{solve, GridField, OperatorSpec, SolveOptions};
use anisoreg::rearrangement::RearrangedFunction;
use anisoreg::sobolev::{sobolev_conjugate, SobolevOptions};
use anisoreg::symmetrized::solve_radial;
use anisoreg::young::conjugation_audit;
use anisoreg::{psi_of, AnisotropicYoungFunction, ScalarYoungFunction};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn pw(p: f64) -> ScalarYoungFunction {
    ScalarYoungFunction::power_scaled(p, 1.0).unwrap()
}

fn young(c: &mut Criterion) {
    let a = ScalarYoungFunction::power_log(2.0, 1.0, 7.38905609893065).unwrap();
    c.bench_function("conjugation_audit power_log", |b| {
        b.iter(|| conjugation_audit(black_box(&a), 1e-2, 1e4, 200, 100).unwrap())
    });
    let s = pw(3.0).sampled(1e-4, 1e6, 2048).unwrap();
    c.bench_function("sampled conjugate", |b| b.iter(|| black_box(&s).conjugate().unwrap()));
}

fn measure_average(c: &mut Criterion) {
    let split = AnisotropicYoungFunction::split(vec![pw(2.0), pw(4.0)]).unwrap();
    let ladder = LevelLadder { lo: 1e-2, hi: 1e6, count: 97 };
    c.bench_function("phi_circ split (2,4)", |b| {
        b.iter(|| phi_circ(black_box(&split), &ladder, &MeasureOptions::default()).unwrap())
    });
    c.bench_function("sobolev_conjugate p=1.5 n=2", |b| {
        b.iter(|| sobolev_conjugate(black_box(&pw(1.5)), 2, &SobolevOptions::default()).unwrap())
    });
}

fn solvers(c: &mut Criterion) {
    let f = RearrangedFunction::constant(1.0, std::f64::consts::PI).unwrap();
    let psi = psi_of(&pw(3.0)).unwrap();
    c.bench_function("radial solve p=3", |b| b.iter(|| solve_radial(black_box(&psi), &f, 2).unwrap()));

    let mut g = c.benchmark_group("grid solve N=65");
    g.sample_size(10);
    for p in [1.5, 2.0, 3.0] {
        let spec = OperatorSpec::new(
            AnisotropicYoungFunction::radial(2, ScalarYoungFunction::power(p).unwrap()).unwrap(),
            AnisotropicYoungFunction::radial(2, pw(p)).unwrap(),
        );
        let rhs = GridField::from_fn(65, |_, _| 1.0);
        g.bench_function(format!("p={p}"), |b| b.iter(|| solve(&spec, black_box(&rhs), &SolveOptions::default()).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, young, measure_average, solvers);
criterion_main!(benches);
