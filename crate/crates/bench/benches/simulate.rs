use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use erasim::analysis::{analyze, SelectionPolicy};
use erasim::compiler::{fault_sweep, gadget_ft_prep_832};
use erasim::experiments::Experiment;
use erasim::noise::NoiseModel;
use erasim::{Basis, CliffordGate, GateKind, StabilizerTableau};

fn compile(spec: &str) -> Experiment {
    Experiment::compile(&spec.parse().unwrap()).unwrap()
}

fn tableau(c: &mut Criterion) {
    // a 100-qubit brickwork of H, S and CZ layers
    let n = 100;
    let mut gates = Vec::new();
    for layer in 0..20 {
        for q in 0..n {
            gates.push(if (q + layer) % 2 == 0 { CliffordGate::h(q) } else { CliffordGate::new(GateKind::Sz, &[q]).unwrap() });
        }
        for q in (layer % 2..n - 1).step_by(2) {
            gates.push(CliffordGate::cz(q, q + 1));
        }
    }
    c.bench_function("tableau/100q_brickwork_measure_all", |b| {
        b.iter_batched(
            || (StabilizerTableau::new(n), ChaCha8Rng::seed_from_u64(1)),
            |(mut t, mut rng)| {
                t.apply_all(&gates).unwrap();
                for q in 0..n {
                    let basis = if rng.gen() { Basis::X } else { Basis::Z };
                    black_box(t.measure(q, basis, &mut rng).unwrap());
                }
            },
            BatchSize::SmallInput,
        )
    });
}

fn experiments(c: &mut Criterion) {
    let mut g = c.benchmark_group("experiments");
    g.sample_size(10);
    g.bench_function("compile/bv27_encoded", |b| b.iter(|| black_box(compile("bv:n=27,encoded=true"))));
    let model = NoiseModel::paper();
    for spec in ["cat-encoded:k=24", "bv:n=27,encoded=true", "tesseract:ft=true"] {
        let exp = compile(spec);
        g.bench_function(format!("run_100/{spec}"), |b| b.iter(|| black_box(exp.run(&model, 100, 7))));
    }
    let exp = compile("cat-encoded:k=24");
    let evals: Vec<_> = exp.run(&model, 500, 7).iter().map(|r| exp.evaluate(r).unwrap()).collect();
    g.bench_function("analyze/cat-encoded-24", |b| {
        b.iter(|| black_box(analyze(&exp, &evals, &SelectionPolicy::default(), 1).unwrap()))
    });
    g.finish();
}

fn faults(c: &mut Criterion) {
    let gadget = gadget_ft_prep_832();
    let mut g = c.benchmark_group("faults");
    g.sample_size(10);
    g.bench_function("sweep/ft_prep_832", |b| b.iter(|| black_box(fault_sweep(&gadget))));
    g.finish();
}

criterion_group!(benches, tableau, experiments, faults);
criterion_main!(benches);
