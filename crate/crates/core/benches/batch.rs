use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use permcodec::batch::{roundtrip_batch, EncoderKind};
use permcodec::corpus::CorpusSpec;
use permcodec::par::Execution;
use permcodec::tensor::{encode_tensor_with, tensor_identifier_default, Tensor, TensorMode};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn roundtrips(c: &mut Criterion) {
    let mut group = c.benchmark_group("roundtrip_batch");
    group.sample_size(10);
    for (kind, spec) in [
        (EncoderKind::Poly, CorpusSpec::standard(64)),
        (EncoderKind::Ident, CorpusSpec::rational(256)),
    ] {
        let items = spec.generate(1);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(kind.to_string(), name), &items, |b, items| {
                b.iter(|| black_box(roundtrip_batch(items, kind, exec)))
            });
        }
    }
    group.finish();
}

fn tensors(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode_tensor");
    let mut state = 7u64;
    let t = Tensor::from_fn(6, 3, 2, |_| {
        (0..2)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 40) % 1000) as f64 / 64.0
            })
            .collect()
    })
    .unwrap();
    let labels = tensor_identifier_default(&t);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("rational_k3_n6", name), |b| {
            b.iter(|| black_box(encode_tensor_with(&t, &labels, TensorMode::Rational, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, roundtrips, tensors);
criterion_main!(benches);
