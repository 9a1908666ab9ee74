use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dfi_core::demo;
use dfi_core::transcription::{
    dual_breakdown, extract_dual_certificate, solve_primal, DualOptions,
};
use dfi_core::Execution;

fn dual_evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual_breakdown");
    let cases = [
        ("ptl", demo::ptl(demo::PTL_INTERVALS).unwrap()),
        ("pfc", demo::pfc(demo::PFC_INTERVALS).unwrap()),
    ];
    for (name, spec) in &cases {
        let primal = solve_primal(spec).unwrap();
        let cert = extract_dual_certificate(spec, &primal).unwrap();
        for (label, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let opts = DualOptions {
                execution,
                ..DualOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(label, name), &opts, |b, opts| {
                b.iter(|| dual_breakdown(spec, &cert, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, dual_evaluation);
criterion_main!(benches);
