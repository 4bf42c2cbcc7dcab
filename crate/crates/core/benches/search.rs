use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mulrep::intlinalg::minors_gcd_with;
use mulrep::oracle::{box_search, product_box_search, SearchConfig};
use mulrep::{Execution, IntMatrix, MultilinearForm, ProductForm};
use num_bigint::BigInt;
use std::hint::black_box;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn config(execution: Execution) -> SearchConfig {
    SearchConfig {
        budget: u64::MAX,
        execution,
    }
}

// Unrepresentable targets force a scan of the whole box.
fn searches(c: &mut Criterion) {
    let f = MultilinearForm::parse_any("2*x1*x2 + 4*x2*x3 + 6*x3*x4").unwrap();
    let l1 = MultilinearForm::parse_any("x1+x2+x3").unwrap();
    let l2 = MultilinearForm::parse_any("-x1+x2+x3").unwrap();
    let p = ProductForm::new(3, vec![l1, l2]).unwrap();

    let mut group = c.benchmark_group("full_box");
    for mode in MODES {
        let cfg = config(mode);
        group.bench_with_input(BenchmarkId::new("form_r12", format!("{mode:?}")), &cfg, |bench, cfg| {
            bench.iter(|| box_search(black_box(&f), &BigInt::from(1), &BigInt::from(12), cfg).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("product_r60", format!("{mode:?}")),
            &cfg,
            |bench, cfg| {
                bench.iter(|| product_box_search(black_box(&p), &BigInt::from(6), &BigInt::from(60), cfg).unwrap())
            },
        );
    }
    group.finish();
}

fn minors(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..8)
        .map(|i| (0..8).map(|j| ((i * 7 + j * 13) % 19) as i64 - 9).collect())
        .collect();
    let a = IntMatrix::from_i64(&rows);
    let mut group = c.benchmark_group("minors_gcd_8x8_k4");
    for mode in MODES {
        group.bench_function(format!("{mode:?}"), |bench| {
            bench.iter(|| minors_gcd_with(black_box(&a), 4, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, searches, minors);
criterion_main!(benches);
