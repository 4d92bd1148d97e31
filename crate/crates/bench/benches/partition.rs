use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use pathopt::anneal::{sa_run, SaConfig};
use pathopt::fm::fm_pass;
use pathopt::gen::{gen_geometric, gen_random};
use pathopt::init::{construct_w, init_random};
use pathopt::neargreedy::{pg_construct, NgFunction};
use pathopt::po::develop_path;
use pathopt::rng::rng_from_seed;
use pathopt::{AlgoSpec, Budget, InitMethod, Objective, PoConfig};

fn kernels(c: &mut Criterion) {
    let dense = gen_random(500, 0.05, 1);
    let geo = gen_geometric(1000, 0.06, 2);

    let mut group = c.benchmark_group("kernels");
    for (name, g, obj) in [
        ("random500/maxcut", &dense, Objective::MaxCut),
        ("geometric1000/quotient", &geo, Objective::MinQuotientCut),
    ] {
        let p = init_random(g, &mut rng_from_seed(3));
        let start = (0..g.n()).max_by_key(|&v| g.degree(v)).unwrap();
        group.bench_function(format!("develop_path/{name}"), |b| {
            b.iter(|| develop_path(g, black_box(&p), start, obj))
        });
        group.bench_function(format!("fm_pass/{name}"), |b| {
            b.iter(|| fm_pass(g, black_box(&p), obj))
        });
        group.bench_function(format!("construct_w/{name}"), |b| {
            b.iter_batched(
                || rng_from_seed(4),
                |mut rng| construct_w(g, obj, &mut rng),
                BatchSize::SmallInput,
            )
        });
        group.bench_function(format!("pg_construct/{name}"), |b| {
            b.iter(|| pg_construct(g, obj, &NgFunction::DEFAULT_FIT, 5))
        });
    }
    group.finish();
}

fn optimizers(c: &mut Criterion) {
    let g = gen_random(200, 0.05, 7);
    let mut group = c.benchmark_group("optimizers");
    group.sample_size(10);
    for name in ["po", "kl"] {
        let spec: AlgoSpec = name.parse().unwrap();
        group.bench_function(format!("{name}/random200/one_start"), |b| {
            b.iter(|| {
                spec.run(&g, Objective::MaxCut, Budget::restarts(1), 9)
                    .unwrap()
            })
        });
    }
    let po = AlgoSpec {
        po: PoConfig {
            accept_ties: true,
            ..PoConfig::default()
        },
        ..AlgoSpec::new(pathopt::AlgoKind::Po)
    };
    group.bench_function("po_ties/random200/one_start", |b| {
        b.iter(|| {
            po.run(&g, Objective::MaxCut, Budget::restarts(1), 9)
                .unwrap()
        })
    });
    group.bench_function("sa/random200/one_anneal", |b| {
        b.iter(|| {
            sa_run(
                &g,
                Objective::MaxCut,
                &SaConfig::default(),
                Budget::restarts(1),
                9,
                InitMethod::Random,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, kernels, optimizers);
criterion_main!(benches);
