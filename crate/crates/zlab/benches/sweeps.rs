//! Criterion benches for the verification sweeps: the rayon path against
//! the always-compiled sequential fallback on the same workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::sync::Arc;
use zlab::freeprod::{homotopy_k, EpsilonNet, FreeProductSpace, ZEpsilonIndex};
use zlab::models::IntLineModel;
use zlab::sweep::{item_rng, map_reduce_seq};
use zlab::verify::{random_completion_point, random_wpoint};

fn line_space() -> FreeProductSpace {
    FreeProductSpace::new(Arc::new(IntLineModel), Arc::new(IntLineModel))
}

fn metric_item(space: &FreeProductSpace, i: usize) -> f64 {
    let mut rng = item_rng(42, i as u64);
    let a = random_wpoint(space, &mut rng, 6, 12);
    let b = random_wpoint(space, &mut rng, 6, 12);
    let c = random_wpoint(space, &mut rng, 6, 12);
    (space.dist(&a, &c) - space.dist(&a, &b) - space.dist(&b, &c)).max(0.0)
}

fn bench_metric_sweep(c: &mut Criterion) {
    let space = line_space();
    let n = 4_000usize;
    let mut group = c.benchmark_group("metric_triples");
    group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
        b.iter(|| map_reduce_seq(n, |i| metric_item(&space, i), 0.0f64, f64::max))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
        b.iter(|| {
            zlab::sweep::map_reduce_par(n, |i| metric_item(&space, i), || 0.0f64, f64::max)
        })
    });
    group.finish();
}

fn bench_net_coverage(c: &mut Criterion) {
    let space = line_space();
    let net = EpsilonNet::build(&space, 0.25, 8).expect("net");
    let n = 1_000usize;
    let gap = |i: usize| {
        let mut rng = item_rng(7, i as u64);
        let p = random_completion_point(&space, &mut rng, 8, 20, 10);
        net.gap_to_nearest(&space, &p)
    };
    let mut group = c.benchmark_group("net_coverage");
    group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
        b.iter(|| map_reduce_seq(n, gap, 0.0f64, f64::max))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
        b.iter(|| zlab::sweep::map_reduce_par(n, gap, || 0.0f64, f64::max))
    });
    group.finish();
}

fn bench_homotopy_tracks(c: &mut Criterion) {
    let space = line_space();
    let idx = ZEpsilonIndex::build(&space, 0.25, 8).expect("core");
    let n = 400usize;
    let track = |i: usize| {
        let mut rng = item_rng(3, i as u64);
        let p = random_completion_point(&space, &mut rng, 8, 20, 10);
        let mut diam = 0.0f64;
        let imgs: Vec<_> = (0..=20)
            .map(|k| homotopy_k(&space, &idx, &p, k as f64 / 20.0).expect("time"))
            .collect();
        for a in 0..imgs.len() {
            for b in a + 1..imgs.len() {
                if imgs[a].point == imgs[b].point {
                    continue;
                }
                let d = space.dist_general(&imgs[a].point, &imgs[b].point);
                diam = diam.max(d.value + d.tolerance);
            }
        }
        diam
    };
    let mut group = c.benchmark_group("k_tracks");
    group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
        b.iter(|| map_reduce_seq(n, track, 0.0f64, f64::max))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
        b.iter(|| zlab::sweep::map_reduce_par(n, track, || 0.0f64, f64::max))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_metric_sweep,
    bench_net_coverage,
    bench_homotopy_tracks
);
criterion_main!(benches);
