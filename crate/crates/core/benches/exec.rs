use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rof_core::dimensioning::{dimension_sweep_with, linspace, CpriCoding, MimoGeometry, ModulationScheme};
use rof_core::exec::Execution;
use rof_core::harness::{run_evm_sweep_with, FronthaulScenario, SweepSpec};
use rof_core::powermodel::LinkKind;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn dimensioning(c: &mut Criterion) {
    let geom = MimoGeometry::new(16, 16, 3).unwrap();
    let coding = CpriCoding::cpri_default();
    let qam = ModulationScheme::qam256();
    let bws = linspace(0.02, 1.0, 100_000);
    let mut g = c.benchmark_group("dimension_sweep");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dimension_sweep_with(exec, 28.0, &geom, &coding, &qam, &bws).unwrap())
        });
    }
    g.finish();
}

fn evm_sweep(c: &mut Criterion) {
    let template = FronthaulScenario {
        payload_symbols: 1024,
        ..Default::default()
    };
    let spec = SweepSpec {
        kinds: vec![LinkKind::Arof, LinkKind::Drof],
        wdm_counts: vec![1],
        laser_start_dbm: 0.0,
        laser_stop_dbm: 6.0,
        laser_step_db: 2.0,
        threshold_percent: 3.5,
    };
    let mut g = c.benchmark_group("evm_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_evm_sweep_with(exec, &template, &spec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, dimensioning, evm_sweep);
criterion_main!(benches);
