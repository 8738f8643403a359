// Copyright 2026 The Farsight Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Throughput of the hot paths: Bessel evaluation, CFI grids, protocol
//! runs and mesh decomposition.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use farsight_core::compiler::{clements_decompose, random_unitary};
use farsight_core::optics::bessel::spherical_jn_all;
use farsight_core::rng::stream_rng;
use farsight_core::{cfi_total, run_protocol, ApertureGeometry, ModalBasis, ProtocolSetup, TwoPointScene};

fn bessel(c: &mut Criterion) {
    let mut g = c.benchmark_group("spherical_jn_all");
    for n in [10usize, 40] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| spherical_jn_all(black_box(n), black_box(3.7)))
        });
    }
    g.finish();
}

fn cfi(c: &mut Criterion) {
    let geom = ApertureGeometry::from_rayleigh(1.0, 2.0).unwrap();
    let basis = ModalBasis::sinc_bessel(40, &geom).unwrap();
    c.bench_function("cfi_total K=40 x50", |b| {
        b.iter(|| (1..=50).map(|i| cfi_total(0.01 * i as f64, &geom, &basis, 1.0).unwrap()).sum::<f64>())
    });
}

fn protocol(c: &mut Criterion) {
    let geom = ApertureGeometry::from_rayleigh(1.0, 2.0).unwrap();
    let basis = ModalBasis::sinc_bessel(4, &geom).unwrap();
    let setup = ProtocolSetup::new(TwoPointScene::new(0.2, 0.1, 5).unwrap(), geom, basis).unwrap();
    let mut rng = stream_rng(1, 0);
    c.bench_function("run_protocol K=4 M=5", |b| b.iter(|| run_protocol(&setup, &mut rng)));
}

fn clements(c: &mut Criterion) {
    let mut g = c.benchmark_group("clements_decompose");
    for d in [4usize, 8, 16] {
        let u = random_unitary(d, &mut stream_rng(2, d as u64));
        g.bench_with_input(BenchmarkId::from_parameter(d), &u, |b, u| b.iter(|| clements_decompose(u).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bessel, cfi, protocol, clements);
criterion_main!(benches);
