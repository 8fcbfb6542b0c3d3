use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nobelnet::estimators::{baseline_covariates, fit_glm, DesignMatrix, Link};
use nobelnet::panel::{build_panel, nobel_set_at, shortlist};
use nobelnet::proximity::{crosscloseness, outcloseness};
use nobelnet::FixedEffect;
use nobelnet_bench::fixture;

fn closeness(c: &mut Criterion) {
    let (_, data) = fixture();
    let g = &data.graph;
    let targets = nobel_set_at(g.scholars(), 2000);
    let ids: Vec<String> = shortlist(g.scholars(), 2000).into_iter().collect();
    c.bench_function("outcloseness/shortlist_2000", |b| {
        b.iter(|| {
            for id in &ids {
                black_box(outcloseness(g, id, &targets).unwrap());
            }
        })
    });
    c.bench_function("crosscloseness/shortlist_2000", |b| {
        b.iter(|| {
            for id in &ids {
                black_box(crosscloseness(g, id, &targets, 2).unwrap());
            }
        })
    });
}

fn panel(c: &mut Criterion) {
    let (cfg, data) = fixture();
    let pc = cfg.panel_config();
    c.bench_function("build_panel/fixture", |b| b.iter(|| black_box(build_panel(&data.graph, &pc).unwrap())));
}

fn glm(c: &mut Criterion) {
    let (cfg, data) = fixture();
    let rows = build_panel(&data.graph, &cfg.panel_config()).unwrap();
    let plain = DesignMatrix::from_panel(&rows, &baseline_covariates(), &[]).unwrap();
    let year = DesignMatrix::from_panel(&rows, &baseline_covariates(), &[FixedEffect::Year])
        .unwrap()
        .drop_separated_groups()
        .unwrap();
    for link in [Link::Logit, Link::Probit] {
        c.bench_function(&format!("fit/{}", link.as_str()), |b| b.iter(|| black_box(fit_glm(&plain, link).unwrap())));
        c.bench_function(&format!("fit/{}_year_effects", link.as_str()), |b| {
            b.iter(|| black_box(fit_glm(&year, link).unwrap()))
        });
    }
}

criterion_group!(benches, closeness, panel, glm);
criterion_main!(benches);
