use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use memcoh_core::archive::link_format::{parse_link_format, serialize_link_format, Link};
use memcoh_core::{
    classify, evaluate_relation, format_rfc1123, parse_http_datetime, ArchivalDatetime,
    EvaluationMode, MementoRecord, OriginalResourceRef, Resolution, ResolutionEntry,
    SimilarityPolicy, TimeMapRecord,
};

const T0: i64 = 1_102_620_566;

fn datetime_parsing(c: &mut Criterion) {
    let mut group = c.benchmark_group("datetime");
    group.bench_function("strict_imf_fixdate", |b| {
        b.iter(|| parse_http_datetime(black_box("Thu, 09 Dec 2004 19:29:26 GMT")))
    });
    group.bench_function("repaired_french_est", |b| {
        b.iter(|| parse_http_datetime(black_box("jeu., 09 déc. 2004 14:29:26 EST")))
    });
    group.bench_function("unparseable", |b| {
        b.iter(|| parse_http_datetime(black_box("definitely not a datetime")))
    });
    group.bench_function("format_rfc1123", |b| b.iter(|| format_rfc1123(black_box(T0))));
    group.finish();
}

fn link_format(c: &mut Criterion) {
    let links: Vec<Link> = std::iter::once(Link {
        target: "http://example.com/page".to_string(),
        params: vec![("rel".to_string(), "original".to_string())],
    })
    .chain((0..200).map(|i| Link {
        target: format!("http://archive.example/web/2004{i:010}/http://example.com/page"),
        params: vec![
            ("rel".to_string(), "memento".to_string()),
            ("datetime".to_string(), format_rfc1123(T0 + i * 60)),
        ],
    }))
    .collect();
    let document = serialize_link_format(&links);

    let mut group = c.benchmark_group("link_format");
    group.bench_function("parse_200_mementos", |b| {
        b.iter(|| parse_link_format(black_box(&document)).unwrap())
    });
    group.bench_function("serialize_200_mementos", |b| {
        b.iter(|| serialize_link_format(black_box(&links)))
    });
    group.finish();
}

fn classification(c: &mut Criterion) {
    let resource = OriginalResourceRef::parse("http://embedded.example/r").unwrap();
    let mementos: Vec<MementoRecord> = (0..64)
        .map(|i| {
            let mut m = MementoRecord::new(
                format!("http://archive.example/web/{i}/http://embedded.example/r"),
                ArchivalDatetime::from_epoch_seconds(T0 - 3_200 + i * 100),
            );
            if i % 2 == 0 {
                m.last_modified = memcoh_core::DatetimeField::Defined(
                    ArchivalDatetime::from_epoch_seconds(T0 - 4_000),
                );
            }
            m
        })
        .collect();
    let tm = TimeMapRecord::new(resource.clone(), mementos);
    let entry = ResolutionEntry {
        resource,
        selected: tm.mementos().first().cloned(),
        left_neighbor: None,
        right_neighbor: None,
        discovery_depth: 1,
        discovered_from: "http://archive.example/web/root".to_string(),
        resolution: Resolution::Resolved,
        timemap: tm.clone(),
    };
    let root = MementoRecord::new(
        "http://archive.example/web/root",
        ArchivalDatetime::from_epoch_seconds(T0),
    );
    let policy = SimilarityPolicy::default();

    c.bench_function("classify_64_memento_timemap", |b| {
        b.iter(|| {
            classify(
                black_box(&root),
                black_box(&entry),
                black_box(&tm),
                EvaluationMode::HeadersOnly,
                &policy,
            )
        })
    });
}

fn similarity(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(7);
    let vocab: Vec<String> = (0..500).map(|i| format!("word{i}")).collect();
    let body = |rng: &mut StdRng| -> Vec<u8> {
        (0..2_000)
            .map(|_| vocab[rng.gen_range(0..vocab.len())].as_str())
            .collect::<Vec<_>>()
            .join(" ")
            .into_bytes()
    };
    let a = body(&mut rng);
    let b = body(&mut rng);
    let policy = SimilarityPolicy::default();

    let mut group = c.benchmark_group("similarity");
    group.bench_function("evaluate_relation_2k_tokens", |bch| {
        bch.iter(|| evaluate_relation(black_box(&a), black_box(&b), Some("text/html"), &policy))
    });
    group.bench_function("evaluate_relation_equal_bodies", |bch| {
        bch.iter(|| evaluate_relation(black_box(&a), black_box(&a), Some("text/html"), &policy))
    });
    group.finish();
}

criterion_group!(benches, datetime_parsing, link_format, classification, similarity);
criterion_main!(benches);
