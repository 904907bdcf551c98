// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revsynth::searchall::{AlmostReduced, IndexScheme, SearchSpace};
use revsynth::table::HashSlots;
use revsynth::{Architecture, Context, PermWord, Width};

fn perms(n: usize) -> Vec<PermWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..n)
        .map(|_| {
            let mut v: Vec<u8> = (0..16).collect();
            v.shuffle(&mut rng);
            PermWord::encode(&v, Width::FOUR).unwrap()
        })
        .collect()
}

fn word_ops(c: &mut Criterion) {
    let ps = perms(1024);
    c.bench_function("compose", |b| {
        b.iter(|| ps.windows(2).fold(0u64, |acc, w| acc ^ w[0].compose(w[1]).0))
    });
    c.bench_function("inverse", |b| b.iter(|| ps.iter().fold(0u64, |acc, p| acc ^ p.inverse().0)));
}

fn canonical(c: &mut Criterion) {
    let ctx = Context::new(Width::FOUR, Architecture::Full);
    let g = ctx.group();
    let ps = perms(256);
    c.bench_function("canonical_word", |b| {
        b.iter(|| ps.iter().fold(0u64, |acc, &p| acc ^ g.canonical_word(p).0))
    });
    let space = SearchSpace::new(ctx.clone()).unwrap();
    c.bench_function("find_almost_reduced_equivalent", |b| {
        b.iter(|| ps.iter().fold(0u64, |acc, &p| acc ^ space.find_almost_reduced_equivalent(p).unwrap().0 .0))
    });
}

fn index(c: &mut Criterion) {
    let s = AlmostReduced;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let idx: Vec<u64> = (0..1024).map(|_| rng.random_range(0..s.len())).collect();
    let words: Vec<PermWord> = idx.iter().map(|&i| s.from_index(i).unwrap()).collect();
    c.bench_function("index_rank", |b| b.iter(|| words.iter().fold(0u64, |acc, &p| acc ^ s.index(p).unwrap())));
    c.bench_function("index_unrank", |b| {
        b.iter(|| idx.iter().fold(0u64, |acc, &i| acc ^ s.from_index(i).unwrap().0))
    });
}

fn hashing(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let keys: Vec<u64> = (0..100_000).map(|_| rng.random_range(1..u64::MAX)).collect();
    c.bench_function("hash_insert_100k", |b| {
        b.iter_batched(
            || HashSlots::for_entries(keys.len() as u64),
            |mut h| {
                for &k in &keys {
                    h.insert(k, 1);
                }
                h
            },
            BatchSize::LargeInput,
        )
    });
    let mut h = HashSlots::for_entries(keys.len() as u64);
    for &k in &keys {
        h.insert(k, 1);
    }
    c.bench_function("hash_lookup_100k", |b| {
        b.iter(|| keys.iter().filter(|&&k| black_box(&h).get(k).is_some()).count())
    });
}

criterion_group!(benches, word_ops, canonical, index, hashing);
criterion_main!(benches);
