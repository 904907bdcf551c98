// SPDX-License-Identifier: Apache-2.0

use std::sync::OnceLock;

use revsynth::searchall::{
    run_pipeline, seed_slices, stage_composition, stage_counting, BitSlice, CompositionMode, ExecConfig,
    PipelineConfig, SearchSpace, StageEnv, Storage, StorageMode,
};
use revsynth::table::{bfs_build, BfsOptions, CanonTable};
use revsynth::{Architecture, Context, Width};

fn setup() -> &'static (SearchSpace, CanonTable) {
    static S: OnceLock<(SearchSpace, CanonTable)> = OnceLock::new();
    S.get_or_init(|| {
        let ctx = Context::new(Width::FOUR, Architecture::Full);
        let t = bfs_build(ctx.clone(), 4, &BfsOptions::default()).unwrap();
        (SearchSpace::new(ctx).unwrap(), t)
    })
}

#[test]
fn seeds_count_like_the_table() {
    let (s, t) = setup();
    for k in 0..=4u8 {
        let (_, cur) = seed_slices(s, t, k, Storage::Sparse).unwrap();
        assert_eq!(stage_counting(s, &cur), (t.reduced_counts()[k as usize], t.total_counts()[k as usize]));
    }
}

#[test]
fn shortcut_equals_naive_composition() {
    let (s, t) = setup();
    let env = StageEnv {
        exec: ExecConfig::default(),
        storage: Storage::Sparse,
        budget: None,
    };
    for k in 0..=3u8 {
        let (_, cur) = seed_slices(s, t, k, Storage::Sparse).unwrap();
        let fast = stage_composition(s, &cur, 0, s.len(), CompositionMode::Shortcut, &env).unwrap();
        let slow = stage_composition(s, &cur, 0, s.len(), CompositionMode::Naive, &env).unwrap();
        assert_eq!(fast, slow, "size {k}");
        assert!(!fast.is_empty());
    }
}

#[test]
fn output_is_independent_of_slicing_and_workers() {
    let (s, t) = setup();
    let mut files: Vec<Vec<u8>> = Vec::new();
    let configs = [(1, 0, 1), (3, 1, 2), (8, 4, 3)];
    for (slices, workers, collectors) in configs {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            slices,
            exec: ExecConfig {
                workers,
                collectors,
                block_len: 64,
                window: 8,
            },
            work_dir: Some(dir.path().to_path_buf()),
            ..PipelineConfig::default()
        };
        let seeds = seed_slices(s, t, 3, Storage::Sparse).unwrap();
        let run = run_pipeline(s, seeds, 3, Some(4), &cfg).unwrap();
        let c = run.counts.last().unwrap();
        assert_eq!((c.size, c.reduced, c.total), (4, 6538, 294_507));
        files.push(std::fs::read(dir.path().join("size-04.rvbv")).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn class_size_ratios_are_bounded() {
    let (s, t) = setup();
    let seeds = seed_slices(s, t, 2, Storage::Sparse).unwrap();
    let run = run_pipeline(s, seeds, 2, Some(4), &PipelineConfig::default()).unwrap();
    for c in &run.counts {
        let ratio = c.total as f64 / c.reduced as f64;
        assert!((1.0..=48.0).contains(&ratio), "{c:?}");
    }
}

#[test]
fn budget_stops_the_run() {
    let (s, t) = setup();
    let cfg = PipelineConfig {
        budget_bytes: Some(4096),
        storage: StorageMode::Sparse,
        exec: ExecConfig::sequential(),
        ..PipelineConfig::default()
    };
    let seeds = seed_slices(s, t, 3, Storage::Sparse).unwrap();
    match run_pipeline(s, seeds, 3, Some(4), &cfg) {
        Err(revsynth::searchall::SearchError::BudgetExceeded { completed, .. }) => assert_eq!(completed, vec![2, 3]),
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn empty_input_composes_to_nothing() {
    let (s, _) = setup();
    let e = BitSlice::empty(0, s.len(), Storage::Sparse);
    let out = stage_composition(s, &e, 0, s.len(), CompositionMode::Shortcut, &StageEnv::default()).unwrap();
    assert!(out.is_empty());
}
