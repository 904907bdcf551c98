// SPDX-License-Identifier: Apache-2.0

//! Streaming map from input indices to output marks.
//!
//! A reader cuts the input into blocks, workers map blocks to output
//! indices, and collectors each own a disjoint part of the output range.
//! Channels are bounded so at most `window` blocks are in flight. Setting a
//! mark is idempotent and commutative, so the result does not depend on
//! scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::thread;

use crossbeam_channel::bounded;

use super::bits::{BitSlice, SliceBuilder, Storage};
use super::SearchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecConfig {
    /// Worker threads; 0 maps everything on the calling thread.
    pub workers: usize,
    pub collectors: usize,
    /// Input indices per block.
    pub block_len: usize,
    /// Blocks allowed in flight per channel.
    pub window: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            workers: thread::available_parallelism().map_or(1, |n| n.get()),
            collectors: 2,
            block_len: 256,
            window: 80,
        }
    }
}

impl ExecConfig {
    pub fn sequential() -> Self {
        ExecConfig {
            workers: 0,
            collectors: 1,
            ..ExecConfig::default()
        }
    }
}

struct Budget<'a> {
    limit: Option<u64>,
    used: &'a AtomicU64,
    abort: &'a AtomicBool,
}

impl Budget<'_> {
    fn charge(&self, before: u64, after: u64) {
        let now = if after >= before {
            self.used.fetch_add(after - before, Ordering::Relaxed) + (after - before)
        } else {
            self.used.fetch_sub(before - after, Ordering::Relaxed) - (before - after)
        };
        if self.limit.is_some_and(|b| now > b) {
            self.abort.store(true, Ordering::Relaxed);
        }
    }
}

/// Runs `map` on every index of `input` and marks each produced index that
/// falls inside `[lo, hi)`.
pub fn execute<F>(
    input: &BitSlice,
    lo: u64,
    hi: u64,
    storage: Storage,
    budget: Option<u64>,
    cfg: &ExecConfig,
    map: F,
) -> Result<BitSlice, SearchError>
where
    F: Fn(u64, &mut Vec<u64>) + Sync,
{
    let collectors = cfg.collectors.max(1);
    let ranges: Vec<(u64, u64)> = BitSlice::split_range(hi - lo, collectors)
        .into_iter()
        .map(|(a, b)| (lo + a, lo + b))
        .collect();
    let route = |i: u64| -> usize {
        // ranges are equal width up to rounding; fix up by a short scan
        let mut r = (((i - lo) as u128 * collectors as u128) / (hi - lo).max(1) as u128) as usize;
        r = r.min(collectors - 1);
        while i < ranges[r].0 {
            r -= 1;
        }
        while i >= ranges[r].1 {
            r += 1;
        }
        r
    };
    let used = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let budget_state = Budget {
        limit: budget,
        used: &used,
        abort: &abort,
    };
    let exceeded = |used: &AtomicU64| SearchError::BudgetExceeded {
        needed: used.load(Ordering::Relaxed),
        budget: budget.unwrap_or(0),
        completed: Vec::new(),
    };

    let block_len = cfg.block_len.max(1);
    let window = cfg.window.max(1);

    if cfg.workers == 0 {
        let mut builders: Vec<SliceBuilder> = ranges.iter().map(|&(a, b)| SliceBuilder::new(a, b, storage)).collect();
        let mut out = Vec::new();
        let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); collectors];
        let mut it = input.iter().peekable();
        while it.peek().is_some() {
            out.clear();
            for i in it.by_ref().take(block_len) {
                map(i, &mut out);
            }
            for &o in &out {
                if o >= lo && o < hi {
                    buckets[route(o)].push(o);
                }
            }
            for (b, bucket) in builders.iter_mut().zip(&mut buckets) {
                let before = b.bytes();
                b.extend(bucket);
                bucket.clear();
                budget_state.charge(before, b.bytes());
            }
            if abort.load(Ordering::Relaxed) {
                return Err(exceeded(&used));
            }
        }
        let parts = builders.into_iter().map(SliceBuilder::finish).collect();
        return BitSlice::concat(parts, storage);
    }

    let (block_tx, block_rx) = bounded::<Vec<u64>>(window);
    let mut coll_tx = Vec::with_capacity(collectors);
    let mut coll_rx = Vec::with_capacity(collectors);
    for _ in 0..collectors {
        let (tx, rx) = bounded::<Vec<u64>>(window);
        coll_tx.push(tx);
        coll_rx.push(rx);
    }

    let parts = thread::scope(|s| {
        let handles: Vec<_> = coll_rx
            .into_iter()
            .zip(&ranges)
            .map(|(rx, &(a, b))| {
                let budget_state = &budget_state;
                s.spawn(move || {
                    let mut builder = SliceBuilder::new(a, b, storage);
                    for batch in rx {
                        let before = builder.bytes();
                        builder.extend(&batch);
                        budget_state.charge(before, builder.bytes());
                    }
                    builder.finish()
                })
            })
            .collect();

        for _ in 0..cfg.workers {
            let rx = block_rx.clone();
            let txs = coll_tx.clone();
            let (map, route, abort) = (&map, &route, &abort);
            s.spawn(move || {
                let mut out = Vec::new();
                for block in rx {
                    if abort.load(Ordering::Relaxed) {
                        continue;
                    }
                    out.clear();
                    for &i in &block {
                        map(i, &mut out);
                    }
                    let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); txs.len()];
                    for &o in &out {
                        if o >= lo && o < hi {
                            buckets[route(o)].push(o);
                        }
                    }
                    for (tx, bucket) in txs.iter().zip(buckets) {
                        if !bucket.is_empty() && tx.send(bucket).is_err() {
                            return;
                        }
                    }
                }
            });
        }
        drop(block_rx);
        drop(coll_tx);

        let mut block = Vec::with_capacity(block_len);
        for i in input.iter() {
            block.push(i);
            if block.len() == block_len {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                if block_tx.send(std::mem::replace(&mut block, Vec::with_capacity(block_len))).is_err() {
                    break;
                }
            }
        }
        if !block.is_empty() && !abort.load(Ordering::Relaxed) {
            let _ = block_tx.send(block);
        }
        drop(block_tx);

        handles.into_iter().map(|h| h.join().expect("collector panicked")).collect::<Vec<_>>()
    });

    if abort.load(Ordering::Relaxed) {
        return Err(exceeded(&used));
    }
    BitSlice::concat(parts, storage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_mod(i: u64, out: &mut Vec<u64>) {
        out.push(i * i % 10_007);
        out.push((i * 31 + 7) % 10_007);
    }

    #[test]
    fn parallel_equals_sequential() {
        let input = BitSlice::from_sorted(0, 5000, (0..5000).step_by(3).collect(), Storage::Sparse);
        let seq = execute(&input, 0, 10_007, Storage::Sparse, None, &ExecConfig::sequential(), square_mod).unwrap();
        let mut want: Vec<u64> = input
            .iter()
            .flat_map(|i| {
                let mut v = Vec::new();
                square_mod(i, &mut v);
                v
            })
            .collect();
        want.sort_unstable();
        want.dedup();
        assert_eq!(seq.to_vec(), want);
        for (workers, collectors, block_len, window) in [(1, 1, 1, 1), (4, 3, 7, 2), (8, 5, 256, 80)] {
            let cfg = ExecConfig {
                workers,
                collectors,
                block_len,
                window,
            };
            for st in [Storage::Dense, Storage::Sparse] {
                let got = execute(&input, 0, 10_007, st, None, &cfg, square_mod).unwrap();
                assert_eq!(got.to_vec(), want);
                assert_eq!(got.storage(), st);
            }
        }
    }

    #[test]
    fn output_window_filters() {
        let input = BitSlice::from_sorted(0, 100, (0..100).collect(), Storage::Dense);
        let cfg = ExecConfig {
            workers: 2,
            collectors: 3,
            block_len: 8,
            window: 4,
        };
        let got = execute(&input, 40, 60, Storage::Sparse, None, &cfg, |i, o| o.push(i)).unwrap();
        assert_eq!(got.to_vec(), (40..60).collect::<Vec<_>>());
        assert_eq!((got.lo(), got.hi()), (40, 60));
    }

    #[test]
    fn budget_aborts() {
        let input = BitSlice::from_sorted(0, 100_000, (0..100_000).collect(), Storage::Sparse);
        for cfg in [ExecConfig::sequential(), ExecConfig::default()] {
            let r = execute(&input, 0, 100_000, Storage::Sparse, Some(1024), &cfg, |i, o| o.push(i));
            assert!(matches!(r, Err(SearchError::BudgetExceeded { .. })), "{cfg:?}");
        }
    }
}
