// SPDX-License-Identifier: Apache-2.0

//! The 4-bit linear (affine) reversible functions, generated two ways.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use revsynth::table::CanonTable;
use revsynth::{synthesize, Architecture, GateKind, GateLibrary, PermWord, Width};

use crate::report::{ExperimentReport, Params};

pub const LINEAR_COUNT: usize = 322_560;

/// Every function reachable from the identity with NOT and CNOT gates.
pub fn closure_set() -> Vec<u64> {
    let lib = GateLibrary::new(Width::FOUR, Architecture::Full);
    let gens: Vec<PermWord> = lib
        .gates()
        .iter()
        .filter(|g| matches!(g.kind(), GateKind::Not | GateKind::Cnot))
        .map(|g| g.word())
        .collect();
    let mut seen: HashSet<u64> = HashSet::from([PermWord::IDENTITY.0]);
    let mut frontier = vec![PermWord::IDENTITY];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in frontier {
            for &g in &gens {
                let h = f.compose(g);
                if seen.insert(h.0) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

/// Every map `x -> M x + b` over GF(2)^4 with `M` invertible.
pub fn affine_set() -> Vec<u64> {
    let mut out = Vec::with_capacity(LINEAR_COUNT);
    // column j of M is the image of unit vector j
    for cols in 0u32..1 << 16 {
        let col = |j: u32| ((cols >> (4 * j)) & 0xF) as u8;
        let lin: [u8; 16] = std::array::from_fn(|x| (0..4).filter(|&j| x >> j & 1 == 1).fold(0, |acc, j| acc ^ col(j)));
        let distinct = lin.iter().fold(0u32, |m, &v| m | 1 << v) == 0xFFFF;
        if !distinct {
            continue;
        }
        for b in 0..16u8 {
            let values: Vec<u8> = lin.iter().map(|&v| v ^ b).collect();
            out.push(PermWord::encode(&values, Width::FOUR).expect("an invertible map is a permutation").0);
        }
    }
    out.sort_unstable();
    out
}

/// `a,b,c,d -> b+1, a+c+1, d+1, a`, with `a` the low bit.
pub fn worked_function() -> PermWord {
    let values: Vec<u8> = (0..16u8)
        .map(|x| {
            let bit = |i: u8| x >> i & 1;
            let (a, b, c, d) = (bit(0), bit(1), bit(2), bit(3));
            (b ^ 1) | (a ^ c ^ 1) << 1 | (d ^ 1) << 2 | a << 3
        })
        .collect();
    PermWord::encode(&values, Width::FOUR).expect("linear maps are permutations")
}

/// Optimal sizes of all linear functions, plus whether the two generators
/// agree.
pub fn linear_report(t: &CanonTable, l: u8) -> (ExperimentReport, bool) {
    let t0 = Instant::now();
    let a = closure_set();
    let b = affine_set();
    let agree = a == b && a.len() == LINEAR_COUNT;
    let results: Vec<Result<usize, String>> = a
        .par_iter()
        .map(|&w| synthesize(PermWord(w), t, l).map(|r| r.size).map_err(|e| e.to_string()))
        .collect();
    let mut sizes = Vec::with_capacity(results.len());
    let mut failures = BTreeMap::new();
    for r in results {
        match r {
            Ok(s) => sizes.push(s),
            Err(e) => *failures.entry(e).or_insert(0) += 1,
        }
    }
    let params = Params {
        n: 4,
        arch: t.ctx().arch().name().into(),
        k: t.k(),
        l,
        seed: None,
        samples: None,
    };
    let mut report = ExperimentReport::new("linear", params, &sizes, failures);
    report.wall_secs = t0.elapsed().as_secs_f64();
    (report, agree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_agree() {
        let a = closure_set();
        assert_eq!(a.len(), LINEAR_COUNT);
        assert_eq!(a, affine_set());
        assert!(a.binary_search(&worked_function().0).is_ok());
    }
}
