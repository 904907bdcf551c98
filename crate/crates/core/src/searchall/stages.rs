// SPDX-License-Identifier: Apache-2.0

//! The four stages of one size transition.

use rayon::prelude::*;

use crate::perm::PermWord;

use super::bits::{BitSlice, Storage};
use super::exec::{execute, ExecConfig};
use super::index::Boundary;
use super::{SearchError, SearchSpace};

/// How the composition stage finds an in-space member of each product.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CompositionMode {
    /// Decide the relabeling and inversion from the product's four boundary
    /// values with a precomputed table, then build the chosen member with a
    /// single composition against a conjugated gate.
    #[default]
    Shortcut,
    /// Form each product and scan its class members directly.
    Naive,
}

#[derive(Debug, Clone, Copy)]
pub struct StageEnv {
    pub exec: ExecConfig,
    pub storage: Storage,
    pub budget: Option<u64>,
}

impl Default for StageEnv {
    fn default() -> Self {
        StageEnv {
            exec: ExecConfig::default(),
            storage: Storage::Sparse,
            budget: None,
        }
    }
}

fn check_slice(space: &SearchSpace, lo: u64, hi: u64) -> Result<(), SearchError> {
    if lo > hi || hi > space.len() {
        return Err(SearchError::SliceMismatch {
            lo,
            hi,
            len: space.len(),
        });
    }
    Ok(())
}

/// Marks, within `[lo, hi)`, an in-space member of the class of `p' g` for
/// every marked `p`, every member `p'` of its class and every gate `g`.
pub fn stage_composition(
    space: &SearchSpace,
    input: &BitSlice,
    lo: u64,
    hi: u64,
    mode: CompositionMode,
    env: &StageEnv,
) -> Result<BitSlice, SearchError> {
    check_slice(space, lo, hi)?;
    check_slice(space, input.lo(), input.hi())?;
    let group = space.ctx().group();
    let scheme = space.scheme();
    let order = group.order_size();
    let gates = space.gates();
    let map = |i: u64, out: &mut Vec<u64>| {
        let p = scheme.from_index(i).expect("marked index is in range");
        let mut m = [0u64; 48];
        group.class_table(p, &mut m);
        for tau in 0..order / 2 {
            for e in 0..2 {
                let pp = PermWord(m[2 * tau + e]);
                let ppi = PermWord(m[2 * tau + 1 - e]);
                for (gi, &g) in gates.iter().enumerate() {
                    let g = PermWord(g);
                    let r = match mode {
                        CompositionMode::Naive => space.first_member_in_space(pp.compose(g)),
                        CompositionMode::Shortcut => {
                            let b = Boundary {
                                f0: g.get(pp.get(0)),
                                f15: g.get(pp.get(15)),
                                inv0: ppi.get(g.get(0)),
                                inv15: ppi.get(g.get(15)),
                            };
                            space.shortcut_entry(b).map(|(s, inv)| {
                                let st = group.mul_slots(s, tau);
                                let gc = PermWord(space.gate_conj(s, gi));
                                if inv {
                                    gc.compose(PermWord(m[2 * st + 1 - e]))
                                } else {
                                    PermWord(m[2 * st + e]).compose(gc)
                                }
                            })
                        }
                    };
                    if let Some(r) = r {
                        out.push(scheme.index(r).expect("member is in the space"));
                    }
                }
            }
        }
    };
    execute(input, lo, hi, env.storage, env.budget, &env.exec, map)
}

/// Replaces every marked function by its class's canonical member, keeping
/// the results that fall in `[lo, hi)`.
pub fn stage_canonization(
    space: &SearchSpace,
    input: &BitSlice,
    lo: u64,
    hi: u64,
    env: &StageEnv,
) -> Result<BitSlice, SearchError> {
    check_slice(space, lo, hi)?;
    check_slice(space, input.lo(), input.hi())?;
    let scheme = space.scheme();
    let map = |i: u64, out: &mut Vec<u64>| {
        let p = scheme.from_index(i).expect("marked index is in range");
        out.push(space.canonical_index(p).expect("class has an in-space member"));
    };
    execute(input, lo, hi, env.storage, env.budget, &env.exec, map)
}

/// `candidate AND NOT size_k AND NOT size_k_minus_1`, with the two size sets
/// restricted to the candidate's range.
pub fn stage_subtraction(
    candidate: &BitSlice,
    size_k: &BitSlice,
    size_k_minus_1: &BitSlice,
) -> Result<BitSlice, SearchError> {
    let (lo, hi) = (candidate.lo(), candidate.hi());
    let a = size_k.restrict(lo, hi)?;
    let b = size_k_minus_1.restrict(lo, hi)?;
    candidate.and_not(&a)?.and_not(&b)
}

/// Number of marked classes and the number of functions in them.
pub fn stage_counting(space: &SearchSpace, marked: &BitSlice) -> (u64, u64) {
    let group = space.ctx().group();
    let scheme = space.scheme();
    let items = marked.to_vec();
    let total = items
        .par_iter()
        .map(|&i| group.class_size(scheme.from_index(i).expect("marked index is in range")) as u64)
        .sum();
    (items.len() as u64, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;
    use crate::gate::Architecture;
    use crate::perm::Width;

    fn space4() -> SearchSpace {
        SearchSpace::new(Context::new(Width::FOUR, Architecture::Full)).unwrap()
    }

    fn seq() -> StageEnv {
        StageEnv {
            exec: ExecConfig::sequential(),
            storage: Storage::Sparse,
            budget: None,
        }
    }

    fn singleton(space: &SearchSpace, p: PermWord) -> BitSlice {
        let i = space.scheme().index(p).unwrap();
        BitSlice::from_sorted(0, space.len(), vec![i], Storage::Sparse)
    }

    #[test]
    fn identity_composes_to_gate_classes() {
        let s = space4();
        let len = s.len();
        let input = singleton(&s, PermWord::IDENTITY);
        let cand = stage_composition(&s, &input, 0, len, CompositionMode::Shortcut, &seq()).unwrap();
        let canon = stage_canonization(&s, &cand, 0, len, &seq()).unwrap();
        let mut want: Vec<u64> = s.gates().iter().map(|&g| s.canonical_index(PermWord(g)).unwrap()).collect();
        want.sort_unstable();
        want.dedup();
        assert_eq!(canon.to_vec(), want);
        assert_eq!(stage_counting(&s, &canon), (4, 32));
        assert_eq!(stage_counting(&s, &input), (1, 1));
    }

    #[test]
    fn canonization_merges_members_of_one_class() {
        let s = space4();
        let len = s.len();
        let g = s.ctx().group();
        let p = PermWord(s.gates()[5]).compose(PermWord(s.gates()[20]));
        let mut ar: Vec<u64> = g
            .class_words(p)
            .into_iter()
            .filter(|&w| s.scheme().contains(PermWord(w)))
            .map(|w| s.scheme().index(PermWord(w)).unwrap())
            .collect();
        ar.sort_unstable();
        assert!(ar.len() >= 2);
        let input = BitSlice::from_sorted(0, len, ar.clone(), Storage::Sparse);
        let out = stage_canonization(&s, &input, 0, len, &seq()).unwrap();
        assert_eq!(out.count(), 1);
        assert!(out.count() <= input.count());
        let again = stage_canonization(&s, &out, 0, len, &seq()).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn subtraction_edges() {
        let a = BitSlice::from_sorted(0, 100, vec![1, 2, 3], Storage::Sparse);
        let b = BitSlice::from_sorted(0, 100, vec![50], Storage::Sparse);
        assert!(stage_subtraction(&a, &a, &b).unwrap().is_empty());
        let e = BitSlice::empty(0, 100, Storage::Dense);
        assert_eq!(stage_subtraction(&a, &b, &e).unwrap(), a);
        let small = BitSlice::empty(0, 50, Storage::Sparse);
        assert!(matches!(stage_subtraction(&a, &small, &e), Err(SearchError::LengthMismatch { .. })));
    }

    #[test]
    fn bad_slice_is_rejected() {
        let s = space4();
        let input = singleton(&s, PermWord::IDENTITY);
        let r = stage_composition(&s, &input, 0, s.len() + 1, CompositionMode::Shortcut, &seq());
        assert!(matches!(r, Err(SearchError::SliceMismatch { .. })));
    }
}
