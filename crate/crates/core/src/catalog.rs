// SPDX-License-Identifier: Apache-2.0

//! Published benchmark functions with their optimal circuits, and the five
//! class representatives that need 15 gates.

use crate::gate::{parse_circuit, Circuit, GateError};
use crate::perm::{PermWord, Width};

#[derive(Debug, Clone, Copy)]
pub struct Benchmark {
    pub name: &'static str,
    pub spec: [u8; 16],
    /// Optimal gate count.
    pub size: u8,
    pub circuit: &'static str,
}

impl Benchmark {
    pub fn word(&self) -> PermWord {
        PermWord::encode(&self.spec, Width::FOUR).expect("catalog specs are permutations")
    }

    pub fn parsed(&self) -> Result<Circuit, GateError> {
        parse_circuit(self.circuit, Width::FOUR)
    }
}

const SPEC_4_49: [u8; 16] = [15, 1, 12, 3, 5, 6, 8, 7, 0, 10, 13, 9, 2, 4, 14, 11];
const SPEC_4BIT_7_8: [u8; 16] = [0, 1, 2, 3, 4, 5, 6, 8, 7, 9, 10, 11, 12, 13, 14, 15];
const SPEC_DECODE42: [u8; 16] = [1, 2, 4, 8, 0, 3, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15];
const SPEC_HWB4: [u8; 16] = [0, 2, 4, 12, 8, 5, 9, 11, 1, 6, 10, 13, 3, 14, 7, 15];
const SPEC_IMARK: [u8; 16] = [4, 5, 2, 14, 0, 3, 6, 10, 11, 8, 15, 1, 12, 13, 7, 9];
const SPEC_MPERK: [u8; 16] = [3, 11, 2, 10, 0, 7, 1, 6, 15, 8, 14, 9, 13, 5, 12, 4];
const SPEC_OC5: [u8; 16] = [6, 0, 12, 15, 7, 1, 5, 2, 4, 10, 13, 3, 11, 8, 14, 9];
const SPEC_OC6: [u8; 16] = [9, 0, 2, 15, 11, 6, 7, 8, 14, 3, 4, 13, 5, 1, 12, 10];
const SPEC_OC7: [u8; 16] = [6, 15, 9, 5, 13, 12, 3, 7, 2, 10, 1, 11, 0, 14, 4, 8];
const SPEC_OC8: [u8; 16] = [11, 3, 9, 2, 7, 13, 15, 14, 8, 1, 4, 10, 0, 12, 6, 5];
const SPEC_NTH_PRIME4_INC: [u8; 16] = [0, 2, 3, 5, 7, 11, 13, 1, 4, 6, 8, 9, 10, 12, 14, 15];
// The first six primes, then the unused values in ascending order.
const SPEC_NTH_PRIME4: [u8; 16] = [2, 3, 5, 7, 11, 13, 0, 1, 4, 6, 8, 9, 10, 12, 14, 15];
const SPEC_RD32: [u8; 16] = [0, 7, 6, 9, 4, 11, 10, 13, 8, 15, 14, 1, 12, 3, 2, 5];
const SPEC_SHIFT4: [u8; 16] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 0];

/// Benchmarks with optimal circuits over the full gate library.
pub const FULL_BENCHMARKS: [Benchmark; 13] = [
    Benchmark {
        name: "4_49",
        spec: SPEC_4_49,
        size: 12,
        circuit: "NOT(a) CNOT(c,a) CNOT(a,d) TOF(a,b,d) CNOT(d,a) TOF(c,d,b) TOF(a,d,c) TOF(b,c,a) TOF(a,b,d) NOT(a) CNOT(d,b) CNOT(d,c)",
    },
    Benchmark {
        name: "4bit-7-8",
        spec: SPEC_4BIT_7_8,
        size: 7,
        circuit: "CNOT(d,b) CNOT(d,a) CNOT(c,d) TOF4(a,b,d,c) CNOT(c,d) CNOT(d,b) CNOT(d,a)",
    },
    Benchmark {
        name: "decode42",
        spec: SPEC_DECODE42,
        size: 10,
        circuit: "CNOT(c,b) CNOT(d,a) CNOT(c,a) TOF(a,d,b) CNOT(b,c) TOF4(a,b,c,d) TOF(b,d,c) CNOT(c,a) CNOT(a,b) NOT(a)",
    },
    Benchmark {
        name: "hwb4",
        spec: SPEC_HWB4,
        size: 11,
        circuit: "CNOT(b,d) CNOT(d,a) CNOT(a,c) CNOT(c,d) TOF(a,d,b) TOF(b,c,a) CNOT(d,c) CNOT(c,b) TOF(a,c,b) CNOT(a,c) CNOT(b,d)",
    },
    Benchmark {
        name: "imark",
        spec: SPEC_IMARK,
        size: 7,
        circuit: "TOF(c,d,a) TOF(a,b,d) CNOT(d,c) CNOT(b,c) CNOT(d,a) TOF(a,c,b) NOT(c)",
    },
    Benchmark {
        name: "mperk",
        spec: SPEC_MPERK,
        size: 9,
        circuit: "NOT(c) CNOT(d,c) TOF(c,d,b) TOF(a,c,d) CNOT(b,a) CNOT(d,a) CNOT(c,a) CNOT(a,b) CNOT(b,c)",
    },
    Benchmark {
        name: "oc5",
        spec: SPEC_OC5,
        size: 11,
        circuit: "TOF(b,d,c) TOF(c,d,b) TOF(a,b,c) NOT(a) CNOT(d,b) CNOT(c,a) CNOT(a,c) TOF(a,b,d) CNOT(c,a) CNOT(c,b) TOF4(a,b,d,c)",
    },
    Benchmark {
        name: "oc6",
        spec: SPEC_OC6,
        size: 12,
        circuit: "TOF4(a,b,c,d) TOF(b,d,c) CNOT(d,a) TOF(b,c,d) CNOT(c,b) CNOT(b,c) TOF(a,d,c) TOF(b,c,a) TOF(a,b,c) NOT(a) CNOT(d,b) CNOT(a,d)",
    },
    Benchmark {
        name: "oc7",
        spec: SPEC_OC7,
        size: 13,
        circuit: "CNOT(b,d) NOT(b) TOF(a,b,c) TOF(b,d,a) TOF(c,d,b) CNOT(a,d) CNOT(a,c) CNOT(b,a) TOF4(a,b,c,d) TOF(c,d,b) CNOT(c,a) NOT(a) CNOT(b,c)",
    },
    Benchmark {
        name: "oc8",
        spec: SPEC_OC8,
        size: 12,
        circuit: "CNOT(a,b) TOF(b,c,a) TOF(c,d,b) CNOT(d,a) TOF4(a,b,d,c) TOF(a,b,d) NOT(b) TOF(a,d,b) TOF(b,d,a) TOF(b,c,d) NOT(a) CNOT(a,d)",
    },
    Benchmark {
        name: "nth_prime4_inc",
        spec: SPEC_NTH_PRIME4_INC,
        size: 11,
        circuit: "TOF(a,b,c) CNOT(d,b) TOF(a,c,b) TOF(b,d,c) TOF(b,c,d) CNOT(a,b) TOF4(b,c,d,a) CNOT(c,b) TOF4(a,b,d,c) CNOT(b,a) TOF(b,d,a)",
    },
    Benchmark {
        name: "rd32",
        spec: SPEC_RD32,
        size: 4,
        circuit: "TOF(a,b,d) CNOT(a,b) TOF(b,c,d) CNOT(b,c)",
    },
    Benchmark {
        name: "shift4",
        spec: SPEC_SHIFT4,
        size: 4,
        circuit: "TOF4(a,b,c,d) TOF(a,b,c) CNOT(a,b) NOT(a)",
    },
];

/// Benchmarks with optimal circuits restricted to nearest-neighbor gates.
pub const LNN_BENCHMARKS: [Benchmark; 13] = [
    Benchmark {
        name: "4_49",
        spec: SPEC_4_49,
        size: 16,
        circuit: "CNOT(d,c) TOF(c,d,b) CNOT(b,a) NOT(c) TOF(b,c,d) CNOT(c,b) TOF4(a,b,c,d) TOF4(a,c,d,b) TOF(a,b,c) CNOT(a,b) NOT(a) CNOT(c,d) TOF(b,d,c) TOF(b,c,a) TOF(a,c,b) NOT(c)",
    },
    Benchmark {
        name: "4bit-7-8",
        spec: SPEC_4BIT_7_8,
        size: 7,
        circuit: "CNOT(d,c) TOF(c,d,b) TOF4(b,c,d,a) TOF4(a,b,c,d) TOF4(b,c,d,a) TOF(c,d,b) CNOT(d,c)",
    },
    Benchmark {
        name: "decode42",
        spec: SPEC_DECODE42,
        size: 13,
        circuit: "NOT(d) NOT(c) CNOT(c,b) TOF(b,d,c) TOF(b,c,a) TOF4(a,c,d,b) TOF4(a,b,c,d) CNOT(d,c) TOF(b,c,a) TOF4(a,c,d,b) NOT(d) TOF(c,d,b) NOT(c)",
    },
    Benchmark {
        name: "hwb4",
        spec: SPEC_HWB4,
        size: 16,
        circuit: "TOF(a,b,c) CNOT(c,d) CNOT(b,c) TOF(b,c,a) TOF4(a,c,d,b) NOT(a) CNOT(a,b) CNOT(d,c) CNOT(b,a) TOF(b,c,d) TOF(b,c,a) TOF4(a,c,d,b) TOF(a,b,c) NOT(b) CNOT(c,d) TOF(a,b,c)",
    },
    Benchmark {
        name: "imark",
        spec: SPEC_IMARK,
        size: 11,
        circuit: "TOF4(b,c,d,a) TOF4(a,b,c,d) CNOT(b,c) TOF4(a,b,c,d) TOF4(b,c,d,a) CNOT(d,c) TOF(a,c,b) CNOT(b,a) TOF(c,d,b) NOT(c) CNOT(b,a)",
    },
    Benchmark {
        name: "mperk",
        spec: SPEC_MPERK,
        size: 11,
        circuit: "CNOT(d,c) TOF(a,c,b) CNOT(b,a) TOF(c,d,b) CNOT(a,b) NOT(c) TOF(b,c,d) CNOT(c,b) CNOT(b,a) TOF(c,d,b) CNOT(b,c)",
    },
    Benchmark {
        name: "oc5",
        spec: SPEC_OC5,
        size: 14,
        circuit: "CNOT(d,c) TOF4(a,c,d,b) CNOT(c,b) TOF(b,d,c) CNOT(b,a) CNOT(b,c) TOF(b,c,d) CNOT(c,b) NOT(a) CNOT(a,b) CNOT(b,c) TOF(b,c,a) TOF4(b,c,d,a) TOF4(a,b,d,c)",
    },
    Benchmark {
        name: "oc6",
        spec: SPEC_OC6,
        size: 14,
        circuit: "TOF(b,c,a) TOF4(a,c,d,b) TOF4(a,b,c,d) NOT(b) CNOT(b,a) CNOT(d,c) TOF4(b,c,d,a) CNOT(c,b) TOF(a,b,c) CNOT(c,d) TOF(b,d,c) NOT(b) TOF(a,b,c) TOF(b,c,d)",
    },
    Benchmark {
        name: "oc7",
        spec: SPEC_OC7,
        size: 15,
        circuit: "TOF(b,c,d) TOF(c,d,b) TOF4(b,c,d,a) TOF(a,b,c) NOT(b) TOF4(a,b,d,c) TOF(b,c,d) CNOT(c,b) CNOT(b,a) NOT(d) TOF(c,d,b) TOF4(a,b,d,c) NOT(a) CNOT(c,d) TOF(a,b,c)",
    },
    Benchmark {
        name: "oc8",
        spec: SPEC_OC8,
        size: 14,
        circuit: "CNOT(a,b) TOF(b,d,c) CNOT(c,d) NOT(c) TOF(b,c,a) TOF4(a,b,c,d) CNOT(a,b) CNOT(d,c) CNOT(b,c) TOF4(a,c,d,b) CNOT(c,b) CNOT(b,a) TOF4(a,b,c,d) TOF(b,d,c)",
    },
    Benchmark {
        name: "nth_prime4",
        spec: SPEC_NTH_PRIME4,
        size: 11,
        circuit: "CNOT(d,c) TOF(b,c,a) CNOT(b,c) NOT(b) TOF(b,c,d) TOF(b,c,a) TOF4(a,b,d,c) TOF(a,c,b) NOT(a) TOF4(a,c,d,b) CNOT(b,a)",
    },
    Benchmark {
        name: "rd32",
        spec: SPEC_RD32,
        size: 7,
        circuit: "TOF(b,c,d) NOT(c) TOF4(a,b,c,d) NOT(c) CNOT(a,b) TOF4(a,b,c,d) CNOT(b,c)",
    },
    Benchmark {
        name: "shift4",
        spec: SPEC_SHIFT4,
        size: 4,
        circuit: "TOF4(a,b,c,d) TOF(a,b,c) CNOT(a,b) NOT(a)",
    },
];

#[derive(Debug, Clone, Copy)]
pub struct HardestEntry {
    pub spec: [u8; 16],
    /// Number of distinct functions equivalent to `spec`.
    pub symmetries: u8,
    pub circuit: &'static str,
}

impl HardestEntry {
    pub fn word(&self) -> PermWord {
        PermWord::encode(&self.spec, Width::FOUR).expect("catalog specs are permutations")
    }

    pub fn parsed(&self) -> Result<Circuit, GateError> {
        parse_circuit(self.circuit, Width::FOUR)
    }
}

/// One function from each class needing 15 gates, with a 15-gate circuit.
pub const HARDEST: [HardestEntry; 5] = [
    HardestEntry {
        spec: [1, 5, 0, 8, 9, 11, 2, 15, 3, 12, 4, 6, 10, 14, 13, 7],
        symmetries: 24,
        circuit: "CNOT(a,c) CNOT(c,d) CNOT(d,a) TOF(b,d,c) CNOT(a,b) TOF(c,d,b) TOF4(a,b,c,d) CNOT(c,a) NOT(b) NOT(c) CNOT(a,d) TOF(b,d,c) TOF(b,c,a) TOF(a,c,b) NOT(c)",
    },
    HardestEntry {
        spec: [1, 9, 0, 4, 10, 8, 2, 11, 3, 15, 5, 12, 7, 14, 13, 6],
        symmetries: 24,
        circuit: "NOT(d) CNOT(d,c) TOF4(a,c,d,b) TOF(a,d,c) TOF(b,d,a) TOF(c,d,b) TOF(b,c,d) TOF(a,d,b) CNOT(a,d) NOT(a) NOT(b) NOT(c) TOF4(b,c,d,a) CNOT(b,c) TOF(a,d,c)",
    },
    HardestEntry {
        spec: [3, 1, 7, 13, 11, 0, 8, 15, 2, 5, 10, 6, 9, 14, 12, 4],
        symmetries: 48,
        circuit: "NOT(b) CNOT(b,a) TOF(a,b,c) TOF(a,d,b) CNOT(c,d) TOF4(b,c,d,a) TOF4(a,b,c,d) CNOT(a,c) CNOT(c,b) TOF(b,d,c) NOT(a) NOT(b) CNOT(c,d) CNOT(d,a) TOF(a,b,c)",
    },
    HardestEntry {
        spec: [3, 1, 11, 7, 8, 0, 9, 5, 2, 6, 15, 13, 14, 4, 10, 12],
        symmetries: 24,
        circuit: "CNOT(c,b) CNOT(a,d) CNOT(d,a) TOF4(a,b,c,d) TOF(a,b,c) TOF(b,c,a) TOF(a,d,b) CNOT(b,c) NOT(d) NOT(c) NOT(a) TOF(c,d,b) TOF(b,c,d) CNOT(d,c) CNOT(a,c)",
    },
    HardestEntry {
        spec: [3, 5, 11, 1, 8, 0, 9, 7, 2, 6, 14, 13, 10, 4, 12, 15],
        symmetries: 24,
        circuit: "CNOT(c,b) TOF(b,d,a) CNOT(a,d) CNOT(d,c) TOF(b,c,a) TOF(a,c,b) TOF(a,d,c) TOF(b,c,a) NOT(d) NOT(c) NOT(b) CNOT(d,a) TOF(b,c,d) CNOT(d,b) TOF(a,b,c)",
    },
];

/// A function needing 15 gates that is not itself listed in `HARDEST`.
pub const HARDEST_EXAMPLE: [u8; 16] = [6, 8, 15, 13, 4, 0, 12, 1, 3, 9, 11, 14, 10, 2, 5, 7];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{Architecture, GateLibrary};

    #[test]
    fn full_circuits_simulate_to_specs() {
        for b in &FULL_BENCHMARKS {
            let c = b.parsed().unwrap();
            assert_eq!(c.len(), b.size as usize, "{}", b.name);
            assert_eq!(c.simulate(), b.word(), "{}", b.name);
        }
    }

    #[test]
    fn lnn_circuits_simulate_and_use_lnn_gates() {
        let lnn = GateLibrary::new(Width::FOUR, Architecture::Lnn);
        for b in &LNN_BENCHMARKS {
            let c = b.parsed().unwrap();
            assert_eq!(c.len(), b.size as usize, "{}", b.name);
            assert_eq!(c.simulate(), b.word(), "{}", b.name);
            assert!(c.gates().iter().all(|g| lnn.contains(g)), "{}", b.name);
        }
    }

    #[test]
    fn hardest_circuits_simulate_to_specs() {
        for h in &HARDEST {
            let c = h.parsed().unwrap();
            assert_eq!(c.len(), 15);
            assert_eq!(c.simulate(), h.word());
        }
    }

    #[test]
    fn example_is_row_three_inverted_and_relabeled() {
        use crate::equiv::EquivWitness;
        use crate::gate::Circuit;
        use crate::perm::{LinePerm, PermWord};

        let sigma = LinePerm::new([2, 0, 1, 3]).unwrap();
        let example = PermWord::encode(&HARDEST_EXAMPLE, Width::FOUR).unwrap();
        let gates = HARDEST[2].parsed().unwrap().reversed().gates().iter().map(|g| g.relabel(sigma)).collect();
        assert_eq!(Circuit::from_gates(Width::FOUR, gates).unwrap().simulate(), example);
        assert_eq!(EquivWitness { sigma, inverted: true }.apply(HARDEST[2].word()), example);
    }
}
