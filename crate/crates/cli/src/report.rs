// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub n: u8,
    pub arch: String,
    pub k: u8,
    #[serde(rename = "L")]
    pub l: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// Result of a sampling or exhaustive synthesis experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub params: Params,
    /// Functions per optimal size.
    pub histogram: BTreeMap<usize, u64>,
    /// Functions synthesized successfully.
    pub count: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Functions the search could not place, by reason.
    pub failures: BTreeMap<String, u64>,
    pub wall_secs: f64,
    pub table_digest: String,
}

impl ExperimentReport {
    pub fn new(experiment: &str, params: Params, sizes: &[usize], failures: BTreeMap<String, u64>) -> Self {
        let mut histogram = BTreeMap::new();
        for &s in sizes {
            *histogram.entry(s).or_insert(0u64) += 1;
        }
        let n = sizes.len() as f64;
        let mean = if sizes.is_empty() {
            0.0
        } else {
            sizes.iter().sum::<usize>() as f64 / n
        };
        let std_error = if sizes.len() < 2 {
            0.0
        } else {
            let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        ExperimentReport {
            experiment: experiment.to_string(),
            params,
            histogram,
            count: sizes.len() as u64,
            mean,
            std_error,
            failures,
            wall_secs: 0.0,
            table_digest: String::new(),
        }
    }

    /// Most frequent size, the smallest on ties.
    pub fn mode(&self) -> Option<usize> {
        let max = self.histogram.values().max()?;
        self.histogram.iter().find(|(_, c)| *c == max).map(|(s, _)| *s)
    }

    /// Counts from the largest size down to size 0.
    pub fn descending(&self) -> Vec<u64> {
        let top = self.histogram.keys().max().copied().unwrap_or(0);
        (0..=top).rev().map(|s| self.histogram.get(&s).copied().unwrap_or(0)).collect()
    }

    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: n={} arch={} k={} L={}{}{}",
            self.experiment,
            p.n,
            p.arch,
            p.k,
            p.l,
            p.seed.map_or(String::new(), |x| format!(" seed={x}")),
            p.samples.map_or(String::new(), |x| format!(" samples={x}")),
        );
        let _ = writeln!(s, "{:>5} {:>12}", "size", "functions");
        for (size, count) in self.histogram.iter().rev() {
            let _ = writeln!(s, "{size:>5} {count:>12}");
        }
        let _ = writeln!(s, "total {:>12}", self.count);
        let _ = writeln!(s, "mean size {:.5} (standard error {:.5})", self.mean, self.std_error);
        for (why, n) in &self.failures {
            let _ = writeln!(s, "unsynthesized ({why}): {n}");
        }
        let _ = writeln!(s, "table digest {}; {:.2} s", self.table_digest, self.wall_secs);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params {
            n: 4,
            arch: "full".into(),
            k: 5,
            l: 10,
            seed: Some(3),
            samples: Some(4),
        }
    }

    #[test]
    fn statistics() {
        let r = ExperimentReport::new("random", params(), &[12, 12, 11, 13], BTreeMap::new());
        assert_eq!(r.count, 4);
        assert_eq!(r.mean, 12.0);
        assert!((r.std_error - (2.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(r.mode(), Some(12));
        assert_eq!(r.descending(), vec![1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["params"]["L"], 10);
        assert_eq!(json["histogram"]["12"], 2);
    }
}
