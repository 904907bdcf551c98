// SPDX-License-Identifier: Apache-2.0

//! NOT/CNOT/TOF/TOF4 gates, the two gate libraries, circuits and their text
//! form `KIND(line,...,target)`.

use std::fmt;

use thiserror::Error;

use crate::perm::{LinePerm, PermError, PermWord, Width};

const LINE_NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GateError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{kind} takes {expected} lines, got {found}")]
    ArityMismatch { kind: GateKind, expected: usize, found: usize },
    #[error("line {line} used twice in one gate")]
    DuplicateLine { line: char },
    #[error("line {line} is outside a {width}-line circuit")]
    LineOutOfWidth { line: char, width: Width },
    #[error(transparent)]
    Width(#[from] PermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Not,
    Cnot,
    Tof,
    Tof4,
}

impl GateKind {
    pub const ALL: [GateKind; 4] = [GateKind::Not, GateKind::Cnot, GateKind::Tof, GateKind::Tof4];

    /// Number of lines the gate touches, target included.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::Cnot => 2,
            GateKind::Tof => 3,
            GateKind::Tof4 => 4,
        }
    }

    fn from_arity(n: usize) -> Option<Self> {
        GateKind::ALL.get(n.wrapping_sub(1)).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Tof => "TOF",
            GateKind::Tof4 => "TOF4",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which gates a circuit may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Any set of lines.
    Full,
    /// Linear nearest neighbor: the gate's lines form a contiguous run of `a,b,c,d`.
    Lnn,
}

impl Architecture {
    pub fn id(self) -> u8 {
        match self {
            Architecture::Full => 0,
            Architecture::Lnn => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Architecture::Full),
            1 => Some(Architecture::Lnn),
            _ => None,
        }
    }

    pub fn admits(self, gate: &Gate) -> bool {
        match self {
            Architecture::Full => true,
            Architecture::Lnn => {
                let m = gate.line_mask();
                let run = m >> m.trailing_zeros();
                run & (run + 1) == 0
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Full => "full",
            Architecture::Lnn => "lnn",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Architecture::Full),
            "lnn" => Ok(Architecture::Lnn),
            other => Err(format!("unknown architecture `{other}` (expected full or lnn)")),
        }
    }
}

/// A gate flipping `target` iff all control lines are 1.
///
/// Controls keep the order they were written in, for printing; equality and
/// hashing only look at the control set.
#[derive(Clone, Copy)]
pub struct Gate {
    target: u8,
    controls: [u8; 3],
    n_controls: u8,
    word: PermWord,
}

impl Gate {
    pub fn new(controls: &[u8], target: u8) -> Result<Self, GateError> {
        let kind = GateKind::from_arity(controls.len() + 1).ok_or(GateError::ArityMismatch {
            kind: GateKind::Tof4,
            expected: 4,
            found: controls.len() + 1,
        })?;
        let mut seen = 1u8 << target;
        for &c in controls {
            if c > 3 || target > 3 {
                return Err(GateError::LineOutOfWidth {
                    line: '?',
                    width: Width::FOUR,
                });
            }
            if seen & (1 << c) != 0 {
                return Err(GateError::DuplicateLine {
                    line: LINE_NAMES[c as usize],
                });
            }
            seen |= 1 << c;
        }
        let mut ctl = [0u8; 3];
        ctl[..controls.len()].copy_from_slice(controls);
        debug_assert_eq!(kind.arity(), controls.len() + 1);
        Ok(Self::build(ctl, controls.len() as u8, target))
    }

    fn build(controls: [u8; 3], n_controls: u8, target: u8) -> Self {
        let mask: u8 = controls[..n_controls as usize].iter().fold(0, |m, &c| m | (1 << c));
        let mut raw = 0u64;
        for x in 0..16u8 {
            let y = if x & mask == mask { x ^ (1 << target) } else { x };
            raw |= (y as u64) << (4 * x);
        }
        Gate {
            target,
            controls,
            n_controls,
            word: PermWord(raw),
        }
    }

    pub fn not(target: u8) -> Self {
        Self::new(&[], target).expect("valid NOT")
    }

    pub fn cnot(control: u8, target: u8) -> Self {
        Self::new(&[control], target).expect("valid CNOT")
    }

    pub fn tof(c0: u8, c1: u8, target: u8) -> Self {
        Self::new(&[c0, c1], target).expect("valid TOF")
    }

    pub fn kind(&self) -> GateKind {
        GateKind::from_arity(self.n_controls as usize + 1).unwrap()
    }

    pub fn target(&self) -> u8 {
        self.target
    }

    /// Controls in the order they were given.
    pub fn controls(&self) -> &[u8] {
        &self.controls[..self.n_controls as usize]
    }

    pub fn control_mask(&self) -> u8 {
        self.controls().iter().fold(0, |m, &c| m | (1 << c))
    }

    /// Every line the gate touches.
    pub fn line_mask(&self) -> u8 {
        self.control_mask() | (1 << self.target)
    }

    /// The gate as a 4-bit function; lines it does not touch pass through.
    #[inline]
    pub fn word(&self) -> PermWord {
        self.word
    }

    /// The gate on a circuit of `width` lines, with points beyond `2^width`
    /// fixed. The gate must fit the width.
    #[inline]
    pub fn word_on(&self, width: Width) -> PermWord {
        let bits = 4 * width.points() as u32;
        if bits >= 64 {
            return self.word;
        }
        let low = (1u64 << bits) - 1;
        PermWord((self.word.0 & low) | (PermWord::IDENTITY.0 & !low))
    }

    pub fn fits(&self, width: Width) -> bool {
        (self.line_mask() as usize) < (1 << width.lines())
    }

    /// Moves every line `l` to `sigma(l)`; the word becomes the conjugate by `sigma`.
    pub fn relabel(&self, sigma: LinePerm) -> Gate {
        let mut ctl = [0u8; 3];
        for (o, &c) in ctl.iter_mut().zip(self.controls()) {
            *o = sigma.apply(c);
        }
        Self::build(ctl, self.n_controls, sigma.apply(self.target))
    }

    fn sorted_controls(&self) -> [u8; 3] {
        let mut c = self.controls;
        c[..self.n_controls as usize].sort_unstable();
        c
    }

    pub fn format(&self, order: ControlOrder) -> String {
        let ctl = match order {
            ControlOrder::Sorted => self.sorted_controls(),
            ControlOrder::AsGiven => self.controls,
        };
        let mut s = String::from(self.kind().name());
        s.push('(');
        for &c in &ctl[..self.n_controls as usize] {
            s.push(LINE_NAMES[c as usize]);
            s.push(',');
        }
        s.push(LINE_NAMES[self.target as usize]);
        s.push(')');
        s
    }
}

impl PartialEq for Gate {
    fn eq(&self, other: &Self) -> bool {
        self.target == other.target && self.control_mask() == other.control_mask()
    }
}

impl Eq for Gate {}

impl std::hash::Hash for Gate {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.target, self.control_mask()).hash(state);
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(ControlOrder::AsGiven))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(ControlOrder::Sorted))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControlOrder {
    /// Controls in line order.
    #[default]
    Sorted,
    /// Controls as they were parsed.
    AsGiven,
}

/// The deterministic list of gates admitted at a width and architecture.
///
/// Order: by kind (NOT, CNOT, TOF, TOF4), then target line, then control set
/// as a bit mask.
#[derive(Debug, Clone)]
pub struct GateLibrary {
    width: Width,
    arch: Architecture,
    gates: Vec<Gate>,
    // (target, control mask) -> gate id
    lookup: [[u8; 16]; 4],
}

pub const NO_GATE: u8 = u8::MAX;

impl GateLibrary {
    pub fn new(width: Width, arch: Architecture) -> Self {
        let n = width.lines() as u8;
        let mut gates = Vec::new();
        for kind in GateKind::ALL {
            let n_controls = kind.arity() as u32 - 1;
            for target in 0..n {
                for mask in 0u8..(1 << n) {
                    if mask & (1 << target) != 0 || mask.count_ones() != n_controls {
                        continue;
                    }
                    let controls: Vec<u8> = (0..n).filter(|l| mask & (1 << l) != 0).collect();
                    let g = Gate::new(&controls, target).unwrap();
                    if arch.admits(&g) {
                        gates.push(g);
                    }
                }
            }
        }
        let mut lookup = [[NO_GATE; 16]; 4];
        for (id, g) in gates.iter().enumerate() {
            lookup[g.target as usize][g.control_mask() as usize] = id as u8;
        }
        GateLibrary {
            width,
            arch,
            gates,
            lookup,
        }
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn arch(&self) -> Architecture {
        self.arch
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: u8) -> &Gate {
        &self.gates[id as usize]
    }

    /// Id of `g` in this library, if admitted.
    pub fn id_of(&self, g: &Gate) -> Option<u8> {
        match self.lookup[g.target as usize][g.control_mask() as usize] {
            NO_GATE => None,
            id => Some(id),
        }
    }

    pub fn contains(&self, g: &Gate) -> bool {
        self.id_of(g).is_some()
    }
}

/// Gate list of the given width and architecture, as a plain vector.
pub fn gate_library(n: u8, arch: Architecture) -> Result<Vec<Gate>, GateError> {
    Ok(GateLibrary::new(Width::new(n)?, arch).gates)
}

/// Gates applied left to right: the first gate acts on the input first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: Width,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: Width) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: Width, gates: Vec<Gate>) -> Result<Self, GateError> {
        for g in &gates {
            if !g.fits(width) {
                let line = (0..4).rev().find(|l| g.line_mask() & (1 << l) != 0).unwrap();
                return Err(GateError::LineOutOfWidth {
                    line: LINE_NAMES[line],
                    width,
                });
            }
        }
        Ok(Circuit { width, gates })
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) {
        debug_assert!(g.fits(self.width));
        self.gates.push(g);
    }

    /// Appends `other` after `self`.
    pub fn then(mut self, other: &Circuit) -> Circuit {
        self.gates.extend_from_slice(&other.gates);
        self
    }

    /// The circuit for the inverse function.
    pub fn reversed(&self) -> Circuit {
        let mut gates = self.gates.clone();
        gates.reverse();
        Circuit {
            width: self.width,
            gates,
        }
    }

    pub fn simulate(&self) -> PermWord {
        self.gates
            .iter()
            .fold(PermWord::IDENTITY, |acc, g| acc.compose(g.word_on(self.width)))
    }

    pub fn format(&self, order: ControlOrder) -> String {
        let parts: Vec<String> = self.gates.iter().map(|g| g.format(order)).collect();
        parts.join(" ")
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(ControlOrder::Sorted))
    }
}

/// Parses whitespace-separated `KIND(line,...)` terms; the last line of each
/// term is the target.
pub fn parse_circuit(text: &str, width: Width) -> Result<Circuit, GateError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut gates = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
            pos += 1;
        }
        let name = &text[start..pos];
        let kind = GateKind::from_name(name).ok_or_else(|| GateError::Syntax {
            pos: start,
            msg: if name.is_empty() {
                "expected a gate name".into()
            } else {
                format!("unknown gate `{name}`")
            },
        })?;
        skip_ws(&mut pos);
        if bytes.get(pos) != Some(&b'(') {
            return Err(GateError::Syntax {
                pos,
                msg: "expected `(`".into(),
            });
        }
        pos += 1;
        let mut lines = Vec::with_capacity(4);
        loop {
            skip_ws(&mut pos);
            let c = *bytes.get(pos).ok_or(GateError::Syntax {
                pos,
                msg: "unterminated gate".into(),
            })?;
            let line = match c {
                b'a'..=b'd' => c - b'a',
                _ => {
                    return Err(GateError::Syntax {
                        pos,
                        msg: format!("expected a line name a-d, found `{}`", c as char),
                    })
                }
            };
            if (line as usize) >= width.lines() {
                return Err(GateError::LineOutOfWidth {
                    line: c as char,
                    width,
                });
            }
            if lines.contains(&line) {
                return Err(GateError::DuplicateLine { line: c as char });
            }
            lines.push(line);
            pos += 1;
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b',') => pos += 1,
                Some(b')') => {
                    pos += 1;
                    break;
                }
                _ => {
                    return Err(GateError::Syntax {
                        pos,
                        msg: "expected `,` or `)`".into(),
                    })
                }
            }
        }
        if lines.len() != kind.arity() {
            return Err(GateError::ArityMismatch {
                kind,
                expected: kind.arity(),
                found: lines.len(),
            });
        }
        let target = lines.pop().unwrap();
        gates.push(Gate::new(&lines, target)?);
    }
    Circuit::from_gates(width, gates)
}

pub fn format_circuit(c: &Circuit) -> String {
    c.format(ControlOrder::Sorted)
}

/// Relabels every gate by `sigma`, and reverses the gate order if `invert`.
/// The result simulates to the conjugate by `sigma` of `c` (or of its inverse).
pub fn transform_circuit(c: &Circuit, sigma: LinePerm, invert: bool) -> Circuit {
    let mut gates: Vec<Gate> = c.gates.iter().map(|g| g.relabel(sigma)).collect();
    if invert {
        gates.reverse();
    }
    Circuit {
        width: c.width,
        gates,
    }
}
