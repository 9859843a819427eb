//! Symbols, finite addresses and mask specifications.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Default membership tolerance for the inverse-in-domain test.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One letter of the address alphabet. Externally 1-based, so map `i` of an
/// `N`-map system is `Symbol(i)` with `1 <= i <= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(u8);

impl Symbol {
    pub fn new(one_based: u8) -> Option<Self> {
        (one_based >= 1).then_some(Symbol(one_based))
    }

    pub(crate) fn from_index(index: usize) -> Self {
        debug_assert!(index < u8::MAX as usize);
        Symbol(index as u8 + 1)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based map index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite address `σ_1 σ_2 … σ_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Address(Vec<Symbol>);

impl Address {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Address(symbols)
    }

    /// Builds an address from 1-based symbol values. Panics on a zero.
    pub fn from_ones(values: &[u8]) -> Self {
        Address(
            values
                .iter()
                .map(|&v| Symbol::new(v).expect("symbols are 1-based"))
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    /// 1-based symbol values.
    pub fn values(&self) -> Vec<u8> {
        self.0.iter().map(|s| s.get()).collect()
    }

    /// Drops the first symbol.
    pub fn shifted(&self) -> Address {
        Address(self.0.iter().skip(1).copied().collect())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// How overlaps between map images are resolved into a partition.
#[derive(Clone, Debug, PartialEq)]
pub enum MaskKind {
    /// First map (in this order) whose inverse lands in the domain wins.
    /// The order `1, 2, …, N` gives the tops address.
    TopsPriority(Vec<Symbol>),
    /// Among the maps whose inverse lands in the domain, a point with
    /// `coord[axis] < threshold` goes to the map whose image starts lowest on
    /// that axis, otherwise to the one whose image ends highest. Remaining
    /// ties go to the lowest index.
    StripThreshold { axis: usize, threshold: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaskSpec {
    pub kind: MaskKind,
    pub tolerance: f64,
}

impl MaskSpec {
    pub fn tops(n: usize) -> Self {
        MaskSpec {
            kind: MaskKind::TopsPriority((0..n).map(Symbol::from_index).collect()),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn priority(order: Vec<Symbol>) -> Self {
        MaskSpec {
            kind: MaskKind::TopsPriority(order),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn strip(axis: usize, threshold: f64) -> Self {
        MaskSpec {
            kind: MaskKind::StripThreshold { axis, threshold },
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn is_tops(&self) -> bool {
        matches!(self.kind, MaskKind::TopsPriority(_))
    }
}
