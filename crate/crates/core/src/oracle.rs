//! Simulated emptiness oracles over a sealed hidden graph.
//!
//! An [`OracleHandle`] owns the hidden [`Graph`] and a [`QueryLedger`]. The
//! graph is private to this module; algorithms only ever see query answers,
//! so the ledger is a complete record of what they learned and paid.
//!
//! Three query kinds are simulated:
//!
//! * BIS: given disjoint `A`, `B`, is there an edge with one endpoint in each?
//! * IS: given `U`, is there an edge with both endpoints in `U`?
//! * EE: given a set `P` of vertex pairs, is some pair of `P` an edge?
//!
//! Invalid inputs (empty or overlapping sets, repeated or out-of-range
//! vertices) are errors and leave the ledger untouched.

use crate::graph::{Graph, Vertex, VertexPairSet};
use crate::rng::Seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("query sets must be nonempty")]
    EmptySet,
    #[error("independent set queries need at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} appears on both sides of a bipartite query")]
    Overlap(Vertex),
    #[error("vertex {0} repeated within a query set")]
    Repeated(Vertex),
    #[error("vertex {v} outside 0..{n}")]
    OutOfRange { v: Vertex, n: usize },
    #[error("pair set must be nonempty")]
    EmptyPairSet,
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("cell sides must be sorted")]
    Unsorted,
}

/// Per-kind query counters. Counters only ever grow.
#[derive(Debug, Default)]
pub struct QueryLedger {
    bis: AtomicU64,
    is: AtomicU64,
    ee: AtomicU64,
}

impl QueryLedger {
    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            bis: self.bis.load(Ordering::Relaxed),
            is: self.is.load(Ordering::Relaxed),
            ee: self.ee.load(Ordering::Relaxed),
        }
    }
}

/// A point-in-time copy of a [`QueryLedger`]; serializes as
/// `{"bis":k1,"is":k2,"ee":k3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub bis: u64,
    pub is: u64,
    pub ee: u64,
}

impl LedgerSnapshot {
    pub fn total(&self) -> u64 {
        self.bis + self.is + self.ee
    }

    /// Queries issued between `earlier` and `self`.
    pub fn since(&self, earlier: &LedgerSnapshot) -> LedgerSnapshot {
        LedgerSnapshot {
            bis: self.bis - earlier.bis,
            is: self.is - earlier.is,
            ee: self.ee - earlier.ee,
        }
    }
}

/// The query surface every algorithm in this crate is written against.
pub trait BisOracle {
    fn vertex_count(&self) -> usize;

    /// Whether some edge joins `a` and `b`. The sets must be nonempty and
    /// disjoint.
    fn bis(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError>;

    /// [`BisOracle::bis`] on a checked cell. Charged exactly like `bis`;
    /// implementations may skip input validation.
    fn bis_cell(&self, c: Cell<'_>) -> Result<bool, OracleError> {
        self.bis(c.a, c.b)
    }

    fn ledger(&self) -> LedgerSnapshot;
}

/// Two nonempty, disjoint, sorted vertex sets, checked once against a vertex
/// count. Halving only takes contiguous sub-slices, so every descendant of a
/// checked cell is valid too and queries on it need no further validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell<'s> {
    a: &'s [Vertex],
    b: &'s [Vertex],
    n: usize,
}

impl<'s> Cell<'s> {
    pub fn new(n: usize, a: &'s [Vertex], b: &'s [Vertex]) -> Result<Self, OracleError> {
        for side in [a, b] {
            if side.is_empty() {
                return Err(OracleError::EmptySet);
            }
            if !strictly_increasing(side) {
                return Err(match side.windows(2).find(|w| w[0] == w[1]) {
                    Some(w) => OracleError::Repeated(w[0]),
                    None => OracleError::Unsorted,
                });
            }
        }
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if let [x] = *small {
            for v in [x, *large.last().expect("nonempty")] {
                if v as usize >= n {
                    return Err(OracleError::OutOfRange { v, n });
                }
            }
            if large.binary_search(&x).is_ok() {
                return Err(OracleError::Overlap(x));
            }
        } else {
            with_marks(n, |marks| marks.validate_pair(small, large))?;
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> &'s [Vertex] {
        self.a
    }

    pub fn b(&self) -> &'s [Vertex] {
        self.b
    }

    /// Both sides are single vertices.
    pub fn is_leaf(&self) -> bool {
        self.a.len() == 1 && self.b.len() == 1
    }

    /// The larger side (ties: `a`) cut at its positional midpoint. Must not
    /// be called on a leaf.
    pub fn split(self) -> (Cell<'s>, Cell<'s>) {
        debug_assert!(!self.is_leaf());
        if self.a.len() >= self.b.len() {
            let (a1, a2) = self.a.split_at(self.a.len().div_ceil(2));
            (Cell { a: a1, ..self }, Cell { a: a2, ..self })
        } else {
            let (b1, b2) = self.b.split_at(self.b.len().div_ceil(2));
            (Cell { b: b1, ..self }, Cell { b: b2, ..self })
        }
    }
}

/// Owner of a hidden graph and of the ledger charged for querying it.
pub struct OracleHandle {
    hidden: Graph,
    ledger: QueryLedger,
}

impl OracleHandle {
    /// Seals `hidden`; from here on it can only be observed through queries.
    pub fn new(hidden: Graph) -> Self {
        Self {
            hidden,
            ledger: QueryLedger::default(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.hidden.vertex_count()
    }

    pub fn ledger(&self) -> LedgerSnapshot {
        self.ledger.snapshot()
    }

    pub fn bis(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError> {
        let answer = self.crossing_edge_exists(a, b)?;
        self.ledger.bis.fetch_add(1, Ordering::Relaxed);
        Ok(answer)
    }

    pub fn is_query(&self, u: &[Vertex]) -> Result<bool, OracleError> {
        if u.len() < 2 {
            return Err(OracleError::TooFewVertices(u.len()));
        }
        let answer = with_marks(self.vertex_count(), |marks| {
            marks.mark_primary(u)?;
            Ok(u.iter().any(|&x| marks.hits_primary(&self.hidden, x)))
        })?;
        self.ledger.is.fetch_add(1, Ordering::Relaxed);
        Ok(answer)
    }

    pub fn ee(&self, p: &VertexPairSet) -> Result<bool, OracleError> {
        let answer = match p {
            VertexPairSet::Explicit(pairs) => {
                if pairs.is_empty() {
                    return Err(OracleError::EmptyPairSet);
                }
                let n = self.vertex_count();
                if let Some(e) = pairs.iter().find(|e| e.hi() as usize >= n) {
                    return Err(OracleError::OutOfRange { v: e.hi(), n });
                }
                pairs.iter().any(|e| self.hidden.has_edge(e.lo(), e.hi()))
            }
            VertexPairSet::Product { left, right } => {
                if left.is_empty() || right.is_empty() {
                    return Err(OracleError::EmptyPairSet);
                }
                self.crossing_edge_exists(left, right)?
            }
        };
        self.ledger.ee.fetch_add(1, Ordering::Relaxed);
        Ok(answer)
    }

    /// BIS answered with a single EE query on `A × B`.
    pub fn bis_via_ee(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError> {
        if a.is_empty() || b.is_empty() {
            return Err(OracleError::EmptySet);
        }
        // Validate before charging; `product` would silently deduplicate.
        with_marks(self.vertex_count(), |marks| marks.validate_pair(a, b))?;
        let pairs = VertexPairSet::Product {
            left: a.to_vec(),
            right: b.to_vec(),
        };
        self.ee(&pairs)
    }

    /// IS answered by BIS on random bipartitions of `u`.
    ///
    /// Each round splits `u` uniformly among bipartitions with both sides
    /// nonempty; a fixed edge inside `u` is split with probability above 1/2.
    /// A `true` answer is always correct; `false` is wrong with probability
    /// at most `2^-rounds`.
    pub fn is_via_bis(&self, u: &[Vertex], rounds: u32, seed: Seed) -> Result<bool, OracleError> {
        if u.len() < 2 {
            return Err(OracleError::TooFewVertices(u.len()));
        }
        if rounds == 0 {
            return Err(OracleError::NoRounds);
        }
        with_marks(self.vertex_count(), |marks| marks.mark_primary(u).map(|_| ()))?;
        let mut rng = seed.stream(0);
        let (mut left, mut right) = (Vec::with_capacity(u.len()), Vec::with_capacity(u.len()));
        for _ in 0..rounds {
            loop {
                left.clear();
                right.clear();
                for &x in u {
                    if rng.gen::<bool>() {
                        left.push(x)
                    } else {
                        right.push(x)
                    }
                }
                if !left.is_empty() && !right.is_empty() {
                    break;
                }
            }
            if self.bis(&left, &right)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether `x` has a neighbor in `set`, answered straight from the
    /// adjacency row when `set` is sorted; `None` sends the caller to the
    /// general path.
    fn single_vertex_crossing(&self, x: Vertex, set: &[Vertex]) -> Result<Option<bool>, OracleError> {
        if !strictly_increasing(set) {
            return Ok(None);
        }
        let n = self.vertex_count();
        for v in [x, *set.last().expect("nonempty")] {
            if v as usize >= n {
                return Err(OracleError::OutOfRange { v, n });
            }
        }
        if set.binary_search(&x).is_ok() {
            return Err(OracleError::Overlap(x));
        }
        let row = self.hidden.adjacency(x);
        Ok(Some(set.iter().any(|&w| row.contains(w as usize))))
    }

    fn crossing_edge_exists(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError> {
        if a.is_empty() || b.is_empty() {
            return Err(OracleError::EmptySet);
        }
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        if let [x] = *small {
            if let Some(answer) = self.single_vertex_crossing(x, large)? {
                return Ok(answer);
            }
        }
        with_marks(self.vertex_count(), |marks| {
            marks.validate_pair(small, large)?;
            Ok(self.scan_marked(marks, small))
        })
    }

    /// Crossing test on a checked cell; no validation.
    fn crossing_in_cell(&self, c: Cell<'_>) -> bool {
        let (small, large) = if c.a.len() <= c.b.len() { (c.a, c.b) } else { (c.b, c.a) };
        let g = &self.hidden;
        // Probe rows directly first, at most as many lookups as marking the
        // large side would cost. Dense cells answer within a few probes.
        let mut budget = large.len();
        'probe: for &x in small {
            let row = g.adjacency(x);
            for &w in large {
                if budget == 0 {
                    break 'probe;
                }
                budget -= 1;
                if row.contains(w as usize) {
                    return true;
                }
            }
        }
        if small.len() == 1 {
            // The probe covered every pair.
            return false;
        }
        with_marks(self.vertex_count(), |marks| {
            marks.mark_sorted(large);
            Ok(self.scan_marked(marks, small))
        })
        .expect("marking a checked cell cannot fail")
    }

    /// Whether some vertex of `small` has a neighbor among the primary marks.
    fn scan_marked(&self, marks: &Marks, small: &[Vertex]) -> bool {
        let g = &self.hidden;
        let row_cost = small.len() * marks.words;
        let mut list_cost = 0;
        for &x in small {
            list_cost += g.degree(x);
            if list_cost >= row_cost {
                break;
            }
        }
        if list_cost < row_cost {
            small
                .iter()
                .any(|&x| g.neighbors(x).iter().any(|&w| marks.primary_has(w)))
        } else {
            small.iter().any(|&x| marks.hits_primary(g, x))
        }
    }
}

impl BisOracle for OracleHandle {
    fn vertex_count(&self) -> usize {
        OracleHandle::vertex_count(self)
    }

    fn bis(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError> {
        OracleHandle::bis(self, a, b)
    }

    fn bis_cell(&self, c: Cell<'_>) -> Result<bool, OracleError> {
        if c.n != self.vertex_count() {
            return OracleHandle::bis(self, c.a, c.b);
        }
        let answer = self.crossing_in_cell(c);
        self.ledger.bis.fetch_add(1, Ordering::Relaxed);
        Ok(answer)
    }

    fn ledger(&self) -> LedgerSnapshot {
        OracleHandle::ledger(self)
    }
}

/// A BIS view of a handle in which every query is simulated by one EE query,
/// so all charges land on the EE counter.
pub struct EeBacked<'a>(pub &'a OracleHandle);

impl BisOracle for EeBacked<'_> {
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    fn bis(&self, a: &[Vertex], b: &[Vertex]) -> Result<bool, OracleError> {
        self.0.bis_via_ee(a, b)
    }

    fn ledger(&self) -> LedgerSnapshot {
        self.0.ledger()
    }
}

/// `⌈log2(1/δ)⌉` rounds for `δ = n^-3`.
pub fn default_is_rounds(n: usize) -> u32 {
    (3.0 * (n.max(2) as f64).log2()).ceil() as u32
}

/// Per-thread membership scratch used to validate and answer queries
/// without allocating.
struct Marks {
    primary: Vec<u64>,
    secondary: Vec<u64>,
    words: usize,
    n: usize,
}

impl Marks {
    fn reset(&mut self, n: usize) {
        let words = n.div_ceil(64);
        if self.primary.len() < words {
            self.primary.resize(words, 0);
            self.secondary.resize(words, 0);
        }
        self.words = words;
        self.n = n;
    }

    #[inline]
    fn primary_has(&self, v: Vertex) -> bool {
        self.primary[v as usize / 64] & (1 << (v % 64)) != 0
    }

    #[inline]
    fn hits_primary(&self, g: &Graph, x: Vertex) -> bool {
        g.adjacency(x)
            .words()
            .iter()
            .zip(&self.primary[..self.words])
            .any(|(a, b)| a & b != 0)
    }

    fn mark_primary(&mut self, set: &[Vertex]) -> Result<(), OracleError> {
        for &v in set {
            if v as usize >= self.n {
                return Err(OracleError::OutOfRange { v, n: self.n });
            }
            let (w, bit) = (v as usize / 64, 1u64 << (v % 64));
            if self.primary[w] & bit != 0 {
                return Err(OracleError::Repeated(v));
            }
            self.primary[w] |= bit;
        }
        Ok(())
    }

    /// Marks a strictly increasing, in-range `set` as primary.
    fn mark_sorted(&mut self, set: &[Vertex]) {
        let primary = &mut self.primary[..self.words];
        // Gather each word in a register and store it once.
        let (mut word, mut bits) = (set[0] as usize / 64, 0u64);
        for &v in set {
            let w = v as usize / 64;
            if w != word {
                primary[word] |= bits;
                (word, bits) = (w, 0);
            }
            bits |= 1 << (v % 64);
        }
        primary[word] |= bits;
    }

    /// Marks `large` as primary and checks `small` against it.
    fn validate_pair(&mut self, small: &[Vertex], large: &[Vertex]) -> Result<(), OracleError> {
        // Strictly increasing input cannot repeat, which is what every
        // internal caller passes.
        if strictly_increasing(small) && strictly_increasing(large) {
            for s in [small, large] {
                let &v = s.last().expect("nonempty");
                if v as usize >= self.n {
                    return Err(OracleError::OutOfRange { v, n: self.n });
                }
            }
            self.mark_sorted(large);
            let primary = &self.primary[..self.words];
            let overlap = small.iter().fold(0u64, |acc, &v| acc | (primary[v as usize / 64] >> (v % 64) & 1));
            return match overlap {
                0 => Ok(()),
                _ => Err(OracleError::Overlap(*small.iter().find(|&&v| self.primary_has(v)).expect("found above"))),
            };
        }
        self.mark_primary(large)?;
        for &v in small {
            if v as usize >= self.n {
                return Err(OracleError::OutOfRange { v, n: self.n });
            }
            if self.primary_has(v) {
                return Err(OracleError::Overlap(v));
            }
            let (w, bit) = (v as usize / 64, 1u64 << (v % 64));
            if self.secondary[w] & bit != 0 {
                return Err(OracleError::Repeated(v));
            }
            self.secondary[w] |= bit;
        }
        Ok(())
    }

    fn clear(&mut self) {
        self.primary[..self.words].fill(0);
        self.secondary[..self.words].fill(0);
    }
}

fn strictly_increasing(s: &[Vertex]) -> bool {
    // Branch-free so it vectorizes; these slices are long and almost always sorted.
    s.iter().zip(&s[1.min(s.len())..]).fold(true, |ok, (x, y)| ok & (x < y))
}

thread_local! {
    static MARKS: RefCell<Marks> = const {
        RefCell::new(Marks {
            primary: Vec::new(),
            secondary: Vec::new(),
            words: 0,
            n: 0,
        })
    };
}

fn with_marks<T>(n: usize, f: impl FnOnce(&mut Marks) -> Result<T, OracleError>) -> Result<T, OracleError> {
    MARKS.with(|cell| {
        let mut marks = cell.borrow_mut();
        marks.reset(n);
        let out = f(&mut marks);
        marks.clear();
        out
    })
}
