//! Trace-driven LRU cache simulation over padded element addresses.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::trace::{linearize, AccessTrace, PaddedLayout, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("cache capacity is zero blocks")]
    CapacityZero,
    #[error("geometry uses {geometry} elements per block but the layout uses {layout}")]
    BlockSizeMismatch { geometry: i64, layout: i64 },
    #[error("invalid geometry `{0}`: expected assoc:sets:block_bytes")]
    BadGeometry(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Associativity {
    /// One set holding this many blocks.
    Full(usize),
    /// Ways per set.
    Ways(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheGeometry {
    /// Elements per block.
    pub block_size_elems: i64,
    pub associativity: Associativity,
    /// Always 1 for a fully associative cache.
    pub num_sets: usize,
    pub block_bytes: usize,
}

impl CacheGeometry {
    pub fn fully_associative(capacity_blocks: usize, b: i64, block_bytes: usize) -> Self {
        CacheGeometry {
            block_size_elems: b,
            associativity: Associativity::Full(capacity_blocks),
            num_sets: 1,
            block_bytes,
        }
    }

    pub fn set_associative(ways: usize, num_sets: usize, b: i64, block_bytes: usize) -> Self {
        CacheGeometry {
            block_size_elems: b,
            associativity: Associativity::Ways(ways),
            num_sets,
            block_bytes,
        }
    }

    pub fn capacity_blocks(&self) -> usize {
        match self.associativity {
            Associativity::Full(c) => c,
            Associativity::Ways(w) => w * self.num_sets,
        }
    }

    pub fn capacity_bytes(&self) -> usize {
        self.capacity_blocks() * self.block_bytes
    }

    /// Parses `assoc:sets:block_bytes` with `b` elements per block. `assoc`
    /// is a way count, or `full` in which case the middle field is the
    /// capacity in blocks.
    pub fn parse(s: &str, b: i64) -> Result<Self, SimError> {
        let bad = || SimError::BadGeometry(s.to_string());
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [assoc, sets, bytes] = parts[..] else {
            return Err(bad());
        };
        let sets: usize = sets.parse().map_err(|_| bad())?;
        let bytes: usize = bytes.parse().map_err(|_| bad())?;
        if bytes == 0 {
            return Err(bad());
        }
        if assoc.eq_ignore_ascii_case("full") {
            Ok(Self::fully_associative(sets, b, bytes))
        } else {
            let ways: usize = assoc.parse().map_err(|_| bad())?;
            Ok(Self::set_associative(ways, sets, b, bytes))
        }
    }
}

impl fmt::Display for CacheGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.associativity {
            Associativity::Full(c) => write!(f, "full:{c}:{}", self.block_bytes),
            Associativity::Ways(w) => write!(f, "{w}:{}:{}", self.num_sets, self.block_bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub geometry: CacheGeometry,
    pub layout: PaddedLayout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SetStats {
    pub accesses: u64,
    pub misses: u64,
    /// Blocks resident at the end of the run.
    pub occupancy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimResult {
    pub geometry: CacheGeometry,
    pub accesses: u64,
    pub misses: u64,
    /// First touches of a block.
    pub cold_misses: u64,
    pub per_set: Vec<SetStats>,
}

impl SimResult {
    pub fn miss_ratio(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.misses as f64 / self.accesses as f64
        }
    }

    pub fn hits(&self) -> u64 {
        self.accesses - self.misses
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "geometry": self.geometry.to_string(),
            "capacity_blocks": self.geometry.capacity_blocks(),
            "accesses": self.accesses,
            "misses": self.misses,
            "cold": self.cold_misses,
            "miss_ratio": self.miss_ratio(),
        })
    }

    /// Per-set histogram as CSV rows `set,accesses,misses,occupancy`.
    pub fn write_set_csv<W: io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["set", "accesses", "misses", "occupancy"])?;
        for (i, s) in self.per_set.iter().enumerate() {
            out.serialize((i, s.accesses, s.misses, s.occupancy))?;
        }
        out.flush()?;
        Ok(())
    }
}

const NIL: u32 = u32::MAX;

/// Fully associative LRU: hash map into an intrusive recency list.
struct FullLru {
    cap: usize,
    map: HashMap<u64, u32>,
    key: Vec<u64>,
    prev: Vec<u32>,
    next: Vec<u32>,
    head: u32,
    tail: u32,
}

impl FullLru {
    fn new(cap: usize) -> Self {
        FullLru {
            cap,
            map: HashMap::with_capacity(cap.min(1 << 20)),
            key: Vec::new(),
            prev: Vec::new(),
            next: Vec::new(),
            head: NIL,
            tail: NIL,
        }
    }

    fn unlink(&mut self, i: u32) {
        let (p, n) = (self.prev[i as usize], self.next[i as usize]);
        if p == NIL {
            self.head = n;
        } else {
            self.next[p as usize] = n;
        }
        if n == NIL {
            self.tail = p;
        } else {
            self.prev[n as usize] = p;
        }
    }

    fn push_front(&mut self, i: u32) {
        self.prev[i as usize] = NIL;
        self.next[i as usize] = self.head;
        if self.head != NIL {
            self.prev[self.head as usize] = i;
        }
        self.head = i;
        if self.tail == NIL {
            self.tail = i;
        }
    }

    /// Returns true on a hit.
    fn access(&mut self, blk: u64) -> bool {
        if let Some(&i) = self.map.get(&blk) {
            if self.head != i {
                self.unlink(i);
                self.push_front(i);
            }
            return true;
        }
        let i = if self.map.len() < self.cap {
            let i = self.key.len() as u32;
            self.key.push(blk);
            self.prev.push(NIL);
            self.next.push(NIL);
            i
        } else {
            let i = self.tail;
            self.unlink(i);
            self.map.remove(&self.key[i as usize]);
            self.key[i as usize] = blk;
            i
        };
        self.map.insert(blk, i);
        self.push_front(i);
        false
    }

    fn len(&self) -> usize {
        self.map.len()
    }
}

/// W-way set-associative LRU; each set is a short most-recent-first list.
struct SetLru {
    ways: usize,
    sets: Vec<Vec<u64>>,
}

impl SetLru {
    fn new(ways: usize, num_sets: usize) -> Self {
        SetLru {
            ways,
            sets: vec![Vec::with_capacity(ways.min(64)); num_sets],
        }
    }

    fn access(&mut self, set: usize, blk: u64) -> bool {
        let s = &mut self.sets[set];
        match s.iter().position(|&x| x == blk) {
            Some(p) => {
                s[..=p].rotate_right(1);
                true
            }
            None => {
                if s.len() == self.ways {
                    s.pop();
                }
                s.insert(0, blk);
                false
            }
        }
    }
}

enum Engine {
    Full(FullLru),
    Set(SetLru),
}

/// Simulates a sequence of block addresses.
pub fn simulate_blocks(blocks: impl IntoIterator<Item = u64>, geometry: &CacheGeometry) -> Result<SimResult, SimError> {
    if geometry.capacity_blocks() == 0 || geometry.num_sets == 0 {
        return Err(SimError::CapacityZero);
    }
    let num_sets = geometry.num_sets;
    let mut engine = match geometry.associativity {
        Associativity::Full(c) => Engine::Full(FullLru::new(c)),
        Associativity::Ways(w) => Engine::Set(SetLru::new(w, num_sets)),
    };
    let mut per_set = vec![SetStats::default(); num_sets];
    let mut seen = HashSet::new();
    let (mut accesses, mut misses, mut cold) = (0u64, 0u64, 0u64);
    for blk in blocks {
        let set = (blk % num_sets as u64) as usize;
        let hit = match &mut engine {
            Engine::Full(e) => e.access(blk),
            Engine::Set(e) => e.access(set, blk),
        };
        accesses += 1;
        per_set[set].accesses += 1;
        if !hit {
            misses += 1;
            per_set[set].misses += 1;
            if seen.insert(blk) {
                cold += 1;
            }
        }
    }
    match &engine {
        Engine::Full(e) => per_set[0].occupancy = e.len(),
        Engine::Set(e) => {
            for (st, s) in per_set.iter_mut().zip(&e.sets) {
                st.occupancy = s.len();
            }
        }
    }
    Ok(SimResult {
        geometry: *geometry,
        accesses,
        misses,
        cold_misses: cold,
        per_set,
    })
}

/// Block address `floor(addr / b)` of every access under `layout`.
pub fn block_addresses(trace: &AccessTrace, layout: &PaddedLayout) -> Result<Vec<u64>, SimError> {
    let b = layout.block_size;
    trace
        .records()
        .map(|r| {
            let addr = linearize(layout, r.array, r.indices)?;
            Ok(addr.div_euclid(b) as u64)
        })
        .collect()
}

fn check(geometry: &CacheGeometry, layout: &PaddedLayout) -> Result<(), SimError> {
    if geometry.capacity_blocks() == 0 || geometry.num_sets == 0 {
        return Err(SimError::CapacityZero);
    }
    if geometry.block_size_elems != layout.block_size {
        return Err(SimError::BlockSizeMismatch {
            geometry: geometry.block_size_elems,
            layout: layout.block_size,
        });
    }
    Ok(())
}

/// Exact LRU simulation of `trace` laid out by `config.layout`.
pub fn simulate(trace: &AccessTrace, config: &SimConfig) -> Result<SimResult, SimError> {
    check(&config.geometry, &config.layout)?;
    let blocks = block_addresses(trace, &config.layout)?;
    simulate_blocks(blocks, &config.geometry)
}

/// One result per geometry, all on the same layout. Geometries run in
/// parallel.
pub fn sweep(
    trace: &AccessTrace,
    layout: &PaddedLayout,
    geometries: &[CacheGeometry],
) -> Result<Vec<SimResult>, SimError> {
    for g in geometries {
        check(g, layout)?;
    }
    let blocks = block_addresses(trace, layout)?;
    geometries
        .par_iter()
        .map(|g| simulate_blocks(blocks.iter().copied(), g))
        .collect()
}
