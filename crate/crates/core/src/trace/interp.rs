use std::collections::{BTreeMap, HashMap};

use crate::dsl::{AffineProgram, ArrayId, Stmt};

use super::TraceError;

/// Concrete values for program parameters.
pub type Bindings = BTreeMap<String, i64>;

/// Receives accesses in execution order.
pub trait TraceSink {
    /// `stamp` holds the filled prefix of the timestamp vector; the
    /// remaining positions are zero.
    fn record(&mut self, stamp: &[i64], array: ArrayId, indices: &[i64]);
}

pub(crate) fn symbol_values(prog: &AffineProgram, bindings: &Bindings) -> Result<Vec<i64>, TraceError> {
    prog.symbols
        .iter()
        .map(|s| {
            bindings
                .get(s)
                .copied()
                .ok_or_else(|| TraceError::UnboundSymbol(s.clone()))
        })
        .collect()
}

/// Walks the program in execution order, feeding every access to `sink`.
pub fn interpret(prog: &AffineProgram, bindings: &Bindings, sink: &mut impl TraceSink) -> Result<(), TraceError> {
    let syms = symbol_values(prog, bindings)?;
    let mut st = State {
        syms: &syms,
        ivars: Vec::new(),
        stamp: vec![0; prog.timestamp_dims()],
        idx: Vec::new(),
    };
    st.run(&prog.body, 0, sink);
    Ok(())
}

struct State<'a> {
    syms: &'a [i64],
    ivars: Vec<i64>,
    stamp: Vec<i64>,
    idx: Vec<i64>,
}

impl State<'_> {
    fn run(&mut self, s: &Stmt, level: usize, sink: &mut impl TraceSink) {
        match s {
            Stmt::Access(a) => {
                self.idx.clear();
                for e in &a.subscripts {
                    self.idx.push(e.eval(&self.ivars, self.syms));
                }
                sink.record(&self.stamp[..level], a.array, &self.idx);
            }
            Stmt::Loop(l) => {
                let lo = l.lower.eval(&self.ivars, self.syms);
                let trip = l.trip_count(&self.ivars, self.syms);
                for k in 0..trip {
                    self.ivars.push(lo + k * l.step);
                    self.stamp[level] = k;
                    self.run(&l.body, level + 1, sink);
                    self.ivars.pop();
                }
                self.stamp[level] = 0;
            }
            Stmt::Block(stmts) => {
                for (k, c) in stmts.iter().enumerate() {
                    self.stamp[level] = k as i64;
                    self.run(c, level + 1, sink);
                }
                self.stamp[level] = 0;
            }
            Stmt::If { cond, then, otherwise } => {
                if cond.holds(&self.ivars, self.syms) {
                    self.run(then, level, sink);
                } else if let Some(e) = otherwise {
                    self.run(e, level, sink);
                }
            }
        }
    }
}

/// Cache-block identity: the array plus its subscripts with the last one
/// divided by the block size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataBlockId {
    pub array: ArrayId,
    pub indices: Vec<i64>,
}

/// Interns keys of the form `[array, i0, i1, ...]` to dense ids.
#[derive(Default)]
struct Interner {
    map: HashMap<Vec<i64>, u32>,
    keys: Vec<Vec<i64>>,
    buf: Vec<i64>,
}

impl Interner {
    fn intern(&mut self, array: ArrayId, indices: &[i64], block: Option<i64>) -> u32 {
        self.buf.clear();
        self.buf.push(array as i64);
        self.buf.extend_from_slice(indices);
        if let (Some(b), Some(last)) = (block, self.buf.last_mut()) {
            if !indices.is_empty() {
                *last = last.div_euclid(b);
            }
        }
        if let Some(&id) = self.map.get(self.buf.as_slice()) {
            return id;
        }
        let id = self.keys.len() as u32;
        self.keys.push(self.buf.clone());
        self.map.insert(self.buf.clone(), id);
        id
    }
}

fn key_to_block(key: &[i64]) -> DataBlockId {
    DataBlockId {
        array: key[0] as ArrayId,
        indices: key[1..].to_vec(),
    }
}

/// Ordered trace of accesses with timestamp vectors and block identities.
#[derive(Debug, Clone)]
pub struct AccessTrace {
    dims: usize,
    block_size: i64,
    stamps: Vec<i64>,
    elems: Vec<u32>,
    elem_table: Vec<(ArrayId, Vec<i64>)>,
    elem_block: Vec<u32>,
    blocks: Vec<DataBlockId>,
    array_names: Vec<String>,
}

/// One record of an [`AccessTrace`].
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord<'a> {
    pub stamp: &'a [i64],
    pub array: ArrayId,
    pub indices: &'a [i64],
    pub block: &'a DataBlockId,
    pub block_id: u32,
}

impl AccessTrace {
    /// Number of records (n).
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Number of distinct data blocks touched (m).
    pub fn distinct_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> i64 {
        self.block_size
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn array_names(&self) -> &[String] {
        &self.array_names
    }

    pub fn record(&self, i: usize) -> TraceRecord<'_> {
        let e = self.elems[i] as usize;
        let (array, indices) = &self.elem_table[e];
        let block_id = self.elem_block[e];
        TraceRecord {
            stamp: &self.stamps[i * self.dims..(i + 1) * self.dims],
            array: *array,
            indices,
            block: &self.blocks[block_id as usize],
            block_id,
        }
    }

    pub fn records(&self) -> impl Iterator<Item = TraceRecord<'_>> {
        (0..self.len()).map(move |i| self.record(i))
    }

    pub fn stamp(&self, i: usize) -> &[i64] {
        &self.stamps[i * self.dims..(i + 1) * self.dims]
    }

    /// Dense block id per record, numbered by first touch.
    pub fn block_ids(&self) -> Vec<u32> {
        self.elems.iter().map(|&e| self.elem_block[e as usize]).collect()
    }

    pub fn blocks(&self) -> &[DataBlockId] {
        &self.blocks
    }

    /// Distinct elements as (array, subscripts), indexed by element id.
    pub fn elements(&self) -> &[(ArrayId, Vec<i64>)] {
        &self.elem_table
    }

    /// Element id per record.
    pub fn element_ids(&self) -> &[u32] {
        &self.elems
    }

    /// The trace repeated `r` times back to back. Timestamps gain a leading
    /// copy index so order is preserved.
    pub fn replicate(&self, r: usize) -> AccessTrace {
        let mut out = self.clone();
        out.dims = self.dims + 1;
        out.stamps = Vec::with_capacity(self.len() * r * out.dims);
        out.elems = Vec::with_capacity(self.len() * r);
        for copy in 0..r {
            for i in 0..self.len() {
                out.stamps.push(copy as i64);
                out.stamps.extend_from_slice(self.stamp(i));
                out.elems.push(self.elems[i]);
            }
        }
        out
    }
}

struct FullSink {
    dims: usize,
    block_size: i64,
    stamps: Vec<i64>,
    elems: Vec<u32>,
    elem_intern: Interner,
    block_intern: Interner,
    elem_block: Vec<u32>,
}

impl TraceSink for FullSink {
    fn record(&mut self, stamp: &[i64], array: ArrayId, indices: &[i64]) {
        self.stamps.extend_from_slice(stamp);
        self.stamps.extend(std::iter::repeat_n(0, self.dims - stamp.len()));
        let before = self.elem_intern.keys.len();
        let e = self.elem_intern.intern(array, indices, None);
        if self.elem_intern.keys.len() > before {
            let b = self.block_intern.intern(array, indices, Some(self.block_size));
            self.elem_block.push(b);
        }
        self.elems.push(e);
    }
}

fn check_block_size(b: i64) -> Result<(), TraceError> {
    if b < 1 {
        Err(TraceError::InvalidBlockSize(b))
    } else {
        Ok(())
    }
}

/// Runs the program under `bindings` and records every access, mapping the
/// contiguous subscript to its block with block size `b` (in elements).
pub fn generate_trace(prog: &AffineProgram, bindings: &Bindings, b: i64) -> Result<AccessTrace, TraceError> {
    check_block_size(b)?;
    let dims = prog.timestamp_dims();
    let mut sink = FullSink {
        dims,
        block_size: b,
        stamps: Vec::new(),
        elems: Vec::new(),
        elem_intern: Interner::default(),
        block_intern: Interner::default(),
        elem_block: Vec::new(),
    };
    interpret(prog, bindings, &mut sink)?;
    Ok(AccessTrace {
        dims,
        block_size: b,
        stamps: sink.stamps,
        elems: sink.elems,
        elem_table: sink
            .elem_intern
            .keys
            .iter()
            .map(|k| (k[0] as ArrayId, k[1..].to_vec()))
            .collect(),
        elem_block: sink.elem_block,
        blocks: sink.block_intern.keys.iter().map(|k| key_to_block(k)).collect(),
        array_names: prog.arrays.iter().map(|a| a.name.clone()).collect(),
    })
}

struct BlockSink {
    block_size: i64,
    ids: Vec<u32>,
    intern: Interner,
}

impl TraceSink for BlockSink {
    fn record(&mut self, _stamp: &[i64], array: ArrayId, indices: &[i64]) {
        let id = self.intern.intern(array, indices, Some(self.block_size));
        self.ids.push(id);
    }
}

/// Block-id sequence only, numbered by first touch. Cheaper than a full
/// trace when timestamps are not needed.
pub fn block_sequence(prog: &AffineProgram, bindings: &Bindings, b: i64) -> Result<Vec<u32>, TraceError> {
    check_block_size(b)?;
    let mut sink = BlockSink {
        block_size: b,
        ids: Vec::new(),
        intern: Interner::default(),
    };
    interpret(prog, bindings, &mut sink)?;
    Ok(sink.ids)
}
