use crate::dsl::{AffineProgram, ArrayId};

use super::interp::{interpret, symbol_values, Bindings, TraceSink};
use super::TraceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayLayout {
    pub name: String,
    /// Extents before padding.
    pub extents: Vec<i64>,
    pub padded: Vec<i64>,
    /// First element address; always a multiple of the block size.
    pub base: i64,
}

impl ArrayLayout {
    pub fn size(&self) -> i64 {
        self.padded.iter().product()
    }
}

/// Placement of every array in one flat, element-addressed memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedLayout {
    pub arrays: Vec<ArrayLayout>,
    pub block_size: i64,
}

impl PaddedLayout {
    /// Total elements spanned, including alignment gaps.
    pub fn footprint(&self) -> i64 {
        self.arrays.last().map_or(0, |a| a.base + a.size())
    }
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime not below `n`.
pub fn next_prime(n: i64) -> i64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Innermost-dimension padding: `b * p` for the least prime `p` with
/// `b * p >= extent`.
pub fn pad_innermost(extent: i64, b: i64) -> i64 {
    b * next_prime((extent + b - 1) / b)
}

struct RangeSink {
    max: Vec<Vec<i64>>,
}

impl TraceSink for RangeSink {
    fn record(&mut self, _stamp: &[i64], array: ArrayId, indices: &[i64]) {
        let m = &mut self.max[array];
        for (k, &i) in indices.iter().enumerate() {
            m[k] = m[k].max(i + 1);
        }
    }
}

/// Declared extents per array under `bindings`; undeclared arrays get the
/// smallest extents covering every accessed index.
pub fn array_extents(prog: &AffineProgram, bindings: &Bindings) -> Result<Vec<Vec<i64>>, TraceError> {
    let syms = symbol_values(prog, bindings)?;
    let mut inferred = None;
    let mut out = Vec::with_capacity(prog.arrays.len());
    for (id, a) in prog.arrays.iter().enumerate() {
        let ext = match &a.dims {
            Some(dims) => dims.iter().map(|d| d.eval(&[], &syms)).collect::<Vec<_>>(),
            None => {
                if inferred.is_none() {
                    let mut sink = RangeSink {
                        max: prog.arrays.iter().map(|a| vec![1; a.rank]).collect(),
                    };
                    interpret(prog, bindings, &mut sink)?;
                    inferred = Some(sink.max);
                }
                inferred.as_ref().unwrap()[id].clone()
            }
        };
        if let Some(&e) = ext.iter().find(|&&e| e <= 0) {
            return Err(TraceError::NonPositiveExtent {
                array: a.name.clone(),
                extent: e,
            });
        }
        out.push(ext);
    }
    Ok(out)
}

fn place(prog: &AffineProgram, extents: Vec<Vec<i64>>, padded: Vec<Vec<i64>>, b: i64) -> PaddedLayout {
    let mut base = 0;
    let mut arrays = Vec::with_capacity(extents.len());
    for ((a, ext), pad) in prog.arrays.iter().zip(extents).zip(padded) {
        let l = ArrayLayout {
            name: a.name.clone(),
            extents: ext,
            padded: pad,
            base,
        };
        base += l.size();
        base = (base + b - 1) / b * b;
        arrays.push(l);
    }
    PaddedLayout { arrays, block_size: b }
}

/// Prime-padded layout: the innermost extent becomes `b * p` for the least
/// prime `p` that covers it, other non-outermost extents become the next
/// prime, and the outermost extent is kept. Arrays are placed back to back
/// on block boundaries.
pub fn pad_layout(prog: &AffineProgram, bindings: &Bindings, b: i64) -> Result<PaddedLayout, TraceError> {
    if b < 1 {
        return Err(TraceError::InvalidBlockSize(b));
    }
    let extents = array_extents(prog, bindings)?;
    let padded = extents
        .iter()
        .map(|ext| {
            let r = ext.len();
            ext.iter()
                .enumerate()
                .map(|(k, &e)| {
                    if k + 1 == r {
                        pad_innermost(e, b)
                    } else if k == 0 {
                        e
                    } else {
                        next_prime(e)
                    }
                })
                .collect()
        })
        .collect();
    Ok(place(prog, extents, padded, b))
}

/// Declared extents unchanged; bases still block aligned.
pub fn unpadded_layout(prog: &AffineProgram, bindings: &Bindings, b: i64) -> Result<PaddedLayout, TraceError> {
    if b < 1 {
        return Err(TraceError::InvalidBlockSize(b));
    }
    let extents = array_extents(prog, bindings)?;
    let padded = extents.clone();
    Ok(place(prog, extents, padded, b))
}

/// Row-major element address of `indices` in `array`.
pub fn linearize(layout: &PaddedLayout, array: ArrayId, indices: &[i64]) -> Result<i64, TraceError> {
    let a = layout.arrays.get(array).ok_or(TraceError::UnknownArray(array))?;
    let oob = || TraceError::OutOfBounds {
        array: a.name.clone(),
        indices: indices.to_vec(),
    };
    if indices.len() != a.padded.len() {
        return Err(oob());
    }
    let mut off = 0;
    for (&i, &e) in indices.iter().zip(&a.padded) {
        if i < 0 || i >= e {
            return Err(oob());
        }
        off = off * e + i;
    }
    Ok(a.base + off)
}
