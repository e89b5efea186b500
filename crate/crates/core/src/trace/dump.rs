use std::fmt::Write as _;
use std::io;

use super::AccessTrace;

fn join(v: &[i64], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

/// One line per record: `t=(0,1,2) a=A blk=(3,0)`.
pub fn dump_text(trace: &AccessTrace) -> String {
    let mut out = String::new();
    for r in trace.records() {
        let _ = writeln!(
            out,
            "t=({}) a={} blk=({})",
            join(r.stamp, ","),
            trace.array_names()[r.array],
            join(&r.block.indices, ",")
        );
    }
    out
}

/// CSV with columns `pos,t,array,index,block`; vectors are space separated.
pub fn write_csv<W: io::Write>(trace: &AccessTrace, w: W) -> Result<(), csv::Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["pos", "t", "array", "index", "block"])?;
    for (i, r) in trace.records().enumerate() {
        wr.write_record([
            i.to_string(),
            join(r.stamp, " "),
            trace.array_names()[r.array].clone(),
            join(r.indices, " "),
            join(&r.block.indices, " "),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
