use std::io::Write;

use crate::PulseRecord;

/// Writes records as CSV with header `x_a,p_a,sym,x_b,p_b,dec,acc`.
pub fn write_records_csv<W, I>(out: W, records: I) -> csv::Result<()>
where
    W: Write,
    I: IntoIterator<Item = PulseRecord>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x_a", "p_a", "sym", "x_b", "p_b", "dec", "acc"])?;
    for r in records {
        w.write_record([
            r.x_a.to_string(),
            r.p_a.to_string(),
            r.sym.to_string(),
            r.x_b.to_string(),
            r.p_b.to_string(),
            r.dec.to_string(),
            u8::from(r.acc).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
