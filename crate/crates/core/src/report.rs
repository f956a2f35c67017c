//! CSV output shared by the experiment drivers.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// A float at 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Writes a header and rows with RFC 4180 quoting.
pub fn write_csv<W, I, R>(w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    write_csv(std::fs::File::create(path)?, header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_opt(None), "");
        let x = 0.123_456_789_012_345_68;
        assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], [["1", "x,y"]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\r\n1,\"x,y\"\r\n");
    }
}
