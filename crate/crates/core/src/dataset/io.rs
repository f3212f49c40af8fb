//! CSV readers and writers for panel, factor and T-bill files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{FactorSeries, RawRecord};
use crate::error::{Error, Result};
use crate::month::Month;
use crate::scalar::Scalar;

const PANEL_HEADER: [&str; 5] = ["date", "ticker", "permno", "cusip", "ret"];
const FACTOR_HEADER: [&str; 5] = ["date", "mktrf", "smb", "hml", "rf"];
const TBILL_HEADER: [&str; 2] = ["date", "rate"];

/// Formats a float with 10 significant digits, `%.10g` style.
pub fn format_g10(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (9 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_err(source: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        file: source.to_string(),
        line,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    ReaderBuilder::new()
        .trim(Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, source: &str, expected: &[&str]) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| parse_err(source, 1, e.to_string()))?
        .clone();
    let found: Vec<String> = header.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    if found.len() != expected.len() || found.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(parse_err(
            source,
            1,
            format!("expected header '{}', found '{}'", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

fn records<'a, R: Read + 'a>(
    rdr: &'a mut csv::Reader<R>,
    source: &'a str,
    width: usize,
) -> impl Iterator<Item = Result<(u64, StringRecord)>> + 'a {
    rdr.records().map(move |r| {
        let r = r.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(source, line, e.to_string())
        })?;
        let line = r.position().map_or(0, |p| p.line());
        if r.len() != width {
            return Err(parse_err(
                source,
                line,
                format!("expected {width} fields, found {}", r.len()),
            ));
        }
        Ok((line, r))
    })
}

fn field<T: Scalar>(r: &StringRecord, idx: usize, name: &str, source: &str, line: u64) -> Result<T> {
    let raw = &r[idx];
    let v: f64 = raw
        .parse()
        .map_err(|_| parse_err(source, line, format!("{name}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(source, line, format!("{name}: '{raw}' is not finite")));
    }
    Ok(T::lit(v))
}

fn month_field(r: &StringRecord, source: &str, line: u64) -> Result<Month> {
    r[0].parse()
        .map_err(|e: Error| parse_err(source, line, e.to_string()))
}

/// Reads a `date,mktrf,smb,hml,rf` factor file; `percent` divides every
/// value by 100.
pub fn read_factors<T: Scalar, R: Read>(reader: R, source: &str, percent: bool) -> Result<FactorSeries<T>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, source, &FACTOR_HEADER)?;
    let scale = if percent { T::lit(0.01) } else { T::one() };
    let (mut months, mut mktrf, mut smb, mut hml, mut rf) = (vec![], vec![], vec![], vec![], vec![]);
    let mut prev: Option<(Month, u64)> = None;
    for row in records(&mut rdr, source, 5) {
        let (line, r) = row?;
        let month = month_field(&r, source, line)?;
        if let Some((p, _)) = prev {
            if month.ordinal() != p.ordinal() + 1 {
                return Err(parse_err(
                    source,
                    line,
                    format!("months not consecutive: {p} followed by {month}"),
                ));
            }
        }
        prev = Some((month, line));
        months.push(month);
        mktrf.push(field::<T>(&r, 1, "mktrf", source, line)? * scale);
        smb.push(field::<T>(&r, 2, "smb", source, line)? * scale);
        hml.push(field::<T>(&r, 3, "hml", source, line)? * scale);
        rf.push(field::<T>(&r, 4, "rf", source, line)? * scale);
    }
    if months.is_empty() {
        return Err(parse_err(source, 1, "empty series"));
    }
    FactorSeries::new(months, mktrf, smb, hml, rf)
}

pub fn load_factor_file<T: Scalar>(path: &Path, percent: bool) -> Result<FactorSeries<T>> {
    read_factors(open(path)?, &path.display().to_string(), percent)
}

/// Reads a `date,ticker,permno,cusip,ret` panel file.
pub fn read_panel<T: Scalar, R: Read>(reader: R, source: &str) -> Result<Vec<RawRecord<T>>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, source, &PANEL_HEADER)?;
    let mut out = Vec::new();
    for row in records(&mut rdr, source, 5) {
        let (line, r) = row?;
        let month = month_field(&r, source, line)?;
        let ret = field::<T>(&r, 4, "ret", source, line)?;
        if !(ret > -T::one()) {
            return Err(parse_err(source, line, format!("ret {ret} must exceed -1")));
        }
        if r[2].is_empty() || r[3].is_empty() {
            return Err(parse_err(source, line, "empty permno or cusip"));
        }
        out.push(RawRecord {
            month,
            ticker: r[1].to_string(),
            permno: r[2].to_string(),
            cusip: r[3].to_string(),
            ret,
        });
    }
    if out.is_empty() {
        return Err(parse_err(source, 1, "empty panel"));
    }
    Ok(out)
}

pub fn load_panel_file<T: Scalar>(path: &Path) -> Result<Vec<RawRecord<T>>> {
    read_panel(open(path)?, &path.display().to_string())
}

/// Reads a `date,rate` T-bill file of annualized percent yields and returns
/// monthly decimal rates (`rate / 12 / 100`).
pub fn read_tbill<T: Scalar, R: Read>(reader: R, source: &str) -> Result<BTreeMap<Month, T>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, source, &TBILL_HEADER)?;
    let mut out = BTreeMap::new();
    for row in records(&mut rdr, source, 2) {
        let (line, r) = row?;
        let month = month_field(&r, source, line)?;
        let rate = field::<T>(&r, 1, "rate", source, line)?;
        if out.insert(month, rate / T::lit(1200.0)).is_some() {
            return Err(parse_err(source, line, format!("duplicate month {month}")));
        }
    }
    if out.is_empty() {
        return Err(parse_err(source, 1, "empty series"));
    }
    Ok(out)
}

pub fn load_tbill_file<T: Scalar>(path: &Path) -> Result<BTreeMap<Month, T>> {
    read_tbill(open(path)?, &path.display().to_string())
}

/// Writes records in the panel file format.
pub fn write_panel<T: Scalar, W: Write>(mut w: W, records: &[RawRecord<T>]) -> Result<()> {
    writeln!(w, "{}", PANEL_HEADER.join(","))?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.month,
            r.ticker,
            r.permno,
            r.cusip,
            format_g10(r.ret.as_f64())
        )?;
    }
    Ok(())
}

/// Writes factors as decimals (not percent).
pub fn write_factors<T: Scalar, W: Write>(mut w: W, f: &FactorSeries<T>) -> Result<()> {
    writeln!(w, "{}", FACTOR_HEADER.join(","))?;
    for (t, m) in f.months().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{}",
            m.compact(),
            format_g10(f.mktrf[t].as_f64()),
            format_g10(f.smb[t].as_f64()),
            format_g10(f.hml[t].as_f64()),
            format_g10(f.rf[t].as_f64())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g10_formatting() {
        assert_eq!(format_g10(0.0693), "0.0693");
        assert_eq!(format_g10(1.0), "1");
        assert_eq!(format_g10(-0.2240), "-0.224");
        assert_eq!(format_g10(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_g10(2.0 / 3.0 * 1e-7), "6.666666667e-08");
        assert_eq!(format_g10(123456789012.0), "1.23456789e+11");
        assert_eq!(format_g10(42.0), "42");
        assert_eq!(format_g10(0.00012345678901), "0.000123456789");
        assert_eq!(format_g10(f64::NAN), "NaN");
    }

    #[test]
    fn g10_is_stable_under_reparse() {
        for x in [0.1234567890123, -3.3e-9, 7.0, 1e15 / 7.0] {
            let once = format_g10(x);
            let twice = format_g10(once.parse().unwrap());
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn factor_percent_conversion() {
        let text = "date,mktrf,smb,hml,rf\n201007, 6.93, 0.21, -0.26, 0.01\n201008,-4.77,-3.0,-1.9,0.01\n";
        let f: FactorSeries<f64> = read_factors(text.as_bytes(), "f.csv", true).unwrap();
        assert!((f.mktrf[0] - 0.0693).abs() < 1e-15);
        assert!((f.rf[0] - 0.0001).abs() < 1e-18);
        let raw: FactorSeries<f64> = read_factors(text.as_bytes(), "f.csv", false).unwrap();
        assert_eq!(raw.mktrf[0], 6.93);
        assert_eq!(raw.hml[0], -0.26);
    }

    #[test]
    fn factor_errors() {
        let empty = "date,mktrf,smb,hml,rf\n";
        let err = read_factors::<f64, _>(empty.as_bytes(), "f.csv", true).unwrap_err();
        assert!(err.to_string().contains("empty series"), "{err}");

        let bad = "date,mktrf,smb,hml,rf\n201007,1,2,3,4\n201008,1,x,3,4\n";
        let err = read_factors::<f64, _>(bad.as_bytes(), "f.csv", true).unwrap_err();
        assert_eq!(err.to_string(), "f.csv:3: smb: 'x' is not a number");

        let short = "date,mktrf,smb,hml,rf\n201007,1,2,3\n";
        let err = read_factors::<f64, _>(short.as_bytes(), "f.csv", true).unwrap_err();
        assert!(err.to_string().starts_with("f.csv:2:"), "{err}");

        let gap = "date,mktrf,smb,hml,rf\n201007,1,2,3,4\n201009,1,2,3,4\n";
        let err = read_factors::<f64, _>(gap.as_bytes(), "f.csv", true).unwrap_err();
        assert!(err.to_string().contains("not consecutive"), "{err}");

        let header = "date,mkt,smb,hml,rf\n201007,1,2,3,4\n";
        assert!(read_factors::<f64, _>(header.as_bytes(), "f.csv", true).is_err());
    }

    #[test]
    fn panel_round_trip_through_text() {
        let text = "date,ticker,permno,cusip,ret\n2010-07,A,10001,0084610,0.0123\n2010-08,A,10001,0084610,-0.05\n";
        let recs: Vec<RawRecord<f64>> = read_panel(text.as_bytes(), "p.csv").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].cusip, "0084610");
        let mut out = Vec::new();
        write_panel(&mut out, &recs).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn panel_rejects_total_loss_and_names_line() {
        let text = "date,ticker,permno,cusip,ret\n2010-07,A,1,C,0.01\n2010-08,A,1,C,-1.0\n";
        let err = read_panel::<f64, _>(text.as_bytes(), "p.csv").unwrap_err();
        assert!(err.to_string().starts_with("p.csv:3:"), "{err}");
    }

    #[test]
    fn tbill_is_deannualized() {
        let text = "date,rate\n2010-07-01,0.15\n2010-08-01,0.16\n";
        let rates: BTreeMap<Month, f64> = read_tbill(text.as_bytes(), "t.csv").unwrap();
        let jul = Month::new(2010, 7).unwrap();
        assert!((rates[&jul] - 0.15 / 1200.0).abs() < 1e-18);
    }
}
