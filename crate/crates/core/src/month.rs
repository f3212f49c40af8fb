//! Calendar months as `(year, month)` pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A calendar month. Ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Month {
    pub year: i32,
    /// 1-based month of year.
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Domain(format!("month {month} outside 1..=12")));
        }
        Ok(Month { year, month })
    }

    /// Months since year 0, used for gap checks.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    pub fn from_ordinal(ord: i64) -> Self {
        let year = ord.div_euclid(12) as i32;
        let month = ord.rem_euclid(12) as u32 + 1;
        Month { year, month }
    }

    pub fn succ(self) -> Self {
        Self::from_ordinal(self.ordinal() + 1)
    }

    /// Number of months in the closed range `[self, end]`; zero when `end < self`.
    pub fn span_to(self, end: Month) -> usize {
        (end.ordinal() - self.ordinal() + 1).max(0) as usize
    }

    /// All months in the closed range `[self, end]`.
    pub fn range_inclusive(self, end: Month) -> Vec<Month> {
        (self.ordinal()..=end.ordinal())
            .map(Month::from_ordinal)
            .collect()
    }

    /// Compact `YYYYMM` form used by factor files.
    pub fn compact(self) -> String {
        format!("{:04}{:02}", self.year, self.month)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Accepts `YYYY-MM`, `YYYYMM` and `YYYY-MM-DD` (day ignored).
impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("unrecognized month '{s}'"));
        let (y, m) = if s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit()) {
            (&s[..4], &s[4..])
        } else {
            let mut parts = s.split('-');
            let y = parts.next().ok_or_else(bad)?;
            let m = parts.next().ok_or_else(bad)?;
            match parts.next() {
                None => {}
                Some(d) if !d.is_empty() && d.len() <= 2 && d.bytes().all(|b| b.is_ascii_digit()) => {}
                Some(_) => return Err(bad()),
            }
            if parts.next().is_some() || y.len() != 4 || m.is_empty() || m.len() > 2 {
                return Err(bad());
            }
            (y, m)
        };
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        Month::new(year, month)
    }
}

/// Checks that `months` is strictly increasing with no gaps.
pub(crate) fn check_consecutive(months: &[Month]) -> Result<()> {
    for pair in months.windows(2) {
        if pair[1].ordinal() != pair[0].ordinal() + 1 {
            return Err(Error::Ingestion(format!(
                "months not consecutive: {} followed by {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_date_forms() {
        let m = Month::new(2010, 7).unwrap();
        assert_eq!("2010-07".parse::<Month>().unwrap(), m);
        assert_eq!("201007".parse::<Month>().unwrap(), m);
        assert_eq!("2010-07-01".parse::<Month>().unwrap(), m);
        assert_eq!("2010-7".parse::<Month>().unwrap(), m);
        assert!("2010-13".parse::<Month>().is_err());
        assert!("July 2010".parse::<Month>().is_err());
        assert!("201013".parse::<Month>().is_err());
    }

    #[test]
    fn ordinal_round_trip_and_span() {
        let a = Month::new(2007, 1).unwrap();
        let b = Month::new(2013, 12).unwrap();
        assert_eq!(a.span_to(b), 84);
        assert_eq!(Month::from_ordinal(a.ordinal()), a);
        assert_eq!(Month::new(2010, 12).unwrap().succ(), Month::new(2011, 1).unwrap());
        assert_eq!(a.range_inclusive(b).len(), 84);
        assert_eq!(b.span_to(a), 0);
    }

    #[test]
    fn display_forms() {
        let m = Month::new(2014, 3).unwrap();
        assert_eq!(m.to_string(), "2014-03");
        assert_eq!(m.compact(), "201403");
    }
}
