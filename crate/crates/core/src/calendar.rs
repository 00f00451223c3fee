//! School-year calendar: five 30-day months, MEHR through BAHMAN.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DAYS_PER_MONTH: u16 = 30;
pub const SCHOOL_DAYS: u16 = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Month {
    Mehr,
    Aban,
    Azar,
    Dey,
    Bahman,
}

impl Month {
    pub const ALL: [Month; 5] = [Month::Mehr, Month::Aban, Month::Azar, Month::Dey, Month::Bahman];

    pub fn name(self) -> &'static str {
        match self {
            Month::Mehr => "MEHR",
            Month::Aban => "ABAN",
            Month::Azar => "AZAR",
            Month::Dey => "DEY",
            Month::Bahman => "BAHMAN",
        }
    }

    /// First school day of the month.
    pub fn first_day(self) -> u16 {
        self as u16 * DAYS_PER_MONTH + 1
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Month::ALL
            .into_iter()
            .find(|m| m.name() == upper)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown month {s:?}")))
    }
}

/// Day index (1..=150) of `day_of_month` in `month`.
pub fn day_of(month: Month, day_of_month: u16) -> Result<u16> {
    if !(1..=DAYS_PER_MONTH).contains(&day_of_month) {
        return Err(Error::InvalidArgument(format!(
            "day of month {day_of_month} outside 1..={DAYS_PER_MONTH}"
        )));
    }
    Ok(month as u16 * DAYS_PER_MONTH + day_of_month)
}

pub fn month_of(day: u16) -> Result<(Month, u16)> {
    check_day(i64::from(day))?;
    let zero = day - 1;
    Ok((
        Month::ALL[usize::from(zero / DAYS_PER_MONTH)],
        zero % DAYS_PER_MONTH + 1,
    ))
}

/// Validates a day index, accepting any integer width from callers.
pub fn check_day(day: i64) -> Result<u16> {
    if (1..=i64::from(SCHOOL_DAYS)).contains(&day) {
        Ok(day as u16)
    } else {
        Err(Error::DayOutOfRange {
            day,
            max: SCHOOL_DAYS,
        })
    }
}
