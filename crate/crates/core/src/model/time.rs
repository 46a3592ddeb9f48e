use std::fmt;
use std::ops::{Add, Sub};

use chrono::{DateTime, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use super::ModelError;

pub const MINUTES_PER_HOUR: i64 = 60;
pub const MINUTES_PER_DAY: i64 = 24 * MINUTES_PER_HOUR;
pub const MINUTES_PER_WEEK: i64 = 7 * MINUTES_PER_DAY;

/// Wire format of every timestamp in the schedule files.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// A signed span of whole minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Minutes(i64);

impl Minutes {
    pub const ZERO: Minutes = Minutes(0);

    #[inline]
    pub const fn new(minutes: i64) -> Self {
        Minutes(minutes)
    }

    #[inline]
    pub const fn get(self) -> i64 {
        self.0
    }

    #[inline]
    pub const fn from_whole_hours(hours: i64) -> Self {
        Minutes(hours * MINUTES_PER_HOUR)
    }

    /// Converts decimal hours to the nearest whole minute.
    pub fn from_hours(hours: f64) -> Result<Self, ModelError> {
        if !hours.is_finite() {
            return Err(ModelError::NonFiniteHours(hours));
        }
        Ok(Minutes((hours * MINUTES_PER_HOUR as f64).round() as i64))
    }

    #[inline]
    pub fn hours(self) -> f64 {
        self.0 as f64 / MINUTES_PER_HOUR as f64
    }
}

impl Add for Minutes {
    type Output = Minutes;
    fn add(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 + rhs.0)
    }
}

impl Sub for Minutes {
    type Output = Minutes;
    fn sub(self, rhs: Minutes) -> Minutes {
        Minutes(self.0 - rhs.0)
    }
}

impl fmt::Display for Minutes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} h", self.hours())
    }
}

/// A UTC instant at minute resolution, counted in minutes from the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(i64);

impl Timestamp {
    #[inline]
    pub const fn from_minutes(minutes: i64) -> Self {
        Timestamp(minutes)
    }

    #[inline]
    pub const fn minutes(self) -> i64 {
        self.0
    }

    /// Rejects datetimes that carry seconds or sub-second parts.
    pub fn from_datetime(dt: NaiveDateTime) -> Result<Self, ModelError> {
        if dt.second() != 0 || dt.nanosecond() != 0 {
            return Err(ModelError::SubMinuteTimestamp(dt.to_string()));
        }
        Ok(Timestamp(dt.and_utc().timestamp().div_euclid(60)))
    }

    pub fn to_datetime(self) -> NaiveDateTime {
        DateTime::from_timestamp(self.0 * 60, 0)
            .expect("minute timestamps stay within chrono's range")
            .naive_utc()
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let dt = NaiveDateTime::parse_from_str(text, TIMESTAMP_FORMAT)
            .map_err(|e| ModelError::BadTimestamp(text.to_string(), e.to_string()))?;
        Self::from_datetime(dt)
    }

    /// Midnight at or before this instant.
    pub fn floor_day(self) -> Self {
        Timestamp(self.0.div_euclid(MINUTES_PER_DAY) * MINUTES_PER_DAY)
    }

    /// Midnight at or after this instant.
    pub fn ceil_day(self) -> Self {
        let floor = self.floor_day();
        if floor == self {
            self
        } else {
            Timestamp(floor.0 + MINUTES_PER_DAY)
        }
    }
}

impl Add<Minutes> for Timestamp {
    type Output = Timestamp;
    fn add(self, rhs: Minutes) -> Timestamp {
        Timestamp(self.0 + rhs.get())
    }
}

impl Sub<Minutes> for Timestamp {
    type Output = Timestamp;
    fn sub(self, rhs: Minutes) -> Timestamp {
        Timestamp(self.0 - rhs.get())
    }
}

impl Sub for Timestamp {
    type Output = Minutes;
    fn sub(self, rhs: Timestamp) -> Minutes {
        Minutes::new(self.0 - rhs.0)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_datetime().format(TIMESTAMP_FORMAT))
    }
}

/// Half-open time interval `[start, end)` with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    start: Timestamp,
    end: Timestamp,
}

impl Interval {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::DegenerateInterval { start, end });
        }
        Ok(Interval { start, end })
    }

    #[inline]
    pub fn start(&self) -> Timestamp {
        self.start
    }

    #[inline]
    pub fn end(&self) -> Timestamp {
        self.end
    }

    #[inline]
    pub fn duration(&self) -> Minutes {
        self.end - self.start
    }

    #[inline]
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Length of the shared part, zero when disjoint.
    pub fn overlap_length(&self, other: &Interval) -> Minutes {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if lo < hi {
            hi - lo
        } else {
            Minutes::ZERO
        }
    }

    /// Same duration, new start.
    pub fn starting_at(&self, start: Timestamp) -> Interval {
        Interval {
            start,
            end: start + self.duration(),
        }
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Half-open overlap test: `a.start < b.end && b.start < a.end`.
#[inline]
pub fn intervals_overlap(a: &Interval, b: &Interval) -> bool {
    a.overlaps(b)
}
