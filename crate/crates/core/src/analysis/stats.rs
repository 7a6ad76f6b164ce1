use serde::{Deserialize, Serialize};

/// Mean, maximum and sample standard deviation (N − 1 form) of an error set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub mean: f64,
    pub max: f64,
    pub stddev: f64,
    pub count: u64,
    pub normalised: bool,
}

/// Streaming accumulator; partial results merge with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    max: f64,
}

impl ErrorAccumulator {
    #[inline]
    pub fn push(&mut self, e: f64) {
        self.count += 1;
        let delta = e - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (e - self.mean);
        if e > self.max {
            self.max = e;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
        self.max = self.max.max(other.max);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn finish(&self, normalised: bool) -> ErrorStats {
        let stddev = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt()
        } else {
            0.0
        };
        ErrorStats {
            mean: self.mean,
            max: self.max,
            stddev,
            count: self.count,
            normalised,
        }
    }
}

impl FromIterator<f64> for ErrorAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        iter.into_iter().for_each(|e| acc.push(e));
        acc
    }
}

/// Merges partial accumulators in the given order.
pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a ErrorAccumulator>) -> ErrorAccumulator {
    let mut total = ErrorAccumulator::default();
    for p in parts {
        total.merge(p);
    }
    total
}
