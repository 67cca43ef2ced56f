//! Right-continuous step functions.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// A càdlàg step function: `value(t) = values[i]` for `times[i] ≤ t < times[i+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl JumpPath {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return domain("jump path needs matching, nonempty times and values");
        }
        if times.windows(2).any(|w| !(w[0] <= w[1])) {
            return domain("jump path times must be nondecreasing");
        }
        Ok(JumpPath { times, values })
    }

    pub fn constant(t0: f64, v: f64) -> Self {
        JumpPath {
            times: vec![t0],
            values: vec![v],
        }
    }

    /// Value at `t`; before the first time the first value is returned.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.times.partition_point(|&s| s <= t);
        self.values[idx.saturating_sub(1)]
    }

    pub fn push(&mut self, t: f64, v: f64) {
        debug_assert!(self.times.last().is_none_or(|&s| s <= t));
        self.times.push(t);
        self.values.push(v);
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().expect("nonempty path")
    }

    /// Jump epochs and sizes, skipping the initial point.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (1..self.times.len()).map(move |i| (self.times[i], self.values[i] - self.values[i - 1]))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            s.push_str(&format!("{t},{v}\n"));
        }
        s
    }
}
