//! Compensated summation.

/// Kahan compensated accumulator for `f64` sums.
///
/// Probability aggregates here add thousands of terms spanning many orders of
/// magnitude; the running compensation keeps the result within a few ulps of
/// the exact sum regardless of term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
