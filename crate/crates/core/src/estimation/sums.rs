use serde::{Deserialize, Serialize};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Second-order sums of `(x, y)` that can be accumulated in chunks and
/// merged, e.g. when disclosed samples from failed codewords are pooled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    sxx: CompensatedSum,
    sxy: CompensatedSum,
    syy: CompensatedSum,
}

impl Moments {
    pub fn from_samples(x: &[f64], y: &[f64]) -> Self {
        let mut m = Moments::default();
        m.extend(x, y);
        m
    }

    pub fn extend(&mut self, x: &[f64], y: &[f64]) {
        for (&a, &b) in x.iter().zip(y) {
            self.sxx.add(a * a);
            self.sxy.add(a * b);
            self.syy.add(b * b);
        }
        self.n += x.len().min(y.len());
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sxx.merge(&other.sxx);
        self.sxy.merge(&other.sxy);
        self.syy.merge(&other.syy);
    }

    pub fn sxx(&self) -> f64 {
        self.sxx.value()
    }

    pub fn sxy(&self) -> f64 {
        self.sxy.value()
    }

    pub fn syy(&self) -> f64 {
        self.syy.value()
    }

    pub fn t_hat(&self) -> Option<f64> {
        let sxx = self.sxx();
        (sxx > 0.0).then(|| self.sxy() / sxx)
    }

    /// Single-pass residual variance `(Σy² − (Σxy)²/Σx²)/N`, floored at 0.
    pub fn sigma2_hat(&self) -> Option<f64> {
        let t = self.t_hat()?;
        Some(((self.syy() - t * self.sxy()) / self.n as f64).max(0.0))
    }
}
