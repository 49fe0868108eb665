//! Operation counters: field multiplications, polynomial products `M(d)`,
//! polynomial-matrix products `MM(r, d)` and the integers divided by.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

/// Counts accumulate monotonically; one counter is meant to cover one solve.
#[derive(Debug, Default)]
pub struct OpCounter {
    field_muls: AtomicU64,
    poly_muls: Mutex<BTreeMap<usize, u64>>,
    mat_muls: Mutex<BTreeMap<(usize, usize), u64>>,
    log_divisions: AtomicBool,
    divisions: Mutex<Vec<u64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CounterSnapshot {
    pub field_muls: u64,
    pub poly_muls: u64,
    pub mat_muls: u64,
    /// Product count keyed by output length.
    pub poly_muls_by_size: BTreeMap<usize, u64>,
    /// Product count keyed by `(rows, output length)`.
    pub mat_muls_by_shape: BTreeMap<(usize, usize), u64>,
    pub divisions: Vec<u64>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// A counter that also records every integer divisor.
    pub fn with_division_log() -> Self {
        let c = Self::default();
        c.log_divisions.store(true, Ordering::Relaxed);
        c
    }

    #[inline]
    pub fn add_field_muls(&self, n: u64) {
        self.field_muls.fetch_add(n, Ordering::Relaxed);
    }

    pub fn record_poly_mul(&self, size: usize) {
        *self.poly_muls.lock().unwrap().entry(size).or_default() += 1;
    }

    pub fn record_mat_mul(&self, rows: usize, size: usize) {
        *self.mat_muls.lock().unwrap().entry((rows, size)).or_default() += 1;
    }

    pub fn record_division(&self, divisor: u64) {
        if self.log_divisions.load(Ordering::Relaxed) {
            self.divisions.lock().unwrap().push(divisor);
        }
    }

    pub fn field_muls(&self) -> u64 {
        self.field_muls.load(Ordering::Relaxed)
    }

    pub fn mat_muls(&self) -> u64 {
        self.mat_muls.lock().unwrap().values().sum()
    }

    pub fn poly_muls(&self) -> u64 {
        self.poly_muls.lock().unwrap().values().sum()
    }

    pub fn divisions(&self) -> Vec<u64> {
        self.divisions.lock().unwrap().clone()
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        let poly = self.poly_muls.lock().unwrap().clone();
        let mat = self.mat_muls.lock().unwrap().clone();
        CounterSnapshot {
            field_muls: self.field_muls(),
            poly_muls: poly.values().sum(),
            mat_muls: mat.values().sum(),
            poly_muls_by_size: poly,
            mat_muls_by_shape: mat,
            divisions: self.divisions(),
        }
    }
}
