#![allow(dead_code)]

use proptest::prelude::*;
use sublil_core::{Distribution, MeasureFamily};

/// A discrete family over a shared pool of atoms, plus the pool.
#[derive(Debug, Clone)]
pub struct PooledFamily {
    pub pool: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
}

impl PooledFamily {
    pub fn family(&self) -> MeasureFamily {
        let members = self
            .weights
            .iter()
            .map(|w| {
                let atoms: Vec<(f64, f64)> =
                    self.pool.iter().copied().zip(w.iter().copied()).collect();
                Distribution::discrete(&atoms).unwrap()
            })
            .collect();
        MeasureFamily::new(members).unwrap()
    }

    /// Turns a table of values on the pool into a function.
    pub fn lift<'a>(&'a self, table: &'a [f64]) -> impl Fn(f64) -> f64 + 'a {
        move |x| {
            let k = self
                .pool
                .iter()
                .position(|v| *v == x)
                .expect("atom outside pool");
            table[k]
        }
    }
}

fn normalise(raw: Vec<u32>) -> Vec<f64> {
    let raw: Vec<u32> = if raw.iter().all(|w| *w == 0) {
        raw.iter().map(|_| 1).collect()
    } else {
        raw
    };
    let total: u32 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|v| *v as f64 / total as f64).collect();
    let drift: f64 = 1.0 - w.iter().sum::<f64>();
    let last = w.iter().rposition(|v| *v > 0.0).unwrap();
    w[last] += drift;
    w
}

/// Up to 4 members on up to 6 atoms, atom values on a grid of quarters.
pub fn pooled_family() -> impl Strategy<Value = PooledFamily> {
    prop::collection::btree_set(-40i32..40, 1..=6).prop_flat_map(|set| {
        let pool: Vec<f64> = set.into_iter().map(|v| v as f64 / 4.0).collect();
        let k = pool.len();
        prop::collection::vec(prop::collection::vec(0u32..10, k), 1..=4).prop_map(move |ws| {
            PooledFamily {
                pool: pool.clone(),
                weights: ws.into_iter().map(normalise).collect(),
            }
        })
    })
}
