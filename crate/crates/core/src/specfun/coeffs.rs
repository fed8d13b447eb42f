//! Per-thread cache of the argument-independent series coefficients
//! `1/Γ(νi+β)`, `ln Γ(νi+β)` and `ψ(νi+β)`. Order pieces and centres
//! repeat across calls, so most evaluations only multiply by powers of `z`.

use std::cell::RefCell;
use std::collections::HashMap;

use super::gamma::{digamma_enclosure, gamma_enclosure, ln_gamma_enclosure};
use super::SpecFunError;
use crate::interval::Interval;

const MAX_TABLES: usize = 512;

/// Above this argument `1/Γ` is only available through `ln Γ`.
const DIRECT_LIMIT: f64 = 170.0;

#[derive(Clone, Copy, Default)]
struct Entry {
    recip: Option<Option<Interval>>,
    ln_gamma: Option<Interval>,
    psi: Option<Interval>,
}

pub(super) struct Table {
    nu: Interval,
    beta: f64,
    entries: Vec<Entry>,
}

impl Table {
    fn entry(&mut self, i: usize) -> &mut Entry {
        if self.entries.len() <= i {
            self.entries.resize(i + 1, Entry::default());
        }
        &mut self.entries[i]
    }

    pub(super) fn arg(&self, i: usize) -> Interval {
        self.nu * Interval::point(i as f64) + Interval::point(self.beta)
    }

    /// `1/Γ(νi+β)`, or `None` beyond the direct range.
    pub(super) fn recip_gamma(&mut self, i: usize) -> Result<Option<Interval>, SpecFunError> {
        if let Some(r) = self.entry(i).recip {
            return Ok(r);
        }
        let arg = self.arg(i);
        let r = if arg.hi() < DIRECT_LIMIT {
            Some((Interval::ONE / gamma_enclosure(&arg)?).expect("Γ > 0"))
        } else {
            None
        };
        self.entry(i).recip = Some(r);
        Ok(r)
    }

    pub(super) fn ln_gamma(&mut self, i: usize) -> Result<Interval, SpecFunError> {
        if let Some(v) = self.entry(i).ln_gamma {
            return Ok(v);
        }
        let v = ln_gamma_enclosure(&self.arg(i))?;
        self.entry(i).ln_gamma = Some(v);
        Ok(v)
    }

    pub(super) fn digamma(&mut self, i: usize) -> Result<Interval, SpecFunError> {
        if let Some(v) = self.entry(i).psi {
            return Ok(v);
        }
        let v = digamma_enclosure(&self.arg(i))?;
        self.entry(i).psi = Some(v);
        Ok(v)
    }
}

thread_local! {
    static TABLES: RefCell<HashMap<(u64, u64, u64), Table>> = RefCell::new(HashMap::new());
}

/// Runs `f` with the coefficient table of `(ν, β)`.
pub(super) fn with_table<R>(nu: Interval, beta: f64, f: impl FnOnce(&mut Table) -> R) -> R {
    let key = (nu.lo().to_bits(), nu.hi().to_bits(), beta.to_bits());
    let mut table =
        TABLES.with(|t| t.borrow_mut().remove(&key)).unwrap_or_else(|| Table { nu, beta, entries: Vec::new() });
    let out = f(&mut table);
    TABLES.with(|t| {
        let mut map = t.borrow_mut();
        if map.len() >= MAX_TABLES {
            map.clear();
        }
        map.insert(key, table);
    });
    out
}
