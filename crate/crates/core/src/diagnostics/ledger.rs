//! Mass bookkeeping for the conservative fields.

use crate::solver::BoundaryFlux;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_total(xs: &[f64], vol: f64) -> f64 {
    let mut s = CompensatedSum::default();
    for &x in xs {
        s.add(x);
    }
    s.value() * vol
}

/// One field's ledger at an instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LedgerEntry {
    pub total: f64,
    /// `−∫∫_{Γin} X_B u_B·n`, nonnegative.
    pub inflow: f64,
    /// Accumulated discrete outflow `∫∫_{Γout} X u·n`.
    pub outflow: f64,
    /// `∫X(τ) − ∫X₀ − inflow`; equals `−outflow` for the conservative
    /// scheme and is therefore nonpositive.
    pub defect: f64,
    /// `|defect + outflow|` relative to the largest term involved.
    pub closure: f64,
}

#[derive(Debug, Clone)]
pub struct MassLedger {
    initial: f64,
    inflow: CompensatedSum,
    outflow: CompensatedSum,
}

impl MassLedger {
    pub fn new(initial_total: f64) -> MassLedger {
        MassLedger {
            initial: initial_total,
            inflow: CompensatedSum::default(),
            outflow: CompensatedSum::default(),
        }
    }

    pub fn advance(&mut self, flux: &BoundaryFlux, dt: f64) {
        self.inflow.add(-dt * flux.inflow);
        self.outflow.add(dt * flux.outflow);
    }

    pub fn entry(&self, total: f64) -> LedgerEntry {
        let inflow = self.inflow.value();
        let outflow = self.outflow.value();
        let defect = total - self.initial - inflow;
        let scale = self.initial.abs().max(total.abs()).max(inflow).max(outflow.abs()).max(f64::MIN_POSITIVE);
        LedgerEntry {
            total,
            inflow,
            outflow,
            defect,
            closure: (defect + outflow).abs() / scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }

    #[test]
    fn closed_box_ledger() {
        let mut l = MassLedger::new(2.0);
        l.advance(&BoundaryFlux::default(), 0.1);
        let e = l.entry(2.0);
        assert_eq!(e.defect, 0.0);
        assert_eq!(e.closure, 0.0);
    }
}
