use crate::solver::State;

/// Field extrema and the two-sided proportionality defect.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConstraintReport {
    pub max_z: f64,
    pub min_rho: f64,
    pub min_rhostar_minus_rho: f64,
    /// `max (c_* ρ − Z)₊ ∨ (Z − c^* ρ)₊` over cells.
    pub comparison_defect: f64,
    pub inward_outflow_events: usize,
}

impl ConstraintReport {
    /// True when `Z < 1` and the density is nonnegative.
    pub fn admissible(&self) -> bool {
        self.max_z < 1.0 && self.min_rho >= 0.0
    }
}

/// `c_lower`, `c_upper` are the proportionality constants from validation.
pub fn constraint_monitor(state: &State, c_lower: f64, c_upper: f64, inward_outflow_events: usize) -> ConstraintReport {
    let mut r = ConstraintReport {
        max_z: f64::NEG_INFINITY,
        min_rho: f64::INFINITY,
        min_rhostar_minus_rho: f64::INFINITY,
        comparison_defect: 0.0,
        inward_outflow_events,
    };
    for c in 0..state.rho.len() {
        let (rho, z) = (state.rho[c], state.z[c]);
        r.max_z = r.max_z.max(z);
        r.min_rho = r.min_rho.min(rho);
        r.min_rhostar_minus_rho = r.min_rhostar_minus_rho.min(state.rhostar[c] - rho);
        let d = (c_lower * rho - z).max(z - c_upper * rho).max(0.0);
        r.comparison_defect = r.comparison_defect.max(d);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(rho: Vec<f64>, z: Vec<f64>) -> State {
        let n = rho.len();
        State { rho, z, rhostar: vec![1.0; n], u: vec![0.0; n + 1], v: vec![], t: 0.0 }
    }

    #[test]
    fn proportional_state_has_no_defect() {
        let r = constraint_monitor(&state(vec![0.2, 0.4], vec![0.1, 0.2]), 0.5, 0.5, 0);
        assert_eq!(r.comparison_defect, 0.0);
        assert!(r.admissible());
    }

    #[test]
    fn overshoot_is_flagged() {
        let r = constraint_monitor(&state(vec![0.9, 0.4], vec![1.5, 0.4]), 1.0, 1.0, 0);
        assert_eq!(r.max_z, 1.5);
        assert!(!r.admissible());
        assert!((r.comparison_defect - 0.6).abs() < 1e-15);
    }
}
