//! Central finite-difference oracle for analytic gradients.

use super::params::{ParamId, ParamStore};

/// Outcome of a finite-difference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub checked: usize,
    /// Scalars whose ±epsilon probe crossed a non-differentiable point.
    pub skipped: usize,
    /// Parameter name and flat index of the worst entry.
    pub worst: Option<(String, usize)>,
}

/// `|a − n| / max(1e-8, |a| + |n|)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-8)
}

/// Compares the gradients stored in `params` against central differences of
/// `loss_fn`, returning the maximum relative error over all scalars.
pub fn grad_check<F>(loss_fn: F, params: &ParamStore, epsilon: f64) -> f64
where
    F: Fn(&ParamStore) -> f64,
{
    grad_check_piecewise(|p| (loss_fn(p), 0), params, epsilon).max_relative_error
}

/// Like [`grad_check`], for piecewise-smooth losses. `loss_fn` also returns a
/// fingerprint of its active branch (ReLU signs, threshold masks); a scalar
/// is skipped when either probe lands in a different branch than the base
/// point.
pub fn grad_check_piecewise<F>(loss_fn: F, params: &ParamStore, epsilon: f64) -> GradCheckReport
where
    F: Fn(&ParamStore) -> (f64, u64),
{
    let (_, base_regime) = loss_fn(params);
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
        worst: None,
    };
    let ids: Vec<ParamId> = params.ids().collect();
    for id in ids {
        for k in 0..params.value(id).data().len() {
            let orig = params.value(id).data()[k];
            probe.value_mut(id).data_mut()[k] = orig + epsilon;
            let (plus, regime_plus) = loss_fn(&probe);
            probe.value_mut(id).data_mut()[k] = orig - epsilon;
            let (minus, regime_minus) = loss_fn(&probe);
            probe.value_mut(id).data_mut()[k] = orig;
            if regime_plus != base_regime || regime_minus != base_regime {
                report.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * epsilon);
            let err = relative_error(params.grad(id).data()[k], numeric);
            report.checked += 1;
            if report.worst.is_none() || err > report.max_relative_error {
                report.max_relative_error = err;
                report.worst = Some((params.name(id).to_string(), k));
            }
        }
    }
    report
}

/// Order-sensitive FNV-1a hash over a stream of branch decisions.
#[derive(Debug, Clone, Copy)]
pub struct RegimeHasher(u64);

impl Default for RegimeHasher {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl RegimeHasher {
    pub fn push(&mut self, bit: bool) {
        self.push_u64(bit as u64);
    }

    pub fn push_u64(&mut self, v: u64) {
        for byte in v.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub fn finish(self) -> u64 {
        self.0
    }
}
