use alloc::vec::Vec;

use rand::seq::index;

/// Worst disagreement between analytic and central-difference gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub worst_index: usize,
    pub checked: usize,
}

impl GradCheckReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_rel_error <= tolerance
    }
}

/// Below this magnitude both gradients are treated as zero when forming
/// relative errors.
const REL_FLOOR: f64 = 1e-4;

/// Compares `analytic` against `(loss(θ + h·e_i) − loss(θ − h·e_i)) / 2h` on a
/// seeded subset of `coords` coordinates (all of them if fewer exist).
pub fn grad_check<F>(params: &[f64], analytic: &[f64], mut loss: F, h: f64, coords: usize, seed: u64) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(params.len(), analytic.len(), "grad_check: gradient length");
    let mut rng = crate::seed::stream(seed, &[0x6C]);
    let picked: Vec<usize> = if coords >= params.len() {
        (0..params.len()).collect()
    } else {
        let mut v = index::sample(&mut rng, params.len(), coords).into_vec();
        v.sort_unstable();
        v
    };
    let mut theta = params.to_vec();
    let mut report = GradCheckReport { max_rel_error: 0.0, max_abs_error: 0.0, worst_index: 0, checked: picked.len() };
    for &i in &picked {
        let orig = theta[i];
        theta[i] = orig + h;
        let up = loss(&theta);
        theta[i] = orig - h;
        let down = loss(&theta);
        theta[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let abs = (numeric - analytic[i]).abs();
        let rel = abs / numeric.abs().max(analytic[i].abs()).max(REL_FLOOR);
        report.max_abs_error = report.max_abs_error.max(abs);
        if rel > report.max_rel_error || !rel.is_finite() {
            report.max_rel_error = rel;
            report.worst_index = i;
        }
    }
    report
}
