use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::tensor::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckOptions {
    /// Central-difference step.
    pub h: f64,
    /// Coordinates sampled per parameter; all of them when the parameter is smaller.
    pub coords_per_param: usize,
    /// Lower bound on the relative-error denominator, so that near-zero
    /// gradients are compared absolutely.
    pub denom_floor: f64,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            h: 1e-5,
            coords_per_param: 32,
            denom_floor: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Parameter name and flat index of the worst coordinate.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
}

/// Compares reverse-mode gradients with central finite differences.
///
/// `objective` must return the scalar loss for the current parameter values
/// and leave the analytic gradient in each `Parameter::grad`. The relative
/// error of a coordinate is `|a − n| / max(|a|, |n|, denom_floor)`.
pub fn grad_check<F>(params: &mut ParamSet, mut objective: F, opts: GradCheckOptions) -> Result<GradCheckReport>
where
    F: FnMut(&mut ParamSet) -> Result<f64>,
{
    objective(params)?;
    let analytic: Vec<Vec<f64>> = params.iter().map(|p| p.grad.as_slice().to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        checked: 0,
    };
    let ids: Vec<_> = params.ids().collect();
    for (pi, id) in ids.into_iter().enumerate() {
        let len = analytic[pi].len();
        let coords: Vec<usize> = if len <= opts.coords_per_param {
            (0..len).collect()
        } else {
            let mut c = sample(&mut rng, len, opts.coords_per_param).into_vec();
            c.sort_unstable();
            c
        };
        for c in coords {
            let original = params.get(id).value.as_slice()[c];
            params.get_mut(id).value.as_mut_slice()[c] = original + opts.h;
            let plus = objective(params)?;
            params.get_mut(id).value.as_mut_slice()[c] = original - opts.h;
            let minus = objective(params)?;
            params.get_mut(id).value.as_mut_slice()[c] = original;

            let numeric = (plus - minus) / (2.0 * opts.h);
            let a = analytic[pi][c];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(opts.denom_floor);
            report.checked += 1;
            if report.worst.is_none() || err > report.max_rel_error {
                report.max_rel_error = err;
                report.worst = Some((params.get(id).name.clone(), c));
            }
        }
    }
    // Leave the analytic gradients in place for the caller.
    objective(params)?;
    Ok(report)
}
