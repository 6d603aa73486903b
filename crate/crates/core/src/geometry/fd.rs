//! Central differences with one Richardson step: `(4 D(h/2) - D(h)) / 3`.

use crate::{Error, Result};

/// Default base step; one halving is applied.
pub const DEFAULT_STEP: f64 = 1e-4;

/// `∂_dir f` at `point` for a vector-valued `f`.
pub fn richardson_partial<F>(f: &F, point: &[f64], dir: usize, step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let half = 0.5 * step;
    if !(step.is_finite() && step > 0.0) || point[dir] + half == point[dir] {
        return Err(Error::StepUnderflow {
            step,
            point: point.to_vec(),
        });
    }
    let central = |h: f64| -> Result<Vec<f64>> {
        let mut p = point.to_vec();
        p[dir] = point[dir] + h;
        let up = f(&p)?;
        p[dir] = point[dir] - h;
        let down = f(&p)?;
        Ok(up
            .iter()
            .zip(&down)
            .map(|(u, d)| (u - d) / (2.0 * h))
            .collect())
    };
    let coarse = central(step)?;
    let fine = central(half)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

/// All partials: entry `[ρ]` is `∂_ρ f`.
pub fn richardson_gradient<F>(f: &F, point: &[f64], step: f64) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    (0..point.len())
        .map(|dir| richardson_partial(f, point, dir, step))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_smooth_functions() {
        let f = |p: &[f64]| -> Result<Vec<f64>> { Ok(vec![p[0].sin() * p[1].exp(), p[0] * p[1]]) };
        let g = richardson_gradient(&f, &[0.3, -0.2], DEFAULT_STEP).unwrap();
        assert!((g[0][0] - 0.3f64.cos() * (-0.2f64).exp()).abs() < 1e-11);
        assert!((g[1][0] - 0.3f64.sin() * (-0.2f64).exp()).abs() < 1e-11);
        assert!((g[0][1] + 0.2).abs() < 1e-11);
        assert!((g[1][1] - 0.3).abs() < 1e-11);
    }

    #[test]
    fn rejects_underflowing_steps() {
        let f = |p: &[f64]| -> Result<Vec<f64>> { Ok(vec![p[0]]) };
        assert!(richardson_partial(&f, &[1e20], 0, 1e-4).is_err());
        assert!(richardson_partial(&f, &[0.0], 0, 0.0).is_err());
    }
}
