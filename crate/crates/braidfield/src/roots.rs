//! Univariate complex root finding: simultaneous Aberth-Ehrlich iteration
//! polished by Newton steps. Degrees here stay small (the strand count), so
//! robustness beats asymptotics.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Evaluate p and p' at u (coefficients ascending).
fn eval_with_derivative(coeffs: &[Complex64], u: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * u + p;
        p = p * u + c;
    }
    (p, dp)
}

/// Backward-error scale sum |c_i| |u|^i.
fn residual_scale(coeffs: &[Complex64], u: Complex64) -> f64 {
    let r = u.norm();
    let mut scale = 0.0;
    let mut pow = 1.0;
    for c in coeffs {
        scale += c.norm() * pow;
        pow *= r;
    }
    scale
}

/// All roots of the polynomial with ascending coefficients. Exact zero
/// constant terms are deflated first so polynomials like u^s map cleanly to
/// repeated zero roots.
pub fn all_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut top = coeffs.len();
    let max_mag = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Err(Error::InvalidInput("zero polynomial has no root set".into()));
    }
    while top > 1 && coeffs[top - 1].norm() <= 1e-14 * max_mag {
        top -= 1;
    }
    let mut work: Vec<Complex64> = coeffs[..top].to_vec();
    let mut zeros = 0usize;
    while work.len() > 1 && work[0].norm() == 0.0 {
        work.remove(0);
        zeros += 1;
    }
    let degree = work.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if degree == 0 {
        return Ok(roots);
    }
    for attempt in 0..3 {
        if let Some(found) = aberth(&work, 0.4 + 1.1 * attempt as f64) {
            roots.extend(found);
            return Ok(roots);
        }
    }
    Err(Error::RootSolverFailure)
}

fn aberth(coeffs: &[Complex64], phase_offset: f64) -> Option<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    // Cauchy-style inclusion radius.
    let radius = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut guesses: Vec<Complex64> = (0..degree)
        .map(|k| {
            Complex64::from_polar(
                radius * (0.5 + 0.3 * (k as f64 / degree as f64)),
                2.0 * std::f64::consts::PI * k as f64 / degree as f64 + phase_offset,
            )
        })
        .collect();
    let mut converged = false;
    for _ in 0..300 {
        let mut max_step = 0.0f64;
        for k in 0..degree {
            let u = guesses[k];
            let (p, dp) = eval_with_derivative(coeffs, u);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &other) in guesses.iter().enumerate() {
                if j != k {
                    let mut diff = u - other;
                    if diff.norm() < 1e-300 {
                        diff = Complex64::new(1e-12, 1e-12);
                    }
                    repulsion += 1.0 / diff;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            guesses[k] = u - step;
            max_step = max_step.max(step.norm() / (1.0 + guesses[k].norm()));
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        // fall through to the residual check; clustered roots may still be fine
    }
    // Newton polish.
    for u in guesses.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(coeffs, *u);
            if dp.norm() > 0.0 {
                *u -= p / dp;
            }
        }
    }
    for &u in &guesses {
        let (p, _) = eval_with_derivative(coeffs, u);
        if p.norm() > 1e-11 * residual_scale(coeffs, u).max(f64::MIN_POSITIVE) {
            return None;
        }
    }
    Some(guesses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sort_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn linear_and_quadratic() {
        let r = all_roots(&[Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!((r[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // u^2 + 1 -> +/- i
        let r = sort_by_re(
            all_roots(&[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ])
            .unwrap(),
        );
        assert!((r[0].im.abs() - 1.0).abs() < 1e-12 && (r[1].im.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_power_gives_zero_roots() {
        let r = all_roots(&[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|u| u.norm() < 1e-12));
    }

    #[test]
    fn random_polynomials_reconstruct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let degree = rng.gen_range(1..=6);
            let true_roots: Vec<Complex64> = (0..degree)
                .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                .collect();
            let mut coeffs = vec![Complex64::new(1.0, 0.0)];
            for &r in &true_roots {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (i, &c) in coeffs.iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * r;
                }
                coeffs = next;
            }
            let found = all_roots(&coeffs).unwrap();
            assert_eq!(found.len(), degree);
            let mut used = vec![false; degree];
            for f in &found {
                let (idx, dist) = true_roots
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, r)| (i, (r - f).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                assert!(dist < 1e-7, "distance {dist}");
                used[idx] = true;
            }
        }
    }
}
