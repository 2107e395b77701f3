//! Trigonometric polynomials and the two interpolation schemes used by the
//! construction: a discrete Fourier transform on uniform nodes and Lagrange
//! interpolation at arbitrary distinct nodes on the unit circle.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const GOLDEN_ANGLE: f64 = 2.399963229728653;

/// A real-valued trigonometric polynomial sum_{k=-N..N} c_k e^{ikt} with
/// conjugate-symmetric coefficients, stored centered: `coeffs[k + N]` is c_k.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(value: f64) -> Self {
        TrigPoly {
            coeffs: vec![Complex64::new(value, 0.0)],
        }
    }

    /// cos t as a trig polynomial.
    pub fn cosine() -> Self {
        Self::from_coeff_map(
            [
                (-1, Complex64::new(0.5, 0.0)),
                (1, Complex64::new(0.5, 0.0)),
            ]
            .into_iter()
            .collect(),
        )
    }

    /// sin t as a trig polynomial.
    pub fn sine() -> Self {
        Self::from_coeff_map(
            [
                (-1, Complex64::new(0.0, 0.5)),
                (1, Complex64::new(0.0, -0.5)),
            ]
            .into_iter()
            .collect(),
        )
    }

    pub fn from_coeff_map(map: BTreeMap<i64, Complex64>) -> Self {
        let n = map.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        for (k, v) in map {
            coeffs[(k + n as i64) as usize] = v;
        }
        let mut p = TrigPoly { coeffs };
        p.symmetrize();
        p
    }

    pub fn degree(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    /// Coefficient c_k, zero outside the stored band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.degree() as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Cosine-series coefficient of cos(kt) (the constant for k = 0).
    pub fn cos_coeff(&self, k: usize) -> f64 {
        if k == 0 {
            self.coeff(0).re
        } else {
            2.0 * self.coeff(k as i64).re
        }
    }

    /// Sine-series coefficient of sin(kt).
    pub fn sin_coeff(&self, k: usize) -> f64 {
        -2.0 * self.coeff(k as i64).im
    }

    /// Force conjugate symmetry c_{-k} = conj(c_k).
    pub fn symmetrize(&mut self) {
        let n = self.degree() as i64;
        for k in 0..=n {
            let a = self.coeff(k);
            let b = self.coeff(-k);
            let v = (a + b.conj()) * 0.5;
            self.coeffs[(k + n) as usize] = v;
            self.coeffs[(n - k) as usize] = v.conj();
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `tol` relative to the largest one and tighten
    /// the degree.
    pub fn prune(&self, tol: f64) -> TrigPoly {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return TrigPoly::zero();
        }
        let n = self.degree() as i64;
        let mut map = BTreeMap::new();
        for k in -n..=n {
            let c = self.coeff(k);
            if c.norm() > tol * scale {
                map.insert(k, c);
            }
        }
        Self::from_coeff_map(map)
    }

    /// Full complex evaluation sum c_k e^{ikt}.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let n = self.degree() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -n..=n {
            acc += self.coeff(k) * Complex64::from_polar(1.0, k as f64 * t);
        }
        acc
    }

    /// Real evaluation through the cosine/sine series; exact for symmetric
    /// coefficients.
    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = self.coeff(0).re;
        for k in 1..=self.degree() {
            let c = self.coeff(k as i64);
            let (s, co) = (k as f64 * t).sin_cos();
            acc += 2.0 * (c.re * co - c.im * s);
        }
        acc
    }

    /// Checked evaluation: errors if the imaginary residual betrays broken
    /// symmetry.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = self.eval_complex(t);
        let scale = self.coeffs.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
        if v.im.abs() > 1e-9 * scale {
            return Err(Error::SymmetryViolation(v.im.abs()));
        }
        Ok(v.re)
    }

    /// Derivative d/dt.
    pub fn derivative(&self) -> TrigPoly {
        let n = self.degree() as i64;
        let mut map = BTreeMap::new();
        for k in -n..=n {
            if k != 0 {
                map.insert(k, self.coeff(k) * Complex64::new(0.0, k as f64));
            }
        }
        TrigPoly::from_coeff_map(map)
    }

    /// The complex polynomial p(z) = z^N sum c_k z^k of degree 2N with
    /// p(e^{it}) = e^{iNt} F(t); coefficients ascending in z.
    pub fn to_circle_poly(&self) -> Vec<Complex64> {
        let n = self.degree() as i64;
        (-n..=n).map(|k| self.coeff(k)).collect()
    }

    pub fn scaled(&self, factor: f64) -> TrigPoly {
        TrigPoly {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let n = self.degree() as i64;
        let mut parts = Vec::new();
        for k in -n..=n {
            let c = self.coeff(k);
            if c.norm() > 0.0 {
                parts.push(format!(
                    "{{\"k\":{},\"re\":{},\"im\":{}}}",
                    k,
                    crate::json::fmt_f64(c.re),
                    crate::json::fmt_f64(c.im)
                ));
            }
        }
        format!(
            "{{\"degree\":{},\"coeffs\":[{}]}}",
            self.degree(),
            parts.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("trig poly json: {e}")))?;
        let coeffs = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("trig poly json missing `coeffs`".into()))?;
        let mut map = BTreeMap::new();
        for c in coeffs {
            let k = c["k"]
                .as_i64()
                .ok_or_else(|| Error::InvalidInput("coeff missing `k`".into()))?;
            let re = c["re"].as_f64().unwrap_or(0.0);
            let im = c["im"].as_f64().unwrap_or(0.0);
            map.insert(k, Complex64::new(re, im));
        }
        Ok(Self::from_coeff_map(map))
    }
}

/// e^{2 pi i k / l} with the four axis values exact.
pub(crate) fn root_of_unity(k: usize, l: usize) -> Complex64 {
    let k = k % l;
    if 4 * k % l == 0 {
        match 4 * k / l {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / l as f64)
    }
}

/// Table of the L-th roots of unity; indexing by (n*k) mod L keeps the
/// cancellation sums at rounding level.
fn unity_roots(l: usize) -> Vec<Complex64> {
    (0..l).map(|k| root_of_unity(k, l)).collect()
}

/// Trigonometric interpolation of real values at the uniform nodes
/// 2 pi (k-1)/L via the discrete Fourier transform. Odd L gives degree
/// (L-1)/2; even L adds a pure-cosine Nyquist term at L/2.
pub fn dft_interpolate(values: &[f64]) -> Result<TrigPoly> {
    let l = values.len();
    if l == 0 {
        return Err(Error::EmptyData);
    }
    let roots = unity_roots(l);
    let transform = |k: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &x) in values.iter().enumerate() {
            // e^{-i k t_n} with t_n = 2 pi n / L
            acc += x * roots[(l - (n * k) % l) % l];
        }
        acc / l as f64
    };
    let mut map = BTreeMap::new();
    map.insert(0, transform(0));
    let top = if l % 2 == 0 { l / 2 - 1 } else { (l - 1) / 2 };
    for k in 1..=top {
        let d = transform(k);
        map.insert(k as i64, d);
        map.insert(-(k as i64), d.conj());
    }
    if l % 2 == 0 && l >= 2 {
        let d = transform(l / 2) * 0.5;
        map.insert((l / 2) as i64, d);
        map.insert(-((l / 2) as i64), d);
    }
    Ok(TrigPoly::from_coeff_map(map))
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Lagrange trigonometric interpolation at distinct nodes on the circle.
/// For an even point count the formula carries one free angle per term;
/// `alphas` overrides the default choice of zero (shifted off the nodes when
/// a node sits near t = 0).
pub fn lagrange_trig_interpolate(
    points: &[(f64, f64)],
    alphas: Option<&[f64]>,
) -> Result<TrigPoly> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    for i in 0..n {
        for j in i + 1..n {
            if circle_distance(points[i].0, points[j].0) < 1e-12 {
                return Err(Error::DuplicateNode(points[i].0));
            }
        }
    }
    let k_deg = n / 2;
    let even = n % 2 == 0;

    let alpha_list: Option<Vec<f64>> = if even {
        Some(match alphas {
            Some(a) => {
                if a.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "expected {n} alpha angles, got {}",
                        a.len()
                    )));
                }
                for &alpha in a {
                    if points.iter().any(|p| circle_distance(p.0, alpha) < 1e-12) {
                        return Err(Error::SingularAlpha(alpha));
                    }
                }
                a.to_vec()
            }
            None => {
                let mut alpha = 0.0;
                let mut m = 1;
                while points.iter().any(|p| circle_distance(p.0, alpha) < 1e-6) {
                    alpha = (GOLDEN_ANGLE * m as f64).rem_euclid(2.0 * PI);
                    m += 1;
                    if m > 4 * n {
                        return Err(Error::SingularAlpha(alpha));
                    }
                }
                vec![alpha; n]
            }
        })
    } else {
        None
    };

    let nodes: Vec<Complex64> = points
        .iter()
        .map(|p| Complex64::from_polar(1.0, p.0))
        .collect();
    // Coefficients of z^0 .. z^{2K}; the interpolant is z^{-K} P(z).
    let mut acc = vec![Complex64::new(0.0, 0.0); 2 * k_deg + 1];
    for k in 0..n {
        let mut num = vec![Complex64::new(1.0, 0.0)];
        let mut den = Complex64::new(1.0, 0.0);
        if let Some(list) = &alpha_list {
            let za = Complex64::from_polar(1.0, list[k]);
            num = poly_mul_linear(&num, za);
            den *= nodes[k] - za;
        }
        for (m, &zm) in nodes.iter().enumerate() {
            if m == k {
                continue;
            }
            num = poly_mul_linear(&num, zm);
            den *= nodes[k] - zm;
        }
        let weight =
            points[k].1 * Complex64::from_polar(1.0, k_deg as f64 * points[k].0) / den;
        for (i, c) in num.iter().enumerate() {
            acc[i] += weight * c;
        }
    }
    let mut map = BTreeMap::new();
    for (i, c) in acc.iter().enumerate() {
        map.insert(i as i64 - k_deg as i64, *c);
    }
    // The circle formula is conjugate-symmetric up to rounding; make it exact.
    Ok(TrigPoly::from_coeff_map(map))
}

/// Multiply an ascending coefficient list by (z - root).
fn poly_mul_linear(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * root;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dft_constant() {
        let p = dft_interpolate(&[3.5, 3.5, 3.5]).unwrap().prune(1e-9);
        assert_eq!(p.degree(), 0);
        assert!(close(p.eval_real(1.2), 3.5, 1e-12));
    }

    #[test]
    fn dft_reproduces_cosine_basis() {
        for n in 4..10 {
            let vals: Vec<f64> = (0..n)
                .map(|k| (2.0 * PI * k as f64 / n as f64).cos())
                .collect();
            let p = dft_interpolate(&vals).unwrap().prune(1e-9);
            assert_eq!(p.degree(), 1, "n = {n}");
            assert!(close(p.cos_coeff(1), 1.0, 1e-12));
            assert!(close(p.sin_coeff(1), 0.0, 1e-12));
        }
    }

    #[test]
    fn dft_empty_errors() {
        assert!(matches!(dft_interpolate(&[]), Err(Error::EmptyData)));
    }

    #[test]
    fn dft_interpolates_inputs() {
        let vals = [0.3, -1.2, 4.0, 0.0, 2.5];
        let p = dft_interpolate(&vals).unwrap();
        assert_eq!(p.degree(), 2);
        for (k, &v) in vals.iter().enumerate() {
            let t = 2.0 * PI * k as f64 / vals.len() as f64;
            assert!(close(p.eval_real(t), v, 1e-12));
        }
    }

    #[test]
    fn dft_degree_is_floor_for_odd_counts() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for count in [3usize, 5, 7, 9, 15] {
            let vals: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = dft_interpolate(&vals).unwrap();
            assert_eq!(p.degree(), (count - 1) / 2);
        }
    }

    #[test]
    fn lagrange_single_point_is_constant() {
        let p = lagrange_trig_interpolate(&[(1.0, 4.25)], None).unwrap();
        assert_eq!(p.degree(), 0);
        assert!(close(p.eval_real(0.1), 4.25, 1e-12));
    }

    #[test]
    fn lagrange_recovers_sine_from_three_points() {
        let pts: Vec<(f64, f64)> = [0.4f64, 2.0, 5.0].iter().map(|&t| (t, t.sin())).collect();
        let p = lagrange_trig_interpolate(&pts, None).unwrap();
        // evaluate against sin at random parameters
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..2.0 * PI);
            assert!(close(p.eval_real(t), t.sin(), 1e-12));
        }
    }

    #[test]
    fn lagrange_even_count_interpolates() {
        let pts = [(0.5, 1.0), (1.5, -2.0), (3.0, 0.25), (5.5, 4.0)];
        let p = lagrange_trig_interpolate(&pts, None).unwrap();
        assert_eq!(p.degree(), 2);
        for &(t, y) in &pts {
            assert!(close(p.eval_real(t), y, 1e-10), "{t} {y}");
        }
    }

    #[test]
    fn lagrange_duplicate_nodes_error() {
        let pts = [(1.0, 1.0), (1.0 + 1e-14, 2.0)];
        assert!(matches!(
            lagrange_trig_interpolate(&pts, None),
            Err(Error::DuplicateNode(_))
        ));
    }

    #[test]
    fn lagrange_alpha_collision_error() {
        let pts = [(0.5, 1.0), (1.5, -2.0)];
        assert!(matches!(
            lagrange_trig_interpolate(&pts, Some(&[0.5, 0.1])),
            Err(Error::SingularAlpha(_))
        ));
    }

    #[test]
    fn lagrange_shifts_alpha_off_nodes() {
        // A node at t = 0 forces the automatic alpha away from zero.
        let pts = [(0.0, 1.0), (2.0, -1.0), (3.5, 2.0), (5.0, 0.5)];
        let p = lagrange_trig_interpolate(&pts, None).unwrap();
        for &(t, y) in &pts {
            assert!(close(p.eval_real(t), y, 1e-10));
        }
    }

    #[test]
    fn eval_checked_matches_real() {
        let p = TrigPoly::from_coeff_map(
            [
                (0, Complex64::new(1.0, 0.0)),
                (2, Complex64::new(0.25, -1.5)),
                (-2, Complex64::new(0.25, 1.5)),
            ]
            .into_iter()
            .collect(),
        );
        for t in [0.0, 0.7, 3.9] {
            assert!(close(p.eval(t).unwrap(), p.eval_real(t), 1e-12));
        }
        assert!(close(TrigPoly::cosine().eval(PI).unwrap(), -1.0, 1e-15));
        assert!(close(TrigPoly::zero().eval(2.1).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn circle_poly_round_trip() {
        let p = TrigPoly::from_coeff_map(
            [
                (0, Complex64::new(-0.3, 0.0)),
                (1, Complex64::new(0.5, 0.25)),
                (-1, Complex64::new(0.5, -0.25)),
                (3, Complex64::new(0.0, -1.0)),
                (-3, Complex64::new(0.0, 1.0)),
            ]
            .into_iter()
            .collect(),
        );
        let circle = p.to_circle_poly();
        assert_eq!(circle.len(), 2 * p.degree() + 1);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..2.0 * PI);
            let z = Complex64::from_polar(1.0, t);
            let mut val = Complex64::new(0.0, 0.0);
            for c in circle.iter().rev() {
                val = val * z + c;
            }
            let expected = Complex64::from_polar(1.0, p.degree() as f64 * t) * p.eval_complex(t);
            assert!((val - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn circle_poly_of_cosine() {
        // cos t -> (z^2 + 1)/2
        let c = TrigPoly::cosine().to_circle_poly();
        assert_eq!(c.len(), 3);
        assert!((c[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(c[1].norm() < 1e-15);
        assert!((c[2] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let one = TrigPoly::constant(1.0).to_circle_poly();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn trig_json_round_trip() {
        let p = TrigPoly::from_coeff_map(
            [
                (0, Complex64::new(0.1, 0.0)),
                (4, Complex64::new(-2.0, 0.125)),
                (-4, Complex64::new(-2.0, -0.125)),
            ]
            .into_iter()
            .collect(),
        );
        let q = TrigPoly::from_json(&p.to_json()).unwrap();
        assert_eq!(p, q);
    }
}
