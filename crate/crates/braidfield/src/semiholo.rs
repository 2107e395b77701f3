//! Expansion of the root product over a Fourier parametrisation into a
//! polynomial in u, e^{it}, e^{-it}, the exact-cancellation assertion for
//! fractional exponents, and the substitution producing a polynomial in
//! u, v and conj(v).

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::interp::TrigPoly;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// One link component's parametrisation data: x-curve, y-curve, strand count.
#[derive(Debug, Clone)]
pub struct FourierComponent {
    pub x: TrigPoly,
    pub y: TrigPoly,
    pub strands: usize,
}

impl FourierComponent {
    /// Strand curve value a*F + i b*G at ((r t + 2 pi j)/s_C).
    pub fn strand_value(&self, a: f64, b: f64, repeat: u32, offset: usize, t: f64) -> Complex64 {
        let arg = (repeat as f64 * t + 2.0 * PI * offset as f64) / self.strands as f64;
        Complex64::new(a * self.x.eval_real(arg), b * self.y.eval_real(arg))
    }

    /// d/dt of the strand curve.
    pub fn strand_derivative(
        &self,
        a: f64,
        b: f64,
        repeat: u32,
        offset: usize,
        t: f64,
    ) -> Complex64 {
        let arg = (repeat as f64 * t + 2.0 * PI * offset as f64) / self.strands as f64;
        let chain = repeat as f64 / self.strands as f64;
        Complex64::new(
            a * self.x.derivative().eval_real(arg) * chain,
            b * self.y.derivative().eval_real(arg) * chain,
        )
    }
}

/// A full braid parametrisation: per-component trigonometric curves plus the
/// amplitude split a = lambda a1, b = lambda b1 and a repeat multiplier.
#[derive(Debug, Clone)]
pub struct FourierBraid {
    pub components: Vec<FourierComponent>,
    pub a1: f64,
    pub b1: f64,
    pub lambda: f64,
    pub repeat: u32,
    /// Braid the parametrisation was built from, when it came from the pipeline.
    pub braid: Option<BraidWord>,
}

impl FourierBraid {
    pub fn new(components: Vec<FourierComponent>) -> Self {
        FourierBraid {
            components,
            a1: 1.0,
            b1: 1.0,
            lambda: 1.0,
            repeat: 1,
            braid: None,
        }
    }

    /// The classic torus parametrisation F = cos, G = sin on one component of
    /// `strands` strands (sigma_1 ... for two strands).
    pub fn torus(strands: usize) -> Self {
        Self::new(vec![FourierComponent {
            x: TrigPoly::cosine(),
            y: TrigPoly::sine(),
            strands,
        }])
    }

    pub fn strands(&self) -> usize {
        self.components.iter().map(|c| c.strands).sum()
    }

    /// Parametrisation of r repeats of the underlying braid.
    pub fn repeated(&self, r: u32) -> Self {
        let mut out = self.clone();
        out.repeat *= r;
        out
    }

    /// All strand values at parameter t.
    pub fn strand_values(&self, t: f64) -> Vec<Complex64> {
        let a = self.lambda * self.a1;
        let b = self.lambda * self.b1;
        self.components
            .iter()
            .flat_map(|c| {
                (0..c.strands).map(move |j| c.strand_value(a, b, self.repeat, j, t))
            })
            .collect()
    }

    /// All strand derivative values at parameter t.
    pub fn strand_derivatives(&self, t: f64) -> Vec<Complex64> {
        let a = self.lambda * self.a1;
        let b = self.lambda * self.b1;
        self.components
            .iter()
            .flat_map(|c| {
                (0..c.strands).map(move |j| c.strand_derivative(a, b, self.repeat, j, t))
            })
            .collect()
    }
}

/// Sparse expansion of one component's root product: for each u-power a map
/// from the numerator m to its coefficient, exponents meaning e^{i m t / s_C}.
#[derive(Debug, Clone)]
pub struct FractionalLaurent {
    pub denominator: usize,
    /// `terms[k]` holds the coefficients multiplying u^k.
    pub terms: Vec<BTreeMap<i64, Complex64>>,
    /// Mirror expansion over absolute values: per entry, the sum of the
    /// magnitudes of everything accumulated into it. Epsilon times this is
    /// the rounding floor the cancellation check must tolerate.
    pub magnitudes: Vec<BTreeMap<i64, f64>>,
}

impl FractionalLaurent {
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|m| m.values())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn magnitude(&self, u_power: usize, m: i64) -> f64 {
        self.magnitudes
            .get(u_power)
            .and_then(|d| d.get(&m))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Expand prod_j (u - root_j) where root_j is the component strand curve at
/// repeat 1; the j-dependent phases e^{2 pi i m j / s_C} come from an exact
/// table of roots of unity so the later cancellation stays at rounding
/// level. Repeats act on the integer exponents after cancellation.
pub fn expand_component(component: &FourierComponent, a: f64, b: f64) -> FractionalLaurent {
    let s_c = component.strands;
    let n = component.x.degree().max(component.y.degree()) as i64;
    let mut base = BTreeMap::new();
    for m in -n..=n {
        let c = a * component.x.coeff(m) + Complex64::new(0.0, b) * component.y.coeff(m);
        if c.norm() > 0.0 {
            base.insert(m, c);
        }
    }
    let unity: Vec<Complex64> = (0..s_c)
        .map(|k| crate::interp::root_of_unity(k, s_c))
        .collect();
    let mut terms: Vec<BTreeMap<i64, Complex64>> = vec![BTreeMap::new()];
    terms[0].insert(0, Complex64::new(1.0, 0.0));
    let mut mags: Vec<BTreeMap<i64, f64>> = vec![BTreeMap::new()];
    mags[0].insert(0, 1.0);
    for j in 0..s_c {
        let mut next: Vec<BTreeMap<i64, Complex64>> =
            vec![BTreeMap::new(); terms.len() + 1];
        let mut next_mag: Vec<BTreeMap<i64, f64>> = vec![BTreeMap::new(); terms.len() + 1];
        for (k, d) in terms.iter().enumerate() {
            for (&m, &coeff) in d {
                // u * existing term
                *next[k + 1].entry(m).or_insert(Complex64::new(0.0, 0.0)) += coeff;
                *next_mag[k + 1].entry(m).or_insert(0.0) += mags[k][&m];
                // -root_j * existing term
                for (&m2, &c2) in &base {
                    let phase = unity[(m2.rem_euclid(s_c as i64) as usize * j) % s_c];
                    *next[k]
                        .entry(m + m2)
                        .or_insert(Complex64::new(0.0, 0.0)) -= coeff * c2 * phase;
                    *next_mag[k].entry(m + m2).or_insert(0.0) += mags[k][&m] * c2.norm();
                }
            }
        }
        terms = next;
        mags = next_mag;
    }
    FractionalLaurent {
        denominator: s_c,
        terms,
        magnitudes: mags,
    }
}

/// Drop all fractional-exponent coefficients, verifying they sit below
/// `tol` relative to the largest coefficient or below the rounding floor of
/// the accumulated magnitudes, whichever is larger. Survivors are re-indexed
/// by the integer exponent of e^{it}.
pub fn assert_cancellation(
    laurent: &FractionalLaurent,
    tol: f64,
) -> Result<Vec<BTreeMap<i64, Complex64>>> {
    let s_c = laurent.denominator as i64;
    let scale = laurent.max_coeff().max(f64::MIN_POSITIVE);
    let mut out = vec![BTreeMap::new(); laurent.terms.len()];
    for (k, d) in laurent.terms.iter().enumerate() {
        for (&m, &c) in d {
            if m.rem_euclid(s_c) != 0 {
                let floor = 32.0 * f64::EPSILON * laurent.magnitude(k, m);
                if c.norm() > (tol * scale).max(floor) {
                    return Err(Error::CancellationFailure {
                        numerator: m,
                        denominator: laurent.denominator,
                        magnitude: c.norm() / scale,
                    });
                }
            } else if c.norm() > 0.0 {
                out[k].insert(m / s_c, c);
            }
        }
    }
    Ok(out)
}

/// A polynomial in u, v and conj(v): sparse monomial map
/// (u-power, v-power, vbar-power) -> coefficient. Pipeline outputs never mix
/// v and vbar in one monomial and are monic of degree `strands` in u.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiholoPoly {
    pub strands: usize,
    pub lambda: f64,
    terms: BTreeMap<(u32, u32, u32), Complex64>,
    pub braid: Option<BraidWord>,
}

impl SemiholoPoly {
    pub fn from_terms(
        strands: usize,
        lambda: f64,
        terms: BTreeMap<(u32, u32, u32), Complex64>,
    ) -> Self {
        SemiholoPoly {
            strands,
            lambda,
            terms,
            braid: None,
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32, u32), Complex64> {
        &self.terms
    }

    pub fn coeff(&self, u: u32, v: u32, vbar: u32) -> Complex64 {
        self.terms
            .get(&(u, v, vbar))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Total degree: max over monomials of u + v + vbar powers.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|&(u, v, w)| (u + v + w) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn degree_u(&self) -> usize {
        self.terms.keys().map(|&(u, _, _)| u as usize).max().unwrap_or(0)
    }

    /// Structural harmonicity: holomorphic in u and no monomial carrying both
    /// v and vbar, which makes the Laplacian vanish term by term.
    pub fn is_harmonic(&self) -> bool {
        self.terms.keys().all(|&(_, v, w)| v == 0 || w == 0)
    }

    pub fn eval(&self, u: Complex64, v: Complex64) -> Complex64 {
        let vb = v.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(ku, kv, kw), &c) in &self.terms {
            acc += c * u.powu(ku) * v.powu(kv) * vb.powu(kw);
        }
        acc
    }

    /// Evaluation with v on the unit circle at angle t.
    pub fn eval_circle(&self, u: Complex64, t: f64) -> Complex64 {
        self.eval(u, Complex64::from_polar(1.0, t))
    }

    /// Coefficients (ascending in u) of the univariate polynomial obtained by
    /// fixing v.
    pub fn u_coefficients(&self, v: Complex64) -> Vec<Complex64> {
        let vb = v.conj();
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree_u() + 1];
        for (&(ku, kv, kw), &c) in &self.terms {
            out[ku as usize] += c * v.powu(kv) * vb.powu(kw);
        }
        out
    }

    /// Move along the amplitude ray to a new lambda: the u^k coefficient
    /// scales by (lambda'/lambda)^(s-k).
    pub fn rescale(&self, new_lambda: f64) -> Result<SemiholoPoly> {
        if !(new_lambda > 0.0) {
            return Err(Error::InvalidScale(new_lambda));
        }
        let ratio = new_lambda / self.lambda;
        let s = self.strands as i32;
        let terms = self
            .terms
            .iter()
            .map(|(&(ku, kv, kw), &c)| {
                ((ku, kv, kw), c * ratio.powi(s - ku as i32))
            })
            .collect();
        Ok(SemiholoPoly {
            strands: self.strands,
            lambda: new_lambda,
            terms,
            braid: self.braid.clone(),
        })
    }

    /// Zero set becomes the closure of r repeats: every v and vbar exponent
    /// is multiplied by r.
    pub fn repeated(&self, r: u32) -> SemiholoPoly {
        let terms = self
            .terms
            .iter()
            .map(|(&(ku, kv, kw), &c)| ((ku, kv * r, kw * r), c))
            .collect();
        SemiholoPoly {
            strands: self.strands,
            lambda: self.lambda,
            terms,
            braid: self.braid.clone(),
        }
    }

    /// Drop coefficients below tol relative to the largest.
    pub fn pruned(&self, tol: f64) -> SemiholoPoly {
        let scale = self.scale();
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > tol * scale)
            .map(|(&k, &c)| (k, c))
            .collect();
        SemiholoPoly {
            strands: self.strands,
            lambda: self.lambda,
            terms,
            braid: self.braid.clone(),
        }
    }

    /// Monomials in serialization order: u descending, then v, vbar ascending.
    pub fn ordered_monomials(&self) -> Vec<((u32, u32, u32), Complex64)> {
        let mut items: Vec<_> = self.terms.iter().map(|(&k, &c)| (k, c)).collect();
        items.sort_by(|a, b| {
            b.0 .0
                .cmp(&a.0 .0)
                .then(a.0 .1.cmp(&b.0 .1))
                .then(a.0 .2.cmp(&b.0 .2))
        });
        items
    }

    pub fn to_json(&self) -> String {
        let monomials: Vec<String> = self
            .ordered_monomials()
            .iter()
            .map(|&((u, v, w), c)| {
                format!(
                    "{{\"u\":{},\"v\":{},\"vbar\":{},\"re\":{},\"im\":{}}}",
                    u,
                    v,
                    w,
                    crate::json::fmt_f64(c.re),
                    crate::json::fmt_f64(c.im)
                )
            })
            .collect();
        format!(
            "{{\"strands\":{},\"lambda\":{},\"monomials\":[{}]}}",
            self.strands,
            crate::json::fmt_f64(self.lambda),
            monomials.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("polynomial json: {e}")))?;
        let strands = v["strands"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("polynomial json missing `strands`".into()))?
            as usize;
        let lambda = v["lambda"]
            .as_f64()
            .ok_or_else(|| Error::InvalidInput("polynomial json missing `lambda`".into()))?;
        let monomials = v["monomials"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("polynomial json missing `monomials`".into()))?;
        let mut terms = BTreeMap::new();
        for m in monomials {
            let key = (
                m["u"].as_u64().unwrap_or(0) as u32,
                m["v"].as_u64().unwrap_or(0) as u32,
                m["vbar"].as_u64().unwrap_or(0) as u32,
            );
            let c = Complex64::new(m["re"].as_f64().unwrap_or(0.0), m["im"].as_f64().unwrap_or(0.0));
            terms.insert(key, c);
        }
        Ok(SemiholoPoly {
            strands,
            lambda,
            terms,
            braid: None,
        })
    }
}

/// Expand, cancel and multiply all components into the final polynomial.
pub fn assemble(fb: &FourierBraid, tol: f64) -> Result<SemiholoPoly> {
    let a = fb.lambda * fb.a1;
    let b = fb.lambda * fb.b1;
    // product accumulates as (u-power -> (circle exponent -> coeff))
    let mut acc: Vec<BTreeMap<i64, Complex64>> = vec![BTreeMap::new()];
    acc[0].insert(0, Complex64::new(1.0, 0.0));
    for component in &fb.components {
        let laurent = expand_component(component, a, b);
        let reduced = assert_cancellation(&laurent, tol)?;
        let mut next: Vec<BTreeMap<i64, Complex64>> =
            vec![BTreeMap::new(); acc.len() + reduced.len() - 1];
        for (k1, d1) in acc.iter().enumerate() {
            for (&e1, &c1) in d1 {
                for (k2, d2) in reduced.iter().enumerate() {
                    for (&e2, &c2) in d2 {
                        *next[k1 + k2]
                            .entry(e1 + e2 * fb.repeat as i64)
                            .or_insert(Complex64::new(0.0, 0.0)) += c1 * c2;
                    }
                }
            }
        }
        acc = next;
    }
    let mut terms = BTreeMap::new();
    for (k, d) in acc.iter().enumerate() {
        for (&e, &c) in d {
            let key = if e >= 0 {
                (k as u32, e as u32, 0u32)
            } else {
                (k as u32, 0u32, (-e) as u32)
            };
            terms.insert(key, c);
        }
    }
    let mut poly = SemiholoPoly {
        strands: fb.strands(),
        lambda: fb.lambda,
        terms,
        braid: fb.braid.clone(),
    };
    poly = poly.pruned(tol);
    Ok(poly)
}

/// Degree bounds (c1, c2) computable from the braid word alone: c2 bounds the
/// interpolation degrees through the data-point counts, c1 bounds them below
/// through the required crossing counts on the unit circle.
pub fn degree_bounds(braid: &BraidWord) -> (f64, i64) {
    let comps = braid.components();
    let s = braid.strands() as i64;
    let l = braid.len() as i64;
    let s_max = comps.max_cycle_len() as i64;
    let n_comp = comps.count() as i64;
    let c2 = if l == 0 {
        s
    } else {
        let interp = (s_max * l - 1).div_euclid(2);
        let sign_data = (l * s_max * s_max * n_comp + s_max * (l - 1) - 2).div_euclid(2);
        interp.max(sign_data).max(s)
    };
    let (within, between) = braid.component_crossing_counts(&comps);
    let mut c1: f64 = 0.0;
    for (label, cycle) in comps.cycles.iter().enumerate() {
        let k = within[label] as f64;
        if k > 0.0 {
            c1 = c1.max(2.0 * k / (2.0 * cycle.len() as f64 - 1.0));
        }
    }
    for (&(ca, cb), &k) in &between {
        let max_s = comps.cycles[ca].len().max(comps.cycles[cb].len()) as f64;
        c1 = c1.max(k as f64 / (2.0 * max_s));
    }
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn torus_expansion_closed_form() {
        // F = cos, G = sin, two strands: roots lambda e^{i(t + 2 pi j)/2},
        // product u^2 - lambda^2 e^{it}
        let fb = FourierBraid::torus(2);
        let f = assemble(&fb, 1e-9).unwrap();
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.coeff(2, 0, 0), c(1.0, 0.0));
        assert_eq!(f.coeff(0, 1, 0), c(-1.0, 0.0));
        assert!(f.is_harmonic());
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn single_linear_factor() {
        // s_C = 1, F constant, G zero: u - a c0
        let fb = FourierBraid::new(vec![FourierComponent {
            x: TrigPoly::constant(0.75),
            y: TrigPoly::zero(),
            strands: 1,
        }]);
        let f = assemble(&fb, 1e-9).unwrap();
        assert_eq!(f.coeff(1, 0, 0), c(1.0, 0.0));
        assert_eq!(f.coeff(0, 0, 0), c(-0.75, 0.0));
    }

    #[test]
    fn hopf_pair_closed_form() {
        let fb = FourierBraid::new(vec![
            FourierComponent {
                x: TrigPoly::cosine(),
                y: TrigPoly::sine(),
                strands: 1,
            },
            FourierComponent {
                x: TrigPoly::cosine().scaled(-1.0),
                y: TrigPoly::sine().scaled(-1.0),
                strands: 1,
            },
        ]);
        let f = assemble(&fb, 1e-9).unwrap();
        // (u - lambda v)(u + lambda v) = u^2 - lambda^2 v^2
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.coeff(2, 0, 0), c(1.0, 0.0));
        assert_eq!(f.coeff(0, 2, 0), c(-1.0, 0.0));
    }

    #[test]
    fn repeat_multiplies_exponents() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let hopf = f.repeated(2);
        assert_eq!(hopf.coeff(0, 2, 0), c(-1.0, 0.0));
        assert_eq!(hopf.coeff(2, 0, 0), c(1.0, 0.0));
        assert_eq!(f.repeated(1), f);
    }

    #[test]
    fn repeat_paths_agree_numerically() {
        // parametrisation-level repeat vs exponent-level repeat
        let fb = FourierBraid::torus(3);
        let poly_then_repeat = assemble(&fb, 1e-9).unwrap().repeated(2);
        let repeat_then_poly = assemble(&fb.repeated(2), 1e-9).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let u = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let t = rng.gen_range(0.0..2.0 * PI);
            let x = poly_then_repeat.eval_circle(u, t);
            let y = repeat_then_poly.eval_circle(u, t);
            assert!((x - y).norm() < 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn rescale_scales_coefficients_and_roots() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let g = f.rescale(0.5).unwrap();
        assert_eq!(g.coeff(2, 0, 0), c(1.0, 0.0));
        assert_eq!(g.coeff(0, 1, 0), c(-0.25, 0.0));
        // twice composes multiplicatively
        let h = g.rescale(1.0).unwrap();
        assert_eq!(h, f.rescale(1.0).unwrap());
        assert!(f.rescale(-1.0).is_err());
    }

    #[test]
    fn harmonicity_counterexample() {
        let mut terms = BTreeMap::new();
        terms.insert((1, 1, 1), c(1.0, 0.0));
        let f = SemiholoPoly::from_terms(1, 1.0, terms);
        assert!(!f.is_harmonic());
    }

    #[test]
    fn cancellation_failure_detected() {
        // corrupt one phase by hand: a fractional exponent that survives far
        // above the rounding floor of its accumulated magnitude
        let mut laurent = FractionalLaurent {
            denominator: 2,
            terms: vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()],
            magnitudes: vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()],
        };
        laurent.terms[0].insert(1, c(0.5, 0.0));
        laurent.terms[0].insert(2, c(1.0, 0.0));
        laurent.magnitudes[0].insert(1, 2.0);
        laurent.magnitudes[0].insert(2, 2.0);
        let err = assert_cancellation(&laurent, 1e-9).unwrap_err();
        assert!(matches!(err, Error::CancellationFailure { numerator: 1, .. }));
    }

    #[test]
    fn five_two_bounds() {
        let b = BraidWord::parse("2 -1 2 1 1 1", None).unwrap();
        let (c1, c2) = degree_bounds(&b);
        // c2 = max{ floor(17/2), floor((54 + 15 - 2)/2), 3 } = 33
        assert_eq!(c2, 33);
        // single component, 6 crossings: 12/5
        assert!((c1 - 2.4).abs() < 1e-12);
    }

    #[test]
    fn trivial_bounds() {
        let b = BraidWord::trivial(2).unwrap();
        let (c1, c2) = degree_bounds(&b);
        assert_eq!(c1, 0.0);
        assert_eq!(c2, 2);
    }

    #[test]
    fn json_round_trip_and_order() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let text = f.to_json();
        // u descending comes first
        assert!(text.find("\"u\":2").unwrap() < text.find("\"u\":0").unwrap());
        let g = SemiholoPoly::from_json(&text).unwrap();
        assert_eq!(f.terms(), g.terms());
        assert_eq!(f.strands, g.strands);
    }
}
