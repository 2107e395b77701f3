//! Stereographic projection of the constructed polynomial to three real
//! variables, extraction of the real pair, and rounding to Gaussian-integer
//! coefficients within the transversality budget.

use crate::error::{Error, Result};
use crate::semiholo::SemiholoPoly;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A complex-coefficient polynomial in three real variables, sparse over
/// monomials (x-power, y-power, z-power).
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly3 {
    terms: BTreeMap<(u16, u16, u16), Complex64>,
}

impl RealPoly3 {
    pub fn zero() -> Self {
        RealPoly3 {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c.norm() > 0.0 {
            terms.insert((0, 0, 0), c);
        }
        RealPoly3 { terms }
    }

    pub fn monomial(powers: (u16, u16, u16), c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(powers, c);
        RealPoly3 { terms }
    }

    pub fn terms(&self) -> &BTreeMap<(u16, u16, u16), Complex64> {
        &self.terms
    }

    pub fn coeff(&self, key: (u16, u16, u16)) -> Complex64 {
        self.terms.get(&key).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|&(a, b, c)| (a + b + c) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add_assign(&mut self, other: &RealPoly3) {
        for (&k, &c) in &other.terms {
            let entry = self.terms.entry(k).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
        }
    }

    pub fn mul(&self, other: &RealPoly3) -> RealPoly3 {
        let mut terms: BTreeMap<(u16, u16, u16), Complex64> = BTreeMap::new();
        for (&(a1, b1, c1), &v1) in &self.terms {
            for (&(a2, b2, c2), &v2) in &other.terms {
                let key = (a1 + a2, b1 + b2, c1 + c2);
                *terms.entry(key).or_insert(Complex64::new(0.0, 0.0)) += v1 * v2;
            }
        }
        RealPoly3 { terms }
    }

    pub fn scaled(&self, factor: Complex64) -> RealPoly3 {
        RealPoly3 {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * factor)).collect(),
        }
    }

    pub fn pow(&self, n: usize) -> RealPoly3 {
        let mut acc = RealPoly3::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn pruned(&self, tol: f64) -> RealPoly3 {
        let scale = self.scale();
        RealPoly3 {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol * scale)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b, c), &v) in &self.terms {
            acc += v * x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32);
        }
        acc
    }

    /// Monomials ordered like the polynomial serialization: first power
    /// descending, remaining ascending.
    pub fn ordered_monomials(&self) -> Vec<((u16, u16, u16), Complex64)> {
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
            .map(|&((x, y, z), c)| {
                format!(
                    "{{\"x\":{},\"y\":{},\"z\":{},\"re\":{},\"im\":{}}}",
                    x,
                    y,
                    z,
                    crate::json::fmt_f64(c.re),
                    crate::json::fmt_f64(c.im)
                )
            })
            .collect();
        format!(
            "{{\"degree\":{},\"monomials\":[{}]}}",
            self.degree(),
            monomials.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("real polynomial json: {e}")))?;
        let monomials = v["monomials"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("real polynomial json missing `monomials`".into()))?;
        let mut terms = BTreeMap::new();
        for m in monomials {
            let key = (
                m["x"].as_u64().unwrap_or(0) as u16,
                m["y"].as_u64().unwrap_or(0) as u16,
                m["z"].as_u64().unwrap_or(0) as u16,
            );
            terms.insert(
                key,
                Complex64::new(m["re"].as_f64().unwrap_or(0.0), m["im"].as_f64().unwrap_or(0.0)),
            );
        }
        Ok(RealPoly3 { terms })
    }

    /// Human-readable single-line form like `(1+2i) x^2 y - 3 z`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((x, y, z), c) in self.ordered_monomials() {
            let mut vars = String::new();
            for (name, p) in [("x", x), ("y", y), ("z", z)] {
                if p == 1 {
                    vars.push_str(&format!(" {name}"));
                } else if p > 1 {
                    vars.push_str(&format!(" {name}^{p}"));
                }
            }
            let coeff = if c.im == 0.0 {
                format!("{}", c.re)
            } else if c.re == 0.0 {
                format!("{}i", c.im)
            } else if c.im < 0.0 {
                format!("({}{}i)", c.re, c.im)
            } else {
                format!("({}+{}i)", c.re, c.im)
            };
            parts.push(format!("{coeff}{vars}"));
        }
        parts.join(" + ")
    }
}

fn u_numerator() -> RealPoly3 {
    // x^2 + y^2 + z^2 - 1 + 2iz
    let mut p = RealPoly3::zero();
    p.add_assign(&RealPoly3::monomial((2, 0, 0), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::monomial((0, 2, 0), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::monomial((0, 0, 2), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::constant(Complex64::new(-1.0, 0.0)));
    p.add_assign(&RealPoly3::monomial((0, 0, 1), Complex64::new(0.0, 2.0)));
    p
}

fn v_numerator(conjugate: bool) -> RealPoly3 {
    // 2(x + iy), conjugated on request
    let mut p = RealPoly3::zero();
    p.add_assign(&RealPoly3::monomial((1, 0, 0), Complex64::new(2.0, 0.0)));
    p.add_assign(&RealPoly3::monomial(
        (0, 1, 0),
        Complex64::new(0.0, if conjugate { -2.0 } else { 2.0 }),
    ));
    p
}

fn denominator() -> RealPoly3 {
    // x^2 + y^2 + z^2 + 1
    let mut p = RealPoly3::zero();
    p.add_assign(&RealPoly3::monomial((2, 0, 0), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::monomial((0, 2, 0), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::monomial((0, 0, 2), Complex64::new(1.0, 0.0)));
    p.add_assign(&RealPoly3::constant(Complex64::new(1.0, 0.0)));
    p
}

/// Substitute the stereographic expressions for u, v, conj(v) and clear the
/// common denominator (x^2+y^2+z^2+1)^deg(f).
pub fn stereographic_project(f: &SemiholoPoly) -> RealPoly3 {
    let deg = f.degree();
    let u_num = u_numerator();
    let v_num = v_numerator(false);
    let vb_num = v_numerator(true);
    let den = denominator();
    // cached powers
    let cache = |base: &RealPoly3, up_to: usize| -> Vec<RealPoly3> {
        let mut v = Vec::with_capacity(up_to + 1);
        v.push(RealPoly3::constant(Complex64::new(1.0, 0.0)));
        for i in 1..=up_to {
            let next = v[i - 1].mul(base);
            v.push(next);
        }
        v
    };
    let u_pows = cache(&u_num, f.degree_u());
    let v_max = f.terms().keys().map(|&(_, v, _)| v as usize).max().unwrap_or(0);
    let w_max = f
        .terms()
        .keys()
        .map(|&(_, _, w)| w as usize)
        .max()
        .unwrap_or(0);
    let v_pows = cache(&v_num, v_max);
    let w_pows = cache(&vb_num, w_max);
    let d_pows = cache(&den, deg);
    let mut out = RealPoly3::zero();
    for (&(ku, kv, kw), &c) in f.terms() {
        let fill = deg - (ku + kv + kw) as usize;
        let term = u_pows[ku as usize]
            .mul(&v_pows[kv as usize])
            .mul(&w_pows[kw as usize])
            .mul(&d_pows[fill])
            .scaled(c);
        out.add_assign(&term);
    }
    out.pruned(1e-12)
}

/// Split into the real-coefficient pair (F1, F2) with p = F1 + i F2.
pub fn split_real_imag(p: &RealPoly3) -> (RealPoly3, RealPoly3) {
    let mut re = RealPoly3::zero();
    let mut im = RealPoly3::zero();
    for (&k, &c) in p.terms() {
        if c.re != 0.0 {
            re.terms.insert(k, Complex64::new(c.re, 0.0));
        }
        if c.im != 0.0 {
            im.terms.insert(k, Complex64::new(c.im, 0.0));
        }
    }
    (re, im)
}

/// Inverse of the stereographic substitution: maps a point of the unit
/// three-sphere (u, v) to (x, y, z). Returns None near the projection pole.
pub fn inverse_stereographic(point: [f64; 4]) -> Option<[f64; 3]> {
    let denom = 1.0 - point[0];
    if denom.abs() < 1e-12 {
        return None;
    }
    let out = [point[2] / denom, point[3] / denom, point[1] / denom];
    if out.iter().any(|c| c.abs() > 1e6) {
        return None;
    }
    Some(out)
}

/// Round to Gaussian-integer coefficients after scaling by the smallest
/// admissible integer factor. The perturbation of the polynomial values at
/// the supplied projected nodal samples must stay below a tenth of the
/// transversality margin (denominator powers only shrink it).
pub fn integerize(
    p: &RealPoly3,
    margin: f64,
    samples: &[[f64; 3]],
    scale_bound: u64,
) -> Result<(RealPoly3, u64)> {
    if margin <= 0.0 {
        return Err(Error::IntegerizeFailure(scale_bound));
    }
    let mut candidates: Vec<u64> = (1..=100u64).collect();
    let mut power = 1000u64;
    while power <= scale_bound {
        candidates.push(power);
        power = power.saturating_mul(10);
    }
    candidates.retain(|&c| c <= scale_bound);
    for scale in candidates {
        let scaled = p.scaled(Complex64::new(scale as f64, 0.0));
        let mut rounded = RealPoly3::zero();
        let mut delta = RealPoly3::zero();
        for (&k, &c) in scaled.terms() {
            let r = Complex64::new(c.re.round(), c.im.round());
            if r.norm() > 0.0 {
                rounded.terms.insert(k, r);
            }
            let d = r - c;
            if d.norm() > 0.0 {
                delta.terms.insert(k, d);
            }
        }
        // evaluate the perturbation where the zero set actually lives
        let worst = samples
            .iter()
            .map(|&[x, y, z]| delta.eval(x, y, z).norm())
            .fold(0.0, f64::max);
        if worst < 0.1 * margin * scale as f64 {
            return Ok((rounded, scale));
        }
    }
    Err(Error::IntegerizeFailure(scale_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiholo::{assemble, FourierBraid};
    use std::collections::BTreeMap as Map;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly_u() -> SemiholoPoly {
        let mut terms = Map::new();
        terms.insert((1, 0, 0), c(1.0, 0.0));
        SemiholoPoly::from_terms(1, 1.0, terms)
    }

    #[test]
    fn projects_u_to_sphere_equation() {
        let p = stereographic_project(&poly_u());
        // (x^2+y^2+z^2-1) + 2iz
        assert_eq!(p.coeff((2, 0, 0)), c(1.0, 0.0));
        assert_eq!(p.coeff((0, 2, 0)), c(1.0, 0.0));
        assert_eq!(p.coeff((0, 0, 2)), c(1.0, 0.0));
        assert_eq!(p.coeff((0, 0, 0)), c(-1.0, 0.0));
        assert_eq!(p.coeff((0, 0, 1)), c(0.0, 2.0));
        assert_eq!(p.degree(), 2);
        let (f1, f2) = split_real_imag(&p);
        assert_eq!(f1.coeff((0, 0, 1)), c(0.0, 0.0));
        assert_eq!(f2.coeff((0, 0, 1)), c(2.0, 0.0));
        assert_eq!(f1.coeff((2, 0, 0)), c(1.0, 0.0));
    }

    #[test]
    fn pointwise_agreement_with_denominator_power() {
        use rand::{Rng, SeedableRng};
        let f = assemble(&FourierBraid::torus(2), 1e-9)
            .unwrap()
            .rescale(0.5)
            .unwrap();
        let p = stereographic_project(&f);
        assert!(p.degree() <= 2 * f.degree());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (x, y, z) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let r2: f64 = x * x + y * y + z * z;
            let den = r2 + 1.0;
            let u = Complex64::new(r2 - 1.0, 2.0 * z) / den;
            let v = Complex64::new(2.0 * x, 2.0 * y) / den;
            let expected = f.eval(u, v) * den.powi(f.degree() as i32);
            let got = p.eval(x, y, z);
            assert!(
                (got - expected).norm() <= 1e-10 * expected.norm().max(1.0),
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn split_recombines() {
        use rand::{Rng, SeedableRng};
        let f = assemble(&FourierBraid::torus(3), 1e-9).unwrap();
        let p = stereographic_project(&f);
        let (re, im) = split_real_imag(&p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (x, y, z) = (
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-1.5..1.5),
            );
            let whole = p.eval(x, y, z);
            let f1 = re.eval(x, y, z);
            let f2 = im.eval(x, y, z);
            assert!((whole - (f1 + f2 * Complex64::i())).norm() < 1e-12 * whole.norm().max(1.0));
        }
        let (z1, z2) = split_real_imag(&RealPoly3::zero());
        assert!(z1.terms().is_empty() && z2.terms().is_empty());
    }

    #[test]
    fn inverse_stereo_round_trips() {
        // push an S^3 point through the inverse, then re-evaluate the forward map
        let p = [0.2, 0.4, 0.5, (1.0f64 - 0.04 - 0.16 - 0.25).sqrt()];
        let [x, y, z] = inverse_stereographic(p).unwrap();
        let r2 = x * x + y * y + z * z;
        let den = r2 + 1.0;
        assert!(((r2 - 1.0) / den - p[0]).abs() < 1e-12);
        assert!((2.0 * z / den - p[1]).abs() < 1e-12);
        assert!((2.0 * x / den - p[2]).abs() < 1e-12);
        assert!((2.0 * y / den - p[3]).abs() < 1e-12);
        // pole is rejected
        assert!(inverse_stereographic([1.0, 0.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn integerize_exact_cases() {
        // already integral: scale 1
        let p = stereographic_project(&poly_u());
        let (q, scale) = integerize(&p, 1.0, &[[0.3, 0.1, -0.2]], 1_000_000).unwrap();
        assert_eq!(scale, 1);
        assert_eq!(q.terms(), p.terms());

        // half-integer coefficients: scale 2 suffices and is minimal
        let mut terms = Map::new();
        terms.insert((2, 0, 0), c(1.0, 0.0));
        terms.insert((1, 0, 0), c(-0.5, 0.0));
        let f = SemiholoPoly::from_terms(2, 1.0, terms);
        let p = stereographic_project(&f);
        let (_, scale) = integerize(&p, 1e-3, &[[0.5, -0.4, 0.8]], 1_000_000).unwrap();
        assert_eq!(scale, 2);
    }

    #[test]
    fn integerize_needs_positive_margin() {
        let p = stereographic_project(&poly_u());
        assert!(matches!(
            integerize(&p, 0.0, &[[0.0, 0.0, 0.0]], 10),
            Err(Error::IntegerizeFailure(_))
        ));
    }

    #[test]
    fn text_dump_is_readable() {
        let p = stereographic_project(&poly_u());
        let text = p.to_text();
        assert!(text.contains("x^2"));
        assert!(RealPoly3::zero().to_text() == "0");
    }
}
