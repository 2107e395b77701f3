//! End-to-end construction: braid word in, Fourier parametrisation and
//! semiholomorphic polynomial out.

use crate::braid::BraidWord;
use crate::config::Config;
use crate::crossings::{assign_signs, find_crossings, g_data_points};
use crate::diagram::f_data_points;
use crate::error::Result;
use crate::interp::{dft_interpolate, lagrange_trig_interpolate, TrigPoly};
use crate::semiholo::{assemble, FourierBraid, FourierComponent, SemiholoPoly};

/// Interpolate each component's x-curve from the diagram node data.
pub fn x_interpolants(braid: &BraidWord, cfg: &Config) -> Result<Vec<TrigPoly>> {
    let comps = braid.components();
    (0..comps.count())
        .map(|c| {
            let values: Vec<f64> = f_data_points(braid, &comps, c)
                .iter()
                .map(|p| p.1)
                .collect();
            Ok(dft_interpolate(&values)?.prune(cfg.tol))
        })
        .collect()
}

/// Run the four construction steps and return the full parametrisation.
pub fn fourier_parametrisation(braid: &BraidWord, cfg: &Config) -> Result<FourierBraid> {
    cfg.validate()?;
    let comps = braid.components();
    let xs = x_interpolants(braid, cfg)?;
    let ys: Vec<TrigPoly> = if braid.is_trivial() {
        vec![TrigPoly::zero(); comps.count()]
    } else {
        let crossings = find_crossings(&xs, &comps, braid.len(), cfg.grid)?;
        let chart = braid.position_chart();
        let signs = assign_signs(braid, &crossings, &chart, &comps);
        let data = g_data_points(&crossings, &signs, &comps)?;
        data.iter()
            .map(|points| {
                if points.is_empty() {
                    Ok(TrigPoly::zero())
                } else {
                    Ok(lagrange_trig_interpolate(points, None)?.prune(cfg.tol))
                }
            })
            .collect::<Result<_>>()?
    };
    let components = comps
        .cycles
        .iter()
        .map(|cycle| FourierComponent {
            x: xs[cycle.label].clone(),
            y: ys[cycle.label].clone(),
            strands: cycle.len(),
        })
        .collect();
    let mut fb = FourierBraid::new(components);
    fb.lambda = cfg.lambda.unwrap_or(1.0);
    fb.repeat = cfg.repeat;
    fb.braid = Some(braid.clone());
    Ok(fb)
}

/// Full construction: parametrise, expand, cancel, substitute.
pub fn build_polynomial(braid: &BraidWord, cfg: &Config) -> Result<SemiholoPoly> {
    let fb = fourier_parametrisation(braid, cfg)?;
    assemble(&fb, cfg.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    #[test]
    fn five_two_polynomial_shape() {
        let b = BraidWord::parse("2 -1 2 1 1 1", None).unwrap();
        let f = build_polynomial(&b, &Config::default()).unwrap();
        assert_eq!(f.degree_u(), 3);
        assert_eq!(f.degree(), 8);
        assert!(f.is_harmonic());
        // monic in u
        assert_eq!(f.coeff(3, 0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pipeline_matches_direct_product() {
        // executable form of the expansion lemma on the real pipeline output
        let b = BraidWord::parse("2 -1 2 1 1 1", None).unwrap();
        let cfg = Config::default();
        let fb = fourier_parametrisation(&b, &cfg).unwrap();
        let f = assemble(&fb, cfg.tol).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let u = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let t = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let direct: Complex64 = fb
                .strand_values(t)
                .iter()
                .map(|r| u - r)
                .product();
            let via = f.eval_circle(u, t);
            assert!(
                (direct - via).norm() <= 1e-9 * direct.norm().max(1.0),
                "u={u} t={t}: {direct} vs {via}"
            );
        }
    }

    #[test]
    fn trivial_braids_produce_linear_factors() {
        let b = BraidWord::trivial(1).unwrap();
        let f = build_polynomial(&b, &Config::default()).unwrap();
        // single strand at x = 0: f = u
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.coeff(1, 0, 0), Complex64::new(1.0, 0.0));

        let b = BraidWord::trivial(2).unwrap();
        let f = build_polynomial(&b, &Config::default()).unwrap();
        // (u - a/2)(u + a/2) = u^2 - 1/4 at lambda = 1
        assert_eq!(f.coeff(2, 0, 0), Complex64::new(1.0, 0.0));
        assert!((f.coeff(0, 0, 0) - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn harmonic_across_word_corpus() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let s = rng.gen_range(2..=4);
            let l = rng.gen_range(1..=6);
            let letters: Vec<crate::braid::Letter> = (0..l)
                .map(|_| {
                    crate::braid::Letter::new(
                        rng.gen_range(1..s),
                        if rng.gen_bool(0.5) { 1 } else { -1 },
                    )
                })
                .collect();
            let b = BraidWord::new(s, letters).unwrap();
            let f = build_polynomial(&b, &Config::default()).unwrap();
            assert!(f.is_harmonic(), "word {b}");
            assert_eq!(f.degree_u(), s);
        }
    }
}
