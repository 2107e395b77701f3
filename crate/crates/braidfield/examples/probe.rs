use braidfield::braid::BraidWord;
use braidfield::config::Config;
use braidfield::crossings::{assign_signs, find_crossings, g_data_points};
use braidfield::pipeline::x_interpolants;
use braidfield::interp::lagrange_trig_interpolate;
use braidfield::semiholo::{expand_component, FourierComponent, FourierBraid};
use num_complex::Complex64;

fn main() {
    let b = BraidWord::parse("4 4 2 4 4 -1 2 1 3 4 -3 -3", None).unwrap();
    let cfg = Config::default();
    let comps = b.components();
    let xs = x_interpolants(&b, &cfg).unwrap();
    let crossings = find_crossings(&xs, &comps, b.len(), cfg.grid).unwrap();
    let chart = b.position_chart();
    let signs = assign_signs(&b, &crossings, &chart, &comps);
    let data = g_data_points(&crossings, &signs, &comps).unwrap();
    let g = lagrange_trig_interpolate(&data[0], None).unwrap().prune(cfg.tol);
    let comp = FourierComponent { x: xs[0].clone(), y: g.clone(), strands: 5 };

    let laurent = expand_component(&comp, 1.0, 1.0);
    let scale = laurent.max_coeff();
    let mut worst = (0.0f64, 0i64, 0usize);
    for (k, d) in laurent.terms.iter().enumerate() {
        for (&m, &c) in d {
            if m.rem_euclid(5) != 0 && c.norm() / scale > worst.0 {
                worst = (c.norm() / scale, m, k);
            }
        }
    }
    println!("scale = {scale:e}, worst fractional: rel {:e} at m = {} u-power {}", worst.0, worst.1, worst.2);

    // direct product comparison
    let fb = {
        let mut fb = FourierBraid::new(vec![comp.clone()]);
        fb.lambda = 1.0;
        fb
    };
    // evaluate the LAURENT expansion at (u, t) with q = e^{it/5}
    let eval_laurent = |u: Complex64, t: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, d) in laurent.terms.iter().enumerate() {
            for (&m, &c) in d {
                acc += c * u.powu(k as u32) * Complex64::from_polar(1.0, m as f64 * t / 5.0);
            }
        }
        acc
    };
    for t in [0.3, 2.1] {
        let u = Complex64::new(0.3, -0.2);
        let direct: Complex64 = fb.strand_values(t).iter().map(|r| u - r).product();
        let via = eval_laurent(u, t);
        println!("t={t}: direct {direct:e} expansion {via:e} diff {:e}", (direct - via).norm());
    }
    // check strand closure: value of strand j at t=2pi equals strand (j+1) at 0
    for j in 0..5 {
        let a = comp.strand_value(1.0, 1.0, 1, j, 2.0 * std::f64::consts::PI);
        let bnext = comp.strand_value(1.0, 1.0, 1, (j + 1) % 5, 0.0);
        println!("closure j={j}: {:e}", (a - bnext).norm());
    }
}
