//! Numerical certification of the construction: amplitude selection by
//! halving with full gate checks, braid reconstruction from root curves on
//! the circle or the sphere, nodal sampling, transversality margins, and the
//! phase-critical scan.

use crate::braid::BraidWord;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::roots::all_roots;
use crate::semiholo::{FourierBraid, SemiholoPoly};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const LAMBDA_FLOOR: f64 = 1e-8;

/// Roots of f(., v) for fixed v, in solver order.
pub fn roots_at(f: &SemiholoPoly, v: Complex64) -> Result<Vec<Complex64>> {
    all_roots(&f.u_coefficients(v))
}

/// Combinatorial braid data recovered from root curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidData {
    /// `permutation[p]` is the strand ending in position p, matching the
    /// convention of [`crate::braid::Components`].
    pub permutation: Vec<usize>,
    pub exponent_sum: i64,
    /// Signed crossing count per unordered strand pair.
    pub pair_counts: BTreeMap<(usize, usize), i64>,
}

/// Where the root curves live: the unit-circle slice v = e^{it}, or the
/// intersection of each strand's radial ray with the three-sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Circle,
    Sphere,
}

/// Outcome of one strand's radial descent.
#[derive(Debug, Clone)]
struct RadialStrand {
    u_sphere: Complex64,
    r_star: f64,
}

/// Gate-aware result: `Fail` names the first violated verification stage.
enum Gate<T> {
    Pass(T),
    Fail(&'static str),
}

/// Analyze all strands of f(., r e^{it}) along r in [0, 1]: locate each
/// strand's sphere intersection, confirm the radial function
/// |u|^2 + r^2 - 1 increases strictly down to its unique zero, and confirm
/// nothing re-emerges below.
fn radial_analysis(f: &SemiholoPoly, t: f64) -> Result<Gate<Vec<RadialStrand>>> {
    let s = f.degree_u();
    let circle = roots_at(f, Complex64::from_polar(1.0, t))?;
    if circle.iter().any(|u| u.norm() >= 1.0) {
        return Ok(Gate::Fail("roots-in-disk"));
    }
    let mut current = circle.clone();
    let mut r = 1.0f64;
    let mut h_prev: Vec<f64> = current.iter().map(|u| u.norm_sqr()).collect(); // h(1) = |u|^2
    let mut found: Vec<Option<(f64, Complex64)>> = vec![None; s];
    let mut step = 1.0 / 64.0;
    // strands whose zero sits exactly at r = 1
    for (j, h) in h_prev.iter().enumerate() {
        if *h <= 1e-14 {
            found[j] = Some((1.0, current[j]));
        }
    }
    let mut set_mode = false;
    while r > 0.0 {
        let r_next = (r - step).max(0.0);
        let row = all_roots(&f.u_coefficients(Complex64::from_polar(r_next, t)))?;
        if set_mode {
            let max_h = row
                .iter()
                .map(|u| u.norm_sqr() + r_next * r_next - 1.0)
                .fold(f64::MIN, f64::max);
            if max_h >= 0.0 {
                return Ok(Gate::Fail("unique-intersection"));
            }
            r = r_next;
            step = 1.0 / 64.0;
            continue;
        }
        match match_rows(&current, &row) {
            Some(matched) => {
                let h_new: Vec<f64> = matched
                    .iter()
                    .map(|u| u.norm_sqr() + r_next * r_next - 1.0)
                    .collect();
                for j in 0..s {
                    match found[j] {
                        Some(_) => {
                            // below the zero the curve must stay inside
                            if h_new[j] >= 0.0 {
                                return Ok(Gate::Fail("unique-intersection"));
                            }
                        }
                        None => {
                            // approaching the zero from above: strictly increasing in r
                            if h_new[j] >= h_prev[j] {
                                return Ok(Gate::Fail("radial-monotonicity"));
                            }
                            if h_new[j] <= 0.0 {
                                let (r_star, u_star) = bisect_radial(
                                    f,
                                    t,
                                    r_next,
                                    matched[j],
                                    r,
                                    current[j],
                                )?;
                                found[j] = Some((r_star, u_star));
                            }
                        }
                    }
                }
                current = matched;
                h_prev = h_new;
                r = r_next;
                step = (step * 2.0).min(1.0 / 64.0);
            }
            None => {
                step *= 0.5;
                if step < 1e-9 {
                    if found.iter().all(|f| f.is_some()) {
                        set_mode = true;
                        step = 1.0 / 64.0;
                    } else {
                        return Ok(Gate::Fail("root-separation"));
                    }
                }
            }
        }
    }
    if found.iter().any(|f| f.is_none()) {
        return Ok(Gate::Fail("missing-intersection"));
    }
    let strands = (0..s)
        .map(|j| {
            let (r_star, u_star) = found[j].unwrap();
            RadialStrand {
                u_sphere: u_star,
                r_star,
            }
        })
        .collect();
    Ok(Gate::Pass(strands))
}

/// Bisect |u(r)|^2 + r^2 - 1 between a negative and a nonnegative sample,
/// following the tracked root.
fn bisect_radial(
    f: &SemiholoPoly,
    t: f64,
    mut lo_r: f64,
    mut lo_u: Complex64,
    mut hi_r: f64,
    mut hi_u: Complex64,
) -> Result<(f64, Complex64)> {
    for _ in 0..60 {
        let mid = 0.5 * (lo_r + hi_r);
        let row = all_roots(&f.u_coefficients(Complex64::from_polar(mid, t)))?;
        let reference = 0.5 * (lo_u + hi_u);
        let u = *row
            .iter()
            .min_by(|a, b| {
                (*a - reference)
                    .norm()
                    .partial_cmp(&(*b - reference).norm())
                    .unwrap()
            })
            .unwrap();
        let h = u.norm_sqr() + mid * mid - 1.0;
        if h.abs() < 1e-14 {
            return Ok((mid, u));
        }
        if h < 0.0 {
            lo_r = mid;
            lo_u = u;
        } else {
            hi_r = mid;
            hi_u = u;
        }
    }
    let r = 0.5 * (lo_r + hi_r);
    Ok((r, 0.5 * (lo_u + hi_u)))
}

/// Nearest-neighbor assignment from `from` onto `to`; `None` when the step
/// motion is too large relative to the separation of the source points.
fn match_rows(from: &[Complex64], to: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = from.len();
    debug_assert_eq!(n, to.len());
    if n == 0 {
        return Some(Vec::new());
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, a) in from.iter().enumerate() {
        for (j, b) in to.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut taken_from = vec![false; n];
    let mut taken_to = vec![false; n];
    let mut result = vec![Complex64::new(0.0, 0.0); n];
    let mut motion = 0.0f64;
    let mut assigned = 0;
    for (d, i, j) in pairs {
        if taken_from[i] || taken_to[j] {
            continue;
        }
        taken_from[i] = true;
        taken_to[j] = true;
        result[i] = to[j];
        motion = motion.max(d);
        assigned += 1;
        if assigned == n {
            break;
        }
    }
    let mut min_sep = f64::MAX;
    for i in 0..n {
        for j in i + 1..n {
            min_sep = min_sep.min((from[i] - from[j]).norm());
        }
    }
    // identical roots move together; otherwise demand clear separation
    if motion < 1e-12 || 3.0 * motion < min_sep {
        Some(result)
    } else {
        None
    }
}

/// A chained family of root curves over [0, 2 pi].
struct Chain {
    ts: Vec<f64>,
    rows: Vec<Vec<Complex64>>,
}

fn build_chain<P>(provider: &P, base_ts: &[f64], base_rows: Vec<Vec<Complex64>>) -> Result<Chain>
where
    P: Fn(f64) -> Result<Vec<Complex64>>,
{
    let mut order: Vec<usize> = (0..base_rows[0].len()).collect();
    // strand slots ordered by descending real part at t = 0, the diagram's
    // position order
    order.sort_by(|&a, &b| {
        base_rows[0][b]
            .re
            .partial_cmp(&base_rows[0][a].re)
            .unwrap()
            .then(base_rows[0][b].im.partial_cmp(&base_rows[0][a].im).unwrap())
    });
    let first: Vec<Complex64> = order.iter().map(|&i| base_rows[0][i]).collect();
    let mut chain = Chain {
        ts: vec![base_ts[0]],
        rows: vec![first],
    };
    for (i, &t) in base_ts.iter().enumerate().skip(1) {
        extend_chain(&mut chain, provider, t, Some(&base_rows[i]), 0)?;
    }
    Ok(chain)
}

fn extend_chain<P>(
    chain: &mut Chain,
    provider: &P,
    t: f64,
    precomputed: Option<&[Complex64]>,
    depth: usize,
) -> Result<()>
where
    P: Fn(f64) -> Result<Vec<Complex64>>,
{
    let values = match precomputed {
        Some(v) => v.to_vec(),
        None => provider(t)?,
    };
    let prev = chain.rows.last().unwrap();
    match match_rows(prev, &values) {
        Some(row) => {
            chain.ts.push(t);
            chain.rows.push(row);
            Ok(())
        }
        None => {
            if depth >= 26 {
                return Err(Error::IncreaseSamples);
            }
            let mid = 0.5 * (chain.ts.last().unwrap() + t);
            extend_chain(chain, provider, mid, None, depth + 1)?;
            extend_chain(chain, provider, t, None, depth + 1)
        }
    }
}

/// Read permutation, exponent sum and per-pair signed crossing counts off a
/// chained root-curve family.
fn braid_data_from_chain<P>(chain: &Chain, provider: &P) -> Result<BraidData>
where
    P: Fn(f64) -> Result<Vec<Complex64>>,
{
    let s = chain.rows[0].len();
    let first = &chain.rows[0];
    let last = chain.rows.last().unwrap();
    // strand i ends where strand end_slot[i] starts
    let mut end_slot = vec![usize::MAX; s];
    let mut used = vec![false; s];
    for i in 0..s {
        let (j, dist) = first
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, v)| (j, (v - last[i]).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or(Error::IncreaseSamples)?;
        let scale = first.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-12);
        if dist > 1e-6 * scale.max(1.0) {
            return Err(Error::IncreaseSamples);
        }
        end_slot[i] = j;
        used[j] = true;
    }
    let mut permutation = vec![0usize; s];
    for (strand, &pos) in end_slot.iter().enumerate() {
        permutation[pos] = strand;
    }

    let mut exponent_sum = 0i64;
    let mut pair_counts = BTreeMap::new();
    for w in 0..chain.rows.len() - 1 {
        let (ta, tb) = (chain.ts[w], chain.ts[w + 1]);
        let (ra, rb) = (&chain.rows[w], &chain.rows[w + 1]);
        for i in 0..s {
            for j in i + 1..s {
                let da = ra[i].re - ra[j].re;
                let db = rb[i].re - rb[j].re;
                if da == 0.0 || da * db >= 0.0 {
                    continue;
                }
                let sign = refine_crossing(provider, ta, ra, tb, i, j, da)?;
                exponent_sum += sign;
                *pair_counts.entry((i, j)).or_insert(0) += sign;
            }
        }
    }
    Ok(BraidData {
        permutation,
        exponent_sum,
        pair_counts,
    })
}

/// Bisect one real-part crossing inside [ta, tb] and return its sign: +1
/// when the strand in front (larger imaginary part) is the one arriving from
/// the smaller position index, i.e. from larger real part.
fn refine_crossing<P>(
    provider: &P,
    mut ta: f64,
    row_a: &[Complex64],
    mut tb: f64,
    i: usize,
    j: usize,
    d_before: f64,
) -> Result<i64>
where
    P: Fn(f64) -> Result<Vec<Complex64>>,
{
    let mut anchor = row_a.to_vec();
    let mut da = d_before;
    for _ in 0..60 {
        let tm = 0.5 * (ta + tb);
        let values = provider(tm)?;
        let row = match_free(&anchor, &values);
        let dm = row[i].re - row[j].re;
        if da * dm <= 0.0 {
            tb = tm;
        } else {
            ta = tm;
            da = dm;
            anchor = row;
        }
        if tb - ta < 1e-10 {
            break;
        }
    }
    let values = provider(0.5 * (ta + tb))?;
    let row = match_free(&anchor, &values);
    let im_diff = row[i].im - row[j].im;
    Ok(if d_before * im_diff > 0.0 { 1 } else { -1 })
}

/// Unconditional nearest-neighbor matching (used inside tight brackets where
/// the curves are known to stay separated in the complex plane).
fn match_free(from: &[Complex64], to: &[Complex64]) -> Vec<Complex64> {
    let n = from.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, a) in from.iter().enumerate() {
        for (j, b) in to.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut taken_from = vec![false; n];
    let mut taken_to = vec![false; n];
    let mut result = vec![Complex64::new(0.0, 0.0); n];
    for (_, i, j) in pairs {
        if taken_from[i] || taken_to[j] {
            continue;
        }
        taken_from[i] = true;
        taken_to[j] = true;
        result[i] = to[j];
    }
    result
}

/// Reconstruct braid data from the zero set, either on the circle slice or
/// on the sphere.
pub fn reconstruct_braid(
    f: &SemiholoPoly,
    samples: usize,
    surface: Surface,
) -> Result<BraidData> {
    let n = samples.max(64);
    let base_ts: Vec<f64> = (0..=n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    match surface {
        Surface::Circle => {
            let provider = |t: f64| roots_at(f, Complex64::from_polar(1.0, t));
            let base_rows: Vec<Vec<Complex64>> = base_ts
                .par_iter()
                .map(|&t| provider(t))
                .collect::<Result<_>>()?;
            let chain = build_chain(&provider, &base_ts, base_rows)?;
            braid_data_from_chain(&chain, &provider)
        }
        Surface::Sphere => {
            let provider = |t: f64| -> Result<Vec<Complex64>> {
                match radial_analysis(f, t)? {
                    Gate::Pass(strands) => Ok(strands.iter().map(|s| s.u_sphere).collect()),
                    Gate::Fail(stage) => Err(Error::VerificationFailure(stage.into())),
                }
            };
            let base_rows: Vec<Vec<Complex64>> = base_ts
                .par_iter()
                .map(|&t| provider(t))
                .collect::<Result<_>>()?;
            let chain = build_chain(&provider, &base_ts, base_rows)?;
            braid_data_from_chain(&chain, &provider)
        }
    }
}

/// Uniform nodal samples on the sphere: n parameters per strand, each point
/// (u, r e^{it}) with |u|^2 + r^2 = 1.
pub fn sample_nodal_set(f: &SemiholoPoly, n: usize) -> Result<Vec<[f64; 4]>> {
    let analyses: Vec<Gate<Vec<RadialStrand>>> = (0..n)
        .into_par_iter()
        .map(|i| radial_analysis(f, 2.0 * PI * i as f64 / n as f64))
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (i, gate) in analyses.into_iter().enumerate() {
        let t = 2.0 * PI * i as f64 / n as f64;
        match gate {
            Gate::Pass(strands) => {
                for s in strands {
                    let v = Complex64::from_polar(s.r_star, t);
                    points.push([s.u_sphere.re, s.u_sphere.im, v.re, v.im]);
                }
            }
            Gate::Fail(stage) => return Err(Error::VerificationFailure(stage.into())),
        }
    }
    Ok(points)
}

/// Transversality diagnostics at nodal points.
#[derive(Debug, Clone, Copy)]
pub struct TransversalityMargin {
    /// Smallest |df/du| over the samples.
    pub min_du: f64,
    /// Smallest singular value of the real 2x3 differential of f restricted
    /// to the sphere.
    pub min_singular: f64,
}

impl TransversalityMargin {
    pub fn margin(&self) -> f64 {
        self.min_du.min(self.min_singular)
    }
}

fn df_du(f: &SemiholoPoly, u: Complex64, v: Complex64) -> Complex64 {
    let vb = v.conj();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(ku, kv, kw), &c) in f.terms() {
        if ku > 0 {
            acc += c * ku as f64 * u.powu(ku - 1) * v.powu(kv) * vb.powu(kw);
        }
    }
    acc
}

fn eval4(f: &SemiholoPoly, p: [f64; 4]) -> Complex64 {
    f.eval(Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]))
}

/// Minimum of |df/du| and of the smallest singular value of the sphere
/// differential (central differences, step 1e-6) over the given points.
pub fn transversality_check(f: &SemiholoPoly, points: &[[f64; 4]]) -> TransversalityMargin {
    let mut min_du = f64::MAX;
    let mut min_singular = f64::MAX;
    let h = 1e-6;
    for &p in points {
        let u = Complex64::new(p[0], p[1]);
        let v = Complex64::new(p[2], p[3]);
        min_du = min_du.min(df_du(f, u, v).norm());
        // orthonormal tangent basis at p
        let mut basis: Vec<[f64; 4]> = Vec::with_capacity(3);
        for e in [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ] {
            let mut w = e;
            let dot = w.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<f64>();
            for k in 0..4 {
                w[k] -= dot * p[k];
            }
            for b in &basis {
                let d = w.iter().zip(b.iter()).map(|(a, c)| a * c).sum::<f64>();
                for k in 0..4 {
                    w[k] -= d * b[k];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for x in w.iter_mut() {
                    *x /= norm;
                }
                basis.push(w);
                if basis.len() == 3 {
                    break;
                }
            }
        }
        // rows (Re, Im), columns the three tangent directions
        let mut m = [[0.0f64; 3]; 2];
        for (col, dir) in basis.iter().enumerate() {
            let mut plus = p;
            let mut minus = p;
            for k in 0..4 {
                plus[k] += h * dir[k];
                minus[k] -= h * dir[k];
            }
            let d = (eval4(f, plus) - eval4(f, minus)) / (2.0 * h);
            m[0][col] = d.re;
            m[1][col] = d.im;
        }
        // singular values via the 2x2 Gram matrix
        let a = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[0][2] * m[0][2];
        let b = m[0][0] * m[1][0] + m[0][1] * m[1][1] + m[0][2] * m[1][2];
        let c = m[1][0] * m[1][0] + m[1][1] * m[1][1] + m[1][2] * m[1][2];
        let tr = a + c;
        let det = a * c - b * b;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let smallest = (tr / 2.0 - disc).max(0.0).sqrt();
        min_singular = min_singular.min(smallest);
    }
    TransversalityMargin {
        min_du,
        min_singular,
    }
}

/// Full verification report; emitted even when a stage fails.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub lambda: f64,
    pub passed: bool,
    pub first_failing_stage: Option<String>,
    pub roots_in_disk: bool,
    pub unique_intersection: bool,
    pub reconstructed: Option<BraidData>,
    pub permutation_match: Option<bool>,
    pub exponent_sum_match: Option<bool>,
    pub pair_counts_match: Option<bool>,
    pub transversality_margin: f64,
    pub max_f_on_nodal: f64,
    pub phase_critical: Option<usize>,
    pub phase_critical_complete: Option<bool>,
    pub conservative_lambda: Option<f64>,
}

impl VerificationReport {
    fn fresh(lambda: f64) -> Self {
        VerificationReport {
            lambda,
            passed: false,
            first_failing_stage: None,
            roots_in_disk: false,
            unique_intersection: false,
            reconstructed: None,
            permutation_match: None,
            exponent_sum_match: None,
            pair_counts_match: None,
            transversality_margin: 0.0,
            max_f_on_nodal: f64::MAX,
            phase_critical: None,
            phase_critical_complete: None,
            conservative_lambda: None,
        }
    }

    pub fn to_json(&self) -> String {
        let recon = match &self.reconstructed {
            None => ("null".to_string(), "null".to_string(), "null".to_string()),
            Some(d) => {
                let perm = format!(
                    "[{}]",
                    d.permutation
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                let pairs = format!(
                    "{{{}}}",
                    d.pair_counts
                        .iter()
                        .map(|((a, b), c)| format!("\"{a}-{b}\":{c}"))
                        .collect::<Vec<_>>()
                        .join(",")
                );
                (perm, d.exponent_sum.to_string(), pairs)
            }
        };
        format!(
            concat!(
                "{{\"lambda\":{},\"passed\":{},\"first_failing_stage\":{},",
                "\"roots_in_disk\":{},\"unique_intersection\":{},",
                "\"permutation\":{},\"exponent_sum\":{},\"pair_counts\":{},",
                "\"permutation_match\":{},\"exponent_sum_match\":{},\"pair_counts_match\":{},",
                "\"transversality_margin\":{},\"max_f_on_nodal\":{},",
                "\"phase_critical\":{},\"phase_critical_complete\":{},",
                "\"conservative_lambda\":{}}}"
            ),
            crate::json::fmt_f64(self.lambda),
            self.passed,
            match &self.first_failing_stage {
                None => "null".to_string(),
                Some(s) => format!("\"{s}\""),
            },
            self.roots_in_disk,
            self.unique_intersection,
            recon.0,
            recon.1,
            recon.2,
            crate::json::fmt_bool_opt(self.permutation_match),
            crate::json::fmt_bool_opt(self.exponent_sum_match),
            crate::json::fmt_bool_opt(self.pair_counts_match),
            crate::json::fmt_f64(self.transversality_margin),
            crate::json::fmt_f64(if self.max_f_on_nodal == f64::MAX {
                -1.0
            } else {
                self.max_f_on_nodal
            }),
            match self.phase_critical {
                None => "null".to_string(),
                Some(n) => n.to_string(),
            },
            crate::json::fmt_bool_opt(self.phase_critical_complete),
            match self.conservative_lambda {
                None => "null".to_string(),
                Some(x) => crate::json::fmt_f64(x),
            },
        )
    }
}

/// Verify f at its current amplitude. `word` enables the braid-match gates;
/// `fb` enables the phase-critical scan.
pub fn verify_at_lambda(
    f: &SemiholoPoly,
    cfg: &Config,
    word: Option<&BraidWord>,
    fb: Option<&FourierBraid>,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::fresh(f.lambda);
    let n = cfg.samples;
    // deterministic early-out prefix before the parallel sweep
    let prefix = 16.min(n);
    for i in 0..prefix {
        let t = 2.0 * PI * i as f64 / n as f64;
        if let Gate::Fail(stage) = radial_analysis(f, t)? {
            report.first_failing_stage = Some(stage.into());
            report.roots_in_disk = stage != "roots-in-disk";
            return Ok(report);
        }
    }
    let gates: Vec<Gate<Vec<RadialStrand>>> = (0..n)
        .into_par_iter()
        .map(|i| radial_analysis(f, 2.0 * PI * i as f64 / n as f64))
        .collect::<Result<_>>()?;
    for gate in &gates {
        if let Gate::Fail(stage) = gate {
            report.first_failing_stage = Some((*stage).to_string());
            report.roots_in_disk = *stage != "roots-in-disk";
            return Ok(report);
        }
    }
    report.roots_in_disk = true;
    report.unique_intersection = true;

    // nodal samples from the gate sweep
    let mut nodal = Vec::new();
    for (i, gate) in gates.iter().enumerate() {
        let t = 2.0 * PI * i as f64 / n as f64;
        if let Gate::Pass(strands) = gate {
            for s in strands {
                let v = Complex64::from_polar(s.r_star, t);
                nodal.push([s.u_sphere.re, s.u_sphere.im, v.re, v.im]);
            }
        }
    }

    // braid reconstruction on the sphere
    match reconstruct_braid(f, cfg.samples, Surface::Sphere) {
        Ok(data) => {
            if let Some(b) = word {
                let comps = b.components();
                let perm_ok = data.permutation == comps.permutation;
                let exp_ok = data.exponent_sum == b.exponent_sum();
                let expected_pairs = b.pair_crossing_counts();
                let mut got = data.pair_counts.clone();
                got.retain(|_, v| *v != 0);
                let mut want = expected_pairs.clone();
                want.retain(|_, v| *v != 0);
                let pairs_ok = got == want;
                report.permutation_match = Some(perm_ok);
                report.exponent_sum_match = Some(exp_ok);
                report.pair_counts_match = Some(pairs_ok);
                if !(perm_ok && exp_ok && pairs_ok) {
                    report.reconstructed = Some(data);
                    report.first_failing_stage = Some("braid-match".into());
                    return Ok(report);
                }
            }
            report.reconstructed = Some(data);
        }
        Err(Error::IncreaseSamples) if word.is_none() => {
            // degenerate hand-built inputs can defeat strand separation;
            // leave reconstruction empty and let transversality judge
            report.reconstructed = None;
        }
        Err(Error::VerificationFailure(stage)) => {
            report.first_failing_stage = Some(stage);
            return Ok(report);
        }
        Err(e) => return Err(e),
    }

    // residual and transversality over the nodal set
    let scale = f.scale().max(1.0);
    report.max_f_on_nodal = nodal
        .iter()
        .map(|&p| eval4(f, p).norm())
        .fold(0.0, f64::max);
    if report.max_f_on_nodal > 1e-9 * scale {
        report.first_failing_stage = Some("nodal-residual".into());
        return Ok(report);
    }
    let margin = transversality_check(f, &nodal);
    report.transversality_margin = margin.margin();
    if report.transversality_margin <= 1e-8 * scale {
        report.first_failing_stage = Some("transversality".into());
        return Ok(report);
    }

    if let Some(fb) = fb {
        let scan = phase_critical_scan(fb, cfg.samples)?;
        report.phase_critical = Some(scan.count);
        report.phase_critical_complete = Some(scan.complete);
    }

    report.passed = true;
    Ok(report)
}

/// Halve lambda from 1 until every gate passes; the returned report carries
/// the accepted value. A failing search returns the last report with
/// `passed = false`.
pub fn find_lambda(
    f_any: &SemiholoPoly,
    cfg: &Config,
    word: Option<&BraidWord>,
    fb: Option<&FourierBraid>,
) -> Result<VerificationReport> {
    let f1 = f_any.rescale(1.0)?;
    let mut lambda = cfg.lambda.unwrap_or(1.0);
    loop {
        let f = f1.rescale(lambda)?;
        let mut report = match verify_at_lambda(&f, cfg, word, fb) {
            Ok(r) => r,
            // instability at an overly large amplitude is a probe failure
            Err(Error::RootSolverFailure) | Err(Error::IncreaseSamples) => {
                let mut r = VerificationReport::fresh(lambda);
                r.first_failing_stage = Some("numerical-instability".into());
                r
            }
            Err(e) => return Err(e),
        };
        if report.passed {
            if let Ok(bound) = conservative_lambda(&f1) {
                report.conservative_lambda = Some(bound);
            }
            return Ok(report);
        }
        lambda *= 0.5;
        if cfg.lambda.is_some() || lambda < LAMBDA_FLOOR {
            // fixed amplitude, or searched past the floor: report the failure
            return Ok(report);
        }
    }
}

/// find_lambda that errors when no amplitude passes.
pub fn verified_polynomial(
    f_any: &SemiholoPoly,
    cfg: &Config,
    word: Option<&BraidWord>,
    fb: Option<&FourierBraid>,
) -> Result<(SemiholoPoly, VerificationReport)> {
    let report = find_lambda(f_any, cfg, word, fb)?;
    if !report.passed {
        return Err(Error::VerificationFailure(
            report
                .first_failing_stage
                .clone()
                .unwrap_or_else(|| "lambda-search".into()),
        ));
    }
    let f = f_any.rescale(1.0)?.rescale(report.lambda)?;
    Ok((f, report))
}

/// Conservative amplitude bound assembled from grid estimates of the root
/// separation, the radial root derivatives, and the coefficient bound.
#[derive(Debug, Clone, Copy)]
pub struct ConservativeBound {
    pub delta: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub coefficient_bound: f64,
}

impl ConservativeBound {
    pub fn value(&self) -> f64 {
        self.epsilon1.min(self.epsilon2)
    }
}

/// Grid realization of the sufficient amplitude bound: min of
/// sqrt((1-delta)/(U (D1 + D2))) and delta / U, at lambda = 1. Single-strand
/// polynomials have no strand pairs and report an infinite bound.
pub fn conservative_lambda_bound(f_any: &SemiholoPoly) -> Result<ConservativeBound> {
    let f1 = f_any.rescale(1.0)?;
    let s = f1.degree_u();
    if s <= 1 {
        return Ok(ConservativeBound {
            delta: 1.0,
            epsilon1: f64::INFINITY,
            epsilon2: f64::INFINITY,
            coefficient_bound: 1.0,
        });
    }
    let nt = 256;
    let nr = 33;
    // half the minimal root separation on the unit circle
    let mut tilde_delta = f64::MAX;
    for i in 0..nt {
        let t = 2.0 * PI * i as f64 / nt as f64;
        let roots = roots_at(&f1, Complex64::from_polar(1.0, t))?;
        for a in 0..roots.len() {
            for b in a + 1..roots.len() {
                tilde_delta = tilde_delta.min(0.5 * (roots[a] - roots[b]).norm());
            }
        }
    }
    if tilde_delta <= 0.0 || !tilde_delta.is_finite() {
        return Err(Error::DeltaSearchFailure(
            "strands collide on the unit circle".into(),
        ));
    }

    let derivative_bounds = |delta: f64| -> Result<(f64, f64, f64, bool)> {
        let mut d1 = 0.0f64;
        let mut d2 = 0.0f64;
        let mut coeff = 1.0f64;
        for ir in 0..nr {
            let r = 1.0 - delta + delta * ir as f64 / (nr - 1) as f64;
            for it in 0..nt {
                let t = 2.0 * PI * it as f64 / nt as f64;
                let v = Complex64::from_polar(r, t);
                let coeffs = f1.u_coefficients(v);
                let tail: f64 = coeffs[..s].iter().map(|c| c.norm()).sum();
                coeff = coeff.max(tail);
                let roots = all_roots(&coeffs)?;
                for a in 0..roots.len() {
                    for b in a + 1..roots.len() {
                        if (roots[a] - roots[b]).norm() < 1e-9 {
                            return Ok((0.0, 0.0, 0.0, false));
                        }
                    }
                }
                for &u in &roots {
                    // implicit function theorem: du/dr = -(df/dr)/(df/du)
                    let mut dfdr = Complex64::new(0.0, 0.0);
                    for (&(ku, kv, kw), &c) in f1.terms().iter() {
                        let p = (kv + kw) as f64;
                        if p > 0.0 {
                            dfdr += c
                                * u.powu(ku)
                                * p
                                * r.powi((kv + kw) as i32 - 1)
                                * Complex64::from_polar(1.0, (kv as f64 - kw as f64) * t);
                        }
                    }
                    let dfdu = df_du(&f1, u, v);
                    if dfdu.norm() < 1e-12 {
                        return Ok((0.0, 0.0, 0.0, false));
                    }
                    let du = -dfdr / dfdu;
                    d1 = d1.max(du.re.abs());
                    d2 = d2.max(du.im.abs());
                }
            }
        }
        Ok((d1, d2, coeff, true))
    };

    let mut delta = 0.5f64.min(tilde_delta);
    let mut result = None;
    for _ in 0..20 {
        match derivative_bounds(delta)? {
            (d1, d2, coeff, true) => {
                let allowed = tilde_delta / (d1 * d1 + d2 * d2).sqrt().max(1e-300);
                if delta < allowed {
                    result = Some((d1, d2, coeff));
                    break;
                }
                delta = (0.99 * allowed).min(delta * 0.5);
            }
            _ => {
                delta *= 0.5;
            }
        }
        if delta < 1e-8 {
            return Err(Error::DeltaSearchFailure(
                "no collision-free band below the unit circle".into(),
            ));
        }
    }
    let (d1, d2, coeff) = result.ok_or_else(|| {
        Error::DeltaSearchFailure("delta iteration did not settle".into())
    })?;
    let u_bound = coeff.max(1.0);
    let epsilon1 = ((1.0 - delta) / (u_bound * (d1 + d2))).sqrt();
    let epsilon2 = delta / u_bound;
    Ok(ConservativeBound {
        delta,
        epsilon1,
        epsilon2,
        coefficient_bound: u_bound,
    })
}

/// Convenience wrapper returning min(epsilon1, epsilon2).
pub fn conservative_lambda(f_any: &SemiholoPoly) -> Result<f64> {
    Ok(conservative_lambda_bound(f_any)?.value())
}

/// Result of the phase-critical scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseScan {
    pub count: usize,
    /// False when some parameters had to be skipped; the count is then only
    /// a lower bound.
    pub complete: bool,
}

/// Count the points with both df/du = 0 and d/dt arg(g) = 0 along the
/// critical curves of the product parametrisation.
pub fn phase_critical_scan(fb: &FourierBraid, grid: usize) -> Result<PhaseScan> {
    let s = fb.strands();
    if s <= 1 {
        return Ok(PhaseScan {
            count: 0,
            complete: true,
        });
    }
    let n = grid.max(128);
    let mut complete = true;

    // critical points of u -> prod (u - root_j) at parameter t
    let critical_at = |t: f64| -> Result<Vec<Complex64>> {
        let roots = fb.strand_values(t);
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        let derivative: Vec<Complex64> = (1..coeffs.len())
            .map(|k| coeffs[k] * k as f64)
            .collect();
        all_roots(&derivative)
    };
    // phase velocity of g along a point: Im(dg/dt / g) = -sum Im(root' / (u - root))
    let phase_velocity = |u: Complex64, t: f64| -> f64 {
        let roots = fb.strand_values(t);
        let vels = fb.strand_derivatives(t);
        let mut acc = 0.0;
        for (r, dr) in roots.iter().zip(vels.iter()) {
            let diff = u - r;
            if diff.norm() < 1e-14 {
                return f64::NAN;
            }
            acc -= (dr / diff).im;
        }
        acc
    };

    let base_ts: Vec<f64> = (0..=n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let base_rows: Vec<Result<Vec<Complex64>>> =
        base_ts.par_iter().map(|&t| critical_at(t)).collect();
    let mut rows = Vec::with_capacity(base_rows.len());
    for r in base_rows {
        match r {
            Ok(v) => rows.push(Some(v)),
            Err(Error::RootSolverFailure) => {
                rows.push(None);
                complete = false;
            }
            Err(e) => return Err(e),
        }
    }
    // chain the critical curves with plain nearest-neighbor matching
    let mut chained: Vec<(f64, Vec<Complex64>)> = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        if let Some(v) = row {
            match chained.last() {
                None => chained.push((base_ts[i], v)),
                Some((_, prev)) => {
                    let matched = match_free(prev, &v);
                    chained.push((base_ts[i], matched));
                }
            }
        }
    }
    if chained.len() < 2 {
        return Ok(PhaseScan { count: 0, complete });
    }
    let slots = chained[0].1.len();
    let mut zeros: Vec<(Complex64, f64)> = Vec::new();
    let push_zero = |u: Complex64, t: f64, zeros: &mut Vec<(Complex64, f64)>| {
        for (zu, zt) in zeros.iter() {
            let dt = (t - zt).rem_euclid(2.0 * PI);
            let circ = dt.min(2.0 * PI - dt);
            if (u - zu).norm() < 1e-6 && circ < 1e-6 {
                return;
            }
        }
        zeros.push((u, t));
    };
    for slot in 0..slots {
        let phis: Vec<f64> = chained
            .iter()
            .map(|(t, row)| phase_velocity(row[slot], *t))
            .collect();
        let max_phi = phis
            .iter()
            .filter(|p| !p.is_nan())
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        if max_phi < 1e-10 {
            // the whole critical curve is phase-stationary (split links);
            // there are no isolated phase-critical points to count on it
            complete = false;
            continue;
        }
        for w in 0..chained.len() - 1 {
            let (pa, pb) = (phis[w], phis[w + 1]);
            if pa.is_nan() || pb.is_nan() {
                complete = false;
                continue;
            }
            if pa == 0.0 {
                push_zero(chained[w].1[slot], chained[w].0, &mut zeros);
                continue;
            }
            if pa * pb < 0.0 {
                // bisect the sign change along this critical curve
                let mut ta = chained[w].0;
                let mut tb = chained[w + 1].0;
                let mut ua = chained[w].1[slot];
                let mut fa = pa;
                for _ in 0..60 {
                    let tm = 0.5 * (ta + tb);
                    let row = critical_at(tm)?;
                    let um = *row
                        .iter()
                        .min_by(|x, y| {
                            (*x - ua).norm().partial_cmp(&(*y - ua).norm()).unwrap()
                        })
                        .unwrap();
                    let fm = phase_velocity(um, tm);
                    if fm.is_nan() {
                        break;
                    }
                    if fa * fm <= 0.0 {
                        tb = tm;
                    } else {
                        ta = tm;
                        ua = um;
                        fa = fm;
                    }
                    if tb - ta < 1e-12 {
                        break;
                    }
                }
                push_zero(ua, 0.5 * (ta + tb), &mut zeros);
            }
        }
    }
    Ok(PhaseScan {
        count: zeros.len(),
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiholo::assemble;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_at_closed_forms() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let mut roots = roots_at(&f, c(1.0, 0.0)).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);

        // u - c at any v
        let mut terms = BTreeMap::new();
        terms.insert((1, 0, 0), c(1.0, 0.0));
        terms.insert((0, 0, 0), c(-0.3, 0.7));
        let g = SemiholoPoly::from_terms(1, 1.0, terms);
        let r = roots_at(&g, c(0.2, 0.9)).unwrap();
        assert!((r[0] - c(0.3, -0.7)).norm() < 1e-12);
    }

    #[test]
    fn roots_match_parametrisation() {
        // root multiset of f(., e^{it}) equals the strand values
        let fb = FourierBraid::torus(3);
        let f = assemble(&fb, 1e-9).unwrap();
        for &t in &[0.1, 1.0, 2.5, 4.4, 6.0] {
            let mut roots = roots_at(&f, Complex64::from_polar(1.0, t)).unwrap();
            let mut values = fb.strand_values(t);
            roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
            values.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
            for (r, v) in roots.iter().zip(values.iter()) {
                assert!((r - v).norm() < 1e-9, "t = {t}");
            }
        }
    }

    #[test]
    fn rescale_scales_roots() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let g = f.rescale(0.25).unwrap();
        let v = c(0.3, 0.4);
        let mut rf = roots_at(&f, v).unwrap();
        let mut rg = roots_at(&g, v).unwrap();
        rf.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        rg.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (a, b) in rf.iter().zip(rg.iter()) {
            assert!((b - a * 0.25).norm() < 1e-9);
        }
    }

    #[test]
    fn torus_reconstruction() {
        // u^2 - lambda^2 v: transposition, exponent sum +1
        let f = assemble(&FourierBraid::torus(2), 1e-9)
            .unwrap()
            .rescale(0.5)
            .unwrap();
        let data = reconstruct_braid(&f, 256, Surface::Circle).unwrap();
        assert_eq!(data.permutation, vec![1, 0]);
        assert_eq!(data.exponent_sum, 1);
        assert_eq!(data.pair_counts[&(0, 1)], 1);
    }

    #[test]
    fn hopf_reconstruction() {
        // u^2 - lambda^2 v^2: identity permutation, pair count +2
        let f = assemble(&FourierBraid::torus(2), 1e-9)
            .unwrap()
            .repeated(2)
            .rescale(0.5)
            .unwrap();
        let data = reconstruct_braid(&f, 256, Surface::Circle).unwrap();
        assert_eq!(data.permutation, vec![0, 1]);
        assert_eq!(data.exponent_sum, 2);
        assert_eq!(data.pair_counts[&(0, 1)], 2);
    }

    #[test]
    fn find_lambda_torus() {
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let cfg = Config {
            samples: 64,
            ..Config::default()
        };
        let report = find_lambda(&f, &cfg, None, None).unwrap();
        assert!(report.passed, "{:?}", report.first_failing_stage);
        assert!(report.lambda > 1e-8);
        assert!(report.transversality_margin > 1e-8);
        assert!(report.max_f_on_nodal < 1e-9 * f.scale().max(1.0));
    }

    #[test]
    fn trivial_polynomial_verifies() {
        // f = u: nodal set is the unit circle (0, e^{it})
        let mut terms = BTreeMap::new();
        terms.insert((1, 0, 0), c(1.0, 0.0));
        let f = SemiholoPoly::from_terms(1, 1.0, terms);
        let cfg = Config {
            samples: 64,
            ..Config::default()
        };
        let report = find_lambda(&f, &cfg, None, None).unwrap();
        assert!(report.passed);
        let points = sample_nodal_set(&f, 32).unwrap();
        assert_eq!(points.len(), 32);
        for p in points {
            assert!(p[0].abs() < 1e-9 && p[1].abs() < 1e-9);
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let margin = transversality_check(&f, &sample_nodal_set(&f, 16).unwrap());
        assert!((margin.min_du - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_double_root_fails_transversality() {
        // f = u^2 has margin zero
        let mut terms = BTreeMap::new();
        terms.insert((2, 0, 0), c(1.0, 0.0));
        let f = SemiholoPoly::from_terms(2, 1.0, terms);
        let cfg = Config {
            samples: 64,
            ..Config::default()
        };
        let report = find_lambda(&f, &cfg, None, None).unwrap();
        assert!(!report.passed);
        assert_eq!(report.first_failing_stage.as_deref(), Some("transversality"));
    }

    #[test]
    fn nodal_samples_lie_on_sphere_and_zero_set() {
        let f = assemble(&FourierBraid::torus(2), 1e-9)
            .unwrap()
            .rescale(0.5)
            .unwrap();
        let points = sample_nodal_set(&f, 64).unwrap();
        assert_eq!(points.len(), 128);
        let scale = f.scale().max(1.0);
        for p in points {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(eval4(&f, p).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn conservative_bound_torus_closed_form() {
        // u^2 - v: roots +/- sqrt(v); delta figures resolve in closed form
        let f = assemble(&FourierBraid::torus(2), 1e-9).unwrap();
        let bound = conservative_lambda_bound(&f).unwrap();
        // tilde delta = 1, |du/dr| = 1/(2 sqrt(r)); grid values within 5%
        assert!(bound.delta > 0.3, "delta = {}", bound.delta);
        assert!((bound.coefficient_bound - 1.0).abs() < 0.05);
        let d_expected = 1.0 / (2.0 * (1.0 - bound.delta).sqrt());
        let eps1_expected =
            ((1.0 - bound.delta) / (1.0 * 2.0 * d_expected)).sqrt();
        assert!(
            (bound.epsilon1 - eps1_expected).abs() < 0.05 * eps1_expected,
            "eps1 {} vs {}",
            bound.epsilon1,
            eps1_expected
        );
        assert!((bound.epsilon2 - bound.delta).abs() < 0.05 * bound.delta);
    }

    #[test]
    fn conservative_bound_single_strand_sentinel() {
        let mut terms = BTreeMap::new();
        terms.insert((1, 0, 0), c(1.0, 0.0));
        let f = SemiholoPoly::from_terms(1, 1.0, terms);
        assert_eq!(conservative_lambda(&f).unwrap(), f64::INFINITY);
    }

    #[test]
    fn phase_scan_torus_zero() {
        // arg(u^2 - lambda^2 e^{it}) has velocity 1 at the critical point
        let fb = FourierBraid::torus(2);
        let scan = phase_critical_scan(&fb, 256).unwrap();
        assert_eq!(scan.count, 0);
        assert!(scan.complete);
    }

    #[test]
    fn phase_scan_single_strand_zero() {
        let fb = FourierBraid::new(vec![crate::semiholo::FourierComponent {
            x: crate::interp::TrigPoly::cosine(),
            y: crate::interp::TrigPoly::sine(),
            strands: 1,
        }]);
        assert_eq!(phase_critical_scan(&fb, 128).unwrap().count, 0);
    }
}
