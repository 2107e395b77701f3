//! Crossing detection on the interpolated diagram, over/under sign
//! assignment per braid letter, and the data points driving the second
//! interpolation.

use crate::braid::{BraidWord, Components, PositionChart};
use crate::error::{Error, Result};
use crate::interp::TrigPoly;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

const BOUNDARY_TOL: f64 = 1e-9;
const TOUCH_TOL: f64 = 1e-9;

/// Identifies one strand curve of the interpolated diagram: component label
/// plus parameter offset j, the curve t -> F_C((t + 2 pi j) / s_C).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CurveId {
    pub component: usize,
    pub offset: usize,
}

/// One crossing of the diagram B'.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Crossing parameter in [0, 2 pi).
    pub t0: f64,
    pub a: CurveId,
    pub b: CurveId,
    /// False for tangential touches, which count with multiplicity two.
    pub transverse: bool,
    /// 1-based letter interval containing t0.
    pub interval: usize,
}

fn curve_value(f: &TrigPoly, s_c: usize, offset: usize, t: f64) -> f64 {
    f.eval_real((t + 2.0 * PI * offset as f64) / s_c as f64)
}

/// All crossings between distinct strand curves, located by sign-change
/// bracketing on a dense grid refined by bisection, plus tangential touches
/// from near-zero local minima of the gap.
pub fn find_crossings(
    interps: &[TrigPoly],
    comps: &Components,
    word_len: usize,
    grid: usize,
) -> Result<Vec<Crossing>> {
    let mut result = scan_all(interps, comps, word_len, grid);
    if matches!(result, Err(Error::BoundaryCrossing { .. })) {
        // one retry on a denser grid before giving up
        result = scan_all(interps, comps, word_len, grid * 2);
    }
    result
}

fn scan_all(
    interps: &[TrigPoly],
    comps: &Components,
    word_len: usize,
    grid: usize,
) -> Result<Vec<Crossing>> {
    let curves: Vec<CurveId> = comps
        .cycles
        .iter()
        .flat_map(|c| {
            (0..c.len()).map(move |j| CurveId {
                component: c.label,
                offset: j,
            })
        })
        .collect();
    let samples = grid * comps.strands().max(1);
    let mut pairs = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            pairs.push((curves[i], curves[j]));
        }
    }
    let scanned: Vec<Result<Vec<Crossing>>> = pairs
        .par_iter()
        .map(|&(a, b)| scan_pair(interps, comps, a, b, word_len, samples))
        .collect();
    let mut all = Vec::new();
    for r in scanned {
        all.extend(r?);
    }
    all.sort_by(|x, y| {
        x.t0.partial_cmp(&y.t0)
            .unwrap()
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
    Ok(all)
}

/// Crossings of one curve pair over [0, 2 pi).
fn scan_pair(
    interps: &[TrigPoly],
    comps: &Components,
    a: CurveId,
    b: CurveId,
    word_len: usize,
    samples: usize,
) -> Result<Vec<Crossing>> {
    let sa = comps.cycles[a.component].len();
    let sb = comps.cycles[b.component].len();
    let gap = |t: f64| {
        curve_value(&interps[a.component], sa, a.offset, t)
            - curve_value(&interps[b.component], sb, b.offset, t)
    };
    let n = samples.max(16);
    let ts: Vec<f64> = (0..=n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let ds: Vec<f64> = ts.iter().map(|&t| gap(t)).collect();

    let mut found: Vec<(f64, bool)> = Vec::new();
    for i in 0..n {
        if ds[i] == 0.0 {
            // landed exactly on a crossing; bracket around the sample
            let lo = if i == 0 { 0.0 } else { ts[i - 1] };
            let hi = ts[i + 1];
            found.push((bisect(&gap, lo, hi), true));
            continue;
        }
        if ds[i] * ds[i + 1] < 0.0 {
            found.push((bisect(&gap, ts[i], ts[i + 1]), true));
        }
    }
    // tangential touches: interior local minima of |gap| that reach ~zero
    // without a sign change
    for i in 1..n {
        let m = ds[i].abs();
        if m <= ds[i - 1].abs() && m <= ds[i + 1].abs() && ds[i - 1] * ds[i] > 0.0 && ds[i] * ds[i + 1] > 0.0 {
            let t_min = golden_min(&|t| gap(t).abs(), ts[i - 1], ts[i + 1]);
            if gap(t_min).abs() < TOUCH_TOL {
                found.push((t_min.rem_euclid(2.0 * PI), false));
            }
        }
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    found.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9 || (x.0 - y.0).abs() > 2.0 * PI - 1e-9);

    let width = 2.0 * PI / word_len.max(1) as f64;
    let mut out = Vec::new();
    for (t0, transverse) in found {
        let k = (t0 / width).floor() as usize;
        let dist = (t0 - k as f64 * width).min((k + 1) as f64 * width - t0);
        if dist < BOUNDARY_TOL {
            return Err(Error::BoundaryCrossing { t0, dist });
        }
        out.push(Crossing {
            t0,
            a,
            b,
            transverse,
            interval: k.min(word_len.saturating_sub(1)) + 1,
        });
    }
    Ok(out)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if flo * fm <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Per-interval strand values w_k. The letter's over/under strands carry
/// +1/-1; remaining strands involved in crossings spread outward.
#[derive(Debug, Clone, PartialEq)]
pub struct SignAssignment {
    /// `values[k-1][strand]` for interval k.
    values: Vec<BTreeMap<usize, f64>>,
}

impl SignAssignment {
    pub fn value(&self, interval: usize, strand: usize) -> Option<f64> {
        self.values.get(interval - 1)?.get(&strand).copied()
    }

    pub fn interval(&self, interval: usize) -> &BTreeMap<usize, f64> {
        &self.values[interval - 1]
    }
}

/// Build the bijections w_k from the letter over/under pairs and the set of
/// strands actually involved in crossings per interval.
pub fn assign_signs(
    braid: &BraidWord,
    crossings: &[Crossing],
    chart: &PositionChart,
    comps: &Components,
) -> SignAssignment {
    let l = braid.len();
    let mut involved: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); l];
    for c in crossings {
        let k = c.interval - 1;
        involved[k].insert((c.a.component, c.a.offset));
        involved[k].insert((c.b.component, c.b.offset));
    }
    let mut values = Vec::with_capacity(l);
    for k in 1..=l {
        let (over, under) = chart.over_under(k);
        let mut map = BTreeMap::new();
        map.insert(over, 1.0);
        map.insert(under, -1.0);
        let mut spread = 2;
        let mut positive = true;
        for &(component, offset) in &involved[k - 1] {
            let strand = comps.cycles[component].strands[offset];
            if strand == over || strand == under {
                continue;
            }
            let v = if positive {
                spread as f64
            } else {
                -(spread as f64)
            };
            map.insert(strand, v);
            if !positive {
                spread += 1;
            }
            positive = !positive;
        }
        values.push(map);
    }
    SignAssignment { values }
}

/// Data points for the y-coordinate interpolation, one list per component.
/// Every crossing contributes one point per involved strand at
/// t' = (t0 + 2 pi j) / s_C.
pub fn g_data_points(
    crossings: &[Crossing],
    signs: &SignAssignment,
    comps: &Components,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut per_component: Vec<Vec<(f64, f64)>> = vec![Vec::new(); comps.count()];
    for c in crossings {
        for id in [c.a, c.b] {
            let cycle = &comps.cycles[id.component];
            let strand = cycle.strands[id.offset];
            let y = signs
                .value(c.interval, strand)
                .expect("every involved strand has an assigned value");
            let t = (c.t0 + 2.0 * PI * id.offset as f64) / cycle.len() as f64;
            per_component[id.component].push((t, y));
        }
    }
    for list in per_component.iter_mut() {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(list.len());
        for &(t, y) in list.iter() {
            if let Some(&(tp, yp)) = merged.last() {
                if (t - tp).abs() < 1e-10 {
                    if (y - yp).abs() > 1e-9 {
                        return Err(Error::DegenerateCrossing(t));
                    }
                    continue;
                }
            }
            merged.push((t, y));
        }
        *list = merged;
    }
    Ok(per_component)
}

/// Parity table used to validate sign assignment: crossings (touches twice)
/// per interval and unordered strand pair.
pub fn crossing_parity(
    crossings: &[Crossing],
    comps: &Components,
) -> BTreeMap<(usize, (usize, usize)), usize> {
    let mut map = BTreeMap::new();
    for c in crossings {
        let sa = comps.cycles[c.a.component].strands[c.a.offset];
        let sb = comps.cycles[c.b.component].strands[c.b.offset];
        let key = (c.interval, (sa.min(sb), sa.max(sb)));
        *map.entry(key).or_insert(0) += if c.transverse { 1 } else { 2 };
    }
    map
}
