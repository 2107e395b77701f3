//! Piecewise-linear braid diagram data: strand positions per interval and the
//! equally spaced nodes feeding the component interpolations.

use crate::braid::{BraidWord, Components};
use crate::error::Result;
use std::f64::consts::PI;

/// Interpolation nodes for every component plus the crossing abscissas.
#[derive(Debug, Clone)]
pub struct DiagramData {
    /// Crossing abscissas t_k = 2 pi (2k-1) / (2 l), one per letter.
    pub crossing_abscissas: Vec<f64>,
    /// Per component: the s_C * l nodes (t, x), t = 2 pi (k-1) / (s_C l).
    pub components: Vec<Vec<(f64, f64)>>,
}

/// Diagram x-value of a 0-based position: strands sit equidistant and
/// symmetric about x = 0, position 0 on top at the largest x.
pub fn position_value(strands: usize, position: usize) -> f64 {
    (strands as f64 + 1.0) / 2.0 - (position as f64 + 1.0)
}

/// Per-interval strand x-values: `table[k][strand]` for interval k+1. A
/// trivial word yields a single constant interval.
pub fn strand_positions(braid: &BraidWord) -> Result<Vec<Vec<f64>>> {
    let chart = braid.position_chart();
    let s = braid.strands();
    let table = (1..=braid.len().max(1))
        .map(|k| {
            let k = k.min(chart.intervals().max(1));
            (0..s)
                .map(|strand| position_value(s, chart.position_of(k, strand)))
                .collect()
        })
        .collect();
    Ok(table)
}

/// Interpolation nodes for one component: walks the cycle's strands in order,
/// sampling each strand's position once per interval.
pub fn f_data_points(braid: &BraidWord, comps: &Components, cycle: usize) -> Vec<(f64, f64)> {
    let strands_in_cycle = &comps.cycles[cycle].strands;
    let s_c = strands_in_cycle.len();
    if braid.is_trivial() {
        // Single constant node per (single-strand) component.
        let strand = strands_in_cycle[0];
        return vec![(0.0, position_value(braid.strands(), strand))];
    }
    let chart = braid.position_chart();
    let l = braid.len();
    let count = s_c * l;
    (0..count)
        .map(|k| {
            let j = k / l;
            let interval = k % l + 1;
            let strand = strands_in_cycle[j];
            let t = 2.0 * PI * k as f64 / count as f64;
            let x = position_value(braid.strands(), chart.position_of(interval, strand));
            (t, x)
        })
        .collect()
}

/// All component node lists plus the crossing abscissas.
pub fn diagram_data(braid: &BraidWord, comps: &Components) -> DiagramData {
    let l = braid.len();
    let crossing_abscissas = (1..=l)
        .map(|k| 2.0 * PI * (2 * k - 1) as f64 / (2 * l) as f64)
        .collect();
    let components = (0..comps.count())
        .map(|c| f_data_points(braid, comps, c))
        .collect();
    DiagramData {
        crossing_abscissas,
        components,
    }
}
