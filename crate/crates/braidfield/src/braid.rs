//! Braid words: parsing, permutation and cycle structure, position tracking
//! along the diagram, and the homogeneity defect beta.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// One Artin generator occurrence: `sigma_index^sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    /// Generator index, 1-based, in `1..=strands-1`.
    pub index: usize,
    /// +1 or -1.
    pub sign: i8,
}

impl Letter {
    pub fn new(index: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { index, sign }
    }
}

/// A braid word on `strands` strands. The empty word is only constructible
/// through [`BraidWord::trivial`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidInput("strand count must be positive".into()));
        }
        if letters.is_empty() {
            return Err(Error::TrivialNeedsStrands);
        }
        for l in &letters {
            if l.index == 0 || l.index > strands.saturating_sub(1) {
                return Err(Error::IndexOutOfRange {
                    index: l.index,
                    strands,
                });
            }
            if l.sign != 1 && l.sign != -1 {
                return Err(Error::InvalidInput(format!("letter sign {}", l.sign)));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// The identity braid on `strands` strands (empty word, explicitly requested).
    pub fn trivial(strands: usize) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidInput("strand count must be positive".into()));
        }
        Ok(BraidWord {
            strands,
            letters: Vec::new(),
        })
    }

    /// Parse whitespace-separated signed integers ("2 -1 2 1 1 1"), or the
    /// compact letter form where `a` is sigma_1, `A` its inverse, and so on.
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return match strands {
                Some(s) => Self::trivial(s),
                None => Err(Error::TrivialNeedsStrands),
            };
        }
        let letters = if trimmed.chars().any(|c| c.is_ascii_alphabetic()) {
            Self::parse_compact(trimmed)?
        } else {
            Self::parse_numeric(trimmed)?
        };
        let max_index = letters.iter().map(|l| l.index).max().unwrap_or(0);
        let s = match strands {
            Some(s) => {
                if max_index + 1 > s {
                    return Err(Error::IndexOutOfRange {
                        index: max_index,
                        strands: s,
                    });
                }
                s
            }
            None => max_index + 1,
        };
        Self::new(s, letters)
    }

    fn parse_numeric(text: &str) -> Result<Vec<Letter>> {
        text.split_whitespace()
            .map(|tok| {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::MalformedWord(tok.to_string()))?;
                if v == 0 {
                    return Err(Error::MalformedWord(tok.to_string()));
                }
                Ok(Letter::new(v.unsigned_abs() as usize, v.signum() as i8))
            })
            .collect()
    }

    fn parse_compact(text: &str) -> Result<Vec<Letter>> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'a'..='z' => Ok(Letter::new(c as usize - 'a' as usize + 1, 1)),
                'A'..='Z' => Ok(Letter::new(c as usize - 'A' as usize + 1, -1)),
                other => Err(Error::MalformedWord(other.to_string())),
            })
            .collect()
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length (number of letters).
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    /// Sum of letter signs.
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.sign as i64).sum()
    }

    /// Permutation and link-component cycles induced by the word.
    pub fn components(&self) -> Components {
        let chart = self.position_chart();
        let exit = chart.exit_chart().to_vec();
        let mut end_pos = vec![0usize; self.strands];
        for (p, &st) in exit.iter().enumerate() {
            end_pos[st] = p;
        }
        let mut seen = vec![false; self.strands];
        let mut cycles = Vec::new();
        for start in 0..self.strands {
            if seen[start] {
                continue;
            }
            let mut walk = vec![start];
            seen[start] = true;
            let mut next = end_pos[start];
            while next != start {
                walk.push(next);
                seen[next] = true;
                next = end_pos[next];
            }
            cycles.push(Cycle {
                label: cycles.len(),
                strands: walk,
            });
        }
        Components {
            permutation: exit,
            cycles,
        }
    }

    /// Per-interval position charts and the (over, under) strand pair of
    /// every letter. A positive sigma_i takes the strand in position i over
    /// the strand in position i+1, counting positions from the top.
    pub fn position_chart(&self) -> PositionChart {
        let mut charts = Vec::with_capacity(self.len() + 1);
        let mut current: Vec<usize> = (0..self.strands).collect();
        let mut over_under = Vec::with_capacity(self.len());
        charts.push(current.clone());
        for l in &self.letters {
            let (a, b) = (current[l.index - 1], current[l.index]);
            over_under.push(if l.sign > 0 { (a, b) } else { (b, a) });
            current.swap(l.index - 1, l.index);
            charts.push(current.clone());
        }
        PositionChart { charts, over_under }
    }

    /// Homogeneity defect: cyclic sign alternations per generator index plus
    /// the number of generator indices that never occur.
    pub fn beta(&self) -> usize {
        let l = self.len();
        let mut alternations = 0;
        for j in 0..l {
            let Letter { index, sign } = self.letters[j];
            for k in 1..=l {
                let other = self.letters[(j + k) % l];
                if other.index == index {
                    if sign as i16 * other.sign as i16 == -1 {
                        alternations += 1;
                    }
                    break;
                }
            }
        }
        let mut missing = 0;
        for i in 1..self.strands {
            if !self.letters.iter().any(|l| l.index == i) {
                missing += 1;
            }
        }
        alternations + missing
    }

    pub fn is_strictly_homogeneous(&self) -> bool {
        self.beta() == 0
    }

    /// Signed crossing count per unordered strand pair, read off the word.
    pub fn pair_crossing_counts(&self) -> BTreeMap<(usize, usize), i64> {
        let chart = self.position_chart();
        let mut map = BTreeMap::new();
        for (k, l) in self.letters.iter().enumerate() {
            let c = chart.interval_chart(k + 1);
            let (a, b) = (c[l.index - 1], c[l.index]);
            let key = (a.min(b), a.max(b));
            *map.entry(key).or_insert(0) += l.sign as i64;
        }
        map
    }

    /// Unsigned crossing counts split by component membership:
    /// `within[c]` counts crossings internal to cycle `c`, `between[(c,d)]`
    /// those joining distinct cycles.
    pub fn component_crossing_counts(
        &self,
        comps: &Components,
    ) -> (Vec<usize>, BTreeMap<(usize, usize), usize>) {
        let chart = self.position_chart();
        let mut within = vec![0usize; comps.count()];
        let mut between = BTreeMap::new();
        for (k, l) in self.letters.iter().enumerate() {
            let c = chart.interval_chart(k + 1);
            let (ca, _) = comps.strand_label(c[l.index - 1]);
            let (cb, _) = comps.strand_label(c[l.index]);
            if ca == cb {
                within[ca] += 1;
            } else {
                *between.entry((ca.min(cb), ca.max(cb))).or_insert(0) += 1;
            }
        }
        (within, between)
    }

    pub fn to_json(&self) -> String {
        let word: Vec<String> = self
            .letters
            .iter()
            .map(|l| (l.index as i64 * l.sign as i64).to_string())
            .collect();
        format!(
            "{{\"strands\":{},\"word\":[{}]}}",
            self.strands,
            word.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("braid json: {e}")))?;
        let strands = v["strands"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("braid json missing `strands`".into()))?
            as usize;
        let word = v["word"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("braid json missing `word`".into()))?;
        let mut letters = Vec::with_capacity(word.len());
        for item in word {
            let n = item
                .as_i64()
                .ok_or_else(|| Error::MalformedWord(item.to_string()))?;
            if n == 0 {
                return Err(Error::MalformedWord("0".into()));
            }
            letters.push(Letter::new(n.unsigned_abs() as usize, n.signum() as i8));
        }
        if letters.is_empty() {
            Self::trivial(strands)
        } else {
            Self::new(strands, letters)
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "(trivial on {} strands)", self.strands);
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| (l.index as i64 * l.sign as i64).to_string())
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// One permutation cycle, i.e. one link component of the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub label: usize,
    /// Strand indices in walk order: entry j is the strand carrying the
    /// component's parameter offset j.
    pub strands: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.strands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands.is_empty()
    }
}

/// Cycle decomposition of the word's permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// `permutation[p]` is the strand occupying position p after the last letter.
    pub permutation: Vec<usize>,
    pub cycles: Vec<Cycle>,
}

impl Components {
    /// Number of link components.
    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    /// Total strand count.
    pub fn strands(&self) -> usize {
        self.permutation.len()
    }

    /// The (cycle label, offset) pair of a strand.
    pub fn strand_label(&self, strand: usize) -> (usize, usize) {
        for cycle in &self.cycles {
            if let Some(j) = cycle.strands.iter().position(|&s| s == strand) {
                return (cycle.label, j);
            }
        }
        unreachable!("cycles partition the strands")
    }

    /// Size of the largest component.
    pub fn max_cycle_len(&self) -> usize {
        self.cycles.iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

/// Position bijections between crossings plus the over/under pair per letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionChart {
    charts: Vec<Vec<usize>>,
    over_under: Vec<(usize, usize)>,
}

impl PositionChart {
    /// Chart valid throughout interval k (1-based, `k <= len+1`); entry p is
    /// the strand in position p (0-based, top first).
    pub fn interval_chart(&self, k: usize) -> &[usize] {
        &self.charts[k - 1]
    }

    /// Chart after the final letter.
    pub fn exit_chart(&self) -> &[usize] {
        self.charts.last().unwrap()
    }

    /// (over, under) strands of letter k (1-based).
    pub fn over_under(&self, k: usize) -> (usize, usize) {
        self.over_under[k - 1]
    }

    /// Position of `strand` within interval k.
    pub fn position_of(&self, k: usize, strand: usize) -> usize {
        self.charts[k - 1]
            .iter()
            .position(|&s| s == strand)
            .expect("chart contains every strand")
    }

    pub fn intervals(&self) -> usize {
        self.charts.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str) -> BraidWord {
        BraidWord::parse(text, None).unwrap()
    }

    #[test]
    fn parses_the_five_two_word() {
        let b = word("2 -1 2 1 1 1");
        assert_eq!(b.strands(), 3);
        assert_eq!(b.len(), 6);
        assert_eq!(b.letters()[0], Letter::new(2, 1));
        assert_eq!(b.letters()[1], Letter::new(1, -1));
        assert_eq!(b.exponent_sum(), 4);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            BraidWord::parse("1 0 2", None),
            Err(Error::MalformedWord(_))
        ));
        assert!(matches!(
            BraidWord::parse("3 -1", Some(3)),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            BraidWord::parse("", None),
            Err(Error::TrivialNeedsStrands)
        ));
        let t = BraidWord::parse("", Some(1)).unwrap();
        assert!(t.is_trivial());
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn compact_letter_form() {
        let b = BraidWord::parse("bAbaaa", None).unwrap();
        assert_eq!(b, word("2 -1 2 1 1 1"));
    }

    #[test]
    fn five_two_components_single_cycle() {
        // Hand-composing the six transpositions gives the 3-cycle 0 -> 1 -> 2 -> 0.
        let comps = word("2 -1 2 1 1 1").components();
        assert_eq!(comps.permutation, vec![1, 2, 0]);
        assert_eq!(comps.count(), 1);
        assert_eq!(comps.cycles[0].strands, vec![0, 2, 1]);
    }

    #[test]
    fn even_power_gives_two_cycles() {
        let comps = word("1 1").components();
        assert_eq!(comps.count(), 2);
        assert_eq!(comps.permutation, vec![0, 1]);
    }

    #[test]
    fn trivial_word_identity_components() {
        let comps = BraidWord::trivial(2).unwrap().components();
        assert_eq!(comps.count(), 2);
        assert_eq!(comps.cycles[0].strands, vec![0]);
        assert_eq!(comps.cycles[1].strands, vec![1]);
    }

    #[test]
    fn over_under_follows_sign() {
        let chart = word("1").position_chart();
        assert_eq!(chart.over_under(1), (0, 1));
        let chart = BraidWord::parse("-1", None).unwrap().position_chart();
        assert_eq!(chart.over_under(1), (1, 0));
    }

    #[test]
    fn trivial_chart_is_constant() {
        let chart = BraidWord::trivial(3).unwrap().position_chart();
        assert_eq!(chart.intervals(), 0);
        assert_eq!(chart.exit_chart(), &[0, 1, 2]);
    }

    #[test]
    fn beta_values() {
        // Direct enumeration of cyclic sign changes per generator index.
        assert_eq!(word("1 -2 1 -2").beta(), 0);
        assert_eq!(word("2 -1 2 1 1 1").beta(), 2);
        assert_eq!(BraidWord::trivial(2).unwrap().beta(), 1);
        assert_eq!(word("1 -1").beta(), 2);
        assert_eq!(word("1 1 1").beta(), 0);
        assert!(word("1 -2 1 -2").is_strictly_homogeneous());
        assert!(!word("1 -1").is_strictly_homogeneous());
        assert!(word("1 1 1").is_strictly_homogeneous());
    }

    #[test]
    fn beta_cyclic_rotation_invariant() {
        let words = ["2 -1 2 1 1 1", "1 -2 1 -2 3", "1 1 -2 2 -1 3 -3"];
        for w in words {
            let b = word(w);
            let base = b.beta();
            for r in 1..b.len() {
                let mut rotated = b.letters().to_vec();
                rotated.rotate_left(r);
                let rb = BraidWord::new(b.strands(), rotated).unwrap();
                assert_eq!(rb.beta(), base, "rotation {r} of {w}");
            }
        }
    }

    #[test]
    fn exit_chart_is_permutation_composition() {
        // Composing per-letter transpositions in order reproduces pi_B.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = rng.gen_range(2..=6);
            let l = rng.gen_range(1..=12);
            let letters: Vec<Letter> = (0..l)
                .map(|_| {
                    Letter::new(
                        rng.gen_range(1..s),
                        if rng.gen_bool(0.5) { 1 } else { -1 },
                    )
                })
                .collect();
            let b = BraidWord::new(s, letters.clone()).unwrap();
            let mut perm: Vec<usize> = (0..s).collect();
            for l in &letters {
                perm.swap(l.index - 1, l.index);
            }
            assert_eq!(b.components().permutation, perm);
            // cycles partition the strand set
            let comps = b.components();
            let mut all: Vec<usize> = comps
                .cycles
                .iter()
                .flat_map(|c| c.strands.clone())
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..s).collect::<Vec<_>>());
            assert_eq!(
                comps.cycles.iter().map(|c| c.len()).sum::<usize>(),
                s
            );
        }
    }

    #[test]
    fn pair_counts_for_five_two() {
        let map = word("2 -1 2 1 1 1").pair_crossing_counts();
        assert_eq!(map[&(1, 2)], 4);
        assert_eq!(map[&(0, 2)], -1);
        assert_eq!(map[&(0, 1)], 1);
    }

    #[test]
    fn json_round_trip() {
        let b = word("2 -1 2 1 1 1");
        assert_eq!(b.to_json(), "{\"strands\":3,\"word\":[2,-1,2,1,1,1]}");
        assert_eq!(BraidWord::from_json(&b.to_json()).unwrap(), b);
        let t = BraidWord::trivial(2).unwrap();
        assert_eq!(BraidWord::from_json(&t.to_json()).unwrap(), t);
    }
}
