//! Move generators, one per case of the analysis.
//!
//! A move is a short chain of contractions following one case of the argument.
//! Chains adapt to the concrete outcome of each step (which class a result
//! lands in, whether an s3-contraction gained three or four levels) and end
//! with a bounded look-ahead for a Hensel-ready variable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contraction::ContractionStep;
use crate::field_ring::Family;
use crate::forms::AdditiveForm;

use super::work::{Merge, Work};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tactic {
    Slide,
    FromTwo,
    Empty1,
    Empty4,
    Empty234,
    Max7,
    FiveSame,
    Max6,
    Max5,
    Max4,
    TwoSameTwoDiff,
    TwoSameTwoMore,
    TwoAndTwoAndOne,
    TwoDiffTwoMore,
    ThreeOkay,
    ThreeOh,
    Max3,
    Max3Again,
    Final,
    GenericPair,
}

impl Tactic {
    pub const ALL: [Tactic; 20] = [
        Tactic::Slide,
        Tactic::FromTwo,
        Tactic::Empty1,
        Tactic::Empty4,
        Tactic::Empty234,
        Tactic::Max7,
        Tactic::FiveSame,
        Tactic::Max6,
        Tactic::Max5,
        Tactic::Max4,
        Tactic::TwoSameTwoDiff,
        Tactic::TwoSameTwoMore,
        Tactic::TwoAndTwoAndOne,
        Tactic::TwoDiffTwoMore,
        Tactic::ThreeOkay,
        Tactic::ThreeOh,
        Tactic::Max3,
        Tactic::Max3Again,
        Tactic::Final,
        Tactic::GenericPair,
    ];

    /// Order in which the search tries tactics: terminating cases first,
    /// then the short-chain cases, the structural ones, and the fallbacks.
    pub const SEARCH_ORDER: [Tactic; 20] = [
        Tactic::FromTwo,
        Tactic::Empty1,
        Tactic::Empty4,
        Tactic::Empty234,
        Tactic::TwoSameTwoDiff,
        Tactic::TwoSameTwoMore,
        Tactic::TwoDiffTwoMore,
        Tactic::TwoAndTwoAndOne,
        Tactic::FiveSame,
        Tactic::Max7,
        Tactic::Max6,
        Tactic::Max5,
        Tactic::Max4,
        Tactic::ThreeOkay,
        Tactic::ThreeOh,
        Tactic::Max3,
        Tactic::Max3Again,
        Tactic::Final,
        Tactic::Slide,
        Tactic::GenericPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tactic::Slide => "slide",
            Tactic::FromTwo => "fromtwo",
            Tactic::Empty1 => "empty1",
            Tactic::Empty4 => "empty4",
            Tactic::Empty234 => "empty234",
            Tactic::Max7 => "max7",
            Tactic::FiveSame => "fivesame",
            Tactic::Max6 => "max6",
            Tactic::Max5 => "max5",
            Tactic::Max4 => "max4",
            Tactic::TwoSameTwoDiff => "twoSameTwoDiff",
            Tactic::TwoSameTwoMore => "twoSameTwoMore",
            Tactic::TwoAndTwoAndOne => "twoAndTwoAndOne",
            Tactic::TwoDiffTwoMore => "twoDiffTwoMore",
            Tactic::ThreeOkay => "threeokay",
            Tactic::ThreeOh => "threeoh",
            Tactic::Max3 => "max3",
            Tactic::Max3Again => "max3again",
            Tactic::Final => "final",
            Tactic::GenericPair => "genericPair",
        }
    }

    /// The profile pattern the tactic looks for, with `k` any level.
    pub fn precondition(self) -> &'static str {
        match self {
            Tactic::Slide => "two variables in level k and one in each of levels k+1 .. k+t-1",
            Tactic::FromTwo => "same level and class, one raised >= 2; or same level, one raised >= 4",
            Tactic::Empty1 => "level k splits 3/1 or better, level k+1 occupied",
            Tactic::Empty4 => "J1: three same-class variables in level k, level k+4 occupied",
            Tactic::Empty234 => "two same-class pairs in level k, one of levels k+2, k+3, k+4 occupied",
            Tactic::Max7 => "three disjoint same-class pairs in one level",
            Tactic::FiveSame => "J1: five same-class variables in a level, or 3/3",
            Tactic::Max6 => "at least six variables in level 0",
            Tactic::Max5 => "at least five variables in level 0",
            Tactic::Max4 => "two same-class pairs in level 0",
            Tactic::TwoSameTwoDiff => "same-class pair in level k, differing pair in one of k+1, k+2, k+3",
            Tactic::TwoSameTwoMore => "same-class pair in level k, levels k+2 and k+3 or k+3 and k+4 occupied",
            Tactic::TwoAndTwoAndOne => "same-class pair in level k, two in k+1, one of k+2 .. k+4 occupied",
            Tactic::TwoDiffTwoMore => "differing pair in level k, k+1 occupied, k+2 or k+4 occupied",
            Tactic::ThreeOkay => "J0: same-class pair in level k, at least four in level k+2",
            Tactic::ThreeOh => "J1: same-class pair in level k, at least four in level k+2 or k+3",
            Tactic::Max3 => "J0: s >= 3d/2; st-contraction between same-class levels k and k+2",
            Tactic::Max3Again => "J1: three in level 0, two same-class pairs in level 1",
            Tactic::Final => "J1: s >= d+1; d-contraction opening from level 0",
            Tactic::GenericPair => "any two variables in the same level",
        }
    }

    /// Field family the tactic is restricted to.
    pub fn family(self) -> Option<Family> {
        match self {
            Tactic::Empty4 | Tactic::FiveSame | Tactic::ThreeOh | Tactic::Max3Again | Tactic::Final => {
                Some(Family::RamifiedJ1)
            }
            Tactic::ThreeOkay | Tactic::Max3 => Some(Family::RamifiedJ0),
            _ => None,
        }
    }

    /// Tactics a structural tactic reduces to.
    pub fn delegates(self) -> &'static [Tactic] {
        use Tactic::*;
        match self {
            Max6 => &[Max7, Empty234, Empty1, FiveSame],
            Max5 => &[Max6, Empty234, Empty1, FiveSame],
            Max4 => &[Max5, Empty234],
            ThreeOkay => &[TwoSameTwoDiff, TwoSameTwoMore, Empty234, Max7],
            ThreeOh => &[TwoSameTwoDiff, Empty234, FiveSame],
            Max3 => &[
                Max5,
                Max4,
                Empty1,
                TwoDiffTwoMore,
                TwoAndTwoAndOne,
                TwoSameTwoDiff,
                TwoSameTwoMore,
                ThreeOkay,
                Max7,
                Empty234,
                FromTwo,
            ],
            Max3Again => &[Empty1, Max4, TwoSameTwoDiff, TwoAndTwoAndOne, Empty4, FromTwo],
            Final => &[
                Max5,
                Max4,
                Empty1,
                Empty4,
                TwoSameTwoMore,
                TwoSameTwoDiff,
                ThreeOh,
                Max3Again,
                TwoDiffTwoMore,
                TwoAndTwoAndOne,
                FiveSame,
            ],
            TwoAndTwoAndOne => &[TwoSameTwoDiff],
            _ => &[],
        }
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tactic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tactic::ALL
            .iter()
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown tactic `{s}`"))
    }
}

/// One move of a tactic on a form.
#[derive(Clone, Debug)]
pub struct TacticMove {
    pub tactic: Tactic,
    pub steps: Vec<ContractionStep>,
    /// The contracted form; `None` when the last coefficient vanished.
    pub form: Option<AdditiveForm>,
    /// Some variable has been raised at least five levels over its origin.
    pub hensel_ready: bool,
}

/// Moves of `tactic` on `form`, including those of the tactics it reduces to.
/// Empty when the pattern does not match.
pub fn apply_tactic(form: &AdditiveForm, tactic: Tactic) -> Vec<TacticMove> {
    let root = Work::new(form);
    let mut works = own_moves(tactic, &root);
    if !works.is_empty() || structural_precondition(tactic, &root) {
        for &t in tactic.delegates() {
            works.extend(own_moves(t, &root));
        }
    }
    works
        .into_iter()
        .map(|w| {
            let form = if w.coeffs.iter().any(|c| c.is_zero()) {
                None
            } else {
                AdditiveForm::new(form.field(), form.degree(), form.bits(), w.coeffs.clone()).ok()
            };
            TacticMove {
                tactic,
                hensel_ready: w.is_terminal(),
                steps: w.steps,
                form,
            }
        })
        .collect()
}

fn structural_precondition(tactic: Tactic, w: &Work) -> bool {
    if tactic.family().is_some_and(|f| f != w.family) {
        return false;
    }
    let s = w.len() as u32;
    let d = w.d;
    match tactic {
        Tactic::Max6 => w.count(0) >= 6,
        Tactic::Max5 => w.count(0) >= 5,
        Tactic::Max4 => two_same_pairs(w, 0).is_some(),
        Tactic::ThreeOkay => (0..d.saturating_sub(3)).any(|k| same_pair(w, k).is_some() && w.count(k + 2) >= 4),
        Tactic::ThreeOh => (0..d).any(|k| same_pair(w, k).is_some() && (w.count(k + 2) >= 4 || w.count(k + 3) >= 4)),
        Tactic::Max3 => 2 * s >= 3 * d,
        Tactic::Max3Again => w.count(0) >= 3 && w.count(1) >= 2,
        Tactic::Final => s > d,
        Tactic::TwoAndTwoAndOne => (0..d).any(|k| same_pair(w, k).is_some() && w.count(k + 1) >= 2),
        _ => false,
    }
}

/// Moves generated by the tactic itself, without delegation.
pub(crate) fn own_moves(tactic: Tactic, w: &Work) -> Vec<Work> {
    if w.is_terminal() || tactic.family().is_some_and(|f| f != w.family) {
        return Vec::new();
    }
    let mut out = Vec::new();
    match tactic {
        Tactic::Slide => slide(w, &mut out),
        Tactic::FromTwo => from_two(w, &mut out),
        Tactic::Empty1 => (0..w.d).for_each(|k| empty1(w, k, &mut out)),
        Tactic::Empty4 => (0..w.d).for_each(|k| empty4(w, k, &mut out)),
        Tactic::Empty234 => (0..w.d).for_each(|k| empty234(w, k, &mut out)),
        Tactic::Max7 => (0..w.d).for_each(|k| max7(w, k, &mut out)),
        Tactic::FiveSame => (0..w.d).for_each(|k| five_same(w, k, &mut out)),
        Tactic::Max6 => {}
        Tactic::Max5 | Tactic::Max4 => level_one_then_empty234(w, tactic, &mut out),
        Tactic::TwoSameTwoDiff => (0..w.d).for_each(|k| two_same_two_diff(w, k, &mut out)),
        Tactic::TwoSameTwoMore => (0..w.d).for_each(|k| two_same_two_more(w, k, &mut out)),
        Tactic::TwoAndTwoAndOne => (0..w.d).for_each(|k| two_and_two_and_one(w, k, &mut out)),
        Tactic::TwoDiffTwoMore => (0..w.d).for_each(|k| two_diff_two_more(w, k, &mut out)),
        Tactic::ThreeOkay | Tactic::ThreeOh => {}
        Tactic::Max3 => {
            (0..w.d).for_each(|k| st_endgame(w, k, &mut out));
            (0..w.d).for_each(|k| diff_then_four(w, k, &mut out));
        }
        Tactic::Max3Again => (0..w.d).for_each(|k| four_same_up(w, k, &mut out)),
        Tactic::Final => (0..w.d).for_each(|k| d_opening(w, k, &mut out)),
        Tactic::GenericPair => generic_pair(w, &mut out),
    }
    out
}

fn same_pair(w: &Work, k: u32) -> Option<(usize, usize)> {
    let [c0, c1] = w.at(k);
    let p0 = (c0.len() >= 2).then(|| (c0[0], c0[1]));
    let p1 = (c1.len() >= 2).then(|| (c1[0], c1[1]));
    match (p0, p1) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn diff_pair(w: &Work, k: u32) -> Option<(usize, usize)> {
    let [c0, c1] = w.at(k);
    match (c0.first(), c1.first()) {
        (Some(&a), Some(&b)) => Some((a.min(b), a.max(b))),
        _ => None,
    }
}

fn two_same_pairs(w: &Work, k: u32) -> Option<[(usize, usize); 2]> {
    let [c0, c1] = w.at(k);
    if c0.len() >= 2 && c1.len() >= 2 {
        Some([(c0[0], c0[1]), (c1[0], c1[1])])
    } else if c0.len() >= 4 {
        Some([(c0[0], c0[1]), (c0[2], c0[3])])
    } else if c1.len() >= 4 {
        Some([(c1[0], c1[1]), (c1[2], c1[3])])
    } else {
        None
    }
}

/// Contract two disjoint pairs given by indices in `w`.
fn two_contractions(w: &Work, p: (usize, usize), q: (usize, usize), s3: bool) -> Option<Work> {
    let first = if s3 { Merge::S3(p.0, p.1) } else { Merge::S2(p.0, p.1) };
    let w1 = w.contract(first).ok()?;
    if w1.is_terminal() {
        return Some(w1);
    }
    let (a, b) = (Work::remap(q.0, p), Work::remap(q.1, p));
    let second = if s3 { Merge::S3(a, b) } else { Merge::S2(a, b) };
    w1.contract(second).ok()
}

/// The work itself if terminal, else a Hensel-ready continuation within two
/// further steps if there is one, else the work unchanged.
pub(crate) fn close(w: Work) -> Work {
    if w.is_terminal() {
        return w;
    }
    finish(&w, 2).unwrap_or(w)
}

/// Search all chains of at most `depth` single steps for a terminal one.
pub(crate) fn finish(w: &Work, depth: u32) -> Option<Work> {
    if depth == 0 {
        return None;
    }
    let steps = w.single_steps();
    let mut next = Vec::new();
    for merge in steps {
        if let Ok(n) = w.contract(merge) {
            if n.is_terminal() {
                return Some(n);
            }
            next.push(n);
        }
    }
    if depth > 1 {
        for n in &next {
            if let Some(t) = finish(n, depth - 1) {
                return Some(t);
            }
        }
    }
    None
}

fn push(out: &mut Vec<Work>, w: Option<Work>) {
    if let Some(w) = w {
        out.push(close(w));
    }
}

fn from_two(w: &Work, out: &mut Vec<Work>) {
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w.level(i) != w.level(j) {
                continue;
            }
            let top = w.raise[i].max(w.raise[j]);
            let merge = if w.class(i) == w.class(j) && top >= 2 {
                Merge::S3(i, j)
            } else if top >= 4 {
                w.any_pair(i, j, 0)
            } else {
                continue;
            };
            if let Ok(n) = w.contract(merge) {
                if n.is_terminal() {
                    out.push(n);
                }
            }
        }
    }
}

fn slide(w: &Work, out: &mut Vec<Work>) {
    for k in 0..w.d {
        let starts = [same_pair(w, k), diff_pair(w, k)];
        for (i, j) in starts.into_iter().flatten() {
            let want = w.at(k + 1).iter().find_map(|c| c.first().map(|&z| w.class(z))).unwrap_or(0);
            let Ok(mut cur) = w.contract(w.any_pair(i, j, want)) else {
                continue;
            };
            let mut len = 1;
            while !cur.is_terminal() {
                let y = cur.newest();
                let l = cur.level(y);
                let partners = cur.at(l);
                let same = &partners[cur.class(y) as usize];
                let partner = same
                    .iter()
                    .chain(partners[1 - cur.class(y) as usize].iter())
                    .copied()
                    .find(|&z| z != y);
                let Some(z) = partner else { break };
                let want = cur.at(l + 1).iter().find_map(|c| c.first().map(|&q| cur.class(q))).unwrap_or(0);
                match cur.contract(cur.any_pair(y.min(z), y.max(z), want)) {
                    Ok(n) => cur = n,
                    Err(_) => break,
                }
                len += 1;
            }
            if len >= 2 {
                out.push(cur);
            }
        }
    }
}

/// s2 on a same-class pair, d on a differing pair, d with the level k+1
/// variable, then s3 with the s2 result.
fn empty1(w: &Work, k: u32, out: &mut Vec<Work>) {
    let [c0, c1] = w.at(k);
    let (big, small) = if c0.len() >= 3 && !c1.is_empty() {
        (c0, c1)
    } else if c1.len() >= 3 && !c0.is_empty() {
        (c1, c0)
    } else {
        return;
    };
    let Some(&z) = w.all_at(k + 1).first() else { return };
    let run = || -> Option<Work> {
        let p = (big[0], big[1]);
        let w1 = w.contract(Merge::S2(p.0, p.1)).ok()?;
        if w1.is_terminal() {
            return Some(w1);
        }
        let y1 = w1.newest();
        let (a, b) = (Work::remap(big[2], p), Work::remap(small[0], p));
        let z1 = Work::remap(z, p);
        let w2 = w1.contract(Merge::D(a.min(b), a.max(b), 1 - w1.class(z1))).ok()?;
        if w2.is_terminal() {
            return Some(w2);
        }
        let y1 = Work::remap(y1, (a, b));
        let z2 = Work::remap(z1, (a, b));
        let y2 = w2.newest();
        let w3 = w2.contract(Merge::D(z2, y2, w2.class(y1))).ok()?;
        if w3.is_terminal() {
            return Some(w3);
        }
        let y1 = Work::remap(y1, (z2, y2));
        let y3 = w3.newest();
        if w3.level(y1) == w3.level(y3) && w3.class(y1) == w3.class(y3) {
            w3.contract(Merge::S3(y1, y3)).ok()
        } else {
            Some(w3)
        }
    };
    push(out, run());
}

fn empty4(w: &Work, k: u32, out: &mut Vec<Work>) {
    if !w.occupied(k + 4) {
        return;
    }
    for class in w.at(k) {
        if class.len() < 3 {
            continue;
        }
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::T([class[0], class[1], class[2]])).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            let y = w1.newest();
            let partner = w1.all_at(w1.level(y)).into_iter().find(|&z| z != y);
            match partner {
                Some(z) => w1.contract(w1.any_pair(z, y, 0)).ok(),
                None => Some(w1),
            }
        };
        push(out, run());
    }
}

fn empty234(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some([p, q]) = two_same_pairs(w, k) else { return };
    if w.occupied(k + 2) || w.occupied(k + 3) {
        push(out, two_contractions(w, p, q, false));
    }
    if w.occupied(k + 4) {
        push(out, two_contractions(w, p, q, true));
    }
}

fn three_same_pairs(w: &Work, k: u32) -> bool {
    let [c0, c1] = w.at(k);
    c0.len() / 2 + c1.len() / 2 >= 3
}

fn max7(w: &Work, k: u32, out: &mut Vec<Work>) {
    if !three_same_pairs(w, k) {
        return;
    }
    let Some(p) = same_pair(w, k) else { return };
    let Ok(w1) = w.contract(Merge::S2(p.0, p.1)) else { return };
    if w1.is_terminal() {
        out.push(w1);
        return;
    }
    empty234(&w1, k, out);
}

fn five_same(w: &Work, k: u32, out: &mut Vec<Work>) {
    let [c0, c1] = w.at(k);
    let mut chains: Vec<[[usize; 3]; 2]> = Vec::new();
    for c in [&c0, &c1] {
        if c.len() >= 5 {
            chains.push([[c[0], c[1], c[2]], [c[2], c[3], c[4]]]);
        }
    }
    if c0.len() >= 3 && c1.len() >= 3 {
        chains.push([[c0[0], c0[1], c0[2]], [c1[0], c1[1], c1[2]]]);
    }
    for [first, second] in chains {
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::T(first)).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            // the t-contraction used two of the first three; the third stays
            let merged = w1.steps.last()?.merged;
            let leftover = first.iter().copied().find(|&x| x != merged.0 && x != merged.1)?;
            let pool: Vec<usize> = if second.contains(&first[2]) {
                vec![leftover, second[1], second[2]]
            } else {
                second.to_vec()
            };
            let mut idx = [0usize; 3];
            for (slot, &x) in idx.iter_mut().zip(&pool) {
                *slot = Work::remap(x, merged);
            }
            w1.contract(Merge::T(idx)).ok()
        };
        push(out, run());
    }
}

/// Contract two variables of level 1 upward, then look for empty234 at level 0.
fn level_one_then_empty234(w: &Work, tactic: Tactic, out: &mut Vec<Work>) {
    let need = if tactic == Tactic::Max5 { 5 } else { 4 };
    if w.count(0) < need || two_same_pairs(w, 0).is_none() {
        return;
    }
    let level1 = w.all_at(1);
    if level1.len() < 2 {
        return;
    }
    let (i, j) = (level1[0], level1[1]);
    let merges = if w.class(i) == w.class(j) {
        vec![Merge::S2(i, j)]
    } else {
        vec![Merge::D(i, j, 0), Merge::D(i, j, 1)]
    };
    for merge in merges {
        let Ok(w1) = w.contract(merge) else { continue };
        if w1.is_terminal() {
            out.push(w1);
            continue;
        }
        let before = out.len();
        empty234(&w1, 0, out);
        if out.len() == before {
            out.push(close(w1));
        }
    }
}

fn two_same_two_diff(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some(p) = same_pair(w, k) else { return };
    if (1..=2).any(|r| diff_pair(w, k + r).is_some()) {
        push(out, w.contract(Merge::S2(p.0, p.1)).ok());
    }
    if diff_pair(w, k + 3).is_some() {
        push(out, w.contract(Merge::S3(p.0, p.1)).ok());
    }
}

fn two_same_two_more(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some(p) = same_pair(w, k) else { return };
    if w.occupied(k + 2) && w.occupied(k + 3) {
        push(out, w.contract(Merge::S2(p.0, p.1)).ok());
    }
    if w.occupied(k + 3) && w.occupied(k + 4) {
        push(out, w.contract(Merge::S3(p.0, p.1)).ok());
    }
}

fn two_and_two_and_one(w: &Work, k: u32, out: &mut Vec<Work>) {
    if same_pair(w, k).is_none() || !(2..=4).any(|r| w.occupied(k + r)) {
        return;
    }
    let Some(q) = same_pair(w, k + 1) else { return };
    let Ok(w1) = w.contract(Merge::S2(q.0, q.1)) else { return };
    if w1.is_terminal() {
        out.push(w1);
        return;
    }
    let mut sub = Vec::new();
    from_two(&w1, &mut sub);
    two_same_two_more(&w1, k, &mut sub);
    two_same_two_diff(&w1, k, &mut sub);
    match sub.into_iter().find(Work::is_terminal) {
        Some(t) => out.push(t),
        None => out.push(close(w1)),
    }
}

fn two_diff_two_more(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some((i, j)) = diff_pair(w, k) else { return };
    let Some(&z) = w.all_at(k + 1).first() else { return };
    if let Some(&t) = w.all_at(k + 2).first() {
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::D(i, j, 1 - w.class(z))).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            let (z1, t1, y) = (Work::remap(z, (i, j)), Work::remap(t, (i, j)), w1.newest());
            w1.contract(Merge::D(z1, y, w1.class(t1))).ok()
        };
        push(out, run());
    }
    if w.occupied(k + 4) {
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::D(i, j, w.class(z))).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            let (z1, y) = (Work::remap(z, (i, j)), w1.newest());
            w1.contract(Merge::S3(z1, y)).ok()
        };
        push(out, run());
    }
}

/// st from level k to k+2 when level k+2 holds a variable of the same class,
/// then s3 with it. Covers the wrap from level d-2 to level 0.
fn st_endgame(w: &Work, k: u32, out: &mut Vec<Work>) {
    let above = w.at(k + 2);
    for (class, vars) in w.at(k).iter().enumerate() {
        if vars.len() < 3 || above[class].is_empty() {
            continue;
        }
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::ST([vars[0], vars[1], vars[2]])).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            let merged = w1.steps.last()?.merged;
            let y = w1.newest();
            let partner = w1.at(w1.level(y))[w1.class(y) as usize]
                .iter()
                .copied()
                .find(|&p| p != y)
                .or_else(|| above[class].first().map(|&p| Work::remap(p, merged)))?;
            w1.contract(Merge::S3(partner.min(y), partner.max(y))).ok()
        };
        push(out, run());
    }
}

/// A differing pair in level k pushed by d into a same-class triple in
/// level k+1, then two s2-contractions on the resulting four.
fn diff_then_four(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some((i, j)) = diff_pair(w, k) else { return };
    for (class, vars) in w.at(k + 1).iter().enumerate() {
        if vars.len() < 3 {
            continue;
        }
        let run = || -> Option<Work> {
            let w1 = w.contract(Merge::D(i, j, class as u8)).ok()?;
            if w1.is_terminal() {
                return Some(w1);
            }
            let y = w1.newest();
            let v: Vec<usize> = vars.iter().map(|&x| Work::remap(x, (i, j))).collect();
            two_contractions(&w1, (v[0], v[1]), (v[2].min(y), v[2].max(y)), false)
        };
        push(out, run());
    }
}

fn four_same_up(w: &Work, k: u32, out: &mut Vec<Work>) {
    for vars in w.at(k) {
        if vars.len() >= 4 {
            push(out, two_contractions(w, (vars[0], vars[1]), (vars[2], vars[3]), false));
        }
    }
}

/// d-contraction from level k into level k+1, then the large-level tactics
/// at k+1.
fn d_opening(w: &Work, k: u32, out: &mut Vec<Work>) {
    let Some((i, j)) = diff_pair(w, k) else { return };
    if w.count(k + 1) < 2 {
        return;
    }
    for want in 0..2 {
        let Ok(w1) = w.contract(Merge::D(i, j, want)) else { continue };
        if w1.is_terminal() {
            out.push(w1);
            continue;
        }
        let mut sub = Vec::new();
        max7(&w1, k + 1, &mut sub);
        empty234(&w1, k + 1, &mut sub);
        five_same(&w1, k + 1, &mut sub);
        match sub.into_iter().find(Work::is_terminal) {
            Some(t) => out.push(t),
            None => out.push(close(w1)),
        }
    }
}

fn generic_pair(w: &Work, out: &mut Vec<Work>) {
    for merge in w.single_steps() {
        if let Ok(n) = w.contract(merge) {
            out.push(n);
        }
    }
}
