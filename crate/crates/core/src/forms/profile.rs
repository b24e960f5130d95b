use std::fmt;

use super::model::AdditiveForm;
use super::FormError;

/// Variables per level, split by pi-coefficient class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelProfile {
    counts: Vec<usize>,
    classes: Vec<[usize; 2]>,
}

impl LevelProfile {
    pub fn from_levels(d: u32, levels: impl IntoIterator<Item = (u32, u8)>) -> Self {
        let mut classes = vec![[0usize; 2]; d as usize];
        for (level, class) in levels {
            classes[(level % d) as usize][class as usize & 1] += 1;
        }
        let counts = classes.iter().map(|c| c[0] + c[1]).collect();
        LevelProfile { counts, classes }
    }

    /// `s_0, ..., s_{d-1}`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `(n_0, n_1)` per level: variables with pi-coefficient 0 and 1.
    pub fn classes(&self) -> &[[usize; 2]] {
        &self.classes
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn degree(&self) -> u32 {
        self.counts.len() as u32
    }

    /// Levels shifted up by `t` (mod `d`).
    pub fn rotated(&self, t: u32) -> Self {
        let d = self.counts.len();
        let mut counts = vec![0; d];
        let mut classes = vec![[0; 2]; d];
        for i in 0..d {
            let j = (i + t as usize) % d;
            counts[j] = self.counts[i];
            classes[j] = self.classes[i];
        }
        LevelProfile { counts, classes }
    }

    /// `(k + 1) s <= d (s_0 + ... + s_k)` for every `k`.
    pub fn satisfies_prefix_inequalities(&self) -> bool {
        let s = self.total() as u64;
        let d = self.counts.len() as u64;
        let mut prefix = 0u64;
        self.counts.iter().enumerate().all(|(k, &c)| {
            prefix += c as u64;
            (k as u64 + 1) * s <= d * prefix
        })
    }
}

impl fmt::Display for LevelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, [n0, n1]) in self.classes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if n0 + n1 == 0 {
                f.write_str("0")?;
            } else {
                write!(f, "{n0}/{n1}")?;
            }
        }
        f.write_str(")")
    }
}

pub fn profile(form: &AdditiveForm) -> LevelProfile {
    LevelProfile::from_levels(form.d(), (0..form.len()).map(|i| form.level_and_class(i)))
}

/// Rotation amount that normalizes `profile`.
///
/// Among the rotations meeting every prefix inequality the one giving the
/// lexicographically largest rotated profile wins, then the smallest shift.
/// Choosing on the rotated profile makes the result independent of where the
/// input started, so normalizing `pi * F` and `F` agree.
pub fn normalizing_rotation(profile: &LevelProfile) -> u32 {
    let d = profile.degree();
    (0..d)
        .map(|t| (t, profile.rotated(t)))
        .filter(|(_, p)| p.satisfies_prefix_inequalities())
        .max_by(|(ta, pa), (tb, pb)| pa.cmp(pb).then(tb.cmp(ta)))
        .map_or(0, |(t, _)| t)
}

/// Multiply the form by `pi^t` so that the prefix inequalities
/// `s_0 + ... + s_k >= (k + 1) s / d` all hold.
pub fn normalize(form: &AdditiveForm) -> Result<(AdditiveForm, u32), FormError> {
    let t = normalizing_rotation(&profile(form));
    Ok((form.scale_by_pi_pow(t)?, t))
}
