use crate::contraction::{
    plan_d, plan_s2, plan_s3, plan_st, plan_t, ContractionError, ContractionStep, SubstitutionTree,
};
use crate::field_ring::{Family, RingElement, Valuation};
use crate::forms::AdditiveForm;

/// Levels of raise that make a variable Hensel-liftable.
pub(crate) const HENSEL_RAISE: u32 = 5;

/// One contraction to perform, by current variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Merge {
    D(usize, usize, u8),
    S2(usize, usize),
    S3(usize, usize),
    T([usize; 3]),
    ST([usize; 3]),
}

/// A search state: the current coefficients, how far each variable has been
/// raised over its best origin, and the way back to the root form.
///
/// Once `terminal` is set the variable it names is Hensel-ready (or its
/// coefficient vanished) and no further contraction is performed.
#[derive(Clone, Debug)]
pub(crate) struct Work {
    pub d: u32,
    pub family: Family,
    pub coeffs: Vec<RingElement>,
    pub raise: Vec<u32>,
    pub tree: SubstitutionTree,
    pub steps: Vec<ContractionStep>,
    pub terminal: Option<usize>,
}

impl Work {
    pub fn new(form: &AdditiveForm) -> Self {
        Work {
            d: form.d(),
            family: form.field().family(),
            coeffs: form.coeffs().to_vec(),
            raise: vec![0; form.len()],
            tree: SubstitutionTree::identity(form.len()),
            steps: Vec::new(),
            terminal: None,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    pub fn level(&self, i: usize) -> u32 {
        self.coeffs[i].valuation().finite().map_or(0, |v| v % self.d)
    }

    pub fn class(&self, i: usize) -> u8 {
        self.coeffs[i].pi_coefficient().unwrap_or(0)
    }

    pub fn max_raise(&self) -> u32 {
        self.raise.iter().copied().max().unwrap_or(0)
    }

    /// Indices at level `l` (taken mod `d`), by class, in increasing order.
    pub fn at(&self, l: u32) -> [Vec<usize>; 2] {
        let l = l % self.d;
        let mut out = [Vec::new(), Vec::new()];
        for i in 0..self.len() {
            if self.level(i) == l {
                out[self.class(i) as usize].push(i);
            }
        }
        out
    }

    pub fn count(&self, l: u32) -> usize {
        let [a, b] = self.at(l);
        a.len() + b.len()
    }

    pub fn occupied(&self, l: u32) -> bool {
        self.count(l) > 0
    }

    /// All indices at level `l`, increasing.
    pub fn all_at(&self, l: u32) -> Vec<usize> {
        let [mut a, b] = self.at(l);
        a.extend(b);
        a.sort_unstable();
        a
    }

    /// Perform one contraction. The result is terminal when the new variable
    /// has been raised at least five levels or its coefficient vanished.
    pub fn contract(&self, merge: Merge) -> Result<Work, ContractionError> {
        if self.terminal.is_some() {
            return Err(ContractionError::Internal("contraction after termination".into()));
        }
        let step = match merge {
            Merge::D(i, j, want) => plan_d(&self.coeffs, self.d, (i, j), want)?,
            Merge::S2(i, j) => plan_s2(&self.coeffs, self.d, (i, j))?,
            Merge::S3(i, j) => plan_s3(&self.coeffs, self.d, (i, j))?,
            Merge::T(c) => plan_t(&self.coeffs, self.d, &c)?,
            Merge::ST(c) => plan_st(&self.coeffs, self.d, &c)?,
        };
        let (i, j) = step.merged;
        let raise = match step.level_gain {
            Valuation::Finite(g) => g + self.raise[i].max(self.raise[j]),
            Valuation::Infinite => u32::MAX,
        };
        let keep = |k: &usize| *k != i && *k != j;
        let mut coeffs: Vec<RingElement> = (0..self.len()).filter(keep).map(|k| self.coeffs[k]).collect();
        let mut raises: Vec<u32> = (0..self.len()).filter(keep).map(|k| self.raise[k]).collect();
        coeffs.push(step.new_coefficient);
        raises.push(raise);
        let tree = self.tree.apply(&step)?;
        let terminal = (raise >= HENSEL_RAISE || step.new_coefficient.is_zero()).then_some(coeffs.len() - 1);
        let mut steps = self.steps.clone();
        steps.push(step);
        Ok(Work {
            d: self.d,
            family: self.family,
            coeffs,
            raise: raises,
            tree,
            steps,
            terminal,
        })
    }

    /// Where index `k` moves after contracting `i` and `j`.
    pub fn remap(k: usize, (i, j): (usize, usize)) -> usize {
        k - usize::from(i < k) - usize::from(j < k)
    }

    /// Index of the variable produced by the last step.
    pub fn newest(&self) -> usize {
        self.len() - 1
    }

    /// The best contraction of an arbitrary same-level pair: s3 when the
    /// classes agree, otherwise a d-contraction to `want`.
    pub fn any_pair(&self, i: usize, j: usize, want: u8) -> Merge {
        if self.class(i) == self.class(j) {
            Merge::S3(i, j)
        } else {
            Merge::D(i, j, want)
        }
    }

    /// Canonical key for duplicate detection.
    pub fn key(&self) -> Vec<(u64, u64, u32)> {
        let mut k: Vec<(u64, u64, u32)> = self
            .coeffs
            .iter()
            .zip(&self.raise)
            .map(|(c, r)| {
                let (a, b) = c.coords();
                (a, b, *r)
            })
            .collect();
        k.sort_unstable();
        k
    }

    /// Every single legal contraction, pairs in index order.
    pub fn single_steps(&self) -> Vec<Merge> {
        let mut out = Vec::new();
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.level(i) != self.level(j) {
                    continue;
                }
                if self.class(i) == self.class(j) {
                    out.push(Merge::S2(i, j));
                    out.push(Merge::S3(i, j));
                } else {
                    out.push(Merge::D(i, j, 0));
                    out.push(Merge::D(i, j, 1));
                }
            }
        }
        for l in 0..self.d {
            for class in self.at(l) {
                for a in 0..class.len() {
                    for b in a + 1..class.len() {
                        for c in b + 1..class.len() {
                            let idx = [class[a], class[b], class[c]];
                            out.push(match self.family {
                                Family::RamifiedJ0 => Merge::ST(idx),
                                Family::RamifiedJ1 => Merge::T(idx),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
