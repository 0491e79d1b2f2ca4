//! Simplex categories and the partition calculus.
//!
//! Morphisms are stored as value arrays `[f(0), ..., f(m)]`. A morphism of
//! finite intervals preserves both endpoints; a narrow morphism additionally
//! satisfies `f⁻¹(0) = {0}` and `f⁻¹(n) = {m}`.

use std::fmt;

use crate::{Error, Result};

/// Largest dimension accepted by constructors.
pub const MAX_DIM: usize = 12;

/// A monotone map `[m] -> [n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mor {
    pub n: usize,
    pub values: Vec<usize>,
}

/// Morphisms of the interval category share the representation of [`Mor`].
pub type FIntMorphism = Mor;

impl Mor {
    pub fn new(values: Vec<usize>, n: usize) -> Result<Mor> {
        if values.is_empty() {
            return Err(Error::Contract("a morphism needs a nonempty source".into()));
        }
        if n > MAX_DIM || values.len() > MAX_DIM + 1 {
            return Err(Error::Contract(format!("dimension above {MAX_DIM}")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v > n) {
            return Err(Error::Contract(format!("{values:?} is not a monotone map into [{n}]")));
        }
        Ok(Mor { n, values })
    }

    /// Builds an endpoint-preserving morphism.
    pub fn interval(values: Vec<usize>, n: usize) -> Result<Mor> {
        let f = Mor::new(values, n)?;
        if !f.is_interval() {
            return Err(Error::Contract(format!("{f} does not preserve endpoints")));
        }
        Ok(f)
    }

    pub fn identity(n: usize) -> Mor {
        Mor { n, values: (0..=n).collect() }
    }

    /// The coface `[n-1] -> [n]` skipping `j`.
    pub fn delta(n: usize, j: usize) -> Mor {
        assert!(n >= 1 && j <= n);
        Mor { n, values: (0..n).map(|i| if i < j { i } else { i + 1 }).collect() }
    }

    /// The codegeneracy `[n+1] -> [n]` hitting `i` twice.
    pub fn sigma(n: usize, i: usize) -> Mor {
        assert!(i <= n);
        Mor { n, values: (0..=n + 1).map(|k| if k <= i { k } else { k - 1 }).collect() }
    }

    /// The unique map `[m] -> [0]`.
    pub fn terminal(m: usize) -> Mor {
        Mor { n: 0, values: vec![0; m + 1] }
    }

    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, i: usize) -> usize {
        self.values[i]
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &Mor) -> Mor {
        assert_eq!(g.n, self.m(), "composition of incompatible morphisms");
        Mor { n: self.n, values: g.values.iter().map(|&v| self.values[v]).collect() }
    }

    pub fn is_interval(&self) -> bool {
        self.values[0] == 0 && *self.values.last().unwrap() == self.n
    }

    pub fn is_narrow(&self) -> bool {
        let m = self.m();
        self.is_interval()
            && m >= 1
            && self.n >= 1
            && self.values[1..].iter().all(|&v| v > 0)
            && self.values[..m].iter().all(|&v| v < self.n)
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        (0..=self.n).all(|v| self.values.contains(&v))
    }

    pub fn image(&self) -> Vec<usize> {
        let mut v = self.values.clone();
        v.dedup();
        v
    }

    /// Epi-mono factorization `self = mono ∘ epi`.
    pub fn epi_mono(&self) -> (Mor, Mor) {
        let im = self.image();
        let r = im.len() - 1;
        let epi = Mor { n: r, values: self.values.iter().map(|v| im.iter().position(|x| x == v).unwrap()).collect() };
        let mono = Mor { n: self.n, values: im };
        (epi, mono)
    }

    /// Normal form `δ_{i1}…δ_{is} σ_{j1}…σ_{jt}` with `i1 > … > is` and `j1 < … < jt`.
    pub fn normal_form(&self) -> (Vec<usize>, Vec<usize>) {
        let im = self.image();
        let mut deltas: Vec<usize> = (0..=self.n).filter(|v| !im.contains(v)).collect();
        deltas.reverse();
        let (epi, _) = self.epi_mono();
        let sigmas = (0..epi.m()).filter(|&k| epi.values[k] == epi.values[k + 1]).collect();
        (deltas, sigmas)
    }

    /// Recomposes a normal form with source `[m]`.
    pub fn from_normal_form(m: usize, deltas: &[usize], sigmas: &[usize]) -> Mor {
        let mut f = Mor::identity(m);
        // σ_{jt} is applied first.
        for &j in sigmas.iter().rev() {
            f = Mor::sigma(f.n - 1, j).compose(&f);
        }
        for &i in deltas.iter().rev() {
            f = Mor::delta(f.n + 1, i).compose(&f);
        }
        f
    }

    /// `f + g`, gluing the top endpoint of `f` to the bottom endpoint of `g`.
    pub fn plus(&self, g: &Mor) -> Mor {
        assert!(self.is_interval() && g.is_interval(), "plus needs interval morphisms");
        let mut values = self.values.clone();
        values.extend(g.values[1..].iter().map(|v| v + self.n));
        Mor { n: self.n + g.n, values }
    }

    /// `f ⋄ g : [k+l-1] -> [p+q-1]` for narrow `f: [k]->[p]`, `g: [l]->[q]`.
    pub fn diamond(&self, g: &Mor) -> Result<Mor> {
        if !self.is_narrow() || !g.is_narrow() {
            return Err(Error::Contract(format!("diamond of non-narrow morphisms {self} and {g}")));
        }
        let (k, p) = (self.m(), self.n);
        let mut values: Vec<usize> = self.values[..k].to_vec();
        values.extend(g.values[1..].iter().map(|v| v + p - 1));
        Ok(Mor { n: p + g.n - 1, values })
    }

    /// `f⁻¹(I)` for an interval morphism `f: [m] -> [n]` and `I ∈ 𝒫_n`.
    pub fn preimage(&self, i: &Partition) -> Partition {
        let members = (0..=self.m()).filter(|&j| i.contains(self.values[j] + i.start)).collect();
        Partition { start: 0, n: self.m(), members }
    }

    /// The narrow morphism `f_I` with `I^c ∘ f_I = f ∘ J^c`, `J = f⁻¹(I)`.
    pub fn restriction(&self, i: &Partition) -> Mor {
        assert!(self.is_interval());
        let i0 = i.shifted(0);
        if self.n == 0 {
            return Mor::identity(1);
        }
        let j = self.preimage(&i0);
        let jc = j.complement().values;
        let ic = i0.complement().values;
        let values = jc.iter().map(|&x| ic.iter().position(|&y| y == self.values[x]).unwrap()).collect();
        Mor { n: ic.len() - 1, values }
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// All interval morphisms `[m] -> [n]`.
pub fn interval_morphisms(m: usize, n: usize) -> Vec<Mor> {
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(Mor::identity(0));
        }
        return out;
    }
    let mut cur = vec![0usize; m + 1];
    fn rec(pos: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Mor>) {
        if pos == m {
            cur[m] = n;
            out.push(Mor { n, values: cur.clone() });
            return;
        }
        let lo = cur[pos - 1];
        for v in lo..=n {
            cur[pos] = v;
            rec(pos + 1, m, n, cur, out);
        }
    }
    cur[0] = 0;
    rec(1, m, n, &mut cur, &mut out);
    out
}

/// All monotone maps `[m] -> [n]`.
pub fn monotone_maps(m: usize, n: usize) -> Vec<Mor> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; m + 1];
    fn rec(pos: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Mor>) {
        if pos == cur.len() {
            out.push(Mor { n, values: cur.clone() });
            return;
        }
        let lo = if pos == 0 { 0 } else { cur[pos - 1] };
        for v in lo..=n {
            cur[pos] = v;
            rec(pos + 1, n, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

/// A morphism of the augmented simplex category `[m] -> [n]` with `m, n ≥ -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AugMorphism {
    /// `n + 1`, the size of the target.
    pub target_len: usize,
    pub values: Vec<usize>,
}

impl AugMorphism {
    pub fn new(values: Vec<usize>, target_len: usize) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v >= target_len) {
            return Err(Error::Contract(format!("{values:?} is not monotone into a {target_len}-element ordinal")));
        }
        Ok(AugMorphism { target_len, values })
    }

    pub fn source_dim(&self) -> isize {
        self.values.len() as isize - 1
    }

    pub fn target_dim(&self) -> isize {
        self.target_len as isize - 1
    }

    pub fn identity_len(len: usize) -> Self {
        AugMorphism { target_len: len, values: (0..len).collect() }
    }

    /// Face `δ_i : [n-1] -> [n]` with `n = len - 1`.
    pub fn face(len: usize, i: usize) -> Self {
        AugMorphism { target_len: len, values: (0..len - 1).map(|k| if k < i { k } else { k + 1 }).collect() }
    }

    /// Degeneracy `σ_i : [n+1] -> [n]` with `n = len - 1`.
    pub fn degeneracy(len: usize, i: usize) -> Self {
        AugMorphism { target_len: len, values: (0..=len).map(|k| if k <= i { k } else { k - 1 }).collect() }
    }

    pub fn compose(&self, g: &AugMorphism) -> AugMorphism {
        assert_eq!(g.target_len, self.values.len());
        AugMorphism { target_len: self.target_len, values: g.values.iter().map(|&v| self.values[v]).collect() }
    }

    pub fn is_injective_on(&self, subset: &[usize]) -> bool {
        subset.windows(2).all(|w| self.values[w[0]] != self.values[w[1]])
    }

    /// Ordinal sum (join) `f ⋆ g`.
    pub fn join(&self, g: &AugMorphism) -> AugMorphism {
        let mut values = self.values.clone();
        values.extend(g.values.iter().map(|v| v + self.target_len));
        AugMorphism { target_len: self.target_len + g.target_len, values }
    }

    /// Transport to the narrow category along `[0] ⋆ - ⋆ [0]`.
    pub fn to_narrow(&self) -> Mor {
        let n = self.target_len + 1;
        let mut values = vec![0];
        values.extend(self.values.iter().map(|v| v + 1));
        values.push(n);
        Mor { n, values }
    }

    /// Inverse of [`AugMorphism::to_narrow`].
    pub fn from_narrow(f: &Mor) -> Result<Self> {
        if !f.is_narrow() {
            return Err(Error::Contract(format!("{f} is not narrow")));
        }
        let m = f.m();
        Ok(AugMorphism { target_len: f.n - 1, values: f.values[1..m].iter().map(|v| v - 1).collect() })
    }
}

/// A partition: a subset of `{start, …, start+n}` containing both endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub start: usize,
    pub n: usize,
    pub members: Vec<usize>,
}

impl Partition {
    pub fn new(start: usize, n: usize, mut members: Vec<usize>) -> Result<Partition> {
        members.sort_unstable();
        members.dedup();
        if n > MAX_DIM {
            return Err(Error::Contract(format!("dimension above {MAX_DIM}")));
        }
        if members.first() != Some(&start) || members.last() != Some(&(start + n)) {
            return Err(Error::Contract(format!("{members:?} misses an endpoint of [{start},{}]", start + n)));
        }
        Ok(Partition { start, n, members })
    }

    /// Partition of `n` starting at 0.
    pub fn of(n: usize, members: &[usize]) -> Partition {
        Partition::new(0, n, members.to_vec()).expect("valid partition")
    }

    /// `{0, n}`.
    pub fn trivial(n: usize) -> Partition {
        Partition::of(n, &if n == 0 { vec![0] } else { vec![0, n] })
    }

    /// `{0, 1, …, n}`.
    pub fn full(n: usize) -> Partition {
        Partition::of(n, &(0..=n).collect::<Vec<_>>())
    }

    pub fn end(&self) -> usize {
        self.start + self.n
    }

    /// ℓ(I).
    pub fn len(&self) -> usize {
        self.members.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.members.len() <= 1
    }

    pub fn contains(&self, s: usize) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// Lengths of the consecutive pieces `i_1 - i_0, …`.
    pub fn gaps(&self) -> Vec<usize> {
        self.members.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn shifted(&self, start: usize) -> Partition {
        Partition { start, n: self.n, members: self.members.iter().map(|m| m - self.start + start).collect() }
    }

    /// `I^{≤s}`.
    pub fn le(&self, s: usize) -> Partition {
        let mut members: Vec<usize> = self.members.iter().cloned().filter(|&x| x < s).collect();
        members.push(s);
        Partition { start: self.start, n: s - self.start, members }
    }

    /// `I^{≥s}`.
    pub fn ge(&self, s: usize) -> Partition {
        let mut members = vec![s];
        members.extend(self.members.iter().cloned().filter(|&x| x > s));
        Partition { start: s, n: self.end() - s, members }
    }

    /// `I + J`, with `J` moved to start at the end of `I`.
    pub fn concat(&self, j: &Partition) -> Partition {
        let e = self.end();
        let mut members = self.members.clone();
        members.extend(j.members.iter().skip(1).map(|x| x - j.start + e));
        Partition { start: self.start, n: self.n + j.n, members }
    }

    pub fn union(&self, other: &Partition) -> Partition {
        assert_eq!((self.start, self.n), (other.start, other.n));
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        Partition::new(self.start, self.n, members).unwrap()
    }

    pub fn is_subset(&self, other: &Partition) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }

    /// The injection `[ℓ(I)] -> [n]`.
    pub fn as_mor(&self) -> Mor {
        Mor { n: self.n, values: self.members.iter().map(|m| m - self.start).collect() }
    }

    pub fn from_mor(f: &Mor) -> Result<Partition> {
        if !f.is_injective() || !f.is_interval() {
            return Err(Error::Contract(format!("{f} is not a partition")));
        }
        Ok(Partition { start: 0, n: f.n, members: f.values.clone() })
    }

    /// All partitions of `n`, ordered by their interior read as a binary number.
    pub fn enumerate(n: usize) -> Vec<Partition> {
        if n == 0 {
            return vec![Partition::of(0, &[0])];
        }
        (0u64..1 << (n - 1))
            .map(|mask| {
                let mut members = vec![0];
                members.extend((1..n).filter(|i| mask >> (i - 1) & 1 == 1));
                members.push(n);
                Partition { start: 0, n, members }
            })
            .collect()
    }

    /// `p_I(s) = min{p : s ≤ i_p}`.
    pub fn p_index(&self, s: usize) -> usize {
        assert!(s >= self.start && s <= self.end());
        self.members.iter().position(|&x| s <= x).unwrap()
    }

    /// The complement `I^c`, an injection with image `{0} ∪ ({1..n-1} ∖ I) ∪ {n}`,
    /// or `σ₀ : [1] -> [0]` when `n = 0`.
    pub fn complement(&self) -> Mor {
        if self.n == 0 {
            return Mor::sigma(0, 0);
        }
        let mut values = vec![0];
        values.extend((1..self.n).filter(|&i| !self.contains(i + self.start)));
        values.push(self.n);
        Mor { n: self.n, values }
    }

    /// Splitting of `I` over an interval morphism `f: [m] -> [n]`.
    pub fn splitting(&self, f: &Mor) -> Vec<Partition> {
        assert_eq!(f.n, self.n, "splitting over a morphism into the wrong interval");
        let i = self.start;
        (1..=f.m()).map(|k| self.le(f.at(k) + i).ge(f.at(k - 1) + i)).collect()
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `Σ_{I ⊆ J ⊆ K} (-1)^{ℓ(J)}`.
pub fn alternating_sum(i: &Partition, k: &Partition) -> i64 {
    Partition::enumerate(k.n)
        .into_iter()
        .map(|j| j.shifted(k.start))
        .filter(|j| i.is_subset(j) && j.is_subset(k))
        .map(|j| if j.len() % 2 == 0 { 1 } else { -1 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_examples() {
        assert_eq!(Partition::enumerate(0), vec![Partition::of(0, &[0])]);
        assert_eq!(Partition::enumerate(2), vec![Partition::of(2, &[0, 2]), Partition::of(2, &[0, 1, 2])]);
        assert_eq!(Partition::enumerate(4).len(), 8);
    }

    #[test]
    fn splitting_examples() {
        let i = Partition::of(4, &[0, 1, 3, 4]);
        let f = Partition::of(4, &[0, 2, 4]).as_mor();
        let s = i.splitting(&f);
        assert_eq!(s[0].members, vec![0, 1, 2]);
        assert_eq!(s[1].members, vec![2, 3, 4]);
        let id = Mor::identity(3);
        let s = Partition::of(3, &[0, 2, 3]).splitting(&id);
        let m: Vec<Vec<usize>> = s.iter().map(|p| p.members.clone()).collect();
        assert_eq!(m, vec![vec![0, 1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Partition::of(5, &[0, 2, 3, 5]).complement().values, vec![0, 1, 4, 5]);
        assert_eq!(Partition::of(4, &[0, 4]).complement(), Mor::identity(4));
        assert_eq!(Partition::of(0, &[0]).complement(), Mor::sigma(0, 0));
    }

    #[test]
    fn p_index_examples() {
        let i = Partition::of(5, &[0, 2, 5]);
        assert_eq!(i.p_index(1), 1);
        assert_eq!(i.p_index(0), 0);
        assert_eq!(i.p_index(2), 1);
        assert_eq!(i.le(2).len(), 1);
    }

    #[test]
    fn restriction_examples() {
        let i = Partition::of(3, &[0, 2, 3]);
        assert_eq!(Mor::identity(3).restriction(&i), Mor::identity(i.complement().m()));
        let f = Mor::sigma(3, 2);
        let fi = f.restriction(&i);
        let j = f.preimage(&i);
        assert_eq!(i.complement().compose(&fi), f.compose(&j.complement()));
        assert!(fi.is_narrow());
        assert_eq!(Mor::terminal(2).restriction(&Partition::of(0, &[0])), Mor::identity(1));
    }

    #[test]
    fn join_unit() {
        let p = AugMorphism::identity_len(1);
        assert_eq!(p.join(&p), AugMorphism::identity_len(2));
    }
}
