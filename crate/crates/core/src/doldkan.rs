//! Augmented Dold-Kan: chain complexes, augmented simplicial modules, the
//! normalized complex `Ñ`, its inverse `Γ̃`, and the join tensor product.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactcore::{sign, Comb, Echelon, Ring, Scalar};
use crate::intervals::{monotone_maps, AugMorphism, Mor};
use crate::templicial::{exact_kernel, exact_solve, Witness};
use crate::{Error, Result};

type Cols = Vec<Vec<Comb<usize>>>;

/// A bounded chain complex `C_0 <- C_1 <- … <- C_dim` with a basis in each degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    pub ring: Ring,
    pub labels: Vec<Vec<String>>,
    /// `d[n][g] = ∂(g) ∈ C_{n-1}`; `d[0]` holds zeros.
    pub d: Cols,
}

impl ChainComplex {
    pub fn dim(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn rank(&self, n: usize) -> usize {
        self.labels.get(n).map_or(0, |l| l.len())
    }

    pub fn boundary(&self, n: usize, v: &Comb<usize>) -> Comb<usize> {
        if n == 0 || n > self.dim() {
            return Comb::zero();
        }
        v.bind(|&g| self.d[n][g].clone())
    }

    /// Complex with the given ranks and boundary columns.
    pub fn new(ring: Ring, ranks: &[usize], d: Cols) -> Result<ChainComplex> {
        let labels: Vec<Vec<String>> = ranks.iter().enumerate().map(|(n, &r)| (0..r).map(|i| format!("c{n}.{i}")).collect()).collect();
        let c = ChainComplex { ring, labels, d };
        if c.d.len() != ranks.len() || c.d.iter().zip(ranks).any(|(col, &r)| col.len() != r) {
            return Err(Error::Contract("boundary columns do not match the ranks".into()));
        }
        for n in 1..ranks.len() {
            if c.d[n].iter().any(|v| v.keys().any(|&h| h >= ranks[n - 1])) {
                return Err(Error::Contract(format!("boundary out of range in degree {n}")));
            }
        }
        if !c.d[0].iter().all(|v| v.is_zero()) {
            return Err(Error::Contract("degree 0 has no boundary".into()));
        }
        Ok(c)
    }

    /// `C_0 = k⟨labels⟩`, all other degrees zero up to `dim`.
    pub fn concentrated(ring: Ring, labels: Vec<String>, dim: usize) -> ChainComplex {
        let n = labels.len();
        let mut all = vec![labels];
        all.extend((0..dim).map(|_| Vec::new()));
        let mut d = vec![vec![Comb::zero(); n]];
        d.extend((0..dim).map(|_| Vec::new()));
        ChainComplex { ring, labels: all, d }
    }

    pub fn zero(ring: Ring, dim: usize) -> ChainComplex {
        ChainComplex::concentrated(ring, vec![], dim)
    }

    /// A random complex: each `∂_n` is a random combination of a kernel basis of `∂_{n-1}`.
    pub fn random<R: Rng>(ring: Ring, dim: usize, max_rank: usize, rng: &mut R) -> ChainComplex {
        let ranks: Vec<usize> = (0..=dim).map(|_| rng.gen_range(0..=max_rank)).collect();
        let mut d: Cols = vec![vec![Comb::zero(); ranks[0]]];
        for n in 1..=dim {
            let ker: Vec<Comb<usize>> = if n == 1 { (0..ranks[0]).map(|i| Comb::basis(i, ring)).collect() } else { exact_kernel(&d[n - 1], ring) };
            let col = (0..ranks[n])
                .map(|_| {
                    let mut v = Comb::zero();
                    for k in &ker {
                        v.add_scaled(k, &ring.random_small(rng, 2));
                    }
                    v
                })
                .collect();
            d.push(col);
        }
        ChainComplex::new(ring, &ranks, d).expect("random complex is well formed")
    }

    /// `∂∂ = 0`.
    pub fn check(&self) -> std::result::Result<(), Witness> {
        for n in 2..=self.dim() {
            for g in 0..self.rank(n) {
                if !self.boundary(n - 1, &self.d[n][g]).is_zero() {
                    return Err(Witness::new("boundary squares to zero", &[n], &self.labels[n][g], &[format!("d[{n}]"), format!("d[{}]", n - 1)]));
                }
            }
        }
        Ok(())
    }

    /// `C ⊗ D` with `∂(x⊗y) = ∂x⊗y + (-1)^{|x|} x⊗∂y`, up to the smaller dimension.
    pub fn tensor(&self, other: &ChainComplex) -> TensorComplex {
        let ring = self.ring;
        let dim = self.dim().min(other.dim());
        let mut gens: Vec<Vec<(usize, usize, usize)>> = Vec::new();
        for n in 0..=dim {
            let mut lv = Vec::new();
            for p in 0..=n {
                for x in 0..self.rank(p) {
                    for y in 0..other.rank(n - p) {
                        lv.push((p, x, y));
                    }
                }
            }
            gens.push(lv);
        }
        let index: Vec<BTreeMap<(usize, usize, usize), usize>> = gens.iter().map(|l| l.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect();
        let mut d: Cols = Vec::new();
        let mut labels = Vec::new();
        for n in 0..=dim {
            labels.push(gens[n].iter().map(|&(p, x, y)| format!("{}⊗{}", self.labels[p][x], other.labels[n - p][y])).collect());
            d.push(
                gens[n]
                    .iter()
                    .map(|&(p, x, y)| {
                        let mut v = Comb::zero();
                        if n == 0 {
                            return v;
                        }
                        if p > 0 {
                            for (&x2, c) in self.boundary(p, &Comb::basis(x, ring)).iter() {
                                v.add_term(index[n - 1][&(p - 1, x2, y)], c.clone());
                            }
                        }
                        if n - p > 0 {
                            for (&y2, c) in other.boundary(n - p, &Comb::basis(y, ring)).iter() {
                                v.add_term(index[n - 1][&(p, x, y2)], c * &sign(ring, p));
                            }
                        }
                        v
                    })
                    .collect(),
            );
        }
        TensorComplex { complex: ChainComplex { ring, labels, d }, gens, index }
    }

    pub fn to_fixture(&self) -> ChainFixture {
        let ranks = (0..=self.dim()).map(|n| self.rank(n)).collect();
        let mut d = BTreeMap::new();
        for n in 1..=self.dim() {
            let rows = (0..self.rank(n - 1)).map(|r| self.d[n].iter().map(|col| col.coeff(&r, self.ring).to_string()).collect()).collect();
            d.insert(n.to_string(), rows);
        }
        ChainFixture { ring: self.ring.to_string(), ranks, d }
    }

    pub fn from_fixture(fx: &ChainFixture) -> Result<ChainComplex> {
        let ring = Ring::parse(&fx.ring)?;
        let mut d: Cols = vec![vec![Comb::zero(); fx.ranks.first().copied().unwrap_or(0)]];
        for n in 1..fx.ranks.len() {
            let rows = fx.d.get(&n.to_string()).cloned().unwrap_or_default();
            let mut cols = vec![Comb::zero(); fx.ranks[n]];
            if !rows.is_empty() && (rows.len() != fx.ranks[n - 1] || rows.iter().any(|r| r.len() != fx.ranks[n])) {
                return Err(Error::Parse(format!("boundary matrix of degree {n} has the wrong shape")));
            }
            for (r, row) in rows.iter().enumerate() {
                for (c, s) in row.iter().enumerate() {
                    cols[c].add_term(r, Scalar::parse(s, ring)?);
                }
            }
            d.push(cols);
        }
        ChainComplex::new(ring, &fx.ranks, d)
    }
}

/// Serialized chain complex: ranks and row-major boundary matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainFixture {
    pub ring: String,
    pub ranks: Vec<usize>,
    pub d: BTreeMap<String, Vec<Vec<String>>>,
}

/// A tensor product complex with its summand bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorComplex {
    pub complex: ChainComplex,
    /// `gens[n][g] = (p, x, y)` with `x ∈ C_p`, `y ∈ D_{n-p}`.
    pub gens: Vec<Vec<(usize, usize, usize)>>,
    pub index: Vec<BTreeMap<(usize, usize, usize), usize>>,
}

/// A degreewise map of chain complexes.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    pub maps: Cols,
}

impl ChainMap {
    pub fn apply(&self, n: usize, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&g| self.maps[n][g].clone())
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        ChainMap { maps: (0..=c.dim()).map(|n| (0..c.rank(n)).map(|g| Comb::basis(g, c.ring)).collect()).collect() }
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        ChainMap { maps: first.maps.iter().enumerate().map(|(n, l)| l.iter().map(|v| self.apply(n, v)).collect()).collect() }
    }

    /// `f ∂ = ∂ f` in every degree up to the common dimension.
    pub fn check(&self, src: &ChainComplex, tgt: &ChainComplex) -> std::result::Result<(), Witness> {
        let dim = src.dim().min(tgt.dim());
        for n in 0..=dim {
            for g in 0..src.rank(n) {
                let e = Comb::basis(g, src.ring);
                if self.apply(n, &e).keys().any(|&h| h >= tgt.rank(n)) {
                    return Err(Witness::new("chain map typing", &[n], &src.labels[n][g], &[]));
                }
                if n > 0 && self.apply(n - 1, &src.boundary(n, &e)) != tgt.boundary(n, &self.apply(n, &e)) {
                    return Err(Witness::new("chain map commutes with the boundary", &[n], &src.labels[n][g], &[format!("d[{n}]")]));
                }
            }
        }
        Ok(())
    }

    /// Bijective in every degree up to the common dimension.
    pub fn is_iso(&self, src: &ChainComplex, tgt: &ChainComplex) -> Result<bool> {
        for n in 0..=src.dim().min(tgt.dim()) {
            if src.rank(n) != tgt.rank(n) {
                return Ok(false);
            }
            for h in 0..tgt.rank(n) {
                if exact_solve(&self.maps[n], &Comb::basis(h, tgt.ring), tgt.ring)?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `f ⊗ g` between tensor complexes.
    pub fn tensor(&self, g: &ChainMap, src: &TensorComplex, tgt: &TensorComplex) -> ChainMap {
        let ring = src.complex.ring;
        let maps = src
            .gens
            .iter()
            .enumerate()
            .map(|(n, l)| {
                l.iter()
                    .map(|&(p, x, y)| {
                        let mut v = Comb::zero();
                        for (&x2, c) in self.apply(p, &Comb::basis(x, ring)).iter() {
                            for (&y2, d) in g.apply(n - p, &Comb::basis(y, ring)).iter() {
                                v.add_term(tgt.index[n][&(p, x2, y2)], c * d);
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        ChainMap { maps }
    }
}

/// An augmented simplicial module truncated at level `top`. Levels start at
/// `-1`; storage is shifted by one, so slot `k` holds level `k - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugSimplicial {
    pub ring: Ring,
    pub top: isize,
    pub labels: Vec<Vec<String>>,
    /// `faces[k][i][g]` for level `k - 1 ≥ 0` and `0 ≤ i ≤ k - 1`.
    pub faces: Cols3,
    /// `degens[k][i][g]` for level `0 ≤ k - 1 < top`.
    pub degens: Cols3,
}

pub type Cols3 = Vec<Vec<Vec<Comb<usize>>>>;

fn slot(l: isize) -> usize {
    (l + 1) as usize
}

impl AugSimplicial {
    pub fn rank(&self, l: isize) -> usize {
        self.labels[slot(l)].len()
    }

    pub fn face(&self, l: isize, i: usize, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&g| self.faces[slot(l)][i][g].clone())
    }

    pub fn degen(&self, l: isize, i: usize, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&g| self.degens[slot(l)][i][g].clone())
    }

    fn empty(ring: Ring, labels: Vec<Vec<String>>) -> AugSimplicial {
        let top = labels.len() as isize - 2;
        let faces = (0..labels.len()).map(|k| if k == 0 { vec![] } else { vec![vec![Comb::zero(); labels[k].len()]; k] }).collect();
        let degens = (0..labels.len()).map(|k| if k == 0 || k + 1 == labels.len() { vec![] } else { vec![vec![Comb::zero(); labels[k].len()]; k] }).collect();
        AugSimplicial { ring, top, labels, faces, degens }
    }

    /// `A(f)` for an augmented morphism `f: [m] -> [l]`, via its normal form.
    pub fn act(&self, f: &AugMorphism, v: &Comb<usize>) -> Comb<usize> {
        let n = f.target_dim();
        let im: Vec<usize> = {
            let mut x = f.values.clone();
            x.dedup();
            x
        };
        let mut out = v.clone();
        let mut level = n;
        for i in (0..f.target_len).rev().filter(|i| !im.contains(i)) {
            out = self.face(level, i, &out);
            level -= 1;
        }
        let sigmas: Vec<usize> = (0..f.values.len().saturating_sub(1)).filter(|&k| f.values[k] == f.values[k + 1]).collect();
        for &j in sigmas.iter() {
            out = self.degen(level, j, &out);
            level += 1;
        }
        out
    }

    /// Augmented simplicial identities.
    pub fn check(&self) -> std::result::Result<(), Witness> {
        let ring = self.ring;
        for l in 0..=self.top {
            for g in 0..self.rank(l) {
                let e = Comb::basis(g, ring);
                let name = &self.labels[slot(l)][g];
                let lu = l as usize;
                for j in 0..=lu {
                    for i in 0..j {
                        if l >= 1 && self.face(l - 1, i, &self.face(l, j, &e)) != self.face(l - 1, j - 1, &self.face(l, i, &e)) {
                            return Err(Witness::new("simplicial identity d_i d_j", &[lu, i, j], name, &[]));
                        }
                    }
                }
                if l == self.top {
                    continue;
                }
                for j in 0..=lu {
                    let s = self.degen(l, j, &e);
                    for i in 0..=lu + 1 {
                        let rhs = if i == j || i == j + 1 {
                            e.clone()
                        } else if i < j {
                            self.degen(l - 1, j - 1, &self.face(l, i, &e))
                        } else {
                            self.degen(l - 1, j, &self.face(l, i - 1, &e))
                        };
                        if self.face(l + 1, i, &s) != rhs {
                            return Err(Witness::new("simplicial identity d_i s_j", &[lu, i, j], name, &[]));
                        }
                    }
                    if l + 1 < self.top {
                        for i in 0..=j {
                            if self.degen(l + 1, i, &s) != self.degen(l + 1, j + 1, &self.degen(l, i, &e)) {
                                return Err(Witness::new("simplicial identity s_i s_j", &[lu, i, j], name, &[]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The free module on `Δⁿ₊`, up to level `top`.
    pub fn free_simplex(n: usize, top: isize, ring: Ring) -> AugSimplicial {
        let maps: Vec<Vec<AugMorphism>> = (-1..=top)
            .map(|l| if l < 0 { vec![AugMorphism { target_len: n + 1, values: vec![] }] } else { monotone_maps(l as usize, n).into_iter().map(|f| AugMorphism { target_len: n + 1, values: f.values }).collect() })
            .collect();
        let index: Vec<BTreeMap<Vec<usize>, usize>> = maps.iter().map(|l| l.iter().enumerate().map(|(i, f)| (f.values.clone(), i)).collect()).collect();
        let labels = maps.iter().map(|l| l.iter().map(|f| if f.values.is_empty() { "∅".to_string() } else { format!("[{}]", f.values.iter().map(|v| v.to_string()).collect::<String>()) }).collect()).collect();
        let mut a = AugSimplicial::empty(ring, labels);
        for l in 0..=top {
            let k = slot(l);
            for (g, f) in maps[k].iter().enumerate() {
                for i in 0..=l as usize {
                    let d = f.compose(&AugMorphism::face(l as usize + 1, i));
                    a.faces[k][i][g] = Comb::basis(index[k - 1][&d.values], ring);
                }
                if l < top {
                    for i in 0..=l as usize {
                        let s = f.compose(&AugMorphism::degeneracy(l as usize + 1, i));
                        a.degens[k][i][g] = Comb::basis(index[k + 1][&s.values], ring);
                    }
                }
            }
        }
        a
    }

    /// The join `A ⊗ B`, `(A⊗B)_n = ⊕_{k+l+1=n} A_k ⊗ B_l`.
    pub fn join(&self, other: &AugSimplicial) -> Join {
        let ring = self.ring;
        let top = self.top.min(other.top) - 1;
        let mut gens: Vec<Vec<(isize, usize, usize)>> = Vec::new();
        for n in -1..=top {
            let mut lv = Vec::new();
            for k in -1..=n {
                let l = n - k - 1;
                for a in 0..self.rank(k) {
                    for b in 0..other.rank(l) {
                        lv.push((k, a, b));
                    }
                }
            }
            gens.push(lv);
        }
        let index: Vec<BTreeMap<(isize, usize, usize), usize>> = gens.iter().map(|l| l.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect();
        let labels = gens
            .iter()
            .enumerate()
            .map(|(s, l)| {
                let n = s as isize - 1;
                l.iter().map(|&(k, a, b)| format!("{}⋆{}", self.labels[slot(k)][a], other.labels[slot(n - k - 1)][b])).collect()
            })
            .collect();
        let mut j = AugSimplicial::empty(ring, labels);
        let pair = |n: isize, k: isize, x: &Comb<usize>, y: &Comb<usize>| -> Comb<usize> {
            let mut v = Comb::zero();
            for (&a, c) in x.iter() {
                for (&b, d) in y.iter() {
                    v.add_term(index[slot(n)][&(k, a, b)], c * d);
                }
            }
            v
        };
        for n in 0..=top {
            for (g, &(k, a, b)) in gens[slot(n)].iter().enumerate() {
                let l = n - k - 1;
                let (ea, eb) = (Comb::basis(a, ring), Comb::basis(b, ring));
                for i in 0..=n as usize {
                    j.faces[slot(n)][i][g] = if (i as isize) <= k {
                        pair(n - 1, k - 1, &self.face(k, i, &ea), &eb)
                    } else {
                        pair(n - 1, k, &ea, &other.face(l, i - (k + 1) as usize, &eb))
                    };
                }
                if n < top {
                    for i in 0..=n as usize {
                        j.degens[slot(n)][i][g] = if (i as isize) <= k {
                            pair(n + 1, k + 1, &self.degen(k, i, &ea), &eb)
                        } else {
                            pair(n + 1, k, &ea, &other.degen(l, i - (k + 1) as usize, &eb))
                        };
                    }
                }
            }
        }
        Join { module: j, gens, index }
    }
}

/// A join with its summand bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Join {
    pub module: AugSimplicial,
    /// `gens[l+1][g] = (k, a, b)` with `a ∈ A_k`, `b ∈ B_{l-k-1}`.
    pub gens: Vec<Vec<(isize, usize, usize)>>,
    pub index: Vec<BTreeMap<(isize, usize, usize), usize>>,
}

/// A levelwise map of augmented simplicial modules.
#[derive(Clone, Debug, PartialEq)]
pub struct AugMap {
    /// `maps[l+1][g]`.
    pub maps: Cols,
}

impl AugMap {
    pub fn apply(&self, l: isize, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&g| self.maps[slot(l)][g].clone())
    }

    /// The map of free modules induced by a monotone `f: [n] -> [n']`.
    pub fn free_simplex_map(f: &Mor, src: &AugSimplicial, tgt: &AugSimplicial) -> AugMap {
        let ring = src.ring;
        let maps = (-1..=src.top.min(tgt.top))
            .map(|l| {
                (0..src.rank(l))
                    .map(|g| {
                        let label = &src.labels[slot(l)][g];
                        let image: String = if label == "∅" {
                            "∅".into()
                        } else {
                            let vals: Vec<usize> = label.trim_matches(|c| c == '[' || c == ']').chars().map(|c| f.at(c.to_digit(10).unwrap() as usize)).collect();
                            format!("[{}]", vals.iter().map(|v| v.to_string()).collect::<String>())
                        };
                        let h = tgt.labels[slot(l)].iter().position(|x| *x == image).expect("image simplex");
                        Comb::basis(h, ring)
                    })
                    .collect()
            })
            .collect();
        AugMap { maps }
    }

    /// Commutes with all faces and degeneracies.
    pub fn check(&self, src: &AugSimplicial, tgt: &AugSimplicial) -> std::result::Result<(), Witness> {
        let top = src.top.min(tgt.top);
        for l in -1..=top {
            for g in 0..src.rank(l) {
                let e = Comb::basis(g, src.ring);
                let img = self.apply(l, &e);
                let name = &src.labels[slot(l)][g];
                if l >= 0 {
                    for i in 0..=l as usize {
                        if self.apply(l - 1, &src.face(l, i, &e)) != tgt.face(l, i, &img) {
                            return Err(Witness::new("map commutes with faces", &[l as usize, i], name, &[]));
                        }
                    }
                    if l < top {
                        for i in 0..=l as usize {
                            if self.apply(l + 1, &src.degen(l, i, &e)) != tgt.degen(l, i, &img) {
                                return Err(Witness::new("map commutes with degeneracies", &[l as usize, i], name, &[]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_iso(&self, src: &AugSimplicial, tgt: &AugSimplicial) -> Result<bool> {
        for l in -1..=src.top.min(tgt.top) {
            if src.rank(l) != tgt.rank(l) {
                return Ok(false);
            }
            for h in 0..tgt.rank(l) {
                if exact_solve(&self.maps[slot(l)], &Comb::basis(h, tgt.ring), tgt.ring)?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `f ⋆ g` on joins.
    pub fn join(&self, g: &AugMap, src: &Join, tgt: &Join) -> AugMap {
        let ring = src.module.ring;
        let maps = src
            .gens
            .iter()
            .enumerate()
            .map(|(s, lv)| {
                let n = s as isize - 1;
                lv.iter()
                    .map(|&(k, a, b)| {
                        let mut v = Comb::zero();
                        for (&a2, c) in self.apply(k, &Comb::basis(a, ring)).iter() {
                            for (&b2, d) in g.apply(n - k - 1, &Comb::basis(b, ring)).iter() {
                                v.add_term(tgt.index[s][&(k, a2, b2)], c * d);
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        AugMap { maps }
    }
}

/// `Ñ(A)` with the data needed to take classes.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub complex: ChainComplex,
    /// Echelon of the degenerate part of `A_{n-1}`, per degree `n`.
    degenerate: Vec<Echelon>,
    /// Generators of `Ñ_n` as free columns of `A_{n-1}`.
    pub columns: Vec<Vec<usize>>,
}

impl Normalized {
    /// The class of `v ∈ A_{n-1}` in `Ñ_n`.
    pub fn class(&self, n: usize, v: &Comb<usize>) -> Comb<usize> {
        let r = self.degenerate[n].reduce(v);
        r.map_keys(|c| self.columns[n].binary_search(c).expect("reduced vector lies on free columns"))
    }
}

/// `Ñ_n(A) = A_{n-1} / Σ s_i(A_{n-2})` with `∂ = Σ (-1)^i d̄_i`.
pub fn normalize(a: &AugSimplicial) -> Result<Normalized> {
    let ring = a.ring;
    let dim = (a.top + 1) as usize;
    let mut degenerate = Vec::new();
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=dim {
        let l = n as isize - 1;
        let mut rows = Vec::new();
        if l >= 1 {
            for i in 0..l as usize {
                for g in 0..a.rank(l - 1) {
                    let v = a.degen(l - 1, i, &Comb::basis(g, ring));
                    if !ring.is_field() && !(v.len() == 1 && v.first().map_or(false, |(_, c)| c.is_one() || (-c).is_one())) {
                        return Err(Error::Refused(format!("degree {n}: degenerate part is not spanned by basis elements over Z")));
                    }
                    rows.push(v);
                }
            }
        }
        let e = Echelon::from_rows(a.rank(l), rows);
        let free = e.free_columns();
        labels.push(free.iter().map(|&g| a.labels[slot(l)][g].clone()).collect::<Vec<_>>());
        degenerate.push(e);
        columns.push(free);
    }
    let mut out = Normalized { complex: ChainComplex { ring, labels, d: Vec::new() }, degenerate, columns };
    let mut d = vec![vec![Comb::zero(); out.columns[0].len()]];
    for n in 1..=dim {
        let l = n as isize - 1;
        let col = out.columns[n]
            .iter()
            .map(|&g| {
                let mut v = Comb::zero();
                for i in 0..=l as usize {
                    v.add_scaled(&a.face(l, i, &Comb::basis(g, ring)), &sign(ring, i));
                }
                out.class(n - 1, &v)
            })
            .collect();
        d.push(col);
    }
    out.complex.d = d;
    Ok(out)
}

/// `Ñ(α)`.
pub fn normalize_map(alpha: &AugMap, src: &Normalized, tgt: &Normalized) -> ChainMap {
    let ring = src.complex.ring;
    let maps = src
        .columns
        .iter()
        .enumerate()
        .take(tgt.columns.len())
        .map(|(n, cols)| cols.iter().map(|&g| tgt.class(n, &alpha.apply(n as isize - 1, &Comb::basis(g, ring)))).collect())
        .collect();
    ChainMap { maps }
}

/// A subset `I ⊆ [l]` as a bit mask.
pub type Mask = u32;

/// Element of `⊕_{I ⊆ [l]} C_{|I|}`, keyed by `(I, basis index)`.
pub type Family = Comb<(Mask, usize)>;

pub fn mask_len(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn mask_elems(m: Mask) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

pub fn mask_of(elems: &[usize]) -> Mask {
    elems.iter().fold(0, |m, &i| m | 1 << i)
}

/// `Γ̃(C)` with its families.
#[derive(Clone, Debug, PartialEq)]
pub struct Gamma {
    pub complex: ChainComplex,
    pub module: AugSimplicial,
    /// `basis[l+1][g]` as a family over `[l]`.
    pub basis: Vec<Vec<Family>>,
}

impl Gamma {
    pub fn family(&self, l: isize, v: &Comb<usize>) -> Family {
        v.bind(|&g| self.basis[slot(l)][g].clone())
    }

    /// Coordinates of a family satisfying the boundary conditions.
    pub fn coords(&self, l: isize, f: &Family) -> Result<Comb<usize>> {
        let ring = self.complex.ring;
        match exact_solve(&self.basis[slot(l)], f, ring)? {
            Some(x) => Ok(x.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()),
            None => Err(Error::Invariant(format!("family is not in level {l} of the nerve of the complex"))),
        }
    }

    /// `(a_I) ↦ (a_{f(J)})_J`, zero where `f|_J` is not injective.
    pub fn act_family(&self, f: &AugMorphism, a: &Family) -> Family {
        let m = f.values.len();
        let mut out = Family::zero();
        for j in 0..(1u32 << m) {
            let img: Mask = mask_elems(j).iter().fold(0, |acc, &x| acc | 1 << f.values[x]);
            if mask_len(img) != mask_len(j) {
                continue;
            }
            for (&(i, g), c) in a.iter() {
                if i == img {
                    out.add_term((j, g), c.clone());
                }
            }
        }
        out
    }

    /// Whether `(a_I)` satisfies `∂a_I = Σ_j (-1)^j a_{I∖i_j}` for all `I ⊆ [l]`.
    pub fn conditions(c: &ChainComplex, l: isize, a: &Family) -> std::result::Result<(), Witness> {
        let ring = c.ring;
        let size = (l + 1) as usize;
        for i in 1u32..(1 << size) {
            let k = mask_len(i);
            if k > c.dim() {
                continue;
            }
            let comp: Comb<usize> = a.iter().filter(|((m, _), _)| *m == i).map(|((_, g), x)| (*g, x.clone())).collect();
            let mut rhs: Comb<usize> = Comb::zero();
            for (j, &e) in mask_elems(i).iter().enumerate() {
                let sub = i & !(1 << e);
                for ((m, g), x) in a.iter() {
                    if *m == sub {
                        rhs.add_term(*g, x * &sign(ring, j));
                    }
                }
            }
            if c.boundary(k, &comp) != rhs {
                return Err(Witness::new("boundary condition of the family", &mask_elems(i), "", &[]));
            }
        }
        Ok(())
    }
}

/// `Γ̃(C)` up to level `dim(C) - 1`.
pub fn gamma(c: &ChainComplex) -> Result<Gamma> {
    let ring = c.ring;
    let top = c.dim() as isize - 1;
    let mut basis: Vec<Vec<Family>> = Vec::new();
    for l in -1..=top {
        let size = (l + 1) as usize;
        let vars: Vec<(Mask, usize)> = (0u32..(1 << size)).flat_map(|i| (0..c.rank(mask_len(i))).map(move |g| (i, g))).collect();
        // One column per variable: its contribution to each condition (I, basis of C_{|I|-1}).
        let cols: Vec<Comb<(Mask, usize)>> = vars
            .iter()
            .map(|&(i, g)| {
                let k = mask_len(i);
                let mut col: Comb<(Mask, usize)> = Comb::zero();
                if k >= 1 {
                    for (&h, x) in c.boundary(k, &Comb::basis(g, ring)).iter() {
                        col.add_term((i, h), x.clone());
                    }
                }
                for e in 0..size {
                    if i >> e & 1 == 0 {
                        let sup = i | 1 << e;
                        if mask_len(sup) > c.dim() {
                            continue;
                        }
                        let j = mask_elems(sup).iter().position(|&x| x == e).unwrap();
                        col.add_term((sup, g), -sign(ring, j));
                    }
                }
                col
            })
            .collect();
        let ker = exact_kernel(&cols, ring);
        basis.push(ker.iter().map(|v| v.map_keys(|&x| vars[x])).collect());
    }
    let labels = basis.iter().enumerate().map(|(s, l)| (0..l.len()).map(|g| format!("γ{}#{g}", s as isize - 1)).collect()).collect();
    let mut out = Gamma { complex: c.clone(), module: AugSimplicial::empty(ring, labels), basis };
    for l in 0..=top {
        let s = slot(l);
        for g in 0..out.basis[s].len() {
            for i in 0..=l as usize {
                let f = out.act_family(&AugMorphism::face(l as usize + 1, i), &out.basis[s][g]);
                out.module.faces[s][i][g] = out.coords(l - 1, &f)?;
            }
            if l < top {
                for i in 0..=l as usize {
                    let f = out.act_family(&AugMorphism::degeneracy(l as usize + 1, i), &out.basis[s][g]);
                    out.module.degens[s][i][g] = out.coords(l + 1, &f)?;
                }
            }
        }
    }
    Ok(out)
}

/// `Ñ(Γ̃(C)) -> C`: a family goes to its top component `a_{[n-1]}`.
pub fn counit(g: &Gamma, n: &Normalized) -> ChainMap {
    let maps = n
        .columns
        .iter()
        .enumerate()
        .map(|(d, cols)| {
            let top: Mask = if d == 0 { 0 } else { (1 << d) - 1 };
            cols.iter().map(|&b| g.basis[d][b].iter().filter(|((m, _), _)| *m == top).map(|((_, x), c)| (*x, c.clone())).collect()).collect()
        })
        .collect();
    ChainMap { maps }
}

/// `A -> Γ̃(Ñ(A))`: `x ↦ ([A(ι_I) x])_I` with `ι_I: [|I|-1] -> [l]` the inclusion of `I`.
pub fn unit(a: &AugSimplicial, n: &Normalized, g: &Gamma) -> Result<AugMap> {
    let ring = a.ring;
    let mut maps = Vec::new();
    for l in -1..=a.top.min(g.module.top) {
        let size = (l + 1) as usize;
        let mut col = Vec::new();
        for x in 0..a.rank(l) {
            let mut fam = Family::zero();
            for i in 0u32..(1 << size) {
                let inc = AugMorphism { target_len: size, values: mask_elems(i) };
                let v = a.act(&inc, &Comb::basis(x, ring));
                for (&h, c) in n.class(mask_len(i), &v).iter() {
                    fam.add_term((i, h), c.clone());
                }
            }
            col.push(g.coords(l, &fam)?);
        }
        maps.push(col);
    }
    Ok(AugMap { maps })
}

/// `μ_{A,B}: Ñ(A ⊗ B) -> Ñ(A) ⊗ Ñ(B)`, sending `[a ⋆ b]` to `[a] ⊗ [b]`.
pub fn monoidal_iso(j: &Join, nj: &Normalized, na: &Normalized, nb: &Normalized, t: &TensorComplex) -> ChainMap {
    let ring = j.module.ring;
    let dim = nj.complex.dim().min(t.complex.dim());
    let maps = (0..=dim)
        .map(|n| {
            nj.columns[n]
                .iter()
                .map(|&g| {
                    let (k, a, b) = j.gens[n][g];
                    let p = (k + 1) as usize;
                    let mut v = Comb::zero();
                    for (&x, c) in na.class(p, &Comb::basis(a, ring)).iter() {
                        for (&y, d) in nb.class(n - p, &Comb::basis(b, ring)).iter() {
                            v.add_term(t.index[n][&(p, x, y)], c * d);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    ChainMap { maps }
}

/// Everything needed to compare the two bracketings of `Ñ(A ⊗ B ⊗ C)`.
pub fn check_monoidal_associativity(a: &AugSimplicial, b: &AugSimplicial, c: &AugSimplicial) -> Result<std::result::Result<(), Witness>> {
    let ring = a.ring;
    let (na, nb, nc) = (normalize(a)?, normalize(b)?, normalize(c)?);
    let ab = a.join(b);
    let bc = b.join(c);
    let ab_c = ab.module.join(c);
    let a_bc = a.join(&bc.module);
    let (nab, nbc) = (normalize(&ab.module)?, normalize(&bc.module)?);
    let (nab_c, na_bc) = (normalize(&ab_c.module)?, normalize(&a_bc.module)?);
    let dim = nab_c.complex.dim().min(na_bc.complex.dim());
    // Each path ends in triples (p, q, x, y, z) of normalized generators.
    type Triple = (usize, usize, usize, usize, usize);
    for n in 0..=dim {
        for &g in &nab_c.columns[n] {
            let (k, u, z) = ab_c.gens[n][g];
            let (k1, x, y) = ab.gens[slot(k)][u];
            let lhs: Comb<Triple> = {
                let mut out = Comb::zero();
                let p_ab = (k + 1) as usize;
                for (&w, c1) in nab.class(p_ab, &Comb::basis(u, ring)).iter() {
                    let (kk, xx, yy) = ab.gens[p_ab][nab.columns[p_ab][w]];
                    let p = (kk + 1) as usize;
                    for (&zx, c2) in na.class(p, &Comb::basis(xx, ring)).iter() {
                        for (&zy, c3) in nb.class(p_ab - p, &Comb::basis(yy, ring)).iter() {
                            for (&zz, c4) in nc.class(n - p_ab, &Comb::basis(z, ring)).iter() {
                                out.add_term((p, p_ab - p, zx, zy, zz), &(&(c1 * c2) * c3) * c4);
                            }
                        }
                    }
                }
                out
            };
            // The same generator bracketed the other way.
            let kb = k - k1 - 1;
            let bc_level = n as isize - 1 - k1 - 1;
            let Some(&w) = bc.index[slot(bc_level)].get(&(kb, y, z)) else {
                return Ok(Err(Witness::new("associator lookup", &[n], &nab_c.complex.labels[n][0], &[])));
            };
            let Some(&_h) = a_bc.index[n].get(&(k1, x, w)) else {
                return Ok(Err(Witness::new("associator lookup", &[n], &nab_c.complex.labels[n][0], &[])));
            };
            let rhs: Comb<Triple> = {
                let mut out = Comb::zero();
                let p = (k1 + 1) as usize;
                for (&zx, c1) in na.class(p, &Comb::basis(x, ring)).iter() {
                    for (&w2, c2) in nbc.class(n - p, &Comb::basis(w, ring)).iter() {
                        let (kb2, yy, zz) = bc.gens[n - p][nbc.columns[n - p][w2]];
                        let q = (kb2 + 1) as usize;
                        for (&zy, c3) in nb.class(q, &Comb::basis(yy, ring)).iter() {
                            for (&zc, c4) in nc.class(n - p - q, &Comb::basis(zz, ring)).iter() {
                                out.add_term((p, q, zx, zy, zc), &(&(c1 * c2) * c3) * c4);
                            }
                        }
                    }
                }
                out
            };
            if lhs != rhs {
                return Ok(Err(Witness::new("monoidal iso associative", &[n], &nab_c.complex.labels[n][nab_c.columns[n].iter().position(|&x| x == g).unwrap()], &[])));
            }
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalized_simplex_ranks() {
        let a = AugSimplicial::free_simplex(1, 2, Ring::Q);
        a.check().unwrap();
        let n = normalize(&a).unwrap();
        let ranks: Vec<usize> = (0..=n.complex.dim()).map(|d| n.complex.rank(d)).collect();
        assert_eq!(ranks, vec![1, 2, 1, 0]);
        let d2 = &n.complex.d[2][0];
        let zero = n.complex.labels[1].iter().position(|l| l == "[0]").unwrap();
        let one = n.complex.labels[1].iter().position(|l| l == "[1]").unwrap();
        assert_eq!(d2.coeff(&one, Ring::Q), Ring::Q.one());
        assert_eq!(d2.coeff(&zero, Ring::Q), -Ring::Q.one());
    }

    #[test]
    fn gamma_of_unit_complex() {
        let c = ChainComplex::concentrated(Ring::Q, vec!["k".into()], 3);
        let g = gamma(&c).unwrap();
        g.module.check().unwrap();
        assert_eq!(g.module.rank(-1), 1);
        assert!((0..=2).all(|l| g.module.rank(l) == 0));
    }

    #[test]
    fn round_trips_on_random_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for ring in [Ring::Q, Ring::Z] {
            let c = ChainComplex::random(ring, 3, 2, &mut rng);
            c.check().unwrap();
            let g = gamma(&c).unwrap();
            g.module.check().unwrap();
            let n = normalize(&g.module).unwrap();
            let e = counit(&g, &n);
            e.check(&n.complex, &c).unwrap();
            assert!(e.is_iso(&n.complex, &c).unwrap());
            let a = AugSimplicial::free_simplex(2, 2, ring);
            let na = normalize(&a).unwrap();
            let ga = gamma(&na.complex).unwrap();
            let u = unit(&a, &na, &ga).unwrap();
            u.check(&a, &ga.module).unwrap();
            assert!(u.is_iso(&a, &ga.module).unwrap());
        }
    }

    #[test]
    fn join_and_monoidal_iso() {
        let a = AugSimplicial::free_simplex(1, 3, Ring::Q);
        let b = AugSimplicial::free_simplex(0, 3, Ring::Q);
        let j = a.join(&b);
        j.module.check().unwrap();
        let (na, nb, nj) = (normalize(&a).unwrap(), normalize(&b).unwrap(), normalize(&j.module).unwrap());
        let t = na.complex.tensor(&nb.complex);
        t.complex.check().unwrap();
        let mu = monoidal_iso(&j, &nj, &na, &nb, &t);
        mu.check(&nj.complex, &t.complex).unwrap();
        assert!(mu.is_iso(&nj.complex, &t.complex).unwrap());
        check_monoidal_associativity(&b, &a, &b).unwrap().unwrap();
    }
}
