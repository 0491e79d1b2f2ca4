//! Truncated templicial modules.
//!
//! A [`Templicial`] stores, for each level `n ≤ dim`, a list of generators
//! with their (source, target) vertices; the quiver `X_n` is the free quiver
//! on them. Structure maps are stored as images of generators: inner faces,
//! degeneracies, the comultiplications `μ_{k,l}` for `k, l ≥ 1` and the
//! counit on level 0. Comultiplications with a zero index are induced by the
//! counit and never stored.
//!
//! Elements of `X_{k_1} ⊗_S … ⊗_S X_{k_m}` are [`Tensor`]s: combinations of
//! generator tuples, the levels being implied by context.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactcore::{kernel_basis, kernel_rows, solve_affine, tensor_combs, Comb, Echelon, FreeModule, LinearMap, Ring, Scalar};
use crate::quiver::{Quiver, QuiverMap};
use crate::simplicial::{FinCategory, SimplicialSet};
use crate::{Error, Result};

pub type Tensor = Comb<Vec<usize>>;

/// A basis element of some `X_n(src, tgt)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub src: usize,
    pub tgt: usize,
    pub label: String,
}

/// The first identity found to fail, with the structure maps it involves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub identity: String,
    pub indices: Vec<usize>,
    pub generator: String,
    pub involved: Vec<String>,
}

impl Witness {
    pub fn new(identity: &str, indices: &[usize], generator: &str, involved: &[String]) -> Witness {
        Witness { identity: identity.into(), indices: indices.to_vec(), generator: generator.into(), involved: involved.to_vec() }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?} at {} (involving {})", self.identity, self.indices, self.generator, self.involved.join(", "))
    }
}

pub fn mu_name(k: usize, l: usize) -> String {
    format!("mu[{k},{l}]")
}

pub fn d_name(n: usize, j: usize) -> String {
    format!("d[{n},{j}]")
}

pub fn s_name(n: usize, i: usize) -> String {
    format!("s[{n},{i}]")
}

/// `x` viewed as a one-factor tensor.
pub fn single(x: &Comb<usize>) -> Tensor {
    x.map_keys(|&g| vec![g])
}

/// Applies `f(position, generator)` to every factor and tensors the results.
pub fn map_factors(t: &Tensor, mut f: impl FnMut(usize, usize) -> Tensor) -> Tensor {
    let mut out = Tensor::zero();
    for (key, c) in t.iter() {
        let mut acc = Tensor::term(Vec::new(), c.clone());
        for (pos, &g) in key.iter().enumerate() {
            if acc.is_zero() {
                break;
            }
            acc = tensor_combs(&acc, &f(pos, g));
        }
        out.add_assign(&acc);
    }
    out
}

/// Solves `Σ x_i cols[i] = rhs` exactly.
pub fn exact_solve<K: Ord + Clone>(cols: &[Comb<K>], rhs: &Comb<K>, ring: Ring) -> Result<Option<Vec<Scalar>>> {
    let (keys, a) = system(cols, Some(rhs), ring);
    let b: Vec<Scalar> = keys.iter().map(|k| rhs.coeff(k, ring)).collect();
    solve_affine(&a, &b)
}

/// Kernel of `x ↦ Σ x_i cols[i]`; over ℤ a basis of the kernel lattice.
pub fn exact_kernel<K: Ord + Clone>(cols: &[Comb<K>], ring: Ring) -> Vec<Comb<usize>> {
    let (_, a) = system(cols, None, ring);
    if ring.is_field() {
        kernel_rows(cols.len(), a.rows(), ring)
    } else {
        kernel_basis(&a).iter().map(|v| vec_to_comb(v)).collect()
    }
}

fn system<K: Ord + Clone>(cols: &[Comb<K>], rhs: Option<&Comb<K>>, ring: Ring) -> (Vec<K>, LinearMap) {
    let mut keys: BTreeSet<K> = BTreeSet::new();
    for c in cols.iter().chain(rhs) {
        keys.extend(c.keys().cloned());
    }
    let keys: Vec<K> = keys.into_iter().collect();
    let pos: BTreeMap<&K, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let dense = cols.iter().map(|c| c.map_keys(|k| pos[k])).collect();
    let a = LinearMap { domain: FreeModule::standard(ring, cols.len()), codomain: FreeModule::standard(ring, keys.len()), cols: dense };
    (keys, a)
}

fn vec_to_comb(v: &[Scalar]) -> Comb<usize> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

/// A templicial module truncated at `dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Templicial {
    pub ring: Ring,
    pub base: Vec<String>,
    pub dim: usize,
    pub levels: Vec<Vec<Gen>>,
    /// `faces[n][j][g] = d_j(g)`, populated for inner `0 < j < n` only.
    pub faces: Vec<Vec<Vec<Comb<usize>>>>,
    /// `degens[n][i][g] = s_i(g)` for `n < dim`.
    pub degens: Vec<Vec<Vec<Comb<usize>>>>,
    /// `comult[(k,l)][g] = μ_{k,l}(g)` for `k, l ≥ 1`.
    pub comult: BTreeMap<(usize, usize), Vec<Tensor>>,
    /// `ε(g_a)` for each level-0 generator.
    pub counit: Vec<Scalar>,
}

impl Templicial {
    pub fn count(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    pub fn gen(&self, n: usize, g: usize) -> &Gen {
        &self.levels[n][g]
    }

    pub fn label(&self, n: usize, g: usize) -> &str {
        &self.levels[n][g].label
    }

    pub fn gens_between(&self, n: usize, a: usize, b: usize) -> Vec<usize> {
        (0..self.count(n)).filter(|&g| self.levels[n][g].src == a && self.levels[n][g].tgt == b).collect()
    }

    /// The level-0 generator at vertex `a`.
    pub fn unit_gen(&self, a: usize) -> Option<usize> {
        self.levels[0].iter().position(|g| g.src == a && g.tgt == a)
    }

    /// `η_a = ε⁻¹(1_a)`.
    pub fn eta(&self, a: usize) -> Comb<usize> {
        let g = self.unit_gen(a).expect("vertex without a level-0 generator");
        Comb::term(g, self.counit[g].inv().expect("counit is not invertible"))
    }

    /// `ε` on a level-0 element, as one scalar per vertex.
    pub fn counit_of(&self, x: &Comb<usize>) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (&g, c) in x.iter() {
            let a = self.levels[0][g].src;
            let v = c * &self.counit[g];
            let e = out.entry(a).or_insert_with(|| self.ring.zero());
            *e = &*e + &v;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn face(&self, n: usize, j: usize, x: &Comb<usize>) -> Comb<usize> {
        assert!(0 < j && j < n, "only inner faces are stored");
        x.bind(|&g| self.faces[n][j][g].clone())
    }

    pub fn degen(&self, n: usize, i: usize, x: &Comb<usize>) -> Comb<usize> {
        x.bind(|&g| self.degens[n][i][g].clone())
    }

    /// `μ_{k,l}` including the induced zero-index cases.
    pub fn mu(&self, k: usize, l: usize, x: &Comb<usize>) -> Tensor {
        x.bind(|&g| self.mu_gen(k, l, g))
    }

    fn mu_gen(&self, k: usize, l: usize, g: usize) -> Tensor {
        let gen = &self.levels[k + l][g];
        match (k, l) {
            (0, 0) => Tensor::term(vec![g, g], self.counit[g].inv().unwrap()),
            (0, _) => single(&self.eta(gen.src)).bind(|u| Tensor::basis(vec![u[0], g], self.ring)),
            (_, 0) => single(&self.eta(gen.tgt)).bind(|u| Tensor::basis(vec![g, u[0]], self.ring)),
            _ => self.comult[&(k, l)][g].clone(),
        }
    }

    /// Right-nested `μ_{p_1,…,p_m}`; a single part is the identity.
    pub fn mu_multi(&self, parts: &[usize], x: &Comb<usize>) -> Tensor {
        assert!(!parts.is_empty());
        if parts.len() == 1 {
            return single(x);
        }
        let rest: usize = parts[1..].iter().sum();
        let t = self.mu(parts[0], rest, x);
        map_factors(&t, |pos, g| if pos == 0 { Tensor::basis(vec![g], self.ring) } else { self.mu_multi(&parts[1..], &Comb::basis(g, self.ring)) })
    }

    /// `μ_I`; for `ℓ(I) = 0` the unit quiver is identified with `X_0`.
    pub fn mu_partition(&self, i: &crate::intervals::Partition, x: &Comb<usize>) -> Tensor {
        if i.len() == 0 {
            return single(x);
        }
        self.mu_multi(&i.gaps(), x)
    }

    /// `μ_{1,…,1}` on `X_n`.
    pub fn mu_ones(&self, n: usize, x: &Comb<usize>) -> Tensor {
        if n == 0 {
            return single(x);
        }
        self.mu_multi(&vec![1; n], x)
    }

    fn tensor_typed(&self, levels: &[usize], key: &[usize], a: usize, b: usize) -> bool {
        if key.len() != levels.len() {
            return false;
        }
        let mut cur = a;
        for (&n, &g) in levels.iter().zip(key) {
            let Some(gen) = self.levels[n].get(g) else { return false };
            if gen.src != cur {
                return false;
            }
            cur = gen.tgt;
        }
        cur == b
    }

    /// Verifies every templicial axiom up to `dim`; reports the first failure.
    pub fn check(&self) -> std::result::Result<(), Witness> {
        self.check_shapes()?;
        self.check_typing()?;
        self.check_counit()?;
        self.check_simplicial()?;
        self.check_mu_faces()?;
        self.check_mu_degens()?;
        self.check_coassociativity()?;
        Ok(())
    }

    fn check_shapes(&self) -> std::result::Result<(), Witness> {
        let bad = |what: &str| Err(Witness::new(&format!("shape: {what}"), &[], "", &[]));
        if self.levels.len() != self.dim + 1 || self.faces.len() != self.dim + 1 || self.degens.len() != self.dim {
            return bad("level count");
        }
        if self.counit.len() != self.count(0) {
            return bad("counit length");
        }
        for n in 0..=self.dim {
            for j in 1..n {
                if self.faces[n].len() != n + 1 || self.faces[n][j].len() != self.count(n) {
                    return bad(&d_name(n, j));
                }
            }
            if n < self.dim && (self.degens[n].len() != n + 1 || self.degens[n].iter().any(|t| t.len() != self.count(n))) {
                return bad(&format!("degeneracies on level {n}"));
            }
            for k in 1..n {
                match self.comult.get(&(k, n - k)) {
                    Some(t) if t.len() == self.count(n) => {}
                    _ => return bad(&mu_name(k, n - k)),
                }
            }
        }
        Ok(())
    }

    fn check_typing(&self) -> std::result::Result<(), Witness> {
        for n in 0..=self.dim {
            for g in 0..self.count(n) {
                let Gen { src: a, tgt: b, .. } = self.levels[n][g];
                if a >= self.base.len() || b >= self.base.len() {
                    return Err(Witness::new("typing: vertex out of range", &[n], self.label(n, g), &[]));
                }
                for j in 1..n {
                    for &h in self.faces[n][j][g].keys() {
                        if !self.tensor_typed(&[n - 1], &[h], a, b) {
                            return Err(Witness::new("typing: face changes endpoints", &[n, j], self.label(n, g), &[d_name(n, j)]));
                        }
                    }
                }
                if n < self.dim {
                    for i in 0..=n {
                        for &h in self.degens[n][i][g].keys() {
                            if !self.tensor_typed(&[n + 1], &[h], a, b) {
                                return Err(Witness::new("typing: degeneracy changes endpoints", &[n, i], self.label(n, g), &[s_name(n, i)]));
                            }
                        }
                    }
                }
                for k in 1..n {
                    for key in self.comult[&(k, n - k)][g].keys() {
                        if !self.tensor_typed(&[k, n - k], key, a, b) {
                            return Err(Witness::new("typing: comultiplication not composable", &[k, n - k], self.label(n, g), &[mu_name(k, n - k)]));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_counit(&self) -> std::result::Result<(), Witness> {
        for a in 0..self.base.len() {
            let here: Vec<usize> = (0..self.count(0)).filter(|&g| self.levels[0][g].src == a || self.levels[0][g].tgt == a).collect();
            if here.len() != 1 || self.levels[0][here[0]].src != self.levels[0][here[0]].tgt {
                return Err(Witness::new("counit: X_0 is not the unit quiver", &[a], &self.base[a], &["eps".into()]));
            }
            if self.counit[here[0]].inv().is_none() {
                return Err(Witness::new("counit: not invertible", &[a], &self.base[a], &["eps".into()]));
            }
        }
        Ok(())
    }

    fn check_simplicial(&self) -> std::result::Result<(), Witness> {
        for n in 0..=self.dim {
            for g in 0..self.count(n) {
                let x = Comb::basis(g, self.ring);
                let name = self.label(n, g);
                // d_i d_j = d_{j-1} d_i for 0 < i < j < n, both inner.
                for j in 2..n {
                    for i in 1..j {
                        if j - 1 >= n - 1 {
                            continue;
                        }
                        let l = self.face(n - 1, i, &self.face(n, j, &x));
                        let r = self.face(n - 1, j - 1, &self.face(n, i, &x));
                        if l != r {
                            return Err(Witness::new("d_i d_j = d_{j-1} d_i", &[n, i, j], name, &[d_name(n, j), d_name(n - 1, i), d_name(n, i), d_name(n - 1, j - 1)]));
                        }
                    }
                }
                if n < self.dim {
                    // d_i s_j on X_n with the face inner on X_{n+1}.
                    for j in 0..=n {
                        let s = self.degen(n, j, &x);
                        for i in 1..=n {
                            let l = self.face(n + 1, i, &s);
                            let r = if i == j || i == j + 1 {
                                x.clone()
                            } else if i < j {
                                if i >= n {
                                    continue;
                                }
                                self.degen(n - 1, j - 1, &self.face(n, i, &x))
                            } else {
                                if i - 1 >= n {
                                    continue;
                                }
                                self.degen(n - 1, j, &self.face(n, i - 1, &x))
                            };
                            if l != r {
                                let mut involved = vec![d_name(n + 1, i), s_name(n, j)];
                                if i < j {
                                    involved.extend([d_name(n, i), s_name(n - 1, j - 1)]);
                                } else if i > j + 1 {
                                    involved.extend([d_name(n, i - 1), s_name(n - 1, j)]);
                                }
                                return Err(Witness::new("d_i s_j", &[n, i, j], name, &involved));
                            }
                        }
                    }
                }
                if n + 1 < self.dim {
                    for j in 0..=n {
                        for i in 0..=j {
                            let l = self.degen(n + 1, i, &self.degen(n, j, &x));
                            let r = self.degen(n + 1, j + 1, &self.degen(n, i, &x));
                            if l != r {
                                return Err(Witness::new("s_i s_j = s_{j+1} s_i", &[n, i, j], name, &[s_name(n + 1, i), s_name(n, j), s_name(n + 1, j + 1), s_name(n, i)]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_mu_faces(&self) -> std::result::Result<(), Witness> {
        for n in 2..=self.dim {
            for g in 0..self.count(n) {
                let x = Comb::basis(g, self.ring);
                for j in 1..n {
                    let dx = self.face(n, j, &x);
                    for k in 1..n - 1 {
                        let l = n - 1 - k;
                        let lhs = self.mu(k, l, &dx);
                        let (rhs, other) = if j <= k {
                            let t = self.mu(k + 1, l, &x);
                            (map_factors(&t, |p, h| if p == 0 { single(&self.face(k + 1, j, &Comb::basis(h, self.ring))) } else { Tensor::basis(vec![h], self.ring) }), [mu_name(k + 1, l), d_name(k + 1, j)])
                        } else {
                            let t = self.mu(k, l + 1, &x);
                            (map_factors(&t, |p, h| if p == 1 { single(&self.face(l + 1, j - k, &Comb::basis(h, self.ring))) } else { Tensor::basis(vec![h], self.ring) }), [mu_name(k, l + 1), d_name(l + 1, j - k)])
                        };
                        if lhs != rhs {
                            let mut involved = vec![mu_name(k, l), d_name(n, j)];
                            involved.extend(other);
                            if l == 0 {
                                involved.push("eps".into());
                            }
                            return Err(Witness::new("mu natural in inner faces", &[n, j, k, l], self.label(n, g), &involved));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_mu_degens(&self) -> std::result::Result<(), Witness> {
        for n in 0..self.dim {
            for g in 0..self.count(n) {
                let x = Comb::basis(g, self.ring);
                for i in 0..=n {
                    let sx = self.degen(n, i, &x);
                    for k in 1..=n {
                        let l = n + 1 - k;
                        let lhs = self.mu(k, l, &sx);
                        let (rhs, other) = if i < k {
                            let t = self.mu(k - 1, l, &x);
                            (map_factors(&t, |p, h| if p == 0 { single(&self.degen(k - 1, i, &Comb::basis(h, self.ring))) } else { Tensor::basis(vec![h], self.ring) }), [mu_name(k - 1, l), s_name(k - 1, i)])
                        } else {
                            let t = self.mu(k, l - 1, &x);
                            (map_factors(&t, |p, h| if p == 1 { single(&self.degen(l - 1, i - k, &Comb::basis(h, self.ring))) } else { Tensor::basis(vec![h], self.ring) }), [mu_name(k, l - 1), s_name(l - 1, i - k)])
                        };
                        if lhs != rhs {
                            let mut involved = vec![mu_name(k, l), s_name(n, i)];
                            involved.extend(other);
                            if k == 1 || l == 1 {
                                involved.push("eps".into());
                            }
                            return Err(Witness::new("mu natural in degeneracies", &[n, i, k, l], self.label(n, g), &involved));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_coassociativity(&self) -> std::result::Result<(), Witness> {
        for n in 3..=self.dim {
            for g in 0..self.count(n) {
                let x = Comb::basis(g, self.ring);
                for k in 1..n {
                    for l in 1..n - k {
                        let m = n - k - l;
                        let lhs = map_factors(&self.mu(k + l, m, &x), |p, h| {
                            if p == 0 { self.mu(k, l, &Comb::basis(h, self.ring)) } else { Tensor::basis(vec![h], self.ring) }
                        });
                        let rhs = map_factors(&self.mu(k, l + m, &x), |p, h| {
                            if p == 1 { self.mu(l, m, &Comb::basis(h, self.ring)) } else { Tensor::basis(vec![h], self.ring) }
                        });
                        if lhs != rhs {
                            return Err(Witness::new(
                                "coassociativity",
                                &[k, l, m],
                                self.label(n, g),
                                &[mu_name(k + l, m), mu_name(k, l), mu_name(k, l + m), mu_name(l, m)],
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction to levels `≤ dim`.
    pub fn truncate(&self, dim: usize) -> Templicial {
        assert!(dim <= self.dim);
        let mut t = self.clone();
        t.dim = dim;
        t.levels.truncate(dim + 1);
        t.faces.truncate(dim + 1);
        t.degens.truncate(dim);
        t.comult.retain(|&(k, l), _| k + l <= dim);
        t
    }

    /// The quiver `X_n`; entry bases list generator labels in generator order.
    pub fn level_quiver(&self, n: usize) -> Quiver {
        let mut q = Quiver::new(self.ring, self.base.clone());
        for a in 0..self.base.len() {
            for b in 0..self.base.len() {
                let labels = self.gens_between(n, a, b).into_iter().map(|g| self.levels[n][g].label.clone()).collect();
                q.set(a, b, FreeModule::new(self.ring, labels).expect("distinct generator labels"));
            }
        }
        q
    }

    /// Position of a generator inside its entry of `X_n`.
    pub fn local_index(&self, n: usize, g: usize) -> usize {
        let Gen { src, tgt, .. } = self.levels[n][g];
        (0..g).filter(|&h| self.levels[n][h].src == src && self.levels[n][h].tgt == tgt).count()
    }

    /// A level map `X_n -> X_m` as a quiver map.
    pub fn level_map(&self, n: usize, m: usize, images: &[Comb<usize>]) -> Result<QuiverMap> {
        let (src, tgt) = (self.level_quiver(n), self.level_quiver(m));
        let mut comps = BTreeMap::new();
        for a in 0..self.base.len() {
            for b in 0..self.base.len() {
                let gens = self.gens_between(n, a, b);
                if gens.is_empty() {
                    continue;
                }
                let cols = gens.iter().map(|&g| images[g].map_keys(|&h| self.local_index(m, h))).collect();
                comps.insert((a, b), LinearMap::from_cols(src.entry(a, b), tgt.entry(a, b), cols)?);
            }
        }
        QuiverMap::new(src, tgt, comps)
    }

    /// `μ_{k,l}` as a quiver map `X_{k+l} -> X_k ⊗_S X_l`.
    pub fn comult_map(&self, k: usize, l: usize) -> Result<QuiverMap> {
        let src = self.level_quiver(k + l);
        let tgt = self.level_quiver(k).tensor(&self.level_quiver(l))?;
        let mut comps = BTreeMap::new();
        for a in 0..self.base.len() {
            for b in 0..self.base.len() {
                let gens = self.gens_between(k + l, a, b);
                if gens.is_empty() {
                    continue;
                }
                let cols = gens.iter().map(|&g| self.mu(k, l, &Comb::basis(g, self.ring)).map_keys(|key| self.pair_index(k, l, b, key))).collect();
                comps.insert((a, b), LinearMap::from_cols(src.entry(a, b), tgt.entry(a, b), cols)?);
            }
        }
        QuiverMap::new(src, tgt, comps)
    }

    pub(crate) fn pair_index(&self, k: usize, l: usize, b: usize, key: &[usize]) -> usize {
        let a = self.levels[k][key[0]].src;
        let c = self.levels[k][key[0]].tgt;
        let offset: usize = (0..c).map(|d| self.gens_between(k, a, d).len() * self.gens_between(l, d, b).len()).sum();
        offset + self.local_index(k, key[0]) * self.gens_between(l, c, b).len() + self.local_index(l, key[1])
    }

    pub(crate) fn pair_key(&self, k: usize, l: usize, a: usize, b: usize, idx: usize) -> Option<Vec<usize>> {
        let mut rest = idx;
        for c in 0..self.base.len() {
            let (left, right) = (self.gens_between(k, a, c), self.gens_between(l, c, b));
            let size = left.len() * right.len();
            if rest < size {
                return Some(vec![left[rest / right.len()], right[rest % right.len()]]);
            }
            rest -= size;
        }
        None
    }

    /// Disjoint union of two templicial modules over the union of their bases.
    pub fn coproduct(&self, other: &Templicial) -> Result<Templicial> {
        if self.ring != other.ring || self.dim != other.dim {
            return Err(Error::Contract("coproduct needs equal rings and truncations".into()));
        }
        let sb = self.base.len();
        let mut base: Vec<String> = self.base.iter().map(|b| format!("0.{b}")).collect();
        base.extend(other.base.iter().map(|b| format!("1.{b}")));
        let shift = |n: usize| self.count(n);
        let levels = (0..=self.dim)
            .map(|n| {
                let mut v: Vec<Gen> = self.levels[n].iter().map(|g| Gen { src: g.src, tgt: g.tgt, label: format!("0.{}", g.label) }).collect();
                v.extend(other.levels[n].iter().map(|g| Gen { src: g.src + sb, tgt: g.tgt + sb, label: format!("1.{}", g.label) }));
                v
            })
            .collect();
        let join = |a: &Vec<Vec<Comb<usize>>>, b: &Vec<Vec<Comb<usize>>>, target: usize| -> Vec<Vec<Comb<usize>>> {
            a.iter()
                .zip(b)
                .map(|(x, y)| {
                    let mut v = x.clone();
                    v.extend(y.iter().map(|c| c.map_keys(|&h| h + shift(target))));
                    v
                })
                .collect()
        };
        let faces = (0..=self.dim).map(|n| if n == 0 { vec![] } else { join(&self.faces[n], &other.faces[n], n - 1) }).collect();
        let degens = (0..self.dim).map(|n| join(&self.degens[n], &other.degens[n], n + 1)).collect();
        let mut comult = BTreeMap::new();
        for (&(k, l), v) in &self.comult {
            let mut all = v.clone();
            all.extend(other.comult[&(k, l)].iter().map(|t| t.map_keys(|key| vec![key[0] + shift(k), key[1] + shift(l)])));
            comult.insert((k, l), all);
        }
        let mut counit = self.counit.clone();
        counit.extend(other.counit.iter().cloned());
        Ok(Templicial { ring: self.ring, base, dim: self.dim, levels, faces, degens, comult, counit })
    }
}

/// Empty face/degeneracy tables with the right shapes.
pub(crate) fn empty_tables(counts: &[usize]) -> (Vec<Vec<Vec<Comb<usize>>>>, Vec<Vec<Vec<Comb<usize>>>>) {
    let dim = counts.len() - 1;
    let faces = (0..=dim).map(|n| (0..=n).map(|j| if 0 < j && j < n { vec![Comb::zero(); counts[n]] } else { vec![] }).collect()).collect();
    let degens = (0..dim).map(|n| vec![vec![Comb::zero(); counts[n]]; n + 1]).collect();
    (faces, degens)
}

/// `F̃(Y)`: the free templicial module on a simplicial set.
pub fn free_templicial(y: &SimplicialSet, ring: Ring) -> Templicial {
    let dim = y.dim;
    let levels: Vec<Vec<Gen>> = (0..=dim)
        .map(|n| (0..y.count(n)).map(|x| Gen { src: y.first_vertex(n, x), tgt: y.last_vertex(n, x), label: y.name(n, x).to_string() }).collect())
        .collect();
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let (mut faces, mut degens) = empty_tables(&counts);
    for n in 0..=dim {
        for j in 1..n {
            for x in 0..y.count(n) {
                faces[n][j][x] = Comb::basis(y.face(n, j, x), ring);
            }
        }
        if n < dim {
            for i in 0..=n {
                for x in 0..y.count(n) {
                    degens[n][i][x] = Comb::basis(y.degen(n, i, x), ring);
                }
            }
        }
    }
    let mut comult = BTreeMap::new();
    for n in 2..=dim {
        for k in 1..n {
            let v = (0..y.count(n)).map(|x| Tensor::basis(vec![y.front(n, x, k), y.back(n, x, k)], ring)).collect();
            comult.insert((k, n - k), v);
        }
    }
    Templicial { ring, base: y.names[0].clone(), dim, levels, faces, degens, comult, counit: vec![ring.one(); y.count(0)] }
}

/// A small linear category with a basis of arrows. Composition is
/// diagrammatic: `comp[(f, g)]` is `g ∘ f` for `f: a -> b`, `g: b -> c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCategory {
    pub ring: Ring,
    pub objects: Vec<String>,
    pub arrows: Vec<Gen>,
    pub comp: HashMap<(usize, usize), Comb<usize>>,
    pub units: Vec<Comb<usize>>,
}

impl LinearCategory {
    /// The free linear category `𝓕(C)` on a finite category.
    pub fn free(c: &FinCategory, ring: Ring) -> LinearCategory {
        let arrows = c.morphisms.iter().map(|(name, a, b)| Gen { src: *a, tgt: *b, label: name.clone() }).collect();
        let comp = c.compose.iter().map(|(&k, &v)| (k, Comb::basis(v, ring))).collect();
        let units = c.identities.iter().map(|&i| Comb::basis(i, ring)).collect();
        LinearCategory { ring, objects: c.objects.clone(), arrows, comp, units }
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&f| self.arrows[f].src == a && self.arrows[f].tgt == b).collect()
    }

    pub fn compose_basis(&self, f: usize, g: usize) -> Comb<usize> {
        self.comp.get(&(f, g)).cloned().unwrap_or_default()
    }

    /// Bilinear diagrammatic composition.
    pub fn compose(&self, f: &Comb<usize>, g: &Comb<usize>) -> Comb<usize> {
        let mut out = Comb::zero();
        for (&x, c) in f.iter() {
            for (&y, d) in g.iter() {
                if self.arrows[x].tgt == self.arrows[y].src {
                    out.add_scaled(&self.compose_basis(x, y), &(c * d));
                }
            }
        }
        out
    }

    /// Composite of a tensor of composable arrows (at least one factor).
    pub fn compose_tensor(&self, t: &Tensor) -> Comb<usize> {
        let mut out = Comb::zero();
        for (key, c) in t.iter() {
            let mut acc = Comb::basis(key[0], self.ring);
            for &h in &key[1..] {
                acc = self.compose(&acc, &Comb::basis(h, self.ring));
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Typing, associativity and unit laws on all basis arrows.
    pub fn check_laws(&self) -> Result<()> {
        let fail = |s: String| Err(Error::Invariant(s));
        for (&(f, g), v) in &self.comp {
            if self.arrows[f].tgt != self.arrows[g].src {
                return fail(format!("composite of non-composable {} and {}", self.arrows[f].label, self.arrows[g].label));
            }
            for &h in v.keys() {
                if self.arrows[h].src != self.arrows[f].src || self.arrows[h].tgt != self.arrows[g].tgt {
                    return fail(format!("composite of {} and {} has the wrong type", self.arrows[f].label, self.arrows[g].label));
                }
            }
        }
        for (a, u) in self.units.iter().enumerate() {
            if u.keys().any(|&h| self.arrows[h].src != a || self.arrows[h].tgt != a) {
                return fail(format!("unit at {} has the wrong type", self.objects[a]));
            }
        }
        for f in 0..self.arrows.len() {
            let Gen { src: a, tgt: b, .. } = self.arrows[f];
            let x = Comb::basis(f, self.ring);
            if self.compose(&self.units[a], &x) != x || self.compose(&x, &self.units[b]) != x {
                return fail(format!("unit law fails at {}", self.arrows[f].label));
            }
            for g in (0..self.arrows.len()).filter(|&g| self.arrows[g].src == b) {
                let fg = self.compose_basis(f, g);
                for h in (0..self.arrows.len()).filter(|&h| self.arrows[h].src == self.arrows[g].tgt) {
                    let l = self.compose(&fg, &Comb::basis(h, self.ring));
                    let r = self.compose(&x, &self.compose_basis(g, h));
                    if l != r {
                        return fail(format!("associativity fails at ({}, {}, {})", self.arrows[f].label, self.arrows[g].label, self.arrows[h].label));
                    }
                }
            }
        }
        Ok(())
    }

    /// The hom quiver.
    pub fn hom_quiver(&self) -> Quiver {
        let mut q = Quiver::new(self.ring, self.objects.clone());
        for a in 0..self.objects.len() {
            for b in 0..self.objects.len() {
                let labels = self.hom(a, b).into_iter().map(|f| self.arrows[f].label.clone()).collect();
                q.set(a, b, FreeModule::new(self.ring, labels).expect("distinct arrow labels"));
            }
        }
        q
    }

    /// Composable arrow sequences of length `n`; for `n = 0` one `[a]` per object.
    pub fn chains(&self, n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return (0..self.objects.len()).map(|a| vec![a]).collect();
        }
        let mut out: Vec<Vec<usize>> = (0..self.arrows.len()).map(|f| vec![f]).collect();
        for _ in 1..n {
            let mut next = Vec::new();
            for c in &out {
                let t = self.arrows[*c.last().unwrap()].tgt;
                for g in (0..self.arrows.len()).filter(|&g| self.arrows[g].src == t) {
                    let mut d = c.clone();
                    d.push(g);
                    next.push(d);
                }
            }
            out = next;
        }
        out
    }

    pub fn chain_index(&self, n: usize) -> HashMap<Vec<usize>, usize> {
        self.chains(n).into_iter().enumerate().map(|(i, c)| (c, i)).collect()
    }

    /// Whether `iso` (arrow of self ↦ arrow of other) is an isomorphism of
    /// linear categories preserving objects.
    pub fn is_iso_via(&self, other: &LinearCategory, iso: &[usize]) -> bool {
        if self.arrows.len() != other.arrows.len() || self.objects.len() != other.objects.len() {
            return false;
        }
        let set: BTreeSet<usize> = iso.iter().cloned().collect();
        if set.len() != iso.len() {
            return false;
        }
        let map = |x: &Comb<usize>| x.map_keys(|&f| iso[f]);
        (0..self.arrows.len()).all(|f| self.arrows[f].src == other.arrows[iso[f]].src && self.arrows[f].tgt == other.arrows[iso[f]].tgt)
            && self.units.iter().zip(&other.units).all(|(u, v)| &map(u) == v)
            && (0..self.arrows.len()).all(|f| {
                (0..self.arrows.len())
                    .filter(|&g| self.arrows[f].tgt == self.arrows[g].src)
                    .all(|g| map(&self.compose_basis(f, g)) == other.compose_basis(iso[f], iso[g]))
            })
    }
}

/// `N_k(C)` truncated at `dim`.
pub fn linear_nerve(c: &LinearCategory, dim: usize) -> Templicial {
    let ring = c.ring;
    let chains: Vec<Vec<Vec<usize>>> = (0..=dim).map(|n| c.chains(n)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> =
        chains.iter().map(|l| l.iter().enumerate().map(|(i, ch)| (ch.clone(), i)).collect()).collect();
    let levels: Vec<Vec<Gen>> = chains
        .iter()
        .enumerate()
        .map(|(n, l)| {
            l.iter()
                .map(|ch| {
                    if n == 0 {
                        Gen { src: ch[0], tgt: ch[0], label: c.objects[ch[0]].clone() }
                    } else {
                        let label = ch.iter().map(|&f| c.arrows[f].label.clone()).collect::<Vec<_>>().join("|");
                        Gen { src: c.arrows[ch[0]].src, tgt: c.arrows[*ch.last().unwrap()].tgt, label }
                    }
                })
                .collect()
        })
        .collect();
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let (mut faces, mut degens) = empty_tables(&counts);
    for n in 2..=dim {
        for j in 1..n {
            for (x, ch) in chains[n].iter().enumerate() {
                let m = c.compose_basis(ch[j - 1], ch[j]);
                faces[n][j][x] = m
                    .iter()
                    .map(|(&h, v)| {
                        let mut d = ch[..j - 1].to_vec();
                        d.push(h);
                        d.extend_from_slice(&ch[j + 1..]);
                        (index[n - 1][&d], v.clone())
                    })
                    .collect();
            }
        }
    }
    for n in 0..dim {
        for i in 0..=n {
            for (x, ch) in chains[n].iter().enumerate() {
                let (obj, before, after): (usize, &[usize], &[usize]) = if n == 0 {
                    (ch[0], &[], &[])
                } else if i == 0 {
                    (c.arrows[ch[0]].src, &[], &ch[..])
                } else {
                    (c.arrows[ch[i - 1]].tgt, &ch[..i], &ch[i..])
                };
                degens[n][i][x] = c.units[obj]
                    .iter()
                    .map(|(&u, v)| {
                        let mut d = before.to_vec();
                        d.push(u);
                        d.extend_from_slice(after);
                        (index[n + 1][&d], v.clone())
                    })
                    .collect();
            }
        }
    }
    let mut comult = BTreeMap::new();
    for n in 2..=dim {
        for k in 1..n {
            let v = chains[n].iter().map(|ch| Tensor::basis(vec![index[k][&ch[..k].to_vec()], index[n - k][&ch[k..].to_vec()]], ring)).collect();
            comult.insert((k, n - k), v);
        }
    }
    Templicial { ring, base: c.objects.clone(), dim, levels, faces, degens, comult, counit: vec![ring.one(); c.objects.len()] }
}

/// A templicial morphism: vertex map and level maps `f_! X_n -> Y_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TemplicialMap {
    pub vertex_map: Vec<usize>,
    pub alpha: Vec<Vec<Comb<usize>>>,
}

impl TemplicialMap {
    pub fn identity(x: &Templicial) -> TemplicialMap {
        TemplicialMap {
            vertex_map: (0..x.base.len()).collect(),
            alpha: (0..=x.dim).map(|n| (0..x.count(n)).map(|g| Comb::basis(g, x.ring)).collect()).collect(),
        }
    }

    pub fn apply(&self, n: usize, x: &Comb<usize>) -> Comb<usize> {
        x.bind(|&g| self.alpha[n][g].clone())
    }

    pub fn apply_tensor(&self, levels: &[usize], t: &Tensor, ring: Ring) -> Tensor {
        map_factors(t, |p, g| single(&self.apply(levels[p], &Comb::basis(g, ring))))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TemplicialMap) -> TemplicialMap {
        TemplicialMap {
            vertex_map: other.vertex_map.iter().map(|&a| self.vertex_map[a]).collect(),
            alpha: other.alpha.iter().enumerate().map(|(n, l)| l.iter().map(|x| self.apply(n, x)).collect()).collect(),
        }
    }

    /// Checks typing, naturality, monoidality and counit compatibility.
    pub fn check(&self, x: &Templicial, y: &Templicial) -> std::result::Result<(), Witness> {
        let dim = x.dim.min(y.dim);
        let f = &self.vertex_map;
        if f.len() != x.base.len() || f.iter().any(|&v| v >= y.base.len()) || self.alpha.len() <= dim {
            return Err(Witness::new("map shape", &[], "", &[]));
        }
        for n in 0..=dim {
            if self.alpha[n].len() != x.count(n) {
                return Err(Witness::new("map shape", &[n], "", &[]));
            }
            for g in 0..x.count(n) {
                let name = x.label(n, g);
                let Gen { src: a, tgt: b, .. } = x.levels[n][g];
                let e = Comb::basis(g, x.ring);
                let img = self.apply(n, &e);
                if img.keys().any(|&h| y.levels[n][h].src != f[a] || y.levels[n][h].tgt != f[b]) {
                    return Err(Witness::new("map typing", &[n], name, &[format!("alpha[{n}]")]));
                }
                for j in 1..n {
                    if self.apply(n - 1, &x.face(n, j, &e)) != y.face(n, j, &img) {
                        return Err(Witness::new("map natural in faces", &[n, j], name, &[format!("alpha[{n}]"), d_name(n, j)]));
                    }
                }
                if n < dim {
                    for i in 0..=n {
                        if self.apply(n + 1, &x.degen(n, i, &e)) != y.degen(n, i, &img) {
                            return Err(Witness::new("map natural in degeneracies", &[n, i], name, &[format!("alpha[{n}]"), s_name(n, i)]));
                        }
                    }
                }
                for k in 1..n {
                    let l = n - k;
                    if self.apply_tensor(&[k, l], &x.mu(k, l, &e), x.ring) != y.mu(k, l, &img) {
                        return Err(Witness::new("map monoidal", &[k, l], name, &[format!("alpha[{n}]"), mu_name(k, l)]));
                    }
                }
                if n == 0 {
                    let lhs = y.counit_of(&img);
                    let rhs = x.counit_of(&e).into_iter().map(|(v, c)| (f[v], c)).collect::<BTreeMap<_, _>>();
                    if lhs != rhs {
                        return Err(Witness::new("map preserves counit", &[0], name, &["eps".into()]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether every level map is bijective.
    pub fn is_iso(&self, x: &Templicial, y: &Templicial) -> Result<bool> {
        let dim = x.dim.min(y.dim);
        let fv: BTreeSet<usize> = self.vertex_map.iter().cloned().collect();
        if fv.len() != self.vertex_map.len() || fv.len() != y.base.len() {
            return Ok(false);
        }
        for n in 0..=dim {
            if x.count(n) != y.count(n) {
                return Ok(false);
            }
            for h in 0..y.count(n) {
                if exact_solve(&self.alpha[n], &Comb::basis(h, y.ring), y.ring)?.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The unique templicial map `X -> N_k(C)` extending `H: X_1 -> f^*(C)`.
pub fn nerve_extend(x: &Templicial, f: &[usize], c: &LinearCategory, h: &[Comb<usize>]) -> Result<TemplicialMap> {
    let ring = x.ring;
    if f.len() != x.base.len() || h.len() != x.count(1.min(x.dim)) && x.dim >= 1 {
        return Err(Error::Contract("vertex map or H has the wrong length".into()));
    }
    let hx = |e: &Comb<usize>| e.bind(|&g| h[g].clone());
    if x.dim >= 1 {
        for (g, img) in h.iter().enumerate() {
            let Gen { src: a, tgt: b, .. } = x.levels[1][g];
            if img.keys().any(|&u| c.arrows[u].src != f[a] || c.arrows[u].tgt != f[b]) {
                return Err(Error::Contract(format!("H({}) has the wrong type", x.label(1, g))));
            }
        }
        for a in 0..x.base.len() {
            let lhs = hx(&x.degen(0, 0, &x.eta(a)));
            if lhs != c.units[f[a]] {
                return Err(Error::Refused(format!("H s_0 != u eps at {}", x.base[a])));
            }
        }
    }
    if x.dim >= 2 {
        for w in 0..x.count(2) {
            let e = Comb::basis(w, ring);
            let lhs = hx(&x.face(2, 1, &e));
            let rhs = c.compose_tensor(&map_factors(&x.mu(1, 1, &e), |_, g| single(&h[g])));
            if lhs != rhs {
                return Err(Error::Refused(format!("H d_1 != m (H ⊗ H) mu_11 at {}", x.label(2, w))));
            }
        }
    }
    let mut alpha = Vec::new();
    for n in 0..=x.dim {
        let idx = c.chain_index(n);
        let level = (0..x.count(n))
            .map(|g| {
                if n == 0 {
                    let a = x.levels[0][g].src;
                    return Comb::term(idx[&vec![f[a]]], x.counit[g].clone());
                }
                let t = map_factors(&x.mu_ones(n, &Comb::basis(g, ring)), |_, e| single(&h[e]));
                t.map_keys(|key| idx[key])
            })
            .collect();
        alpha.push(level);
    }
    Ok(TemplicialMap { vertex_map: f.to_vec(), alpha })
}

/// Columns of `μ_{1,…,1}: X_n(a,b) -> X_1^{⊗n}(a,b)` and the composable sequences.
fn mu_ones_system(x: &Templicial, n: usize, a: usize, b: usize) -> (Vec<usize>, Vec<Tensor>, Vec<Vec<usize>>) {
    let gens = x.gens_between(n, a, b);
    let cols = gens.iter().map(|&g| x.mu_ones(n, &Comb::basis(g, x.ring))).collect();
    let mut seqs: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &seqs {
            let cur = s.last().map(|&e| x.levels[1][e].tgt).unwrap_or(a);
            for e in (0..x.count(1)).filter(|&e| x.levels[1][e].src == cur) {
                let mut t = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        seqs = next;
    }
    seqs.retain(|s| s.last().map(|&e| x.levels[1][e].tgt) == Some(b));
    (gens, cols, seqs)
}

/// First `μ_{1,…,1}` (by level, then vertex pair) that is not invertible.
pub fn first_non_invertible_mu(x: &Templicial) -> Result<Option<Witness>> {
    for n in 2..=x.dim {
        for a in 0..x.base.len() {
            for b in 0..x.base.len() {
                let (gens, cols, seqs) = mu_ones_system(x, n, a, b);
                let w = || Witness::new("mu_{1..1} invertible", &[n, a, b], &format!("{}->{}", x.base[a], x.base[b]), &[format!("mu_ones[{n}]")]);
                if gens.len() != seqs.len() {
                    return Ok(Some(w()));
                }
                for s in &seqs {
                    if exact_solve(&cols, &Tensor::basis(s.clone(), x.ring), x.ring)?.is_none() {
                        return Ok(Some(w()));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Recognizes a strong monoidal templicial module: returns the category
/// `(X_1, d_1 μ_{1,1}⁻¹, s_0 η)` and the isomorphism `X ≅ N_k` of it.
pub fn strong_monoidal_recognize(x: &Templicial) -> Result<std::result::Result<(LinearCategory, TemplicialMap), Witness>> {
    if let Some(w) = first_non_invertible_mu(x)? {
        return Ok(Err(w));
    }
    let ring = x.ring;
    if x.dim < 2 {
        return Err(Error::Contract("recognition needs levels up to 2".into()));
    }
    let arrows = x.levels[1].clone();
    let mut comp = HashMap::new();
    for f in 0..x.count(1) {
        for g in (0..x.count(1)).filter(|&g| arrows[g].src == arrows[f].tgt) {
            let (a, b) = (arrows[f].src, arrows[g].tgt);
            let (gens, cols, _) = mu_ones_system(x, 2, a, b);
            let sol = exact_solve(&cols, &Tensor::basis(vec![f, g], ring), ring)?
                .ok_or_else(|| Error::Invariant("mu_11 lost surjectivity".into()))?;
            let mut w = Comb::zero();
            for (i, c) in sol.iter().enumerate() {
                if !c.is_zero() {
                    w.add_term(gens[i], c.clone());
                }
            }
            let m = x.face(2, 1, &w);
            if !m.is_zero() {
                comp.insert((f, g), m);
            }
        }
    }
    let units = (0..x.base.len()).map(|a| x.degen(0, 0, &x.eta(a))).collect();
    let c = LinearCategory { ring, objects: x.base.clone(), arrows, comp, units };
    let mut alpha = Vec::new();
    for n in 0..=x.dim {
        let idx = c.chain_index(n);
        alpha.push(
            (0..x.count(n))
                .map(|g| {
                    if n == 0 {
                        Comb::term(idx[&vec![x.levels[0][g].src]], x.counit[g].clone())
                    } else {
                        x.mu_ones(n, &Comb::basis(g, ring)).map_keys(|k| idx[k])
                    }
                })
                .collect(),
        );
    }
    Ok(Ok((c, TemplicialMap { vertex_map: (0..x.base.len()).collect(), alpha })))
}

/// Whether all `μ_{1,…,1}` are isomorphisms, i.e. `X` fills inner horns uniquely.
pub fn unique_horn_filling_check(x: &Templicial) -> Result<bool> {
    Ok(first_non_invertible_mu(x)?.is_none())
}

/// A simplex of the underlying simplicial set `Ũ(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct USimplex {
    pub vertices: Vec<usize>,
    /// `α_{i,j} ∈ X_{j-i}(α_i, α_j)` for `i < j`.
    pub edges: BTreeMap<(usize, usize), Comb<usize>>,
}

impl USimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `α_{i,j}`, with `α_{i,i} = η`.
    pub fn at(&self, x: &Templicial, i: usize, j: usize) -> Comb<usize> {
        if i == j {
            return x.eta(self.vertices[i]);
        }
        self.edges.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Validates typing and `μ_{k-i,j-k}(α_{i,j}) = α_{i,k} ⊗ α_{k,j}`.
    pub fn validate(&self, x: &Templicial) -> std::result::Result<(), Witness> {
        self.validate_except(x, None)
    }

    /// As [`USimplex::validate`], ignoring every condition on the entry `skip`.
    pub fn validate_except(&self, x: &Templicial, skip: Option<(usize, usize)>) -> std::result::Result<(), Witness> {
        let n = self.dim();
        if n > x.dim || self.vertices.iter().any(|&v| v >= x.base.len()) {
            return Err(Witness::new("simplex shape", &[n], "", &[]));
        }
        for i in 0..=n {
            for j in i + 1..=n {
                if skip == Some((i, j)) {
                    continue;
                }
                let a = self.at(x, i, j);
                if a.keys().any(|&g| g >= x.count(j - i) || x.levels[j - i][g].src != self.vertices[i] || x.levels[j - i][g].tgt != self.vertices[j]) {
                    return Err(Witness::new("simplex typing", &[i, j], "", &[]));
                }
            }
        }
        for i in 0..=n {
            for j in i + 2..=n {
                if skip == Some((i, j)) {
                    continue;
                }
                for k in i + 1..j {
                    let lhs = x.mu(k - i, j - k, &self.at(x, i, j));
                    let rhs = tensor_combs(&single(&self.at(x, i, k)), &single(&self.at(x, k, j)));
                    if lhs != rhs {
                        return Err(Witness::new("compatible family", &[i, k, j], "", &[mu_name(k - i, j - k)]));
                    }
                }
            }
        }
        Ok(())
    }

    /// Equality of vertices and of every entry `α_{i,j}`.
    pub fn same_as(&self, x: &Templicial, other: &USimplex) -> bool {
        let n = self.dim();
        self.vertices == other.vertices && (0..=n).all(|i| (i + 1..=n).all(|j| self.at(x, i, j) == other.at(x, i, j)))
    }

    pub fn face(&self, x: &Templicial, l: usize) -> USimplex {
        let n = self.dim();
        assert!(n >= 1 && l <= n);
        let mut vertices = self.vertices.clone();
        vertices.remove(l);
        let mut edges = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = if l <= i {
                    self.at(x, i + 1, j + 1)
                } else if l <= j {
                    x.face(j + 1 - i, l - i, &self.at(x, i, j + 1))
                } else {
                    self.at(x, i, j)
                };
                edges.insert((i, j), v);
            }
        }
        USimplex { vertices, edges }
    }

    pub fn degen(&self, x: &Templicial, l: usize) -> USimplex {
        let n = self.dim();
        assert!(l <= n);
        let mut vertices = self.vertices.clone();
        vertices.insert(l, self.vertices[l]);
        let mut edges = BTreeMap::new();
        for i in 0..=n + 1 {
            for j in i + 1..=n + 1 {
                let v = if j <= l {
                    self.at(x, i, j)
                } else if i > l {
                    self.at(x, i - 1, j - 1)
                } else {
                    x.degen(j - 1 - i, l - i, &self.at(x, i, j - 1))
                };
                edges.insert((i, j), v);
            }
        }
        USimplex { vertices, edges }
    }
}

/// The linear homotopy category `h_k(X)` of a linear quasi-category.
#[derive(Clone, Debug)]
pub struct LinearHomotopy {
    pub category: LinearCategory,
    /// Row echelon form of the null-homotopic edges per vertex pair, in
    /// local coordinates of `X_1(a,b)`.
    pub null: BTreeMap<(usize, usize), Echelon>,
    /// The `X_1` generator behind each arrow of the category.
    pub arrow_gen: Vec<usize>,
    local: Vec<usize>,
    gens: BTreeMap<(usize, usize), Vec<usize>>,
    arrow_of: HashMap<usize, usize>,
}

impl LinearHomotopy {
    /// The class of an edge, as a combination of arrows of the category.
    pub fn class(&self, x: &Comb<usize>) -> Comb<usize> {
        let mut by_pair: BTreeMap<(usize, usize), Comb<usize>> = BTreeMap::new();
        for (&g, c) in x.iter() {
            let key = self.pair_of(g);
            by_pair.entry(key).or_default().add_term(self.local[g], c.clone());
        }
        let mut out = Comb::zero();
        for (key, v) in by_pair {
            let r = self.null[&key].reduce(&v);
            for (&loc, c) in r.iter() {
                out.add_term(self.arrow_of[&self.gens[&key][loc]], c.clone());
            }
        }
        out
    }

    fn pair_of(&self, g: usize) -> (usize, usize) {
        *self.gens.iter().find(|(_, v)| v.contains(&g)).map(|(k, _)| k).expect("edge without a vertex pair")
    }

    pub fn is_null(&self, x: &Comb<usize>) -> bool {
        self.class(x).is_zero()
    }
}

fn to_comb_over(gens: &[usize], v: &[Scalar]) -> Comb<usize> {
    vec_to_comb(v).map_keys(|&i| gens[i])
}

/// Decides `f ~ g`: some `w ∈ X_2` has `μ_{1,1}(w) = s_0 η_a ⊗ f` and `d_1 w = g`.
pub fn homotopy_relation(x: &Templicial, f: &Comb<usize>, g: &Comb<usize>) -> Result<bool> {
    if x.dim < 2 {
        return Err(Error::Contract("homotopies need level 2".into()));
    }
    let ends: BTreeSet<(usize, usize)> = f.keys().chain(g.keys()).map(|&e| (x.levels[1][e].src, x.levels[1][e].tgt)).collect();
    if ends.len() > 1 {
        return Err(Error::Contract("edges with different endpoints".into()));
    }
    let Some(&(a, b)) = ends.iter().next() else {
        return Ok(true);
    };
    let gens = x.gens_between(2, a, b);
    // Keys: (0, tensor) for the μ equation, (1, [edge]) for the face equation.
    let cols: Vec<Comb<(u8, Vec<usize>)>> = gens
        .iter()
        .map(|&w| {
            let e = Comb::basis(w, x.ring);
            let mut c = x.mu(1, 1, &e).map_keys(|k| (0u8, k.clone()));
            c.add_assign(&x.face(2, 1, &e).map_keys(|&h| (1u8, vec![h])));
            c
        })
        .collect();
    let s0 = x.degen(0, 0, &x.eta(a));
    let mut rhs = tensor_combs(&single(&s0), &single(f)).map_keys(|k| (0u8, k.clone()));
    rhs.add_assign(&g.map_keys(|&h| (1u8, vec![h])));
    Ok(exact_solve(&cols, &rhs, x.ring)?.is_some())
}

/// `h_k(X)` over a field.
pub fn linear_homotopy_category(x: &Templicial) -> Result<LinearHomotopy> {
    let ring = x.ring;
    if !ring.is_field() {
        return Err(Error::Refused("the linear homotopy category needs field coefficients".into()));
    }
    if x.dim < 2 {
        return Err(Error::Contract("the linear homotopy category needs level 2".into()));
    }
    let nb = x.base.len();
    let mut null = BTreeMap::new();
    let mut gens = BTreeMap::new();
    let mut local = vec![0; x.count(1)];
    let mut arrows = Vec::new();
    let mut arrow_gen = Vec::new();
    let mut arrow_of = HashMap::new();
    for a in 0..nb {
        for b in 0..nb {
            let es = x.gens_between(1, a, b);
            for (i, &e) in es.iter().enumerate() {
                local[e] = i;
            }
            let ws = x.gens_between(2, a, b);
            let s0 = single(&x.degen(0, 0, &x.eta(a)));
            // Unknowns (w, h); equations μ_{1,1} w - s_0η ⊗ h = 0 and d_1 w = 0.
            let mut cols: Vec<Comb<(u8, Vec<usize>)>> = ws
                .iter()
                .map(|&w| {
                    let e = Comb::basis(w, ring);
                    let mut c = x.mu(1, 1, &e).map_keys(|k| (0u8, k.clone()));
                    c.add_assign(&x.face(2, 1, &e).map_keys(|&h| (1u8, vec![h])));
                    c
                })
                .collect();
            for &e in &es {
                cols.push(tensor_combs(&s0, &Tensor::basis(vec![e], ring)).negated().map_keys(|k| (0u8, k.clone())));
            }
            let ker = exact_kernel(&cols, ring);
            let rows = ker.iter().map(|v| {
                let mut r = Comb::zero();
                for (&i, c) in v.iter() {
                    if i >= ws.len() {
                        r.add_term(i - ws.len(), c.clone());
                    }
                }
                r
            });
            let ech = Echelon::from_rows(es.len(), rows);
            for loc in ech.free_columns() {
                let e = es[loc];
                arrow_of.insert(e, arrows.len());
                arrow_gen.push(e);
                arrows.push(x.levels[1][e].clone());
            }
            null.insert((a, b), ech);
            gens.insert((a, b), es);
        }
    }
    let mut h = LinearHomotopy {
        category: LinearCategory { ring, objects: x.base.clone(), arrows, comp: HashMap::new(), units: vec![] },
        null,
        arrow_gen,
        local,
        gens,
        arrow_of,
    };
    let units: Vec<Comb<usize>> = (0..nb).map(|a| h.class(&x.degen(0, 0, &x.eta(a)))).collect();
    let mut comp = HashMap::new();
    let na = h.category.arrows.len();
    for f in 0..na {
        for g in (0..na).filter(|&g| h.category.arrows[g].src == h.category.arrows[f].tgt) {
            let (a, c) = (h.category.arrows[f].src, h.category.arrows[g].tgt);
            let ws = x.gens_between(2, a, c);
            let cols: Vec<Tensor> = ws.iter().map(|&w| x.mu(1, 1, &Comb::basis(w, ring))).collect();
            let rhs = Tensor::basis(vec![h.arrow_gen[f], h.arrow_gen[g]], ring);
            let sol = exact_solve(&cols, &rhs, ring)?
                .ok_or_else(|| Error::Invariant(format!("no composite for {} and {}", h.category.arrows[f].label, h.category.arrows[g].label)))?;
            let w = to_comb_over(&ws, &sol);
            let m = h.class(&x.face(2, 1, &w));
            if !m.is_zero() {
                comp.insert((f, g), m);
            }
        }
    }
    h.category.units = units;
    h.category.comp = comp;
    Ok(h)
}

/// The componentwise comparison `F̃(N(C)) → N_k(𝓕(C))`: both sides have the
/// chains of `C` as generators, matched by label.
pub fn free_nerve_comparison(c: &FinCategory, ring: Ring, dim: usize) -> Result<(Templicial, Templicial, TemplicialMap)> {
    let x = free_templicial(&crate::simplicial::nerve(c, dim)?, ring);
    let y = linear_nerve(&LinearCategory::free(c, ring), dim);
    let mut alpha = Vec::new();
    for n in 0..=dim {
        let by_label: HashMap<(&str, usize, usize), usize> =
            y.levels[n].iter().enumerate().map(|(h, g)| ((g.label.as_str(), g.src, g.tgt), h)).collect();
        let mut level = Vec::new();
        for g in &x.levels[n] {
            let &h = by_label
                .get(&(g.label.as_str(), g.src, g.tgt))
                .ok_or_else(|| Error::Invariant(format!("no nerve generator matches {}", g.label)))?;
            level.push(Comb::basis(h, ring));
        }
        alpha.push(level);
    }
    let map = TemplicialMap { vertex_map: (0..x.base.len()).collect(), alpha };
    Ok((x, y, map))
}

/// The simplex of `Ũ(N_k(C))` given by composable vectors `f_1, …, f_n`:
/// `α_{i,j} = f_{i+1} ⊗ … ⊗ f_j`.
pub fn chain_to_simplex(c: &LinearCategory, x: &Templicial, vertices: &[usize], arrows: &[Comb<usize>]) -> USimplex {
    let n = arrows.len();
    let mut edges = BTreeMap::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let idx = c.chain_index(j - i);
            let mut t = Tensor::term(vec![], c.ring.one());
            for f in &arrows[i..j] {
                t = tensor_combs(&t, &single(f));
            }
            edges.insert((i, j), t.map_keys(|k| idx[k]));
        }
    }
    debug_assert_eq!(x.base.len(), c.objects.len());
    USimplex { vertices: vertices.to_vec(), edges }
}

/// The chain `(α_{0,1}, …, α_{n-1,n})` of a simplex of `Ũ(N_k(C))`.
pub fn simplex_to_chain(x: &Templicial, s: &USimplex) -> Vec<Comb<usize>> {
    (0..s.dim()).map(|i| s.at(x, i, i + 1)).collect()
}

/// Faces of a simplex of `N(𝒰(C))`: outer faces drop an arrow, inner ones compose.
pub fn chain_face(c: &LinearCategory, vertices: &[usize], arrows: &[Comb<usize>], l: usize) -> (Vec<usize>, Vec<Comb<usize>>) {
    let n = arrows.len();
    let mut vs = vertices.to_vec();
    vs.remove(l);
    let mut fs = arrows.to_vec();
    if l == 0 {
        fs.remove(0);
    } else if l == n {
        fs.pop();
    } else {
        let g = fs.remove(l);
        fs[l - 1] = c.compose(&arrows[l - 1], &g);
    }
    (vs, fs)
}

pub fn chain_degen(c: &LinearCategory, vertices: &[usize], arrows: &[Comb<usize>], l: usize) -> (Vec<usize>, Vec<Comb<usize>>) {
    let mut vs = vertices.to_vec();
    vs.insert(l, vertices[l]);
    let mut fs = arrows.to_vec();
    fs.insert(l, c.units[vertices[l]].clone());
    (vs, fs)
}

/// `Ũ∘N_k ≅ N∘𝒰` on one chain: the assembled simplex is valid, the two
/// directions are inverse, and faces and degeneracies correspond.
pub fn check_underlying_nerve(c: &LinearCategory, x: &Templicial, vertices: &[usize], arrows: &[Comb<usize>]) -> std::result::Result<(), Witness> {
    let n = arrows.len();
    let s = chain_to_simplex(c, x, vertices, arrows);
    s.validate(x)?;
    if simplex_to_chain(x, &s) != arrows {
        return Err(Witness::new("chain round trip", &[n], "", &[]));
    }
    if !chain_to_simplex(c, x, &s.vertices, &simplex_to_chain(x, &s)).same_as(x, &s) {
        return Err(Witness::new("simplex round trip", &[n], "", &[]));
    }
    if n >= 1 {
        for l in 0..=n {
            let (vs, fs) = chain_face(c, vertices, arrows, l);
            if !chain_to_simplex(c, x, &vs, &fs).same_as(x, &s.face(x, l)) {
                return Err(Witness::new("nerve comparison commutes with faces", &[n, l], "", &[d_name(n, l)]));
            }
        }
    }
    if n < x.dim {
        for l in 0..=n {
            let (vs, fs) = chain_degen(c, vertices, arrows, l);
            if !chain_to_simplex(c, x, &vs, &fs).same_as(x, &s.degen(x, l)) {
                return Err(Witness::new("nerve comparison commutes with degeneracies", &[n, l], "", &[s_name(n, l)]));
            }
        }
    }
    Ok(())
}

/// A random composable chain of `n` vectors in `C`, coefficients in `[-bound, bound]`.
pub fn random_chain<R: rand::Rng>(c: &LinearCategory, n: usize, bound: i64, rng: &mut R) -> (Vec<usize>, Vec<Comb<usize>>) {
    let mut vertices = vec![rng.gen_range(0..c.objects.len())];
    let mut arrows = Vec::new();
    for _ in 0..n {
        let a = *vertices.last().unwrap();
        let targets: Vec<usize> = (0..c.objects.len()).filter(|&b| !c.hom(a, b).is_empty()).collect();
        let b = targets[rng.gen_range(0..targets.len())];
        let mut f = Comb::zero();
        for g in c.hom(a, b) {
            f.add_term(g, c.ring.random_small(rng, bound));
        }
        vertices.push(b);
        arrows.push(f);
    }
    (vertices, arrows)
}

/// `𝓕∘h ≅ h_k∘F̃` for a quasi-category `Y`: edge classes of `h(Y)` match the
/// basis of `h_k(F̃(Y))` and compositions agree.
pub fn check_free_homotopy(y: &SimplicialSet, ring: Ring) -> Result<std::result::Result<(), Witness>> {
    let (h, class_of) = crate::simplicial::homotopy_category(y)?;
    let x = free_templicial(y, ring);
    let lh = linear_homotopy_category(&x)?;
    let mut iso = Vec::new();
    for (name, _, _) in &h.morphisms {
        let e = y.index_of(1, name).ok_or_else(|| Error::Invariant(format!("no edge named {name}")))?;
        let cl = lh.class(&Comb::basis(e, ring));
        match cl.first() {
            Some((&arrow, c)) if cl.len() == 1 && c.is_one() => iso.push(arrow),
            _ => return Ok(Err(Witness::new("edge class is not a basis arrow", &[1], name, &[]))),
        }
    }
    for e in 0..y.count(1) {
        if lh.class(&Comb::basis(e, ring)) != Comb::basis(iso[class_of[e]], ring) {
            return Ok(Err(Witness::new("homotopy classes differ", &[1], y.name(1, e), &[])));
        }
    }
    if !LinearCategory::free(&h, ring).is_iso_via(&lh.category, &iso) {
        return Ok(Err(Witness::new("composition of classes differs", &[2], "", &[])));
    }
    Ok(Ok(()))
}

/// `h∘Ũ ≅ 𝒰∘h_k` on sampled edges of `Ũ(X)`: `f ~ g` in `Ũ(X)` iff their
/// classes agree, units go to units, and composites in `Ũ(X)` go to composites.
pub fn check_underlying_homotopy<R: rand::Rng>(x: &Templicial, samples: usize, rng: &mut R) -> Result<std::result::Result<(), Witness>> {
    let ring = x.ring;
    let lh = linear_homotopy_category(x)?;
    let nb = x.base.len();
    let lift = |v: &Comb<usize>| v.map_keys(|&k| lh.arrow_gen[k]);
    let random_edge = |a: usize, b: usize, rng: &mut R| {
        let mut f = Comb::zero();
        for e in x.gens_between(1, a, b) {
            f.add_term(e, ring.random_small(rng, 3));
        }
        f
    };
    for a in 0..nb {
        let unit = x.degen(0, 0, &x.eta(a));
        if lh.class(&unit) != lh.category.units[a] {
            return Ok(Err(Witness::new("unit class", &[a], &x.base[a], &[])));
        }
    }
    let pairs: Vec<(usize, usize)> = (0..nb).flat_map(|a| (0..nb).map(move |b| (a, b))).filter(|&(a, b)| !x.gens_between(1, a, b).is_empty()).collect();
    for t in 0..samples {
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let f = random_edge(a, b, rng);
        // Half the partners differ from f by a null-homotopic edge.
        let g = if t % 2 == 0 {
            let mut g = f.clone();
            for e in x.gens_between(1, a, b) {
                let e = Comb::basis(e, ring);
                let null = e.minus(&lift(&lh.class(&e)));
                g.add_scaled(&null, &ring.random_small(rng, 3));
            }
            g
        } else {
            random_edge(a, b, rng)
        };
        if homotopy_relation(x, &f, &g)? != (lh.class(&f) == lh.class(&g)) {
            return Ok(Err(Witness::new("homotopy relation differs from class equality", &[a, b], "", &[])));
        }
        let nexts: Vec<usize> = (0..nb).filter(|&c| !x.gens_between(1, b, c).is_empty()).collect();
        let c = nexts[rng.gen_range(0..nexts.len())];
        let h = random_edge(b, c, rng);
        let ws = x.gens_between(2, a, c);
        let cols: Vec<Tensor> = ws.iter().map(|&w| x.mu(1, 1, &Comb::basis(w, ring))).collect();
        let rhs = tensor_combs(&single(&f), &single(&h));
        let Some(sol) = exact_solve(&cols, &rhs, ring)? else {
            return Ok(Err(Witness::new("no 2-simplex with the given spine", &[a, b, c], "", &[mu_name(1, 1)])));
        };
        let w = to_comb_over(&ws, &sol);
        let composite = lh.class(&x.face(2, 1, &w));
        if composite != lh.category.compose(&lh.class(&f), &lh.class(&h)) {
            return Ok(Err(Witness::new("composite class", &[a, b, c], "", &[d_name(2, 1)])));
        }
    }
    Ok(Ok(()))
}

/// Serializable linear category. Compositions list `g ∘ f` for `args = [f, g]`
/// as (arrow, scalar) terms; absent pairs compose to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCategoryFixture {
    pub ring: String,
    pub objects: Vec<String>,
    pub arrows: Vec<Gen>,
    pub comp: Vec<LinearCompEntry>,
    pub units: Vec<Vec<(usize, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCompEntry {
    pub args: [usize; 2],
    pub value: Vec<(usize, String)>,
}

fn comb_terms(c: &Comb<usize>) -> Vec<(usize, String)> {
    c.iter().map(|(&k, v)| (k, v.to_string())).collect()
}

fn parse_terms(terms: &[(usize, String)], ring: Ring, bound: usize) -> Result<Comb<usize>> {
    let mut c = Comb::zero();
    for (k, v) in terms {
        if *k >= bound {
            return Err(Error::Parse(format!("arrow index {k} out of range")));
        }
        c.add_term(*k, Scalar::parse(v, ring)?);
    }
    Ok(c)
}

impl LinearCategory {
    pub fn to_fixture(&self) -> LinearCategoryFixture {
        let mut keys: Vec<&(usize, usize)> = self.comp.keys().collect();
        keys.sort();
        let comp = keys
            .into_iter()
            .filter(|k| !self.comp[k].is_zero())
            .map(|&(f, g)| LinearCompEntry { args: [f, g], value: comb_terms(&self.comp[&(f, g)]) })
            .collect();
        LinearCategoryFixture {
            ring: self.ring.to_string(),
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            comp,
            units: self.units.iter().map(comb_terms).collect(),
        }
    }

    pub fn from_fixture(fx: &LinearCategoryFixture) -> Result<LinearCategory> {
        let ring = Ring::parse(&fx.ring)?;
        let na = fx.arrows.len();
        if fx.arrows.iter().any(|g| g.src >= fx.objects.len() || g.tgt >= fx.objects.len()) || fx.units.len() != fx.objects.len() {
            return Err(Error::Parse("arrow or unit out of range".into()));
        }
        let mut comp = HashMap::new();
        for e in &fx.comp {
            if e.args.iter().any(|&a| a >= na) {
                return Err(Error::Parse("composition argument out of range".into()));
            }
            comp.insert((e.args[0], e.args[1]), parse_terms(&e.value, ring, na)?);
        }
        let units = fx.units.iter().map(|u| parse_terms(u, ring, na)).collect::<Result<_>>()?;
        Ok(LinearCategory { ring, objects: fx.objects.clone(), arrows: fx.arrows.clone(), comp, units })
    }
}

/// Serializable form of a templicial module. Matrices are per vertex pair,
/// row-major over the target entry, entries as exact scalar strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplicialFixture {
    pub ring: String,
    pub base: Vec<String>,
    #[serde(rename = "D")]
    pub dim: usize,
    /// level → "a,b" → generator labels.
    pub quivers: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    /// "n,j" → "a,b" → matrix.
    pub faces: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    pub degens: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    pub comult: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    /// vertex → scalar.
    pub counit: BTreeMap<String, String>,
}

impl Templicial {
    pub(crate) fn pair_key_str(&self, a: usize, b: usize) -> String {
        format!("{},{}", self.base[a], self.base[b])
    }

    pub(crate) fn matrix_of(&self, cols: &[Comb<usize>], nrows: usize) -> Vec<Vec<String>> {
        (0..nrows).map(|r| cols.iter().map(|c| c.coeff(&r, self.ring).to_string()).collect()).collect()
    }

    pub fn to_fixture(&self) -> TemplicialFixture {
        let nb = self.base.len();
        let mut quivers = BTreeMap::new();
        let mut faces = BTreeMap::new();
        let mut degens = BTreeMap::new();
        let mut comult = BTreeMap::new();
        let pairs = || (0..nb).flat_map(move |a| (0..nb).map(move |b| (a, b)));
        for n in 0..=self.dim {
            let mut m = BTreeMap::new();
            for (a, b) in pairs() {
                let g = self.gens_between(n, a, b);
                if !g.is_empty() {
                    m.insert(self.pair_key_str(a, b), g.iter().map(|&h| self.levels[n][h].label.clone()).collect());
                }
            }
            quivers.insert(n.to_string(), m);
        }
        let level_block = |n: usize, m: usize, table: &Vec<Comb<usize>>| {
            let mut out = BTreeMap::new();
            for (a, b) in pairs() {
                let g = self.gens_between(n, a, b);
                if g.is_empty() {
                    continue;
                }
                let cols: Vec<Comb<usize>> = g.iter().map(|&h| table[h].map_keys(|&t| self.local_index(m, t))).collect();
                out.insert(self.pair_key_str(a, b), self.matrix_of(&cols, self.gens_between(m, a, b).len()));
            }
            out
        };
        for n in 0..=self.dim {
            for j in 1..n {
                faces.insert(format!("{n},{j}"), level_block(n, n - 1, &self.faces[n][j]));
            }
            if n < self.dim {
                for i in 0..=n {
                    degens.insert(format!("{n},{i}"), level_block(n, n + 1, &self.degens[n][i]));
                }
            }
        }
        for &(k, l) in self.comult.keys() {
            let mut out = BTreeMap::new();
            for (a, b) in pairs() {
                let g = self.gens_between(k + l, a, b);
                if g.is_empty() {
                    continue;
                }
                let rows: usize = (0..nb).map(|c| self.gens_between(k, a, c).len() * self.gens_between(l, c, b).len()).sum();
                let cols: Vec<Comb<usize>> = g.iter().map(|&h| self.comult[&(k, l)][h].map_keys(|key| self.pair_index(k, l, b, key))).collect();
                out.insert(self.pair_key_str(a, b), self.matrix_of(&cols, rows));
            }
            comult.insert(format!("{k},{l}"), out);
        }
        let counit = (0..self.count(0)).map(|g| (self.base[self.levels[0][g].src].clone(), self.counit[g].to_string())).collect();
        TemplicialFixture { ring: self.ring.to_string(), base: self.base.clone(), dim: self.dim, quivers, faces, degens, comult, counit }
    }

    pub fn from_fixture(fx: &TemplicialFixture) -> Result<Templicial> {
        let ring = Ring::parse(&fx.ring)?;
        let base = fx.base.clone();
        let vidx: HashMap<&str, usize> = base.iter().enumerate().map(|(i, b)| (b.as_str(), i)).collect();
        let parse_pair = |s: &str| -> Result<(usize, usize)> {
            let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("bad vertex pair {s}")))?;
            Ok((
                *vidx.get(a).ok_or_else(|| Error::Parse(format!("unknown vertex {a}")))?,
                *vidx.get(b).ok_or_else(|| Error::Parse(format!("unknown vertex {b}")))?,
            ))
        };
        let mut levels = Vec::new();
        for n in 0..=fx.dim {
            let m = fx.quivers.get(&n.to_string()).ok_or_else(|| Error::Parse(format!("missing level {n}")))?;
            let mut gens = Vec::new();
            for (pair, labels) in m {
                let (a, b) = parse_pair(pair)?;
                for l in labels {
                    gens.push(Gen { src: a, tgt: b, label: l.clone() });
                }
            }
            levels.push(gens);
        }
        let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        let (mut faces, mut degens) = empty_tables(&counts);
        let mut x = Templicial { ring, base: base.clone(), dim: fx.dim, levels, faces: vec![], degens: vec![], comult: BTreeMap::new(), counit: vec![] };
        let read = |mat: &Vec<Vec<String>>, ncols: usize| -> Result<Vec<Comb<usize>>> {
            let mut cols = vec![Comb::zero(); ncols];
            for (r, row) in mat.iter().enumerate() {
                if row.len() != ncols {
                    return Err(Error::Parse("matrix row of the wrong length".into()));
                }
                for (c, s) in row.iter().enumerate() {
                    cols[c].add_term(r, Scalar::parse(s, ring)?);
                }
            }
            Ok(cols)
        };
        let parse_nj = |s: &str| -> Result<(usize, usize)> {
            let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse(format!("bad index pair {s}")))?;
            Ok((a.trim().parse().map_err(|_| Error::Parse(s.into()))?, b.trim().parse().map_err(|_| Error::Parse(s.into()))?))
        };
        let fill = |x: &Templicial, block: &BTreeMap<String, Vec<Vec<String>>>, n: usize, m: usize, table: &mut Vec<Comb<usize>>| -> Result<()> {
            for (pair, mat) in block {
                let (a, b) = parse_pair(pair)?;
                let src = x.gens_between(n, a, b);
                let tgt = x.gens_between(m, a, b);
                if mat.len() != tgt.len() {
                    return Err(Error::Parse(format!("matrix at {pair} has {} rows, expected {}", mat.len(), tgt.len())));
                }
                for (c, col) in read(mat, src.len())?.into_iter().enumerate() {
                    table[src[c]] = col.map_keys(|&r| tgt[r]);
                }
            }
            Ok(())
        };
        for (key, block) in &fx.faces {
            let (n, j) = parse_nj(key)?;
            if n > fx.dim || j == 0 || j >= n {
                return Err(Error::Parse(format!("face {key} out of range")));
            }
            fill(&x, block, n, n - 1, &mut faces[n][j])?;
        }
        for (key, block) in &fx.degens {
            let (n, i) = parse_nj(key)?;
            if n >= fx.dim || i > n {
                return Err(Error::Parse(format!("degeneracy {key} out of range")));
            }
            fill(&x, block, n, n + 1, &mut degens[n][i])?;
        }
        let mut comult = BTreeMap::new();
        for n in 2..=fx.dim {
            for k in 1..n {
                let mut table = vec![Tensor::zero(); counts[n]];
                if let Some(block) = fx.comult.get(&format!("{k},{}", n - k)) {
                    for (pair, mat) in block {
                        let (a, b) = parse_pair(pair)?;
                        let src = x.gens_between(n, a, b);
                        for (c, col) in read(mat, src.len())?.into_iter().enumerate() {
                            let mut t = Tensor::zero();
                            for (&r, v) in col.iter() {
                                let key = x.pair_key(k, n - k, a, b, r).ok_or_else(|| Error::Parse(format!("row {r} out of range at {pair}")))?;
                                t.add_term(key, v.clone());
                            }
                            table[src[c]] = t;
                        }
                    }
                }
                comult.insert((k, n - k), table);
            }
        }
        let mut counit = Vec::new();
        for g in 0..counts[0] {
            let v = &base[x.levels[0][g].src];
            let s = fx.counit.get(v).ok_or_else(|| Error::Parse(format!("missing counit at {v}")))?;
            counit.push(Scalar::parse(s, ring)?);
        }
        x.faces = faces;
        x.degens = degens;
        x.comult = comult;
        x.counit = counit;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{nerve, standard_simplex};

    #[test]
    fn free_on_simplex_passes() {
        let x = free_templicial(&standard_simplex(2, 4), Ring::Q);
        x.check().unwrap();
        assert_eq!(x.gens_between(2, 0, 2).iter().filter(|&&g| x.label(2, g) == "[0,1,2]").count(), 1);
    }

    #[test]
    fn nerve_round_trips() {
        let c = LinearCategory::free(&FinCategory::poset(2), Ring::Q);
        c.check_laws().unwrap();
        let n = linear_nerve(&c, 4);
        n.check().unwrap();
        let (c2, iso) = strong_monoidal_recognize(&n).unwrap().unwrap();
        c2.check_laws().unwrap();
        iso.check(&n, &linear_nerve(&c2, 4)).unwrap();
        let ident: Vec<usize> = (0..c.arrows.len()).collect();
        assert!(c.is_iso_via(&c2, &ident));
        let f = free_templicial(&nerve(&FinCategory::poset(2), 4).unwrap(), Ring::Q);
        assert!(unique_horn_filling_check(&f).unwrap());
    }

    #[test]
    fn fixture_round_trip() {
        let c = LinearCategory::free(&FinCategory::poset(1), Ring::Q);
        let n = linear_nerve(&c, 3);
        let back = Templicial::from_fixture(&n.to_fixture()).unwrap();
        assert_eq!(back.to_fixture(), n.to_fixture());
        back.check().unwrap();
    }
}
