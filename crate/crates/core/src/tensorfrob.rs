//! Tensor algebras and kernels.
//!
//! `T` sends a graded quiver (or a monoid in narrow simplicial quivers) to a
//! Frobenius object by taking all tensor words indexed by partitions; `K`
//! goes back by taking joint kernels of the comultiplications. `ε` and `φ`
//! witness that the two are mutually inverse.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::exactcore::{sign, tensor_combs, Comb, Ring, Scalar};
use crate::frobenius::{check_f_templicial_map, composable_tuples, NaF};
use crate::intervals::{Mor, Partition};
use crate::templicial::{d_name, empty_tables, exact_kernel, exact_solve, map_factors, mu_name, s_name, single, Gen, Templicial, TemplicialMap, Tensor, Witness};
use crate::{Error, Result};

type Table = Vec<Vec<Vec<Comb<usize>>>>;

/// Quivers `V_n` for `1 ≤ n ≤ dim` on a shared vertex set. `levels[0]` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedQuiver {
    pub ring: Ring,
    pub base: Vec<String>,
    pub dim: usize,
    pub levels: Vec<Vec<Gen>>,
}

impl GradedQuiver {
    pub fn count(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    /// A random graded quiver with at most `max_rank` arrows per vertex pair and degree.
    pub fn random<R: Rng>(ring: Ring, vertices: usize, dim: usize, max_rank: usize, rng: &mut R) -> GradedQuiver {
        let base: Vec<String> = (0..vertices).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let mut levels = vec![Vec::new()];
        for n in 1..=dim {
            let mut lv = Vec::new();
            for a in 0..vertices {
                for b in 0..vertices {
                    for i in 0..rng.gen_range(0..=max_rank) {
                        lv.push(Gen { src: a, tgt: b, label: format!("v{n}:{}{}#{i}", base[a], base[b]) });
                    }
                }
            }
            levels.push(lv);
        }
        GradedQuiver { ring, base, dim, levels }
    }

    /// Composable tuples of generators with the given degrees.
    pub fn tuples(&self, degrees: &[usize]) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for (pos, &n) in degrees.iter().enumerate() {
            let mut next = Vec::new();
            for t in &out {
                for g in 0..self.count(n) {
                    if pos == 0 || self.levels[degrees[pos - 1]][t[pos - 1]].tgt == self.levels[n][g].src {
                        let mut u = t.clone();
                        u.push(g);
                        next.push(u);
                    }
                }
            }
            out = next;
        }
        out
    }

    fn pair_of(&self, n: usize, g: usize) -> (usize, usize) {
        (self.levels[n][g].src, self.levels[n][g].tgt)
    }
}

/// A narrow simplicial quiver (inner faces and degeneracies only) with a
/// monoid structure `m_{p,q}: A_p ⊗ A_q -> A_{p+q-1}`, `u: I -> A_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NarrowMonoid {
    pub quiver: GradedQuiver,
    /// `faces[n][j][g]` for `0 < j < n`.
    pub faces: Table,
    /// `degens[n][i][g]` for `0 < i < n`, `n < dim`.
    pub degens: Table,
    /// `m[(p,q)][(g,h)]` for `p + q ≤ dim`; absent pairs map to zero.
    pub m: BTreeMap<(usize, usize), BTreeMap<(usize, usize), Comb<usize>>>,
    /// `u_a ∈ A_1(a,a)`.
    pub u: Vec<Comb<usize>>,
}

fn m_name(p: usize, q: usize) -> String {
    format!("m[{p},{q}]")
}

impl NarrowMonoid {
    pub fn ring(&self) -> Ring {
        self.quiver.ring
    }

    pub fn dim(&self) -> usize {
        self.quiver.dim
    }

    pub fn face(&self, n: usize, j: usize, x: &Comb<usize>) -> Comb<usize> {
        assert!(0 < j && j < n);
        x.bind(|&g| self.faces[n][j][g].clone())
    }

    pub fn degen(&self, n: usize, i: usize, x: &Comb<usize>) -> Comb<usize> {
        assert!(0 < i && i < n);
        x.bind(|&g| self.degens[n][i][g].clone())
    }

    /// `A(f): A_n -> A_m` for a narrow `f: [m] -> [n]`.
    pub fn act(&self, f: &Mor, x: &Comb<usize>) -> Comb<usize> {
        assert!(f.is_narrow(), "{f} is not narrow");
        let (deltas, sigmas) = f.normal_form();
        let mut level = f.n;
        let mut v = x.clone();
        for &i in &deltas {
            v = self.face(level, i, &v);
            level -= 1;
        }
        for &j in &sigmas {
            v = self.degen(level, j, &v);
            level += 1;
        }
        v
    }

    pub fn mult_gen(&self, p: usize, q: usize, g: usize, h: usize) -> Comb<usize> {
        self.m.get(&(p, q)).and_then(|t| t.get(&(g, h))).cloned().unwrap_or_default()
    }

    pub fn mult(&self, p: usize, q: usize, x: &Comb<usize>, y: &Comb<usize>) -> Comb<usize> {
        let mut out = Comb::zero();
        for (&g, c) in x.iter() {
            for (&h, d) in y.iter() {
                out.add_scaled(&self.mult_gen(p, q, g, h), &(c * d));
            }
        }
        out
    }

    /// Right-nested `m_{p_1,…,p_k}` on a composable tuple; one part is the identity.
    pub fn mult_multi(&self, parts: &[usize], key: &[usize]) -> Comb<usize> {
        let ring = self.ring();
        if parts.len() == 1 {
            return Comb::basis(key[0], ring);
        }
        let rest: usize = parts[1..].iter().sum::<usize>() + 2 - parts.len();
        let inner = self.mult_multi(&parts[1..], &key[1..]);
        self.mult(parts[0], rest, &Comb::basis(key[0], ring), &inner)
    }

    /// Typing, narrow simplicial identities, and the monoid axioms.
    pub fn check(&self) -> std::result::Result<(), Witness> {
        self.check_shapes()?;
        self.check_simplicial()?;
        self.check_naturality()?;
        self.check_monoid()
    }

    fn label(&self, n: usize, g: usize) -> &str {
        &self.quiver.levels[n][g].label
    }

    fn typed(&self, n: usize, v: &Comb<usize>, ab: (usize, usize)) -> bool {
        v.keys().all(|&h| h < self.quiver.count(n) && self.quiver.pair_of(n, h) == ab)
    }

    fn check_shapes(&self) -> std::result::Result<(), Witness> {
        let q = &self.quiver;
        let d = q.dim;
        if q.levels.len() != d + 1 || self.faces.len() != d + 1 || self.degens.len() != d + 1 || self.u.len() != q.base.len() {
            return Err(Witness::new("shape: level count", &[], "", &[]));
        }
        for n in 1..=d {
            for g in 0..q.count(n) {
                let ab = q.pair_of(n, g);
                for j in 1..n {
                    if !self.typed(n - 1, &self.faces[n][j][g], ab) {
                        return Err(Witness::new("typing: face", &[n, j], self.label(n, g), &[d_name(n, j)]));
                    }
                }
                if n < d {
                    for i in 1..n {
                        if !self.typed(n + 1, &self.degens[n][i][g], ab) {
                            return Err(Witness::new("typing: degeneracy", &[n, i], self.label(n, g), &[s_name(n, i)]));
                        }
                    }
                }
            }
        }
        for (a, u) in self.u.iter().enumerate() {
            if d >= 1 && !self.typed(1, u, (a, a)) {
                return Err(Witness::new("typing: unit", &[a], &q.base[a], &["u".into()]));
            }
        }
        for (&(p, qq), t) in &self.m {
            for (&(g, h), v) in t {
                if !self.typed(p + qq - 1, v, (q.levels[p][g].src, q.levels[qq][h].tgt)) {
                    return Err(Witness::new("typing: multiplication", &[p, qq], self.label(p, g), &[m_name(p, qq)]));
                }
            }
        }
        Ok(())
    }

    fn check_simplicial(&self) -> std::result::Result<(), Witness> {
        let ring = self.ring();
        let d = self.dim();
        for n in 1..=d {
            for g in 0..self.quiver.count(n) {
                let e = Comb::basis(g, ring);
                let name = self.label(n, g).to_string();
                for j in 1..n {
                    for i in 1..j {
                        if self.face(n - 1, i, &self.face(n, j, &e)) != self.face(n - 1, j - 1, &self.face(n, i, &e)) {
                            return Err(Witness::new("narrow simplicial identity d_i d_j", &[n, i, j], &name, &[d_name(n, j), d_name(n - 1, i)]));
                        }
                    }
                }
                if n >= d {
                    continue;
                }
                for j in 1..n {
                    let s = self.degen(n, j, &e);
                    for i in 1..=n {
                        let lhs = self.face(n + 1, i, &s);
                        let rhs = if i == j || i == j + 1 {
                            e.clone()
                        } else if i < j {
                            self.degen(n - 1, j - 1, &self.face(n, i, &e))
                        } else {
                            self.degen(n - 1, j, &self.face(n, i - 1, &e))
                        };
                        if lhs != rhs {
                            return Err(Witness::new("narrow simplicial identity d_i s_j", &[n, i, j], &name, &[s_name(n, j), d_name(n + 1, i)]));
                        }
                    }
                    if n + 1 < d {
                        for i in 1..=j {
                            if self.degen(n + 1, i, &s) != self.degen(n + 1, j + 1, &self.degen(n, i, &e)) {
                                return Err(Witness::new("narrow simplicial identity s_i s_j", &[n, i, j], &name, &[s_name(n, j), s_name(n + 1, i)]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn pairs(&self, p: usize, q: usize) -> Vec<(usize, usize)> {
        self.quiver.tuples(&[p, q]).into_iter().map(|t| (t[0], t[1])).collect()
    }

    fn check_naturality(&self) -> std::result::Result<(), Witness> {
        let ring = self.ring();
        let d = self.dim();
        for r in 1..d {
            for p in 1..=r {
                let q = r + 1 - p;
                for (g, h) in self.pairs(p, q) {
                    let (eg, eh) = (Comb::basis(g, ring), Comb::basis(h, ring));
                    let v = self.mult_gen(p, q, g, h);
                    let name = format!("{} ⊗ {}", self.label(p, g), self.label(q, h));
                    for j in 1..p {
                        if self.face(r, j, &v) != self.mult(p - 1, q, &self.face(p, j, &eg), &eh) {
                            return Err(Witness::new("m natural in faces", &[p, q, j], &name, &[m_name(p, q), d_name(r, j)]));
                        }
                    }
                    for j in 1..q {
                        if self.face(r, j + p - 1, &v) != self.mult(p, q - 1, &eg, &self.face(q, j, &eh)) {
                            return Err(Witness::new("m natural in faces", &[p, q, j + p - 1], &name, &[m_name(p, q), d_name(r, j + p - 1)]));
                        }
                    }
                    if r + 1 < d {
                        for i in 1..p {
                            if self.degen(r, i, &v) != self.mult(p + 1, q, &self.degen(p, i, &eg), &eh) {
                                return Err(Witness::new("m natural in degeneracies", &[p, q, i], &name, &[m_name(p, q), s_name(r, i)]));
                            }
                        }
                        for i in 1..q {
                            if self.degen(r, i + p - 1, &v) != self.mult(p, q + 1, &eg, &self.degen(q, i, &eh)) {
                                return Err(Witness::new("m natural in degeneracies", &[p, q, i + p - 1], &name, &[m_name(p, q), s_name(r, i + p - 1)]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_monoid(&self) -> std::result::Result<(), Witness> {
        let ring = self.ring();
        let d = self.dim();
        for n in 1..d {
            for g in 0..self.quiver.count(n) {
                let e = Comb::basis(g, ring);
                let (a, b) = self.quiver.pair_of(n, g);
                if self.mult(1, n, &self.u[a], &e) != e || self.mult(n, 1, &e, &self.u[b]) != e {
                    return Err(Witness::new("m unital", &[n], self.label(n, g), &[m_name(1, n), m_name(n, 1), "u".into()]));
                }
            }
        }
        for p in 1..=d {
            for q in 1..=d {
                for r in 1..=d {
                    if p + q + r > d + 2 {
                        continue;
                    }
                    for t in self.quiver.tuples(&[p, q, r]) {
                        let es: Vec<Comb<usize>> = t.iter().map(|&g| Comb::basis(g, ring)).collect();
                        let lhs = self.mult(p + q - 1, r, &self.mult(p, q, &es[0], &es[1]), &es[2]);
                        let rhs = self.mult(p, q + r - 1, &es[0], &self.mult(q, r, &es[1], &es[2]));
                        if lhs != rhs {
                            let name = format!("{} ⊗ {} ⊗ {}", self.label(p, t[0]), self.label(q, t[1]), self.label(r, t[2]));
                            return Err(Witness::new("m associative", &[p, q, r], &name, &[m_name(p, q), m_name(q, r)]));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A map of narrow monoids, given on generators degreewise.
#[derive(Clone, Debug, PartialEq)]
pub struct NarrowMap {
    pub alpha: Vec<Vec<Comb<usize>>>,
}

impl NarrowMap {
    pub fn apply(&self, n: usize, x: &Comb<usize>) -> Comb<usize> {
        x.bind(|&g| self.alpha[n][g].clone())
    }

    /// Typing on the identity vertex map plus bijectivity in every degree.
    pub fn check_graded_iso(&self, src: &GradedQuiver, tgt: &GradedQuiver) -> Result<std::result::Result<(), Witness>> {
        for n in 1..=src.dim.min(tgt.dim) {
            if src.count(n) != tgt.count(n) {
                return Ok(Err(Witness::new("iso: ranks differ", &[n], "", &[])));
            }
            for g in 0..src.count(n) {
                let ab = src.pair_of(n, g);
                if self.alpha[n][g].keys().any(|&h| tgt.pair_of(n, h) != ab) {
                    return Ok(Err(Witness::new("iso: typing", &[n], &src.levels[n][g].label, &[])));
                }
            }
            for h in 0..tgt.count(n) {
                if exact_solve(&self.alpha[n], &Comb::basis(h, tgt.ring), tgt.ring)?.is_none() {
                    return Ok(Err(Witness::new("iso: not surjective", &[n], &tgt.levels[n][h].label, &[])));
                }
            }
        }
        Ok(Ok(()))
    }

    /// Commutation with faces, degeneracies, `m` and `u`.
    pub fn check(&self, src: &NarrowMonoid, tgt: &NarrowMonoid) -> std::result::Result<(), Witness> {
        let ring = src.ring();
        let d = src.dim().min(tgt.dim());
        for n in 1..=d {
            for g in 0..src.quiver.count(n) {
                let e = Comb::basis(g, ring);
                let img = self.apply(n, &e);
                let name = src.label(n, g);
                for j in 1..n {
                    if self.apply(n - 1, &src.face(n, j, &e)) != tgt.face(n, j, &img) {
                        return Err(Witness::new("map natural in faces", &[n, j], name, &[d_name(n, j)]));
                    }
                }
                if n < d {
                    for i in 1..n {
                        if self.apply(n + 1, &src.degen(n, i, &e)) != tgt.degen(n, i, &img) {
                            return Err(Witness::new("map natural in degeneracies", &[n, i], name, &[s_name(n, i)]));
                        }
                    }
                }
            }
        }
        for (a, u) in src.u.iter().enumerate() {
            if d >= 1 && self.apply(1, u) != tgt.u[a] {
                return Err(Witness::new("map preserves u", &[a], &src.quiver.base[a], &["u".into()]));
            }
        }
        for r in 1..d {
            for p in 1..=r {
                let q = r + 1 - p;
                for (g, h) in src.pairs(p, q) {
                    let lhs = self.apply(r, &src.mult_gen(p, q, g, h));
                    let rhs = tgt.mult(p, q, &self.apply(p, &Comb::basis(g, ring)), &self.apply(q, &Comb::basis(h, ring)));
                    if lhs != rhs {
                        return Err(Witness::new("map preserves m", &[p, q], src.label(p, g), &[m_name(p, q)]));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `T(A)`: a Frobenius object whose degree-`n` generators are pairs
/// `(I, word)` with `I ∈ 𝒫_n` and `word` a composable tuple of degrees `gaps(I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorAlgebra {
    pub naf: NaF,
    /// `summands[n][g] = (I, word)`; in degree 0 the word is the vertex.
    pub summands: Vec<Vec<(Partition, Vec<usize>)>>,
    index: Vec<HashMap<(Vec<usize>, Vec<usize>), usize>>,
}

impl TensorAlgebra {
    pub fn lookup(&self, n: usize, i: &Partition, word: &[usize]) -> Option<usize> {
        self.index[n].get(&(i.members.clone(), word.to_vec())).copied()
    }

    /// The generator for the one-letter word `g` of degree `n ≥ 1`.
    pub fn letter(&self, n: usize, g: usize) -> usize {
        self.lookup(n, &Partition::trivial(n), &[g]).expect("letter present")
    }

    pub fn host(&self) -> &Templicial {
        &self.naf.host
    }
}

/// Vertex sitting at point `s` of the summand `(I, word)`.
fn vertex_at(q: &GradedQuiver, i: &Partition, word: &[usize], s: usize) -> usize {
    if i.n == 0 {
        return word[0];
    }
    let degrees = i.gaps();
    let pos = i.members.iter().position(|&x| x == s).expect("point of the partition");
    if pos < word.len() {
        q.levels[degrees[pos]][word[pos]].src
    } else {
        q.levels[degrees[pos - 1]][word[pos - 1]].tgt
    }
}

fn build_tensor(q: &GradedQuiver, monoid: Option<&NarrowMonoid>) -> TensorAlgebra {
    let ring = q.ring;
    let d = q.dim;
    let mut summands: Vec<Vec<(Partition, Vec<usize>)>> = vec![(0..q.base.len()).map(|a| (Partition::of(0, &[0]), vec![a])).collect()];
    for n in 1..=d {
        let mut lv = Vec::new();
        for i in Partition::enumerate(n) {
            for w in q.tuples(&i.gaps()) {
                lv.push((i.clone(), w));
            }
        }
        summands.push(lv);
    }
    let index: Vec<HashMap<(Vec<usize>, Vec<usize>), usize>> =
        summands.iter().map(|l| l.iter().enumerate().map(|(g, (i, w))| ((i.members.clone(), w.clone()), g)).collect()).collect();
    let levels: Vec<Vec<Gen>> = summands
        .iter()
        .enumerate()
        .map(|(n, l)| {
            l.iter()
                .map(|(i, w)| {
                    if n == 0 {
                        return Gen { src: w[0], tgt: w[0], label: q.base[w[0]].clone() };
                    }
                    let degrees = i.gaps();
                    let names: Vec<&str> = w.iter().zip(&degrees).map(|(&g, &k)| q.levels[k][g].label.as_str()).collect();
                    Gen {
                        src: q.levels[degrees[0]][w[0]].src,
                        tgt: q.levels[*degrees.last().unwrap()][*w.last().unwrap()].tgt,
                        label: format!("{}[{}]", i.label(), names.join("⊗")),
                    }
                })
                .collect()
        })
        .collect();
    let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
    let (faces, degens) = empty_tables(&counts);
    let mut comult = BTreeMap::new();
    for n in 2..=d {
        for k in 1..n {
            let v = summands[n]
                .iter()
                .map(|(i, w)| match i.members.iter().position(|&x| x == k) {
                    Some(pos) => {
                        let left = index[k][&(i.le(k).members, w[..pos].to_vec())];
                        let right = index[n - k][&(i.ge(k).shifted(0).members, w[pos..].to_vec())];
                        Tensor::basis(vec![left, right], ring)
                    }
                    None => Tensor::zero(),
                })
                .collect();
            comult.insert((k, n - k), v);
        }
    }
    let host = Templicial { ring, base: q.base.clone(), dim: d, levels, faces, degens, comult, counit: vec![ring.one(); q.base.len()] };
    let mut naf = NaF::empty(host);
    for n in 2..=d {
        for p in 1..n {
            let table = naf.z.get_mut(&(p, n - p)).unwrap();
            for key in composable_tuples(&naf.host, &[p, n - p]) {
                let (i, w) = &summands[p][key[0]];
                let (j, v) = &summands[n - p][key[1]];
                let mut word = w.clone();
                word.extend_from_slice(v);
                table.insert((key[0], key[1]), Comb::basis(index[n][&(i.concat(j).members, word)], ring));
            }
        }
    }
    let mut t = TensorAlgebra { naf, summands, index };
    if let Some(a) = monoid {
        for n in 0..=d {
            for g in 0..t.summands[n].len() {
                for j in 1..n {
                    let v = tensor_action(a, &t, &Mor::delta(n, j), g);
                    t.naf.host.faces[n][j][g] = v;
                }
                if n < d {
                    for i in 0..=n {
                        let v = tensor_action(a, &t, &Mor::sigma(n, i), g);
                        t.naf.host.degens[n][i][g] = v;
                    }
                }
            }
        }
    }
    t
}

/// `TA(f)` on one generator `(I, word)` of degree `f.n`:
/// `A(f_{I_1}) m_{I_1} ⊗ … ⊗ A(f_{I_p}) m_{I_p}` into the summand `f⁻¹(I)`.
pub fn tensor_action(a: &NarrowMonoid, t: &TensorAlgebra, f: &Mor, g: usize) -> Comb<usize> {
    assert!(f.is_interval(), "{f} is not an interval morphism");
    let ring = a.ring();
    let q = &a.quiver;
    let (i, word) = &t.summands[f.n][g];
    let j = f.preimage(i);
    let fj = f.compose(&j.as_mor());
    let pieces = i.splitting(&fj);
    let degrees = i.gaps();
    let mut acc = Tensor::term(vec![], ring.one());
    let mut at = 0;
    for (r, ir) in pieces.iter().enumerate() {
        let len = ir.len();
        let merged = if len == 0 {
            a.u[vertex_at(q, i, word, ir.start)].clone()
        } else {
            let v = a.mult_multi(&degrees[at..at + len], &word[at..at + len]);
            at += len;
            v
        };
        let (lo, hi) = (j.members[r], j.members[r + 1]);
        let fr = Mor { n: f.at(hi) - f.at(lo), values: (lo..=hi).map(|x| f.at(x) - f.at(lo)).collect() };
        let fi = fr.restriction(ir);
        acc = tensor_combs(&acc, &single(&a.act(&fi, &merged)));
        if acc.is_zero() {
            break;
        }
    }
    let m = f.m();
    if m == 0 {
        return Comb::basis(g, ring);
    }
    acc.map_keys(|w| t.lookup(m, &j, w).expect("word of the target summand"))
}

/// `T(V)` as an ℕ-graded Frobenius object. Its simplicial tables are zero and
/// must not be checked; only `μ`, `ε` and `Z` are meaningful.
pub fn tensor_graded(v: &GradedQuiver) -> TensorAlgebra {
    build_tensor(v, None)
}

/// `T(A)` as a Frobenius templicial module.
pub fn tensor_t(a: &NarrowMonoid) -> TensorAlgebra {
    build_tensor(&a.quiver, Some(a))
}

/// `K(X)`: joint kernels of `μ_{k,n-k}`, `k, n-k ≥ 1`, with their inclusions.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub quiver: GradedQuiver,
    /// `embed[n][g]` is the generator `g` of `K_n` inside `X_n`.
    pub embed: Vec<Vec<Comb<usize>>>,
    by_pair: Vec<BTreeMap<(usize, usize), Vec<usize>>>,
    x_pairs: Vec<Vec<(usize, usize)>>,
}

impl Kernel {
    /// Coordinates of `v ∈ X_n` in the kernel basis; fails if `v ∉ K_n`.
    pub fn coords(&self, n: usize, v: &Comb<usize>) -> Result<Comb<usize>> {
        let ring = self.quiver.ring;
        let mut groups: BTreeMap<(usize, usize), Comb<usize>> = BTreeMap::new();
        for (&g, c) in v.iter() {
            groups.entry(self.x_pairs[n][g]).or_default().add_term(g, c.clone());
        }
        let mut out = Comb::zero();
        for (ab, part) in groups {
            let gens = self.by_pair[n].get(&ab).cloned().unwrap_or_default();
            let cols: Vec<Comb<usize>> = gens.iter().map(|&k| self.embed[n][k].clone()).collect();
            match exact_solve(&cols, &part, ring)? {
                Some(x) => {
                    for (k, c) in gens.iter().zip(x) {
                        out.add_term(*k, c);
                    }
                }
                None if !ring.is_field() => return Err(Error::Refused(format!("degree {n}: the kernel is not a direct summand over Z"))),
                None => return Err(Error::Invariant(format!("degree {n}: element outside the kernel"))),
            }
        }
        Ok(out)
    }

    pub fn include(&self, n: usize, v: &Comb<usize>) -> Comb<usize> {
        v.bind(|&g| self.embed[n][g].clone())
    }
}

/// The graded kernel of an ℕ-graded Frobenius object.
pub fn kernel_graded(x: &NaF) -> Result<Kernel> {
    let h = &x.host;
    let ring = h.ring;
    let mut levels = vec![Vec::new()];
    let mut embed = vec![Vec::new()];
    let mut by_pair = vec![BTreeMap::new()];
    let x_pairs: Vec<Vec<(usize, usize)>> = h.levels.iter().map(|l| l.iter().map(|g| (g.src, g.tgt)).collect()).collect();
    for n in 1..=h.dim {
        let mut pairs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for g in 0..h.count(n) {
            pairs.entry(x_pairs[n][g]).or_default().push(g);
        }
        let (mut lv, mut em, mut bp) = (Vec::new(), Vec::new(), BTreeMap::new());
        for ((a, b), gens) in pairs {
            let basis: Vec<Comb<usize>> = if n == 1 {
                gens.iter().map(|&g| Comb::basis(g, ring)).collect()
            } else {
                let cols: Vec<Comb<(usize, Vec<usize>)>> = gens
                    .iter()
                    .map(|&g| {
                        let e = Comb::basis(g, ring);
                        let mut c = Comb::zero();
                        for k in 1..n {
                            for (key, v) in h.mu(k, n - k, &e).iter() {
                                c.add_term((k, key.clone()), v.clone());
                            }
                        }
                        c
                    })
                    .collect();
                exact_kernel(&cols, ring).iter().map(|v| v.map_keys(|&i| gens[i])).collect()
            };
            let mut ids = Vec::new();
            for (i, v) in basis.into_iter().enumerate() {
                let label = match v.first() {
                    Some((&g, c)) if v.len() == 1 && c.is_one() => h.label(n, g).to_string(),
                    _ => format!("ker{n}:{}{}#{i}", h.base[a], h.base[b]),
                };
                ids.push(lv.len());
                lv.push(Gen { src: a, tgt: b, label });
                em.push(v);
            }
            bp.insert((a, b), ids);
        }
        levels.push(lv);
        embed.push(em);
        by_pair.push(bp);
    }
    Ok(Kernel { quiver: GradedQuiver { ring, base: h.base.clone(), dim: h.dim, levels }, embed, by_pair, x_pairs })
}

/// `K(X)` with its narrow action and the monoid `m_{p,q} = d_p Z^{p,q}`, `u = s_0 η`.
pub fn kernel_k(x: &NaF) -> Result<(NarrowMonoid, Kernel)> {
    let k = kernel_graded(x)?;
    let h = &x.host;
    let d = h.dim;
    let q = &k.quiver;
    let mut faces: Table = vec![Vec::new(); d + 1];
    let mut degens: Table = vec![Vec::new(); d + 1];
    for n in 1..=d {
        faces[n] = vec![Vec::new(); n];
        degens[n] = vec![Vec::new(); n];
        for j in 1..n {
            faces[n][j] = (0..q.count(n)).map(|g| k.coords(n - 1, &h.face(n, j, &k.embed[n][g]))).collect::<Result<_>>()?;
        }
        if n < d {
            for i in 1..n {
                degens[n][i] = (0..q.count(n)).map(|g| k.coords(n + 1, &h.degen(n, i, &k.embed[n][g]))).collect::<Result<_>>()?;
            }
        }
    }
    let mut m = BTreeMap::new();
    for r in 1..d {
        for p in 1..=r {
            let qq = r + 1 - p;
            let mut table = BTreeMap::new();
            for t in q.tuples(&[p, qq]) {
                let z = x.zmul(p, qq, &tensor_combs(&single(&k.embed[p][t[0]]), &single(&k.embed[qq][t[1]])));
                let v = k.coords(r, &h.face(r + 1, p, &z))?;
                if !v.is_zero() {
                    table.insert((t[0], t[1]), v);
                }
            }
            m.insert((p, qq), table);
        }
    }
    let u = if d >= 1 { (0..h.base.len()).map(|a| k.coords(1, &h.degen(0, 0, &h.eta(a)))).collect::<Result<_>>()? } else { vec![Comb::zero(); h.base.len()] };
    Ok((NarrowMonoid { quiver: q.clone(), faces, degens, m, u }, k))
}

/// `ξ_n = Σ_{I ∈ 𝒫_n} (-1)^{ℓ(I)+1} Z^I μ_I` for `n ≥ 1`.
pub fn xi(x: &NaF, n: usize, v: &Comb<usize>) -> Comb<usize> {
    assert!(n >= 1);
    let ring = x.host.ring;
    let mut out = Comb::zero();
    for i in Partition::enumerate(n) {
        out.add_scaled(&x.z_partition(&i, &x.host.mu_partition(&i, v)), &sign(ring, i.len() + 1));
    }
    out
}

/// `ε_X: TK(X) -> X` and `φ: X -> TK(X)` with the data they are built from.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub kernel: Kernel,
    pub monoid: Option<NarrowMonoid>,
    pub tk: TensorAlgebra,
    pub epsilon: TemplicialMap,
    pub phi: TemplicialMap,
}

/// Builds `ε_X` and `φ`. With `simplicial`, `K(X)` carries its narrow monoid
/// and `TK(X)` its simplicial structure.
pub fn epsilon_phi(x: &NaF, simplicial: bool) -> Result<Equivalence> {
    let h = &x.host;
    let ring = h.ring;
    let (monoid, kernel) = if simplicial {
        let (a, k) = kernel_k(x)?;
        (Some(a), k)
    } else {
        (None, kernel_graded(x)?)
    };
    let tk = match &monoid {
        Some(a) => tensor_t(a),
        None => tensor_graded(&kernel.quiver),
    };
    let ids: Vec<usize> = (0..h.base.len()).collect();
    let mut eps = Vec::new();
    let mut phi = Vec::new();
    for n in 0..=h.dim {
        let mut col = Vec::new();
        for (i, w) in &tk.summands[n] {
            col.push(if n == 0 {
                h.eta(w[0])
            } else {
                let word = w.iter().zip(i.gaps()).fold(Tensor::term(vec![], ring.one()), |acc, (&g, k)| tensor_combs(&acc, &single(&kernel.embed[k][g])));
                x.z_partition(i, &word)
            });
        }
        eps.push(col);
        let mut col = Vec::new();
        for g in 0..h.count(n) {
            let e = Comb::basis(g, ring);
            if n == 0 {
                let a = h.levels[0][g].src;
                col.push(Comb::term(tk.lookup(0, &Partition::of(0, &[0]), &[a]).unwrap(), h.counit[g].clone()));
                continue;
            }
            let mut out = Comb::zero();
            for i in Partition::enumerate(n) {
                let degrees = i.gaps();
                let mut bad = None;
                let t = map_factors(&h.mu_partition(&i, &e), |pos, f| {
                    let k = degrees[pos];
                    match kernel.coords(k, &xi(x, k, &Comb::basis(f, ring))) {
                        Ok(c) => single(&c),
                        Err(err) => {
                            bad = Some(err);
                            Tensor::zero()
                        }
                    }
                });
                if let Some(err) = bad {
                    return Err(err);
                }
                for (w, c) in t.iter() {
                    out.add_term(tk.lookup(n, &i, w).expect("kernel word"), c.clone());
                }
            }
            col.push(out);
        }
        phi.push(col);
    }
    Ok(Equivalence {
        kernel,
        monoid,
        tk,
        epsilon: TemplicialMap { vertex_map: ids.clone(), alpha: eps },
        phi: TemplicialMap { vertex_map: ids, alpha: phi },
    })
}

impl Equivalence {
    /// `ε∘φ = id`, `φ∘ε = id`, and `ε` preserves `μ`, `ε`, `Z` (and the
    /// simplicial structure when present).
    pub fn check(&self, x: &NaF) -> std::result::Result<(), Witness> {
        let h = &x.host;
        let t = &self.tk.naf.host;
        for n in 0..=h.dim {
            for g in 0..h.count(n) {
                let e = Comb::basis(g, h.ring);
                if self.epsilon.apply(n, &self.phi.apply(n, &e)) != e {
                    return Err(Witness::new("epsilon after phi is the identity", &[n], h.label(n, g), &["epsilon".into(), "phi".into()]));
                }
            }
            for g in 0..t.count(n) {
                let e = Comb::basis(g, h.ring);
                if self.phi.apply(n, &self.epsilon.apply(n, &e)) != e {
                    return Err(Witness::new("phi after epsilon is the identity", &[n], t.label(n, g), &["epsilon".into(), "phi".into()]));
                }
            }
        }
        if self.monoid.is_some() {
            check_f_templicial_map(&self.epsilon, &self.tk.naf, x)
        } else {
            check_graded_map(&self.epsilon, &self.tk.naf, x)
        }
    }
}

/// Graded map check: typing, `μ`, counit and `Z`.
pub fn check_graded_map(alpha: &TemplicialMap, src: &NaF, tgt: &NaF) -> std::result::Result<(), Witness> {
    let (x, y) = (&src.host, &tgt.host);
    let ring = x.ring;
    for n in 0..=x.dim.min(y.dim) {
        for g in 0..x.count(n) {
            let e = Comb::basis(g, ring);
            let img = alpha.apply(n, &e);
            let Gen { src: a, tgt: b, .. } = x.levels[n][g];
            if img.keys().any(|&w| y.levels[n][w].src != alpha.vertex_map[a] || y.levels[n][w].tgt != alpha.vertex_map[b]) {
                return Err(Witness::new("map typing", &[n], x.label(n, g), &[]));
            }
            if n == 0 && y.counit_of(&img) != x.counit_of(&e).into_iter().map(|(v, c)| (alpha.vertex_map[v], c)).collect() {
                return Err(Witness::new("map preserves counit", &[0], x.label(n, g), &["eps".into()]));
            }
            for k in 1..n {
                if alpha.apply_tensor(&[k, n - k], &x.mu(k, n - k, &e), ring) != y.mu(k, n - k, &img) {
                    return Err(Witness::new("map monoidal", &[k, n - k], x.label(n, g), &[mu_name(k, n - k)]));
                }
            }
        }
    }
    for n in 2..=x.dim.min(y.dim) {
        for p in 1..n {
            for key in composable_tuples(x, &[p, n - p]) {
                let t = Tensor::basis(key.clone(), ring);
                if alpha.apply(n, &src.zmul(p, n - p, &t)) != tgt.zmul(p, n - p, &alpha.apply_tensor(&[p, n - p], &t, ring)) {
                    return Err(Witness::new("map preserves Z", &[p, n - p], x.label(p, key[0]), &[]));
                }
            }
        }
    }
    Ok(())
}

/// The canonical `V -> K(T(V))`, sending a letter to its one-letter word.
pub fn letter_map(v: &GradedQuiver, t: &TensorAlgebra, k: &Kernel) -> Result<NarrowMap> {
    let mut alpha = vec![Vec::new()];
    for n in 1..=v.dim {
        alpha.push((0..v.count(n)).map(|g| k.coords(n, &Comb::basis(t.letter(n, g), v.ring))).collect::<Result<_>>()?);
    }
    Ok(NarrowMap { alpha })
}

/// `V ≅ K(T(V))` for a graded quiver.
pub fn check_kt_graded(v: &GradedQuiver) -> Result<std::result::Result<(), Witness>> {
    let t = tensor_graded(v);
    let k = kernel_graded(&t.naf)?;
    let f = letter_map(v, &t, &k)?;
    f.check_graded_iso(v, &k.quiver)
}

/// `A ≅ K(T(A))` as narrow monoids.
pub fn check_kt(a: &NarrowMonoid) -> Result<std::result::Result<(), Witness>> {
    let t = tensor_t(a);
    let (ka, k) = kernel_k(&t.naf)?;
    let f = letter_map(&a.quiver, &t, &k)?;
    if let Err(w) = f.check_graded_iso(&a.quiver, &ka.quiver)? {
        return Ok(Err(w));
    }
    Ok(f.check(a, &ka))
}

type Graded = Comb<(usize, Vec<usize>)>;

fn tagged(k: usize, t: &Tensor) -> Graded {
    t.map_keys(|w| (k, w.clone()))
}

/// The graded Frobenius equation `μZ = (Z⊗id)(id⊗μ) + c·id + (id⊗Z)(μ⊗id)`
/// on all pairs of total degree `≤ dim`, with middle coefficient `c`.
pub fn graded_frobenius_equation(x: &NaF, middle: &Scalar) -> std::result::Result<(), Witness> {
    let h = &x.host;
    let ring = h.ring;
    for n in 0..=h.dim {
        for p in 0..=n {
            let q = n - p;
            for key in composable_tuples(h, &[p, q]) {
                let (g, hh) = (key[0], key[1]);
                let (eg, eh) = (Comb::basis(g, ring), Comb::basis(hh, ring));
                let z = x.z_gen(p, q, g, hh);
                let mut lhs = Graded::zero();
                for k in 0..=n {
                    lhs.add_assign(&tagged(k, &h.mu(k, n - k, &z)));
                }
                let mut rhs = Graded::term((p, vec![g, hh]), middle.clone());
                for r in 0..=q {
                    for (w, c) in h.mu(r, q - r, &eh).iter() {
                        let left = x.z_gen(p, r, g, w[0]);
                        rhs.add_assign(&tagged(p + r, &tensor_combs(&single(&left), &Tensor::basis(vec![w[1]], ring)).scaled(c)));
                    }
                }
                for r in 0..=p {
                    for (w, c) in h.mu(r, p - r, &eg).iter() {
                        let right = x.z_gen(p - r, q, w[1], hh);
                        rhs.add_assign(&tagged(r, &tensor_combs(&Tensor::basis(vec![w[0]], ring), &single(&right)).scaled(c)));
                    }
                }
                if lhs != rhs {
                    let name = format!("{} ⊗ {}", h.label(p, g), h.label(q, hh));
                    return Err(Witness::new("graded Frobenius equation", &[p, q], &name, &["mu".into(), "Z".into()]));
                }
            }
        }
    }
    Ok(())
}

/// Whether the graded Frobenius equation holds with middle term `-id`.
pub fn graded_frobenius_equation_check(x: &NaF) -> bool {
    graded_frobenius_equation(x, &-x.host.ring.one()).is_ok()
}

/// Coassociativity, the exchange laws and associativity, ignoring the
/// simplicial tables.
pub fn check_graded_frobenius(x: &NaF) -> std::result::Result<(), Witness> {
    x.host.check_coassociativity()?;
    x.check_exchange()?;
    x.check_associativity()
}

/// `X(f)` for an interval morphism `f`, via its normal form.
pub fn templicial_act(x: &Templicial, f: &Mor, v: &Comb<usize>) -> Comb<usize> {
    assert!(f.is_interval(), "{f} is not an interval morphism");
    let (deltas, sigmas) = f.normal_form();
    let mut level = f.n;
    let mut out = v.clone();
    for &i in &deltas {
        out = x.face(level, i, &out);
        level -= 1;
    }
    for &j in &sigmas {
        out = x.degen(level, j, &out);
        level += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::inverse_mu_naf;
    use crate::simplicial::FinCategory;
    use crate::templicial::{linear_nerve, LinearCategory};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tensor_of_graded_quiver_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = GradedQuiver::random(Ring::Q, 2, 3, 2, &mut rng);
        let t = tensor_graded(&v);
        check_graded_frobenius(&t.naf).unwrap();
        assert!(graded_frobenius_equation_check(&t.naf));
        check_kt_graded(&v).unwrap().unwrap();
        let eq = epsilon_phi(&t.naf, false).unwrap();
        eq.check(&t.naf).unwrap();
    }

    #[test]
    fn nerve_kernel_is_hom_quiver() {
        let c = LinearCategory::free(&FinCategory::poset(2), Ring::Q);
        let x = inverse_mu_naf(&linear_nerve(&c, 3)).unwrap();
        let (a, _) = kernel_k(&x).unwrap();
        a.check().unwrap();
        assert_eq!(a.quiver.count(1), 6);
        assert_eq!((a.quiver.count(2), a.quiver.count(3)), (0, 0));
        let t = tensor_t(&a);
        t.naf.host.check().unwrap();
        t.naf.check_frobenius().unwrap();
        check_kt(&a).unwrap().unwrap();
        let eq = epsilon_phi(&x, true).unwrap();
        eq.check(&x).unwrap();
    }
}
