//! Nonassociative Frobenius (naF) structures on templicial modules.
//!
//! A [`NaF`] stores the multiplications `Z^{p,q}` for `p, q ≥ 1` on pairs of
//! composable generators. `Z` with a zero index is the counit projection and
//! is never stored. Multi-index composites are right-nested:
//! `Z^{p_1,…,p_m} = Z^{p_1, p_2+…+p_m}(id ⊗ Z^{p_2,…,p_m})`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::exactcore::{tensor_combs, Comb, LinearMap, Ring};
use crate::intervals::{Mor, Partition};
use crate::quiver::{Quiver, QuiverMap};
use crate::simplicial::SimplicialSet;
use crate::templicial::{
    exact_solve, free_templicial, map_factors, mu_name, single, Templicial, TemplicialFixture, TemplicialMap, Tensor, USimplex, Witness,
};
use crate::{Error, Result};

type Pairs = BTreeMap<(usize, usize), Comb<usize>>;

/// Multiplications `Z^{p,q}` on a templicial module.
#[derive(Clone, Debug, PartialEq)]
pub struct NaF {
    pub host: Templicial,
    /// `z[(p,q)][(g,h)] = Z^{p,q}(g ⊗ h)`; absent pairs map to zero.
    pub z: BTreeMap<(usize, usize), Pairs>,
}

pub fn z_name(p: usize, q: usize) -> String {
    format!("Z[{p},{q}]")
}

/// All composable generator tuples with the given levels.
pub fn composable_tuples(x: &Templicial, levels: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for &n in levels {
        let mut next = Vec::new();
        for t in &out {
            for g in 0..x.count(n) {
                if t.last().map_or(true, |&p| x.levels[n][g].src == x.levels[prev_level(levels, t.len())][p].tgt) {
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

fn prev_level(levels: &[usize], len: usize) -> usize {
    levels[len - 1]
}

fn tuple_label(x: &Templicial, levels: &[usize], key: &[usize]) -> String {
    key.iter().zip(levels).map(|(&g, &n)| x.label(n, g).to_string()).collect::<Vec<_>>().join(" ⊗ ")
}

impl NaF {
    /// The zero multiplication table with the right keys.
    pub fn empty(host: Templicial) -> NaF {
        let mut z = BTreeMap::new();
        for n in 2..=host.dim {
            for p in 1..n {
                z.insert((p, n - p), BTreeMap::new());
            }
        }
        NaF { host, z }
    }

    /// `Z^{p,q}` on one pair of generators.
    pub fn z_gen(&self, p: usize, q: usize, g: usize, h: usize) -> Comb<usize> {
        let x = &self.host;
        match (p, q) {
            (0, _) => Comb::term(h, x.counit[g].clone()),
            (_, 0) => Comb::term(g, x.counit[h].clone()),
            _ => self.z.get(&(p, q)).and_then(|m| m.get(&(g, h))).cloned().unwrap_or_default(),
        }
    }

    /// `Z^{p,q}` on a two-factor tensor.
    pub fn zmul(&self, p: usize, q: usize, t: &Tensor) -> Comb<usize> {
        let mut out = Comb::zero();
        for (key, c) in t.iter() {
            out.add_scaled(&self.z_gen(p, q, key[0], key[1]), c);
        }
        out
    }

    /// Right-nested `Z^{p_1,…,p_m}` on an `m`-factor tensor.
    pub fn z_multi(&self, parts: &[usize], t: &Tensor) -> Comb<usize> {
        let mut out = Comb::zero();
        for (key, c) in t.iter() {
            out.add_scaled(&self.z_key(parts, key), c);
        }
        out
    }

    fn z_key(&self, parts: &[usize], key: &[usize]) -> Comb<usize> {
        if parts.len() == 1 {
            return Comb::basis(key[0], self.host.ring);
        }
        let rest: usize = parts[1..].iter().sum();
        let inner = self.z_key(&parts[1..], &key[1..]);
        let mut out = Comb::zero();
        for (&h, c) in inner.iter() {
            out.add_scaled(&self.z_gen(parts[0], rest, key[0], h), c);
        }
        out
    }

    /// `Z^I`; for `ℓ(I) = 0` the unit quiver is identified with `X_0`.
    pub fn z_partition(&self, i: &Partition, t: &Tensor) -> Comb<usize> {
        if i.len() == 0 {
            return t.map_keys(|k| k[0]);
        }
        self.z_multi(&i.gaps(), t)
    }

    /// `Z^f` for a morphism `f` of the interval category.
    pub fn z_f(&self, f: &Mor, t: &Tensor) -> Comb<usize> {
        if f.m() == 0 {
            return t.map_keys(|k| k[0]);
        }
        self.z_multi(&mor_gaps(f), t)
    }

    /// Verifies typing, naturality and both exchange laws with `μ`.
    pub fn check_naf(&self) -> std::result::Result<(), Witness> {
        self.host.check()?;
        self.check_typing()?;
        self.check_naturality()?;
        self.check_exchange()
    }

    fn check_naturality(&self) -> std::result::Result<(), Witness> {
        let x = &self.host;
        let ring = x.ring;
        for n in 2..=x.dim {
            for p in 1..n {
                let q = n - p;
                for key in composable_tuples(x, &[p, q]) {
                    let (g, h) = (key[0], key[1]);
                    let name = tuple_label(x, &[p, q], &key);
                    let z = self.z_gen(p, q, g, h);
                    // Inner faces away from the seam.
                    for j in 1..n {
                        if j == p {
                            continue;
                        }
                        let lhs = x.face(n, j, &z);
                        let rhs = if j < p {
                            self.zmul(p - 1, q, &tensor_combs(&single(&x.face(p, j, &Comb::basis(g, ring))), &Tensor::basis(vec![h], ring)))
                        } else {
                            self.zmul(p, q - 1, &tensor_combs(&Tensor::basis(vec![g], ring), &single(&x.face(q, j - p, &Comb::basis(h, ring)))))
                        };
                        if lhs != rhs {
                            return Err(Witness::new("Z natural in inner faces", &[p, q, j], &name, &[z_name(p, q), format!("d[{n},{j}]")]));
                        }
                    }
                    if n < x.dim {
                        for i in 0..=n {
                            let lhs = x.degen(n, i, &z);
                            let mut rhs = Vec::new();
                            if i <= p {
                                rhs.push(self.zmul(p + 1, q, &tensor_combs(&single(&x.degen(p, i, &Comb::basis(g, ring))), &Tensor::basis(vec![h], ring))));
                            }
                            if i >= p {
                                rhs.push(self.zmul(p, q + 1, &tensor_combs(&Tensor::basis(vec![g], ring), &single(&x.degen(q, i - p, &Comb::basis(h, ring))))));
                            }
                            if rhs.iter().any(|r| *r != lhs) {
                                return Err(Witness::new("Z natural in degeneracies", &[p, q, i], &name, &[z_name(p, q), format!("s[{n},{i}]")]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The exchange laws `μ_{k,l} Z^{p,q} = …` for `k, l, p, q ≥ 1`.
    pub fn check_exchange(&self) -> std::result::Result<(), Witness> {
        let x = &self.host;
        let ring = x.ring;
        for n in 2..=x.dim {
            for p in 1..n {
                let q = n - p;
                for key in composable_tuples(x, &[p, q]) {
                    let (g, h) = (key[0], key[1]);
                    let name = tuple_label(x, &[p, q], &key);
                    let z = self.z_gen(p, q, g, h);
                    for k in 1..n {
                        let l = n - k;
                        let lhs = x.mu(k, l, &z);
                        let (rhs, involved) = if p <= k {
                            let t = tensor_combs(&Tensor::basis(vec![g], ring), &x.mu(k - p, l, &Comb::basis(h, ring)));
                            let r = self.regroup(&t, &[vec![p, k - p], vec![l]]);
                            (r, vec![mu_name(k, l), z_name(p, q), z_name(p, k - p), mu_name(k - p, l)])
                        } else {
                            let t = tensor_combs(&x.mu(k, p - k, &Comb::basis(g, ring)), &Tensor::basis(vec![h], ring));
                            let r = self.regroup(&t, &[vec![k], vec![p - k, q]]);
                            (r, vec![mu_name(k, l), z_name(p, q), mu_name(k, p - k), z_name(p - k, q)])
                        };
                        if lhs != rhs {
                            return Err(Witness::new("mu-Z exchange", &[p, q, k, l], &name, &involved));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_typing(&self) -> std::result::Result<(), Witness> {
        let x = &self.host;
        for (&(p, q), table) in &self.z {
            if p == 0 || q == 0 || p + q > x.dim {
                return Err(Witness::new("Z index out of range", &[p, q], "", &[z_name(p, q)]));
            }
            for (&(g, h), v) in table {
                if g >= x.count(p) || h >= x.count(q) || x.levels[p][g].tgt != x.levels[q][h].src {
                    return Err(Witness::new("Z on a non-composable pair", &[p, q], "", &[z_name(p, q)]));
                }
                let (a, b) = (x.levels[p][g].src, x.levels[q][h].tgt);
                if v.keys().any(|&w| w >= x.count(p + q) || x.levels[p + q][w].src != a || x.levels[p + q][w].tgt != b) {
                    return Err(Witness::new("Z changes endpoints", &[p, q], &tuple_label(x, &[p, q], &[g, h]), &[z_name(p, q)]));
                }
            }
        }
        Ok(())
    }

    /// Applies `Z^{parts}` to consecutive groups of factors.
    pub fn regroup(&self, t: &Tensor, groups: &[Vec<usize>]) -> Tensor {
        let mut out = Tensor::zero();
        for (key, c) in t.iter() {
            let mut acc = Tensor::term(vec![], c.clone());
            let mut at = 0;
            for grp in groups {
                let piece = self.z_key(grp, &key[at..at + grp.len()]);
                at += grp.len();
                acc = tensor_combs(&acc, &single(&piece));
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }

    /// `check_naf` plus associativity of `Z`.
    pub fn check_frobenius(&self) -> std::result::Result<(), Witness> {
        self.check_naf()?;
        self.check_associativity()
    }

    /// Associativity of `Z` alone.
    pub fn check_associativity(&self) -> std::result::Result<(), Witness> {
        let x = &self.host;
        for n in 3..=x.dim {
            for p in 1..n {
                for q in 1..n - p {
                    let r = n - p - q;
                    for key in composable_tuples(x, &[p, q, r]) {
                        let t = Tensor::basis(key.clone(), x.ring);
                        let lhs = self.zmul(p + q, r, &self.regroup(&t, &[vec![p, q], vec![r]]));
                        let rhs = self.zmul(p, q + r, &self.regroup(&t, &[vec![p], vec![q, r]]));
                        if lhs != rhs {
                            return Err(Witness::new(
                                "Z associative",
                                &[p, q, r],
                                &tuple_label(x, &[p, q, r], &key),
                                &[z_name(p + q, r), z_name(p, q), z_name(p, q + r), z_name(q, r)],
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `μ_I Z^J = (Z^{J_1} ⊗ …)(μ_{I_1} ⊗ …)` and `μ_I Z^J μ_J = μ_I Z^{I∪J} μ_{I∪J}`
    /// for all partitions of every `n ≤ nmax`.
    pub fn check_higher_compatibility(&self, nmax: usize) -> std::result::Result<(), Witness> {
        let x = &self.host;
        let ring = x.ring;
        for n in 1..=nmax.min(x.dim) {
            let parts = Partition::enumerate(n);
            for i in &parts {
                for j in &parts {
                    let i_split = i.splitting(&j.as_mor());
                    let j_split = j.splitting(&i.as_mor());
                    let groups: Vec<Vec<usize>> = j_split.iter().map(|p| p.gaps()).collect();
                    for key in composable_tuples(x, &j.gaps()) {
                        let t = Tensor::basis(key.clone(), ring);
                        let lhs = x.mu_partition(i, &self.z_partition(j, &t));
                        let mid = map_factors(&t, |r, g| x.mu_partition(&i_split[r].shifted(0), &Comb::basis(g, ring)));
                        let rhs = self.regroup(&mid, &groups);
                        if lhs != rhs {
                            return Err(Witness::new(
                                &format!("higher mu-Z compatibility I={} J={}", i.label(), j.label()),
                                &[n],
                                &tuple_label(x, &j.gaps(), &key),
                                &["mu".into(), "Z".into()],
                            ));
                        }
                    }
                    let u = i.union(j);
                    for g in 0..x.count(n) {
                        let e = Comb::basis(g, ring);
                        let lhs = x.mu_partition(i, &self.z_partition(j, &x.mu_partition(j, &e)));
                        let rhs = x.mu_partition(i, &self.z_partition(&u, &x.mu_partition(&u, &e)));
                        if lhs != rhs {
                            return Err(Witness::new(
                                &format!("mu_I Z^J mu_J = mu_I Z^(I∪J) mu_(I∪J) for I={} J={}", i.label(), j.label()),
                                &[n],
                                x.label(n, g),
                                &["mu".into(), "Z".into()],
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `Z^{p,q}` as a quiver map `X_p ⊗_S X_q -> X_{p+q}`.
    pub fn z_map(&self, p: usize, q: usize) -> Result<QuiverMap> {
        let x = &self.host;
        element_map(x, &[p, q], &[p + q], |t| single(&self.zmul(p, q, t)))
    }

    pub fn to_fixture(&self) -> NaFFixture {
        let x = &self.host;
        let nb = x.base.len();
        let mut z = BTreeMap::new();
        for &(p, q) in self.z.keys() {
            let mut block = BTreeMap::new();
            for a in 0..nb {
                for b in 0..nb {
                    let rows = x.gens_between(p + q, a, b);
                    let ncols: usize = (0..nb).map(|c| x.gens_between(p, a, c).len() * x.gens_between(q, c, b).len()).sum();
                    if ncols == 0 || rows.is_empty() {
                        continue;
                    }
                    let cols: Vec<Comb<usize>> = (0..ncols)
                        .map(|i| {
                            let key = x.pair_key(p, q, a, b, i).expect("index in range");
                            self.z_gen(p, q, key[0], key[1]).map_keys(|&w| x.local_index(p + q, w))
                        })
                        .collect();
                    block.insert(x.pair_key_str(a, b), x.matrix_of(&cols, rows.len()));
                }
            }
            z.insert(format!("{p},{q}"), block);
        }
        NaFFixture { host: x.to_fixture(), z }
    }

    pub fn from_fixture(fx: &NaFFixture) -> Result<NaF> {
        let host = Templicial::from_fixture(&fx.host)?;
        let ring = host.ring;
        let mut naf = NaF::empty(host);
        let x = &naf.host;
        let vidx: HashMap<&str, usize> = x.base.iter().enumerate().map(|(i, b)| (b.as_str(), i)).collect();
        let mut tables = BTreeMap::new();
        for (key, block) in &fx.z {
            let (p, q) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad Z index {key}")))?;
            if p == 0 || q == 0 || p + q > x.dim {
                return Err(Error::Parse(format!("Z index {key} out of range")));
            }
            let mut table = BTreeMap::new();
            for (pair, mat) in block {
                let (a, b) = pair
                    .split_once(',')
                    .and_then(|(a, b)| Some((*vidx.get(a)?, *vidx.get(b)?)))
                    .ok_or_else(|| Error::Parse(format!("bad vertex pair {pair}")))?;
                let rows = x.gens_between(p + q, a, b);
                if mat.len() != rows.len() {
                    return Err(Error::Parse(format!("Z matrix at {pair} has the wrong number of rows")));
                }
                for (r, row) in mat.iter().enumerate() {
                    for (c, s) in row.iter().enumerate() {
                        let v = crate::Scalar::parse(s, ring)?;
                        if v.is_zero() {
                            continue;
                        }
                        let k = x.pair_key(p, q, a, b, c).ok_or_else(|| Error::Parse(format!("Z column {c} out of range at {pair}")))?;
                        table.entry((k[0], k[1])).or_insert_with(Comb::zero).add_term(rows[r], v);
                    }
                }
            }
            tables.insert((p, q), table);
        }
        for (k, t) in tables {
            naf.z.insert(k, t);
        }
        Ok(naf)
    }
}

/// Serializable naF structure: the templicial schema plus `"Z"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaFFixture {
    #[serde(flatten)]
    pub host: TemplicialFixture,
    #[serde(rename = "Z")]
    pub z: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

fn mor_gaps(f: &Mor) -> Vec<usize> {
    (1..=f.m()).map(|k| f.at(k) - f.at(k - 1)).collect()
}

/// `μ_f` for a morphism `f` of the interval category.
pub fn mu_f(x: &Templicial, f: &Mor, e: &Comb<usize>) -> Tensor {
    if f.m() == 0 {
        return single(e);
    }
    x.mu_multi(&mor_gaps(f), e)
}

/// The quiver `X_{k_1} ⊗_S … ⊗_S X_{k_m}`, tensored from the left.
pub fn tensor_quiver(x: &Templicial, levels: &[usize]) -> Result<Quiver> {
    let mut q = x.level_quiver(levels[0]);
    for &n in &levels[1..] {
        q = q.tensor(&x.level_quiver(n))?;
    }
    Ok(q)
}

fn tensor_key_label(x: &Templicial, levels: &[usize], key: &[usize]) -> String {
    let mut s = x.label(levels[0], key[0]).to_string();
    for p in 1..key.len() {
        let c = x.levels[levels[p]][key[p]].src;
        s = format!("{}:({s},{})", x.base[c], x.label(levels[p], key[p]));
    }
    s
}

/// Turns an element-level map between tensor powers into a quiver map.
pub fn element_map(x: &Templicial, src: &[usize], tgt: &[usize], f: impl Fn(&Tensor) -> Tensor) -> Result<QuiverMap> {
    let (sq, tq) = (tensor_quiver(x, src)?, tensor_quiver(x, tgt)?);
    let mut comps = BTreeMap::new();
    let tuples = composable_tuples(x, src);
    for a in 0..x.base.len() {
        for b in 0..x.base.len() {
            let (dom, cod) = (sq.entry(a, b), tq.entry(a, b));
            if dom.rank() == 0 {
                continue;
            }
            let mut cols = vec![Comb::zero(); dom.rank()];
            for key in tuples.iter().filter(|k| x.levels[src[0]][k[0]].src == a && x.levels[*src.last().unwrap()][*k.last().unwrap()].tgt == b) {
                let col = dom.index_of(&tensor_key_label(x, src, key)).ok_or_else(|| Error::Invariant("tensor label not found".into()))?;
                let img = f(&Tensor::basis(key.clone(), x.ring));
                for (k, c) in img.iter() {
                    let row = cod.index_of(&tensor_key_label(x, tgt, k)).ok_or_else(|| Error::Invariant("image outside the target entry".into()))?;
                    cols[col].add_term(row, c.clone());
                }
            }
            comps.insert((a, b), LinearMap::from_cols(dom, cod, cols)?);
        }
    }
    QuiverMap::new(sq, tq, comps)
}

/// `μ_f` as a quiver map.
pub fn mu_composite(x: &Templicial, f: &Mor) -> Result<QuiverMap> {
    let tgt = if f.m() == 0 { vec![f.n] } else { mor_gaps(f) };
    element_map(x, &[f.n], &tgt, |t| map_factors(t, |_, g| mu_f(x, f, &Comb::basis(g, x.ring))))
}

/// `Z^f` as a quiver map.
pub fn z_composite(z: &NaF, f: &Mor) -> Result<QuiverMap> {
    let src = if f.m() == 0 { vec![f.n] } else { mor_gaps(f) };
    element_map(&z.host, &src, &[f.n], |t| single(&z.z_f(f, t)))
}

/// `Z = μ^{-1}` on a strong monoidal templicial module.
pub fn inverse_mu_naf(x: &Templicial) -> Result<NaF> {
    let mut naf = NaF::empty(x.clone());
    for n in 2..=x.dim {
        for p in 1..n {
            let q = n - p;
            let mut table = BTreeMap::new();
            for key in composable_tuples(x, &[p, q]) {
                let (a, b) = (x.levels[p][key[0]].src, x.levels[q][key[1]].tgt);
                let gens = x.gens_between(n, a, b);
                let cols: Vec<Tensor> = gens.iter().map(|&w| x.mu(p, q, &Comb::basis(w, x.ring))).collect();
                let sol = exact_solve(&cols, &Tensor::basis(key.clone(), x.ring), x.ring)?
                    .ok_or_else(|| Error::Refused(format!("{} is not invertible", mu_name(p, q))))?;
                let mut v = Comb::zero();
                for (i, c) in sol.into_iter().enumerate() {
                    if !c.is_zero() {
                        v.add_term(gens[i], c);
                    }
                }
                if !v.is_zero() {
                    table.insert((key[0], key[1]), v);
                }
            }
            naf.z.insert((p, q), table);
        }
    }
    Ok(naf)
}

/// A naF structure on a simplicial set, viewed as a templicial set.
#[derive(Clone, Debug, PartialEq)]
pub struct SetNaF {
    pub host: SimplicialSet,
    /// `z[(p,q)][(x,y)] = Z^{p,q}(x, y)` for `p, q ≥ 1`.
    pub z: BTreeMap<(usize, usize), BTreeMap<(usize, usize), usize>>,
}

impl SetNaF {
    pub fn get(&self, p: usize, q: usize, x: usize, y: usize) -> usize {
        match (p, q) {
            (0, _) => y,
            (_, 0) => x,
            _ => self.z[&(p, q)][&(x, y)],
        }
    }

    /// Checks the structure through its linearization.
    pub fn check(&self, ring: Ring) -> std::result::Result<(), Witness> {
        transfer_naf_free(self, ring).check_naf()
    }

    /// Verifies that every value has the horn faces it is built from.
    pub fn check_face_constraints(&self) -> std::result::Result<(), Witness> {
        let y = &self.host;
        for (&(p, q), table) in &self.z {
            for (&(a, b), &v) in table {
                for (i, want) in horn_faces(self, p, q, a, b) {
                    if y.face(p + q, i, v) != want {
                        let name = format!("{} ⊗ {}", y.name(p, a), y.name(q, b));
                        return Err(Witness::new("Z face constraint", &[p, q, i], &name, &[z_name(p, q)]));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The faces `(i, d_i Z(x,y))`, `i ≠ p`, forced by lower values of `Z`.
fn horn_faces(z: &SetNaF, p: usize, q: usize, x: usize, yv: usize) -> Vec<(usize, usize)> {
    let y = &z.host;
    let mut out = Vec::new();
    for i in 0..=p + q {
        if i < p {
            out.push((i, z.get(p - 1, q, y.face(p, i, x), yv)));
        } else if i > p {
            out.push((i, z.get(p, q - 1, x, y.face(q, i - p, yv))));
        }
    }
    out
}

fn degenerate_as(y: &SimplicialSet, n: usize, x: usize) -> Option<usize> {
    (0..n).find(|&i| y.degen(n - 1, i, y.face(n, i, x)) == x)
}

/// Builds a set-level naF structure by induction on `p + q`. Degenerate
/// inputs follow the degeneracy rules; `choose` picks the value on a
/// nondegenerate pair among the simplices with the required horn faces.
pub fn build_set_naf(
    y: &SimplicialSet,
    mut choose: impl FnMut(usize, usize, usize, usize, &[usize]) -> Option<usize>,
) -> Result<SetNaF> {
    let mut z = SetNaF { host: y.clone(), z: BTreeMap::new() };
    for n in 2..=y.dim {
        for p in 1..n {
            z.z.insert((p, n - p), BTreeMap::new());
        }
    }
    for n in 2..=y.dim {
        for p in 1..n {
            let q = n - p;
            for a in 0..y.count(p) {
                let mid = y.last_vertex(p, a);
                for b in (0..y.count(q)).filter(|&b| y.first_vertex(q, b) == mid) {
                    let v = if let Some(i) = degenerate_as(y, p, a) {
                        y.degen(n - 1, i, z.get(p - 1, q, y.face(p, i, a), b))
                    } else if let Some(i) = degenerate_as(y, q, b) {
                        y.degen(n - 1, i + p, z.get(p, q - 1, a, y.face(q, i, b)))
                    } else {
                        let faces = horn_faces(&z, p, q, a, b);
                        let positions: Vec<usize> = faces.iter().map(|f| f.0).collect();
                        let family: Vec<usize> = faces.iter().map(|f| f.1).collect();
                        let cands = y.fillers(n, &positions, &family);
                        choose(p, q, a, b, &cands).ok_or_else(|| {
                            Error::Invariant(format!("no filler for Z[{p},{q}]({}, {})", y.name(p, a), y.name(q, b)))
                        })?
                    };
                    z.z.get_mut(&(p, q)).unwrap().insert((a, b), v);
                }
            }
        }
    }
    Ok(z)
}

/// Picks the least filler by name at every step.
pub fn naf_from_fillers(y: &SimplicialSet) -> Result<SetNaF> {
    build_set_naf(y, |_, _, _, _, c| c.first().cloned())
}

/// The naF structure of an ordinary quasi-category.
pub fn naf_on_quasicategory(y: &SimplicialSet) -> Result<SetNaF> {
    if let Some(w) = y.first_unfillable_inner_horn(y.dim)? {
        return Err(Error::Contract(format!("not a quasi-category: {w}")));
    }
    naf_from_fillers(y)
}

/// Linearizes a set-level naF structure onto `F̃(Y)`.
pub fn transfer_naf_free(z: &SetNaF, ring: Ring) -> NaF {
    let host = free_templicial(&z.host, ring);
    let mut naf = NaF::empty(host);
    for (&k, table) in &z.z {
        naf.z.insert(k, table.iter().map(|(&pair, &v)| (pair, Comb::basis(v, ring))).collect());
    }
    naf
}

/// The element of `Ũ(F̃(Y))` given by a simplex of `Y`.
pub fn simplex_family(y: &SimplicialSet, n: usize, x: usize, ring: Ring) -> USimplex {
    let vertices = y.vertices(n, x);
    let mut edges = BTreeMap::new();
    for i in 0..=n {
        for j in i + 1..=n {
            let th = Mor::new((i..=j).collect(), n).expect("monotone");
            edges.insert((i, j), Comb::basis(y.apply(&th, x), ring));
        }
    }
    USimplex { vertices, edges }
}

/// Completes a wedge: `α_{0,n} = Σ_{ℓ(J) ≥ 2} (-1)^{ℓ(J)} Z^J α_J`.
pub fn fill_wedge(z: &NaF, wedge: &USimplex) -> std::result::Result<USimplex, Witness> {
    let x = &z.host;
    let n = wedge.dim();
    if n < 2 || n > x.dim {
        return Err(Witness::new("wedge dimension out of range", &[n], "", &[]));
    }
    wedge.validate_except(x, Some((0, n)))?;
    let mut a0n = Comb::zero();
    for j in Partition::enumerate(n).into_iter().filter(|j| j.len() >= 2) {
        let mut t = Tensor::term(vec![], x.ring.one());
        for w in j.members.windows(2) {
            t = tensor_combs(&t, &single(&wedge.at(x, w[0], w[1])));
        }
        let v = z.z_multi(&j.gaps(), &t);
        if j.len() % 2 == 0 {
            a0n.add_assign(&v);
        } else {
            a0n.sub_assign(&v);
        }
    }
    let mut out = wedge.clone();
    out.edges.insert((0, n), a0n);
    out.validate(x)?;
    Ok(out)
}

/// An inner horn `Λ^n_k` in `Ũ(X)`: faces at every position except `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HornData {
    pub n: usize,
    pub k: usize,
    pub faces: BTreeMap<usize, USimplex>,
}

impl HornData {
    pub fn from_simplices(y: &SimplicialSet, n: usize, k: usize, faces: &[usize], ring: Ring) -> HornData {
        let positions = (0..=n).filter(|&i| i != k);
        HornData { n, k, faces: positions.zip(faces).map(|(i, &f)| (i, simplex_family(y, n - 1, f, ring))).collect() }
    }

    fn validate(&self, x: &Templicial) -> std::result::Result<(), Witness> {
        let (n, k) = (self.n, self.k);
        if !(0 < k && k < n && n <= x.dim) {
            return Err(Witness::new("horn indices out of range", &[n, k], "", &[]));
        }
        for i in (0..=n).filter(|&i| i != k) {
            let f = self.faces.get(&i).ok_or_else(|| Witness::new("horn face missing", &[n, k, i], "", &[]))?;
            if f.dim() != n - 1 {
                return Err(Witness::new("horn face of the wrong dimension", &[n, k, i], "", &[]));
            }
            f.validate(x)?;
        }
        for i in (0..=n).filter(|&i| i != k) {
            for j in (i + 1..=n).filter(|&j| j != k) {
                if !self.faces[&j].face(x, i).same_as(x, &self.faces[&i].face(x, j - 1)) {
                    return Err(Witness::new("horn faces incompatible", &[n, k, i, j], "", &[]));
                }
            }
        }
        Ok(())
    }
}

/// Fills an inner horn: wedge filler followed by the ascending and
/// descending corrections, then audits the result against the input.
pub fn fill_inner_horn(z: &NaF, horn: &HornData) -> std::result::Result<USimplex, Witness> {
    let x = &z.host;
    horn.validate(x)?;
    let (n, k) = (horn.n, horn.k);
    let front = &horn.faces[&n];
    let back = &horn.faces[&0];
    let mut wedge = USimplex { vertices: front.vertices.clone(), edges: BTreeMap::new() };
    wedge.vertices.push(*back.vertices.last().unwrap());
    for i in 0..=n {
        for j in i + 1..=n {
            if (i, j) == (0, n) {
                continue;
            }
            let v = if i >= 1 { back.at(x, i - 1, j - 1) } else { front.at(x, i, j) };
            wedge.edges.insert((i, j), v);
        }
    }
    let filled = fill_wedge(z, &wedge)?;
    let missing = |j: usize| horn.faces[&j].at(x, 0, n - 1);
    let mut cur = filled.at(x, 0, n);
    for j in 1..k {
        let diff = missing(j).minus(&x.face(n, j, &cur));
        cur.add_assign(&x.degen(n - 1, j, &diff));
    }
    for j in (k + 1..n).rev() {
        let diff = missing(j).minus(&x.face(n, j, &cur));
        cur.add_assign(&x.degen(n - 1, j - 1, &diff));
    }
    let mut out = wedge;
    out.edges.insert((0, n), cur);
    out.validate(x)?;
    for (&p, f) in &horn.faces {
        if !out.face(x, p).same_as(x, f) {
            return Err(Witness::new("horn filler audit", &[n, k, p], "", &[format!("d[{n},{p}]")]));
        }
    }
    Ok(out)
}

/// Checks that `α` is templicial and commutes with the multiplications.
pub fn check_f_templicial_map(alpha: &TemplicialMap, src: &NaF, tgt: &NaF) -> std::result::Result<(), Witness> {
    let (x, y) = (&src.host, &tgt.host);
    alpha.check(x, y)?;
    for n in 2..=x.dim.min(y.dim) {
        for p in 1..n {
            let q = n - p;
            for key in composable_tuples(x, &[p, q]) {
                let t = Tensor::basis(key.clone(), x.ring);
                let lhs = alpha.apply(n, &src.zmul(p, q, &t));
                let rhs = tgt.zmul(p, q, &alpha.apply_tensor(&[p, q], &t, x.ring));
                if lhs != rhs {
                    return Err(Witness::new("map preserves Z", &[p, q], &tuple_label(x, &[p, q], &key), &[z_name(p, q), format!("alpha[{n}]")]));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{nerve, standard_simplex, FinCategory};
    use crate::templicial::{linear_nerve, LinearCategory};

    #[test]
    fn nerve_is_frobenius() {
        let c = LinearCategory::free(&FinCategory::poset(2), Ring::Q);
        let z = inverse_mu_naf(&linear_nerve(&c, 4)).unwrap();
        z.check_frobenius().unwrap();
        z.check_higher_compatibility(4).unwrap();
    }

    #[test]
    fn quasicategory_naf_transfers() {
        let y = nerve(&FinCategory::poset(2), 4).unwrap();
        let z = naf_on_quasicategory(&y).unwrap();
        z.check_face_constraints().unwrap();
        z.check(Ring::Q).unwrap();
    }

    #[test]
    fn simplex_horns_fill() {
        let y = standard_simplex(3, 3);
        let z = transfer_naf_free(&naf_on_quasicategory(&y).unwrap(), Ring::Q);
        for k in 1..3 {
            for fam in y.horns(3, k) {
                let h = HornData::from_simplices(&y, 3, k, &fam, Ring::Q);
                fill_inner_horn(&z, &h).unwrap();
            }
        }
    }
}
