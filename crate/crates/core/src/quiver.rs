//! Quivers of free modules over a finite vertex set.
//!
//! Entries that are absent are the zero module and absent components of a
//! [`QuiverMap`] are zero maps. Basis labels are canonical:
//! `(Q ⊗_S P)(a,b)` has labels `c:(q,p)` ordered by the middle vertex `c`
//! and then left-factor-major, `f_!(Q)(x,y)` has labels `a,b:q`, and the
//! total module has labels `a,b:q`.

use std::collections::BTreeMap;

use crate::exactcore::{tensor_map, Comb, FreeModule, LinearMap, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub ring: Ring,
    pub vertices: Vec<String>,
    pub entries: BTreeMap<(usize, usize), FreeModule>,
}

impl Quiver {
    pub fn new(ring: Ring, vertices: Vec<String>) -> Quiver {
        Quiver { ring, vertices, entries: BTreeMap::new() }
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Sets an entry; zero modules are not stored.
    pub fn set(&mut self, a: usize, b: usize, m: FreeModule) {
        if m.rank() == 0 {
            self.entries.remove(&(a, b));
        } else {
            self.entries.insert((a, b), m);
        }
    }

    pub fn entry(&self, a: usize, b: usize) -> FreeModule {
        self.entries.get(&(a, b)).cloned().unwrap_or_else(|| FreeModule::zero(self.ring))
    }

    pub fn total_rank(&self) -> usize {
        self.entries.values().map(|m| m.rank()).sum()
    }

    fn same_base(&self, other: &Quiver) -> Result<()> {
        if self.vertices != other.vertices {
            return Err(Error::Contract("quivers over different vertex sets".into()));
        }
        Ok(())
    }

    /// `I_S`.
    pub fn unit(ring: Ring, vertices: Vec<String>) -> Quiver {
        let mut q = Quiver::new(ring, vertices);
        for a in 0..q.size() {
            q.set(a, a, FreeModule::new(ring, vec!["1".into()]).unwrap());
        }
        q
    }

    /// Position of the summand `Q(a,c) ⊗ P(c,b)` inside `(Q ⊗ P)(a,b)`.
    fn offset(&self, other: &Quiver, a: usize, c: usize, b: usize) -> usize {
        (0..c).map(|d| self.entry(a, d).rank() * other.entry(d, b).rank()).sum()
    }

    /// `Q ⊗_S P`.
    pub fn tensor(&self, other: &Quiver) -> Result<Quiver> {
        self.same_base(other)?;
        let mut out = Quiver::new(self.ring, self.vertices.clone());
        for a in 0..self.size() {
            for b in 0..self.size() {
                let mut basis = Vec::new();
                for c in 0..self.size() {
                    for q in self.entry(a, c).basis.iter() {
                        for p in other.entry(c, b).basis.iter() {
                            basis.push(format!("{}:({q},{p})", self.vertices[c]));
                        }
                    }
                }
                out.set(a, b, FreeModule::new(self.ring, basis)?);
            }
        }
        Ok(out)
    }

    /// `f_!(Q)` along a vertex map into `target`.
    pub fn pushforward(&self, f: &[usize], target: &[String]) -> Result<Quiver> {
        check_vertex_map(f, self.size(), target.len())?;
        let mut out = Quiver::new(self.ring, target.to_vec());
        for x in 0..target.len() {
            for y in 0..target.len() {
                let mut basis = Vec::new();
                for a in (0..self.size()).filter(|&a| f[a] == x) {
                    for b in (0..self.size()).filter(|&b| f[b] == y) {
                        for q in self.entry(a, b).basis.iter() {
                            basis.push(format!("{},{}:{q}", self.vertices[a], self.vertices[b]));
                        }
                    }
                }
                out.set(x, y, FreeModule::new(self.ring, basis)?);
            }
        }
        Ok(out)
    }

    /// `f^*(P)` for `P` over the target of `f: S -> T`.
    pub fn pullback(&self, f: &[usize], source: &[String]) -> Result<Quiver> {
        check_vertex_map(f, source.len(), self.size())?;
        let mut out = Quiver::new(self.ring, source.to_vec());
        for a in 0..source.len() {
            for b in 0..source.len() {
                out.set(a, b, self.entry(f[a], f[b]));
            }
        }
        Ok(out)
    }

    /// `⊕_{a,b} Q(a,b)`.
    pub fn total(&self) -> FreeModule {
        let mut basis = Vec::new();
        for ((a, b), m) in &self.entries {
            for q in m.basis.iter() {
                basis.push(format!("{},{}:{q}", self.vertices[*a], self.vertices[*b]));
            }
        }
        FreeModule { ring: self.ring, basis: std::sync::Arc::new(basis) }
    }
}

fn check_vertex_map(f: &[usize], s: usize, t: usize) -> Result<()> {
    if f.len() != s || f.iter().any(|&x| x >= t) {
        return Err(Error::Contract("vertex map has the wrong shape".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverMap {
    pub source: Quiver,
    pub target: Quiver,
    pub components: BTreeMap<(usize, usize), LinearMap>,
}

impl QuiverMap {
    /// Builds a map from components, dropping zero ones.
    pub fn new(source: Quiver, target: Quiver, comps: BTreeMap<(usize, usize), LinearMap>) -> Result<QuiverMap> {
        source.same_base(&target)?;
        let mut components = BTreeMap::new();
        for ((a, b), m) in comps {
            if m.domain != source.entry(a, b) || m.codomain != target.entry(a, b) {
                return Err(Error::Contract(format!("component ({a},{b}) has the wrong type")));
            }
            if m.cols.iter().any(|c| !c.is_zero()) {
                components.insert((a, b), m);
            }
        }
        Ok(QuiverMap { source, target, components })
    }

    pub fn zero(source: Quiver, target: Quiver) -> QuiverMap {
        QuiverMap { source, target, components: BTreeMap::new() }
    }

    pub fn identity(q: &Quiver) -> QuiverMap {
        let comps = q.entries.iter().map(|(&k, m)| (k, LinearMap::identity(m))).collect();
        QuiverMap { source: q.clone(), target: q.clone(), components: comps }
    }

    pub fn component(&self, a: usize, b: usize) -> LinearMap {
        self.components
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| LinearMap::zero(self.source.entry(a, b), self.target.entry(a, b)))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &QuiverMap) -> Result<QuiverMap> {
        if other.target != self.source {
            return Err(Error::Contract("composition through mismatched quivers".into()));
        }
        let mut comps = BTreeMap::new();
        for &(a, b) in other.components.keys() {
            comps.insert((a, b), self.component(a, b).compose(&other.component(a, b))?);
        }
        QuiverMap::new(other.source.clone(), self.target.clone(), comps)
    }

    pub fn add(&self, other: &QuiverMap) -> Result<QuiverMap> {
        let mut comps = BTreeMap::new();
        let keys: std::collections::BTreeSet<_> = self.components.keys().chain(other.components.keys()).cloned().collect();
        for (a, b) in keys {
            comps.insert((a, b), self.component(a, b).add(&other.component(a, b))?);
        }
        QuiverMap::new(self.source.clone(), self.target.clone(), comps)
    }

    /// `f ⊗_S g`, block diagonal over middle vertices.
    pub fn tensor(&self, other: &QuiverMap) -> Result<QuiverMap> {
        let src = self.source.tensor(&other.source)?;
        let tgt = self.target.tensor(&other.target)?;
        let n = self.source.size();
        let mut comps = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let dom = src.entry(a, b);
                let cod = tgt.entry(a, b);
                let mut cols = vec![Comb::zero(); dom.rank()];
                for c in 0..n {
                    let blk = tensor_map(&self.component(a, c), &other.component(c, b));
                    let so = self.source.offset(&other.source, a, c, b);
                    let to = self.target.offset(&other.target, a, c, b);
                    for (j, col) in blk.cols.iter().enumerate() {
                        cols[so + j] = col.map_keys(|&i| i + to);
                    }
                }
                comps.insert((a, b), LinearMap::from_cols(dom, cod, cols)?);
            }
        }
        QuiverMap::new(src, tgt, comps)
    }

    pub fn is_iso(&self) -> bool {
        (0..self.source.size()).all(|a| {
            (0..self.source.size()).all(|b| {
                let c = self.component(a, b);
                c.domain.rank() == c.codomain.rank() && c.rank() == c.domain.rank()
            })
        })
    }
}

/// Relabeling maps between quivers with the same ranks entrywise.
fn relabel(src: &Quiver, tgt: &Quiver, perm: impl Fn(usize, usize, usize) -> usize) -> Result<QuiverMap> {
    let mut comps = BTreeMap::new();
    for (&(a, b), m) in &src.entries {
        let cols = (0..m.rank()).map(|j| Comb::basis(perm(a, b, j), src.ring)).collect();
        comps.insert((a, b), LinearMap::from_cols(m.clone(), tgt.entry(a, b), cols)?);
    }
    QuiverMap::new(src.clone(), tgt.clone(), comps)
}

/// Right unitor `Q ⊗ I -> Q`.
pub fn right_unitor(q: &Quiver) -> Result<QuiverMap> {
    let qi = q.tensor(&Quiver::unit(q.ring, q.vertices.clone()))?;
    relabel(&qi, q, |_, _, j| j)
}

/// Left unitor `I ⊗ Q -> Q`.
pub fn left_unitor(q: &Quiver) -> Result<QuiverMap> {
    let iq = Quiver::unit(q.ring, q.vertices.clone()).tensor(q)?;
    relabel(&iq, q, |_, _, j| j)
}

/// Associator `(Q ⊗ P) ⊗ R -> Q ⊗ (P ⊗ R)`.
pub fn associator(q: &Quiver, p: &Quiver, r: &Quiver) -> Result<QuiverMap> {
    let qp = q.tensor(p)?;
    let pr = p.tensor(r)?;
    let left = qp.tensor(r)?;
    let right = q.tensor(&pr)?;
    let n = q.size();
    // Enumerate basis triples (c, d, x, y, z) in both orders.
    let mut comps = BTreeMap::new();
    for (&(a, b), m) in &left.entries {
        let mut target_pos = BTreeMap::new();
        let mut pos = 0;
        for c in 0..n {
            for x in 0..q.entry(a, c).rank() {
                for d in 0..n {
                    for y in 0..p.entry(c, d).rank() {
                        for z in 0..r.entry(d, b).rank() {
                            target_pos.insert((c, d, x, y, z), pos);
                            pos += 1;
                        }
                    }
                }
            }
        }
        let mut cols = Vec::with_capacity(m.rank());
        for d in 0..n {
            for c in 0..n {
                for x in 0..q.entry(a, c).rank() {
                    for y in 0..p.entry(c, d).rank() {
                        for z in 0..r.entry(d, b).rank() {
                            cols.push(Comb::basis(target_pos[&(c, d, x, y, z)], q.ring));
                        }
                    }
                }
            }
        }
        comps.insert((a, b), LinearMap::from_cols(m.clone(), right.entry(a, b), cols)?);
    }
    QuiverMap::new(left, right, comps)
}

/// Unit `Q -> f^* f_! Q` of the base change adjunction.
pub fn adjunction_unit(q: &Quiver, f: &[usize], target: &[String]) -> Result<QuiverMap> {
    let push = q.pushforward(f, target)?;
    let back = push.pullback(f, &q.vertices)?;
    let mut comps = BTreeMap::new();
    for (&(a, b), m) in &q.entries {
        let off = pushforward_offset(q, f, a, b);
        let cols = (0..m.rank()).map(|j| Comb::basis(off + j, q.ring)).collect();
        comps.insert((a, b), LinearMap::from_cols(m.clone(), back.entry(a, b), cols)?);
    }
    QuiverMap::new(q.clone(), back, comps)
}

fn pushforward_offset(q: &Quiver, f: &[usize], a: usize, b: usize) -> usize {
    let (x, y) = (f[a], f[b]);
    let mut off = 0;
    for a2 in (0..q.size()).filter(|&v| f[v] == x) {
        for b2 in (0..q.size()).filter(|&v| f[v] == y) {
            if (a2, b2) == (a, b) {
                return off;
            }
            off += q.entry(a2, b2).rank();
        }
    }
    unreachable!()
}

/// Counit `f_! f^* P -> P` of the base change adjunction.
pub fn adjunction_counit(p: &Quiver, f: &[usize], source: &[String]) -> Result<QuiverMap> {
    let back = p.pullback(f, source)?;
    let push = back.pushforward(f, &p.vertices)?;
    let mut comps = BTreeMap::new();
    for (&(x, y), m) in &push.entries {
        let mut cols = Vec::new();
        for a in (0..source.len()).filter(|&v| f[v] == x) {
            for b in (0..source.len()).filter(|&v| f[v] == y) {
                for j in 0..back.entry(a, b).rank() {
                    cols.push(Comb::basis(j, p.ring));
                }
            }
        }
        comps.insert((x, y), LinearMap::from_cols(m.clone(), p.entry(x, y), cols)?);
    }
    QuiverMap::new(push, p.clone(), comps)
}

/// Lax structure `f^*Q ⊗_S f^*P -> f^*(Q ⊗_T P)`.
pub fn pullback_lax(q: &Quiver, p: &Quiver, f: &[usize], source: &[String]) -> Result<QuiverMap> {
    let fq = q.pullback(f, source)?;
    let fp = p.pullback(f, source)?;
    let dom = fq.tensor(&fp)?;
    let cod = q.tensor(p)?.pullback(f, source)?;
    let mut comps = BTreeMap::new();
    for (&(a, b), m) in &dom.entries {
        let mut cols = Vec::new();
        for c in 0..source.len() {
            let off = q.offset(p, f[a], f[c], f[b]);
            let (rq, rp) = (fq.entry(a, c).rank(), fp.entry(c, b).rank());
            for x in 0..rq {
                for y in 0..rp {
                    cols.push(Comb::basis(off + x * rp + y, q.ring));
                }
            }
        }
        comps.insert((a, b), LinearMap::from_cols(m.clone(), cod.entry(a, b), cols)?);
    }
    QuiverMap::new(dom, cod, comps)
}

/// Lax unit `I_S -> f^* I_T`.
pub fn pullback_lax_unit(ring: Ring, f: &[usize], source: &[String], target: &[String]) -> Result<QuiverMap> {
    let dom = Quiver::unit(ring, source.to_vec());
    let cod = Quiver::unit(ring, target.to_vec()).pullback(f, source)?;
    let comps = dom.entries.iter().map(|(&k, m)| (k, LinearMap::from_cols(m.clone(), cod.entry(k.0, k.1), vec![Comb::basis(0, ring)]).unwrap())).collect();
    QuiverMap::new(dom, cod, comps)
}

/// The embedding `total(Q ⊗ P) -> total(Q) ⊗ total(P)`.
pub fn total_tensor_embedding(q: &Quiver, p: &Quiver) -> Result<LinearMap> {
    let qp = q.tensor(p)?;
    let tq = q.total();
    let tp = p.total();
    let tt = tq.tensor(&tp);
    let pos_q = total_positions(q);
    let pos_p = total_positions(p);
    let mut cols = Vec::new();
    for &(a, b) in qp.entries.keys() {
        for c in 0..q.size() {
            for x in 0..q.entry(a, c).rank() {
                for y in 0..p.entry(c, b).rank() {
                    cols.push(Comb::basis(pos_q[&(a, c)] + x, q.ring).map_keys(|&i| i * tp.rank() + pos_p[&(c, b)] + y));
                }
            }
        }
    }
    LinearMap::from_cols(qp.total(), tt, cols)
}

fn total_positions(q: &Quiver) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    let mut pos = 0;
    for (&k, m) in &q.entries {
        out.insert(k, pos);
        pos += m.rank();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(label: &str) -> FreeModule {
        FreeModule::new(Ring::Q, vec![label.into()]).unwrap()
    }

    #[test]
    fn tensor_example() {
        let s = vec!["a".to_string(), "b".to_string()];
        let mut q = Quiver::new(Ring::Q, s.clone());
        q.set(0, 1, k("x"));
        let mut p = Quiver::new(Ring::Q, s);
        p.set(1, 1, k("y"));
        let t = q.tensor(&p).unwrap();
        assert_eq!(t.entry(0, 1).rank(), 1);
        assert_eq!(t.total_rank(), 1);
        assert!(right_unitor(&q).unwrap().is_iso());
    }

    #[test]
    fn collapse() {
        let s = vec!["a".to_string(), "b".to_string()];
        let mut q = Quiver::new(Ring::Q, s);
        q.set(0, 1, k("x"));
        let pt = vec!["*".to_string()];
        let f = [0, 0];
        let push = q.pushforward(&f, &pt).unwrap();
        assert_eq!(push.entry(0, 0).rank(), 1);
        assert_eq!(Quiver::unit(Ring::Q, vec!["a".into(), "b".into()]).total().rank(), 2);
    }
}
