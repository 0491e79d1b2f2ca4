//! Truncated dg-categories, `H₀` and `ι`, the linear dg-nerve `T(Γ̃(-)^♯)`,
//! the classical dg-nerve and its comparison with `Ũ` of the linear one.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::doldkan::{gamma, mask_elems, mask_len, normalize, AugSimplicial, ChainComplex, ChainFixture, ChainMap, Family, Gamma, Mask, Normalized};
use crate::exactcore::{sign, tensor_combs, Comb, Echelon, Ring, Scalar};
use crate::frobenius::{check_f_templicial_map, inverse_mu_naf};
use crate::intervals::Partition;
use crate::templicial::{exact_solve, linear_homotopy_category, linear_nerve, single, Gen, LinearCategory, TemplicialMap, USimplex, Witness};
use crate::tensorfrob::{kernel_k, tensor_t, GradedQuiver, NarrowMonoid, TensorAlgebra};
use crate::{Error, Result};

type CompTable = BTreeMap<(usize, usize), Comb<usize>>;
type Checked = std::result::Result<(), Witness>;

/// A dg-category with hom complexes in degrees `0..=dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DGCategory {
    pub ring: Ring,
    pub objects: Vec<String>,
    pub dim: usize,
    /// Composites are known up to this total degree.
    pub comp_dim: usize,
    /// One complex for every ordered pair of objects.
    pub hom: BTreeMap<(usize, usize), ChainComplex>,
    /// `comp[(x, y, z, p, q)][(f, g)] = g ∘ f` for `f ∈ C_p(x,y)`, `g ∈ C_q(y,z)`.
    pub comp: BTreeMap<(usize, usize, usize, usize, usize), CompTable>,
    /// `ids[x] ∈ C_0(x,x)`.
    pub ids: Vec<Comb<usize>>,
}

impl DGCategory {
    /// Objects and hom complexes; missing pairs are zero, no composites yet.
    pub fn new(ring: Ring, objects: Vec<String>, dim: usize, mut hom: BTreeMap<(usize, usize), ChainComplex>) -> Result<DGCategory> {
        let n = objects.len();
        for x in 0..n {
            for y in 0..n {
                let c = hom.entry((x, y)).or_insert_with(|| ChainComplex::zero(ring, dim));
                if c.dim() != dim || c.ring != ring {
                    return Err(Error::Contract(format!("hom complex ({x},{y}) does not have dimension {dim}")));
                }
            }
        }
        Ok(DGCategory { ring, objects, dim, comp_dim: dim, hom, comp: BTreeMap::new(), ids: vec![Comb::zero(); n] })
    }

    pub fn hom(&self, x: usize, y: usize) -> &ChainComplex {
        &self.hom[&(x, y)]
    }

    pub fn rank(&self, x: usize, y: usize, p: usize) -> usize {
        self.hom(x, y).rank(p)
    }

    /// Records `g ∘ f = v` on basis elements.
    pub fn set(&mut self, (x, y, z): (usize, usize, usize), (p, q): (usize, usize), (f, g): (usize, usize), v: Comb<usize>) {
        let t = self.comp.entry((x, y, z, p, q)).or_default();
        if v.is_zero() {
            t.remove(&(f, g));
        } else {
            t.insert((f, g), v);
        }
    }

    /// Makes `ids[x] = e` for basis elements `e` and records the unit composites.
    pub fn set_basis_units(&mut self, units: &[usize]) {
        let ring = self.ring;
        let n = self.objects.len();
        for (x, &e) in units.iter().enumerate() {
            self.ids[x] = Comb::basis(e, ring);
        }
        for (x, &e) in units.iter().enumerate() {
            for y in 0..n {
                for p in 0..=self.dim {
                    for f in 0..self.rank(x, y, p) {
                        self.set((x, x, y), (0, p), (e, f), Comb::basis(f, ring));
                    }
                    for f in 0..self.rank(y, x, p) {
                        self.set((y, x, x), (p, 0), (f, e), Comb::basis(f, ring));
                    }
                }
            }
        }
    }

    /// `g ∘ f`; zero above `dim`.
    #[allow(clippy::too_many_arguments)]
    pub fn compose(&self, x: usize, y: usize, z: usize, p: usize, q: usize, f: &Comb<usize>, g: &Comb<usize>) -> Comb<usize> {
        if p + q > self.dim {
            return Comb::zero();
        }
        assert!(p + q <= self.comp_dim, "composite of degree {} is beyond the known range", p + q);
        let mut out = Comb::zero();
        let Some(t) = self.comp.get(&(x, y, z, p, q)) else {
            return out;
        };
        for (&a, c) in f.iter() {
            for (&b, d) in g.iter() {
                if let Some(v) = t.get(&(a, b)) {
                    out.add_scaled(v, &(c * d));
                }
            }
        }
        out
    }

    /// The monoidal composition `m(f ⊗ g) = (-1)^{pq} g ∘ f`.
    #[allow(clippy::too_many_arguments)]
    pub fn m(&self, x: usize, y: usize, z: usize, p: usize, q: usize, f: &Comb<usize>, g: &Comb<usize>) -> Comb<usize> {
        self.compose(x, y, z, p, q, f, g).scaled(&sign(self.ring, p * q))
    }

    fn label(&self, x: usize, y: usize, p: usize, f: usize) -> String {
        format!("{}:{}->{}", self.hom(x, y).labels[p][f], self.objects[x], self.objects[y])
    }

    /// Complexes, typing, units, Leibniz rule and associativity.
    pub fn check(&self) -> Checked {
        let ring = self.ring;
        let n = self.objects.len();
        for c in self.hom.values() {
            c.check()?;
        }
        for (&(x, y, z, p, q), t) in &self.comp {
            for (&(f, g), v) in t {
                if f >= self.rank(x, y, p) || g >= self.rank(y, z, q) || v.keys().any(|&h| h >= self.rank(x, z, p + q)) {
                    return Err(Witness::new("composition typing", &[p, q], &format!("{}->{}->{}", self.objects[x], self.objects[y], self.objects[z]), &[]));
                }
            }
        }
        for x in 0..n {
            if self.ids[x].keys().any(|&h| h >= self.rank(x, x, 0)) {
                return Err(Witness::new("identity typing", &[0], &self.objects[x], &[]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for p in 0..=self.comp_dim {
                    for f in 0..self.rank(x, y, p) {
                        let e = Comb::basis(f, ring);
                        if self.compose(x, x, y, 0, p, &self.ids[x], &e) != e || self.compose(x, y, y, p, 0, &e, &self.ids[y]) != e {
                            return Err(Witness::new("unit law", &[p], &self.label(x, y, p, f), &[]));
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for p in 0..=self.comp_dim {
                        for q in 0..=self.comp_dim - p {
                            if p + q == 0 {
                                continue;
                            }
                            for f in 0..self.rank(x, y, p) {
                                for g in 0..self.rank(y, z, q) {
                                    let (ef, eg) = (Comb::basis(f, ring), Comb::basis(g, ring));
                                    let lhs = self.hom(x, z).boundary(p + q, &self.compose(x, y, z, p, q, &ef, &eg));
                                    let mut rhs = Comb::zero();
                                    if q > 0 {
                                        rhs.add_assign(&self.compose(x, y, z, p, q - 1, &ef, &self.hom(y, z).boundary(q, &eg)));
                                    }
                                    if p > 0 {
                                        rhs.add_scaled(&self.compose(x, y, z, p - 1, q, &self.hom(x, y).boundary(p, &ef), &eg), &sign(ring, q));
                                    }
                                    if lhs != rhs {
                                        return Err(Witness::new("Leibniz rule", &[p, q], &self.label(y, z, q, g), &[self.label(x, y, p, f)]));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for (x, y, z, w) in quadruples(n) {
            for p in 0..=self.comp_dim {
                for q in 0..=self.comp_dim - p {
                    for r in 0..=self.comp_dim - p - q {
                        for f in 0..self.rank(x, y, p) {
                            for g in 0..self.rank(y, z, q) {
                                let (ef, eg) = (Comb::basis(f, ring), Comb::basis(g, ring));
                                let gf = self.compose(x, y, z, p, q, &ef, &eg);
                                for h in 0..self.rank(z, w, r) {
                                    let eh = Comb::basis(h, ring);
                                    let lhs = self.compose(x, z, w, p + q, r, &gf, &eh);
                                    let rhs = self.compose(x, y, w, p, q + r, &ef, &self.compose(y, z, w, q, r, &eg, &eh));
                                    if lhs != rhs {
                                        return Err(Witness::new("associativity", &[p, q, r], &self.label(z, w, r, h), &[self.label(x, y, p, f), self.label(y, z, q, g)]));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `H₀`: hom modules `C_0 / ∂C_1`, over a field.
    pub fn h_zero(&self) -> Result<HZero> {
        let ring = self.ring;
        if !ring.is_field() {
            return Err(Error::Refused("H0 is computed over a field only".into()));
        }
        let n = self.objects.len();
        let mut echelons = BTreeMap::new();
        let mut arrows = Vec::new();
        let mut arrow_of = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                let c = self.hom(x, y);
                let rows: Vec<Comb<usize>> = if c.dim() >= 1 { c.d[1].clone() } else { vec![] };
                let e = Echelon::from_rows(c.rank(0), rows);
                for col in e.free_columns() {
                    arrow_of.insert((x, y, col), arrows.len());
                    arrows.push(Gen { src: x, tgt: y, label: c.labels[0][col].clone() });
                }
                echelons.insert((x, y), e);
            }
        }
        let mut h = HZero { category: LinearCategory { ring, objects: self.objects.clone(), arrows, comp: Default::default(), units: vec![] }, echelons, arrow_of };
        let units = (0..n).map(|x| h.class(x, x, &self.ids[x])).collect();
        let mut comp = std::collections::HashMap::new();
        for (&(x, y, a), &f) in &h.arrow_of {
            for (&(y2, z, b), &g) in &h.arrow_of {
                if y2 != y {
                    continue;
                }
                let v = h.class(x, z, &self.compose(x, y, z, 0, 0, &Comb::basis(a, ring), &Comb::basis(b, ring)));
                if !v.is_zero() {
                    comp.insert((f, g), v);
                }
            }
        }
        h.category.units = units;
        h.category.comp = comp;
        Ok(h)
    }

    pub fn to_fixture(&self) -> DGFixture {
        let hom = self.hom.iter().map(|(&(x, y), c)| HomEntry { src: x, tgt: y, complex: c.to_fixture() }).collect();
        let mut comp = Vec::new();
        for (&(x, y, z, p, q), t) in &self.comp {
            for (&(f, g), v) in t {
                comp.push(CompEntry { objects: [x, y, z], degrees: [p, q], args: [f, g], value: comb_to_pairs(v) });
            }
        }
        DGFixture { ring: self.ring.to_string(), objects: self.objects.clone(), dim: self.dim, hom, comp, ids: self.ids.iter().map(comb_to_pairs).collect() }
    }

    pub fn from_fixture(fx: &DGFixture) -> Result<DGCategory> {
        let ring = Ring::parse(&fx.ring)?;
        let mut hom = BTreeMap::new();
        for h in &fx.hom {
            if h.src >= fx.objects.len() || h.tgt >= fx.objects.len() {
                return Err(Error::Parse(format!("hom entry ({}, {}) names an unknown object", h.src, h.tgt)));
            }
            hom.insert((h.src, h.tgt), ChainComplex::from_fixture(&h.complex)?);
        }
        let mut c = DGCategory::new(ring, fx.objects.clone(), fx.dim, hom)?;
        for e in &fx.comp {
            let [x, y, z] = e.objects;
            if [x, y, z].iter().any(|&o| o >= fx.objects.len()) {
                return Err(Error::Parse("composition entry names an unknown object".into()));
            }
            c.set((x, y, z), (e.degrees[0], e.degrees[1]), (e.args[0], e.args[1]), pairs_to_comb(&e.value, ring)?);
        }
        if fx.ids.len() != fx.objects.len() {
            return Err(Error::Parse("one identity per object expected".into()));
        }
        c.ids = fx.ids.iter().map(|v| pairs_to_comb(v, ring)).collect::<Result<_>>()?;
        Ok(c)
    }
}

fn quadruples(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    out.push((x, y, z, w));
                }
            }
        }
    }
    out
}

fn comb_to_pairs(v: &Comb<usize>) -> Vec<(usize, String)> {
    v.iter().map(|(&k, c)| (k, c.to_string())).collect()
}

fn pairs_to_comb(v: &[(usize, String)], ring: Ring) -> Result<Comb<usize>> {
    let mut out = Comb::zero();
    for (k, s) in v {
        out.add_term(*k, Scalar::parse(s, ring)?);
    }
    Ok(out)
}

/// Serialized dg-category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DGFixture {
    pub ring: String,
    pub objects: Vec<String>,
    pub dim: usize,
    pub hom: Vec<HomEntry>,
    pub comp: Vec<CompEntry>,
    pub ids: Vec<Vec<(usize, String)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomEntry {
    pub src: usize,
    pub tgt: usize,
    pub complex: ChainFixture,
}

/// `g ∘ f = value` with `f = args[0]`, `g = args[1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompEntry {
    pub objects: [usize; 3],
    pub degrees: [usize; 2],
    pub args: [usize; 2],
    pub value: Vec<(usize, String)>,
}

/// `H₀(C)` together with the quotient data.
#[derive(Clone, Debug)]
pub struct HZero {
    pub category: LinearCategory,
    echelons: BTreeMap<(usize, usize), Echelon>,
    /// `(x, y, free column of C_0(x,y))` to arrow.
    pub arrow_of: BTreeMap<(usize, usize, usize), usize>,
}

impl HZero {
    /// The class of `v ∈ C_0(x,y)`.
    pub fn class(&self, x: usize, y: usize, v: &Comb<usize>) -> Comb<usize> {
        self.echelons[&(x, y)].reduce(v).map_keys(|&c| self.arrow_of[&(x, y, c)])
    }
}

/// `ι(A)`: the linear category in degree 0, zero above.
pub fn include_degree_zero(a: &LinearCategory, dim: usize) -> DGCategory {
    let ring = a.ring;
    let n = a.objects.len();
    let local: Vec<usize> = (0..a.arrows.len()).map(|f| a.hom(a.arrows[f].src, a.arrows[f].tgt).iter().position(|&g| g == f).unwrap()).collect();
    let mut hom = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let labels = a.hom(x, y).iter().map(|&f| a.arrows[f].label.clone()).collect();
            hom.insert((x, y), ChainComplex::concentrated(ring, labels, dim));
        }
    }
    let mut c = DGCategory::new(ring, a.objects.clone(), dim, hom).expect("well-formed complexes");
    for (&(f, g), v) in &a.comp {
        let (x, y, z) = (a.arrows[f].src, a.arrows[f].tgt, a.arrows[g].tgt);
        c.set((x, y, z), (0, 0), (local[f], local[g]), v.map_keys(|&h| local[h]));
    }
    c.ids = a.units.iter().map(|u| u.map_keys(|&h| local[h])).collect();
    c
}

/// Checks that `images` (arrow ↦ combination of arrows) is an
/// object-preserving isomorphism of linear categories.
pub fn check_linear_iso(src: &LinearCategory, tgt: &LinearCategory, images: &[Comb<usize>]) -> Result<Checked> {
    let ring = src.ring;
    if src.objects.len() != tgt.objects.len() || images.len() != src.arrows.len() {
        return Ok(Err(Witness::new("object and arrow counts", &[], "", &[])));
    }
    let map = |x: &Comb<usize>| x.bind(|&f| images[f].clone());
    for (f, v) in images.iter().enumerate() {
        let Gen { src: a, tgt: b, ref label } = src.arrows[f];
        if v.keys().any(|&h| tgt.arrows[h].src != a || tgt.arrows[h].tgt != b) {
            return Ok(Err(Witness::new("iso preserves endpoints", &[], label, &[])));
        }
    }
    for a in 0..src.objects.len() {
        for b in 0..src.objects.len() {
            let (hs, ht) = (src.hom(a, b), tgt.hom(a, b));
            if hs.len() != ht.len() {
                return Ok(Err(Witness::new("iso is bijective", &[a, b], &src.objects[a], &[])));
            }
            let cols: Vec<Comb<usize>> = hs.iter().map(|&f| images[f].clone()).collect();
            for &h in &ht {
                if exact_solve(&cols, &Comb::basis(h, ring), ring)?.is_none() {
                    return Ok(Err(Witness::new("iso is bijective", &[a, b], &tgt.arrows[h].label, &[])));
                }
            }
        }
    }
    for a in 0..src.objects.len() {
        if map(&src.units[a]) != tgt.units[a] {
            return Ok(Err(Witness::new("iso preserves identities", &[a], &src.objects[a], &[])));
        }
    }
    for f in 0..src.arrows.len() {
        for g in 0..src.arrows.len() {
            if src.arrows[f].tgt != src.arrows[g].src {
                continue;
            }
            if map(&src.compose_basis(f, g)) != tgt.compose(&images[f], &images[g]) {
                return Ok(Err(Witness::new("iso preserves composition", &[], &src.arrows[g].label, &[src.arrows[f].label.clone()])));
            }
        }
    }
    Ok(Ok(()))
}

/// `Γ̃(C)^♯`: the narrow monoid with `A_n(x,y) = Γ̃(C(x,y))_{n-2}`.
#[derive(Clone, Debug)]
pub struct Sharp {
    pub monoid: NarrowMonoid,
    pub gammas: BTreeMap<(usize, usize), Gamma>,
    /// `gens[n][g] = (x, y, local)` with `local` a basis element of `Γ̃(C(x,y))_{n-2}`.
    pub gens: Vec<Vec<(usize, usize, usize)>>,
    index: Vec<BTreeMap<(usize, usize, usize), usize>>,
}

impl Sharp {
    pub fn global(&self, n: usize, x: usize, y: usize, v: &Comb<usize>) -> Comb<usize> {
        v.map_keys(|&g| self.index[n][&(x, y, g)])
    }

    /// Local coordinates of an element of `A_n(x,y)` for one vertex pair.
    pub fn local(&self, n: usize, v: &Comb<usize>) -> Comb<usize> {
        v.map_keys(|&g| self.gens[n][g].2)
    }

    /// The family `(a_J)_{J ⊆ [n-2]}` of an element of `A_n(x,y)`.
    pub fn family(&self, n: usize, x: usize, y: usize, v: &Comb<usize>) -> Family {
        self.gammas[&(x, y)].family(n as isize - 2, &self.local(n, v))
    }

    pub fn from_family(&self, n: usize, x: usize, y: usize, f: &Family) -> Result<Comb<usize>> {
        let local = self.gammas[&(x, y)].coords(n as isize - 2, f)?;
        Ok(self.global(n, x, y, &local))
    }

    /// All generators of `A_n(x,y)`.
    pub fn between(&self, n: usize, x: usize, y: usize) -> Vec<usize> {
        (0..self.gens[n].len()).filter(|&g| self.gens[n][g].0 == x && self.gens[n][g].1 == y).collect()
    }
}

/// Enriches `C` in augmented simplicial modules via `Γ̃` and reindexes along
/// `[0] ⋆ - ⋆ [0]`. The narrow dimension is `dim(C) + 1`.
pub fn sharp(c: &DGCategory) -> Result<Sharp> {
    let ring = c.ring;
    let n_obj = c.objects.len();
    let d = c.dim + 1;
    if c.comp_dim + 1 < c.dim {
        return Err(Error::Contract("composites are needed up to degree dim - 1".into()));
    }
    let mut gammas = BTreeMap::new();
    for (&k, h) in &c.hom {
        gammas.insert(k, gamma(h)?);
    }
    let mut gens = vec![Vec::new()];
    for n in 1..=d {
        let mut lv = Vec::new();
        for (&(x, y), g) in &gammas {
            for l in 0..g.module.rank(n as isize - 2) {
                lv.push((x, y, l));
            }
        }
        gens.push(lv);
    }
    let index: Vec<BTreeMap<(usize, usize, usize), usize>> = gens.iter().map(|l| l.iter().enumerate().map(|(i, &k)| (k, i)).collect()).collect();
    let levels = gens
        .iter()
        .enumerate()
        .map(|(n, l)| l.iter().map(|&(x, y, g)| Gen { src: x, tgt: y, label: format!("{}{}:{}{}#{g}", if n == 1 { "" } else { "γ" }, n, c.objects[x], c.objects[y]) }).collect())
        .collect();
    let quiver = GradedQuiver { ring, base: c.objects.clone(), dim: d, levels };
    let mut s = Sharp { monoid: NarrowMonoid { quiver, faces: vec![Vec::new(); d + 1], degens: vec![Vec::new(); d + 1], m: BTreeMap::new(), u: Vec::new() }, gammas, gens, index };
    for n in 1..=d {
        let l = n as isize - 2;
        s.monoid.faces[n] = vec![Vec::new(); n];
        s.monoid.degens[n] = vec![Vec::new(); n];
        for j in 1..n {
            s.monoid.faces[n][j] = s.gens[n].iter().map(|&(x, y, g)| s.global(n - 1, x, y, &s.gammas[&(x, y)].module.face(l, j - 1, &Comb::basis(g, ring)))).collect();
        }
        if n < d {
            for i in 1..n {
                s.monoid.degens[n][i] = s.gens[n].iter().map(|&(x, y, g)| s.global(n + 1, x, y, &s.gammas[&(x, y)].module.degen(l, i - 1, &Comb::basis(g, ring)))).collect();
            }
        }
    }
    for p in 1..d {
        for q in 1..=d - p {
            let mut table = BTreeMap::new();
            for (ga, &(x, y, la)) in s.gens[p].iter().enumerate() {
                for (gb, &(y2, z, lb)) in s.gens[q].iter().enumerate() {
                    if y2 != y {
                        continue;
                    }
                    let fa = &s.gammas[&(x, y)].basis[p - 1][la];
                    let fb = &s.gammas[&(y, z)].basis[q - 1][lb];
                    let mut out = Family::zero();
                    for (&(ja, ea), ca) in fa.iter() {
                        for (&(jb, eb), cb) in fb.iter() {
                            let v = c.m(x, y, z, mask_len(ja), mask_len(jb), &Comb::basis(ea, ring), &Comb::basis(eb, ring));
                            let j = ja | jb << (p - 1);
                            for (&h, cv) in v.iter() {
                                out.add_term((j, h), &(ca * cb) * cv);
                            }
                        }
                    }
                    let v = s.from_family(p + q - 1, x, z, &out)?;
                    if !v.is_zero() {
                        table.insert((ga, gb), v);
                    }
                }
            }
            s.monoid.m.insert((p, q), table);
        }
    }
    s.monoid.u = (0..n_obj).map(|x| s.from_family(1, x, x, &c.ids[x].map_keys(|&h| (0, h)))).collect::<Result<_>>()?;
    Ok(s)
}

/// `N_k^dg(C) = T(Γ̃(C)^♯)`, with the monoid it is built from.
pub fn linear_dg_nerve(c: &DGCategory) -> Result<(Sharp, TensorAlgebra)> {
    let s = sharp(c)?;
    let t = tensor_t(&s.monoid);
    Ok((s, t))
}

/// The dg-category `Ñ(A^♭)` of a narrow monoid, with per-pair data.
#[derive(Clone, Debug)]
pub struct FromNarrow {
    pub dg: DGCategory,
    pub normalized: BTreeMap<(usize, usize), Normalized>,
    /// `local[n][g]`: position of the narrow generator among those of its pair.
    pub local: Vec<Vec<usize>>,
    /// `by_pair[n][(x, y)]`: narrow generators of the pair, in local order.
    pub by_pair: Vec<BTreeMap<(usize, usize), Vec<usize>>>,
}

/// Undoes `♯` and applies `Ñ` hom-wise. The result has dimension
/// `dim(A) - 1` and composites up to degree `dim(A) - 2`.
pub fn dg_from_narrow(a: &NarrowMonoid) -> Result<FromNarrow> {
    let ring = a.ring();
    let d = a.dim();
    if d < 2 {
        return Err(Error::Contract("narrow dimension at least 2 needed".into()));
    }
    let q = &a.quiver;
    let n_obj = q.base.len();
    let mut local = vec![Vec::new()];
    let mut by_pair = vec![BTreeMap::new()];
    for n in 1..=d {
        let mut bp: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for x in 0..n_obj {
            for y in 0..n_obj {
                bp.insert((x, y), Vec::new());
            }
        }
        let mut lv = Vec::new();
        for (g, gen) in q.levels[n].iter().enumerate() {
            let list = bp.get_mut(&(gen.src, gen.tgt)).unwrap();
            lv.push(list.len());
            list.push(g);
        }
        local.push(lv);
        by_pair.push(bp);
    }
    let to_local = |n: usize, v: &Comb<usize>| v.map_keys(|&g| local[n][g]);
    let mut normalized = BTreeMap::new();
    let mut hom = BTreeMap::new();
    for x in 0..n_obj {
        for y in 0..n_obj {
            let labels: Vec<Vec<String>> = (1..=d).map(|n| by_pair[n][&(x, y)].iter().map(|&g| q.levels[n][g].label.clone()).collect()).collect();
            let len = labels.len();
            let mut faces: Vec<Vec<Vec<Comb<usize>>>> = vec![Vec::new(); len];
            let mut degens: Vec<Vec<Vec<Comb<usize>>>> = vec![Vec::new(); len];
            for k in 1..len {
                let n = k + 1;
                faces[k] = (0..k).map(|i| by_pair[n][&(x, y)].iter().map(|&g| to_local(n - 1, &a.face(n, i + 1, &Comb::basis(g, ring)))).collect()).collect();
                if k + 1 < len {
                    degens[k] = (0..k).map(|i| by_pair[n][&(x, y)].iter().map(|&g| to_local(n + 1, &a.degen(n, i + 1, &Comb::basis(g, ring)))).collect()).collect();
                }
            }
            let aug = AugSimplicial { ring, top: len as isize - 2, labels, faces, degens };
            let nz = normalize(&aug)?;
            hom.insert((x, y), nz.complex.clone());
            normalized.insert((x, y), nz);
        }
    }
    let mut dg = DGCategory::new(ring, q.base.clone(), d - 1, hom)?;
    dg.comp_dim = d - 2;
    for x in 0..n_obj {
        for y in 0..n_obj {
            for z in 0..n_obj {
                for p in 0..=d - 2 {
                    for qq in 0..=d - 2 - p {
                        let (nxy, nyz, nxz) = (&normalized[&(x, y)], &normalized[&(y, z)], &normalized[&(x, z)]);
                        for (f, &ca) in nxy.columns[p].iter().enumerate() {
                            for (g, &cb) in nyz.columns[qq].iter().enumerate() {
                                let (ga, gb) = (by_pair[p + 1][&(x, y)][ca], by_pair[qq + 1][&(y, z)][cb]);
                                let prod = a.mult(p + 1, qq + 1, &Comb::basis(ga, ring), &Comb::basis(gb, ring));
                                let v = nxz.class(p + qq, &to_local(p + qq + 1, &prod)).scaled(&sign(ring, p * qq));
                                dg.set((x, y, z), (p, qq), (f, g), v);
                            }
                        }
                    }
                }
            }
        }
    }
    dg.ids = (0..n_obj).map(|x| normalized[&(x, x)].class(0, &to_local(1, &a.u[x]))).collect();
    Ok(FromNarrow { dg, normalized, local, by_pair })
}

/// An identity-on-objects dg-functor given hom-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct DGMap {
    pub maps: BTreeMap<(usize, usize), ChainMap>,
}

impl DGMap {
    /// Chain isomorphism on every hom complex, compatible with identities and
    /// all composites known on both sides.
    pub fn check_iso(&self, src: &DGCategory, tgt: &DGCategory) -> Result<Checked> {
        let ring = src.ring;
        let n = src.objects.len();
        if n != tgt.objects.len() {
            return Ok(Err(Witness::new("same objects", &[], "", &[])));
        }
        for (&(x, y), f) in &self.maps {
            if let Err(w) = f.check(src.hom(x, y), tgt.hom(x, y)) {
                return Ok(Err(w));
            }
            if !f.is_iso(src.hom(x, y), tgt.hom(x, y))? {
                return Ok(Err(Witness::new("hom-wise isomorphism", &[], &format!("{}->{}", src.objects[x], src.objects[y]), &[])));
            }
        }
        for x in 0..n {
            if self.maps[&(x, x)].apply(0, &src.ids[x]) != tgt.ids[x] {
                return Ok(Err(Witness::new("functor preserves identities", &[], &src.objects[x], &[])));
            }
        }
        let top = src.comp_dim.min(tgt.comp_dim);
        for (x, y, z, _) in quadruples(n).into_iter().filter(|q| q.3 == 0) {
            for p in 0..=top {
                for q in 0..=top - p {
                    for f in 0..src.rank(x, y, p) {
                        for g in 0..src.rank(y, z, q) {
                            let (ef, eg) = (Comb::basis(f, ring), Comb::basis(g, ring));
                            let lhs = self.maps[&(x, z)].apply(p + q, &src.compose(x, y, z, p, q, &ef, &eg));
                            let rhs = tgt.compose(x, y, z, p, q, &self.maps[&(x, y)].apply(p, &ef), &self.maps[&(y, z)].apply(q, &eg));
                            if lhs != rhs {
                                return Ok(Err(Witness::new("functor preserves composition", &[p, q], &src.label(y, z, q, g), &[src.label(x, y, p, f)])));
                            }
                        }
                    }
                }
            }
        }
        Ok(Ok(()))
    }
}

/// `Ñ(K(N_k^dg(C))^♭) ≅ C`: project kernel elements onto one-letter words and
/// take the top component of the resulting family.
pub fn check_normalized_kernel(c: &DGCategory) -> Result<Checked> {
    let ring = c.ring;
    let (s, t) = linear_dg_nerve(c)?;
    let (ka, kern) = kernel_k(&t.naf)?;
    let back = dg_from_narrow(&ka)?;
    let mut maps = BTreeMap::new();
    for (&(x, y), nz) in &back.normalized {
        let mut degrees = Vec::new();
        for n in 0..=back.dg.dim {
            let top: Mask = if n == 0 { 0 } else { (1 << n) - 1 };
            let col = nz.columns[n]
                .iter()
                .map(|&l| {
                    let k = back.by_pair[n + 1][&(x, y)][l];
                    let mut out = Comb::zero();
                    for (&tg, coeff) in kern.include(n + 1, &Comb::basis(k, ring)).iter() {
                        let (i, word) = &t.summands[n + 1][tg];
                        if *i != Partition::trivial(n + 1) {
                            continue;
                        }
                        let (sx, sy, loc) = s.gens[n + 1][word[0]];
                        for (&(mask, h), v) in s.gammas[&(sx, sy)].basis[n][loc].iter() {
                            if mask == top {
                                out.add_term(h, coeff * v);
                            }
                        }
                    }
                    out
                })
                .collect();
            degrees.push(col);
        }
        maps.insert((x, y), ChainMap { maps: degrees });
    }
    DGMap { maps }.check_iso(&back.dg, c)
}

/// `N_k^dg(ι(A)) ≅ N_k(A)`: a chain `f_1|…|f_n` goes to the word of its letters.
pub fn check_nerve_of_inclusion(a: &LinearCategory, dim: usize) -> Result<Checked> {
    let ring = a.ring;
    let c = include_degree_zero(a, dim);
    let (s, t) = linear_dg_nerve(&c)?;
    let d = dim + 1;
    let nerve = linear_nerve(a, d);
    let letter: Vec<Comb<usize>> = (0..a.arrows.len())
        .map(|f| {
            let (x, y) = (a.arrows[f].src, a.arrows[f].tgt);
            let l = a.hom(x, y).iter().position(|&g| g == f).unwrap();
            s.from_family(1, x, y, &Comb::basis((0, l), ring))
        })
        .collect::<Result<_>>()?;
    let mut alpha = vec![(0..a.objects.len()).map(|x| Comb::basis(t.lookup(0, &Partition::of(0, &[0]), &[x]).unwrap(), ring)).collect::<Vec<_>>()];
    for n in 1..=d {
        let full = Partition::full(n);
        let col = a
            .chains(n)
            .iter()
            .map(|ch| {
                let mut tensor = single(&letter[ch[0]]);
                for &f in &ch[1..] {
                    tensor = tensor_combs(&tensor, &single(&letter[f]));
                }
                let mut out = Comb::zero();
                for (w, v) in tensor.iter() {
                    out.add_term(t.lookup(n, &full, w).expect("word of composable letters"), v.clone());
                }
                out
            })
            .collect();
        alpha.push(col);
    }
    let map = TemplicialMap { vertex_map: (0..a.objects.len()).collect(), alpha };
    if let Err(w) = map.check(&nerve, t.host()) {
        return Ok(Err(w));
    }
    if !map.is_iso(&nerve, t.host())? {
        return Ok(Err(Witness::new("nerve comparison is invertible", &[], "", &[])));
    }
    Ok(check_f_templicial_map(&map, &inverse_mu_naf(&nerve)?, &t.naf))
}

/// `h_k(N_k^dg(C)) ≅ H₀(C)`: a degree-0 arrow goes to the class of its letter.
pub fn check_homotopy_category(c: &DGCategory) -> Result<Checked> {
    let ring = c.ring;
    let h0 = c.h_zero()?;
    let (s, t) = linear_dg_nerve(c)?;
    let lh = linear_homotopy_category(t.host())?;
    let mut images = vec![Comb::zero(); h0.category.arrows.len()];
    for (&(x, y, col), &f) in &h0.arrow_of {
        let v = s.from_family(1, x, y, &Comb::basis((0, col), ring))?;
        let letters = v.map_keys(|&g| t.letter(1, g));
        images[f] = lh.class(&letters);
    }
    check_linear_iso(&h0.category, &lh.category, &images)
}

/// Number of elements of `I` below `s`.
pub fn p_index(i: Mask, s: usize) -> usize {
    mask_len(i & ((1u32 << s) - 1))
}

/// `I^{≥s} = {s} ∪ {t ∈ I : t > s}`.
pub fn upper(i: Mask, s: usize) -> Mask {
    (i & !((2u32 << s) - 1)) | 1 << s
}

/// `I^{≤s} = {t ∈ I : t < s} ∪ {s}`.
pub fn lower(i: Mask, s: usize) -> Mask {
    (i & ((1u32 << s) - 1)) | 1 << s
}

fn ends(i: Mask) -> (usize, usize) {
    (i.trailing_zeros() as usize, 31 - i.leading_zeros() as usize)
}

/// `ε(s, I) ≡ ℓ(I) p_I(s) + ℓ(I) + p_I(s)`, and `ε(i, I) = 0` at the first point.
pub fn epsilon(s: usize, i: Mask) -> usize {
    if s == ends(i).0 {
        return 0;
    }
    let m = mask_len(i) - 1;
    let p = p_index(i, s);
    m * p + m + p
}

/// Subsets of `[n]` with at least two points, by increasing span then mask.
pub fn span_order(n: usize) -> Vec<Mask> {
    let mut v: Vec<Mask> = (0u32..(1 << (n + 1))).filter(|&m| mask_len(m) >= 2).collect();
    v.sort_by_key(|&m| {
        let (i, j) = ends(m);
        (j - i, m)
    });
    v
}

/// A family `(a_I)` over the subsets of `[n]` with at least two points.
pub type SubsetFamily = BTreeMap<Mask, Comb<usize>>;

fn clean(f: &SubsetFamily) -> SubsetFamily {
    f.iter().filter(|(_, v)| !v.is_zero()).map(|(&k, v)| (k, v.clone())).collect()
}

pub fn subset_label(i: Mask) -> String {
    mask_elems(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// A simplex candidate of the classical dg-nerve; `a_{{i}} = id` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct DGNerveSimplex {
    pub vertices: Vec<usize>,
    pub a: SubsetFamily,
}

fn entry(c: &DGCategory, vertices: &[usize], fam: &SubsetFamily, i: Mask) -> Comb<usize> {
    if mask_len(i) == 1 {
        return c.ids[vertices[ends(i).0]].clone();
    }
    fam.get(&i).cloned().unwrap_or_default()
}

fn comp_sub(c: &DGCategory, v: &[usize], lo: Mask, f: &Comb<usize>, hi: Mask, g: &Comb<usize>) -> Comb<usize> {
    let (i, s) = ends(lo);
    let (_, j) = ends(hi);
    c.compose(v[i], v[s], v[j], mask_len(lo) - 2, mask_len(hi) - 2, f, g)
}

impl DGNerveSimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// `d_l`: `a'_I = a_{δ_l I}`.
    pub fn face(&self, l: usize) -> DGNerveSimplex {
        let n = self.dim();
        let mut vertices = self.vertices.clone();
        vertices.remove(l);
        let a = span_order(n - 1)
            .into_iter()
            .filter_map(|i| {
                let img: Mask = mask_elems(i).iter().fold(0, |acc, &t| acc | 1 << if t < l { t } else { t + 1 });
                self.a.get(&img).map(|v| (i, v.clone()))
            })
            .collect();
        DGNerveSimplex { vertices, a }
    }

    /// `s_l`: `a_{σ_l I}` where `σ_l` is injective on `I`, the identity on `{l, l+1}`, zero otherwise.
    pub fn degen(&self, c: &DGCategory, l: usize) -> DGNerveSimplex {
        let n = self.dim();
        let mut vertices = self.vertices.clone();
        vertices.insert(l, self.vertices[l]);
        let mut a = SubsetFamily::new();
        for i in span_order(n + 1) {
            let both = i >> l & 1 == 1 && i >> (l + 1) & 1 == 1;
            if !both {
                let img: Mask = mask_elems(i).iter().fold(0, |acc, &t| acc | 1 << if t <= l { t } else { t - 1 });
                if let Some(v) = self.a.get(&img) {
                    a.insert(i, v.clone());
                }
            } else if i == 0b11 << l {
                a.insert(i, c.ids[self.vertices[l]].clone());
            }
        }
        DGNerveSimplex { vertices, a: clean(&a) }
    }
}

/// Membership in the classical dg-nerve:
/// `∂a_I = Σ_t (-1)^{p(t)} a_{I∖t} + (-1)^{ℓ(I)(p(t)+1)} a_{I^{≥t}} ∘ a_{I^{≤t}}`.
pub fn classical_dg_nerve_check(c: &DGCategory, s: &DGNerveSimplex) -> Checked {
    let ring = c.ring;
    let n = s.dim();
    let v = &s.vertices;
    if v.iter().any(|&x| x >= c.objects.len()) {
        return Err(Witness::new("vertex is an object", &[], "", &[]));
    }
    for (&i, a) in &s.a {
        let (lo, hi) = ends(i);
        if hi > n || mask_len(i) < 2 || mask_len(i) - 2 > c.dim || a.keys().any(|&h| h >= c.rank(v[lo], v[hi], mask_len(i) - 2)) {
            return Err(Witness::new("dg-nerve typing", &mask_elems(i), &subset_label(i), &[]));
        }
    }
    for i in span_order(n) {
        let m = mask_len(i) - 1;
        if m < 2 || m - 1 > c.dim {
            continue;
        }
        let (lo, hi) = ends(i);
        let lhs = c.hom(v[lo], v[hi]).boundary(m - 1, &entry(c, v, &s.a, i));
        let mut rhs = Comb::zero();
        for t in mask_elems(i).into_iter().filter(|&t| t != lo && t != hi) {
            let p = p_index(i, t);
            rhs.add_scaled(&entry(c, v, &s.a, i & !(1 << t)), &sign(ring, p));
            let (le, ge) = (lower(i, t), upper(i, t));
            let prod = c.compose(v[lo], v[t], v[hi], mask_len(le) - 2, mask_len(ge) - 2, &entry(c, v, &s.a, le), &entry(c, v, &s.a, ge));
            rhs.add_scaled(&prod, &sign(ring, m * (p + 1)));
        }
        if lhs != rhs {
            return Err(Witness::new("dg-nerve boundary equation", &mask_elems(i), &subset_label(i), &[]));
        }
    }
    Ok(())
}

/// The condition on the `Γ̃^♯` side: `∂b_I = Σ_t (-1)^{p(t)+1} b_{I∖t}`.
pub fn s_side_check(c: &DGCategory, vertices: &[usize], b: &SubsetFamily) -> Checked {
    let ring = c.ring;
    let n = vertices.len() - 1;
    for i in span_order(n) {
        let m = mask_len(i) - 1;
        if m < 2 || m - 1 > c.dim {
            continue;
        }
        let (lo, hi) = ends(i);
        let lhs = c.hom(vertices[lo], vertices[hi]).boundary(m - 1, &entry(c, vertices, b, i));
        let mut rhs = Comb::zero();
        for t in mask_elems(i).into_iter().filter(|&t| t != lo && t != hi) {
            rhs.add_scaled(&entry(c, vertices, b, i & !(1 << t)), &sign(ring, p_index(i, t) + 1));
        }
        if lhs != rhs {
            return Err(Witness::new("boundary condition of the family", &mask_elems(i), &subset_label(i), &[]));
        }
    }
    Ok(())
}

/// Solves `Σ_{s∈I^c} (-1)^{ε(s,I)} a_{I^{≥s}} ∘ b_{I^{≤s}} = 0` for `b`, by increasing span.
pub fn bridge_a_to_b(c: &DGCategory, vertices: &[usize], a: &SubsetFamily) -> SubsetFamily {
    let ring = c.ring;
    let n = vertices.len() - 1;
    let mut b = SubsetFamily::new();
    for i in span_order(n) {
        let m = mask_len(i) - 1;
        if m - 1 > c.dim {
            continue;
        }
        let (lo, hi) = ends(i);
        let mut v = entry(c, vertices, a, i);
        for s in (lo + 1..hi).filter(|&s| i >> s & 1 == 0) {
            let (le, ge) = (lower(i, s), upper(i, s));
            let prod = comp_sub(c, vertices, le, &entry(c, vertices, &b, le), ge, &entry(c, vertices, a, ge));
            v.add_scaled(&prod, &sign(ring, epsilon(s, i)));
        }
        b.insert(i, v.scaled(&sign(ring, m + 1)));
    }
    clean(&b)
}

/// The inverse of [`bridge_a_to_b`].
pub fn bridge_b_to_a(c: &DGCategory, vertices: &[usize], b: &SubsetFamily) -> SubsetFamily {
    let ring = c.ring;
    let n = vertices.len() - 1;
    let mut a = SubsetFamily::new();
    for i in span_order(n) {
        let m = mask_len(i) - 1;
        if m - 1 > c.dim {
            continue;
        }
        let (lo, hi) = ends(i);
        let mut v = entry(c, vertices, b, i).scaled(&sign(ring, m));
        for s in (lo + 1..hi).filter(|&s| i >> s & 1 == 0) {
            let (le, ge) = (lower(i, s), upper(i, s));
            let prod = comp_sub(c, vertices, le, &entry(c, vertices, b, le), ge, &entry(c, vertices, &a, ge));
            v.add_scaled(&prod, &sign(ring, epsilon(s, i)));
        }
        a.insert(i, v.negated());
    }
    clean(&a)
}

/// A simplex of `𝒮(A)`: vertices and `b_{i,j} ∈ A_{j-i}(x_i, x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SSimplex {
    pub vertices: Vec<usize>,
    pub b: BTreeMap<(usize, usize), Comb<usize>>,
}

impl SSimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn at(&self, i: usize, j: usize) -> Comb<usize> {
        self.b.get(&(i, j)).cloned().unwrap_or_default()
    }

    fn cleaned(mut self) -> SSimplex {
        self.b.retain(|_, v| !v.is_zero());
        self
    }

    /// A random simplex with coefficients in `[-bound, bound]`.
    pub fn random<R: Rng>(a: &NarrowMonoid, n: usize, bound: i64, rng: &mut R) -> SSimplex {
        let ring = a.ring();
        let vertices: Vec<usize> = (0..=n).map(|_| rng.gen_range(0..a.quiver.base.len())).collect();
        let mut b = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..=n {
                let mut v = Comb::zero();
                for (g, gen) in a.quiver.levels[j - i].iter().enumerate() {
                    if gen.src == vertices[i] && gen.tgt == vertices[j] {
                        v.add_term(g, ring.random_small(rng, bound));
                    }
                }
                b.insert((i, j), v);
            }
        }
        SSimplex { vertices, b }.cleaned()
    }

    /// `d_l` of `𝒮(A)`.
    pub fn face(&self, a: &NarrowMonoid, l: usize) -> SSimplex {
        let n = self.dim();
        let mut vertices = self.vertices.clone();
        vertices.remove(l);
        let mut b = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = if l <= i {
                    self.at(i + 1, j + 1)
                } else if l <= j {
                    let mut v = a.face(j + 1 - i, l - i, &self.at(i, j + 1));
                    v.add_assign(&a.mult(l - i, j + 1 - l, &self.at(i, l), &self.at(l, j + 1)));
                    v
                } else {
                    self.at(i, j)
                };
                b.insert((i, j), v);
            }
        }
        SSimplex { vertices, b }.cleaned()
    }

    /// `s_l` of `𝒮(A)`.
    pub fn degen(&self, a: &NarrowMonoid, l: usize) -> SSimplex {
        let n = self.dim();
        let mut vertices = self.vertices.clone();
        vertices.insert(l, self.vertices[l]);
        let mut b = BTreeMap::new();
        for i in 0..=n + 1 {
            for j in i + 1..=n + 1 {
                let v = if l < i {
                    self.at(i - 1, j - 1)
                } else if i < l && l + 1 < j {
                    a.degen(j - 1 - i, l - i, &self.at(i, j - 1))
                } else if j <= l {
                    self.at(i, j)
                } else if l == i && j == i + 1 {
                    a.u[self.vertices[i]].clone()
                } else {
                    Comb::zero()
                };
                b.insert((i, j), v);
            }
        }
        SSimplex { vertices, b }.cleaned()
    }

    /// The family `(b_I)` with `b_{{i} ∪ (J+i+1) ∪ {j}} = (b_{i,j})_J`.
    pub fn to_family(&self, s: &Sharp) -> SubsetFamily {
        let mut out = SubsetFamily::new();
        for (&(i, j), v) in &self.b {
            for (&(jm, h), c) in s.family(j - i, self.vertices[i], self.vertices[j], v).iter() {
                let mask = 1 << i | 1 << j | jm << (i + 1);
                out.entry(mask).or_default().add_term(h, c.clone());
            }
        }
        clean(&out)
    }

    pub fn from_family(s: &Sharp, vertices: &[usize], f: &SubsetFamily) -> Result<SSimplex> {
        let n = vertices.len() - 1;
        let mut b = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..=n {
                let mut fam = Family::zero();
                for (&mask, v) in f {
                    if ends(mask) == (i, j) {
                        let jm = (mask & !(1 << i | 1 << j)) >> (i + 1);
                        for (&h, c) in v.iter() {
                            fam.add_term((jm, h), c.clone());
                        }
                    }
                }
                b.insert((i, j), s.from_family(j - i, vertices[i], vertices[j], &fam)?);
            }
        }
        Ok(SSimplex { vertices: vertices.to_vec(), b }.cleaned())
    }

    /// The simplex of `Ũ(T(A))` whose partition components are tensors of the `b_{i,j}`.
    pub fn to_utilde(&self, t: &TensorAlgebra) -> Result<USimplex> {
        let ring = t.host().ring;
        let n = self.dim();
        let mut edges = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..=n {
                let mut out = Comb::zero();
                for p in Partition::enumerate(j - i) {
                    let pts = &p.members;
                    let mut tensor = single(&self.at(i + pts[0], i + pts[1]));
                    for w in pts[1..].windows(2) {
                        tensor = tensor_combs(&tensor, &single(&self.at(i + w[0], i + w[1])));
                    }
                    for (word, c) in tensor.iter() {
                        let g = t.lookup(j - i, &p, word).ok_or_else(|| Error::Invariant("word outside the tensor algebra".into()))?;
                        out.add_term(g, c.clone());
                    }
                }
                if !out.is_zero() {
                    edges.insert((i, j), out);
                }
            }
        }
        let _ = ring;
        Ok(USimplex { vertices: self.vertices.clone(), edges })
    }

    /// The one-letter components of a simplex of `Ũ(T(A))`.
    pub fn from_utilde(t: &TensorAlgebra, u: &USimplex) -> SSimplex {
        let mut b = BTreeMap::new();
        for (&(i, j), v) in &u.edges {
            let triv = Partition::trivial(j - i);
            let letters: Comb<usize> = v.iter().filter(|(g, _)| t.summands[j - i][**g].0 == triv).map(|(g, c)| (t.summands[j - i][*g].1[0], c.clone())).collect();
            b.insert((i, j), letters);
        }
        SSimplex { vertices: u.vertices.clone(), b }.cleaned()
    }
}

/// Everything the comparison `Ũ(N_k^dg(C)) ≅ 𝒮(Γ̃(C)^♯) ≅ N^dg(C)` needs.
pub struct Comparison<'a> {
    pub dg: &'a DGCategory,
    pub sharp: Sharp,
    pub tensor: TensorAlgebra,
}

impl<'a> Comparison<'a> {
    pub fn new(dg: &'a DGCategory) -> Result<Comparison<'a>> {
        let (sharp, tensor) = linear_dg_nerve(dg)?;
        Ok(Comparison { dg, sharp, tensor })
    }

    /// The dg-nerve simplex corresponding to an `𝒮` simplex.
    pub fn to_dg(&self, s: &SSimplex) -> DGNerveSimplex {
        DGNerveSimplex { vertices: s.vertices.clone(), a: bridge_b_to_a(self.dg, &s.vertices, &s.to_family(&self.sharp)) }
    }

    pub fn from_dg(&self, x: &DGNerveSimplex) -> Result<SSimplex> {
        SSimplex::from_family(&self.sharp, &x.vertices, &bridge_a_to_b(self.dg, &x.vertices, &x.a))
    }

    /// Checks one sampled simplex of dimension `n`: the bridge lands in the
    /// dg-nerve, inverts, and commutes with every face and degeneracy, as does
    /// the passage to `Ũ(T(A))`.
    pub fn check_simplex(&self, s: &SSimplex) -> Result<Checked> {
        let (c, a, t) = (self.dg, &self.sharp.monoid, &self.tensor);
        let host = t.host();
        let n = s.dim();
        let d = a.dim();
        let fam = s.to_family(&self.sharp);
        if let Err(w) = s_side_check(c, &s.vertices, &fam) {
            return Ok(Err(w));
        }
        let x = self.to_dg(s);
        if let Err(w) = classical_dg_nerve_check(c, &x) {
            return Ok(Err(w));
        }
        if &self.from_dg(&x)? != s {
            return Ok(Err(Witness::new("bridge round trip", &[n], "", &[])));
        }
        let u = s.to_utilde(t)?;
        if let Err(w) = u.validate(host) {
            return Ok(Err(w));
        }
        if &SSimplex::from_utilde(t, &u) != s {
            return Ok(Err(Witness::new("letter projection round trip", &[n], "", &[])));
        }
        if n >= 1 {
            for l in 0..=n {
                let sf = s.face(a, l);
                if self.to_dg(&sf) != x.face(l) {
                    return Ok(Err(Witness::new("bridge commutes with faces", &[n, l], "", &[])));
                }
                if SSimplex::from_utilde(t, &u.face(host, l)) != sf {
                    return Ok(Err(Witness::new("letter projection commutes with faces", &[n, l], "", &[])));
                }
            }
        }
        if n < d {
            for l in 0..=n {
                let sd = s.degen(a, l);
                if self.to_dg(&sd) != x.degen(c, l) {
                    return Ok(Err(Witness::new("bridge commutes with degeneracies", &[n, l], "", &[])));
                }
                if SSimplex::from_utilde(t, &u.degen(host, l)) != sd {
                    return Ok(Err(Witness::new("letter projection commutes with degeneracies", &[n, l], "", &[])));
                }
            }
        }
        Ok(Ok(()))
    }
}

fn complex(ring: Ring, dim: usize, labels: &[&[&str]], boundary: &[(usize, usize, &[(usize, i64)])]) -> ChainComplex {
    let mut all: Vec<Vec<String>> = labels.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect();
    all.resize(dim + 1, Vec::new());
    let mut d: Vec<Vec<Comb<usize>>> = all.iter().map(|l| vec![Comb::zero(); l.len()]).collect();
    for &(n, g, terms) in boundary {
        for &(h, c) in terms {
            d[n][g].add_term(h, ring.from_i64(c));
        }
    }
    ChainComplex { ring, labels: all, d }
}

/// One object, `C_0 = ⟨id, e⟩`, `C_1 = ⟨h⟩`, `∂h = e`, all other composites zero.
pub fn dg_contractible_loop(ring: Ring, dim: usize) -> DGCategory {
    let h = complex(ring, dim, &[&["id", "e"], &["h"]], &[(1, 0, &[(1, 1)])]);
    let mut c = DGCategory::new(ring, vec!["x".into()], dim, BTreeMap::from([((0, 0), h)])).expect("fixture");
    c.set_basis_units(&[0]);
    c
}

/// `ι` of the free linear category on `0 -> 1`.
pub fn dg_interval(ring: Ring, dim: usize) -> DGCategory {
    include_degree_zero(&LinearCategory::free(&crate::simplicial::FinCategory::poset(1), ring), dim)
}

/// Objects `x, y`; `C(x,y)` has `C_0 = ⟨f, g⟩`, `C_1 = ⟨h⟩`, `∂h = f - g`.
pub fn dg_homotopy(ring: Ring, dim: usize) -> DGCategory {
    let unit = |name: &str| complex(ring, dim, &[&[name]], &[]);
    let hom = BTreeMap::from([((0, 0), unit("idx")), ((1, 1), unit("idy")), ((0, 1), complex(ring, dim, &[&["f", "g"], &["h"]], &[(1, 0, &[(0, 1), (1, -1)])]))]);
    let mut c = DGCategory::new(ring, vec!["x".into(), "y".into()], dim, hom).expect("fixture");
    c.set_basis_units(&[0, 0]);
    c
}

/// One object with `C_0 = ⟨id⟩`, `C_1 = ⟨s⟩`, `C_2 = ⟨t⟩`, zero differential and `s ∘ s = t`.
pub fn dg_square(ring: Ring, dim: usize) -> DGCategory {
    let h = complex(ring, dim, &[&["id"], &["s"], &["t"]], &[]);
    let mut c = DGCategory::new(ring, vec!["x".into()], dim, BTreeMap::from([((0, 0), h)])).expect("fixture");
    c.set_basis_units(&[0]);
    if dim >= 2 {
        c.set((0, 0, 0), (1, 1), (0, 0), Comb::basis(0, ring));
    }
    c
}

/// All dg fixtures by name.
pub fn dg_fixtures(ring: Ring, dim: usize) -> Vec<(&'static str, DGCategory)> {
    vec![("contractible-loop", dg_contractible_loop(ring, dim)), ("interval", dg_interval(ring, dim)), ("homotopy", dg_homotopy(ring, dim)), ("square", dg_square(ring, dim))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures_are_dg_categories() {
        for (name, c) in dg_fixtures(Ring::Q, 3) {
            c.check().unwrap_or_else(|w| panic!("{name}: {w:?}"));
            sharp(&c).unwrap().monoid.check().unwrap_or_else(|w| panic!("{name}: {w:?}"));
        }
    }

    #[test]
    fn h_zero_of_contractible_loop() {
        let h = dg_contractible_loop(Ring::Q, 2).h_zero().unwrap();
        assert_eq!(h.category.arrows.len(), 1);
    }

    #[test]
    fn comparison_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (name, c) in dg_fixtures(Ring::Q, 2) {
            let cmp = Comparison::new(&c).unwrap();
            for n in 0..=3 {
                let s = SSimplex::random(&cmp.sharp.monoid, n, 2, &mut rng);
                cmp.check_simplex(&s).unwrap().unwrap_or_else(|w| panic!("{name} n={n}: {w:?}"));
            }
        }
    }

    #[test]
    fn equivalence_checks() {
        for (name, c) in dg_fixtures(Ring::Q, 2) {
            check_normalized_kernel(&c).unwrap().unwrap_or_else(|w| panic!("{name}: {w:?}"));
            check_homotopy_category(&c).unwrap().unwrap_or_else(|w| panic!("{name}: {w:?}"));
        }
        let a = LinearCategory::free(&crate::simplicial::FinCategory::poset(2), Ring::Q);
        check_nerve_of_inclusion(&a, 2).unwrap().unwrap();
    }

    #[test]
    fn comparison_at_dimension_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (name, c) in dg_fixtures(Ring::Q, 3) {
            let cmp = Comparison::new(&c).unwrap();
            let s = SSimplex::random(&cmp.sharp.monoid, 4, 2, &mut rng);
            cmp.check_simplex(&s).unwrap().unwrap_or_else(|w| panic!("{name}: {w:?}"));
        }
    }
}
