//! Finite simplicial sets truncated at a fixed dimension.
//!
//! A [`SimplicialSet`] stores every simplex of dimension at most `dim`
//! (degenerate ones included) together with full face and degeneracy
//! tables. All builders go through [`SimplicialSet::from_action`], which
//! only needs a list of simplices per level and the action of monotone maps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::intervals::Mor;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSet {
    pub dim: usize,
    pub names: Vec<Vec<String>>,
    /// `faces[n][i][x] = d_i x` for `n ≥ 1`.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degens[n][i][x] = s_i x` for `n < dim`.
    pub degens: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<String, usize>>,
}

/// A horn or wedge that could not be extended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HornWitness {
    pub n: usize,
    pub k: Option<usize>,
    /// Names of the given faces, `None` at the missing positions.
    pub faces: Vec<Option<String>>,
}

impl std::fmt::Display for HornWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.faces.iter().map(|x| x.clone().unwrap_or_else(|| "_".into())).collect();
        match self.k {
            Some(k) => write!(f, "horn({},{}) [{}]", self.n, k, parts.join(", ")),
            None => write!(f, "wedge({}) [{}]", self.n, parts.join(", ")),
        }
    }
}

impl SimplicialSet {
    /// Builds a simplicial set from its simplices per level and the action
    /// `act(x, θ) = X(θ)(x)` of monotone maps. Each level is sorted by name.
    pub fn from_action<K>(
        dim: usize,
        levels: Vec<Vec<K>>,
        name: impl Fn(&K) -> String,
        act: impl Fn(&K, &Mor) -> K,
    ) -> Result<SimplicialSet>
    where
        K: Clone + Eq + Hash,
    {
        if levels.len() != dim + 1 {
            return Err(Error::Contract(format!("expected {} levels, got {}", dim + 1, levels.len())));
        }
        let mut keyed: Vec<Vec<(String, K)>> = levels
            .into_iter()
            .map(|l| {
                let mut v: Vec<(String, K)> = l.into_iter().map(|k| (name(&k), k)).collect();
                v.sort_by(|a, b| a.0.cmp(&b.0));
                v
            })
            .collect();
        for (n, l) in keyed.iter_mut().enumerate() {
            let before = l.len();
            l.dedup_by(|a, b| a.0 == b.0);
            if l.len() != before {
                return Err(Error::Contract(format!("duplicate simplex names in level {n}")));
            }
        }
        let index: Vec<HashMap<K, usize>> =
            keyed.iter().map(|l| l.iter().enumerate().map(|(i, (_, k))| (k.clone(), i)).collect()).collect();
        let find = |n: usize, k: &K| -> Result<usize> {
            index[n].get(k).cloned().ok_or_else(|| Error::Contract(format!("level {n} is not closed under the action")))
        };
        let mut faces = vec![Vec::new()];
        for n in 1..=dim {
            let mut per = Vec::new();
            for i in 0..=n {
                let d = Mor::delta(n, i);
                per.push(keyed[n].iter().map(|(_, k)| find(n - 1, &act(k, &d))).collect::<Result<Vec<_>>>()?);
            }
            faces.push(per);
        }
        let mut degens = Vec::new();
        for n in 0..dim {
            let mut per = Vec::new();
            for i in 0..=n {
                let s = Mor::sigma(n, i);
                per.push(keyed[n].iter().map(|(_, k)| find(n + 1, &act(k, &s))).collect::<Result<Vec<_>>>()?);
            }
            degens.push(per);
        }
        let names: Vec<Vec<String>> = keyed.into_iter().map(|l| l.into_iter().map(|(s, _)| s).collect()).collect();
        let lookup = names.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        Ok(SimplicialSet { dim, names, faces, degens, lookup })
    }

    /// Builds from explicit tables, validating the simplicial identities.
    pub fn from_tables(
        names: Vec<Vec<String>>,
        faces: Vec<Vec<Vec<usize>>>,
        degens: Vec<Vec<Vec<usize>>>,
    ) -> Result<SimplicialSet> {
        if names.is_empty() {
            return Err(Error::Contract("a simplicial set needs level 0".into()));
        }
        let dim = names.len() - 1;
        let lookup: Vec<HashMap<String, usize>> =
            names.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        for (n, l) in lookup.iter().enumerate() {
            if l.len() != names[n].len() {
                return Err(Error::Contract(format!("duplicate simplex names in level {n}")));
            }
        }
        let x = SimplicialSet { dim, names, faces, degens, lookup };
        x.check_shapes()?;
        x.check_identities()?;
        Ok(x)
    }

    fn check_shapes(&self) -> Result<()> {
        let bad = || Error::Contract("face or degeneracy table has the wrong shape".into());
        if self.faces.len() != self.dim + 1 || self.degens.len() != self.dim {
            return Err(bad());
        }
        for n in 1..=self.dim {
            if self.faces[n].len() != n + 1 {
                return Err(bad());
            }
            for t in &self.faces[n] {
                if t.len() != self.count(n) || t.iter().any(|&y| y >= self.count(n - 1)) {
                    return Err(bad());
                }
            }
        }
        for n in 0..self.dim {
            if self.degens[n].len() != n + 1 {
                return Err(bad());
            }
            for t in &self.degens[n] {
                if t.len() != self.count(n) || t.iter().any(|&y| y >= self.count(n + 1)) {
                    return Err(bad());
                }
            }
        }
        Ok(())
    }

    pub fn count(&self, n: usize) -> usize {
        self.names[n].len()
    }

    pub fn name(&self, n: usize, x: usize) -> &str {
        &self.names[n][x]
    }

    pub fn index_of(&self, n: usize, name: &str) -> Option<usize> {
        self.lookup.get(n)?.get(name).cloned()
    }

    pub fn face(&self, n: usize, i: usize, x: usize) -> usize {
        self.faces[n][i][x]
    }

    pub fn degen(&self, n: usize, i: usize, x: usize) -> usize {
        self.degens[n][i][x]
    }

    /// `X(θ)(x)` for `θ: [m] -> [n]` and `x ∈ X_n`.
    pub fn apply(&self, theta: &Mor, x: usize) -> usize {
        let (deltas, sigmas) = theta.normal_form();
        let mut n = theta.n;
        let mut y = x;
        for &i in &deltas {
            y = self.faces[n][i][y];
            n -= 1;
        }
        for &j in &sigmas {
            y = self.degens[n][j][y];
            n += 1;
        }
        y
    }

    pub fn vertex(&self, n: usize, x: usize, k: usize) -> usize {
        self.apply(&Mor { n, values: vec![k] }, x)
    }

    pub fn vertices(&self, n: usize, x: usize) -> Vec<usize> {
        (0..=n).map(|k| self.vertex(n, x, k)).collect()
    }

    pub fn first_vertex(&self, n: usize, x: usize) -> usize {
        self.vertex(n, x, 0)
    }

    pub fn last_vertex(&self, n: usize, x: usize) -> usize {
        self.vertex(n, x, n)
    }

    /// Front face `X([0..k])(x)`.
    pub fn front(&self, n: usize, x: usize, k: usize) -> usize {
        self.apply(&Mor { n, values: (0..=k).collect() }, x)
    }

    /// Back face `X([k..n])(x)`.
    pub fn back(&self, n: usize, x: usize, k: usize) -> usize {
        self.apply(&Mor { n, values: (k..=n).collect() }, x)
    }

    pub fn is_degenerate(&self, n: usize, x: usize) -> bool {
        n > 0 && (0..n).any(|i| self.degens[n - 1][i][self.faces[n][i][x]] == x)
    }

    pub fn nondegenerate(&self, n: usize) -> Vec<usize> {
        (0..self.count(n)).filter(|&x| !self.is_degenerate(n, x)).collect()
    }

    pub fn nondegenerate_counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|n| self.nondegenerate(n).len()).collect()
    }

    /// Eilenberg–Zilber decomposition `x = X(σ)(y)` with `y` nondegenerate.
    pub fn ez_decomposition(&self, n: usize, x: usize) -> (Mor, usize, usize) {
        let mut sigma = Mor::identity(n);
        let (mut m, mut y) = (n, x);
        'outer: loop {
            for i in 0..m {
                let z = self.faces[m][i][y];
                if self.degens[m - 1][i][z] == y {
                    // y = s_i z, so x = X(σ)(s_i z) = X(σ_i ∘ σ)(z).
                    sigma = Mor::sigma(m - 1, i).compose(&sigma);
                    m -= 1;
                    y = z;
                    continue 'outer;
                }
            }
            return (sigma, m, y);
        }
    }

    /// Checks every simplicial identity between stored maps.
    pub fn check_identities(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Invariant(what));
        for n in 2..=self.dim {
            for x in 0..self.count(n) {
                for j in 1..=n {
                    for i in 0..j {
                        if self.faces[n - 1][i][self.faces[n][j][x]] != self.faces[n - 1][j - 1][self.faces[n][i][x]] {
                            return fail(format!("d{i} d{j} = d{} d{i} fails on {}", j - 1, self.names[n][x]));
                        }
                    }
                }
            }
        }
        for n in 0..self.dim {
            for x in 0..self.count(n) {
                for j in 0..=n {
                    let sx = self.degens[n][j][x];
                    for i in 0..=n + 1 {
                        let lhs = self.faces[n + 1][i][sx];
                        let rhs = if i < j {
                            self.degens[n - 1][j - 1][self.faces[n][i][x]]
                        } else if i == j || i == j + 1 {
                            x
                        } else {
                            self.degens[n - 1][j][self.faces[n][i - 1][x]]
                        };
                        if lhs != rhs {
                            return fail(format!("d{i} s{j} fails on {}", self.names[n][x]));
                        }
                    }
                    if n + 1 < self.dim {
                        for i in 0..=j {
                            if self.degens[n + 1][i][sx] != self.degens[n + 1][j + 1][self.degens[n][i][x]] {
                                return fail(format!("s{i} s{j} fails on {}", self.names[n][x]));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The same simplicial set cut down to a smaller truncation.
    pub fn truncate(&self, dim: usize) -> SimplicialSet {
        let dim = dim.min(self.dim);
        SimplicialSet {
            dim,
            names: self.names[..=dim].to_vec(),
            faces: self.faces[..=dim].to_vec(),
            degens: self.degens[..dim].to_vec(),
            lookup: self.lookup[..=dim].to_vec(),
        }
    }

    fn face_index(&self, n: usize) -> Vec<HashMap<usize, Vec<usize>>> {
        (0..=n)
            .map(|i| {
                let mut m: HashMap<usize, Vec<usize>> = HashMap::new();
                for x in 0..self.count(n) {
                    m.entry(self.faces[n][i][x]).or_default().push(x);
                }
                m
            })
            .collect()
    }

    /// All compatible families `(y_i)_{i ∈ positions}` of `(n-1)`-simplices with
    /// `d_i y_j = d_{j-1} y_i` for `i < j`.
    fn compatible_families(&self, n: usize, positions: &[usize]) -> Vec<Vec<usize>> {
        let idx = self.face_index(n - 1);
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        self.extend_family(n, positions, &idx, &mut cur, &mut out);
        out
    }

    fn extend_family(
        &self,
        n: usize,
        positions: &[usize],
        idx: &[HashMap<usize, Vec<usize>>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let t = cur.len();
        if t == positions.len() {
            out.push(cur.clone());
            return;
        }
        let j = positions[t];
        let candidates: Vec<usize> = if t == 0 {
            (0..self.count(n - 1)).collect()
        } else {
            let i = positions[0];
            let v = self.face(n - 1, j - 1, cur[0]);
            idx[i].get(&v).cloned().unwrap_or_default()
        };
        'cand: for y in candidates {
            for (s, &i) in positions[..t].iter().enumerate() {
                if self.face(n - 1, i, y) != self.face(n - 1, j - 1, cur[s]) {
                    continue 'cand;
                }
            }
            cur.push(y);
            self.extend_family(n, positions, idx, cur, out);
            cur.pop();
        }
    }

    /// The `n`-simplices whose faces at `positions` are the given family,
    /// ordered by name.
    pub fn fillers(&self, n: usize, positions: &[usize], family: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.count(n))
            .filter(|&z| positions.iter().zip(family).all(|(&i, &y)| self.face(n, i, z) == y))
            .collect();
        out.sort_by(|a, b| self.names[n][*a].cmp(&self.names[n][*b]));
        out
    }

    /// All horns `Λ^n_k -> X`, each given by its faces at positions `i ≠ k`.
    pub fn horns(&self, n: usize, k: usize) -> Vec<Vec<usize>> {
        let positions: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        self.compatible_families(n, &positions)
    }

    fn horn_witness(&self, n: usize, k: Option<usize>, positions: &[usize], family: &[usize]) -> HornWitness {
        let mut faces = vec![None; n + 1];
        for (&i, &y) in positions.iter().zip(family) {
            faces[i] = Some(self.names[n - 1][y].clone());
        }
        HornWitness { n, k, faces }
    }

    /// Searches for an inner horn with `n ≤ dmax` that has no filler.
    pub fn first_unfillable_inner_horn(&self, dmax: usize) -> Result<Option<HornWitness>> {
        if dmax > self.dim {
            return Err(Error::Contract(format!("horns of dimension {dmax} exceed the truncation {}", self.dim)));
        }
        for n in 2..=dmax {
            let idx = self.face_index(n);
            for k in 1..n {
                let positions: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
                for fam in self.compatible_families(n, &positions) {
                    let i0 = positions[0];
                    let found = idx[i0]
                        .get(&fam[0])
                        .map(|c| c.iter().any(|&z| positions.iter().zip(&fam).all(|(&i, &y)| self.face(n, i, z) == y)))
                        .unwrap_or(false);
                    if !found {
                        return Ok(Some(self.horn_witness(n, Some(k), &positions, &fam)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_quasi_category_up_to(&self, dmax: usize) -> Result<bool> {
        Ok(self.first_unfillable_inner_horn(dmax)?.is_none())
    }

    /// Searches for a wedge `W^n -> X` with `2 ≤ n ≤ nmax` that does not extend.
    pub fn first_unliftable_wedge(&self, nmax: usize) -> Result<Option<HornWitness>> {
        if nmax > self.dim {
            return Err(Error::Contract(format!("wedges of dimension {nmax} exceed the truncation {}", self.dim)));
        }
        for n in 2..=nmax {
            let positions = vec![0, n];
            let idx = self.face_index(n);
            for fam in self.compatible_families(n, &positions) {
                let found = idx[0]
                    .get(&fam[0])
                    .map(|c| c.iter().any(|&z| self.face(n, n, z) == fam[1]))
                    .unwrap_or(false);
                if !found {
                    return Ok(Some(self.horn_witness(n, None, &positions, &fam)));
                }
            }
        }
        Ok(None)
    }

    /// Splits every level by first and last vertex.
    pub fn as_templicial_set(&self) -> PartitionedSet {
        let levels = (0..=self.dim)
            .map(|n| {
                let mut m: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
                for x in 0..self.count(n) {
                    m.entry((self.first_vertex(n, x), self.last_vertex(n, x))).or_default().push(x);
                }
                m
            })
            .collect();
        PartitionedSet { vertices: self.count(0), levels }
    }

    pub fn to_fixture(&self) -> SimplicialFixture {
        let key = |n: usize| n.to_string();
        let mut simplices = BTreeMap::new();
        let mut faces = BTreeMap::new();
        let mut degeneracies = BTreeMap::new();
        for n in 0..=self.dim {
            simplices.insert(key(n), self.names[n].clone());
            if n >= 1 {
                let mut m = BTreeMap::new();
                for x in 0..self.count(n) {
                    m.insert(self.names[n][x].clone(), (0..=n).map(|i| self.names[n - 1][self.faces[n][i][x]].clone()).collect());
                }
                faces.insert(key(n), m);
            }
            if n < self.dim {
                let mut m = BTreeMap::new();
                for x in 0..self.count(n) {
                    m.insert(self.names[n][x].clone(), (0..=n).map(|i| self.names[n + 1][self.degens[n][i][x]].clone()).collect());
                }
                degeneracies.insert(key(n), m);
            }
        }
        SimplicialFixture { dims: self.dim, simplices, faces, degeneracies }
    }

    pub fn from_fixture(f: &SimplicialFixture) -> Result<SimplicialSet> {
        let dim = f.dims;
        let mut names = Vec::new();
        for n in 0..=dim {
            names.push(f.simplices.get(&n.to_string()).cloned().ok_or_else(|| Error::Parse(format!("missing level {n}")))?);
        }
        let lookup: Vec<HashMap<&str, usize>> =
            names.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()).collect();
        let table = |src: &BTreeMap<String, BTreeMap<String, Vec<String>>>, n: usize, to: usize| -> Result<Vec<Vec<usize>>> {
            let m = src.get(&n.to_string()).ok_or_else(|| Error::Parse(format!("missing table for level {n}")))?;
            let mut per = vec![vec![0; names[n].len()]; n + 1];
            for (x, name) in names[n].iter().enumerate() {
                let row = m.get(name).ok_or_else(|| Error::Parse(format!("no entry for {name}")))?;
                if row.len() != n + 1 {
                    return Err(Error::Parse(format!("entry for {name} has {} items", row.len())));
                }
                for (i, t) in row.iter().enumerate() {
                    per[i][x] = *lookup[to].get(t.as_str()).ok_or_else(|| Error::Parse(format!("unknown simplex {t}")))?;
                }
            }
            Ok(per)
        };
        let mut faces = vec![Vec::new()];
        for n in 1..=dim {
            faces.push(table(&f.faces, n, n - 1)?);
        }
        let mut degens = Vec::new();
        for n in 0..dim {
            degens.push(table(&f.degeneracies, n, n + 1)?);
        }
        SimplicialSet::from_tables(names, faces, degens)
    }
}

/// JSON form of a simplicial set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialFixture {
    pub dims: usize,
    pub simplices: BTreeMap<String, Vec<String>>,
    pub faces: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    pub degeneracies: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

/// A simplicial set with each level split by (first vertex, last vertex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedSet {
    pub vertices: usize,
    pub levels: Vec<BTreeMap<(usize, usize), Vec<usize>>>,
}

impl PartitionedSet {
    pub fn get(&self, n: usize, a: usize, b: usize) -> &[usize] {
        self.levels[n].get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// The disjoint union of all pieces of each level, in simplex order.
    pub fn flatten(&self) -> Vec<Vec<usize>> {
        self.levels
            .iter()
            .map(|m| {
                let mut all: Vec<usize> = m.values().flatten().cloned().collect();
                all.sort_unstable();
                all
            })
            .collect()
    }
}

/// Structure-preserving level maps between simplicial sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub levels: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn check(&self, src: &SimplicialSet, tgt: &SimplicialSet) -> Result<()> {
        let dim = src.dim.min(tgt.dim);
        for n in 0..=dim {
            if self.levels[n].len() != src.count(n) {
                return Err(Error::Contract(format!("level {n} of the map has the wrong length")));
            }
            for x in 0..src.count(n) {
                let fx = self.levels[n][x];
                if n >= 1 {
                    for i in 0..=n {
                        if self.levels[n - 1][src.face(n, i, x)] != tgt.face(n, i, fx) {
                            return Err(Error::Invariant(format!("map does not commute with d{i} at {}", src.name(n, x))));
                        }
                    }
                }
                if n < dim {
                    for i in 0..=n {
                        if self.levels[n + 1][src.degen(n, i, x)] != tgt.degen(n, i, fx) {
                            return Err(Error::Invariant(format!("map does not commute with s{i} at {}", src.name(n, x))));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nondecreasing vertex sequences supported on faces of an ordered complex.
pub fn ordered_complex(dim: usize, vertex_names: &[String], maximal: &[Vec<usize>]) -> Result<SimplicialSet> {
    let mut levels = Vec::new();
    for n in 0..=dim {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        for face in maximal {
            let mut cur = Vec::with_capacity(n + 1);
            seqs(face, n + 1, 0, &mut cur, &mut set);
        }
        levels.push(set.into_iter().collect());
    }
    let name = |v: &Vec<usize>| {
        if v.len() == 1 {
            return vertex_names[v[0]].clone();
        }
        format!("[{}]", v.iter().map(|&i| vertex_names[i].clone()).collect::<Vec<_>>().join(","))
    };
    SimplicialSet::from_action(dim, levels, name, |v: &Vec<usize>, th: &Mor| th.values.iter().map(|&i| v[i]).collect())
}

fn seqs(face: &[usize], len: usize, from: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
    if cur.len() == len {
        out.insert(cur.clone());
        return;
    }
    for p in from..face.len() {
        cur.push(face[p]);
        seqs(face, len, p, cur, out);
        cur.pop();
    }
}

fn vertex_labels(n: usize) -> Vec<String> {
    (0..=n).map(|i| i.to_string()).collect()
}

fn faces_of_simplex(n: usize, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    (0..=n).filter(|&i| keep(i)).map(|i| (0..=n).filter(|&v| v != i).collect()).collect()
}

/// `Δ^n` truncated at `dim`.
pub fn standard_simplex(n: usize, dim: usize) -> SimplicialSet {
    ordered_complex(dim, &vertex_labels(n), &[(0..=n).collect()]).expect("standard simplex")
}

/// `Λ^n_k`.
pub fn horn(n: usize, k: usize, dim: usize) -> Result<SimplicialSet> {
    if k > n || n == 0 {
        return Err(Error::Contract(format!("no horn Λ^{n}_{k}")));
    }
    ordered_complex(dim, &vertex_labels(n), &faces_of_simplex(n, |i| i != k))
}

/// `∂Δ^n`.
pub fn boundary(n: usize, dim: usize) -> Result<SimplicialSet> {
    if n == 0 {
        return Err(Error::Contract("Δ^0 has empty boundary".into()));
    }
    ordered_complex(dim, &vertex_labels(n), &faces_of_simplex(n, |_| true))
}

/// The wedge `W^n`, the union of the faces `d_0` and `d_n` of `Δ^n`.
pub fn wedge(n: usize, dim: usize) -> Result<SimplicialSet> {
    if n < 2 {
        return Err(Error::Contract("wedges need n ≥ 2".into()));
    }
    ordered_complex(dim, &vertex_labels(n), &faces_of_simplex(n, |i| i == 0 || i == n))
}

/// A cell of a simplicial set presented by nondegenerate cells. Each face
/// `d_i` of a `k`-cell is `X(σ)(c)` for a cell `c` and a surjection `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub dim: usize,
    pub faces: Vec<(String, Vec<usize>)>,
    /// Vertex labels, used for naming degeneracies of simplex-like cells.
    pub vertices: Option<Vec<String>>,
}

impl Cell {
    pub fn vertex(name: &str) -> Cell {
        Cell { name: name.into(), dim: 0, faces: vec![], vertices: None }
    }

    /// A cell whose faces are all nondegenerate cells.
    pub fn new(name: &str, faces: &[&str]) -> Cell {
        let dim = faces.len() - 1;
        let faces = faces.iter().map(|f| (f.to_string(), (0..dim).collect())).collect();
        Cell { name: name.into(), dim, faces, vertices: None }
    }
}

/// The simplex `[v0,…,vk]` named by its vertex list, faces named likewise.
pub fn simplex_cell(vertices: &[&str]) -> Cell {
    let label = |vs: &[&str]| format!("[{}]", vs.join(","));
    let k = vertices.len() - 1;
    let faces = if k == 0 {
        vec![]
    } else {
        (0..=k)
            .map(|i| {
                let rest: Vec<&str> = vertices.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                let name = if rest.len() == 1 { rest[0].to_string() } else { label(&rest) };
                (name, (0..k).collect())
            })
            .collect()
    };
    let name = if k == 0 { vertices[0].to_string() } else { label(vertices) };
    Cell { name, dim: k, faces, vertices: Some(vertices.iter().map(|s| s.to_string()).collect()) }
}

/// All simplices `[v0..vk]` with `k ≥ 0` spanned by the given vertex lists.
pub fn simplex_cells(tops: &[&[&str]]) -> Vec<Cell> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for top in tops {
        let k = top.len();
        for mask in 1u32..(1 << k) {
            let vs: Vec<&str> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| top[i]).collect();
            if seen.insert(vs.clone()) {
                out.push(simplex_cell(&vs));
            }
        }
    }
    out
}

/// Simplicial set generated by cells (Eilenberg–Zilber presentation).
pub fn from_cells(dim: usize, cells: &[Cell]) -> Result<SimplicialSet> {
    let index: HashMap<&str, usize> = cells.iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
    if index.len() != cells.len() {
        return Err(Error::Contract("duplicate cell names".into()));
    }
    // Resolved face table: faces[c][i] = (cell, surjection).
    let mut faces: Vec<Vec<(usize, Mor)>> = Vec::new();
    for c in cells {
        if c.faces.len() != if c.dim == 0 { 0 } else { c.dim + 1 } {
            return Err(Error::Contract(format!("cell {} has {} faces", c.name, c.faces.len())));
        }
        let mut per = Vec::new();
        for (f, s) in &c.faces {
            let &fi = index.get(f.as_str()).ok_or_else(|| Error::Contract(format!("unknown cell {f}")))?;
            let sur = Mor::new(s.clone(), cells[fi].dim)?;
            if sur.m() + 1 != c.dim || !sur.is_surjective() {
                return Err(Error::Contract(format!("face {f} of {} has a bad degeneracy", c.name)));
            }
            per.push((fi, sur));
        }
        faces.push(per);
    }
    let act = |key: &(usize, Mor), theta: &Mor| act_cell(&faces, key, theta);
    let mut levels: Vec<Vec<(usize, Mor)>> = Vec::new();
    for n in 0..=dim {
        let mut l = Vec::new();
        for (ci, c) in cells.iter().enumerate() {
            if c.dim <= n {
                for s in crate::intervals::monotone_maps(n, c.dim) {
                    if s.is_surjective() {
                        l.push((ci, s));
                    }
                }
            }
        }
        levels.push(l);
    }
    let name = |key: &(usize, Mor)| {
        let c = &cells[key.0];
        if key.1.m() == c.dim {
            return c.name.clone();
        }
        match &c.vertices {
            Some(vs) => format!("[{}]", key.1.values.iter().map(|&i| vs[i].clone()).collect::<Vec<_>>().join(",")),
            None => format!("{}{}", c.name, key.1),
        }
    };
    let x = SimplicialSet::from_action(dim, levels, name, act)?;
    x.check_identities()?;
    Ok(x)
}

fn act_cell(faces: &[Vec<(usize, Mor)>], key: &(usize, Mor), theta: &Mor) -> (usize, Mor) {
    let rho = key.1.compose(theta);
    let (epi, mono) = rho.epi_mono();
    if mono.m() == mono.n {
        return (key.0, epi);
    }
    let im = mono.image();
    let i = (0..=mono.n).rev().find(|v| !im.contains(v)).unwrap();
    let rest = Mor { n: mono.n - 1, values: mono.values.iter().map(|&v| if v > i { v - 1 } else { v }).collect() };
    let (c2, s2) = act_cell(faces, &faces[key.0][i], &rest);
    (c2, s2.compose(&epi))
}

/// A finite category with diagrammatic composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    pub objects: Vec<String>,
    /// `(name, source, target)`.
    pub morphisms: Vec<(String, usize, usize)>,
    pub identities: Vec<usize>,
    /// `compose[(f, g)]` is `g ∘ f` for `f: a -> b`, `g: b -> c`.
    pub compose: HashMap<(usize, usize), usize>,
}

impl FinCategory {
    /// The poset `[n]` as a category.
    pub fn poset(n: usize) -> FinCategory {
        let objects: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let mut morphisms = Vec::new();
        let mut idx = HashMap::new();
        for a in 0..=n {
            for b in a..=n {
                idx.insert((a, b), morphisms.len());
                let name = if a == b { format!("id{a}") } else { format!("{a}{b}") };
                morphisms.push((name, a, b));
            }
        }
        let identities = (0..=n).map(|a| idx[&(a, a)]).collect();
        let mut compose = HashMap::new();
        for a in 0..=n {
            for b in a..=n {
                for c in b..=n {
                    compose.insert((idx[&(a, b)], idx[&(b, c)]), idx[&(a, c)]);
                }
            }
        }
        FinCategory { objects, morphisms, identities, compose }
    }

    /// The one-object category with only the identity.
    pub fn point() -> FinCategory {
        FinCategory::poset(0)
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&f| self.morphisms[f].1 == a && self.morphisms[f].2 == b).collect()
    }

    /// Composite of a path of morphisms starting at `a`.
    pub fn compose_path(&self, a: usize, path: &[usize]) -> usize {
        path.iter().fold(self.identities[a], |acc, &f| self.compose[&(acc, f)])
    }

    /// Exhaustive check of typing, unit and associativity laws.
    pub fn check_laws(&self) -> Result<()> {
        let m = self.morphisms.len();
        for f in 0..m {
            let (_, a, b) = self.morphisms[f];
            if self.compose.get(&(self.identities[a], f)) != Some(&f) || self.compose.get(&(f, self.identities[b])) != Some(&f) {
                return Err(Error::Invariant(format!("unit law fails at {}", self.morphisms[f].0)));
            }
            for g in self.hom_from(b) {
                let fg = *self.compose.get(&(f, g)).ok_or_else(|| Error::Invariant("missing composite".into()))?;
                if self.morphisms[fg].1 != a || self.morphisms[fg].2 != self.morphisms[g].2 {
                    return Err(Error::Invariant("composite has the wrong type".into()));
                }
                for h in self.hom_from(self.morphisms[g].2) {
                    let gh = self.compose[&(g, h)];
                    if self.compose[&(fg, h)] != self.compose[&(f, gh)] {
                        return Err(Error::Invariant("associativity fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn hom_from(&self, a: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&f| self.morphisms[f].1 == a).collect()
    }

    /// Composable chains `(objects, morphisms)` of length `n`.
    pub fn chains(&self, n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out: Vec<(Vec<usize>, Vec<usize>)> = (0..self.objects.len()).map(|a| (vec![a], vec![])).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for (objs, mors) in &out {
                let last = *objs.last().unwrap();
                for f in self.hom_from(last) {
                    let mut o = objs.clone();
                    o.push(self.morphisms[f].2);
                    let mut m = mors.clone();
                    m.push(f);
                    next.push((o, m));
                }
            }
            out = next;
        }
        out
    }

    /// Whether two categories agree up to renaming that preserves order of objects
    /// and matches morphisms by the bijection `iso`.
    pub fn is_iso_via(&self, other: &FinCategory, iso: &[usize]) -> bool {
        if self.morphisms.len() != other.morphisms.len() || self.objects.len() != other.objects.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for f in 0..self.morphisms.len() {
            let g = iso[f];
            if !seen.insert(g) || self.morphisms[f].1 != other.morphisms[g].1 || self.morphisms[f].2 != other.morphisms[g].2 {
                return false;
            }
        }
        self.identities.iter().zip(&other.identities).all(|(&a, &b)| iso[a] == b)
            && self.compose.iter().all(|(&(f, g), &h)| other.compose.get(&(iso[f], iso[g])) == Some(&iso[h]))
    }
}

/// The nerve of a finite category, truncated at `dim`.
pub fn nerve(c: &FinCategory, dim: usize) -> Result<SimplicialSet> {
    let levels = (0..=dim).map(|n| c.chains(n)).collect();
    let name = |k: &(Vec<usize>, Vec<usize>)| {
        if k.1.is_empty() {
            c.objects[k.0[0]].clone()
        } else {
            k.1.iter().map(|&f| c.morphisms[f].0.clone()).collect::<Vec<_>>().join("|")
        }
    };
    let act = |k: &(Vec<usize>, Vec<usize>), th: &Mor| {
        let objs: Vec<usize> = th.values.iter().map(|&i| k.0[i]).collect();
        let mors = (0..th.m()).map(|a| c.compose_path(k.0[th.values[a]], &k.1[th.values[a]..th.values[a + 1]])).collect();
        (objs, mors)
    };
    SimplicialSet::from_action(dim, levels, name, act)
}

/// The homotopy category of a quasi-category, morphisms named by the least
/// representative edge.
pub fn homotopy_category(x: &SimplicialSet) -> Result<(FinCategory, Vec<usize>)> {
    if x.dim < 3 {
        return Err(Error::Contract("the homotopy category needs simplices up to dimension 3".into()));
    }
    if let Some(w) = x.first_unfillable_inner_horn(3)? {
        return Err(Error::Refused(format!("not a quasi-category: {w}")));
    }
    let edges = x.count(1);
    // Union-find over the left homotopy relation.
    let mut parent: Vec<usize> = (0..edges).collect();
    fn root(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for w in 0..x.count(2) {
        let a = x.vertex(2, w, 0);
        if x.face(2, 2, w) == x.degen(0, 0, a) {
            let (f, g) = (x.face(2, 0, w), x.face(2, 1, w));
            let (rf, rg) = (root(&mut parent, f), root(&mut parent, g));
            if rf != rg {
                parent[rf.max(rg)] = rf.min(rg);
            }
        }
    }
    let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class_of = vec![0; edges];
    let mut by_name: Vec<usize> = (0..edges).collect();
    by_name.sort_by(|a, b| x.name(1, *a).cmp(x.name(1, *b)));
    for &e in &by_name {
        let r = root(&mut parent, e);
        let next = reps.len();
        let c = *reps.entry(r).or_insert(next);
        class_of[e] = c;
    }
    let mut morphisms = vec![(String::new(), 0, 0); reps.len()];
    for &e in by_name.iter().rev() {
        morphisms[class_of[e]] = (x.name(1, e).to_string(), x.vertex(1, e, 0), x.vertex(1, e, 1));
    }
    let objects: Vec<String> = x.names[0].clone();
    let identities = (0..x.count(0)).map(|a| class_of[x.degen(0, 0, a)]).collect();
    let mut compose = HashMap::new();
    for w in 0..x.count(2) {
        let key = (class_of[x.face(2, 2, w)], class_of[x.face(2, 0, w)]);
        let val = class_of[x.face(2, 1, w)];
        if let Some(prev) = compose.insert(key, val) {
            if prev != val {
                return Err(Error::Invariant("composition of homotopy classes is not well defined".into()));
            }
        }
    }
    let cat = FinCategory { objects, morphisms, identities, compose };
    cat.check_laws()?;
    Ok((cat, class_of))
}

/// The 2-coskeleton of a simplicial set (only levels ≤ 2 are read), truncated at `dim`.
pub fn coskeleton2(base: &SimplicialSet, dim: usize) -> Result<SimplicialSet> {
    if base.dim < 2 {
        return Err(Error::Contract("coskeleton needs levels up to 2".into()));
    }
    // A simplex is the family of its values on all monotone maps [2] -> [n].
    let mut levels = Vec::new();
    for n in 0..=dim {
        levels.push(cosk_level(base, n));
    }
    let maps_into = |n: usize| crate::intervals::monotone_maps(2, n);
    let name = |k: &Vec<usize>| {
        let n = cosk_dim(k.len());
        match n {
            0 => base.name(0, base.vertex(2, k[0], 0)).to_string(),
            1 => base.name(1, base.face(2, 1, k[1])).to_string(),
            _ => {
                let nondeg: Vec<String> = maps_into(n)
                    .iter()
                    .zip(k)
                    .filter(|(t, _)| t.is_injective())
                    .map(|(_, &y)| base.name(2, y).to_string())
                    .collect();
                if n == 2 { nondeg[0].clone() } else { format!("<{}>", nondeg.join(",")) }
            }
        }
    };
    let act = |k: &Vec<usize>, th: &Mor| {
        let n = th.n;
        let src = maps_into(n);
        let pos: HashMap<Vec<usize>, usize> = src.iter().enumerate().map(|(i, t)| (t.values.clone(), i)).collect();
        maps_into(th.m())
            .iter()
            .map(|t| {
                let u = th.compose(t);
                k[pos[&u.values]]
            })
            .collect()
    };
    SimplicialSet::from_action(dim, levels, name, act)
}

fn cosk_dim(len: usize) -> usize {
    // Number of monotone maps [2] -> [n] is C(n+3, 3).
    (0..).find(|&n| (n + 1) * (n + 2) * (n + 3) / 6 == len).unwrap()
}

fn cosk_level(base: &SimplicialSet, n: usize) -> Vec<Vec<usize>> {
    let maps = crate::intervals::monotone_maps(2, n);
    let pos: HashMap<Vec<usize>, usize> = maps.iter().enumerate().map(|(i, t)| (t.values.clone(), i)).collect();
    let mut out = Vec::new();
    // Assign values to the maps in order, checking compatibility along every
    // pair of maps that share a common restriction through [2] -> [2].
    let endo = crate::intervals::monotone_maps(2, 2);
    let mut cur: Vec<Option<usize>> = vec![None; maps.len()];
    fn rec(
        base: &SimplicialSet,
        maps: &[Mor],
        pos: &HashMap<Vec<usize>, usize>,
        endo: &[Mor],
        t: usize,
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if t == maps.len() {
            out.push(cur.iter().map(|v| v.unwrap()).collect());
            return;
        }
        if cur[t].is_some() {
            rec(base, maps, pos, endo, t + 1, cur, out);
            return;
        }
        for y in 0..base.count(2) {
            let mut assigned = Vec::new();
            let mut ok = true;
            // Setting x_θ = y forces x_{θφ} = X(φ) y for every φ: [2] -> [2].
            for phi in endo {
                let u = maps[t].compose(phi);
                let v = base.apply(phi, y);
                let p = pos[&u.values];
                match cur[p] {
                    Some(w) if w != v => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        cur[p] = Some(v);
                        assigned.push(p);
                    }
                }
            }
            if ok && consistent(base, maps, cur) {
                rec(base, maps, pos, endo, t + 1, cur, out);
            }
            for p in assigned {
                cur[p] = None;
            }
        }
    }
    rec(base, &maps, &pos, &endo, 0, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Two assigned triangles must agree on every shared edge and vertex.
fn consistent(base: &SimplicialSet, maps: &[Mor], cur: &[Option<usize>]) -> bool {
    let mut edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, v) in maps.iter().zip(cur) {
        let Some(y) = v else { continue };
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let e = base.apply(&Mor { n: 2, values: vec![a, b] }, *y);
            let key = (t.values[a], t.values[b]);
            if let Some(&old) = edge.get(&key) {
                if old != e {
                    return false;
                }
            } else {
                edge.insert(key, e);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(standard_simplex(2, 3).nondegenerate_counts(), vec![3, 3, 1, 0]);
        let w3 = wedge(3, 3).unwrap();
        assert_eq!(w3.nondegenerate_counts(), vec![4, 5, 2, 0]);
        let w2 = wedge(2, 3).unwrap();
        let l21 = horn(2, 1, 3).unwrap();
        assert_eq!(w2.names, l21.names);
    }

    #[test]
    fn nerve_is_quasi_category() {
        let c = FinCategory::poset(2);
        c.check_laws().unwrap();
        let n = nerve(&c, 4).unwrap();
        n.check_identities().unwrap();
        assert!(n.is_quasi_category_up_to(4).unwrap());
        let (h, _) = homotopy_category(&n).unwrap();
        assert_eq!(h.morphisms.len(), c.morphisms.len());
    }

    #[test]
    fn horn_is_not_quasi_category() {
        let l = horn(2, 1, 3).unwrap();
        assert!(!l.is_quasi_category_up_to(2).unwrap());
    }

    #[test]
    fn cells_match_vertex_lists() {
        let a = from_cells(3, &simplex_cells(&[&["0", "1", "2"]])).unwrap();
        let b = standard_simplex(2, 3);
        assert_eq!(a.names, b.names);
        assert_eq!(a.faces, b.faces);
        assert_eq!(a.degens, b.degens);
    }
}
