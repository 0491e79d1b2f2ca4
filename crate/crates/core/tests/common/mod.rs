//! Oracles computed independently of the library's structure maps.
#![allow(dead_code)]

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use templike::dgcat::DGCategory;
use templike::exactcore::Scalar;
use templike::simplicial::SimplicialSet;
use templike::templicial::{LinearCategory, Templicial, Witness};
use templike::Comb;

/// `dims[a][b] = dim C(a, b)` read off the arrow list.
pub fn hom_dims(c: &LinearCategory) -> Vec<Vec<usize>> {
    let k = c.objects.len();
    let mut m = vec![vec![0; k]; k];
    for g in &c.arrows {
        m[g.src][g.tgt] += 1;
    }
    m
}

fn mat_mul(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let k = a.len();
    (0..k).map(|i| (0..k).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

fn identity(k: usize) -> Vec<Vec<usize>> {
    (0..k).map(|i| (0..k).map(|j| usize::from(i == j)).collect()).collect()
}

fn total(m: &[Vec<usize>]) -> usize {
    m.iter().flatten().sum()
}

/// Generators of the linear nerve per level: entries of powers of the hom-dimension matrix.
pub fn nerve_counts(c: &LinearCategory, dim: usize) -> Vec<usize> {
    let m = hom_dims(c);
    let mut p = identity(m.len());
    let mut out = vec![total(&p)];
    for _ in 1..=dim {
        p = mat_mul(&p, &m);
        out.push(total(&p));
    }
    out
}

/// Generators of the tensor construction on a graded quiver: `T_n = Σ_j V_j T_{n-j}`.
pub fn tensor_counts(vertices: usize, levels: &[Vec<(usize, usize)>], dim: usize) -> Vec<usize> {
    let adj: Vec<Vec<Vec<usize>>> = levels
        .iter()
        .map(|l| {
            let mut m = vec![vec![0; vertices]; vertices];
            for &(a, b) in l {
                m[a][b] += 1;
            }
            m
        })
        .collect();
    let mut t: Vec<Vec<Vec<usize>>> = vec![identity(vertices)];
    for n in 1..=dim {
        let mut acc = vec![vec![0; vertices]; vertices];
        for j in 1..=n.min(adj.len() - 1) {
            let p = mat_mul(&adj[j], &t[n - j]);
            for a in 0..vertices {
                for b in 0..vertices {
                    acc[a][b] += p[a][b];
                }
            }
        }
        t.push(acc);
    }
    t.iter().map(|m| total(m)).collect()
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank of an augmented Γ at level `l ≥ -1` from the chain ranks (`C_j` sits at level `j - 1`):
/// order-preserving surjections from an `(l+1)`-set onto a `j`-set number `binom(l, j-1)`.
pub fn gamma_rank(chain_ranks: &[usize], l: isize) -> usize {
    if l < 0 {
        return chain_ranks[0];
    }
    let l = l as usize;
    (1..chain_ranks.len()).filter(|&j| j <= l + 1).map(|j| binom(l, j - 1) * chain_ranks[j]).sum()
}

/// Rank of a matrix of decimal or fractional strings over ℚ.
pub fn rational_rank(rows: &[Vec<String>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|s| BigRational::from_str(s).expect("number")).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone() * inv.clone();
                for k in c..cols {
                    let v = m[rank][k].clone() * f.clone();
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim H₀` of every hom complex, keyed by `(src, tgt)`.
pub fn h_zero_dims(c: &DGCategory) -> std::collections::BTreeMap<(usize, usize), usize> {
    let fx = c.to_fixture();
    fx.hom
        .iter()
        .map(|h| {
            let c0 = h.complex.ranks.first().copied().unwrap_or(0);
            let b = h.complex.d.get("1").map_or(0, |m| rational_rank(m));
            ((h.src, h.tgt), c0 - b)
        })
        .collect()
}

/// All `n`-simplices whose faces away from `k` are `faces` (listed in order).
pub fn brute_fillers(y: &SimplicialSet, n: usize, k: usize, faces: &[usize]) -> Vec<usize> {
    (0..y.count(n)).filter(|&s| (0..=n).filter(|&j| j != k).zip(faces).all(|(j, &f)| y.face(n, j, s) == f)).collect()
}

/// All `n`-simplices with `d_n s = front` and `d_0 s = back`.
pub fn brute_wedge_lifts(y: &SimplicialSet, n: usize, front: usize, back: usize) -> Vec<usize> {
    (0..y.count(n)).filter(|&s| y.face(n, n, s) == front && y.face(n, 0, s) == back).collect()
}

/// First wedge `(front, back)` in dimension `n` with no lift, by exhaustive search.
pub fn brute_unliftable_wedge(y: &SimplicialSet, n: usize) -> Option<(usize, usize)> {
    let m = n - 1;
    for front in 0..y.count(m) {
        for back in 0..y.count(m) {
            if y.face(m, 0, front) == y.face(m, m, back) && brute_wedge_lifts(y, n, front, back).is_empty() {
                return Some((front, back));
            }
        }
    }
    None
}

fn gen_index(x: &Templicial, n: usize, label: &str) -> Option<usize> {
    (0..x.count(n)).find(|&g| x.label(n, g) == label)
}

type T = Comb<Vec<usize>>;

fn on_factor(x: &Templicial, t: &T, pos: usize, f: impl Fn(&Comb<usize>) -> Comb<usize>) -> T {
    let mut out = T::zero();
    for (key, c) in t.iter() {
        let img = f(&Comb::basis(key[pos], x.ring));
        for (h, d) in img.iter() {
            let mut k2 = key.clone();
            k2[pos] = *h;
            let v: Scalar = c * d;
            out.add_term(k2, v);
        }
    }
    out
}

/// Re-evaluates the identity a witness names on the generator it names.
/// `Some(true)` means the identity fails there, `None` means the witness is of
/// a kind this oracle does not know.
pub fn witness_identity_fails(x: &Templicial, w: &Witness) -> Option<bool> {
    let ix = &w.indices;
    let level = match w.identity.as_str() {
        "d_i d_j = d_{j-1} d_i" | "mu natural in inner faces" | "d_i s_j" | "s_i s_j = s_{j+1} s_i" | "mu natural in degeneracies" => ix[0],
        _ => return None,
    };
    let g = Comb::basis(gen_index(x, level, &w.generator)?, x.ring);
    let fails = match w.identity.as_str() {
        "d_i d_j = d_{j-1} d_i" => {
            let (n, i, j) = (ix[0], ix[1], ix[2]);
            x.face(n - 1, i, &x.face(n, j, &g)) != x.face(n - 1, j - 1, &x.face(n, i, &g))
        }
        "d_i s_j" => {
            let (n, i, j) = (ix[0], ix[1], ix[2]);
            let l = x.face(n + 1, i, &x.degen(n, j, &g));
            let r = if i == j || i == j + 1 {
                g.clone()
            } else if i < j {
                x.degen(n - 1, j - 1, &x.face(n, i, &g))
            } else {
                x.degen(n - 1, j, &x.face(n, i - 1, &g))
            };
            l != r
        }
        "s_i s_j = s_{j+1} s_i" => {
            let (n, i, j) = (ix[0], ix[1], ix[2]);
            x.degen(n + 1, i, &x.degen(n, j, &g)) != x.degen(n + 1, j + 1, &x.degen(n, i, &g))
        }
        "mu natural in inner faces" => {
            let (n, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let lhs = x.mu(k, l, &x.face(n, j, &g));
            let rhs = if j <= k {
                on_factor(x, &x.mu(k + 1, l, &g), 0, |v| x.face(k + 1, j, v))
            } else {
                on_factor(x, &x.mu(k, l + 1, &g), 1, |v| x.face(l + 1, j - k, v))
            };
            lhs != rhs
        }
        "mu natural in degeneracies" => {
            let (n, i, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let lhs = x.mu(k, l, &x.degen(n, i, &g));
            let rhs = if i < k {
                on_factor(x, &x.mu(k - 1, l, &g), 0, |v| x.degen(k - 1, i, v))
            } else {
                on_factor(x, &x.mu(k, l - 1, &g), 1, |v| x.degen(l - 1, i - k, v))
            };
            lhs != rhs
        }
        _ => unreachable!(),
    };
    Some(fails)
}

/// `Σ_{I ⊆ J ⊆ K} (-1)^{ℓ(J)}` over bitmasks of interior cut points.
pub fn brute_alternating_sum(n: usize, i_cuts: u64, k_cuts: u64) -> i64 {
    let free = k_cuts & !i_cuts;
    let mut sum = 0;
    let mut sub = free;
    loop {
        let j = i_cuts | sub;
        let parts = j.count_ones() as usize + usize::from(n > 0);
        sum += if parts % 2 == 0 { 1 } else { -1 };
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    sum
}
