//! Named fixtures shared by the tests, the examples and the command line.

use std::collections::HashMap;

use crate::dgcat::{dg_fixtures, DGCategory};
use crate::exactcore::{Comb, Ring, Scalar};
use crate::frobenius::{build_set_naf, SetNaF};
use crate::simplicial::{coskeleton2, from_cells, nerve, simplex_cells, standard_simplex, Cell, FinCategory, SimplicialSet};
use crate::templicial::{d_name, mu_name, s_name, Gen, LinearCategory, Templicial};
use crate::{Error, Result};

/// A linear category from arrows and the non-identity compositions; units
/// and their compositions are filled in.
pub fn linear_category(
    ring: Ring,
    objects: &[&str],
    arrows: &[(&str, usize, usize)],
    comp: &[(usize, usize, &[(usize, i64)])],
) -> LinearCategory {
    let mut gens: Vec<Gen> = objects.iter().enumerate().map(|(a, o)| Gen { src: a, tgt: a, label: format!("id_{o}") }).collect();
    gens.extend(arrows.iter().map(|&(l, a, b)| Gen { src: a, tgt: b, label: l.to_string() }));
    let shift = objects.len();
    let mut table = HashMap::new();
    for (f, g) in gens.iter().enumerate() {
        table.insert((g.src, f), Comb::basis(f, ring));
        table.insert((f, g.tgt), Comb::basis(f, ring));
    }
    for &(f, g, v) in comp {
        let mut c = Comb::zero();
        for &(h, k) in v {
            c.add_term(h + shift, ring.from_i64(k));
        }
        table.insert((f + shift, g + shift), c);
    }
    // The identity of object `a` is arrow `a`.
    let units = (0..objects.len()).map(|a| Comb::basis(a, ring)).collect();
    LinearCategory { ring, objects: objects.iter().map(|s| s.to_string()).collect(), arrows: gens, comp: table, units }
}

/// Objects `x, y`; `End(x)` spanned by `1, e` with `e∘e = e`; `Hom(x, y)`
/// spanned by `f, g` with `f∘e = f` and `g∘e = 2f`.
pub fn idempotent_category(ring: Ring) -> LinearCategory {
    linear_category(
        ring,
        &["x", "y"],
        &[("e", 0, 0), ("f", 0, 1), ("g", 0, 1)],
        &[(0, 0, &[(0, 1)]), (0, 1, &[(1, 1)]), (0, 2, &[(1, 2)])],
    )
}

/// Objects `x, y, z` with `Hom(x, y) = ⟨f⟩`, `Hom(y, z) = ⟨g, h⟩`,
/// `Hom(x, z) = ⟨p, q⟩`, `g∘f = p + q` and `h∘f = p - q`.
pub fn span_category(ring: Ring) -> LinearCategory {
    linear_category(
        ring,
        &["x", "y", "z"],
        &[("f", 0, 1), ("g", 1, 2), ("h", 1, 2), ("p", 0, 2), ("q", 0, 2)],
        &[(0, 1, &[(3, 1), (4, 1)]), (0, 2, &[(3, 1), (4, -1)])],
    )
}

/// The three linear category fixtures.
pub fn linear_categories(ring: Ring) -> Vec<(&'static str, LinearCategory)> {
    vec![
        ("poset2", LinearCategory::free(&FinCategory::poset(2), ring)),
        ("idempotent", idempotent_category(ring)),
        ("span", span_category(ring)),
    ]
}

/// Quasi-category fixtures: the nerve of `[2]`, `Δ³` and a 2-coskeleton
/// that is not a nerve.
pub fn quasi_categories(dim: usize) -> Result<Vec<(&'static str, SimplicialSet)>> {
    Ok(vec![
        ("nerve-poset2", nerve(&FinCategory::poset(2), dim)?),
        ("simplex3", standard_simplex(3, dim)),
        ("cosk-two-triangles", two_triangle_coskeleton(dim)?),
    ])
}

/// `cosk₂` of `Δ²` with a second triangle `t` on the boundary of `[0,1,2]`.
pub fn two_triangle_coskeleton(dim: usize) -> Result<SimplicialSet> {
    let mut cells = simplex_cells(&[&["0", "1", "2"]]);
    cells.push(Cell::new("t", &["[1,2]", "[0,2]", "[0,1]"]));
    coskeleton2(&from_cells(2, &cells)?, dim)
}

/// `Δ³` with two more 3-simplices: `x` shares the faces `d_0, d_1, d_2` of
/// `[0,1,2,3]` and `y` shares `d_1, d_2, d_3`; their other faces are the new
/// triangles `d3x` and `d0y`.
pub fn glued_simplex(dim: usize) -> Result<SimplicialSet> {
    let mut cells = simplex_cells(&[&["0", "1", "2", "3"]]);
    cells.push(Cell::new("d3x", &["[1,2]", "[0,2]", "[0,1]"]));
    cells.push(Cell::new("d0y", &["[2,3]", "[1,3]", "[1,2]"]));
    cells.push(Cell::new("x", &["[1,2,3]", "[0,2,3]", "[0,1,3]", "d3x"]));
    cells.push(Cell::new("y", &["d0y", "[0,2,3]", "[0,1,3]", "[0,1,2]"]));
    from_cells(dim, &cells)
}

/// The faces `(d_0, d_2, d_3)` of the `Λ³₁` horn in [`glued_simplex`] that has no filler.
pub const GLUED_HORN: [&str; 3] = ["d0y", "[0,1,3]", "d3x"];

/// The naF structure on [`glued_simplex`]: concatenation on simplices of
/// `Δ³`, `Z^{2,1}(d3x, [2,3]) = x` and `Z^{1,2}([0,1], d0y) = y`.
pub fn glued_naf(dim: usize) -> Result<SetNaF> {
    let y = glued_simplex(dim)?;
    let host = y.clone();
    build_set_naf(&y, |p, q, a, b, cands| {
        let (na, nb) = (host.name(p, a), host.name(q, b));
        let want = match (na, nb) {
            ("d3x", "[2,3]") => "x".to_string(),
            ("[0,1]", "d0y") => "y".to_string(),
            _ => {
                let a = na.strip_prefix('[')?.strip_suffix(']')?;
                let b = nb.strip_prefix('[')?.strip_suffix(']')?;
                let (head, _) = a.rsplit_once(',')?;
                format!("[{head},{b}]")
            }
        };
        cands.iter().copied().find(|&c| host.name(p + q, c) == want)
    })
}

/// `Δ³` with an extra triangle `x` on the edges `[0,1], [1,3], [0,3]`.
pub fn simplex_with_extra_face(dim: usize) -> Result<SimplicialSet> {
    let mut cells = simplex_cells(&[&["0", "1", "2", "3"]]);
    cells.push(Cell::new("x", &["[1,3]", "[0,3]", "[0,1]"]));
    from_cells(dim, &cells)
}

/// The dg fixtures.
pub fn dg_categories(ring: Ring, dim: usize) -> Vec<(&'static str, DGCategory)> {
    dg_fixtures(ring, dim)
}

/// A structure map cell of a templicial module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapCell {
    Face { n: usize, j: usize },
    Degen { n: usize, i: usize },
    Comult { k: usize, l: usize },
}

impl MapCell {
    pub fn map_name(&self) -> String {
        match *self {
            MapCell::Face { n, j } => d_name(n, j),
            MapCell::Degen { n, i } => s_name(n, i),
            MapCell::Comult { k, l } => mu_name(k, l),
        }
    }
}

/// A single-entry change of one structure map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutation {
    pub cell: MapCell,
    /// The generator whose image changes.
    pub generator: usize,
}

impl Mutation {
    /// Adds 1 to the leading coefficient of the image of the generator.
    pub fn apply(&self, x: &Templicial) -> Result<Templicial> {
        let mut y = x.clone();
        let one = x.ring.one();
        let bump = |c: &mut Comb<usize>| -> Result<()> {
            let (&k, v) = c.first().ok_or_else(|| Error::Contract("empty image".into()))?;
            let v: Scalar = v + &one;
            c.retain(|&h| h != k);
            c.add_term(k, v);
            Ok(())
        };
        match self.cell {
            MapCell::Face { n, j } => bump(&mut y.faces[n][j][self.generator])?,
            MapCell::Degen { n, i } => bump(&mut y.degens[n][i][self.generator])?,
            MapCell::Comult { k, l } => {
                let t = &mut y.comult.get_mut(&(k, l)).ok_or_else(|| Error::Contract("no such comultiplication".into()))?[self.generator];
                let (key, v) = t.first().map(|(k, v)| (k.clone(), v + &one)).ok_or_else(|| Error::Contract("empty image".into()))?;
                t.retain(|h| h != &key);
                t.add_term(key, v);
            }
        }
        Ok(y)
    }
}

/// Ten single-entry mutations spread over faces, degeneracies and
/// comultiplications; each changes the image of the last generator at
/// its level that has one.
pub fn standard_mutations(x: &Templicial) -> Vec<Mutation> {
    let cells = [
        MapCell::Face { n: 2, j: 1 },
        MapCell::Face { n: 3, j: 2 },
        MapCell::Face { n: 4, j: 1 },
        MapCell::Degen { n: 0, i: 0 },
        MapCell::Degen { n: 1, i: 1 },
        MapCell::Degen { n: 2, i: 0 },
        MapCell::Comult { k: 1, l: 1 },
        MapCell::Comult { k: 2, l: 1 },
        MapCell::Comult { k: 1, l: 3 },
        MapCell::Comult { k: 2, l: 2 },
    ];
    cells
        .into_iter()
        .filter_map(|cell| {
            let level = match cell {
                MapCell::Face { n, .. } => n,
                MapCell::Degen { n, .. } => n,
                MapCell::Comult { k, l } => k + l,
            };
            let stored = match cell {
                MapCell::Degen { .. } => level < x.dim,
                _ => level <= x.dim,
            };
            if !stored {
                return None;
            }
            let generator = (0..x.count(level)).rev().find(|&g| match cell {
                MapCell::Face { n, j } => !x.faces[n][j][g].is_zero(),
                MapCell::Degen { n, i } => !x.degens[n][i][g].is_zero(),
                MapCell::Comult { k, l } => !x.comult[&(k, l)][g].is_zero(),
            })?;
            Some(Mutation { cell, generator })
        })
        .collect()
}
