//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines always show in the test output.

mod common;

use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use templike::dgcat::{check_homotopy_category, check_nerve_of_inclusion, check_normalized_kernel, dg_fixtures, Comparison, SSimplex};
use templike::doldkan::{check_monoidal_associativity, counit, gamma, monoidal_iso, normalize, unit, AugSimplicial, ChainComplex};
use templike::exactcore::{Comb, Ring};
use templike::fixtures::{
    glued_naf, glued_simplex, linear_categories, quasi_categories, simplex_with_extra_face, standard_mutations, two_triangle_coskeleton,
    GLUED_HORN,
};
use templike::frobenius::{fill_inner_horn, inverse_mu_naf, naf_on_quasicategory, transfer_naf_free, HornData};
use templike::intervals::{alternating_sum, Partition};
use templike::simplicial::{homotopy_category, FinCategory};
use templike::templicial::{
    check_free_homotopy, check_underlying_homotopy, check_underlying_nerve, free_nerve_comparison, free_templicial, linear_homotopy_category,
    linear_nerve, random_chain, strong_monoidal_recognize,
};
use templike::tensorfrob::{check_kt, check_kt_graded, epsilon_phi, kernel_k, tensor_graded, tensor_t, GradedQuiver};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<E: std::fmt::Debug>(r: Result<(), E>, what: &str) -> Result<(), String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn lib<T>(r: templike::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn c1_axioms_and_mutations() -> Outcome {
    let mut detected = 0;
    for (name, c) in linear_categories(Ring::Q) {
        let x = linear_nerve(&c, 5);
        let counts: Vec<usize> = (0..=5).map(|n| x.count(n)).collect();
        ensure!(counts == common::nerve_counts(&c, 5), "{name}: counts {counts:?}");
        ok(x.check(), name)?;
        let muts = standard_mutations(&x);
        ensure!(muts.len() == 10, "{name}: {} mutations", muts.len());
        for m in muts {
            let y = lib(m.apply(&x))?;
            ensure!(y != x, "{name}: mutation is a no-op");
            let Err(w) = y.check() else { return Err(format!("{name}: {} undetected", m.cell.map_name())) };
            ensure!(w.involved.contains(&m.cell.map_name()), "{name}: witness {w} omits {}", m.cell.map_name());
            ensure!(common::witness_identity_fails(&y, &w) == Some(true), "{name}: witness {w} does not fail on re-evaluation");
            ensure!(common::witness_identity_fails(&x, &w) == Some(false), "{name}: witness {w} also fails before mutation");
            detected += 1;
        }
    }
    Ok(format!("3 nerves at D=5 valid, {detected}/30 mutations caught with re-verified witnesses"))
}

fn c2_recognition() -> Outcome {
    for (name, c) in linear_categories(Ring::Q) {
        let x = linear_nerve(&c, 5);
        let (found, iso) = lib(strong_monoidal_recognize(&x))?.map_err(|w| format!("{name}: rejected: {w}"))?;
        ensure!(common::hom_dims(&found) == common::hom_dims(&c), "{name}: hom dimensions differ");
        let ident: Vec<usize> = (0..c.arrows.len()).collect();
        ensure!(c.is_iso_via(&found, &ident), "{name}: composition differs");
        ok(iso.check(&x, &linear_nerve(&found, 5)), name)?;
    }
    let y = two_triangle_coskeleton(4).map_err(|e| e.to_string())?;
    // Two triangles on the same spine: F̃ cannot have invertible μ_{1,1}.
    let spine = |s: usize| (y.face(2, 2, s), y.face(2, 0, s));
    let crowded = (0..y.count(2)).any(|s| (0..y.count(2)).filter(|&t| spine(t) == spine(s)).count() > 1);
    ensure!(crowded, "oracle: no repeated spine in the coskeleton");
    ensure!(lib(strong_monoidal_recognize(&free_templicial(&y, Ring::Q)))?.is_err(), "coskeleton recognized as a nerve");
    Ok("3 categories recovered; non-nerve coskeleton rejected".into())
}

fn c3_squares() -> Outcome {
    let q = Ring::Q;
    for m in 1..=3 {
        let (x, y, f) = lib(free_nerve_comparison(&FinCategory::poset(m), q, 4))?;
        for n in 0..=4 {
            let expect = common::binom(m + n + 1, n + 1);
            ensure!(x.count(n) == expect && y.count(n) == expect, "poset{m}: level {n} sizes {} {} vs {expect}", x.count(n), y.count(n));
        }
        ok(f.check(&x, &y), "free-nerve map")?;
        ensure!(lib(f.is_iso(&x, &y))?, "poset{m}: F̃N -> N_k F not invertible");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut chains = 0;
    for (name, c) in linear_categories(q) {
        let x = linear_nerve(&c, 4);
        for n in 0..=4 {
            for _ in 0..5 {
                let (vs, fs) = random_chain(&c, n, 3, &mut rng);
                ok(check_underlying_nerve(&c, &x, &vs, &fs), name)?;
                chains += 1;
            }
        }
        ok(lib(check_underlying_homotopy(&x, 20, &mut rng))?, name)?;
    }
    for (name, y) in lib(quasi_categories(4))? {
        let (h, _) = lib(homotopy_category(&y))?;
        let lh = lib(linear_homotopy_category(&free_templicial(&y, q)))?;
        ensure!(h.morphisms.len() == lh.category.arrows.len(), "{name}: ho sizes {} vs {}", h.morphisms.len(), lh.category.arrows.len());
        ok(lib(check_free_homotopy(&y, q))?, name)?;
        ok(lib(check_underlying_homotopy(&free_templicial(&y, q), 20, &mut rng))?, name)?;
    }
    Ok(format!("F̃N ≅ N_kF on 3 posets, ŨN_k ≅ NŨ on {chains} chains, both homotopy squares on 6 fixtures"))
}

fn c4_naf_pipeline() -> Outcome {
    let q = Ring::Q;
    for (name, y) in lib(quasi_categories(4))? {
        let z = lib(naf_on_quasicategory(&y))?;
        ok(z.check_face_constraints(), name)?;
        ok(transfer_naf_free(&z, q).check_frobenius(), name)?;
    }
    let g = lib(glued_simplex(4))?;
    let z = lib(glued_naf(4))?;
    ok(z.check_face_constraints(), "glued")?;
    ok(transfer_naf_free(&z, q).check_naf(), "glued")?;
    let horn: Vec<usize> = GLUED_HORN.iter().map(|s| g.index_of(2, s).expect("glued triangle")).collect();
    ensure!(common::brute_fillers(&g, 3, 1, &horn).is_empty(), "documented glued horn has a filler");
    ensure!(lib(g.first_unfillable_inner_horn(3))?.is_some(), "library finds no unfillable horn in the glued simplex");
    let e = lib(simplex_with_extra_face(4))?;
    for n in 2..=4 {
        ensure!(common::brute_unliftable_wedge(&e, n).is_none(), "extra face: a W^{n} wedge does not lift");
    }
    ensure!(lib(e.first_unliftable_wedge(4))?.is_none(), "library disagrees on wedge lifting");
    let w = lib(e.first_unfillable_inner_horn(3))?.ok_or("extra face: every inner horn fills")?;
    let faces: Vec<usize> = w.faces.iter().flatten().map(|s| e.index_of(w.n - 1, s).expect("face name")).collect();
    ensure!(common::brute_fillers(&e, w.n, w.k.unwrap_or(0), &faces).is_empty(), "reported horn has a filler");
    Ok("naF on 3 quasi-categories; glued Δ³ naF with an unfillable Λ³₁; Δ³ ∪ extra face lifts wedges, fails a horn".into())
}

fn c5_horn_filling() -> Outcome {
    let mut filled = 0;
    for (name, y) in lib(quasi_categories(4))?.into_iter().take(2) {
        let z = transfer_naf_free(&lib(naf_on_quasicategory(&y))?, Ring::Q);
        for n in 2..=4 {
            for k in 1..n {
                for fam in y.horns(n, k) {
                    let h = HornData::from_simplices(&y, n, k, &fam, Ring::Q);
                    let s = fill_inner_horn(&z, &h).map_err(|w| format!("{name} Λ^{n}_{k}: {w}"))?;
                    ok(s.validate(&z.host), name)?;
                    // Nerves of posets fill uniquely; the linear filler must be that simplex.
                    let brute = common::brute_fillers(&y, n, k, &fam);
                    ensure!(brute.len() == 1, "{name}: {} simplicial fillers", brute.len());
                    ensure!(s.edges[&(0, n)] == Comb::basis(brute[0], Ring::Q), "{name} Λ^{n}_{k}: filler is not the unique simplex");
                    filled += 1;
                }
            }
        }
    }
    Ok(format!("{filled} inner horns with n ≤ 4 filled on 2 fixtures"))
}

fn c6_partitions() -> Outcome {
    for (name, c) in linear_categories(Ring::Q).into_iter().take(2) {
        let z = lib(inverse_mu_naf(&linear_nerve(&c, 5)))?;
        ok(z.check_higher_compatibility(5), name)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..2 {
        let v = GradedQuiver::random(Ring::Q, 2, 5, 2, &mut rng);
        ok(tensor_graded(&v).naf.check_higher_compatibility(5), "T(V)")?;
    }
    let mut pairs = 0;
    for n in 0..=7 {
        let parts = Partition::enumerate(n);
        let mask = |p: &Partition| p.members.iter().filter(|&&m| m != 0 && m != n).fold(0u64, |a, &m| a | 1 << m);
        for i in &parts {
            for k in parts.iter().filter(|k| i.is_subset(k)) {
                let expect = common::brute_alternating_sum(n, mask(i), mask(k));
                let got = alternating_sum(i, k);
                ensure!(got == expect, "n={n} I={i} K={k}: {got} vs {expect}");
                ensure!((got == 0) == (i != k), "n={n} I={i} K={k}: sum {got}");
                pairs += 1;
            }
        }
    }
    Ok(format!("μ-Z compatibility n ≤ 5 on 4 fixtures; alternating sums on {pairs} pairs n ≤ 7"))
}

fn c7_tensor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for t in 0..5 {
        let v = GradedQuiver::random(Ring::Q, 2, 3, 2, &mut rng);
        let ta = tensor_graded(&v);
        let levels: Vec<Vec<(usize, usize)>> = v.levels.iter().map(|l| l.iter().map(|g| (g.src, g.tgt)).collect()).collect();
        let expect = common::tensor_counts(v.base.len(), &levels, 3);
        let got: Vec<usize> = (0..=3).map(|n| ta.naf.host.count(n)).collect();
        ensure!(got == expect, "T(V) {t}: counts {got:?} vs {expect:?}");
        ok(lib(epsilon_phi(&ta.naf, false))?.check(&ta.naf), "ε/φ on T(V)")?;
        ok(lib(check_kt_graded(&v))?, "K(T(V))")?;
        let (_, k) = lib(kernel_k(&ta.naf))?;
        ensure!((1..=3).all(|n| k.quiver.count(n) == v.count(n)), "T(V) {t}: kernel ranks differ from V");
    }
    for (name, c) in linear_categories(Ring::Q) {
        let x = lib(inverse_mu_naf(&linear_nerve(&c, 3)))?;
        ok(lib(epsilon_phi(&x, true))?.check(&x), name)?;
        let (a, _) = lib(kernel_k(&x))?;
        ok(a.check(), name)?;
        ok(lib(check_kt(&a))?, name)?;
        let ta = tensor_t(&a);
        ok(ta.naf.check_frobenius(), name)?;
        let got: Vec<usize> = (0..=3).map(|n| ta.naf.host.count(n)).collect();
        ensure!(got == common::nerve_counts(&c, 3), "{name}: T(K N) counts {got:?}");
    }
    Ok("ε∘φ, φ∘ε on 5 T(V) and 3 nerves; K(T A) ≅ A; T A Frobenius".into())
}

fn c8_dold_kan() -> Outcome {
    let q = Ring::Q;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for t in 0..5 {
        let c = ChainComplex::random(q, 4, 2, &mut rng);
        ok(c.check(), "complex")?;
        let ranks: Vec<usize> = (0..=c.dim()).map(|n| c.rank(n)).collect();
        let g = lib(gamma(&c))?;
        for l in -1..=g.module.top {
            ensure!(g.module.rank(l) == common::gamma_rank(&ranks, l), "random {t}: Γ rank at {l}");
        }
        let n = lib(normalize(&g.module))?;
        let e = counit(&g, &n);
        ok(e.check(&n.complex, &c), "counit")?;
        ensure!(lib(e.is_iso(&n.complex, &c))?, "random {t}: NΓ ≇ id");
        let gn = lib(gamma(&n.complex))?;
        let u = lib(unit(&g.module, &n, &gn))?;
        ok(u.check(&g.module, &gn.module), "unit")?;
        ensure!(lib(u.is_iso(&g.module, &gn.module))?, "random {t}: ΓN ≇ id");
    }
    for m in 0..=3 {
        let a = AugSimplicial::free_simplex(m, 3, q);
        let na = lib(normalize(&a))?;
        for j in 0..=na.complex.dim() {
            ensure!(na.complex.rank(j) == common::binom(m + 1, j), "N(Δ^{m}₊) rank {j}");
        }
        let ga = lib(gamma(&na.complex))?;
        let u = lib(unit(&a, &na, &ga))?;
        ok(u.check(&a, &ga.module), "unit on simplex")?;
        ensure!(lib(u.is_iso(&a, &ga.module))?, "Δ^{m}₊: ΓN ≇ id");
    }
    let (a, b) = (AugSimplicial::free_simplex(1, 3, q), AugSimplicial::free_simplex(0, 3, q));
    let j = a.join(&b);
    let (na, nb, nj) = (lib(normalize(&a))?, lib(normalize(&b))?, lib(normalize(&j.module))?);
    let t = na.complex.tensor(&nb.complex);
    for d in 0..=nj.complex.dim().min(t.complex.dim()) {
        let conv: usize = (0..=d).map(|p| common::binom(2, p) * common::binom(1, d - p)).sum();
        ensure!(t.complex.rank(d) == conv && nj.complex.rank(d) == common::binom(3, d), "monoidal ranks at {d}");
    }
    let mu = monoidal_iso(&j, &nj, &na, &nb, &t);
    ok(mu.check(&nj.complex, &t.complex), "monoidal map")?;
    ensure!(lib(mu.is_iso(&nj.complex, &t.complex))?, "N(A ⋆ B) ≇ NA ⊗ NB");
    ok(lib(check_monoidal_associativity(&b, &a, &b))?, "associativity")?;
    Ok("round trips on 5 random complexes and Δⁿ₊ (n ≤ 3); monoidal iso is an associative chain iso".into())
}

fn c9_dg() -> Outcome {
    let q = Ring::Q;
    for (name, c) in dg_fixtures(q, 2) {
        ok(lib(check_normalized_kernel(&c))?, name)?;
        ok(lib(check_homotopy_category(&c))?, name)?;
        let h = lib(c.h_zero())?;
        let mut got = std::collections::BTreeMap::new();
        for a in &h.category.arrows {
            *got.entry((a.src, a.tgt)).or_insert(0) += 1;
        }
        let expect: std::collections::BTreeMap<_, _> = common::h_zero_dims(&c).into_iter().filter(|&(_, d)| d > 0).collect();
        ensure!(got == expect, "{name}: H₀ dims {got:?} vs {expect:?}");
    }
    for m in 1..=2 {
        ok(lib(check_nerve_of_inclusion(&templike::templicial::LinearCategory::free(&FinCategory::poset(m), q), 3))?, "inclusion")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut samples = 0;
    for (name, c) in dg_fixtures(q, 3) {
        let cmp = lib(Comparison::new(&c))?;
        for t in 0..50 {
            let s = SSimplex::random(&cmp.sharp.monoid, t % 5, 2, &mut rng);
            ok(lib(cmp.check_simplex(&s))?, name)?;
            samples += 1;
        }
    }
    Ok(format!("normalized kernel, nerve of inclusion, H₀ on 4 fixtures; bridge on {samples} samples n ≤ 4"))
}

fn c10_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_templike")).arg("suite").env("TEMPLIKE_SEED", "11").output().map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure!(a.status.code() == Some(0), "suite exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stdout).lines().take(40).collect::<Vec<_>>().join("\n"));
    ensure!(a.stdout == b.stdout, "suite outputs differ");
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
    ensure!(v["seed"] == 11, "seed not reported");
    Ok(format!("two suite runs byte-identical ({} bytes)", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("templicial axioms and mutation witnesses", c1_axioms_and_mutations),
        ("nerve recognition", c2_recognition),
        ("square of adjunctions", c3_squares),
        ("naF pipeline", c4_naf_pipeline),
        ("inner horn filling", c5_horn_filling),
        ("partition lemmas", c6_partitions),
        ("tensor and kernel", c7_tensor),
        ("augmented Dold-Kan", c8_dold_kan),
        ("dg-nerves", c9_dg),
        ("reproducible suite", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
