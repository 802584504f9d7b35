//! The acceptance suite. Every criterion is a deterministic function of the
//! seed, so two runs with the same configuration give identical reports.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::HomologyGroup;
use crate::cm::{is_lcm, is_wcm};
use crate::form::{FormParameter, LambdaSub};
use crate::io;
use crate::ka::{build_ka, cancellation_witness, prop43_connect, KaComplex};
use crate::matrix::IntMatrix;
use crate::quadratic::{is_morphism, QModMorphism, QuadraticModule};
use crate::reduction::{kernel_restriction, orbit_search, reduce_to_first_block, replay, word_matrix, ElementaryMove, HVector, ShearDir, DEFAULT_SEARCH_DEPTH};
use crate::semisimplicial::SemiSimplicialSet;
use crate::simplicial::{projective_plane_6, SimplicialComplex};

pub const DEFAULT_SEED: u64 = 0x5eed_0042;

/// Expected homology for the golden complexes.
pub const GOLDEN_HOMOLOGY: &str = include_str!("../goldens/homology.json");

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub pi1_budget: usize,
    /// JSON text in the format of [`GOLDEN_HOMOLOGY`].
    pub goldens: String,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, pi1_budget: crate::pi1::DEFAULT_PI1_BUDGET, goldens: GOLDEN_HOMOLOGY.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    /// Number of individual checks performed.
    pub checked: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "form axioms"),
    (2, "move-set soundness"),
    (3, "reduction to the first block"),
    (4, "kernel restriction"),
    (5, "homology goldens"),
    (6, "cohen-macaulay"),
    (7, "ka structure"),
    (8, "transitivity and cancellation"),
    (9, "arf invariant"),
    (10, "determinism"),
];

/// Wall-clock budget per criterion.
pub fn budget(id: u32) -> Duration {
    Duration::from_secs(match id {
        1 => 60,
        2 => 10,
        3 => 300,
        4 => 120,
        5 => 10,
        6 => 180,
        7 => 300,
        8 => 300,
        9 => 60,
        _ => 600,
    })
}

type Outcome = std::result::Result<(u64, String), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng_for(cfg: &SuiteConfig, id: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ (u64::from(id) << 32))
}

pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    let outcome = match id {
        1 => form_axioms(),
        2 => move_soundness(),
        3 => first_block_reduction(cfg),
        4 => kernel_restrictions(cfg),
        5 => homology_goldens(cfg),
        6 => cohen_macaulay(cfg),
        7 => ka_structure(cfg),
        8 => transitivity_and_cancellation(cfg),
        9 => arf_suite(cfg),
        10 => determinism(cfg),
        _ => Err(format!("no criterion {id}")),
    };
    match outcome {
        Ok((checked, detail)) => CriterionResult { id, name, passed: true, checked, detail },
        Err(detail) => CriterionResult { id, name, passed: false, checked: 0, detail },
    }
}

/// Runs the criteria in order, calling `progress` after each one.
pub fn run_suite_with(cfg: &SuiteConfig, ids: &[u32], mut progress: impl FnMut(&CriterionResult, Duration)) -> SuiteReport {
    let criteria: Vec<CriterionResult> = ids
        .iter()
        .map(|&id| {
            let t = Instant::now();
            let r = run_criterion(id, cfg);
            progress(&r, t.elapsed());
            r
        })
        .collect();
    SuiteReport { seed: cfg.seed, passed: criteria.iter().all(|c| c.passed), criteria }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    run_suite_with(cfg, &CRITERIA.map(|c| c.0), |_, _| {})
}

/// Serialized form compared by the determinism criterion.
pub fn report_json(r: &SuiteReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

fn determinism(cfg: &SuiteConfig) -> Outcome {
    let ids: Vec<u32> = (1..=9).collect();
    let a = report_json(&run_suite_with(cfg, &ids, |_, _| {}));
    let b = report_json(&run_suite_with(cfg, &ids, |_, _| {}));
    ensure!(a == b, "two runs of criteria 1-9 differ");
    Ok((1, format!("{} bytes identical across two runs", a.len())))
}

/// All vectors of `[−b, b]^n` as `i64`.
fn box_i64(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Modules of rank `r` with Gram entries and `μ` representatives in
/// `[−2, 2]` that pass validation. Only ε-symmetric Gram matrices can pass,
/// so the lower triangle is derived from the upper one.
fn small_modules(p: FormParameter, r: usize) -> Vec<QuadraticModule> {
    let upper = r * (r + 1) / 2;
    let mu_range: Vec<i64> = match p.lambda() {
        LambdaSub::Zero => (-2..=2).collect(),
        LambdaSub::Even => vec![0, 1],
        LambdaSub::All => vec![0],
    };
    let mut out = Vec::new();
    for entries in box_i64(upper, 2) {
        let mut gram = vec![vec![0i64; r]; r];
        let mut k = 0;
        for i in 0..r {
            for j in i..r {
                gram[i][j] = entries[k];
                gram[j][i] = p.eps() * entries[k];
                k += 1;
            }
        }
        if (0..r).any(|i| gram[i][i] != p.eps() * gram[i][i]) {
            continue;
        }
        let mut mus = vec![Vec::new()];
        for _ in 0..r {
            mus = mus.into_iter().flat_map(|v: Vec<i64>| mu_range.iter().map(move |&m| [v.clone(), vec![m]].concat())).collect();
        }
        for mu in mus {
            let m = QuadraticModule::from_i64(p, &gram, &mu).expect("shapes agree");
            if m.validate().is_ok() {
                out.push(m);
            }
        }
    }
    out
}

fn congruent(a: i64, lambda: LambdaSub) -> bool {
    match lambda {
        LambdaSub::Zero => a == 0,
        LambdaSub::Even => a % 2 == 0,
        LambdaSub::All => true,
    }
}

fn form_axioms() -> Outcome {
    let mut checked = 0u64;
    let mut modules = 0usize;
    for p in FormParameter::ALL {
        for r in 0..=3 {
            let ms = small_modules(p, r);
            modules += ms.len();
            let vectors = box_i64(r, 2);
            let wide = box_i64(r, 4);
            let pos = |v: &[i64]| v.iter().fold(0usize, |acc, &x| acc * 9 + (x + 4) as usize);
            let results: Vec<std::result::Result<u64, String>> = ms
                .par_iter()
                .map(|m| {
                    let gram: Vec<Vec<i64>> = m.gram().to_rows().iter().map(|row| row.iter().map(|x| x.to_i64().expect("small")).collect()).collect();
                    let lam = |x: &[i64], y: &[i64]| -> i64 { (0..r).map(|i| (0..r).map(|j| x[i] * gram[i][j] * y[j]).sum::<i64>()).sum() };
                    let mu: Vec<i64> = wide.iter().map(|v| m.eval_mu(&big(v)).expect("rank matches").representative().to_i64().expect("small")).collect();
                    let mut n = 0u64;
                    for x in &vectors {
                        // The library's λ agrees with the Gram matrix.
                        let lx = m.eval_lambda(&big(x), &big(x)).map_err(|e| e.to_string())?;
                        if lx != BigInt::from(lam(x, x)) {
                            return Err(format!("{m:?}: lambda({x:?}, {x:?})"));
                        }
                        for a in -2i64..=2 {
                            let ax: Vec<i64> = x.iter().map(|c| a * c).collect();
                            if !congruent(mu[pos(&ax)] - a * a * mu[pos(x)], p.lambda()) {
                                return Err(format!("{m:?}: mu({a} x) != {a}^2 mu(x) at {x:?}"));
                            }
                        }
                        for y in &vectors {
                            let l = lam(x, y);
                            if l != p.eps() * lam(y, x) {
                                return Err(format!("{m:?}: not eps-symmetric at {x:?}, {y:?}"));
                            }
                            let s: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                            if !congruent(mu[pos(&s)] - mu[pos(x)] - mu[pos(y)] - l, p.lambda()) {
                                return Err(format!("{m:?}: polarization fails at {x:?}, {y:?}"));
                            }
                            n += 3;
                        }
                    }
                    Ok(n)
                })
                .collect();
            for r in results {
                checked += r?;
            }
        }
    }
    Ok((checked, format!("{modules} modules, scaling, polarization and eps-symmetry on [-2,2]^r")))
}

/// Every move instance on `blocks` blocks valid for `param`.
fn all_moves(param: FormParameter, blocks: usize) -> Vec<ElementaryMove> {
    use ElementaryMove::*;
    let mut out = Vec::new();
    for block in 0..blocks {
        out.extend([Rot { block, sign: 1 }, Rot { block, sign: -1 }, Shear { block, dir: ShearDir::Fwd }, Shear { block, dir: ShearDir::Inv }, Flip { block }, Negate { block }]);
    }
    for i in 0..blocks {
        for j in 0..blocks {
            if i == j {
                continue;
            }
            let blocks = [i, j];
            out.extend([Cross { blocks, inverse: false }, Cross { blocks, inverse: true }, Swap { blocks }, Eichler { blocks, sign: 1 }, Eichler { blocks, sign: -1 }]);
            for scale in -3..=3 {
                out.extend([Final { blocks, scale, inverse: false }, Final { blocks, scale, inverse: true }]);
            }
        }
    }
    out.retain(|m| m.valid_for(param));
    out
}

fn move_soundness() -> Outcome {
    let mut checked = 0;
    for p in [FormParameter::SKEW_EVEN, FormParameter::SKEW_ALL] {
        for blocks in 1..=4 {
            let h = QuadraticModule::hyperbolic(p, blocks);
            let probes: Vec<Vec<BigInt>> = if blocks <= 2 { box_i64(2 * blocks, 1).iter().map(|v| big(v)).collect() } else { Vec::new() };
            for mv in all_moves(p, blocks) {
                let m = mv.matrix(blocks).map_err(|e| e.to_string())?;
                ensure!(m.is_unimodular(), "{mv} on {blocks} blocks is not unimodular");
                ensure!(is_morphism(&m, &h, &h).unwrap_or(false), "{mv} on {blocks} blocks is not an isometry for {p}");
                ensure!(mv.inverse().matrix(blocks).map_err(|e| e.to_string())?.mul(&m).is_identity(), "{mv}: inverse move does not invert");
                for v in &probes {
                    let mv_v = m.mul_vec(v);
                    ensure!(h.eval_mu(&mv_v).ok() == h.eval_mu(v).ok(), "{mv} changes mu at {v:?}");
                }
                checked += 1;
            }
        }
    }
    Ok((checked, "all move instances on H^1..H^4, both skew parameters".into()))
}

fn first_block_reduction(cfg: &SuiteConfig) -> Outcome {
    let mut rng = rng_for(cfg, 3);
    let mut checked = 0;
    let mut sampled = 0;
    for p in [FormParameter::SKEW_EVEN, FormParameter::SKEW_ALL] {
        let vectors: Vec<HVector> = box_i64(4, 3).into_iter().map(|v| HVector::from_i64(p, &v).expect("rank 4")).filter(HVector::is_unimodular).collect();
        let results: Vec<std::result::Result<HVector, String>> = vectors
            .par_iter()
            .map(|v| {
                let r = reduce_to_first_block(v).map_err(|e| format!("{v}: {e}"))?;
                let replayed = replay(&r.word, v).map_err(|e| e.to_string())?;
                if replayed != r.result || !r.result.in_first_block() || !r.result.is_unimodular() {
                    return Err(format!("{v}: word does not replay into H + 0"));
                }
                Ok(r.result)
            })
            .collect();
        let results: Vec<HVector> = results.into_iter().collect::<std::result::Result<_, _>>()?;
        checked += vectors.len() as u64;
        let mut idx: Vec<usize> = (0..vectors.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(50);
        idx.sort_unstable();
        let sample: Vec<std::result::Result<(), String>> = idx
            .par_iter()
            .map(|&i| {
                let (v, target) = (&vectors[i], &results[i]);
                let word = orbit_search(v, target, 12).map_err(|e| format!("{v}: {e}"))?.ok_or_else(|| format!("{v}: BFS found no word to {target}"))?;
                if replay(&word, v).map_err(|e| e.to_string())? != *target {
                    return Err(format!("{v}: BFS word does not replay"));
                }
                Ok(())
            })
            .collect();
        for s in sample {
            s?;
        }
        sampled += idx.len();
    }
    Ok((checked + sampled as u64, format!("{checked} unimodular vectors reduced, {sampled} cross-checked by BFS at depth 12")))
}

/// A random word of `len` generators on `blocks` blocks.
fn random_word(rng: &mut ChaCha8Rng, p: FormParameter, blocks: usize, len: usize) -> Vec<ElementaryMove> {
    let gens = ElementaryMove::generators(p, blocks);
    (0..len).map(|_| *gens.choose(rng).expect("generators exist")).collect()
}

fn random_automorphism(rng: &mut ChaCha8Rng, p: FormParameter, blocks: usize, len: usize) -> IntMatrix {
    word_matrix(&random_word(rng, p, blocks, len), blocks).expect("generators are valid")
}

fn kernel_restrictions(cfg: &SuiteConfig) -> Outcome {
    let mut rng = rng_for(cfg, 4);
    let p = FormParameter::SKEW_EVEN;
    let mut checked = 0;
    for i in 0..50 {
        let g = if i % 2 == 0 { 2 } else { 3 };
        let h = QuadraticModule::hyperbolic(p, g);
        let phi = QModMorphism::new(h.clone(), h.clone(), random_automorphism(&mut rng, p, g, 6)).map_err(|e| e.to_string())?;
        let ell: Vec<BigInt> = loop {
            let e: Vec<i64> = (0..2 * g).map(|_| rng.gen_range(-3..=3)).collect();
            if e.iter().any(|&x| x != 0) {
                break big(&e);
            }
        };
        let kr = kernel_restriction(&phi, &ell, DEFAULT_SEARCH_DEPTH).map_err(|e| format!("instance {i}: {e}"))?;
        let row = IntMatrix::from_columns(ell.len(), &[ell.clone()]).transpose();
        ensure!(kr.morphism.source == QuadraticModule::hyperbolic(p, g - 1), "instance {i}: wrong source rank");
        ensure!(kr.morphism.is_valid() && kr.ambient.is_valid(), "instance {i}: not a morphism");
        ensure!(row.mul(&kr.kernel_basis).is_zero(), "instance {i}: kernel basis leaves ker(l)");
        ensure!(row.mul(&kr.ambient.matrix).is_zero(), "instance {i}: image leaves ker(l)");
        ensure!(kr.kernel_basis.mul(&kr.morphism.matrix) == kr.ambient.matrix, "instance {i}: ambient map inconsistent");
        ensure!(kr.kernel_basis.cols() == 2 * g - 1 && kr.kernel_basis.invariant_factors().iter().all(|d| d.is_one()), "instance {i}: kernel basis not saturated of corank 1");
        checked += 1;
    }
    Ok((checked, "25 instances on H^2 and 25 on H^3".into()))
}

fn golden_complex(name: &str) -> Option<Vec<HomologyGroup>> {
    let top = 2;
    let h = match name {
        "boundary_of_triangle" => SimplicialComplex::boundary_of_simplex(2).homology(1),
        "boundary_of_tetrahedron" => SimplicialComplex::boundary_of_simplex(3).homology(top),
        "projective_plane_6" => projective_plane_6().homology(top),
        "semisimplicial_torus" => SemiSimplicialSet::torus().homology(top),
        _ => return None,
    };
    Some(h.unreduced)
}

fn homology_goldens(cfg: &SuiteConfig) -> Outcome {
    let v = io::parse_json(&cfg.goldens).map_err(|e| format!("golden file: {e}"))?;
    let obj = v.as_object().ok_or("golden file must be an object")?;
    ensure!(obj.len() == 4, "golden file lists {} complexes, expected 4", obj.len());
    let mut checked = 0;
    for (name, expected) in obj {
        let expected: Vec<HomologyGroup> = expected.as_array().ok_or(format!("{name}: expected a list"))?.iter().map(io::group_from_value).collect::<crate::Result<_>>().map_err(|e| format!("{name}: {e}"))?;
        let got = golden_complex(name).ok_or(format!("unknown golden complex {name}"))?;
        ensure!(got == expected, "{name}: computed {} but golden says {}", fmt_groups(&got), fmt_groups(&expected));
        checked += expected.len() as u64;
    }
    Ok((checked, "boundary of triangle, boundary of tetrahedron, RP^2, torus".into()))
}

fn fmt_groups(gs: &[HomologyGroup]) -> String {
    gs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn random_flag_complex(rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let n = rng.gen_range(1..=10);
    let density = rng.gen_range(0.3..0.95);
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(density)).collect();
    SimplicialComplex::flag(n, &edges).expect("valid edges")
}

fn cohen_macaulay(cfg: &SuiteConfig) -> Outcome {
    ensure!(is_wcm(&SimplicialComplex::boundary_of_simplex(3), 2, cfg.pi1_budget).holds, "wCM(boundary of tetrahedron) >= 2 not certified");
    let mut rng = rng_for(cfg, 6);
    let cases: Vec<(SimplicialComplex, i64)> = (0..200).map(|_| (random_flag_complex(&mut rng), rng.gen_range(1..=3))).collect();
    let results: Vec<std::result::Result<(bool, u64), String>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (x, n))| {
            if !is_lcm(x, *n, cfg.pi1_budget).holds {
                return Ok((false, 0));
            }
            let mut links = 0;
            for sigma in x.all_faces() {
                let p = sigma.len() as i64 - 1;
                let link = x.link(&sigma).map_err(|e| e.to_string())?;
                if !is_wcm(&link, n - p - 1, cfg.pi1_budget).holds {
                    return Err(format!("complex {i}: lCM >= {n} but link of {sigma:?} fails wCM >= {}", n - p - 1));
                }
                links += 1;
            }
            Ok((true, links))
        })
        .collect();
    let mut hyp = 0;
    let mut links = 0;
    for r in results {
        let (h, l) = r?;
        hyp += u64::from(h);
        links += l;
    }
    Ok((1 + links, format!("200 random flag complexes, {hyp} satisfy the hypothesis, {links} links checked")))
}

fn ka_structure(cfg: &SuiteConfig) -> Outcome {
    let k = build_ka(&QuadraticModule::hyperbolic(FormParameter::SYMMETRIC_EVEN, 1), 1).map_err(|e| e.to_string())?;
    let edges = k.edges().map_err(|e| e.to_string())?.len();
    ensure!(k.vertex_count() == 4 && edges == 0, "K^a(H, +1) at bound 1: {} vertices, {edges} edges", k.vertex_count());
    for p in FormParameter::ALL {
        let k = build_ka(&QuadraticModule::hyperbolic(p, 2), 1).map_err(|e| e.to_string())?;
        ensure!(k.vertex_count() > 0, "K^a(H^2) empty for {p}");
    }
    let p = FormParameter::SKEW_EVEN;
    let k = build_ka(&QuadraticModule::hyperbolic(p, 4), 1).map_err(|e| e.to_string())?;
    let comps = k.components();
    ensure!(comps.count == 1, "K^a(H^4) at bound 1 has {} components", comps.count);
    let mut rng = rng_for(cfg, 7);
    let n = k.vertex_count();
    let mut middle_in_truncation = 0;
    for t in 0..20 {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (h, h0) = (k.vertex(a).morphism, k.vertex(b).morphism);
        let path = prop43_connect(&h, &h0, 1).map_err(|e| format!("pair {t} ({a}, {b}): {e}"))?.ok_or(format!("pair {t} ({a}, {b}): no path"))?;
        ensure!(path.len() <= 3 && path[0] == h && path[path.len() - 1] == h0, "pair {t}: malformed path");
        for w in path.windows(2) {
            ensure!(w[0].matrix.transpose().mul(k.ambient().gram()).mul(&w[1].matrix).is_zero(), "pair {t}: consecutive vertices not orthogonal");
        }
        if path.len() == 3 && k.index_of(&path[1].matrix).is_some() {
            middle_in_truncation += 1;
        }
    }
    Ok((24, format!("H^4 truncation: {n} vertices, connected ({:?}); 20 prop43 paths, {middle_in_truncation} middle vertices within bound 1", comps.method)))
}

/// A random unimodular matrix: `steps` column operations `c_j += ±c_i`.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        for r in 0..n {
            let add = &m[(r, i)] * s;
            m[(r, j)] += add;
        }
    }
    m
}

fn max_entry(m: &IntMatrix) -> BigInt {
    m.max_abs()
}

fn transitivity_and_cancellation(cfg: &SuiteConfig) -> Outcome {
    let mut rng = rng_for(cfg, 8);
    let g = 3;
    let params = FormParameter::ALL;
    let complexes: Vec<KaComplex> = params.iter().map(|&p| build_ka(&QuadraticModule::hyperbolic(p, g), 1)).collect::<crate::Result<_>>().map_err(|e| e.to_string())?;
    let mut path_lengths = Vec::new();
    for t in 0..25 {
        let (p, k) = (params[t % 3], &complexes[t % 3]);
        let h = QuadraticModule::hyperbolic(p, 1);
        let hg = QuadraticModule::hyperbolic(p, g);
        let h0 = QModMorphism::new(h.clone(), hg.clone(), IntMatrix::identity(2 * g).column_range(0, 2)).map_err(|e| e.to_string())?;
        // Transitivity: h1 = σ ∘ h0 for a random automorphism σ, kept
        // inside the coefficient box so that h1 is a vertex.
        let sigma = loop {
            let s = random_automorphism(&mut rng, p, g, 6);
            if max_entry(&s.column_range(0, 2)) <= BigInt::one() && s.column_range(0, 2) != h0.matrix {
                break s;
            }
        };
        let h1 = QModMorphism::new(h.clone(), hg.clone(), sigma.column_range(0, 2)).map_err(|e| e.to_string())?;
        let w = k.transitivity_witness(&h0, &h1).map_err(|e| format!("instance {t}: {e}"))?.ok_or(format!("instance {t}: no path in the truncation"))?;
        ensure!(w.automorphism.matrix.mul(&h0.matrix) == h1.matrix, "instance {t}: f o h0 != h1");
        ensure!(w.automorphism.is_isomorphism(), "instance {t}: f is not an automorphism");
        path_lengths.push(w.path.len() - 1);
        // Cancellation: M = H^{g-1}, N = M in a random basis B, and
        // φ = (B⁻¹ ⊕ 1) ∘ τ for a random automorphism τ of H^g.
        let m = QuadraticModule::hyperbolic(p, g - 1);
        let (n, phi) = loop {
            let b = random_unimodular(&mut rng, 2 * (g - 1), 2);
            let tau = random_automorphism(&mut rng, p, g, 3);
            let b_inv = b.unimodular_inverse().expect("unimodular");
            let phi = b_inv.block_diag(&IntMatrix::identity(2)).mul(&tau);
            if max_entry(&phi.column_range(2 * g - 2, 2 * g)) <= BigInt::one() {
                break (m.restrict(&b).map_err(|e| e.to_string())?, phi);
            }
        };
        let nh = n.direct_sum(&h).map_err(|e| e.to_string())?;
        let phi = QModMorphism::new(hg.clone(), nh, phi).map_err(|e| format!("instance {t}: synthesized phi: {e}"))?;
        let c = cancellation_witness(&m, &n, &phi, 1).map_err(|e| format!("instance {t}: {e}"))?.ok_or(format!("instance {t}: cancellation not found in the truncation"))?;
        let f = &c.isomorphism;
        let inv = f.inverse().ok_or(format!("instance {t}: M -> N not invertible"))?;
        ensure!(f.is_valid() && inv.is_valid(), "instance {t}: not a morphism in both directions");
        ensure!(inv.matrix.mul(&f.matrix).is_identity() && f.matrix.mul(&inv.matrix).is_identity(), "instance {t}: no round trip");
    }
    let longest = path_lengths.iter().max().copied().unwrap_or(0);
    Ok((50, format!("25 instances on H^3 over all parameters; transitivity paths up to length {longest}")))
}

fn arf_suite(cfg: &SuiteConfig) -> Outcome {
    let p = FormParameter::SKEW_EVEN;
    let mut checked = 0;
    for g in 0..=5 {
        let a = QuadraticModule::hyperbolic(p, g).arf_invariant().map_err(|e| e.to_string())?;
        ensure!(!a, "Arf(H^{g}) = 1");
        checked += 1;
    }
    // Nondegenerate modules with entries in [−1, 1], ranks 0, 2 and 4.
    let mut small: Vec<QuadraticModule> = Vec::new();
    for r in [0, 2, 4] {
        small.extend(small_skew_modules(r).into_iter().filter(|m| m.determinant().to_i64().is_some_and(|d| d % 2 != 0)));
    }
    let arf = |m: &QuadraticModule| m.arf_invariant().map_err(|e| format!("{m:?}: {e}"));
    for m in small.iter().filter(|m| m.rank() == 2) {
        // Rank 2 oracle: with λ(e, f) odd, Arf = μ(e)μ(f).
        let mu: Vec<bool> = m.mu_basis().iter().map(|x| !x.is_zero()).collect();
        ensure!(arf(m)? == (mu[0] && mu[1]), "{m:?}: rank-2 Arf mismatch");
        checked += 1;
    }
    for a in &small {
        for b in &small {
            if a.rank() + b.rank() > 4 {
                continue;
            }
            let s = a.direct_sum(b).map_err(|e| e.to_string())?;
            ensure!(arf(&s)? == (arf(a)? ^ arf(b)?), "Arf not additive on {a:?} + {b:?}");
            checked += 1;
        }
    }
    // One RNG stream per form keeps the parallel run reproducible.
    let moved: u64 = small
        .par_iter()
        .enumerate()
        .map(|(i, m)| -> Result<u64, String> {
            let mut rng = rng_for(cfg, 9);
            rng.set_stream(i as u64 + 1);
            let base = arf(m)?;
            for _ in 0..100 {
                let b = random_unimodular(&mut rng, m.rank(), 4);
                let moved = m.restrict(&b).map_err(|e| e.to_string())?;
                ensure!(arf(&moved)? == base, "Arf changed under a base change of {m:?}");
            }
            Ok(100)
        })
        .collect::<Result<Vec<u64>, String>>()?
        .iter()
        .sum();
    checked += moved;
    Ok((checked, format!("{} nondegenerate forms of rank <= 4", small.len())))
}

fn small_skew_modules(r: usize) -> Vec<QuadraticModule> {
    let p = FormParameter::SKEW_EVEN;
    let mut out = Vec::new();
    for entries in box_i64(r * (r.max(1) - 1) / 2, 1) {
        let mut gram = vec![vec![0i64; r]; r];
        let mut k = 0;
        for i in 0..r {
            for j in i + 1..r {
                gram[i][j] = entries[k];
                gram[j][i] = -entries[k];
                k += 1;
            }
        }
        for bits in 0..1u32 << r {
            let mu: Vec<i64> = (0..r).map(|i| i64::from(bits >> i & 1)).collect();
            out.push(QuadraticModule::from_i64(p, &gram, &mu).expect("shapes agree"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_module_counts() {
        // Oracle: for (−1, ℤ) and rank 2 the Gram is [[0, a], [−a, 0]] with a in [−2, 2].
        assert_eq!(small_modules(FormParameter::SKEW_ALL, 2).len(), 5);
        // (+1, {0}): diagonal 2μ with μ in [−1, 1], off-diagonal free.
        assert_eq!(small_modules(FormParameter::SYMMETRIC_EVEN, 2).len(), 9 * 5);
        assert_eq!(small_modules(FormParameter::SKEW_EVEN, 1).len(), 2);
    }

    #[test]
    fn box_is_lexicographic() {
        assert_eq!(box_i64(2, 1)[..3], [vec![-1, -1], vec![-1, 0], vec![-1, 1]]);
        assert_eq!(box_i64(0, 3), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn random_unimodular_is_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..5 {
            assert!(random_unimodular(&mut rng, n, 6).is_unimodular());
        }
    }

    #[test]
    fn corrupted_goldens_fail_criterion_five() {
        let cfg = SuiteConfig { goldens: GOLDEN_HOMOLOGY.replace("[\"2\"]", "[\"3\"]"), ..SuiteConfig::default() };
        let r = run_criterion(5, &cfg);
        assert!(!r.passed);
        assert!(r.detail.contains("projective_plane_6"));
        assert!(run_criterion(5, &SuiteConfig::default()).passed);
    }
}
