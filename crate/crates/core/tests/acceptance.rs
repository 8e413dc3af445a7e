//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion outside `KNOWN_FAILURES` fails or a
//! listed one passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use awlab_core::aw3::{aw_residual, build_rep, casimir_q, root_forms, validate_positivity, AlphaParams, Param};
use awlab_core::error::AwError;
use awlab_core::linalg::comm_residual;
use awlab_core::qcore::QContext;
use awlab_core::report::CheckReport;
use awlab_core::suite::{run_group, Group, SuiteConfig};
use awlab_core::uqsl2::{embedding_structure, solve_embedding};
use awlab_core::aw3::AwStructure;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria whose failure is documented and expected: the root-form
/// closed form of the Casimir value does not match the matrix Casimir.
/// A listed criterion that starts passing is reported so the list is kept
/// current.
const KNOWN_FAILURES: &[u32] = &[2];

const ALPHA_POOL: [[f64; 3]; 5] =
    [[0.3, 0.8, 0.2], [0.5, 1.1, -0.3], [0.2, 0.6, 0.4], [1.0, 0.4, 0.1], [0.7, 1.5, -0.6]];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn cfg(q: f64, n: usize, n1: usize, n2: usize, alpha: [f64; 3]) -> SuiteConfig {
    SuiteConfig { q, n, n1, n2, alpha, ..Default::default() }
}

/// Alpha sets from the pool whose rank-1 representation of dimension
/// `n + 1` has positive squared off-diagonal entries.
fn validated_alphas(q: f64, n: usize, want: usize) -> Vec<[f64; 3]> {
    let ctx = QContext::<f64>::new(q).unwrap();
    ALPHA_POOL
        .iter()
        .copied()
        .filter(|a| {
            let p = AlphaParams::finite(&ctx, a[0], a[1], a[2], n);
            validate_positivity(&ctx, &p, n).is_ok()
        })
        .take(want)
        .collect()
}

/// Running tally over selected checks.
#[derive(Default)]
struct Tally {
    worst: f64,
    count: usize,
    failures: Vec<String>,
}

impl Tally {
    fn add(&mut self, r: &CheckReport) {
        self.count += 1;
        if r.residual.is_finite() {
            self.worst = self.worst.max(r.residual);
        } else {
            self.worst = f64::INFINITY;
        }
        if !r.pass {
            let mut point: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            point.sort();
            self.failures.push(format!("{} [{}] residual {:.3e} {}", r.check_id, point.join(" "), r.residual, r.notes));
        }
    }

    fn absorb(&mut self, reports: &[CheckReport], select: impl Fn(&str) -> bool) {
        for r in reports.iter().filter(|r| select(&r.check_id)) {
            self.add(r);
        }
    }

    fn ok(&self) -> bool {
        self.count > 0 && self.failures.is_empty()
    }

    fn summary(&self) -> String {
        let mut s = format!("{} checks, worst residual {:.3e}", self.count, self.worst);
        if let Some(f) = self.failures.first() {
            s.push_str(&format!("; first failure: {f}"));
        }
        s
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed())
}

fn rank1_representation() -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    let mut short = Vec::new();
    let (_, elapsed) = timed(|| {
        for q in [0.5, 0.8] {
            let ctx = QContext::<f64>::new(q).unwrap();
            for n in 1..=8 {
                let sets = validated_alphas(q, n, 2);
                if sets.len() < 2 {
                    short.push(format!("q={q} N={n}"));
                }
                for a in sets {
                    let p = AlphaParams::finite(&ctx, a[0], a[1], a[2], n);
                    let r = build_rep(&ctx, &p, n)
                        .and_then(|rep| aw_residual(&ctx, &rep.k, &rep.l, &p.consts(&ctx).map(Param::Scalar)))
                        .map_or(f64::INFINITY, |x| x.max_rel());
                    worst = worst.max(r);
                    count += 1;
                }
            }
        }
    });
    let pass = worst <= 1e-10 && short.is_empty() && elapsed < Duration::from_secs(1);
    Outcome {
        id: 1,
        title: "AW(3) representation residuals <= 1e-10, q in {0.5, 0.8}, N = 1..8",
        pass,
        detail: format!(
            "{count} representations, worst residual {worst:.3e}, runtime {:.3} s{}",
            elapsed.as_secs_f64(),
            if short.is_empty() { String::new() } else { format!("; fewer than two valid alpha sets at {}", short.join(", ")) }
        ),
    }
}

fn casimir() -> Outcome {
    let mut commutes = 0.0_f64;
    let mut root_form = 0.0_f64;
    let mut worst_point = String::new();
    for q in [0.5, 0.8] {
        let ctx = QContext::<f64>::new(q).unwrap();
        for n in 1..=8 {
            for a in validated_alphas(q, n, 2) {
                let p = AlphaParams::finite(&ctx, a[0], a[1], a[2], n);
                let rep = build_rep(&ctx, &p, n).unwrap();
                let qm = casimir_q(&ctx, &rep.k, &rep.l, &p.structure(&ctx)).unwrap();
                let c = comm_residual(&qm, &rep.k).unwrap().max(comm_residual(&qm, &rep.l).unwrap());
                commutes = commutes.max(c);
                let q0 = qm[(0, 0)];
                let closed = root_forms(&ctx, &p.roots()).q0;
                let gap = (closed - q0).abs() / q0.abs().max(1.0);
                if gap > root_form {
                    root_form = gap;
                    worst_point = format!("q={q} N={n} matrix {q0:.6e} vs closed form {closed:.6e}");
                }
            }
        }
    }
    Outcome {
        id: 2,
        title: "Casimir commutes to 1e-10 and matches its root-form closed form to 1e-9",
        pass: commutes <= 1e-10 && root_form <= 1e-9,
        detail: format!("commutator {commutes:.3e}; closed-form gap {root_form:.3e} (worst at {worst_point})"),
    }
}

fn qracah_agreement() -> Outcome {
    let mut t = Tally::default();
    for q in [0.5, 0.7, 0.8] {
        for n in 0..=8 {
            for a in validated_alphas(q, n, 2) {
                let r = run_group::<f64>(Group::QRacah, &cfg(q, n, 0, 0, a));
                t.absorb(&r, |id| id == "qracah.triple" || id == "qracah.orthogonality" || id.ends_with(".error"));
            }
        }
    }
    Outcome {
        id: 3,
        title: "q-Racah triple agreement to 1e-8 and orthogonality to 1e-9, N <= 8",
        pass: t.ok(),
        detail: t.summary(),
    }
}

fn tensor_table() -> Outcome {
    let mut t = Tally::default();
    let (_, elapsed) = timed(|| {
        for q in [0.5, 0.8] {
            for n1 in 0..=5 {
                for n2 in 0..=5 {
                    let r = run_group::<f64>(Group::UqTensor, &cfg(q, 0, n1, n2, [0.3, 0.8, 0.2]));
                    t.absorb(&r, |id| {
                        id.starts_with("uq.tensor.") || id.starts_with("uq.commuting.") || id.ends_with(".error")
                    });
                }
            }
        }
    });
    Outcome {
        id: 4,
        title: "tensor-product relations, locality and commuting pairs <= 1e-10, N1, N2 <= 5",
        pass: t.ok() && elapsed < Duration::from_secs(5),
        detail: format!("{}, runtime {:.3} s", t.summary(), elapsed.as_secs_f64()),
    }
}

fn matrix_casimir_embedding() -> Outcome {
    let mut t = Tally::default();
    for q in [0.5, 0.8] {
        for n in 0..=8 {
            let r = run_group::<f64>(Group::UqSingle, &cfg(q, 0, n, n, [0.3, 0.8, 0.2]));
            t.absorb(&r, |id| id == "uq.embedding.matrix_omega" || id.ends_with(".error"));
        }
    }
    Outcome {
        id: 5,
        title: "embedding with matrix-valued Casimir <= 1e-10 on irreps N <= 8",
        pass: t.ok(),
        detail: t.summary(),
    }
}

fn embedding_solver() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x05ee_da11);
    let ctx = QContext::<f64>::new(0.7).unwrap();
    let mut worst = 0.0_f64;
    let mut recovered = 0;
    let trials = 12;
    for _ in 0..trials {
        let mut pick = |lo: f64, hi: f64| {
            let v: f64 = rng.gen_range(lo..hi);
            if rng.gen_bool(0.5) { v } else { -v }
        };
        let (a_s, b_t, theta, be_bf, ae_af) = (pick(0.2, 2.0), pick(0.2, 2.0), pick(0.2, 2.0), pick(0.2, 2.0), pick(0.2, 2.0));
        let n = rng.gen_range(0..6) as f64;
        let om0 = ctx.ch(n + 1.0);
        let s = embedding_structure(&ctx, a_s, b_t, theta, om0, be_bf, ae_af);
        match solve_embedding(&ctx, &s, om0) {
            Ok(sols) if !sols.is_empty() => {
                worst = sols.iter().map(|x| x.residual).fold(worst, f64::max);
                let hit = sols.iter().any(|x| {
                    (x.a_s - a_s).abs() <= 1e-8 * a_s.abs().max(1.0)
                        && (x.b_t - b_t).abs() <= 1e-8 * b_t.abs().max(1.0)
                        && (x.theta - theta).abs() <= 1e-8 * theta.abs().max(1.0)
                });
                if hit {
                    recovered += 1;
                }
            }
            _ => worst = f64::INFINITY,
        }
    }
    let excluded = AwStructure { b: 0.0, c0: 0.0, c1: 0.0, d0: 0.0, d1: 1.0 };
    let no_solution = matches!(solve_embedding(&ctx, &excluded, ctx.ch(3.0)), Err(AwError::NoSolution(_)));
    Outcome {
        id: 6,
        title: "embedding solver round trip to 1e-8 on random tuples; excluded case has no solution",
        pass: worst <= 1e-8 && recovered == trials && no_solution,
        detail: format!(
            "{recovered}/{trials} tuples recovered, worst rebuilt-structure error {worst:.3e}, excluded case {}",
            if no_solution { "reports NoSolution" } else { "does not report NoSolution" }
        ),
    }
}

fn four_fold() -> Outcome {
    let mut rel = Tally::default();
    let mut power = Tally::default();
    for q in [0.5, 0.8] {
        for n1 in 0..=4 {
            for n2 in 0..=4 {
                let r = run_group::<f64>(Group::UqFourFold, &cfg(q, 0, n1, n2, [0.3, 0.8, 0.2]));
                rel.absorb(&r, |id| id == "uq.four_fold.relation" || id.ends_with(".error"));
                power.absorb(&r, |id| id == "uq.four_fold.beta_power");
            }
        }
    }
    Outcome {
        id: 7,
        title: "four-fold relation <= 1e-9 for N1, N2 <= 4; 1% change of beta exceeds 1e-3",
        pass: rel.ok() && power.ok(),
        detail: format!("relation: {}; perturbation: {}", rel.summary(), power.summary()),
    }
}

fn rank2_algebra() -> Outcome {
    let mut t = Tally::default();
    let (_, elapsed) = timed(|| {
        for q in [0.5, 0.8] {
            for n1 in 1..=6 {
                for n2 in 0..=6 {
                    let r = run_group::<f64>(Group::Rank2Algebra, &cfg(q, 0, n1, n2, [0.3, 0.8, 0.2]));
                    t.absorb(&r, |id| {
                        id.starts_with("rank2.relation.")
                            || id.starts_with("rank2.commutator")
                            || id == "rank2.locality"
                            || id == "rank2.stencil.off_stencil"
                            || id == "rank2.e_consistency"
                            || id.ends_with(".error")
                    });
                }
            }
        }
    });
    Outcome {
        id: 8,
        title: "rank-2 relations, locality, commutators <= 1e-9, 1 <= N1 <= 6, N2 <= 6; stencil <= 1e-12; e-consistency <= 1e-10",
        pass: t.ok() && elapsed < Duration::from_secs(10),
        detail: format!("{}, runtime {:.3} s", t.summary(), elapsed.as_secs_f64()),
    }
}

fn bivariate() -> Outcome {
    let mut t = Tally::default();
    for q in [0.5, 0.8] {
        for a in [[0.3, 0.8, 0.2], [0.5, 1.1, -0.3]] {
            for (n1, n2) in [(2, 2), (3, 2), (4, 3)] {
                let r = run_group::<f64>(Group::Bivariate, &cfg(q, 0, n1, n2, a));
                t.absorb(&r, |id| {
                    id == "rank2.bivariate.product_formula" || id == "rank2.bivariate.orthogonality" || id.ends_with(".error")
                });
            }
        }
    }
    Outcome {
        id: 9,
        title: "bivariate overlaps match the product formula to 1e-7; orthogonality to 1e-8",
        pass: t.ok(),
        detail: t.summary(),
    }
}

fn gasper_rahman() -> Outcome {
    let mut t = Tally::default();
    for q in [0.5, 0.8] {
        for a in [[0.3, 0.8, 0.2], [0.5, 1.1, -0.3]] {
            let r = run_group::<f64>(Group::GasperRahman, &cfg(q, 0, 3, 3, a));
            t.absorb(&r, |id| id == "rank2.gasper_rahman.ratio_spread" || id.ends_with(".error"));
        }
    }
    Outcome {
        id: 10,
        title: "Gasper-Rahman ratio constant to 1e-8 at (3,3)",
        pass: t.ok(),
        detail: t.summary(),
    }
}

fn adjudications() -> Outcome {
    const TARGETS: [&str; 4] = [
        "aw3.adjudicate.dual_root_s3",
        "aw3.adjudicate.char_poly_variable",
        "rank2.adjudicate.coupling_constant",
        "uq.adjudicate.relation_sign",
    ];
    let mut resolved: Vec<(String, Vec<String>)> = TARGETS.iter().map(|t| (t.to_string(), Vec::new())).collect();
    let mut problems = Vec::new();
    for q in [0.5, 0.8] {
        for (n, n1, n2) in [(0, 0, 0), (3, 2, 2), (6, 4, 3)] {
            let c = cfg(q, n, n1, n2, [0.3, 0.8, 0.2]);
            let mut reports = run_group::<f64>(Group::Aw3, &c);
            reports.extend(run_group::<f64>(Group::UqTensor, &c));
            reports.extend(run_group::<f64>(Group::Rank2Adjudicate, &c));
            for (id, names) in resolved.iter_mut() {
                match reports.iter().find(|r| &r.check_id == id) {
                    Some(r) if r.pass => {
                        let name = r.notes.strip_prefix("resolved: ").and_then(|s| s.split(" | ").next());
                        match name {
                            Some(n) => names.push(n.to_string()),
                            None => problems.push(format!("{id} at q={q}: no resolved candidate named")),
                        }
                    }
                    Some(r) => problems.push(format!("{id} at q={q}: {}", r.notes)),
                    None => problems.push(format!("{id} at q={q}: missing")),
                }
            }
        }
    }
    let mut named = Vec::new();
    for (id, names) in &resolved {
        let mut distinct = names.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != 1 {
            problems.push(format!("{id} resolves inconsistently: {distinct:?}"));
        } else {
            named.push(format!("{id} -> {}", distinct[0]));
        }
    }
    Outcome {
        id: 11,
        title: "each open reading resolves to exactly one named candidate",
        pass: problems.is_empty(),
        detail: if problems.is_empty() { named.join("; ") } else { problems.join("; ") },
    }
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 11] = [
        rank1_representation,
        casimir,
        qracah_agreement,
        tensor_table,
        matrix_casimir_embedding,
        embedding_solver,
        four_fold,
        rank2_algebra,
        bivariate,
        gasper_rahman,
        adjudications,
    ];
    let mut unexpected = Vec::new();
    for run in criteria {
        let (o, elapsed) = timed(run);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known = !o.pass && KNOWN_FAILURES.contains(&o.id);
        println!(
            "{tag} criterion {:>2}: {} | {} | {:.2} s{}",
            o.id,
            o.title,
            o.detail,
            elapsed.as_secs_f64(),
            if known { " | known failure" } else { "" }
        );
        if !o.pass && !known {
            unexpected.push(format!("criterion {} failed", o.id));
        }
        if o.pass && KNOWN_FAILURES.contains(&o.id) {
            unexpected.push(format!("criterion {} passed but is listed as a known failure", o.id));
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected outcomes: {}", unexpected.join("; "));
        ExitCode::FAILURE
    }
}
