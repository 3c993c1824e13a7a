//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use epr_ledger::cli::{self, report::analytic_values, RunConfig};
use epr_ledger::inference::{
    agreement_rate, estimate_mutual_information, score_forecasts, sequential_posterior,
    EmpiricalJoint, ForecastPolicy, Posterior,
};
use epr_ledger::info::{
    entropy, joint_entropy, marginal, mutual_information, pseudo_information, table_i, table_ii,
    JointPairDistribution, OutcomeDistribution, Party, SpinOutcome,
};
use epr_ledger::rng::{RngPolicy, TrialStream, FORECASTER_DOMAIN};
use epr_ledger::sim::{run_experiment, run_trial, SourceModel};
use epr_ledger::spacetime::{interval_class, GeometryConfig, IntervalClass};

const N: u64 = 100_000;
const SEED: u64 = 42;
const EXACT: f64 = 1e-12;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(value: f64, target: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure(
        (value - target).abs() <= tol,
        format!("{what} = {value}, expected {target} ± {tol}"),
    )
}

fn four_sigma(n: u64) -> f64 {
    4.0 * 0.5 / (n as f64).sqrt()
}

fn analytic_ledger() -> Check {
    let a = analytic_values().map_err(|e| e.to_string())?;
    let checks = [
        ("I_pair", a.i_pair.0, LN_2),
        ("I_e1", a.i_e1.0, LN_2),
        ("I_e2", a.i_e2.0, 0.0),
        ("dI_e", a.delta_i_e.0, -LN_2),
        ("I_p1", a.i_p1.0, LN_2),
        ("dI_p", a.delta_i_p.0, -LN_2),
        ("dI_pair", a.delta_i_pair.0, -2.0 * LN_2),
        ("I*_pair", a.i_pair_star.0, 2.0 * LN_2),
        ("I_a-p", a.i_a_p.0, LN_2),
        ("H(Table I)", joint_entropy(&table_i()).0, LN_2),
        ("H(Table II)", joint_entropy(&table_ii()).0, 2.0 * LN_2),
        (
            "H(uniform)",
            entropy(&OutcomeDistribution::uniform()).0,
            LN_2,
        ),
        (
            "H(certain)",
            entropy(&OutcomeDistribution::certain(SpinOutcome::Plus)).0,
            0.0,
        ),
        ("audit I discrepancy", a.audit_table_i.discrepancy.0, LN_2),
        ("audit II discrepancy", a.audit_table_ii.discrepancy.0, 0.0),
    ];
    for (what, v, t) in checks {
        within(v, t, EXACT, what)?;
    }
    Ok(format!("{} values within {EXACT:e}", checks.len()))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn entangled_source() -> Check {
    let (out, elapsed) = timed(|| -> Result<_, String> {
        let recs = run_experiment(
            &GeometryConfig::default(),
            &SourceModel::Entangled,
            &RngPolicy::new(SEED),
            N,
        )
        .map_err(|e| e.to_string())?;
        let emp = EmpiricalJoint::from_records(&recs);
        let mi = estimate_mutual_information(&emp)
            .map_err(|e| e.to_string())?
            .0;
        let forecaster = RngPolicy::new(SEED).derive(FORECASTER_DOMAIN);
        let acc = score_forecasts(ForecastPolicy::AssumeEntangled, &recs, &forecaster)
            .map_err(|e| e.to_string())?;
        Ok((emp.agreements(), mi, acc))
    });
    let (agreements, mi, acc) = out?;
    ensure(agreements == 0, format!("{agreements} agreeing trials"))?;
    within(mi, LN_2, 0.01, "MI estimate")?;
    ensure(acc == 1.0, format!("AssumeEntangled accuracy {acc}"))?;
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "agreements 0, MI {mi:.6}, accuracy 1.0, {elapsed:.2?}"
    ))
}

fn independent_source() -> Check {
    let (out, elapsed) = timed(|| -> Result<_, String> {
        let recs = run_experiment(
            &GeometryConfig::default(),
            &SourceModel::Independent,
            &RngPolicy::new(SEED),
            N,
        )
        .map_err(|e| e.to_string())?;
        let emp = EmpiricalJoint::from_records(&recs);
        let rate = agreement_rate(&emp).map_err(|e| e.to_string())?;
        let mi = estimate_mutual_information(&emp)
            .map_err(|e| e.to_string())?
            .0;
        let post = Posterior::from_counts(0.0, &emp);
        Ok((rate, mi, post))
    });
    let (rate, mi, post) = out?;
    within(rate, 0.5, four_sigma(N), "agreement rate")?;
    ensure(mi < 0.001, format!("MI estimate {mi}"))?;
    ensure(
        post.collapsed_to_independent(),
        "posterior did not collapse",
    )?;
    ensure(
        post.p_entangled() == 0.0,
        "P(entangled) nonzero after collapse",
    )?;
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "agreement {rate:.5}, MI {mi:.2e}, collapsed, {elapsed:.2?}"
    ))
}

fn posterior_oracle() -> Check {
    let cells = [
        (SpinOutcome::Plus, SpinOutcome::Plus),
        (SpinOutcome::Plus, SpinOutcome::Minus),
        (SpinOutcome::Minus, SpinOutcome::Plus),
        (SpinOutcome::Minus, SpinOutcome::Minus),
    ];
    let mut checked = 0;
    for n in 0..=3u32 {
        for code in 0..4usize.pow(n) {
            let seq: Vec<_> = (0..n).map(|i| cells[(code / 4usize.pow(i)) % 4]).collect();
            // Bayes over the product likelihoods of both tables, prior odds 1
            let l1: f64 = seq.iter().map(|&(a, b)| table_i().prob(a, b)).product();
            let l2: f64 = seq.iter().map(|&(a, b)| table_ii().prob(a, b)).product();
            let oracle = 0.5 * l1 / (0.5 * l1 + 0.5 * l2);
            let p = sequential_posterior(0.0, seq.iter().copied()).p_entangled();
            ensure(p == oracle, format!("{seq:?}: {p} vs {oracle}"))?;
            checked += 1;
        }
    }
    let twenty = sequential_posterior(
        0.0,
        (0..20).map(|_| (SpinOutcome::Plus, SpinOutcome::Minus)),
    );
    let closed = 2f64.powi(20) / (1.0 + 2f64.powi(20));
    within(twenty.p_entangled(), closed, EXACT, "P(entangled) after 20")?;
    Ok(format!("{checked} sequences exact; 2^20/(1+2^20) matched"))
}

fn random_geometry(s: &mut TrialStream) -> GeometryConfig {
    let mut pos = || 20.0 * s.uniform() - 10.0;
    let (xs, xa, xb, xc) = (pos(), pos(), pos(), pos());
    let t1 = (xa - xs).abs() + 5.0 * s.uniform();
    let t2 = t1.max((xb - xs).abs()) + 1e-3 + 5.0 * s.uniform();
    GeometryConfig {
        x_source: xs,
        x_alice: xa,
        x_bob: xb,
        x_charles: xc,
        t1,
        t2,
    }
}

fn causality() -> Check {
    let mut s = RngPolicy::new(SEED).stream(u64::MAX);
    let rng = RngPolicy::new(SEED);
    for i in 0..10_000u64 {
        let g = random_geometry(&mut s);
        let rec =
            run_trial(&g, &SourceModel::Independent, &rng, i).map_err(|e| format!("{g:?}: {e}"))?;
        ensure(
            rec.arrival_alice_msg >= g.t1 + (g.x_charles - g.x_alice).abs(),
            format!("Alice message early in {g:?}"),
        )?;
        ensure(
            rec.arrival_bob_msg >= g.t2 + (g.x_charles - g.x_bob).abs(),
            format!("Bob message early in {g:?}"),
        )?;
        ensure(
            rec.arrival_alice_msg >= g.t1 && rec.arrival_bob_msg >= g.t2,
            "arrival before send",
        )?;
    }
    let g = GeometryConfig::default();
    ensure(
        interval_class(&g.alice_event(), &g.bob_event()) == IntervalClass::Spacelike,
        "default measurements not spacelike",
    )?;
    within(g.t2 - g.t1, 0.1, EXACT, "default Δt")?;
    within(g.l_ab(), 1.0, EXACT, "default l_ab")?;
    ensure(g.t2 - g.t1 < g.l_ab(), "Δt ≥ l_ab")?;
    Ok("10000 random geometries causal; default pair spacelike (Δt 0.1 < l_ab 1)".into())
}

fn marginal_uniformity() -> Check {
    let band = four_sigma(N);
    let mut parts = Vec::new();
    for source in [SourceModel::Entangled, SourceModel::Independent] {
        let recs = run_experiment(
            &GeometryConfig::default(),
            &source,
            &RngPolicy::new(SEED),
            N,
        )
        .map_err(|e| e.to_string())?;
        let emp = EmpiricalJoint::from_records(&recs);
        let alice = emp
            .plus_fraction(Party::Electron)
            .map_err(|e| e.to_string())?;
        let bob = emp
            .plus_fraction(Party::Positron)
            .map_err(|e| e.to_string())?;
        let forecaster = RngPolicy::new(SEED).derive(FORECASTER_DOMAIN);
        let agnostic = score_forecasts(ForecastPolicy::Agnostic, &recs, &forecaster)
            .map_err(|e| e.to_string())?;
        let name = source.name();
        within(alice, 0.5, band, &format!("{name} Alice Plus-fraction"))?;
        within(bob, 0.5, band, &format!("{name} Bob Plus-fraction"))?;
        within(agnostic, 0.5, band, &format!("{name} agnostic accuracy"))?;
        parts.push(format!(
            "{name}: A {alice:.4} B {bob:.4} agnostic {agnostic:.4}"
        ));
    }
    Ok(parts.join("; "))
}

fn random_joint(s: &mut TrialStream) -> JointPairDistribution {
    let w: Vec<f64> = (0..4).map(|_| s.uniform() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let c: Vec<f64> = w.iter().map(|x| x / total).collect();
    // push rounding residue into the last cell
    let last = 1.0 - c[0] - c[1] - c[2];
    JointPairDistribution::new([[c[0], c[1]], [c[2], last]]).expect("valid random joint")
}

fn random_product(s: &mut TrialStream) -> JointPairDistribution {
    let a = s.uniform();
    let b = s.uniform();
    JointPairDistribution::product(
        &OutcomeDistribution::new(a, 1.0 - a).unwrap(),
        &OutcomeDistribution::new(b, 1.0 - b).unwrap(),
    )
}

fn properties() -> Check {
    let mut s = RngPolicy::new(SEED).stream(7);
    for _ in 0..1000 {
        let j = random_joint(&mut s);
        let mi = mutual_information(&j).0;
        ensure(mi >= 0.0, format!("negative MI {mi}"))?;
        let product = JointPairDistribution::product(
            &marginal(&j, Party::Electron),
            &marginal(&j, Party::Positron),
        );
        let gap = j
            .iter()
            .zip(product.iter())
            .map(|((_, _, p), (_, _, q))| (p - q).abs())
            .fold(0.0, f64::max);
        ensure(
            gap <= 1e-12 || mi > 0.0,
            format!("MI 0 for non-product joint {j:?}"),
        )?;
        within(
            pseudo_information(&j).0,
            mi,
            1e-10,
            "pseudo vs mutual information",
        )?;

        let p = random_product(&mut s);
        let mi = mutual_information(&p).0;
        ensure(
            (0.0..=EXACT).contains(&mi),
            format!("product joint MI {mi}"),
        )?;
        within(
            pseudo_information(&p).0,
            mi,
            1e-10,
            "pseudo vs mutual information (product)",
        )?;
    }

    let dirs = [
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    ];
    let mut logs = Vec::new();
    let mut summaries = Vec::new();
    for d in &dirs {
        let cfg = RunConfig {
            master_seed: SEED,
            n_trials: 20_000,
            out_dir: d.path().to_path_buf(),
            timestamp: false,
            source: SourceModel::Independent,
            ..RunConfig::default()
        };
        cli::run(&cfg).map_err(|e| e.to_string())?;
        logs.push(std::fs::read(d.path().join(cli::TRIAL_LOG_FILE)).map_err(|e| e.to_string())?);
        summaries.push(std::fs::read(d.path().join(cli::SUMMARY_FILE)).map_err(|e| e.to_string())?);
    }
    ensure(logs[0] == logs[1], "trial logs differ")?;
    ensure(summaries[0] == summaries[1], "summaries differ")?;
    let lines = logs[0].iter().filter(|&&b| b == b'\n').count();
    ensure(lines == 20_000, format!("trial log has {lines} lines"))?;
    Ok("1000 random + 1000 product joints; trial log byte-identical across runs".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 analytic ledger", analytic_ledger),
        ("2 entangled source", entangled_source),
        ("3 independent source", independent_source),
        ("4 posterior oracle", posterior_oracle),
        ("5 causality", causality),
        ("6 marginal uniformity", marginal_uniformity),
        ("7 property suites", properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name:<24} {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all {} acceptance criteria passed", criteria.len());
}
